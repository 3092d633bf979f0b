//! Curvature of symplectic connections and the operators built from it.
//!
//! Curvature follows `2 nabla_[i nabla_j] X^k = R_{ijp}^k X^p - tau_{ij}^p nabla_p X^k`,
//! Ricci is `R_{ij} = R_{pij}^p`, and the lowered tensor is
//! `R_{ijkl} = R_{ijk}^p Omega_{pl}`.

use rayon::prelude::*;

use crate::calculus::{delta, delta_star, flat_of, VectorField};
use crate::connection::{difference_pairing, Connection};
use crate::error::{Error, Result};
use crate::interp::{nodes, poly_coeffs};
use crate::scalars::{Rational, Real, TrigScalar};
use crate::tensors::{all_tuples, fiber_contraction, mean_contraction, MixedTensorField, SymTensorField, SymplecticModel, Tensor};

/// Lowered curvature and Ricci tensors of a connection.
#[derive(Clone, Debug, PartialEq)]
pub struct Curvature<R> {
    model: SymplecticModel,
    riem: Tensor<R>,
    ricci: Tensor<R>,
}

impl<R: Real> Curvature<R> {
    pub fn of(c: &Connection<R>) -> Self {
        let m = c.model();
        let d = m.dim();
        let pi = c.pi();
        // Pi_{jk}^q = sign(q) Pi_{jk partner(q)}
        let up = |a: usize, b: usize, q: usize| (m.sign(q), pi.at(&[a as u8, b as u8, m.partner(q) as u8]));
        let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
        let blocks: Vec<((usize, usize), Vec<TrigScalar<R>>)> = pairs
            .par_iter()
            .map(|&(i, j)| {
                let mut vals = Vec::with_capacity(d * d);
                for k in 0..d {
                    for l in 0..d {
                        let (iu, ju, ku, lu) = (i as u8, j as u8, k as u8, l as u8);
                        let mut r = pi.at(&[ju, ku, lu]).partial(i).expect("axis");
                        r -= &pi.at(&[iu, ku, lu]).partial(j).expect("axis");
                        for qq in 0..d {
                            let qu = qq as u8;
                            let (s1, jk) = up(j, k, qq);
                            let a = pi.at(&[iu, qu, lu]);
                            if !a.is_zero() && !jk.is_zero() {
                                r.add_scaled(&(a * jk), &R::from_int(s1));
                            }
                            let (s2, ik) = up(i, k, qq);
                            let b = pi.at(&[ju, qu, lu]);
                            if !b.is_zero() && !ik.is_zero() {
                                r.add_scaled(&(b * ik), &R::from_int(-s2));
                            }
                        }
                        vals.push(r);
                    }
                }
                ((i, j), vals)
            })
            .collect();
        let mut riem = Tensor::zeros(d, 4);
        for ((i, j), vals) in blocks {
            for (n, v) in vals.into_iter().enumerate() {
                let (k, l) = ((n / d) as u8, (n % d) as u8);
                riem.set(&[j as u8, i as u8, k, l], -&v);
                riem.set(&[i as u8, j as u8, k, l], v);
            }
        }
        let ricci = Tensor::from_fn(d, 2, |ij| {
            let mut acc = TrigScalar::zero(d);
            for p in 0..d {
                let v = riem.at(&[p as u8, ij[0], ij[1], m.partner(p) as u8]);
                acc.add_scaled(v, &R::from_int(m.sign(p)));
            }
            acc
        });
        Curvature { model: m, riem, ricci }
    }

    pub fn model(&self) -> SymplecticModel {
        self.model
    }
    /// `R_{ijkl}`.
    pub fn riem(&self) -> &Tensor<R> {
        &self.riem
    }
    /// `R_{ij}` as a dense tensor (not symmetric in the presence of torsion).
    pub fn ricci_tensor(&self) -> &Tensor<R> {
        &self.ricci
    }
    /// `R_{ij}` as a symmetric field.
    pub fn ricci(&self) -> Result<SymTensorField<R>> {
        self.ricci.to_sym(self.model)
    }
    /// `R_{ij[kl]}` as a `W^{2,2}` field; errors if the last pair is not symmetric.
    pub fn as_mixed(&self) -> Result<MixedTensorField<R>> {
        MixedTensorField::new(self.model, 2, 2, self.riem.clone())
    }
    /// `R_p^p_{ij} = Omega^{pq} R_{pqij}`.
    pub fn first_trace(&self) -> Tensor<R> {
        let m = self.model;
        Tensor::from_fn(m.dim(), 2, |ij| {
            let mut acc = TrigScalar::zero(m.dim());
            for p in 0..m.dim() {
                acc.add_scaled(self.riem.at(&[p as u8, m.partner(p) as u8, ij[0], ij[1]]), &R::from_int(m.sign(p)));
            }
            acc
        })
    }
    /// Ricci endomorphism `Rc_i^j = Omega^{jp} R_{ip}` as a matrix `[i][j]`.
    pub fn ricci_endomorphism(&self) -> Vec<Vec<TrigScalar<R>>> {
        let m = self.model;
        (0..m.dim())
            .map(|i| {
                (0..m.dim())
                    .map(|j| self.ricci.at(&[i as u8, m.partner(j) as u8]).scale(&R::from_int(m.sign(j))))
                    .collect()
            })
            .collect()
    }
}

/// Symmetric Ricci field of a torsion-free connection.
pub fn ricci<R: Real>(c: &Connection<R>) -> Result<SymTensorField<R>> {
    Curvature::of(c).ricci()
}

fn require_torsion_free<R: Real>(c: &Connection<R>, what: &'static str) -> Result<()> {
    if c.is_torsion_free() {
        Ok(())
    } else {
        Err(Error::Torsion(what))
    }
}

/// `K = -delta^2 Ric - 1/2 R^{ij} R_{ij} + 1/4 R^{ijkl} R_{ijkl}`.
pub fn cahen_gutt<R: Real>(c: &Connection<R>) -> Result<TrigScalar<R>> {
    require_torsion_free(c, "cahen_gutt")?;
    let cv = Curvature::of(c);
    let m = c.model();
    let ric = cv.ricci()?;
    let dd = delta(c, &delta(c, &ric)?)?.as_scalar();
    let mut k = -&dd;
    k.add_scaled(&fiber_contraction(m, cv.ricci_tensor(), cv.ricci_tensor()), &R::from_ratio(-1, 2));
    k.add_scaled(&fiber_contraction(m, cv.riem(), cv.riem()), &R::from_ratio(1, 4));
    Ok(k)
}

/// `mean(K)` computed term by term, without forming the quadratic fields.
pub fn cahen_gutt_mean<R: Real>(c: &Connection<R>) -> Result<R> {
    require_torsion_free(c, "cahen_gutt_mean")?;
    let cv = Curvature::of(c);
    let m = c.model();
    let ric = cv.ricci()?;
    let dd = delta(c, &delta(c, &ric)?)?.as_scalar().mean();
    let quad_ric = mean_contraction(m, cv.ricci_tensor(), cv.ricci_tensor());
    let quad_riem = mean_contraction(m, cv.riem(), cv.riem());
    Ok(dd.negated().minus(&quad_ric.times(&R::from_ratio(1, 2))).plus(&quad_riem.times(&R::from_ratio(1, 4))))
}

fn second_covariant<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Tensor<R> {
    let na = c.covariant_derivative(a);
    c.covariant_derivative(&na)
}

/// `X^p R_{pijk}` for a one-form `a` with `X = a^sharp`.
fn contract_first<R: Real>(cv: &Curvature<R>, a: &SymTensorField<R>) -> Tensor<R> {
    let m = cv.model;
    Tensor::from_fn(m.dim(), 3, |ijk| {
        let mut acc = TrigScalar::zero(m.dim());
        for p in 0..m.dim() {
            // a^p = sign(p) a_{partner(p)}
            let ap = a.get(&[m.partner(p) as u8]);
            if ap.is_zero() {
                continue;
            }
            let r = cv.riem.at(&[p as u8, ijk[0], ijk[1], ijk[2]]);
            if !r.is_zero() {
                acc.add_scaled(&(ap.as_ref() * r), &R::from_int(m.sign(p)));
            }
        }
        acc
    })
}

/// Lie derivative of the connection along `X`:
/// `(L_X nabla)_{ijk} = nabla_i nabla_j X_k + X^p R_{pijk}`.
pub fn lie_derivative_connection<R: Real>(c: &Connection<R>, x: &VectorField<R>) -> Result<Tensor<R>> {
    let m = c.model();
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: x.len() });
    }
    let xf = flat_of(m, x);
    let cv = Curvature::of(c);
    Ok(second_covariant(c, &xf).add(&contract_first(&cv, &xf)))
}

/// `L(a)_{ijk} = nabla_(i nabla_j a_k) + a^p R_{p(ijk)}` on one-forms.
pub fn op_l<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    require_torsion_free(c, "op_l")?;
    if a.degree() != 1 {
        return Err(Error::DegreeMismatch("op_l acts on one-forms".into()));
    }
    let cv = Curvature::of(c);
    Ok(second_covariant(c, a).add(&contract_first(&cv, a)).symmetrize(c.model()))
}

/// `H(f) = L(delta* f)`, the Lie derivative of the connection along `H_f`.
pub fn op_h<R: Real>(c: &Connection<R>, f: &TrigScalar<R>) -> Result<SymTensorField<R>> {
    let df = delta_star(c, &SymTensorField::scalar(c.model(), f.clone()))?;
    op_l(c, &df)
}

/// `S(b)_i = b^{abc} R_{iabc}` on cubic fields.
pub fn op_s<R: Real>(c: &Connection<R>, b: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if b.degree() != 3 {
        return Err(Error::DegreeMismatch("op_s acts on cubic fields".into()));
    }
    let m = c.model();
    let cv = Curvature::of(c);
    let mut out = SymTensorField::zero(m, 1);
    for i in 0..m.dim() {
        let mut acc = TrigScalar::zero(m.dim());
        for abc in all_tuples(m.dim(), 3) {
            let (s, img) = m.raise_tuple(&abc);
            let bv = b.get(&img);
            if bv.is_zero() {
                continue;
            }
            let r = cv.riem.at(&[i as u8, abc[0], abc[1], abc[2]]);
            if !r.is_zero() {
                acc.add_scaled(&(bv.as_ref() * r), &R::from_int(s));
            }
        }
        out.set(&[i as u8], acc);
    }
    Ok(out)
}

/// `S*(a)_{ijk} = -a^p R_{p(ijk)}` on one-forms.
pub fn op_s_star<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if a.degree() != 1 {
        return Err(Error::DegreeMismatch("op_s_star acts on one-forms".into()));
    }
    let cv = Curvature::of(c);
    Ok(contract_first(&cv, a).symmetrize(c.model()).neg())
}

/// `B(Pi)_{ij} = Pi_{ip}^q Pi_{jq}^p`.
pub fn quadratic_b<R: Real>(model: SymplecticModel, pi: &SymTensorField<R>) -> SymTensorField<R> {
    let d = model.dim();
    let up = |a: usize, b: usize, q: usize| -> TrigScalar<R> {
        pi.get(&[a as u8, b as u8, model.partner(q) as u8]).scale(&R::from_int(model.sign(q)))
    };
    Tensor::from_fn(d, 2, |ij| {
        let mut acc = TrigScalar::zero(d);
        for p in 0..d {
            for q in 0..d {
                let a = up(ij[0] as usize, p, q);
                if a.is_zero() {
                    continue;
                }
                acc += &(&a * &up(ij[1] as usize, q, p));
            }
        }
        acc
    })
    .symmetrize(model)
}

/// `(Pi * Pi)_i = 3 delta B(Pi)_i - Pi^{abc} nabla_i Pi_{abc}`.
pub fn pi_star_pi<R: Real>(c: &Connection<R>, pi: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    let m = c.model();
    let b = delta(c, &quadratic_b(m, pi))?;
    let mut out = b.scale(&R::from_int(3));
    for i in 0..m.dim() {
        let mut acc = TrigScalar::zero(m.dim());
        for abc in all_tuples(m.dim(), 3) {
            let (s, img) = m.raise_tuple(&abc);
            let pv = pi.get(&img);
            if pv.is_zero() {
                continue;
            }
            acc.add_scaled(&(pv.as_ref() * &c.cov_entry(pi, i, &abc)), &R::from_int(-s));
        }
        let cur = out.get(&[i as u8]).into_owned();
        out.set(&[i as u8], &cur + &acc);
    }
    Ok(out)
}

/// Matrix product `(A B)[i][j] = sum_p A[i][p] B[p][j]` of field-valued matrices.
pub fn mat_mul<R: Real>(a: &[Vec<TrigScalar<R>>], b: &[Vec<TrigScalar<R>>]) -> Vec<Vec<TrigScalar<R>>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut acc = TrigScalar::zero(a[i][0].dim());
                    for p in 0..d {
                        if !a[i][p].is_zero() && !b[p][j].is_zero() {
                            acc += &(&a[i][p] * &b[p][j]);
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// `m`-fold composition of the Ricci endomorphism, lowered: `(Rc^m)_{ij}`.
pub fn ricci_power_lowered<R: Real>(cv: &Curvature<R>, mpow: u32) -> Tensor<R> {
    let m = cv.model;
    let e = cv.ricci_endomorphism();
    let mut p = e.clone();
    for _ in 1..mpow {
        p = mat_mul(&p, &e);
    }
    Tensor::from_fn(m.dim(), 2, |ij| {
        // (A)_{ij} = A_i^p Omega_{pj}, p = partner(j)
        let pj = m.partner(ij[1] as usize);
        p[ij[0] as usize][pj].scale(&R::from_int(m.omega_lower(pj, ij[1] as usize)))
    })
}

/// Pointwise symplectic gauge transformation `g_i^j`.
#[derive(Clone, Debug, PartialEq)]
pub struct GaugeTransform<R> {
    model: SymplecticModel,
    g: Vec<Vec<TrigScalar<R>>>,
}

impl<R: Real> GaugeTransform<R> {
    /// Accepts `g` only if `g_i^p g_j^q Omega_{pq} = Omega_{ij}` holds identically.
    pub fn new(model: SymplecticModel, g: Vec<Vec<TrigScalar<R>>>) -> Result<Self> {
        let d = model.dim();
        if g.len() != d || g.iter().any(|r| r.len() != d) {
            return Err(Error::DimensionMismatch { expected: d, got: g.len() });
        }
        for i in 0..d {
            for j in 0..d {
                let mut acc = TrigScalar::zero(d);
                for p in 0..d {
                    let q = model.partner(p);
                    acc.add_scaled(&(&g[i][p] * &g[j][q]), &R::from_int(model.omega_lower(p, q)));
                }
                if acc != TrigScalar::constant(d, R::from_int(model.omega_lower(i, j))) {
                    return Err(Error::NotSymplectic);
                }
            }
        }
        Ok(GaugeTransform { model, g })
    }

    pub fn matrix(&self) -> &[Vec<TrigScalar<R>>] {
        &self.g
    }

    /// `g^{-1} = -Omega g^T Omega`.
    pub fn inverse(&self) -> Self {
        let m = self.model;
        let d = m.dim();
        let g = (0..d)
            .map(|a| {
                (0..d)
                    .map(|b| {
                        let (ap, bp) = (m.partner(a), m.partner(b));
                        self.g[bp][ap].scale(&R::from_int(m.sign(a) * m.sign(b)))
                    })
                    .collect()
            })
            .collect();
        GaugeTransform { model: m, g }
    }

    /// `(g h)_i^j = g_i^p h_p^j`.
    pub fn compose(&self, h: &Self) -> Self {
        GaugeTransform { model: self.model, g: mat_mul(&self.g, &h.g) }
    }

    /// `g . nabla = nabla + (g^{-1})_p^k nabla_i g_j^p`.
    pub fn act(&self, c: &Connection<R>) -> Result<Connection<R>> {
        let m = self.model;
        let d = m.dim();
        let ginv = self.inverse();
        let pu = |i: usize, j: usize, k: usize| -> TrigScalar<R> {
            let (s, v) = c.pi_up(i, j, k);
            v.scale(&R::from_int(s))
        };
        // nabla_i g_j^p
        let ng = |i: usize, j: usize, p: usize| -> TrigScalar<R> {
            let mut acc = self.g[j][p].partial(i).expect("axis");
            for q in 0..d {
                acc -= &(&pu(i, j, q) * &self.g[q][p]);
                acc += &(&pu(i, q, p) * &self.g[j][q]);
            }
            acc
        };
        let shift = Tensor::from_fn(d, 3, |ijk| {
            let (i, j, k) = (ijk[0] as usize, ijk[1] as usize, ijk[2] as usize);
            // lowered: Pi'_{ijk} = Omega_{mk} Pi'_{ij}^m with m = partner(k)
            let mk = m.partner(k);
            let mut acc = TrigScalar::zero(d);
            for p in 0..d {
                if !ginv.g[p][mk].is_zero() {
                    acc += &(&ginv.g[p][mk] * &ng(i, j, p));
                }
            }
            acc.scale(&R::from_int(m.omega_lower(mk, k)))
        });
        Connection::from_tensor(m, c.pi().add(&shift))
    }
}

/// `<<Gamma(nabla), a>> = -1/2 mean(a^{ij} R_p^p_{ij})`.
pub fn atiyah_bott_pairing<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Result<R> {
    if a.degree() != 2 {
        return Err(Error::DegreeMismatch("pairing with Gamma takes a quadratic field".into()));
    }
    let tr = Curvature::of(c).first_trace();
    Ok(mean_contraction(c.model(), &tr, a).times(&R::from_ratio(-1, 2)))
}

/// Dense `nabla_i a_{jk}`, whose negative is the Hamiltonian field of the pairing with `a`.
pub fn atiyah_bott_field<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Tensor<R> {
    c.covariant_derivative(a).scale(&R::from_int(-1))
}

/// Both sides of `delta_Pi <<Gamma, a>> = <<nabla a, Pi>>`: the variation by interpolation and the field pairing.
pub fn ab_variation_check(c: &Connection<Rational>, a: &SymTensorField<Rational>, dir: &Tensor<Rational>) -> Result<(Rational, Rational)> {
    let ns = nodes(3);
    let vals = ns.iter().map(|t| atiyah_bott_pairing(&c.shifted(dir, t)?, a)).collect::<Result<Vec<_>>>()?;
    let variation = poly_coeffs(&ns, &vals)[1].clone();
    let field = atiyah_bott_field(c, a);
    Ok((variation, -difference_pairing(c.model(), &field, dir)))
}
