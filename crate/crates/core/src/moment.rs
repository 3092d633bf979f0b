//! Functionals on the space of symplectic connections, their Hamiltonian
//! fields, the Poisson bracket and the affine actions.
//!
//! The symplectic form on cubic fields is `Omega(a, b) = <<a, b>>`, which is
//! antisymmetric in degree 3. Hamiltonian fields are normalized by
//! `delta_Pi F = Omega(Pi, H_F)`.

use crate::calculus::{delta_star, is_closed};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::geometry::{cahen_gutt, mat_mul, op_h, op_l, ricci, ricci_power_lowered, Curvature};
use crate::interp::{nodes, poly_coeffs};
use crate::lie::{bracket_truncated, BracketParams, ExtElement, FormalSum, HamSec, Truncation};
use crate::scalars::{Rational, Real, TrigScalar};
use crate::tensors::{pairing, SymTensorField};

/// A functional together with its defining data.
#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalId<R> {
    /// `Theta(nabla) = <<dir, nabla - reference>>`.
    Theta { reference: Connection<R>, dir: SymTensorField<R> },
    /// `R_alpha(nabla) = <<alpha, Ric(nabla)>>`.
    RAlpha { alpha: SymTensorField<R> },
    /// `R_(k)(nabla) = -1/(2k) mean tr Rc^{2k}`.
    RK { k: u32 },
    /// `E_f(nabla) = mean f(K(nabla))` for a polynomial `f = sum c_i x^i`.
    EPoly { coeffs: Vec<R> },
    /// `p <<a_0, K>> + q R_{a_2} + r Theta_{reference, a_3}` in Hamiltonian-section coordinates.
    Mpqr { p: R, q: R, r: R, a0: TrigScalar<R>, a2: SymTensorField<R>, a3: SymTensorField<R>, reference: Connection<R> },
    /// `t^2 (1 - kappa^2 + t^2 E + 18 s^2 R_(1))` with `E = E_{x^2}` and `kappa = 0`.
    NSt { s: R, t: R },
    /// Descent objective `t^2 E + 2 s^2 R_(1)`.
    JSt { s: R, t: R },
}

fn torsion_free<R: Real>(c: &Connection<R>, what: &'static str) -> Result<()> {
    if c.is_torsion_free() {
        Ok(())
    } else {
        Err(Error::Torsion(what))
    }
}

fn degree(a: &SymTensorField<impl Real>, k: usize, what: &str) -> Result<()> {
    if a.degree() != k {
        return Err(Error::DegreeMismatch(format!("{what} needs degree {k}, got {}", a.degree())));
    }
    Ok(())
}

impl<R: Real> FunctionalId<R> {
    pub fn theta(reference: Connection<R>, dir: SymTensorField<R>) -> Result<Self> {
        degree(&dir, 3, "theta direction")?;
        torsion_free(&reference, "theta reference")?;
        if reference.model() != dir.model() {
            return Err(Error::ModelMismatch);
        }
        Ok(FunctionalId::Theta { reference, dir })
    }

    pub fn r_alpha(alpha: SymTensorField<R>) -> Result<Self> {
        degree(&alpha, 2, "r_alpha")?;
        Ok(FunctionalId::RAlpha { alpha })
    }

    pub fn r_k(k: u32) -> Result<Self> {
        if k < 1 {
            return Err(Error::Invalid("R_(k) needs k >= 1".into()));
        }
        Ok(FunctionalId::RK { k })
    }

    pub fn e_poly(coeffs: Vec<R>) -> Self {
        FunctionalId::EPoly { coeffs }
    }

    /// `E = E_{x^2}`.
    pub fn energy() -> Self {
        Self::e_poly(vec![R::zero(), R::zero(), R::one()])
    }

    pub fn m_pqr(p: R, q: R, r: R, alpha: &HamSec<R>, reference: Connection<R>) -> Result<Self> {
        torsion_free(&reference, "moment reference")?;
        let s = alpha.sum();
        if s.model() != reference.model() {
            return Err(Error::ModelMismatch);
        }
        if s.n_max() < 3 {
            return Err(Error::DegreeMismatch("moment functional needs parts up to degree 3".into()));
        }
        Ok(FunctionalId::Mpqr {
            p,
            q,
            r,
            a0: alpha.scalar(),
            a2: s.part(2).clone(),
            a3: s.part(3).clone(),
            reference,
        })
    }

    /// `M_alpha = M^{-1,3,3}_alpha`.
    pub fn moment(alpha: &HamSec<R>, reference: Connection<R>) -> Result<Self> {
        Self::m_pqr(R::from_int(-1), R::from_int(3), R::from_int(3), alpha, reference)
    }

    /// `M_{j a}` for an element of the extended quotient.
    pub fn moment_ext(a: &ExtElement<R>, reference: Connection<R>) -> Result<Self> {
        Self::moment(&a.j_hat(), reference)
    }

    pub fn n_st(p: &BracketParams<R>) -> Self {
        FunctionalId::NSt { s: p.s.clone(), t: p.t.clone() }
    }

    pub fn j_st(p: &BracketParams<R>) -> Self {
        FunctionalId::JSt { s: p.s.clone(), t: p.t.clone() }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            FunctionalId::Theta { .. } => "theta",
            FunctionalId::RAlpha { .. } => "r_alpha",
            FunctionalId::RK { .. } => "r_k",
            FunctionalId::EPoly { .. } => "e_poly",
            FunctionalId::Mpqr { .. } => "m_pqr",
            FunctionalId::NSt { .. } => "n_st",
            FunctionalId::JSt { .. } => "j_st",
        }
    }

    /// Degree in `t` of `t -> F(nabla + t Pi)`, an upper bound.
    pub fn variation_degree(&self) -> usize {
        match self {
            FunctionalId::Theta { .. } => 1,
            FunctionalId::RAlpha { .. } => 2,
            FunctionalId::RK { k } => 4 * *k as usize,
            FunctionalId::EPoly { coeffs } => 4 * coeffs.len().saturating_sub(1),
            FunctionalId::Mpqr { .. } => 4,
            FunctionalId::NSt { .. } | FunctionalId::JSt { .. } => 8,
        }
    }

    /// Same functional with double coefficients.
    pub fn to_f64(&self) -> FunctionalId<f64> {
        let f = |x: &R| x.to_f64();
        match self {
            FunctionalId::Theta { reference, dir } => FunctionalId::Theta { reference: reference.to_f64(), dir: dir.map_coeffs(f) },
            FunctionalId::RAlpha { alpha } => FunctionalId::RAlpha { alpha: alpha.map_coeffs(f) },
            FunctionalId::RK { k } => FunctionalId::RK { k: *k },
            FunctionalId::EPoly { coeffs } => FunctionalId::EPoly { coeffs: coeffs.iter().map(f).collect() },
            FunctionalId::Mpqr { p, q, r, a0, a2, a3, reference } => FunctionalId::Mpqr {
                p: f(p),
                q: f(q),
                r: f(r),
                a0: a0.map_coeffs(f),
                a2: a2.map_coeffs(f),
                a3: a3.map_coeffs(f),
                reference: reference.to_f64(),
            },
            FunctionalId::NSt { s, t } => FunctionalId::NSt { s: f(s), t: f(t) },
            FunctionalId::JSt { s, t } => FunctionalId::JSt { s: f(s), t: f(t) },
        }
    }
}

pub(crate) fn difference<R: Real>(c: &Connection<R>, reference: &Connection<R>) -> Result<SymTensorField<R>> {
    if c.model() != reference.model() {
        return Err(Error::ModelMismatch);
    }
    c.pi_sym()?.sub(&reference.pi_sym()?)
}

fn poly_eval<R: Real>(coeffs: &[R], x: &TrigScalar<R>) -> TrigScalar<R> {
    let mut acc = TrigScalar::zero(x.dim());
    for c in coeffs.iter().rev() {
        acc = acc.mul_ref(x);
        acc += &TrigScalar::constant(x.dim(), c.clone());
    }
    acc
}

fn poly_derivative<R: Real>(coeffs: &[R]) -> Vec<R> {
    coeffs.iter().enumerate().skip(1).map(|(i, c)| c.times(&R::from_int(i as i64))).collect()
}

/// `mean tr Rc^m`.
pub fn ricci_trace<R: Real>(cv: &Curvature<R>, m: u32) -> R {
    let e = cv.ricci_endomorphism();
    let mut p = e.clone();
    for _ in 1..m {
        p = mat_mul(&p, &e);
    }
    let mut acc = R::zero();
    for (i, row) in p.iter().enumerate() {
        acc.add_mut(&row[i].mean());
    }
    acc
}

/// `R_(k)` from a precomputed curvature.
fn r_k_value<R: Real>(cv: &Curvature<R>, k: u32) -> R {
    ricci_trace(cv, 2 * k).times(&R::from_ratio(-1, 2 * k as i64))
}

/// Value of the functional at a torsion-free connection.
pub fn evaluate<R: Real>(fid: &FunctionalId<R>, c: &Connection<R>) -> Result<R> {
    torsion_free(c, "evaluate")?;
    let sq = |x: &R| x.times(x);
    Ok(match fid {
        FunctionalId::Theta { reference, dir } => pairing(dir, &difference(c, reference)?)?,
        FunctionalId::RAlpha { alpha } => pairing(alpha, &ricci(c)?)?,
        FunctionalId::RK { k } => r_k_value(&Curvature::of(c), *k),
        FunctionalId::EPoly { coeffs } => poly_eval(coeffs, &cahen_gutt(c)?).mean(),
        FunctionalId::Mpqr { p, q, r, a0, a2, a3, reference } => {
            let k = cahen_gutt(c)?;
            p.times(&a0.mean_product(&k))
                .plus(&q.times(&pairing(a2, &ricci(c)?)?))
                .plus(&r.times(&pairing(a3, &difference(c, reference)?)?))
        }
        FunctionalId::NSt { s, t } => {
            let (e, r1) = energy_and_r1(c)?;
            let inner = R::one().plus(&sq(t).times(&e)).plus(&R::from_int(18).times(&sq(s)).times(&r1));
            sq(t).times(&inner)
        }
        FunctionalId::JSt { s, t } => {
            let (e, r1) = energy_and_r1(c)?;
            sq(t).times(&e).plus(&R::from_int(2).times(&sq(s)).times(&r1))
        }
    })
}

fn energy_and_r1<R: Real>(c: &Connection<R>) -> Result<(R, R)> {
    let k = cahen_gutt(c)?;
    Ok((k.mean_product(&k), r_k_value(&Curvature::of(c), 1)))
}

/// Closed-form Hamiltonian field, normalized by `delta_Pi F = Omega(Pi, H_F)`.
pub fn hamiltonian_field<R: Real>(fid: &FunctionalId<R>, c: &Connection<R>) -> Result<SymTensorField<R>> {
    torsion_free(c, "hamiltonian_field")?;
    let m = c.model();
    let sq = |x: &R| x.times(x);
    let h_k = |scale: R| -> Result<SymTensorField<R>> { Ok(op_h(c, &cahen_gutt(c)?)?.scale(&scale)) };
    let ds_ric = |scale: R| -> Result<SymTensorField<R>> { Ok(delta_star(c, &ricci(c)?)?.scale(&scale)) };
    match fid {
        FunctionalId::Theta { dir, .. } => Ok(dir.neg()),
        FunctionalId::RAlpha { alpha } => Ok(delta_star(c, alpha)?.neg()),
        FunctionalId::RK { k } => {
            let pow = ricci_power_lowered(&Curvature::of(c), 2 * k - 1).to_sym(m)?;
            Ok(delta_star(c, &pow)?.neg())
        }
        FunctionalId::EPoly { coeffs } => {
            let fp = poly_eval(&poly_derivative(coeffs), &cahen_gutt(c)?);
            Ok(op_h(c, &fp)?.neg())
        }
        FunctionalId::Mpqr { p, q, r, a0, a2, a3, .. } => {
            let h = op_h(c, a0)?.scale(p).add(&delta_star(c, a2)?.scale(q))?.add(&a3.scale(r))?;
            Ok(h.neg())
        }
        FunctionalId::NSt { s, t } => {
            let inner = h_k(R::from_int(2).times(&sq(t)))?.add(&ds_ric(R::from_int(18).times(&sq(s)))?)?;
            Ok(inner.scale(&sq(t)).neg())
        }
        FunctionalId::JSt { s, t } => {
            let inner = h_k(R::from_int(2).times(&sq(t)))?.add(&ds_ric(R::from_int(2).times(&sq(s)))?)?;
            Ok(inner.neg())
        }
    }
}

/// `Omega(a, b) = <<a, b>>` on cubic fields.
pub fn symplectic_form<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<R> {
    degree(a, 3, "symplectic form")?;
    pairing(a, b)
}

/// `{{F, G}}(nabla) = Omega(H_F, H_G)`.
pub fn poisson_functionals<R: Real>(f1: &FunctionalId<R>, f2: &FunctionalId<R>, c: &Connection<R>) -> Result<R> {
    symplectic_form(&hamiltonian_field(f1, c)?, &hamiltonian_field(f2, c)?)
}

/// `d/dt F(nabla + t Pi)` at `t = 0`, by exact interpolation.
pub fn first_variation(fid: &FunctionalId<Rational>, c: &Connection<Rational>, dir: &SymTensorField<Rational>) -> Result<Rational> {
    degree(dir, 3, "variation direction")?;
    let ns = nodes(fid.variation_degree() + 1);
    let vals = ns.iter().map(|t| evaluate(fid, &c.shifted_sym(dir, t)?)).collect::<Result<Vec<_>>>()?;
    Ok(poly_coeffs(&ns, &vals)[1].clone())
}

/// Image of a connection under the equivariant moment map, an element of the extended quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentImage<R> {
    pub ext: ExtElement<R>,
}

impl<R: Real> MomentImage<R> {
    /// `M-hat_alpha(nabla) = <<alpha, M-hat(nabla)>>`.
    pub fn evaluate(&self, alpha: &ExtElement<R>) -> Result<R> {
        alpha.pairing(&self.ext)
    }
}

/// `psi_{s,t}(1 + Kbar + 3 Ric + 3 (nabla - reference))`; the unscaled constant part is 1.
pub fn moment_hat<R: Real>(c: &Connection<R>, reference: &Connection<R>, p: &BracketParams<R>) -> Result<MomentImage<R>> {
    torsion_free(c, "moment_hat")?;
    let d = c.dim();
    let k = cahen_gutt(c)?;
    let kbar = &k - &TrigScalar::constant(d, k.mean());
    let a0 = &TrigScalar::constant(d, R::one()) + &kbar;
    let three = R::from_int(3);
    let ext = ExtElement::new(a0, ricci(c)?.scale(&three), difference(c, reference)?.scale(&three))?;
    Ok(MomentImage { ext: ext.psi(p)? })
}

/// Closed-form and pairing-form values of the normalized energy at the same point.
#[derive(Clone, Debug, PartialEq)]
pub struct EnergyComparison<R> {
    pub closed_form: R,
    pub pairing_form: R,
    pub difference: R,
}

/// Compares `N_{s,t}` with `<<M-hat, M-hat>>`.
pub fn compare_energy<R: Real>(c: &Connection<R>, reference: &Connection<R>, p: &BracketParams<R>) -> Result<EnergyComparison<R>> {
    let closed_form = evaluate(&FunctionalId::n_st(p), c)?;
    let mh = moment_hat(c, reference, p)?;
    let pairing_form = mh.ext.pairing(&mh.ext)?;
    let difference = closed_form.minus(&pairing_form);
    Ok(EnergyComparison { closed_form, pairing_form, difference })
}

/// Something that acts affinely on connections.
#[derive(Debug)]
pub enum Acting<'a, R> {
    /// Quotient element: `nabla + H(a_0) + 3 delta* a_2 + 3 a_3`.
    Ext(&'a ExtElement<R>),
    /// Hamiltonian section: `nabla - H(a_0) + 3 delta* a_2 + 3 a_3`.
    Ham(&'a HamSec<R>),
    /// Closed degree-one part and higher: `nabla + L(a_1) + 3 delta* a_2 + 3 a_3`.
    Top(&'a FormalSum<R>),
}

impl<R> Clone for Acting<'_, R> {
    fn clone(&self) -> Self {
        *self
    }
}

impl<R> Copy for Acting<'_, R> {}

/// Increment `a . nabla - nabla`.
pub fn action_increment<R: Real>(a: Acting<'_, R>, c: &Connection<R>) -> Result<SymTensorField<R>> {
    torsion_free(c, "affine_action")?;
    let three = R::from_int(3);
    let tail = |a2: &SymTensorField<R>, a3: &SymTensorField<R>| -> Result<SymTensorField<R>> {
        delta_star(c, a2)?.scale(&three).add(&a3.scale(&three))
    };
    match a {
        Acting::Ext(e) => op_h(c, &e.a0)?.add(&tail(&e.a2, &e.a3)?),
        Acting::Ham(h) => {
            let s = h.sum().retruncate(3);
            op_h(c, &h.scalar())?.neg().add(&tail(s.part(2), s.part(3))?)
        }
        Acting::Top(s) => {
            let s = s.retruncate(3);
            if !is_closed(s.part(1))? {
                return Err(Error::NotClosed);
            }
            op_l(c, s.part(1))?.add(&tail(s.part(2), s.part(3))?)
        }
    }
}

pub fn affine_action<R: Real>(a: Acting<'_, R>, c: &Connection<R>) -> Result<Connection<R>> {
    c.shifted_sym(&action_increment(a, c)?, &R::one())
}

/// Cubic part that makes `a_1 + a_2 + a_3` fix `nabla`: `3 a_3 = -L(a_1) - 3 delta* a_2`.
pub fn stabilizer_cubic<R: Real>(a1: &SymTensorField<R>, a2: &SymTensorField<R>, c: &Connection<R>) -> Result<SymTensorField<R>> {
    torsion_free(c, "stabilizer")?;
    if !is_closed(a1)? {
        return Err(Error::NotClosed);
    }
    let l = op_l(c, a1)?.scale(&R::from_ratio(1, 3));
    Ok(l.add(&delta_star(c, a2)?)?.neg())
}

/// `{{M_a, M_b}}(nabla) - M_{[a, b]}(nabla)` for quotient elements.
pub fn equivariance_defect<R: Real>(a: &ExtElement<R>, b: &ExtElement<R>, c: &Connection<R>, reference: &Connection<R>) -> Result<R> {
    let ma = FunctionalId::moment_ext(a, reference.clone())?;
    let mb = FunctionalId::moment_ext(b, reference.clone())?;
    let mab = FunctionalId::moment_ext(&a.bracket(b)?, reference.clone())?;
    Ok(poisson_functionals(&ma, &mb, c)?.minus(&evaluate(&mab, c)?))
}

/// Residual fields of the three critical-point equations.
#[derive(Clone, Debug, PartialEq)]
pub struct Residuals<R> {
    /// `delta* Ric`
    pub preferred: SymTensorField<R>,
    /// `H(K)`
    pub critical: SymTensorField<R>,
    /// `t^2 H(K) + s^2 delta* Ric`
    pub coupled: SymTensorField<R>,
}

pub fn residuals<R: Real>(c: &Connection<R>, p: &BracketParams<R>) -> Result<Residuals<R>> {
    torsion_free(c, "residuals")?;
    let preferred = delta_star(c, &ricci(c)?)?;
    let critical = op_h(c, &cahen_gutt(c)?)?;
    let coupled = critical.scale(&p.t.times(&p.t)).add(&preferred.scale(&p.s.times(&p.s)))?;
    Ok(Residuals { preferred, critical, coupled })
}

/// The bracket acting through [`Acting::Top`].
pub fn top_bracket<R: Real>(a: &FormalSum<R>, b: &FormalSum<R>) -> Result<FormalSum<R>> {
    bracket_truncated(Truncation::Top, &a.retruncate(3), &b.retruncate(3))
}
