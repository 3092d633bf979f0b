//! Symplectic connections `nabla = d + Pi` on the torus.
//!
//! The difference tensor is stored lowered, `Pi_{ijk} = Pi_{ij}^p Omega_{pk}`,
//! and is always symmetric in its last two slots. Torsion-free connections
//! have a fully symmetric `Pi`.

use std::borrow::Cow;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalars::{Rational, Real, TrigScalar};
use crate::tensors::{Components, SymTensorField, SymplecticModel, Tensor};

#[derive(Clone, Debug, PartialEq)]
pub struct Connection<R> {
    model: SymplecticModel,
    pi: Tensor<R>,
    torsion_free: bool,
}

pub type ExactConnection = Connection<Rational>;

impl<R: Real> Connection<R> {
    pub fn flat(model: SymplecticModel) -> Self {
        Connection { model, pi: Tensor::zeros(model.dim(), 3), torsion_free: true }
    }

    /// Torsion-free connection from a symmetric cubic field.
    pub fn from_sym(pi: &SymTensorField<R>) -> Result<Self> {
        if pi.degree() != 3 {
            return Err(Error::DegreeMismatch(format!("connection needs degree 3, got {}", pi.degree())));
        }
        Ok(Connection { model: pi.model(), pi: pi.to_dense(), torsion_free: true })
    }

    /// General symplectic connection; `Pi_{i[jk]}` must vanish.
    pub fn from_tensor(model: SymplecticModel, pi: Tensor<R>) -> Result<Self> {
        if pi.rank() != 3 || pi.dim() != model.dim() {
            return Err(Error::DegreeMismatch("difference tensor must have rank 3".into()));
        }
        if !pi.swap_defect(1, 2, false).is_zero() {
            return Err(Error::SymmetryViolation("Pi_{i[jk]} != 0: not symplectic".into()));
        }
        let torsion_free = pi.swap_defect(0, 1, false).is_zero();
        Ok(Connection { model, pi, torsion_free })
    }

    pub fn model(&self) -> SymplecticModel {
        self.model
    }
    pub fn dim(&self) -> usize {
        self.model.dim()
    }
    pub fn is_torsion_free(&self) -> bool {
        self.torsion_free
    }
    pub fn is_flat(&self) -> bool {
        self.pi.is_zero()
    }
    pub fn pi(&self) -> &Tensor<R> {
        &self.pi
    }

    /// `Pi` as a symmetric field (torsion-free only).
    pub fn pi_sym(&self) -> Result<SymTensorField<R>> {
        if !self.torsion_free {
            return Err(Error::Torsion("pi_sym"));
        }
        self.pi.to_sym(self.model)
    }

    /// `Pi_{ij}^k = Omega^{kq} Pi_{ijq}`.
    pub fn pi_up(&self, i: usize, j: usize, k: usize) -> (i64, &TrigScalar<R>) {
        let m = self.model;
        (m.sign(k), self.pi.at(&[i as u8, j as u8, m.partner(k) as u8]))
    }

    /// Torsion `tau_{ijk} = Pi_{ijk} - Pi_{jik}`.
    pub fn torsion(&self) -> Tensor<R> {
        self.pi.swap_defect(0, 1, false)
    }

    /// `nabla + t Pi'` for a difference tensor in the same shape.
    pub fn shifted(&self, dir: &Tensor<R>, t: &R) -> Result<Self> {
        let pi = self.pi.add(&dir.scale(t));
        Connection::from_tensor(self.model, pi)
    }

    pub fn shifted_sym(&self, dir: &SymTensorField<R>, t: &R) -> Result<Self> {
        self.shifted(&dir.to_dense(), t)
    }

    pub fn to_f64(&self) -> Connection<f64> {
        Connection { model: self.model, pi: self.pi.map_coeffs(|r| r.to_f64()), torsion_free: self.torsion_free }
    }

    /// One entry `nabla_i T_{J}` of the covariant derivative of a covariant tensor.
    pub fn cov_entry(&self, t: &dyn Components<R>, i: usize, idx: &[u8]) -> TrigScalar<R> {
        let m = self.model;
        let mut out = t.comp(idx).partial(i).expect("axis in range");
        if self.pi.is_zero() {
            return out;
        }
        let mut buf = idx.to_vec();
        for s in 0..idx.len() {
            let js = idx[s] as usize;
            for p in 0..m.dim() {
                let (sg, c) = self.pi_up(i, js, p);
                if c.is_zero() {
                    continue;
                }
                buf[s] = p as u8;
                let v = t.comp(&buf);
                if !v.is_zero() {
                    out.add_scaled(&(c * v.as_ref()), &R::from_int(-sg));
                }
            }
            buf[s] = idx[s];
        }
        out
    }

    /// Full covariant derivative, derivative slot first.
    pub fn covariant_derivative(&self, t: &dyn Components<R>) -> Tensor<R> {
        Tensor::from_fn(self.dim(), t.rank() + 1, |idx| self.cov_entry(t, idx[0] as usize, &idx[1..]))
    }
}

impl Connection<Rational> {
    /// Seeded random torsion-free connection.
    pub fn random(seed: u64, model: SymplecticModel, band: usize, mag: i64) -> Self {
        Connection::from_sym(&SymTensorField::random(seed, model, 3, band, mag)).expect("degree 3")
    }

    /// Seeded random symplectic connection with (generically) nonzero torsion.
    pub fn random_with_torsion(seed: u64, model: SymplecticModel, band: usize, mag: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let d = model.dim();
        let mut pi = Tensor::zeros(d, 3);
        for i in 0..d {
            for j in 0..d {
                for k in j..d {
                    let f = TrigScalar::random(&mut rng, d, band, mag);
                    pi.set(&[i as u8, k as u8, j as u8], f.clone());
                    pi.set(&[i as u8, j as u8, k as u8], f);
                }
            }
        }
        Connection::from_tensor(model, pi).expect("symmetric in the last pair")
    }
}

impl<R: Real> Components<R> for Connection<R> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn rank(&self) -> usize {
        3
    }
    fn comp(&self, idx: &[u8]) -> Cow<'_, TrigScalar<R>> {
        Cow::Borrowed(self.pi.at(idx))
    }
}

/// Plain pairing `mean(a_{ijk} b^{ijk})` between connection differences.
pub fn difference_pairing<R: Real>(model: SymplecticModel, a: &dyn Components<R>, b: &dyn Components<R>) -> R {
    crate::tensors::mean_contraction(model, a, b)
}

