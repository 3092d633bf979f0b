//! Lie brackets on truncated formal sums of symmetric tensors.
//!
//! A [`FormalSum`] holds one field per degree `0..=n_max`. The compatible
//! brackets `[a, b]_{s,t} = s (a, b) + t [[a, b]]` drop every output of degree
//! above `n_max`. [`HamSec`] is the subalgebra whose degree-one part is
//! `-delta* a_0`; [`ExtElement`] is the three-slot quotient
//! `C(M) + S^2 + S^3` carrying the centrally extended bracket.

use crate::calculus::{delta, delta_star, is_closed, schouten};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::geometry::{op_h, Curvature};
use crate::scalars::{Rational, Real, TrigScalar};
use crate::tensors::{algebraic_bracket, mixed_pairing, pairing, MixedTensorField, SymTensorField, SymplecticModel, Tensor};

/// Default truncation degree.
pub const DEFAULT_N_MAX: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct FormalSum<R> {
    model: SymplecticModel,
    parts: Vec<SymTensorField<R>>,
}

impl<R: Real> FormalSum<R> {
    pub fn zero(model: SymplecticModel, n_max: usize) -> Self {
        FormalSum { model, parts: (0..=n_max).map(|k| SymTensorField::zero(model, k)).collect() }
    }

    /// Sum of homogeneous fields; repeated degrees are added.
    pub fn from_fields<'a>(model: SymplecticModel, n_max: usize, fields: impl IntoIterator<Item = &'a SymTensorField<R>>) -> Result<Self> {
        let mut out = Self::zero(model, n_max);
        for f in fields {
            out.add_field(f)?;
        }
        Ok(out)
    }

    pub fn model(&self) -> SymplecticModel {
        self.model
    }
    pub fn n_max(&self) -> usize {
        self.parts.len() - 1
    }
    pub fn part(&self, k: usize) -> &SymTensorField<R> {
        &self.parts[k]
    }
    pub fn parts(&self) -> &[SymTensorField<R>] {
        &self.parts
    }

    pub fn set_part(&mut self, f: SymTensorField<R>) -> Result<()> {
        let k = f.degree();
        if k > self.n_max() {
            return Err(Error::DegreeMismatch(format!("degree {k} above truncation {}", self.n_max())));
        }
        if f.model() != self.model {
            return Err(Error::ModelMismatch);
        }
        self.parts[k] = f;
        Ok(())
    }

    pub fn add_field(&mut self, f: &SymTensorField<R>) -> Result<()> {
        let k = f.degree();
        if k > self.n_max() {
            return Err(Error::DegreeMismatch(format!("degree {k} above truncation {}", self.n_max())));
        }
        self.parts[k] = self.parts[k].add(f)?;
        Ok(())
    }

    pub fn is_zero(&self) -> bool {
        self.parts.iter().all(|p| p.is_zero())
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.model != o.model {
            return Err(Error::ModelMismatch);
        }
        if self.n_max() != o.n_max() {
            return Err(Error::DegreeMismatch(format!("truncations {} and {}", self.n_max(), o.n_max())));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let parts = self.parts.iter().zip(&o.parts).map(|(a, b)| a.add(b)).collect::<Result<_>>()?;
        Ok(FormalSum { model: self.model, parts })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map_parts(|_, p| p.neg())
    }

    pub fn scale(&self, r: &R) -> Self {
        self.map_parts(|_, p| p.scale(r))
    }

    pub fn map_parts(&self, f: impl Fn(usize, &SymTensorField<R>) -> SymTensorField<R>) -> Self {
        FormalSum { model: self.model, parts: self.parts.iter().enumerate().map(|(k, p)| f(k, p)).collect() }
    }

    /// `pi_k`: zero every degree below `k`.
    pub fn project(&self, k: usize) -> Self {
        self.map_parts(|d, p| if d < k { SymTensorField::zero(self.model, d) } else { p.clone() })
    }

    /// Same content with a different truncation degree (higher parts dropped).
    pub fn retruncate(&self, n_max: usize) -> Self {
        let mut out = Self::zero(self.model, n_max);
        for (k, p) in self.parts.iter().enumerate().take(n_max + 1) {
            out.parts[k] = p.clone();
        }
        out
    }

    /// Degreewise pairing `sum_k <<a_k, b_k>>`.
    pub fn pairing(&self, o: &Self) -> Result<R> {
        self.check(o)?;
        let mut acc = R::zero();
        for (a, b) in self.parts.iter().zip(&o.parts) {
            if !a.is_zero() && !b.is_zero() {
                acc.add_mut(&pairing(a, b)?);
            }
        }
        Ok(acc)
    }
}

impl FormalSum<Rational> {
    /// Seeded random sum with nonzero parts in the listed degrees.
    pub fn random(seed: u64, model: SymplecticModel, n_max: usize, degrees: &[usize], band: usize, mag: i64) -> Self {
        let mut out = Self::zero(model, n_max);
        for &k in degrees {
            let f = SymTensorField::random(seed.wrapping_mul(31).wrapping_add(k as u64), model, k, band, mag);
            out.add_field(&f).expect("degree within truncation");
        }
        out
    }
}

/// The parameters `(s, t)` of `[., .]_{s,t}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BracketParams<R = Rational> {
    pub s: R,
    pub t: R,
}

impl<R: Real> BracketParams<R> {
    pub fn new(s: R, t: R) -> Self {
        BracketParams { s, t }
    }
    pub fn one_one() -> Self {
        BracketParams { s: R::one(), t: R::one() }
    }
    /// One of `s`, `t` vanishes.
    pub fn is_degenerate(&self) -> bool {
        self.s.is_zero() || self.t.is_zero()
    }
    fn require_invertible(&self) -> Result<()> {
        if self.is_degenerate() {
            Err(Error::ZeroScaling)
        } else {
            Ok(())
        }
    }
}

fn pow<R: Real>(x: &R, e: i64) -> R {
    let base = if e < 0 { R::one().over(x) } else { x.clone() };
    let mut out = R::one();
    for _ in 0..e.unsigned_abs() {
        out = out.times(&base);
    }
    out
}

fn accumulate<R: Real>(out: &mut FormalSum<R>, f: SymTensorField<R>, w: &R) -> Result<()> {
    if f.degree() <= out.n_max() && !f.is_zero() && !w.is_zero() {
        out.add_field(&f.scale(w))?;
    }
    Ok(())
}

/// Degreewise sum of `s (a_k, b_l) + t [[a_k, b_l]]` over all pairs, truncated.
pub fn bracket_st<R: Real>(p: &BracketParams<R>, a: &FormalSum<R>, b: &FormalSum<R>) -> Result<FormalSum<R>> {
    a.check(b)?;
    let mut out = FormalSum::zero(a.model, a.n_max());
    for (k, ak) in a.parts.iter().enumerate() {
        if ak.is_zero() {
            continue;
        }
        for (l, bl) in b.parts.iter().enumerate() {
            if bl.is_zero() {
                continue;
            }
            if k >= 1 && l >= 1 && k + l - 2 <= out.n_max() && !p.s.is_zero() {
                accumulate(&mut out, algebraic_bracket(ak, bl)?, &p.s)?;
            }
            if k + l >= 1 && k + l - 1 <= out.n_max() && !p.t.is_zero() {
                accumulate(&mut out, schouten(ak, bl)?, &p.t)?;
            }
        }
    }
    Ok(out)
}

/// `Psi_{s,t}`: scale degree `k` by `s^{k-1} t^{2-k}`.
pub fn psi_st<R: Real>(p: &BracketParams<R>, a: &FormalSum<R>) -> Result<FormalSum<R>> {
    p.require_invertible()?;
    Ok(a.map_parts(|k, f| f.scale(&pow(&p.s, k as i64 - 1).times(&pow(&p.t, 2 - k as i64)))))
}

/// Inverse of [`psi_st`].
pub fn psi_st_inverse<R: Real>(p: &BracketParams<R>, a: &FormalSum<R>) -> Result<FormalSum<R>> {
    p.require_invertible()?;
    Ok(a.map_parts(|k, f| f.scale(&pow(&p.s, 1 - k as i64).times(&pow(&p.t, k as i64 - 2)))))
}

/// Which truncated bracket to take.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truncation {
    /// `(a, b)_{(k)} = (pi_k a, pi_k b)`
    Algebraic(usize),
    /// `[[a, b]]_{(k)} = [[pi_k a, pi_k b]]`
    Schouten(usize),
    /// `[a, b]_T = (a, b)_{(2)} + [[a, b]]_{(1)}` on sums with closed degree-one part.
    Top,
}

pub fn bracket_truncated<R: Real>(kind: Truncation, a: &FormalSum<R>, b: &FormalSum<R>) -> Result<FormalSum<R>> {
    let alg = BracketParams { s: R::one(), t: R::zero() };
    let sch = BracketParams { s: R::zero(), t: R::one() };
    match kind {
        Truncation::Algebraic(k) => bracket_st(&alg, &a.project(k), &b.project(k)),
        Truncation::Schouten(k) => bracket_st(&sch, &a.project(k), &b.project(k)),
        Truncation::Top => {
            for x in [a, b] {
                if x.n_max() >= 1 && !is_closed(x.part(1))? {
                    return Err(Error::NotClosed);
                }
            }
            let first = bracket_st(&alg, &a.project(2), &b.project(2))?;
            first.add(&bracket_st(&sch, &a.project(1), &b.project(1))?)
        }
    }
}

/// Element of the Hamiltonian subalgebra: `a_1 = -delta* a_0`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamSec<R> {
    sum: FormalSum<R>,
}

fn d_star0<R: Real>(model: SymplecticModel, f: &TrigScalar<R>) -> SymTensorField<R> {
    delta_star(&Connection::flat(model), &SymTensorField::scalar(model, f.clone())).expect("same model")
}

impl<R: Real> HamSec<R> {
    /// Checks the defining relation.
    pub fn new(sum: FormalSum<R>) -> Result<Self> {
        let m = sum.model;
        if sum.n_max() >= 1 {
            let want = d_star0(m, &sum.part(0).as_scalar()).neg();
            if sum.part(1) != &want {
                return Err(Error::Invalid("degree-one part is not -delta* of the scalar part".into()));
            }
        }
        Ok(HamSec { sum })
    }

    /// Inserts `a_1 = -delta* a_0`; `higher` must vanish below degree 2.
    pub fn make(a0: TrigScalar<R>, higher: &FormalSum<R>) -> Result<Self> {
        if !higher.part(0).is_zero() || (higher.n_max() >= 1 && !higher.part(1).is_zero()) {
            return Err(Error::Invalid("higher parts must start in degree 2".into()));
        }
        let m = higher.model;
        let mut sum = higher.clone();
        if sum.n_max() >= 1 {
            sum.set_part(d_star0(m, &a0).neg())?;
        }
        sum.set_part(SymTensorField::scalar(m, a0))?;
        Ok(HamSec { sum })
    }

    /// `iota(f) = -f + delta* f`.
    pub fn iota(model: SymplecticModel, n_max: usize, f: &TrigScalar<R>) -> Self {
        Self::make(-f, &FormalSum::zero(model, n_max)).expect("shapes")
    }

    pub fn sum(&self) -> &FormalSum<R> {
        &self.sum
    }
    pub fn into_sum(self) -> FormalSum<R> {
        self.sum
    }
    pub fn scalar(&self) -> TrigScalar<R> {
        self.sum.part(0).as_scalar()
    }

    /// `[a, b]_{1,1}`, validated against the defining relation.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        HamSec::new(bracket_st(&BracketParams::one_one(), &self.sum, &o.sum)?)
    }

    /// `pi_1`: drop the scalar part.
    pub fn pi1(&self) -> FormalSum<R> {
        self.sum.project(1)
    }

    /// `c(a) = mean(a_0)`.
    pub fn c(&self) -> R {
        self.scalar().mean()
    }

    /// `nu(a) = a + iota(c(a))`.
    pub fn nu(&self) -> Self {
        let m = self.sum.model;
        let shift = Self::iota(m, self.sum.n_max(), &TrigScalar::constant(m.dim(), self.c()));
        HamSec { sum: self.sum.add(&shift.sum).expect("same shape") }
    }

    /// The Hamiltonian field of the associated moment functional at `c`:
    /// `H(a_0) - 3 delta* a_2 - 3 a_3`.
    pub fn moment_field(&self, c: &Connection<R>) -> Result<SymTensorField<R>> {
        let mut out = op_h(c, &self.scalar())?;
        if self.sum.n_max() >= 2 {
            out = out.sub(&delta_star(c, self.sum.part(2))?.scale(&R::from_int(3)))?;
        }
        if self.sum.n_max() >= 3 {
            out = out.sub(&self.sum.part(3).scale(&R::from_int(3)))?;
        }
        Ok(out)
    }
}

/// `(a * b)_{ijkl} = 2 a_{k[i} b_{j]l} + 2 a_{l[i} b_{j]k}`, a field of shape `(2, 2)`.
pub fn star<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<MixedTensorField<R>> {
    if a.degree() != 2 || b.degree() != 2 {
        return Err(Error::DegreeMismatch("star takes two quadratic fields".into()));
    }
    let m = a.model();
    let t = Tensor::from_fn(m.dim(), 4, |x| {
        let (i, j, k, l) = (x[0], x[1], x[2], x[3]);
        let mut acc = &*a.get(&[k, i]) * &*b.get(&[j, l]);
        acc -= &(&*a.get(&[k, j]) * &*b.get(&[i, l]));
        acc += &(&*a.get(&[l, i]) * &*b.get(&[j, k]));
        acc -= &(&*a.get(&[l, j]) * &*b.get(&[i, k]));
        acc
    });
    MixedTensorField::new(m, 2, 2, t)
}

/// Nonequivariance cocycle of two Hamiltonian sums at the reference connection.
pub fn sigma_hamsec<R: Real>(a: &HamSec<R>, b: &HamSec<R>, reference: &Connection<R>) -> Result<R> {
    if !reference.is_torsion_free() {
        return Err(Error::Torsion("sigma"));
    }
    let m = reference.model();
    let part = |h: &HamSec<R>, k: usize| {
        if h.sum.n_max() >= k {
            h.sum.part(k).clone()
        } else {
            SymTensorField::zero(m, k)
        }
    };
    let (a2, a3, b2, b3) = (part(a, 2), part(a, 3), part(b, 2), part(b, 3));
    let mut acc = R::zero();
    if !a2.is_zero() && !b2.is_zero() {
        let cv = Curvature::of(reference).as_mixed()?;
        acc.add_mut(&mixed_pairing(&star(&a2, &b2)?, &cv)?.times(&R::from_int(3)));
        let (da, db) = (delta(reference, &a2)?, delta(reference, &b2)?);
        acc.add_mut(&pairing(&da, &db)?.times(&R::from_int(-6)));
    }
    if !b3.is_zero() {
        acc.add_mut(&pairing(&a.moment_field(reference)?, &b3)?.times(&R::from_int(-3)));
    }
    if !a3.is_zero() {
        acc.add_mut(&pairing(&a3, &b.moment_field(reference)?)?.times(&R::from_int(-3)));
    }
    if !a3.is_zero() && !b3.is_zero() {
        acc.add_mut(&pairing(&a3, &b3)?.times(&R::from_int(-9)));
    }
    Ok(acc)
}

/// Element `a_0 + a_2 + a_3` of the centrally extended quotient.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtElement<R> {
    pub a0: TrigScalar<R>,
    pub a2: SymTensorField<R>,
    pub a3: SymTensorField<R>,
}

impl<R: Real> ExtElement<R> {
    pub fn new(a0: TrigScalar<R>, a2: SymTensorField<R>, a3: SymTensorField<R>) -> Result<Self> {
        if a2.degree() != 2 || a3.degree() != 3 {
            return Err(Error::DegreeMismatch("extended element needs degrees 2 and 3".into()));
        }
        if a2.model() != a3.model() {
            return Err(Error::ModelMismatch);
        }
        if a0.dim() != a2.dim() {
            return Err(Error::DimensionMismatch { expected: a2.dim(), got: a0.dim() });
        }
        Ok(ExtElement { a0, a2, a3 })
    }

    pub fn zero(model: SymplecticModel) -> Self {
        ExtElement { a0: TrigScalar::zero(model.dim()), a2: SymTensorField::zero(model, 2), a3: SymTensorField::zero(model, 3) }
    }

    pub fn scalar(model: SymplecticModel, f: TrigScalar<R>) -> Self {
        ExtElement { a0: f, ..Self::zero(model) }
    }

    pub fn model(&self) -> SymplecticModel {
        self.a2.model()
    }

    pub fn is_zero(&self) -> bool {
        self.a0.is_zero() && self.a2.is_zero() && self.a3.is_zero()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        Ok(ExtElement { a0: &self.a0 + &o.a0, a2: self.a2.add(&o.a2)?, a3: self.a3.add(&o.a3)? })
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        Ok(ExtElement { a0: &self.a0 - &o.a0, a2: self.a2.sub(&o.a2)?, a3: self.a3.sub(&o.a3)? })
    }

    pub fn scale(&self, r: &R) -> Self {
        ExtElement { a0: self.a0.scale(r), a2: self.a2.scale(r), a3: self.a3.scale(r) }
    }

    /// `j(f + a_2 + a_3) = iota(f) + a_2 + a_3`, truncated at degree 3.
    pub fn j_hat(&self) -> HamSec<R> {
        let m = self.model();
        let higher = FormalSum::from_fields(m, 3, [&self.a2, &self.a3]).expect("degrees 2 and 3");
        HamSec::make(-&self.a0, &higher).expect("shapes")
    }

    /// Inverse of [`ExtElement::j_hat`] on the quotient (degrees above 3 dropped).
    pub fn from_hamsec(h: &HamSec<R>) -> Self {
        let s = h.sum.retruncate(3);
        ExtElement { a0: -&s.part(0).as_scalar(), a2: s.part(2).clone(), a3: s.part(3).clone() }
    }

    /// `c(a_0)`.
    pub fn c(&self) -> R {
        self.a0.mean()
    }

    /// The bracket pulled back through `j`, without the cocycle.
    pub fn bracket(&self, o: &Self) -> Result<Self> {
        let (a, b) = (self.j_hat(), o.j_hat());
        let s = bracket_st(&BracketParams::one_one(), &a.sum, &b.sum)?;
        Ok(Self::from_hamsec(&HamSec::new(s)?))
    }

    /// `((a, b)) = [a, b] + Sigma(j a, j b)`, the cocycle added as a constant.
    pub fn extended_bracket(&self, o: &Self, reference: &Connection<R>) -> Result<Self> {
        let mut out = self.bracket(o)?;
        let sig = sigma_cocycle(self, o, reference)?;
        out.a0 += &TrigScalar::constant(self.a0.dim(), sig);
        Ok(out)
    }

    /// `psi_{s,t}(a_0 + a_2 + a_3) = t a_0 + s a_2 + s^2/t a_3`.
    pub fn psi(&self, p: &BracketParams<R>) -> Result<Self> {
        p.require_invertible()?;
        let f3 = p.s.times(&p.s).over(&p.t);
        Ok(ExtElement { a0: self.a0.scale(&p.t), a2: self.a2.scale(&p.s), a3: self.a3.scale(&f3) })
    }

    pub fn psi_inverse(&self, p: &BracketParams<R>) -> Result<Self> {
        p.require_invertible()?;
        let f3 = p.t.over(&p.s.times(&p.s));
        let one = R::one();
        Ok(ExtElement { a0: self.a0.scale(&one.over(&p.t)), a2: self.a2.scale(&one.over(&p.s)), a3: self.a3.scale(&f3) })
    }

    /// `((a, b))_{s,t} = psi^{-1} ((psi a, psi b))`.
    pub fn extended_bracket_st(&self, o: &Self, p: &BracketParams<R>, reference: &Connection<R>) -> Result<Self> {
        self.psi(p)?.extended_bracket(&o.psi(p)?, reference)?.psi_inverse(p)
    }

    /// Degreewise pairing.
    pub fn pairing(&self, o: &Self) -> Result<R> {
        Ok(self.a0.mean_product(&o.a0).plus(&pairing(&self.a2, &o.a2)?).plus(&pairing(&self.a3, &o.a3)?))
    }
}

impl ExtElement<Rational> {
    pub fn random(seed: u64, model: SymplecticModel, band: usize, mag: i64) -> Self {
        let d = model.dim();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        ExtElement {
            a0: TrigScalar::random(&mut rng, d, band, mag),
            a2: SymTensorField::random(seed ^ 0x5eed_0002, model, 2, band, mag),
            a3: SymTensorField::random(seed ^ 0x5eed_0003, model, 3, band, mag),
        }
    }
}

/// `Sigma(j a, j b)` at the reference connection.
pub fn sigma_cocycle<R: Real>(a: &ExtElement<R>, b: &ExtElement<R>, reference: &Connection<R>) -> Result<R> {
    sigma_hamsec(&a.j_hat(), &b.j_hat(), reference)
}
