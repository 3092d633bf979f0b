//! Exact trigonometric scalar fields on the flat torus.
//!
//! A [`TrigScalar`] is a finite Fourier series `sum_m c_m e^{i m.x}` with
//! Hermitian coefficients (`c_{-m} = conj(c_m)`), so every field is real
//! valued. The coefficient ring is generic: [`Rational`] gives exact
//! arithmetic, `f64` gives the floating pipeline used by the numerics.

use std::collections::BTreeMap;
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_traits::Signed;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use crate::rational::Rational;

/// Largest torus dimension a frequency vector can carry.
pub const MAX_DIM: usize = 8;

/// Real coefficient field: exact rationals or doubles.
pub trait Real: Clone + Debug + PartialEq + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn plus(&self, o: &Self) -> Self;
    fn minus(&self, o: &Self) -> Self;
    fn times(&self, o: &Self) -> Self;
    fn over(&self, o: &Self) -> Self;
    fn negated(&self) -> Self;
    fn from_ratio(num: i64, den: i64) -> Self;
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
    fn add_mut(&mut self, o: &Self) {
        *self = self.plus(o);
    }
    fn from_int(k: i64) -> Self {
        Self::from_ratio(k, 1)
    }
    /// Equality up to rounding at magnitude `scale`; exact unless overridden.
    fn close(&self, o: &Self, scale: f64) -> bool {
        let _ = scale;
        self == o
    }
}

impl Real for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn one() -> Self {
        Rational::one()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(num, den)
    }
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        Rational::to_f64(self)
    }
    fn add_mut(&mut self, o: &Self) {
        *self += o;
    }
}

impl Real for f64 {
    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn plus(&self, o: &Self) -> Self {
        self + o
    }
    fn minus(&self, o: &Self) -> Self {
        self - o
    }
    fn times(&self, o: &Self) -> Self {
        self * o
    }
    fn over(&self, o: &Self) -> Self {
        self / o
    }
    fn negated(&self) -> Self {
        -self
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_rational(r: &Rational) -> Self {
        Real::to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn close(&self, o: &Self, scale: f64) -> bool {
        (self - o).abs() <= 1e-9 * (1.0 + scale)
    }
}

/// Shorthand for the rational `num/den`.
pub fn q(num: i64, den: i64) -> Rational {
    Rational::from_ratio(num, den)
}

/// Exact rational image of a double (every finite double is dyadic).
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| Error::NonFinite(format!("{x}")))
}

/// Complex coefficient `re + i im` over a [`Real`] field.
#[derive(Clone, Debug, PartialEq)]
pub struct Coeff<R> {
    pub re: R,
    pub im: R,
}

/// Gaussian rational.
pub type GaussianRational = Coeff<Rational>;

impl<R: Real> Coeff<R> {
    pub fn new(re: R, im: R) -> Self {
        Coeff { re, im }
    }
    pub fn real(re: R) -> Self {
        Coeff { re, im: R::zero() }
    }
    pub fn zero() -> Self {
        Coeff { re: R::zero(), im: R::zero() }
    }
    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    pub fn plus(&self, o: &Self) -> Self {
        Coeff { re: self.re.plus(&o.re), im: self.im.plus(&o.im) }
    }
    pub fn minus(&self, o: &Self) -> Self {
        Coeff { re: self.re.minus(&o.re), im: self.im.minus(&o.im) }
    }
    pub fn times(&self, o: &Self) -> Self {
        Coeff {
            re: self.re.times(&o.re).minus(&self.im.times(&o.im)),
            im: self.re.times(&o.im).plus(&self.im.times(&o.re)),
        }
    }
    pub fn negated(&self) -> Self {
        Coeff { re: self.re.negated(), im: self.im.negated() }
    }
    pub fn conj(&self) -> Self {
        Coeff { re: self.re.clone(), im: self.im.negated() }
    }
    pub fn scale(&self, r: &R) -> Self {
        Coeff { re: self.re.times(r), im: self.im.times(r) }
    }
    /// Multiply by `i k`.
    pub fn times_i(&self, k: i64) -> Self {
        let k = R::from_int(k);
        Coeff { re: self.im.times(&k).negated(), im: self.re.times(&k) }
    }
    pub fn add_mut(&mut self, o: &Self) {
        self.re.add_mut(&o.re);
        self.im.add_mut(&o.im);
    }
}

/// Integer frequency vector, padded with zeros past the torus dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Freq(pub [i16; MAX_DIM]);

impl Freq {
    pub const ZERO: Freq = Freq([0; MAX_DIM]);

    pub fn from_slice(m: &[i64]) -> Result<Self> {
        if m.len() > MAX_DIM {
            return Err(Error::DimensionMismatch { expected: MAX_DIM, got: m.len() });
        }
        let mut out = [0i16; MAX_DIM];
        for (o, &x) in out.iter_mut().zip(m) {
            *o = i16::try_from(x).map_err(|_| Error::Invalid(format!("frequency {x} too large")))?;
        }
        Ok(Freq(out))
    }
    pub fn axis(dim: usize, axis: usize, k: i16) -> Self {
        debug_assert!(axis < dim);
        let mut out = [0i16; MAX_DIM];
        out[axis] = k;
        Freq(out)
    }
    pub fn to_vec(&self, dim: usize) -> Vec<i64> {
        self.0[..dim].iter().map(|&x| x as i64).collect()
    }
    pub fn plus(&self, o: &Freq) -> Freq {
        let mut out = [0i16; MAX_DIM];
        for k in 0..MAX_DIM {
            out[k] = self.0[k] + o.0[k];
        }
        Freq(out)
    }
    pub fn negated(&self) -> Freq {
        let mut out = self.0;
        for x in out.iter_mut() {
            *x = -*x;
        }
        Freq(out)
    }
    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&x| x == 0)
    }
    /// True when the first nonzero entry is positive (or the vector is zero).
    pub fn is_canonical(&self) -> bool {
        self.0.iter().find(|&&x| x != 0).is_none_or(|&x| x > 0)
    }
    pub fn band(&self) -> usize {
        self.0.iter().map(|x| x.unsigned_abs() as usize).max().unwrap_or(0)
    }
    pub fn dot(&self, x: &[f64]) -> f64 {
        x.iter().zip(self.0.iter()).map(|(a, &m)| a * m as f64).sum()
    }
}

/// All frequency vectors in `[-band, band]^dim`, lexicographic.
pub fn frequencies_in_band(dim: usize, band: usize) -> Vec<Freq> {
    let b = band as i16;
    let mut out = Vec::new();
    let mut cur = vec![-b; dim];
    loop {
        let mut f = [0i16; MAX_DIM];
        f[..dim].copy_from_slice(&cur);
        out.push(Freq(f));
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if cur[k] < b {
                cur[k] += 1;
                for c in cur.iter_mut().skip(k + 1) {
                    *c = -b;
                }
                break;
            }
        }
    }
}

/// Canonical representatives (zero plus one of each `+-m` pair) inside a band.
pub fn canonical_frequencies(dim: usize, band: usize) -> Vec<Freq> {
    frequencies_in_band(dim, band).into_iter().filter(|f| f.is_canonical()).collect()
}

/// Real trigonometric polynomial on the torus `T^dim` of period `2 pi`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigScalar<R> {
    dim: usize,
    terms: BTreeMap<Freq, Coeff<R>>,
}

pub type ExactScalar = TrigScalar<Rational>;

impl<R: Real> TrigScalar<R> {
    pub fn zero(dim: usize) -> Self {
        assert!(dim <= MAX_DIM, "torus dimension {dim} exceeds {MAX_DIM}");
        TrigScalar { dim, terms: BTreeMap::new() }
    }

    pub fn constant(dim: usize, c: R) -> Self {
        let mut s = Self::zero(dim);
        if !c.is_zero() {
            s.terms.insert(Freq::ZERO, Coeff::real(c));
        }
        s
    }

    /// Build from explicit `(m, c_m)` pairs; repeated frequencies add up.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<i64>, Coeff<R>)>,
    {
        if dim > MAX_DIM {
            return Err(Error::DimensionMismatch { expected: MAX_DIM, got: dim });
        }
        let mut s = Self::zero(dim);
        for (m, c) in terms {
            if m.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m.len() });
            }
            s.add_term(Freq::from_slice(&m)?, &c);
        }
        Ok(s)
    }

    /// `amp * cos(m.x)`.
    pub fn cos_mode(dim: usize, m: &[i64], amp: R) -> Result<Self> {
        let f = Freq::from_slice(m)?;
        let mut s = Self::zero(dim);
        if f.is_zero() {
            return Ok(Self::constant(dim, amp));
        }
        let half = Coeff::real(amp.times(&R::from_ratio(1, 2)));
        s.add_term(f, &half);
        s.add_term(f.negated(), &half);
        Ok(s)
    }

    /// `amp * sin(m.x)`.
    pub fn sin_mode(dim: usize, m: &[i64], amp: R) -> Result<Self> {
        let f = Freq::from_slice(m)?;
        let mut s = Self::zero(dim);
        let h = amp.times(&R::from_ratio(1, 2));
        s.add_term(f, &Coeff::new(R::zero(), h.negated()));
        s.add_term(f.negated(), &Coeff::new(R::zero(), h));
        Ok(s)
    }

    /// `re cos(m.x) - im sin(m.x)` scaled by 2, i.e. `c e^{imx} + conj(c) e^{-imx}`.
    pub fn hermitian_mode(dim: usize, m: Freq, c: &Coeff<R>) -> Self {
        let mut s = Self::zero(dim);
        if m.is_zero() {
            s.add_term(m, &Coeff::real(c.re.clone()));
        } else {
            s.add_term(m, c);
            s.add_term(m.negated(), &c.conj());
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn terms(&self) -> &BTreeMap<Freq, Coeff<R>> {
        &self.terms
    }
    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn len(&self) -> usize {
        self.terms.len()
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
    pub fn coeff(&self, m: &Freq) -> Coeff<R> {
        self.terms.get(m).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Freq, c: &Coeff<R>) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(v) => {
                v.add_mut(c);
                if v.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    /// Largest `|m_i|` over stored frequencies.
    pub fn band(&self) -> usize {
        self.terms.keys().map(Freq::band).max().unwrap_or(0)
    }

    pub fn is_hermitian(&self) -> bool {
        self.terms.iter().all(|(m, c)| self.coeff(&m.negated()) == c.conj())
    }

    pub fn scale(&self, r: &R) -> Self {
        if r.is_zero() {
            return Self::zero(self.dim);
        }
        TrigScalar { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (*m, c.scale(r))).collect() }
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.scale(&R::from_ratio(num, den))
    }

    /// Partial derivative along `axis` (0-based).
    pub fn partial(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim });
        }
        let mut out = Self::zero(self.dim);
        for (m, c) in &self.terms {
            let k = m.0[axis] as i64;
            if k != 0 {
                out.terms.insert(*m, c.times_i(k));
            }
        }
        Ok(out)
    }

    /// Average over the torus (normalized volume one).
    pub fn mean(&self) -> R {
        self.terms.get(&Freq::ZERO).map(|c| c.re.clone()).unwrap_or_else(R::zero)
    }

    /// `mean(self * other)` without forming the product.
    pub fn mean_product(&self, other: &Self) -> R {
        let (small, big) = if self.len() <= other.len() { (self, other) } else { (other, self) };
        let mut acc = R::zero();
        for (m, c) in &small.terms {
            if let Some(d) = big.terms.get(&m.negated()) {
                acc.add_mut(&c.re.times(&d.re).minus(&c.im.times(&d.im)));
            }
        }
        acc
    }

    pub fn is_finite(&self) -> bool {
        self.terms.values().all(|c| c.re.to_f64().is_finite() && c.im.to_f64().is_finite())
    }

    /// Coefficientwise [`Real::close`] at the larger magnitude of the two.
    pub fn close_to(&self, o: &Self) -> bool {
        let size = |t: &Self| t.terms.values().map(|c| c.re.to_f64().abs().max(c.im.to_f64().abs())).fold(0.0, f64::max);
        let scale = size(self).max(size(o));
        let ok = |a: &Self, b: &Self| {
            a.terms.iter().all(|(m, c)| {
                let d = b.coeff(m);
                c.re.close(&d.re, scale) && c.im.close(&d.im, scale)
            })
        };
        ok(self, o) && ok(o, self)
    }

    /// Pointwise value at `x` (a point of `R^dim`).
    pub fn eval(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for (m, c) in &self.terms {
            let th = m.dot(x);
            s += c.re.to_f64() * th.cos() - c.im.to_f64() * th.sin();
        }
        s
    }

    pub fn map_coeffs<S: Real>(&self, f: impl Fn(&R) -> S) -> TrigScalar<S> {
        let mut out = TrigScalar::zero(self.dim);
        for (m, c) in &self.terms {
            out.add_term(*m, &Coeff::new(f(&c.re), f(&c.im)));
        }
        out
    }

    pub fn to_f64(&self) -> TrigScalar<f64> {
        self.map_coeffs(|r| r.to_f64())
    }

    fn check_dim(&self, o: &Self) {
        assert_eq!(self.dim, o.dim, "trig scalars on tori of different dimension");
    }

    pub fn mul_ref(&self, o: &Self) -> Self {
        self.check_dim(o);
        let mut out = Self::zero(self.dim);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                let p = c1.times(c2);
                out.add_term(m1.plus(m2), &p);
            }
        }
        out
    }

    /// `self += r * o`.
    pub fn add_scaled(&mut self, o: &Self, r: &R) {
        self.check_dim(o);
        if r.is_zero() {
            return;
        }
        for (m, c) in &o.terms {
            self.add_term(*m, &c.scale(r));
        }
    }

    pub fn powi(&self, k: u32) -> Self {
        let mut out = Self::constant(self.dim, R::one());
        for _ in 0..k {
            out = out.mul_ref(self);
        }
        out
    }
}

impl TrigScalar<Rational> {
    /// Seeded random field with frequencies in `[-band, band]^dim`.
    ///
    /// Coefficient parts are integers in `[-mag, mag]` over denominator 1 or 2.
    pub fn random(rng: &mut impl Rng, dim: usize, band: usize, mag: i64) -> Self {
        let mut s = Self::zero(dim);
        for m in canonical_frequencies(dim, band) {
            let re = draw(rng, mag);
            let im = if m.is_zero() { <Rational as Real>::zero() } else { draw(rng, mag) };
            let c = Coeff::new(re, im);
            s.add_term(m, &c);
            if !m.is_zero() {
                s.add_term(m.negated(), &c.conj());
            }
        }
        s
    }

    /// Largest absolute numerator or denominator among the coefficients.
    pub fn height(&self) -> BigInt {
        let mut h: BigInt = num_traits::Zero::zero();
        for c in self.terms.values() {
            for r in [&c.re, &c.im] {
                for v in [r.numer().abs(), r.denom().clone()] {
                    if v > h {
                        h = v;
                    }
                }
            }
        }
        h
    }
}

fn draw(rng: &mut impl Rng, mag: i64) -> Rational {
    let num = rng.random_range(-mag..=mag);
    let den = rng.random_range(1..=2);
    q(num, den)
}

/// Seeded random field; same seed, same field.
pub fn ts_random(seed: u64, dim: usize, band: usize, mag: i64) -> ExactScalar {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    TrigScalar::random(&mut rng, dim, band, mag)
}

impl<R: Real> Add for &TrigScalar<R> {
    type Output = TrigScalar<R>;
    fn add(self, o: &TrigScalar<R>) -> TrigScalar<R> {
        let mut out = self.clone();
        out += o;
        out
    }
}

impl<R: Real> Sub for &TrigScalar<R> {
    type Output = TrigScalar<R>;
    fn sub(self, o: &TrigScalar<R>) -> TrigScalar<R> {
        let mut out = self.clone();
        out -= o;
        out
    }
}

impl<R: Real> Mul for &TrigScalar<R> {
    type Output = TrigScalar<R>;
    fn mul(self, o: &TrigScalar<R>) -> TrigScalar<R> {
        self.mul_ref(o)
    }
}

impl<R: Real> Neg for &TrigScalar<R> {
    type Output = TrigScalar<R>;
    fn neg(self) -> TrigScalar<R> {
        TrigScalar { dim: self.dim, terms: self.terms.iter().map(|(m, c)| (*m, c.negated())).collect() }
    }
}

impl<R: Real> AddAssign<&TrigScalar<R>> for TrigScalar<R> {
    fn add_assign(&mut self, o: &TrigScalar<R>) {
        self.check_dim(o);
        for (m, c) in &o.terms {
            self.add_term(*m, c);
        }
    }
}

impl<R: Real> SubAssign<&TrigScalar<R>> for TrigScalar<R> {
    fn sub_assign(&mut self, o: &TrigScalar<R>) {
        self.check_dim(o);
        for (m, c) in &o.terms {
            self.add_term(*m, &c.negated());
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cos_x() -> ExactScalar {
        TrigScalar::cos_mode(2, &[1, 0], q(1, 1)).unwrap()
    }

    #[test]
    fn cos_squared_is_half_plus_half_cos_2x() {
        let lhs = &cos_x() * &cos_x();
        let mut rhs = TrigScalar::constant(2, q(1, 2));
        rhs += &TrigScalar::cos_mode(2, &[2, 0], q(1, 2)).unwrap();
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.mean(), q(1, 2));
    }

    #[test]
    fn derivative_of_sin_is_cos() {
        let s = TrigScalar::sin_mode(2, &[1, 0], q(1, 1)).unwrap();
        assert_eq!(s.partial(0).unwrap(), cos_x());
        assert!(s.partial(1).unwrap().is_zero());
        assert_eq!(s.partial(2), Err(Error::AxisOutOfRange { axis: 2, dim: 2 }));
    }

    #[test]
    fn cancellation_stores_nothing() {
        let f = ts_random(3, 2, 2, 5);
        assert!((&f - &f).is_empty());
    }

    #[test]
    fn random_is_seeded_and_bounded() {
        let a = ts_random(7, 2, 2, 4);
        assert_eq!(a, ts_random(7, 2, 2, 4));
        assert!(a.is_hermitian());
        let m = a.mean();
        assert!(m >= q(-4, 1) && m <= q(4, 1));
        assert!(a.band() <= 2);
    }

    #[test]
    fn mean_product_matches_product_mean() {
        let a = ts_random(1, 2, 2, 3);
        let b = ts_random(2, 2, 1, 3);
        assert_eq!(a.mean_product(&b), (&a * &b).mean());
    }

    #[test]
    fn eval_matches_closed_form() {
        let s = TrigScalar::sin_mode(2, &[1, 2], q(3, 1)).unwrap();
        let x = [0.3, -1.1];
        assert!((s.eval(&x) - 3.0 * (0.3f64 - 2.2).sin()).abs() < 1e-14);
    }

    #[test]
    fn canonical_half_counts() {
        assert_eq!(frequencies_in_band(2, 1).len(), 9);
        assert_eq!(canonical_frequencies(2, 1).len(), 5);
        assert_eq!(canonical_frequencies(4, 1).len(), 41);
    }

    #[test]
    fn huge_rational_to_f64() {
        let big = Rational::from_big(num_rational::BigRational::new(BigInt::from(3) << 2000usize, BigInt::from(1) << 2000usize));
        assert!((Real::to_f64(&big) - 3.0).abs() < 1e-12);
    }
}
