//! Arbitrary precision rationals with a machine-word fast path.
//!
//! Values that fit `i64 / i64` are kept inline and combined in `i128`;
//! anything larger falls back to [`num_rational::BigRational`]. The
//! representation is canonical (lowest terms, positive denominator, inline
//! whenever it fits), so structural equality is value equality.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

#[derive(Clone)]
enum Repr {
    Small(i64, i64),
    Big(Box<BigRational>),
}

#[derive(Clone)]
pub struct Rational(Repr);

fn fits(x: i128) -> bool {
    x > i64::MIN as i128 && x <= i64::MAX as i128
}

impl Rational {
    pub fn zero() -> Self {
        Rational(Repr::Small(0, 1))
    }
    pub fn one() -> Self {
        Rational(Repr::Small(1, 1))
    }
    pub fn from_int(k: i64) -> Self {
        Self::from_i128(k as i128, 1)
    }

    /// `num / den`; panics on a zero denominator.
    pub fn new(num: i64, den: i64) -> Self {
        Self::from_i128(num as i128, den as i128)
    }

    fn from_i128(mut n: i128, mut d: i128) -> Self {
        assert!(d != 0, "zero denominator");
        if d < 0 {
            n = -n;
            d = -d;
        }
        let g = n.gcd(&d);
        if g > 1 {
            n /= g;
            d /= g;
        }
        if fits(n) && fits(d) {
            Rational(Repr::Small(n as i64, d as i64))
        } else {
            Self::from_big(BigRational::new(BigInt::from(n), BigInt::from(d)))
        }
    }

    /// Canonicalize a big rational, moving it inline when it fits.
    pub fn from_big(r: BigRational) -> Self {
        if let (Some(n), Some(d)) = (r.numer().to_i64(), r.denom().to_i64()) {
            if n != i64::MIN && d != i64::MIN {
                return Rational(Repr::Small(n, d));
            }
        }
        Rational(Repr::Big(Box::new(r)))
    }

    pub fn to_big(&self) -> BigRational {
        match &self.0 {
            Repr::Small(n, d) => BigRational::new_raw(BigInt::from(*n), BigInt::from(*d)),
            Repr::Big(b) => (**b).clone(),
        }
    }

    pub fn numer(&self) -> BigInt {
        match &self.0 {
            Repr::Small(n, _) => BigInt::from(*n),
            Repr::Big(b) => b.numer().clone(),
        }
    }

    pub fn denom(&self) -> BigInt {
        match &self.0 {
            Repr::Small(_, d) => BigInt::from(*d),
            Repr::Big(b) => b.denom().clone(),
        }
    }

    /// Exact value of a finite double.
    pub fn from_f64(x: f64) -> Option<Self> {
        BigRational::from_float(x).map(Self::from_big)
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.0, Repr::Small(0, _))
    }

    pub fn is_negative(&self) -> bool {
        match &self.0 {
            Repr::Small(n, _) => *n < 0,
            Repr::Big(b) => b.is_negative(),
        }
    }

    pub fn abs(&self) -> Self {
        if self.is_negative() {
            -self
        } else {
            self.clone()
        }
    }

    pub fn recip(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Self::from_i128(*d as i128, *n as i128),
            Repr::Big(b) => Self::from_big(b.recip()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match &self.0 {
            Repr::Small(n, d) => *n as f64 / *d as f64,
            Repr::Big(b) => {
                let (n, d) = (b.numer(), b.denom());
                match (n.to_f64(), d.to_f64()) {
                    (Some(a), Some(c)) if a.is_finite() && c.is_finite() && c != 0.0 => a / c,
                    _ => {
                        let sh = (n.bits().max(d.bits()) as i64 - 900).max(0) as usize;
                        (n >> sh).to_f64().unwrap_or(0.0) / (d >> sh).to_f64().unwrap_or(1.0)
                    }
                }
            }
        }
    }

    fn add_ref(&self, o: &Self) -> Self {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                if b == d {
                    Self::from_i128(*a as i128 + *c as i128, *b as i128)
                } else {
                    let (a, b, c, d) = (*a as i128, *b as i128, *c as i128, *d as i128);
                    Self::from_i128(a * d + c * b, b * d)
                }
            }
            _ => Self::from_big(self.to_big() + o.to_big()),
        }
    }

    fn mul_ref(&self, o: &Self) -> Self {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => {
                Self::from_i128(*a as i128 * *c as i128, *b as i128 * *d as i128)
            }
            _ => Self::from_big(self.to_big() * o.to_big()),
        }
    }

    fn neg_ref(&self) -> Self {
        match &self.0 {
            Repr::Small(n, d) => Rational(Repr::Small(-n, *d)),
            Repr::Big(b) => Self::from_big(-(**b).clone()),
        }
    }
}

impl PartialEq for Rational {
    fn eq(&self, o: &Self) -> bool {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => a == c && b == d,
            (Repr::Big(x), Repr::Big(y)) => x == y,
            _ => false,
        }
    }
}

impl Eq for Rational {}

impl Hash for Rational {
    fn hash<H: Hasher>(&self, h: &mut H) {
        match &self.0 {
            Repr::Small(n, d) => {
                n.hash(h);
                d.hash(h);
            }
            Repr::Big(b) => b.hash(h),
        }
    }
}

impl Ord for Rational {
    fn cmp(&self, o: &Self) -> Ordering {
        match (&self.0, &o.0) {
            (Repr::Small(a, b), Repr::Small(c, d)) => (*a as i128 * *d as i128).cmp(&(*c as i128 * *b as i128)),
            _ => self.to_big().cmp(&o.to_big()),
        }
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.0 {
            Repr::Small(n, 1) => write!(f, "{n}"),
            Repr::Small(n, d) => write!(f, "{n}/{d}"),
            Repr::Big(b) => write!(f, "{b}"),
        }
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        BigRational::from_str(s.trim()).map(Self::from_big).map_err(|e| format!("{e}"))
    }
}

impl Default for Rational {
    fn default() -> Self {
        Self::zero()
    }
}

impl Zero for Rational {
    fn zero() -> Self {
        Rational::zero()
    }
    fn is_zero(&self) -> bool {
        Rational::is_zero(self)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Rational> for &Rational {
            type Output = Rational;
            fn $m(self, o: &Rational) -> Rational {
                let f: fn(&Rational, &Rational) -> Rational = $body;
                f(self, o)
            }
        }
        impl $tr<Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                (&self).$m(&o)
            }
        }
        impl $tr<&Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: &Rational) -> Rational {
                (&self).$m(o)
            }
        }
        impl $tr<Rational> for &Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                self.$m(&o)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_ref(b));
binop!(Sub, sub, |a, b| a.add_ref(&b.neg_ref()));
binop!(Mul, mul, |a, b| a.mul_ref(b));
binop!(Div, div, |a, b| a.mul_ref(&b.recip()));

impl Neg for &Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        self.neg_ref()
    }
}

impl AddAssign<&Rational> for Rational {
    fn add_assign(&mut self, o: &Rational) {
        *self = self.add_ref(o);
    }
}

impl AddAssign<Rational> for Rational {
    fn add_assign(&mut self, o: Rational) {
        *self = self.add_ref(&o);
    }
}

impl SubAssign<&Rational> for Rational {
    fn sub_assign(&mut self, o: &Rational) {
        *self = self.add_ref(&o.neg_ref());
    }
}

impl MulAssign<&Rational> for Rational {
    fn mul_assign(&mut self, o: &Rational) {
        *self = self.mul_ref(o);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn lowest_terms() {
        let r = Rational::new(6, -4);
        assert_eq!(r.to_string(), "-3/2");
        assert_eq!(Rational::new(0, -7), Rational::zero());
    }

    #[test]
    fn overflow_promotes_and_demotes() {
        let a = Rational::new(i64::MAX, 1);
        let s = &a + &a;
        assert_eq!(s.to_big(), big(i64::MAX, 1) * BigInt::from(2));
        let back = &s - &a;
        assert_eq!(back, a);
        assert!(matches!(back.0, Repr::Small(..)));
    }

    proptest! {
        #[test]
        fn agrees_with_bigrational(a in -1_000_000_000_000i64..1_000_000_000_000, b in 1i64..1_000_000_000_000,
                                   c in -1_000_000_000_000i64..1_000_000_000_000, d in 1i64..1_000_000_000_000) {
            let (x, y) = (Rational::new(a, b), Rational::new(c, d));
            let (bx, by) = (big(a, b), big(c, d));
            prop_assert_eq!((&x + &y).to_big(), &bx + &by);
            prop_assert_eq!((&x * &y).to_big(), &bx * &by);
            prop_assert_eq!((&x - &y).to_big(), &bx - &by);
            prop_assert_eq!(x.cmp(&y), bx.cmp(&by));
            if c != 0 {
                prop_assert_eq!((&x / &y).to_big(), &bx / &by);
            }
        }
    }
}
