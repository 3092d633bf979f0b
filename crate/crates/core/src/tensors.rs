//! Symmetric and mixed covariant tensor fields over the Darboux torus.
//!
//! Symmetric fields store one component per sorted multi-index. Dense
//! [`Tensor`]s carry every index tuple and are used for intermediate
//! quantities such as covariant derivatives and curvature. Indices are
//! 0-based: axis `a < n` pairs with axis `a + n`.

use std::borrow::Cow;
use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::scalars::{Rational, Real, TrigScalar};

/// The flat torus `T^{2n}` with `Omega = sum_a dx^a ^ dx^{n+a}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SymplecticModel {
    n: usize,
}

impl SymplecticModel {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 || 2 * n > crate::scalars::MAX_DIM {
            return Err(Error::Invalid(format!("unsupported half dimension n = {n}")));
        }
        Ok(SymplecticModel { n })
    }
    pub fn n(&self) -> usize {
        self.n
    }
    pub fn dim(&self) -> usize {
        2 * self.n
    }
    /// The unique `j` with `Omega_{ij} != 0`.
    pub fn partner(&self, i: usize) -> usize {
        (i + self.n) % (2 * self.n)
    }
    /// `Omega_{i, partner(i)}`, which also equals `Omega^{i, partner(i)}`.
    pub fn sign(&self, i: usize) -> i64 {
        if i < self.n {
            1
        } else {
            -1
        }
    }
    /// Lower-index form `Omega_{ij}`.
    pub fn omega_lower(&self, i: usize, j: usize) -> i64 {
        if j == self.partner(i) {
            self.sign(i)
        } else {
            0
        }
    }
    /// Inverse `Omega^{ij}` with `Omega^{ip} Omega_{pj} = -delta^i_j`.
    pub fn omega_upper(&self, i: usize, j: usize) -> i64 {
        self.omega_lower(i, j)
    }
    /// Raising every index of a tuple: `beta^I = sign(I) beta_{partner(I)}`.
    pub fn raise_tuple(&self, idx: &[u8]) -> (i64, Vec<u8>) {
        let mut s = 1;
        let out = idx
            .iter()
            .map(|&i| {
                s *= self.sign(i as usize);
                self.partner(i as usize) as u8
            })
            .collect();
        (s, out)
    }
}

/// Sorted multi-indices of length `k` over `0..dim`.
pub fn multisets(dim: usize, k: usize) -> Vec<Vec<u8>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(dim: usize, k: usize, start: usize, cur: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..dim {
            cur.push(i as u8);
            rec(dim, k, i, cur, out);
            cur.pop();
        }
    }
    rec(dim, k, 0, &mut cur, &mut out);
    out
}

/// Every index tuple of length `rank`, lexicographic.
pub fn all_tuples(dim: usize, rank: usize) -> Vec<Vec<u8>> {
    let total = dim.pow(rank as u32);
    (0..total).map(|f| unflatten(dim, rank, f)).collect()
}

fn unflatten(dim: usize, rank: usize, mut f: usize) -> Vec<u8> {
    let mut out = vec![0u8; rank];
    for k in (0..rank).rev() {
        out[k] = (f % dim) as u8;
        f /= dim;
    }
    out
}

fn sorted(idx: &[u8]) -> Vec<u8> {
    let mut v = idx.to_vec();
    v.sort_unstable();
    v
}

fn factorial(k: usize) -> i64 {
    (1..=k as i64).product()
}

pub(crate) fn binomial(n: usize, k: usize) -> i64 {
    if k > n {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k {
        r = r * (n - i) as i64 / (i + 1) as i64;
    }
    r
}

fn counts(idx: &[u8], dim: usize) -> Vec<usize> {
    let mut c = vec![0; dim];
    for &i in idx {
        c[i as usize] += 1;
    }
    c
}

/// Number of distinct arrangements of a multi-index.
pub fn multiplicity(idx: &[u8], dim: usize) -> i64 {
    let mut m = factorial(idx.len());
    for c in counts(idx, dim) {
        m /= factorial(c);
    }
    m
}

/// Anything indexable by a full index tuple.
pub trait Components<R: Real>: Sync {
    fn dim(&self) -> usize;
    fn rank(&self) -> usize;
    fn comp(&self, idx: &[u8]) -> Cow<'_, TrigScalar<R>>;
}

/// Symmetric covariant tensor field of fixed degree.
#[derive(Clone, Debug, PartialEq)]
pub struct SymTensorField<R> {
    model: SymplecticModel,
    degree: usize,
    comps: BTreeMap<Vec<u8>, TrigScalar<R>>,
}

pub type ExactSym = SymTensorField<Rational>;

impl<R: Real> SymTensorField<R> {
    pub fn zero(model: SymplecticModel, degree: usize) -> Self {
        SymTensorField { model, degree, comps: BTreeMap::new() }
    }

    /// Degree-zero field.
    pub fn scalar(model: SymplecticModel, f: TrigScalar<R>) -> Self {
        let mut s = Self::zero(model, 0);
        s.set(&[], f);
        s
    }

    /// The covector `dx^q`.
    pub fn basis_covector(model: SymplecticModel, q: usize) -> Self {
        let mut s = Self::zero(model, 1);
        s.set(&[q as u8], TrigScalar::constant(model.dim(), R::one()));
        s
    }

    /// Build from components keyed by (not necessarily sorted) multi-indices.
    pub fn from_components<I>(model: SymplecticModel, degree: usize, comps: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u8>, TrigScalar<R>)>,
    {
        let mut s = Self::zero(model, degree);
        for (idx, f) in comps {
            if idx.len() != degree {
                return Err(Error::DegreeMismatch(format!("index {idx:?} for degree {degree}")));
            }
            if let Some(&bad) = idx.iter().find(|&&i| i as usize >= model.dim()) {
                return Err(Error::AxisOutOfRange { axis: bad as usize, dim: model.dim() });
            }
            if f.dim() != model.dim() {
                return Err(Error::DimensionMismatch { expected: model.dim(), got: f.dim() });
            }
            let mut cur = s.get(&idx).into_owned();
            cur += &f;
            s.set(&idx, cur);
        }
        Ok(s)
    }

    pub fn model(&self) -> SymplecticModel {
        self.model
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn dim(&self) -> usize {
        self.model.dim()
    }
    pub fn components(&self) -> &BTreeMap<Vec<u8>, TrigScalar<R>> {
        &self.comps
    }
    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    /// Component at any arrangement of `idx`.
    pub fn get(&self, idx: &[u8]) -> Cow<'_, TrigScalar<R>> {
        match self.comps.get(&sorted(idx)) {
            Some(f) => Cow::Borrowed(f),
            None => Cow::Owned(TrigScalar::zero(self.dim())),
        }
    }

    pub fn set(&mut self, idx: &[u8], f: TrigScalar<R>) {
        assert_eq!(idx.len(), self.degree);
        let key = sorted(idx);
        if f.is_zero() {
            self.comps.remove(&key);
        } else {
            self.comps.insert(key, f);
        }
    }

    fn add_at(&mut self, key: Vec<u8>, f: &TrigScalar<R>) {
        if f.is_zero() {
            return;
        }
        match self.comps.get_mut(&key) {
            Some(v) => {
                *v += f;
                if v.is_zero() {
                    self.comps.remove(&key);
                }
            }
            None => {
                self.comps.insert(key, f.clone());
            }
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.model != o.model {
            return Err(Error::ModelMismatch);
        }
        if self.degree != o.degree {
            return Err(Error::DegreeMismatch(format!("{} vs {}", self.degree, o.degree)));
        }
        Ok(())
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        let mut out = self.clone();
        for (k, f) in &o.comps {
            out.add_at(k.clone(), f);
        }
        Ok(out)
    }

    pub fn sub(&self, o: &Self) -> Result<Self> {
        self.add(&o.neg())
    }

    pub fn neg(&self) -> Self {
        self.map(|f| -f)
    }

    pub fn scale(&self, r: &R) -> Self {
        self.map(|f| f.scale(r))
    }

    pub fn scale_ratio(&self, num: i64, den: i64) -> Self {
        self.scale(&R::from_ratio(num, den))
    }

    /// Apply `f` to every component.
    pub fn map(&self, f: impl Fn(&TrigScalar<R>) -> TrigScalar<R>) -> Self {
        let mut out = Self::zero(self.model, self.degree);
        for (k, v) in &self.comps {
            let w = f(v);
            if !w.is_zero() {
                out.comps.insert(k.clone(), w);
            }
        }
        out
    }

    pub fn map_coeffs<S: Real>(&self, f: impl Fn(&R) -> S + Copy) -> SymTensorField<S> {
        let mut out = SymTensorField::zero(self.model, self.degree);
        for (k, v) in &self.comps {
            let w = v.map_coeffs(f);
            if !w.is_zero() {
                out.comps.insert(k.clone(), w);
            }
        }
        out
    }

    pub fn to_f64(&self) -> SymTensorField<f64> {
        self.map_coeffs(|r| r.to_f64())
    }

    /// Componentwise `d/dx^axis`.
    pub fn partial(&self, axis: usize) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::AxisOutOfRange { axis, dim: self.dim() });
        }
        Ok(self.map(|f| f.partial(axis).expect("axis checked")))
    }

    pub fn band(&self) -> usize {
        self.comps.values().map(TrigScalar::band).max().unwrap_or(0)
    }

    /// Degree-zero field as a scalar.
    pub fn as_scalar(&self) -> TrigScalar<R> {
        assert_eq!(self.degree, 0);
        self.get(&[]).into_owned()
    }

    /// `(iota_p alpha)_J = alpha_{pJ}`.
    pub fn interior(&self, p: usize) -> Self {
        let mut out = Self::zero(self.model, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (k, v) in &self.comps {
            if let Some(pos) = k.iter().position(|&i| i as usize == p) {
                let mut j = k.clone();
                j.remove(pos);
                out.comps.insert(j, v.clone());
            }
        }
        out
    }

    /// Every index raised with `Omega^{ij}`; the result holds contravariant components.
    pub fn raise_all(&self) -> Self {
        // target I = partner(K) picks up sign(I) = (-1)^deg sign(K)
        let flip = if self.degree % 2 == 1 { -1 } else { 1 };
        self.relabel_partner(flip)
    }

    /// Every index lowered with `X_i = X^p Omega_{pi}`.
    pub fn lower_all(&self) -> Self {
        // target I = partner(K) picks up prod(-sign(i)) = sign(K)
        self.relabel_partner(1)
    }

    fn relabel_partner(&self, flip: i64) -> Self {
        let mut out = Self::zero(self.model, self.degree);
        for (k, v) in &self.comps {
            let (s, img) = self.model.raise_tuple(k);
            out.comps.insert(sorted(&img), v.scale(&R::from_int(flip * s)));
        }
        out
    }

    /// Dense copy with every arrangement filled in.
    pub fn to_dense(&self) -> Tensor<R> {
        Tensor::from_fn(self.dim(), self.degree, |idx| self.get(idx).into_owned())
    }
}

impl SymTensorField<Rational> {
    /// Seeded random symmetric field with every component in the given band.
    pub fn random(seed: u64, model: SymplecticModel, degree: usize, band: usize, mag: i64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Self::zero(model, degree);
        for idx in multisets(model.dim(), degree) {
            out.set(&idx, TrigScalar::random(&mut rng, model.dim(), band, mag));
        }
        out
    }
}

impl<R: Real> Components<R> for SymTensorField<R> {
    fn dim(&self) -> usize {
        self.model.dim()
    }
    fn rank(&self) -> usize {
        self.degree
    }
    fn comp(&self, idx: &[u8]) -> Cow<'_, TrigScalar<R>> {
        self.get(idx)
    }
}

/// Dense covariant tensor with every index tuple stored.
#[derive(Clone, Debug, PartialEq)]
pub struct Tensor<R> {
    dim: usize,
    rank: usize,
    data: Vec<TrigScalar<R>>,
}

impl<R: Real> Tensor<R> {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        Tensor { dim, rank, data: vec![TrigScalar::zero(dim); dim.pow(rank as u32)] }
    }

    /// Fill every entry from `f`, in parallel.
    pub fn from_fn(dim: usize, rank: usize, f: impl Fn(&[u8]) -> TrigScalar<R> + Sync) -> Self {
        let total = dim.pow(rank as u32);
        let data = (0..total).into_par_iter().map(|k| f(&unflatten(dim, rank, k))).collect();
        Tensor { dim, rank, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn rank(&self) -> usize {
        self.rank
    }

    fn flat(&self, idx: &[u8]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        idx.iter().fold(0, |acc, &i| acc * self.dim + i as usize)
    }

    pub fn at(&self, idx: &[u8]) -> &TrigScalar<R> {
        &self.data[self.flat(idx)]
    }

    pub fn set(&mut self, idx: &[u8], f: TrigScalar<R>) {
        let k = self.flat(idx);
        self.data[k] = f;
    }

    pub fn entries(&self) -> impl Iterator<Item = (Vec<u8>, &TrigScalar<R>)> {
        self.data.iter().enumerate().map(move |(k, f)| (unflatten(self.dim, self.rank, k), f))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(TrigScalar::is_zero)
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (o.dim, o.rank));
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.dim, self.rank), (o.dim, o.rank));
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, r: &R) -> Self {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(|a| a.scale(r)).collect() }
    }

    pub fn map_coeffs<S: Real>(&self, f: impl Fn(&R) -> S + Copy) -> Tensor<S> {
        Tensor { dim: self.dim, rank: self.rank, data: self.data.iter().map(|a| a.map_coeffs(f)).collect() }
    }

    /// Reorder slots: entry `out[idx] = self[idx permuted by perm]`, i.e.
    /// `out_{i_0..i_r} = self_{i_perm[0]..i_perm[r]}`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        assert_eq!(perm.len(), self.rank);
        Tensor::from_fn(self.dim, self.rank, |idx| {
            let src: Vec<u8> = perm.iter().map(|&p| idx[p]).collect();
            self.at(&src).clone()
        })
    }

    /// Full symmetrization.
    pub fn symmetrize(&self, model: SymplecticModel) -> SymTensorField<R> {
        assert_eq!(model.dim(), self.dim);
        let mut acc: BTreeMap<Vec<u8>, TrigScalar<R>> = BTreeMap::new();
        for (idx, f) in self.entries() {
            if f.is_zero() {
                continue;
            }
            let key = sorted(&idx);
            acc.entry(key).and_modify(|v| *v += f).or_insert_with(|| f.clone());
        }
        let mut out = SymTensorField::zero(model, self.rank);
        for (k, v) in acc {
            let m = multiplicity(&k, self.dim);
            out.set(&k, v.scale_ratio(1, m));
        }
        out
    }

    /// Read as a symmetric field, failing if any entry disagrees with its sorted twin
    /// (beyond rounding, for doubles).
    pub fn to_sym(&self, model: SymplecticModel) -> Result<SymTensorField<R>> {
        for (idx, f) in self.entries() {
            let s = sorted(&idx);
            let twin = self.at(&s);
            if twin != f && !twin.close_to(f) {
                if !(twin.is_finite() && f.is_finite()) {
                    return Err(Error::NonFinite(format!("entry {idx:?}")));
                }
                return Err(Error::SymmetryViolation(format!("entry {idx:?} differs from {s:?}")));
            }
        }
        let mut out = SymTensorField::zero(model, self.rank);
        for k in multisets(self.dim, self.rank) {
            out.set(&k, self.at(&k).clone());
        }
        Ok(out)
    }

    /// Largest defect of symmetry under swapping slots `a` and `b` (zero when symmetric).
    pub fn swap_defect(&self, a: usize, b: usize, antisym: bool) -> Tensor<R> {
        let mut perm: Vec<usize> = (0..self.rank).collect();
        perm.swap(a, b);
        let sw = self.permuted(&perm);
        if antisym {
            self.add(&sw)
        } else {
            self.sub(&sw)
        }
    }
}

impl<R: Real> Components<R> for Tensor<R> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn comp(&self, idx: &[u8]) -> Cow<'_, TrigScalar<R>> {
        Cow::Borrowed(self.at(idx))
    }
}

/// Pointwise full contraction `sum_I a_I b^I` with every index of `b` raised.
pub fn fiber_contraction<R: Real>(model: SymplecticModel, a: &dyn Components<R>, b: &dyn Components<R>) -> TrigScalar<R> {
    assert_eq!(a.rank(), b.rank());
    let mut acc = TrigScalar::zero(model.dim());
    for idx in all_tuples(model.dim(), a.rank()) {
        let x = a.comp(&idx);
        if x.is_zero() {
            continue;
        }
        let (s, img) = model.raise_tuple(&idx);
        let y = b.comp(&img);
        if y.is_zero() {
            continue;
        }
        acc.add_scaled(&(x.as_ref() * y.as_ref()), &R::from_int(s));
    }
    acc
}

/// Torus average of the full contraction `sum_I a_I b^I`.
pub fn mean_contraction<R: Real>(model: SymplecticModel, a: &dyn Components<R>, b: &dyn Components<R>) -> R {
    assert_eq!(a.rank(), b.rank());
    let mut acc = R::zero();
    for idx in all_tuples(model.dim(), a.rank()) {
        let x = a.comp(&idx);
        if x.is_zero() {
            continue;
        }
        let (s, img) = model.raise_tuple(&idx);
        let v = x.mean_product(&b.comp(&img));
        acc.add_mut(&v.times(&R::from_int(s)));
    }
    acc
}

/// Symmetric product `(a . b)_{i_1..i_{k+l}} = a_{(i_1..i_k} b_{..i_{k+l})}`.
pub fn sym_product<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if a.model != b.model {
        return Err(Error::ModelMismatch);
    }
    let (k, l) = (a.degree, b.degree);
    let dim = a.dim();
    let norm = binomial(k + l, k);
    let mut out = SymTensorField::zero(a.model, k + l);
    for (j, fa) in &a.comps {
        let cj = counts(j, dim);
        for (kk, fb) in &b.comps {
            let mut idx = j.clone();
            idx.extend_from_slice(kk);
            idx.sort_unstable();
            let ci = counts(&idx, dim);
            let w: i64 = (0..dim).map(|i| binomial(ci[i], cj[i])).product();
            let prod = (fa * fb).scale_ratio(w, norm);
            out.add_at(idx, &prod);
        }
    }
    Ok(out)
}

/// Algebraic bracket `(a, b) = k l a_{p(i..} b_{..)}^p`, of degree `k + l - 2`.
pub fn algebraic_bracket<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if a.model != b.model {
        return Err(Error::ModelMismatch);
    }
    let (k, l) = (a.degree, b.degree);
    if k == 0 || l == 0 {
        return Ok(SymTensorField::zero(a.model, (k + l).saturating_sub(2)));
    }
    let m = a.model;
    let mut out = SymTensorField::zero(m, k + l - 2);
    for p in 0..m.dim() {
        let ia = a.interior(p);
        let ib = b.interior(m.partner(p));
        if ia.is_zero() || ib.is_zero() {
            continue;
        }
        let term = sym_product(&ia, &ib)?.scale(&R::from_int(k as i64 * l as i64 * m.sign(p)));
        out = out.add(&term)?;
    }
    Ok(out)
}

/// `eta(a) = k a` on degree `k`.
pub fn eta<R: Real>(a: &SymTensorField<R>) -> SymTensorField<R> {
    a.scale(&R::from_int(a.degree as i64))
}

/// Prolongation bracket `[a, b] = (k+l-2)/(kl) (a, b)`.
pub fn prolongation_bracket<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    let (k, l) = (a.degree as i64, b.degree as i64);
    if k == 0 || l == 0 {
        return Ok(SymTensorField::zero(a.model, (a.degree + b.degree).saturating_sub(2)));
    }
    Ok(algebraic_bracket(a, b)?.scale_ratio(k + l - 2, k * l))
}

/// Global pairing `<<a, b>> = mean(a_I b^I)` of symmetric fields of equal degree.
pub fn pairing<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<R> {
    a.check(b)?;
    let m = a.model;
    let mut acc = R::zero();
    for (idx, fa) in &a.comps {
        let (s, img) = m.raise_tuple(idx);
        let fb = b.get(&img);
        if fb.is_zero() {
            continue;
        }
        let w = multiplicity(idx, m.dim()) * s;
        acc.add_mut(&fa.mean_product(&fb).times(&R::from_int(w)));
    }
    Ok(acc)
}

/// Mixed covariant field, antisymmetric in the first `p` slots and symmetric in the last `q`.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedTensorField<R> {
    model: SymplecticModel,
    p: usize,
    q: usize,
    data: Tensor<R>,
}

impl<R: Real> MixedTensorField<R> {
    /// Wrap a dense tensor after checking its block symmetries.
    pub fn new(model: SymplecticModel, p: usize, q: usize, data: Tensor<R>) -> Result<Self> {
        if data.rank() != p + q || data.dim() != model.dim() {
            return Err(Error::DegreeMismatch(format!("rank {} for shape ({p},{q})", data.rank())));
        }
        for a in 0..p {
            for b in a + 1..p {
                if !data.swap_defect(a, b, true).is_zero() {
                    return Err(Error::SymmetryViolation(format!("slots {a},{b} not antisymmetric")));
                }
            }
        }
        for a in p..p + q {
            for b in a + 1..p + q {
                if !data.swap_defect(a, b, false).is_zero() {
                    return Err(Error::SymmetryViolation(format!("slots {a},{b} not symmetric")));
                }
            }
        }
        Ok(MixedTensorField { model, p, q, data })
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.p, self.q)
    }
    pub fn dense(&self) -> &Tensor<R> {
        &self.data
    }
    pub fn model(&self) -> SymplecticModel {
        self.model
    }
}

/// Pairing `(-1)^p / p! mean(a_I b^I)` on fields of the same shape `(p, q)`.
pub fn mixed_pairing<R: Real>(a: &MixedTensorField<R>, b: &MixedTensorField<R>) -> Result<R> {
    if a.model != b.model {
        return Err(Error::ModelMismatch);
    }
    if a.shape() != b.shape() {
        return Err(Error::DegreeMismatch(format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    let raw = mean_contraction(a.model, &a.data, &b.data);
    let sign = if a.p % 2 == 1 { -1 } else { 1 };
    Ok(raw.times(&R::from_ratio(sign, factorial(a.p))))
}
