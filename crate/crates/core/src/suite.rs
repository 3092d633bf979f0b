//! Registry of exact identities, seeded runs and the verification report.

use std::time::Instant;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calculus::{delta, delta_star, interior_derivation, is_closed, lie_derivative, poisson, schouten, schouten_with, sharp_of};
use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::geometry::{ab_variation_check, atiyah_bott_pairing, cahen_gutt, cahen_gutt_mean, op_h, pi_star_pi, ricci, Curvature};
use crate::interp::{nodes, poly_coeffs};
use crate::lie::{bracket_st, bracket_truncated, psi_st, sigma_cocycle, star, BracketParams, ExtElement, FormalSum, HamSec, Truncation};
use crate::moment::{
    action_increment, affine_action, equivariance_defect, evaluate, first_variation, hamiltonian_field, poisson_functionals, ricci_trace,
    symplectic_form, top_bracket, Acting, FunctionalId,
};
use crate::scalars::{q, ts_random, Rational, TrigScalar};
use crate::tensors::{algebraic_bracket, multisets, mixed_pairing, pairing, sym_product, SymTensorField, SymplecticModel, Tensor};

type Sym = SymTensorField<Rational>;
type Sum = FormalSum<Rational>;
type Conn = Connection<Rational>;
type Ext = ExtElement<Rational>;

/// Inputs of one seeded run.
///
/// At `2n = 4` dense band-limited inputs make the brackets too expensive, so every field
/// of a run is built from a constant plus the same two seeded modes.
#[derive(Clone, Debug)]
pub struct Ctx {
    pub model: SymplecticModel,
    pub band: usize,
    pub seed: u64,
    pub params: Vec<BracketParams<Rational>>,
    modes: Vec<Vec<i64>>,
}

impl Ctx {
    pub fn new(model: SymplecticModel, band: usize, seed: u64, params: Vec<BracketParams<Rational>>) -> Self {
        let mut modes = Vec::new();
        if model.n() >= 2 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f0de);
            let b = band as i64;
            while modes.len() < 2 {
                let m: Vec<i64> = (0..model.dim()).map(|_| rng.random_range(-b..=b)).collect();
                if m.iter().any(|&x| x != 0) && !modes.iter().any(|o: &Vec<i64>| o == &m || o.iter().zip(&m).all(|(a, b)| *a == -b)) {
                    modes.push(m);
                }
            }
        }
        Ctx { model, band, seed, params, modes }
    }
    fn salt(&self, s: u64) -> u64 {
        self.seed.wrapping_mul(1_000_003).wrapping_add(s)
    }
    fn few_mode(&self, rng: &mut ChaCha8Rng, mag: i64) -> TrigScalar<Rational> {
        let dim = self.model.dim();
        let mut c = || q(rng.random_range(-mag..=mag), 1);
        let mut f = TrigScalar::constant(dim, c());
        for m in &self.modes {
            f += &TrigScalar::cos_mode(dim, m, c()).expect("mode");
            f += &TrigScalar::sin_mode(dim, m, c()).expect("mode");
        }
        f
    }
    fn field(&self, s: u64, degree: usize, band: usize, mag: i64) -> Sym {
        if self.modes.is_empty() {
            return SymTensorField::random(self.salt(s), self.model, degree, band, mag);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.salt(s));
        let mut out = SymTensorField::zero(self.model, degree);
        for idx in multisets(self.model.dim(), degree) {
            out.set(&idx, self.few_mode(&mut rng, mag));
        }
        out
    }
    fn sym(&self, s: u64, degree: usize) -> Sym {
        self.field(s, degree, self.band, 3)
    }
    fn sym_band(&self, s: u64, degree: usize, band: usize) -> Sym {
        self.field(s, degree, band, 3)
    }
    fn scalar(&self, s: u64) -> TrigScalar<Rational> {
        if self.modes.is_empty() {
            return ts_random(self.salt(s), self.model.dim(), self.band, 3);
        }
        self.few_mode(&mut ChaCha8Rng::seed_from_u64(self.salt(s)), 3)
    }
    fn conn(&self, s: u64) -> Conn {
        Connection::from_sym(&self.field(s, 3, self.band, 2)).expect("degree 3")
    }
    fn small_conn(&self, s: u64) -> Conn {
        Connection::from_sym(&self.field(s, 3, 1, 1)).expect("degree 3")
    }
    fn sum(&self, s: u64, degrees: &[usize], n_max: usize) -> Sum {
        if self.modes.is_empty() {
            return FormalSum::random(self.salt(s), self.model, n_max, degrees, self.band.min(1), 2);
        }
        let parts: Vec<Sym> = degrees.iter().map(|&k| self.field(s * 16 + k as u64, k, 1, 2)).collect();
        FormalSum::from_fields(self.model, n_max, &parts).expect("degrees within n_max")
    }
    fn ext(&self, s: u64) -> Ext {
        if self.modes.is_empty() {
            return ExtElement::random(self.salt(s), self.model, self.band.min(1), 2);
        }
        let a0 = self.few_mode(&mut ChaCha8Rng::seed_from_u64(self.salt(s)), 2);
        ExtElement::new(a0, self.field(s * 16 + 2, 2, 1, 2), self.field(s * 16 + 3, 3, 1, 2)).expect("degrees 2 and 3")
    }
    fn hamsec(&self, s: u64, n_max: usize) -> Result<HamSec<Rational>> {
        HamSec::make(self.scalar(s), &self.sum(s + 1, &[2, 3], n_max))
    }
    /// `-df + sum (i+1)/2 dx^i`.
    fn closed_form(&self, s: u64) -> Result<Sym> {
        let m = self.model;
        let mut a = delta_star(&Connection::flat(m), &SymTensorField::scalar(m, self.scalar(s)))?;
        for i in 0..m.dim() {
            a = a.add(&SymTensorField::basis_covector(m, i).scale(&q(i as i64 + 1, 2)))?;
        }
        Ok(a)
    }
    fn closed_sum(&self, s: u64, n_max: usize) -> Result<Sum> {
        let mut out = self.sum(s, &[2, 3], n_max);
        out.set_part(self.closed_form(s + 100)?)?;
        Ok(out)
    }
}

/// What a check found; `zero` is the verdict.
#[derive(Clone, Debug, PartialEq)]
pub struct Residual {
    pub zero: bool,
    pub display: String,
}

impl Residual {
    fn all(parts: impl IntoIterator<Item = Residual>) -> Residual {
        let bad: Vec<String> = parts.into_iter().filter(|r| !r.zero).map(|r| r.display).collect();
        if bad.is_empty() {
            Residual { zero: true, display: "0".into() }
        } else {
            Residual { zero: false, display: bad.join("; ") }
        }
    }
}

fn of_sym(r: &Sym) -> Residual {
    if r.is_zero() {
        Residual { zero: true, display: "0".into() }
    } else {
        let n = r.components().values().filter(|f| !f.is_zero()).count();
        Residual { zero: false, display: format!("degree-{} field with {n} nonzero components", r.degree()) }
    }
}

fn of_sum(r: &Sum) -> Residual {
    if r.is_zero() {
        Residual { zero: true, display: "0".into() }
    } else {
        let degs: Vec<usize> = r.parts().iter().enumerate().filter(|(_, p)| !p.is_zero()).map(|(k, _)| k).collect();
        Residual { zero: false, display: format!("formal sum nonzero in degrees {degs:?}") }
    }
}

fn of_tensor(r: &Tensor<Rational>) -> Residual {
    if r.is_zero() {
        Residual { zero: true, display: "0".into() }
    } else {
        Residual { zero: false, display: format!("rank-{} tensor nonzero", r.rank()) }
    }
}

fn of_scalar(r: &TrigScalar<Rational>) -> Residual {
    Residual { zero: r.is_zero(), display: if r.is_zero() { "0".into() } else { format!("scalar with {} terms", r.len()) } }
}

fn of_rational(r: Rational) -> Residual {
    Residual { zero: r.is_zero(), display: r.to_string() }
}

fn of_ext(r: &Ext) -> Residual {
    Residual { zero: r.is_zero(), display: if r.is_zero() { "0".into() } else { "extended element nonzero".into() } }
}

pub type Check = fn(&Ctx) -> Result<Residual>;

/// A registered identity.
pub struct Identity {
    pub name: &'static str,
    pub statement: &'static str,
    pub check: Check,
}

fn ab(a: &Sym, b: &Sym) -> Result<Sym> {
    algebraic_bracket(a, b)
}

fn sum3(a: Sym, b: Sym, c: Sym) -> Result<Sym> {
    a.add(&b)?.add(&c)
}

fn jacobi_st(p: &BracketParams<Rational>, a: &Sum, b: &Sum, c: &Sum) -> Result<Sum> {
    let br = |x: &Sum, y: &Sum| bracket_st(p, x, y);
    br(&br(a, b)?, c)?.add(&br(&br(b, c)?, a)?)?.add(&br(&br(c, a)?, b)?)
}

fn triple(ctx: &Ctx, degrees: &[usize], n_max: usize) -> [Sum; 3] {
    [0, 1, 2].map(|i| ctx.sum(10 + i, degrees, n_max))
}

// Brackets

fn jacobi_algebraic(ctx: &Ctx) -> Result<Residual> {
    let [a, b, c] = triple(ctx, &[1, 2, 3], 7);
    Ok(of_sum(&jacobi_st(&BracketParams::new(q(1, 1), q(0, 1)), &a, &b, &c)?))
}

fn jacobi_schouten(ctx: &Ctx) -> Result<Residual> {
    let [a, b, c] = triple(ctx, &[0, 1, 2, 3], 7);
    Ok(of_sum(&jacobi_st(&BracketParams::new(q(0, 1), q(1, 1)), &a, &b, &c)?))
}

fn jacobi_combined(ctx: &Ctx) -> Result<Residual> {
    let [a, b, c] = triple(ctx, &[0, 1, 2, 3], 7);
    let parts = ctx.params.iter().map(|p| jacobi_st(p, &a, &b, &c).map(|r| of_sum(&r))).collect::<Result<Vec<_>>>()?;
    Ok(Residual::all(parts))
}

fn jacobi_top(ctx: &Ctx) -> Result<Residual> {
    let top = |x: &Sum, y: &Sum| bracket_truncated(Truncation::Top, x, y);
    let (a, b, c) = (ctx.closed_sum(1, 6)?, ctx.closed_sum(2, 6)?, ctx.closed_sum(3, 6)?);
    let j = top(&top(&a, &b)?, &c)?.add(&top(&top(&b, &c)?, &a)?)?.add(&top(&top(&c, &a)?, &b)?)?;
    Ok(of_sum(&j))
}

fn jacobi_extended(ctx: &Ctx) -> Result<Residual> {
    let r = ctx.small_conn(4);
    let (a, b, c) = (ctx.ext(1), ctx.ext(2), ctx.ext(3));
    let mut parts = Vec::new();
    for p in ctx.params.iter().filter(|p| !p.is_degenerate()) {
        let br = |x: &Ext, y: &Ext| x.extended_bracket_st(y, p, &r);
        let total = br(&br(&a, &b)?, &c)?.add(&br(&br(&b, &c)?, &a)?)?.add(&br(&br(&c, &a)?, &b)?)?;
        parts.push(of_ext(&total));
    }
    Ok(Residual::all(parts))
}

fn leibniz_algebraic(ctx: &Ctx) -> Result<Residual> {
    let (a, b, c) = (ctx.sym(1, 2), ctx.sym(2, 1), ctx.sym(3, 2));
    let lhs = ab(&a, &sym_product(&b, &c)?)?;
    let rhs = sym_product(&ab(&a, &b)?, &c)?.add(&sym_product(&b, &ab(&a, &c)?)?)?;
    Ok(of_sym(&lhs.sub(&rhs)?))
}

fn delta_star_leibniz(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let (a, b) = (ctx.sym(2, 1), ctx.sym(3, 2));
    let lhs = delta_star(&c, &sym_product(&a, &b)?)?;
    let rhs = sym_product(&delta_star(&c, &a)?, &b)?.add(&sym_product(&a, &delta_star(&c, &b)?)?)?;
    Ok(of_sym(&lhs.sub(&rhs)?))
}

fn schouten_coboundary(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let mut parts = Vec::new();
    for (k, l) in [(1, 1), (1, 2), (2, 2), (2, 3), (0, 3)] {
        let (a, b) = (ctx.sym(10 + k as u64, k), ctx.sym_band(20 + l as u64, l, 1));
        let ds = |x: &Sym| delta_star(&c, x);
        let rhs = ab(&ds(&a)?, &b)?.add(&ab(&a, &ds(&b)?)?)?.sub(&ds(&ab(&a, &b)?)?)?;
        parts.push(of_sym(&schouten(&a, &b)?.sub(&rhs)?));
    }
    Ok(Residual::all(parts))
}

fn brackets_compatible(ctx: &Ctx) -> Result<Residual> {
    let (a, b, c) = (ctx.sym(1, 2), ctx.sym_band(2, 3, 1), ctx.sym(3, 1));
    let term = |x: &Sym, y: &Sym, z: &Sym| -> Result<Sym> { ab(&schouten(x, y)?, z)?.add(&schouten(&ab(x, y)?, z)?) };
    Ok(of_sym(&sum3(term(&a, &b, &c)?, term(&b, &c, &a)?, term(&c, &a, &b)?)?))
}

fn delta_star_shift(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let pi = ctx.sym_band(2, 3, 1);
    let c2 = c.shifted_sym(&pi, &q(1, 1))?;
    let mut parts = Vec::new();
    for k in 0..=3 {
        let g = ctx.sym_band(10 + k as u64, k, 1);
        let rhs = delta_star(&c, &g)?.add(&ab(&g, &pi)?.scale(&q(1, 3)))?;
        parts.push(of_sym(&delta_star(&c2, &g)?.sub(&rhs)?));
    }
    Ok(Residual::all(parts))
}

fn delta_shift(ctx: &Ctx) -> Result<Residual> {
    let m = ctx.model;
    let d = m.dim();
    let c = ctx.conn(1);
    let pi = ctx.sym_band(2, 3, 1);
    let c2 = c.shifted_sym(&pi, &q(1, 1))?;
    let mut parts = Vec::new();
    for k in 1..=3usize {
        let a = ctx.sym_band(10 + k as u64, k, 1);
        // Pi^{pq}_i a_{..pq}, symmetrized
        let extra = if k >= 2 {
            Tensor::from_fn(d, k - 1, |idx| {
                let mut acc = TrigScalar::zero(d);
                for p in 0..d {
                    for qq in 0..d {
                        let w = m.sign(p) * m.sign(qq);
                        let piv = pi.get(&[m.partner(p) as u8, m.partner(qq) as u8, idx[0]]);
                        let mut ai = idx[1..].to_vec();
                        ai.push(p as u8);
                        ai.push(qq as u8);
                        acc.add_scaled(&(&*piv * &*a.get(&ai)), &q(w, 1));
                    }
                }
                acc
            })
            .symmetrize(m)
        } else {
            SymTensorField::zero(m, 0)
        };
        let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
        let rhs = delta(&c, &a)?.add(&extra.scale(&q(sign * (k as i64 - 1), 1)))?;
        parts.push(of_sym(&delta(&c2, &a)?.sub(&rhs)?));
    }
    Ok(Residual::all(parts))
}

/// `Sym sum_{p,q} R^p_{i_1 i_2}^q a_{i_3..i_k p q}`.
fn curvature_term(cv: &Curvature<Rational>, a: &Sym) -> Sym {
    let m = a.model();
    let d = m.dim();
    let riem = cv.riem();
    Tensor::from_fn(d, a.degree(), |idx| {
        let mut acc = TrigScalar::zero(d);
        for p in 0..d {
            for qq in 0..d {
                let r = riem.at(&[m.partner(p) as u8, idx[0], idx[1], m.partner(qq) as u8]);
                if r.is_zero() {
                    continue;
                }
                let mut j = idx[2..].to_vec();
                j.push(p as u8);
                j.push(qq as u8);
                acc.add_scaled(&(r * &*a.get(&j)), &q(m.sign(p) * m.sign(qq), 1));
            }
        }
        acc
    })
    .symmetrize(m)
}

fn delta_delta_star_commutation(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let cv = Curvature::of(&c);
    let ric = cv.ricci()?;
    let mut parts = Vec::new();
    for k in 2..=3usize {
        let a = ctx.sym_band(10 + k as u64, k, 1);
        let kk = k as i64;
        let lhs = delta(&c, &delta_star(&c, &a)?)?.scale(&q(kk + 1, 1)).add(&delta_star(&c, &delta(&c, &a)?)?.scale(&q(kk, 1)))?;
        let sign = if k % 2 == 0 { 1 } else { -1 };
        let rhs = ab(&a, &ric)?.sub(&curvature_term(&cv, &a).scale(&q(kk * (kk - 1), 1)))?.scale(&q(sign, 1));
        parts.push(of_sym(&lhs.sub(&rhs)?));
    }
    Ok(Residual::all(parts))
}

fn schouten_connection_independence(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let mut parts = Vec::new();
    for (k, l) in [(1, 2), (2, 2), (3, 1), (0, 3)] {
        let (a, b) = (ctx.sym_band(10 + k as u64, k, 1), ctx.sym_band(20 + l as u64, l, 1));
        parts.push(of_sym(&schouten_with(&c, &a, &b)?.sub(&schouten(&a, &b)?)?));
    }
    Ok(Residual::all(parts))
}

fn derivation_lie(ctx: &Ctx) -> Result<Residual> {
    let xf = ctx.closed_form(1)?;
    let x = sharp_of(&xf);
    let mut parts = Vec::new();
    for k in 0..=3 {
        let a = ctx.sym(10 + k as u64, k);
        parts.push(of_sym(&lie_derivative(&x, &a)?.sub(&schouten(&xf, &a)?)?));
    }
    let (b, c) = (ctx.sym_band(2, 2, 1), ctx.sym_band(3, 3, 1));
    let l = |a: &Sym| schouten(&xf, a);
    let rhs = ab(&l(&b)?, &c)?.add(&ab(&b, &l(&c)?)?)?;
    parts.push(of_sym(&l(&ab(&b, &c)?)?.sub(&rhs)?));
    Ok(Residual::all(parts))
}

fn derivation_interior(ctx: &Ctx) -> Result<Residual> {
    let xf = ctx.closed_form(1)?;
    let x = sharp_of(&xf);
    let i = |a: &Sym| interior_derivation(&x, a);
    let (b, c) = (ctx.sym_band(2, 2, 1), ctx.sym_band(3, 3, 1));
    let first = of_sym(&i(&b)?.add(&ab(&xf, &b)?)?);
    let rhs = schouten(&i(&b)?, &c)?.add(&schouten(&b, &i(&c)?)?)?;
    Ok(Residual::all([first, of_sym(&i(&schouten(&b, &c)?)?.sub(&rhs)?)]))
}

fn algebraic_bracket_pairing(ctx: &Ctx) -> Result<Residual> {
    let alpha = ctx.sym_band(1, 2, 1);
    let mut parts = Vec::new();
    for k in 1..=3 {
        let (p1, p2) = (ctx.sym(10 + k as u64, k), ctx.sym_band(20 + k as u64, k, 1));
        parts.push(of_rational(pairing(&ab(&alpha, &p1)?, &p2)? + pairing(&p1, &ab(&alpha, &p2)?)?));
    }
    Ok(Residual::all(parts))
}

fn psi_intertwining(ctx: &Ctx) -> Result<Residual> {
    let [a, b, _] = triple(ctx, &[0, 1, 2, 3], 6);
    let mut parts = Vec::new();
    for p in ctx.params.iter().filter(|p| !p.is_degenerate()) {
        let lhs = psi_st(p, &bracket_st(p, &a, &b)?)?;
        let rhs = bracket_st(&BracketParams::one_one(), &psi_st(p, &a)?, &psi_st(p, &b)?)?;
        parts.push(of_sum(&lhs.sub(&rhs)?));
    }
    Ok(Residual::all(parts))
}

fn hamsec_closure(ctx: &Ctx) -> Result<Residual> {
    let m = ctx.model;
    let (a, b) = (ctx.hamsec(1, 5)?, ctx.hamsec(20, 5)?);
    let br = a.bracket(&b)?;
    let pb = poisson(m, &a.scalar(), &b.scalar())?;
    let scalar = of_scalar(&(&br.scalar() + &pb));
    let expect1 = delta_star(&Connection::flat(m), br.sum().part(0))?.neg();
    Ok(Residual::all([scalar, of_sym(&br.sum().part(1).sub(&expect1)?)]))
}

fn iota_homomorphism(ctx: &Ctx) -> Result<Residual> {
    let m = ctx.model;
    let (f, g) = (ctx.scalar(1), ctx.scalar(2));
    let lhs = HamSec::iota(m, 4, &f).bracket(&HamSec::iota(m, 4, &g))?;
    let rhs = HamSec::iota(m, 4, &poisson(m, &f, &g)?);
    Ok(of_sum(&lhs.sum().sub(rhs.sum())?))
}

fn pi1_homomorphism(ctx: &Ctx) -> Result<Residual> {
    let (a, b) = (ctx.hamsec(1, 6)?, ctx.hamsec(20, 6)?);
    let lhs = a.bracket(&b)?.pi1();
    let rhs = bracket_truncated(Truncation::Top, &a.pi1(), &b.pi1())?;
    Ok(of_sum(&lhs.sub(&rhs)?))
}

// Geometry

fn riemann_symplectic(ctx: &Ctx) -> Result<Residual> {
    let mut parts = Vec::new();
    for c in [ctx.conn(1), Connection::random_with_torsion(ctx.salt(2), ctx.model, ctx.band, 2)] {
        let r = Curvature::of(&c).riem().clone();
        parts.push(of_tensor(&r.swap_defect(0, 1, true)));
        parts.push(of_tensor(&r.swap_defect(2, 3, false)));
    }
    Ok(Residual::all(parts))
}

fn ricci_symmetry(ctx: &Ctx) -> Result<Residual> {
    let cv = Curvature::of(&ctx.conn(1));
    Ok(of_tensor(&cv.ricci_tensor().swap_defect(0, 1, false)))
}

fn riemann_trace(ctx: &Ctx) -> Result<Residual> {
    let cv = Curvature::of(&ctx.conn(1));
    let ft = cv.first_trace().to_sym(ctx.model)?;
    Ok(of_sym(&ft.sub(&cv.ricci()?.scale(&q(2, 1)))?))
}

fn divergence_of_h(ctx: &Ctx) -> Result<Residual> {
    let m = ctx.model;
    let c = ctx.conn(1);
    let f = ctx.scalar(2);
    let df = delta_star(&c, &SymTensorField::scalar(m, f.clone()))?;
    let lhs = delta(&c, &op_h(&c, &f)?)?;
    Ok(of_sym(&lhs.sub(&schouten(&df, &ricci(&c)?)?)?))
}

fn k_variation(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.small_conn(1);
    let pi = ctx.sym_band(2, 3, 1);
    let ns = [q(0, 1), q(1, 1), q(-1, 1), q(1, 2), q(-1, 2), q(2, 1)];
    let vals = ns.iter().map(|t| cahen_gutt(&c.shifted_sym(&pi, t)?)).collect::<Result<Vec<_>>>()?;
    let co = poly_coeffs(&ns, &vals);
    let d3 = delta(&c, &delta(&c, &delta(&c, &pi)?)?)?;
    let ds = delta(&c, &crate::geometry::op_s(&c, &pi)?)?;
    let lin = d3.add(&ds)?.neg().as_scalar();
    let quad = delta(&c, &pi_star_pi(&c, &pi)?)?.as_scalar().scale(&q(1, 2));
    Ok(Residual::all([of_scalar(&(&co[0] - &cahen_gutt(&c)?)), of_scalar(&(&co[1] - &lin)), of_scalar(&(&co[2] - &quad)), of_scalar(&co[5])]))
}

fn curvature_pairing(c: &Conn, a: &Sym, b: &Sym) -> Result<Rational> {
    mixed_pairing(&star(a, b)?, &Curvature::of(c).as_mixed()?)
}

fn ricci_poisson_rhs(c: &Conn, a: &Sym, b: &Sym) -> Result<Rational> {
    let dd = pairing(&delta(c, a)?, &delta(c, b)?)?;
    let rab = pairing(&ab(a, b)?, &ricci(c)?)?;
    Ok(dd * q(-2, 3) + curvature_pairing(c, a, b)? * q(1, 3) + rab * q(1, 3))
}

fn ricci_poisson_scalar(ctx: &Ctx) -> Result<Residual> {
    let (a, b) = (ctx.sym_band(1, 2, 1), ctx.sym_band(2, 2, 1));
    let c = ctx.conn(3);
    let lhs = poisson_functionals(&FunctionalId::r_alpha(a.clone())?, &FunctionalId::r_alpha(b.clone())?, &c)?;
    Ok(of_rational(lhs - ricci_poisson_rhs(&c, &a, &b)?))
}

fn ricci_poisson_field(ctx: &Ctx) -> Result<Residual> {
    let (a, b) = (ctx.sym_band(1, 2, 1), ctx.sym_band(2, 2, 1));
    let c = ctx.conn(3);
    let pi = ctx.sym_band(4, 3, 1);
    let ns = nodes(5);
    let vals = ns.iter().map(|t| ricci_poisson_rhs(&c.shifted_sym(&pi, t)?, &a, &b)).collect::<Result<Vec<_>>>()?;
    let variation = poly_coeffs(&ns, &vals)[1].clone();
    let field = delta_star(&c, &ab(&a, &b)?)?.add(&schouten(&a, &b)?)?.scale(&q(-1, 3));
    Ok(of_rational(variation - symplectic_form(&pi, &field)?))
}

fn curvature_pairing_shift(ctx: &Ctx) -> Result<Residual> {
    let (a, b) = (ctx.sym_band(1, 2, 1), ctx.sym_band(2, 2, 1));
    let c0 = ctx.conn(3);
    let pi = ctx.sym_band(4, 3, 1);
    let c = c0.shifted_sym(&pi, &q(1, 1))?;
    let side = |c: &Conn| -> Result<Rational> { Ok(curvature_pairing(c, &a, &b)? - pairing(&delta(c, &a)?, &delta(c, &b)?)? * q(2, 1)) };
    Ok(of_rational(side(&c)? - side(&c0)? - pairing(&schouten(&a, &b)?, &pi)?))
}

fn action_defect(a: Acting<'_, Rational>, b: Acting<'_, Rational>, abr: Acting<'_, Rational>, c: &Conn) -> Result<Sym> {
    let ac = affine_action(a, c)?;
    let bc = affine_action(b, c)?;
    let lhs = affine_action(a, &bc)?.pi_sym()?.sub(&affine_action(b, &ac)?.pi_sym()?)?;
    lhs.sub(&action_increment(abr, c)?)
}

fn quadratic_actions_commute_up_to_schouten(ctx: &Ctx) -> Result<Residual> {
    let m = ctx.model;
    let (a, b) = (ctx.sym_band(1, 2, 1), ctx.sym_band(2, 2, 1));
    let fa = FormalSum::from_fields(m, 3, [&a])?;
    let fb = FormalSum::from_fields(m, 3, [&b])?;
    let fab = FormalSum::from_fields(m, 3, [&ab(&a, &b)?])?;
    let lhs = action_defect(Acting::Top(&fa), Acting::Top(&fb), Acting::Top(&fab), &ctx.conn(3))?;
    Ok(of_sym(&lhs.sub(&schouten(&a, &b)?.scale(&q(3, 1)))?))
}

fn affine_action_property(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.small_conn(1);
    let (e1, e2) = (ctx.ext(2), ctx.ext(3));
    let e12 = e1.bracket(&e2)?;
    let (h1, h2) = (ctx.hamsec(4, 3)?, ctx.hamsec(30, 3)?);
    let h12 = h1.bracket(&h2)?;
    let top = |s: u64| -> Result<Sum> { Ok(ctx.closed_sum(s, 3)?.retruncate(3)) };
    let (t1, t2) = (top(50)?, top(60)?);
    let t12 = top_bracket(&t1, &t2)?;
    Ok(Residual::all([
        of_sym(&action_defect(Acting::Ext(&e1), Acting::Ext(&e2), Acting::Ext(&e12), &c)?),
        of_sym(&action_defect(Acting::Ham(&h1), Acting::Ham(&h2), Acting::Ham(&h12), &c)?),
        of_sym(&action_defect(Acting::Top(&t1), Acting::Top(&t2), Acting::Top(&t12), &c)?),
    ]))
}

fn atiyah_bott_variation(ctx: &Ctx) -> Result<Residual> {
    let m = ctx.model;
    let c = Connection::random_with_torsion(ctx.salt(1), m, 1, 1);
    let a = ctx.sym_band(2, 2, 1);
    let dir = Connection::random_with_torsion(ctx.salt(3), m, 1, 1).pi().clone();
    let (lhs, rhs) = ab_variation_check(&c, &a, &dir)?;
    Ok(of_rational(lhs - rhs))
}

fn atiyah_bott_ricci(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let a = ctx.sym_band(2, 2, 1);
    Ok(of_rational(atiyah_bott_pairing(&c, &a)? + pairing(&a, &ricci(&c)?)?))
}

// Moment theory

fn moment_map_variation(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.small_conn(1);
    let r = ctx.small_conn(2);
    let h = ctx.hamsec(3, 3)?;
    let pi = ctx.sym_band(4, 3, 1);
    let fid = FunctionalId::moment(&h, r)?;
    let field = action_increment(Acting::Ham(&h), &c)?.neg();
    Ok(of_rational(first_variation(&fid, &c, &pi)? - symplectic_form(&pi, &field)?))
}

fn fields_match_variations(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.small_conn(1);
    let pi = ctx.sym_band(2, 3, 1);
    let mut fids = vec![
        FunctionalId::theta(ctx.small_conn(3), ctx.sym_band(4, 3, 1))?,
        FunctionalId::r_alpha(ctx.sym_band(5, 2, 1))?,
        FunctionalId::r_k(1)?,
        FunctionalId::energy(),
        FunctionalId::e_poly(vec![q(1, 2), q(-1, 1), q(0, 1), q(3, 1)]),
    ];
    for p in &ctx.params {
        fids.push(FunctionalId::n_st(p));
        fids.push(FunctionalId::j_st(p));
    }
    let mut parts = Vec::new();
    for f in &fids {
        let v = first_variation(f, &c, &pi)?;
        parts.push(of_rational(v - symplectic_form(&pi, &hamiltonian_field(f, &c)?)?));
    }
    Ok(Residual::all(parts))
}

fn defect_is_constant(ctx: &Ctx) -> Result<Residual> {
    let (a, b) = (ctx.ext(1), ctx.ext(2));
    let r = ctx.small_conn(3);
    let sig = sigma_cocycle(&a, &b, &r)?;
    let d1 = equivariance_defect(&a, &b, &ctx.small_conn(4), &r)?;
    let d2 = equivariance_defect(&a, &b, &ctx.small_conn(5), &r)?;
    Ok(Residual::all([of_rational(&d1 - &sig), of_rational(d2 - sig)]))
}

fn sigma_antisymmetry(ctx: &Ctx) -> Result<Residual> {
    let r = ctx.small_conn(1);
    let (a, b) = (ctx.ext(2), ctx.ext(3));
    let s = sigma_cocycle(&a, &b, &r)? + sigma_cocycle(&b, &a, &r)?;
    Ok(Residual::all([of_rational(s), of_rational(sigma_cocycle(&a, &a, &r)?)]))
}

fn sigma_cocycle_identity(ctx: &Ctx) -> Result<Residual> {
    let r = ctx.small_conn(1);
    let (a, b, c) = (ctx.ext(2), ctx.ext(3), ctx.ext(4));
    let sg = |x: &Ext, y: &Ext| sigma_cocycle(x, y, &r);
    let total = sg(&a.bracket(&b)?, &c)? + sg(&b.bracket(&c)?, &a)? + sg(&c.bracket(&a)?, &b)?;
    Ok(of_rational(total))
}

fn energies_commute_with_ricci_traces(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.small_conn(1);
    let x2 = FunctionalId::energy();
    let x4 = FunctionalId::e_poly(vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
    let mut parts = Vec::new();
    for k in 1..=2 {
        let rk = FunctionalId::r_k(k)?;
        for phi in [&x2, &x4] {
            parts.push(of_rational(poisson_functionals(phi, &rk, &c)?));
        }
    }
    Ok(Residual::all(parts))
}

fn odd_ricci_trace(ctx: &Ctx) -> Result<Residual> {
    Ok(of_rational(ricci_trace(&Curvature::of(&ctx.conn(1)), 3)))
}

fn mean_k_vanishes(ctx: &Ctx) -> Result<Residual> {
    let c = ctx.conn(1);
    let a = of_rational(cahen_gutt_mean(&c)?);
    if ctx.model.n() == 1 {
        return Ok(Residual::all([a, of_rational(cahen_gutt(&c)?.mean())]));
    }
    Ok(a)
}

fn evaluate_flat_functionals(ctx: &Ctx) -> Result<Residual> {
    let flat = Connection::flat(ctx.model);
    let mut parts = vec![of_rational(evaluate(&FunctionalId::energy(), &flat)?), of_rational(evaluate(&FunctionalId::r_k(1)?, &flat)?)];
    let closed = ctx.closed_form(1)?;
    parts.push(Residual { zero: is_closed(&closed)?, display: "closed form not closed".into() });
    Ok(Residual::all(parts))
}

static REGISTRY: &[Identity] = &[
    Identity { name: "action_property", statement: "affine actions of the quotient, Hamiltonian-section and top algebras are Lie algebra actions", check: affine_action_property },
    Identity { name: "algebraic_bracket_pairing", statement: "the algebraic bracket with a quadratic element is skew for the global pairing", check: algebraic_bracket_pairing },
    Identity { name: "atiyah_bott_ricci", statement: "Atiyah-Bott pairing of a torsion-free connection is minus the Ricci pairing", check: atiyah_bott_ricci },
    Identity { name: "atiyah_bott_variation", statement: "first variation of the Atiyah-Bott pairing, connections with torsion", check: atiyah_bott_variation },
    Identity { name: "brackets_compatible", statement: "compatibility of the algebraic and Schouten brackets", check: brackets_compatible },
    Identity { name: "curvature_pairing_shift", statement: "shift of the curvature pairing of two quadratic elements is their Schouten bracket against the shift", check: curvature_pairing_shift },
    Identity { name: "defect_is_constant", statement: "equivariance defect of the moment functionals equals the cocycle at two connections", check: defect_is_constant },
    Identity { name: "delta_delta_star_commutation", statement: "commutator of delta and delta-star in degrees 2 and 3 through Ricci and curvature terms", check: delta_delta_star_commutation },
    Identity { name: "delta_shift", statement: "change of delta under a shift of the connection", check: delta_shift },
    Identity { name: "delta_star_leibniz", statement: "delta-star is a derivation of the symmetric product", check: delta_star_leibniz },
    Identity { name: "delta_star_shift", statement: "change of delta-star under a shift of the connection is a third of the algebraic bracket", check: delta_star_shift },
    Identity { name: "derivation_interior", statement: "interior derivation along a symplectic field is a derivation of the Schouten bracket", check: derivation_interior },
    Identity { name: "derivation_lie", statement: "Lie derivative along a symplectic field is Schouten with its dual and a derivation of the algebraic bracket", check: derivation_lie },
    Identity { name: "divergence_of_h", statement: "divergence of H(f) is the Schouten bracket of df with Ricci", check: divergence_of_h },
    Identity { name: "energies_commute_with_ricci_traces", statement: "energies of x^2 and x^4 Poisson-commute with R_(1) and R_(2)", check: energies_commute_with_ricci_traces },
    Identity { name: "fields_match_variations", statement: "closed-form Hamiltonian fields reproduce first variations", check: fields_match_variations },
    Identity { name: "flat_values", statement: "energy and R_(1) vanish at the flat connection", check: evaluate_flat_functionals },
    Identity { name: "hamsec_closure", statement: "scalar and first parts of the bracket of Hamiltonian sections", check: hamsec_closure },
    Identity { name: "iota_homomorphism", statement: "functions embed as Hamiltonian sections homomorphically from the Poisson bracket", check: iota_homomorphism },
    Identity { name: "jacobi_algebraic", statement: "Jacobi identity of the algebraic bracket", check: jacobi_algebraic },
    Identity { name: "jacobi_combined", statement: "Jacobi identity of the combined bracket at each configured (s, t)", check: jacobi_combined },
    Identity { name: "jacobi_extended", statement: "Jacobi identity of the centrally extended bracket at each configured (s, t)", check: jacobi_extended },
    Identity { name: "jacobi_schouten", statement: "Jacobi identity of the Schouten bracket", check: jacobi_schouten },
    Identity { name: "jacobi_top", statement: "Jacobi identity of the top bracket on sums with closed degree-one part", check: jacobi_top },
    Identity { name: "k_variation", statement: "coefficients of K along a line of connections through second order", check: k_variation },
    Identity { name: "leibniz_algebraic", statement: "the algebraic bracket is a derivation of the symmetric product", check: leibniz_algebraic },
    Identity { name: "mean_k_vanishes", statement: "the mean of K vanishes", check: mean_k_vanishes },
    Identity { name: "moment_map_variation", statement: "variation of the moment functional is the symplectic form against the action field", check: moment_map_variation },
    Identity { name: "odd_ricci_trace", statement: "the trace of the cubed Ricci endomorphism vanishes", check: odd_ricci_trace },
    Identity { name: "pi1_homomorphism", statement: "dropping the scalar part maps Hamiltonian sections homomorphically onto the top bracket", check: pi1_homomorphism },
    Identity { name: "psi_intertwining", statement: "rescaling intertwines the (s, t) bracket with the (1, 1) bracket", check: psi_intertwining },
    Identity { name: "quadratic_actions", statement: "actions of two quadratic elements commute up to three times their Schouten bracket", check: quadratic_actions_commute_up_to_schouten },
    Identity { name: "ricci_poisson_field", statement: "Hamiltonian field of the Poisson bracket of two Ricci pairings", check: ricci_poisson_field },
    Identity { name: "ricci_poisson_scalar", statement: "Poisson bracket of two Ricci pairings in curvature terms", check: ricci_poisson_scalar },
    Identity { name: "ricci_symmetry", statement: "the Ricci tensor of a torsion-free connection is symmetric", check: ricci_symmetry },
    Identity { name: "riemann_symplectic", statement: "curvature is skew in its form slots and symmetric in its endomorphism slots, with or without torsion", check: riemann_symplectic },
    Identity { name: "riemann_trace", statement: "the first trace of the curvature is twice Ricci", check: riemann_trace },
    Identity { name: "schouten_coboundary", statement: "the Schouten bracket is the coboundary of delta-star for the algebraic bracket", check: schouten_coboundary },
    Identity { name: "schouten_connection_independence", statement: "the Schouten bracket does not depend on the connection", check: schouten_connection_independence },
    Identity { name: "sigma_antisymmetry", statement: "the cocycle is antisymmetric", check: sigma_antisymmetry },
    Identity { name: "sigma_cocycle", statement: "the cocycle identity", check: sigma_cocycle_identity },
];

pub fn registry() -> &'static [Identity] {
    REGISTRY
}

pub fn find(name: &str) -> Result<&'static Identity> {
    REGISTRY.iter().find(|i| i.name == name).ok_or_else(|| {
        let names: Vec<&str> = REGISTRY.iter().map(|i| i.name).collect();
        Error::UnknownIdentity { name: name.into(), available: names.join(", ") }
    })
}

/// `"p/q"` strings for `(s, t)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamPair {
    pub s: String,
    pub t: String,
}

impl ParamPair {
    pub fn parse(&self) -> Result<BracketParams<Rational>> {
        let r = |x: &str| x.parse::<Rational>().map_err(|_| Error::Invalid(format!("bad rational `{x}`")));
        Ok(BracketParams::new(r(&self.s)?, r(&self.t)?))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub n: usize,
    pub band: usize,
    pub seeds: Vec<u64>,
    /// Identity names; `None` runs the whole registry, an empty list runs nothing.
    #[serde(default)]
    pub which: Option<Vec<String>>,
    #[serde(default = "default_params")]
    pub params: Vec<ParamPair>,
    /// Omit wall times so equal inputs give byte-identical reports.
    #[serde(default = "yes")]
    pub deterministic: bool,
}

fn yes() -> bool {
    true
}

fn default_params() -> Vec<ParamPair> {
    vec![ParamPair { s: "1".into(), t: "1".into() }, ParamPair { s: "2".into(), t: "1/3".into() }]
}

impl SuiteConfig {
    pub fn new(n: usize, band: usize, seeds: Vec<u64>) -> Self {
        SuiteConfig { n, band, seeds, which: None, params: default_params(), deterministic: true }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultEntry {
    pub identity: String,
    pub statement: String,
    pub seed: u64,
    pub passed: bool,
    pub residual: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub config: SuiteConfig,
    pub results: Vec<ResultEntry>,
    pub summary: Summary,
}

impl ReportDocument {
    pub fn all_passed(&self) -> bool {
        self.summary.failed == 0
    }
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}

/// Runs every selected identity on every seed; results sorted by name, then seed.
pub fn cmd_verify(config: &SuiteConfig) -> Result<ReportDocument> {
    if !(1..=2).contains(&config.n) {
        return Err(Error::Invalid(format!("n = {} unsupported; use 1 or 2", config.n)));
    }
    if config.band == 0 {
        return Err(Error::Invalid("band must be at least 1".into()));
    }
    let model = SymplecticModel::new(config.n)?;
    let params = config.params.iter().map(ParamPair::parse).collect::<Result<Vec<_>>>()?;
    let selected: Vec<&Identity> = match &config.which {
        None => REGISTRY.iter().collect(),
        Some(names) => names.iter().map(|n| find(n)).collect::<Result<_>>()?,
    };
    let jobs: Vec<(&Identity, u64)> = selected.iter().flat_map(|id| config.seeds.iter().map(move |&s| (*id, s))).collect();
    let mut results: Vec<ResultEntry> = jobs
        .par_iter()
        .map(|(id, seed)| {
            let ctx = Ctx::new(model, config.band, *seed, params.clone());
            let start = Instant::now();
            let out = (id.check)(&ctx);
            let wall = start.elapsed().as_secs_f64() * 1e3;
            let (passed, residual) = match out {
                Ok(r) => (r.zero, r.display),
                Err(e) => (false, format!("error: {e}")),
            };
            ResultEntry {
                identity: id.name.into(),
                statement: id.statement.into(),
                seed: *seed,
                passed,
                residual,
                wall_ms: if config.deterministic { None } else { Some(wall) },
            }
        })
        .collect();
    results.sort_by(|a, b| a.identity.cmp(&b.identity).then(a.seed.cmp(&b.seed)));
    let passed = results.iter().filter(|r| r.passed).count();
    Ok(ReportDocument {
        tool: "sclab".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: config.clone(),
        summary: Summary { total: results.len(), passed, failed: results.len() - passed },
        results,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(n: usize, seed: u64) -> Ctx {
        Ctx::new(SymplecticModel::new(n).unwrap(), 1, seed, vec![BracketParams::one_one()])
    }

    #[test]
    fn seeded_inputs_are_not_constant() {
        for n in [1, 2] {
            let c = ctx(n, 5);
            for k in 0..=3 {
                let f = c.sym(1, k);
                assert!(f.components().values().any(|g| g.len() > 1), "n = {n}, degree {k}");
            }
            assert!(!c.ext(2).is_zero());
            assert_ne!(c.sym(1, 2), ctx(n, 6).sym(1, 2));
        }
    }

    /// Wrong signs and coefficients must leave a nonzero residual on the same inputs.
    #[test]
    fn broken_variants_are_detected() {
        for n in [1, 2] {
            let c = ctx(n, 3);
            let (a, b, d) = (c.sym(1, 2), c.sym(2, 2), c.sym(3, 2));
            let skew = sum3(ab(&ab(&a, &b).unwrap(), &d).unwrap(), ab(&ab(&b, &d).unwrap(), &a).unwrap(), ab(&ab(&d, &a).unwrap(), &b).unwrap().neg()).unwrap();
            assert!(!of_sym(&skew).zero);

            let conn = c.conn(1);
            let pi = c.sym(2, 3);
            let g = c.sym(3, 2);
            let shifted = delta_star(&conn.shifted_sym(&pi, &q(1, 1)).unwrap(), &g).unwrap();
            let wrong = delta_star(&conn, &g).unwrap().add(&ab(&g, &pi).unwrap().scale(&q(1, 2))).unwrap();
            assert!(!of_sym(&shifted.sub(&wrong).unwrap()).zero);

            let r = c.small_conn(4);
            let (x, y) = (c.ext(5), c.ext(6));
            assert!(!of_rational(sigma_cocycle(&x, &y, &r).unwrap() - sigma_cocycle(&y, &x, &r).unwrap()).zero);
        }
    }

    #[test]
    fn residual_display_names_the_failure() {
        let m = SymplecticModel::new(1).unwrap();
        let r = of_sym(&SymTensorField::basis_covector(m, 0));
        assert!(!r.zero);
        assert!(r.display.contains("degree-1"));
        let all = Residual::all([of_rational(q(0, 1)), of_rational(q(-2, 3))]);
        assert_eq!((all.zero, all.display.as_str()), (false, "-2/3"));
    }
}
