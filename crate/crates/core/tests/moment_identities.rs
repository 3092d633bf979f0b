//! Hamiltonian fields, Poisson brackets, actions and moment maps, checked exactly.

use sclab_core::calculus::{delta, delta_star, schouten};
use sclab_core::connection::Connection;
use sclab_core::geometry::{cahen_gutt, op_h, ricci, Curvature};
use sclab_core::interp::{nodes, poly_coeffs};
use sclab_core::lie::*;
use sclab_core::moment::*;
use sclab_core::scalars::{q, ts_random, Rational, TrigScalar};
use sclab_core::tensors::{algebraic_bracket, mixed_pairing, pairing, SymTensorField, SymplecticModel};

type Sym = SymTensorField<Rational>;
type Fid = FunctionalId<Rational>;
type Conn = Connection<Rational>;

fn model() -> SymplecticModel {
    SymplecticModel::new(1).unwrap()
}

fn rnd(seed: u64, deg: usize, band: usize) -> Sym {
    SymTensorField::random(seed, model(), deg, band, 3)
}

fn conn(seed: u64) -> Conn {
    Connection::random(seed, model(), 1, 2)
}

fn small_conn(seed: u64) -> Conn {
    Connection::random(seed, model(), 1, 1)
}

fn field_matches_variation(fid: &Fid, c: &Conn, dir: &Sym) {
    let lhs = first_variation(fid, c, dir).unwrap();
    let rhs = symplectic_form(dir, &hamiltonian_field(fid, c).unwrap()).unwrap();
    assert_eq!(lhs, rhs, "{}", fid.tag());
}

#[test]
fn theta_vanishes_at_its_reference_and_has_constant_field() {
    let r = conn(1);
    let pi = rnd(2, 3, 1);
    let th = Fid::theta(r.clone(), pi.clone()).unwrap();
    assert_eq!(evaluate(&th, &r).unwrap(), q(0, 1));
    for seed in 3..5 {
        assert_eq!(hamiltonian_field(&th, &conn(seed)).unwrap(), pi.neg());
    }
    field_matches_variation(&th, &conn(5), &rnd(6, 3, 1));
}

#[test]
fn r_alpha_field() {
    for seed in 1..=3 {
        let f = Fid::r_alpha(rnd(seed, 2, 1)).unwrap();
        let c = conn(seed + 10);
        assert_eq!(hamiltonian_field(&f, &c).unwrap(), delta_star(&c, &rnd(seed, 2, 1)).unwrap().neg());
        field_matches_variation(&f, &c, &rnd(seed + 20, 3, 1));
    }
}

#[test]
fn r_k_fields() {
    for k in 1..=2 {
        let f = Fid::r_k(k).unwrap();
        field_matches_variation(&f, &small_conn(k as u64), &rnd(30 + k as u64, 3, 1));
    }
    assert!(Fid::r_k(0).is_err());
}

#[test]
fn energy_field_is_minus_twice_h_of_k() {
    let c = conn(7);
    let e = Fid::energy();
    let expect = op_h(&c, &cahen_gutt(&c).unwrap()).unwrap().scale(&q(-2, 1));
    assert_eq!(hamiltonian_field(&e, &c).unwrap(), expect);
    field_matches_variation(&e, &small_conn(8), &rnd(9, 3, 1));
}

#[test]
fn polynomial_energy_field() {
    // f(x) = 1/2 - x + 3 x^3
    let f = Fid::e_poly(vec![q(1, 2), q(-1, 1), q(0, 1), q(3, 1)]);
    field_matches_variation(&f, &small_conn(10), &rnd(11, 3, 1));
}

#[test]
fn moment_map_property_of_k() {
    for seed in 1..=3 {
        let m = model();
        let c = conn(seed);
        let fs = ts_random(seed + 40, 2, 1, 3);
        let h = HamSec::iota(m, 3, &-&fs);
        // <<f, K>> is M^{1,0,0} at the section with scalar part f
        let fid = Fid::m_pqr(q(1, 1), q(0, 1), q(0, 1), &h, Connection::flat(m)).unwrap();
        let pi = rnd(seed + 50, 3, 1);
        assert_eq!(evaluate(&fid, &c).unwrap(), cahen_gutt(&c).unwrap().mean_product(&fs));
        let lhs = symplectic_form(&op_h(&c, &fs).unwrap(), &pi).unwrap();
        assert_eq!(lhs, first_variation(&fid, &c, &pi).unwrap());
    }
}

#[test]
fn m_pqr_field() {
    let m = model();
    let h = HamSec::make(ts_random(1, 2, 1, 2), &FormalSum::random(2, m, 3, &[2, 3], 1, 2)).unwrap();
    let f = Fid::m_pqr(q(2, 1), q(-1, 3), q(5, 2), &h, conn(3)).unwrap();
    field_matches_variation(&f, &conn(4), &rnd(5, 3, 1));
}

#[test]
fn normalized_energy_and_descent_objective_fields() {
    let p = BracketParams::new(q(2, 1), q(1, 3));
    let c = small_conn(12);
    let dir = rnd(13, 3, 1);
    field_matches_variation(&Fid::n_st(&p), &c, &dir);
    field_matches_variation(&Fid::j_st(&p), &c, &dir);
}

#[test]
fn flat_values() {
    let flat = Connection::flat(model());
    assert_eq!(evaluate(&Fid::r_k(1).unwrap(), &flat).unwrap(), q(0, 1));
    assert_eq!(evaluate(&Fid::energy(), &flat).unwrap(), q(0, 1));
    for (s, t) in [(q(1, 1), q(1, 1)), (q(2, 1), q(1, 3))] {
        let p = BracketParams::new(s, t.clone());
        assert_eq!(evaluate(&Fid::n_st(&p), &flat).unwrap(), &t * &t);
        let cmp = compare_energy(&flat, &flat, &p).unwrap();
        assert_eq!(cmp.pairing_form, &t * &t);
        assert_eq!(cmp.difference, q(0, 1));
    }
}

#[test]
fn odd_ricci_traces_vanish() {
    for seed in 1..=3 {
        let cv = Curvature::of(&conn(seed));
        assert_eq!(ricci_trace(&cv, 1), q(0, 1));
        assert_eq!(ricci_trace(&cv, 3), q(0, 1));
    }
}

#[test]
fn mean_of_k_vanishes_on_the_torus() {
    for seed in 1..=3 {
        assert_eq!(cahen_gutt(&conn(seed)).unwrap().mean(), q(0, 1), "seed {seed}");
    }
}

#[test]
fn energies_commute_with_ricci_traces() {
    let c = small_conn(14);
    let x2 = Fid::energy();
    let x4 = Fid::e_poly(vec![q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(1, 1)]);
    for k in 1..=2 {
        let rk = Fid::r_k(k).unwrap();
        for phi in [&x2, &x4] {
            assert_eq!(poisson_functionals(phi, &rk, &c).unwrap(), q(0, 1), "k={k}");
        }
    }
}

#[test]
fn poisson_bracket_is_antisymmetric() {
    let c = conn(15);
    let a = Fid::r_alpha(rnd(16, 2, 1)).unwrap();
    let b = Fid::energy();
    assert_eq!(poisson_functionals(&a, &a, &c).unwrap(), q(0, 1));
    assert_eq!(poisson_functionals(&a, &b, &c).unwrap(), -poisson_functionals(&b, &a, &c).unwrap());
}

fn curvature_pairing(c: &Conn, a: &Sym, b: &Sym) -> Rational {
    let st = star(a, b).unwrap();
    mixed_pairing(&st, &Curvature::of(c).as_mixed().unwrap()).unwrap()
}

fn ricci_poisson_rhs(c: &Conn, a: &Sym, b: &Sym) -> Rational {
    let dd = pairing(&delta(c, a).unwrap(), &delta(c, b).unwrap()).unwrap();
    let rab = pairing(&algebraic_bracket(a, b).unwrap(), &ricci(c).unwrap()).unwrap();
    dd * q(-2, 3) + curvature_pairing(c, a, b) * q(1, 3) + rab * q(1, 3)
}

#[test]
fn poisson_bracket_of_ricci_pairings() {
    for seed in 1..=3 {
        let (a, b) = (rnd(seed, 2, 1), rnd(seed + 10, 2, 1));
        let c = conn(seed + 20);
        let lhs = poisson_functionals(&Fid::r_alpha(a.clone()).unwrap(), &Fid::r_alpha(b.clone()).unwrap(), &c).unwrap();
        assert_eq!(lhs, ricci_poisson_rhs(&c, &a, &b), "seed {seed}");
    }
}

#[test]
fn field_of_the_ricci_poisson_bracket() {
    for seed in 1..=2 {
        let (a, b) = (rnd(seed, 2, 1), rnd(seed + 10, 2, 1));
        let c = conn(seed + 20);
        let pi = rnd(seed + 30, 3, 1);
        let ns = nodes(5);
        let vals: Vec<Rational> = ns.iter().map(|t| ricci_poisson_rhs(&c.shifted_sym(&pi, t).unwrap(), &a, &b)).collect();
        let variation = poly_coeffs(&ns, &vals)[1].clone();
        let ab = algebraic_bracket(&a, &b).unwrap();
        let field = delta_star(&c, &ab).unwrap().add(&schouten(&a, &b).unwrap()).unwrap().scale(&q(-1, 3));
        assert_eq!(variation, symplectic_form(&pi, &field).unwrap(), "seed {seed}");
    }
}

#[test]
fn curvature_pairing_shift() {
    for seed in 1..=3 {
        let (a, b) = (rnd(seed, 2, 1), rnd(seed + 10, 2, 1));
        let c0 = conn(seed + 20);
        let pi = rnd(seed + 30, 3, 1);
        let c = c0.shifted_sym(&pi, &q(1, 1)).unwrap();
        let side = |c: &Conn| curvature_pairing(c, &a, &b) - pairing(&delta(c, &a).unwrap(), &delta(c, &b).unwrap()).unwrap() * q(2, 1);
        assert_eq!(side(&c) - side(&c0), pairing(&schouten(&a, &b).unwrap(), &pi).unwrap(), "seed {seed}");
    }
}

#[test]
fn moment_hat_basics() {
    let m = model();
    let flat = Connection::flat(m);
    let one = BracketParams::one_one();
    let img = moment_hat(&flat, &flat, &one).unwrap();
    assert_eq!(img.ext, ExtElement::scalar(m, TrigScalar::constant(2, q(1, 1))));
    let p = BracketParams::new(q(2, 1), q(1, 3));
    let c = conn(1);
    let img = moment_hat(&c, &conn(2), &p).unwrap();
    assert_eq!(img.ext.a2, ricci(&c).unwrap().scale(&q(6, 1)));
    assert_eq!(img.ext.a0.mean(), q(1, 3));
}

#[test]
fn cubic_self_pairing_vanishes() {
    for seed in 1..=3 {
        let a = rnd(seed, 3, 2);
        assert_eq!(pairing(&a, &a).unwrap(), q(0, 1));
        let b = rnd(seed + 5, 3, 1);
        assert_eq!(pairing(&a, &b).unwrap(), -pairing(&b, &a).unwrap());
    }
}

#[test]
fn normalized_energy_against_the_moment_image() {
    let c = conn(3);
    let r = Connection::flat(model());
    let p = BracketParams::new(q(2, 1), q(1, 3));
    let cmp = compare_energy(&c, &r, &p).unwrap();
    // independent assembly of <<psi M, psi M>>; the cubic term drops out
    let k = cahen_gutt(&c).unwrap();
    let ric = ricci(&c).unwrap();
    let t2 = q(1, 9);
    let s2 = q(4, 1);
    let expect = &t2 * &(q(1, 1) + k.mean_product(&k)) + s2 * q(9, 1) * pairing(&ric, &ric).unwrap();
    assert_eq!(cmp.pairing_form, expect);
    assert_eq!(cmp.difference, &cmp.closed_form - &cmp.pairing_form);
    // the two forms genuinely differ away from flat
    assert_ne!(cmp.difference, q(0, 1));
}

fn ext(seed: u64) -> ExtElement<Rational> {
    ExtElement::random(seed, model(), 1, 2)
}

fn hamsec(seed: u64) -> HamSec<Rational> {
    HamSec::make(ts_random(seed, 2, 1, 2), &FormalSum::random(seed + 1, model(), 3, &[2, 3], 1, 2)).unwrap()
}

fn top(seed: u64) -> FormalSum<Rational> {
    let m = model();
    let mut s = FormalSum::random(seed, m, 3, &[2, 3], 1, 2);
    let f = ts_random(seed + 2, 2, 1, 2);
    let mut one = delta_star(&Connection::flat(m), &SymTensorField::scalar(m, f)).unwrap();
    one = one.add(&SymTensorField::basis_covector(m, 1).scale(&q(3, 2))).unwrap();
    s.set_part(one).unwrap();
    s
}

fn action_defect(a: Acting<'_, Rational>, b: Acting<'_, Rational>, ab: Acting<'_, Rational>, c: &Conn) -> Sym {
    let ac = affine_action(a, c).unwrap();
    let bc = affine_action(b, c).unwrap();
    let lhs = affine_action(a, &bc).unwrap().pi_sym().unwrap().sub(&affine_action(b, &ac).unwrap().pi_sym().unwrap()).unwrap();
    lhs.sub(&action_increment(ab, c).unwrap()).unwrap()
}

#[test]
fn zero_acts_trivially() {
    let m = model();
    let c = conn(1);
    assert_eq!(affine_action(Acting::Ext(&ExtElement::zero(m)), &c).unwrap(), c);
    assert_eq!(affine_action(Acting::Top(&FormalSum::zero(m, 3)), &c).unwrap(), c);
}

#[test]
fn quotient_action_property() {
    for seed in 1..=3 {
        let (a, b) = (ext(seed), ext(seed + 10));
        let ab = a.bracket(&b).unwrap();
        assert!(action_defect(Acting::Ext(&a), Acting::Ext(&b), Acting::Ext(&ab), &conn(seed + 20)).is_zero(), "seed {seed}");
    }
}

#[test]
fn hamiltonian_section_action_property() {
    for seed in 1..=2 {
        let (a, b) = (hamsec(seed), hamsec(seed + 10));
        let ab = a.bracket(&b).unwrap();
        assert!(action_defect(Acting::Ham(&a), Acting::Ham(&b), Acting::Ham(&ab), &conn(seed + 20)).is_zero(), "seed {seed}");
    }
}

#[test]
fn top_action_property() {
    for seed in 1..=2 {
        let (a, b) = (top(seed), top(seed + 10));
        let ab = top_bracket(&a, &b).unwrap();
        assert!(action_defect(Acting::Top(&a), Acting::Top(&b), Acting::Top(&ab), &conn(seed + 20)).is_zero(), "seed {seed}");
    }
    let mut bad = top(1);
    bad.set_part(rnd(3, 1, 1)).unwrap();
    assert!(affine_action(Acting::Top(&bad), &conn(1)).is_err());
}

#[test]
fn quadratic_elements_commute_up_to_three_schouten() {
    let m = model();
    for seed in 1..=3 {
        let (a, b) = (rnd(seed, 2, 1), rnd(seed + 10, 2, 1));
        let fa = FormalSum::from_fields(m, 3, [&a]).unwrap();
        let fb = FormalSum::from_fields(m, 3, [&b]).unwrap();
        let fab = FormalSum::from_fields(m, 3, [&algebraic_bracket(&a, &b).unwrap()]).unwrap();
        let lhs = action_defect(Acting::Top(&fa), Acting::Top(&fb), Acting::Top(&fab), &conn(seed + 20));
        assert_eq!(lhs, schouten(&a, &b).unwrap().scale(&q(3, 1)), "seed {seed}");
    }
}

#[test]
fn constructed_stabilizer_fixes_the_connection() {
    let m = model();
    for seed in 1..=3 {
        let c = conn(seed);
        let s = top(seed + 5);
        let a3 = stabilizer_cubic(s.part(1), s.part(2), &c).unwrap();
        let mut stab = s.clone();
        stab.set_part(a3).unwrap();
        assert_eq!(affine_action(Acting::Top(&stab), &c).unwrap(), c);
    }
    assert!(stabilizer_cubic(&rnd(1, 1, 1), &SymTensorField::zero(m, 2), &conn(1)).is_err());
}

#[test]
fn equivariance_defect_is_the_cocycle() {
    for seed in 1..=3 {
        let (a, b) = (ext(seed), ext(seed + 10));
        let r = conn(seed + 30);
        let sig = sigma_cocycle(&a, &b, &r).unwrap();
        assert_eq!(equivariance_defect(&a, &b, &conn(seed + 40), &r).unwrap(), sig, "seed {seed}");
        assert_eq!(equivariance_defect(&a, &b, &conn(seed + 50), &r).unwrap(), sig, "seed {seed}");
        assert_eq!(equivariance_defect(&a, &a, &conn(seed + 40), &r).unwrap(), q(0, 1));
    }
}

#[test]
fn scalar_moments_are_equivariant() {
    let m = model();
    let (a, b) = (ExtElement::scalar(m, ts_random(1, 2, 1, 3)), ExtElement::scalar(m, ts_random(2, 2, 1, 3)));
    let r = Connection::flat(m);
    assert_eq!(equivariance_defect(&a, &b, &conn(3), &r).unwrap(), q(0, 1));
}

#[test]
fn moment_hat_is_equivariant() {
    for (seed, p) in [(1, BracketParams::one_one()), (2, BracketParams::one_one()), (3, BracketParams::new(q(2, 1), q(1, 3)))] {
        let (a, b) = (ext(seed), ext(seed + 10));
        let (c, r) = (conn(seed + 20), conn(seed + 30));
        let img = moment_hat(&c, &r, &p).unwrap();
        let ma = Fid::moment_ext(&a.psi(&p).unwrap(), r.clone()).unwrap();
        let mb = Fid::moment_ext(&b.psi(&p).unwrap(), r.clone()).unwrap();
        let lhs = poisson_functionals(&ma, &mb, &c).unwrap();
        let rhs = img.evaluate(&a.extended_bracket_st(&b, &p, &r).unwrap()).unwrap();
        assert_eq!(lhs, rhs, "seed {seed}");
    }
}

#[test]
fn moment_hat_pairing_differs_from_the_moment_by_a_constant() {
    let (a, c, r) = (ext(4), conn(5), conn(6));
    let img = moment_hat(&c, &r, &BracketParams::one_one()).unwrap();
    let m = evaluate(&Fid::moment_ext(&a, r.clone()).unwrap(), &c).unwrap();
    assert_eq!(img.evaluate(&a).unwrap() - m, a.c());
}

#[test]
fn residuals_combine() {
    let flat: Conn = Connection::flat(model());
    let z = residuals(&flat, &BracketParams::one_one()).unwrap();
    assert!(z.preferred.is_zero() && z.critical.is_zero() && z.coupled.is_zero());
    let c = conn(7);
    let r10 = residuals(&c, &BracketParams::new(q(1, 1), q(0, 1))).unwrap();
    assert_eq!(r10.coupled, r10.preferred);
    let r01 = residuals(&c, &BracketParams::new(q(0, 1), q(1, 1))).unwrap();
    assert_eq!(r01.coupled, r01.critical);
    assert_eq!(r01.preferred, delta_star(&c, &ricci(&c).unwrap()).unwrap());
    // the descent field is twice the coupled residual
    let p = BracketParams::new(q(2, 1), q(1, 3));
    let r = residuals(&c, &p).unwrap();
    assert_eq!(hamiltonian_field(&Fid::j_st(&p), &c).unwrap(), r.coupled.scale(&q(-2, 1)));
}

#[test]
fn torsion_is_rejected() {
    let c = Connection::random_with_torsion(1, model(), 1, 1);
    assert!(evaluate(&Fid::energy(), &c).is_err());
    assert!(hamiltonian_field(&Fid::r_k(1).unwrap(), &c).is_err());
}
