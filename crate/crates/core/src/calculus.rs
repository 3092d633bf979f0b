//! First-order operators on symmetric tensors: `delta*`, `delta`, `d_nabla`,
//! the Schouten bracket, Lie derivatives and Poisson brackets.

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::scalars::{Real, TrigScalar};
use crate::tensors::{algebraic_bracket, multisets, sym_product, MixedTensorField, SymTensorField, SymplecticModel, Tensor};

/// Contravariant vector field `X^i`.
pub type VectorField<R> = Vec<TrigScalar<R>>;

/// `(nabla_q beta)_J` as a symmetric field, for fixed `q`.
pub fn directional<R: Real>(c: &Connection<R>, beta: &SymTensorField<R>, q: usize) -> SymTensorField<R> {
    let mut out = SymTensorField::zero(beta.model(), beta.degree());
    if beta.is_zero() {
        return out;
    }
    for j in multisets(beta.dim(), beta.degree()) {
        out.set(&j, c.cov_entry(beta, q, &j));
    }
    out
}

/// `delta* a = -nabla_(i_1 a_{i_2 .. i_{k+1})}`.
pub fn delta_star<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if c.model() != a.model() {
        return Err(Error::ModelMismatch);
    }
    let k = a.degree();
    let mut out = SymTensorField::zero(a.model(), k + 1);
    if a.is_zero() {
        return Ok(out);
    }
    for idx in multisets(a.dim(), k + 1) {
        // Sym over the k+1 choices of derivative slot
        let mut acc = TrigScalar::zero(a.dim());
        let mut s = 0;
        while s <= k {
            let mut e = s;
            while e <= k && idx[e] == idx[s] {
                e += 1;
            }
            let mut rest = idx.clone();
            rest.remove(s);
            acc.add_scaled(&c.cov_entry(a, idx[s] as usize, &rest), &R::from_int((e - s) as i64));
            s = e;
        }
        out.set(&idx, acc.scale_ratio(-1, k as i64 + 1));
    }
    Ok(out)
}

/// `delta a_{i_1..i_{k-1}} = (-1)^{k-1} nabla_p a_{i_1..i_{k-1}}^p`.
pub fn delta<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if c.model() != a.model() {
        return Err(Error::ModelMismatch);
    }
    let k = a.degree();
    if k == 0 {
        return Err(Error::DegreeMismatch("delta needs degree at least 1".into()));
    }
    let m = a.model();
    let mut out = SymTensorField::zero(m, k - 1);
    if a.is_zero() {
        return Ok(out);
    }
    let sign = if (k - 1) % 2 == 0 { 1 } else { -1 };
    for idx in multisets(a.dim(), k - 1) {
        let mut acc = TrigScalar::zero(a.dim());
        for p in 0..m.dim() {
            let mut j = idx.clone();
            j.push(m.partner(p) as u8);
            acc.add_scaled(&c.cov_entry(a, p, &j), &R::from_int(sign * m.sign(p)));
        }
        out.set(&idx, acc);
    }
    Ok(out)
}

/// `(d_nabla a)_{i_1 i_2 J} = nabla_{i_1} a_{i_2 J} - nabla_{i_2} a_{i_1 J}`, shape `(2, k-1)`.
pub fn d_nabla<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Result<MixedTensorField<R>> {
    let k = a.degree();
    if k == 0 {
        return Err(Error::DegreeMismatch("d_nabla needs degree at least 1".into()));
    }
    let na = c.covariant_derivative(a);
    let t = na.sub(&na.permuted(&swap01(k + 1)));
    MixedTensorField::new(a.model(), 2, k - 1, t)
}

fn swap01(rank: usize) -> Vec<usize> {
    let mut p: Vec<usize> = (0..rank).collect();
    p.swap(0, 1);
    p
}

/// True when a one-form is closed for the flat connection.
pub fn is_closed<R: Real>(a: &SymTensorField<R>) -> Result<bool> {
    if a.degree() != 1 {
        return Err(Error::DegreeMismatch("closedness is checked on one-forms".into()));
    }
    Ok(d_nabla(&Connection::flat(a.model()), a)?.dense().is_zero())
}

/// Schouten bracket `[[a, b]] = -k a_{p(..} nabla^p b_{..)} + l b_{p(..} nabla^p a_{..)}`,
/// evaluated with `c`. The result does not depend on `c`.
pub fn schouten_with<R: Real>(c: &Connection<R>, a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if a.model() != b.model() || c.model() != a.model() {
        return Err(Error::ModelMismatch);
    }
    let m = a.model();
    let (k, l) = (a.degree(), b.degree());
    let mut out = SymTensorField::zero(m, (k + l).saturating_sub(1));
    if k + l == 0 {
        return Ok(out);
    }
    for p in 0..m.dim() {
        let pp = m.partner(p);
        if k > 0 {
            let ia = a.interior(p);
            if !ia.is_zero() {
                let t = sym_product(&ia, &directional(c, b, pp))?;
                out = out.add(&t.scale(&R::from_int(-(k as i64) * m.sign(p))))?;
            }
        }
        if l > 0 {
            let ib = b.interior(p);
            if !ib.is_zero() {
                let t = sym_product(&ib, &directional(c, a, pp))?;
                out = out.add(&t.scale(&R::from_int(l as i64 * m.sign(p))))?;
            }
        }
    }
    Ok(out)
}

/// Schouten bracket computed with the flat connection.
pub fn schouten<R: Real>(a: &SymTensorField<R>, b: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    schouten_with(&Connection::flat(a.model()), a, b)
}

/// `X_i = X^p Omega_{pi}`.
pub fn flat_of<R: Real>(model: SymplecticModel, x: &VectorField<R>) -> SymTensorField<R> {
    let mut out = SymTensorField::zero(model, 1);
    for i in 0..model.dim() {
        let p = model.partner(i);
        out.set(&[i as u8], x[p].scale(&R::from_int(model.omega_lower(p, i))));
    }
    out
}

/// `a^i = Omega^{ip} a_p`.
pub fn sharp_of<R: Real>(a: &SymTensorField<R>) -> VectorField<R> {
    let m = a.model();
    (0..m.dim()).map(|i| a.get(&[m.partner(i) as u8]).scale(&R::from_int(m.sign(i)))).collect()
}

/// Hamiltonian vector field `H_f^i = Omega^{pi} df_p`.
pub fn hamiltonian_vector<R: Real>(model: SymplecticModel, f: &TrigScalar<R>) -> VectorField<R> {
    (0..model.dim())
        .map(|i| {
            let p = model.partner(i);
            f.partial(p).expect("axis").scale(&R::from_int(model.omega_upper(p, i)))
        })
        .collect()
}

/// Lie derivative of a symmetric covariant field along `X` (flat coordinates).
pub fn lie_derivative<R: Real>(x: &VectorField<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    let m = a.model();
    if x.len() != m.dim() {
        return Err(Error::DimensionMismatch { expected: m.dim(), got: x.len() });
    }
    let dx: Vec<Vec<TrigScalar<R>>> =
        x.iter().map(|xp| (0..m.dim()).map(|i| xp.partial(i).expect("axis")).collect()).collect();
    let k = a.degree();
    let mut out = SymTensorField::zero(m, k);
    for idx in multisets(m.dim(), k) {
        let mut acc = TrigScalar::zero(m.dim());
        for p in 0..m.dim() {
            acc += &(&x[p] * &a.get(&idx).partial(p)?);
            for s in 0..k {
                let mut j = idx.clone();
                j[s] = p as u8;
                acc += &(&dx[p][idx[s] as usize] * &a.get(&j));
            }
        }
        out.set(&idx, acc);
    }
    Ok(out)
}

/// Lie derivative along the symplectic field dual to a closed one-form,
/// `L_X a = [[X_flat, a]]`.
pub fn lie_derivative_closed<R: Real>(xflat: &SymTensorField<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    if !is_closed(xflat)? {
        return Err(Error::NotClosed);
    }
    schouten(xflat, a)
}

/// `I(X) a = k X^p a_{p..}`.
pub fn interior_derivation<R: Real>(x: &VectorField<R>, a: &SymTensorField<R>) -> Result<SymTensorField<R>> {
    let m = a.model();
    let k = a.degree();
    let mut out = SymTensorField::zero(m, k.saturating_sub(1));
    if k == 0 {
        return Ok(out);
    }
    for p in 0..m.dim() {
        let ia = a.interior(p);
        out = out.add(&ia.map(|f| f * &x[p]))?;
    }
    Ok(out.scale(&R::from_int(k as i64)))
}

/// Poisson bracket `{f, g} = (delta* f, delta* g)`.
pub fn poisson<R: Real>(model: SymplecticModel, f: &TrigScalar<R>, g: &TrigScalar<R>) -> Result<TrigScalar<R>> {
    let flat = Connection::flat(model);
    let df = delta_star(&flat, &SymTensorField::scalar(model, f.clone()))?;
    let dg = delta_star(&flat, &SymTensorField::scalar(model, g.clone()))?;
    Ok(algebraic_bracket(&df, &dg)?.as_scalar())
}

/// The dense form of a symmetric field's covariant derivative.
pub fn nabla<R: Real>(c: &Connection<R>, a: &SymTensorField<R>) -> Tensor<R> {
    c.covariant_derivative(a)
}
