//! Floating-point layer: truncated coefficient coordinates, quadrature
//! evaluation of functionals, finite-difference oracles, coefficient-space
//! gradient descent toward the coupled equation and RK4 integration of the
//! Hamiltonian flows of `R_(k)`.

use std::io::Write;
use std::sync::Arc;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::connection::Connection;
use crate::error::{Error, Result};
use crate::geometry::{cahen_gutt, ricci, Curvature};
use crate::lie::BracketParams;
use crate::moment::{difference, hamiltonian_field, residuals, FunctionalId};
use crate::scalars::{canonical_frequencies, rational_from_f64, Coeff, Freq, Rational, Real, TrigScalar};
use crate::tensors::{multiplicity, multisets, SymTensorField, SymplecticModel};

/// One coordinate: a sorted cubic multi-index, a canonical frequency and a real/imaginary flag.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LayoutEntry {
    pub index: Vec<u8>,
    pub freq: Freq,
    pub imag: bool,
}

/// Frozen coordinates on the band-truncated cubic fields.
///
/// Entry `j` stands for the basis field `e_j` whose only component is
/// `index`, equal to `c e^{imx} + conj(c) e^{-imx}` with `c = 1` or `c = i`
/// (the constant `1` at `m = 0`). Coordinates are then the Fourier
/// coefficients themselves: `theta_re = Re c_m`, `theta_im = Im c_m`.
#[derive(Clone, Debug, PartialEq)]
pub struct Layout {
    model: SymplecticModel,
    band: usize,
    entries: Vec<LayoutEntry>,
}

impl Layout {
    pub fn new(model: SymplecticModel, band: usize) -> Self {
        let freqs = canonical_frequencies(model.dim(), band);
        let mut entries = Vec::new();
        for index in multisets(model.dim(), 3) {
            for &freq in &freqs {
                entries.push(LayoutEntry { index: index.clone(), freq, imag: false });
                if !freq.is_zero() {
                    entries.push(LayoutEntry { index: index.clone(), freq, imag: true });
                }
            }
        }
        Layout { model, band, entries }
    }

    pub fn model(&self) -> SymplecticModel {
        self.model
    }
    pub fn band(&self) -> usize {
        self.band
    }
    pub fn len(&self) -> usize {
        self.entries.len()
    }
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
    pub fn entries(&self) -> &[LayoutEntry] {
        &self.entries
    }

    fn mode<R: Real>(&self, e: &LayoutEntry, v: R) -> TrigScalar<R> {
        let c = if e.imag { Coeff::new(R::zero(), v) } else { Coeff::real(v) };
        TrigScalar::hermitian_mode(self.model.dim(), e.freq, &c)
    }

    /// `sum_j values_j e_j`.
    pub fn field<R: Real>(&self, values: &[R]) -> Result<SymTensorField<R>> {
        if values.len() != self.len() {
            return Err(Error::DimensionMismatch { expected: self.len(), got: values.len() });
        }
        let mut out = SymTensorField::zero(self.model, 3);
        for (e, v) in self.entries.iter().zip(values) {
            if v.is_zero() {
                continue;
            }
            let mut comp = out.get(&e.index).into_owned();
            comp += &self.mode(e, v.clone());
            out.set(&e.index, comp);
        }
        Ok(out)
    }

    pub fn basis_field(&self, j: usize) -> SymTensorField<f64> {
        let e = &self.entries[j];
        let mut out = SymTensorField::zero(self.model, 3);
        out.set(&e.index, self.mode(e, 1.0));
        out
    }

    /// Coordinates of the band truncation of a cubic field (the `L^2` projection).
    pub fn project(&self, f: &SymTensorField<f64>) -> Result<Vec<f64>> {
        if f.degree() != 3 || f.model() != self.model {
            return Err(Error::DegreeMismatch("projection needs a cubic field on the layout model".into()));
        }
        Ok(self
            .entries
            .iter()
            .map(|e| {
                let c = f.get(&e.index).coeff(&e.freq);
                if e.imag {
                    c.im
                } else {
                    c.re
                }
            })
            .collect())
    }
}

/// Point in the layout coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub layout: Arc<Layout>,
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(layout: Arc<Layout>) -> Self {
        let values = vec![0.0; layout.len()];
        ParamVector { layout, values }
    }

    /// Seeded uniform draw in `[-amplitude, amplitude]`.
    pub fn random(layout: Arc<Layout>, seed: u64, amplitude: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let values = (0..layout.len()).map(|_| amplitude * (2.0 * rng.random::<f64>() - 1.0)).collect();
        ParamVector { layout, values }
    }

    /// Seeded draw of dyadic values `k / 2^shift`, `|k| <= mag`; exactly representable.
    pub fn random_dyadic(layout: Arc<Layout>, seed: u64, mag: i64, shift: i32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let scale = 2f64.powi(-shift);
        let values = (0..layout.len()).map(|_| rng.random_range(-mag..=mag) as f64 * scale).collect();
        ParamVector { layout, values }
    }

    pub fn from_field(layout: Arc<Layout>, f: &SymTensorField<f64>) -> Result<Self> {
        let values = layout.project(f)?;
        Ok(ParamVector { layout, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn field(&self) -> Result<SymTensorField<f64>> {
        self.layout.field(&self.values)
    }

    /// The same field with exact coefficients.
    pub fn exact_field(&self) -> Result<SymTensorField<Rational>> {
        let vals = self.values.iter().map(|&v| rational_from_f64(v)).collect::<Result<Vec<_>>>()?;
        self.layout.field(&vals)
    }

    /// `flat + Pi(theta)`.
    pub fn connection(&self) -> Result<Connection<f64>> {
        Connection::from_sym(&self.field()?)
    }

    /// `self + h * dir`.
    pub fn axpy(&self, h: f64, dir: &ParamVector) -> Result<Self> {
        self.check(dir)?;
        let values = self.values.iter().zip(&dir.values).map(|(a, b)| a + h * b).collect();
        Ok(ParamVector { layout: self.layout.clone(), values })
    }

    pub fn norm(&self) -> f64 {
        euclid(&self.values)
    }

    fn check(&self, o: &ParamVector) -> Result<()> {
        if *self.layout != *o.layout {
            return Err(Error::DimensionMismatch { expected: self.len(), got: o.len() });
        }
        Ok(())
    }

    fn finite(&self, what: &str) -> Result<()> {
        if self.values.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite(what.into()))
        }
    }
}

fn euclid(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Uniform tensor grid with trapezoidal (equal) weights.
///
/// The mean over `n` points per axis is exact for every trigonometric
/// polynomial whose band is below `n`.
#[derive(Clone, Debug)]
pub struct Grid {
    points: Vec<Vec<f64>>,
}

impl Grid {
    pub fn new(dim: usize, n: usize) -> Self {
        let step = 2.0 * std::f64::consts::PI / n as f64;
        let mut points = Vec::with_capacity(n.pow(dim as u32));
        let mut cur = vec![0usize; dim];
        loop {
            points.push(cur.iter().map(|&k| k as f64 * step).collect());
            let mut a = dim;
            loop {
                if a == 0 {
                    return Grid { points };
                }
                a -= 1;
                cur[a] += 1;
                if cur[a] < n {
                    break;
                }
                cur[a] = 0;
            }
        }
    }

    /// `(4 band + 4)` points per axis, enlarged so an integrand of band `integrand` is resolved.
    pub fn for_integrand(dim: usize, band: usize, integrand: usize) -> Self {
        Grid::new(dim, (4 * band + 4).max(integrand + 1))
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self, f: &TrigScalar<f64>) -> Vec<f64> {
        self.points.iter().map(|x| f.eval(x)).collect()
    }

    pub fn mean(&self, vals: &[f64]) -> f64 {
        vals.iter().sum::<f64>() / vals.len() as f64
    }

    pub fn mean_product(&self, a: &TrigScalar<f64>, b: &TrigScalar<f64>) -> f64 {
        let (va, vb) = (self.values(a), self.values(b));
        va.iter().zip(&vb).map(|(x, y)| x * y).sum::<f64>() / va.len() as f64
    }
}

/// `<<a, b>>` by quadrature.
pub fn grid_pairing(band: usize, a: &SymTensorField<f64>, b: &SymTensorField<f64>) -> Result<f64> {
    if a.degree() != b.degree() || a.model() != b.model() {
        return Err(Error::DegreeMismatch("pairing needs equal degrees".into()));
    }
    let m = a.model();
    let grid = Grid::for_integrand(m.dim(), band, a.band() + b.band());
    let mut acc = 0.0;
    for (idx, fa) in a.components() {
        let (s, img) = m.raise_tuple(idx);
        let fb = b.get(&img);
        if fb.is_zero() {
            continue;
        }
        acc += (multiplicity(idx, m.dim()) * s) as f64 * grid.mean_product(fa, &fb);
    }
    Ok(acc)
}

/// `L^2` norm `(sum over all index tuples of mean f_I^2)^{1/2}` by quadrature.
pub fn grid_norm(band: usize, a: &SymTensorField<f64>) -> f64 {
    let m = a.model();
    let grid = Grid::for_integrand(m.dim(), band, 2 * a.band());
    let mut acc = 0.0;
    for (idx, fa) in a.components() {
        acc += multiplicity(idx, m.dim()) as f64 * grid.mean_product(fa, fa);
    }
    acc.sqrt()
}

fn mean_k_squared(band: usize, k: &TrigScalar<f64>, dim: usize) -> f64 {
    Grid::for_integrand(dim, band, 2 * k.band()).mean_product(k, k)
}

/// `-1/(2k) mean tr Rc^{2k}`, pointwise matrix powers on the grid.
fn r_k_grid(band: usize, c: &Connection<f64>, k: u32) -> f64 {
    let e = Curvature::of(c).ricci_endomorphism();
    let dim = e.len();
    let entry_band = e.iter().flatten().map(|f| f.band()).max().unwrap_or(0);
    let grid = Grid::for_integrand(dim, band, 2 * k as usize * entry_band);
    let vals: Vec<Vec<Vec<f64>>> = e.iter().map(|row| row.iter().map(|f| grid.values(f)).collect()).collect();
    let mut acc = 0.0;
    for p in 0..grid.len() {
        let a: Vec<Vec<f64>> = (0..dim).map(|i| (0..dim).map(|j| vals[i][j][p]).collect()).collect();
        let mut pow = a.clone();
        for _ in 1..2 * k {
            pow = (0..dim).map(|i| (0..dim).map(|j| (0..dim).map(|l| pow[i][l] * a[l][j]).sum()).collect()).collect();
        }
        acc += (0..dim).map(|i| pow[i][i]).sum::<f64>();
    }
    -acc / grid.len() as f64 / (2 * k) as f64
}

/// Value of a functional at `flat + Pi(theta)`, through quadrature of pointwise fields.
pub fn float_value(fid: &FunctionalId<f64>, theta: &ParamVector) -> Result<f64> {
    theta.finite("parameters")?;
    let c = theta.connection()?;
    let b = theta.layout.band();
    let dim = c.dim();
    let v = match fid {
        FunctionalId::Theta { reference, dir } => grid_pairing(b, dir, &difference(&c, reference)?)?,
        FunctionalId::RAlpha { alpha } => grid_pairing(b, alpha, &ricci(&c)?)?,
        FunctionalId::RK { k } => r_k_grid(b, &c, *k),
        FunctionalId::EPoly { coeffs } => {
            let k = cahen_gutt(&c)?;
            let grid = Grid::for_integrand(dim, b, coeffs.len().saturating_sub(1) * k.band());
            let vals = grid.values(&k);
            let f: Vec<f64> = vals.iter().map(|&x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)).collect();
            grid.mean(&f)
        }
        FunctionalId::Mpqr { p, q, r, a0, a2, a3, reference } => {
            let k = cahen_gutt(&c)?;
            let first = Grid::for_integrand(dim, b, a0.band() + k.band()).mean_product(a0, &k);
            p * first + q * grid_pairing(b, a2, &ricci(&c)?)? + r * grid_pairing(b, a3, &difference(&c, reference)?)?
        }
        FunctionalId::NSt { s, t } => {
            let e = mean_k_squared(b, &cahen_gutt(&c)?, dim);
            let r1 = r_k_grid(b, &c, 1);
            t * t * (1.0 + t * t * e + 18.0 * s * s * r1)
        }
        FunctionalId::JSt { s, t } => {
            let e = mean_k_squared(b, &cahen_gutt(&c)?, dim);
            let r1 = r_k_grid(b, &c, 1);
            t * t * e + 2.0 * s * s * r1
        }
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::NonFinite(format!("{} value", fid.tag())))
    }
}

/// Central difference `(F(theta + h dir) - F(theta - h dir)) / 2h`.
pub fn fd_variation(fid: &FunctionalId<f64>, theta: &ParamVector, dir: &ParamVector, h: f64) -> Result<f64> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Invalid(format!("step h must be positive, got {h}")));
    }
    dir.finite("direction")?;
    let plus = float_value(fid, &theta.axpy(h, dir)?)?;
    let minus = float_value(fid, &theta.axpy(-h, dir)?)?;
    let d = (plus - minus) / (2.0 * h);
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::NonFinite("finite difference".into()))
    }
}

/// `Omega(dir, H_F)` from the closed-form Hamiltonian field.
pub fn analytic_variation(fid: &FunctionalId<f64>, theta: &ParamVector, dir: &ParamVector) -> Result<f64> {
    let h = hamiltonian_field(fid, &theta.connection()?)?;
    grid_pairing(theta.layout.band(), &dir.field()?, &h)
}

/// Components `<<e_j, h>>` of a cubic field against the layout basis.
pub fn coefficient_covector(layout: &Layout, h: &SymTensorField<f64>) -> Result<Vec<f64>> {
    (0..layout.len()).map(|j| grid_pairing(layout.band(), &layout.basis_field(j), h)).collect()
}

/// Euclidean coefficient gradient `dF/dtheta_j = Omega(e_j, H_F)`.
pub fn coefficient_gradient(fid: &FunctionalId<f64>, theta: &ParamVector) -> Result<Vec<f64>> {
    let h = hamiltonian_field(fid, &theta.connection()?)?;
    coefficient_covector(&theta.layout, &h)
}

/// Outcome of comparing the analytic variation with finite differences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FdCheck {
    pub analytic: f64,
    pub fd: f64,
    pub fd_half: f64,
    pub richardson: f64,
    pub rel_err: f64,
    pub rel_err_half: f64,
    pub rel_err_richardson: f64,
    pub passed: bool,
}

/// Accept when the error at `h` is within `tol`; otherwise fall back on
/// `h/2`, which must cut the error at least fourfold, with the extrapolated
/// `(4 D(h/2) - D(h)) / 3` within `tol`.
pub fn fd_check(fid: &FunctionalId<f64>, theta: &ParamVector, dir: &ParamVector, h: f64, tol: f64) -> Result<FdCheck> {
    let analytic = analytic_variation(fid, theta, dir)?;
    let fd = fd_variation(fid, theta, dir, h)?;
    let fd_half = fd_variation(fid, theta, dir, h / 2.0)?;
    let richardson = (4.0 * fd_half - fd) / 3.0;
    let rel = |x: f64| (x - analytic).abs() / (1.0 + analytic.abs());
    let (rel_err, rel_err_half, rel_err_richardson) = (rel(fd), rel(fd_half), rel(richardson));
    let passed = rel_err <= tol || (rel_err >= 4.0 * rel_err_half && rel_err_richardson <= tol);
    Ok(FdCheck { analytic, fd, fd_half, richardson, rel_err, rel_err_half, rel_err_richardson, passed })
}

/// Values recomputed from the parameters at every state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Diagnostics {
    pub s: f64,
    pub t: f64,
    pub j: f64,
    pub e: f64,
    pub r1: f64,
    /// `||delta* Ric||`
    pub preferred_norm: f64,
    /// `||H(K)||`
    pub critical_norm: f64,
    /// `||t^2 H(K) + s^2 delta* Ric||`
    pub coupled_norm: f64,
}

struct Snapshot {
    diagnostics: Diagnostics,
    coupled: SymTensorField<f64>,
}

fn snapshot(theta: &ParamVector, p: &BracketParams<f64>) -> Result<Snapshot> {
    theta.finite("parameters")?;
    let c = theta.connection()?;
    let b = theta.layout.band();
    let e = mean_k_squared(b, &cahen_gutt(&c)?, c.dim());
    let r1 = r_k_grid(b, &c, 1);
    let res = residuals(&c, p)?;
    let diagnostics = Diagnostics {
        s: p.s,
        t: p.t,
        j: p.t * p.t * e + 2.0 * p.s * p.s * r1,
        e,
        r1,
        preferred_norm: grid_norm(b, &res.preferred),
        critical_norm: grid_norm(b, &res.critical),
        coupled_norm: grid_norm(b, &res.coupled),
    };
    if [diagnostics.j, diagnostics.e, diagnostics.r1, diagnostics.coupled_norm].iter().all(|v| v.is_finite()) {
        Ok(Snapshot { diagnostics, coupled: res.coupled })
    } else {
        Err(Error::NonFinite("diagnostics".into()))
    }
}

pub fn diagnose(theta: &ParamVector, p: &BracketParams<f64>) -> Result<Diagnostics> {
    Ok(snapshot(theta, p)?.diagnostics)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlowState {
    pub theta: ParamVector,
    pub time: f64,
    pub diagnostics: Diagnostics,
}

impl FlowState {
    pub fn new(theta: ParamVector, time: f64, p: &BracketParams<f64>) -> Result<Self> {
        let diagnostics = diagnose(&theta, p)?;
        Ok(FlowState { theta, time, diagnostics })
    }

    pub fn params(&self) -> BracketParams<f64> {
        BracketParams::new(self.diagnostics.s, self.diagnostics.t)
    }
}

/// One CSV row of a descent or flow trace.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceRow {
    pub iter: usize,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub preferred_norm: f64,
    pub critical_norm: f64,
    pub coupled_norm: f64,
    pub step: f64,
}

impl TraceRow {
    fn of(iter: usize, d: &Diagnostics, step: f64) -> Self {
        TraceRow {
            iter,
            j: d.j,
            e: d.e,
            r1: d.r1,
            preferred_norm: d.preferred_norm,
            critical_norm: d.critical_norm,
            coupled_norm: d.coupled_norm,
            step,
        }
    }
}

pub fn write_trace<W: Write>(rows: &[TraceRow], w: W) -> Result<()> {
    write_rows(rows, w)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DescentOptions {
    pub step: f64,
    pub max_iters: usize,
    pub tol: f64,
}

/// Why a descent run stopped.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stop {
    /// Gradient norm below tolerance.
    Converged,
    MaxIters,
    /// No accepted step after the maximal number of halvings.
    Diverged(String),
}

#[derive(Clone, Debug, PartialEq)]
pub struct DescentRun {
    pub state: FlowState,
    pub trace: Vec<TraceRow>,
    pub iterations: usize,
    pub stop: Stop,
    pub gradient_norm: f64,
}

impl DescentRun {
    pub fn converged(&self) -> bool {
        self.stop == Stop::Converged
    }
}

const MAX_HALVINGS: usize = 60;

/// Backtracking descent of `J_{s,t}` in coefficient space; divergence is an error.
pub fn gradient_descent(p: &BracketParams<f64>, theta0: &ParamVector, opts: DescentOptions) -> Result<DescentRun> {
    let run = descend(p, theta0, opts)?;
    match &run.stop {
        Stop::Diverged(why) => Err(Error::Divergence(why.clone())),
        _ => Ok(run),
    }
}

/// Backtracking descent of `J_{s,t}` in coefficient space, keeping the trace of a diverged run.
///
/// Each iteration starts from `opts.step` and halves until `J` does not
/// increase. Stops once the coefficient gradient norm drops below `opts.tol`.
pub fn descend(p: &BracketParams<f64>, theta0: &ParamVector, opts: DescentOptions) -> Result<DescentRun> {
    if !(opts.step > 0.0) || !opts.step.is_finite() {
        return Err(Error::Invalid(format!("step must be positive, got {}", opts.step)));
    }
    let layout = theta0.layout.clone();
    let mut theta = theta0.clone();
    let mut snap = snapshot(&theta, p)?;
    // dJ/dtheta_j = <<e_j, H_J>> with H_J = -2 coupled
    let grad_of = |s: &Snapshot| -> Result<Vec<f64>> { coefficient_covector(&layout, &s.coupled.scale(&-2.0)) };
    let mut grad = grad_of(&snap)?;
    let mut trace = vec![TraceRow::of(0, &snap.diagnostics, 0.0)];
    let mut time = 0.0;
    let mut iterations = 0;
    let mut stop = Stop::MaxIters;
    loop {
        if euclid(&grad) < opts.tol {
            stop = Stop::Converged;
            break;
        }
        if iterations >= opts.max_iters {
            break;
        }
        let dir = ParamVector { layout: layout.clone(), values: grad.iter().map(|g| -g).collect() };
        let mut h = opts.step;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let cand = theta.axpy(h, &dir)?;
            if let Ok(s) = snapshot(&cand, p) {
                if s.diagnostics.j <= snap.diagnostics.j {
                    accepted = Some((cand, s));
                    break;
                }
            }
            h /= 2.0;
        }
        let Some((cand, s)) = accepted else {
            stop = Stop::Diverged(format!("J increased after {MAX_HALVINGS} halvings at iteration {}", iterations + 1));
            break;
        };
        theta = cand;
        snap = s;
        grad = grad_of(&snap)?;
        time += h;
        iterations += 1;
        trace.push(TraceRow::of(iterations, &snap.diagnostics, h));
    }
    Ok(DescentRun {
        state: FlowState { theta, time, diagnostics: snap.diagnostics },
        trace,
        iterations,
        stop,
        gradient_norm: euclid(&grad),
    })
}

/// Galerkin right-hand side: layout coordinates of `c H_{R_(k)}`.
pub fn flow_velocity(k: u32, cflow: f64, theta: &ParamVector) -> Result<Vec<f64>> {
    theta.finite("flow stage")?;
    let h = hamiltonian_field(&FunctionalId::<f64>::r_k(k)?, &theta.connection()?)?;
    let v: Vec<f64> = theta.layout.project(&h)?.into_iter().map(|x| cflow * x).collect();
    if v.iter().all(|x| x.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFinite("flow velocity".into()))
    }
}

fn rk4_step(k: u32, cflow: f64, theta: &ParamVector, dt: f64) -> Result<ParamVector> {
    let layout = theta.layout.clone();
    let pv = |values: Vec<f64>| ParamVector { layout: layout.clone(), values };
    let k1 = pv(flow_velocity(k, cflow, theta)?);
    let k2 = pv(flow_velocity(k, cflow, &theta.axpy(dt / 2.0, &k1)?)?);
    let k3 = pv(flow_velocity(k, cflow, &theta.axpy(dt / 2.0, &k2)?)?);
    let k4 = pv(flow_velocity(k, cflow, &theta.axpy(dt, &k3)?)?);
    let values = (0..theta.len())
        .map(|j| theta.values[j] + dt / 6.0 * (k1.values[j] + 2.0 * k2.values[j] + 2.0 * k3.values[j] + k4.values[j]))
        .collect();
    let next = pv(values);
    next.finite("flow state")?;
    Ok(next)
}

/// Classical fixed-step RK4 for `d nabla/dt = c H_{R_(k)}`; returns `steps + 1` states.
pub fn flow_integrate(k: u32, cflow: f64, state0: &FlowState, dt: f64, steps: usize) -> Result<Vec<FlowState>> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Invalid(format!("dt must be positive, got {dt}")));
    }
    let p = state0.params();
    let mut out = vec![FlowState::new(state0.theta.clone(), state0.time, &p)?];
    for i in 0..steps {
        let theta = rk4_step(k, cflow, &out[i].theta, dt)?;
        out.push(FlowState::new(theta, state0.time + (i + 1) as f64 * dt, &p)?);
    }
    Ok(out)
}

/// Parameters only, without per-state diagnostics.
pub fn flow_endpoint(k: u32, cflow: f64, theta0: &ParamVector, dt: f64, steps: usize) -> Result<ParamVector> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Invalid(format!("dt must be positive, got {dt}")));
    }
    let mut theta = theta0.clone();
    for _ in 0..steps {
        theta = rk4_step(k, cflow, &theta, dt)?;
    }
    Ok(theta)
}

/// Convergence ratio `|y_N - y_2N| / |y_2N - y_4N|` over a fixed horizon; about 16 for RK4.
pub fn richardson_ratio(k: u32, cflow: f64, theta0: &ParamVector, horizon: f64, steps: usize) -> Result<f64> {
    let run = |n: usize| flow_endpoint(k, cflow, theta0, horizon / n as f64, n);
    let (a, b, c) = (run(steps)?, run(2 * steps)?, run(4 * steps)?);
    let diff = |x: &ParamVector, y: &ParamVector| euclid(&x.values.iter().zip(&y.values).map(|(u, v)| u - v).collect::<Vec<_>>());
    Ok(diff(&a, &b) / diff(&b, &c))
}

pub fn trace_of_flow(states: &[FlowState], dt: f64) -> Vec<TraceRow> {
    states.iter().enumerate().map(|(i, s)| TraceRow::of(i, &s.diagnostics, if i == 0 { 0.0 } else { dt })).collect()
}

/// States up to the first failure; `error` holds why integration stopped early.
#[derive(Debug)]
pub struct FlowRun {
    pub states: Vec<FlowState>,
    pub error: Option<Error>,
}

/// Like [`flow_integrate`], but a non-finite state ends the run and keeps the states before it.
pub fn flow_run(k: u32, cflow: f64, state0: &FlowState, dt: f64, steps: usize) -> Result<FlowRun> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Invalid(format!("dt must be positive, got {dt}")));
    }
    let p = state0.params();
    let mut states = vec![state0.clone()];
    for i in 0..steps {
        let next = rk4_step(k, cflow, &states[i].theta, dt).and_then(|theta| FlowState::new(theta, state0.time + (i + 1) as f64 * dt, &p));
        match next {
            Ok(s) => states.push(s),
            Err(e) => return Ok(FlowRun { states, error: Some(e) }),
        }
    }
    Ok(FlowRun { states, error: None })
}

/// One CSV row of a flow trace; `E_drift` is `E(t) - E(0)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowRow {
    pub step: usize,
    pub time: f64,
    #[serde(rename = "E")]
    pub e: f64,
    #[serde(rename = "E_drift")]
    pub e_drift: f64,
    #[serde(rename = "J")]
    pub j: f64,
    #[serde(rename = "R1")]
    pub r1: f64,
    pub coupled_norm: f64,
}

pub fn flow_rows(states: &[FlowState]) -> Vec<FlowRow> {
    let e0 = states.first().map_or(0.0, |s| s.diagnostics.e);
    states
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let d = &s.diagnostics;
            FlowRow { step: i, time: s.time, e: d.e, e_drift: d.e - e0, j: d.j, r1: d.r1, coupled_norm: d.coupled_norm }
        })
        .collect()
}

pub fn write_rows<W: Write, T: Serialize>(rows: &[T], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    for r in rows {
        out.serialize(r).map_err(|e| Error::Invalid(format!("csv: {e}")))?;
    }
    out.flush().map_err(|e| Error::Invalid(format!("csv: {e}")))
}
