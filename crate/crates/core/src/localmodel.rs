//! Floating-point checks on linear `C^*`-actions on `C^n` with the standard
//! complex structure `J = i` and symplectic form `omega(u, v) = Im sum conj(u_j) v_j`.
//!
//! The circle generator at `z` is `xi = (i a_j z_j)`, the gradient flow is
//! `e^t . z = (e^{a_j t} z_j)` and the moment map is `Psi = 1/2 sum a_j |z_j|^2`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Seeded generator used by all randomized checks.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinearAction {
    weights: Vec<i64>,
}

impl LinearAction {
    pub fn new(weights: Vec<i64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Precondition("a linear action needs at least one weight".into()));
        }
        Ok(LinearAction { weights })
    }

    pub fn weights(&self) -> &[i64] {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn negative(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.weights[j] < 0).collect()
    }

    pub fn positive(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.weights[j] > 0).collect()
    }

    pub fn trivial(&self) -> Vec<usize> {
        (0..self.dim()).filter(|&j| self.weights[j] == 0).collect()
    }

    fn check_len(&self, z: &[C64]) -> Result<()> {
        if z.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: z.len() });
        }
        Ok(())
    }

    /// `z` is fixed when every coordinate with nonzero weight vanishes.
    pub fn is_fixed(&self, z: &[C64]) -> bool {
        self.weights.iter().zip(z).all(|(&a, zj)| a == 0 || zj.norm_sqr() == 0.0)
    }

    fn block_nonzero(&self, z: &[C64], idx: &[usize]) -> bool {
        idx.iter().any(|&j| z[j].norm_sqr() > 0.0)
    }

    /// Circle generator `(i a_j z_j)`.
    pub fn generator(&self, z: &[C64]) -> Vec<C64> {
        self.weights.iter().zip(z).map(|(&a, zj)| C64::i() * (a as f64) * zj).collect()
    }
}

/// `omega(u, v) = Im sum conj(u_j) v_j`
pub fn omega(u: &[C64], v: &[C64]) -> f64 {
    u.iter().zip(v).map(|(a, b)| (a.conj() * b).im).sum()
}

fn times_i(v: &[C64]) -> Vec<C64> {
    v.iter().map(|x| C64::i() * x).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FlowPoint {
    pub z: Vec<C64>,
}

pub fn flow(action: &LinearAction, z: &[C64], t: f64) -> Result<FlowPoint> {
    action.check_len(z)?;
    if !t.is_finite() || z.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Precondition("flow needs finite inputs".into()));
    }
    let out: Vec<C64> = action.weights.iter().zip(z).map(|(&a, zj)| zj * (a as f64 * t).exp()).collect();
    if out.iter().any(|x| !x.re.is_finite() || !x.im.is_finite()) {
        return Err(Error::Overflow(format!("flow to time {t} leaves the floating range")));
    }
    Ok(FlowPoint { z: out })
}

/// `1/2 sum a_j |z_j|^2`
pub fn moment_standard(action: &LinearAction, z: &[C64]) -> f64 {
    0.5 * action.weights.iter().zip(z).map(|(&a, zj)| a as f64 * zj.norm_sqr()).sum::<f64>()
}

/// `omega(xi, J xi) = sum a_j^2 |z_j|^2`, the derivative of `Psi` along the flow.
pub fn flow_speed(action: &LinearAction, z: &[C64]) -> f64 {
    action.weights.iter().zip(z).map(|(&a, zj)| (a * a) as f64 * zj.norm_sqr()).sum()
}

/// `Psi(e^t . z)` without building the flowed point.
fn psi_along(action: &LinearAction, z: &[C64], t: f64) -> f64 {
    0.5 * action
        .weights
        .iter()
        .zip(z)
        .map(|(&a, zj)| a as f64 * zj.norm_sqr() * (2.0 * a as f64 * t).exp())
        .sum::<f64>()
}

fn richardson_central(f: impl Fn(f64) -> f64, h: f64) -> (f64, f64) {
    let d = |h: f64| (f(h) - f(-h)) / (2.0 * h);
    let (d1, d2) = (d(h), d(h / 2.0));
    ((4.0 * d2 - d1) / 3.0, (d2 - d1).abs())
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotoneVerdict {
    pub increasing: bool,
    pub grid_points: usize,
    /// `sum a_j^2 |z_j|^2`
    pub derivative: f64,
    pub finite_difference: f64,
    pub relative_error: f64,
}

/// Checks that `Psi` strictly increases along the flow over `t_grid` (sorted)
/// and that its derivative at `t = 0` is `omega(xi, J xi)`.
pub fn check_monotone(action: &LinearAction, z: &[C64], t_grid: &[f64]) -> Result<MonotoneVerdict> {
    action.check_len(z)?;
    if action.is_fixed(z) {
        return Err(Error::FixedPointInput);
    }
    let mut increasing = true;
    let mut last = None;
    for &t in t_grid {
        let p = moment_standard(action, &flow(action, z, t)?.z);
        if let Some(q) = last {
            increasing &= p > q;
        }
        last = Some(p);
    }
    let derivative = flow_speed(action, z);
    let (fd, _) = richardson_central(|t| psi_along(action, z, t), 1e-3);
    Ok(MonotoneVerdict {
        increasing,
        grid_points: t_grid.len(),
        derivative,
        finite_difference: fd,
        relative_error: (fd - derivative).abs() / derivative,
    })
}

/// Open interval of values `Psi` takes along the orbit.
fn orbit_range(action: &LinearAction, z: &[C64]) -> (f64, f64) {
    let lo = if action.block_nonzero(z, &action.negative()) { f64::NEG_INFINITY } else { 0.0 };
    let hi = if action.block_nonzero(z, &action.positive()) { f64::INFINITY } else { 0.0 };
    (lo, hi)
}

pub fn solve_time_to_level(action: &LinearAction, z: &[C64], s: f64) -> Result<Option<f64>> {
    solve_time_to_level_from(action, z, s, 0.0)
}

/// The unique `t` with `Psi(e^t . z) = s`, bracketing around `seed`.
pub fn solve_time_to_level_from(action: &LinearAction, z: &[C64], s: f64, seed: f64) -> Result<Option<f64>> {
    action.check_len(z)?;
    if action.is_fixed(z) {
        return Err(Error::FixedPointInput);
    }
    let (lo, hi) = orbit_range(action, z);
    if !(lo < s && s < hi) {
        return Ok(None);
    }
    let g = |t: f64| psi_along(action, z, t) - s;
    let max_t = 700.0 / action.weights.iter().map(|a| a.abs()).max().unwrap_or(1).max(1) as f64;
    let (mut a, mut b) = (seed - 1.0, seed + 1.0);
    let mut step = 1.0;
    while g(a) > 0.0 {
        step *= 2.0;
        a = seed - step;
        if a < -max_t {
            return Ok(None);
        }
    }
    step = 1.0;
    while g(b) < 0.0 {
        step *= 2.0;
        b = seed + step;
        if b > max_t {
            return Ok(None);
        }
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        if g(m) < 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    let mut t = 0.5 * (a + b);
    for _ in 0..3 {
        let d = 2.0 * flow_speed(action, &flow(action, z, t)?.z) / 2.0;
        if d > 0.0 {
            let next = t - g(t) / d;
            if next.is_finite() && (next - t).abs() < (b - a).max(1e-300) * 4.0 {
                t = next;
            }
        }
    }
    Ok(Some(t))
}

/// Whether the orbit of `z` meets `Psi = s`, from the sign blocks alone:
/// positive levels need the positive block nonzero, negative levels the
/// negative block, level 0 both.
pub fn level_membership(action: &LinearAction, z: &[C64], s: f64) -> Result<bool> {
    action.check_len(z)?;
    if action.is_fixed(z) {
        return Err(Error::FixedPointInput);
    }
    let neg = action.block_nonzero(z, &action.negative());
    let pos = action.block_nonzero(z, &action.positive());
    Ok(if s > 0.0 {
        pos
    } else if s < 0.0 {
        neg
    } else {
        pos && neg
    })
}

fn n_block(action: &LinearAction, z: &[C64], idx: &[usize]) -> f64 {
    idx.iter()
        .map(|&j| z[j].norm().powf(2.0 / action.weights[j].abs() as f64))
        .sum::<f64>()
        .sqrt()
}

/// `N_-(z_-)` and `N_+(z_+)`.
pub fn n_pm(action: &LinearAction, z: &[C64]) -> Result<(f64, f64)> {
    action.check_len(z)?;
    Ok((n_block(action, z, &action.negative()), n_block(action, z, &action.positive())))
}

/// The flow-invariant product `N_- N_+`.
pub fn n_product(action: &LinearAction, z: &[C64]) -> Result<f64> {
    let (a, b) = n_pm(action, z)?;
    Ok(a * b)
}

#[derive(Clone, Debug, Serialize)]
pub struct NeighborhoodSpec {
    pub eps: f64,
    pub eps_prime: f64,
    pub delta: f64,
    /// Bound on `|w_j|` for the trivial block.
    pub k_bound: f64,
}

impl NeighborhoodSpec {
    /// A spec whose `delta` is certified by explicit bounds: on
    /// `S^-_eps x D^+_eps'` the moment map stays below
    /// `-1/2 k_- (eps^2/k_-)^A_- + 1/2 A_+ eps'^2`, and symmetrically; `delta`
    /// is half the smaller margin. Needs `eps' < eps < 1`.
    pub fn certified(action: &LinearAction, eps: f64, eps_prime: f64, k_bound: f64) -> Result<Self> {
        if !(0.0 < eps_prime && eps_prime < eps && eps < 1.0) {
            return Err(Error::Precondition(format!("need 0 < eps' < eps < 1, got eps = {eps}, eps' = {eps_prime}")));
        }
        let block = |idx: &[usize]| {
            let k = idx.len() as f64;
            let a = idx.iter().map(|&j| action.weights[j].abs()).max().unwrap_or(0) as f64;
            (k, a)
        };
        let (km, am) = block(&action.negative());
        let (kp, ap) = block(&action.positive());
        if km == 0.0 && kp == 0.0 {
            return Err(Error::Precondition("the action is trivial".into()));
        }
        let mut margins = Vec::new();
        if km > 0.0 {
            margins.push(0.5 * km * (eps * eps / km).powf(am) - 0.5 * ap * eps_prime * eps_prime);
        }
        if kp > 0.0 {
            margins.push(0.5 * kp * (eps * eps / kp).powf(ap) - 0.5 * am * eps_prime * eps_prime);
        }
        let m = margins.iter().cloned().fold(f64::INFINITY, f64::min);
        if m <= 0.0 {
            return Err(Error::Precondition(format!("eps' = {eps_prime} is too large for a positive delta")));
        }
        Ok(NeighborhoodSpec { eps, eps_prime, delta: m / 2.0, k_bound })
    }

    pub fn contains(&self, action: &LinearAction, z: &[C64]) -> bool {
        let (nm, np) = (n_block(action, z, &action.negative()), n_block(action, z, &action.positive()));
        nm < self.eps
            && np < self.eps
            && nm * np < self.eps * self.eps_prime
            && action.trivial().iter().all(|&j| z[j].norm() <= self.k_bound)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Occupancy {
    /// Maximal runs of consecutive grid times inside the region.
    pub runs: usize,
    pub forward_unbounded: bool,
    pub backward_unbounded: bool,
    pub max_psi: f64,
    pub min_psi: f64,
}

/// Grid scan of `{ t : e^t . z in region }`.
pub fn occupancy(
    action: &LinearAction,
    z: &[C64],
    region: &dyn Fn(&[C64]) -> bool,
    t_max: f64,
    steps: usize,
) -> Result<Occupancy> {
    let mut runs = 0;
    let mut inside_prev = false;
    let (mut first, mut last) = (false, false);
    let (mut max_psi, mut min_psi) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in 0..=steps {
        let t = -t_max + 2.0 * t_max * k as f64 / steps as f64;
        let p = flow(action, z, t)?.z;
        let inside = region(&p);
        if inside {
            let psi = moment_standard(action, &p);
            max_psi = max_psi.max(psi);
            min_psi = min_psi.min(psi);
            if !inside_prev {
                runs += 1;
            }
        }
        if k == 0 {
            first = inside;
        }
        last = inside;
        inside_prev = inside;
    }
    Ok(Occupancy { runs, forward_unbounded: last, backward_unbounded: first, max_psi, min_psi })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub trials: usize,
    pub re_entries: usize,
    /// Finite exits forward without a visited point above `delta`.
    pub forward_clause_failures: usize,
    pub backward_clause_failures: usize,
    pub half_lines: usize,
    pub delta: f64,
    pub grid_step: f64,
    pub passed: bool,
}

fn random_disk(rng: &mut ChaCha8Rng, r: f64) -> C64 {
    loop {
        let x = rng.random_range(-1.0..1.0);
        let y = rng.random_range(-1.0..1.0);
        if x * x + y * y <= 1.0 {
            return C64::new(r * x, r * y);
        }
    }
}

/// Samples points of the neighbourhood `V` of `spec`, scans each orbit on a
/// grid, and counts re-entries and failures of the exit clauses (a finite
/// forward exit must pass `Psi > delta`, a finite backward exit `Psi < -delta`).
pub fn orbital_convexity_probe(
    action: &LinearAction,
    spec: &NeighborhoodSpec,
    trials: usize,
    seed: u64,
) -> Result<ConvexityReport> {
    let mut rng = rng(seed);
    let t_max = 40.0 / action.weights.iter().map(|a| a.abs()).max().unwrap_or(1).max(1) as f64;
    let steps = 40_000;
    let region = |p: &[C64]| spec.contains(action, p);
    let mut report = ConvexityReport {
        trials,
        re_entries: 0,
        forward_clause_failures: 0,
        backward_clause_failures: 0,
        half_lines: 0,
        delta: spec.delta,
        grid_step: 2.0 * t_max / steps as f64,
        passed: false,
    };
    for _ in 0..trials {
        let z = loop {
            let drop = rng.random_range(0..4);
            let z: Vec<C64> = (0..action.dim())
                .map(|j| {
                    let a = action.weights[j];
                    let skip = (drop == 1 && a > 0) || (drop == 2 && a < 0);
                    if skip {
                        C64::new(0.0, 0.0)
                    } else if a == 0 {
                        random_disk(&mut rng, spec.k_bound)
                    } else {
                        random_disk(&mut rng, spec.eps.powi(a.abs() as i32))
                    }
                })
                .collect();
            if spec.contains(action, &z) && !action.is_fixed(&z) {
                break z;
            }
        };
        let o = occupancy(action, &z, &region, t_max, steps)?;
        if o.runs != 1 {
            report.re_entries += 1;
        }
        if o.forward_unbounded || o.backward_unbounded {
            report.half_lines += 1;
        }
        if !o.forward_unbounded && o.max_psi <= spec.delta {
            report.forward_clause_failures += 1;
        }
        if !o.backward_unbounded && o.min_psi >= -spec.delta {
            report.backward_clause_failures += 1;
        }
    }
    report.passed =
        report.re_entries == 0 && report.forward_clause_failures == 0 && report.backward_clause_failures == 0;
    Ok(report)
}

/// A one-variable function with its first two derivatives.
pub struct FSpec {
    pub name: String,
    pub f: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f1: Box<dyn Fn(f64) -> f64 + Send + Sync>,
    pub f2: Box<dyn Fn(f64) -> f64 + Send + Sync>,
}

impl FSpec {
    pub fn new(
        name: &str,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f1: impl Fn(f64) -> f64 + Send + Sync + 'static,
        f2: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        FSpec { name: name.into(), f: Box::new(f), f1: Box::new(f1), f2: Box::new(f2) }
    }

    pub fn identity() -> Self {
        FSpec::new("t", |t| t, |_| 1.0, |_| 0.0)
    }

    pub fn square() -> Self {
        FSpec::new("t^2", |t| t * t, |t| 2.0 * t, |_| 2.0)
    }

    pub fn log() -> Self {
        FSpec::new("ln t", f64::ln, |t| 1.0 / t, |t| -1.0 / (t * t))
    }

    pub fn linear_plus_square() -> Self {
        FSpec::new("t + t^2", |t| t + t * t, |t| 1.0 + 2.0 * t, |_| 2.0)
    }

    /// `rho(t) ln t / 2 pi`, the blow-up potential profile.
    pub fn smoothed_log(rho: Rho) -> Self {
        FSpec::new(
            "rho(t) ln t / 2pi",
            move |t| rho.value(t) * t.ln() / (2.0 * PI),
            move |t| (rho.d1(t) * t.ln() + rho.value(t) / t) / (2.0 * PI),
            move |t| (rho.d2(t) * t.ln() + 2.0 * rho.d1(t) / t - rho.value(t) / (t * t)) / (2.0 * PI),
        )
    }

    pub fn family() -> Vec<FSpec> {
        vec![
            FSpec::identity(),
            FSpec::square(),
            FSpec::log(),
            FSpec::linear_plus_square(),
            FSpec::smoothed_log(Rho::default()),
        ]
    }
}

/// Cutoff equal to 1 on `[0, r1]`, 0 on `[r2, inf)`, and the quintic
/// smoothstep `1 - (6u^5 - 15u^4 + 10u^3)`, `u = (t - r1)/(r2 - r1)`, between;
/// twice continuously differentiable.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Rho {
    pub r1: f64,
    pub r2: f64,
}

impl Default for Rho {
    fn default() -> Self {
        Rho { r1: 0.25, r2: 1.0 }
    }
}

impl Rho {
    fn u(&self, t: f64) -> f64 {
        ((t - self.r1) / (self.r2 - self.r1)).clamp(0.0, 1.0)
    }

    pub fn value(&self, t: f64) -> f64 {
        let u = self.u(t);
        1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u)
    }

    pub fn d1(&self, t: f64) -> f64 {
        let u = self.u(t);
        -30.0 * u * u * (u - 1.0) * (u - 1.0) / (self.r2 - self.r1)
    }

    pub fn d2(&self, t: f64) -> f64 {
        let u = self.u(t);
        let w = self.r2 - self.r1;
        -60.0 * u * (2.0 * u - 1.0) * (u - 1.0) / (w * w)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PshReport {
    pub function: String,
    pub t0: f64,
    pub n: usize,
    pub eigenvalues: Vec<f64>,
    pub expected: Vec<f64>,
    pub max_relative_error: f64,
    pub kahler: bool,
}

/// A point of `C^n` with `|z|^2 = t0`, generic in direction.
fn point_with_norm_sqr(n: usize, t0: f64) -> Vec<C64> {
    let raw: Vec<C64> = (0..n).map(|j| C64::new(1.0 + j as f64, 0.5 - 0.3 * j as f64)).collect();
    let r: f64 = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    raw.iter().map(|x| x * (t0.sqrt() / r)).collect()
}

/// Eigenvalues of `[f' delta_jk + f'' conj(z_j) z_k]` at `|z|^2 = t0` against
/// `{f'(t0) (n-1 times), f'(t0) + t0 f''(t0)}`; Kahler iff both are positive.
pub fn psh_criterion(f: &FSpec, t0: f64, n: usize) -> Result<PshReport> {
    if !(t0 > 0.0) || n == 0 {
        return Err(Error::Precondition("need t0 > 0 and n >= 1".into()));
    }
    let z = point_with_norm_sqr(n, t0);
    let (d1, d2) = ((f.f1)(t0), (f.f2)(t0));
    let h = DMatrix::from_fn(n, n, |j, k| {
        let diag = if j == k { C64::new(d1, 0.0) } else { C64::new(0.0, 0.0) };
        diag + z[j].conj() * z[k] * d2
    });
    let mut eig: Vec<f64> = SymmetricEigen::new(h).eigenvalues.iter().copied().collect();
    eig.sort_by(f64::total_cmp);
    let mut expected = vec![d1; n - 1];
    expected.push(d1 + t0 * d2);
    expected.sort_by(f64::total_cmp);
    // relative to the size of the matrix entries, so cancelling eigenvalues stay meaningful
    let scale = d1.abs().max(t0 * d2.abs());
    let max_relative_error = if scale == 0.0 {
        eig.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    } else {
        eig.iter().zip(&expected).map(|(a, b)| (a - b).abs() / scale).fold(0.0, f64::max)
    };
    Ok(PshReport {
        function: f.name.clone(),
        t0,
        n,
        kahler: d1 > 0.0 && d1 + t0 * d2 > 0.0,
        eigenvalues: eig,
        expected,
        max_relative_error,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CutIdentityReport {
    /// `omega'(Xi, J' Xi)` evaluated directly.
    pub direct: f64,
    /// `|w|^2 Q / (Q + |w|^2)` with `Q = omega(xi, J xi)`.
    pub formula: f64,
    pub relative_error: f64,
    /// `|omega'(xi', Xi)|` and `|omega'(xi', J' Xi)|`.
    pub orthogonality: [f64; 2],
    /// Relative mismatch of `xi' _| omega' = -d Psi'` by finite differences.
    pub moment_residual: f64,
}

/// On `C^n x C` with the diagonal action (weight 1 on the extra factor) and
/// `Psi' = Psi + |w|^2/2`, the field
/// `Xi = (|w|^2 xi_M - Q xi_C) / (Q + |w|^2)` is `omega'`-orthogonal to the
/// diagonal generator and its `J'` image, and
/// `omega'(Xi, J' Xi) = |w|^2 Q / (Q + |w|^2)`.
pub fn cut_tameness_identity(action: &LinearAction, z: &[C64], w: C64, seed: u64) -> Result<CutIdentityReport> {
    action.check_len(z)?;
    if action.is_fixed(z) && w.norm_sqr() == 0.0 {
        return Err(Error::FixedPointInput);
    }
    let n = action.dim();
    let xi_m = action.generator(z);
    let q = flow_speed(action, z);
    let w2 = w.norm_sqr();
    let mut xi_full = xi_m.clone();
    xi_full.push(C64::i() * w);
    let mut big_xi: Vec<C64> = xi_m.iter().map(|x| x * (w2 / (q + w2))).collect();
    big_xi.push(C64::i() * w * (-q / (q + w2)));
    let direct = omega(&big_xi, &times_i(&big_xi));
    let formula = w2 * q / (q + w2);
    let relative_error = if formula == 0.0 { direct.abs() } else { (direct - formula).abs() / formula.abs() };
    let orthogonality = [omega(&xi_full, &big_xi).abs(), omega(&xi_full, &times_i(&big_xi)).abs()];

    let mut pt = z.to_vec();
    pt.push(w);
    let psi_prime = |p: &[C64]| moment_standard(action, &p[..n]) + 0.5 * p[n].norm_sqr();
    let mut r = rng(seed);
    let v: Vec<C64> = (0..=n).map(|_| random_disk(&mut r, 1.0)).collect();
    let along = |h: f64| {
        let p: Vec<C64> = pt.iter().zip(&v).map(|(a, b)| a + b * h).collect();
        psi_prime(&p)
    };
    let (dpsi, _) = richardson_central(along, 1e-3);
    let contraction = omega(&xi_full, &v);
    let scale = dpsi.abs().max(contraction.abs()).max(1e-300);
    Ok(CutIdentityReport {
        direct,
        formula,
        relative_error,
        orthogonality,
        moment_residual: (contraction + dpsi).abs() / scale,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct PotentialReport {
    /// `Phi(z) = sum a_j |z_j|^2 f'(|z|^2)`.
    pub phi: f64,
    /// `sum a_j |z_j|^2 / (2 pi |z|^2)` where the cutoff is 1.
    pub phi_exceptional: Option<f64>,
    /// Worst mismatch of `eta(xi, v) = -d Phi(v)` over a real basis, relative
    /// to `max(|d Phi|, |eta| |xi|)`.
    pub contraction_residual: f64,
    /// Richardson self-check spread of the Hessian entries.
    pub richardson_spread: f64,
}

/// `Phi` for `f = rho(t) ln t / 2 pi`.
pub fn blowup_moment(action: &LinearAction, rho: Rho, z: &[C64]) -> f64 {
    let f = FSpec::smoothed_log(rho);
    let t: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    action.weights.iter().zip(z).map(|(&a, zj)| a as f64 * zj.norm_sqr()).sum::<f64>() * (f.f1)(t)
}

fn real_coords(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|x| [x.re, x.im]).collect()
}

fn from_real(x: &[f64]) -> Vec<C64> {
    x.chunks(2).map(|c| C64::new(c[0], c[1])).collect()
}

/// Checks `xi _| i d dbar f(|z|^2) = -d Phi` at `z` with finite differences:
/// second differences for the complex Hessian of the potential, first
/// differences for `Phi`, both Richardson-extrapolated.
pub fn blowup_potential_check(action: &LinearAction, rho: Rho, z: &[C64], h: f64) -> Result<PotentialReport> {
    action.check_len(z)?;
    let t: f64 = z.iter().map(|x| x.norm_sqr()).sum();
    if t == 0.0 {
        return Err(Error::Precondition("the potential is singular at 0".into()));
    }
    if !(h > 0.0) {
        return Err(Error::Precondition("step must be positive".into()));
    }
    let n = action.dim();
    let f = FSpec::smoothed_log(rho);
    let pot = |x: &[f64]| (f.f)(x.chunks(2).map(|c| c[0] * c[0] + c[1] * c[1]).sum::<f64>());
    let x0 = real_coords(z);
    let m = 2 * n;
    let second = |a: usize, b: usize, h: f64| {
        let ev = |sa: f64, sb: f64| {
            let mut x = x0.clone();
            x[a] += sa * h;
            x[b] += sb * h;
            pot(&x)
        };
        if a == b {
            (ev(1.0, 0.0) - 2.0 * pot(&x0) + ev(-1.0, 0.0)) / (h * h)
        } else {
            (ev(1.0, 1.0) - ev(1.0, -1.0) - ev(-1.0, 1.0) + ev(-1.0, -1.0)) / (4.0 * h * h)
        }
    };
    let rich = |a: usize, b: usize, h: f64| (4.0 * second(a, b, h / 2.0) - second(a, b, h)) / 3.0;
    let mut hess = vec![vec![0.0; m]; m];
    let mut spread = 0.0f64;
    let mut scale = 0.0f64;
    for a in 0..m {
        for b in a..m {
            let r1 = rich(a, b, h);
            let r2 = rich(a, b, h / 2.0);
            spread = spread.max((r1 - r2).abs());
            scale = scale.max(r2.abs());
            hess[a][b] = r2;
            hess[b][a] = r2;
        }
    }
    let spread = spread / scale.max(f64::MIN_POSITIVE);
    if spread > 1e-6 {
        return Err(Error::StepTooLarge(format!("h = {h}: Richardson estimates differ by {spread:e} (relative)")));
    }
    // d^2/dz_j dzbar_k = 1/4 (F_xx + F_yy) + i/4 (F_{x_j y_k} - F_{y_j x_k})
    let cplx = |j: usize, k: usize| {
        let (xj, yj, xk, yk) = (2 * j, 2 * j + 1, 2 * k, 2 * k + 1);
        C64::new(
            0.25 * (hess[xj][xk] + hess[yj][yk]),
            0.25 * (hess[xj][yk] - hess[yj][xk]),
        )
    };
    let eta = |u: &[C64], v: &[C64]| {
        let mut s = C64::new(0.0, 0.0);
        for j in 0..n {
            for k in 0..n {
                s += cplx(j, k) * u[j] * v[k].conj();
            }
        }
        -2.0 * s.im
    };
    let phi_at = |x: &[f64]| blowup_moment(action, rho, &from_real(x));
    let xi = action.generator(z);
    let mut worst = 0.0f64;
    let mut dphi_norm = 0.0f64;
    let mut pairs = Vec::new();
    for a in 0..m {
        let mut e = vec![C64::new(0.0, 0.0); n];
        e[a / 2] = if a % 2 == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 1.0) };
        let (dphi, _) = richardson_central(
            |s| {
                let mut x = x0.clone();
                x[a] += s;
                phi_at(&x)
            },
            h,
        );
        dphi_norm = dphi_norm.max(dphi.abs());
        pairs.push((eta(&xi, &e), dphi));
    }
    for (c, d) in &pairs {
        worst = worst.max((c + d).abs());
    }
    // relative to the size of the contracted terms; dPhi alone can vanish (equal weights)
    let xi_norm = flow_speed(action, z).sqrt();
    let contraction_residual = worst / dphi_norm.max(scale * xi_norm).max(1e-300);
    let phi = blowup_moment(action, rho, z);
    let phi_exceptional = (t <= rho.r1).then(|| {
        action.weights.iter().zip(z).map(|(&a, zj)| a as f64 * zj.norm_sqr()).sum::<f64>() / (2.0 * PI * t)
    });
    Ok(PotentialReport { phi, phi_exceptional, contraction_residual, richardson_spread: spread })
}

/// Summary of a randomized battery.
#[derive(Clone, Debug, Serialize)]
pub struct BatteryReport {
    pub check: String,
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failed: usize,
    pub tolerance: f64,
    pub worst_residual: f64,
}

impl BatteryReport {
    fn new(check: &str, seed: u64, tolerance: f64) -> Self {
        BatteryReport { check: check.into(), seed, trials: 0, passed: 0, failed: 0, tolerance, worst_residual: 0.0 }
    }

    fn record(&mut self, ok: bool, residual: f64) {
        self.trials += 1;
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        if residual.is_nan() {
            self.worst_residual = f64::NAN;
        } else {
            self.worst_residual = self.worst_residual.max(residual);
        }
    }

    pub fn ok(&self) -> bool {
        self.failed == 0 && self.trials > 0
    }
}

fn random_weights(rng: &mut ChaCha8Rng, allow_zero: bool) -> Vec<i64> {
    let n = rng.random_range(1..=4);
    (0..n)
        .map(|_| loop {
            let a = rng.random_range(-3..=3);
            if allow_zero || a != 0 {
                break a;
            }
        })
        .collect()
}

fn random_point(rng: &mut ChaCha8Rng, action: &LinearAction) -> Vec<C64> {
    loop {
        let z: Vec<C64> = (0..action.dim()).map(|_| random_disk(rng, 1.0)).collect();
        if !action.is_fixed(&z) {
            return z;
        }
    }
}

/// Uses `fixed` weights when given, random weights otherwise.
fn pick_action(rng: &mut ChaCha8Rng, fixed: Option<&LinearAction>, allow_zero: bool) -> LinearAction {
    match fixed {
        Some(a) => a.clone(),
        None => loop {
            let w = random_weights(rng, allow_zero);
            if w.iter().any(|&a| a != 0) {
                break LinearAction { weights: w };
            }
        },
    }
}

pub fn monotone_battery(fixed: Option<&LinearAction>, trials: usize, seed: u64, tol: f64) -> Result<BatteryReport> {
    let mut rng = rng(seed);
    let mut rep = BatteryReport::new("monotone", seed, tol);
    let grid: Vec<f64> = (0..1000).map(|k| -2.0 + 4.0 * k as f64 / 999.0).collect();
    for _ in 0..trials {
        let action = pick_action(&mut rng, fixed, true);
        let z = random_point(&mut rng, &action);
        let v = check_monotone(&action, &z, &grid)?;
        rep.record(v.increasing && v.relative_error <= tol, v.relative_error);
    }
    Ok(rep)
}

/// Solver/membership agreement, residual of the solved level, and
/// independence of the bracketing seed.
pub fn solve_battery(fixed: Option<&LinearAction>, trials: usize, seed: u64, tol: f64) -> Result<BatteryReport> {
    let mut rng = rng(seed);
    let mut rep = BatteryReport::new("solve-membership", seed, tol);
    for _ in 0..trials {
        let action = pick_action(&mut rng, fixed, true);
        let mut z = random_point(&mut rng, &action);
        match rng.random_range(0..4) {
            1 => action.positive().iter().for_each(|&j| z[j] = C64::new(0.0, 0.0)),
            2 => action.negative().iter().for_each(|&j| z[j] = C64::new(0.0, 0.0)),
            _ => {}
        }
        if action.is_fixed(&z) {
            z = random_point(&mut rng, &action);
        }
        let s = if rng.random_range(0..8) == 0 { 0.0 } else { rng.random_range(-2.0..2.0) };
        let member = level_membership(&action, &z, s)?;
        let t1 = solve_time_to_level_from(&action, &z, s, -3.0)?;
        let t2 = solve_time_to_level_from(&action, &z, s, 3.0)?;
        let (ok, res) = match (t1, t2) {
            (Some(a), Some(b)) => {
                let level = (psi_along(&action, &z, a) - s).abs() / s.abs().max(1.0);
                let same = (a - b).abs();
                (member && level <= 1e-12 && same <= tol, same.max(level))
            }
            (None, None) => (!member, 0.0),
            _ => (false, f64::INFINITY),
        };
        rep.record(ok, res);
    }
    Ok(rep)
}

/// `N_+(e^t z) = e^t N_+(z)`, `N_-(e^t z) = e^-t N_-(z)` and invariance of
/// the product.
pub fn npm_battery(fixed: Option<&LinearAction>, trials: usize, seed: u64, tol: f64) -> Result<BatteryReport> {
    let mut rng = rng(seed);
    let mut rep = BatteryReport::new("n-scaling", seed, tol);
    for _ in 0..trials {
        let action = pick_action(&mut rng, fixed, true);
        let z = random_point(&mut rng, &action);
        let t = rng.random_range(-2.0..2.0);
        let (m0, p0) = n_pm(&action, &z)?;
        let (m1, p1) = n_pm(&action, &flow(&action, &z, t)?.z)?;
        let rel = |got: f64, want: f64| if want == 0.0 { got.abs() } else { (got - want).abs() / want.abs() };
        let r = rel(p1, t.exp() * p0).max(rel(m1, (-t).exp() * m0)).max(rel(m1 * p1, m0 * p0));
        rep.record(r <= tol, r);
    }
    Ok(rep)
}

pub fn psh_battery(trials: usize, seed: u64, tol: f64) -> Result<BatteryReport> {
    let mut rng = rng(seed);
    let family = FSpec::family();
    let mut rep = BatteryReport::new("psh-eigenvalues", seed, tol);
    for _ in 0..trials {
        let f = &family[rng.random_range(0..family.len())];
        let t0 = rng.random_range(0.05..3.0);
        let n = rng.random_range(1..=4);
        let r = psh_criterion(f, t0, n)?;
        rep.record(r.max_relative_error <= tol, r.max_relative_error);
    }
    Ok(rep)
}

pub fn cut_battery(fixed: Option<&LinearAction>, trials: usize, seed: u64, tol: f64) -> Result<BatteryReport> {
    let mut rng = rng(seed);
    let mut rep = BatteryReport::new("cut-identity", seed, tol);
    for k in 0..trials {
        let action = pick_action(&mut rng, fixed, true);
        let z = random_point(&mut rng, &action);
        let w = random_disk(&mut rng, 1.5);
        let r = cut_tameness_identity(&action, &z, w, seed.wrapping_add(k as u64))?;
        let worst = r.relative_error.max(r.orthogonality[0]).max(r.orthogonality[1]);
        rep.record(worst <= tol && r.moment_residual <= 1e-7, worst);
    }
    Ok(rep)
}

pub fn blowup_potential_battery(
    fixed: Option<&LinearAction>,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<BatteryReport> {
    let mut rng = rng(seed);
    let rho = Rho::default();
    let mut rep = BatteryReport::new("blowup-potential", seed, tol);
    for _ in 0..trials {
        let action = pick_action(&mut rng, fixed, false);
        // |z|^2 in (0.05, 0.9): both the flat zone and the cutoff's ramp
        let target = rng.random_range(0.05..0.9f64);
        let raw = random_point(&mut rng, &action);
        let r: f64 = raw.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
        let z: Vec<C64> = raw.iter().map(|x| x * (target.sqrt() / r)).collect();
        // near the ends of the cutoff ramp only C^2 holds, so shrink the stencil
        let mut h = 1e-3;
        let p = loop {
            match blowup_potential_check(&action, rho, &z, h) {
                Err(Error::StepTooLarge(_)) if h > 1e-5 => h /= 4.0,
                other => break other?,
            }
        };
        let mut res = p.contraction_residual;
        if let Some(e) = p.phi_exceptional {
            res = res.max((e - p.phi).abs() / e.abs().max(1e-12));
        }
        rep.record(res <= tol, res);
    }
    Ok(rep)
}
