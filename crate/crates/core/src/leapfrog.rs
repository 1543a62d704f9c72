//! Leapfrog integration of `f' = -A* g`, `g' = A f` for an operator `A` and its
//! adjoint `A*` in weighted inner products on the spaces `X` and `Y`.
//!
//! `f` sits on integer time levels and `g` on half levels. Each step updates `f`
//! with the old `g`, then `g` with the new `f`. The scheme conserves
//!
//! ```text
//! C_n    = |f_n|^2 + |gbar_n|^2 - (dt/2)^2 |A f_n|^2,     gbar_n = (g_{n+1/2} + g_{n-1/2}) / 2
//! C_half = |fbar|^2 + |g_{n+1/2}|^2 - (dt/2)^2 |A* g_{n+1/2}|^2,  fbar = (f_{n+1} + f_n) / 2
//! ```
//!
//! and both are positive definite whenever `dt |A| < 2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, shape, Result};

/// Minimal vector-space interface the integrator needs.
pub trait Vector: Clone {
    /// `self += alpha * x`
    fn axpy(&mut self, alpha: f64, x: &Self);
    fn scale(&mut self, alpha: f64);
    fn zeros_like(&self) -> Self;
    /// Total number of scalar entries, used for compatibility checks.
    fn dim(&self) -> usize;
}

impl Vector for f64 {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        *self += alpha * x;
    }
    fn scale(&mut self, alpha: f64) {
        *self *= alpha;
    }
    fn zeros_like(&self) -> Self {
        0.0
    }
    fn dim(&self) -> usize {
        1
    }
}

impl Vector for Vec<f64> {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        assert_eq!(self.len(), x.len(), "axpy length mismatch");
        for (a, b) in self.iter_mut().zip(x) {
            *a += alpha * b;
        }
    }
    fn scale(&mut self, alpha: f64) {
        self.iter_mut().for_each(|a| *a *= alpha);
    }
    fn zeros_like(&self) -> Self {
        vec![0.0; self.len()]
    }
    fn dim(&self) -> usize {
        self.len()
    }
}

impl<D: ndarray::Dimension> Vector for ndarray::Array<f64, D> {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        self.scaled_add(alpha, x);
    }
    fn scale(&mut self, alpha: f64) {
        self.mapv_inplace(|a| a * alpha);
    }
    fn zeros_like(&self) -> Self {
        Self::zeros(self.raw_dim())
    }
    fn dim(&self) -> usize {
        self.len()
    }
}

impl<A: Vector, B: Vector> Vector for (A, B) {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        self.0.axpy(alpha, &x.0);
        self.1.axpy(alpha, &x.1);
    }
    fn scale(&mut self, alpha: f64) {
        self.0.scale(alpha);
        self.1.scale(alpha);
    }
    fn zeros_like(&self) -> Self {
        (self.0.zeros_like(), self.1.zeros_like())
    }
    fn dim(&self) -> usize {
        self.0.dim() + self.1.dim()
    }
}

/// An operator `A: X -> Y` together with its adjoint and the two inner products
/// in which the adjointness holds.
pub trait AdjointPair {
    type X: Vector;
    type Y: Vector;

    fn apply_a(&self, f: &Self::X) -> Self::Y;
    fn apply_a_star(&self, g: &Self::Y) -> Self::X;
    fn inner_x(&self, a: &Self::X, b: &Self::X) -> f64;
    fn inner_y(&self, a: &Self::Y, b: &Self::Y) -> f64;

    /// Structural check that `f` belongs to `X`.
    fn check_x(&self, _f: &Self::X) -> Result<()> {
        Ok(())
    }
    /// Structural check that `g` belongs to `Y`.
    fn check_y(&self, _g: &Self::Y) -> Result<()> {
        Ok(())
    }
    /// Analytic upper bound on the operator norm of `A` (equal to that of `A*`).
    fn norm_bound(&self) -> Option<f64> {
        None
    }

    fn norm_x(&self, f: &Self::X) -> f64 {
        self.inner_x(f, f).max(0.0).sqrt()
    }
    fn norm_y(&self, g: &Self::Y) -> f64 {
        self.inner_y(g, g).max(0.0).sqrt()
    }
}

/// Choice of second order start for `g_{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TaylorVariant {
    /// `g0 + (dt/2) A f0 - (1/2)(dt/2)^2 A A* g0`; reduces to the oscillator start.
    #[default]
    Oscillator,
    /// `g0 + (dt/2) A f0 - (dt^2/2) A A* g0`.
    System,
}

impl std::str::FromStr for TaylorVariant {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "oscillator-taylor" | "oscillator" => Ok(Self::Oscillator),
            "system-taylor" | "system" => Ok(Self::System),
            other => Err(invalid("taylor", format!("unknown variant `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SystemState<X, Y> {
    /// `f` at level `n`.
    pub f: X,
    /// `g` at `n + 1/2`.
    pub g_half: Y,
    /// `g` at `n - 1/2`.
    pub g_prev_half: Y,
    pub step: usize,
    pub dt: f64,
}

impl<X, Y> SystemState<X, Y> {
    pub fn time(&self) -> f64 {
        self.step as f64 * self.dt
    }
}

pub fn init_g_half<P: AdjointPair>(
    ops: &P,
    f0: &P::X,
    g0: &P::Y,
    dt: f64,
    variant: TaylorVariant,
) -> P::Y {
    let mut g = g0.clone();
    g.axpy(0.5 * dt, &ops.apply_a(f0));
    let aas = ops.apply_a(&ops.apply_a_star(g0));
    let coef = match variant {
        TaylorVariant::Oscillator => -0.5 * (0.5 * dt) * (0.5 * dt),
        TaylorVariant::System => -0.5 * dt * dt,
    };
    g.axpy(coef, &aas);
    g
}

/// Builds the level-0 state from `f0` and an already computed `g_{1/2}`.
pub fn state_from_half<P: AdjointPair>(
    ops: &P,
    f0: P::X,
    g_half: P::Y,
    dt: f64,
) -> Result<SystemState<P::X, P::Y>> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
    }
    ops.check_x(&f0)?;
    ops.check_y(&g_half)?;
    // The value one step earlier that the scheme itself would have produced.
    let mut g_prev_half = g_half.clone();
    g_prev_half.axpy(-dt, &ops.apply_a(&f0));
    Ok(SystemState {
        f: f0,
        g_half,
        g_prev_half,
        step: 0,
        dt,
    })
}

/// Builds the level-0 state from `f0`, `g0` with a Taylor start.
pub fn init_state<P: AdjointPair>(
    ops: &P,
    f0: P::X,
    g0: &P::Y,
    dt: f64,
    variant: TaylorVariant,
) -> Result<SystemState<P::X, P::Y>> {
    ops.check_x(&f0)?;
    ops.check_y(g0)?;
    let g_half = init_g_half(ops, &f0, g0, dt, variant);
    state_from_half(ops, f0, g_half, dt)
}

/// Advances the state by one step in place.
pub fn system_step<P: AdjointPair>(state: &mut SystemState<P::X, P::Y>, ops: &P) -> Result<()> {
    ops.check_x(&state.f)?;
    ops.check_y(&state.g_half)?;
    let dt = state.dt;
    state.f.axpy(-dt, &ops.apply_a_star(&state.g_half));
    let mut g_next = state.g_half.clone();
    g_next.axpy(dt, &ops.apply_a(&state.f));
    state.g_prev_half = std::mem::replace(&mut state.g_half, g_next);
    state.step += 1;
    Ok(())
}

/// Pure form of [`system_step`].
pub fn stepped<P: AdjointPair>(
    state: &SystemState<P::X, P::Y>,
    ops: &P,
) -> Result<SystemState<P::X, P::Y>> {
    let mut next = state.clone();
    system_step(&mut next, ops)?;
    Ok(next)
}

/// The three terms of the integer-level quantity: `|f|^2`, `|gbar|^2`, `(dt/2)^2 |A f|^2`.
pub fn terms_full<P: AdjointPair>(state: &SystemState<P::X, P::Y>, ops: &P) -> [f64; 3] {
    let mut gbar = state.g_half.clone();
    gbar.axpy(1.0, &state.g_prev_half);
    gbar.scale(0.5);
    let af = ops.apply_a(&state.f);
    let h = 0.5 * state.dt;
    [
        ops.inner_x(&state.f, &state.f),
        ops.inner_y(&gbar, &gbar),
        h * h * ops.inner_y(&af, &af),
    ]
}

/// The three terms of the half-level quantity: `|fbar|^2`, `|g|^2`, `(dt/2)^2 |A* g|^2`.
pub fn terms_half<P: AdjointPair>(state: &SystemState<P::X, P::Y>, ops: &P) -> [f64; 3] {
    let asg = ops.apply_a_star(&state.g_half);
    let mut fbar = state.f.clone();
    fbar.axpy(-0.5 * state.dt, &asg);
    let h = 0.5 * state.dt;
    [
        ops.inner_x(&fbar, &fbar),
        ops.inner_y(&state.g_half, &state.g_half),
        h * h * ops.inner_x(&asg, &asg),
    ]
}

pub fn conserved_full<P: AdjointPair>(state: &SystemState<P::X, P::Y>, ops: &P) -> f64 {
    let [a, b, c] = terms_full(state, ops);
    a + b - c
}

pub fn conserved_half_step<P: AdjointPair>(state: &SystemState<P::X, P::Y>, ops: &P) -> f64 {
    let [a, b, c] = terms_half(state, ops);
    a + b - c
}

/// One row of a conservation time series.
#[derive(Debug, Clone, PartialEq)]
pub struct ConservationRecord {
    pub step: usize,
    pub t: f64,
    pub c_n: f64,
    pub c_half: f64,
    /// Terms of `c_n`: `|f|^2`, `|gbar|^2` and the subtracted `(dt/2)^2 |A f|^2`.
    pub terms: [f64; 3],
    /// Optional extra audits (divergence norms and the like).
    pub audits: Vec<f64>,
}

impl ConservationRecord {
    pub fn capture<P: AdjointPair>(state: &SystemState<P::X, P::Y>, ops: &P) -> Self {
        let terms = terms_full(state, ops);
        Self {
            step: state.step,
            t: state.time(),
            c_n: terms[0] + terms[1] - terms[2],
            c_half: conserved_half_step(state, ops),
            terms,
            audits: Vec::new(),
        }
    }
}

/// Largest relative drift of `c_n` and of `c_half` over a series.
pub fn series_drift(series: &[ConservationRecord]) -> (f64, f64) {
    let n: Vec<f64> = series.iter().map(|r| r.c_n).collect();
    let h: Vec<f64> = series.iter().map(|r| r.c_half).collect();
    (relative_drift(&n), relative_drift(&h))
}

/// `max |c_k - c_0| / |c_0|`, or the absolute drift when `c_0` vanishes.
pub fn relative_drift(series: &[f64]) -> f64 {
    let Some(&c0) = series.first() else {
        return 0.0;
    };
    let scale = if c0 != 0.0 { c0.abs() } else { 1.0 };
    series
        .iter()
        .map(|c| (c - c0).abs() / scale)
        .fold(0.0, f64::max)
}

/// A run's conservation history.
#[derive(Debug, Clone)]
pub struct History {
    pub series: Vec<ConservationRecord>,
}

impl History {
    pub fn drift(&self) -> (f64, f64) {
        series_drift(&self.series)
    }

    /// Largest change of audit `k` from its first value, divided by `scale`.
    pub fn audit_drift(&self, k: usize, scale: f64) -> f64 {
        let Some(first) = self.series.first().and_then(|r| r.audits.get(k)) else {
            return 0.0;
        };
        self.series
            .iter()
            .filter_map(|r| r.audits.get(k))
            .map(|a| (a - first).abs() / scale)
            .fold(0.0, f64::max)
    }
}

/// Takes `steps` steps, recording every `record_every` steps (and the first
/// and last), with `audit` evaluated on each recorded state.
pub fn advance<P, F>(
    state: &mut SystemState<P::X, P::Y>,
    ops: &P,
    steps: usize,
    record_every: usize,
    audit: F,
) -> Result<History>
where
    P: AdjointPair,
    F: Fn(&SystemState<P::X, P::Y>) -> Vec<f64>,
{
    let every = record_every.max(1);
    let record = |s: &SystemState<P::X, P::Y>| {
        let mut r = ConservationRecord::capture(s, ops);
        r.audits = audit(s);
        r
    };
    let mut series = vec![record(state)];
    for k in 1..=steps {
        system_step(state, ops)?;
        if k % every == 0 || k == steps {
            series.push(record(state));
        }
    }
    Ok(History { series })
}

/// Lower bound `(1 - (dt/2)^2 N^2) |f|^2 + |gbar|^2` on the integer-level
/// quantity, where `N` bounds `|A|`.
pub fn lower_bound_full<P: AdjointPair>(
    state: &SystemState<P::X, P::Y>,
    ops: &P,
    norm_bound: f64,
) -> f64 {
    let [ff, gg, _] = terms_full(state, ops);
    let h = 0.5 * state.dt * norm_bound;
    (1.0 - h * h) * ff + gg
}

/// Largest stable step for a given operator norm bound.
pub fn cfl_limit(norm_bound: f64) -> f64 {
    2.0 / norm_bound
}

/// Relative residual of `f_{n+1} - 2 f_n + f_{n-1} = -dt^2 A* A f_n`.
pub fn second_difference_residual<P: AdjointPair>(
    ops: &P,
    f_prev: &P::X,
    f: &P::X,
    f_next: &P::X,
    dt: f64,
) -> f64 {
    let mut lhs = f_next.clone();
    lhs.axpy(-2.0, f);
    lhs.axpy(1.0, f_prev);
    let rhs = ops.apply_a_star(&ops.apply_a(f));
    let scale = dt * dt * ops.norm_x(&rhs) + ops.norm_x(f);
    lhs.axpy(dt * dt, &rhs);
    ops.norm_x(&lhs) / scale.max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointReport {
    pub trials: usize,
    /// Largest `|<A f, g>_Y - <f, A* g>_X|` normalised by `|A f| |g| + |f| |A* g|`.
    pub max_residual: f64,
}

/// Random trials of the adjoint identity `<A f, g>_Y = <f, A* g>_X`.
pub fn check_adjointness<P, GX, GY>(
    ops: &P,
    trials: usize,
    seed: u64,
    mut gen_x: GX,
    mut gen_y: GY,
) -> AdjointReport
where
    P: AdjointPair,
    GX: FnMut(&mut ChaCha8Rng) -> P::X,
    GY: FnMut(&mut ChaCha8Rng) -> P::Y,
{
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..trials {
        let f = gen_x(&mut rng);
        let g = gen_y(&mut rng);
        let af = ops.apply_a(&f);
        let asg = ops.apply_a_star(&g);
        let lhs = ops.inner_y(&af, &g);
        let rhs = ops.inner_x(&f, &asg);
        let scale = ops.norm_y(&af) * ops.norm_y(&g) + ops.norm_x(&f) * ops.norm_x(&asg);
        let r = if scale > 0.0 {
            (lhs - rhs).abs() / scale
        } else {
            0.0
        };
        worst = worst.max(r);
    }
    AdjointReport {
        trials,
        max_residual: worst,
    }
}

/// Power-iteration estimate of `|A|` from the dominant eigenvalue of `A* A`.
/// Diagnostic only; step sizes use the analytic bound.
pub fn power_iteration_norm<P: AdjointPair>(ops: &P, start: &P::X, iterations: usize) -> f64 {
    let mut x = start.clone();
    let n0 = ops.norm_x(&x);
    if n0 == 0.0 {
        return 0.0;
    }
    x.scale(1.0 / n0);
    let mut lambda = 0.0;
    for _ in 0..iterations {
        let y = ops.apply_a_star(&ops.apply_a(&x));
        lambda = ops.inner_x(&x, &y);
        let ny = ops.norm_x(&y);
        if ny == 0.0 {
            return 0.0;
        }
        x = y;
        x.scale(1.0 / ny);
    }
    lambda.max(0.0).sqrt()
}

/// `A f = w f` on the real line; the leapfrog system is then the oscillator.
#[derive(Debug, Clone, Copy)]
pub struct ScalarPair {
    pub omega: f64,
}

impl AdjointPair for ScalarPair {
    type X = f64;
    type Y = f64;
    fn apply_a(&self, f: &f64) -> f64 {
        self.omega * f
    }
    fn apply_a_star(&self, g: &f64) -> f64 {
        self.omega * g
    }
    fn inner_x(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn inner_y(&self, a: &f64, b: &f64) -> f64 {
        a * b
    }
    fn norm_bound(&self) -> Option<f64> {
        Some(self.omega.abs())
    }
}

/// Dense `A` (row major, `m x n`) between `R^n` and `R^m` with diagonal weights.
/// The adjoint is `Wx^{-1} A^T Wy`.
#[derive(Debug, Clone)]
pub struct DensePair {
    rows: usize,
    cols: usize,
    a: Vec<f64>,
    wx: Vec<f64>,
    wy: Vec<f64>,
}

impl DensePair {
    pub fn new(rows: usize, cols: usize, a: Vec<f64>, wx: Vec<f64>, wy: Vec<f64>) -> Result<Self> {
        if a.len() != rows * cols {
            return Err(shape("dense operator", rows * cols, a.len()));
        }
        if wx.len() != cols {
            return Err(shape("X weights", cols, wx.len()));
        }
        if wy.len() != rows {
            return Err(shape("Y weights", rows, wy.len()));
        }
        if wx.iter().chain(&wy).any(|w| !(*w > 0.0)) {
            return Err(invalid("weights", "must be strictly positive"));
        }
        Ok(Self {
            rows,
            cols,
            a,
            wx,
            wy,
        })
    }

    /// Unit weights.
    pub fn euclidean(rows: usize, cols: usize, a: Vec<f64>) -> Result<Self> {
        Self::new(rows, cols, a, vec![1.0; cols], vec![1.0; rows])
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Frobenius norm of `Wy^{1/2} A Wx^{-1/2}`, an upper bound on `|A|`.
    pub fn frobenius_bound(&self) -> f64 {
        let mut s = 0.0;
        for i in 0..self.rows {
            for j in 0..self.cols {
                let v = self.a[i * self.cols + j];
                s += v * v * self.wy[i] / self.wx[j];
            }
        }
        s.sqrt()
    }
}

impl AdjointPair for DensePair {
    type X = Vec<f64>;
    type Y = Vec<f64>;

    fn apply_a(&self, f: &Vec<f64>) -> Vec<f64> {
        (0..self.rows)
            .map(|i| {
                let row = &self.a[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(f).map(|(a, b)| a * b).sum()
            })
            .collect()
    }

    fn apply_a_star(&self, g: &Vec<f64>) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            let wg = self.wy[i] * g[i];
            for (j, o) in out.iter_mut().enumerate() {
                *o += self.a[i * self.cols + j] * wg;
            }
        }
        for (o, w) in out.iter_mut().zip(&self.wx) {
            *o /= w;
        }
        out
    }

    fn inner_x(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.wx)
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    fn inner_y(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter()
            .zip(b)
            .zip(&self.wy)
            .map(|((a, b), w)| w * a * b)
            .sum()
    }

    fn check_x(&self, f: &Vec<f64>) -> Result<()> {
        if f.len() != self.cols {
            return Err(shape("X vector", self.cols, f.len()));
        }
        Ok(())
    }

    fn check_y(&self, g: &Vec<f64>) -> Result<()> {
        if g.len() != self.rows {
            return Err(shape("Y vector", self.rows, g.len()));
        }
        Ok(())
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(self.frobenius_bound())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oscillator::{self, InitMode, OscParams};
    use rand::Rng;

    fn random_pair(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DensePair {
        let a = (0..m * n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let wx = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        let wy = (0..m).map(|_| rng.gen_range(0.5..2.0)).collect();
        DensePair::new(m, n, a, wx, wy).unwrap()
    }

    fn rand_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
        (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
    }

    #[test]
    fn scalar_pair_reproduces_oscillator() {
        let (w, dt) = (1.0, 0.01);
        let ops = ScalarPair { omega: w };
        let p = OscParams::new(w, dt, 0).unwrap();
        let mut s = init_state(&ops, 1.0, &0.0, dt, TaylorVariant::Oscillator).unwrap();
        let mut o = oscillator::initial_state(1.0, 0.0, &p, InitMode::Taylor);
        assert_eq!(s.g_half, o.v_half);
        for _ in 0..500 {
            system_step(&mut s, &ops).unwrap();
            o = oscillator::leapfrog_step(&o, &p);
            assert_eq!(s.f, o.u);
            assert_eq!(s.g_half, o.v_half);
            let c = conserved_full(&s, &ops);
            assert!((c - 2.0 * oscillator::conserved_n(&o, &p)).abs() < 1e-15);
            let ch = conserved_half_step(&s, &ops);
            assert!((ch - 2.0 * oscillator::conserved_half_of(&o, &p)).abs() < 1e-15);
        }
    }

    #[test]
    fn dense_pair_is_adjoint() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let ops = random_pair(&mut rng, 5, 7);
        let rep = check_adjointness(&ops, 100, 11, |r| rand_vec(r, 7), |r| rand_vec(r, 5));
        assert!(rep.max_residual < 1e-14, "{rep:?}");
    }

    #[test]
    fn dense_system_conserves_both() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let ops = random_pair(&mut rng, 4, 6);
        let dt = 0.9 * cfl_limit(ops.frobenius_bound());
        let f0 = rand_vec(&mut rng, 6);
        let g0 = rand_vec(&mut rng, 4);
        for variant in [TaylorVariant::Oscillator, TaylorVariant::System] {
            let mut s = init_state(&ops, f0.clone(), &g0, dt, variant).unwrap();
            let c0 = conserved_full(&s, &ops);
            let h0 = conserved_half_step(&s, &ops);
            assert!(c0 > 0.0 && h0 > 0.0);
            for _ in 0..2000 {
                system_step(&mut s, &ops).unwrap();
                assert!((conserved_full(&s, &ops) - c0).abs() <= 1e-12 * c0);
                assert!((conserved_half_step(&s, &ops) - h0).abs() <= 1e-12 * h0);
            }
        }
    }

    #[test]
    fn lower_bound_holds_and_is_positive_below_cfl() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let ops = random_pair(&mut rng, 3, 3);
        let nb = ops.frobenius_bound();
        let dt = 0.95 * cfl_limit(nb);
        let mut s = init_state(
            &ops,
            rand_vec(&mut rng, 3),
            &rand_vec(&mut rng, 3),
            dt,
            TaylorVariant::System,
        )
        .unwrap();
        for _ in 0..100 {
            let lb = lower_bound_full(&s, &ops, nb);
            assert!(lb > 0.0);
            assert!(conserved_full(&s, &ops) >= lb - 1e-12);
            system_step(&mut s, &ops).unwrap();
        }
    }

    #[test]
    fn second_difference_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ops = random_pair(&mut rng, 4, 5);
        let dt = 0.5 * cfl_limit(ops.frobenius_bound());
        let mut s = init_state(
            &ops,
            rand_vec(&mut rng, 5),
            &rand_vec(&mut rng, 4),
            dt,
            TaylorVariant::Oscillator,
        )
        .unwrap();
        let mut hist = vec![s.f.clone()];
        for _ in 0..20 {
            system_step(&mut s, &ops).unwrap();
            hist.push(s.f.clone());
        }
        for w in hist.windows(3) {
            let r = second_difference_residual(&ops, &w[0], &w[1], &w[2], dt);
            assert!(r < 1e-13, "{r}");
        }
    }

    #[test]
    fn taylor_variants_differ_by_expected_term() {
        let ops = ScalarPair { omega: 2.0 };
        let dt = 0.1;
        let a = init_g_half(&ops, &1.0, &1.0, dt, TaylorVariant::Oscillator);
        let b = init_g_half(&ops, &1.0, &1.0, dt, TaylorVariant::System);
        // 1 + 0.05*2 - 0.5*0.0025*4 = 1.095 ; 1 + 0.1 - 0.005*4 = 1.08
        assert!((a - 1.095).abs() < 1e-15);
        assert!((b - 1.08).abs() < 1e-15);
        assert_eq!(
            "system-taylor".parse::<TaylorVariant>().unwrap(),
            TaylorVariant::System
        );
        assert!("bogus".parse::<TaylorVariant>().is_err());
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let ops = DensePair::euclidean(2, 3, vec![1.0; 6]).unwrap();
        assert!(init_state(
            &ops,
            vec![0.0; 2],
            &vec![0.0; 2],
            0.1,
            TaylorVariant::Oscillator
        )
        .is_err());
        let mut s = init_state(
            &ops,
            vec![0.0; 3],
            &vec![0.0; 2],
            0.1,
            TaylorVariant::Oscillator,
        )
        .unwrap();
        s.g_half.push(1.0);
        assert!(system_step(&mut s, &ops).is_err());
        assert!(DensePair::euclidean(2, 3, vec![1.0; 5]).is_err());
        assert!(init_state(
            &ops,
            vec![0.0; 3],
            &vec![0.0; 2],
            0.0,
            TaylorVariant::Oscillator
        )
        .is_err());
    }

    #[test]
    fn power_iteration_below_analytic_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ops = random_pair(&mut rng, 6, 6);
        let est = power_iteration_norm(&ops, &rand_vec(&mut rng, 6), 300);
        assert!(est > 0.0 && est <= ops.frobenius_bound() * (1.0 + 1e-12));
    }

    #[test]
    fn zero_operator_keeps_state() {
        let ops = DensePair::euclidean(2, 2, vec![0.0; 4]).unwrap();
        let mut s = init_state(
            &ops,
            vec![1.0, 2.0],
            &vec![3.0, 4.0],
            0.1,
            TaylorVariant::System,
        )
        .unwrap();
        for _ in 0..10 {
            system_step(&mut s, &ops).unwrap();
        }
        assert_eq!(s.f, vec![1.0, 2.0]);
        assert_eq!(s.g_half, vec![3.0, 4.0]);
    }

    #[test]
    fn zero_operator_quantities_are_plain_norms() {
        let ops = DensePair::euclidean(2, 2, vec![0.0; 4]).unwrap();
        let s = init_state(
            &ops,
            vec![1.0, 2.0],
            &vec![3.0, 4.0],
            0.1,
            TaylorVariant::Oscillator,
        )
        .unwrap();
        assert_eq!(conserved_full(&s, &ops), 30.0);
        assert_eq!(conserved_half_step(&s, &ops), 30.0);
        assert_eq!(
            init_g_half(
                &ops,
                &vec![1.0, 2.0],
                &vec![3.0, 4.0],
                0.5,
                TaylorVariant::System
            ),
            vec![3.0, 4.0]
        );
    }

    #[test]
    fn zero_step_start_returns_initial_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let ops = random_pair(&mut rng, 2, 3);
        let f0 = rand_vec(&mut rng, 3);
        let g0 = rand_vec(&mut rng, 2);
        for v in [TaylorVariant::Oscillator, TaylorVariant::System] {
            assert_eq!(init_g_half(&ops, &f0, &g0, 0.0, v), g0);
        }
    }

    #[test]
    fn wrong_sign_adjoint_is_detected() {
        struct Flipped(DensePair);
        impl AdjointPair for Flipped {
            type X = Vec<f64>;
            type Y = Vec<f64>;
            fn apply_a(&self, f: &Vec<f64>) -> Vec<f64> {
                self.0.apply_a(f)
            }
            fn apply_a_star(&self, g: &Vec<f64>) -> Vec<f64> {
                self.0.apply_a_star(g).iter().map(|x| -x).collect()
            }
            fn inner_x(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
                self.0.inner_x(a, b)
            }
            fn inner_y(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
                self.0.inner_y(a, b)
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ops = Flipped(random_pair(&mut rng, 3, 4));
        let rep = check_adjointness(&ops, 20, 1, |r| rand_vec(r, 4), |r| rand_vec(r, 3));
        assert!(rep.max_residual > 0.1, "{rep:?}");
        let plain = DensePair::euclidean(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let rep = check_adjointness(&plain, 50, 2, |r| rand_vec(r, 2), |r| rand_vec(r, 2));
        assert!(rep.max_residual <= 1e-14);
    }

    #[test]
    fn small_rectangular_system() {
        // X = R^3, Y = R^2 and the reverse, with dt |A| = 0.5 and plain inner products.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for (m, n) in [(2, 3), (3, 2)] {
            let ops = DensePair::euclidean(m, n, rand_vec(&mut rng, m * n)).unwrap();
            let dt = 0.5 / ops.frobenius_bound();
            let mut s = init_state(
                &ops,
                rand_vec(&mut rng, n),
                &rand_vec(&mut rng, m),
                dt,
                TaylorVariant::System,
            )
            .unwrap();
            let c0 = conserved_full(&s, &ops);
            let h0 = conserved_half_step(&s, &ops);
            let mut hist = vec![s.f.clone()];
            for _ in 0..1000 {
                system_step(&mut s, &ops).unwrap();
                hist.push(s.f.clone());
                assert!((conserved_full(&s, &ops) - c0).abs() <= 1e-12 * c0);
                assert!((conserved_half_step(&s, &ops) - h0).abs() <= 1e-12 * h0);
            }
            for w in hist.windows(3).take(50) {
                assert!(second_difference_residual(&ops, &w[0], &w[1], &w[2], dt) <= 1e-13);
            }
        }
    }

    #[test]
    fn small_step_limit_drops_the_correction() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let ops = random_pair(&mut rng, 3, 3);
        let s = init_state(
            &ops,
            rand_vec(&mut rng, 3),
            &rand_vec(&mut rng, 3),
            1e-9,
            TaylorVariant::Oscillator,
        )
        .unwrap();
        let [ff, gg, sub] = terms_full(&s, &ops);
        assert!(sub <= 1e-16 * (ff + gg));
        assert!((conserved_full(&s, &ops) - (ff + gg)).abs() <= 1e-15 * (ff + gg));
    }
}
