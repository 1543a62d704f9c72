//! Harmonic oscillator `u' = -w v`, `v' = w u` integrated by staggered leapfrog.
//!
//! `u` lives on integer time levels and `v` on half levels. With `alpha = w dt / 2`
//! the scheme conserves
//!
//! ```text
//! C_n    = ((1 - alpha^2) u_n^2 + vbar_n^2) / 2,        vbar_n = (v_{n+1/2} + v_{n-1/2}) / 2
//! C_half = (ubar^2 + (1 - alpha^2) v_{n+1/2}^2) / 2,    ubar   = (u_{n+1} + u_n) / 2
//! ```
//!
//! both of which are positive definite only while `w dt < 2`.

use crate::error::{invalid, Result};
pub use crate::leapfrog::relative_drift;

/// Number of steps taken by [`stability_probe`].
pub const PROBE_STEPS: usize = 10_000;
/// Amplitude above which [`stability_probe`] declares the run unstable.
pub const PROBE_LIMIT: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscParams {
    pub omega: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl OscParams {
    pub fn new(omega: f64, dt: f64, n_steps: usize) -> Result<Self> {
        if !omega.is_finite() || omega < 0.0 {
            return Err(invalid(
                "omega",
                format!("must be finite and >= 0, got {omega}"),
            ));
        }
        if !dt.is_finite() || dt <= 0.0 {
            return Err(invalid("dt", format!("must be finite and > 0, got {dt}")));
        }
        Ok(Self { omega, dt, n_steps })
    }

    /// Half the Courant number, `w dt / 2`.
    pub fn alpha(&self) -> f64 {
        0.5 * self.omega * self.dt
    }

    pub fn courant(&self) -> f64 {
        self.omega * self.dt
    }
}

/// Leapfrog state at integer level `n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscState {
    pub u: f64,
    /// `v` at `n + 1/2`.
    pub v_half: f64,
    /// `v` at `n - 1/2`.
    pub v_prev_half: f64,
    pub step: usize,
}

/// How the first half-step value of `v` is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Second order Taylor expansion about `t = 0`.
    #[default]
    Taylor,
    /// Closed form solution evaluated at `dt / 2`.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// Closed form solution `(u(t), v(t))`.
pub fn exact(u0: f64, v0: f64, omega: f64, t: f64) -> (f64, f64) {
    let (s, c) = (omega * t).sin_cos();
    (u0 * c - v0 * s, v0 * c + u0 * s)
}

/// Taylor estimate of `v(dt/2)`.
pub fn init_half_step(u0: f64, v0: f64, p: &OscParams) -> f64 {
    let h = 0.5 * p.dt;
    v0 + h * p.omega * u0 - 0.5 * h * h * p.omega * p.omega * v0
}

pub fn initial_state(u0: f64, v0: f64, p: &OscParams, mode: InitMode) -> OscState {
    let v_half = match mode {
        InitMode::Taylor => init_half_step(u0, v0, p),
        InitMode::Exact => exact(u0, v0, p.omega, 0.5 * p.dt).1,
    };
    // The value the scheme itself would have produced one step earlier.
    let v_prev_half = v_half - p.dt * p.omega * u0;
    OscState {
        u: u0,
        v_half,
        v_prev_half,
        step: 0,
    }
}

/// One leapfrog step: update `u` with the old `v`, then `v` with the new `u`.
pub fn leapfrog_step(s: &OscState, p: &OscParams) -> OscState {
    let u = s.u - p.dt * p.omega * s.v_half;
    let v_half = s.v_half + p.dt * p.omega * u;
    OscState {
        u,
        v_half,
        v_prev_half: s.v_half,
        step: s.step + 1,
    }
}

/// Eliminated form `u_{n+1} = 2 u_n - u_{n-1} - (w dt)^2 u_n`.
pub fn second_order_step(u_n: f64, u_nm1: f64, p: &OscParams) -> f64 {
    let r = p.courant();
    2.0 * u_n - u_nm1 - r * r * u_n
}

pub fn conserved_n(s: &OscState, p: &OscParams) -> f64 {
    let a2 = p.alpha() * p.alpha();
    let vbar = 0.5 * (s.v_half + s.v_prev_half);
    0.5 * ((1.0 - a2) * s.u * s.u + vbar * vbar)
}

/// Half-level quantity built from `u_{n+1}`, `u_n` and `v_{n+1/2}`.
pub fn conserved_half(u_next: f64, u: f64, v_half: f64, p: &OscParams) -> f64 {
    let a2 = p.alpha() * p.alpha();
    let ubar = 0.5 * (u_next + u);
    0.5 * (ubar * ubar + (1.0 - a2) * v_half * v_half)
}

/// Half-level quantity for the interval that starts at `s`.
pub fn conserved_half_of(s: &OscState, p: &OscParams) -> f64 {
    let u_next = s.u - p.dt * p.omega * s.v_half;
    conserved_half(u_next, s.u, s.v_half, p)
}

/// Runs [`PROBE_STEPS`] steps from `u = 1, v = 0` and reports whether `|u|` stayed bounded.
pub fn stability_probe(p: &OscParams) -> Stability {
    let mut s = initial_state(1.0, 0.0, p, InitMode::Taylor);
    for _ in 0..PROBE_STEPS {
        s = leapfrog_step(&s, p);
        if !(s.u.abs() <= PROBE_LIMIT) {
            return Stability::Unstable;
        }
    }
    Stability::Stable
}

/// Time series of a full run. Entry `n` refers to time level `n`.
#[derive(Debug, Clone, Default)]
pub struct OscTrajectory {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    /// `v_{n+1/2}`.
    pub v_half: Vec<f64>,
    pub c_n: Vec<f64>,
    pub c_half: Vec<f64>,
}

impl OscTrajectory {
    pub fn relative_drift_n(&self) -> f64 {
        relative_drift(&self.c_n)
    }

    pub fn relative_drift_half(&self) -> f64 {
        relative_drift(&self.c_half)
    }
}

pub fn simulate(p: &OscParams, u0: f64, v0: f64, mode: InitMode) -> OscTrajectory {
    let mut s = initial_state(u0, v0, p, mode);
    let mut out = OscTrajectory::default();
    for n in 0..=p.n_steps {
        out.t.push(n as f64 * p.dt);
        out.u.push(s.u);
        out.v_half.push(s.v_half);
        out.c_n.push(conserved_n(&s, p));
        out.c_half.push(conserved_half_of(&s, p));
        if n < p.n_steps {
            s = leapfrog_step(&s, p);
        }
    }
    out
}
