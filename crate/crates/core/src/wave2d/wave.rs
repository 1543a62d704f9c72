//! The 2D scalar wave equation `s_t = a^-1 div2d v`, `v_t = A grad2p s` with
//! `s` on the primal nodes (zero on the boundary) and `v = (nxd, nyd)`.

use std::f64::consts::PI;

use super::{div2d, grad2p, Field2, Field2Kind, Grid2, Star2};
use crate::error::{invalid, Result};
use crate::leapfrog::{
    advance, init_state, state_from_half, AdjointPair, History, SystemState, TaylorVariant,
};

/// `s` at level `n` in `f`, `v` at `n + 1/2` in `g_half`.
pub type WaveState2 = SystemState<Field2, Field2>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wave2Ops {
    pub star: Star2,
    pub grid: Grid2,
}

impl AdjointPair for Wave2Ops {
    type X = Field2;
    type Y = Field2;

    fn apply_a(&self, s: &Field2) -> Field2 {
        let t = grad2p(s, &self.grid).expect("primal node scalar");
        self.star.apply(&t, &self.grid).expect("primal tangent")
    }

    fn apply_a_star(&self, v: &Field2) -> Field2 {
        let d = div2d(v, &self.grid).expect("dual normal");
        let mut s = self.star.apply(&d, &self.grid).expect("dual cell scalar");
        s.comps[0].mapv_inplace(|x| -x);
        s
    }

    fn inner_x(&self, a: &Field2, b: &Field2) -> f64 {
        let s: f64 = a.comps[0]
            .iter()
            .zip(b.comps[0].iter())
            .map(|(x, y)| x * y)
            .sum();
        self.star.a * s * self.grid.da()
    }

    fn inner_y(&self, a: &Field2, b: &Field2) -> f64 {
        let dot = |k: usize| -> f64 {
            a.comps[k]
                .iter()
                .zip(b.comps[k].iter())
                .map(|(x, y)| x * y)
                .sum()
        };
        (dot(0) / self.star.a11 + dot(1) / self.star.a22) * self.grid.da()
    }

    fn check_x(&self, f: &Field2) -> Result<()> {
        f.check(Field2Kind::NodeP, &self.grid, "wave2d s")
    }

    fn check_y(&self, g: &Field2) -> Result<()> {
        g.check(Field2Kind::NormalD, &self.grid, "wave2d v")
    }

    fn norm_bound(&self) -> Option<f64> {
        let amax = self.star.a11.max(self.star.a22);
        let inv =
            (1.0 / (self.grid.dx * self.grid.dx) + 1.0 / (self.grid.dy * self.grid.dy)).sqrt();
        Some((amax / self.star.a).sqrt() * 2.0 * inv)
    }
}

/// Standing mode `(m, n)` with speed `c` on the unit square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactMode2 {
    pub m: u32,
    pub n: u32,
    pub c: f64,
}

impl ExactMode2 {
    pub fn new(m: u32, n: u32, c: f64) -> Result<Self> {
        if m < 1 || n < 1 {
            return Err(invalid("mode", format!("need m, n >= 1, got ({m}, {n})")));
        }
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("c", format!("must be finite and > 0, got {c}")));
        }
        Ok(Self { m, n, c })
    }

    pub fn star(&self) -> Star2 {
        Star2::speed(self.c).expect("validated speed")
    }

    /// `(u, vx, vy)` at `(x, y, t)`.
    pub fn eval(&self, x: f64, y: f64, t: f64) -> (f64, f64, f64) {
        let (m, n) = (f64::from(self.m), f64::from(self.n));
        let s = (m * m + n * n).sqrt();
        let w = self.c * s * PI * t;
        let (sx, cx) = (m * PI * x).sin_cos();
        let (sy, cy) = (n * PI * y).sin_cos();
        let u = w.cos() * sx * sy;
        let amp = w.sin() / s;
        (u, amp * m * cx * sy, amp * n * sx * cy)
    }

    pub fn u_field(&self, grid: &Grid2, t: f64) -> Field2 {
        Field2::from_fn(Field2Kind::NodeP, grid, |_, x, y| self.eval(x, y, t).0)
    }

    pub fn v_field(&self, grid: &Grid2, t: f64) -> Field2 {
        Field2::from_fn(Field2Kind::NormalD, grid, |c, x, y| {
            let (_, vx, vy) = self.eval(x, y, t);
            if c == 0 {
                vx
            } else {
                vy
            }
        })
    }
}

/// `u = cos(c s pi t) sin(m pi x) sin(n pi y)` and
/// `v = sin(c s pi t) / s * (m cos(m pi x) sin(n pi y), n sin(m pi x) cos(n pi y))`
/// with `s = sqrt(m^2 + n^2)`; solves `u_t = c div v`, `v_t = c grad u`.
pub fn exact_solution_2d(
    m: u32,
    n: u32,
    c: f64,
    x: f64,
    y: f64,
    t: f64,
) -> Result<(f64, f64, f64)> {
    Ok(ExactMode2::new(m, n, c)?.eval(x, y, t))
}

/// How `v_{1/2}` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Start2 {
    /// Exact `v` at `dt / 2`.
    #[default]
    ExactHalf,
    /// Taylor start from `v(0) = 0`.
    Taylor,
}

/// Level-0 state for a mode.
pub fn exact_state(
    ops: &Wave2Ops,
    mode: &ExactMode2,
    dt: f64,
    start: Start2,
) -> Result<WaveState2> {
    let mut s0 = mode.u_field(&ops.grid, 0.0);
    s0.pin_boundary();
    match start {
        Start2::ExactHalf => state_from_half(ops, s0, mode.v_field(&ops.grid, 0.5 * dt), dt),
        Start2::Taylor => init_state(
            ops,
            s0,
            &mode.v_field(&ops.grid, 0.0),
            dt,
            TaylorVariant::Oscillator,
        ),
    }
}

#[derive(Debug, Clone)]
pub struct Run2 {
    pub state: WaveState2,
    pub history: History,
    /// Max node error against the mode at the final time.
    pub error: f64,
}

/// `nt` steps of size `dt` for a mode on `grid`.
pub fn run_wave2d(
    grid: Grid2,
    mode: ExactMode2,
    dt: f64,
    nt: usize,
    start: Start2,
    record_every: usize,
) -> Result<Run2> {
    let ops = Wave2Ops {
        star: mode.star(),
        grid,
    };
    let mut state = exact_state(&ops, &mode, dt, start)?;
    let history = advance(&mut state, &ops, nt, record_every, |_| Vec::new())?;
    let exact = mode.u_field(&grid, state.time());
    let error = state.f.sub(&exact).max_abs();
    Ok(Run2 {
        state,
        history,
        error,
    })
}

/// Errors `(h, error)` on `n x n` grids with `nt = k n`, where `k` is the
/// smallest integer keeping `c dt sqrt(1/dx^2 + 1/dy^2) <= cfl`.
pub fn wave2d_convergence(
    mode: ExactMode2,
    ns: &[usize],
    t_final: f64,
    cfl: f64,
) -> Result<Vec<(f64, f64)>> {
    if !(cfl > 0.0 && cfl < 1.0) {
        return Err(invalid("cfl", format!("must lie in (0, 1), got {cfl}")));
    }
    let k = (t_final * mode.c * 2.0_f64.sqrt() / cfl).ceil().max(1.0) as usize;
    ns.iter()
        .map(|&n| {
            let g = Grid2::new(n, n)?;
            let nt = k * n;
            let r = run_wave2d(g, mode, t_final / nt as f64, nt, Start2::ExactHalf, nt)?;
            Ok((g.dx, r.error))
        })
        .collect()
}
