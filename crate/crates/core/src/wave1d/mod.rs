//! 1D wave equation `u_t = (1/rho) v_x`, `v_t = tau u_x` on `[a, b]` with
//! `u = 0` at both ends.
//!
//! `u` lives on the `nx` primal points `a + i dx`, `v` on the `nx - 1` dual
//! points `a + (i + 1/2) dx`. The constant-material form uses a single wave
//! speed `c`, which is the same as `rho = 1/c`, `tau = c`.
//!
//! States are [`SystemState`]s of the generic integrator with `f = u` and
//! `g = v`.

pub mod convergence;
pub mod materials;

use crate::error::{invalid, shape, Result};
use crate::leapfrog::{self, AdjointPair, ConservationRecord, SystemState, TaylorVariant};

pub use materials::MaterialPreset;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub a: f64,
    pub b: f64,
    /// Number of primal points, ends included.
    pub nx: usize,
    pub dx: f64,
    pub nt: usize,
    pub dt: f64,
}

impl Grid1D {
    /// Grid on `[a, b]` with `nx` points and `nt` steps up to `t_final`.
    pub fn new(a: f64, b: f64, nx: usize, t_final: f64, nt: usize) -> Result<Self> {
        if nx < 3 {
            return Err(invalid("nx", format!("needs at least 3 points, got {nx}")));
        }
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(invalid("interval", format!("need a < b, got [{a}, {b}]")));
        }
        if nt == 0 || !(t_final > 0.0) {
            return Err(invalid("time", "need nt >= 1 and t_final > 0"));
        }
        Ok(Self {
            a,
            b,
            nx,
            dx: (b - a) / (nx - 1) as f64,
            nt,
            dt: t_final / nt as f64,
        })
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    pub fn t_final(&self) -> f64 {
        self.nt as f64 * self.dt
    }

    pub fn primal_points(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.a + i as f64 * self.dx).collect()
    }

    pub fn dual_points(&self) -> Vec<f64> {
        (0..self.nx - 1)
            .map(|i| self.a + (i as f64 + 0.5) * self.dx)
            .collect()
    }

    /// Grid with half the spacing and half the time step.
    pub fn refined(&self) -> Self {
        Self {
            nx: 2 * (self.nx - 1) + 1,
            dx: self.dx / 2.0,
            nt: 2 * self.nt,
            dt: self.dt / 2.0,
            ..*self
        }
    }

    /// `c dt / dx` for a speed `c`.
    pub fn courant(&self, speed: f64) -> f64 {
        speed * self.dt / self.dx
    }
}

/// Forward difference of a primal field onto the dual points.
pub fn grad1(u: &[f64], dx: f64) -> Result<Vec<f64>> {
    if u.len() < 2 {
        return Err(shape("grad1 input", ">= 2", u.len()));
    }
    Ok(u.windows(2).map(|w| (w[1] - w[0]) / dx).collect())
}

/// Difference of a dual field onto the interior primal points; the two end
/// entries are zero.
pub fn div1(v: &[f64], dx: f64) -> Result<Vec<f64>> {
    if v.len() < 2 {
        return Err(shape("div1 input", ">= 2", v.len()));
    }
    let mut out = vec![0.0; v.len() + 1];
    for i in 1..v.len() {
        out[i] = (v[i] - v[i - 1]) / dx;
    }
    Ok(out)
}

/// Average of the two half-level values around the final time.
pub fn v_at_final_time(v_half_last: &[f64], v_half_prev: &[f64]) -> Vec<f64> {
    v_half_last
        .iter()
        .zip(v_half_prev)
        .map(|(a, b)| 0.5 * (a + b))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Materials1D {
    /// Constant wave speed.
    Constant { c: f64 },
    /// Density on the primal points and modulus on the dual points.
    Variable { rho: Vec<f64>, tau: Vec<f64> },
}

impl Materials1D {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0) || !c.is_finite() {
            return Err(invalid("c", format!("must be finite and > 0, got {c}")));
        }
        Ok(Self::Constant { c })
    }

    pub fn variable(rho: Vec<f64>, tau: Vec<f64>) -> Result<Self> {
        if rho.len() != tau.len() + 1 {
            return Err(shape(
                "materials",
                format!("rho len = tau len + 1 ({})", tau.len() + 1),
                rho.len(),
            ));
        }
        if rho.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(invalid("rho", "must be finite and > 0"));
        }
        if tau.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
            return Err(invalid("tau", "must be finite and > 0"));
        }
        Ok(Self::Variable { rho, tau })
    }

    /// Samples `rho` at primal points and `tau` at dual points.
    pub fn sample(
        grid: &Grid1D,
        rho: impl Fn(f64) -> f64,
        tau: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        Self::variable(
            grid.primal_points().into_iter().map(rho).collect(),
            grid.dual_points().into_iter().map(tau).collect(),
        )
    }

    /// Constant speed written in variable form, `rho = 1/c`, `tau = c`.
    pub fn constant_as_variable(grid: &Grid1D, c: f64) -> Result<Self> {
        Self::sample(grid, |_| 1.0 / c, |_| c)
    }

    fn check(&self, grid: &Grid1D) -> Result<()> {
        if let Self::Variable { rho, .. } = self {
            if rho.len() != grid.nx {
                return Err(shape("materials on grid", grid.nx, rho.len()));
            }
        }
        Ok(())
    }
}

/// Largest wave speed estimate `sqrt(max tau / min rho)`, or `c`.
pub fn cfl_speed(m: &Materials1D) -> f64 {
    match m {
        Materials1D::Constant { c } => *c,
        Materials1D::Variable { rho, tau } => {
            let tmax = tau.iter().copied().fold(f64::MIN, f64::max);
            let rmin = rho.iter().copied().fold(f64::MAX, f64::min);
            (tmax / rmin).sqrt()
        }
    }
}

/// The pair `A = tau d/dx`, `A* = -(1/rho) d/dx` for pinned ends.
#[derive(Debug, Clone, Copy)]
pub struct Wave1DOps<'a> {
    pub materials: &'a Materials1D,
    pub dx: f64,
    pub nx: usize,
}

impl<'a> Wave1DOps<'a> {
    pub fn new(materials: &'a Materials1D, grid: &Grid1D) -> Result<Self> {
        materials.check(grid)?;
        Ok(Self {
            materials,
            dx: grid.dx,
            nx: grid.nx,
        })
    }
}

impl AdjointPair for Wave1DOps<'_> {
    type X = Vec<f64>;
    type Y = Vec<f64>;

    fn apply_a(&self, u: &Vec<f64>) -> Vec<f64> {
        let mut g = grad1(u, self.dx).expect("primal field");
        match self.materials {
            Materials1D::Constant { c } => g.iter_mut().for_each(|x| *x *= c),
            Materials1D::Variable { tau, .. } => g.iter_mut().zip(tau).for_each(|(x, t)| *x *= t),
        }
        g
    }

    fn apply_a_star(&self, v: &Vec<f64>) -> Vec<f64> {
        let mut d = div1(v, self.dx).expect("dual field");
        match self.materials {
            Materials1D::Constant { c } => d.iter_mut().for_each(|x| *x *= -c),
            Materials1D::Variable { rho, .. } => {
                d.iter_mut().zip(rho).for_each(|(x, r)| *x = -*x / r)
            }
        }
        d
    }

    fn inner_x(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        match self.materials {
            Materials1D::Constant { .. } => {
                a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.dx
            }
            Materials1D::Variable { rho, .. } => inner_rho(a, b, rho, self.dx),
        }
    }

    fn inner_y(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        match self.materials {
            Materials1D::Constant { .. } => {
                a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>() * self.dx
            }
            Materials1D::Variable { tau, .. } => inner_tau(a, b, tau, self.dx),
        }
    }

    fn check_x(&self, u: &Vec<f64>) -> Result<()> {
        if u.len() != self.nx {
            return Err(shape("u", self.nx, u.len()));
        }
        Ok(())
    }

    fn check_y(&self, v: &Vec<f64>) -> Result<()> {
        if v.len() != self.nx - 1 {
            return Err(shape("v", self.nx - 1, v.len()));
        }
        Ok(())
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(2.0 * cfl_speed(self.materials) / self.dx)
    }
}

fn inner_rho(a: &[f64], b: &[f64], rho: &[f64], dx: f64) -> f64 {
    a.iter()
        .zip(b)
        .zip(rho)
        .map(|((x, y), r)| x * y * r)
        .sum::<f64>()
        * dx
}

fn inner_tau(a: &[f64], b: &[f64], tau: &[f64], dx: f64) -> f64 {
    a.iter()
        .zip(b)
        .zip(tau)
        .map(|((x, y), t)| x * y / t)
        .sum::<f64>()
        * dx
}

/// `sum u1 u2 rho dx` over all primal points (unit weight for constant speed).
pub fn weighted_inner_rho(u1: &[f64], u2: &[f64], m: &Materials1D, grid: &Grid1D) -> Result<f64> {
    if u1.len() != grid.nx || u2.len() != grid.nx {
        return Err(shape("rho inner product", grid.nx, u1.len().max(u2.len())));
    }
    let ops = Wave1DOps::new(m, grid)?;
    Ok(ops.inner_x(&u1.to_vec(), &u2.to_vec()))
}

/// `sum v1 v2 / tau dx` over all dual points (unit weight for constant speed).
pub fn weighted_inner_tau(v1: &[f64], v2: &[f64], m: &Materials1D, grid: &Grid1D) -> Result<f64> {
    if v1.len() != grid.nx - 1 || v2.len() != grid.nx - 1 {
        return Err(shape(
            "tau inner product",
            grid.nx - 1,
            v1.len().max(v2.len()),
        ));
    }
    let ops = Wave1DOps::new(m, grid)?;
    Ok(ops.inner_y(&v1.to_vec(), &v2.to_vec()))
}

/// `f = u` at level `n`, `g = v` at `n + 1/2`.
pub type WaveState1D = SystemState<Vec<f64>, Vec<f64>>;

fn pin_ends(u: &mut [f64]) {
    let n = u.len();
    u[0] = 0.0;
    u[n - 1] = 0.0;
}

/// Starts from `u0` and the given `v_{1/2}`; the end values of `u0` are set to zero.
pub fn init_with_half(
    grid: &Grid1D,
    m: &Materials1D,
    mut u0: Vec<f64>,
    v_half: Vec<f64>,
) -> Result<WaveState1D> {
    let ops = Wave1DOps::new(m, grid)?;
    ops.check_x(&u0)?;
    pin_ends(&mut u0);
    leapfrog::state_from_half(&ops, u0, v_half, grid.dt)
}

/// Starts from `u0`, `v0` with a Taylor estimate of `v_{1/2}`.
pub fn init_taylor(
    grid: &Grid1D,
    m: &Materials1D,
    mut u0: Vec<f64>,
    v0: &Vec<f64>,
    variant: TaylorVariant,
) -> Result<WaveState1D> {
    let ops = Wave1DOps::new(m, grid)?;
    ops.check_x(&u0)?;
    pin_ends(&mut u0);
    leapfrog::init_state(&ops, u0, v0, grid.dt, variant)
}

/// Constant speed step: `u += dt c div1(v)`, then `v += dt c grad1(u)`.
pub fn cmp_step(state: &WaveState1D, c: f64, grid: &Grid1D) -> Result<WaveState1D> {
    let m = Materials1D::constant(c)?;
    leapfrog::stepped(state, &Wave1DOps::new(&m, grid)?)
}

/// Variable material step: `u += (dt/rho) div1(v)`, then `v += dt tau grad1(u)`.
pub fn vmp_step(state: &WaveState1D, m: &Materials1D, grid: &Grid1D) -> Result<WaveState1D> {
    leapfrog::stepped(state, &Wave1DOps::new(m, grid)?)
}

pub fn conserved_n_1d(state: &WaveState1D, m: &Materials1D, grid: &Grid1D) -> Result<f64> {
    Ok(leapfrog::conserved_full(state, &Wave1DOps::new(m, grid)?))
}

pub fn conserved_half_1d(state: &WaveState1D, m: &Materials1D, grid: &Grid1D) -> Result<f64> {
    Ok(leapfrog::conserved_half_step(
        state,
        &Wave1DOps::new(m, grid)?,
    ))
}

/// Standing wave `u = cos(k c t) sin(k (x - a))`, `v = sin(k c t) cos(k (x - a))`
/// with `k = m pi / L`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandingMode {
    pub m: u32,
    pub c: f64,
    pub a: f64,
    pub length: f64,
}

impl StandingMode {
    pub fn on(grid: &Grid1D, m: u32, c: f64) -> Self {
        Self {
            m,
            c,
            a: grid.a,
            length: grid.length(),
        }
    }

    fn k(&self) -> f64 {
        self.m as f64 * std::f64::consts::PI / self.length
    }

    pub fn u(&self, x: f64, t: f64) -> f64 {
        (self.k() * self.c * t).cos() * (self.k() * (x - self.a)).sin()
    }

    pub fn v(&self, x: f64, t: f64) -> f64 {
        (self.k() * self.c * t).sin() * (self.k() * (x - self.a)).cos()
    }

    /// Time after which the solution repeats up to sign.
    pub fn half_period(&self) -> f64 {
        self.length / (self.m as f64 * self.c)
    }
}

/// How a run picks `v_{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Start {
    /// Exact standing mode values at `t = 0` and `t = dt/2` (constant speed only).
    ExactMode { m: u32 },
    /// `u0 = sin(m pi (x - a) / L)`, `v0 = 0`, Taylor start.
    SineTaylor { m: u32, variant: TaylorVariant },
}

#[derive(Debug, Clone)]
pub struct Run1D {
    pub grid: Grid1D,
    pub state: WaveState1D,
    pub series: Vec<ConservationRecord>,
    /// Largest `|u|` seen.
    pub max_abs_u: f64,
}

impl Run1D {
    pub fn u(&self) -> &[f64] {
        &self.state.f
    }

    /// `v` at the final integer time level.
    pub fn v_final(&self) -> Vec<f64> {
        v_at_final_time(&self.state.g_half, &self.state.g_prev_half)
    }

    pub fn drift(&self) -> (f64, f64) {
        leapfrog::series_drift(&self.series)
    }
}

pub fn initial_state(grid: &Grid1D, m: &Materials1D, start: Start) -> Result<WaveState1D> {
    let xp = grid.primal_points();
    let xd = grid.dual_points();
    match start {
        Start::ExactMode { m: mode } => {
            let Materials1D::Constant { c } = m else {
                return Err(invalid("start", "exact mode start needs a constant speed"));
            };
            let sm = StandingMode::on(grid, mode, *c);
            let u0 = xp.iter().map(|&x| sm.u(x, 0.0)).collect();
            let vh = xd.iter().map(|&x| sm.v(x, 0.5 * grid.dt)).collect();
            init_with_half(grid, m, u0, vh)
        }
        Start::SineTaylor { m: mode, variant } => {
            let k = mode as f64 * std::f64::consts::PI / grid.length();
            let u0 = xp.iter().map(|&x| (k * (x - grid.a)).sin()).collect();
            init_taylor(grid, m, u0, &vec![0.0; grid.nx - 1], variant)
        }
    }
}

/// Runs `grid.nt` steps, recording the conserved quantities every `record_every`
/// steps (and at the last step). `record_every = 0` records only the ends.
pub fn run(
    grid: &Grid1D,
    m: &Materials1D,
    state: WaveState1D,
    record_every: usize,
) -> Result<Run1D> {
    let ops = Wave1DOps::new(m, grid)?;
    let mut state = state;
    let mut series = vec![ConservationRecord::capture(&state, &ops)];
    let mut max_abs_u = state.f.iter().fold(0.0_f64, |a, x| a.max(x.abs()));
    for n in 1..=grid.nt {
        leapfrog::system_step(&mut state, &ops)?;
        max_abs_u = state.f.iter().fold(max_abs_u, |a, x| a.max(x.abs()));
        if n == grid.nt || (record_every > 0 && n % record_every == 0) {
            series.push(ConservationRecord::capture(&state, &ops));
        }
    }
    Ok(Run1D {
        grid: *grid,
        state,
        series,
        max_abs_u,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::leapfrog::check_adjointness;
    use rand::Rng;
    use std::f64::consts::PI;

    fn unit_grid(nx: usize, t: f64, nt: usize) -> Grid1D {
        Grid1D::new(0.0, 1.0, nx, t, nt).unwrap()
    }

    #[test]
    fn grid_points() {
        let g = unit_grid(11, 1.0, 10);
        let xp = g.primal_points();
        assert_eq!(xp.len(), 11);
        assert_eq!(xp[0], 0.0);
        assert!((xp[10] - 1.0).abs() < 1e-15);
        assert_eq!(g.dual_points().len(), 10);
        assert!((g.dual_points()[0] - 0.05).abs() < 1e-15);
        assert!(Grid1D::new(0.0, 1.0, 2, 1.0, 1).is_err());
        assert!(Grid1D::new(1.0, 0.0, 5, 1.0, 1).is_err());
    }

    #[test]
    fn grad_and_div_on_simple_fields() {
        let g = unit_grid(11, 1.0, 1);
        assert!(grad1(&[2.0; 11], g.dx).unwrap().iter().all(|x| *x == 0.0));
        let lin = grad1(&g.primal_points(), g.dx).unwrap();
        assert!(lin.iter().all(|x| (x - 1.0).abs() < 1e-13));
        assert!(div1(&[3.0; 10], g.dx).unwrap().iter().all(|x| *x == 0.0));
        let d = div1(&g.dual_points(), g.dx).unwrap();
        assert_eq!(d[0], 0.0);
        assert_eq!(d[10], 0.0);
        assert!(d[1..10].iter().all(|x| (x - 1.0).abs() < 1e-13));
        assert!(grad1(&[1.0], 0.1).is_err());
        assert!(div1(&[1.0], 0.1).is_err());
    }

    fn grad_error(k: u32) -> f64 {
        let g = unit_grid((1 << k) + 1, 1.0, 1);
        let u: Vec<f64> = g.primal_points().iter().map(|x| (PI * x).sin()).collect();
        let du = grad1(&u, g.dx).unwrap();
        du.iter()
            .zip(g.dual_points())
            .map(|(d, x)| (d - PI * (PI * x).cos()).abs())
            .fold(0.0, f64::max)
    }

    fn div_error(k: u32) -> f64 {
        let g = unit_grid((1 << k) + 1, 1.0, 1);
        let v: Vec<f64> = g.dual_points().iter().map(|x| (PI * x).cos()).collect();
        let dv = div1(&v, g.dx).unwrap();
        let xp = g.primal_points();
        (1..g.nx - 1)
            .map(|i| (dv[i] + PI * (PI * xp[i]).sin()).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn differences_are_second_order() {
        for k in 4..8 {
            let r = grad_error(k) / grad_error(k + 1);
            assert!((3.8..4.2).contains(&r), "grad ratio {r}");
            let r = div_error(k) / div_error(k + 1);
            assert!((3.8..4.2).contains(&r), "div ratio {r}");
        }
    }

    #[test]
    fn inner_products_match_direct_sums() {
        let g = unit_grid(11, 1.0, 1);
        let m = Materials1D::sample(&g, |_| 1.0, |_| 2.0).unwrap();
        let r = weighted_inner_rho(&[1.0; 11], &[1.0; 11], &m, &g).unwrap();
        assert!((r - 1.1).abs() < 1e-14);
        let t = weighted_inner_tau(&[1.0; 10], &[1.0; 10], &m, &g).unwrap();
        assert!((t - 0.5).abs() < 1e-14);
        assert!(weighted_inner_rho(&[1.0; 10], &[1.0; 10], &m, &g).is_err());
    }

    #[test]
    fn variable_pair_is_adjoint_for_pinned_fields() {
        let g = unit_grid(33, 1.0, 1);
        let m = Materials1D::sample(&g, |x| 1.0 + x * x, |x| 2.0 - x).unwrap();
        let ops = Wave1DOps::new(&m, &g).unwrap();
        let rep = check_adjointness(
            &ops,
            100,
            7,
            |r| {
                let mut u: Vec<f64> = (0..33).map(|_| r.gen_range(-1.0..1.0)).collect();
                pin_ends(&mut u);
                u
            },
            |r| (0..32).map(|_| r.gen_range(-1.0..1.0)).collect(),
        );
        assert!(rep.max_residual <= 1e-13, "{rep:?}");
    }

    #[test]
    fn cfl_speed_values() {
        let g = unit_grid(11, 1.0, 1);
        assert_eq!(
            cfl_speed(&Materials1D::sample(&g, |_| 1.0, |_| 1.0).unwrap()),
            1.0
        );
        let c = 3.0;
        assert!((cfl_speed(&Materials1D::constant_as_variable(&g, c).unwrap()) - c).abs() < 1e-15);
        let jump = Materials1D::sample(&g, |_| 1.0, |x| if x >= 0.5 { 2.0 } else { 1.0 }).unwrap();
        assert!((cfl_speed(&jump) - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_state_stays_zero() {
        let g = unit_grid(9, 1.0, 8);
        let m = Materials1D::constant(1.0).unwrap();
        let s = init_with_half(&g, &m, vec![0.0; 9], vec![0.0; 8]).unwrap();
        let s = cmp_step(&s, 1.0, &g).unwrap();
        assert!(s.f.iter().chain(&s.g_half).all(|x| *x == 0.0));
        assert_eq!(conserved_n_1d(&s, &m, &g).unwrap(), 0.0);
        assert_eq!(conserved_half_1d(&s, &m, &g).unwrap(), 0.0);
    }

    #[test]
    fn standing_mode_conserved_value_near_half() {
        let g = unit_grid(129, 2.0, 512);
        let m = Materials1D::constant(1.0).unwrap();
        let s = initial_state(&g, &m, Start::ExactMode { m: 1 }).unwrap();
        let c = conserved_n_1d(&s, &m, &g).unwrap();
        assert!((c - 0.5).abs() < 1e-3, "{c}");
    }

    #[test]
    fn final_velocity_average() {
        assert_eq!(v_at_final_time(&[0.0, 3.0], &[2.0, 3.0]), vec![1.0, 3.0]);
    }

    #[test]
    fn cmp_matches_standing_mode_at_second_order() {
        let err = |k: u32| {
            let nx = (1 << k) + 1;
            let g = unit_grid(nx, 0.75, 3 << (k - 1));
            let m = Materials1D::constant(1.0).unwrap();
            let s = initial_state(&g, &m, Start::ExactMode { m: 1 }).unwrap();
            let r = run(&g, &m, s, 0).unwrap();
            let sm = StandingMode::on(&g, 1, 1.0);
            let v = r.v_final();
            let eu = r
                .u()
                .iter()
                .zip(g.primal_points())
                .map(|(u, x)| (u - sm.u(x, 0.75)).abs())
                .fold(0.0, f64::max);
            let ev = v
                .iter()
                .zip(g.dual_points())
                .map(|(v, x)| (v - sm.v(x, 0.75)).abs())
                .fold(0.0, f64::max);
            (eu, ev)
        };
        let (u1, v1) = err(5);
        let (u2, v2) = err(6);
        assert!((3.5..4.5).contains(&(u1 / u2)), "{}", u1 / u2);
        assert!((3.5..4.5).contains(&(v1 / v2)), "{}", v1 / v2);
    }

    #[test]
    fn boundary_stays_pinned() {
        let g = unit_grid(17, 1.0, 40);
        let m = Materials1D::sample(&g, |x| 1.0 + x / 2.0, |_| 1.0).unwrap();
        let s = initial_state(
            &g,
            &m,
            Start::SineTaylor {
                m: 1,
                variant: TaylorVariant::Oscillator,
            },
        )
        .unwrap();
        let r = run(&g, &m, s, 1).unwrap();
        assert_eq!(r.u()[0], 0.0);
        assert_eq!(r.u()[16], 0.0);
    }

    #[test]
    fn exact_start_requires_constant_speed() {
        let g = unit_grid(9, 1.0, 8);
        let m = Materials1D::constant_as_variable(&g, 1.0).unwrap();
        assert!(initial_state(&g, &m, Start::ExactMode { m: 1 }).is_err());
    }

    #[test]
    fn rejects_bad_materials() {
        assert!(Materials1D::constant(0.0).is_err());
        assert!(Materials1D::variable(vec![1.0; 3], vec![1.0; 3]).is_err());
        assert!(Materials1D::variable(vec![1.0, -1.0, 1.0], vec![1.0; 2]).is_err());
        assert!(Materials1D::variable(vec![1.0; 3], vec![0.0; 2]).is_err());
        let g = unit_grid(9, 1.0, 8);
        let m = Materials1D::sample(&unit_grid(5, 1.0, 1), |_| 1.0, |_| 1.0).unwrap();
        assert!(Wave1DOps::new(&m, &g).is_err());
    }
}
