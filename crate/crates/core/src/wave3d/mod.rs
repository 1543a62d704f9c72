//! Leapfrog solvers in 3D: the scalar wave equation `s_tt = a^-1 D* A G s` with
//! `s` at primal nodes and `v` at dual faces, and Maxwell's equations with `E`
//! on primal edges and `H` on dual edges.
//!
//! Both are instances of [`AdjointPair`], so the generic leapfrog driver and
//! conserved quantities apply unchanged. On a bounded box `s` and the
//! tangential part of `E` are held at zero on the walls.

mod maxwell;
mod presets;

use std::f64::consts::PI;

use crate::error::{invalid, Result};
use crate::leapfrog::{init_state, system_step, AdjointPair, SystemState, TaylorVariant};
use crate::mimetic3d::{div3_star, grad3, inner3, Field3, FieldKind, Grid3, Star3};

pub use crate::leapfrog::{advance, History};
pub use maxwell::{
    maxwell_divergence, maxwell_initial_state, suggest_dt_maxwell, te110_error, te110_fields,
    MaxwellOps, MaxwellState3,
};
pub use presets::Materials3;

/// `s` at level `n` in `f`, `v` at `n + 1/2` in `g_half`.
pub type ScalarWaveState3 = SystemState<Field3, Field3>;

/// `A s = A G s` and `A* v = -a^-1 D* v`.
#[derive(Debug, Clone, Copy)]
pub struct ScalarWaveOps<'a> {
    pub star: &'a Star3,
    pub grid: &'a Grid3,
}

impl<'a> ScalarWaveOps<'a> {
    /// Fails for full-matrix materials, which cannot guarantee conservation.
    pub fn new(star: &'a Star3, grid: &'a Grid3) -> Result<Self> {
        star.require_exact_inverse()?;
        let probe = Field3::zeros(FieldKind::Node, grid);
        star.star(&probe, grid)?;
        Ok(Self { star, grid })
    }
}

impl AdjointPair for ScalarWaveOps<'_> {
    type X = Field3;
    type Y = Field3;

    fn apply_a(&self, s: &Field3) -> Field3 {
        let gs = grad3(s, self.grid).expect("node scalar");
        self.star.star(&gs, self.grid).expect("edge vector")
    }

    fn apply_a_star(&self, v: &Field3) -> Field3 {
        let d = div3_star(v, self.grid).expect("dual face vector");
        let mut s = self.star.star(&d, self.grid).expect("dual cell scalar");
        s.pin_boundary(self.grid);
        s.comps[0].mapv_inplace(|x| -x);
        s
    }

    fn inner_x(&self, a: &Field3, b: &Field3) -> f64 {
        inner3(a, b, self.star, self.grid).expect("node scalars")
    }

    fn inner_y(&self, a: &Field3, b: &Field3) -> f64 {
        inner3(a, b, self.star, self.grid).expect("dual face vectors")
    }

    fn check_x(&self, f: &Field3) -> Result<()> {
        f.check(FieldKind::Node, self.grid, "scalar wave s")
    }

    fn check_y(&self, g: &Field3) -> Result<()> {
        g.check(FieldKind::DualFace, self.grid, "scalar wave v")
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(self.star.speed_bound() * 2.0 * self.grid.inverse_spacing_norm())
    }
}

fn dt_from_bound(bound: f64, safety: f64) -> Result<f64> {
    if !(safety > 0.0) || !safety.is_finite() {
        return Err(invalid(
            "safety",
            format!("must be finite and > 0, got {safety}"),
        ));
    }
    Ok(safety * 2.0 / bound)
}

/// `safety * 2 / N` with `N = s_max * 2 * sqrt(1/hx^2 + 1/hy^2 + 1/hz^2)` and
/// `s_max = sqrt(max A / min a)`.
pub fn suggest_dt(star: &Star3, grid: &Grid3, safety: f64) -> Result<f64> {
    dt_from_bound(
        star.speed_bound() * 2.0 * grid.inverse_spacing_norm(),
        safety,
    )
}

/// Second order start `v_{1/2} = v0 + (dt/2) A G s0 + (1/2)(dt/2)^2 A G a^-1 D* v0`.
pub fn scalar_init_v(ops: &ScalarWaveOps<'_>, s0: &Field3, v0: &Field3, dt: f64) -> Result<Field3> {
    ops.check_x(s0)?;
    ops.check_y(v0)?;
    Ok(crate::leapfrog::init_g_half(
        ops,
        s0,
        v0,
        dt,
        TaylorVariant::Oscillator,
    ))
}

/// Pins `s0` to the walls and takes the Taylor start.
pub fn scalar_initial_state(
    ops: &ScalarWaveOps<'_>,
    mut s0: Field3,
    v0: &Field3,
    dt: f64,
) -> Result<ScalarWaveState3> {
    s0.pin_boundary(ops.grid);
    init_state(ops, s0, v0, dt, TaylorVariant::Oscillator)
}

/// `cos(sqrt(3) pi t) sin(pi x) sin(pi y) sin(pi z)` in the unit cube.
pub fn cavity_mode(p: [f64; 3], t: f64) -> f64 {
    (3.0_f64.sqrt() * PI * t).cos() * (PI * p[0]).sin() * (PI * p[1]).sin() * (PI * p[2]).sin()
}

/// Max node error of the scalar cavity mode after `nt` steps to `t_final` on
/// an `n^3` unit cube with trivial materials, started from the Taylor step.
pub fn cavity_error(n: usize, nt: usize, t_final: f64) -> Result<f64> {
    let grid = Grid3::cube(n, crate::mimetic3d::Boundary::Bounded)?;
    let star = Star3::trivial(&grid);
    let ops = ScalarWaveOps::new(&star, &grid)?;
    if nt == 0 {
        return Err(invalid("nt", "need at least one step"));
    }
    let dt = t_final / nt as f64;
    let s0 = Field3::from_fn(FieldKind::Node, &grid, |_, p| cavity_mode(p, 0.0));
    let v0 = Field3::zeros(FieldKind::DualFace, &grid);
    let mut state = scalar_initial_state(&ops, s0, &v0, dt)?;
    for _ in 0..nt {
        system_step(&mut state, &ops)?;
    }
    let exact = Field3::from_fn(FieldKind::Node, &grid, |_, p| cavity_mode(p, t_final));
    Ok(state.f.sub(&exact).max_abs())
}
