//! Yee scheme: `E^{n+1} = E^n + dt eps^-1 R* H^{n+1/2}`, then
//! `H^{n+3/2} = H^{n+1/2} - dt mu^-1 R E^{n+1}`.
//!
//! Permittivity takes the edge-matrix role of [`Star3`] and permeability the
//! face-matrix role. Walls are perfect conductors: tangential `E` is zero.

use std::f64::consts::{PI, SQRT_2};

use super::dt_from_bound;
use crate::error::{invalid, Result};
use crate::leapfrog::{init_state, system_step, AdjointPair, SystemState, TaylorVariant};
use crate::mimetic3d::{
    curl3, curl3_star, div3, div3_star, inner3, Boundary, Field3, FieldKind, Grid3, Star3,
};

/// `E` at level `n` in `f`, `H` at `n + 1/2` in `g_half`.
pub type MaxwellState3 = SystemState<Field3, Field3>;

/// `A E = -mu^-1 R E` and `A* H = -eps^-1 R* H`.
#[derive(Debug, Clone, Copy)]
pub struct MaxwellOps<'a> {
    pub materials: &'a Star3,
    pub grid: &'a Grid3,
}

impl<'a> MaxwellOps<'a> {
    pub fn new(materials: &'a Star3, grid: &'a Grid3) -> Result<Self> {
        materials.require_exact_inverse()?;
        materials.star(&Field3::zeros(FieldKind::Edge, grid), grid)?;
        Ok(Self { materials, grid })
    }

    /// `sqrt(1 / (min eps min mu)) * 2 * sqrt(1/hx^2 + 1/hy^2 + 1/hz^2)`.
    pub fn bound(&self) -> f64 {
        let lo = self.materials.big_a.lower_bound() * self.materials.big_b.lower_bound();
        2.0 * self.grid.inverse_spacing_norm() / lo.sqrt()
    }
}

fn negate(mut f: Field3) -> Field3 {
    for a in &mut f.comps {
        a.mapv_inplace(|x| -x);
    }
    f
}

impl AdjointPair for MaxwellOps<'_> {
    type X = Field3;
    type Y = Field3;

    fn apply_a(&self, e: &Field3) -> Field3 {
        let re = curl3(e, self.grid).expect("edge vector");
        negate(self.materials.star(&re, self.grid).expect("face vector"))
    }

    fn apply_a_star(&self, h: &Field3) -> Field3 {
        let rh = curl3_star(h, self.grid).expect("dual edge vector");
        let mut e = self
            .materials
            .star(&rh, self.grid)
            .expect("dual face vector");
        e.pin_boundary(self.grid);
        negate(e)
    }

    fn inner_x(&self, a: &Field3, b: &Field3) -> f64 {
        inner3(a, b, self.materials, self.grid).expect("edge vectors")
    }

    fn inner_y(&self, a: &Field3, b: &Field3) -> f64 {
        inner3(a, b, self.materials, self.grid).expect("dual edge vectors")
    }

    fn check_x(&self, f: &Field3) -> Result<()> {
        f.check(FieldKind::Edge, self.grid, "maxwell E")
    }

    fn check_y(&self, g: &Field3) -> Result<()> {
        g.check(FieldKind::DualEdge, self.grid, "maxwell H")
    }

    fn norm_bound(&self) -> Option<f64> {
        Some(self.bound())
    }
}

pub fn suggest_dt_maxwell(materials: &Star3, grid: &Grid3, safety: f64) -> Result<f64> {
    let ops = MaxwellOps::new(materials, grid)?;
    dt_from_bound(ops.bound(), safety)
}

/// Pins tangential `E` and takes the Taylor start for `H`.
pub fn maxwell_initial_state(
    ops: &MaxwellOps<'_>,
    mut e0: Field3,
    h0: &Field3,
    dt: f64,
) -> Result<MaxwellState3> {
    e0.pin_boundary(ops.grid);
    init_state(ops, e0, h0, dt, TaylorVariant::Oscillator)
}

fn l2(f: &Field3, grid: &Grid3) -> f64 {
    let s: f64 = f.comps.iter().flat_map(|a| a.iter()).map(|x| x * x).sum();
    (s * grid.dv()).sqrt()
}

/// `(|D*(eps E)|, |D(mu H)|)` in the volume-weighted 2-norm. On a bounded box
/// the electric divergence is taken at interior nodes only; wall nodes see the
/// surface charge of the conductor.
pub fn maxwell_divergence(state: &MaxwellState3, ops: &MaxwellOps<'_>) -> Result<[f64; 2]> {
    let g = ops.grid;
    let de = div3_star(&ops.materials.star(&state.f, g)?, g)?;
    let mut de = de.relabel(FieldKind::DualCell)?;
    if g.boundary == Boundary::Bounded {
        // Dual cells share node storage, so the node boundary mask applies.
        let mut as_node = de.relabel(FieldKind::Node)?;
        as_node.pin_boundary(g);
        de = as_node.relabel(FieldKind::DualCell)?;
    }
    let dh = div3(&ops.materials.star(&state.g_half, g)?, g)?;
    Ok([l2(&de, g), l2(&dh, g)])
}

/// The cavity mode with `E = (0, 0, sin(pi x) sin(pi y) cos(w t))` and
/// `w = sqrt(2) pi` in the unit cube with `eps = mu = 1`.
pub fn te110_fields(grid: &Grid3, t_e: f64, t_h: f64) -> (Field3, Field3) {
    let w = SQRT_2 * PI;
    let e = Field3::from_fn(FieldKind::Edge, grid, |c, p| {
        if c == 2 {
            (PI * p[0]).sin() * (PI * p[1]).sin() * (w * t_e).cos()
        } else {
            0.0
        }
    });
    let amp = -(PI / w) * (w * t_h).sin();
    let h = Field3::from_fn(FieldKind::DualEdge, grid, |c, p| match c {
        0 => amp * (PI * p[0]).sin() * (PI * p[1]).cos(),
        1 => -amp * (PI * p[0]).cos() * (PI * p[1]).sin(),
        _ => 0.0,
    });
    (e, h)
}

/// Max error in `E` after `nt` steps to `t_final` on an `n^3` cavity, started
/// from the exact half-step magnetic field.
pub fn te110_error(n: usize, nt: usize, t_final: f64) -> Result<f64> {
    if nt == 0 {
        return Err(invalid("nt", "need at least one step"));
    }
    let grid = Grid3::cube(n, Boundary::Bounded)?;
    let mats = Star3::trivial(&grid);
    let ops = MaxwellOps::new(&mats, &grid)?;
    let dt = t_final / nt as f64;
    let (mut e, h) = te110_fields(&grid, 0.0, 0.5 * dt);
    e.pin_boundary(&grid);
    let mut state = crate::leapfrog::state_from_half(&ops, e, h, dt)?;
    for _ in 0..nt {
        system_step(&mut state, &ops)?;
    }
    let (exact, _) = te110_fields(&grid, t_final, t_final);
    Ok(state.f.sub(&exact).max_abs())
}
