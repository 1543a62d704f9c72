//! Positivity preserving updates for a cell-centred density in 1D: first order
//! upwind transport and explicit (FTCS) diffusion.
//!
//! Cells are `0..m`, edges `0..=m`; edge `e` separates cells `e - 1` and `e`.
//! Outside the domain the density is zero, so material that crosses the ends is
//! removed and added to an outflow accumulator. `mass + outflow` is therefore
//! conserved to round-off.

use crate::error::{invalid, shape, Result};

/// Density state with the amount of mass that has left through the ends.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityState {
    pub rho: Vec<f64>,
    pub dx: f64,
    /// Mass that has left the domain.
    pub outflow: f64,
    pub step: usize,
}

impl DensityState {
    pub fn new(rho: Vec<f64>, dx: f64) -> Result<Self> {
        if rho.is_empty() {
            return Err(invalid("rho", "needs at least one cell"));
        }
        if !(dx > 0.0) || !dx.is_finite() {
            return Err(invalid("dx", format!("must be finite and > 0, got {dx}")));
        }
        Ok(Self {
            rho,
            dx,
            outflow: 0.0,
            step: 0,
        })
    }

    pub fn cells(&self) -> usize {
        self.rho.len()
    }

    /// Mass still in the domain, summed left to right.
    pub fn mass(&self) -> f64 {
        self.rho.iter().sum::<f64>() * self.dx
    }

    /// Mass in the domain plus mass that has left.
    pub fn total_mass(&self) -> f64 {
        self.mass() + self.outflow
    }

    pub fn min(&self) -> f64 {
        self.rho.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Cell centres for a domain starting at `x0`.
    pub fn centres(&self, x0: f64) -> Vec<f64> {
        (0..self.cells())
            .map(|c| x0 + (c as f64 + 0.5) * self.dx)
            .collect()
    }
}

/// Outcome of the time step guards for one update.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepCheck {
    /// `max |v| dt / dx` (transport) or `max (D_e + D_{e+1}) dt / dx^2` (diffusion).
    pub number: f64,
    /// `number <= 1`.
    pub within_limit: bool,
    /// Largest fraction of a cell's content removed in one step. The update keeps
    /// the density non-negative exactly when this is at most one.
    pub max_outflow_fraction: f64,
}

impl StepCheck {
    pub fn preserves_positivity(&self) -> bool {
        self.max_outflow_fraction <= 1.0
    }
}

/// Guard for upwind transport with edge velocities `v`.
pub fn transport_check(v: &[f64], dx: f64, dt: f64) -> StepCheck {
    let r = dt / dx;
    let number = v.iter().fold(0.0_f64, |m, x| m.max(x.abs())) * r;
    let max_outflow_fraction = v
        .windows(2)
        .map(|w| r * (w[1].max(0.0) - w[0].min(0.0)))
        .fold(0.0, f64::max);
    StepCheck {
        number,
        within_limit: number <= 1.0,
        max_outflow_fraction,
    }
}

/// Guard for diffusion with edge coefficients `d`.
pub fn diffusion_check(d: &[f64], dx: f64, dt: f64) -> StepCheck {
    let r = dt / (dx * dx);
    let number = d.windows(2).map(|w| r * (w[0] + w[1])).fold(0.0, f64::max);
    StepCheck {
        number,
        within_limit: number <= 1.0,
        max_outflow_fraction: number,
    }
}

/// One upwind step. `v` holds one velocity per edge (`cells + 1` entries).
///
/// Each cell first loses what flows out through its two edges and then gains
/// what flows in, which makes a unit Courant number an exact index shift.
pub fn transport_step(
    state: &DensityState,
    v: &[f64],
    dt: f64,
) -> Result<(DensityState, StepCheck)> {
    let m = state.cells();
    if v.len() != m + 1 {
        return Err(shape("edge velocities", m + 1, v.len()));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    let r = dt / state.dx;
    let rho = &state.rho;
    let at = |c: isize| -> f64 {
        if c < 0 || c as usize >= m {
            0.0
        } else {
            rho[c as usize]
        }
    };
    let mut next = Vec::with_capacity(m);
    for c in 0..m {
        let (vl, vr) = (v[c], v[c + 1]);
        let out_right = r * vr.max(0.0) * rho[c];
        let out_left = -r * vl.min(0.0) * rho[c];
        let in_left = r * vl.max(0.0) * at(c as isize - 1);
        let in_right = -r * vr.min(0.0) * at(c as isize + 1);
        next.push(((rho[c] - out_right) - out_left) + in_left + in_right);
    }
    let left_domain = -r * v[0].min(0.0) * rho[0] + r * v[m].max(0.0) * rho[m - 1];
    let out = DensityState {
        rho: next,
        dx: state.dx,
        outflow: state.outflow + left_domain * state.dx,
        step: state.step + 1,
    };
    Ok((out, transport_check(v, state.dx, dt)))
}

/// One explicit diffusion step with edge coefficients `d` (`cells + 1` entries).
pub fn diffusion_step(
    state: &DensityState,
    d: &[f64],
    dt: f64,
) -> Result<(DensityState, StepCheck)> {
    let m = state.cells();
    if d.len() != m + 1 {
        return Err(shape("edge diffusivities", m + 1, d.len()));
    }
    if d.iter().any(|x| !(*x >= 0.0)) {
        return Err(invalid("diffusivity", "must be non-negative"));
    }
    if !(dt > 0.0) {
        return Err(invalid("dt", format!("must be > 0, got {dt}")));
    }
    let r = dt / (state.dx * state.dx);
    let rho = &state.rho;
    let at = |c: isize| -> f64 {
        if c < 0 || c as usize >= m {
            0.0
        } else {
            rho[c as usize]
        }
    };
    let next = (0..m)
        .map(|c| {
            let keep = rho[c] * (1.0 - r * (d[c] + d[c + 1]));
            keep + r * d[c] * at(c as isize - 1) + r * d[c + 1] * at(c as isize + 1)
        })
        .collect();
    let left_domain = r * (d[0] * rho[0] + d[m] * rho[m - 1]);
    let out = DensityState {
        rho: next,
        dx: state.dx,
        outflow: state.outflow + left_domain * state.dx,
        step: state.step + 1,
    };
    Ok((out, diffusion_check(d, state.dx, dt)))
}

/// Lax-Wendroff step on a periodic grid with constant Courant number `nu`.
/// Second order but not positivity preserving; kept as a counterexample.
pub fn lax_wendroff_step(rho: &[f64], nu: f64) -> Vec<f64> {
    let m = rho.len();
    (0..m)
        .map(|i| {
            let l = rho[(i + m - 1) % m];
            let r = rho[(i + 1) % m];
            rho[i] - 0.5 * nu * (r - l) + 0.5 * nu * nu * (r - 2.0 * rho[i] + l)
        })
        .collect()
}

/// Edge coordinates for a domain `[x0, x0 + cells*dx]`.
pub fn edge_coordinates(cells: usize, x0: f64, dx: f64) -> Vec<f64> {
    (0..=cells).map(|e| x0 + e as f64 * dx).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(m: usize) -> Vec<f64> {
        (0..m)
            .map(|c| {
                if (m / 4..m / 2).contains(&c) {
                    1.0
                } else {
                    0.0
                }
            })
            .collect()
    }

    #[test]
    fn unit_courant_is_exact_shift() {
        let m = 64;
        let mut s = DensityState::new(square(m), 0.25).unwrap();
        let v = vec![1.0; m + 1];
        for _ in 0..10 {
            s = transport_step(&s, &v, 0.25).unwrap().0;
        }
        let mut expect = vec![0.0; m];
        expect[10..].copy_from_slice(&square(m)[..m - 10]);
        assert_eq!(s.rho, expect);

        let mut s = DensityState::new(square(m), 0.25).unwrap();
        let v = vec![-1.0; m + 1];
        s = transport_step(&s, &v, 0.25).unwrap().0;
        let mut expect = vec![0.0; m];
        expect[..m - 1].copy_from_slice(&square(m)[1..]);
        assert_eq!(s.rho, expect);
    }

    #[test]
    fn unit_shift_is_exact_for_arbitrary_values() {
        let rho: Vec<f64> = (0..20)
            .map(|i| (i as f64 * 0.37).sin().abs() + 1e-9 * i as f64)
            .collect();
        let s = DensityState::new(rho.clone(), 0.5).unwrap();
        let out = transport_step(&s, &[2.0; 21], 0.25).unwrap().0;
        assert_eq!(out.rho[0], 0.0);
        assert_eq!(&out.rho[1..], &rho[..19]);
    }

    #[test]
    fn outflow_accounts_for_mass() {
        let m = 40;
        let mut s = DensityState::new(square(m), 0.1).unwrap();
        let v = vec![0.7; m + 1];
        let m0 = s.total_mass();
        for _ in 0..100 {
            s = transport_step(&s, &v, 0.1).unwrap().0;
        }
        assert!(s.outflow > 0.0);
        assert!((s.total_mass() - m0).abs() <= 1e-13 * m0);
    }

    #[test]
    fn guard_flags_large_courant() {
        let c = transport_check(&[1.0, 2.0, -3.0], 0.1, 0.04);
        assert!((c.number - 1.2).abs() < 1e-12);
        assert!(!c.within_limit);
        let c = transport_check(&[-1.0, 1.0], 1.0, 0.75);
        assert!(c.within_limit);
        assert!(!c.preserves_positivity());
    }

    #[test]
    fn diffusion_spike_stays_non_negative() {
        let m = 101;
        let mut rho = vec![0.0; m];
        rho[50] = 1.0;
        let dx = 0.01;
        let d = vec![1.0; m + 1];
        let dt = 0.5 * dx * dx;
        let mut s = DensityState::new(rho, dx).unwrap();
        let m0 = s.total_mass();
        for _ in 0..1000 {
            let (n, chk) = diffusion_step(&s, &d, dt).unwrap();
            assert!(chk.within_limit);
            s = n;
            assert!(s.min() >= 0.0);
        }
        assert!((s.total_mass() - m0).abs() <= 1e-13 * m0);
    }

    #[test]
    fn diffusion_above_limit_goes_negative() {
        let mut rho = vec![0.0; 11];
        rho[5] = 1.0;
        let s = DensityState::new(rho, 1.0).unwrap();
        let (n, chk) = diffusion_step(&s, &[1.0; 12], 0.6).unwrap();
        assert!(!chk.within_limit);
        assert!(n.rho[5] < 0.0);
    }

    #[test]
    fn lax_wendroff_undershoots() {
        let mut rho = vec![0.0; 9];
        rho[4] = 1.0;
        let nu = 0.5;
        let out = lax_wendroff_step(&rho, nu);
        assert!((out[3] - 0.5 * (nu * nu - nu)).abs() < 1e-15);
        assert!(out[3] < 0.0);
    }

    #[test]
    fn guard_at_the_edge_of_the_limit() {
        assert!(transport_check(&[1.0; 5], 1.0, 0.99).within_limit);
        assert!(!transport_check(&[1.0; 5], 1.0, 1.01).within_limit);
        assert!(diffusion_check(&[0.5; 5], 1.0, 0.99).within_limit);
        assert!(!diffusion_check(&[0.5; 5], 1.0, 1.01).within_limit);
    }

    #[test]
    fn still_media_leave_density_alone() {
        let rho: Vec<f64> = (0..12).map(|i| 1.0 + (i as f64).sin().abs()).collect();
        let s = DensityState::new(rho.clone(), 0.1).unwrap();
        assert_eq!(transport_step(&s, &[0.0; 13], 0.05).unwrap().0.rho, rho);
        assert_eq!(diffusion_step(&s, &[0.0; 13], 0.05).unwrap().0.rho, rho);
        // A uniform density has no interior fluxes; only the end cells leak.
        let s = DensityState::new(vec![2.0; 12], 0.1).unwrap();
        let out = diffusion_step(&s, &[1.0; 13], 0.004).unwrap().0;
        assert!(out.rho[1..11].iter().all(|&x| x == 2.0));
        assert!(out.rho[0] < 2.0 && out.rho[11] < 2.0);
    }

    fn sign_flow(m: usize, dx: f64, sign: f64) {
        let edges = edge_coordinates(m, -1.0, dx);
        let v: Vec<f64> = edges.iter().map(|x| sign * x).collect();
        let dt = dx;
        let mut s = DensityState::new(vec![1.0; m], dx).unwrap();
        let m0 = s.total_mass();
        for _ in 0..1000 {
            let (n, chk) = transport_step(&s, &v, dt).unwrap();
            assert!(chk.within_limit && chk.preserves_positivity());
            s = n;
            let max = s.rho.iter().copied().fold(0.0, f64::max);
            assert!(s.min() >= -1e-16 * max);
        }
        assert!(
            (s.total_mass() - m0).abs() <= 1e-14 * m0,
            "{}",
            (s.total_mass() - m0).abs() / m0
        );
    }

    #[test]
    fn collapse_and_expand_keep_mass_and_sign() {
        sign_flow(100, 0.02, -1.0);
        sign_flow(100, 0.02, 1.0);
    }

    #[test]
    fn rejects_bad_shapes() {
        let s = DensityState::new(vec![1.0; 4], 0.1).unwrap();
        assert!(transport_step(&s, &[1.0; 4], 0.1).is_err());
        assert!(diffusion_step(&s, &[1.0; 6], 0.1).is_err());
        assert!(diffusion_step(&s, &[-1.0; 5], 0.1).is_err());
        assert!(DensityState::new(vec![], 0.1).is_err());
    }
}
