//! Grid-halving convergence studies on `nx = 2^k + 1` grids.
//!
//! Errors are measured either against the standing mode (constant speed) or by
//! comparing each run with the next finer one at the coarse points.

use super::{initial_state, run, Grid1D, MaterialPreset, Run1D, StandingMode, Start};
use crate::error::{invalid, shape, Result};
use crate::leapfrog::TaylorVariant;

/// Order estimates `ln(E1/E2) / ln(dx1/dx2)` for each adjacent pair of `(dx, error)`.
pub fn estimate_order(errors: &[(f64, f64)]) -> Result<Vec<f64>> {
    if errors.len() < 2 {
        return Err(invalid("errors", "need at least two entries"));
    }
    if errors.iter().any(|(h, e)| !(*h > 0.0) || !(*e > 0.0)) {
        return Err(invalid("errors", "spacings and errors must be positive"));
    }
    Ok(errors
        .windows(2)
        .map(|w| (w[0].1.ln() - w[1].1.ln()) / (w[0].0.ln() - w[1].0.ln()))
        .collect())
}

/// Pointwise error estimate on the coarse primal points.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorField {
    pub dx: f64,
    pub x: Vec<f64>,
    pub er: Vec<f64>,
    /// `er / dx^2`; flat curves across refinements indicate second order.
    pub er_scaled: Vec<f64>,
}

impl ErrorField {
    fn new(dx: f64, x: Vec<f64>, er: Vec<f64>) -> Self {
        let er_scaled = er.iter().map(|e| e / (dx * dx)).collect();
        Self {
            dx,
            x,
            er,
            er_scaled,
        }
    }

    pub fn max(&self) -> f64 {
        self.er.iter().copied().fold(0.0, f64::max)
    }
}

/// `|u_coarse(x_i) - u_fine(x_{2i})|` for nested grids.
pub fn refine_compare(
    coarse: &Grid1D,
    u_coarse: &[f64],
    fine: &Grid1D,
    u_fine: &[f64],
) -> Result<ErrorField> {
    let nested = fine.nx == 2 * (coarse.nx - 1) + 1
        && fine.nt == 2 * coarse.nt
        && (fine.a - coarse.a).abs() <= 1e-12 * coarse.length()
        && (fine.b - coarse.b).abs() <= 1e-12 * coarse.length();
    if !nested {
        return Err(invalid(
            "grids",
            "fine grid must halve both dx and dt of the coarse grid",
        ));
    }
    if u_coarse.len() != coarse.nx {
        return Err(shape("coarse solution", coarse.nx, u_coarse.len()));
    }
    if u_fine.len() != fine.nx {
        return Err(shape("fine solution", fine.nx, u_fine.len()));
    }
    let er = u_coarse
        .iter()
        .enumerate()
        .map(|(i, u)| (u - u_fine[2 * i]).abs())
        .collect();
    Ok(ErrorField::new(coarse.dx, coarse.primal_points(), er))
}

/// Pointwise error against the standing mode at the final time.
pub fn analytic_error(run: &Run1D, mode: &StandingMode) -> ErrorField {
    let g = &run.grid;
    let t = g.t_final();
    let x = g.primal_points();
    let er = run
        .u()
        .iter()
        .zip(&x)
        .map(|(u, &x)| (u - mode.u(x, t)).abs())
        .collect();
    ErrorField::new(g.dx, x, er)
}

/// Time step selection for a family of grids.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stepping {
    /// Fixed `s dt / dx`; `t_final` must be a whole number of steps on every grid.
    Courant(f64),
    /// `nt = 2^(k + f)`. With `None`, the smallest `f` giving `s dt / dx <= 0.9`.
    PowerOfTwo(Option<u32>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorMeasure {
    /// Against the standing mode; constant speed only.
    Analytic,
    /// Against the next finer run.
    Refinement,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepConfig {
    pub preset: MaterialPreset,
    pub k_min: u32,
    pub k_max: u32,
    pub a: f64,
    pub b: f64,
    pub t_final: f64,
    pub stepping: Stepping,
    pub mode: u32,
    pub measure: ErrorMeasure,
}

impl SweepConfig {
    pub fn new(preset: MaterialPreset, k_min: u32, k_max: u32, t_final: f64) -> Self {
        Self {
            preset,
            k_min,
            k_max,
            a: 0.0,
            b: 1.0,
            t_final,
            stepping: Stepping::PowerOfTwo(None),
            mode: 1,
            measure: if preset.is_constant() {
                ErrorMeasure::Analytic
            } else {
                ErrorMeasure::Refinement
            },
        }
    }

    pub fn start(&self) -> Start {
        if self.preset.is_constant() {
            Start::ExactMode { m: self.mode }
        } else {
            Start::SineTaylor {
                m: self.mode,
                variant: TaylorVariant::Oscillator,
            }
        }
    }

    fn validate(&self) -> Result<()> {
        if self.k_min < 2 || self.k_max < self.k_min || self.k_max > 24 {
            return Err(invalid(
                "k",
                format!(
                    "need 2 <= k_min <= k_max <= 24, got {}..{}",
                    self.k_min, self.k_max
                ),
            ));
        }
        if self.measure == ErrorMeasure::Analytic && !self.preset.is_constant() {
            return Err(invalid(
                "measure",
                "analytic errors need a constant speed preset",
            ));
        }
        if self.k_max == self.k_min && self.measure == ErrorMeasure::Analytic {
            return Err(invalid("k", "need at least two grids to estimate an order"));
        }
        Ok(())
    }

    fn last_k(&self) -> u32 {
        match self.measure {
            ErrorMeasure::Analytic => self.k_max,
            ErrorMeasure::Refinement => self.k_max + 1,
        }
    }

    /// Largest `s` over every grid the sweep will use.
    fn max_speed(&self) -> Result<f64> {
        let mut s: f64 = 0.0;
        for k in self.k_min..=self.last_k() {
            let g = Grid1D::new(self.a, self.b, (1 << k) + 1, self.t_final, 1)?;
            s = s.max(super::cfl_speed(&self.preset.materials(&g)?));
        }
        Ok(s)
    }

    fn power_f(&self, speed: f64) -> u32 {
        let ratio = speed * self.t_final / (self.b - self.a);
        let mut f = 0;
        while ratio / f64::from(1u32 << f) > 0.9 {
            f += 1;
        }
        f
    }

    /// The grid for level `k`.
    pub fn grid(&self, k: u32) -> Result<Grid1D> {
        let nx = (1usize << k) + 1;
        let dx = (self.b - self.a) / (nx - 1) as f64;
        let speed = self.max_speed()?;
        let nt = match self.stepping {
            Stepping::Courant(r) => {
                if !(r > 0.0) {
                    return Err(invalid("courant", format!("must be > 0, got {r}")));
                }
                let steps = self.t_final * speed / (r * dx);
                let nt = steps.round();
                if (steps - nt).abs() > 1e-9 * steps || nt < 1.0 {
                    return Err(invalid(
                        "t_final",
                        format!(
                            "{} is not a whole number of steps at courant {r} on nx = {nx}",
                            self.t_final
                        ),
                    ));
                }
                nt as usize
            }
            Stepping::PowerOfTwo(f) => {
                let f = f.unwrap_or_else(|| self.power_f(speed));
                1usize << (k + f)
            }
        };
        Grid1D::new(self.a, self.b, nx, self.t_final, nt)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub k: u32,
    pub nx: usize,
    pub dx: f64,
    pub nt: usize,
    pub dt: f64,
    pub error: f64,
    /// Order from this row and the previous one.
    pub order: Option<f64>,
    pub drift_n: f64,
    pub drift_half: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    pub fields: Vec<ErrorField>,
}

impl Sweep {
    pub fn orders(&self) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.order).collect()
    }

    /// Order from the two finest rows.
    pub fn final_order(&self) -> Option<f64> {
        self.rows.last().and_then(|r| r.order)
    }

    pub fn max_drift(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.drift_n.max(r.drift_half))
            .fold(0.0, f64::max)
    }
}

/// Runs one grid of the sweep with conserved quantities recorded at every step.
pub fn run_level(cfg: &SweepConfig, k: u32) -> Result<Run1D> {
    let g = cfg.grid(k)?;
    let m = cfg.preset.materials(&g)?;
    let s = initial_state(&g, &m, cfg.start())?;
    run(&g, &m, s, 1)
}

pub fn convergence_sweep(cfg: &SweepConfig) -> Result<Sweep> {
    cfg.validate()?;
    let runs = (cfg.k_min..=cfg.last_k())
        .map(|k| run_level(cfg, k))
        .collect::<Result<Vec<_>>>()?;
    let mut fields = Vec::new();
    match cfg.measure {
        ErrorMeasure::Analytic => {
            let c = match cfg.preset {
                MaterialPreset::Constant { c } => c,
                _ => unreachable!("validated"),
            };
            for r in &runs {
                fields.push(analytic_error(r, &StandingMode::on(&r.grid, cfg.mode, c)));
            }
        }
        ErrorMeasure::Refinement => {
            for w in runs.windows(2) {
                fields.push(refine_compare(&w[0].grid, w[0].u(), &w[1].grid, w[1].u())?);
            }
        }
    }
    let mut rows: Vec<SweepRow> = Vec::new();
    for (i, (r, f)) in runs.iter().zip(&fields).enumerate() {
        let error = f.max();
        let order = rows
            .last()
            .and_then(|p| estimate_order(&[(p.dx, p.error), (r.grid.dx, error)]).ok())
            .map(|v| v[0]);
        let (drift_n, drift_half) = r.drift();
        rows.push(SweepRow {
            k: cfg.k_min + i as u32,
            nx: r.grid.nx,
            dx: r.grid.dx,
            nt: r.grid.nt,
            dt: r.grid.dt,
            error,
            order,
            drift_n,
            drift_half,
        });
    }
    Ok(Sweep {
        config: *cfg,
        rows,
        fields,
    })
}
