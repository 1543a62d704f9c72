use std::fs::File;
use std::io::BufWriter;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::args::*;
use super::report::{write_series, Check, Output, RunReport};
use crate::error::{invalid, Error, Result};
use crate::leapfrog::{
    advance, cfl_limit, check_adjointness, init_state, DensePair, TaylorVariant,
};
use crate::mimetic3d::{write_field, Boundary, Field3, FieldKind, Grid3};
use crate::oscillator::{self, InitMode, OscParams, Stability};
use crate::positivity::{self, DensityState, StepCheck};
use crate::wave1d::convergence::{convergence_sweep, ErrorMeasure, Stepping, Sweep, SweepConfig};
use crate::wave1d::materials::MaterialPreset;
use crate::wave1d::{self, cfl_speed, Grid1D, Materials1D, StandingMode, Start};
use crate::wave2d::{run_wave2d, ExactMode2, Grid2, Start2};
use crate::wave3d::{
    cavity_mode, maxwell_divergence, maxwell_initial_state, scalar_initial_state, suggest_dt,
    suggest_dt_maxwell, te110_fields, Materials3, MaxwellOps, ScalarWaveOps,
};

/// Largest `|u|` of a run that still counts as bounded when started at unit amplitude.
const BOUNDED: f64 = 10.0;

fn drift_checks(rep: &mut RunReport, drift: (f64, f64), tol: f64) {
    rep.drift = Some([drift.0, drift.1]);
    rep.check(Check::at_most("drift C_n", drift.0, tol));
    rep.check(Check::at_most("drift C_half", drift.1, tol));
}

pub fn oscillator(a: &OscillatorArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("oscillator", a)?;
    let p = OscParams::new(a.omega, a.dt, a.steps)?;
    let init = match a.init {
        OscInit::Taylor => InitMode::Taylor,
        OscInit::Exact => InitMode::Exact,
    };
    let tr = oscillator::simulate(&p, a.u0, a.v0, init);
    let mut t = out.csv("", &["step", "t", "C_n", "C_half", "u", "v_half"], &mut rep)?;
    for n in 0..tr.t.len() {
        t.row(vec![
            n.into(),
            tr.t[n].into(),
            tr.c_n[n].into(),
            tr.c_half[n].into(),
            tr.u[n].into(),
            tr.v_half[n].into(),
        ])?;
    }
    t.finish()?;
    rep.series = (0..tr.t.len())
        .map(|n| super::SeriesPoint {
            step: n,
            t: tr.t[n],
            c_n: tr.c_n[n],
            c_half: tr.c_half[n],
        })
        .collect();
    let mut t = out.csv(
        "errors",
        &["step", "t", "u_error", "v_half_error"],
        &mut rep,
    )?;
    for n in 0..tr.t.len() {
        let (u, _) = oscillator::exact(a.u0, a.v0, a.omega, tr.t[n]);
        let (_, v) = oscillator::exact(a.u0, a.v0, a.omega, tr.t[n] + 0.5 * a.dt);
        t.row(vec![
            n.into(),
            tr.t[n].into(),
            (tr.u[n] - u).into(),
            (tr.v_half[n] - v).into(),
        ])?;
    }
    t.finish()?;
    let t_end = a.steps as f64 * a.dt;
    let (u_exact, _) = oscillator::exact(a.u0, a.v0, a.omega, t_end);
    rep.metric("courant", p.courant());
    rep.metric("final_error_u", (tr.u[a.steps] - u_exact).abs());
    let stable = oscillator::stability_probe(&p) == Stability::Stable;
    rep.metric("probe_stable", f64::from(u8::from(stable)));
    match a.expect {
        Expect::Stable => {
            rep.check(Check::holds("stability probe bounded", stable));
            drift_checks(
                &mut rep,
                (tr.relative_drift_n(), tr.relative_drift_half()),
                a.tol,
            );
        }
        Expect::Unstable => {
            rep.drift = Some([tr.relative_drift_n(), tr.relative_drift_half()]);
            rep.check(Check::holds("stability probe divergent", !stable));
        }
    }
    Ok(rep)
}

pub fn system(a: &SystemArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("system", a)?;
    if a.rows == 0 || a.cols == 0 {
        return Err(invalid("rows", "dimensions must be positive"));
    }
    let variant: TaylorVariant = a.taylor.parse()?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let mat: Vec<f64> = (0..a.rows * a.cols)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    let wx: Vec<f64> = (0..a.cols).map(|_| rng.gen_range(0.5..2.0)).collect();
    let wy: Vec<f64> = (0..a.rows).map(|_| rng.gen_range(0.5..2.0)).collect();
    let ops = DensePair::new(a.rows, a.cols, mat, wx, wy)?;
    let bound = ops.frobenius_bound();
    if !(bound > 0.0) {
        return Err(invalid("rows", "operator is zero"));
    }
    let dt = a.safety * cfl_limit(bound);
    let (m, n) = (a.rows, a.cols);
    let adj = check_adjointness(
        &ops,
        100,
        a.seed,
        |r| (0..n).map(|_| r.gen_range(-1.0..1.0)).collect(),
        |r| (0..m).map(|_| r.gen_range(-1.0..1.0)).collect(),
    );
    let f0: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let g0: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut st = init_state(&ops, f0, &g0, dt, variant)?;
    let h = advance(&mut st, &ops, a.steps, a.record_every, |_| Vec::new())?;
    write_series(
        out,
        &h.series,
        ["f_norm2", "gbar_norm2", "Af_term"],
        &[],
        &mut rep,
    )?;
    rep.metric("dt", dt);
    rep.metric("norm_bound", bound);
    rep.check(Check::at_most("adjoint residual", adj.max_residual, 1e-12));
    drift_checks(&mut rep, h.drift(), a.tol);
    Ok(rep)
}

pub fn wave1d(a: &Wave1dArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("wave1d", a)?;
    let preset: MaterialPreset = a.material.parse()?;
    let probe = Grid1D::new(a.a, a.b, a.nx, a.t_final, 1)?;
    let speed = cfl_speed(&preset.materials(&probe)?);
    let nt = match a.nt {
        Some(n) => n,
        None => {
            if !(a.courant > 0.0) {
                return Err(invalid(
                    "courant",
                    format!("must be > 0, got {}", a.courant),
                ));
            }
            (a.t_final * speed / (a.courant * probe.dx)).ceil().max(1.0) as usize
        }
    };
    let grid = Grid1D::new(a.a, a.b, a.nx, a.t_final, nt)?;
    let m = preset.materials(&grid)?;
    let start = match (a.start.as_str(), preset) {
        ("exact", _) | ("auto", MaterialPreset::Constant { .. }) => Start::ExactMode { m: a.mode },
        ("taylor", _) | ("auto", _) => Start::SineTaylor {
            m: a.mode,
            variant: TaylorVariant::Oscillator,
        },
        (o, _) => {
            return Err(Error::Config(format!(
                "unknown start `{o}` (expected exact, taylor or auto)"
            )))
        }
    };
    let state = wave1d::initial_state(&grid, &m, start)?;
    let run = wave1d::run(&grid, &m, state, a.record_every)?;
    write_series(
        out,
        &run.series,
        ["u_norm2", "vbar_norm2", "Au_term"],
        &[],
        &mut rep,
    )?;
    rep.metric("courant", grid.courant(speed));
    rep.metric("dt", grid.dt);
    rep.metric("max_abs_u", run.max_abs_u);
    if let Materials1D::Constant { c } = m {
        let e = wave1d::convergence::analytic_error(&run, &StandingMode::on(&grid, a.mode, c));
        let mut t = out.csv("errors", &["x", "Er", "Er_dx2"], &mut rep)?;
        for i in 0..e.x.len() {
            t.row(vec![e.x[i].into(), e.er[i].into(), e.er_scaled[i].into()])?;
        }
        t.finish()?;
        rep.metric("max_error", e.max());
    }
    let bounded = run.max_abs_u.is_finite()
        && run.max_abs_u <= BOUNDED
        && run.u().iter().all(|x| x.is_finite());
    match a.expect {
        Expect::Stable => {
            rep.check(Check::holds("solution bounded", bounded));
            drift_checks(&mut rep, run.drift(), a.tol);
        }
        Expect::Unstable => {
            rep.drift = Some(run.drift().into());
            rep.check(Check::holds("solution divergent", !bounded));
        }
    }
    Ok(rep)
}

fn parse_k(s: &str) -> Result<(u32, u32)> {
    let bad = || Error::Config(format!("levels must look like `4..8`, got `{s}`"));
    let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
    let hi = hi.strip_prefix('=').unwrap_or(hi);
    let lo = lo.trim().parse().map_err(|_| bad())?;
    let hi = hi.trim().parse().map_err(|_| bad())?;
    Ok((lo, hi))
}

/// Nominal half period `L / (m c)`; variable presets use `c = 1`.
fn half_period(preset: MaterialPreset, mode: u32) -> f64 {
    let c = match preset {
        MaterialPreset::Constant { c } => c,
        _ => 1.0,
    };
    1.0 / (f64::from(mode.max(1)) * c)
}

fn parse_final(s: &str, half: f64) -> Result<f64> {
    match s.trim() {
        "full-period" => Ok(2.0 * half),
        "half-period" => Ok(half),
        "generic" => Ok(0.75 * half),
        o => o
            .parse::<f64>()
            .ok()
            .filter(|t| *t > 0.0 && t.is_finite())
            .ok_or_else(|| {
                Error::Config(format!("final time must be > 0 or a named time, got `{o}`"))
            }),
    }
}

fn parse_stepping(s: &str) -> Result<Stepping> {
    let (name, arg) = s.split_once(':').unwrap_or((s, ""));
    let bad = || {
        Error::Config(format!(
            "bad stepping `{s}` (expected courant:R, pow2 or pow2:F)"
        ))
    };
    match name.trim() {
        "courant" => Ok(Stepping::Courant(arg.trim().parse().map_err(|_| bad())?)),
        "pow2" if arg.is_empty() => Ok(Stepping::PowerOfTwo(None)),
        "pow2" => Ok(Stepping::PowerOfTwo(Some(
            arg.trim().parse().map_err(|_| bad())?,
        ))),
        _ => Err(bad()),
    }
}

fn parse_measure(s: &str, auto: ErrorMeasure) -> Result<ErrorMeasure> {
    match s.trim() {
        "auto" => Ok(auto),
        "analytic" => Ok(ErrorMeasure::Analytic),
        "refinement" => Ok(ErrorMeasure::Refinement),
        o => Err(Error::Config(format!("unknown error measure `{o}`"))),
    }
}

fn sweep_config(case: &str, k: &str, t: &str, measure: &str, mode: u32) -> Result<SweepConfig> {
    let preset: MaterialPreset = case.parse()?;
    let (lo, hi) = parse_k(k)?;
    let mut cfg = SweepConfig::new(preset, lo, hi, parse_final(t, half_period(preset, mode))?);
    cfg.mode = mode;
    cfg.measure = parse_measure(measure, cfg.measure)?;
    Ok(cfg)
}

fn order_checks(
    rep: &mut RunReport,
    label: &str,
    sweep: &Sweep,
    min: Option<f64>,
    max: Option<f64>,
) {
    let p = sweep.final_order().unwrap_or(f64::NAN);
    if let Some(lo) = min {
        rep.check(Check::at_least(format!("{label} order"), p, lo));
    }
    if let Some(hi) = max {
        rep.check(Check::at_most(format!("{label} order"), p, hi));
    }
}

pub fn wave1d_convergence(a: &ConvergenceArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("wave1d-convergence", a)?;
    let mut cfg = sweep_config(&a.case, &a.k, &a.r#final, &a.measure, a.mode)?;
    cfg.stepping = parse_stepping(&a.stepping)?;
    let sw = convergence_sweep(&cfg)?;
    let mut t = out.csv(
        "",
        &[
            "k",
            "Nx",
            "dx",
            "Nt",
            "dt",
            "Er",
            "p",
            "drift_n",
            "drift_half",
        ],
        &mut rep,
    )?;
    for r in &sw.rows {
        t.row(vec![
            r.k.into(),
            r.nx.into(),
            r.dx.into(),
            r.nt.into(),
            r.dt.into(),
            r.error.into(),
            r.order.into(),
            r.drift_n.into(),
            r.drift_half.into(),
        ])?;
    }
    t.finish()?;
    let mut t = out.csv("errors", &["k", "x", "Er", "Er_dx2"], &mut rep)?;
    for (r, f) in sw.rows.iter().zip(&sw.fields) {
        for i in 0..f.x.len() {
            t.row(vec![
                r.k.into(),
                f.x[i].into(),
                f.er[i].into(),
                f.er_scaled[i].into(),
            ])?;
        }
    }
    t.finish()?;
    rep.orders = sw.orders();
    rep.metric("t_final", cfg.t_final);
    if let Some(p) = sw.final_order() {
        rep.metric("final_order", p);
    }
    rep.check(Check::at_most("max drift", sw.max_drift(), a.tol));
    order_checks(&mut rep, &a.case, &sw, a.min_order, a.max_order);
    Ok(rep)
}

pub fn convergence_table(a: &TableArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("convergence-table", a)?;
    let mut t = out.csv("", &["case", "k", "Nx", "dx", "Er", "p"], &mut rep)?;
    for case in &a.cases {
        let mut cfg = sweep_config(case, &a.k, &a.r#final, &a.measure, a.mode)?;
        cfg.stepping = Stepping::PowerOfTwo(a.f);
        let sw = convergence_sweep(&cfg)?;
        let label = cfg.preset.to_string();
        for r in &sw.rows {
            t.row(vec![
                label.as_str().into(),
                r.k.into(),
                r.nx.into(),
                r.dx.into(),
                r.error.into(),
                r.order.into(),
            ])?;
        }
        if let Some(p) = sw.final_order() {
            rep.metric(&format!("order {label}"), p);
            rep.orders.push(p);
        }
        order_checks(&mut rep, &label, &sw, a.min_order, None);
    }
    t.finish()?;
    Ok(rep)
}

pub fn wave2d(a: &Wave2dArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("wave2d", a)?;
    let mode = ExactMode2::new(a.m, a.mode_n, a.c)?;
    let grid = Grid2::new(a.n, a.n)?;
    if !(a.cfl > 0.0) || !(a.t_final > 0.0) {
        return Err(invalid("cfl", "cfl and t-final must be > 0"));
    }
    let rate = a.c * (1.0 / (grid.dx * grid.dx) + 1.0 / (grid.dy * grid.dy)).sqrt();
    let nt = (a.t_final * rate / a.cfl).ceil().max(1.0) as usize;
    let dt = a.t_final / nt as f64;
    let start = match a.start.as_str() {
        "exact" => Start2::ExactHalf,
        "taylor" => Start2::Taylor,
        o => {
            return Err(Error::Config(format!(
                "unknown start `{o}` (expected exact or taylor)"
            )))
        }
    };
    let run = run_wave2d(grid, mode, dt, nt, start, a.record_every)?;
    write_series(
        out,
        &run.history.series,
        ["u_norm2", "vbar_norm2", "Au_term"],
        &[],
        &mut rep,
    )?;
    let exact = mode.u_field(&grid, run.state.time());
    let (u, ue) = (&run.state.f.comps[0], &exact.comps[0]);
    let mut t = out.csv("errors", &["x", "y", "Er", "Er_dx2"], &mut rep)?;
    for ((i, j), v) in u.indexed_iter() {
        let e = (v - ue[[i, j]]).abs();
        t.row(vec![
            grid.xp(i).into(),
            grid.yp(j).into(),
            e.into(),
            (e / (grid.dx * grid.dx)).into(),
        ])?;
    }
    t.finish()?;
    rep.metric("dt", dt);
    rep.metric("max_error", run.error);
    drift_checks(&mut rep, run.history.drift(), a.tol);
    Ok(rep)
}

fn boundary(b: BoundaryArg) -> Boundary {
    match b {
        BoundaryArg::Bounded => Boundary::Bounded,
        BoundaryArg::Periodic => Boundary::Periodic,
    }
}

fn dump(
    out: &Output,
    path: &Option<std::path::PathBuf>,
    f: &Field3,
    grid: &Grid3,
    rep: &mut RunReport,
) -> Result<()> {
    if let Some(p) = path {
        let p = out.resolve(p);
        write_field(BufWriter::new(File::create(&p)?), f, grid)?;
        rep.artifacts.push(p);
    }
    Ok(())
}

pub fn wave3d(a: &Wave3dArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("wave3d", a)?;
    let mats: Materials3 = a.materials.parse()?;
    let grid = Grid3::cube(a.grid, boundary(a.boundary))?;
    let star = mats.scalar_star(&grid)?;
    let ops = ScalarWaveOps::new(&star, &grid)?;
    let dt = suggest_dt(&star, &grid, a.safety)?;
    let (s0, v0) = match a.init {
        Init3::Cavity => (
            Field3::from_fn(FieldKind::Node, &grid, |_, p| cavity_mode(p, 0.0)),
            Field3::zeros(FieldKind::DualFace, &grid),
        ),
        Init3::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let s0 = Field3::random(FieldKind::Node, &grid, &mut rng, 0);
            (s0, Field3::random(FieldKind::DualFace, &grid, &mut rng, 0))
        }
    };
    let mut st = scalar_initial_state(&ops, s0, &v0, dt)?;
    let h = advance(&mut st, &ops, a.steps, a.record_every, |_| Vec::new())?;
    write_series(
        out,
        &h.series,
        ["s_norm2", "vbar_norm2", "As_term"],
        &[],
        &mut rep,
    )?;
    rep.metric("dt", dt);
    if a.init == Init3::Cavity && mats == Materials3::Trivial && grid.boundary == Boundary::Bounded
    {
        let exact = Field3::from_fn(FieldKind::Node, &grid, |_, p| cavity_mode(p, st.time()));
        rep.metric("cavity_error", st.f.sub(&exact).max_abs());
    }
    drift_checks(&mut rep, h.drift(), a.tol);
    dump(out, &a.dump, &st.f, &grid, &mut rep)?;
    Ok(rep)
}

pub fn maxwell(a: &MaxwellArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("maxwell", a)?;
    let mats: Materials3 = a.materials.parse()?;
    let grid = Grid3::cube(a.grid, boundary(a.boundary))?;
    let star = mats.maxwell_star(&grid)?;
    let ops = MaxwellOps::new(&star, &grid)?;
    let dt = suggest_dt_maxwell(&star, &grid, a.safety)?;
    let (e0, h0) = match a.init {
        InitMaxwell::Te110 => te110_fields(&grid, 0.0, 0.0),
        InitMaxwell::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            let e0 = Field3::random(FieldKind::Edge, &grid, &mut rng, 0);
            (e0, Field3::random(FieldKind::DualEdge, &grid, &mut rng, 0))
        }
    };
    let mut st = maxwell_initial_state(&ops, e0, &h0, dt)?;
    let audit = |s: &crate::wave3d::MaxwellState3| {
        maxwell_divergence(s, &ops)
            .map(|d| d.to_vec())
            .unwrap_or_default()
    };
    let h = advance(&mut st, &ops, a.steps, a.record_every, audit)?;
    write_series(
        out,
        &h.series,
        ["E_norm2", "Hbar_norm2", "AE_term"],
        &["div_eps_E", "div_mu_H"],
        &mut rep,
    )?;
    rep.metric("dt", dt);
    drift_checks(&mut rep, h.drift(), a.tol);
    let first = &h.series[0];
    let floor = first.c_n.max(0.0).sqrt() / grid.h_min();
    for (k, name) in ["div_eps_E", "div_mu_H"].iter().enumerate() {
        let scale = first.audits[k].max(floor);
        rep.metric(&format!("{name} initial"), first.audits[k]);
        rep.check(Check::at_most(
            format!("{name} change"),
            h.audit_drift(k, scale),
            a.audit_tol,
        ));
    }
    if a.init == InitMaxwell::Te110
        && mats == Materials3::Trivial
        && grid.boundary == Boundary::Bounded
    {
        let (exact, _) = te110_fields(&grid, st.time(), st.time());
        rep.metric("te110_error", st.f.sub(&exact).max_abs());
    }
    dump(out, &a.dump, &st.f, &grid, &mut rep)?;
    Ok(rep)
}

fn profile(kind: Profile, centres: &[f64], dx: f64, centre: f64, width: f64) -> Vec<f64> {
    match kind {
        Profile::Square => centres
            .iter()
            .map(|x| {
                if (x - centre).abs() < 0.5 * width {
                    1.0
                } else {
                    0.0
                }
            })
            .collect(),
        Profile::Spike => {
            let mut v = vec![0.0; centres.len()];
            let i = centres
                .iter()
                .enumerate()
                .min_by(|a, b| (a.1 - centre).abs().total_cmp(&(b.1 - centre).abs()))
                .map_or(0, |(i, _)| i);
            v[i] = 1.0 / dx;
            v
        }
        Profile::Gauss => centres
            .iter()
            .map(|x| (-((x - centre) / width).powi(2)).exp())
            .collect(),
        Profile::Uniform => vec![1.0; centres.len()],
    }
}

/// Shared bookkeeping of the density runs: mass, positivity and guards.
struct DensityRun {
    total0: f64,
    worst_mass: f64,
    worst_negative: f64,
    guards_ok: bool,
}

impl DensityRun {
    fn new(s: &DensityState) -> Self {
        Self {
            total0: s.total_mass(),
            worst_mass: 0.0,
            worst_negative: 0.0,
            guards_ok: true,
        }
    }

    fn record(&mut self, s: &DensityState, chk: &StepCheck) {
        let scale = self.total0.abs().max(f64::MIN_POSITIVE);
        self.worst_mass = self
            .worst_mass
            .max((s.total_mass() - self.total0).abs() / scale);
        let max = s.rho.iter().copied().fold(0.0_f64, f64::max);
        if max > 0.0 {
            self.worst_negative = self.worst_negative.max(-s.min() / max);
        }
        self.guards_ok &= chk.within_limit && chk.preserves_positivity();
    }

    fn checks(&self, rep: &mut RunReport, mass_tol: f64) {
        rep.check(Check::holds("step guards satisfied", self.guards_ok));
        rep.check(Check::at_most(
            "relative change in mass plus outflow",
            self.worst_mass,
            mass_tol,
        ));
        rep.check(Check::at_most(
            "-min(rho) / max(rho)",
            self.worst_negative,
            1e-16,
        ));
    }
}

fn density_series(out: &Output, rep: &mut RunReport) -> Result<super::report::Table> {
    out.csv(
        "",
        &["step", "t", "mass", "outflow", "total", "min", "max"],
        rep,
    )
}

fn density_row(t: &mut super::report::Table, s: &DensityState, dt: f64) -> Result<()> {
    let max = s.rho.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    t.row(vec![
        s.step.into(),
        (s.step as f64 * dt).into(),
        s.mass().into(),
        s.outflow.into(),
        s.total_mass().into(),
        s.min().into(),
        max.into(),
    ])
}

fn profile_csv(
    out: &Output,
    x: &[f64],
    start: &[f64],
    end: &[f64],
    rep: &mut RunReport,
) -> Result<()> {
    let mut t = out.csv("profile", &["x", "rho0", "rho"], rep)?;
    for i in 0..x.len() {
        t.row(vec![x[i].into(), start[i].into(), end[i].into()])?;
    }
    t.finish()
}

fn domain(cells: usize, length: f64) -> Result<f64> {
    if cells == 0 || !(length > 0.0) {
        return Err(invalid(
            "cells",
            "need at least one cell and a positive length",
        ));
    }
    Ok(length / cells as f64)
}

pub fn transport(a: &TransportArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("transport", a)?;
    let dx = domain(a.cells, a.length)?;
    let edges = positivity::edge_coordinates(a.cells, a.x0, dx);
    let (name, arg) = a
        .velocity
        .split_once(':')
        .unwrap_or((a.velocity.as_str(), ""));
    let constant = match name {
        "const" => Some(
            arg.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad velocity `{}`", a.velocity)))?,
        ),
        _ => None,
    };
    let v: Vec<f64> = match (name, constant) {
        (_, Some(c)) => vec![c; a.cells + 1],
        ("collapse", _) => edges.iter().map(|x| -x).collect(),
        ("expand", _) => edges.clone(),
        _ => {
            return Err(Error::Config(format!(
                "unknown velocity `{}` (const:V, collapse or expand)",
                a.velocity
            )))
        }
    };
    let vmax = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if !(vmax > 0.0) || !(a.courant > 0.0) {
        return Err(invalid(
            "velocity",
            "need a nonzero velocity and courant > 0",
        ));
    }
    let dt = a.courant * dx / vmax;
    let mut s = DensityState::new(vec![0.0; a.cells], dx)?;
    let x = s.centres(a.x0);
    s.rho = profile(a.profile, &x, dx, a.centre, a.width);
    let rho0 = s.rho.clone();
    let mut audit = DensityRun::new(&s);
    let mut t = density_series(out, &mut rep)?;
    density_row(&mut t, &s, dt)?;
    for _ in 0..a.steps {
        let (next, chk) = positivity::transport_step(&s, &v, dt)?;
        s = next;
        audit.record(&s, &chk);
        density_row(&mut t, &s, dt)?;
    }
    t.finish()?;
    profile_csv(out, &x, &rho0, &s.rho, &mut rep)?;
    rep.metric("dt", dt);
    rep.metric("mass", s.mass());
    rep.metric("outflow", s.outflow);
    audit.checks(&mut rep, a.mass_tol);
    if let Some(c) = constant {
        if a.courant == 1.0 {
            let n = a.steps as isize;
            let shift = if c > 0.0 { n } else { -n };
            let exact = (0..a.cells as isize).all(|i| {
                let src = i - shift;
                let want = if src >= 0 && (src as usize) < a.cells {
                    rho0[src as usize]
                } else {
                    0.0
                };
                s.rho[i as usize].to_bits() == want.to_bits()
            });
            rep.check(Check::holds(
                "unit courant run is an exact index shift",
                exact,
            ));
        }
    }
    Ok(rep)
}

pub fn diffusion(a: &DiffusionArgs, out: &Output) -> Result<RunReport> {
    let mut rep = RunReport::new("diffusion", a)?;
    let dx = domain(a.cells, a.length)?;
    let edges = positivity::edge_coordinates(a.cells, a.x0, dx);
    let (name, arg) = a
        .diffusivity
        .split_once(':')
        .unwrap_or((a.diffusivity.as_str(), ""));
    let d: Vec<f64> = match name {
        "const" => {
            let c: f64 = arg
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("bad diffusivity `{}`", a.diffusivity)))?;
            vec![c; a.cells + 1]
        }
        "ramp" => edges.iter().map(|x| 1.0 + (x - a.x0) / a.length).collect(),
        _ => {
            return Err(Error::Config(format!(
                "unknown diffusivity `{}` (const:D or ramp)",
                a.diffusivity
            )))
        }
    };
    let peak = d.windows(2).map(|w| w[0] + w[1]).fold(0.0, f64::max);
    if !(peak > 0.0) || !(a.number > 0.0) {
        return Err(invalid(
            "diffusivity",
            "need a nonzero diffusivity and number > 0",
        ));
    }
    let dt = a.number * dx * dx / peak;
    let mut s = DensityState::new(vec![0.0; a.cells], dx)?;
    let x = s.centres(a.x0);
    s.rho = profile(a.profile, &x, dx, a.centre, a.width);
    let rho0 = s.rho.clone();
    let mut audit = DensityRun::new(&s);
    let mut t = density_series(out, &mut rep)?;
    density_row(&mut t, &s, dt)?;
    for _ in 0..a.steps {
        let (next, chk) = positivity::diffusion_step(&s, &d, dt)?;
        s = next;
        audit.record(&s, &chk);
        density_row(&mut t, &s, dt)?;
    }
    t.finish()?;
    profile_csv(out, &x, &rho0, &s.rho, &mut rep)?;
    rep.metric("dt", dt);
    rep.metric("mass", s.mass());
    rep.metric("outflow", s.outflow);
    audit.checks(&mut rep, a.mass_tol);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn level_ranges() {
        assert_eq!(parse_k("4..9").unwrap(), (4, 9));
        assert_eq!(parse_k("4..=9").unwrap(), (4, 9));
        assert!(parse_k("4-9").is_err());
    }

    #[test]
    fn named_final_times() {
        assert_eq!(parse_final("full-period", 1.0).unwrap(), 2.0);
        assert_eq!(parse_final("generic", 1.0).unwrap(), 0.75);
        assert_eq!(parse_final("0.3", 1.0).unwrap(), 0.3);
        assert!(parse_final("-1", 1.0).is_err());
        assert_eq!(half_period(MaterialPreset::Constant { c: 2.0 }, 1), 0.5);
    }

    #[test]
    fn stepping_forms() {
        assert_eq!(
            parse_stepping("courant:0.5").unwrap(),
            Stepping::Courant(0.5)
        );
        assert_eq!(parse_stepping("pow2").unwrap(), Stepping::PowerOfTwo(None));
        assert_eq!(
            parse_stepping("pow2:3").unwrap(),
            Stepping::PowerOfTwo(Some(3))
        );
        assert!(parse_stepping("fast").is_err());
        assert!(parse_measure("nope", ErrorMeasure::Analytic).is_err());
    }

    #[test]
    fn profiles_have_the_expected_mass() {
        let dx = 0.01;
        let x: Vec<f64> = (0..200).map(|i| -1.0 + (i as f64 + 0.5) * dx).collect();
        let spike: f64 = profile(Profile::Spike, &x, dx, 0.0, 0.4)
            .iter()
            .sum::<f64>()
            * dx;
        assert!((spike - 1.0).abs() < 1e-15);
        let sq: f64 = profile(Profile::Square, &x, dx, -0.5, 0.4)
            .iter()
            .sum::<f64>()
            * dx;
        assert!((sq - 0.4).abs() < 1e-12);
    }
}
