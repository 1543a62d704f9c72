//! End-to-end acceptance suite. One line per criterion; exits non-zero if any fails.
//!
//! Runtime budgets are checked too, so run with the test profile (optimised in
//! this workspace).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mimetic::leapfrog::{advance, relative_drift};
use mimetic::mimetic3d::{
    check_discrete_adjoints, exactness, operator_accuracy, Boundary, Grid3, SignFlip,
};
use mimetic::mimetic3d::{Field3, FieldKind, Star3};
use mimetic::oscillator::{simulate, stability_probe, InitMode, OscParams, Stability};
use mimetic::positivity::{diffusion_step, edge_coordinates, transport_step, DensityState};
use mimetic::wave1d::convergence::{convergence_sweep, ErrorMeasure, Stepping, SweepConfig};
use mimetic::wave1d::{
    cfl_speed, cmp_step, conserved_half_1d, conserved_n_1d, init_with_half, initial_state, run,
    vmp_step, Grid1D, MaterialPreset, Materials1D, Start,
};
use mimetic::wave2d::operator_errors_2d;
use mimetic::wave3d::{
    cavity_error, cavity_mode, maxwell_divergence, maxwell_initial_state, scalar_initial_state,
    suggest_dt, suggest_dt_maxwell, te110_fields, Materials3, MaxwellOps, MaxwellState3,
    ScalarWaveOps,
};
use mimetic::Result;

struct Outcome {
    passed: bool,
    detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Self {
            passed,
            detail: detail.into(),
        }
    }
}

fn criterion(n: u32, name: &str, budget_s: f64, f: impl FnOnce() -> Result<Outcome>) -> bool {
    let start = Instant::now();
    let out = f();
    let took = start.elapsed();
    let in_time = took <= Duration::from_secs_f64(budget_s);
    let (ok, detail) = match out {
        Ok(o) => (o.passed && in_time, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let verdict = if ok { "PASS" } else { "FAIL" };
    let slow = if in_time { "" } else { " over budget" };
    println!(
        "{verdict} {n:>2} {name}: {detail} [{:.3}s of {budget_s}s{slow}]",
        took.as_secs_f64()
    );
    ok
}

fn oscillator_conservation() -> Result<Outcome> {
    let p = OscParams::new(1.0, 0.01, 10_000)?;
    let run = simulate(&p, 1.0, 0.0, InitMode::Taylor);
    let (dn, dh) = (run.relative_drift_n(), run.relative_drift_half());
    Ok(Outcome::new(
        dn <= 1e-12 && dh <= 1e-12,
        format!("drift C_n {dn:.2e}, C_half {dh:.2e}"),
    ))
}

fn oscillator_edge() -> Result<Outcome> {
    let below = stability_probe(&OscParams::new(1.0, 1.99, 10_000)?);
    let above = stability_probe(&OscParams::new(1.0, 2.30, 10_000)?);
    Ok(Outcome::new(
        below == Stability::Stable && above == Stability::Unstable,
        format!("w dt = 1.99 {below:?}, w dt = 2.30 {above:?}"),
    ))
}

fn mimetic_exactness() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for b in [Boundary::Periodic, Boundary::Bounded] {
        let e = exactness(&Grid3::cube(16, b)?, 3, 7)?;
        worst = worst.max(e.max_input_scaled());
    }
    Ok(Outcome::new(
        worst <= 1e-13,
        format!("max |op2 op1 f| h / |f| = {worst:.2e}"),
    ))
}

fn operator_order() -> Result<Outcome> {
    let mut ratios: Vec<(String, f64)> = operator_accuracy(16)?
        .into_iter()
        .map(|c| (format!("3d {}", c.name), c.ratio))
        .collect();
    let coarse = operator_errors_2d(32)?;
    let fine = operator_errors_2d(64)?;
    for ((name, ec), (_, ef)) in coarse.iter().zip(&fine) {
        ratios.push((format!("2d {name}"), ec / ef));
    }
    let bad: Vec<_> = ratios
        .iter()
        .filter(|(_, r)| !(3.5..=4.5).contains(r))
        .collect();
    let lo = ratios.iter().map(|r| r.1).fold(f64::INFINITY, f64::min);
    let hi = ratios.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(Outcome::new(
        bad.is_empty(),
        format!(
            "{} operators, ratios in [{lo:.3}, {hi:.3}], outside [3.5, 4.5]: {bad:?}",
            ratios.len()
        ),
    ))
}

fn adjointness() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for b in [Boundary::Bounded, Boundary::Periodic] {
        let g = Grid3::cube(8, b)?;
        for m in Materials3::ALL {
            for st in [m.scalar_star(&g)?, m.maxwell_star(&g)?] {
                let r = check_discrete_adjoints(&st, &g, 100, 11, SignFlip::None)?;
                worst = worst.max(r.max_residual());
                cases += 1;
            }
        }
    }
    Ok(Outcome::new(
        worst <= 1e-12,
        format!("{cases} material sets, max residual {worst:.2e}"),
    ))
}

fn cmp_sweep(t_final: f64) -> Result<Vec<f64>> {
    let mut cfg = SweepConfig::new(MaterialPreset::Constant { c: 1.0 }, 4, 8, t_final);
    cfg.stepping = Stepping::Courant(0.5);
    cfg.measure = ErrorMeasure::Analytic;
    Ok(convergence_sweep(&cfg)?.orders())
}

fn cmp_convergence() -> Result<Outcome> {
    // Half period of mode 1 with c = 1 on the unit interval is 1.
    let generic = cmp_sweep(0.75)?;
    let periodic = cmp_sweep(2.0)?;
    let pg = *generic.last().unwrap_or(&f64::NAN);
    let pp = *periodic.last().unwrap_or(&f64::NAN);
    Ok(Outcome::new(
        (1.9..=2.1).contains(&pg) && pp >= 3.5,
        format!("generic time orders {generic:.3?}, full period orders {periodic:.3?}"),
    ))
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
        / scale
}

fn cmp_vmp_equivalence() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for c in [1.0, 2.5, 0.3] {
        let nx = 65;
        let probe = Grid1D::new(0.0, 1.0, nx, 1.0, 1)?;
        let nt = (c / (0.9 * probe.dx)).ceil() as usize;
        let g = Grid1D::new(0.0, 1.0, nx, 1.0, nt)?;
        let cm = Materials1D::constant(c)?;
        let vm = Materials1D::constant_as_variable(&g, c)?;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u0 = random_vec(&mut rng, nx);
        let vh = random_vec(&mut rng, nx - 1);
        let mut a = init_with_half(&g, &cm, u0.clone(), vh.clone())?;
        let mut b = init_with_half(&g, &vm, u0, vh)?;
        for _ in 0..g.nt {
            a = cmp_step(&a, c, &g)?;
            b = vmp_step(&b, &vm, &g)?;
            worst = worst
                .max(rel_diff(&a.f, &b.f))
                .max(rel_diff(&a.g_half, &b.g_half));
        }
    }
    Ok(Outcome::new(
        worst <= 1e-13,
        format!("max relative difference {worst:.2e}"),
    ))
}

fn one_d_presets() -> Vec<MaterialPreset> {
    let mut v = vec![
        MaterialPreset::Constant { c: 1.0 },
        MaterialPreset::Constant { c: 2.5 },
    ];
    v.extend(MaterialPreset::variable_suite());
    v
}

fn one_d_conservation() -> Result<Outcome> {
    let mut worst = (0.0_f64, String::new());
    let presets = one_d_presets();
    for p in &presets {
        let probe = Grid1D::new(0.0, 1.0, 129, 2.0, 1)?;
        let speed = cfl_speed(&p.materials(&probe)?);
        let nt = (2.0 * speed / (0.9 * probe.dx)).ceil() as usize;
        let g = Grid1D::new(0.0, 1.0, 129, 2.0, nt)?;
        let m = p.materials(&g)?;
        let start = match p {
            MaterialPreset::Constant { .. } => Start::ExactMode { m: 1 },
            _ => Start::SineTaylor {
                m: 1,
                variant: mimetic::leapfrog::TaylorVariant::Oscillator,
            },
        };
        let r = run(&g, &m, initial_state(&g, &m, start)?, 1)?;
        let (dn, dh) = r.drift();
        if dn.max(dh) >= worst.0 {
            worst = (dn.max(dh), p.to_string());
        }
    }
    Ok(Outcome::new(
        worst.0 <= 1e-12,
        format!(
            "{} presets, worst drift {:.2e} ({})",
            presets.len(),
            worst.0,
            worst.1
        ),
    ))
}

fn vmp_floor() -> Result<Outcome> {
    let mut lines = Vec::new();
    let mut ok = true;
    let mut cases: Vec<(MaterialPreset, f64)> =
        vec![(MaterialPreset::Bump { p: 2.0, q: 2.0 }, 1.9)];
    for up in [true, false] {
        cases.push((MaterialPreset::JumpRho { up }, 1.0));
        cases.push((MaterialPreset::JumpTau { up }, 1.0));
    }
    for (p, floor) in cases {
        let sw = convergence_sweep(&SweepConfig::new(p, 4, 8, 0.75))?;
        let order = sw.final_order().unwrap_or(f64::NAN);
        ok &= order >= floor;
        lines.push(format!("{p} {order:.3}"));
    }
    Ok(Outcome::new(ok, format!("orders: {}", lines.join(", "))))
}

fn scalar_wave_3d() -> Result<Outcome> {
    let grid = Grid3::cube(16, Boundary::Bounded)?;
    let star = Star3::trivial(&grid);
    let ops = ScalarWaveOps::new(&star, &grid)?;
    let dt = suggest_dt(&star, &grid, 0.9)?;
    let s0 = Field3::from_fn(FieldKind::Node, &grid, |_, p| cavity_mode(p, 0.0));
    let v0 = Field3::zeros(FieldKind::DualFace, &grid);
    let mut st = scalar_initial_state(&ops, s0, &v0, dt)?;
    let (dn, dh) = advance(&mut st, &ops, 500, 1, |_| Vec::new())?.drift();
    let errs: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&n| cavity_error(n, 2 * n, 0.5))
        .collect::<Result<_>>()?;
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    Ok(Outcome::new(
        dn <= 1e-12 && dh <= 1e-12 && orders.iter().all(|&p| p >= 2.0),
        format!(
            "drift C_n {dn:.2e}, C_half {dh:.2e}; cavity errors {errs:.3?}, orders {orders:.4?}"
        ),
    ))
}

fn maxwell_3d() -> Result<Outcome> {
    let grid = Grid3::cube(16, Boundary::Bounded)?;
    let mats = Star3::trivial(&grid);
    let ops = MaxwellOps::new(&mats, &grid)?;
    let dt = suggest_dt_maxwell(&mats, &grid, 0.9)?;
    let audit = |s: &MaxwellState3| {
        maxwell_divergence(s, &ops)
            .map(|d| d.to_vec())
            .unwrap_or_default()
    };
    let mut ok = true;
    let mut parts = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let random = (
        Field3::random(FieldKind::Edge, &grid, &mut rng, 0),
        Field3::random(FieldKind::DualEdge, &grid, &mut rng, 0),
    );
    for (label, (e0, h0)) in [("te110", te110_fields(&grid, 0.0, 0.0)), ("random", random)] {
        let mut st = maxwell_initial_state(&ops, e0, &h0, dt)?;
        let h = advance(&mut st, &ops, 500, 1, audit)?;
        let (dn, dh) = h.drift();
        let first = &h.series[0];
        // Divergence changes are measured against the larger of the initial
        // divergence and the size a first difference of the field could have.
        let floor = first.c_n.sqrt() / grid.h_min();
        let de = h.audit_drift(0, first.audits[0].max(floor));
        let dm = h.audit_drift(1, first.audits[1].max(floor));
        ok &= dn <= 1e-12 && dh <= 1e-12 && de <= 1e-12 && dm <= 1e-12;
        parts.push(format!(
            "{label}: drift {dn:.2e}/{dh:.2e}, divergence change {de:.2e}/{dm:.2e}"
        ));
    }
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn cfl_sharpness() -> Result<Outcome> {
    let nx = 65;
    let steps = 1000;
    let run_at = |ratio: f64| -> Result<(f64, f64)> {
        let probe = Grid1D::new(0.0, 1.0, nx, 1.0, 1)?;
        let dt = ratio * probe.dx;
        let g = Grid1D::new(0.0, 1.0, nx, dt * steps as f64, steps)?;
        let m = Materials1D::constant(1.0)?;
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut s = init_with_half(
            &g,
            &m,
            random_vec(&mut rng, nx),
            random_vec(&mut rng, nx - 1),
        )?;
        let mut cn = vec![conserved_n_1d(&s, &m, &g)?];
        let mut ch = vec![conserved_half_1d(&s, &m, &g)?];
        let mut peak: f64 = 0.0;
        for _ in 0..steps {
            s = cmp_step(&s, 1.0, &g)?;
            peak = s.f.iter().fold(peak, |a, x| a.max(x.abs()));
            if !peak.is_finite() || peak > 1e100 {
                break;
            }
            cn.push(conserved_n_1d(&s, &m, &g)?);
            ch.push(conserved_half_1d(&s, &m, &g)?);
        }
        Ok((peak, relative_drift(&cn).max(relative_drift(&ch))))
    };
    let (peak_hi, _) = run_at(1.05)?;
    let (peak_lo, drift_lo) = run_at(0.95)?;
    // NaN and infinity count as divergence.
    let diverged = !(peak_hi <= 1e3);
    Ok(Outcome::new(
        diverged && peak_lo <= 10.0 && drift_lo <= 1e-12,
        format!("1.05x: max |u| {peak_hi:.2e}; 0.95x: max |u| {peak_lo:.3}, drift {drift_lo:.2e}"),
    ))
}

fn transport() -> Result<Outcome> {
    let m = 200;
    let dx = 2.0 / m as f64;
    let x0 = -1.0;
    let square: Vec<f64> = (0..m)
        .map(|i| {
            let x = x0 + (i as f64 + 0.5) * dx;
            if (-0.7..-0.3).contains(&x) {
                1.0
            } else {
                0.0
            }
        })
        .collect();
    let mut exact_shift = true;
    let mut worst_mass: f64 = 0.0;
    for dir in [1.0, -1.0] {
        let v = vec![dir; m + 1];
        let mut s = DensityState::new(square.clone(), dx)?;
        let m0 = s.total_mass();
        for n in 1..=100usize {
            s = transport_step(&s, &v, dx)?.0;
            let expect = |i: usize| -> f64 {
                let src = if dir > 0.0 {
                    i.checked_sub(n)
                } else {
                    Some(i + n).filter(|&j| j < m)
                };
                src.map_or(0.0, |j| square[j])
            };
            exact_shift &= (0..m).all(|i| s.rho[i].to_bits() == expect(i).to_bits());
            worst_mass = worst_mass.max((s.total_mass() - m0).abs() / m0);
        }
    }
    let mut min_seen = f64::INFINITY;
    for sign in [-1.0, 1.0] {
        let v: Vec<f64> = edge_coordinates(m, x0, dx)
            .iter()
            .map(|x| sign * x)
            .collect();
        let mut s = DensityState::new(vec![1.0; m], dx)?;
        let m0 = s.total_mass();
        for _ in 0..1000 {
            s = transport_step(&s, &v, dx)?.0;
            min_seen = min_seen.min(s.min());
            worst_mass = worst_mass.max((s.total_mass() - m0).abs() / m0);
        }
    }
    Ok(Outcome::new(
        exact_shift && worst_mass <= 1e-13 && min_seen >= 0.0,
        format!("bit-exact shift {exact_shift}, mass change {worst_mass:.2e}, min density in collapse/expand {min_seen:.2e}"),
    ))
}

fn diffusion() -> Result<Outcome> {
    let m = 101;
    let dx = 2.0 / m as f64;
    let mut ok = true;
    let mut parts = Vec::new();
    let edges = edge_coordinates(m, -1.0, dx);
    let fields: [(&str, Vec<f64>); 2] = [
        ("constant D", vec![1.0; m + 1]),
        (
            "variable D",
            edges.iter().map(|x| 1.0 + 0.5 * (3.0 * x).sin()).collect(),
        ),
    ];
    for (label, d) in fields {
        let dmax = d.windows(2).map(|w| w[0] + w[1]).fold(0.0, f64::max);
        let dt = dx * dx / dmax;
        let mut rho = vec![0.0; m];
        rho[m / 2] = 1.0 / dx;
        let mut s = DensityState::new(rho, dx)?;
        let m0 = s.total_mass();
        let mut min_seen = f64::INFINITY;
        let mut guard = true;
        for _ in 0..1000 {
            let (n, chk) = diffusion_step(&s, &d, dt)?;
            guard &= chk.within_limit;
            s = n;
            min_seen = min_seen.min(s.min());
        }
        let dm = (s.total_mass() - m0).abs() / m0;
        ok &= guard && min_seen >= 0.0 && dm <= 1e-13;
        parts.push(format!("{label}: min {min_seen:.2e}, mass change {dm:.2e}"));
    }
    Ok(Outcome::new(ok, parts.join("; ")))
}

fn main() -> ExitCode {
    let results = [
        criterion(1, "oscillator conservation", 0.1, oscillator_conservation),
        criterion(2, "oscillator stability edge", 0.1, oscillator_edge),
        criterion(3, "mimetic exactness", 1.0, mimetic_exactness),
        criterion(4, "operator accuracy", 5.0, operator_order),
        criterion(5, "adjointness", 2.0, adjointness),
        criterion(6, "1D constant material convergence", 10.0, cmp_convergence),
        criterion(
            7,
            "constant and variable form agree",
            1.0,
            cmp_vmp_equivalence,
        ),
        criterion(
            8,
            "1D conservation for every preset",
            10.0,
            one_d_conservation,
        ),
        criterion(9, "variable material convergence floor", 30.0, vmp_floor),
        criterion(10, "3D scalar wave", 60.0, scalar_wave_3d),
        criterion(11, "Maxwell", 60.0, maxwell_3d),
        criterion(12, "1D CFL sharpness", 1.0, cfl_sharpness),
        criterion(13, "transport", 1.0, transport),
        criterion(14, "diffusion", 1.0, diffusion),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
