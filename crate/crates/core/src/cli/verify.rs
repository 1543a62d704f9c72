use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::args::{Suite, VerifyArgs};
use super::report::{Check, RunReport};
use crate::error::Result;
use crate::leapfrog::check_adjointness;
use crate::mimetic3d::{
    check_discrete_adjoints, exactness, full_matrix_error, negativity_check, operator_accuracy,
    AccuracyCheck, Boundary, Field3, FieldKind, Grid3, SignFlip, Star3,
};
use crate::wave1d::materials::MaterialPreset;
use crate::wave1d::{Grid1D, Wave1DOps};
use crate::wave2d::operator_errors_2d;
use crate::wave3d::Materials3;

/// Tolerance for the adjoint identities.
pub const ADJOINT_TOL: f64 = 1e-12;
/// Tolerance for `|op2 op1 f| h / |f|`.
pub const EXACT_TOL: f64 = 1e-13;

const KINDS: [FieldKind; 8] = [
    FieldKind::Node,
    FieldKind::Edge,
    FieldKind::Face,
    FieldKind::Cell,
    FieldKind::DualNode,
    FieldKind::DualEdge,
    FieldKind::DualFace,
    FieldKind::DualCell,
];

pub fn verify(a: &VerifyArgs) -> Result<RunReport> {
    let mut rep = RunReport::new("verify", a)?;
    match a.suite {
        Suite::Mimetic3d => mimetic3d(a, &mut rep)?,
        Suite::Adjoint => adjoint(a, &mut rep)?,
        Suite::Wave1dSbp => wave1d_sbp(a, &mut rep)?,
    }
    Ok(rep)
}

/// Every material set in both roles, on a bounded and a periodic box.
fn star_cases(n: usize) -> Result<Vec<(String, Grid3, Star3)>> {
    let mut out = Vec::new();
    for b in [Boundary::Bounded, Boundary::Periodic] {
        let g = Grid3::cube(n, b)?;
        for m in Materials3::ALL {
            out.push((format!("{m} scalar {b:?}"), g, m.scalar_star(&g)?));
            out.push((format!("{m} maxwell {b:?}"), g, m.maxwell_star(&g)?));
        }
    }
    Ok(out)
}

fn adjoint_checks(a: &VerifyArgs, rep: &mut RunReport, flip: SignFlip) -> Result<()> {
    for (label, g, st) in star_cases(a.grid)? {
        let r = check_discrete_adjoints(&st, &g, a.trials, a.seed, flip)?;
        for c in &r.checks {
            rep.check(Check::at_most(
                format!("adjoint {} {label}", c.name),
                c.max_residual,
                ADJOINT_TOL,
            ));
        }
    }
    Ok(())
}

fn ratio(rep: &mut RunReport, c: &AccuracyCheck) {
    rep.check(Check::between(
        format!("order ratio {}", c.name),
        c.ratio,
        3.5,
        4.5,
    ));
}

fn mimetic3d(a: &VerifyArgs, rep: &mut RunReport) -> Result<()> {
    for n in [8, 16] {
        for b in [Boundary::Periodic, Boundary::Bounded] {
            let e = exactness(&Grid3::cube(n, b)?, 2, a.seed)?;
            for c in &e.chains {
                rep.check(Check::at_most(
                    format!("exact {} {n}^3 {b:?}", c.name),
                    c.input_scaled,
                    EXACT_TOL,
                ));
            }
        }
    }
    adjoint_checks(a, rep, SignFlip::None)?;
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for (label, g, st) in star_cases(a.grid)? {
        rep.check(Check::holds(
            format!("negative definite {label}"),
            negativity_check(&st, &g, 10, a.seed)?,
        ));
        let mut worst: f64 = 0.0;
        for kind in KINDS {
            let f = Field3::random(kind, &g, &mut rng, 0);
            let back = st.star(&st.star(&f, &g)?, &g)?;
            worst = worst.max(back.sub(&f).max_abs() / f.max_abs());
        }
        rep.check(Check::at_most(
            format!("star round trip {label}"),
            worst,
            1e-14,
        ));
    }
    for c in operator_accuracy(8)? {
        ratio(rep, &c);
    }
    let coarse = operator_errors_2d(16)?;
    let fine = operator_errors_2d(32)?;
    for ((name, ec), (_, ef)) in coarse.iter().zip(&fine) {
        ratio(rep, &AccuracyCheck::new(*name, *ec, *ef));
    }
    ratio(
        rep,
        &AccuracyCheck::new("full matrix", full_matrix_error(8)?, full_matrix_error(16)?),
    );
    Ok(())
}

fn adjoint(a: &VerifyArgs, rep: &mut RunReport) -> Result<()> {
    let flip = if a.broken_sign {
        SignFlip::Gradient
    } else {
        SignFlip::None
    };
    adjoint_checks(a, rep, flip)
}

fn wave1d_sbp(a: &VerifyArgs, rep: &mut RunReport) -> Result<()> {
    let mut presets = vec![
        MaterialPreset::Constant { c: 1.0 },
        MaterialPreset::Constant { c: 2.5 },
    ];
    presets.extend(MaterialPreset::variable_suite());
    for nx in [17, 33] {
        let g = Grid1D::new(0.0, 1.0, nx, 1.0, 1)?;
        for p in &presets {
            for (form, m) in [("", p.materials(&g)?), (" sampled", p.sampled(&g)?)] {
                if form.is_empty() || p.is_constant() {
                    let ops = Wave1DOps::new(&m, &g)?;
                    let r = check_adjointness(
                        &ops,
                        a.trials,
                        a.seed,
                        |r: &mut ChaCha8Rng| {
                            let mut u: Vec<f64> = (0..nx).map(|_| r.gen_range(-1.0..1.0)).collect();
                            u[0] = 0.0;
                            u[nx - 1] = 0.0;
                            u
                        },
                        |r: &mut ChaCha8Rng| (0..nx - 1).map(|_| r.gen_range(-1.0..1.0)).collect(),
                    );
                    rep.check(Check::at_most(
                        format!("sbp {p}{form} nx={nx}"),
                        r.max_residual,
                        ADJOINT_TOL,
                    ));
                }
            }
        }
    }
    Ok(())
}
