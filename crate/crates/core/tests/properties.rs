use proptest::prelude::*;

use mimetic::leapfrog::{
    check_adjointness, conserved_full, conserved_half_step, init_state, system_step, DensePair,
    TaylorVariant,
};
use mimetic::mimetic3d::{exactness, Boundary, Grid3};
use mimetic::oscillator::{simulate, InitMode, OscParams};
use mimetic::positivity::{
    diffusion_check, diffusion_step, transport_check, transport_step, DensityState,
};
use mimetic::wave1d::convergence::estimate_order;
use mimetic::wave1d::{init_with_half, run, Grid1D, Materials1D, Wave1DOps};

fn weights(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2..5.0f64, n)
}

fn values(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0..1.0f64, n)
}

/// A weighted dense pair with its initial data.
fn dense_system() -> impl Strategy<Value = (DensePair, Vec<f64>, Vec<f64>)> {
    (1usize..6, 1usize..6).prop_flat_map(|(m, n)| {
        (values(m * n), weights(n), weights(m), values(n), values(m)).prop_filter_map(
            "nonzero matrix",
            move |(a, wx, wy, f, g)| {
                if a.iter().all(|x| x.abs() < 1e-3) {
                    return None;
                }
                DensePair::new(m, n, a, wx, wy).ok().map(|p| (p, f, g))
            },
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn oscillator_conserves_below_the_limit(omega in 0.1..10.0f64, courant in 0.01..1.9f64, u0 in -2.0..2.0f64, v0 in -2.0..2.0f64) {
        prop_assume!(u0.abs() + v0.abs() > 1e-3);
        let p = OscParams::new(omega, courant / omega, 2000).unwrap();
        let run = simulate(&p, u0, v0, InitMode::Taylor);
        prop_assert!(run.relative_drift_n() <= 1e-11, "{}", run.relative_drift_n());
        prop_assert!(run.relative_drift_half() <= 1e-11, "{}", run.relative_drift_half());
        prop_assert!(run.c_n.iter().all(|&c| c > 0.0));
    }

    #[test]
    fn dense_pairs_are_adjoint((ops, _, _) in dense_system(), seed in any::<u64>()) {
        let (m, n) = (ops.rows(), ops.cols());
        let r = check_adjointness(
            &ops,
            10,
            seed,
            |r| (0..n).map(|_| rand::Rng::gen_range(r, -1.0..1.0)).collect(),
            |r| (0..m).map(|_| rand::Rng::gen_range(r, -1.0..1.0)).collect(),
        );
        prop_assert!(r.max_residual <= 1e-13, "{}", r.max_residual);
    }

    #[test]
    fn leapfrog_conserves_both_quantities((ops, f, g) in dense_system(), safety in 0.05..0.95f64, system in any::<bool>()) {
        let dt = safety * 2.0 / ops.frobenius_bound();
        let variant = if system { TaylorVariant::System } else { TaylorVariant::Oscillator };
        let mut s = init_state(&ops, f, &g, dt, variant).unwrap();
        let (c0, h0) = (conserved_full(&s, &ops), conserved_half_step(&s, &ops));
        prop_assume!(c0 > 1e-6 && h0 > 1e-6);
        for _ in 0..300 {
            system_step(&mut s, &ops).unwrap();
        }
        let c = conserved_full(&s, &ops);
        let h = conserved_half_step(&s, &ops);
        prop_assert!((c - c0).abs() <= 1e-11 * c0, "{c} {c0}");
        prop_assert!((h - h0).abs() <= 1e-11 * h0, "{h} {h0}");
        prop_assert!(c >= 0.0 && h >= 0.0);
    }

    #[test]
    fn summation_by_parts_in_one_dimension(nx in 3usize..60, seed in any::<u64>(), rho in 0.3..3.0f64, tau in 0.3..3.0f64, wiggle in 0.0..0.5f64) {
        let g = Grid1D::new(0.0, 1.0, nx, 1.0, 1).unwrap();
        let m = Materials1D::sample(&g, |x| rho * (1.0 + wiggle * (7.0 * x).sin()), |x| tau * (1.0 + wiggle * (5.0 * x).cos())).unwrap();
        let ops = Wave1DOps::new(&m, &g).unwrap();
        let r = check_adjointness(
            &ops,
            5,
            seed,
            |r| {
                let mut u: Vec<f64> = (0..nx).map(|_| rand::Rng::gen_range(r, -1.0..1.0)).collect();
                u[0] = 0.0;
                u[nx - 1] = 0.0;
                u
            },
            |r| (0..nx - 1).map(|_| rand::Rng::gen_range(r, -1.0..1.0)).collect(),
        );
        prop_assert!(r.max_residual <= 1e-13, "{}", r.max_residual);
    }

    #[test]
    fn one_dimensional_runs_conserve(nx in 5usize..80, courant in 0.1..0.95f64, u in values(80), v in values(79), wiggle in 0.0..0.6f64) {
        let probe = Grid1D::new(0.0, 1.0, nx, 1.0, 1).unwrap();
        let m = Materials1D::sample(&probe, |x| 1.0 + wiggle * (9.0 * x).sin(), |x| 1.0 + wiggle * (4.0 * x).cos()).unwrap();
        let speed = mimetic::wave1d::cfl_speed(&m);
        let nt = (speed / (courant * probe.dx)).ceil() as usize;
        let g = Grid1D::new(0.0, 1.0, nx, 1.0, nt).unwrap();
        let s = init_with_half(&g, &m, u[..nx].to_vec(), v[..nx - 1].to_vec()).unwrap();
        let r = run(&g, &m, s, 1).unwrap();
        let c0 = r.series[0].c_n;
        prop_assume!(c0 > 1e-8);
        let (dn, dh) = r.drift();
        prop_assert!(dn <= 1e-12 && dh <= 1e-12, "{dn} {dh}");
    }

    #[test]
    fn exact_sequences_on_any_box(nx in 2usize..7, ny in 2usize..7, nz in 2usize..7, periodic in any::<bool>(), seed in any::<u64>()) {
        let b = if periodic { Boundary::Periodic } else { Boundary::Bounded };
        let g = Grid3::new([1.0, 0.7, 1.6], [nx, ny, nz], b).unwrap();
        let e = exactness(&g, 1, seed).unwrap();
        prop_assert!(e.max_input_scaled() <= 1e-13, "{:?}", e);
    }

    #[test]
    fn transport_keeps_sign_and_mass(rho in prop::collection::vec(0.0..2.0f64, 4..40), vs in values(41), nu in 0.05..1.0f64) {
        let m = rho.len();
        let v = vs[..m + 1].to_vec();
        let dx = 0.1;
        // Positivity needs each cell's total outflow per step below its content,
        // which is stricter than max |v| dt / dx <= 1 where the flow diverges.
        let out = v.windows(2).map(|w| w[1].max(0.0) - w[0].min(0.0)).fold(0.0, f64::max);
        prop_assume!(out > 1e-6);
        let dt = nu * dx / out;
        let chk = transport_check(&v, dx, dt);
        prop_assert!(chk.within_limit && chk.preserves_positivity());
        let mut s = DensityState::new(rho, dx).unwrap();
        let m0 = s.total_mass();
        for _ in 0..50 {
            s = transport_step(&s, &v, dt).unwrap().0;
            prop_assert!(s.min() >= 0.0);
        }
        prop_assert!((s.total_mass() - m0).abs() <= 1e-13 * m0.max(1e-300) + 1e-300);
    }

    #[test]
    fn diffusion_keeps_sign_and_mass(rho in prop::collection::vec(0.0..2.0f64, 3..40), ds in weights(41), number in 0.05..1.0f64) {
        let m = rho.len();
        let d = ds[..m + 1].to_vec();
        let dx = 0.1;
        let dmax = d.windows(2).map(|w| w[0] + w[1]).fold(0.0, f64::max);
        let dt = number * dx * dx / dmax;
        prop_assert!(diffusion_check(&d, dx, dt).within_limit);
        let mut s = DensityState::new(rho, dx).unwrap();
        let m0 = s.total_mass();
        for _ in 0..50 {
            s = diffusion_step(&s, &d, dt).unwrap().0;
            prop_assert!(s.min() >= 0.0);
        }
        prop_assert!((s.total_mass() - m0).abs() <= 1e-13 * m0.max(1e-300) + 1e-300);
    }

    #[test]
    fn order_of_a_power_law(p in 0.5..5.0f64, c in 0.01..100.0f64, h0 in 0.01..1.0f64) {
        let rows: Vec<(f64, f64)> = (0..5).map(|k| {
            let h = h0 / 2f64.powi(k);
            (h, c * h.powf(p))
        }).collect();
        for q in estimate_order(&rows).unwrap() {
            prop_assert!((q - p).abs() <= 1e-9, "{q} {p}");
        }
    }
}
