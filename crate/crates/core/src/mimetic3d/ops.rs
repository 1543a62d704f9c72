//! Gradient, curl and divergence on the primal and dual grids.
//!
//! A single difference routine serves both grids: along an axis where the
//! source is unstaggered the result lands half a cell ahead, where it is
//! staggered the result lands half a cell behind.

use ndarray::{Array3, ArrayView3, Axis, Slice, Zip};

use super::field::{Field3, FieldKind};
use super::grid::Grid3;
use crate::error::{Error, Result};

/// Difference of one component along `axis`, divided by the spacing.
pub fn diff_axis(src: ArrayView3<'_, f64>, half: bool, axis: usize, grid: &Grid3) -> Array3<f64> {
    let ax = Axis(axis);
    let h = grid.h[axis];
    let n = src.len_of(ax);
    let mut out_shape = [src.shape()[0], src.shape()[1], src.shape()[2]];
    let bounded = !grid.periodic();
    if bounded {
        out_shape[axis] = if half { n + 1 } else { n - 1 };
    }
    let mut out = Array3::zeros(out_shape);
    let fwd = |a: usize, b: usize| Slice::from(a as isize..b as isize);
    match (bounded, half) {
        (true, false) => {
            Zip::from(&mut out)
                .and(src.slice_axis(ax, fwd(1, n)))
                .and(src.slice_axis(ax, fwd(0, n - 1)))
                .for_each(|o, &a, &b| *o = (a - b) / h);
        }
        (true, true) => {
            Zip::from(out.slice_axis_mut(ax, fwd(1, n)))
                .and(src.slice_axis(ax, fwd(1, n)))
                .and(src.slice_axis(ax, fwd(0, n - 1)))
                .for_each(|o, &a, &b| *o = (a - b) / h);
            Zip::from(out.slice_axis_mut(ax, fwd(0, 1)))
                .and(src.slice_axis(ax, fwd(0, 1)))
                .for_each(|o, &a| *o = a / h);
            Zip::from(out.slice_axis_mut(ax, fwd(n, n + 1)))
                .and(src.slice_axis(ax, fwd(n - 1, n)))
                .for_each(|o, &b| *o = -b / h);
        }
        (false, false) => {
            Zip::from(out.slice_axis_mut(ax, fwd(0, n - 1)))
                .and(src.slice_axis(ax, fwd(1, n)))
                .and(src.slice_axis(ax, fwd(0, n - 1)))
                .for_each(|o, &a, &b| *o = (a - b) / h);
            Zip::from(out.slice_axis_mut(ax, fwd(n - 1, n)))
                .and(src.slice_axis(ax, fwd(0, 1)))
                .and(src.slice_axis(ax, fwd(n - 1, n)))
                .for_each(|o, &a, &b| *o = (a - b) / h);
        }
        (false, true) => {
            Zip::from(out.slice_axis_mut(ax, fwd(1, n)))
                .and(src.slice_axis(ax, fwd(1, n)))
                .and(src.slice_axis(ax, fwd(0, n - 1)))
                .for_each(|o, &a, &b| *o = (a - b) / h);
            Zip::from(out.slice_axis_mut(ax, fwd(0, 1)))
                .and(src.slice_axis(ax, fwd(0, 1)))
                .and(src.slice_axis(ax, fwd(n - 1, n)))
                .for_each(|o, &a, &b| *o = (a - b) / h);
        }
    }
    out
}

fn expect_kind(f: &Field3, want: FieldKind, grid: &Grid3, op: &'static str) -> Result<()> {
    f.check(want, grid, op)
}

fn grad_impl(f: &Field3, grid: &Grid3, out: FieldKind) -> Field3 {
    let st = f.staggers()[0];
    let comps = (0..3)
        .map(|a| diff_axis(f.comps[0].view(), st[a], a, grid))
        .collect();
    Field3 { kind: out, comps }
}

fn curl_impl(f: &Field3, grid: &Grid3, out: FieldKind) -> Field3 {
    let st = f.staggers();
    let d = |c: usize, a: usize| diff_axis(f.comps[c].view(), st[c][a], a, grid);
    let comps = (0..3)
        .map(|c| {
            let (p, q) = ((c + 1) % 3, (c + 2) % 3);
            // (curl t)_c = d_p t_q - d_q t_p
            d(q, p) - d(p, q)
        })
        .collect();
    Field3 { kind: out, comps }
}

fn div_impl(f: &Field3, grid: &Grid3, out: FieldKind) -> Field3 {
    let st = f.staggers();
    let mut acc = diff_axis(f.comps[0].view(), st[0][0], 0, grid);
    for a in 1..3 {
        acc += &diff_axis(f.comps[a].view(), st[a][a], a, grid);
    }
    Field3 {
        kind: out,
        comps: vec![acc],
    }
}

/// Node scalar to edge vector.
pub fn grad3(s: &Field3, grid: &Grid3) -> Result<Field3> {
    expect_kind(s, FieldKind::Node, grid, "grad3")?;
    Ok(grad_impl(s, grid, FieldKind::Edge))
}

/// Edge vector to face vector.
pub fn curl3(t: &Field3, grid: &Grid3) -> Result<Field3> {
    expect_kind(t, FieldKind::Edge, grid, "curl3")?;
    Ok(curl_impl(t, grid, FieldKind::Face))
}

/// Face vector to cell scalar.
pub fn div3(n: &Field3, grid: &Grid3) -> Result<Field3> {
    expect_kind(n, FieldKind::Face, grid, "div3")?;
    Ok(div_impl(n, grid, FieldKind::Cell))
}

/// Dual node scalar to dual edge vector.
pub fn grad3_star(s: &Field3, grid: &Grid3) -> Result<Field3> {
    expect_kind(s, FieldKind::DualNode, grid, "grad3_star")?;
    Ok(grad_impl(s, grid, FieldKind::DualEdge))
}

/// Dual edge vector to dual face vector.
pub fn curl3_star(t: &Field3, grid: &Grid3) -> Result<Field3> {
    expect_kind(t, FieldKind::DualEdge, grid, "curl3_star")?;
    Ok(curl_impl(t, grid, FieldKind::DualFace))
}

/// Dual face vector to dual cell scalar.
pub fn div3_star(n: &Field3, grid: &Grid3) -> Result<Field3> {
    expect_kind(n, FieldKind::DualFace, grid, "div3_star")?;
    Ok(div_impl(n, grid, FieldKind::DualCell))
}

/// Largest absolute entry over all components.
pub fn max_abs(f: &Field3) -> f64 {
    f.max_abs()
}

/// Applies the operator that maps `kind` one step along its chain.
pub fn apply_chain(f: &Field3, grid: &Grid3) -> Result<Field3> {
    match f.kind {
        FieldKind::Node => grad3(f, grid),
        FieldKind::Edge => curl3(f, grid),
        FieldKind::Face => div3(f, grid),
        FieldKind::DualNode => grad3_star(f, grid),
        FieldKind::DualEdge => curl3_star(f, grid),
        FieldKind::DualFace => div3_star(f, grid),
        k => Err(Error::Unsupported(format!(
            "no difference operator starts at {k}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimetic3d::Boundary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grids(n: usize) -> [Grid3; 2] {
        [
            Grid3::cube(n, Boundary::Periodic).unwrap(),
            Grid3::new([1.0, 1.3, 0.7], [n, n + 1, n + 2], Boundary::Bounded).unwrap(),
        ]
    }

    #[test]
    fn constants_are_annihilated() {
        for g in grids(6) {
            let s = Field3::from_fn(FieldKind::Node, &g, |_, _| 2.5);
            let gs = grad3(&s, &g).unwrap();
            if g.periodic() {
                assert_eq!(gs.max_abs(), 0.0);
                let t = Field3::from_fn(FieldKind::Edge, &g, |c, _| c as f64 + 1.0);
                assert_eq!(curl3(&t, &g).unwrap().max_abs(), 0.0);
                let n = Field3::from_fn(FieldKind::Face, &g, |c, _| c as f64 - 4.0);
                assert_eq!(div3(&n, &g).unwrap().max_abs(), 0.0);
                let ss = Field3::from_fn(FieldKind::DualNode, &g, |_, _| -1.0);
                assert_eq!(grad3_star(&ss, &g).unwrap().max_abs(), 0.0);
            } else {
                // Zero extension: interior differences vanish, the rest is the jump to zero.
                let ex = &gs.comps[0];
                assert_eq!(ex[[2, 2, 2]], 0.0);
            }
        }
    }

    #[test]
    fn affine_gradient_is_exact() {
        let g = Grid3::new([1.0, 1.3, 0.7], [5, 6, 7], Boundary::Bounded).unwrap();
        let s = Field3::from_fn(FieldKind::Node, &g, |_, p| p[0] + 2.0 * p[1] + 3.0 * p[2]);
        let gs = grad3(&s, &g).unwrap();
        for (c, want) in [1.0, 2.0, 3.0].iter().enumerate() {
            assert!(gs.comps[c].iter().all(|v| (v - want).abs() < 1e-12));
        }
    }

    #[test]
    fn chains_vanish_on_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for g in grids(7) {
            for (start, mid) in [
                (FieldKind::Node, FieldKind::Edge),
                (FieldKind::DualNode, FieldKind::DualEdge),
            ] {
                let s = Field3::random(start, &g, &mut rng, 0);
                let gs = apply_chain(&s, &g).unwrap();
                let rgs = apply_chain(&gs, &g).unwrap();
                assert!(rgs.max_abs() <= 16.0 * f64::EPSILON * gs.max_abs() / g.h_min());
                let t = Field3::random(mid, &g, &mut rng, 0);
                let rt = apply_chain(&t, &g).unwrap();
                let drt = apply_chain(&rt, &g).unwrap();
                assert!(drt.max_abs() <= 16.0 * f64::EPSILON * rt.max_abs() / g.h_min());
            }
        }
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let g = Grid3::cube(4, Boundary::Bounded).unwrap();
        let s = Field3::zeros(FieldKind::Cell, &g);
        assert!(grad3(&s, &g).is_err());
        assert!(curl3_star(&Field3::zeros(FieldKind::Edge, &g), &g).is_err());
        let other = Grid3::cube(5, Boundary::Bounded).unwrap();
        assert!(div3(&Field3::zeros(FieldKind::Face, &other), &g).is_err());
        assert!(apply_chain(&s, &g).is_err());
    }

    #[test]
    fn dual_difference_is_negative_transpose() {
        let g = Grid3::new([1.0; 3], [3, 4, 5], Boundary::Bounded).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let s = Field3::random(FieldKind::Node, &g, &mut rng, 0);
        let n = Field3::random(FieldKind::DualFace, &g, &mut rng, 0);
        let lhs: f64 = grad3(&s, &g)
            .unwrap()
            .comps
            .iter()
            .zip(&n.comps)
            .map(|(a, b)| (a * b).sum())
            .sum();
        let rhs: f64 = -(&s.comps[0] * &div3_star(&n, &g).unwrap().comps[0]).sum();
        assert!((lhs - rhs).abs() < 1e-12 * lhs.abs().max(1.0));
    }
}
