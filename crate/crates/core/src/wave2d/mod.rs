//! Primal and dual grids on the unit square, the gradient and divergence on
//! each, constant-material star maps, and the 2D scalar wave equation.
//!
//! Indices are 0-based. A 1-based index `(i, j)` in the usual written form of
//! these grids is `(i - 1, j - 1)` here, so primal node `(i, j)` sits at
//! `(i dx, j dy)` and dual node `(i, j)` at `((i + 1/2) dx, (j + 1/2) dy)`.
//! Dual cells are the interior primal nodes: dual cell `(i, j)` is primal node
//! `(i + 1, j + 1)`.

mod wave;

use std::fmt;

use ndarray::Array2;

use crate::error::{invalid, shape, Error, Result};
use crate::leapfrog::Vector;

pub use wave::{
    exact_solution_2d, exact_state, run_wave2d, wave2d_convergence, ExactMode2, Run2, Start2,
    Wave2Ops, WaveState2,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2 {
    pub nx: usize,
    pub ny: usize,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2 {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(invalid(
                "cells",
                format!("need at least 2 per axis, got {nx} x {ny}"),
            ));
        }
        Ok(Self {
            nx,
            ny,
            dx: 1.0 / nx as f64,
            dy: 1.0 / ny as f64,
        })
    }

    pub fn xp(&self, i: usize) -> f64 {
        i as f64 * self.dx
    }

    pub fn yp(&self, j: usize) -> f64 {
        j as f64 * self.dy
    }

    pub fn xd(&self, i: usize) -> f64 {
        (i as f64 + 0.5) * self.dx
    }

    pub fn yd(&self, j: usize) -> f64 {
        (j as f64 + 0.5) * self.dy
    }

    /// Cell area.
    pub fn da(&self) -> f64 {
        self.dx * self.dy
    }
}

/// Where a component lives along one axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Place {
    /// All primal nodes, `n + 1` values.
    Primal,
    /// Cell centres, `n` values.
    Centre,
    /// Interior primal nodes, `n - 1` values.
    Interior,
}

impl Place {
    fn len(self, n: usize) -> usize {
        match self {
            Self::Primal => n + 1,
            Self::Centre => n,
            Self::Interior => n - 1,
        }
    }

    fn coord(self, i: usize, h: f64) -> f64 {
        match self {
            Self::Primal => i as f64 * h,
            Self::Centre => (i as f64 + 0.5) * h,
            Self::Interior => (i + 1) as f64 * h,
        }
    }
}

/// The eight discrete field types in 2D.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field2Kind {
    /// `fp`: primal nodes.
    NodeP,
    /// `gp`: primal cell centres.
    CellP,
    /// `(txp, typ)`: primal edge tangents.
    TangentP,
    /// `(nxp, nyp)`: primal edge normals.
    NormalP,
    /// `fd`: dual nodes.
    NodeD,
    /// `gd`: dual cell centres (interior primal nodes).
    CellD,
    /// `(txd, tyd)`.
    TangentD,
    /// `(nxd, nyd)`.
    NormalD,
}

impl Field2Kind {
    pub const ALL: [Field2Kind; 8] = [
        Self::NodeP,
        Self::CellP,
        Self::TangentP,
        Self::NormalP,
        Self::NodeD,
        Self::CellD,
        Self::TangentD,
        Self::NormalD,
    ];

    fn places(self) -> Vec<[Place; 2]> {
        use Place::*;
        match self {
            Self::NodeP => vec![[Primal, Primal]],
            Self::CellP | Self::NodeD => vec![[Centre, Centre]],
            Self::CellD => vec![[Interior, Interior]],
            Self::TangentP => vec![[Centre, Primal], [Primal, Centre]],
            Self::NormalP => vec![[Primal, Centre], [Centre, Primal]],
            Self::TangentD => vec![[Interior, Centre], [Centre, Interior]],
            Self::NormalD => vec![[Centre, Interior], [Interior, Centre]],
        }
    }

    /// Shape of each component.
    pub fn shapes(self, grid: &Grid2) -> Vec<[usize; 2]> {
        self.places()
            .into_iter()
            .map(|[px, py]| [px.len(grid.nx), py.len(grid.ny)])
            .collect()
    }

    pub fn is_vector(self) -> bool {
        matches!(
            self,
            Self::TangentP | Self::NormalP | Self::TangentD | Self::NormalD
        )
    }
}

impl fmt::Display for Field2Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::NodeP => "fp",
            Self::CellP => "gp",
            Self::TangentP => "(txp, typ)",
            Self::NormalP => "(nxp, nyp)",
            Self::NodeD => "fd",
            Self::CellD => "gd",
            Self::TangentD => "(txd, tyd)",
            Self::NormalD => "(nxd, nyd)",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field2 {
    pub kind: Field2Kind,
    pub comps: Vec<Array2<f64>>,
}

impl Field2 {
    pub fn zeros(kind: Field2Kind, grid: &Grid2) -> Self {
        Self {
            kind,
            comps: kind.shapes(grid).into_iter().map(Array2::zeros).collect(),
        }
    }

    /// Samples `f(component, x, y)` at each stored location, in row-major order.
    pub fn from_fn(
        kind: Field2Kind,
        grid: &Grid2,
        mut f: impl FnMut(usize, f64, f64) -> f64,
    ) -> Self {
        let mut comps = Vec::new();
        for (c, [px, py]) in kind.places().into_iter().enumerate() {
            let mut a = Array2::zeros((px.len(grid.nx), py.len(grid.ny)));
            for ((i, j), v) in a.indexed_iter_mut() {
                *v = f(c, px.coord(i, grid.dx), py.coord(j, grid.dy));
            }
            comps.push(a);
        }
        Self { kind, comps }
    }

    pub fn check(&self, kind: Field2Kind, grid: &Grid2, context: &'static str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Kind {
                context,
                expected: kind.to_string(),
                actual: self.kind.to_string(),
            });
        }
        let want = kind.shapes(grid);
        if self.comps.len() != want.len() {
            return Err(shape(context, want.len(), self.comps.len()));
        }
        for (a, w) in self.comps.iter().zip(want) {
            if a.shape() != w {
                return Err(shape(context, format!("{w:?}"), format!("{:?}", a.shape())));
            }
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.comps
            .iter()
            .flat_map(|a| a.iter())
            .fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Zeroes values on the boundary of the square (primal node positions with
    /// index 0 or n along either axis).
    pub fn pin_boundary(&mut self) {
        for (a, [px, py]) in self.comps.iter_mut().zip(self.kind.places()) {
            let (n0, n1) = a.dim();
            for ((i, j), v) in a.indexed_iter_mut() {
                let on_x = px == Place::Primal && (i == 0 || i + 1 == n0);
                let on_y = py == Place::Primal && (j == 0 || j + 1 == n1);
                if on_x || on_y {
                    *v = 0.0;
                }
            }
        }
    }
}

impl Vector for Field2 {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        debug_assert_eq!(self.kind, x.kind);
        for (a, b) in self.comps.iter_mut().zip(&x.comps) {
            a.scaled_add(alpha, b);
        }
    }

    fn scale(&mut self, alpha: f64) {
        for a in &mut self.comps {
            a.mapv_inplace(|x| x * alpha);
        }
    }

    fn zeros_like(&self) -> Self {
        Self {
            kind: self.kind,
            comps: self
                .comps
                .iter()
                .map(|a| Array2::zeros(a.raw_dim()))
                .collect(),
        }
    }

    fn dim(&self) -> usize {
        self.comps.iter().map(|a| a.len()).sum()
    }
}

/// `(a[i+1, j] - a[i, j]) / h` or the same along `j`.
fn forward(a: &Array2<f64>, axis: usize, h: f64) -> Array2<f64> {
    let (n0, n1) = a.dim();
    let (m0, m1) = if axis == 0 {
        (n0 - 1, n1)
    } else {
        (n0, n1 - 1)
    };
    Array2::from_shape_fn((m0, m1), |(i, j)| {
        let (i2, j2) = if axis == 0 { (i + 1, j) } else { (i, j + 1) };
        (a[[i2, j2]] - a[[i, j]]) / h
    })
}

/// Primal gradient: `fp` to `(txp, typ)`.
pub fn grad2p(f: &Field2, grid: &Grid2) -> Result<Field2> {
    f.check(Field2Kind::NodeP, grid, "grad2p")?;
    let a = &f.comps[0];
    Ok(Field2 {
        kind: Field2Kind::TangentP,
        comps: vec![forward(a, 0, grid.dx), forward(a, 1, grid.dy)],
    })
}

/// Dual gradient: `fd` to `(txd, tyd)`.
pub fn grad2d(f: &Field2, grid: &Grid2) -> Result<Field2> {
    f.check(Field2Kind::NodeD, grid, "grad2d")?;
    let a = &f.comps[0];
    Ok(Field2 {
        kind: Field2Kind::TangentD,
        comps: vec![forward(a, 0, grid.dx), forward(a, 1, grid.dy)],
    })
}

/// Primal divergence: `(nxp, nyp)` to `gp`.
pub fn div2p(n: &Field2, grid: &Grid2) -> Result<Field2> {
    n.check(Field2Kind::NormalP, grid, "div2p")?;
    Ok(Field2 {
        kind: Field2Kind::CellP,
        comps: vec![forward(&n.comps[0], 0, grid.dx) + forward(&n.comps[1], 1, grid.dy)],
    })
}

/// Dual divergence: `(nxd, nyd)` to `gd` at the interior primal nodes.
pub fn div2d(n: &Field2, grid: &Grid2) -> Result<Field2> {
    n.check(Field2Kind::NormalD, grid, "div2d")?;
    Ok(Field2 {
        kind: Field2Kind::CellD,
        comps: vec![forward(&n.comps[0], 0, grid.dx) + forward(&n.comps[1], 1, grid.dy)],
    })
}

/// Constant materials: scalar `a` and diagonal `diag(A11, A22)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Star2 {
    pub a: f64,
    pub a11: f64,
    pub a22: f64,
}

impl Star2 {
    pub fn new(a: f64, a11: f64, a22: f64) -> Result<Self> {
        for (name, v) in [("a", a), ("A11", a11), ("A22", a22)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::NotPositive {
                    location: format!("{name} = {v}"),
                });
            }
        }
        Ok(Self { a, a11, a22 })
    }

    pub fn trivial() -> Self {
        Self {
            a: 1.0,
            a11: 1.0,
            a22: 1.0,
        }
    }

    /// Materials for wave speed `c`: `a = 1/c`, `A = c I`.
    pub fn speed(c: f64) -> Result<Self> {
        Self::new(1.0 / c, c, c)
    }

    /// Maps a field to the other grid. Primal-to-dual maps drop boundary
    /// values; dual-to-primal maps leave the boundary values zero.
    pub fn apply(&self, f: &Field2, grid: &Grid2) -> Result<Field2> {
        f.check(f.kind, grid, "star2")?;
        let c = &f.comps;
        let (nx, ny) = (grid.nx, grid.ny);
        let out = |kind: Field2Kind, comps: Vec<Array2<f64>>| Field2 { kind, comps };
        let shifted = |src: &Array2<f64>, m: [usize; 2], di: usize, dj: usize, w: f64| {
            Array2::from_shape_fn((m[0], m[1]), |(i, j)| w * src[[i + di, j + dj]])
        };
        // Dual to primal: fill the interior, keep a zero boundary ring.
        let embed = |src: &Array2<f64>, m: [usize; 2], di: usize, dj: usize, w: f64| {
            let mut a = Array2::zeros((m[0], m[1]));
            for ((i, j), v) in src.indexed_iter() {
                a[[i + di, j + dj]] = w * v;
            }
            a
        };
        Ok(match f.kind {
            Field2Kind::NodeP => out(
                Field2Kind::CellD,
                vec![shifted(&c[0], [nx - 1, ny - 1], 1, 1, self.a)],
            ),
            Field2Kind::CellD => out(
                Field2Kind::NodeP,
                vec![embed(&c[0], [nx + 1, ny + 1], 1, 1, 1.0 / self.a)],
            ),
            Field2Kind::NodeD => out(Field2Kind::CellP, vec![c[0].mapv(|v| self.a * v)]),
            Field2Kind::CellP => out(Field2Kind::NodeD, vec![c[0].mapv(|v| v / self.a)]),
            Field2Kind::NormalP => out(
                Field2Kind::TangentD,
                vec![
                    shifted(&c[0], [nx - 1, ny], 1, 0, 1.0 / self.a11),
                    shifted(&c[1], [nx, ny - 1], 0, 1, 1.0 / self.a22),
                ],
            ),
            Field2Kind::TangentD => out(
                Field2Kind::NormalP,
                vec![
                    embed(&c[0], [nx + 1, ny], 1, 0, self.a11),
                    embed(&c[1], [nx, ny + 1], 0, 1, self.a22),
                ],
            ),
            Field2Kind::TangentP => out(
                Field2Kind::NormalD,
                vec![
                    shifted(&c[0], [nx, ny - 1], 0, 1, self.a11),
                    shifted(&c[1], [nx - 1, ny], 1, 0, self.a22),
                ],
            ),
            Field2Kind::NormalD => out(
                Field2Kind::TangentP,
                vec![
                    embed(&c[0], [nx, ny + 1], 0, 1, 1.0 / self.a11),
                    embed(&c[1], [nx + 1, ny], 1, 0, 1.0 / self.a22),
                ],
            ),
        })
    }
}

/// Max pointwise error of the four operators against analytic derivatives of
/// a smooth manufactured field on an `n x n` grid.
pub fn operator_errors_2d(n: usize) -> Result<Vec<(&'static str, f64)>> {
    let g = Grid2::new(n, n)?;
    let f = |x: f64, y: f64| (1.3 * x + 0.7 * y).sin() * (2.0 * y).cos();
    let fx = |x: f64, y: f64| 1.3 * (1.3 * x + 0.7 * y).cos() * (2.0 * y).cos();
    let fy = |x: f64, y: f64| {
        0.7 * (1.3 * x + 0.7 * y).cos() * (2.0 * y).cos()
            - 2.0 * (1.3 * x + 0.7 * y).sin() * (2.0 * y).sin()
    };
    // n = (sin(x) e^y, cos(2y) x), div n = cos(x) e^y - 2 x sin(2y)
    let nf = |c: usize, x: f64, y: f64| {
        if c == 0 {
            x.sin() * y.exp()
        } else {
            (2.0 * y).cos() * x
        }
    };
    let dn = |_: usize, x: f64, y: f64| x.cos() * y.exp() - 2.0 * x * (2.0 * y).sin();
    let grad_exact = |c: usize, x: f64, y: f64| if c == 0 { fx(x, y) } else { fy(x, y) };
    let mut out = Vec::new();
    for (name, kind, op) in [
        (
            "grad2p",
            Field2Kind::NodeP,
            grad2p as fn(&Field2, &Grid2) -> Result<Field2>,
        ),
        ("grad2d", Field2Kind::NodeD, grad2d),
    ] {
        let r = op(&Field2::from_fn(kind, &g, |_, x, y| f(x, y)), &g)?;
        out.push((
            name,
            r.sub(&Field2::from_fn(r.kind, &g, grad_exact)).max_abs(),
        ));
    }
    for (name, kind, op) in [
        (
            "div2p",
            Field2Kind::NormalP,
            div2p as fn(&Field2, &Grid2) -> Result<Field2>,
        ),
        ("div2d", Field2Kind::NormalD, div2d),
    ] {
        let r = op(&Field2::from_fn(kind, &g, nf), &g)?;
        out.push((name, r.sub(&Field2::from_fn(r.kind, &g, dn)).max_abs()));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_follow_the_index_ranges() {
        let g = Grid2::new(4, 5).unwrap();
        assert_eq!(Field2Kind::NodeP.shapes(&g), vec![[5, 6]]);
        assert_eq!(Field2Kind::CellD.shapes(&g), vec![[3, 4]]);
        assert_eq!(Field2Kind::TangentP.shapes(&g), vec![[4, 6], [5, 5]]);
        assert_eq!(Field2Kind::NormalP.shapes(&g), vec![[5, 5], [4, 6]]);
        assert_eq!(Field2Kind::TangentD.shapes(&g), vec![[3, 5], [4, 4]]);
        assert_eq!(Field2Kind::NormalD.shapes(&g), vec![[4, 4], [3, 5]]);
        assert!(Grid2::new(1, 4).is_err());
    }

    #[test]
    fn locations() {
        let g = Grid2::new(4, 5).unwrap();
        let t = Field2::from_fn(
            Field2Kind::TangentD,
            &g,
            |c, x, y| if c == 0 { x } else { y },
        );
        // txd(i, j) at (xp(i + 1), yd(j)); tyd(i, j) at (xd(i), yp(j + 1)).
        assert_eq!(t.comps[0][[0, 0]], g.xp(1));
        assert_eq!(t.comps[1][[0, 0]], g.yp(1));
        let n = Field2::from_fn(
            Field2Kind::NormalD,
            &g,
            |c, x, y| if c == 0 { y } else { x },
        );
        assert_eq!(n.comps[0][[2, 1]], g.yp(2));
        assert_eq!(n.comps[1][[2, 1]], g.xp(3));
    }

    #[test]
    fn constants_and_affine() {
        let g = Grid2::new(6, 7).unwrap();
        let c = Field2::from_fn(Field2Kind::NodeP, &g, |_, _, _| 4.0);
        assert_eq!(grad2p(&c, &g).unwrap().max_abs(), 0.0);
        let c = Field2::from_fn(Field2Kind::NodeD, &g, |_, _, _| -1.0);
        assert_eq!(grad2d(&c, &g).unwrap().max_abs(), 0.0);
        let c = Field2::from_fn(Field2Kind::NormalD, &g, |k, _, _| k as f64 + 2.0);
        assert_eq!(div2d(&c, &g).unwrap().max_abs(), 0.0);
        let c = Field2::from_fn(Field2Kind::NormalP, &g, |k, _, _| k as f64 + 2.0);
        assert_eq!(div2p(&c, &g).unwrap().max_abs(), 0.0);
        let f = Field2::from_fn(Field2Kind::NodeP, &g, |_, x, y| 2.0 * x - 3.0 * y);
        let t = grad2p(&f, &g).unwrap();
        assert!(t.comps[0].iter().all(|v| (v - 2.0).abs() < 1e-12));
        assert!(t.comps[1].iter().all(|v| (v + 3.0).abs() < 1e-12));
    }

    #[test]
    fn operators_are_second_order() {
        let c = operator_errors_2d(16).unwrap();
        let f = operator_errors_2d(32).unwrap();
        for ((name, ec), (_, ef)) in c.iter().zip(&f) {
            let r = ec / ef;
            assert!((3.5..=4.5).contains(&r), "{name}: {r}");
        }
    }

    #[test]
    fn star_values_and_round_trip() {
        let g = Grid2::new(4, 5).unwrap();
        let st = Star2::new(1.0, 2.0, 3.0).unwrap();
        let t = Field2::from_fn(Field2Kind::TangentP, &g, |_, _, _| 1.0);
        let n = st.apply(&t, &g).unwrap();
        assert_eq!(n.kind, Field2Kind::NormalD);
        assert!(n.comps[0].iter().all(|v| *v == 2.0));
        assert!(n.comps[1].iter().all(|v| *v == 3.0));
        // Interior values survive primal -> dual -> primal.
        let st = Star2::new(0.7, 1.3, 2.9).unwrap();
        for k in [
            Field2Kind::NodeP,
            Field2Kind::TangentP,
            Field2Kind::NormalP,
            Field2Kind::NodeD,
        ] {
            let mut f = Field2::from_fn(k, &g, |c, x, y| 1.0 + (x * 3.0 + y + c as f64).sin());
            f.pin_boundary();
            let back = st.apply(&st.apply(&f, &g).unwrap(), &g).unwrap();
            assert_eq!(back.kind, k);
            for (a, b) in back
                .comps
                .iter()
                .flat_map(|a| a.iter())
                .zip(f.comps.iter().flat_map(|a| a.iter()))
            {
                assert!((a - b).abs() <= f64::EPSILON * b.abs());
            }
        }
        assert!(Star2::new(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn trivial_star_is_a_shift() {
        let g = Grid2::new(3, 4).unwrap();
        let f = Field2::from_fn(Field2Kind::NodeP, &g, |_, x, y| x + 10.0 * y);
        let d = Star2::trivial().apply(&f, &g).unwrap();
        assert_eq!(d.comps[0][[0, 0]], f.comps[0][[1, 1]]);
        assert_eq!(d.comps[0][[1, 2]], f.comps[0][[2, 3]]);
    }

    #[test]
    fn wrong_kind_is_rejected() {
        let g = Grid2::new(3, 3).unwrap();
        assert!(grad2p(&Field2::zeros(Field2Kind::NodeD, &g), &g).is_err());
        assert!(div2d(&Field2::zeros(Field2Kind::NormalP, &g), &g).is_err());
        let other = Grid2::new(4, 3).unwrap();
        assert!(grad2p(&Field2::zeros(Field2Kind::NodeP, &other), &g).is_err());
    }
}
