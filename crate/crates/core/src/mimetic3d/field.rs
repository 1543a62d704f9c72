use std::fmt;

use ndarray::{Array3, Zip};
use rand::Rng;

use super::grid::{Grid3, Stagger};
use crate::error::{shape, Error, Result};
use crate::leapfrog::Vector;

/// The eight field spaces: scalars and vectors on the primal and dual grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Node,
    Edge,
    Face,
    Cell,
    DualNode,
    DualEdge,
    DualFace,
    DualCell,
}

const fn only(axis: usize) -> Stagger {
    [axis == 0, axis == 1, axis == 2]
}

const fn all_but(axis: usize) -> Stagger {
    [axis != 0, axis != 1, axis != 2]
}

impl FieldKind {
    pub const ALL: [FieldKind; 8] = [
        Self::Node,
        Self::Edge,
        Self::Face,
        Self::Cell,
        Self::DualNode,
        Self::DualEdge,
        Self::DualFace,
        Self::DualCell,
    ];

    pub fn is_vector(self) -> bool {
        matches!(
            self,
            Self::Edge | Self::Face | Self::DualEdge | Self::DualFace
        )
    }

    pub fn is_dual(self) -> bool {
        matches!(
            self,
            Self::DualNode | Self::DualEdge | Self::DualFace | Self::DualCell
        )
    }

    pub fn components(self) -> usize {
        if self.is_vector() {
            3
        } else {
            1
        }
    }

    /// Storage location of each component.
    pub fn staggers(self) -> Vec<Stagger> {
        match self {
            Self::Node | Self::DualCell => vec![[false; 3]],
            Self::Cell | Self::DualNode => vec![[true; 3]],
            Self::Edge | Self::DualFace => (0..3).map(only).collect(),
            Self::Face | Self::DualEdge => (0..3).map(all_but).collect(),
        }
    }

    /// Power of length in the field's dimension: 0 for nodes, -1 edges, -2 faces, -3 cells.
    pub fn length_power(self) -> i32 {
        match self {
            Self::Node | Self::DualNode => 0,
            Self::Edge | Self::DualEdge => -1,
            Self::Face | Self::DualFace => -2,
            Self::Cell | Self::DualCell => -3,
        }
    }

    pub fn code(self) -> u32 {
        Self::ALL.iter().position(|k| *k == self).unwrap() as u32
    }

    pub fn from_code(code: u32) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::Node => "node",
            Self::Edge => "edge",
            Self::Face => "face",
            Self::Cell => "cell",
            Self::DualNode => "dual-node",
            Self::DualEdge => "dual-edge",
            Self::DualFace => "dual-face",
            Self::DualCell => "dual-cell",
        };
        f.write_str(s)
    }
}

/// A scalar or vector field with one array per component.
#[derive(Debug, Clone, PartialEq)]
pub struct Field3 {
    pub kind: FieldKind,
    pub comps: Vec<Array3<f64>>,
}

impl Field3 {
    pub fn zeros(kind: FieldKind, grid: &Grid3) -> Self {
        let comps = kind
            .staggers()
            .into_iter()
            .map(|s| Array3::zeros(grid.shape(s)))
            .collect();
        Self { kind, comps }
    }

    /// Samples `f(component, point)` at every stored location.
    pub fn from_fn(kind: FieldKind, grid: &Grid3, f: impl Fn(usize, [f64; 3]) -> f64) -> Self {
        let comps = kind
            .staggers()
            .into_iter()
            .enumerate()
            .map(|(c, s)| {
                Array3::from_shape_fn(grid.shape(s), |(i, j, k)| f(c, grid.point(s, [i, j, k])))
            })
            .collect();
        Self { kind, comps }
    }

    /// Uniform random values in `[-1, 1)`, zero within `margin` cells of the
    /// boundary of a bounded box.
    pub fn random<R: Rng>(kind: FieldKind, grid: &Grid3, rng: &mut R, margin: usize) -> Self {
        let comps = kind
            .staggers()
            .into_iter()
            .map(|s| {
                let sh = grid.shape(s);
                let mut a = Array3::zeros(sh);
                for ((i, j, k), v) in a.indexed_iter_mut() {
                    let idx = [i, j, k];
                    let inside = grid.periodic()
                        || (0..3).all(|ax| idx[ax] >= margin && idx[ax] + margin < sh[ax]);
                    if inside {
                        *v = rng.gen_range(-1.0..1.0);
                    }
                }
                a
            })
            .collect();
        Self { kind, comps }
    }

    pub fn staggers(&self) -> Vec<Stagger> {
        self.kind.staggers()
    }

    /// Checks kind and component shapes against `grid`.
    pub fn check(&self, kind: FieldKind, grid: &Grid3, context: &'static str) -> Result<()> {
        if self.kind != kind {
            return Err(Error::Kind {
                context,
                expected: kind.to_string(),
                actual: self.kind.to_string(),
            });
        }
        self.check_shapes(grid, context)
    }

    pub fn check_shapes(&self, grid: &Grid3, context: &'static str) -> Result<()> {
        let st = self.kind.staggers();
        if self.comps.len() != st.len() {
            return Err(shape(context, st.len(), self.comps.len()));
        }
        for (a, s) in self.comps.iter().zip(st) {
            let want = grid.shape(s);
            if a.shape() != want {
                return Err(shape(
                    context,
                    format!("{want:?}"),
                    format!("{:?}", a.shape()),
                ));
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

    pub fn len(&self) -> usize {
        self.comps.iter().map(|a| a.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_finite(&self) -> bool {
        self.comps.iter().all(|a| a.iter().all(|x| x.is_finite()))
    }

    /// Same values relabelled as another kind with identical storage locations.
    pub fn relabel(mut self, kind: FieldKind) -> Result<Self> {
        if kind.staggers() != self.kind.staggers() {
            return Err(Error::Kind {
                context: "relabel",
                expected: format!("kind stored like {}", self.kind),
                actual: kind.to_string(),
            });
        }
        self.kind = kind;
        Ok(self)
    }

    /// Elementwise `self - other` (same kind).
    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        out.axpy(-1.0, other);
        out
    }

    /// Zeroes every value on the boundary of a bounded box (see [`Grid3::on_boundary`]).
    pub fn pin_boundary(&mut self, grid: &Grid3) {
        if grid.periodic() {
            return;
        }
        for (a, s) in self.comps.iter_mut().zip(self.kind.staggers()) {
            for ((i, j, k), v) in a.indexed_iter_mut() {
                if grid.on_boundary(s, [i, j, k]) {
                    *v = 0.0;
                }
            }
        }
    }
}

impl Vector for Field3 {
    fn axpy(&mut self, alpha: f64, x: &Self) {
        debug_assert_eq!(self.kind, x.kind);
        for (a, b) in self.comps.iter_mut().zip(&x.comps) {
            Zip::from(a).and(b).for_each(|a, &b| *a += alpha * b);
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
                .map(|a| Array3::zeros(a.raw_dim()))
                .collect(),
        }
    }

    fn dim(&self) -> usize {
        self.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mimetic3d::Boundary;
    use rand::SeedableRng;

    #[test]
    fn dual_locations_match_complementary_primal() {
        assert_eq!(FieldKind::DualEdge.staggers(), FieldKind::Face.staggers());
        assert_eq!(FieldKind::DualFace.staggers(), FieldKind::Edge.staggers());
        assert_eq!(FieldKind::DualNode.staggers(), FieldKind::Cell.staggers());
        assert_eq!(FieldKind::DualCell.staggers(), FieldKind::Node.staggers());
    }

    #[test]
    fn yee_placement() {
        // E_x at (i+1/2, j, k) and H_x at (i, j+1/2, k+1/2).
        let g = Grid3::cube(4, Boundary::Bounded).unwrap();
        let e = FieldKind::Edge.staggers();
        let h = FieldKind::DualEdge.staggers();
        assert_eq!(g.point(e[0], [1, 2, 3]), [0.375, 0.5, 0.75]);
        assert_eq!(g.point(h[0], [1, 2, 3]), [0.25, 0.625, 0.875]);
        assert_eq!(g.point(e[2], [1, 2, 3]), [0.25, 0.5, 0.875]);
        assert_eq!(g.point(h[2], [1, 2, 3]), [0.375, 0.625, 0.75]);
    }

    #[test]
    fn kind_codes_round_trip() {
        for k in FieldKind::ALL {
            assert_eq!(FieldKind::from_code(k.code()), Some(k));
        }
        assert_eq!(FieldKind::from_code(8), None);
        assert_eq!(FieldKind::Face.length_power(), -2);
    }

    #[test]
    fn random_respects_margin() {
        let g = Grid3::cube(6, Boundary::Bounded).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let f = Field3::random(FieldKind::Node, &g, &mut rng, 2);
        let a = &f.comps[0];
        assert_eq!(a[[1, 3, 3]], 0.0);
        assert_eq!(a[[5, 3, 3]], 0.0);
        assert_ne!(a[[2, 3, 3]], 0.0);
        f.check(FieldKind::Node, &g, "test").unwrap();
        assert!(f.check(FieldKind::Cell, &g, "test").is_err());
    }

    #[test]
    fn pinning_zeroes_tangential_edges() {
        let g = Grid3::cube(3, Boundary::Bounded).unwrap();
        let mut e = Field3::from_fn(FieldKind::Edge, &g, |_, _| 1.0);
        e.pin_boundary(&g);
        // x-edges survive only with j, k interior.
        let ex = &e.comps[0];
        assert_eq!(ex[[0, 1, 1]], 1.0);
        assert_eq!(ex[[0, 0, 1]], 0.0);
        assert_eq!(ex[[2, 1, 3]], 0.0);
        assert_eq!(ex.iter().filter(|v| **v == 1.0).count(), 3 * 2 * 2);
    }
}
