//! Material "star" operators that carry fields between the primal and dual grids.
//!
//! Scalars `a` (at primal nodes) and `b` (at primal cells) map node and cell
//! scalars across; matrices `A` (at primal edges) and `B` (at primal faces) map
//! edge and face vectors across. A diagonal entry multiplies the collocated
//! component. An off-diagonal entry multiplies the other component averaged to
//! the target location over its nearest four neighbours.

use ndarray::Array3;

use super::field::{Field3, FieldKind};
use super::grid::{Grid3, Stagger};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MatrixMode {
    /// `alpha(x) I`, taken from the `(0, 0)` entry of the sampled matrix.
    Scalar,
    Diagonal,
    /// Symmetric matrix with off-diagonal coupling through averaging. Star and
    /// inverse star are not exact inverses in this mode.
    Full,
}

impl std::str::FromStr for MatrixMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "scalar" => Ok(Self::Scalar),
            "diagonal" | "diag" => Ok(Self::Diagonal),
            "full" => Ok(Self::Full),
            o => Err(Error::Config(format!("unknown matrix mode `{o}`"))),
        }
    }
}

/// Averages `src` stored at `from` onto the locations `to`. Along each axis
/// where the two differ the two nearest neighbours are used; on a bounded box
/// neighbours outside the box are dropped from the average.
pub fn average_to(src: &Array3<f64>, from: Stagger, to: Stagger, grid: &Grid3) -> Array3<f64> {
    let sh = grid.shape(to);
    let src_sh = src.shape();
    let periodic = grid.periodic();
    // For each axis, the candidate source offsets relative to the target index.
    let offsets: Vec<Vec<isize>> = (0..3)
        .map(|a| match (from[a], to[a]) {
            (true, false) => vec![-1, 0],
            (false, true) => vec![0, 1],
            _ => vec![0],
        })
        .collect();
    Array3::from_shape_fn(sh, |(i, j, k)| {
        let idx = [i as isize, j as isize, k as isize];
        let mut sum = 0.0;
        let mut count = 0usize;
        for &di in &offsets[0] {
            for &dj in &offsets[1] {
                for &dk in &offsets[2] {
                    let mut p = [idx[0] + di, idx[1] + dj, idx[2] + dk];
                    let mut ok = true;
                    for a in 0..3 {
                        let n = src_sh[a] as isize;
                        if periodic {
                            p[a] = p[a].rem_euclid(n);
                        } else if p[a] < 0 || p[a] >= n {
                            ok = false;
                        }
                    }
                    if ok {
                        sum += src[[p[0] as usize, p[1] as usize, p[2] as usize]];
                        count += 1;
                    }
                }
            }
        }
        if count == 0 {
            0.0
        } else {
            sum / count as f64
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
struct FullParts {
    /// Row-major entries, each sampled at the location of its row.
    m: Vec<Array3<f64>>,
    /// Pointwise inverse, same layout.
    inv: Vec<Array3<f64>>,
}

/// A 3x3 material matrix field acting on vector fields stored at `locs`.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor3 {
    mode: MatrixMode,
    locs: [Stagger; 3],
    diag: [Array3<f64>; 3],
    full: Option<FullParts>,
}

fn invert3(m: [[f64; 3]; 3]) -> Option<[[f64; 3]; 3]> {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = (m[i1][j1] * m[i2][j2] - m[i1][j2] * m[i2][j1]) / det;
        }
    }
    Some(r)
}

impl Tensor3 {
    /// Samples `f` at the locations of each row.
    pub fn sample(
        grid: &Grid3,
        locs: [Stagger; 3],
        mode: MatrixMode,
        f: impl Fn([f64; 3]) -> [[f64; 3]; 3],
    ) -> Result<Self> {
        let mut diag: [Array3<f64>; 3] =
            std::array::from_fn(|r| Array3::zeros(grid.shape(locs[r])));
        let mut full = (mode == MatrixMode::Full).then(|| FullParts {
            m: (0..9)
                .map(|e| Array3::zeros(grid.shape(locs[e / 3])))
                .collect(),
            inv: (0..9)
                .map(|e| Array3::zeros(grid.shape(locs[e / 3])))
                .collect(),
        });
        for r in 0..3 {
            let sh = grid.shape(locs[r]);
            for i in 0..sh[0] {
                for j in 0..sh[1] {
                    for k in 0..sh[2] {
                        let x = grid.point(locs[r], [i, j, k]);
                        let m = f(x);
                        let d = match mode {
                            MatrixMode::Scalar => m[0][0],
                            _ => m[r][r],
                        };
                        if !(d > 0.0) || !d.is_finite() {
                            return Err(Error::NotPositive {
                                location: format!("row {r} at {x:?}"),
                            });
                        }
                        diag[r][[i, j, k]] = d;
                        if let Some(fp) = full.as_mut() {
                            let asym = (0..3)
                                .flat_map(|p| (0..3).map(move |q| (p, q)))
                                .map(|(p, q)| (m[p][q] - m[q][p]).abs())
                                .fold(0.0, f64::max);
                            let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
                            if asym > 1e-12 * scale {
                                return Err(invalid(
                                    "material",
                                    format!("matrix not symmetric at {x:?}"),
                                ));
                            }
                            let inv = invert3(m).ok_or_else(|| Error::NotPositive {
                                location: format!("singular matrix at {x:?}"),
                            })?;
                            for c in 0..3 {
                                fp.m[3 * r + c][[i, j, k]] = m[r][c];
                                fp.inv[3 * r + c][[i, j, k]] = inv[r][c];
                            }
                        }
                    }
                }
            }
        }
        Ok(Self {
            mode,
            locs,
            diag,
            full,
        })
    }

    pub fn mode(&self) -> MatrixMode {
        self.mode
    }

    pub fn locations(&self) -> [Stagger; 3] {
        self.locs
    }

    /// Whether off-diagonal coupling is present.
    pub fn is_full(&self) -> bool {
        self.full.is_some()
    }

    /// Diagonal entry arrays.
    pub fn diagonal(&self) -> &[Array3<f64>; 3] {
        &self.diag
    }

    fn apply_parts(&self, comps: &[Array3<f64>], grid: &Grid3, inverse: bool) -> Vec<Array3<f64>> {
        match (&self.full, inverse) {
            (None, false) => (0..3).map(|r| &comps[r] * &self.diag[r]).collect(),
            (None, true) => (0..3).map(|r| &comps[r] / &self.diag[r]).collect(),
            (Some(fp), inv) => {
                let m = if inv { &fp.inv } else { &fp.m };
                (0..3)
                    .map(|r| {
                        let mut out = &comps[r] * &m[3 * r + r];
                        for c in (0..3).filter(|c| *c != r) {
                            let avg = average_to(&comps[c], self.locs[c], self.locs[r], grid);
                            out += &(&avg * &m[3 * r + c]);
                        }
                        out
                    })
                    .collect()
            }
        }
    }

    /// Upper bound on the largest eigenvalue (largest absolute row sum).
    pub fn upper_bound(&self) -> f64 {
        match &self.full {
            None => self
                .diag
                .iter()
                .flat_map(|a| a.iter())
                .fold(0.0, |m, v| m.max(*v)),
            Some(fp) => (0..3)
                .map(|r| {
                    let mut s = Array3::<f64>::zeros(fp.m[3 * r].raw_dim());
                    for c in 0..3 {
                        s += &fp.m[3 * r + c].mapv(f64::abs);
                    }
                    s.iter().fold(0.0_f64, |m, v| m.max(*v))
                })
                .fold(0.0, f64::max),
        }
    }

    /// Lower bound on the smallest eigenvalue (smallest diagonal entry for
    /// scalar and diagonal modes, Gershgorin otherwise).
    pub fn lower_bound(&self) -> f64 {
        match &self.full {
            None => self
                .diag
                .iter()
                .flat_map(|a| a.iter())
                .fold(f64::INFINITY, |m, v| m.min(*v)),
            Some(fp) => (0..3)
                .map(|r| {
                    let mut s = fp.m[3 * r + r].clone();
                    for c in (0..3).filter(|c| *c != r) {
                        s -= &fp.m[3 * r + c].mapv(f64::abs);
                    }
                    s.iter().fold(f64::INFINITY, |m, v| m.min(*v))
                })
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// The four material star operators on one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Star3 {
    /// At primal nodes.
    pub a: Array3<f64>,
    /// At primal cells.
    pub b: Array3<f64>,
    /// Acts on primal edge vectors.
    pub big_a: Tensor3,
    /// Acts on dual edge vectors (stored at primal faces).
    pub big_b: Tensor3,
}

fn sample_scalar(
    grid: &Grid3,
    s: Stagger,
    f: impl Fn([f64; 3]) -> f64,
    name: &'static str,
) -> Result<Array3<f64>> {
    let sh = grid.shape(s);
    let mut out = Array3::zeros(sh);
    for ((i, j, k), v) in out.indexed_iter_mut() {
        let x = grid.point(s, [i, j, k]);
        let val = f(x);
        if !(val > 0.0) || !val.is_finite() {
            return Err(Error::NotPositive {
                location: format!("{name} at {x:?}"),
            });
        }
        *v = val;
    }
    Ok(out)
}

fn locs(kind: FieldKind) -> [Stagger; 3] {
    let s = kind.staggers();
    [s[0], s[1], s[2]]
}

impl Star3 {
    pub fn from_fns(
        grid: &Grid3,
        a: impl Fn([f64; 3]) -> f64,
        b: impl Fn([f64; 3]) -> f64,
        big_a: impl Fn([f64; 3]) -> [[f64; 3]; 3],
        big_b: impl Fn([f64; 3]) -> [[f64; 3]; 3],
        mode: MatrixMode,
    ) -> Result<Self> {
        Ok(Self {
            a: sample_scalar(grid, [false; 3], a, "a")?,
            b: sample_scalar(grid, [true; 3], b, "b")?,
            big_a: Tensor3::sample(grid, locs(FieldKind::Edge), mode, big_a)?,
            big_b: Tensor3::sample(grid, locs(FieldKind::Face), mode, big_b)?,
        })
    }

    /// `a = b = 1`, `A = B = I`.
    pub fn trivial(grid: &Grid3) -> Self {
        Self::constant(grid, 1.0, 1.0, [1.0; 3], [1.0; 3]).expect("unit materials are valid")
    }

    /// Constant scalars and constant diagonal matrices.
    pub fn constant(
        grid: &Grid3,
        a: f64,
        b: f64,
        a_diag: [f64; 3],
        b_diag: [f64; 3],
    ) -> Result<Self> {
        let diag =
            |d: [f64; 3]| move |_: [f64; 3]| [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]];
        Self::from_fns(
            grid,
            |_| a,
            |_| b,
            diag(a_diag),
            diag(b_diag),
            MatrixMode::Diagonal,
        )
    }

    /// Electromagnetic materials: permittivity in the `A` role, permeability in
    /// the `B` role, unit scalars.
    pub fn maxwell(
        grid: &Grid3,
        eps: impl Fn([f64; 3]) -> [[f64; 3]; 3],
        mu: impl Fn([f64; 3]) -> [[f64; 3]; 3],
        mode: MatrixMode,
    ) -> Result<Self> {
        Self::from_fns(grid, |_| 1.0, |_| 1.0, eps, mu, mode)
    }

    /// The more general of the two matrix modes.
    pub fn mode(&self) -> MatrixMode {
        self.big_a.mode().max(self.big_b.mode())
    }

    /// Fails when a matrix is in full mode, where star and inverse star are not
    /// exact inverses and conservation cannot be guaranteed.
    pub fn require_exact_inverse(&self) -> Result<()> {
        if self.mode() == MatrixMode::Full {
            return Err(Error::Config(
                "full matrix materials cannot be used in a run that guarantees conservation".into(),
            ));
        }
        Ok(())
    }

    /// `sqrt(max A / min a)`, bounding the wave speed of the scalar wave operator.
    pub fn speed_bound(&self) -> f64 {
        let amin = self.a.iter().fold(f64::INFINITY, |m, v| m.min(*v));
        (self.big_a.upper_bound() / amin).sqrt()
    }

    fn check_grid(&self, f: &Field3, grid: &Grid3) -> Result<()> {
        f.check_shapes(grid, "star")?;
        if self.a.shape() != grid.shape([false; 3]) {
            return Err(invalid(
                "star",
                "materials were sampled on a different grid",
            ));
        }
        Ok(())
    }

    /// Maps a field to the other grid: node <-> dual cell through `a`, dual node
    /// <-> cell through `b`, edge <-> dual face through `A`, dual edge <-> face
    /// through `B`.
    pub fn star(&self, f: &Field3, grid: &Grid3) -> Result<Field3> {
        self.check_grid(f, grid)?;
        let c = &f.comps;
        let (kind, comps) = match f.kind {
            FieldKind::Node => (FieldKind::DualCell, vec![&c[0] * &self.a]),
            FieldKind::DualCell => (FieldKind::Node, vec![&c[0] / &self.a]),
            FieldKind::DualNode => (FieldKind::Cell, vec![&c[0] * &self.b]),
            FieldKind::Cell => (FieldKind::DualNode, vec![&c[0] / &self.b]),
            FieldKind::Edge => (FieldKind::DualFace, self.big_a.apply_parts(c, grid, false)),
            FieldKind::DualFace => (FieldKind::Edge, self.big_a.apply_parts(c, grid, true)),
            FieldKind::DualEdge => (FieldKind::Face, self.big_b.apply_parts(c, grid, false)),
            FieldKind::Face => (FieldKind::DualEdge, self.big_b.apply_parts(c, grid, true)),
        };
        Ok(Field3 { kind, comps })
    }

    /// Node scalar to dual cell scalar.
    pub fn star_a(&self, s: &Field3, grid: &Grid3) -> Result<Field3> {
        s.check(FieldKind::Node, grid, "star_a")?;
        self.star(s, grid)
    }

    /// Dual cell scalar back to node scalar.
    pub fn inv_star_a(&self, d: &Field3, grid: &Grid3) -> Result<Field3> {
        d.check(FieldKind::DualCell, grid, "inv_star_a")?;
        self.star(d, grid)
    }

    /// Dual node scalar to cell scalar.
    pub fn star_b(&self, s: &Field3, grid: &Grid3) -> Result<Field3> {
        s.check(FieldKind::DualNode, grid, "star_b")?;
        self.star(s, grid)
    }

    /// Cell scalar back to dual node scalar.
    pub fn inv_star_b(&self, d: &Field3, grid: &Grid3) -> Result<Field3> {
        d.check(FieldKind::Cell, grid, "inv_star_b")?;
        self.star(d, grid)
    }

    /// Edge vector to dual face vector.
    pub fn star_big_a(&self, t: &Field3, grid: &Grid3) -> Result<Field3> {
        t.check(FieldKind::Edge, grid, "star_big_a")?;
        self.star(t, grid)
    }

    /// Dual face vector back to edge vector.
    pub fn inv_star_big_a(&self, n: &Field3, grid: &Grid3) -> Result<Field3> {
        n.check(FieldKind::DualFace, grid, "inv_star_big_a")?;
        self.star(n, grid)
    }

    /// Dual edge vector to face vector.
    pub fn star_big_b(&self, t: &Field3, grid: &Grid3) -> Result<Field3> {
        t.check(FieldKind::DualEdge, grid, "star_big_b")?;
        self.star(t, grid)
    }

    /// Face vector back to dual edge vector.
    pub fn inv_star_big_b(&self, n: &Field3, grid: &Grid3) -> Result<Field3> {
        n.check(FieldKind::Face, grid, "inv_star_big_b")?;
        self.star(n, grid)
    }
}
