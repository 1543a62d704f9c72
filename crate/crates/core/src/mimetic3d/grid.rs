use crate::error::{invalid, Result};

/// Per-axis half-cell offset of a storage location.
pub type Stagger = [bool; 3];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Periodic,
    /// Finite box; values outside read as zero.
    Bounded,
}

/// Uniform box `[0, L_x] x [0, L_y] x [0, L_z]` split into `n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid3 {
    pub n: [usize; 3],
    pub h: [f64; 3],
    pub boundary: Boundary,
}

impl Grid3 {
    pub fn new(lengths: [f64; 3], n: [usize; 3], boundary: Boundary) -> Result<Self> {
        if n.iter().any(|&c| c < 2) {
            return Err(invalid(
                "n",
                format!("every axis needs at least 2 cells, got {n:?}"),
            ));
        }
        if lengths.iter().any(|&l| !(l > 0.0) || !l.is_finite()) {
            return Err(invalid(
                "lengths",
                format!("must be finite and > 0, got {lengths:?}"),
            ));
        }
        let h = [0, 1, 2].map(|a| lengths[a] / n[a] as f64);
        Ok(Self { n, h, boundary })
    }

    /// Unit cube with `n` cells per axis.
    pub fn cube(n: usize, boundary: Boundary) -> Result<Self> {
        Self::new([1.0; 3], [n; 3], boundary)
    }

    pub fn periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn lengths(&self) -> [f64; 3] {
        [0, 1, 2].map(|a| self.h[a] * self.n[a] as f64)
    }

    /// Cell volume.
    pub fn dv(&self) -> f64 {
        self.h[0] * self.h[1] * self.h[2]
    }

    /// Number of stored values along `axis` for the given offset.
    pub fn len_along(&self, axis: usize, half: bool) -> usize {
        match (self.boundary, half) {
            (Boundary::Periodic, _) => self.n[axis],
            (Boundary::Bounded, true) => self.n[axis],
            (Boundary::Bounded, false) => self.n[axis] + 1,
        }
    }

    pub fn shape(&self, s: Stagger) -> [usize; 3] {
        [0, 1, 2].map(|a| self.len_along(a, s[a]))
    }

    pub fn coord(&self, axis: usize, idx: usize, half: bool) -> f64 {
        (idx as f64 + if half { 0.5 } else { 0.0 }) * self.h[axis]
    }

    pub fn point(&self, s: Stagger, idx: [usize; 3]) -> [f64; 3] {
        [0, 1, 2].map(|a| self.coord(a, idx[a], s[a]))
    }

    /// Whether `idx` lies on the boundary of a bounded box along any
    /// unstaggered axis.
    pub fn on_boundary(&self, s: Stagger, idx: [usize; 3]) -> bool {
        !self.periodic() && (0..3).any(|a| !s[a] && (idx[a] == 0 || idx[a] == self.n[a]))
    }

    /// Smallest spacing.
    pub fn h_min(&self) -> f64 {
        self.h.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// `sqrt(1/hx^2 + 1/hy^2 + 1/hz^2)`.
    pub fn inverse_spacing_norm(&self) -> f64 {
        self.h.iter().map(|h| 1.0 / (h * h)).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shapes_follow_boundary_policy() {
        let g = Grid3::new([1.0, 2.0, 3.0], [4, 5, 6], Boundary::Bounded).unwrap();
        assert_eq!(g.shape([false; 3]), [5, 6, 7]);
        assert_eq!(g.shape([true; 3]), [4, 5, 6]);
        assert_eq!(g.shape([true, false, false]), [4, 6, 7]);
        let p = Grid3::new([1.0; 3], [4, 5, 6], Boundary::Periodic).unwrap();
        assert_eq!(p.shape([false; 3]), [4, 5, 6]);
        assert_eq!(p.shape([true; 3]), [4, 5, 6]);
        assert!((g.dv() - 0.25 * 0.4 * 0.5).abs() < 1e-15);
    }

    #[test]
    fn rejects_degenerate_grids() {
        assert!(Grid3::cube(1, Boundary::Bounded).is_err());
        assert!(Grid3::new([0.0, 1.0, 1.0], [4; 3], Boundary::Bounded).is_err());
    }

    #[test]
    fn coordinates_and_boundary_flags() {
        let g = Grid3::cube(4, Boundary::Bounded).unwrap();
        assert_eq!(g.point([true, false, false], [0, 1, 2]), [0.125, 0.25, 0.5]);
        assert!(g.on_boundary([true, false, false], [3, 0, 2]));
        assert!(!g.on_boundary([true, false, false], [3, 1, 2]));
        assert!(!g.on_boundary([true, true, true], [0, 0, 0]));
    }
}
