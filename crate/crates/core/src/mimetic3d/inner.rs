//! The eight weighted inner products.
//!
//! Weights: node `a`, edge `A`, face `B^-1`, cell `b^-1`, dual node `b`, dual
//! edge `B`, dual face `A^-1`, dual cell `a^-1`, all times the cell volume.
//! Sums run component by component in row-major order so results are
//! reproducible bit for bit.

use ndarray::Array3;

use super::field::{Field3, FieldKind};
use super::grid::Grid3;
use super::star::Star3;
use crate::error::{Error, Result};

/// `dV * sum f g` over fields stored at the same locations.
pub fn bilinear(f: &Field3, g: &Field3, grid: &Grid3) -> Result<f64> {
    if f.kind.staggers() != g.kind.staggers() {
        return Err(Error::Kind {
            context: "bilinear",
            expected: format!("kind stored like {}", f.kind),
            actual: g.kind.to_string(),
        });
    }
    f.check_shapes(grid, "bilinear")?;
    g.check_shapes(grid, "bilinear")?;
    let mut sum = 0.0;
    for (a, b) in f.comps.iter().zip(&g.comps) {
        for (x, y) in a.iter().zip(b.iter()) {
            sum += x * y;
        }
    }
    Ok(sum * grid.dv())
}

enum Weight<'a> {
    Times(&'a Array3<f64>),
    Over(&'a Array3<f64>),
}

fn weighted_sum(f: &Array3<f64>, g: &Array3<f64>, w: Weight<'_>) -> f64 {
    let mut sum = 0.0;
    match w {
        Weight::Times(w) => {
            for ((x, y), w) in f.iter().zip(g.iter()).zip(w.iter()) {
                sum += w * (x * y);
            }
        }
        Weight::Over(w) => {
            for ((x, y), w) in f.iter().zip(g.iter()).zip(w.iter()) {
                sum += (x * y) / w;
            }
        }
    }
    sum
}

/// Inner product on the space of `f.kind`; both fields must share that kind.
pub fn inner3(f: &Field3, g: &Field3, star: &Star3, grid: &Grid3) -> Result<f64> {
    if f.kind != g.kind {
        return Err(Error::Kind {
            context: "inner3",
            expected: f.kind.to_string(),
            actual: g.kind.to_string(),
        });
    }
    f.check_shapes(grid, "inner3")?;
    g.check_shapes(grid, "inner3")?;
    let tensor = match f.kind {
        FieldKind::Edge | FieldKind::DualFace => Some(&star.big_a),
        FieldKind::Face | FieldKind::DualEdge => Some(&star.big_b),
        _ => None,
    };
    if tensor.is_some_and(|t| t.is_full()) {
        let w = star.star(f, grid)?;
        return bilinear(&w.relabel(g.kind)?, g, grid);
    }
    let mut sum = 0.0;
    for (c, (a, b)) in f.comps.iter().zip(&g.comps).enumerate() {
        let w = match f.kind {
            FieldKind::Node => Weight::Times(&star.a),
            FieldKind::DualCell => Weight::Over(&star.a),
            FieldKind::DualNode => Weight::Times(&star.b),
            FieldKind::Cell => Weight::Over(&star.b),
            FieldKind::Edge => Weight::Times(&star.big_a.diagonal()[c]),
            FieldKind::DualFace => Weight::Over(&star.big_a.diagonal()[c]),
            FieldKind::DualEdge => Weight::Times(&star.big_b.diagonal()[c]),
            FieldKind::Face => Weight::Over(&star.big_b.diagonal()[c]),
        };
        sum += weighted_sum(a, b, w);
    }
    Ok(sum * grid.dv())
}

/// Norm induced by [`inner3`].
pub fn norm3(f: &Field3, star: &Star3, grid: &Grid3) -> Result<f64> {
    Ok(inner3(f, f, star, grid)?.max(0.0).sqrt())
}
