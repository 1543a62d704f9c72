//! Named 3D material sets used by the command line and the test suites.
//!
//! | name | scalar wave | Maxwell |
//! |---|---|---|
//! | `trivial3d` | all ones | `eps = mu = I` |
//! | `diag3d` | `a = 1.5`, `b = 0.8`, `A = diag(2, 1, 0.5)`, `B = diag(1, 1.2, 0.9)` | `eps = diag(2, 1.5, 3)`, `mu = diag(1, 0.7, 1.2)` |
//! | `variable3d` | smooth positive `a`, `b` and diagonal `A`, `B` | smooth diagonal `eps`, `mu` |

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::mimetic3d::{Grid3, MatrixMode, Star3};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Materials3 {
    #[default]
    Trivial,
    Diagonal,
    Variable,
}

fn diag(d: [f64; 3]) -> [[f64; 3]; 3] {
    [[d[0], 0.0, 0.0], [0.0, d[1], 0.0], [0.0, 0.0, d[2]]]
}

/// Smooth bump in `[1 - amp, 1 + amp]` over the box.
fn bump(grid: &Grid3, p: [f64; 3], phase: f64, amp: f64) -> f64 {
    let l = grid.lengths();
    let s: f64 = (0..3)
        .map(|i| (2.0 * PI * p[i] / l[i] + phase * (i + 1) as f64).sin())
        .sum();
    1.0 + amp * s / 3.0
}

impl Materials3 {
    pub const ALL: [Self; 3] = [Self::Trivial, Self::Diagonal, Self::Variable];

    /// Coefficients `a, b, A, B` for the scalar wave equation.
    pub fn scalar_star(self, grid: &Grid3) -> Result<Star3> {
        match self {
            Self::Trivial => Ok(Star3::trivial(grid)),
            Self::Diagonal => Star3::constant(grid, 1.5, 0.8, [2.0, 1.0, 0.5], [1.0, 1.2, 0.9]),
            Self::Variable => Star3::from_fns(
                grid,
                |p| bump(grid, p, 0.0, 0.4),
                |p| bump(grid, p, 0.7, 0.3),
                |p| {
                    diag([
                        bump(grid, p, 1.1, 0.5),
                        bump(grid, p, 1.9, 0.4),
                        bump(grid, p, 2.3, 0.3),
                    ])
                },
                |p| {
                    diag([
                        bump(grid, p, 0.3, 0.2),
                        bump(grid, p, 2.9, 0.5),
                        bump(grid, p, 1.4, 0.4),
                    ])
                },
                MatrixMode::Diagonal,
            ),
        }
    }

    /// Permittivity and permeability for Maxwell's equations.
    pub fn maxwell_star(self, grid: &Grid3) -> Result<Star3> {
        match self {
            Self::Trivial => Ok(Star3::trivial(grid)),
            Self::Diagonal => Star3::maxwell(
                grid,
                |_| diag([2.0, 1.5, 3.0]),
                |_| diag([1.0, 0.7, 1.2]),
                MatrixMode::Diagonal,
            ),
            Self::Variable => Star3::maxwell(
                grid,
                |p| {
                    diag([
                        bump(grid, p, 0.2, 0.5),
                        bump(grid, p, 1.3, 0.4),
                        bump(grid, p, 2.1, 0.5),
                    ])
                },
                |p| {
                    diag([
                        bump(grid, p, 0.9, 0.3),
                        bump(grid, p, 1.7, 0.2),
                        bump(grid, p, 2.6, 0.4),
                    ])
                },
                MatrixMode::Diagonal,
            ),
        }
    }
}

impl fmt::Display for Materials3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Trivial => "trivial3d",
            Self::Diagonal => "diag3d",
            Self::Variable => "variable3d",
        })
    }
}

impl FromStr for Materials3 {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "trivial3d" | "trivial" => Ok(Self::Trivial),
            "diag3d" | "diagonal" => Ok(Self::Diagonal),
            "variable3d" | "variable" => Ok(Self::Variable),
            o => Err(Error::Config(format!(
                "unknown 3D materials `{o}` (expected trivial3d, diag3d or variable3d)"
            ))),
        }
    }
}
