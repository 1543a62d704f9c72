//! Named material families on the unit interval. Coordinates are normalised to
//! `xi = (x - a) / (b - a)` before evaluation.
//!
//! String forms (used by the command line):
//!
//! | form | density | modulus |
//! |---|---|---|
//! | `cmp[:c]` | `1/c` | `c` |
//! | `linear-rho:up` / `linear-rho:down` | `1 +- xi/2` | `1` |
//! | `linear-tau:up` / `linear-tau:down` | `1` | `1 +- xi/2` |
//! | `bump:p,q` | `1 + (2 xi (1 - xi))^p` | `1 + (2 xi (1 - xi))^q` |
//! | `pwl-rho:a,b,c,d` / `pwl-tau:a,b,c,d` | piecewise linear ramp from `c` to `d` between `a` and `b` | |
//! | `jump-rho:up` / `jump-rho:down` | `1 +- H(xi - 1/2)/2` | `1` |
//! | `jump-tau:up` / `jump-tau:down` | `1` | `1 +- H(xi - 1/2)/2` |
//!
//! `H` is the right-continuous step, `H(0) = 1`.

use std::fmt;
use std::str::FromStr;

use super::{Grid1D, Materials1D};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MaterialPreset {
    Constant { c: f64 },
    LinearRho { up: bool },
    LinearTau { up: bool },
    Bump { p: f64, q: f64 },
    PiecewiseRho { a: f64, b: f64, c: f64, d: f64 },
    PiecewiseTau { a: f64, b: f64, c: f64, d: f64 },
    JumpRho { up: bool },
    JumpTau { up: bool },
}

/// Right-continuous unit step.
pub fn heaviside(x: f64) -> f64 {
    if x >= 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Equals `c` left of `a`, `d` right of `b`, linear in between.
pub fn piecewise_linear(x: f64, a: f64, b: f64, c: f64, d: f64) -> f64 {
    c * (1.0 - heaviside(x - a))
        + d * heaviside(x - b)
        + ((a * d - b * c) + (c - d) * x) / (a - b) * (heaviside(x - a) - heaviside(x - b))
}

fn sign(up: bool) -> f64 {
    if up {
        1.0
    } else {
        -1.0
    }
}

impl MaterialPreset {
    /// Default piecewise-linear parameters.
    pub const PWL: (f64, f64, f64, f64) = (0.25, 0.75, 1.0, 2.0);

    pub fn is_constant(&self) -> bool {
        matches!(self, Self::Constant { .. })
    }

    pub fn rho(&self, xi: f64) -> f64 {
        match *self {
            Self::Constant { c } => 1.0 / c,
            Self::LinearRho { up } => 1.0 + sign(up) * xi / 2.0,
            Self::Bump { p, .. } => 1.0 + (2.0 * xi * (1.0 - xi)).powf(p),
            Self::PiecewiseRho { a, b, c, d } => piecewise_linear(xi, a, b, c, d),
            Self::JumpRho { up } => 1.0 + sign(up) * heaviside(xi - 0.5) / 2.0,
            _ => 1.0,
        }
    }

    pub fn tau(&self, xi: f64) -> f64 {
        match *self {
            Self::Constant { c } => c,
            Self::LinearTau { up } => 1.0 + sign(up) * xi / 2.0,
            Self::Bump { q, .. } => 1.0 + (2.0 * xi * (1.0 - xi)).powf(q),
            Self::PiecewiseTau { a, b, c, d } => piecewise_linear(xi, a, b, c, d),
            Self::JumpTau { up } => 1.0 + sign(up) * heaviside(xi - 0.5) / 2.0,
            _ => 1.0,
        }
    }

    /// Materials sampled on `grid`. Constant presets keep the constant form.
    pub fn materials(&self, grid: &Grid1D) -> Result<Materials1D> {
        if let Self::Constant { c } = *self {
            return Materials1D::constant(c);
        }
        self.sampled(grid)
    }

    /// Always the sampled variable form.
    pub fn sampled(&self, grid: &Grid1D) -> Result<Materials1D> {
        let (a, l) = (grid.a, grid.length());
        Materials1D::sample(grid, |x| self.rho((x - a) / l), |x| self.tau((x - a) / l))
    }

    /// Every variable family with the parameter choices used in the test suites.
    pub fn variable_suite() -> Vec<Self> {
        let (a, b, c, d) = Self::PWL;
        let mut out = vec![
            Self::LinearRho { up: true },
            Self::LinearRho { up: false },
            Self::LinearTau { up: true },
            Self::LinearTau { up: false },
        ];
        for p in [1.0, 2.0] {
            for q in [1.0, 2.0] {
                out.push(Self::Bump { p, q });
            }
        }
        out.push(Self::PiecewiseRho { a, b, c, d });
        out.push(Self::PiecewiseTau { a, b, c, d });
        for up in [true, false] {
            out.push(Self::JumpRho { up });
            out.push(Self::JumpTau { up });
        }
        out
    }
}

fn up_down(s: &str) -> Result<bool> {
    match s {
        "" | "up" | "+" => Ok(true),
        "down" | "-" => Ok(false),
        o => Err(Error::Config(format!("expected `up` or `down`, got `{o}`"))),
    }
}

/// Reads `k1=v1,k2=v2` or positional `v1,v2` into the given slots.
fn numbers(args: &str, keys: &[&str], defaults: &[f64]) -> Result<Vec<f64>> {
    let mut out = defaults.to_vec();
    if args.is_empty() {
        return Ok(out);
    }
    for (pos, tok) in args.split(',').enumerate() {
        let (idx, val) = match tok.split_once('=') {
            Some((k, v)) => {
                let idx = keys
                    .iter()
                    .position(|x| *x == k.trim())
                    .ok_or_else(|| Error::Config(format!("unknown key `{k}`")))?;
                (idx, v)
            }
            None => (pos, tok),
        };
        if idx >= out.len() {
            return Err(Error::Config(format!("too many values in `{args}`")));
        }
        out[idx] = val
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("not a number: `{val}`")))?;
    }
    Ok(out)
}

impl FromStr for MaterialPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, args) = s.split_once(':').unwrap_or((s, ""));
        let args = args.trim();
        let (a, b, c, d) = Self::PWL;
        let preset = match name.trim() {
            "cmp" | "constant" => {
                let v = numbers(args, &["c"], &[1.0])?;
                if !(v[0] > 0.0) {
                    return Err(Error::Config(format!(
                        "wave speed must be > 0, got {}",
                        v[0]
                    )));
                }
                Self::Constant { c: v[0] }
            }
            "linear-rho" => Self::LinearRho { up: up_down(args)? },
            "linear-tau" => Self::LinearTau { up: up_down(args)? },
            "bump" => {
                let v = numbers(args, &["p", "q"], &[2.0, 2.0])?;
                Self::Bump { p: v[0], q: v[1] }
            }
            "pwl-rho" | "pwl-tau" => {
                let v = numbers(args, &["a", "b", "c", "d"], &[a, b, c, d])?;
                if !(v[0] < v[1]) || !(v[2] > 0.0) || !(v[3] > 0.0) {
                    return Err(Error::Config(format!(
                        "piecewise-linear needs a < b and c, d > 0 in `{s}`"
                    )));
                }
                if name.trim() == "pwl-rho" {
                    Self::PiecewiseRho {
                        a: v[0],
                        b: v[1],
                        c: v[2],
                        d: v[3],
                    }
                } else {
                    Self::PiecewiseTau {
                        a: v[0],
                        b: v[1],
                        c: v[2],
                        d: v[3],
                    }
                }
            }
            "jump-rho" => Self::JumpRho { up: up_down(args)? },
            "jump-tau" => Self::JumpTau { up: up_down(args)? },
            other => return Err(Error::Config(format!("unknown material preset `{other}`"))),
        };
        Ok(preset)
    }
}

impl fmt::Display for MaterialPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ud = |up: bool| if up { "up" } else { "down" };
        match *self {
            Self::Constant { c } => write!(f, "cmp:c={c}"),
            Self::LinearRho { up } => write!(f, "linear-rho:{}", ud(up)),
            Self::LinearTau { up } => write!(f, "linear-tau:{}", ud(up)),
            Self::Bump { p, q } => write!(f, "bump:p={p},q={q}"),
            Self::PiecewiseRho { a, b, c, d } => write!(f, "pwl-rho:a={a},b={b},c={c},d={d}"),
            Self::PiecewiseTau { a, b, c, d } => write!(f, "pwl-tau:a={a},b={b},c={c},d={d}"),
            Self::JumpRho { up } => write!(f, "jump-rho:{}", ud(up)),
            Self::JumpTau { up } => write!(f, "jump-tau:{}", ud(up)),
        }
    }
}
