//! Random-field checks of the discrete adjoint identities.
//!
//! Each operator `Op: X -> Y` is paired with its adjoint built from the
//! opposite-grid operator and the star maps, and `<Op f, g>_Y` is compared with
//! `<f, Op^adj g>_X`. Half the trials use a random `g`, the other half
//! `g = Op f`, which makes a wrong sign show up as an order one residual.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::field::{Field3, FieldKind};
use super::grid::Grid3;
use super::inner::{inner3, norm3};
use super::ops::{curl3, curl3_star, div3, div3_star, grad3, grad3_star};
use super::star::Star3;
use crate::error::Result;
use crate::leapfrog::Vector;

/// Deliberate sign error injected into one adjoint, for checking the checker.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignFlip {
    #[default]
    None,
    /// Negates the adjoint of the primal gradient.
    Gradient,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointCheck {
    pub name: &'static str,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdjointReport3 {
    pub trials: usize,
    pub checks: Vec<AdjointCheck>,
}

impl AdjointReport3 {
    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .map(|c| c.max_residual)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tol: f64) -> bool {
        self.max_residual() <= tol
    }
}

type Map<'a> = Box<dyn Fn(&Field3) -> Result<Field3> + 'a>;

struct Identity<'a> {
    name: &'static str,
    from: FieldKind,
    to: FieldKind,
    op: Map<'a>,
    adj: Map<'a>,
}

fn neg(mut f: Field3) -> Field3 {
    f.scale(-1.0);
    f
}

fn identities<'a>(star: &'a Star3, grid: &'a Grid3, flip: SignFlip) -> Vec<Identity<'a>> {
    let st = move |f: &Field3| star.star(f, grid);
    let g_sign = if flip == SignFlip::Gradient {
        1.0
    } else {
        -1.0
    };
    vec![
        Identity {
            name: "grad",
            from: FieldKind::Node,
            to: FieldKind::Edge,
            op: Box::new(move |f| grad3(f, grid)),
            adj: Box::new(move |g| {
                let mut r = st(&div3_star(&st(g)?, grid)?)?;
                r.scale(g_sign);
                Ok(r)
            }),
        },
        Identity {
            name: "curl",
            from: FieldKind::Edge,
            to: FieldKind::Face,
            op: Box::new(move |f| curl3(f, grid)),
            adj: Box::new(move |g| st(&curl3_star(&st(g)?, grid)?)),
        },
        Identity {
            name: "div",
            from: FieldKind::Face,
            to: FieldKind::Cell,
            op: Box::new(move |f| div3(f, grid)),
            adj: Box::new(move |g| Ok(neg(st(&grad3_star(&st(g)?, grid)?)?))),
        },
        Identity {
            name: "grad_star",
            from: FieldKind::DualNode,
            to: FieldKind::DualEdge,
            op: Box::new(move |f| grad3_star(f, grid)),
            adj: Box::new(move |g| Ok(neg(st(&div3(&st(g)?, grid)?)?))),
        },
        Identity {
            name: "curl_star",
            from: FieldKind::DualEdge,
            to: FieldKind::DualFace,
            op: Box::new(move |f| curl3_star(f, grid)),
            adj: Box::new(move |g| st(&curl3(&st(g)?, grid)?)),
        },
        Identity {
            name: "div_star",
            from: FieldKind::DualFace,
            to: FieldKind::DualCell,
            op: Box::new(move |f| div3_star(f, grid)),
            adj: Box::new(move |g| Ok(neg(st(&grad3(&st(g)?, grid)?)?))),
        },
        Identity {
            name: "star_grad",
            from: FieldKind::Node,
            to: FieldKind::DualFace,
            op: Box::new(move |f| st(&grad3(f, grid)?)),
            adj: Box::new(move |g| Ok(neg(st(&div3_star(g, grid)?)?))),
        },
    ]
}

/// Fields are zero within two cells of the boundary of a bounded box.
const MARGIN: usize = 2;

/// Runs every identity `trials` times and reports the largest residual
/// `|<Op f, g> - <f, adj g>| / (|Op f| |g| + |f| |adj g|)` per identity.
pub fn check_discrete_adjoints(
    star: &Star3,
    grid: &Grid3,
    trials: usize,
    seed: u64,
    flip: SignFlip,
) -> Result<AdjointReport3> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();
    for id in identities(star, grid, flip) {
        let mut worst: f64 = 0.0;
        for t in 0..trials {
            let f = Field3::random(id.from, grid, &mut rng, MARGIN);
            let of = (id.op)(&f)?;
            let g = if t % 2 == 0 {
                Field3::random(id.to, grid, &mut rng, MARGIN)
            } else {
                of.clone()
            };
            let ag = (id.adj)(&g)?;
            let lhs = inner3(&of, &g, star, grid)?;
            let rhs = inner3(&f, &ag, star, grid)?;
            let scale = norm3(&of, star, grid)? * norm3(&g, star, grid)?
                + norm3(&f, star, grid)? * norm3(&ag, star, grid)?;
            if scale > 0.0 {
                worst = worst.max((lhs - rhs).abs() / scale);
            }
        }
        checks.push(AdjointCheck {
            name: id.name,
            max_residual: worst,
        });
    }
    Ok(AdjointReport3 { trials, checks })
}

/// Largest `<a^-1 D* A G f, f>_N / (|f|_N |a^-1 D* A G f|_N)` over random
/// node scalars; nonpositive up to rounding when the star maps are positive.
pub fn negativity_value(star: &Star3, grid: &Grid3, f: &Field3) -> Result<f64> {
    let lf = star.star(&div3_star(&star.star(&grad3(f, grid)?, grid)?, grid)?, grid)?;
    let v = inner3(&lf, f, star, grid)?;
    let scale = norm3(f, star, grid)? * norm3(&lf, star, grid)?;
    Ok(if scale > 0.0 { v / scale } else { v })
}

/// True when every random trial gives a value at most `1e-12`.
pub fn negativity_check(star: &Star3, grid: &Grid3, trials: usize, seed: u64) -> Result<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let f = Field3::random(FieldKind::Node, grid, &mut rng, MARGIN);
        if negativity_value(star, grid, &f)? > 1e-12 {
            return Ok(false);
        }
    }
    Ok(true)
}
