//! Exactness and accuracy suites shared by the tests and the command line.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::field::{Field3, FieldKind};
use super::grid::{Boundary, Grid3};
use super::ops::apply_chain;
use super::star::{MatrixMode, Star3};
use crate::error::Result;

/// Residual of applying two consecutive operators of a chain to a random field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChainResidual {
    pub name: &'static str,
    /// `|op2(op1 f)|_inf * h_min / |f|_inf`.
    pub input_scaled: f64,
    /// `|op2(op1 f)|_inf * h_min / |op1 f|_inf`.
    pub middle_scaled: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Exactness {
    pub chains: Vec<ChainResidual>,
}

impl Exactness {
    pub fn max_input_scaled(&self) -> f64 {
        self.chains
            .iter()
            .map(|c| c.input_scaled)
            .fold(0.0, f64::max)
    }

    pub fn max_middle_scaled(&self) -> f64 {
        self.chains
            .iter()
            .map(|c| c.middle_scaled)
            .fold(0.0, f64::max)
    }
}

/// Worst chain residuals over `trials` random fields.
pub fn exactness(grid: &Grid3, trials: usize, seed: u64) -> Result<Exactness> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut chains: Vec<ChainResidual> = [
        ("curl_grad", FieldKind::Node),
        ("div_curl", FieldKind::Edge),
        ("curl_grad_star", FieldKind::DualNode),
        ("div_curl_star", FieldKind::DualEdge),
    ]
    .iter()
    .map(|&(name, _)| ChainResidual {
        name,
        input_scaled: 0.0,
        middle_scaled: 0.0,
    })
    .collect();
    let starts = [
        FieldKind::Node,
        FieldKind::Edge,
        FieldKind::DualNode,
        FieldKind::DualEdge,
    ];
    for _ in 0..trials {
        for (c, start) in chains.iter_mut().zip(starts) {
            let f = Field3::random(start, grid, &mut rng, 0);
            let once = apply_chain(&f, grid)?;
            let twice = apply_chain(&once, grid)?;
            let r = twice.max_abs() * grid.h_min();
            c.input_scaled = c.input_scaled.max(r / f.max_abs());
            c.middle_scaled = c.middle_scaled.max(r / once.max_abs());
        }
    }
    Ok(Exactness { chains })
}

fn scalar_field(_: usize, p: [f64; 3]) -> f64 {
    p[0].sin() * p[1].sin() * p[2].sin()
}

fn scalar_grad(c: usize, p: [f64; 3]) -> f64 {
    let (s, co) = (p.map(f64::sin), p.map(f64::cos));
    match c {
        0 => co[0] * s[1] * s[2],
        1 => s[0] * co[1] * s[2],
        _ => s[0] * s[1] * co[2],
    }
}

/// `t_c = sin(x_{c+1}) cos(x_{c+2})`.
fn vector_field(c: usize, p: [f64; 3]) -> f64 {
    p[(c + 1) % 3].sin() * p[(c + 2) % 3].cos()
}

fn vector_curl(c: usize, p: [f64; 3]) -> f64 {
    let (a, b) = ((c + 1) % 3, (c + 2) % 3);
    -p[c].sin() * p[a].sin() - p[b].cos() * p[c].cos()
}

/// Divergence of `n_c = sin(x_c) cos(x_{c+1})`.
fn face_field(c: usize, p: [f64; 3]) -> f64 {
    p[c].sin() * p[(c + 1) % 3].cos()
}

fn face_div(_: usize, p: [f64; 3]) -> f64 {
    (0..3).map(|c| p[c].cos() * p[(c + 1) % 3].cos()).sum()
}

type Manufactured = (
    &'static str,
    FieldKind,
    fn(usize, [f64; 3]) -> f64,
    fn(usize, [f64; 3]) -> f64,
);

const CASES: [Manufactured; 6] = [
    ("grad", FieldKind::Node, scalar_field, scalar_grad),
    ("curl", FieldKind::Edge, vector_field, vector_curl),
    ("div", FieldKind::Face, face_field, face_div),
    ("grad_star", FieldKind::DualNode, scalar_field, scalar_grad),
    ("curl_star", FieldKind::DualEdge, vector_field, vector_curl),
    ("div_star", FieldKind::DualFace, face_field, face_div),
];

/// Max pointwise error of each difference operator on the `2 pi` periodic
/// box with `n` cells per axis.
pub fn operator_errors(n: usize) -> Result<Vec<(&'static str, f64)>> {
    let g = Grid3::new([2.0 * PI; 3], [n; 3], Boundary::Periodic)?;
    CASES
        .iter()
        .map(|(name, kind, f, df)| {
            let input = Field3::from_fn(*kind, &g, f);
            let out = apply_chain(&input, &g)?;
            let exact = Field3::from_fn(out.kind, &g, df);
            Ok((*name, out.sub(&exact).max_abs()))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AccuracyCheck {
    pub name: String,
    pub coarse: f64,
    pub fine: f64,
    pub ratio: f64,
}

impl AccuracyCheck {
    pub fn new(name: impl Into<String>, coarse: f64, fine: f64) -> Self {
        Self {
            name: name.into(),
            coarse,
            fine,
            ratio: coarse / fine,
        }
    }

    /// Ratio consistent with second order.
    pub fn second_order(&self) -> bool {
        (3.5..=4.5).contains(&self.ratio)
    }
}

/// Error ratios of every operator between `n` and `2n` cells.
pub fn operator_accuracy(n: usize) -> Result<Vec<AccuracyCheck>> {
    let c = operator_errors(n)?;
    let f = operator_errors(2 * n)?;
    Ok(c.iter()
        .zip(&f)
        .map(|((name, ec), (_, ef))| AccuracyCheck::new(*name, *ec, *ef))
        .collect())
}

const FULL: [[f64; 3]; 3] = [[2.0, 0.3, 0.1], [0.3, 2.0, 0.2], [0.1, 0.2, 2.0]];

/// Max error of a constant full matrix applied to a smooth edge field against
/// the continuum product at the target locations.
pub fn full_matrix_error(n: usize) -> Result<f64> {
    let g = Grid3::new([2.0 * PI; 3], [n; 3], Boundary::Periodic)?;
    let st = Star3::from_fns(&g, |_| 1.0, |_| 1.0, |_| FULL, |_| FULL, MatrixMode::Full)?;
    let t = Field3::from_fn(FieldKind::Edge, &g, vector_field);
    let out = st.star_big_a(&t, &g)?;
    let exact = Field3::from_fn(FieldKind::DualFace, &g, |r, p| {
        (0..3).map(|c| FULL[r][c] * vector_field(c, p)).sum()
    });
    Ok(out.sub(&exact).max_abs())
}

/// Worst relative round trip error of a full matrix star and its inverse.
pub fn full_matrix_round_trip(n: usize) -> Result<f64> {
    let g = Grid3::new([2.0 * PI; 3], [n; 3], Boundary::Periodic)?;
    let st = Star3::from_fns(&g, |_| 1.0, |_| 1.0, |_| FULL, |_| FULL, MatrixMode::Full)?;
    let t = Field3::from_fn(FieldKind::Edge, &g, vector_field);
    let back = st.inv_star_big_a(&st.star_big_a(&t, &g)?, &g)?;
    Ok(back.sub(&t).max_abs() / t.max_abs())
}
