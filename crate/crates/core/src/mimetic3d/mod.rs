//! Staggered primal/dual grids in 3D and the mimetic operators on them.
//!
//! Locations are described by a [`Stagger`]: one flag per axis telling whether a
//! value sits half a cell off the primal nodes along that axis. Primal nodes are
//! `[F, F, F]`, the x-component of an edge field is `[T, F, F]`, the
//! x-component of a face field is `[F, T, T]` and cells are `[T, T, T]`. Dual
//! objects live where the primal objects of complementary dimension live: dual
//! cells at primal nodes, dual faces at primal edges, and so on.
//!
//! Boxes are either periodic (every axis has `n` values) or bounded. On a
//! bounded box an unstaggered axis has `n + 1` values and a staggered axis `n`;
//! differences that would reach outside the box read zero. With that rule every
//! dual difference operator is exactly the negative transpose of its primal
//! counterpart, so the discrete adjoint identities hold for all fields.

mod adjoint;
mod dump;
mod field;
mod grid;
mod inner;
mod ops;
mod star;
mod verify;

pub use adjoint::{
    check_discrete_adjoints, negativity_check, negativity_value, AdjointCheck, AdjointReport3,
    SignFlip,
};
pub use dump::{read_field, write_field, FieldDump};
pub use field::{Field3, FieldKind};
pub use grid::{Boundary, Grid3, Stagger};
pub use inner::{bilinear, inner3, norm3};
pub use ops::{curl3, curl3_star, diff_axis, div3, div3_star, grad3, grad3_star, max_abs};
pub use star::{average_to, MatrixMode, Star3, Tensor3};
pub use verify::{
    exactness, full_matrix_error, full_matrix_round_trip, operator_accuracy, operator_errors,
    AccuracyCheck, ChainResidual, Exactness,
};
