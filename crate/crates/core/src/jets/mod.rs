//! Exact jets of analytic maps, plus the numerical pieces that sit next to
//! them: total derivatives along the base and inversion of diffeomorphisms.

mod diff;
mod expr;
mod field;
mod newton;
mod taylor;
mod transport;

pub use diff::{
    total_derivative, total_divergence, FdScheme, Steps, DEFAULT_OUTER_STEP, DEFAULT_STEP,
};
pub use expr::Expr;
pub use field::{eval_jet, Field, FieldMap, JetPoint, MAX_JET_ORDER};
pub use newton::{invert_series, invert_series_matrix, newton_invert, NEWTON_MAX_ITER, NEWTON_TOL};
pub use taylor::{layout, multi_index, Layout, Taylor};
pub use transport::{Composed, Diffeo, InverseMap, TensorRank, Transported};
