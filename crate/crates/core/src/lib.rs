//! Curvature of left-invariant metrics on solvable Lie groups, the Ricci
//! pinching functional `F = scal^2 / |Ric|^2`, solvsoliton certificates and
//! numerical orbit searches checking that solvsolitons maximize `F`.
//!
//! Two families of metric Lie algebras are covered:
//!
//! * rank-one: `s = R Y + n` with `n` the (non-abelian) nilradical, encoded by
//!   [`RankOneData`];
//! * abelian nilradical: `s = a + n` with `n` abelian and `a` orthogonal to
//!   `n`, encoded by [`AbelianNilData`].

// `!(x > y)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod curvature;
pub mod error;
pub mod lie;
pub mod linalg;
mod optim;
pub mod orbit;
pub mod pinching;
pub mod samples;
pub mod soliton;

pub use curvature::{AbelianNilData, RankOneData, RicciReport};
pub use error::{Error, Result};
pub use lie::{CentralSeriesBlocks, LieBracket};
pub use linalg::{Operator, Vector};
