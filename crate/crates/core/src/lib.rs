//! Existential definability of field elements through arithmetic neighbourhoods.
//!
//! A finite set `A` containing `r` is a neighbourhood of `r` when every map
//! `A -> K` that respects one, sums and products lying inside `A` fixes `r`.
//! Such sets correspond to existential formulas defining `{r}`; this crate
//! converts in both directions, normalizes formulas into three-address form,
//! and checks everything exhaustively over small finite fields.

pub mod cli;
pub mod compile;
pub mod curve;
pub mod error;
pub mod field;
pub mod formula;
pub mod neighbourhood;
pub mod normalize;
pub mod poly;
pub mod random;
pub mod schemas;
pub mod solver;

pub use error::{Error, Result};
