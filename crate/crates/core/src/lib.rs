//! Level-1 Fourier weight of Boolean functions on the hypercube: analytic
//! upper bounds, a grid certificate for the induction inequality, exact
//! extremal search at small dimension, and the sharp Chang-lemma machinery
//! over GF(2).
//!
//! Points of `{-1, +1}^n` are indexed by `0..2^n`: bit `j` of the index is 0
//! when `x_{j+1} = +1` and 1 when `x_{j+1} = -1`, so that
//! `chi_S(x(i)) = (-1)^popcount(i & S)`. Every module uses this convention.

pub mod boolfn;
pub mod bounds;
pub mod certify;
pub mod changdim;
pub mod error;
pub mod extremal;
pub mod specfun;

mod numfmt;

pub use error::{Error, Result};
pub use numfmt::{fmt_sig17, parse_rational};
pub use specfun::{Envelope, ProfileParams};
