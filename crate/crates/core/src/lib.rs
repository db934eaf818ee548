//! Chernoff approximations of matrix semigroups `e^{-tH}`.
//!
//! Families `F(tau)` of contractions with `F(0) = I` and `F'(0) = -H` give
//! `F(t/n)^n -> e^{-tH}`. This crate builds such families, measures the
//! approximation error, inspects numerical ranges and checks the known
//! quantitative convergence bounds numerically.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod approx;
pub mod bounds;
pub mod error;
pub mod family;
pub mod kato;
pub mod linalg;
pub mod par;
pub mod random;
pub mod range;
pub mod scenario;

pub use error::{Error, Result};
pub use family::{ChernoffFamily, FamilyKind, Regularity};
pub use kato::KatoFunction;
pub use linalg::Operator;
pub use range::SectorSpec;
