//! SICs (maximal equiangular tight frames) in odd dimensions.
//!
//! The crate is organised bottom-up:
//!
//! - [`arith`]: exact integer arithmetic for dimension towers, ladders and
//!   prime-power splits of `d`.
//! - [`wh`]: the Weyl-Heisenberg group in clock/shift form, displacement
//!   operators, the parity operator and phase-point operators.
//! - [`clifford`]: `SL(2, Z_d)` and its unitary (Clifford) representatives,
//!   including the order-3 Zauner element.
//! - [`sic`]: fiducial vectors, overlap tables, verification and the
//!   frame-potential search.
//! - [`etf`]: symmetric-subspace lift of a SIC, Naimark complements and the
//!   alignment checks between rung-adjacent SICs.
//!
//! Batch work (restarts, pairwise Gram entries, exhaustive checks) goes through
//! [`exec::Exec`], which runs on rayon when the `parallel` feature is on and
//! falls back to plain iteration otherwise.

pub mod arith;
pub mod clifford;
pub mod error;
pub mod etf;
pub mod exec;
pub mod linalg;
pub mod optim;
pub mod sic;
pub mod wh;

pub use error::{Error, Result};
pub use linalg::CMat;
pub use num_complex::Complex64;
