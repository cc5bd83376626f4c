//! Computational engine for dynamical zeta functions of projective Anosov
//! representations of closed surface groups.
//!
//! The crate is `no_std` (with `alloc`). It covers surface-group word
//! combinatorics and the strongly Markov coding automaton ([`group`]),
//! linear representations and their spectral data ([`rep`]), enumeration of
//! primitive conjugacy classes ([`orbit`]), and the zeta side: Euler
//! products, transfer-operator traces, Fredholm determinants, entropy,
//! orbit counting and zero scans ([`zeta`]).
//!
//! IO, file formats and the command line live in the companion `anosov-zeta`
//! crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod group;
pub mod hyperbolic;
pub mod linalg;
pub mod orbit;
pub mod rep;
pub mod zeta;

pub use error::{Error, Result};
// `Float` supplies libm-backed math without std; when std is linked its
// inherent methods win and the per-module imports go unused.
pub use num_complex::Complex64;
