//! Orthogonal polynomials of complex measures on the unit circle and the
//! SU(2)-valued nonlinear Fourier series that generates them.
//!
//! - [`lpoly`]: Laurent polynomials, the star operation and root finding.
//! - [`cmeasure`]: complex measures, moments, the sesquilinear pairing and
//!   the L-functional.
//! - [`szego`]: left/right polynomial ladders, Heine's formula and
//!   coefficient extraction.
//! - [`nlfs`]: forward and inverse nonlinear Fourier series, outer functions
//!   and the induced density.
//! - [`kernels`]: reproducing kernels and the universality gap.
//! - [`localparams`]: local parameters `A, B` and zero distances.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cmeasure;
pub mod error;
pub mod grid;
pub mod kernels;
pub mod localparams;
pub mod lpoly;
pub mod nlfs;
pub mod szego;

pub use num_complex::Complex64 as C64;

pub use cmeasure::{Atom, CircleMeasure, ComplexValue, Density, MeasureSpec, Quadrature};
pub use error::{Error, Result};
pub use kernels::{KernelEval, UniversalityRecord};
pub use localparams::LocalParams;
pub use lpoly::LaurentPoly;
pub use nlfs::NlfsPair;
pub use szego::{ClassTag, OrthoSystem};
