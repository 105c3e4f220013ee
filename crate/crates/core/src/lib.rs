//! Weighted Bergman spaces `A^p_alpha` on the tube domain
//! `T_B = { z in C^n : Im z_n > |Im z'|^2 }`.
//!
//! Closed-form geometry (pairing, kernel, metric, Cayley map, automorphisms),
//! Monte-Carlo checks of integral identities, `r`-lattices, Carleson
//! diagnostics for atomic measures, and exact finite-rank Toeplitz operators.

// `!(x > 0.0)` deliberately rejects NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod geometry;
pub mod integrate;
pub mod kernel;
pub mod lattice;
pub mod linalg;
pub mod measures;
pub mod toeplitz;

pub use num_complex::Complex64;

pub use error::{Error, Result};
pub use geometry::{
    bergman_distance, cayley, cayley_inv, rho, rho_pair, Automorphism, BallPoint, Dimension, TubePoint,
};
pub use integrate::{IntegralEstimate, RFParams, SamplerConfig};
pub use kernel::{bergman_kernel, kernel_diagonal, normalized_kernel, KernelParams, PExponent};
pub use lattice::{build_lattice, Lattice, RegionSpec};
pub use linalg::{EigenPair, HermitianMatrix};
pub use measures::{Atom, AtomicMeasure, CarlesonReport, VanishingProfile};
pub use toeplitz::{build_model, FunctionSt, KernelCombination, ToeplitzModel};
