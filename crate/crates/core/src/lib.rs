//! Compatibility, mutual improvement and pooling of quantum state
//! assignments in finite dimension.
//!
//! Two agents holding density operators `rho_A` and `rho_B` for one and the
//! same system can both be right only if some pure state is possible under
//! both, i.e. their supports intersect. This crate decides that
//! ([`compatibility`]), builds explicit common pure-state expansions, and
//! applies the Lüders update onto the meet of the supports to improve each
//! assignment with the other's information ([`pooling`]).
//!
//! ```
//! use qcompat::linalg::{ComplexMatrix, ToleranceConfig};
//! use qcompat::operators::make_density;
//! use qcompat::pooling::improve;
//!
//! let tol = ToleranceConfig::default();
//! let a = make_density(&ComplexMatrix::from_diag(&[0.5, 0.5, 0.0]), &tol).unwrap();
//! let b = make_density(&ComplexMatrix::from_diag(&[0.0, 1.0 / 3.0, 2.0 / 3.0]), &tol).unwrap();
//! let imp = improve(&a, &b, &tol).unwrap();
//! assert!((imp.prob_a - 0.5).abs() < 1e-12);
//! assert_eq!(imp.glb.rank(), 1);
//! ```

pub mod cli;
pub mod compatibility;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod operators;
pub mod pooling;
pub mod testkit;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, ToleranceConfig, C64};
pub use operators::{DensityOperator, Projector, Subspace};
