//! Exact-arithmetic construction and verification of conformally covariant
//! ambient polydifferential operators.
//!
//! The crate builds the coefficient families of five families of tangential
//! operators on the flat Fefferman--Graham ambient space — tridifferential,
//! linear, and three Ovsienko--Redou style bidifferential families — from
//! their recurrence relations, realized as kernels of the first differential
//! of a chain complex over composition index sets. Everything runs in exact
//! rational arithmetic; there is no floating point anywhere.
//!
//! Modules:
//!
//! - [`index`]: composition index sets and multinomial weights;
//! - [`linalg`]: exact matrices, fraction-free elimination, kernel bases,
//!   exactness certification;
//! - [`shift`]: the weighted shift operators and the differentials of each
//!   family's chain complex;
//! - [`solver`]: coefficient families, recurrence verification, Euler
//!   characteristics, the symmetric-weight specializations, and the
//!   Ovsienko--Redou closed form;
//! - [`ambient`]: a symbolic polynomial calculus on the flat ambient space,
//!   used as an independent end-to-end check of tangentiality;
//! - [`sample`]: seeded pseudo-random weights and polynomials;
//! - [`acceptance`]: the consolidated verification suite behind the CLI's
//!   `report` command and the acceptance test target.

pub mod acceptance;
pub mod ambient;
pub mod error;
pub mod index;
pub mod linalg;
pub mod rat;
pub mod sample;
pub mod shift;
pub mod solver;

pub use error::{Error, Result};
pub use index::{enumerate_compositions, multinomial, Composition, IndexSet};
pub use linalg::{
    certify_exactness, compose, kernel_basis, rank, reduced_row_echelon, ExactMatrix, KernelBasis,
};
pub use rat::{fmt_rat, parse_rat, Rat};
pub use shift::{
    build_differential, build_shift_matrix, right_inverse_matrix, shift_coefficient,
    verify_commutation_relations, Family, OperatorSpec, ShiftVariant, WeightAssignment,
};

/// Crate version, embedded in every report.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
