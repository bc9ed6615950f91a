//! Compatibility of density-matrix assignments.
//!
//! A set of density matrices can describe what different observers know
//! about one and the same system exactly when their supports share at least
//! one common state. This crate decides that criterion numerically, builds
//! the ensembles and the multi-observer entangled state that realize a
//! compatible set, and evaluates the two older Peierls conditions
//! (commutation, nonzero product) side by side for comparison.
//!
//! Modules, bottom-up:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   tensor products, partial traces and subspace algebra.
//! - [`density`]: validated density matrices, supports, null spaces and
//!   ensemble decompositions.
//! - [`compat`]: the support-intersection verdict, the forbidden subspace
//!   and the Peierls checks.
//! - [`scenario`]: the constructive multi-observer measurement scenario.
//! - [`random`]: seeded random states, unitaries and instance generators.
//! - [`cli`]: file formats and the command-line verbs.

pub mod cli;
pub mod compat;
pub mod density;
mod error;
pub mod linalg;
pub mod random;
pub mod scenario;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, EigResult, Subspace, Tolerances, C64};
pub use density::{DensityMatrix, Ensemble};
pub use compat::CompatReport;
pub use scenario::{CompositeState, ScenarioResult};
