//! Dual Frank-Wolfe projections and quadratic minimization over
//! hyperbolicity cones, p-cones and the nonnegative orthant.

pub mod agm;
pub mod cones;
pub mod dfw;
pub mod error;
pub mod harness;
pub mod polyform;
pub mod spectra;

pub use cones::{ConeOracle, ConeSpec, HyperbolicityCone, IsometricForm, Orthant, PCone};
pub use dfw::{CdChoice, ConicProgram, DfwConfig, LinearMap, QuadraticObjective, SolveResult, SolveTrace, StepRule};
pub use error::{Error, Result};
pub use polyform::{Monomial, PolynomialForm};
pub use spectra::{EigenSpectrum, HyperbolicForm, SpectraTolerances};
