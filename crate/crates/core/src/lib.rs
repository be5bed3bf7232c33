//! Single-qubit open-system dynamics: quantum speed limits, BLP
//! non-Markovianity, optimal initial states and a classification of
//! dynamical maps by how their deformation and translation evolve.

pub mod error;
pub mod generator;
pub mod jc;
pub mod nonmarkov;
pub mod optimality;
pub mod propagation;
#[cfg(test)]
mod proptests;
pub mod quadrature;
pub mod qsl;
pub mod qubit;
pub mod rates;
pub mod taxonomy;
pub mod tolerance;

pub use error::{Error, Result};
pub use generator::{evaluate_generator, GeneratorSpec, ResidualFamily};
pub use nonmarkov::{blp_measure, blp_pair, BlpResult, PairSearch, RegionFlags};
pub use optimality::{condition_residual, optimality_conditions, optimal_state_scan, OptimalityReport};
pub use qsl::{qsl_time, Branch, QslResult};
pub use qubit::{BlochVector, DensityMatrix, Mat2, NormTriple, PureState};
pub use rates::{RateFn, RateSet};
pub use taxonomy::{classify_map, taxonomy_ratio, MapClass, TaxonomyLabel};
