//! Fuzzy-valued recurrent fractal interpolation.
//!
//! * [`fuzzy`]: fuzzy numbers as discretized λ-level profiles.
//! * [`rifs`]: data sets, address maps and the recurrent iterated function system.
//! * [`solver`]: fixed-point computation, chaos game and level-set export.
//! * [`analysis`]: Hölder parameters, stability bounds and perturbation experiments.
//! * [`config`]: JSON problem configuration.

pub mod analysis;
pub mod config;
pub mod error;
pub mod fuzzy;
pub mod rifs;
pub mod solver;

pub use config::ProblemConfig;
pub use error::{Error, Result};
pub use fuzzy::{convex_combination, FuzzyNumber, Interval};
pub use rifs::{AddressMap, FuzzyDataSet, RifsSpec, TransitionMatrix};
pub use solver::{solve, IterationReport, SampledFuzzyFunction, SolveOptions};

/// The bundled four-interval example problem.
pub fn example2() -> RifsSpec {
    ProblemConfig::example2()
        .build_spec()
        .expect("bundled config is admissible")
}
