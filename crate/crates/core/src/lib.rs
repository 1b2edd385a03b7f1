//! Differential evolution under a multi-layer competitive-cooperative
//! framework, with a seeded benchmark suite and the nonparametric statistics
//! used to compare algorithms.
//!
//! ```
//! use mlcc::{run, Algorithm, LayerSpec, MlccConfig, RunSettings};
//! use mlcc::problem::FunctionProblem;
//!
//! let problem = FunctionProblem::sphere(5, -100.0, 100.0).unwrap();
//! let algorithm = Algorithm::Mlcc(MlccConfig::new(vec![LayerSpec::shade(), LayerSpec::bide()]));
//! let record = run(&algorithm, &problem, &RunSettings::new(25, 5_000, 7)).unwrap();
//! assert!(record.evaluations <= 5_000);
//! ```

pub mod bench;
pub mod de_ops;
pub mod error;
pub mod framework;
pub mod layers;
pub mod problem;
pub mod rng;
pub mod stats;
pub mod types;

pub use error::{Error, Result};
pub use framework::{run, Ablation, Algorithm, MlccConfig, RunRecord, RunSettings, TopGOverride};
pub use layers::LayerSpec;
pub use problem::{Budget, Problem};
pub use rng::RandomSource;
pub use types::{Bounds, Genome, Individual, Population};
