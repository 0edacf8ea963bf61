pub mod algorithms;
pub mod constraints;
pub mod distance;
pub mod dynamic;
pub mod error;
pub mod formulations;
pub mod harness;
pub mod ingest;
pub mod instance;
pub mod objectives;
pub mod oracle;
pub mod rng;
pub mod subset;

pub use algorithms::{Budget, RunConfig, RunResult, Start};
pub use constraints::{CardinalityMode, ConstraintSpec, MatroidRank, PartitionMatroid};
pub use distance::{validate_metric, DistanceMatrix, MetricReport};
pub use error::{Error, Result};
pub use formulations::{BiObjectiveValue, Formulation, Individual};
pub use instance::{load_instance, DiversityKind, Instance};
pub use rng::RngStream;
pub use subset::{ItemId, Subset};
