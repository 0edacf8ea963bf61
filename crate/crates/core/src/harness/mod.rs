//! Instance generation, benchmark orchestration, statistics and traces.

mod algorithm;
mod bench;
mod generate;
mod protocol;
mod stats;
mod trace;
mod verify;

pub use algorithm::{Algorithm, AlgorithmConfig, DEFAULT_MATROID_EPSILON};
pub use bench::{
    cell_stream, run_bench, BenchPlan, BenchReport, BenchRow, CellStats, InstanceSource,
    RESULTS_HEADER,
};
pub use generate::{gen_synthetic_web, gen_web, random_partition, web_parts};
pub use stats::{
    summarize, wilcoxon_rank_sum, wilcoxon_signed_rank, RankSum, SignedRank, Summary,
    SIGNED_RANK_MIN_PAIRS,
};
pub use trace::{trace_export, Curve};
pub use verify::{guaranteed_ratio, run_verify, verify_instances, VerifyRow};
pub use protocol::{protocol_csv, protocol_means, run_dynamic_protocol, DynamicProtocol, ProtocolRow};
