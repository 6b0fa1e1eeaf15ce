//! Monte-Carlo experiments: SER and rate sweeps, beampatterns with NMSE and
//! CRB, and SQP convergence traces.

mod config;
mod output;
pub mod qpsk;
mod receiver;
mod report;
mod sweep;

pub use config::{ChannelModel, ExperimentConfig};
pub use output::{git_describe, write_beampattern_outputs, write_sqp_outputs, write_sweep_outputs, RunManifest, SweepKind};
pub use receiver::{count_errors, LinkFilter};
pub use report::{design_report, run_beampattern_report, run_sqp_convergence, BeamPatternSet, PatternEntry, SqpRun};
pub use sweep::{run_ser_sweep, run_tradeoff_sweep, ExperimentResult, Resample, ResultRow};
