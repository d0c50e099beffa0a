//! Experiment driver: JSON specs, bound reports, constant fitting, CSV output
//! and the verification suites.

pub mod experiment;
pub mod fit;
pub mod report;
pub mod spec;
pub mod verify;

pub use experiment::run_experiment;
pub use fit::{fit_constants, FitOutcome, FitStatus};
pub use report::{read_csv, run, write_csv, Report, Summary};
pub use spec::{ConstantPolicy, ExperimentSpec, RunSpec};
pub use verify::{run_suite, Suite, SuiteReport};
