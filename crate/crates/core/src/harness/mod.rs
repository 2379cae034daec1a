//! Experiment configuration, multi-run orchestration and CSV/SVG output.

pub mod config;
pub mod experiment;
pub mod plot;
pub mod records;
pub mod summary;

pub use config::{ArmConfig, ExperimentConfig};
pub use experiment::{run_experiment, run_experiment_with};
pub use plot::{render_plot, render_svg};
pub use records::{load_csv, RunRecord, CSV_HEADER};
pub use summary::{summarize, CurveSummary};
