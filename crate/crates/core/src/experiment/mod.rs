//! Experiment engine behind the command-line front end: seeded trials,
//! single recoveries, phase-transition diagrams, 2D surfaces and rate fits.

mod config;
mod diagram;
mod io;
mod ratefit;
mod recover;
mod surface;
mod trial;

pub use config::{
    AlgorithmChoice, ExperimentConfig, InitChoice, LogBase, SampleSize, MAX_PROBLEM_ENTRIES,
};
pub use diagram::{cmd_phase_diagram, resume_marker, run_cell, DiagramCell, DIAGRAM_CSV_HEADER};
pub use io::{align_sign, read_grid_csv, read_trace_rel_errs, write_grid_csv};
pub use ratefit::{cmd_rate_fit, rate_fit_report, RateFitReport, RATE_FIT_R2};
pub use recover::{cmd_recover, RunArtifacts};
pub use surface::{cmd_surface2d, SurfaceArtifacts};
pub use trial::{
    build_model, run_trial, surface_truth, unit_truth, SpectralSummary, TrialRun, TrialSeeds,
};
