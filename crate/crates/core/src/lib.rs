pub mod bregman;
pub mod error;
pub mod experiment;
pub mod initialization;
pub mod measurements;
pub mod objective;
pub mod rng;
pub mod signal;
pub mod solvers;

pub use error::{Error, Result};
pub use signal::RealSignal;
