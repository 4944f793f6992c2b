use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::signal::RealSignal;

/// Header of the exported trace CSV.
pub const TRACE_CSV_HEADER: &str = "iter,f,grad_norm,L_k,gamma_k,backtracks,rel_err";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    MirrorDescent,
    WirtingerFlow,
    Polyak,
}

/// Why a solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    ConvergedGrad,
    ConvergedError,
    MaxIters,
    /// No progress (`x_{k+1} = x_k`), zero subgradient or a diverging baseline.
    Stalled,
    NonFinite,
}

/// One row of a trace. Row 0 describes the initial point; row `k ≥ 1` the
/// iterate `x_k` and the step (`L_k`, `γ_k`, backtracks) that produced it.
///
/// `f` is the objective of the algorithm that produced the trace (the
/// nonsmooth `(1/m) Σ |y − |a*x|²|` for Polyak). For the baselines `L_k`
/// holds `1/γ_k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub f: f64,
    pub grad_norm: f64,
    pub l_k: f64,
    pub gamma_k: f64,
    pub backtracks: usize,
    pub rel_err: Option<f64>,
    /// `D_f(x_k, x_{k−1})` of the accepted step (mirror descent only).
    pub d_f: Option<f64>,
    /// `D_ψ(x_k, x_{k−1})` of the accepted step (mirror descent only).
    pub d_psi: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct SolverTrace {
    pub algorithm: Algorithm,
    pub kappa: f64,
    pub records: Vec<IterationRecord>,
    pub status: Status,
    pub final_point: RealSignal,
    /// `x_0, x_1, …` when requested through `store_iterates`.
    pub iterates: Option<Vec<RealSignal>>,
}

#[derive(Serialize)]
struct StatusDoc<'a> {
    algorithm: Algorithm,
    status: Status,
    iterations: usize,
    final_f: f64,
    final_rel_err: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    extra: Option<&'a serde_json::Value>,
}

impl SolverTrace {
    /// Number of steps taken.
    pub fn iterations(&self) -> usize {
        self.records.len().saturating_sub(1)
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("trace has an initial record")
    }

    pub fn final_rel_err(&self) -> Option<f64> {
        self.last().rel_err
    }

    pub fn rel_errs(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.rel_err).collect()
    }

    /// Writes the trace as CSV with header [`TRACE_CSV_HEADER`]; an unknown
    /// relative error is written as an empty field.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        w.write_record(TRACE_CSV_HEADER.split(','))?;
        for r in &self.records {
            w.write_record([
                r.iter.to_string(),
                fmt_f64(r.f),
                fmt_f64(r.grad_norm),
                fmt_f64(r.l_k),
                fmt_f64(r.gamma_k),
                r.backtracks.to_string(),
                r.rel_err.map(fmt_f64).unwrap_or_default(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    /// JSON status sidecar; `extra` is embedded verbatim.
    pub fn status_json(&self, extra: Option<&serde_json::Value>) -> Result<String> {
        Ok(serde_json::to_string_pretty(&StatusDoc {
            algorithm: self.algorithm,
            status: self.status,
            iterations: self.iterations(),
            final_f: self.last().f,
            final_rel_err: self.final_rel_err(),
            extra,
        })?)
    }
}

/// Shortest representation that round-trips (`{:e}` keeps CSVs compact).
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:e}")
}
