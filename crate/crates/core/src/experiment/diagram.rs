use std::fs::{self, File, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{AlgorithmChoice, ExperimentConfig, InitChoice};
use super::trial::run_trial;
use crate::error::{Error, Result};

pub const DIAGRAM_CSV_HEADER: &str = "n,m,trials,successes,success_rate,algorithm,init,master_seed";

/// One `(n, m)` cell of a phase diagram; `m` holds `P` for CDP models.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagramCell {
    pub n: usize,
    pub m: usize,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub algorithm: AlgorithmChoice,
    pub init: InitChoice,
    pub master_seed: u64,
}

impl DiagramCell {
    pub fn new(cfg: &ExperimentConfig, n: usize, m: usize, successes: usize) -> Self {
        assert!(successes <= cfg.trials);
        Self {
            n,
            m,
            trials: cfg.trials,
            successes,
            success_rate: successes as f64 / cfg.trials as f64,
            algorithm: cfg.algorithm,
            init: cfg.init,
            master_seed: cfg.master_seed,
        }
    }

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}\n",
            self.n,
            self.m,
            self.trials,
            self.successes,
            self.success_rate,
            self.algorithm.as_str(),
            self.init.as_str(),
            self.master_seed
        )
    }
}

/// Number of successful trials of cell `(n, count)`. A cell without
/// measurements has no successes.
pub fn run_cell(cfg: &ExperimentConfig, n: usize, count: usize) -> Result<usize> {
    if count == 0 {
        return Ok(0);
    }
    let wins = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, n, count, t).map(|r| r.succeeded(cfg.success_tol)))
        .collect::<Result<Vec<bool>>>()?;
    Ok(wins.into_iter().filter(|&w| w).count())
}

/// Path of the marker that records progress of an unfinished diagram.
pub fn resume_marker(output: &Path) -> PathBuf {
    let mut name = output.as_os_str().to_owned();
    name.push(".resume");
    PathBuf::from(name)
}

#[derive(Serialize, Deserialize)]
struct Marker {
    config: ExperimentConfig,
    completed: usize,
}

/// Settings that determine the CSV contents (worker count does not).
fn identity(cfg: &ExperimentConfig) -> ExperimentConfig {
    ExperimentConfig {
        jobs: None,
        ..cfg.clone()
    }
}

fn read_cells(path: &Path, count: usize) -> Result<Vec<DiagramCell>> {
    let mut rdr = csv::Reader::from_path(path)?;
    let cells = rdr
        .deserialize()
        .take(count)
        .collect::<std::result::Result<Vec<DiagramCell>, _>>()?;
    if cells.len() != count {
        return Err(Error::InvalidParameter(format!(
            "{} holds {} cells but the resume marker records {count}",
            path.display(),
            cells.len()
        )));
    }
    Ok(cells)
}

fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool> {
    let jobs = jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidParameter(format!("cannot start {jobs} workers: {e}")))
}

/// Phase-transition diagram over `n_list × (m_list ++ m_ratios·n)`, written
/// to `cfg.output` one flushed row per cell. Progress is tracked in
/// [`resume_marker`]; rerunning an interrupted diagram with the same config
/// keeps the finished cells. The marker is removed on completion.
pub fn cmd_phase_diagram(cfg: &ExperimentConfig) -> Result<Vec<DiagramCell>> {
    cfg.validate()?;
    if cfg.n_list.is_empty() || cfg.diagram_counts(1).is_empty() {
        return Err(Error::InvalidParameter(
            "phase diagram needs nonempty n_list and m_list/m_ratios".into(),
        ));
    }
    if cfg.grid.is_some() {
        return Err(Error::InvalidParameter(
            "phase diagrams run on 1D signals; unset grid".into(),
        ));
    }
    let grid: Vec<(usize, usize)> = cfg
        .n_list
        .iter()
        .flat_map(|&n| cfg.diagram_counts(n).into_iter().map(move |m| (n, m)))
        .collect();
    let pool = thread_pool(cfg.jobs)?;
    let output = &cfg.output;
    let marker_path = resume_marker(output);
    let key = identity(cfg);

    let mut cells = match fs::read_to_string(&marker_path) {
        Ok(text) => match serde_json::from_str::<Marker>(&text) {
            Ok(m) if m.config == key && m.completed <= grid.len() => {
                read_cells(output, m.completed)?
            }
            _ => Vec::new(),
        },
        Err(_) => Vec::new(),
    };
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    let mut file = File::create(output)?;
    file.write_all(DIAGRAM_CSV_HEADER.as_bytes())?;
    file.write_all(b"\n")?;
    for c in &cells {
        file.write_all(c.csv_line().as_bytes())?;
    }
    file.sync_data()?;
    drop(file);

    for &(n, m) in &grid[cells.len()..] {
        let successes = pool.install(|| run_cell(cfg, n, m))?;
        let cell = DiagramCell::new(cfg, n, m, successes);
        let mut f = OpenOptions::new().append(true).open(output)?;
        f.write_all(cell.csv_line().as_bytes())?;
        f.sync_data()?;
        cells.push(cell);
        let marker = Marker {
            config: key.clone(),
            completed: cells.len(),
        };
        fs::write(&marker_path, serde_json::to_string(&marker)?)?;
    }
    match fs::remove_file(&marker_path) {
        Ok(()) => {}
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => {}
        Err(e) => return Err(e.into()),
    }
    Ok(cells)
}
