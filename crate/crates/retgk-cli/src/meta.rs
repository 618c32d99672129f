//! Run records: the results CSV and per-run metadata JSON. A metadata
//! file holds every parameter needed to reproduce its result row.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Serialize, Deserialize, Debug, Clone, Default)]
pub struct Timings {
    pub load: f64,
    pub rpf: f64,
    pub embed: f64,
    pub gram: f64,
    pub cv: f64,
    pub total: f64,
}

#[derive(Serialize, Deserialize, Debug, Clone)]
pub struct RunRecord {
    pub command: String,
    pub dataset: String,
    pub dataset_dir: String,
    pub variant: String,
    pub rpf_method: String,
    pub steps: usize,
    pub mc_trials: usize,
    pub d0: Option<usize>,
    pub dc: Option<usize>,
    pub p_grid: Vec<f64>,
    pub c_grid: Vec<f64>,
    pub folds: usize,
    pub repeats: usize,
    pub seed: u64,
    pub self_loops: String,
    pub rff_freq: String,
    pub format: String,
    pub gamma0: Option<f64>,
    pub gamma_c: Option<f64>,
    pub graph_gammas: Vec<f64>,
    pub ridge: Option<f64>,
    pub mean_accuracy: Option<f64>,
    pub std_accuracy: Option<f64>,
    pub per_repeat: Vec<f64>,
    pub modal_p: Option<f64>,
    pub selection_counts: Vec<Vec<usize>>,
    pub timings: Timings,
    pub out_files: Vec<String>,
}

pub fn write_record(record: &RunRecord, path: &Path) -> std::io::Result<()> {
    let json = serde_json::to_string_pretty(record).expect("record serializes");
    std::fs::write(path, json)
}

pub const RESULTS_HEADER: &str =
    "dataset,kernel,S,D0,Dc,p,mean_acc,std,wall_time_seconds";

/// One line of the results table, in the schema above.
pub struct ResultRow<'a> {
    pub dataset: &'a str,
    pub kernel: &'a str,
    pub steps: usize,
    pub d0: Option<usize>,
    pub dc: Option<usize>,
    pub p: f64,
    pub mean: f64,
    pub std: f64,
    pub wall: f64,
}

impl ResultRow<'_> {
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<usize>| v.map(|x| x.to_string()).unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{:.6},{:.6},{:.3}",
            self.dataset,
            self.kernel,
            self.steps,
            opt(self.d0),
            opt(self.dc),
            self.p,
            self.mean,
            self.std,
            self.wall,
        )
    }
}

/// Append a row, writing the header first when the file is new.
pub fn append_result_row(path: &Path, row: &str) -> std::io::Result<()> {
    let fresh = !path.exists();
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{RESULTS_HEADER}")?;
    }
    writeln!(f, "{row}")
}
