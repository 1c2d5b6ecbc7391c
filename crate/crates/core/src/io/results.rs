//! Per-repetition result rows, their aggregation, and CSV/JSON output.

use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::ShotCount;
use crate::error::{Error, Result};
use crate::stats::{spread, Spread};

/// Outcome of one (β, shots, repetition) evaluation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ResultRow {
    pub beta: f64,
    pub shots: ShotCount,
    pub repetition: usize,
    /// `None` when the repetition failed before a state could be built.
    pub trace_distance: Option<f64>,
    pub delta_e: Option<f64>,
    pub ill_conditioned: bool,
    /// The repetition counts as failed or unstable (see `failure`).
    pub failed: bool,
    pub failure: Option<String>,
    pub retained_excitations: usize,
    pub discarded_states: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ResultsTable {
    pub spread_percentile: f64,
    pub rows: Vec<ResultRow>,
}

/// Aggregate over repetitions for one (β, shots) cell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateRow {
    pub beta: f64,
    pub shots: ShotCount,
    pub repetitions: usize,
    pub failed: usize,
    pub trace_distance: Option<Spread>,
    pub delta_e: Option<Spread>,
}

impl ResultsTable {
    pub fn new(spread_percentile: f64) -> Self {
        Self {
            spread_percentile,
            rows: Vec::new(),
        }
    }

    /// Groups rows by (shots, β) in first-appearance order. Failed rows
    /// contribute to `failed` and are excluded from the spreads; an
    /// unstable repetition that still produced numbers is kept.
    pub fn aggregate(&self) -> Vec<AggregateRow> {
        let mut keys: Vec<(ShotCount, u64)> = Vec::new();
        for r in &self.rows {
            let k = (r.shots, r.beta.to_bits());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        keys.into_iter()
            .map(|(shots, bits)| {
                let cell: Vec<&ResultRow> = self
                    .rows
                    .iter()
                    .filter(|r| r.shots == shots && r.beta.to_bits() == bits)
                    .collect();
                let td: Vec<f64> = cell.iter().filter_map(|r| r.trace_distance).collect();
                let de: Vec<f64> = cell.iter().filter_map(|r| r.delta_e).collect();
                AggregateRow {
                    beta: f64::from_bits(bits),
                    shots,
                    repetitions: cell.len(),
                    failed: cell.iter().filter(|r| r.failed).count(),
                    trace_distance: spread(&td, self.spread_percentile),
                    delta_e: spread(&de, self.spread_percentile),
                }
            })
            .collect()
    }

    /// Failed fraction over all rows with the given shot count, counting
    /// each repetition once.
    pub fn failed_fraction(&self, shots: ShotCount) -> f64 {
        let mut reps: Vec<(usize, bool)> = Vec::new();
        for r in self.rows.iter().filter(|r| r.shots == shots) {
            match reps.iter_mut().find(|(i, _)| *i == r.repetition) {
                Some(e) => e.1 |= r.failed,
                None => reps.push((r.repetition, r.failed)),
            }
        }
        if reps.is_empty() {
            return 0.0;
        }
        reps.iter().filter(|(_, f)| *f).count() as f64 / reps.len() as f64
    }
}

pub const CSV_HEADER: [&str; 8] = [
    "beta",
    "shots",
    "trace_distance_median",
    "trace_distance_lo",
    "trace_distance_hi",
    "delta_E_median",
    "delta_E_lo",
    "delta_E_hi",
];

/// Path of the JSON sidecar that accompanies a CSV file.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else {
        format!("{x:e}")
    }
}

/// Renders the aggregated CSV in memory.
pub fn results_csv(table: &ResultsTable) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let ser = |e: csv::Error| Error::Serialization(e.to_string());
    w.write_record(CSV_HEADER).map_err(ser)?;
    for agg in table.aggregate() {
        let nan = Spread {
            median: f64::NAN,
            lo: f64::NAN,
            hi: f64::NAN,
        };
        let mut td = agg.trace_distance.unwrap_or(nan);
        let mut de = agg.delta_e.unwrap_or(nan);
        if agg.shots.is_infinite() {
            // no sampling spread
            td.lo = td.median;
            td.hi = td.median;
            de.lo = de.median;
            de.hi = de.median;
        }
        w.write_record([
            format!("{}", agg.beta),
            agg.shots.to_string(),
            fmt_num(td.median),
            fmt_num(td.lo),
            fmt_num(td.hi),
            fmt_num(de.median),
            fmt_num(de.lo),
            fmt_num(de.hi),
        ])
        .map_err(ser)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::Serialization(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Serialization(e.to_string()))
}

#[derive(Serialize)]
struct Sidecar<'a> {
    spread_percentile: f64,
    aggregates: Vec<AggregateRow>,
    rows: &'a [ResultRow],
}

/// Writes the aggregated CSV to `path` and the raw per-repetition rows to
/// its JSON sidecar.
pub fn write_results(table: &ResultsTable, path: &Path) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let csv_text = results_csv(table)?;
    std::fs::write(path, csv_text).map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    let json = serde_json::to_string_pretty(&Sidecar {
        spread_percentile: table.spread_percentile,
        aggregates: table.aggregate(),
        rows: &table.rows,
    })
    .map_err(|e| Error::Serialization(e.to_string()))?;
    std::fs::write(&side, json).map_err(|e| Error::io(&side, e))
}
