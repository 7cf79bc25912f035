//! Result persistence: CSV writers (header row, shortest round-trip decimal
//! formatting), plot-data emission for external plotting, and the versioned
//! JSON manifest that makes every run replayable.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::experiments::{StudyRecord, SweepRecord};
use crate::mdp::AlphaSearchTrace;

/// Formats a float so that parsing the text recovers the exact bits
/// (Rust's shortest round-trip representation).
fn fmt(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v}")
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt).unwrap_or_default()
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    std::fs::write(path, content)?;
    Ok(())
}

/// Writes study records (one row per run) as CSV.
pub fn write_study_csv(path: &Path, records: &[StudyRecord]) -> Result<()> {
    let mut out = String::from(
        "snr_db,noise_fraction,seed,delta,c_delta,alpha,discrepancy,relative_error,bregman_distance,outcome\n",
    );
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt_opt(r.snr_db),
            fmt_opt(r.noise_fraction),
            r.seed,
            fmt(r.delta),
            fmt(r.c_delta),
            fmt(r.alpha),
            fmt(r.discrepancy),
            fmt(r.relative_error),
            fmt_opt(r.bregman_distance),
            r.outcome
        )
        .expect("string write");
    }
    write_file(path, &out)
}

/// Writes sweep rows as CSV.
pub fn write_sweep_csv(path: &Path, records: &[SweepRecord]) -> Result<()> {
    let mut out =
        String::from("alpha,discrepancy,penalty,functional,relative_error,status,optimality_residual\n");
    for r in records {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            fmt(r.alpha),
            fmt(r.discrepancy),
            fmt(r.penalty),
            fmt(r.functional),
            fmt(r.relative_error),
            r.status,
            fmt(r.optimality_residual)
        )
        .expect("string write");
    }
    write_file(path, &out)
}

/// Writes an α-search trace as CSV (step, phase, alpha, discrepancy,
/// penalty, functional value m).
pub fn write_trace_csv(path: &Path, trace: &AlphaSearchTrace) -> Result<()> {
    let mut out = String::from("step,phase,alpha,discrepancy,penalty,m\n");
    for s in &trace.steps {
        writeln!(
            out,
            "{},{},{},{},{},{}",
            s.step,
            s.phase.as_str(),
            fmt(s.alpha),
            fmt(s.discrepancy),
            fmt(s.penalty),
            fmt(s.functional)
        )
        .expect("string write");
    }
    write_file(path, &out)
}

/// Plot-data products: two-or-more-column CSVs for external plotting.
/// Discrepancy plots carry the reference lines τ1δ, τ2δ, cδ as constant
/// columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlotKind {
    DeltaVsSnr,
    AlphaVsSnr,
    RerrorVsSnr,
    DiscrepancyVsAlpha,
    RerrorVsAlpha,
    SignalOverlay,
    GravityProfile,
}

impl PlotKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlotKind::DeltaVsSnr => "delta-vs-snr",
            PlotKind::AlphaVsSnr => "alpha-vs-snr",
            PlotKind::RerrorVsSnr => "rerror-vs-snr",
            PlotKind::DiscrepancyVsAlpha => "discrepancy-vs-alpha",
            PlotKind::RerrorVsAlpha => "rerror-vs-alpha",
            PlotKind::SignalOverlay => "signal-overlay",
            PlotKind::GravityProfile => "gravity-profile",
        }
    }
}

/// Data behind one plot file.
pub enum PlotData<'a> {
    Study {
        kind: PlotKind,
        records: &'a [StudyRecord],
    },
    DiscrepancyVsAlpha {
        sweep: &'a [SweepRecord],
        delta: f64,
        tau1: f64,
        tau2: f64,
        c: f64,
    },
    RerrorVsAlpha {
        sweep: &'a [SweepRecord],
    },
    SignalOverlay {
        x_true: &'a DVector<f64>,
        x_recovered: &'a DVector<f64>,
    },
    GravityProfile {
        stations: &'a [f64],
        g_clean: &'a DVector<f64>,
        g_observed: &'a DVector<f64>,
        g_reconstructed: &'a DVector<f64>,
    },
}

impl PlotData<'_> {
    pub fn kind(&self) -> PlotKind {
        match self {
            PlotData::Study { kind, .. } => *kind,
            PlotData::DiscrepancyVsAlpha { .. } => PlotKind::DiscrepancyVsAlpha,
            PlotData::RerrorVsAlpha { .. } => PlotKind::RerrorVsAlpha,
            PlotData::SignalOverlay { .. } => PlotKind::SignalOverlay,
            PlotData::GravityProfile { .. } => PlotKind::GravityProfile,
        }
    }
}

/// Writes one plot-data CSV; rejects empty inputs.
pub fn emit_plot_data(data: &PlotData, path: &Path) -> Result<()> {
    let mut out = String::new();
    match data {
        PlotData::Study { kind, records } => {
            if records.is_empty() {
                return Err(Error::InvalidInput("no records to plot".into()));
            }
            let column = match kind {
                PlotKind::DeltaVsSnr => "delta",
                PlotKind::AlphaVsSnr => "alpha",
                PlotKind::RerrorVsSnr => "rerror",
                other => {
                    return Err(Error::InvalidInput(format!(
                        "plot kind {} does not take study records",
                        other.as_str()
                    )))
                }
            };
            writeln!(out, "snr_db,{column}").expect("string write");
            for r in *records {
                let value = match kind {
                    PlotKind::DeltaVsSnr => r.delta,
                    PlotKind::AlphaVsSnr => r.alpha,
                    _ => r.relative_error,
                };
                writeln!(out, "{},{}", fmt_opt(r.snr_db), fmt(value)).expect("string write");
            }
        }
        PlotData::DiscrepancyVsAlpha {
            sweep,
            delta,
            tau1,
            tau2,
            c,
        } => {
            if sweep.is_empty() {
                return Err(Error::InvalidInput("no records to plot".into()));
            }
            writeln!(out, "alpha,discrepancy,tau1_delta,tau2_delta,c_delta").expect("string write");
            for r in *sweep {
                writeln!(
                    out,
                    "{},{},{},{},{}",
                    fmt(r.alpha),
                    fmt(r.discrepancy),
                    fmt(tau1 * delta),
                    fmt(tau2 * delta),
                    fmt(c * delta)
                )
                .expect("string write");
            }
        }
        PlotData::RerrorVsAlpha { sweep } => {
            if sweep.is_empty() {
                return Err(Error::InvalidInput("no records to plot".into()));
            }
            writeln!(out, "alpha,rerror").expect("string write");
            for r in *sweep {
                writeln!(out, "{},{}", fmt(r.alpha), fmt(r.relative_error)).expect("string write");
            }
        }
        PlotData::SignalOverlay { x_true, x_recovered } => {
            if x_true.is_empty() {
                return Err(Error::InvalidInput("no records to plot".into()));
            }
            if x_true.len() != x_recovered.len() {
                return Err(Error::DimensionMismatch {
                    expected: x_true.len(),
                    got: x_recovered.len(),
                });
            }
            writeln!(out, "index,x_true,x_recovered").expect("string write");
            for i in 0..x_true.len() {
                writeln!(out, "{},{},{}", i, fmt(x_true[i]), fmt(x_recovered[i])).expect("string write");
            }
        }
        PlotData::GravityProfile {
            stations,
            g_clean,
            g_observed,
            g_reconstructed,
        } => {
            if stations.is_empty() {
                return Err(Error::InvalidInput("no records to plot".into()));
            }
            if g_clean.len() != stations.len()
                || g_observed.len() != stations.len()
                || g_reconstructed.len() != stations.len()
            {
                return Err(Error::DimensionMismatch {
                    expected: stations.len(),
                    got: g_clean.len().min(g_observed.len()).min(g_reconstructed.len()),
                });
            }
            writeln!(out, "station,g_clean,g_observed,g_reconstructed").expect("string write");
            for (i, s) in stations.iter().enumerate() {
                writeln!(
                    out,
                    "{},{},{},{}",
                    fmt(*s),
                    fmt(g_clean[i]),
                    fmt(g_observed[i]),
                    fmt(g_reconstructed[i])
                )
                .expect("string write");
            }
        }
    }
    write_file(path, &out)
}

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Headline numbers of a run, when the mode produces them.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ManifestSummary {
    pub delta: Option<f64>,
    pub c_delta: Option<f64>,
    pub alpha: Option<f64>,
    pub relative_error: Option<f64>,
    pub discrepancy: Option<f64>,
    pub outcome: Option<String>,
    pub bregman_slope: Option<f64>,
    pub checks_passed: Option<bool>,
}

/// Versioned run manifest. The embedded resolved config is sufficient to
/// reproduce every listed numeric file bit-identically.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub artifact_version: String,
    pub config: RunConfig,
    pub files: Vec<String>,
    pub summary: ManifestSummary,
}

impl Manifest {
    pub fn new(config: RunConfig) -> Self {
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            config,
            files: Vec::new(),
            summary: ManifestSummary::default(),
        }
    }
}

pub fn write_manifest(path: &Path, manifest: &Manifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)?;
    write_file(path, &text)
}

pub fn read_manifest(path: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(path)?;
    let manifest: Manifest = serde_json::from_str(&text)?;
    if manifest.schema_version != MANIFEST_SCHEMA_VERSION {
        return Err(Error::Config(format!(
            "unsupported manifest schema version {}",
            manifest.schema_version
        )));
    }
    Ok(manifest)
}

/// Standard output file names of a run directory.
pub fn run_paths(out: &Path) -> RunPaths {
    RunPaths {
        manifest: out.join("manifest.json"),
        study: out.join("study.csv"),
        sweep: out.join("sweep.csv"),
        trace: out.join("trace.csv"),
    }
}

pub struct RunPaths {
    pub manifest: PathBuf,
    pub study: PathBuf,
    pub sweep: PathBuf,
    pub trace: PathBuf,
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    fn sweep_row(alpha: f64, d: f64) -> SweepRecord {
        SweepRecord {
            alpha,
            discrepancy: d,
            penalty: 0.25,
            functional: 0.5 * d * d + alpha * 0.25,
            relative_error: 0.1,
            status: "converged".into(),
            optimality_residual: 0.0,
        }
    }

    #[test]
    fn csv_floats_round_trip_exactly() {
        let values = [1.0 / 3.0, f64::MIN_POSITIVE, 2.7421e-7, 1e300, -0.1];
        for v in values {
            let parsed: f64 = fmt(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits());
        }
    }

    #[test]
    fn sweep_csv_shape_and_reparse() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("sweep.csv");
        let rows = vec![sweep_row(0.1, 0.1), sweep_row(0.2, 0.2)];
        write_sweep_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        assert!(lines[0].starts_with("alpha,"));
        let first: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(first.len(), 7);
        assert_eq!(first[0].parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn discrepancy_plot_has_reference_columns() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("disc.csv");
        let rows: Vec<SweepRecord> = (1..=20).map(|k| sweep_row(0.01 * k as f64, 0.02 * k as f64)).collect();
        emit_plot_data(
            &PlotData::DiscrepancyVsAlpha {
                sweep: &rows,
                delta: 0.1,
                tau1: 1.0,
                tau2: 2.0,
                c: 4.0,
            },
            &path,
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 21);
        assert_eq!(lines[0], "alpha,discrepancy,tau1_delta,tau2_delta,c_delta");
        let row: Vec<&str> = lines[1].split(',').collect();
        assert_eq!(row[2].parse::<f64>().unwrap(), 0.1);
        assert_eq!(row[4].parse::<f64>().unwrap(), 0.4);
    }

    #[test]
    fn empty_plot_records_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("x.csv");
        let err = emit_plot_data(
            &PlotData::Study {
                kind: PlotKind::DeltaVsSnr,
                records: &[],
            },
            &path,
        );
        assert!(err.is_err());
    }

    #[test]
    fn signal_overlay_shape() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("overlay.csv");
        let x_true = DVector::from_vec(vec![0.0, 1.0, 0.0]);
        let x_rec = DVector::from_vec(vec![0.01, 0.98, -0.02]);
        emit_plot_data(&PlotData::SignalOverlay { x_true: &x_true, x_recovered: &x_rec }, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 4);
        assert_eq!(text.lines().next().unwrap(), "index,x_true,x_recovered");
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        let mut manifest = Manifest::new(RunConfig::default());
        manifest.files.push("study.csv".into());
        manifest.summary.delta = Some(0.014);
        write_manifest(&path, &manifest).unwrap();
        let back = read_manifest(&path).unwrap();
        assert_eq!(back.schema_version, MANIFEST_SCHEMA_VERSION);
        assert_eq!(back.files, vec!["study.csv".to_string()]);
        assert_eq!(back.summary.delta, Some(0.014));
        assert_eq!(back.config.cs.n, 200);
    }
}
