use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::ExperimentReport;
use crate::error::{Error, Result};
use crate::lqg::SystemModel;
use crate::scheduling::{sample_random, RandomSample, Summary};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    Json,
    Csv,
}

pub(crate) fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| Error::io(path, e))
}

pub(crate) fn write_with(path: &Path, f: impl FnOnce(&mut BufWriter<File>) -> std::io::Result<()>) -> Result<()> {
    let mut out = create(path)?;
    f(&mut out).and_then(|_| out.flush()).map_err(|e| Error::io(path, e))
}

pub fn report_to_json(report: &ExperimentReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn report_from_json(text: &str) -> Result<ExperimentReport> {
    let mut de = serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(&mut de).map_err(|e| Error::Parse {
        path: e.path().to_string(),
        message: e.into_inner().to_string(),
    })
}

/// `stage,method,actuators`, one row per stage and method; multiple active
/// actuators are joined with `;`.
pub fn write_schedule_csv(report: &ExperimentReport, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "stage,method,actuators")?;
    for m in &report.methods {
        for (t, stage) in m.schedule.to_one_based().iter().enumerate() {
            let labels: Vec<String> = stage.iter().map(|j| j.to_string()).collect();
            writeln!(out, "{t},{},{}", m.method, labels.join(";"))?;
        }
    }
    Ok(())
}

/// `stage,theta_1,…,theta_N` from the relaxed solution.
pub fn write_theta_csv(theta: &[Vec<f64>], mut out: impl Write) -> std::io::Result<()> {
    let n = theta.first().map_or(0, Vec::len);
    let header: Vec<String> = (1..=n).map(|i| format!("theta_{i}")).collect();
    writeln!(out, "stage,{}", header.join(","))?;
    for (t, row) in theta.iter().enumerate() {
        let vals: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        writeln!(out, "{t},{}", vals.join(","))?;
    }
    Ok(())
}

pub fn write_report(report: &ExperimentReport, format: ReportFormat, mut out: impl Write) -> std::io::Result<()> {
    match format {
        ReportFormat::Json => out.write_all(report_to_json(report).as_bytes()),
        ReportFormat::Csv => write_schedule_csv(report, out),
    }
}

pub fn emit_report(report: &ExperimentReport, format: ReportFormat, path: &Path) -> Result<()> {
    write_with(path, |o| write_report(report, format, o))
}

/// `sample,j1,j` in sample order.
pub fn write_samples_csv(samples: &RandomSample, mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "sample,j1,j")?;
    for (k, (j1, j)) in samples.j1.iter().zip(&samples.j).enumerate() {
        writeln!(out, "{k},{j1},{j}")?;
    }
    Ok(())
}

/// Empirical CDF: row `k` holds the `k`-th smallest `J` and `J1` and the
/// percentage of samples at or below them.
pub fn write_cdf_csv(samples: &RandomSample, mut out: impl Write) -> std::io::Result<()> {
    let mut j = samples.j.clone();
    let mut j1 = samples.j1.clone();
    j.sort_by(f64::total_cmp);
    j1.sort_by(f64::total_cmp);
    let n = j.len() as f64;
    writeln!(out, "rank,j,j1,percent")?;
    for (k, (a, b)) in j.iter().zip(&j1).enumerate() {
        writeln!(out, "{},{a},{b},{}", k + 1, 100.0 * (k + 1) as f64 / n)?;
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct HistogramOutput {
    pub samples_path: PathBuf,
    pub cdf_path: PathBuf,
    pub summary: Summary,
    pub summary_j1: Summary,
}

/// `<stem>.cdf.csv` next to `path`.
pub fn cdf_path(path: &Path) -> PathBuf {
    let stem = path.file_stem().map_or("histogram".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.cdf.csv"))
}

pub fn write_histogram(samples: &RandomSample, path: &Path) -> Result<HistogramOutput> {
    let cdf = cdf_path(path);
    write_with(path, |o| write_samples_csv(samples, o))?;
    write_with(&cdf, |o| write_cdf_csv(samples, o))?;
    Ok(HistogramOutput {
        samples_path: path.to_path_buf(),
        cdf_path: cdf,
        summary: samples.summary(),
        summary_j1: samples.summary_j1(),
    })
}

pub fn random_histogram(model: &SystemModel<f64>, count: usize, seed: u64, path: &Path) -> Result<HistogramOutput> {
    let samples = sample_random(model, count, seed)?;
    write_histogram(&samples, path)
}
