//! Run records and their JSON, CSV and table renderings.

use std::io::{self, Write};
use std::time::SystemTime;

use nda_core::catalog::Parameters;
use nda_core::estimators::SamplerConfig;
use serde::{Deserialize, Serialize};

use crate::compute::{sig6, ComponentResult, ExactRef};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything needed to reproduce and audit one computation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub state: String,
    pub parameters: Parameters,
    pub method: String,
    pub sampler: SamplerConfig,
    pub results: Vec<ComponentResult>,
    /// Eigenvalue of the Hamiltonian when the state is not an eigenstate.
    #[serde(default)]
    pub reference_eigenvalue: Option<ExactRef>,
    pub wall_time_s: f64,
    pub version: String,
    /// RFC 3339, UTC.
    pub timestamp: String,
}

pub fn timestamp() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

pub const CSV_HEADER: [&str; 7] = ["state", "component", "method", "mean", "stderr", "exact", "sigma_deviation"];

fn csv_err(e: csv::Error) -> io::Error {
    io::Error::other(e)
}

/// Writes rows `(state, result)` in the CSV layout.
pub fn write_csv<'a, W: Write>(out: W, rows: impl IntoIterator<Item = (&'a str, &'a ComponentResult)>) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for (state, r) in rows {
        let opt = |v: Option<f64>| v.map(|v| format!("{v:e}")).unwrap_or_default();
        w.write_record([
            state.to_string(),
            r.component.name().to_string(),
            r.method.clone(),
            format!("{:e}", r.estimate.mean),
            format!("{:e}", r.estimate.stderr),
            opt(r.exact.as_ref().map(|e| e.value)),
            opt(r.sigma_deviation),
        ])
        .map_err(csv_err)?;
    }
    w.flush()
}

pub fn format_sigma(d: Option<f64>) -> String {
    d.map(|d| format!("{d:+.2}")).unwrap_or_else(|| "-".into())
}

/// Human-readable table of one record.
pub fn write_table<W: Write>(mut out: W, rec: &RunRecord) -> io::Result<()> {
    writeln!(out, "state {}  method {}  seed {}  chains {}", rec.state, rec.method, rec.sampler.seed, rec.sampler.n_chains)?;
    writeln!(out, "{:<9} {:>12} {:>10} {:>26} {:>8}  {}", "component", "estimate", "stderr", "exact", "dev/σ", "note")?;
    for r in &rec.results {
        let exact = r.exact.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into());
        let note = match r.estimate.status {
            nda_core::estimators::EstimateStatus::Ok => "",
            nda_core::estimators::EstimateStatus::AcceptanceWarning => "acceptance warning",
            nda_core::estimators::EstimateStatus::Unconverged => "UNCONVERGED",
        };
        writeln!(
            out,
            "{:<9} {:>12} {:>10} {:>26} {:>8}  {}",
            r.component.name(),
            sig6(r.estimate.mean),
            format!("{:.2e}", r.estimate.stderr),
            exact,
            format_sigma(r.sigma_deviation),
            note
        )?;
    }
    if let Some(eig) = &rec.reference_eigenvalue {
        if let Some(sum) = rec.results.iter().find(|r| r.component == crate::compute::Component::Sum) {
            let gap = (eig.value - sum.estimate.mean) / sum.estimate.stderr;
            writeln!(out, "eigenvalue {eig}: sum lies {:.1}σ below it", gap)?;
        } else {
            writeln!(out, "eigenvalue {eig}")?;
        }
    }
    Ok(())
}
