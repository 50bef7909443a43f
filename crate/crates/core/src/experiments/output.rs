//! CSV and newline-delimited JSON writers.
//!
//! Both formats start with a header naming the tool version, the command,
//! the effective configuration and every ensemble involved. CSV carries it
//! as `#` comment lines ahead of the column header; NDJSON as a first
//! record of kind `meta`. Floats are printed in shortest round-trip form,
//! so equal inputs give byte-identical files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::Format;
use super::localize::LocalizationReport;
use super::sweep::SweepResult;
use super::verify::VerificationReport;
use super::{spec_tag, MonteCarloSummary, VERSION};
use crate::density::DensityProfile;
use crate::ensemble::EnsembleSpec;
use crate::error::{Error, Result};
use crate::rootcount::RootCountSample;

/// What produced a file.
#[derive(Clone, Debug)]
pub struct Header {
    pub command: String,
    pub config: Value,
    pub specs: Vec<EnsembleSpec>,
}

impl Header {
    pub fn new(command: &str, config: &impl Serialize, specs: Vec<EnsembleSpec>) -> Self {
        Header {
            command: command.to_string(),
            config: serde_json::to_value(config).unwrap_or(Value::Null),
            specs,
        }
    }
}

/// Rows of one output file.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    fn new(name: impl Into<String>, columns: &[&'static str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn cell_text(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn render_csv(header: &Header, table: &Table) -> Result<String> {
    let mut out = String::new();
    out.push_str(&format!("# randpoly {VERSION}\n"));
    out.push_str(&format!("# command: {}\n", header.command));
    out.push_str(&format!("# config: {}\n", header.config));
    for s in &header.specs {
        out.push_str(&format!("# spec: {}\n", json!(s)));
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&table.columns).map_err(csv_error)?;
    for row in &table.rows {
        w.write_record(row.iter().map(cell_text))
            .map_err(csv_error)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    out.push_str(&String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))?);
    Ok(out)
}

pub fn render_ndjson(header: &Header, table: &Table) -> String {
    let meta = json!({
        "record": "meta",
        "table": table.name,
        "version": VERSION,
        "command": header.command,
        "config": header.config,
        "specs": header.specs,
    });
    let mut out = format!("{meta}\n");
    for row in &table.rows {
        let mut obj = Map::new();
        obj.insert("record".into(), Value::String(table.name.clone()));
        for (c, v) in table.columns.iter().zip(row) {
            obj.insert((*c).to_string(), v.clone());
        }
        out.push_str(&Value::Object(obj).to_string());
        out.push('\n');
    }
    out
}

/// Writes `table` to `dir/<name>.csv` or `dir/<name>.ndjson`.
pub fn write_table(dir: &Path, header: &Header, table: &Table, format: Format) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let (path, text) = match format {
        Format::Csv => (
            dir.join(format!("{}.csv", table.name)),
            render_csv(header, table)?,
        ),
        Format::Json => (
            dir.join(format!("{}.ndjson", table.name)),
            render_ndjson(header, table),
        ),
    };
    fs::write(&path, text)?;
    Ok(path)
}

fn profile_columns(spec: &EnsembleSpec) -> [Value; 3] {
    use crate::ensemble::Profile;
    let (kind, param) = match spec.profile {
        Profile::Alpha { alpha } => ("alpha", json!(alpha)),
        Profile::Mu { mu } => ("mu", json!(mu)),
        Profile::Weyl => ("weyl", Value::Null),
        Profile::Kac => ("kac", Value::Null),
    };
    [json!(kind), param, json!(spec.degree)]
}

pub fn density_table(profile: &DensityProfile) -> Table {
    let mut t = Table::new(
        format!("density_{}", spec_tag(&profile.spec)),
        &["coordinate", "coord", "value", "method"],
    );
    let coordinate = serde_json::to_value(profile.coordinate).unwrap_or(Value::Null);
    for &(c, v) in &profile.points {
        t.push(vec![
            coordinate.clone(),
            json!(c),
            json!(v),
            json!(profile.method.to_string()),
        ]);
    }
    t
}

pub fn count_table(spec: &EnsembleSpec, samples: &[RootCountSample]) -> Table {
    let mut t = Table::new(
        format!("count_{}", spec_tag(spec)),
        &[
            "seed",
            "total",
            "positive",
            "negative",
            "refinement_depth",
            "uncertified_cells",
            "nudged",
            "escalated",
            "degree_reduced",
            "zero_root",
        ],
    );
    for s in samples {
        t.push(vec![
            json!(s.seed),
            json!(s.total_count),
            json!(s.positive_count),
            json!(s.negative_count),
            json!(s.refinement_depth_used),
            json!(s.uncertified_cells),
            json!(s.flags.nudged),
            json!(s.flags.escalated_to_oracle),
            json!(s.flags.degree_reduced),
            json!(s.flags.zero_root),
        ]);
    }
    t
}

pub fn count_summary_table(rows: &[(EnsembleSpec, MonteCarloSummary)]) -> Table {
    let mut t = Table::new(
        "count_summary",
        &[
            "profile",
            "param",
            "n",
            "mean",
            "stderr",
            "seeds_used",
            "escalated",
            "uncertified",
        ],
    );
    for (spec, s) in rows {
        let mut row = profile_columns(spec).to_vec();
        row.extend([
            json!(s.mean),
            json!(s.stderr),
            json!(s.seeds_used),
            json!(s.escalated),
            json!(s.uncertified),
        ]);
        t.push(row);
    }
    t
}

pub fn sweep_tables(result: &SweepResult) -> Vec<Table> {
    let mut cells = Table::new(
        "sweep",
        &[
            "profile",
            "param",
            "n",
            "quadrature",
            "quadrature_error",
            "mc_mean",
            "mc_stderr",
            "seeds_used",
            "skip_reason",
            "errors",
        ],
    );
    for c in &result.cells {
        let mut row = profile_columns(&c.spec).to_vec();
        let mc = c.monte_carlo.as_ref();
        row.extend([
            json!(c.quadrature),
            json!(c.quadrature_error),
            json!(mc.map(|m| m.mean)),
            json!(mc.map(|m| m.stderr)),
            json!(mc.map_or(0, |m| m.seeds_used)),
            json!(c.skip_reason),
            if c.errors.is_empty() {
                Value::Null
            } else {
                json!(c.errors.join("; "))
            },
        ]);
        cells.push(row);
    }

    let mut fits = Table::new(
        "fits",
        &[
            "profile",
            "param",
            "law",
            "min_n",
            "degrees",
            "slope",
            "intercept",
            "exponent",
            "amplitude",
            "offset",
            "loglog_exponent",
            "loglog_amplitude",
            "last_fraction",
        ],
    );
    for f in &result.fits {
        let spec = EnsembleSpec {
            profile: f.profile,
            degree: 0,
        };
        let [kind, param, _] = profile_columns(&spec);
        let degrees = f
            .degrees
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(" ");
        fits.push(vec![
            kind,
            param,
            json!(f.law),
            json!(f.min_n),
            json!(degrees),
            json!(f.line.map(|l| l.slope)),
            json!(f.line.map(|l| l.intercept)),
            json!(f.power.map(|p| p.exponent)),
            json!(f.power.map(|p| p.amplitude)),
            json!(f.power.map(|p| p.offset)),
            json!(f.power_loglog.map(|p| p.exponent)),
            json!(f.power_loglog.map(|p| p.amplitude)),
            json!(f.fractions.last()),
        ]);
    }
    vec![cells, fits]
}

/// Per-cell wallclock times, kept apart from the deterministic outputs.
pub fn write_timings(dir: &Path, result: &SweepResult) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let entries: Vec<Value> = result
        .timings()
        .into_iter()
        .map(|(spec, secs)| json!({ "spec": spec, "seconds": secs }))
        .collect();
    let path = dir.join("timings.json");
    let text = serde_json::to_string_pretty(&entries).map_err(|e| Error::Io(e.to_string()))?;
    fs::write(&path, text + "\n")?;
    Ok(path)
}

pub fn localization_tables(report: &LocalizationReport) -> Vec<Table> {
    let tag = spec_tag(&report.spec);
    let mut occ = Table::new(
        format!("localize_{tag}"),
        &[
            "k",
            "logx_lo",
            "logx_hi",
            "mean_occupancy",
            "stderr",
            "expected",
            "draws",
        ],
    );
    let mut hist = Table::new(format!("histogram_{tag}"), &["k", "occupancy", "draws"]);
    for o in &report.intervals {
        occ.push(vec![
            json!(o.k),
            json!(o.logx_lo),
            json!(o.logx_hi),
            json!(o.mean),
            json!(o.stderr),
            json!(o.expected),
            json!(report.seeds_used),
        ]);
        for (j, &count) in o.histogram.iter().enumerate() {
            hist.push(vec![json!(o.k), json!(j), json!(count)]);
        }
    }
    let mut signs = Table::new(format!("signs_{tag}"), &["m", "agreement_rate", "resolved"]);
    for s in &report.sign_agreement {
        signs.push(vec![json!(s.m), json!(s.rate), json!(s.resolved)]);
    }
    vec![occ, hist, signs]
}

pub fn verification_tables(report: &VerificationReport) -> Vec<Table> {
    let mut checks = Table::new(
        "verify",
        &["check", "passed", "measured", "tolerance", "detail"],
    );
    for c in &report.checks {
        checks.push(vec![
            json!(c.name),
            json!(c.passed),
            json!(c.measured),
            json!(c.tolerance),
            json!(c.detail),
        ]);
    }
    let mut disc = Table::new(
        "discrepancies",
        &["seed", "profile", "param", "n", "scan_count", "exact_count"],
    );
    for d in &report.oracle.discrepancies {
        let mut row = vec![json!(d.seed)];
        row.extend(profile_columns(&d.spec));
        row.extend([json!(d.scan_count), json!(d.exact_count)]);
        disc.push(row);
    }
    vec![checks, disc]
}
