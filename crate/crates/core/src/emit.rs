//! Result serialization: CSV/JSON rows and plot-ready per-panel files.
//!
//! The CSV schema (format version 1) is one row per
//! (kappa, ensemble size, grid point, scheme), sorted by that tuple, with
//! floats rendered to 9 significant digits. Identical configuration and
//! master seed produce byte-identical files.

use crate::error::{Error, Result};
use crate::experiment::SweepResult;
use crate::protocol::Scheme;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

/// Version of the CSV/JSON row schema and the config schema.
pub const FORMAT_VERSION: u32 = 1;

pub const CSV_HEADER: &str =
    "kappa,ensemble_size,inv_dqm,scheme,d1_mean,d1_se,d2_mean,d2_se,n_states,n_runs,master_seed";

/// One emitted data row.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub kappa: f64,
    pub ensemble_size: usize,
    pub inv_dqm: f64,
    pub scheme: Scheme,
    pub d1_mean: f64,
    pub d1_se: f64,
    pub d2_mean: f64,
    pub d2_se: f64,
    pub n_states: usize,
    pub n_runs: usize,
    pub master_seed: u64,
}

impl Serialize for ResultRow {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut row = serializer.serialize_struct("ResultRow", 11)?;
        row.serialize_field("kappa", &self.kappa)?;
        row.serialize_field("ensemble_size", &self.ensemble_size)?;
        row.serialize_field("inv_dqm", &self.inv_dqm)?;
        row.serialize_field("scheme", self.scheme.as_str())?;
        row.serialize_field("d1_mean", &self.d1_mean)?;
        row.serialize_field("d1_se", &self.d1_se)?;
        row.serialize_field("d2_mean", &self.d2_mean)?;
        row.serialize_field("d2_se", &self.d2_se)?;
        row.serialize_field("n_states", &self.n_states)?;
        row.serialize_field("n_runs", &self.n_runs)?;
        row.serialize_field("master_seed", &self.master_seed)?;
        row.end()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Render a float with 9 significant digits.
pub fn sig9(x: f64) -> String {
    format!("{x:.8e}")
}

/// Flatten a sweep into rows sorted by (kappa, ensemble size, grid point,
/// scheme).
pub fn rows_from_sweep(result: &SweepResult) -> Vec<ResultRow> {
    let cfg = &result.config;
    let mut rows = Vec::with_capacity(2 * result.sizes.len() * cfg.inv_dqm_grid.len());
    for size in &result.sizes {
        for p in &size.points {
            for (scheme, d1_mean, d1_se, d2_mean, d2_se) in [
                (
                    Scheme::WeakSequential,
                    p.d1_weak_mean,
                    p.d1_weak_se,
                    p.d2_weak_mean,
                    p.d2_weak_se,
                ),
                (
                    Scheme::ProjectiveBaseline,
                    p.d1_proj_mean,
                    p.d1_proj_se,
                    p.d2_proj_mean,
                    p.d2_proj_se,
                ),
            ] {
                rows.push(ResultRow {
                    kappa: cfg.kappa,
                    ensemble_size: size.ensemble_size,
                    inv_dqm: p.inv_dqm,
                    scheme,
                    d1_mean,
                    d1_se,
                    d2_mean,
                    d2_se,
                    n_states: cfg.n_states,
                    n_runs: cfg.n_runs,
                    master_seed: cfg.master_seed,
                });
            }
        }
    }
    sort_rows(&mut rows);
    rows
}

fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        a.kappa
            .total_cmp(&b.kappa)
            .then(a.ensemble_size.cmp(&b.ensemble_size))
            .then(a.inv_dqm.total_cmp(&b.inv_dqm))
            .then(a.scheme.as_str().cmp(b.scheme.as_str()))
    });
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{}",
            sig9(r.kappa),
            r.ensemble_size,
            sig9(r.inv_dqm),
            r.scheme,
            sig9(r.d1_mean),
            sig9(r.d1_se),
            sig9(r.d2_mean),
            sig9(r.d2_se),
            r.n_states,
            r.n_runs,
            r.master_seed,
        )?;
    }
    Ok(())
}

pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<()> {
    serde_json::to_writer_pretty(&mut out, rows)
        .map_err(|e| Error::Format(format!("json serialization failed: {e}")))?;
    writeln!(out)?;
    Ok(())
}

/// Write a sweep to `path` in the requested format.
pub fn emit_rows(result: &SweepResult, format: OutputFormat, path: &Path) -> Result<()> {
    let rows = rows_from_sweep(result);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)?;
    }
    let mut out = BufWriter::new(File::create(path)?);
    match format {
        OutputFormat::Csv => write_csv(&rows, &mut out)?,
        OutputFormat::Json => write_json(&rows, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

/// Parse a CSV produced by [`write_csv`].
pub fn parse_csv(text: &str) -> Result<Vec<ResultRow>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(header) if header == CSV_HEADER => {}
        Some(other) => {
            return Err(Error::Format(format!(
                "unexpected header `{other}`; expected `{CSV_HEADER}`"
            )))
        }
        None => return Err(Error::Format("empty file".into())),
    }
    let mut rows = Vec::new();
    for (idx, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Format(format!(
                "row {}: expected 11 fields, found {}",
                idx + 2,
                fields.len()
            )));
        }
        let field = |i: usize| -> &str { fields[i] };
        let bad = |i: usize, what: &str| {
            Error::Format(format!("row {}: bad {what} `{}`", idx + 2, fields[i]))
        };
        rows.push(ResultRow {
            kappa: field(0).parse().map_err(|_| bad(0, "kappa"))?,
            ensemble_size: field(1).parse().map_err(|_| bad(1, "ensemble_size"))?,
            inv_dqm: field(2).parse().map_err(|_| bad(2, "inv_dqm"))?,
            scheme: field(3).parse()?,
            d1_mean: field(4).parse().map_err(|_| bad(4, "d1_mean"))?,
            d1_se: field(5).parse().map_err(|_| bad(5, "d1_se"))?,
            d2_mean: field(6).parse().map_err(|_| bad(6, "d2_mean"))?,
            d2_se: field(7).parse().map_err(|_| bad(7, "d2_se"))?,
            n_states: field(8).parse().map_err(|_| bad(8, "n_states"))?,
            n_runs: field(9).parse().map_err(|_| bad(9, "n_runs"))?,
            master_seed: field(10).parse().map_err(|_| bad(10, "master_seed"))?,
        });
    }
    Ok(rows)
}

pub const PLOT_HEADER: &str = "inv_dqm,d1_weak,d1_proj,d2_weak,d2_proj";

/// Write one plot-ready file per (kappa, ensemble size), pairing the weak
/// and projective means per grid point. Returns the created paths.
/// Rows of one panel keyed by inv_dqm bits: (weak, projective).
type PanelRows<'a> = std::collections::BTreeMap<u64, (Option<&'a ResultRow>, Option<&'a ResultRow>)>;

pub fn write_plot_data(rows: &[ResultRow], out_dir: &Path) -> Result<Vec<PathBuf>> {
    use std::collections::BTreeMap;

    std::fs::create_dir_all(out_dir)?;
    // kappa is finite and positive, so its bit pattern orders like the value
    let mut panels: BTreeMap<(u64, usize), PanelRows> = BTreeMap::new();
    for row in rows {
        let slot = panels
            .entry((row.kappa.to_bits(), row.ensemble_size))
            .or_default()
            .entry(row.inv_dqm.to_bits())
            .or_default();
        match row.scheme {
            Scheme::WeakSequential => slot.0 = Some(row),
            Scheme::ProjectiveBaseline => slot.1 = Some(row),
        }
    }

    let mut paths = Vec::new();
    for ((kappa_bits, size), by_inv) in &panels {
        let kappa = f64::from_bits(*kappa_bits);
        let path = out_dir.join(format!("plot_kappa{kappa}_n{size}.csv"));
        let mut out = BufWriter::new(File::create(&path)?);
        writeln!(out, "{PLOT_HEADER}")?;
        for (inv_bits, (weak, proj)) in by_inv {
            let inv = f64::from_bits(*inv_bits);
            let (weak, proj) = match (weak, proj) {
                (Some(w), Some(p)) => (w, p),
                _ => {
                    return Err(Error::Format(format!(
                        "kappa {kappa}, n {size}, inv_dqm {inv}: missing a scheme"
                    )))
                }
            };
            writeln!(
                out,
                "{},{},{},{},{}",
                sig9(inv),
                sig9(weak.d1_mean),
                sig9(proj.d1_mean),
                sig9(weak.d2_mean),
                sig9(proj.d2_mean),
            )?;
        }
        out.flush()?;
        paths.push(path);
    }
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiment::{run_sweep, ExperimentConfig};

    fn tiny_sweep() -> SweepResult {
        let cfg = ExperimentConfig {
            n_states: 3,
            n_runs: 5,
            ensemble_sizes: vec![8, 6],
            inv_dqm_grid: vec![0.5, 1.5],
            master_seed: 7,
            ..ExperimentConfig::with_kappa(0.9)
        };
        run_sweep(&cfg).unwrap()
    }

    #[test]
    fn row_count_and_order() {
        let rows = rows_from_sweep(&tiny_sweep());
        // 2 sizes x 2 grid points x 2 schemes
        assert_eq!(rows.len(), 8);
        assert_eq!(rows[0].ensemble_size, 6);
        assert_eq!(rows[0].inv_dqm, 0.5);
        assert_eq!(rows[0].scheme, Scheme::ProjectiveBaseline);
        assert_eq!(rows[1].scheme, Scheme::WeakSequential);
        assert_eq!(rows[7].ensemble_size, 8);
        assert_eq!(rows[7].inv_dqm, 1.5);
    }

    #[test]
    fn sig9_gives_nine_significant_digits() {
        assert_eq!(sig9(1.0 / 24.0), "4.16666667e-2");
        assert_eq!(sig9(0.0), "0.00000000e0");
        assert_eq!(sig9(-12345.6789), "-1.23456789e4");
    }

    #[test]
    fn csv_round_trip_preserves_emitted_precision() {
        let rows = rows_from_sweep(&tiny_sweep());
        let mut first = Vec::new();
        write_csv(&rows, &mut first).unwrap();
        let parsed = parse_csv(std::str::from_utf8(&first).unwrap()).unwrap();
        assert_eq!(parsed.len(), rows.len());
        // re-emitting the parsed rows reproduces the bytes exactly
        let mut second = Vec::new();
        write_csv(&parsed, &mut second).unwrap();
        assert_eq!(first, second);
        // integers survive untouched
        for (a, b) in rows.iter().zip(&parsed) {
            assert_eq!(a.ensemble_size, b.ensemble_size);
            assert_eq!(a.master_seed, b.master_seed);
            assert_eq!(a.scheme, b.scheme);
        }
    }

    #[test]
    fn emitting_twice_is_byte_identical() {
        let sweep = tiny_sweep();
        let rows = rows_from_sweep(&sweep);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_csv(&rows, &mut a).unwrap();
        write_csv(&rows_from_sweep(&sweep), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn json_mirrors_the_same_fields() {
        let rows = rows_from_sweep(&tiny_sweep());
        let mut buf = Vec::new();
        write_json(&rows, &mut buf).unwrap();
        let value: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        let arr = value.as_array().unwrap();
        assert_eq!(arr.len(), rows.len());
        let first = &arr[0];
        for key in [
            "kappa",
            "ensemble_size",
            "inv_dqm",
            "scheme",
            "d1_mean",
            "d1_se",
            "d2_mean",
            "d2_se",
            "n_states",
            "n_runs",
            "master_seed",
        ] {
            assert!(first.get(key).is_some(), "missing key {key}");
        }
        assert_eq!(first["scheme"], "projective");
    }

    #[test]
    fn parse_csv_rejects_malformed_input() {
        assert!(parse_csv("").is_err());
        assert!(parse_csv("not,the,header\n").is_err());
        let bad_row = format!("{CSV_HEADER}\n1.0,6,oops\n");
        assert!(parse_csv(&bad_row).is_err());
        let bad_scheme = format!("{CSV_HEADER}\n1.0,6,0.5,sideways,0,0,0,0,1,1,7\n");
        assert!(parse_csv(&bad_scheme).is_err());
    }

    #[test]
    fn plot_data_writes_one_file_per_panel() {
        let dir = std::env::temp_dir().join(format!("gaussest-plot-{}", std::process::id()));
        let rows = rows_from_sweep(&tiny_sweep());
        let paths = write_plot_data(&rows, &dir).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths[0].file_name().unwrap().to_str().unwrap().contains("kappa0.9"));
        let text = std::fs::read_to_string(&paths[0]).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(PLOT_HEADER));
        assert_eq!(lines.count(), 2); // one per grid point
        std::fs::remove_dir_all(&dir).ok();
    }
}
