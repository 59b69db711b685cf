//! Deterministic file outputs: CSV tables with 17-significant-digit floats,
//! and a manifest recording config, seed, code version and per-file SHA-256
//! checksums.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::error::{HarnessError, Result};
use crate::scenario::{ConcurrenceSeries, GhzReport, OrbitRow, SelfCheckReport, SweepTable};

/// 17 significant digits: round-trips any f64 exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) => fmt_float(v),
        None => String::new(),
    }
}

pub fn series_csv(series: &ConcurrenceSeries) -> String {
    let mut out = String::new();
    if series.has_diagnostics() {
        out.push_str(
            "step,concurrence,std_error,concurrence_upper,upper_std_error,concurrence_lower,purity\n",
        );
        for r in &series.records {
            let d = r.diagnostics.as_ref();
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{}",
                r.step,
                fmt_float(r.concurrence),
                fmt_float(r.std_error),
                fmt_opt(d.map(|d| d.upper)),
                fmt_opt(d.map(|d| d.upper_std_error)),
                fmt_opt(d.and_then(|d| d.lower)),
                fmt_opt(d.and_then(|d| d.purity)),
            );
        }
    } else {
        out.push_str("step,concurrence,std_error\n");
        for r in &series.records {
            let _ = writeln!(
                out,
                "{},{},{}",
                r.step,
                fmt_float(r.concurrence),
                fmt_float(r.std_error)
            );
        }
    }
    out
}

pub fn sweep_csv(table: &SweepTable) -> String {
    let mut out = String::from(
        "q0,p0,island,c_initial,c_unitary,c_noisy_upper,c_noisy_upper_err,c_noisy_lower\n",
    );
    for r in &table.rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_float(r.q0),
            fmt_float(r.p0),
            u8::from(r.island),
            fmt_float(r.c_initial),
            fmt_float(r.c_unitary),
            fmt_float(r.c_noisy_upper),
            fmt_float(r.c_noisy_upper_err),
            fmt_opt(r.c_noisy_lower),
        );
    }
    out
}

pub fn portrait_csv(rows: &[OrbitRow]) -> String {
    let mut out = String::from("seed_id,step,q,p\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            r.seed_id,
            r.step,
            fmt_float(r.q),
            fmt_float(r.p)
        );
    }
    out
}

pub fn ghz_csv(report: &GhzReport) -> String {
    let mut out = String::from("k,closed_form,from_state,formula_max\n");
    let _ = writeln!(
        out,
        "{},{},{},{}",
        report.k,
        fmt_float(report.closed_form),
        fmt_float(report.from_state),
        fmt_float(report.formula_max)
    );
    out
}

pub fn selfcheck_csv(report: &SelfCheckReport) -> String {
    let mut out = String::from("check,residual,threshold,pass\n");
    for e in &report.entries {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            e.name,
            fmt_float(e.residual),
            fmt_float(e.threshold),
            u8::from(e.pass)
        );
    }
    out
}

pub fn sha256_hex(data: &str) -> String {
    let mut hasher = Sha256::new();
    hasher.update(data.as_bytes());
    let digest = hasher.finalize();
    let mut hex = String::with_capacity(64);
    for byte in digest {
        let _ = write!(hex, "{byte:02x}");
    }
    hex
}

/// Write one output file and return its (name, checksum) manifest entry.
pub fn write_output(dir: &Path, name: &str, content: &str) -> Result<(String, String)> {
    std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let path = dir.join(name);
    std::fs::write(&path, content).map_err(|source| HarnessError::Io { path, source })?;
    Ok((name.to_string(), sha256_hex(content)))
}

/// Manifest: flat TOML with run metadata, the resolved config, and the
/// checksums of every data file in the directory.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    seed: u64,
    config_entries: &[(String, String)],
    files: &[(String, String)],
) -> Result<PathBuf> {
    let mut out = String::new();
    let _ = writeln!(out, "[run]");
    let _ = writeln!(out, "schema = 1");
    let _ = writeln!(out, "command = \"{command}\"");
    let _ = writeln!(out, "version = \"{}\"", env!("CARGO_PKG_VERSION"));
    let _ = writeln!(out, "seed = {seed}");
    let _ = writeln!(out, "\n[config]");
    for (key, value) in config_entries {
        if value.parse::<f64>().is_ok() {
            let _ = writeln!(out, "{key} = {value}");
        } else {
            let _ = writeln!(out, "{key} = \"{value}\"");
        }
    }
    let _ = writeln!(out, "\n[checksums]");
    for (name, hash) in files {
        let _ = writeln!(out, "\"{name}\" = \"sha256:{hash}\"");
    }
    let path = dir.join("manifest.toml");
    std::fs::write(&path, &out).map_err(|source| HarnessError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
