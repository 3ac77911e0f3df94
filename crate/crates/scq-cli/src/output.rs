//! Deterministic CSV/manifest output. CSV files are written atomically
//! (temp + rename) and contain no timestamps, so identical config +
//! version gives byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::CliError;

/// r expressed in dB: r_dB = 20r/ln(10).
pub fn r_db(r: f64) -> f64 {
    20.0 * r / std::f64::consts::LN_10
}

/// Fixed-width scientific notation keeps the files diffable and platform-independent.
pub fn fnum(v: f64) -> String {
    if v == 0.0 {
        "0".into()
    } else {
        format!("{v:.12e}")
    }
}

pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, contents)
        .map_err(|e| CliError::Runtime(format!("writing {}: {e}", tmp.display())))?;
    std::fs::rename(&tmp, path)
        .map_err(|e| CliError::Runtime(format!("renaming to {}: {e}", path.display())))?;
    Ok(())
}

/// Documented header contract for rate-study CSVs. `r_db` trails the
/// stable columns so existing consumers keep their indices.
pub const RATES_HEADER: &str = "alpha_sq,r,kappa_ratio_name,kappa_ratio_value,gamma_bit,gamma_bit_stderr,gamma_phase,gamma_phase_stderr,floor_clipped,r_db";

pub fn rates_csv(rows: &[scq_core::ratelab::StudyRow]) -> String {
    let mut out = String::new();
    out.push_str(RATES_HEADER);
    out.push('\n');
    for row in rows {
        let (gb, gbe, bclip) = match &row.bit {
            Some(f) => (fnum(f.rate), fnum(f.stderr), f.floor_clipped),
            None => (String::new(), String::new(), false),
        };
        let (gp, gpe, pclip) = match &row.phase {
            Some(f) => (fnum(f.rate), fnum(f.stderr), f.floor_clipped),
            None => (String::new(), String::new(), false),
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{gb},{gbe},{gp},{gpe},{},{}",
            fnum(row.alpha_sq),
            fnum(row.r),
            row.knob_name,
            fnum(row.knob_value),
            bclip || pclip,
            fnum(r_db(row.r)),
        );
    }
    out
}

pub struct RunManifest {
    pub command: String,
    pub resolved_config: String,
    pub wall_seconds: f64,
    pub complete: bool,
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<(), CliError> {
        let mut out = String::new();
        let _ = writeln!(out, "command = {:?}", self.command);
        let _ = writeln!(out, "version = {:?}", env!("CARGO_PKG_VERSION"));
        let _ = writeln!(out, "wall_seconds = {:.3}", self.wall_seconds);
        let _ = writeln!(out, "complete = {}", self.complete);
        let _ = writeln!(
            out,
            "outputs = [{}]",
            self.outputs.iter().map(|o| format!("{o:?}")).collect::<Vec<_>>().join(", ")
        );
        let _ = writeln!(out, "\n[resolved_config]");
        // Indented verbatim block rather than nested TOML: the config is
        // already TOML and re-nesting it would mangle table headers.
        let _ = writeln!(out, "text = '''\n{}'''", self.resolved_config);
        write_atomic(&dir.join("manifest.toml"), &out)
    }
}

pub fn ensure_out_dir(dir: &Path) -> Result<PathBuf, CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Runtime(format!("creating {}: {e}", dir.display())))?;
    Ok(dir.to_path_buf())
}
