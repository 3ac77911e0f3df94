//! Bundled desk-scale figure reproductions. Each figure id maps to a
//! reduced grid (documented here, next to the grid itself), runs the
//! matching study, and writes a pass/fail check file evaluating the
//! figure's headline property.

use std::fmt::Write as _;
use std::path::Path;

use scq_core::ratelab::{study, Measure, Scenario, StudyGrid, StudyOptions, StudyRow};
use scq_core::states::CodeParams;
use scq_core::zgate::{pz_model, simulate_gate, GateOptions};

use crate::commands;
use crate::config::{RatesConfig, ZgateConfig};
use crate::output::{fnum, write_atomic};
use crate::CliError;

pub const FIGURES: [&str; 5] = ["fig1", "fig2", "fig3", "fig4", "fig5"];

struct Check {
    lines: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { lines: Vec::new() }
    }
    fn assert(&mut self, ok: bool, what: &str) {
        self.lines.push(format!("{}: {what}", if ok { "PASS" } else { "FAIL" }));
    }
    fn write(&self, out: &Path, name: &str) -> Result<bool, CliError> {
        write_atomic(&out.join(name), &(self.lines.join("\n") + "\n"))?;
        Ok(self.lines.iter().all(|l| l.starts_with("PASS")))
    }
}

fn bit_rate(rows: &[StudyRow], alpha_sq: f64, r: f64, knob: f64) -> Option<f64> {
    rows.iter()
        .find(|row| {
            (row.alpha_sq - alpha_sq).abs() < 1e-12
                && (row.r - r).abs() < 1e-12
                && (row.knob_value - knob).abs() < 1e-12 * knob.max(1.0)
        })
        .and_then(|row| row.bit.as_ref())
        .filter(|fit| !fit.floor_clipped)
        .map(|fit| fit.rate)
}

fn rates_rows(cfg: &RatesConfig, out: &Path, plot: bool) -> Result<Vec<StudyRow>, CliError> {
    // Re-run through the library (not the CSV) so checks see full precision;
    // run_rates writes the artifact files.
    commands::run_rates(cfg, out, plot)?;
    let scenario = match cfg.scenario.as_str() {
        "loss" => Scenario::Loss,
        "dephasing" => Scenario::Dephasing { kappa_minus: cfg.kappa_minus.unwrap() },
        "gain" => Scenario::Gain { kappa1: cfg.kappa1.unwrap() },
        "kerr" => Scenario::Kerr { kappa_minus: cfg.kappa_minus.unwrap() },
        _ => unreachable!("validated by run_rates"),
    };
    let grid = StudyGrid { alpha_sq: cfg.alpha_sq.clone(), r: cfg.r.clone(), knob: cfg.knob.clone() };
    let opts = StudyOptions {
        rel_tol: cfg.rel_tol,
        abs_tol: cfg.abs_tol,
        sample_count: cfg.sample_count,
        t_max: cfg.t_max,
        measure: match cfg.measure.as_str() {
            "bit" => Measure::BitOnly,
            "phase" => Measure::PhaseOnly,
            _ => Measure::Both,
        },
        ..Default::default()
    };
    study(scenario, &grid, &opts).map_err(|e| CliError::Runtime(e.to_string()))
}

fn loss_cfg(alpha_sq: Vec<f64>, r: Vec<f64>, knob: Vec<f64>, measure: &str) -> RatesConfig {
    RatesConfig {
        scenario: "loss".into(),
        alpha_sq,
        r,
        knob,
        kappa_minus: None,
        kappa1: None,
        measure: measure.into(),
        rel_tol: 1e-6,
        abs_tol: 1e-10,
        sample_count: 240,
        t_max: 2000.0,
    }
}

/// Fig. 1(b): bit-flip suppression improves with squeezing at κ₋/κ₂ = 1e−3.
fn fig1(out: &Path, plot: bool) -> Result<bool, CliError> {
    let cfg = loss_cfg(vec![2.0, 2.5, 3.0], vec![0.0, 0.2, 0.35], vec![1e-3], "bit");
    let rows = rates_rows(&cfg, out, plot)?;
    let mut check = Check::new();
    for &alpha_sq in &[2.0, 2.5, 3.0] {
        let gammas: Vec<Option<f64>> =
            [0.0, 0.2, 0.35].iter().map(|&r| bit_rate(&rows, alpha_sq, r, 1e-3)).collect();
        let mono = gammas.windows(2).all(|w| match (w[0], w[1]) {
            (Some(a), Some(b)) => b < a,
            // A clipped (unmeasurably small) rate after a measured one
            // still demonstrates the suppression.
            (Some(_), None) => true,
            _ => false,
        });
        check.assert(
            mono,
            &format!(
                "Γ_bit strictly decreasing in r at α²={alpha_sq} ({})",
                gammas
                    .iter()
                    .map(|g| g.map_or("<floor".into(), fnum))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        );
    }
    check.write(out, "check_fig1.txt")
}

/// Fig. 2: dephasing-induced bit flips grow with κ_φ and dominate loss
/// above κ_φ/κ₋ ≈ 1e−2.
fn fig2(out: &Path, plot: bool) -> Result<bool, CliError> {
    let mut cfg = loss_cfg(vec![2.0], vec![0.0, 0.35], vec![5e-5, 5e-4, 5e-3], "bit");
    cfg.scenario = "dephasing".into();
    cfg.kappa_minus = Some(5e-3);
    let rows = rates_rows(&cfg, out, plot)?;
    let mut check = Check::new();
    for &r in &[0.0, 0.35] {
        let lo = bit_rate(&rows, 2.0, r, 5e-5);
        let hi = bit_rate(&rows, 2.0, r, 5e-4);
        let ok = matches!((lo, hi), (Some(a), Some(b)) if b >= 2.0 * a);
        check.assert(ok, &format!("≥2× Γ_bit increase across κ_φ/κ₋ ∈ [1e−2, 1e−1] at r={r}"));
    }
    check.write(out, "check_fig2.txt")
}

/// Fig. 3: thermal-gain-induced bit flips; squeezing delays the n_th
/// transition point.
fn fig3(out: &Path, plot: bool) -> Result<bool, CliError> {
    let mut cfg = loss_cfg(vec![2.0], vec![0.0, 0.3], vec![0.0, 1e-2, 1e-1], "bit");
    cfg.scenario = "gain".into();
    cfg.kappa1 = Some(1e-3);
    let rows = rates_rows(&cfg, out, plot)?;
    let mut check = Check::new();
    let ratio = |r: f64| -> Option<f64> {
        Some(bit_rate(&rows, 2.0, r, 1e-2)? / bit_rate(&rows, 2.0, r, 0.0)?)
    };
    match (ratio(0.0), ratio(0.3)) {
        (Some(plain), Some(squeezed)) => {
            check.assert(
                squeezed < plain,
                &format!("n_th sensitivity reduced by squeezing ({} < {})", fnum(squeezed), fnum(plain)),
            );
        }
        _ => check.assert(false, "n_th sensitivity ratios computable (a rate was clipped)"),
    }
    check.write(out, "check_fig3.txt")
}

/// Fig. 4: Kerr crossover — squeezing loses its advantage above some K*.
fn fig4(out: &Path, plot: bool) -> Result<bool, CliError> {
    let mut cfg = loss_cfg(vec![3.0], vec![0.0, 0.35], vec![1e-3, 1e-2, 1e-1], "bit");
    cfg.scenario = "kerr".into();
    cfg.kappa_minus = Some(1e-3);
    let rows = rates_rows(&cfg, out, plot)?;
    let mut check = Check::new();
    let advantage_lost = |k: f64| -> Option<bool> {
        Some(bit_rate(&rows, 3.0, 0.35, k)? >= bit_rate(&rows, 3.0, 0.0, k)?)
    };
    let at_min = advantage_lost(1e-3);
    let anywhere = [1e-3, 1e-2, 1e-1].iter().any(|&k| advantage_lost(k) == Some(true));
    check.assert(
        at_min == Some(false),
        "squeezing advantage holds at K/κ₂ = 1e−3",
    );
    check.assert(anywhere, "crossover K* exists within K/κ₂ ∈ [1e−3, 1e−1]");
    check.write(out, "check_fig4.txt")
}

/// Fig. 5: p_Z(T) for the dissipative Z gate at α² = 4 with the Eq.-(28)
/// model overlay.
fn fig5(out: &Path, plot: bool) -> Result<bool, CliError> {
    let cfg = ZgateConfig {
        alpha_sq: vec![4.0],
        r: vec![0.0, 0.2, 0.35],
        t_gate: vec![0.3, 0.6, 1.0, 1.7, 3.0],
        kappa_minus: 0.0,
        theta: std::f64::consts::PI,
        rel_tol: 1e-8,
        abs_tol: 1e-12,
    };
    commands::run_zgate(&cfg, out, plot)?;
    let mut check = Check::new();
    let opts = GateOptions { rel_tol: cfg.rel_tol, abs_tol: cfg.abs_tol, ..Default::default() };
    let noise = scq_core::lindblad::NoiseParams::new(1.0, 0.0, 0.0, 0.0, 0.0)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    for &r in &[0.0, 0.2] {
        let code = CodeParams::real(2.0, r).map_err(|e| CliError::Runtime(e.to_string()))?;
        let mut worst: f64 = 0.0;
        for &t in &cfg.t_gate {
            let res = simulate_gate(&code, &noise, cfg.theta, t, &opts)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            let model = pz_model(&code, 0.0, 1.0, t);
            worst = worst.max((res.p_z / model - 1.0).abs());
        }
        check.assert(
            worst < 0.2,
            &format!("p_Z within 20% of the non-adiabatic model at r={r} (worst {})", fnum(worst)),
        );
    }
    check.write(out, "check_fig5.txt")
}

pub fn run(figure: &str, out: &Path, plot: bool) -> Result<Vec<String>, CliError> {
    let all_pass = match figure {
        "fig1" => fig1(out, plot)?,
        "fig2" => fig2(out, plot)?,
        "fig3" => fig3(out, plot)?,
        "fig4" => fig4(out, plot)?,
        "fig5" => fig5(out, plot)?,
        other => {
            return Err(CliError::Config(format!(
                "unknown figure id {other:?}; expected one of {}",
                FIGURES.join(", ")
            )))
        }
    };
    let mut outputs: Vec<String> = std::fs::read_dir(out)
        .map_err(|e| CliError::Runtime(e.to_string()))?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n != "manifest.toml")
        .collect();
    outputs.sort();
    if !all_pass {
        let mut msg = String::new();
        let _ = write!(msg, "{figure} checks failed; see check_{figure}.txt in {}", out.display());
        return Err(CliError::Runtime(msg));
    }
    Ok(outputs)
}
