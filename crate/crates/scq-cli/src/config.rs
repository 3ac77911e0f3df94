//! Versioned TOML config schema. Unknown keys are hard errors: sweeps are
//! expensive and a silently ignored typo can waste hours.

use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub schema_version: u32,
    #[serde(default)]
    pub rates: Option<RatesConfig>,
    #[serde(default)]
    pub zgate: Option<ZgateConfig>,
    #[serde(default)]
    pub prep: Option<PrepConfig>,
    #[serde(default)]
    pub circuit: Option<CircuitConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RatesConfig {
    /// One of "loss", "dephasing", "gain", "kerr".
    pub scenario: String,
    pub alpha_sq: Vec<f64>,
    pub r: Vec<f64>,
    /// Swept rate in κ₂ units: κ₋ (loss), κ_φ (dephasing), n_th (gain), K (kerr).
    pub knob: Vec<f64>,
    /// Fixed loss κ₋/κ₂ for the dephasing and kerr scenarios.
    #[serde(default)]
    pub kappa_minus: Option<f64>,
    /// Fixed κ₁/κ₂ for the gain scenario.
    #[serde(default)]
    pub kappa1: Option<f64>,
    /// One of "both", "bit", "phase".
    #[serde(default = "default_measure")]
    pub measure: String,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_sample_count")]
    pub sample_count: usize,
    /// Hard cap on any single evolution horizon, in 1/κ₂.
    #[serde(default = "default_t_max")]
    pub t_max: f64,
}

fn default_measure() -> String {
    "both".into()
}
fn default_rel_tol() -> f64 {
    1e-6
}
fn default_abs_tol() -> f64 {
    1e-10
}
fn default_sample_count() -> usize {
    240
}
fn default_t_max() -> f64 {
    2000.0
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ZgateConfig {
    pub alpha_sq: Vec<f64>,
    pub r: Vec<f64>,
    /// Gate times in 1/κ₂.
    pub t_gate: Vec<f64>,
    /// Loss κ₋/κ₂ during the gate.
    #[serde(default)]
    pub kappa_minus: f64,
    /// Rotation angle; defaults to π.
    #[serde(default = "default_theta")]
    pub theta: f64,
    #[serde(default = "default_gate_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_gate_abs_tol")]
    pub abs_tol: f64,
}

fn default_theta() -> f64 {
    std::f64::consts::PI
}
fn default_gate_rel_tol() -> f64 {
    1e-8
}
fn default_gate_abs_tol() -> f64 {
    1e-12
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PrepConfig {
    /// Dark-operator coefficient ratio μ₀/μ₁ (μ₁ is fixed to 1).
    pub mu0_over_mu1: f64,
    /// ν/μ₁; sets the prepared cat amplitude.
    pub nu_over_mu1: f64,
    pub r: f64,
    #[serde(default)]
    pub phi: f64,
    /// Horizon in units of 1/κ (κ is the engineered dissipation rate).
    pub t_final: f64,
    /// Initial states: any of "vacuum", "fock1", "thermal".
    pub initial: Vec<String>,
    /// Thermal occupation for the "thermal" initial state.
    #[serde(default = "default_n_th")]
    pub n_th: f64,
    #[serde(default = "default_prep_samples")]
    pub sample_count: usize,
    /// Optional anneal stage: evolve with μ₀ = μ₁ for this long before the
    /// main μ₀. Drains the slowly decaying odd near-dark state, which
    /// otherwise escapes only at rate ≈ (0.78 μ₀)²κ.
    #[serde(default)]
    pub anneal_t: Option<f64>,
}

fn default_n_th() -> f64 {
    0.2
}
fn default_prep_samples() -> usize {
    64
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitConfig {
    pub alpha_sq: f64,
    pub r: f64,
    pub g3: f64,
    pub kappa_w: f64,
    pub e_j: f64,
    pub lambda: f64,
    pub omega_a: f64,
    pub omega_w: f64,
    pub phi_a: f64,
    pub phi_c: f64,
    pub phi_w: f64,
    #[serde(default)]
    pub eta: f64,
    /// Also run the two-mode vs effective-model validation (slower).
    #[serde(default)]
    pub two_mode: bool,
}

pub fn load(path: &std::path::Path) -> Result<Config, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    let cfg: Config =
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    if cfg.schema_version != SCHEMA_VERSION {
        return Err(CliError::Config(format!(
            "schema_version {} unsupported; this build expects {SCHEMA_VERSION}",
            cfg.schema_version
        )));
    }
    Ok(cfg)
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(CliError::Config(format!("{name} must be > 0 and finite, got {v}")));
    }
    Ok(())
}

fn non_negative(name: &str, v: f64) -> Result<(), CliError> {
    if !(v >= 0.0 && v.is_finite()) {
        return Err(CliError::Config(format!("{name} must be ≥ 0 and finite, got {v}")));
    }
    Ok(())
}

fn non_empty<T>(name: &str, v: &[T]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(CliError::Config(format!("{name} must not be empty")));
    }
    Ok(())
}

impl RatesConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        non_empty("rates.alpha_sq", &self.alpha_sq)?;
        non_empty("rates.r", &self.r)?;
        non_empty("rates.knob", &self.knob)?;
        for &a in &self.alpha_sq {
            positive("rates.alpha_sq", a)?;
        }
        for &r in &self.r {
            non_negative("rates.r", r)?;
        }
        for &k in &self.knob {
            non_negative("rates.knob", k)?;
        }
        match self.scenario.as_str() {
            "loss" => {}
            "dephasing" | "kerr" => {
                let km = self.kappa_minus.ok_or_else(|| {
                    CliError::Config(format!(
                        "rates.kappa_minus is required for the {} scenario",
                        self.scenario
                    ))
                })?;
                non_negative("rates.kappa_minus", km)?;
            }
            "gain" => {
                let k1 = self.kappa1.ok_or_else(|| {
                    CliError::Config("rates.kappa1 is required for the gain scenario".into())
                })?;
                non_negative("rates.kappa1", k1)?;
            }
            other => {
                return Err(CliError::Config(format!(
                    "rates.scenario must be loss|dephasing|gain|kerr, got {other:?}"
                )))
            }
        }
        match self.measure.as_str() {
            "both" | "bit" | "phase" => {}
            other => {
                return Err(CliError::Config(format!(
                    "rates.measure must be both|bit|phase, got {other:?}"
                )))
            }
        }
        positive("rates.rel_tol", self.rel_tol)?;
        positive("rates.abs_tol", self.abs_tol)?;
        positive("rates.t_max", self.t_max)?;
        if self.sample_count < 16 {
            return Err(CliError::Config("rates.sample_count must be ≥ 16".into()));
        }
        Ok(())
    }
}

impl ZgateConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        non_empty("zgate.alpha_sq", &self.alpha_sq)?;
        non_empty("zgate.r", &self.r)?;
        non_empty("zgate.t_gate", &self.t_gate)?;
        for &a in &self.alpha_sq {
            positive("zgate.alpha_sq", a)?;
        }
        for &r in &self.r {
            non_negative("zgate.r", r)?;
        }
        for &t in &self.t_gate {
            positive("zgate.t_gate", t)?;
        }
        non_negative("zgate.kappa_minus", self.kappa_minus)?;
        positive("zgate.theta", self.theta)?;
        Ok(())
    }
}

impl PrepConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("prep.mu0_over_mu1", self.mu0_over_mu1)?;
        positive("prep.nu_over_mu1", self.nu_over_mu1)?;
        non_negative("prep.r", self.r)?;
        positive("prep.t_final", self.t_final)?;
        non_negative("prep.n_th", self.n_th)?;
        if let Some(t) = self.anneal_t {
            positive("prep.anneal_t", t)?;
        }
        non_empty("prep.initial", &self.initial)?;
        for s in &self.initial {
            if !matches!(s.as_str(), "vacuum" | "fock1" | "thermal") {
                return Err(CliError::Config(format!(
                    "prep.initial entries must be vacuum|fock1|thermal, got {s:?}"
                )));
            }
        }
        Ok(())
    }
}

impl CircuitConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        positive("circuit.alpha_sq", self.alpha_sq)?;
        non_negative("circuit.r", self.r)?;
        // Field-level physical constraints are re-checked by the library;
        // this catches them early with the config's field names.
        positive("circuit.g3", self.g3)?;
        positive("circuit.kappa_w", self.kappa_w)?;
        positive("circuit.e_j", self.e_j)?;
        positive("circuit.omega_a", self.omega_a)?;
        positive("circuit.omega_w", self.omega_w)?;
        if !(0.0..0.3).contains(&self.lambda) {
            return Err(CliError::Config(format!(
                "circuit.lambda must be in [0, 0.3), got {}",
                self.lambda
            )));
        }
        if self.eta.abs() >= 1.0 {
            return Err(CliError::Config(format!("circuit.eta must satisfy |η| < 1, got {}", self.eta)));
        }
        Ok(())
    }
}
