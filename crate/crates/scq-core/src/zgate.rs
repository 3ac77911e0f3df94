//! Dissipative Z(θ) gate: a resonant drive ε_Z(a† + a) on top of the
//! two-photon confinement rotates the logical qubit around Z. Phase errors
//! combine the loss contribution κ₋|α|²T with a non-adiabatic part that
//! shrinks as e^{−4r} [Eqs. (26)–(29)].

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::fock::{annihilation, DensityMatrix, FockSpace};
use crate::lindblad::{build_master_equation, evolve, EvolutionConfig, NoiseParams};
use crate::observables::{logical_z, parity_jx};
use crate::states::{logical_basis, squeezed_cat, CodeParams, Parity};
use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct GateResult {
    pub theta: f64,
    /// Gate time in 1/κ₂.
    pub t_gate: f64,
    /// Phase-flip probability, from |+̄⟩ via p_Z = (1 + ⟨σ_X⟩)/2 after θ = π.
    pub p_z: f64,
    /// Bit-flip probability, from |0̄⟩ via p_X = (1 − ⟨σ_Z⟩)/2.
    pub p_x: f64,
    /// Drive amplitude in κ₂ units.
    pub epsilon_z: f64,
    pub warnings: Vec<String>,
}

/// ε_Z = θ / (4 Re(α) T) [Eq. (26)]; independent of r.
pub fn drive_amplitude(theta: f64, alpha: f64, t_gate: f64) -> Result<f64> {
    if alpha <= 0.0 || t_gate <= 0.0 {
        return Err(Error::InvalidParams(format!(
            "drive_amplitude needs alpha > 0 and t_gate > 0, got {alpha}, {t_gate}"
        )));
    }
    Ok(theta / (4.0 * alpha * t_gate))
}

/// p_Z(T) = κ₋|α|²T + π²e^{−4r}/(16|α|⁴κ₂T) [Eqs. (27)–(28)].
pub fn pz_model(code: &CodeParams, kappa_minus: f64, kappa2: f64, t_gate: f64) -> f64 {
    let alpha_sq = code.alpha.norm_sqr();
    let non_adiabatic = std::f64::consts::PI.powi(2) * (-4.0 * code.r).exp()
        / (16.0 * alpha_sq.powi(2) * kappa2 * t_gate);
    kappa_minus * alpha_sq * t_gate + non_adiabatic
}

/// T_opt = π e^{−2r} / (4|α|³ √(κ₋κ₂)) [Eq. (29)], the minimizer of
/// [`pz_model`] in T.
pub fn t_opt(code: &CodeParams, kappa_minus: f64, kappa2: f64) -> Result<f64> {
    if kappa_minus <= 0.0 {
        return Err(Error::InvalidParams(
            "t_opt diverges at kappa_minus = 0 (pure non-adiabatic error has no finite optimum)".into(),
        ));
    }
    let alpha = code.alpha.norm();
    Ok(std::f64::consts::PI * (-2.0 * code.r).exp()
        / (4.0 * alpha.powi(3) * (kappa_minus * kappa2).sqrt()))
}

/// Golden-section minimizer, used to cross-check [`t_opt`] against
/// [`pz_model`].
pub fn golden_section_minimum(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let inv_phi = (5.0f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol * (a.abs() + b.abs()).max(1.0) {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

#[derive(Clone, Copy, Debug)]
pub struct GateOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub sample_count: usize,
    pub q_max: usize,
}

impl Default for GateOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, sample_count: 24, q_max: 32 }
    }
}

/// Simulate the Z(θ) gate twice — from |+̄⟩ = |C+⟩ for p_Z, from |0̄⟩ for
/// p_X — under H = ε_Z(a† + a) plus the confinement and loss channels.
pub fn simulate_gate(
    code: &CodeParams,
    noise: &NoiseParams,
    theta: f64,
    t_gate: f64,
    opts: &GateOptions,
) -> Result<GateResult> {
    let alpha = code.alpha.re;
    if code.alpha.im.abs() > 1e-12 * code.alpha.norm().max(1.0) {
        return Err(Error::InvalidParams("simulate_gate requires real α".into()));
    }
    let epsilon_z = if theta == 0.0 { 0.0 } else { drive_amplitude(theta, alpha, t_gate)? };
    let mut warnings = Vec::new();
    if epsilon_z / noise.kappa2 > 0.3 {
        warnings.push(format!(
            "drive ε_Z/κ₂ = {:.3} exceeds 0.3; the adiabatic model is unreliable here",
            epsilon_z / noise.kappa2
        ));
    }

    let space = FockSpace::new(FockSpace::required_dim(code.n_bar_confinement()))?;
    let a = annihilation(space);
    let drive = a.dagger().add(&a).scale(C64::new(epsilon_z, 0.0));
    let me = build_master_equation(space, code, noise, Some(&drive))?;

    let config = EvolutionConfig::new(t_gate, opts.sample_count, opts.rel_tol, opts.abs_tol)?;

    // Run 1: |+̄⟩ = |C+⟩, read ⟨σ_X⟩ = ⟨J_x⟩ at T.
    let plus = squeezed_cat(space, code, Parity::Even)?;
    let mut obs = BTreeMap::new();
    obs.insert("jx".to_string(), parity_jx(space));
    let traj_x = evolve(&me, &DensityMatrix::pure(&plus.ket), &config, &obs)?;
    let sigma_x = *traj_x.observable("jx").unwrap().last().unwrap();
    let p_z = (1.0 + sigma_x) / 2.0;

    // Run 2: |0̄⟩, read ⟨σ_Z⟩ = ⟨J_z⟩ at T.
    let (zero, _) = logical_basis(space, code)?;
    let mut obs = BTreeMap::new();
    obs.insert("jz".to_string(), logical_z(space, code, opts.q_max)?);
    let traj_z = evolve(&me, &DensityMatrix::pure(&zero), &config, &obs)?;
    let sigma_z = *traj_z.observable("jz").unwrap().last().unwrap();
    let p_x = (1.0 - sigma_z) / 2.0;

    for p in [p_z, p_x] {
        if !(-1e-6..=1.0 + 1e-6).contains(&p) {
            return Err(Error::InvariantViolation {
                t: t_gate,
                what: format!("gate error probability {p:.3e} outside [0, 1]"),
            });
        }
    }
    warnings.extend(traj_x.warnings);
    warnings.extend(traj_z.warnings);
    Ok(GateResult { theta, t_gate, p_z, p_x, epsilon_z, warnings })
}

#[derive(Clone, Debug)]
pub struct BiasRow {
    pub alpha_sq: f64,
    pub r: f64,
    pub t_gate: f64,
    pub epsilon_z: f64,
    pub p_z: f64,
    pub p_x: f64,
}

/// θ = π gates at T_opt across the grid; the p_X column demonstrates
/// maintained noise bias, its ln-slope in α² steepens ≈ e^{2r}.
pub fn bias_preservation_scan(
    alpha_sq_grid: &[f64],
    r_grid: &[f64],
    kappa_minus: f64,
    opts: &GateOptions,
) -> Result<Vec<BiasRow>> {
    let mut points = Vec::new();
    for &alpha_sq in alpha_sq_grid {
        for &r in r_grid {
            points.push((alpha_sq, r));
        }
    }
    let rows: Result<Vec<BiasRow>> = points
        .par_iter()
        .map(|&(alpha_sq, r)| {
            let code = CodeParams::real(alpha_sq.sqrt(), r)?;
            let noise = NoiseParams::loss_only(kappa_minus);
            let t_gate = t_opt(&code, kappa_minus, noise.kappa2)?;
            let result = simulate_gate(&code, &noise, std::f64::consts::PI, t_gate, opts)?;
            Ok(BiasRow {
                alpha_sq,
                r,
                t_gate,
                epsilon_z: result.epsilon_z,
                p_z: result.p_z,
                p_x: result.p_x,
            })
        })
        .collect();
    let mut rows = rows?;
    rows.sort_by(|a, b| (a.alpha_sq, a.r).partial_cmp(&(b.alpha_sq, b.r)).expect("finite keys"));
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn drive_amplitude_values() {
        let eps = drive_amplitude(std::f64::consts::PI, 2.0, 1.0).unwrap();
        assert_relative_eq!(eps, std::f64::consts::PI / 8.0, max_relative = 1e-14);
        assert_eq!(drive_amplitude(0.0, 2.0, 1.0).unwrap(), 0.0);
        let half = drive_amplitude(std::f64::consts::PI, 2.0, 2.0).unwrap();
        assert_relative_eq!(half, eps / 2.0, max_relative = 1e-14);
        assert!(drive_amplitude(1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn pz_model_values() {
        let code = CodeParams::real(2.0, 0.0).unwrap();
        assert_relative_eq!(
            pz_model(&code, 0.0, 1.0, 1.0),
            std::f64::consts::PI.powi(2) / 256.0,
            max_relative = 1e-14
        );
        let r0 = CodeParams::real(2.0, 0.0).unwrap();
        let r5 = CodeParams::real(2.0, 0.5).unwrap();
        let na = |c: &CodeParams| pz_model(c, 0.0, 1.0, 2.0);
        assert_relative_eq!(na(&r5) / na(&r0), (-2.0f64).exp(), max_relative = 1e-14);
        let code = CodeParams::real(2.0, 0.2).unwrap();
        assert_relative_eq!(pz_model(&code, 1e-3, 1.0, 2.0), 0.016663, max_relative = 1e-4);
    }

    #[test]
    fn t_opt_matches_golden_section() {
        let code = CodeParams::real(2.0, 0.0).unwrap();
        let t = t_opt(&code, 1e-3, 1.0).unwrap();
        assert_relative_eq!(t, std::f64::consts::PI / (32.0 * 1e-3f64.sqrt()), max_relative = 1e-12);
        let numeric =
            golden_section_minimum(|tt| pz_model(&code, 1e-3, 1.0, tt), 0.1, 100.0, 1e-10);
        assert_relative_eq!(t, numeric, max_relative = 1e-6);

        let r = CodeParams::real(2.0, 0.35).unwrap();
        assert_relative_eq!(
            t_opt(&r, 1e-3, 1.0).unwrap() / t,
            (-0.7f64).exp(),
            max_relative = 1e-12
        );
        assert!(t_opt(&code, 0.0, 1.0).is_err());
    }

    #[test]
    fn pz_model_is_convex_in_t() {
        let code = CodeParams::real(2.0, 0.2).unwrap();
        let f = |t: f64| pz_model(&code, 1e-3, 1.0, t);
        for &t in &[0.5, 1.0, 2.0, 5.0, 10.0] {
            let h = 1e-3 * t;
            let second = (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
            assert!(second > 0.0, "pz_model not convex at t = {t}");
        }
    }
}
