//! Circuit-QED implementation planning (§IV.C, Appendix B): flux-pump
//! frequencies and amplitudes for the ATS coupler, adiabatic-elimination
//! validity, a two-mode (storage + waste) validation of the effective
//! single-mode confinement, and the sKPO spectrum check.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::fock::{annihilation, squeeze, DensityMatrix, FockSpace, Operator};
use crate::lindblad::{evolve, EvolutionConfig, MasterEquation};
use crate::states::{squeezed_cat, CodeParams, Parity};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct CircuitParams {
    /// Three-wave mixing rate (angular frequency units).
    pub g3: f64,
    /// Waste-mode loss rate.
    pub kappa_w: f64,
    /// Josephson energy (angular frequency units).
    pub e_j: f64,
    /// Flux-pump strength, dimensionless.
    pub lambda: f64,
    pub omega_a: f64,
    pub omega_w: f64,
    /// Mode participation ratios at the coupler.
    pub phi_a: f64,
    pub phi_c: f64,
    pub phi_w: f64,
    /// Junction asymmetry η = (E_J,l − E_J,r)/(E_J,l + E_J,r).
    pub eta: f64,
}

impl CircuitParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("g3", self.g3),
            ("kappa_w", self.kappa_w),
            ("e_j", self.e_j),
            ("omega_a", self.omega_a),
            ("omega_w", self.omega_w),
        ] {
            if v <= 0.0 || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be > 0, got {v}")));
            }
        }
        if !(0.0..0.3).contains(&self.lambda) {
            return Err(Error::InvalidParams(format!("lambda must be in [0, 0.3), got {}", self.lambda)));
        }
        if self.eta.abs() >= 1.0 {
            return Err(Error::InvalidParams(format!("|eta| must be < 1, got {}", self.eta)));
        }
        Ok(())
    }

    /// Adiabatic-elimination validity figure 2|α|g₃/κ_w; must stay < 1/5.
    pub fn validity_ratio(&self, code: &CodeParams) -> f64 {
        2.0 * code.alpha.norm() * self.g3 / self.kappa_w
    }

    /// Effective confinement rate κ₂ = 4g₃²/κ_w.
    pub fn kappa2_eff(&self) -> f64 {
        4.0 * self.g3 * self.g3 / self.kappa_w
    }
}

#[derive(Clone, Debug)]
pub struct PumpPlan {
    pub omega_1: f64,
    pub omega_2: f64,
    pub omega_3: f64,
    pub eps_1: f64,
    pub eps_2: f64,
    pub eps_3: f64,
    pub kappa2_eff: f64,
    /// Effective drive Ω = −g₃α²e^{2r}.
    pub omega_eff: f64,
    pub validity_ratio: f64,
    pub warnings: Vec<String>,
}

/// Pump frequencies ω₁ = 2ω_a − ω_w, ω₂ = 2ω_a + ω_w, ω₃ = ω_w and
/// amplitudes ε₁ = λcosh²r, ε₂ = λsinh²r, ε₃ = λsinh(2r).
pub fn pump_plan(cp: &CircuitParams, code: &CodeParams) -> Result<PumpPlan> {
    cp.validate()?;
    let r = code.r;
    let validity_ratio = cp.validity_ratio(code);
    let mut warnings = Vec::new();
    if validity_ratio >= 0.2 {
        warnings.push(format!(
            "validity ratio 2|α|g₃/κ_w = {validity_ratio:.3} ≥ 1/5; adiabatic elimination of the waste mode is unreliable"
        ));
    }
    if cp.eta != 0.0 {
        warnings.push(format!(
            "junction asymmetry η = {:.3e} leaves static Kerr-type nonlinearities; comparable devices reach |K/κ₂| ≈ 1/5",
            cp.eta
        ));
    }
    Ok(PumpPlan {
        omega_1: 2.0 * cp.omega_a - cp.omega_w,
        omega_2: 2.0 * cp.omega_a + cp.omega_w,
        omega_3: cp.omega_w,
        eps_1: cp.lambda * r.cosh().powi(2),
        eps_2: cp.lambda * r.sinh().powi(2),
        eps_3: cp.lambda * (2.0 * r).sinh(),
        kappa2_eff: cp.kappa2_eff(),
        omega_eff: -cp.g3 * code.alpha.norm_sqr() * (2.0 * r).exp(),
        validity_ratio,
        warnings,
    })
}

#[derive(Clone, Copy, Debug)]
pub struct DisplacedAmplitude {
    pub value: C64,
    /// True when the pump sits within 1e−6·κ_x of the mode resonance.
    pub resonant: bool,
}

/// Per-pump displaced-frame coefficient
/// ξ_x = −iE_Jφ_xε_k / (i(ω_x − ω_k) + κ_x/2).
pub fn displaced_frame_amplitudes(
    e_j: f64,
    phi_x: f64,
    eps_k: f64,
    omega_x: f64,
    omega_k: f64,
    kappa_x: f64,
) -> Result<DisplacedAmplitude> {
    let den = C64::new(kappa_x / 2.0, omega_x - omega_k);
    if den.norm() < 1e-30 {
        return Err(Error::InvalidParams(
            "displaced-frame denominator vanishes: lossless mode driven exactly on resonance".into(),
        ));
    }
    let value = C64::new(0.0, -e_j * phi_x * eps_k) / den;
    Ok(DisplacedAmplitude { value, resonant: den.norm() < 1e-6 * kappa_x })
}

/// Waste-mode Fock cutoff; ⟨ŵ†ŵ⟩ ≪ 1 in the validity regime.
pub const N_WASTE: usize = 5;
const LEVEL4_MAX: f64 = 1e-6;

#[derive(Clone, Copy, Debug)]
pub struct TwoModeConfig {
    /// Horizon in units of 1/κ₂_eff.
    pub t_final_kappa2: f64,
    pub checkpoints: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for TwoModeConfig {
    fn default() -> Self {
        Self { t_final_kappa2: 4.0, checkpoints: 6, rel_tol: 1e-7, abs_tol: 1e-11 }
    }
}

#[derive(Clone, Debug)]
pub struct TwoModeReport {
    /// Checkpoint times in units of 1/κ₂_eff.
    pub times: Vec<f64>,
    pub trace_distances: Vec<f64>,
    pub final_trace_distance: f64,
    pub validity_ratio: f64,
    /// Largest waste-mode level-4 population seen.
    pub level4_max: f64,
    pub warnings: Vec<String>,
}

fn partial_trace_waste(rho: &DMatrix<C64>, n_a: usize, n_w: usize) -> DMatrix<C64> {
    let mut out = DMatrix::zeros(n_a, n_a);
    for i in 0..n_a {
        for j in 0..n_a {
            let mut acc = C64::new(0.0, 0.0);
            for k in 0..n_w {
                acc += rho[(i * n_w + k, j * n_w + k)];
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Evolve the two-mode model H = g₃(ŵ†b̂² + ŵb̂†²) + Ω̃ŵ† + Ω̃*ŵ with
/// κ_wD[ŵ], and the effective single-mode model κ₂_eff D[b̂²−β²], both from
/// storage vacuum; report the trace distance between the reduced storage
/// state and the effective-model state at each checkpoint.
pub fn two_mode_validation(
    cp: &CircuitParams,
    code: &CodeParams,
    config: &TwoModeConfig,
) -> Result<TwoModeReport> {
    cp.validate()?;
    let plan = pump_plan(cp, code)?;
    let mut warnings = plan.warnings.clone();

    let n_a = FockSpace::required_dim(code.n_bar_confinement());
    let storage = FockSpace::new(n_a)?;
    let full = FockSpace::new(n_a * N_WASTE)?;

    let b = crate::fock::squeezed_mode(storage, code.r, code.phi)?;
    let b2 = b.mul(&b);
    let beta_sq = crate::states::beta(code) * crate::states::beta(code);

    // Two-mode generator (storage ⊗ waste ordering).
    let id_a = DMatrix::<C64>::identity(n_a, n_a);
    let w_small = annihilation(FockSpace::new(N_WASTE)?);
    let w_full = id_a.kronecker(w_small.matrix());
    let omega_tilde = C64::new(plan.omega_eff, 0.0);
    let h_full = (b2.matrix().kronecker(&w_small.matrix().adjoint())
        + b2.dagger().matrix().kronecker(w_small.matrix()))
        * C64::new(cp.g3, 0.0)
        + w_full.adjoint() * omega_tilde
        + &w_full * omega_tilde.conj();
    let me_full = MasterEquation::new(
        full,
        Some(Operator::from_matrix(full, h_full)?),
        vec![(Operator::from_matrix(full, w_full)?, cp.kappa_w)],
    )?;

    // Effective model in the same physical time units.
    let me_eff = MasterEquation::new(
        storage,
        None,
        vec![(b2.add_scalar(-beta_sq), plan.kappa2_eff)],
    )?;

    let mut p4 = DMatrix::<C64>::zeros(N_WASTE, N_WASTE);
    p4[(4, 4)] = C64::new(1.0, 0.0);
    let p4_full = Operator::from_matrix(full, id_a.kronecker(&p4))?;

    let t_total = config.t_final_kappa2 / plan.kappa2_eff;
    let n_seg = config.checkpoints.max(1);
    let seg = t_total / n_seg as f64;

    let mut rho_full = DensityMatrix::pure(&crate::fock::Ket::vacuum(full));
    let mut rho_eff = DensityMatrix::pure(&crate::fock::Ket::vacuum(storage));
    let mut times = Vec::with_capacity(n_seg);
    let mut distances = Vec::with_capacity(n_seg);
    let mut level4_max: f64 = 0.0;

    for k in 1..=n_seg {
        let cfg = EvolutionConfig::new(seg, 9, config.rel_tol, config.abs_tol)?;
        let mut obs = std::collections::BTreeMap::new();
        obs.insert("p4".to_string(), p4_full.clone());
        let traj_full = evolve(&me_full, &rho_full, &cfg, &obs)?;
        let seg_p4 = traj_full
            .observable("p4")
            .expect("registered")
            .iter()
            .fold(0.0f64, |m, &v| m.max(v));
        level4_max = level4_max.max(seg_p4);
        if seg_p4 > LEVEL4_MAX {
            return Err(Error::InvariantViolation {
                t: seg * k as f64,
                what: format!("waste level-4 population {seg_p4:.3e} exceeds {LEVEL4_MAX:.0e}; raise N_WASTE"),
            });
        }
        rho_full = traj_full.final_state;

        let traj_eff = evolve(&me_eff, &rho_eff, &cfg, &std::collections::BTreeMap::new())?;
        rho_eff = traj_eff.final_state;
        warnings.extend(traj_full.warnings);
        warnings.extend(traj_eff.warnings);

        let reduced = DensityMatrix::from_matrix_unchecked(
            storage,
            partial_trace_waste(rho_full.matrix(), n_a, N_WASTE),
        )?;
        times.push(k as f64 * config.t_final_kappa2 / n_seg as f64);
        distances.push(reduced.trace_distance(&rho_eff));
    }

    Ok(TwoModeReport {
        times,
        final_trace_distance: *distances.last().expect("≥ 1 checkpoint"),
        trace_distances: distances,
        validity_ratio: plan.validity_ratio,
        level4_max,
        warnings,
    })
}

#[derive(Clone, Debug)]
pub struct SkpoReport {
    /// ‖(H − E)|C±⟩‖ for the even/odd squeezed cats, E = −Kα⁴.
    pub residual_even: f64,
    pub residual_odd: f64,
    pub energy: f64,
    /// Spectral gap from the degenerate cat pair to the next eigenstate.
    pub gap: f64,
}

/// Verify the squeezed cats are degenerate ground states of the sKPO
/// Hamiltonian H = Kb̂†²b̂² − ε₂(b̂†² + b̂²) with α = √(ε₂/K) (the factored
/// form K(b̂†²−α²)(b̂²−α²) − Kα⁴ fixes the sign of the two-photon term),
/// and report the spectral gap.
pub fn skpo_check(space: FockSpace, code: &CodeParams, k_kerr: f64, eps2: f64) -> Result<SkpoReport> {
    if k_kerr <= 0.0 || eps2 <= 0.0 {
        return Err(Error::InvalidParams("skpo_check requires K > 0 and eps2 > 0".into()));
    }
    if code.phi != 0.0 {
        return Err(Error::InvalidParams("skpo_check is defined for φ = 0".into()));
    }
    let alpha = (eps2 / k_kerr).sqrt();
    space.check_adequate(alpha * alpha * (2.0 * code.r).exp() + code.r.sinh().powi(2))?;

    let b = crate::fock::squeezed_mode(space, code.r, 0.0)?;
    let b2 = b.mul(&b);
    let h = b2.dagger().mul(&b2).scale(C64::new(k_kerr, 0.0)).sub(
        &b2.dagger().add(&b2).scale(C64::new(eps2, 0.0)),
    );
    let energy = -k_kerr * alpha.powi(4);

    // Eigenstates: S(r)|C±_α⟩, built as plain cats then squeezed.
    let plain = CodeParams::real(alpha, 0.0)?;
    let s_op = squeeze(space, code.r, 0.0)?;
    let mut residuals = [0.0f64; 2];
    for (idx, parity) in [Parity::Even, Parity::Odd].into_iter().enumerate() {
        let cat = squeezed_cat(space, &plain, parity)?;
        let psi = s_op.apply(&cat.ket).normalized()?;
        let h_psi = h.apply(&psi);
        let e_psi = psi.amplitudes() * C64::new(energy, 0.0);
        residuals[idx] = (h_psi.amplitudes() - e_psi).norm();
    }

    // H is Hermitian; the gap is the distance from the twofold ground
    // manifold to the next level.
    let herm = nalgebra::SymmetricEigen::new(h.matrix().clone().hermitian_part());
    let mut eigs: Vec<f64> = herm.eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
    let gap = eigs[2] - eigs[0];

    Ok(SkpoReport { residual_even: residuals[0], residual_odd: residuals[1], energy, gap })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn circuit(g3: f64, kappa_w: f64, lambda: f64) -> CircuitParams {
        CircuitParams {
            g3,
            kappa_w,
            e_j: 1000.0,
            lambda,
            omega_a: 4000.0,
            omega_w: 6000.0,
            phi_a: 0.3,
            phi_c: 0.2,
            phi_w: 0.25,
            eta: 0.0,
        }
    }

    #[test]
    fn pump_plan_formulas() {
        let cp = circuit(1.0, 50.0, 0.05);
        let code = CodeParams::real(2.0, 0.3).unwrap();
        let plan = pump_plan(&cp, &code).unwrap();
        assert_relative_eq!(plan.omega_1, 2000.0, max_relative = 1e-14);
        assert_relative_eq!(plan.omega_2, 14000.0, max_relative = 1e-14);
        assert_relative_eq!(plan.omega_3, 6000.0, max_relative = 1e-14);
        assert_relative_eq!(plan.eps_1, 0.0546366, max_relative = 1e-4);
        assert_relative_eq!(plan.eps_2, 4.6366305e-3, max_relative = 1e-4);
        assert_relative_eq!(plan.eps_3, 0.0318327, max_relative = 1e-4);
        assert_relative_eq!(plan.kappa2_eff, 4.0 / 50.0, max_relative = 1e-14);
        assert_relative_eq!(plan.omega_eff, -4.0 * 0.6f64.exp(), max_relative = 1e-14);
        assert_relative_eq!(plan.validity_ratio, 0.08, max_relative = 1e-14);
        assert!(plan.warnings.is_empty());

        // Identities ε₁ − ε₂ = λ and ε₃ = λ sinh 2r.
        assert_relative_eq!(plan.eps_1 - plan.eps_2, 0.05, max_relative = 1e-12);
        assert_relative_eq!(plan.eps_3, 0.05 * 0.6f64.sinh(), max_relative = 1e-12);
    }

    #[test]
    fn pump_plan_r0_and_warnings() {
        let cp = circuit(1.0, 50.0, 0.05);
        let code = CodeParams::real(2.0, 0.0).unwrap();
        let plan = pump_plan(&cp, &code).unwrap();
        assert_relative_eq!(plan.eps_1, 0.05, max_relative = 1e-14);
        assert_eq!(plan.eps_2, 0.0);
        assert_eq!(plan.eps_3, 0.0);

        let strong = circuit(10.0, 50.0, 0.05);
        let plan = pump_plan(&strong, &code).unwrap();
        assert!(plan.validity_ratio >= 0.2 && !plan.warnings.is_empty());

        let mut asym = circuit(1.0, 50.0, 0.05);
        asym.eta = 0.01;
        let plan = pump_plan(&asym, &code).unwrap();
        assert!(plan.warnings.iter().any(|w| w.contains("K/κ₂")));
    }

    #[test]
    fn kappa2_eff_scales_with_g3_squared() {
        let code = CodeParams::real(1.0, 0.0).unwrap();
        let p1 = pump_plan(&circuit(1.0, 50.0, 0.05), &code).unwrap();
        let p2 = pump_plan(&circuit(2.0, 50.0, 0.05), &code).unwrap();
        assert_relative_eq!(p2.kappa2_eff, 4.0 * p1.kappa2_eff, max_relative = 1e-14);
    }

    #[test]
    fn displaced_frame_limits() {
        // On resonance, κ dominant: magnitude 2E_Jφ_xε_k/κ_x.
        let amp = displaced_frame_amplitudes(100.0, 0.3, 0.05, 6000.0, 6000.0, 50.0).unwrap();
        assert_relative_eq!(amp.value.norm(), 2.0 * 100.0 * 0.3 * 0.05 / 50.0, max_relative = 1e-12);
        // Dispersive limit: magnitude ≈ E_Jφ_xε_k/|Δ|.
        let amp = displaced_frame_amplitudes(100.0, 0.3, 0.05, 4000.0, 6000.0, 0.1).unwrap();
        assert_relative_eq!(amp.value.norm(), 100.0 * 0.3 * 0.05 / 2000.0, max_relative = 1e-6);
        assert!(displaced_frame_amplitudes(100.0, 0.3, 0.05, 6000.0, 6000.0, 0.0).is_err());
    }

    #[test]
    fn skpo_cats_are_degenerate_ground_states() {
        for r in [0.0, 0.3] {
            let code = CodeParams::real(2.0, r).unwrap();
            let space =
                FockSpace::new(FockSpace::required_dim(4.0 * (2.0 * r).exp() + r.sinh().powi(2)))
                    .unwrap();
            let report = skpo_check(space, &code, 1.0, 4.0).unwrap();
            assert!(report.residual_even < 1e-6, "even residual {} at r={r}", report.residual_even);
            assert!(report.residual_odd < 1e-6, "odd residual {} at r={r}", report.residual_odd);
            assert!(report.gap > 0.0, "no gap at r={r}");
            assert_relative_eq!(report.energy, -16.0, max_relative = 1e-14);
        }
    }

    #[test]
    fn skpo_factored_form_identity() {
        let space = FockSpace::new(60).unwrap();
        let b = crate::fock::squeezed_mode(space, 0.3, 0.0).unwrap();
        let b2 = b.mul(&b);
        let (k_kerr, eps2) = (0.7, 2.8);
        let alpha_sq = eps2 / k_kerr;
        let expanded = b2.dagger().mul(&b2).scale(C64::new(k_kerr, 0.0)).sub(
            &b2.dagger().add(&b2).scale(C64::new(eps2, 0.0)),
        );
        let factored = b2
            .dagger()
            .add_scalar(C64::new(-alpha_sq, 0.0))
            .mul(&b2.add_scalar(C64::new(-alpha_sq, 0.0)))
            .scale(C64::new(k_kerr, 0.0))
            .add_scalar(C64::new(-k_kerr * alpha_sq * alpha_sq, 0.0));
        assert!(expanded.sub(&factored).norm_max() < 1e-9);
    }
}
