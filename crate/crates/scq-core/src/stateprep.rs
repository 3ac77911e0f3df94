//! Unconditional squeezed-cat preparation (Appendix A): the nonlinear
//! operator L̂ = (μ₀ + μ₁â†â)â + νâ† has a unique dark state approaching an
//! even cat of amplitude α = i√(ν/μ₁) as μ₀/μ₁ → 0; conjugating with S(ξ)
//! gives an operator X̂ whose dark state is the squeezed cat, so a single
//! dissipator κD[X̂] prepares it from any initial state.

use std::collections::BTreeMap;

use num_complex::Complex64 as C64;

use crate::fock::{annihilation, displacement, number, squeeze, DensityMatrix, FockSpace, Ket, Operator};
use crate::lindblad::{evolve, EvolutionConfig, MasterEquation};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug)]
pub struct DarkOpParams {
    pub mu0: C64,
    pub mu1: C64,
    pub nu: C64,
    pub r: f64,
    pub phi: f64,
}

impl DarkOpParams {
    pub fn new(mu0: C64, mu1: C64, nu: C64, r: f64, phi: f64) -> Result<Self> {
        if r < 0.0 {
            return Err(Error::InvalidParams(format!("squeezing r must be ≥ 0, got {r}")));
        }
        Ok(Self { mu0, mu1, nu, r, phi })
    }

    /// Cat amplitude α = i√(ν/μ₁) of the μ₀/μ₁ → 0 dark state.
    pub fn cat_alpha(&self) -> Result<C64> {
        if self.mu1.norm() == 0.0 {
            return Err(Error::InvalidParams("cat_alpha undefined at mu1 = 0".into()));
        }
        Ok(C64::new(0.0, 1.0) * (self.nu / self.mu1).sqrt())
    }
}

/// L̂ = (μ₀ + μ₁â†â)â + νâ† (squeezing ignored).
pub fn dark_operator(space: FockSpace, p: &DarkOpParams) -> Result<Operator> {
    if p.mu1.norm() > 0.0 {
        space.check_adequate((p.nu / p.mu1).norm())?;
    }
    let a = annihilation(space);
    let n = number(space);
    let nonlinear = n.scale(p.mu1).add_scalar(p.mu0).mul(&a);
    Ok(nonlinear.add(&a.dagger().scale(p.nu)))
}

/// Six-term expansion of X̂ = S(ξ) L̂ S†(ξ), using S(ξ)âS†(ξ) =
/// cosh(r)â + e^{iφ}sinh(r)â† as implied by the S(ξ) = exp[(ξ*â²−ξâ†²)/2]
/// definition. (The appendix prints the opposite φ sign and drops a μ₁
/// from the â† coefficient; the conjugation cross-check pins this form.)
fn expansion(space: FockSpace, p: &DarkOpParams) -> Operator {
    let (c, s) = (p.r.cosh(), p.r.sinh());
    let u = C64::from_polar(1.0, p.phi);
    let ub = u.conj();
    let c2r = (2.0 * p.r).cosh();
    let (cc, ss) = (C64::new(c, 0.0), C64::new(s, 0.0));

    let coef_a = p.mu0 * cc + p.nu * ss * ub + p.mu1 * 3.0 * s * s * c;
    let coef_ad = p.mu0 * ss * u + p.nu * cc + p.mu1 * s * (c2r + s * s) * u;
    let coef_ada2 = p.mu1 * c * (c2r + s * s);
    let coef_ad2a = p.mu1 * s * (c2r + c * c) * u;
    let coef_a3 = p.mu1 * c * c * s * ub;
    let coef_ad3 = p.mu1 * c * s * s * u * u;

    let a = annihilation(space);
    let ad = a.dagger();
    let a2 = a.mul(&a);
    let a3 = a2.mul(&a);
    ad.scale(coef_ad)
        .add(&a.scale(coef_a))
        .add(&ad.mul(&a2).scale(coef_ada2))
        .add(&ad.mul(&ad).mul(&a).scale(coef_ad2a))
        .add(&a3.scale(coef_a3))
        .add(&a3.dagger().scale(coef_ad3))
}

const EXPANSION_TOL: f64 = 1e-9;
/// Initial extra Fock levels for the conjugation cross-check; the truncated
/// matrix exponential of S(ξ) pollutes the compared block until the check
/// space is large enough, so the pad grows until the deviation converges.
const CHECK_PAD: usize = 60;

/// X̂ = S(ξ)L̂S†(ξ), returned as the explicit six-term expansion after it
/// has been verified against the direct conjugation to ‖Δ‖_max < 1e−9 on
/// a padded space.
pub fn squeezed_dark_operator(space: FockSpace, p: &DarkOpParams) -> Result<Operator> {
    if p.mu1.norm() > 0.0 {
        space.check_adequate((p.nu / p.mu1).norm() * (2.0 * p.r).exp())?;
    }
    let mut check_dim = space.dim() + CHECK_PAD;
    let mut best_dev = f64::INFINITY;
    for _ in 0..4 {
        let check_space = FockSpace::new(check_dim)?;
        let expanded = expansion(check_space, p);
        let s_op = squeeze(check_space, p.r, p.phi)?;
        let conjugated = s_op.mul(&dark_operator(check_space, p)?).mul(&s_op.dagger());
        let mut max_dev = 0.0f64;
        for i in 0..space.dim() {
            for j in 0..space.dim() {
                max_dev =
                    max_dev.max((expanded.matrix()[(i, j)] - conjugated.matrix()[(i, j)]).norm());
            }
        }
        best_dev = best_dev.min(max_dev);
        if best_dev <= EXPANSION_TOL {
            return Ok(expansion(space, p));
        }
        check_dim *= 2;
    }
    Err(Error::ExpansionMismatch(best_dev))
}

/// Dark state of X̂ in the μ₀/μ₁ → 0 limit: |C+_{β,ξ}⟩ with β = αcosh(r) −
/// α*e^{iφ}sinh(r) and α = i√(ν/μ₁).
pub fn target_state(space: FockSpace, p: &DarkOpParams) -> Result<Ket> {
    let alpha = p.cat_alpha()?;
    let beta = alpha * p.r.cosh() - alpha.conj() * C64::from_polar(p.r.sinh(), p.phi);
    let s_op = squeeze(space, p.r, p.phi)?;
    let plus = displacement(space, beta)?.apply(&s_op.apply(&Ket::vacuum(space)));
    let minus = displacement(space, -beta)?.apply(&s_op.apply(&Ket::vacuum(space)));
    Ket::from_vector(space, plus.amplitudes() + minus.amplitudes())?.normalized()
}

#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub times: Vec<f64>,
    pub fidelities: Vec<f64>,
    pub final_fidelity: f64,
    pub final_state: DensityMatrix,
    pub warnings: Vec<String>,
}

/// Evolve ∂_t ρ = κD[X̂]ρ (κ = 1) from `initial` and track fidelity to the
/// target squeezed cat.
pub fn unconditional_convergence(
    space: FockSpace,
    p: &DarkOpParams,
    initial: &DensityMatrix,
    config: &EvolutionConfig,
) -> Result<ConvergenceReport> {
    let x = squeezed_dark_operator(space, p)?;
    let me = MasterEquation::new(space, None, vec![(x, 1.0)])?;
    let target = target_state(space, p)?;
    let projector = Operator::from_matrix(
        space,
        target.amplitudes() * target.amplitudes().adjoint(),
    )?;
    let mut obs = BTreeMap::new();
    obs.insert("fidelity".to_string(), projector);
    let traj = evolve(&me, initial, config, &obs)?;
    let fidelities = traj.observable("fidelity").expect("registered").to_vec();
    let final_fidelity = *fidelities.last().expect("nonempty");
    Ok(ConvergenceReport {
        times: traj.times,
        fidelities,
        final_fidelity,
        final_state: traj.final_state,
        warnings: traj.warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mu0_over_mu1: f64, alpha_sq: f64, r: f64, phi: f64) -> DarkOpParams {
        DarkOpParams::new(
            C64::new(mu0_over_mu1, 0.0),
            C64::new(1.0, 0.0),
            C64::new(alpha_sq, 0.0),
            r,
            phi,
        )
        .unwrap()
    }

    #[test]
    fn linear_dark_state_is_squeezed_vacuum() {
        // L = μ₀a + νa† with μ² − ν² = 1 annihilates S(r)|0⟩ with tanh r = ν/μ.
        let r: f64 = 0.4;
        let p = DarkOpParams::new(
            C64::new(r.cosh(), 0.0),
            C64::new(0.0, 0.0),
            C64::new(r.sinh(), 0.0),
            0.0,
            0.0,
        )
        .unwrap();
        let space = FockSpace::new(40).unwrap();
        let l = dark_operator(space, &p).unwrap();
        let sq_vac = squeeze(space, r, 0.0).unwrap().apply(&Ket::vacuum(space));
        assert!(l.apply(&sq_vac).norm() < 1e-7);
    }

    #[test]
    fn vacuum_dark_state_for_pure_loss() {
        let p = DarkOpParams::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0, 0.0)
            .unwrap();
        let space = FockSpace::new(10).unwrap();
        let l = dark_operator(space, &p).unwrap();
        assert!(l.apply(&Ket::vacuum(space)).norm() < 1e-14);
    }

    #[test]
    fn cat_residual_decreases_with_mu0() {
        let space = FockSpace::new(40).unwrap();
        let mut last = f64::INFINITY;
        for mu0 in [1e-1, 1e-2, 1e-3] {
            let p = params(mu0, 2.0, 0.0, 0.0);
            let l = dark_operator(space, &p).unwrap();
            let target = target_state(space, &p).unwrap();
            let res = l.apply(&target).norm();
            assert!(res < last, "residual did not decrease at mu0 = {mu0}");
            last = res;
        }
        assert!(last < 1e-2);
    }

    #[test]
    fn expansion_matches_conjugation() {
        let space = FockSpace::new(60).unwrap();
        let p = params(1e-2, 2.0, 0.4, std::f64::consts::PI / 3.0);
        // squeezed_dark_operator errors internally on mismatch > 1e-9.
        squeezed_dark_operator(space, &p).unwrap();
    }

    #[test]
    fn expansion_reduces_to_dark_operator_at_r0() {
        let space = FockSpace::new(40).unwrap();
        let p = params(1e-2, 2.0, 0.0, 0.0);
        let x = squeezed_dark_operator(space, &p).unwrap();
        let l = dark_operator(space, &p).unwrap();
        let dev = x.sub(&l).norm_max();
        assert!(dev < 1e-12, "r=0 reduction deviates by {dev}");
    }

    #[test]
    fn squeezed_residual_tracks_unsqueezed() {
        let space = FockSpace::new(60).unwrap();
        for mu0 in [1e-1, 1e-2] {
            let flat = params(mu0, 2.0, 0.0, 0.0);
            let sq = params(mu0, 2.0, 0.25, 0.0);
            let res_flat = dark_operator(space, &flat)
                .unwrap()
                .apply(&target_state(space, &flat).unwrap())
                .norm();
            let res_sq = squeezed_dark_operator(space, &sq)
                .unwrap()
                .apply(&target_state(space, &sq).unwrap())
                .norm();
            assert!(
                res_sq < 2.0 * res_flat && res_flat < 2.0 * res_sq,
                "residuals diverged: {res_sq} vs {res_flat} at mu0 = {mu0}"
            );
        }
    }
}
