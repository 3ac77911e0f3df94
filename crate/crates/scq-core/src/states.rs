//! Squeezed coherent states, squeezed cats, and the logical qubit basis.

use num_complex::Complex64 as C64;

use crate::fock::{displacement, squeeze, FockSpace, Ket};
use crate::{Error, Result};

/// Code parameters (α, r, φ) of a squeezed cat qubit. α is stored complex
/// for generality; the sweep drivers restrict to real α with φ = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodeParams {
    pub alpha: C64,
    pub r: f64,
    pub phi: f64,
}

impl CodeParams {
    pub fn new(alpha: C64, r: f64, phi: f64) -> Result<Self> {
        if r < 0.0 {
            return Err(Error::InvalidParams(format!("squeezing r must be ≥ 0, got {r}")));
        }
        Ok(Self { alpha, r, phi })
    }

    /// Real-α, φ = 0 convenience used by all §IV-style studies.
    pub fn real(alpha: f64, r: f64) -> Result<Self> {
        Self::new(C64::new(alpha, 0.0), r, 0.0)
    }

    /// Mean photon number of the squeezed coherent state |α, ξ⟩.
    pub fn n_bar(&self) -> f64 {
        self.alpha.norm_sqr() + self.r.sinh().powi(2)
    }

    /// Effective photon scale βe seen by the confinement dynamics; the
    /// cutoff rule for cats and dissipators is applied to this instead of
    /// n̄ because the transient explores the β-sized manifold.
    pub fn n_bar_confinement(&self) -> f64 {
        beta(self).norm_sqr() + self.r.sinh().powi(2)
    }
}

/// β_{α,ξ} = α cosh(r) + α* e^{−iφ} sinh(r); reduces to α e^r for real α,
/// φ = 0.
pub fn beta(params: &CodeParams) -> C64 {
    let ch = params.r.cosh();
    let sh = params.r.sinh();
    params.alpha * ch + params.alpha.conj() * C64::from_polar(sh, -params.phi)
}

/// Squeezed coherent state |α, ξ⟩ = D(α) S(ξ) |0⟩, normalized.
pub fn squeezed_state(space: FockSpace, params: &CodeParams) -> Result<Ket> {
    space.check_adequate(params.n_bar())?;
    let s = squeeze(space, params.r, params.phi)?;
    let d = displacement(space, params.alpha)?;
    let sq_vac = s.apply(&Ket::vacuum(space));
    d.apply(&sq_vac).normalized()
}

/// Two-photon coherent state |α⟩_ξ = S(ξ) D(α) |0⟩, normalized.
pub fn two_photon_coherent(space: FockSpace, alpha: C64, r: f64, phi: f64) -> Result<Ket> {
    let params = CodeParams::new(alpha, r, phi)?;
    space.check_adequate(params.n_bar())?;
    let s = squeeze(space, r, phi)?;
    let d = displacement(space, alpha)?;
    let displaced = d.apply(&Ket::vacuum(space));
    s.apply(&displaced).normalized()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn sign(&self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }
}

/// Squeezed cat state |C±_{α,ξ}⟩ = (|α,ξ⟩ ± |−α,ξ⟩) / N±.
#[derive(Clone, Debug)]
pub struct SqueezedCat {
    pub params: CodeParams,
    pub parity: Parity,
    pub ket: Ket,
    /// N± of the defining superposition.
    pub norm_constant: f64,
}

/// Build |C±_{α,ξ}⟩. The α = 0 odd cat degenerates to the squeezed
/// single-photon state S(ξ)|1⟩, which is returned as the continuous limit.
pub fn squeezed_cat(space: FockSpace, params: &CodeParams, parity: Parity) -> Result<SqueezedCat> {
    space.check_adequate(params.n_bar_confinement())?;
    let plus = squeezed_state(space, params)?;
    let minus_params = CodeParams { alpha: -params.alpha, ..*params };
    let minus = squeezed_state(space, &minus_params)?;
    let sign = C64::new(parity.sign(), 0.0);
    let raw = Ket::from_vector(space, plus.amplitudes() + minus.amplitudes() * sign)?;
    let norm = raw.norm();
    if norm < 1e-9 {
        // α → 0 odd limit: squeezed one-photon state.
        let s = squeeze(space, params.r, params.phi)?;
        let ket = s.apply(&Ket::fock_state(space, 1)?).normalized()?;
        return Ok(SqueezedCat { params: *params, parity, ket, norm_constant: norm });
    }
    Ok(SqueezedCat { params: *params, parity, ket: raw.normalized()?, norm_constant: norm })
}

/// SCQ logical basis: |0̄⟩ = (|C+⟩ + |C−⟩)/√2, |1̄⟩ = (|C+⟩ − |C−⟩)/√2.
/// Orthonormal by construction (the cats have opposite Fock parity).
pub fn logical_basis(space: FockSpace, params: &CodeParams) -> Result<(Ket, Ket)> {
    let even = squeezed_cat(space, params, Parity::Even)?;
    let odd = squeezed_cat(space, params, Parity::Odd)?;
    let inv_sqrt2 = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let zero = Ket::from_vector(
        space,
        (even.ket.amplitudes() + odd.ket.amplitudes()) * inv_sqrt2,
    )?;
    let one = Ket::from_vector(
        space,
        (even.ket.amplitudes() - odd.ket.amplitudes()) * inv_sqrt2,
    )?;
    Ok((zero, one))
}

/// Analytic normalization constant N±² = 2(1 ± e^{−2α²e^{2r}}) for real α.
pub fn analytic_norm_constant_sq(params: &CodeParams, parity: Parity) -> f64 {
    let overlap = (-2.0 * params.alpha.norm_sqr() * (2.0 * params.r).exp()).exp();
    2.0 * (1.0 + parity.sign() * overlap)
}
