//! Logical observables of the encoded qubit.
//!
//! ⟨σ_X⟩ is the Fock parity J_x = J_{++} − J_{−−}. ⟨σ_Z⟩ is the
//! sign(a + a†) approximation J_z = J_{+−} + J_{+−}†, built from a Bessel
//! series over single-off-diagonal operators and evaluated in the squeezed
//! frame S(r) J_z S†(r) with α² replaced by β² = α²e^{2r}.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::fock::{squeeze, FockSpace, Operator};
use crate::states::{beta, CodeParams};
use crate::{Error, Result};

/// Fock parity operator J_x = Σ|2n⟩⟨2n| − Σ|2n+1⟩⟨2n+1|.
pub fn parity_jx(space: FockSpace) -> Operator {
    let dim = space.dim();
    let mut mat = DMatrix::zeros(dim, dim);
    for n in 0..dim {
        mat[(n, n)] = C64::new(if n % 2 == 0 { 1.0 } else { -1.0 }, 0.0);
    }
    Operator::from_matrix(space, mat).expect("diagonal parity matrix is valid")
}

/// Parameters of the J_{+−} Bessel series.
#[derive(Clone, Copy, Debug)]
pub struct JzConfig {
    /// β² argument of the series (real, > 0).
    pub beta_sq: f64,
    /// Series truncation: q runs over −q_max ..= q_max.
    pub q_max: usize,
}

impl JzConfig {
    pub fn new(beta_sq: f64) -> Result<Self> {
        if !(beta_sq > 0.0) || !beta_sq.is_finite() {
            return Err(Error::InvalidParams(format!("beta_sq must be > 0, got {beta_sq}")));
        }
        Ok(Self { beta_sq, q_max: 32 })
    }

    pub fn with_q_max(mut self, q_max: usize) -> Self {
        self.q_max = q_max.max(1);
        self
    }
}

/// Exponentially scaled modified Bessel functions s_k = e^{−x} I_k(x) for
/// k = 0..=k_max, via Miller's downward recurrence normalized with
/// I_0 + 2 Σ_k I_k = e^x.
pub fn scaled_bessel_i(x: f64, k_max: usize) -> Result<Vec<f64>> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidParams(format!("bessel argument must be > 0, got {x}")));
    }
    let start = k_max + (x + 2.0 * x.sqrt()) as usize + 30;
    let mut vals = vec![0.0f64; k_max + 1];
    let mut ikp1 = 0.0f64;
    let mut ik = 1e-280f64;
    let mut norm = 0.0f64;
    for k in (1..=start).rev() {
        let ikm1 = ikp1 + (2.0 * k as f64 / x) * ik;
        if k <= k_max + 1 {
            vals[k - 1] = ikm1;
        }
        norm += 2.0 * ik;
        ikp1 = ik;
        ik = ikm1;
        if ik > 1e280 {
            let scale = 1e-280;
            ik *= scale;
            ikp1 *= scale;
            norm *= scale;
            for v in vals.iter_mut() {
                *v *= scale;
            }
        }
    }
    norm += ik; // I_0 term
    for v in vals.iter_mut() {
        *v /= norm;
    }
    Ok(vals)
}

/// Cumulative ln n! for n = 0..=n_max.
fn ln_factorials(n_max: usize) -> Vec<f64> {
    let mut t = vec![0.0; n_max + 1];
    for n in 1..=n_max {
        t[n] = t[n - 1] + (n as f64).ln();
    }
    t
}

/// Cumulative ln n!! for n = −1..=n_max, indexed as `t[(n + 1) as usize]`
/// with (−1)!! = 0!! = 1.
fn ln_double_factorials(n_max: i64) -> Vec<f64> {
    let len = (n_max + 2) as usize;
    let mut t = vec![0.0; len];
    for n in 1..=n_max {
        t[(n + 1) as usize] = t[(n - 1) as usize] + (n as f64).ln();
    }
    t
}

/// The lowering part J_{+−} of the logical Z observable in the Fock basis.
///
/// Returns [`Error::SeriesNotConverged`] when the q_max series term is not
/// below 1e-14 of the q = 0 term.
pub fn j_plus_minus(space: FockSpace, cfg: &JzConfig) -> Result<Operator> {
    let dim = space.dim();
    let x = cfg.beta_sq;
    let q_max = cfg.q_max;

    let s = scaled_bessel_i(x, q_max)?;
    if s[q_max] / (2.0 * q_max as f64 + 1.0) > 1e-14 * s[0] {
        return Err(Error::SeriesNotConverged(format!(
            "J_z series term at q = {q_max} is {:.3e} of the q = 0 term (needs < 1e-14)",
            s[q_max] / ((2.0 * q_max as f64 + 1.0) * s[0])
        )));
    }
    // sqrt(2x / sinh 2x) · e^x = sqrt(4x / (1 − e^{−4x})), finite for large x.
    let amp = (0.5 * ((2.0 * x).ln() + std::f64::consts::LN_2 - (-(-(4.0 * x)).exp()).ln_1p())).exp();

    let lnf = ln_factorials(dim + 2 * q_max + 2);
    let lnd = ln_double_factorials((dim + 2 * q_max + 2) as i64);
    let ln_dfact = |n: i64| lnd[(n + 1) as usize];

    let mut mat: DMatrix<C64> = DMatrix::zeros(dim, dim);
    for q in -(q_max as i64)..=(q_max as i64) {
        let sign = if q.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let pref = amp * sign * s[q.unsigned_abs() as usize] / (2 * q + 1) as f64;
        if q >= 0 {
            // f(n̂) J_{++} a^{2q+1}: |m⟩ → f(n)·√(m!/n!)|n⟩ with n = m−2q−1 even.
            // shift is odd, so stepping by 2 from m = shift keeps m odd.
            let shift = (2 * q + 1) as usize;
            for m in (shift..dim).step_by(2) {
                let n = m - shift;
                let ln_val = ln_dfact(n as i64 - 1) - ln_dfact(n as i64 + 2 * q)
                    + 0.5 * (lnf[m] - lnf[n]);
                mat[(n, m)] += C64::new(pref * ln_val.exp(), 0.0);
            }
        } else {
            // J_{++} a†^{2p−1} g(n̂): |m⟩ → g(m)·√(n!/m!)|n⟩ with n = m+2p−1 even.
            let p = (-q) as usize;
            let shift = 2 * p - 1;
            for m in (1..dim).step_by(2) {
                let n = m + shift;
                if n >= dim {
                    break;
                }
                let ln_val =
                    ln_dfact(m as i64) - ln_dfact(n as i64) + 0.5 * (lnf[n] - lnf[m]);
                mat[(n, m)] += C64::new(pref * ln_val.exp(), 0.0);
            }
        }
    }
    Operator::from_matrix(space, mat)
}

/// Logical Z observable of the squeezed cat code:
/// S(ξ) (J_{+−} + J_{+−}†) S†(ξ) with β² = |β_{α,ξ}|².
pub fn logical_z(space: FockSpace, params: &CodeParams, q_max: usize) -> Result<Operator> {
    space.check_adequate(params.n_bar_confinement())?;
    let b = beta(params);
    if b.im.abs() > 1e-12 * b.norm().max(1.0) {
        return Err(Error::InvalidParams("logical_z requires a real confinement amplitude β".into()));
    }
    let cfg = JzConfig::new(b.re * b.re)?.with_q_max(q_max);
    let jpm = j_plus_minus(space, &cfg)?;
    let jz = jpm.add(&jpm.dagger());
    let s_op = squeeze(space, params.r, params.phi)?;
    Ok(s_op.mul(&jz).mul(&s_op.dagger()))
}
