//! Closed-form dynamics of a two-level atom damped by a bosonic bath.
//!
//! On the lifted space the finite-temperature generator splits into
//! commuting pieces `H̃_T = H₀ + iγJ` with
//!
//! ```text
//! H₀ = (Ω/2)(σ_z − τ_z) − iγ(N̄ + 1/2)
//! J  = N̄ σ_+τ_+ + (N̄+1) σ_−τ_− − (σ_z + τ_z)/4
//! ```
//!
//! so `exp(−iH̃_T t) = exp(−iH₀t)·exp(γJt)`. `J` annihilates the coherence
//! sector `{|e,g⟩, |g,e⟩}` and acts as a traceless 2×2 block with eigenvalues
//! `±(N̄ + 1/2)` on the population sector `{|e,e⟩, |g,g⟩}`.

use crate::algebra::{devectorize, tensor_product, vectorize, ComplexMatrix, C64, I};
use crate::error::{Error, Result};
use crate::model::{MasterEquation, StandardForm};
use crate::operators::{sigma_minus, sigma_plus, sigma_z};

/// Physical parameters of the damped qubit, natural units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitParams {
    pub rabi: f64,
    pub gamma: f64,
    pub nbar: f64,
}

impl QubitParams {
    pub fn new(rabi: f64, gamma: f64, nbar: f64) -> Result<Self> {
        if !rabi.is_finite() {
            return Err(Error::InvalidArgument(format!("rabi frequency {rabi} is not finite")));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::NegativeRate { what: "gamma".into(), rate: gamma });
        }
        if !(nbar >= 0.0) || !nbar.is_finite() {
            return Err(Error::InvalidArgument(format!("nbar must be >= 0, got {nbar}")));
        }
        Ok(Self { rabi, gamma, nbar })
    }

    /// Occupation taken from a bath at `temperature` resonant with `rabi`.
    pub fn with_temperature(rabi: f64, gamma: f64, temperature: f64) -> Result<Self> {
        Self::new(rabi, gamma, bose_occupation(rabi, temperature)?)
    }

    /// Standard form: `H₀ = Ωσ_z/2`, channels `(σ_−, γ(N̄+1))` and `(σ_+, γN̄)`.
    pub fn standard_form(&self) -> StandardForm {
        StandardForm::new(sigma_z().scale_real(self.rabi / 2.0))
            .lowering(sigma_minus(), self.gamma * (self.nbar + 1.0))
            .raising(sigma_plus(), self.gamma * self.nbar)
    }

    pub fn model(&self) -> MasterEquation {
        MasterEquation::from_standard_form(&self.standard_form())
            .expect("validated qubit parameters form a valid model")
    }
}

/// `(e^{ω/T} − 1)^{-1}` with `k_B = 1`.
pub fn bose_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !(temperature > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "bose occupation needs omega > 0 and T > 0, got {omega}, {temperature}"
        )));
    }
    Ok(1.0 / (omega / temperature).exp_m1())
}

/// The commuting pair `(H₀, J)` on the 4-dimensional lifted space.
pub fn commuting_split(p: &QubitParams) -> (ComplexMatrix, ComplexMatrix) {
    let id = ComplexMatrix::identity(2);
    let sz = tensor_product(&sigma_z(), &id);
    let tz = tensor_product(&id, &sigma_z());
    let h0 = &(&sz - &tz).scale_real(p.rabi / 2.0)
        - &ComplexMatrix::identity(4).scale(I * (p.gamma * (p.nbar + 0.5)));
    let raise = tensor_product(&sigma_plus(), &sigma_plus()).scale_real(p.nbar);
    let lower = tensor_product(&sigma_minus(), &sigma_minus()).scale_real(p.nbar + 1.0);
    let j = &(&raise + &lower) - &(&sz + &tz).scale_real(0.25);
    (h0, j)
}

/// `H̃_T = H₀ + iγJ`, including the constant `−iγN̄` that keeps the
/// propagator trace preserving.
pub fn finite_t_effective_hamiltonian(p: &QubitParams) -> ComplexMatrix {
    let (h0, j) = commuting_split(p);
    &h0 + &j.scale(I * p.gamma)
}

/// `exp(−iH̃_T t)` in the lifted basis `|e,e⟩, |e,g⟩, |g,e⟩, |g,g⟩`.
///
/// The `1/(2N̄+1)` prefactor belongs to the population block only; the
/// coherence entries come straight from `exp(−iH₀t)` because `J` vanishes there.
pub fn finite_t_propagator(p: &QubitParams, t: f64) -> ComplexMatrix {
    let n = p.nbar;
    let lambda = 2.0 * n + 1.0;
    let decay = (-lambda * p.gamma * t).exp();
    let gain = -(-lambda * p.gamma * t).exp_m1();
    let damp = (-(n + 0.5) * p.gamma * t).exp();
    let phase = p.rabi * t;

    let mut m = ComplexMatrix::zeros(4, 4).into_array();
    m[(0, 0)] = C64::new((n + (n + 1.0) * decay) / lambda, 0.0);
    m[(0, 3)] = C64::new(n * gain / lambda, 0.0);
    m[(3, 0)] = C64::new((n + 1.0) * gain / lambda, 0.0);
    m[(3, 3)] = C64::new((n + 1.0 + n * decay) / lambda, 0.0);
    m[(1, 1)] = C64::from_polar(damp, -phase);
    m[(2, 2)] = C64::from_polar(damp, phase);
    ComplexMatrix::from_array(m).expect("finite parameters give finite propagator")
}

/// `ρ(t)` from the closed-form propagator.
pub fn evolve_qubit(rho0: &ComplexMatrix, p: &QubitParams, t: f64) -> Result<ComplexMatrix> {
    if rho0.rows() != 2 || rho0.cols() != 2 {
        return Err(Error::mismatch(
            "qubit state",
            "2x2",
            format!("{}x{}", rho0.rows(), rho0.cols()),
        ));
    }
    let psi = vectorize(rho0)?.evolve(&finite_t_propagator(p, t))?;
    Ok(devectorize(&psi))
}
