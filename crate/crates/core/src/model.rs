//! Master equations in the general form
//!
//! ```text
//! i dρ/dt = Hρ − ρH† + i Σ_α γ_α L_α ρ L_α†
//! ```
//!
//! with a generally non-Hermitian drift `H`, the conversion from the
//! standard Lindblad form built on eigenoperators `X_m^±`, and a fixed-step
//! RK4 integrator that works on `ρ` directly and serves as an independent
//! check on the lifted propagator.

use crate::algebra::{ComplexMatrix, C64, I};
use crate::error::{Error, Result};
use crate::tolerance::{Tolerances, RK4_STEP_LIMIT};

#[derive(Debug, Clone, PartialEq)]
pub struct JumpChannel {
    operator: ComplexMatrix,
    rate: f64,
}

impl JumpChannel {
    pub fn new(operator: ComplexMatrix, rate: f64) -> Result<Self> {
        operator.square_dim("jump operator")?;
        if !(rate >= 0.0) || !rate.is_finite() {
            return Err(Error::NegativeRate {
                what: "jump channel".into(),
                rate,
            });
        }
        Ok(Self { operator, rate })
    }

    pub fn operator(&self) -> &ComplexMatrix {
        &self.operator
    }

    pub fn rate(&self) -> f64 {
        self.rate
    }
}

/// A master equation in general form. Immutable after construction.
#[derive(Debug, Clone, PartialEq)]
pub struct MasterEquation {
    drift: ComplexMatrix,
    channels: Vec<JumpChannel>,
    trace_preserving: bool,
}

impl MasterEquation {
    /// General-form model. The trace-preservation flag is left unset; use
    /// [`MasterEquation::from_standard_form`] for models that carry it.
    pub fn new(drift: ComplexMatrix, channels: Vec<JumpChannel>) -> Result<Self> {
        let n = drift.square_dim("drift")?;
        for (k, ch) in channels.iter().enumerate() {
            if ch.operator.rows() != n {
                return Err(Error::mismatch(format!("channel {k}"), n, ch.operator.rows()));
            }
        }
        Ok(Self {
            drift,
            channels,
            trace_preserving: false,
        })
    }

    /// Converts the standard Lindblad form:
    /// `H = H₀ − (i/2) Σ_m (K_m X⁺X⁻ + G_m X⁻X⁺)`, channels `(X⁻, K)` and `(X⁺, G)`.
    pub fn from_standard_form(sf: &StandardForm) -> Result<Self> {
        sf.validate()?;
        let n = sf.dim();
        let mut back_action = ComplexMatrix::zeros(n, n);
        let mut channels = Vec::with_capacity(sf.lowering.len() + sf.raising.len());
        for (x, rate) in sf.lowering.iter().chain(&sf.raising) {
            back_action = &back_action + &x.adjoint().dot(x).scale_real(*rate);
            channels.push(JumpChannel::new(x.clone(), *rate)?);
        }
        // Zero-rate channels contribute nothing.
        channels.retain(|c| c.rate > 0.0);
        let drift = &sf.h0 - &back_action.scale(I * 0.5);
        let mut model = Self::new(drift, channels)?;
        model.trace_preserving = true;
        Ok(model)
    }

    pub fn dim(&self) -> usize {
        self.drift.rows()
    }

    pub fn drift(&self) -> &ComplexMatrix {
        &self.drift
    }

    pub fn channels(&self) -> &[JumpChannel] {
        &self.channels
    }

    pub fn is_trace_preserving(&self) -> bool {
        self.trace_preserving
    }

    /// `dρ/dt = −i(Hρ − ρH†) + Σ_α γ_α L_α ρ L_α†`.
    pub fn rhs(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        self.check_state(rho)?;
        Ok(self.rhs_unchecked(rho))
    }

    fn rhs_unchecked(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let h = &self.drift;
        let coherent = &h.dot(rho) - &rho.dot(&h.adjoint());
        let mut out = coherent.scale(-I);
        for ch in &self.channels {
            let l = &ch.operator;
            let jump = l.dot(rho).dot(&l.adjoint());
            out = &out + &jump.scale_real(ch.rate);
        }
        out
    }

    /// Bound on the operator norm of the superoperator `ρ ↦ rhs(ρ)`:
    /// `2‖H‖ + Σ γ ‖L‖²`, each norm bounded by `sqrt(‖·‖₁‖·‖∞)`.
    pub fn generator_norm_bound(&self) -> f64 {
        2.0 * self.drift.spectral_norm_bound()
            + self
                .channels
                .iter()
                .map(|c| c.rate * c.operator.spectral_norm_bound().powi(2))
                .sum::<f64>()
    }

    pub(crate) fn check_state(&self, rho: &ComplexMatrix) -> Result<()> {
        let n = rho.square_dim("density matrix")?;
        if n != self.dim() {
            return Err(Error::mismatch("density matrix", self.dim(), n));
        }
        Ok(())
    }
}

/// Standard Lindblad form: Hermitian `H₀` with lowering channels `(X⁻_m, K_m)`
/// and raising channels `(X⁺_m, G_m)`. `X⁺_m` is passed explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct StandardForm {
    pub h0: ComplexMatrix,
    pub lowering: Vec<(ComplexMatrix, f64)>,
    pub raising: Vec<(ComplexMatrix, f64)>,
}

impl StandardForm {
    pub fn new(h0: ComplexMatrix) -> Self {
        Self {
            h0,
            lowering: Vec::new(),
            raising: Vec::new(),
        }
    }

    pub fn lowering(mut self, x_minus: ComplexMatrix, rate: f64) -> Self {
        self.lowering.push((x_minus, rate));
        self
    }

    pub fn raising(mut self, x_plus: ComplexMatrix, rate: f64) -> Self {
        self.raising.push((x_plus, rate));
        self
    }

    pub fn dim(&self) -> usize {
        self.h0.rows()
    }

    fn validate(&self) -> Result<()> {
        let n = self.h0.square_dim("H0")?;
        let tol = Tolerances::DEFAULT;
        let dev = self.h0.hermiticity_deviation();
        if dev > tol.hermitian_input * self.h0.frobenius_norm().max(1.0) {
            return Err(Error::NotHermitian {
                deviation: dev,
                tolerance: tol.hermitian_input,
            });
        }
        let labelled = self
            .lowering
            .iter()
            .enumerate()
            .map(|(k, c)| (format!("lowering channel {k}"), c))
            .chain(
                self.raising
                    .iter()
                    .enumerate()
                    .map(|(k, c)| (format!("raising channel {k}"), c)),
            );
        for (label, (x, rate)) in labelled {
            let d = x.square_dim("channel operator")?;
            if d != n {
                return Err(Error::mismatch(label, n, d));
            }
            if !(*rate >= 0.0) || !rate.is_finite() {
                return Err(Error::NegativeRate { what: label, rate: *rate });
            }
            let (omega, residual) = eigenoperator_residual(&self.h0, x);
            if residual > tol.eigenoperator_warning {
                log::warn!(
                    "{label}: [H0, X] deviates from {omega:.6}·X by {residual:.3e}; \
                     operator is not an eigenoperator of H0"
                );
            }
        }
        Ok(())
    }

    /// Right-hand side evaluated in the standard form, term by term.
    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.h0.commutator(rho).scale(-I);
        let dissipator = |l: &ComplexMatrix, rate: f64| {
            let ld = l.adjoint();
            let ldl = ld.dot(l);
            let sandwich = l.dot(rho).dot(&ld).scale_real(2.0);
            (&(&sandwich - &ldl.dot(rho)) - &rho.dot(&ldl)).scale_real(0.5 * rate)
        };
        for (x, k) in &self.lowering {
            out = &out + &dissipator(x, *k);
        }
        for (x, g) in &self.raising {
            out = &out + &dissipator(x, *g);
        }
        out
    }
}

/// Best-fit frequency `ω` in `[H₀, X] ≈ ω X` and the Frobenius residual,
/// relative to `‖X‖`.
pub fn eigenoperator_residual(h0: &ComplexMatrix, x: &ComplexMatrix) -> (C64, f64) {
    let xn2 = x.frobenius_norm().powi(2);
    if xn2 == 0.0 {
        return (C64::new(0.0, 0.0), 0.0);
    }
    let comm = h0.commutator(x);
    let overlap: C64 = x
        .as_array()
        .iter()
        .zip(comm.as_array())
        .map(|(a, b)| a.conj() * b)
        .sum();
    let omega = overlap / xn2;
    let residual = (&comm - &x.scale(omega)).frobenius_norm() / xn2.sqrt();
    (omega, residual)
}

/// Classical fixed-step RK4 on `ρ` from `0` to `t`.
///
/// Refuses step sizes with `(t/steps)·‖generator‖ > 0.1`.
pub fn rk4_evolve(
    model: &MasterEquation,
    rho0: &ComplexMatrix,
    t: f64,
    steps: usize,
) -> Result<ComplexMatrix> {
    model.check_state(rho0)?;
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidArgument(format!("rk4 time must be finite and >= 0, got {t}")));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("rk4 needs at least one step".into()));
    }
    if t == 0.0 {
        return Ok(rho0.clone());
    }
    let h = t / steps as f64;
    let norm = model.generator_norm_bound();
    if h * norm > RK4_STEP_LIMIT {
        return Err(Error::StepGuard {
            step: h,
            norm,
            limit: RK4_STEP_LIMIT,
        });
    }
    let mut rho = rho0.clone();
    for _ in 0..steps {
        rho = rk4_step(model, &rho, h);
    }
    ComplexMatrix::from_array(rho.into_array())
}

/// Steps needed so that each RK4 step stays within `safety` of the guard.
pub fn rk4_min_steps(model: &MasterEquation, t: f64, safety: f64) -> usize {
    let norm = model.generator_norm_bound();
    ((t * norm / (RK4_STEP_LIMIT * safety)).ceil() as usize).max(1)
}

fn rk4_step(model: &MasterEquation, rho: &ComplexMatrix, h: f64) -> ComplexMatrix {
    let k1 = model.rhs_unchecked(rho);
    let k2 = model.rhs_unchecked(&(rho + &k1.scale_real(h / 2.0)));
    let k3 = model.rhs_unchecked(&(rho + &k2.scale_real(h / 2.0)));
    let k4 = model.rhs_unchecked(&(rho + &k3.scale_real(h)));
    let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
    rho + &incr.scale_real(h / 6.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{projector, sigma_minus, sigma_plus, sigma_z, EXCITED, GROUND};

    fn qubit(rabi: f64, gamma: f64) -> MasterEquation {
        let sf = StandardForm::new(sigma_z().scale_real(rabi / 2.0)).lowering(sigma_minus(), gamma);
        MasterEquation::from_standard_form(&sf).unwrap()
    }

    #[test]
    fn qubit_drift_matches_closed_form() {
        let (rabi, gamma) = (5.0, 0.8);
        let m = qubit(rabi, gamma);
        let pm = sigma_plus().dot(&sigma_minus());
        let want = (&sigma_z().scale_real(rabi) - &pm.scale(I * gamma)).scale_real(0.5);
        assert!(m.drift().max_abs_diff(&want) < 1e-15);
        assert_eq!(m.channels().len(), 1);
        assert_eq!(m.channels()[0].operator(), &sigma_minus());
        assert!(m.is_trace_preserving());
    }

    #[test]
    fn cavity_drift() {
        use crate::operators::{annihilation, number};
        let (w, k) = (2.0, 0.6);
        let sf = StandardForm::new(number(5).scale_real(w)).lowering(annihilation(5), k);
        let m = MasterEquation::from_standard_form(&sf).unwrap();
        let want = number(5).scale(C64::new(w, -k / 2.0));
        assert!(m.drift().max_abs_diff(&want) < 1e-14);
    }

    #[test]
    fn zero_rates_give_closed_system() {
        let sf = StandardForm::new(sigma_z()).lowering(sigma_minus(), 0.0);
        let m = MasterEquation::from_standard_form(&sf).unwrap();
        assert_eq!(m.drift(), &sigma_z());
        assert!(m.channels().is_empty());
    }

    #[test]
    fn conversion_errors() {
        let sf = StandardForm::new(sigma_z()).lowering(sigma_minus(), -1.0);
        assert!(matches!(
            MasterEquation::from_standard_form(&sf),
            Err(Error::NegativeRate { .. })
        ));
        let sf = StandardForm::new(sigma_z()).lowering(ComplexMatrix::identity(3), 1.0);
        assert!(matches!(
            MasterEquation::from_standard_form(&sf),
            Err(Error::DimensionMismatch { .. })
        ));
        let sf = StandardForm::new(sigma_plus());
        assert!(matches!(
            MasterEquation::from_standard_form(&sf),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn excited_state_rhs() {
        let gamma = 1.3;
        let m = qubit(4.0, gamma);
        let rho = projector(2, EXCITED);
        let got = m.rhs(&rho).unwrap();
        let want = (&projector(2, GROUND) - &projector(2, EXCITED)).scale_real(gamma);
        assert!(got.max_abs_diff(&want) < 1e-15);
        // Difference quotient of ρ_ee(t) = e^{−γt} at t = 0.
        let h = 1e-6;
        let fd = ((-gamma * h).exp() - 1.0) / h;
        assert!((got.get(EXCITED, EXCITED).re - fd).abs() < 1e-5);
    }

    #[test]
    fn closed_system_rhs_is_commutator() {
        let h = ComplexMatrix::from_rows(&[
            vec![C64::new(1.0, 0.0), C64::new(0.2, -0.3)],
            vec![C64::new(0.2, 0.3), C64::new(-0.5, 0.0)],
        ])
        .unwrap();
        let m = MasterEquation::from_standard_form(&StandardForm::new(h.clone())).unwrap();
        let rho = ComplexMatrix::from_real_rows(&[&[0.6, 0.2], &[0.2, 0.4]]).unwrap();
        let want = h.commutator(&rho).scale(-I);
        assert!(m.rhs(&rho).unwrap().max_abs_diff(&want) < 1e-15);
        assert!(m.rhs(&ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn rk4_basic_cases() {
        let m = qubit(5.0, 1.0);
        let rho0 = projector(2, EXCITED);
        assert_eq!(rk4_evolve(&m, &rho0, 0.0, 10).unwrap(), rho0);
        let rho = rk4_evolve(&m, &rho0, 1.0, 1000).unwrap();
        assert!((rho.get(EXCITED, EXCITED).re - (-1.0f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn rk4_guard() {
        let m = qubit(5.0, 1.0);
        let err = rk4_evolve(&m, &projector(2, EXCITED), 10.0, 10).unwrap_err();
        assert!(matches!(err, Error::StepGuard { .. }));
        let steps = rk4_min_steps(&m, 10.0, 1.0);
        assert!(rk4_evolve(&m, &projector(2, EXCITED), 10.0, steps).is_ok());
    }

    #[test]
    fn rk4_fourth_order() {
        let m = qubit(5.0, 1.0);
        let rho0 = ComplexMatrix::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let r500 = rk4_evolve(&m, &rho0, 1.0, 500).unwrap();
        let r1000 = rk4_evolve(&m, &rho0, 1.0, 1000).unwrap();
        let r2000 = rk4_evolve(&m, &rho0, 1.0, 2000).unwrap();
        let coarse = (&r1000 - &r500).frobenius_norm();
        let fine = (&r2000 - &r1000).frobenius_norm();
        assert!(fine <= coarse / 15.0, "fine {fine:e} coarse {coarse:e}");
    }

    #[test]
    fn eigenoperator_fit() {
        let h0 = sigma_z().scale_real(1.5);
        let (omega, res) = eigenoperator_residual(&h0, &sigma_minus());
        assert!((omega - C64::new(-3.0, 0.0)).norm() < 1e-15);
        assert!(res < 1e-15);
        let x = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert!(eigenoperator_residual(&h0, &x).1 > 1.0);
    }
}
