//! Lifting a master equation to a Schrödinger-like equation on the doubled
//! space `system ⊗ ancilla`.
//!
//! With the row-major vectorization `|ψ_ρ⟩ = Σ ρ_mn |m⟩|n⟩`, the general-form
//! equation becomes `i ∂_t |ψ_ρ⟩ = H̃ |ψ_ρ⟩` with
//!
//! ```text
//! H̃ = H ⊗ 1 − 1 ⊗ conj(H) + i Σ_α γ_α L_α ⊗ conj(L_α)
//! ```
//!
//! where `conj` is the entrywise conjugate, i.e. the ancilla copy of an
//! operator. `H̃` is not Hermitian, and the lifted vector is never renormalized.

use crate::algebra::{
    devectorize, swap_permutation, tensor_product, vectorize, ComplexMatrix, LiftedState, I,
};
use crate::error::{Error, Result};
use crate::expm::evolution_operator;
use crate::model::MasterEquation;
use crate::tolerance::{Tolerances, MAX_LIFTED_SYSTEM_DIM};

/// The lifted generator of a particular [`MasterEquation`].
#[derive(Debug, Clone)]
pub struct EffectiveHamiltonian<'a> {
    model: &'a MasterEquation,
    matrix: ComplexMatrix,
}

impl<'a> EffectiveHamiltonian<'a> {
    pub fn build(model: &'a MasterEquation) -> Result<Self> {
        let n = model.dim();
        if n > MAX_LIFTED_SYSTEM_DIM {
            return Err(Error::TooLarge {
                dim: n,
                limit: MAX_LIFTED_SYSTEM_DIM,
            });
        }
        let id = ComplexMatrix::identity(n);
        let h = model.drift();
        let mut matrix = &tensor_product(h, &id) - &tensor_product(&id, &h.conj());
        for ch in model.channels() {
            let l = ch.operator();
            matrix = &matrix + &tensor_product(l, &l.conj()).scale(I * ch.rate());
        }
        Ok(Self { model, matrix })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn source(&self) -> &MasterEquation {
        self.model
    }

    pub fn lifted_dim(&self) -> usize {
        self.matrix.rows()
    }

    /// `‖S·conj(H̃)·S + H̃‖_max` for the system/ancilla swap `S`; zero for
    /// every generator built from a master equation.
    pub fn swap_conjugation_residual(&self) -> f64 {
        let s = swap_permutation(self.model.dim());
        let mirrored = s.dot(&self.matrix.conj()).dot(&s);
        (&mirrored + &self.matrix).as_array().iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `exp(−i H̃ t)` as a reusable map on lifted states.
    pub fn propagator(&self, t: f64) -> Result<Propagator> {
        Ok(Propagator {
            dim: self.model.dim(),
            matrix: evolution_operator(&self.matrix, t)?,
        })
    }
}

/// The `N² × N²` evolution map for a fixed time.
#[derive(Debug, Clone, PartialEq)]
pub struct Propagator {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Propagator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `devectorize(P · vectorize(ρ))`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = rho.square_dim("initial state")?;
        if n != self.dim {
            return Err(Error::mismatch("initial state", self.dim, n));
        }
        let psi = vectorize(rho)?.evolve(&self.matrix)?;
        ComplexMatrix::from_array(devectorize(&psi).into_array())
    }
}

pub fn build_effective_hamiltonian(model: &MasterEquation) -> Result<EffectiveHamiltonian<'_>> {
    EffectiveHamiltonian::build(model)
}

pub fn propagator_matrix(model: &MasterEquation, t: f64) -> Result<ComplexMatrix> {
    Ok(EffectiveHamiltonian::build(model)?.propagator(t)?.into_matrix())
}

/// `ρ(t)` read back from `exp(−i H̃ t)|ψ_ρ(0)⟩`.
///
/// Non-Hermitian inputs are accepted (the map is linear on all operators)
/// but logged.
pub fn propagate(model: &MasterEquation, rho0: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    model.check_state(rho0)?;
    let dev = rho0.hermiticity_deviation();
    if dev > Tolerances::DEFAULT.hermiticity_warning {
        log::warn!("propagating a non-Hermitian initial operator (deviation {dev:.3e})");
    }
    EffectiveHamiltonian::build(model)?.propagator(t)?.apply(rho0)
}

/// Applies `−i H̃` to a lifted state; devectorized, this is `rhs(ρ)`.
pub fn lifted_rhs(h: &EffectiveHamiltonian<'_>, psi: &LiftedState) -> Result<LiftedState> {
    psi.evolve(&h.matrix.scale(-I))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::C64;
    use crate::model::StandardForm;
    use crate::operators::*;

    #[test]
    fn qubit_zero_temperature_generator() {
        let (rabi, gamma) = (3.0, 0.7);
        let sf = StandardForm::new(sigma_z().scale_real(rabi / 2.0)).lowering(sigma_minus(), gamma);
        let model = MasterEquation::from_standard_form(&sf).unwrap();
        let h = build_effective_hamiltonian(&model).unwrap();

        let id = ComplexMatrix::identity(2);
        let pm = sigma_plus().dot(&sigma_minus());
        // H_A = (Ω τ_z + iγ τ_+τ_−)/2, L_A = τ_−.
        let h_sys = (&sigma_z().scale_real(rabi) - &pm.scale(I * gamma)).scale_real(0.5);
        let h_anc = (&sigma_z().scale_real(rabi) + &pm.scale(I * gamma)).scale_real(0.5);
        let want = &(&tensor_product(&h_sys, &id) - &tensor_product(&id, &h_anc))
            + &tensor_product(&sigma_minus(), &sigma_minus()).scale(I * gamma);
        assert!(h.matrix().max_abs_diff(&want) < 1e-15);
        assert!(h.swap_conjugation_residual() < 1e-15);
    }

    #[test]
    fn cavity_generator() {
        let (w, k, n_max) = (2.0, 0.5, 4);
        let sf = StandardForm::new(number(n_max).scale_real(w)).lowering(annihilation(n_max), k);
        let model = MasterEquation::from_standard_form(&sf).unwrap();
        let h = build_effective_hamiltonian(&model).unwrap();
        let id = ComplexMatrix::identity(n_max + 1);
        let n = number(n_max);
        let a = annihilation(n_max);
        let want = &(&tensor_product(&n, &id).scale(C64::new(w, -k / 2.0))
            - &tensor_product(&id, &n).scale(C64::new(w, k / 2.0)))
            + &tensor_product(&a, &a).scale(I * k);
        assert!(h.matrix().max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn closed_system_is_unitary_conjugation() {
        let hm = ComplexMatrix::from_rows(&[
            vec![C64::new(0.4, 0.0), C64::new(0.3, 0.1), C64::new(0.0, 0.0)],
            vec![C64::new(0.3, -0.1), C64::new(-0.2, 0.0), C64::new(0.5, 0.5)],
            vec![C64::new(0.0, 0.0), C64::new(0.5, -0.5), C64::new(1.0, 0.0)],
        ])
        .unwrap();
        let model = MasterEquation::from_standard_form(&StandardForm::new(hm.clone())).unwrap();
        let h = build_effective_hamiltonian(&model).unwrap();
        let id = ComplexMatrix::identity(3);
        let want = &tensor_product(&hm, &id) - &tensor_product(&id, &hm.conj());
        assert_eq!(h.matrix(), &want);

        let t = 1.3;
        let u = evolution_operator(&hm, t).unwrap();
        let rho0 = ComplexMatrix::from_real_rows(&[&[0.5, 0.1, 0.0], &[0.1, 0.3, 0.05], &[0.0, 0.05, 0.2]])
            .unwrap();
        let want = u.dot(&rho0).dot(&u.adjoint());
        assert!(propagate(&model, &rho0, t).unwrap().max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn zero_time_is_identity() {
        let sf = StandardForm::new(sigma_z()).lowering(sigma_minus(), 1.0);
        let model = MasterEquation::from_standard_form(&sf).unwrap();
        assert_eq!(propagator_matrix(&model, 0.0).unwrap(), ComplexMatrix::identity(4));
        let rho = ComplexMatrix::from_real_rows(&[&[0.3, 0.2], &[0.2, 0.7]]).unwrap();
        assert!(propagate(&model, &rho, 0.0).unwrap().max_abs_diff(&rho) <= 1e-12);
    }

    #[test]
    fn excited_state_decay() {
        let gamma = 0.9;
        let sf = StandardForm::new(sigma_z().scale_real(2.5)).lowering(sigma_minus(), gamma);
        let model = MasterEquation::from_standard_form(&sf).unwrap();
        for t in [0.1, 1.0, 4.0] {
            let rho = propagate(&model, &projector(2, EXCITED), t).unwrap();
            let p = (-gamma * t).exp();
            let want = ComplexMatrix::real_diagonal(&[p, 1.0 - p]);
            assert!(rho.max_abs_diff(&want) < 1e-12);
        }
    }

    #[test]
    fn size_guard() {
        let sf = StandardForm::new(ComplexMatrix::identity(65));
        let model = MasterEquation::from_standard_form(&sf).unwrap();
        assert!(matches!(
            build_effective_hamiltonian(&model),
            Err(Error::TooLarge { dim: 65, .. })
        ));
    }
}
