//! Damped-cavity closed forms against each other and the generic engine.

mod common;

use lindblad_ancilla::cavity::{
    coherent_amplitudes, coherent_state, dilation_evolve, fock_solution, fock_state, kraus_family,
    thermal_beta, thermal_state, CavityParams,
};
use lindblad_ancilla::{propagate, rk4_evolve, ComplexMatrix, C64};
use rand::Rng;

/// Random state supported on `|0⟩..|top⟩` and padded to `n_max`.
fn low_photon_state(rng: &mut impl Rng, top: usize, n_max: usize) -> ComplexMatrix {
    let small = common::density_matrix(rng, top + 1);
    ComplexMatrix::from_fn(n_max + 1, n_max + 1, |(i, j)| {
        if i <= top && j <= top {
            small.get(i, j)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

#[test]
fn fock_solution_is_a_state_at_all_times() {
    let mut rng = common::rng(51);
    let p = CavityParams::new(1.3, 0.8, 30).unwrap();
    let rho0 = low_photon_state(&mut rng, 8, 30);
    for kt in [0.0, 0.01, 0.3, 1.0, 3.0, 10.0] {
        let rho = fock_solution(&rho0, &p, kt / p.kappa).unwrap().rho;
        assert!((rho.trace().re - 1.0).abs() <= 1e-12);
        assert!(rho.hermiticity_deviation() <= 1e-14);
        assert!(rho.min_eigenvalue().unwrap() >= -1e-12);
    }
}

#[test]
fn coherence_decays_at_mean_photon_rate() {
    let n_max = 16;
    let p = CavityParams::new(0.9, 0.5, n_max).unwrap();
    let (a, b) = (2, 5);
    let mut psi = vec![C64::new(0.0, 0.0); n_max + 1];
    psi[a] = C64::new(1.0 / 2f64.sqrt(), 0.0);
    psi[b] = C64::new(1.0 / 2f64.sqrt(), 0.0);
    let rho0 = ComplexMatrix::outer(&psi, &psi);
    for t in [0.2, 1.0, 4.0] {
        let rho = fock_solution(&rho0, &p, t).unwrap().rho;
        let want = 0.5 * (-p.kappa * (a + b) as f64 * t / 2.0).exp();
        assert!((rho.get(a, b).norm() - want).abs() <= 1e-14);
        // Phase rotates at ω(q − p).
        let phase = rho.get(a, b).arg();
        let expect = (p.omega_f * (b - a) as f64 * t + std::f64::consts::PI).rem_euclid(2.0 * std::f64::consts::PI)
            - std::f64::consts::PI;
        assert!((phase - expect).abs() <= 1e-12);
    }
}

#[test]
fn coherent_states_remain_coherent() {
    let n_max = 40;
    let p = CavityParams::new(1.7, 0.6, n_max).unwrap();
    let alpha = C64::new(1.2, -0.8);
    let rho0 = coherent_state(alpha, n_max);
    for t in [0.3, 1.0, 2.5] {
        let rho = fock_solution(&rho0, &p, t).unwrap().rho;
        let beta = alpha * (C64::new(-p.kappa / 2.0, -p.omega_f) * t).exp();
        let fid = common::expectation(&rho, &coherent_amplitudes(beta, n_max)).re;
        assert!(fid >= 1.0 - 1e-8, "t={t}: fidelity {fid}");
    }
}

#[test]
fn thermal_states_remain_thermal() {
    let n_max = 40;
    let p = CavityParams::new(1.0, 0.4, n_max).unwrap();
    let beta0 = 2.0;
    let rho0 = thermal_state(beta0, n_max).unwrap();
    for t in [0.5, 2.0, 6.0] {
        let rho = fock_solution(&rho0, &p, t).unwrap().rho;
        let beta = thermal_beta(beta0, p.kappa, t).unwrap();
        let want = thermal_state(beta, n_max).unwrap();
        assert!(common::trace_distance(&rho, &want) <= 1e-8);
    }
}

#[test]
fn closed_forms_agree_four_ways() {
    let mut rng = common::rng(52);
    let n_max = 24;
    let p = CavityParams::new(1.1, 0.7, n_max).unwrap();
    let rho0 = low_photon_state(&mut rng, 6, n_max);
    for kt in [0.3, 1.0, 3.0] {
        let t = kt / p.kappa;
        let fock = fock_solution(&rho0, &p, t).unwrap();
        assert!(!fock.truncation_warning);
        let kraus = kraus_family(&p, t, n_max).unwrap().apply(&rho0).unwrap();
        let dilated = dilation_evolve(&rho0, &p, t).unwrap();
        let generic = propagate(&p.model(), &rho0, t).unwrap();
        let rk4 = rk4_evolve(&p.model(), &rho0, t, 8000).unwrap();
        for (name, other) in [("kraus", &kraus), ("dilation", &dilated), ("generic", &generic), ("rk4", &rk4)] {
            let d = fock.rho.max_abs_diff(other);
            assert!(d <= 1e-8, "κt={kt}: fock vs {name} differ by {d:e}");
        }
    }
}

#[test]
fn vacuum_is_stationary_and_fock_states_empty_into_it() {
    let p = CavityParams::new(2.0, 1.0, 10).unwrap();
    let vac = fock_state(0, 10).unwrap();
    assert!(fock_solution(&vac, &p, 3.0).unwrap().rho.max_abs_diff(&vac) <= 1e-15);
    let rho = fock_solution(&fock_state(3, 10).unwrap(), &p, 40.0).unwrap().rho;
    assert!((rho.get(0, 0).re - 1.0).abs() <= 1e-12);
}
