#![allow(dead_code)]

use lindblad_ancilla::{ComplexMatrix, MasterEquation, StandardForm, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Entries drawn uniformly from the unit disc.
pub fn unit_disc_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_| loop {
        let z = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if z.norm() <= 1.0 {
            break z;
        }
    })
}

pub fn hermitian(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = unit_disc_matrix(rng, n);
    (&g + &g.adjoint()).scale_real(0.5)
}

/// Random full-rank density matrix `G G† / Tr(G G†)`.
pub fn density_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = unit_disc_matrix(rng, n);
    let p = g.dot(&g.adjoint());
    let tr = p.trace().re;
    p.scale_real(1.0 / tr)
}

/// Random standard-form model with `channels` jump operators.
pub fn standard_form(rng: &mut impl Rng, n: usize, channels: usize) -> StandardForm {
    let mut sf = StandardForm::new(hermitian(rng, n));
    for _ in 0..channels {
        let l = unit_disc_matrix(rng, n);
        let rate = rng.random_range(0.1..1.0);
        sf = sf.lowering(l, rate);
    }
    sf
}

pub fn model(rng: &mut impl Rng, n: usize, channels: usize) -> MasterEquation {
    MasterEquation::from_standard_form(&standard_form(rng, n, channels)).unwrap()
}

/// `⟨β| ρ |β⟩` for a vector `β`.
pub fn expectation(rho: &ComplexMatrix, v: &[C64]) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..v.len() {
        for j in 0..v.len() {
            acc += v[i].conj() * rho.get(i, j) * v[j];
        }
    }
    acc
}

/// Trace norm distance `½‖A − B‖₁` for Hermitian arguments.
pub fn trace_distance(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let d = a - b;
    0.5 * d.hermitian_eigenvalues().unwrap().iter().map(|x| x.abs()).sum::<f64>()
}
