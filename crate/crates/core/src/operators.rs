//! Concrete operators for the two-level atom and the truncated bosonic mode.
//!
//! Qubit basis order is `[|e⟩, |g⟩]`, so `σ_+ = |e⟩⟨g|` and `σ_z = diag(1, −1)`.
//! Bosonic operators act on `{|0⟩, …, |n_max⟩}`.

use crate::algebra::{ComplexMatrix, C64};

pub const EXCITED: usize = 0;
pub const GROUND: usize = 1;

pub fn sigma_z() -> ComplexMatrix {
    ComplexMatrix::real_diagonal(&[1.0, -1.0])
}

pub fn sigma_plus() -> ComplexMatrix {
    ComplexMatrix::unit(2, EXCITED, GROUND)
}

pub fn sigma_minus() -> ComplexMatrix {
    ComplexMatrix::unit(2, GROUND, EXCITED)
}

/// Truncated annihilation operator, `a|n⟩ = √n |n−1⟩`.
pub fn annihilation(n_max: usize) -> ComplexMatrix {
    let d = n_max + 1;
    ComplexMatrix::from_fn(d, d, |(r, c)| {
        if c == r + 1 {
            C64::new((c as f64).sqrt(), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    })
}

pub fn creation(n_max: usize) -> ComplexMatrix {
    annihilation(n_max).adjoint()
}

/// `a†a = diag(0, 1, …, n_max)`.
pub fn number(n_max: usize) -> ComplexMatrix {
    let diag: Vec<f64> = (0..=n_max).map(|n| n as f64).collect();
    ComplexMatrix::real_diagonal(&diag)
}

/// `|k⟩⟨k|` in dimension `dim`.
pub fn projector(dim: usize, k: usize) -> ComplexMatrix {
    ComplexMatrix::unit(dim, k, k)
}
