//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection follows Higham (2005): the smallest of the [m/m]
//! approximants m ∈ {3, 5, 7, 9} whose 1-norm bound θ_m covers the input,
//! otherwise [13/13] on `A / 2^s` followed by `s` squarings. The generators
//! handled here are non-Hermitian, possibly defective, so no eigendecomposition
//! path exists.

use crate::algebra::{ComplexMatrix, C64};
use crate::error::{Error, Result};

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152e0;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Beyond this many squarings the result has long since left f64 range.
const MAX_SQUARINGS: i32 = 1100;

/// `exp(m)` for a square complex matrix.
///
/// Returns [`Error::NumericalRange`] instead of a matrix containing `Inf` or
/// `NaN` when the exponential cannot be represented.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = m.square_dim("matrix_exponential")?;
    let norm = m.norm_one();
    if !norm.is_finite() {
        return Err(Error::NumericalRange("input norm is not finite".into()));
    }
    if norm == 0.0 {
        return Ok(ComplexMatrix::identity(n));
    }

    for &(degree, theta) in &THETA {
        if norm <= theta {
            let (u, v) = match degree {
                3 => pade_low(m, &B3),
                5 => pade_low(m, &B5),
                7 => pade_low(m, &B7),
                _ => pade_low(m, &B9),
            };
            return finish(solve_pade(&u, &v)?);
        }
    }

    let s = (norm / THETA_13).log2().ceil().max(0.0) as i32;
    if s > MAX_SQUARINGS {
        return Err(Error::NumericalRange(format!(
            "norm {norm:e} needs {s} squarings"
        )));
    }
    let scaled = m.scale_real(2f64.powi(-s));
    let (u, v) = pade_13(&scaled);
    let mut r = solve_pade(&u, &v)?;
    for _ in 0..s {
        r = r.dot(&r);
        if r.as_array().iter().any(|z| !z.is_finite()) {
            return Err(Error::NumericalRange("overflow while squaring".into()));
        }
    }
    finish(r)
}

fn finish(r: ComplexMatrix) -> Result<ComplexMatrix> {
    ComplexMatrix::from_array(r.into_array())
}

/// Odd part `U` and even part `V` of the [m/m] approximant, m ≤ 9.
fn pade_low(a: &ComplexMatrix, b: &[f64]) -> (ComplexMatrix, ComplexMatrix) {
    let n = a.rows();
    let a2 = a.dot(a);
    let mut powers = vec![ComplexMatrix::identity(n), a2.clone()];
    while powers.len() < b.len() / 2 {
        let next = powers.last().unwrap().dot(&a2);
        powers.push(next);
    }
    let mut odd = ComplexMatrix::zeros(n, n);
    let mut even = ComplexMatrix::zeros(n, n);
    for (k, p) in powers.iter().enumerate() {
        odd = &odd + &p.scale_real(b[2 * k + 1]);
        even = &even + &p.scale_real(b[2 * k]);
    }
    (a.dot(&odd), even)
}

fn pade_13(a: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let b = &B13;
    let n = a.rows();
    let id = ComplexMatrix::identity(n);
    let a2 = a.dot(a);
    let a4 = a2.dot(&a2);
    let a6 = a4.dot(&a2);
    let lin = |c6: f64, c4: f64, c2: f64| -> ComplexMatrix {
        &(&a6.scale_real(c6) + &a4.scale_real(c4)) + &a2.scale_real(c2)
    };
    let u_inner = &a6.dot(&lin(b[13], b[11], b[9])) + &(&lin(b[7], b[5], b[3]) + &id.scale_real(b[1]));
    let u = a.dot(&u_inner);
    let v = &a6.dot(&lin(b[12], b[10], b[8])) + &(&lin(b[6], b[4], b[2]) + &id.scale_real(b[0]));
    (u, v)
}

/// Solves `(V − U) R = V + U`.
fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    let den = (v - u).to_nalgebra();
    let num = (v + u).to_nalgebra();
    let r = den
        .lu()
        .solve(&num)
        .ok_or_else(|| Error::NumericalRange("singular Padé denominator".into()))?;
    Ok(ComplexMatrix::from_nalgebra(&r))
}

/// `exp(-i·h·t)` for a time-independent generator `h`.
pub fn evolution_operator(h: &ComplexMatrix, t: f64) -> Result<ComplexMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidArgument(format!("time {t} is not finite")));
    }
    matrix_exponential(&h.scale(C64::new(0.0, -t)))
}
