//! Closed-form machinery for a single damped cavity mode at zero temperature
//! on the truncated Fock space `{|0⟩, …, |n_max⟩}`.
//!
//! Every route here only lowers the photon number, so truncation is exact
//! for states supported below `n_max`; states close to the cutoff are still
//! flagged because downstream consumers (Kraus families with few terms, CLI
//! comparisons) lose reliability there.

use crate::algebra::{partial_trace_env, tensor_product, ComplexMatrix, C64, I};
use crate::error::{Error, Result};
use crate::expm::matrix_exponential;
use crate::model::{MasterEquation, StandardForm};
use crate::operators::{annihilation, creation, number, projector};
use crate::tolerance::DEFAULT_TRUNCATION_BUFFER;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    pub omega_f: f64,
    pub kappa: f64,
    pub n_max: usize,
}

impl CavityParams {
    pub fn new(omega_f: f64, kappa: f64, n_max: usize) -> Result<Self> {
        if !omega_f.is_finite() {
            return Err(Error::InvalidArgument(format!("omega_f {omega_f} is not finite")));
        }
        if !(kappa >= 0.0) || !kappa.is_finite() {
            return Err(Error::NegativeRate { what: "kappa".into(), rate: kappa });
        }
        if n_max < 1 {
            return Err(Error::InvalidArgument("n_max must be at least 1".into()));
        }
        Ok(Self { omega_f, kappa, n_max })
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// `H₀ = ω_f a†a` with the single channel `(a, κ)`.
    pub fn standard_form(&self) -> StandardForm {
        StandardForm::new(number(self.n_max).scale_real(self.omega_f))
            .lowering(annihilation(self.n_max), self.kappa)
    }

    pub fn model(&self) -> MasterEquation {
        MasterEquation::from_standard_form(&self.standard_form())
            .expect("validated cavity parameters form a valid model")
    }

    /// Highest level considered reliable for the default buffer.
    pub fn reliable_max(&self) -> usize {
        self.n_max.saturating_sub(DEFAULT_TRUNCATION_BUFFER)
    }
}

/// `g_t = 1 − e^{−κt}`.
pub fn g_factor(kappa: f64, t: f64) -> Result<f64> {
    if !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!("time must be >= 0, got {t}")));
    }
    Ok(-(-kappa * t).exp_m1())
}

/// `ln k!` for `k = 0..=n`.
fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Highest Fock level with a nonzero row or column in `rho`.
pub fn support_top(rho: &ComplexMatrix) -> usize {
    let a = rho.as_array();
    (0..a.nrows())
        .rev()
        .find(|&n| {
            a.row(n).iter().any(|z| *z != C64::new(0.0, 0.0))
                || a.column(n).iter().any(|z| *z != C64::new(0.0, 0.0))
        })
        .unwrap_or(0)
}

/// Evolved cavity state plus the truncation flag of its initial support.
#[derive(Debug, Clone, PartialEq)]
pub struct FockEvolution {
    pub rho: ComplexMatrix,
    pub truncation_warning: bool,
}

/// Fock-basis solution of the damped-cavity master equation,
///
/// ```text
/// ρ_pq(t) = e^{−iω(p−q)t} e^{−κ(p+q)t/2}
///           Σ_m (g_t^m / m!) √((p+m)!(q+m)! / (p! q!)) ρ_{p+m,q+m}(0)
/// ```
///
/// obtained by expanding the factorized lifted propagator in the Fock basis.
/// Coefficients are built in log space.
pub fn fock_solution(rho0: &ComplexMatrix, p: &CavityParams, t: f64) -> Result<FockEvolution> {
    let d = rho0.square_dim("cavity state")?;
    if d != p.dim() {
        return Err(Error::mismatch("cavity state", p.dim(), d));
    }
    let g = g_factor(p.kappa, t)?;
    let ln_g = g.ln();
    let lf = ln_factorials(p.n_max);
    let src = rho0.as_array();
    let rho = ComplexMatrix::from_fn(d, d, |(row, col)| {
        let top = row.max(col);
        let terms = if g == 0.0 { 0 } else { p.n_max - top };
        let mut sum = C64::new(0.0, 0.0);
        for m in 0..=terms {
            let ln_w = m as f64 * if m == 0 { 0.0 } else { ln_g } - lf[m]
                + 0.5 * (lf[row + m] + lf[col + m] - lf[row] - lf[col]);
            sum += src[(row + m, col + m)] * ln_w.exp();
        }
        let envelope = C64::from_polar(
            (-p.kappa * (row + col) as f64 * t / 2.0).exp(),
            -p.omega_f * (row as f64 - col as f64) * t,
        );
        envelope * sum
    });
    let rho = ComplexMatrix::from_array(rho.into_array())?;
    let truncation_warning = support_top(rho0) > p.reliable_max();
    if truncation_warning {
        log::warn!(
            "initial cavity state reaches level {} within {} of the cutoff {}",
            support_top(rho0),
            DEFAULT_TRUNCATION_BUFFER,
            p.n_max
        );
    }
    Ok(FockEvolution { rho, truncation_warning })
}

/// Inverse temperature of the thermal state reached from `e^{−β a†a}`:
/// `β(t) = β + κt + ln(1 − e^{−β}(1 − e^{−κt}))`.
pub fn thermal_beta(beta: f64, kappa: f64, t: f64) -> Result<f64> {
    if !(beta > 0.0) || !(t >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "thermal_beta needs beta > 0 and t >= 0, got {beta}, {t}"
        )));
    }
    let shrink = (-beta).exp() * g_factor(kappa, t)?;
    if shrink >= 1.0 {
        return Err(Error::NumericalRange(format!("log argument {} <= 0", 1.0 - shrink)));
    }
    Ok(beta + kappa * t + (-shrink).ln_1p())
}

/// `|n⟩⟨n|`.
pub fn fock_state(n: usize, n_max: usize) -> Result<ComplexMatrix> {
    if n > n_max {
        return Err(Error::InvalidArgument(format!("Fock level {n} above cutoff {n_max}")));
    }
    Ok(projector(n_max + 1, n))
}

/// `e^{−β a†a}` normalized on the truncated space.
pub fn thermal_state(beta: f64, n_max: usize) -> Result<ComplexMatrix> {
    if !(beta > 0.0) || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!("beta must be positive, got {beta}")));
    }
    let weights: Vec<f64> = (0..=n_max).map(|n| (-beta * n as f64).exp()).collect();
    let z: f64 = weights.iter().sum();
    let probs: Vec<f64> = weights.iter().map(|w| w / z).collect();
    Ok(ComplexMatrix::real_diagonal(&probs))
}

/// Amplitudes of the coherent state `|α⟩`, renormalized after truncation.
pub fn coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let lf = ln_factorials(n_max);
    let mut amps: Vec<C64> = (0..=n_max)
        .map(|n| {
            if alpha.norm() == 0.0 {
                return if n == 0 { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
            }
            let mag = (n as f64 * alpha.norm().ln() - 0.5 * lf[n]).exp();
            C64::from_polar(mag, n as f64 * alpha.arg())
        })
        .collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|z| *z /= norm);
    amps
}

pub fn coherent_state(alpha: C64, n_max: usize) -> ComplexMatrix {
    let v = coherent_amplitudes(alpha, n_max);
    ComplexMatrix::outer(&v, &v)
}

/// Factorized form of `exp(−iH̃t)` for the lifted cavity generator:
/// `e^{−i(ω−iκ/2)a†a t} e^{i(ω+iκ/2)b†b t} e^{g_t ab}`.
pub fn factorized_lifted_propagator(p: &CavityParams, t: f64) -> Result<ComplexMatrix> {
    let g = g_factor(p.kappa, t)?;
    let d = p.dim();
    let id = ComplexMatrix::identity(d);
    let a = annihilation(p.n_max);
    let ab = tensor_product(&a, &a);
    // e^{g ab} is a finite sum: ab is nilpotent on the truncated space.
    let mut term = ComplexMatrix::identity(d * d);
    let mut pair = term.clone();
    for m in 1..=p.n_max {
        term = term.dot(&ab).scale_real(g / m as f64);
        pair = &pair + &term;
    }
    let sys_phase: Vec<C64> = (0..d)
        .map(|n| (C64::new(-p.kappa / 2.0, -p.omega_f) * (n as f64 * t)).exp())
        .collect();
    let anc_phase: Vec<C64> = (0..d)
        .map(|n| (C64::new(-p.kappa / 2.0, p.omega_f) * (n as f64 * t)).exp())
        .collect();
    let free = tensor_product(&ComplexMatrix::diagonal(&sys_phase), &id)
        .dot(&tensor_product(&id, &ComplexMatrix::diagonal(&anc_phase)));
    ComplexMatrix::from_array(free.dot(&pair).into_array())
}

/// Kraus operators `A_m(t) = √(g_t^m/m!) e^{−(iω+κ/2)a†a t} a^m`, `m = 0..=m_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct KrausFamily {
    operators: Vec<ComplexMatrix>,
    time: f64,
    params: CavityParams,
}

impl KrausFamily {
    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn params(&self) -> &CavityParams {
        &self.params
    }

    pub fn m_max(&self) -> usize {
        self.operators.len() - 1
    }

    /// Levels on which `Σ A_m†A_m = 1` holds: `|n⟩` needs every term `m ≤ n`.
    pub fn reliable_max(&self) -> usize {
        self.m_max().min(self.params.n_max)
    }

    /// `Σ_m A_m†A_m`.
    pub fn completeness(&self) -> ComplexMatrix {
        let d = self.params.dim();
        self.operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| &acc + &a.adjoint().dot(a))
    }

    /// Largest entry of `Σ A_m†A_m − 1` on levels `0..=up_to`.
    pub fn completeness_residual(&self, up_to: usize) -> f64 {
        let c = self.completeness();
        let mut worst: f64 = 0.0;
        for r in 0..=up_to {
            for k in 0..=up_to {
                let want = if r == k { 1.0 } else { 0.0 };
                worst = worst.max((c.get(r, k) - want).norm());
            }
        }
        worst
    }

    /// `Σ_m A_m ρ A_m†`.
    pub fn apply(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = rho.square_dim("cavity state")?;
        if d != self.params.dim() {
            return Err(Error::mismatch("cavity state", self.params.dim(), d));
        }
        Ok(self
            .operators
            .iter()
            .fold(ComplexMatrix::zeros(d, d), |acc, a| &acc + &a.dot(rho).dot(&a.adjoint())))
    }
}

pub fn kraus_family(p: &CavityParams, t: f64, m_max: usize) -> Result<KrausFamily> {
    if m_max > p.n_max {
        return Err(Error::InvalidArgument(format!(
            "m_max {m_max} exceeds the cutoff {}",
            p.n_max
        )));
    }
    let g = g_factor(p.kappa, t)?;
    let d = p.dim();
    let decay: Vec<C64> = (0..d)
        .map(|n| (C64::new(-p.kappa / 2.0, -p.omega_f) * (n as f64 * t)).exp())
        .collect();
    let free = ComplexMatrix::diagonal(&decay);
    let a = annihilation(p.n_max);
    let mut a_pow = ComplexMatrix::identity(d);
    let mut weight = 1.0;
    let mut operators = Vec::with_capacity(m_max + 1);
    for m in 0..=m_max {
        if m > 0 {
            a_pow = a_pow.dot(&a);
            weight *= g / m as f64;
        }
        operators.push(free.dot(&a_pow).scale_real(weight.sqrt()));
    }
    Ok(KrausFamily {
        operators,
        time: t,
        params: *p,
    })
}

/// Mixing angle of the dilation: `cos θ_t = e^{−κt/2}`, taken with
/// `sin θ_t = −√g_t` so that `⟨m_b|U|0_b⟩ = A_m` without sign factors.
pub fn dilation_angle(kappa: f64, t: f64) -> Result<f64> {
    g_factor(kappa, t)?;
    Ok(-(-kappa * t / 2.0).exp().clamp(-1.0, 1.0).acos())
}

/// `U(t) = e^{−iω_f t a†a} e^{θ_t(a†b − b†a)}` on `cavity ⊗ environment`,
/// both truncated at `n_max`, cavity index major.
///
/// The mixing generator conserves `a†a + b†b`, so the truncated exponential
/// is exact on every sector with at most `n_max` total excitations.
pub fn dilation_unitary(p: &CavityParams, t: f64) -> Result<ComplexMatrix> {
    let theta = dilation_angle(p.kappa, t)?;
    let id = ComplexMatrix::identity(p.dim());
    let a = tensor_product(&annihilation(p.n_max), &id);
    let b = tensor_product(&id, &annihilation(p.n_max));
    let a_dag = tensor_product(&creation(p.n_max), &id);
    let b_dag = tensor_product(&id, &creation(p.n_max));
    let mixer = &a_dag.dot(&b) - &b_dag.dot(&a);
    let mixing = matrix_exponential(&mixer.scale_real(theta))?;
    let phases: Vec<C64> = (0..p.dim())
        .map(|n| (-I * (p.omega_f * t * n as f64)).exp())
        .collect();
    let free = tensor_product(&ComplexMatrix::diagonal(&phases), &id);
    Ok(free.dot(&mixing))
}

/// `⟨m_b| U |0_b⟩` as an operator on the cavity.
pub fn environment_block(u: &ComplexMatrix, n_max: usize, m: usize) -> ComplexMatrix {
    let d = n_max + 1;
    ComplexMatrix::from_fn(d, d, |(r, c)| u.get(r * d + m, c * d))
}

/// `Tr_E(U (ρ ⊗ |0⟩⟨0|_E) U†)`.
pub fn dilation_evolve(rho0: &ComplexMatrix, p: &CavityParams, t: f64) -> Result<ComplexMatrix> {
    let d = rho0.square_dim("cavity state")?;
    if d != p.dim() {
        return Err(Error::mismatch("cavity state", p.dim(), d));
    }
    let u = dilation_unitary(p, t)?;
    let joint = tensor_product(rho0, &projector(d, 0));
    let evolved = u.dot(&joint).dot(&u.adjoint());
    partial_trace_env(&evolved, d, d)
}
