//! Numerical tolerances shared by the kernels, the physics checks and the CLI.

/// Central tolerance record.
///
/// `kernel` bounds pure linear-algebra identities (exponential accuracy,
/// vectorization round trips). `physics` bounds cross-method agreement of
/// evolved states. The remaining fields gate diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub kernel: f64,
    pub physics: f64,
    /// Hermiticity deviation of an input state above which a warning is logged.
    pub hermiticity_warning: f64,
    /// Residual of `[H0, X] = ±ω X` above which a warning is logged.
    pub eigenoperator_warning: f64,
    /// Trace deviation above which a run is flagged.
    pub trace_flag: f64,
    /// Allowed Hermiticity deviation for a standard-form `H0`.
    pub hermitian_input: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        kernel: 1e-12,
        physics: 1e-8,
        hermiticity_warning: 1e-10,
        eigenoperator_warning: 1e-8,
        trace_flag: 1e-10,
        hermitian_input: 1e-12,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Largest system dimension the dense lifted engine accepts (lifted dimension 4096).
pub const MAX_LIFTED_SYSTEM_DIM: usize = 64;

/// RK4 refuses steps with `h * ||generator|| > RK4_STEP_LIMIT`.
pub const RK4_STEP_LIMIT: f64 = 0.1;

/// Levels kept free below the Fock cutoff before results are flagged.
pub const DEFAULT_TRUNCATION_BUFFER: usize = 8;
