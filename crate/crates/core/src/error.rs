use thiserror::Error;

/// Every failure the solver pipeline can report.
///
/// Variants split into two families: input problems ([`Error::is_validation`])
/// and numerical breakdowns such as marginal steady states or ill-conditioned
/// eigenbases.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {name} is {rows}x{cols}, expected {expected}x{expected}")]
    Dimension {
        name: &'static str,
        rows: usize,
        cols: usize,
        expected: usize,
    },

    #[error("{name} not Hermitian: max |A - A^H| = {violation:.3e} exceeds {tolerance:.3e}")]
    NotHermitian {
        name: &'static str,
        violation: f64,
        tolerance: f64,
    },

    #[error("{name} not PSD: min eigenvalue {min_eigenvalue:.3e} below -{tolerance:.3e}")]
    NotPositiveSemidefinite {
        name: &'static str,
        min_eigenvalue: f64,
        tolerance: f64,
    },

    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("eigensolver did not converge on a {dim}x{dim} matrix")]
    EigenNoConvergence { dim: usize },

    #[error(
        "eigenbasis ill-conditioned: condition estimate {condition:.3e} exceeds {threshold:.3e}"
    )]
    IllConditioned { condition: f64, threshold: f64 },

    #[error(
        "non-unique or marginal steady state: |lambda_{i} + conj(lambda_{j})| = {magnitude:.3e} <= {tolerance:.3e}"
    )]
    MarginalSteadyState {
        i: usize,
        j: usize,
        magnitude: f64,
        tolerance: f64,
    },

    #[error("no gap / marginal: max Re(lambda) = {max_real:.3e} is not negative")]
    NoGap { max_real: f64 },

    #[error("occupation eigenvalue {value:.6e} outside [0, 1] beyond tolerance; model/solver inconsistency")]
    OccupationOutOfRange { value: f64 },

    #[error("current undefined for non-chain model: h[{i}][{j}] = {magnitude:.3e} outside the tridiagonal band")]
    NotAChain { i: usize, j: usize, magnitude: f64 },

    #[error("closed form inapplicable: {reason}")]
    ClosedFormInapplicable { reason: String },

    #[error("divergent-beta edge case at k = {k} (kappa = 1, L = {sites} even)")]
    DivergentBeta { k: usize, sites: usize },

    #[error("secular-equation refinement failed for k = {k}")]
    RefinementFailed { k: usize },

    #[error("matrix logarithm undefined: {reason}")]
    LogUndefined { reason: String },

    #[error("multiset match failed: sizes {left} and {right} differ")]
    MultisetSize { left: usize, right: usize },

    #[error("oracle refused: L = {sites} exceeds L_max = {max_sites} (superoperator would need {bytes} bytes)")]
    OracleTooLarge {
        sites: usize,
        max_sites: usize,
        bytes: u128,
    },

    #[error("non-unique steady state: {count} eigenvalues of the superoperator within {tolerance:.3e} of zero")]
    NonUniqueSteadyState { count: usize, tolerance: f64 },

    #[error("invalid initial condition: {reason}")]
    InvalidInitialState { reason: String },

    #[error("model file: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by malformed or out-of-contract input.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension { .. }
                | Error::NotHermitian { .. }
                | Error::NotPositiveSemidefinite { .. }
                | Error::InvalidParameter { .. }
                | Error::NotAChain { .. }
                | Error::ClosedFormInapplicable { .. }
                | Error::OracleTooLarge { .. }
                | Error::InvalidInitialState { .. }
                | Error::Format(_)
        )
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            1
        } else {
            2
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
