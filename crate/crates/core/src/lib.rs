//! Quadratic fermionic Lindblad equations through third quantization.
//!
//! For a Hamiltonian `H = Σ h_ij α†_i α_j` and a dissipator with gain and
//! loss matrices `Λ⁺`, `Λ⁻`, the Liouvillian's normal master modes follow
//! from the eigendecomposition of the `L x L` matrix
//! `P = (-ih/ħ - Λ⁺ - Λ⁻ᵗ)/2`, and the steady-state two-point function from
//! the Lyapunov equation `PΩ + ΩP† = Λ⁺` with `O = -Ωᵗ`.
//!
//! ```
//! use quadlind::{solve, Tolerances, XxChainParams};
//!
//! let model = XxChainParams::new(4, 1.0, 0.0, 2.0, 0.5)
//!     .with_fillings(1.0, 0.0)
//!     .model()
//!     .unwrap();
//! let (spectral, steady) = solve(&model, &Tolerances::default()).unwrap();
//! assert_eq!(spectral.rapidities.len(), 4);
//! assert!(steady.lyapunov_residual < 1e-12);
//! ```

pub mod dynamics;
pub mod error;
pub mod io;
pub mod linalg;
pub mod model;
pub mod oracle;
pub mod random;
pub mod spectral;
pub mod steady;
pub mod structure;
pub mod xx;

pub use dynamics::{evolve_covariance, spectral_gap, EvolutionResult};
pub use error::{Error, Result};
pub use linalg::CMat;
pub use model::{
    build_xx_chain, validate_model, ModelSpec, Tolerances, ValidatedModel, XxChainParams,
};
pub use num_complex::Complex64;
pub use spectral::{
    assemble_w1, full_spectrum, rapidities, similarity_log, summing_rule_residual, SpectralData,
    W1Assembly,
};
pub use steady::{solve, solve_lyapunov, SteadyStateData};
pub use structure::{build_k, build_m, build_p, check_m_symmetry, PauliBlocks, StructureMatrices};
pub use xx::{analytic_rapidities, check_condition, AnalyticSpectrum};
