//! Pointer-state selection for open quantum systems whose free dynamics lives
//! in a finite-dimensional Lie algebra.

pub mod adjoint;
pub mod algebra;
pub mod bath;
pub mod dynamics;
pub mod error;
pub mod functional;
pub mod linalg;
pub mod optimizer;
pub mod qbm;
pub mod quadrature;
pub mod scalar;
pub mod spin;
pub mod state;

pub use error::{Error, Result};
pub use scalar::{Real, C};

pub use adjoint::{build_ad_matrix, canonical_decomposition, rotation_by_exponential};
pub use algebra::{killing_form, normalize_basis, CommutatorCheck};
pub use bath::{regulated_moments, BathKind, Beta, Cutoff, ZeroMode};
pub use dynamics::{averaged_rate_oracle, integrate, linear_entropy, AveragingConfig, IntegratorConfig};
pub use functional::{entropy_production, high_t_metric, EntropyOptions, GammaTermConvention, Regime};
pub use optimizer::{brute_force_min, haar_random_state, minimize, riemannian_gradient, OptimizerConfig};
pub use qbm::{oscillator_model, DEFAULT_TRUNCATION};
pub use spin::{coherent_entropy, coherent_minimum, coherent_state, spin1_solve, Spin};

pub type LieModelF64 = algebra::LieModel<f64>;
pub type StructureConstantsF64 = algebra::StructureConstants<f64>;
pub type AdjointDecompositionF64 = adjoint::AdjointDecomposition<f64>;
pub type SpectralDensityF64 = bath::SpectralDensity<f64>;
pub type BathF64 = bath::Bath<f64>;
pub type BathCoefficientsF64 = bath::BathCoefficients<f64>;
pub type EntropyModelF64 = functional::EntropyModel<f64>;
pub type EntropyReportF64 = functional::EntropyReport<f64>;
pub type QuadraticFunctionalF64 = functional::QuadraticFunctional<f64>;
pub type PureStateF64 = state::PureState<f64>;
pub type SieveResultF64 = optimizer::SieveResult<f64>;
pub type SpinModelF64 = spin::SpinModel<f64>;
pub type Spin1SolutionF64 = spin::Spin1Solution<f64>;
pub type MasterOperatorF64 = dynamics::MasterOperator<f64>;
pub type TrajectoryF64 = dynamics::Trajectory<f64>;
pub type OscillatorModelF64 = qbm::OscillatorModel<f64>;
pub type CMatF64 = linalg::CMat<f64>;
