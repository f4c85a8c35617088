//! Numerical machinery for a supersymmetric fractal model of the Riemann
//! zeta zeros: the smooth Wu-Sprung potential and its inversion, a truncated
//! Weierstrass fractal perturbation, CBC quantization integrals with an
//! Abel-kernel endpoint singularity, differential-evolution parameter fits,
//! and post-fit statistics.

pub mod analysis;
pub mod cbc;
pub mod error;
pub mod format;
pub mod fractal;
pub mod optimize;
pub mod potential;
pub mod special;
pub mod zeros;

pub use analysis::{fractal_identity_check, phase_shift_correlation, rao_spacing_statistic, residual_series, unfold, uniform_theta_grid, wrap_angle, CorrelationCurve, IdentityCheck, NamedConstants, RaoSignificance};
pub use cbc::{adjust_turning_point, cbc_integral, cbc_ratio_series, default_adjust_interval, CbcIntegral, CbcRecord, CbcReport, QuadratureConfig, Substitution};
pub use error::{Error, Result};
pub use fractal::{affine_weierstrass, phi_squared, weierstrass_real, FractalParams};
pub use optimize::{differential_evolution, fit_phases_fixed_x, iterate_two_step, objective, replay, FitProblem, FitResult, ObjectiveValue, PhaseMode, SigmaMode, TwoStepIteration, XMode};
pub use potential::{PotentialConfig, SmoothPotential, V0};
pub use zeros::{compute_zeros, ingest_zeros, riemann_siegel_z, z_accurate, ZeroSource, ZeroTable};
