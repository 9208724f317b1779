//! Wave transmission through random media with mirror symmetry.
//!
//! The library models a one dimensional random medium (or a multimode
//! waveguide) that is split in two halves by a thin reflecting barrier.
//! When the two halves are mirror images of each other, the mean
//! transmitted intensity behaves very differently from the case of two
//! statistically independent halves; with a strong enough barrier the
//! symmetry enhances transmission.
//!
//! The crate is organized in four layers:
//!
//! * [`scatter`]: exact 2x2 complex propagator and scattering algebra for
//!   barriers and generic one dimensional sections.
//! * [`analytic`]: transmission moments of a half medium in the white noise
//!   limit, and the series that give the mean transmitted intensity of the
//!   full system for mirrored and for independent halves.
//! * [`medium`]: sampled realizations of the fluctuation process, exact
//!   piecewise propagation of the wave equation across them, and Monte
//!   Carlo ensembles that serve as the oracle for the analytic layer.
//! * [`waveguide`]: the multimode generalization, with modal barrier
//!   matrices, the weak scattering transmissivity formulas, synthetic
//!   reflection ensembles and an exact block propagator reference.

pub mod analytic;
pub mod medium;
pub mod quad;
pub mod scatter;
pub mod waveguide;

/// Errors shared by every module of the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A parameter violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A propagator with alpha = 0 has no scattering representation.
    #[error("singular propagator: alpha vanishes")]
    SingularPropagator,
    /// A scattering composition hit a vanishing denominator.
    #[error("resonant denominator: modulus {0:.3e} below threshold")]
    Resonance(f64),
    /// Quadrature or series evaluation failed to converge.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use analytic::{
    deep_medium_moment, deep_medium_ratio_constant, localization_length, mean_intensity_independent,
    mean_intensity_symmetric, mixed_moment, strong_barrier_asymptotics, tau_coefficient,
    transmission_moment, weak_scattering_approx, LocalizationQuery, LocalizationRegime,
    SeriesControl,
};
pub use medium::{
    calibrate_sigma, integrate_half_propagator, inverse_localization_length,
    monte_carlo_mean_intensity, sample_medium, telegraph_lyapunov_exponent, EnsembleEstimate,
    MediumModel, MediumRealization, MediumSpec,
};
pub use scatter::{
    asymptotic_barrier, barrier_propagator, compose_propagators, compose_scattering,
    independent_system_transmission, mirror_propagator, propagator_to_scattering,
    system_transmission, BarrierAsymptotic, BarrierSpec, Propagator2, Regime, Scattering2,
};
pub use waveguide::{
    barrier_matrices_asymptotic, barrier_matrices_exact, build_mode_basis, enhancement_factors,
    exact_transmission_oracle, independent_mean_transmissivity, mean_transmissivity,
    sample_reflection_ensemble, system_transmission_matrix, transmissivity, BarrierModal,
    ModalScattering, ModeBasis, WaveguideGeometry,
};
