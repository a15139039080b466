//! Infinite-lattice quantities: return probabilities and Green values,
//! the finite-torus return probability, the Peierls constants, harmonic
//! measure of boxes, the limit excursion law and star self-avoiding paths.

mod bessel;
mod constants;
mod harmonic;
mod qlaw;
mod quadrature;
mod returns;
mod saw;
mod torus_return;

pub use bessel::ie0;
pub use constants::{constants_report, constants_row, ConstantsReport, ConstantsRow};
pub use harmonic::{
    box_boundary, harmonic_measure, orbit_key, HarmonicProfile, OrbitWeight, ProfileRecord, StartSampler,
};
pub use qlaw::{q_path_probability, sample_q, sample_q_summaries, QPath, QSamples, QSummary};
pub use quadrature::{integrate, Integral};
pub use returns::{
    escape_bias_bound, green_decay_constant, green_quadrature, q_nu, q_nu_asymptotic, q_nu_montecarlo,
    q_nu_quadrature, q_nu_quadrature_tol, q_truncated_exact, Method, ReturnProbability, ASYMPTOTIC_SWITCH,
    DEFAULT_TOLERANCE,
};
pub use saw::{star_saw_count, MAX_SAW_LENGTH};
pub use torus_return::{q_n_finite, FiniteReturn, EXACT_STATE_LIMIT};
