//! Empirical comparison of the torus excursion law through a box with its
//! infinite-lattice limit.

mod histogram;
mod quw;
mod study;
mod tv;

pub use histogram::{trace_bucket, ExcursionSummary, SummaryAxis, SummaryHistogram};
pub use quw::{sample_quw, QuwParams, QuwSamples};
pub use study::{default_q_escape, side_for, tv_scaling_study, ScalingStudy, StudyParams, StudyRow};
pub use tv::{maximal_coupling, tv_distance, tv_distance_with, Coupling, TvEstimate, DEFAULT_BOOTSTRAP};
