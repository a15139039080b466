//! Total variation between the pooled torus excursion law and the limit
//! law as the halo radius `r` grows at fixed `L`.

use serde::{Deserialize, Serialize};

use super::histogram::{ExcursionSummary, SummaryAxis, SummaryHistogram};
use super::quw::{sample_quw, QuwParams};
use super::tv::{tv_distance_with, TvEstimate, DEFAULT_BOOTSTRAP};
use crate::error::{Error, Result};
use crate::potential_theory::{harmonic_measure, sample_q_summaries};

/// `N = 4r + 8`, which is already even.
pub fn side_for(r: usize) -> usize {
    4 * r + 8
}

/// Escape radius for the limit-law side: `max(64 L, 1024)`.
pub fn default_q_escape(core: usize) -> usize {
    (64 * core).max(1024)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyParams {
    pub d: usize,
    #[serde(rename = "L")]
    pub core: usize,
    pub r_list: Vec<usize>,
    /// Torus excursions per `r`.
    pub n: u64,
    /// Limit-law draws, shared by all rows.
    pub n_q: u64,
    /// Walks per orbit for the harmonic measure.
    pub profile_samples: u64,
    pub q_escape_radius: Option<usize>,
    pub axis: SummaryAxis,
    pub bootstrap: usize,
    pub seed: u64,
}

impl StudyParams {
    pub fn new(d: usize, core: usize, r_list: Vec<usize>, n: u64) -> Self {
        Self {
            d,
            core,
            r_list,
            n,
            n_q: n,
            profile_samples: 100_000,
            q_escape_radius: None,
            axis: SummaryAxis::TraceSizeBucket,
            bootstrap: DEFAULT_BOOTSTRAP,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StudyRow {
    #[serde(rename = "L")]
    pub core: usize,
    pub r: usize,
    #[serde(rename = "N")]
    pub side: usize,
    pub n: u64,
    pub tv: TvEstimate,
    /// Total variation the truncated limit-law sampler may be off by.
    pub q_bias_bound: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScalingStudy {
    pub params: StudyParams,
    pub capacity: f64,
    pub q_escape_radius: usize,
    pub rows: Vec<StudyRow>,
}

pub fn tv_scaling_study(params: &StudyParams) -> Result<ScalingStudy> {
    if params.r_list.is_empty() {
        return Err(Error::Parameter("empty r list".into()));
    }
    let (d, core) = (params.d, params.core);
    let escape = params.q_escape_radius.unwrap_or_else(|| default_q_escape(core));
    if escape < 64 * core {
        return Err(Error::Parameter(format!("limit-law escape radius {escape} < 64 L")));
    }
    // validate every row before spending time on the limit law
    let setups = params
        .r_list
        .iter()
        .map(|&r| QuwParams::two_centers(d, side_for(r), core, r))
        .collect::<Result<Vec<_>>>()?;

    let profile = harmonic_measure(core, d, escape, params.profile_samples, params.seed)?;
    let q = sample_q_summaries(&profile, escape, params.n_q, params.seed, 0)?;
    let q_summaries: Vec<ExcursionSummary> = q.samples.into_iter().map(Into::into).collect();
    let q_hist = SummaryHistogram::from_summaries(params.axis, d, core, &q_summaries)?;
    // a return after leaving B(0, R) is the only way the truncated sampler
    // differs from the limit law
    let q_bias_bound = (2.0 * q.bias_bound).min(2.0);

    let mut rows = Vec::new();
    for (k, setup) in setups.iter().enumerate() {
        let s = sample_quw(setup, params.n, params.seed.wrapping_add(k as u64 + 1))?;
        let p_hist = SummaryHistogram::from_summaries(params.axis, d, core, &s.summaries)?;
        let tv = tv_distance_with(&p_hist, &q_hist, params.bootstrap, params.seed.wrapping_add(k as u64))?;
        rows.push(StudyRow {
            core,
            r: setup.r,
            side: setup.side,
            n: params.n,
            tv,
            q_bias_bound,
        });
    }
    Ok(ScalingStudy {
        params: params.clone(),
        capacity: profile.capacity,
        q_escape_radius: escape,
        rows,
    })
}
