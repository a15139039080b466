//! Command configurations. Every field has a default, so `{}` is a valid
//! config for each command; unknown keys are rejected.
//!
//! `jobs` caps the worker pool. It is excluded from the config hash since
//! it cannot change any result.

use serde::de::DeserializeOwned;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::coupling_lab::SummaryAxis;
use crate::error::{Error, Result};

pub const FORMAT_VERSION: u32 = 1;

fn err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn check(ok: bool, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(err(msg))
    }
}

fn check_u(us: &[f64]) -> Result<()> {
    check(!us.is_empty(), "u grid is empty")?;
    check(us.iter().all(|u| u.is_finite() && *u >= 0.0), "u values must be finite and >= 0")
}

fn check_torus(d: usize, n: usize) -> Result<()> {
    check((1..=8).contains(&d), "d must lie in 1..=8")?;
    check(n >= 2, "N must be at least 2")?;
    check(
        (n as f64).powi(d as i32) <= 2f64.powi(31),
        "N^d exceeds 2^31 cells",
    )
}

pub trait CommandConfig: Serialize + DeserializeOwned + JsonSchema + Default + Clone + Send + Sync {
    const COMMAND: &'static str;

    fn validate(&self) -> Result<()>;
    fn seed(&self) -> u64;
    fn set_seed(&mut self, seed: u64);
    fn jobs(&self) -> Option<usize>;
}

macro_rules! seeded {
    ($t:ty, $name:literal) => {
        impl CommandConfig for $t {
            const COMMAND: &'static str = $name;

            fn validate(&self) -> Result<()> {
                self.check()
            }
            fn seed(&self) -> u64 {
                self.seed
            }
            fn set_seed(&mut self, seed: u64) {
                self.seed = seed;
            }
            fn jobs(&self) -> Option<usize> {
                self.jobs
            }
        }
    };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct SurvivalConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub side: usize,
    pub u: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for SurvivalConfig {
    fn default() -> Self {
        Self {
            d: 3,
            side: 60,
            u: vec![0.5, 1.0, 2.0, 4.0],
            replicas: 20,
            seed: 1,
            jobs: None,
        }
    }
}

impl SurvivalConfig {
    fn check(&self) -> Result<()> {
        check_torus(self.d, self.side)?;
        check_u(&self.u)?;
        check(self.replicas >= 2, "need at least 2 replicas")
    }
}
seeded!(SurvivalConfig, "survival");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ScanConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub side: usize,
    pub u: Vec<f64>,
    pub replicas: u64,
    /// `K` for the run length `floor(K ln N)` of V, U, C and the giant.
    #[serde(rename = "K")]
    pub k_runs: f64,
    pub beta: f64,
    /// Largest-component fraction whose crossing is reported.
    pub level: f64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            d: 4,
            side: 40,
            u: (1..=12).map(|k| 0.5 * k as f64).collect(),
            replicas: 10,
            k_runs: 1.0,
            beta: 0.8,
            level: 0.05,
            seed: 2,
            jobs: None,
        }
    }
}

impl ScanConfig {
    fn check(&self) -> Result<()> {
        check_torus(self.d, self.side)?;
        check(self.d >= 2, "scan needs d >= 2")?;
        check_u(&self.u)?;
        check(self.replicas >= 1, "need at least 1 replica")?;
        check(self.k_runs > 0.0 && self.beta >= 0.0, "need K > 0 and beta >= 0")?;
        check(self.level > 0.0 && self.level < 1.0, "level must lie in (0, 1)")
    }
}
seeded!(ScanConfig, "scan-u");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct SegmentsConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub sides: Vec<usize>,
    pub u: Vec<f64>,
    #[serde(rename = "K")]
    pub k: Vec<f64>,
    pub beta: f64,
    /// `K` of the long-run column: runs of at least `floor(K ln N) + 1` cells.
    pub run_k: f64,
    pub replicas: u64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for SegmentsConfig {
    fn default() -> Self {
        Self {
            d: 4,
            sides: vec![20, 30, 40],
            u: vec![0.3, 6.0],
            k: vec![0.5],
            beta: 0.98,
            run_k: 2.0,
            replicas: 20,
            seed: 3,
            jobs: None,
        }
    }
}

impl SegmentsConfig {
    fn check(&self) -> Result<()> {
        check(!self.sides.is_empty(), "N list is empty")?;
        for &n in &self.sides {
            check_torus(self.d, n)?;
        }
        check_u(&self.u)?;
        check(!self.k.is_empty() && self.k.iter().all(|&k| k > 0.0), "K list must be nonempty and positive")?;
        check(self.beta >= 0.0 && self.run_k > 0.0, "need beta >= 0 and run_k > 0")?;
        check(self.replicas >= 1, "need at least 1 replica")
    }
}
seeded!(SegmentsConfig, "segments");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct LargestBallConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub sides: Vec<usize>,
    pub u: f64,
    pub replicas: u64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for LargestBallConfig {
    fn default() -> Self {
        Self {
            d: 3,
            sides: vec![32, 64, 128],
            u: 1.0,
            replicas: 20,
            seed: 4,
            jobs: None,
        }
    }
}

impl LargestBallConfig {
    fn check(&self) -> Result<()> {
        check(self.d >= 3, "largest-ball needs d >= 3")?;
        check(!self.sides.is_empty(), "N list is empty")?;
        for &n in &self.sides {
            check_torus(self.d, n)?;
        }
        check_u(&[self.u])?;
        check(self.replicas >= 2, "need at least 2 replicas")
    }
}
seeded!(LargestBallConfig, "largest-ball");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ExcursionsConfig {
    pub d: usize,
    #[serde(rename = "N")]
    pub side: usize,
    /// Probe core radii.
    #[serde(rename = "L")]
    pub cores: Vec<usize>,
    /// Probe halo radius as a multiple of `L`.
    pub halo_factor: usize,
    pub u: Vec<f64>,
    pub replicas: u64,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for ExcursionsConfig {
    fn default() -> Self {
        Self {
            d: 3,
            side: 40,
            cores: vec![2, 4, 8],
            halo_factor: 2,
            u: vec![1.0, 2.0, 4.0, 8.0],
            replicas: 20,
            seed: 5,
            jobs: None,
        }
    }
}

impl ExcursionsConfig {
    fn check(&self) -> Result<()> {
        check_torus(self.d, self.side)?;
        check(self.side >= 8, "N must be at least 8 for the N/8, N/4 boxes")?;
        check_u(&self.u)?;
        check(!self.cores.is_empty() && self.halo_factor >= 1, "need L values and halo_factor >= 1")?;
        for &l in &self.cores {
            check(2 * l * self.halo_factor + 1 <= self.side, "probe halo does not fit the torus")?;
        }
        check(self.replicas >= 2, "need at least 2 replicas")
    }
}
seeded!(ExcursionsConfig, "excursions");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct CouplingConfig {
    pub d: usize,
    #[serde(rename = "L")]
    pub core: usize,
    pub r: Vec<usize>,
    /// Torus excursions per `r`.
    pub n: u64,
    /// Limit-law draws.
    pub n_q: u64,
    pub profile_samples: u64,
    pub q_escape_radius: Option<usize>,
    pub axis: SummaryAxis,
    pub bootstrap: usize,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for CouplingConfig {
    fn default() -> Self {
        Self {
            d: 3,
            core: 2,
            r: vec![20, 40, 80],
            n: 200_000,
            n_q: 200_000,
            profile_samples: 50_000,
            q_escape_radius: None,
            axis: SummaryAxis::TraceSizeBucket,
            bootstrap: 200,
            seed: 6,
            jobs: None,
        }
    }
}

impl CouplingConfig {
    fn check(&self) -> Result<()> {
        check(self.d >= 3, "coupling needs d >= 3")?;
        check(!self.r.is_empty(), "r list is empty")?;
        check(self.r.iter().all(|&r| r >= 10 * self.core), "every r must be >= 10 L")?;
        check(self.n >= 1 && self.n_q >= 1 && self.profile_samples >= 1, "sample counts must be positive")
    }
}
seeded!(CouplingConfig, "coupling");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ConstantsConfig {
    pub d: Vec<u32>,
    pub tolerance: f64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for ConstantsConfig {
    fn default() -> Self {
        Self {
            d: vec![5, 6, 7, 8, 10, 20, 50, 100, 120, 121, 122, 123, 124, 125, 150, 200, 1000, 10000],
            tolerance: crate::potential_theory::DEFAULT_TOLERANCE,
            jobs: None,
        }
    }
}

impl CommandConfig for ConstantsConfig {
    const COMMAND: &'static str = "constants";

    fn validate(&self) -> Result<()> {
        check(self.d.iter().all(|&d| d >= 5), "every d must be >= 5")?;
        check(self.tolerance > 0.0 && self.tolerance < 1e-3, "tolerance must lie in (0, 1e-3)")
    }
    fn seed(&self) -> u64 {
        0
    }
    fn set_seed(&mut self, _: u64) {}
    fn jobs(&self) -> Option<usize> {
        self.jobs
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct FiniteTorusConfig {
    pub d: u32,
    pub m: u32,
    #[serde(rename = "N")]
    pub sides: Vec<usize>,
    pub samples: u64,
}

impl Default for FiniteTorusConfig {
    fn default() -> Self {
        Self {
            d: 5,
            m: 2,
            sides: vec![8, 16, 32, 64],
            samples: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct QnuConfig {
    pub nu: Vec<u32>,
    pub tolerance: f64,
    /// Monte Carlo cross-check for these `ν`.
    pub montecarlo_nu: Vec<u32>,
    pub montecarlo_samples: u64,
    /// Escape radius of the Monte Carlo walks; by default the smallest
    /// power of two (at most 1024) whose bias bound is below `1e-4`.
    pub escape_radius: Option<usize>,
    pub finite: Option<FiniteTorusConfig>,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for QnuConfig {
    fn default() -> Self {
        Self {
            nu: vec![3, 4, 5, 6, 7, 50, 100, 200],
            tolerance: crate::potential_theory::DEFAULT_TOLERANCE,
            montecarlo_nu: vec![3, 4, 5, 6, 7],
            montecarlo_samples: 1_000_000,
            escape_radius: None,
            finite: Some(FiniteTorusConfig::default()),
            seed: 7,
            jobs: None,
        }
    }
}

impl QnuConfig {
    fn check(&self) -> Result<()> {
        check(self.nu.iter().chain(&self.montecarlo_nu).all(|&v| v >= 3), "every nu must be >= 3")?;
        check(self.escape_radius.is_none_or(|r| r >= 2), "escape radius must be >= 2")?;
        check(self.tolerance > 0.0 && self.tolerance < 1e-3, "tolerance must lie in (0, 1e-3)")?;
        if let Some(f) = &self.finite {
            check(f.m >= 1 && f.m + 3 <= f.d, "finite torus needs 1 <= m <= d - 3")?;
            check(f.sides.iter().all(|&n| n >= 2), "finite torus sides must be >= 2")?;
            check(f.samples >= 1, "finite torus needs samples")?;
        }
        Ok(())
    }
}
seeded!(QnuConfig, "qnu");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    /// Randomized grids per exact-oracle comparison.
    pub cases: usize,
    /// Largest torus side for the exhaustive comparisons.
    pub max_side: usize,
    /// Optional grid file to load and check first.
    pub grid: Option<String>,
    pub seed: u64,
    #[serde(skip_serializing)]
    pub jobs: Option<usize>,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        Self {
            cases: 64,
            max_side: 8,
            grid: None,
            seed: 8,
            jobs: None,
        }
    }
}

impl ValidateConfig {
    fn check(&self) -> Result<()> {
        check(self.cases >= 1, "need at least one case")?;
        check((3..=8).contains(&self.max_side), "max_side must lie in 3..=8")
    }
}
seeded!(ValidateConfig, "validate");

/// Parses a config, applies the seed override and validates it.
pub fn parse_config<C: CommandConfig>(json: &str, seed: Option<u64>) -> Result<C> {
    let text = if json.trim().is_empty() { "{}" } else { json };
    let mut c: C = serde_json::from_str(text).map_err(|e| err(format!("{}: {e}", C::COMMAND)))?;
    if let Some(s) = seed {
        c.set_seed(s);
    }
    c.validate()?;
    Ok(c)
}

/// The resolved config as canonical JSON, tagged with the command and
/// format version.
pub fn resolved_json<C: CommandConfig>(c: &C) -> serde_json::Value {
    serde_json::json!({
        "command": C::COMMAND,
        "format_version": FORMAT_VERSION,
        "config": c,
    })
}

/// JSON Schema of a command's config file.
pub fn config_schema<C: CommandConfig>() -> serde_json::Value {
    serde_json::to_value(schemars::schema_for!(C)).expect("schemas serialize")
}

/// SHA-256 of the resolved config, hex encoded.
pub fn config_hash<C: CommandConfig>(c: &C) -> String {
    let bytes = serde_json::to_vec(&resolved_json(c)).expect("configs serialize");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}
