//! Run configuration: a TOML file with a schema version, overridable from
//! the command line. Unknown keys are rejected.

use br_core::params::{Exponent, Params};
use br_core::{Error, Result};
use serde::Deserialize;
use std::path::{Path, PathBuf};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub params: ParamsBlock,
    #[serde(default)]
    pub grids: GridsBlock,
    #[serde(default)]
    pub tolerances: TolerancesBlock,
    #[serde(default)]
    pub run: RunBlock,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsBlock {
    pub d: u32,
    /// "inf" or a number >= 1
    pub p: String,
    pub delta: f64,
    pub gamma: f64,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        ParamsBlock {
            d: 2,
            p: "inf".into(),
            delta: 0.3,
            gamma: 0.2,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridsBlock {
    /// eps = 2^{-e} for each exponent listed.
    pub eps_exponents: Vec<u32>,
    /// radii per member for pointwise checks
    pub x_per_member: usize,
    pub k_lo: u32,
    pub k_hi: u32,
    pub j_max: u32,
    pub t: f64,
    /// dyadic decomposition base index (desk-scale default 4)
    pub base_index: i32,
}

impl Default for GridsBlock {
    fn default() -> Self {
        GridsBlock {
            eps_exponents: (4..=10).collect(),
            x_per_member: 10,
            k_lo: 1,
            k_hi: 10,
            j_max: 3,
            t: 1.0,
            base_index: 4,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesBlock {
    pub slope_window: f64,
    pub divergence_slope_rel: f64,
    pub dual_route_rel: f64,
    pub plancherel_rel: f64,
    pub reconstruction_abs: f64,
    pub subordination_rel: f64,
    pub cross_term_rel: f64,
}

impl Default for TolerancesBlock {
    fn default() -> Self {
        TolerancesBlock {
            slope_window: 0.1,
            divergence_slope_rel: 0.15,
            dual_route_rel: 1e-4,
            plancherel_rel: 1e-4,
            reconstruction_abs: 1e-6,
            subordination_rel: 1e-3,
            cross_term_rel: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunBlock {
    pub cache_dir: PathBuf,
    pub out_dir: PathBuf,
    /// 0 = use all cores
    pub jobs: usize,
    pub no_cache: bool,
    /// seed for deterministic jitter of A_j sample radii
    pub seed: u64,
}

impl Default for RunBlock {
    fn default() -> Self {
        RunBlock {
            cache_dir: PathBuf::from(".br-cache"),
            out_dir: PathBuf::from("out"),
            jobs: 0,
            no_cache: false,
            seed: 7,
        }
    }
}

impl Default for FileConfig {
    fn default() -> Self {
        FileConfig {
            schema_version: SCHEMA_VERSION,
            params: ParamsBlock::default(),
            grids: GridsBlock::default(),
            tolerances: TolerancesBlock::default(),
            run: RunBlock::default(),
        }
    }
}

/// Command-line overrides applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub d: Option<u32>,
    pub p: Option<String>,
    pub delta: Option<f64>,
    pub gamma: Option<f64>,
    pub out: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub no_cache: bool,
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub file: FileConfig,
    pub p: Exponent,
}

pub fn load(path: Option<&Path>, over: &Overrides) -> Result<RunConfig> {
    let mut file = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::InvalidParam(format!("config {p:?}: {e}")))?;
            toml::from_str::<FileConfig>(&text)
                .map_err(|e| Error::InvalidParam(format!("config {p:?}: {e}")))?
        }
        None => FileConfig::default(),
    };
    if file.schema_version != SCHEMA_VERSION {
        return Err(Error::InvalidParam(format!(
            "config schema_version {} != supported {SCHEMA_VERSION}",
            file.schema_version
        )));
    }
    if let Some(d) = over.d {
        file.params.d = d;
    }
    if let Some(p) = &over.p {
        file.params.p = p.clone();
    }
    if let Some(delta) = over.delta {
        file.params.delta = delta;
    }
    if let Some(gamma) = over.gamma {
        file.params.gamma = gamma;
    }
    if let Some(out) = &over.out {
        file.run.out_dir = out.clone();
    }
    if let Some(cache) = &over.cache {
        file.run.cache_dir = cache.clone();
    }
    if let Some(jobs) = over.jobs {
        file.run.jobs = jobs;
    }
    if over.no_cache {
        file.run.no_cache = true;
    }
    let p: Exponent = file.params.p.parse()?;
    // validate the parameter block against the core invariants before any
    // computation (epsilon is per-sweep, validated per member)
    let probe_eps = 2f64.powi(-(file.grids.eps_exponents.first().copied().unwrap_or(4) as i32));
    Params::new(file.params.d, p, file.params.delta, file.params.gamma, probe_eps)?;
    if file.grids.eps_exponents.is_empty() {
        return Err(Error::InvalidParam("grids.eps_exponents is empty".into()));
    }
    if file.grids.k_hi < file.grids.k_lo {
        return Err(Error::InvalidParam("grids: k_hi < k_lo".into()));
    }
    Ok(RunConfig { file, p })
}

impl RunConfig {
    pub fn eps_grid(&self) -> Vec<f64> {
        self.file
            .grids
            .eps_exponents
            .iter()
            .map(|&e| 2f64.powi(-(e as i32)))
            .collect()
    }

    /// Content hash of the configuration (cache keys, report provenance).
    pub fn config_hash(&self) -> u64 {
        let s = format!("{:?}", self.file);
        br_core::tables::fnv1a(s.as_bytes())
    }
}
