use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Number of measurement shots, or the noiseless infinite-sampling limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ShotCount {
    Finite(u64),
    Infinite,
}

impl ShotCount {
    pub fn finite(self) -> Option<u64> {
        match self {
            ShotCount::Finite(s) => Some(s),
            ShotCount::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, ShotCount::Infinite)
    }
}

impl fmt::Display for ShotCount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ShotCount::Finite(s) => write!(f, "{s}"),
            ShotCount::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for ShotCount {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let t = s.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinite") {
            return Ok(ShotCount::Infinite);
        }
        // accept 1e5-style literals as long as they are integral
        let v: f64 = t.parse().map_err(|_| format!("not a shot count: `{t}`"))?;
        if v.fract() != 0.0 || v < 0.0 || v > u64::MAX as f64 {
            return Err(format!("not a shot count: `{t}`"));
        }
        Ok(ShotCount::Finite(v as u64))
    }
}

impl Serialize for ShotCount {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ShotCount::Finite(n) => s.serialize_u64(*n),
            ShotCount::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ShotCount {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Int(i64),
            Float(f64),
            Text(String),
        }
        let parsed = match Raw::deserialize(d)? {
            Raw::Int(i) if i >= 0 => Ok(ShotCount::Finite(i as u64)),
            Raw::Int(i) => Err(format!("negative shot count {i}")),
            Raw::Float(x) => x.to_string().parse(),
            Raw::Text(t) => t.parse(),
        };
        parsed.map_err(serde::de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum GroundStateMode {
    #[default]
    Exact,
    Vqe,
}

pub const DEFAULT_SPREAD_PERCENTILE: f64 = 0.997;
pub const DEFAULT_ETA: f64 = crate::eom::DEFAULT_ETA;
pub const DEFAULT_VQE_RESTARTS: usize = 3;
pub const DEFAULT_VQE_MAX_EVALUATIONS: usize = 5000;

/// Logarithmic inverse-temperature grid over `[lo, hi]` with `points`
/// entries. Used when a config omits `beta_grid`.
pub fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    if points == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.log10(), hi.log10());
    (0..points)
        .map(|i| 10f64.powf(a + (b - a) * i as f64 / (points - 1) as f64))
        .collect()
}

/// Default grid: 13 points, logarithmic over `[0.1, 100]` 1/Ha.
pub fn default_beta_grid() -> Vec<f64> {
    log_grid(0.1, 100.0, 13)
}

/// Validated experiment configuration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub integrals_path: PathBuf,
    pub beta_grid: Vec<f64>,
    pub shot_counts: Vec<ShotCount>,
    pub repetitions: usize,
    pub rng_seed: u64,
    pub ground_state_mode: GroundStateMode,
    pub spread_percentile: f64,
    pub output_path: PathBuf,
    /// Canonical-orthogonalization threshold of the metric block.
    pub eta: f64,
    /// Replace sampled EOM matrices by their Hermitian / symmetric parts.
    pub symmetrize: bool,
    /// Estimate every observable from one outcome record per repetition.
    pub shared_record: bool,
    pub vqe_restarts: usize,
    pub vqe_max_evaluations: usize,
    pub vqe_cache_path: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    integrals_path: Option<PathBuf>,
    beta_grid: Option<Vec<f64>>,
    #[serde(alias = "shots")]
    shot_counts: Option<Vec<ShotCount>>,
    repetitions: Option<i64>,
    rng_seed: Option<i64>,
    ground_state_mode: Option<GroundStateMode>,
    spread_percentile: Option<f64>,
    output_path: Option<PathBuf>,
    eta: Option<f64>,
    symmetrize: Option<bool>,
    shared_record: Option<bool>,
    vqe_restarts: Option<i64>,
    vqe_max_evaluations: Option<i64>,
    vqe_cache_path: Option<PathBuf>,
}

impl RunConfig {
    /// A configuration with every default applied.
    pub fn new(integrals_path: impl Into<PathBuf>, output_path: impl Into<PathBuf>) -> Self {
        Self {
            integrals_path: integrals_path.into(),
            beta_grid: default_beta_grid(),
            shot_counts: vec![ShotCount::Infinite],
            repetitions: 1,
            rng_seed: 0,
            ground_state_mode: GroundStateMode::Exact,
            spread_percentile: DEFAULT_SPREAD_PERCENTILE,
            output_path: output_path.into(),
            eta: DEFAULT_ETA,
            symmetrize: false,
            shared_record: true,
            vqe_restarts: DEFAULT_VQE_RESTARTS,
            vqe_max_evaluations: DEFAULT_VQE_MAX_EVALUATIONS,
            vqe_cache_path: None,
        }
    }

    /// Parses a flat key-value document. Relative paths are resolved
    /// against `base_dir`.
    pub fn from_toml_str(text: &str, base_dir: &Path) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let key = e
                .message()
                .split('`')
                .nth(1)
                .unwrap_or("<document>")
                .to_string();
            Error::invalid(key, e.message().to_string())
        })?;
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base_dir.join(p) };

        let integrals_path = raw
            .integrals_path
            .map(resolve)
            .ok_or_else(|| Error::invalid("integrals_path", "required"))?;
        let output_path = raw
            .output_path
            .map(resolve)
            .unwrap_or_else(|| base_dir.join("results.csv"));
        let mut cfg = Self::new(integrals_path, output_path);
        if let Some(g) = raw.beta_grid {
            cfg.beta_grid = g;
        }
        if let Some(s) = raw.shot_counts {
            cfg.shot_counts = s;
        }
        if let Some(r) = raw.repetitions {
            cfg.repetitions =
                usize::try_from(r).map_err(|_| Error::invalid("repetitions", "must be >= 1"))?;
        }
        if let Some(seed) = raw.rng_seed {
            cfg.rng_seed =
                u64::try_from(seed).map_err(|_| Error::invalid("rng_seed", "must be non-negative"))?;
        }
        if let Some(m) = raw.ground_state_mode {
            cfg.ground_state_mode = m;
        }
        if let Some(p) = raw.spread_percentile {
            cfg.spread_percentile = p;
        }
        if let Some(eta) = raw.eta {
            cfg.eta = eta;
        }
        if let Some(b) = raw.symmetrize {
            cfg.symmetrize = b;
        }
        if let Some(b) = raw.shared_record {
            cfg.shared_record = b;
        }
        if let Some(r) = raw.vqe_restarts {
            cfg.vqe_restarts =
                usize::try_from(r).map_err(|_| Error::invalid("vqe_restarts", "must be >= 0"))?;
        }
        if let Some(r) = raw.vqe_max_evaluations {
            cfg.vqe_max_evaluations = usize::try_from(r)
                .map_err(|_| Error::invalid("vqe_max_evaluations", "must be >= 1"))?;
        }
        cfg.vqe_cache_path = raw.vqe_cache_path.map(resolve);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.beta_grid.is_empty() {
            return Err(Error::invalid("beta_grid", "must not be empty"));
        }
        if self.beta_grid.iter().any(|&b| !(b > 0.0) || !b.is_finite()) {
            return Err(Error::invalid("beta_grid", "values must be finite and > 0"));
        }
        if self.beta_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::invalid("beta_grid", "values must be strictly ascending"));
        }
        if self.shot_counts.is_empty() {
            return Err(Error::invalid("shot_counts", "must not be empty"));
        }
        if self.shot_counts.contains(&ShotCount::Finite(0)) {
            return Err(Error::invalid("shot_counts", "values must be >= 1"));
        }
        if self.repetitions < 1 {
            return Err(Error::invalid("repetitions", "must be >= 1"));
        }
        if !(self.spread_percentile > 0.0 && self.spread_percentile <= 1.0) {
            return Err(Error::invalid("spread_percentile", "must lie in (0, 1]"));
        }
        if !(self.eta > 0.0) || !self.eta.is_finite() {
            return Err(Error::invalid("eta", "must be finite and > 0"));
        }
        if self.vqe_max_evaluations < 1 {
            return Err(Error::invalid("vqe_max_evaluations", "must be >= 1"));
        }
        Ok(())
    }
}

pub fn load_run_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    RunConfig::from_toml_str(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<RunConfig> {
        RunConfig::from_toml_str(text, Path::new("/base"))
    }

    fn key_of(err: Error) -> String {
        match err {
            Error::ValidationFailed { key, .. } => key,
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn protocol_config_is_valid() {
        let cfg = parse(
            "integrals_path = \"x.fcidump\"\nbeta_grid = [1, 10, 100]\nshots = [100000]\nrepetitions = 100\n",
        )
        .unwrap();
        assert_eq!(cfg.beta_grid, vec![1.0, 10.0, 100.0]);
        assert_eq!(cfg.shot_counts, vec![ShotCount::Finite(100_000)]);
        assert_eq!(cfg.repetitions, 100);
        assert_eq!(cfg.spread_percentile, 0.997);
        assert_eq!(cfg.ground_state_mode, GroundStateMode::Exact);
        assert_eq!(cfg.integrals_path, PathBuf::from("/base/x.fcidump"));
    }

    #[test]
    fn shot_sentinel_and_float_literals() {
        let cfg = parse("integrals_path = \"x\"\nshot_counts = [1e4, 100000, \"inf\"]\n").unwrap();
        assert_eq!(
            cfg.shot_counts,
            vec![ShotCount::Finite(10_000), ShotCount::Finite(100_000), ShotCount::Infinite]
        );
    }

    #[test]
    fn validation_failures_name_the_key() {
        assert_eq!(key_of(parse("integrals_path = \"x\"\nbeta_grid = []\n").unwrap_err()), "beta_grid");
        assert_eq!(key_of(parse("integrals_path = \"x\"\nrng_seed = -3\n").unwrap_err()), "rng_seed");
        assert_eq!(key_of(parse("integrals_path = \"x\"\nrepetitions = 0\n").unwrap_err()), "repetitions");
        assert_eq!(key_of(parse("integrals_path = \"x\"\nbeta_grid = [2, 1]\n").unwrap_err()), "beta_grid");
        assert_eq!(key_of(parse("integrals_path = \"x\"\nbeta_grid = [-1]\n").unwrap_err()), "beta_grid");
        assert_eq!(key_of(parse("integrals_path = \"x\"\nshots = [0]\n").unwrap_err()), "shot_counts");
        assert_eq!(key_of(parse("beta_grid = [1]\n").unwrap_err()), "integrals_path");
        assert_eq!(key_of(parse("integrals_path = \"x\"\nbogus = 1\n").unwrap_err()), "bogus");
    }

    #[test]
    fn default_grid_is_logarithmic() {
        let g = default_beta_grid();
        assert!((g[0] - 0.1).abs() < 1e-12);
        assert!((g[g.len() - 1] - 100.0).abs() < 1e-9);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
