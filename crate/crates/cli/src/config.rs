//! Experiment configuration: defaults per experiment, a flat key-value
//! file format, and a stable hash recorded in every output file.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

/// Which batch experiment to run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    PhaseTransition,
    AdaptiveEps,
    Noisy,
    Dantzig,
    ErrorCorrection,
    TvPhantom,
    GaborPulse,
}

impl ExperimentKind {
    pub fn parse(s: &str) -> Result<Self, ConfigError> {
        match s {
            "phase-transition" => Ok(Self::PhaseTransition),
            "adaptive-eps" => Ok(Self::AdaptiveEps),
            "noisy" => Ok(Self::Noisy),
            "dantzig" => Ok(Self::Dantzig),
            "error-correction" => Ok(Self::ErrorCorrection),
            "tv-phantom" => Ok(Self::TvPhantom),
            "gabor-pulse" => Ok(Self::GaborPulse),
            other => Err(ConfigError::new(format!("unknown experiment `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::PhaseTransition => "phase-transition",
            Self::AdaptiveEps => "adaptive-eps",
            Self::Noisy => "noisy",
            Self::Dantzig => "dantzig",
            Self::ErrorCorrection => "error-correction",
            Self::TvPhantom => "tv-phantom",
            Self::GaborPulse => "gabor-pulse",
        }
    }
}

#[derive(Debug)]
pub struct ConfigError {
    message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        ConfigError {
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "config error: {}", self.message)
    }
}

impl std::error::Error for ConfigError {}

/// Full description of one batch run.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub n: usize,
    pub m: usize,
    /// Sparsity (or corruption-count) sweep.
    pub k_list: Vec<usize>,
    /// Stability-parameter sweep.
    pub eps_list: Vec<f64>,
    /// Reweighting-depth checkpoints; the run uses the maximum as l_max.
    pub iter_list: Vec<usize>,
    /// Compressible decay exponents.
    pub p_list: Vec<f64>,
    /// Noise / epsilon factors (`beta`).
    pub beta_list: Vec<f64>,
    /// Pseudo-radial line counts (0 denotes full sampling).
    pub line_list: Vec<usize>,
    pub trials: usize,
    pub master_seed: u64,
    pub out_dir: PathBuf,
    /// Worker threads; 0 picks the rayon default.
    pub threads: usize,
}

impl ExperimentConfig {
    pub fn default_for(kind: ExperimentKind) -> Self {
        let base = ExperimentConfig {
            experiment: kind,
            n: 256,
            m: 100,
            k_list: vec![],
            eps_list: vec![0.1],
            iter_list: vec![0, 2, 4],
            p_list: vec![],
            beta_list: vec![],
            line_list: vec![],
            trials: 100,
            master_seed: 42,
            out_dir: PathBuf::from("out"),
            threads: 0,
        };
        match kind {
            ExperimentKind::PhaseTransition => ExperimentConfig {
                k_list: vec![20, 30, 40],
                eps_list: vec![0.01, 0.05, 0.1, 0.5, 1.0],
                ..base
            },
            ExperimentKind::AdaptiveEps => ExperimentConfig {
                m: 128,
                k_list: vec![30, 38, 46],
                eps_list: vec![],
                iter_list: vec![0, 4],
                p_list: vec![0.4, 0.7],
                ..base
            },
            ExperimentKind::Noisy => ExperimentConfig {
                m: 128,
                k_list: vec![38],
                eps_list: vec![],
                iter_list: vec![0, 9],
                p_list: vec![0.7],
                beta_list: vec![0.2],
                ..base
            },
            ExperimentKind::Dantzig => ExperimentConfig {
                m: 72,
                k_list: vec![8],
                eps_list: vec![0.1],
                iter_list: vec![0, 4],
                trials: 500,
                ..base
            },
            ExperimentKind::ErrorCorrection => ExperimentConfig {
                n: 128,
                m: 512,
                k_list: vec![128, 164],
                eps_list: vec![],
                iter_list: vec![0, 4],
                beta_list: vec![0.3, 0.5, 0.75],
                ..base
            },
            ExperimentKind::TvPhantom => ExperimentConfig {
                n: 64,
                m: 0,
                eps_list: vec![0.1],
                iter_list: vec![6],
                line_list: vec![13],
                trials: 1,
                ..base
            },
            ExperimentKind::GaborPulse => ExperimentConfig {
                n: 128,
                m: 48,
                eps_list: vec![0.1],
                iter_list: vec![0, 4],
                trials: 1,
                master_seed: 8,
                ..base
            },
        }
    }

    /// Parse a flat `key = value` file on top of the experiment defaults.
    /// Unknown keys are hard errors.
    pub fn from_file_text(text: &str) -> Result<Self, ConfigError> {
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::new(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if pairs.insert(key.clone(), value).is_some() {
                return Err(ConfigError::new(format!("duplicate key `{key}`")));
            }
        }
        let experiment = pairs
            .remove("experiment")
            .ok_or_else(|| ConfigError::new("missing required key `experiment`"))?;
        let mut config = ExperimentConfig::default_for(ExperimentKind::parse(&experiment)?);
        for (key, value) in pairs {
            config.apply(&key, &value)?;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        let bad = |what: &str| ConfigError::new(format!("bad value `{value}` for `{what}`"));
        match key {
            "n" => self.n = value.parse().map_err(|_| bad("n"))?,
            "m" => self.m = value.parse().map_err(|_| bad("m"))?,
            "k_list" => self.k_list = parse_list(value).map_err(|_| bad("k_list"))?,
            "eps_list" => self.eps_list = parse_list(value).map_err(|_| bad("eps_list"))?,
            "iter_list" => self.iter_list = parse_list(value).map_err(|_| bad("iter_list"))?,
            "p_list" => self.p_list = parse_list(value).map_err(|_| bad("p_list"))?,
            "beta_list" => self.beta_list = parse_list(value).map_err(|_| bad("beta_list"))?,
            "line_list" => self.line_list = parse_list(value).map_err(|_| bad("line_list"))?,
            "trials" => self.trials = value.parse().map_err(|_| bad("trials"))?,
            "master_seed" => self.master_seed = value.parse().map_err(|_| bad("master_seed"))?,
            "out" => self.out_dir = PathBuf::from(value),
            "threads" => self.threads = value.parse().map_err(|_| bad("threads"))?,
            other => {
                return Err(ConfigError::new(format!("unknown key `{other}`")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials < 1 {
            return Err(ConfigError::new("trials must be at least 1"));
        }
        if self.iter_list.is_empty() {
            return Err(ConfigError::new("iter_list must not be empty"));
        }
        let needs = |name: &str, empty: bool| {
            if empty {
                Err(ConfigError::new(format!(
                    "{name} must not be empty for {}",
                    self.experiment.name()
                )))
            } else {
                Ok(())
            }
        };
        match self.experiment {
            ExperimentKind::PhaseTransition => {
                needs("k_list", self.k_list.is_empty())?;
                needs("eps_list", self.eps_list.is_empty())?;
            }
            ExperimentKind::AdaptiveEps => {
                needs("k_list", self.k_list.is_empty())?;
                if self.n <= self.m {
                    return Err(ConfigError::new("adaptive-eps needs n > m"));
                }
            }
            ExperimentKind::Noisy => {
                needs("k_list", self.k_list.is_empty())?;
                needs("beta_list", self.beta_list.is_empty())?;
            }
            ExperimentKind::Dantzig => {
                needs("k_list", self.k_list.is_empty())?;
                needs("eps_list", self.eps_list.is_empty())?;
            }
            ExperimentKind::ErrorCorrection => {
                needs("k_list", self.k_list.is_empty())?;
                needs("beta_list", self.beta_list.is_empty())?;
                if self.m < self.n {
                    return Err(ConfigError::new("error-correction needs m >= n"));
                }
            }
            ExperimentKind::TvPhantom => {
                needs("line_list", self.line_list.is_empty())?;
                needs("eps_list", self.eps_list.is_empty())?;
            }
            ExperimentKind::GaborPulse => {
                needs("eps_list", self.eps_list.is_empty())?;
                if self.m < 1 {
                    return Err(ConfigError::new("gabor-pulse needs m >= 1"));
                }
            }
        }
        Ok(())
    }

    /// Canonical one-line rendering; hashed into every output file.
    pub fn canonical_string(&self) -> String {
        fn join<T: fmt::Display>(items: &[T]) -> String {
            items
                .iter()
                .map(|v| v.to_string())
                .collect::<Vec<_>>()
                .join(",")
        }
        format!(
            "experiment={};n={};m={};k_list={};eps_list={};iter_list={};p_list={};beta_list={};line_list={};trials={};master_seed={}",
            self.experiment.name(),
            self.n,
            self.m,
            join(&self.k_list),
            join(&self.eps_list),
            join(&self.iter_list),
            join(&self.p_list),
            join(&self.beta_list),
            join(&self.line_list),
            self.trials,
            self.master_seed,
        )
    }

    pub fn hash(&self) -> u64 {
        fnv1a(self.canonical_string().as_bytes())
    }

    pub fn l_max(&self) -> usize {
        self.iter_list.iter().copied().max().unwrap_or(0)
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Result<Vec<T>, ()> {
    if value.trim().is_empty() {
        return Ok(vec![]);
    }
    value
        .split(',')
        .map(|s| s.trim().parse::<T>().map_err(|_| ()))
        .collect()
}

/// FNV-1a over bytes; stable across platforms and runs.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides_and_rejects_unknown_keys() {
        let text = "experiment = phase-transition\nk_list = 10, 20\ntrials = 7\nmaster_seed = 5\n";
        let config = ExperimentConfig::from_file_text(text).unwrap();
        assert_eq!(config.k_list, vec![10, 20]);
        assert_eq!(config.trials, 7);
        assert_eq!(config.master_seed, 5);

        let bad = "experiment = phase-transition\nwhatever = 3\n";
        assert!(ExperimentConfig::from_file_text(bad).is_err());
    }

    #[test]
    fn missing_experiment_is_an_error() {
        assert!(ExperimentConfig::from_file_text("n = 10\n").is_err());
    }

    #[test]
    fn hash_is_stable_and_sensitive() {
        let a = ExperimentConfig::default_for(ExperimentKind::Noisy);
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.master_seed += 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn comments_and_blanks_are_ignored() {
        let text = "# a comment\n\nexperiment = tv-phantom\nline_list = 13\n";
        let config = ExperimentConfig::from_file_text(text).unwrap();
        assert_eq!(config.experiment, ExperimentKind::TvPhantom);
        assert_eq!(config.line_list, vec![13]);
    }
}
