use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Glstar,
    VerifyFourierMq,
    VerifyFourierRe,
    EstimateDistance,
    VerifyJunta,
    NwMarginalTest,
    NwWeakLearner,
    VerifyErm,
    VerifyErmSemi,
}

impl Experiment {
    pub const ALL: [Experiment; 9] = [
        Experiment::Glstar,
        Experiment::VerifyFourierMq,
        Experiment::VerifyFourierRe,
        Experiment::EstimateDistance,
        Experiment::VerifyJunta,
        Experiment::NwMarginalTest,
        Experiment::NwWeakLearner,
        Experiment::VerifyErm,
        Experiment::VerifyErmSemi,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Glstar => "glstar",
            Experiment::VerifyFourierMq => "verify-fourier-mq",
            Experiment::VerifyFourierRe => "verify-fourier-re",
            Experiment::EstimateDistance => "estimate-distance",
            Experiment::VerifyJunta => "verify-junta",
            Experiment::NwMarginalTest => "nw-marginal-test",
            Experiment::NwWeakLearner => "nw-weak-learner",
            Experiment::VerifyErm => "verify-erm",
            Experiment::VerifyErmSemi => "verify-erm-semi",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL.into_iter().find(|e| e.name() == s).with_context(|| format!("unknown experiment '{s}'"))
    }
}

/// Lower and upper bounds on the aggregate rates; the run fails if any is violated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Gates {
    pub min_accept_rate: Option<f64>,
    pub max_accept_rate: Option<f64>,
    pub min_success_rate: Option<f64>,
    pub max_success_rate: Option<f64>,
}

impl Gates {
    pub fn is_empty(&self) -> bool {
        *self == Gates::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: u64,
    pub trials: u64,
    pub n: usize,
    pub t: usize,
    /// Junta size, or the direct-product width for the NW experiments.
    pub k: usize,
    /// Number of design sets for the NW experiments.
    pub l: usize,
    pub eps: f64,
    pub delta: f64,
    pub function: String,
    pub prover: String,
    pub coefficient_samples: Option<u64>,
    pub gl_samples: Option<u64>,
    pub basis_size: Option<usize>,
    /// Per-trial samples for the marginal test; dist(f, h) samples for verify-junta.
    pub samples: Option<u64>,
    pub repetitions: Option<usize>,
    pub design_m: Option<usize>,
    pub design_d: Option<usize>,
    /// verify-junta through random examples only.
    pub random_examples: bool,
    pub workers: Option<usize>,
    /// Adds wall times, which makes reports differ between runs.
    pub record_timing: bool,
    pub gates: Gates,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            experiment: Experiment::Glstar,
            seed: 1,
            trials: 1,
            n: 8,
            t: 4,
            k: 2,
            l: 8,
            eps: 0.1,
            delta: 0.1,
            function: "majority3pad".into(),
            prover: "honest".into(),
            coefficient_samples: None,
            gl_samples: None,
            basis_size: None,
            samples: None,
            repetitions: None,
            design_m: None,
            design_d: None,
            random_examples: false,
            workers: None,
            record_timing: false,
            gates: Gates::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        ExperimentConfig { experiment, ..Default::default() }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).context("invalid experiment config")?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_toml(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            bail!("eps must lie in (0, 1], got {}", self.eps);
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            bail!("delta must lie in (0, 1), got {}", self.delta);
        }
        if self.n == 0 || self.n > pacverify::boolfn::MAX_ARITY {
            bail!("n must lie in 1..={}, got {}", pacverify::boolfn::MAX_ARITY, self.n);
        }
        if self.workers == Some(0) {
            bail!("workers must be positive");
        }
        self.function.parse::<pacverify::boolfn::FunctionSpec>()?;
        self.prover.parse::<pacverify::prover::ProverKind>()?;
        for (name, rate) in [
            ("min_accept_rate", self.gates.min_accept_rate),
            ("max_accept_rate", self.gates.max_accept_rate),
            ("min_success_rate", self.gates.min_success_rate),
            ("max_success_rate", self.gates.max_success_rate),
        ] {
            if rate.is_some_and(|r| !(0.0..=1.0).contains(&r)) {
                bail!("{name} must lie in [0, 1]");
            }
        }
        Ok(())
    }

    /// sha256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        format!("{:x}", Sha256::digest(bytes))
    }
}
