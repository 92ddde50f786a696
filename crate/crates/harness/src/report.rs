use crate::config::{ExperimentConfig, Gates};
use crate::experiment::verdict_label;
use anyhow::{Context, Result};
use pacverify::{Counters, Verdict};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::path::Path;

/// Keys of verifier-private fields, dropped from the prover-visible copy.
pub const PRIVATE_KEYS: [&str; 3] = ["permutation_seed", "embedded_index", "known"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    /// `accept`, `reject`, or `none` for experiments without a verifier.
    pub verdict: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub success: bool,
    /// Experiment-specific error: estimation error, or excess distance of the output.
    pub error: Option<f64>,
    pub counters: Counters,
    pub summary: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
}

impl TrialOutcome {
    pub fn new(trial: u64) -> Self {
        TrialOutcome {
            trial,
            verdict: "none".into(),
            reason: None,
            success: false,
            error: None,
            counters: Counters::default(),
            summary: Value::Null,
            wall_ms: None,
        }
    }

    pub fn set_verdict<T>(&mut self, v: &Verdict<T>) {
        let (label, reason) = verdict_label(v);
        self.verdict = label.into();
        self.reason = reason;
    }

    pub fn accepted(&self) -> Option<bool> {
        match self.verdict.as_str() {
            "accept" => Some(true),
            "reject" => Some(false),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub min: f64,
    pub p50: f64,
    pub p90: f64,
    pub max: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles; `None` for no values.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let rank = |p: f64| v[((p * v.len() as f64).ceil() as usize).clamp(1, v.len()) - 1];
        Some(Quantiles { min: v[0], p50: rank(0.5), p90: rank(0.9), max: v[v.len() - 1] })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CounterStats {
    pub mean: f64,
    pub min: u64,
    pub max: u64,
}

impl CounterStats {
    fn of(values: impl Iterator<Item = u64> + Clone) -> Option<Self> {
        let n = values.clone().count();
        if n == 0 {
            return None;
        }
        let sum: u64 = values.clone().sum();
        Some(CounterStats { mean: sum as f64 / n as f64, min: values.clone().min()?, max: values.max()? })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GateResult {
    pub gate: String,
    pub bound: f64,
    pub value: Option<f64>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub experiment: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    pub trials: u64,
    pub decided: u64,
    pub accepted: u64,
    pub accept_rate: Option<f64>,
    pub successes: u64,
    pub success_rate: Option<f64>,
    pub error_quantiles: Option<Quantiles>,
    pub membership_queries: Option<CounterStats>,
    pub random_examples: Option<CounterStats>,
    pub gates: Vec<GateResult>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_ms: Option<f64>,
    pub transcripts: Vec<TrialOutcome>,
}

fn gate_results(gates: &Gates, accept_rate: Option<f64>, success_rate: Option<f64>) -> Vec<GateResult> {
    let mut out = Vec::new();
    let mut push = |gate: &str, bound: Option<f64>, value: Option<f64>, lower: bool| {
        if let Some(bound) = bound {
            // no trials leaves nothing to violate
            let pass = value.map_or(true, |v| if lower { v >= bound } else { v <= bound });
            out.push(GateResult { gate: gate.into(), bound, value, pass });
        }
    };
    push("min_accept_rate", gates.min_accept_rate, accept_rate, true);
    push("max_accept_rate", gates.max_accept_rate, accept_rate, false);
    push("min_success_rate", gates.min_success_rate, success_rate, true);
    push("max_success_rate", gates.max_success_rate, success_rate, false);
    out
}

impl Report {
    pub fn aggregate(config: &ExperimentConfig, transcripts: Vec<TrialOutcome>) -> Self {
        let trials = transcripts.len() as u64;
        let decided = transcripts.iter().filter(|t| t.accepted().is_some()).count() as u64;
        let accepted = transcripts.iter().filter(|t| t.accepted() == Some(true)).count() as u64;
        let successes = transcripts.iter().filter(|t| t.success).count() as u64;
        let accept_rate = (decided > 0).then(|| accepted as f64 / decided as f64);
        let success_rate = (trials > 0).then(|| successes as f64 / trials as f64);
        let errors: Vec<f64> = transcripts.iter().filter_map(|t| t.error).collect();
        let gates = gate_results(&config.gates, accept_rate, success_rate);
        Report {
            experiment: config.experiment.name().into(),
            config_hash: config.hash(),
            config: config.clone(),
            seed: config.seed,
            trials,
            decided,
            accepted,
            accept_rate,
            successes,
            success_rate,
            error_quantiles: Quantiles::of(&errors),
            membership_queries: CounterStats::of(transcripts.iter().map(|t| t.counters.membership_queries)),
            random_examples: CounterStats::of(transcripts.iter().map(|t| t.counters.random_examples)),
            pass: gates.iter().all(|g| g.pass),
            gates,
            wall_ms: None,
            transcripts,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// The report with verifier-private fields removed.
    pub fn prover_view(&self) -> Result<Value> {
        let mut v = serde_json::to_value(self)?;
        redact(&mut v);
        Ok(v)
    }

    pub fn trials_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["trial", "verdict", "success", "error", "membership_queries", "random_examples"])?;
        for t in &self.transcripts {
            w.write_record([
                t.trial.to_string(),
                t.verdict.clone(),
                t.success.to_string(),
                t.error.map(|e| e.to_string()).unwrap_or_default(),
                t.counters.membership_queries.to_string(),
                t.counters.random_examples.to_string(),
            ])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    pub fn summary_csv(&self) -> Result<String> {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["metric", "value"])?;
        let rows = [
            ("experiment", self.experiment.clone()),
            ("config_hash", self.config_hash.clone()),
            ("seed", self.seed.to_string()),
            ("trials", self.trials.to_string()),
            ("accepted", self.accepted.to_string()),
            ("accept_rate", opt(self.accept_rate)),
            ("successes", self.successes.to_string()),
            ("success_rate", opt(self.success_rate)),
            ("error_p50", opt(self.error_quantiles.map(|q| q.p50))),
            ("error_p90", opt(self.error_quantiles.map(|q| q.p90))),
            ("error_max", opt(self.error_quantiles.map(|q| q.max))),
            ("membership_queries_mean", opt(self.membership_queries.map(|c| c.mean))),
            ("random_examples_mean", opt(self.random_examples.map(|c| c.mean))),
            ("pass", self.pass.to_string()),
        ];
        for (k, v) in rows {
            w.write_record([k, v.as_str()])?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }

    /// Writes report.json, report.prover.json, trials.csv and summary.csv into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        std::fs::write(dir.join("report.json"), self.to_json()?)?;
        std::fs::write(dir.join("report.prover.json"), serde_json::to_string_pretty(&self.prover_view()?)?)?;
        std::fs::write(dir.join("trials.csv"), self.trials_csv()?)?;
        std::fs::write(dir.join("summary.csv"), self.summary_csv()?)?;
        Ok(())
    }
}

/// Removes `PRIVATE_KEYS` at any depth.
pub fn redact(v: &mut Value) {
    match v {
        Value::Object(map) => {
            map.retain(|k, _| !PRIVATE_KEYS.contains(&k.as_str()));
            map.values_mut().for_each(redact);
        }
        Value::Array(items) => items.iter_mut().for_each(redact),
        _ => {}
    }
}
