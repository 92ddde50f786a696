//! Simulated provers: the honest (unbounded) strategy and scripted deviations.

use crate::boolfn::{fwht, opt_dist, EnumerableClass, FourierSpectrum, MembershipOracle, TruthTable};
use crate::erm::{empirical_error, erm_argmin, LabeledSample};
use crate::error::{Error, Result};
use crate::f2::ProverView;
use crate::rng::SimRng;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndexPolicy {
    First,
    Last,
    Position(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HypothesisSelector {
    /// Top set with the heaviest character replaced by a lightest one.
    SwapHeaviest,
    Constant(i8),
    /// Farthest member (or the t lightest characters).
    Worst,
    Index(usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProverKind {
    Honest,
    /// Flip `per_iteration` uniformly chosen labels in each of the first
    /// `iterations` query sets (all sets when `None`).
    LieOnRandomQueries { per_iteration: usize, iterations: Option<u64> },
    LieOnSpecificIndex { policy: IndexPolicy, iterations: Option<u64> },
    WrongHypothesis { selector: HypothesisSelector },
    /// Flip round(p·m) of the m labels it returns.
    MislabelFraction { p: f64 },
    GarbageProof,
}

impl FromStr for ProverKind {
    type Err = Error;

    /// `honest`, `lie-random:K[@N]`, `lie-index:first|last|<i>[@N]`,
    /// `wrong:swap-heaviest|worst|constant[:-1]|<index>`, `mislabel:<p>`, `garbage`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("unknown prover strategy '{s}'"));
        let (head, rest) = s.split_once(':').map_or((s, None), |(h, r)| (h, Some(r)));
        let split_iter = |r: &str| -> Result<(String, Option<u64>)> {
            match r.split_once('@') {
                Some((a, b)) => Ok((a.to_string(), Some(b.parse().map_err(|_| bad())?))),
                None => Ok((r.to_string(), None)),
            }
        };
        Ok(match (head, rest) {
            ("honest", None) => ProverKind::Honest,
            ("garbage" | "garbage-proof", None) => ProverKind::GarbageProof,
            ("lie-random", Some(r)) => {
                let (k, iterations) = split_iter(r)?;
                ProverKind::LieOnRandomQueries { per_iteration: k.parse().map_err(|_| bad())?, iterations }
            }
            ("lie-index" | "lie-on-specific-index", Some(r)) => {
                let (p, iterations) = split_iter(r)?;
                let policy = match p.as_str() {
                    "first" => IndexPolicy::First,
                    "last" => IndexPolicy::Last,
                    i => IndexPolicy::Position(i.parse().map_err(|_| bad())?),
                };
                ProverKind::LieOnSpecificIndex { policy, iterations }
            }
            ("lie-on-specific-index", None) => ProverKind::LieOnSpecificIndex { policy: IndexPolicy::First, iterations: None },
            ("wrong" | "wrong-hypothesis", r) => {
                let selector = match r.unwrap_or("worst") {
                    "swap-heaviest" => HypothesisSelector::SwapHeaviest,
                    "worst" => HypothesisSelector::Worst,
                    "constant" | "constant:1" | "constant:+1" => HypothesisSelector::Constant(1),
                    "constant:-1" => HypothesisSelector::Constant(-1),
                    i => HypothesisSelector::Index(i.parse().map_err(|_| bad())?),
                };
                ProverKind::WrongHypothesis { selector }
            }
            ("mislabel" | "mislabel-fraction", Some(r)) => {
                let p: f64 = r.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&p) {
                    return Err(bad());
                }
                ProverKind::MislabelFraction { p }
            }
            _ => return Err(bad()),
        })
    }
}

impl fmt::Display for ProverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let iter = |i: &Option<u64>| i.map(|n| format!("@{n}")).unwrap_or_default();
        match self {
            ProverKind::Honest => write!(f, "honest"),
            ProverKind::GarbageProof => write!(f, "garbage"),
            ProverKind::LieOnRandomQueries { per_iteration, iterations } => {
                write!(f, "lie-random:{per_iteration}{}", iter(iterations))
            }
            ProverKind::LieOnSpecificIndex { policy, iterations } => {
                let p = match policy {
                    IndexPolicy::First => "first".to_string(),
                    IndexPolicy::Last => "last".to_string(),
                    IndexPolicy::Position(i) => i.to_string(),
                };
                write!(f, "lie-index:{p}{}", iter(iterations))
            }
            ProverKind::WrongHypothesis { selector } => match selector {
                HypothesisSelector::SwapHeaviest => write!(f, "wrong:swap-heaviest"),
                HypothesisSelector::Worst => write!(f, "wrong:worst"),
                HypothesisSelector::Constant(s) => write!(f, "wrong:constant:{s}"),
                HypothesisSelector::Index(i) => write!(f, "wrong:{i}"),
            },
            ProverKind::MislabelFraction { p } => write!(f, "mislabel:{p}"),
        }
    }
}

/// A prover with unrestricted access to the target function.
#[derive(Debug, Clone)]
pub struct Prover {
    kind: ProverKind,
    oracle: MembershipOracle,
    rng: SimRng,
    spectrum: Option<Arc<FourierSpectrum>>,
}

impl Prover {
    pub fn new(target: Arc<TruthTable>, kind: ProverKind, rng: SimRng) -> Self {
        Prover { kind, oracle: MembershipOracle::new(target), rng, spectrum: None }
    }

    pub fn honest(target: Arc<TruthTable>, rng: SimRng) -> Self {
        Self::new(target, ProverKind::Honest, rng)
    }

    pub fn kind(&self) -> &ProverKind {
        &self.kind
    }

    /// Queries the prover itself made to f.
    pub fn query_count(&self) -> u64 {
        self.oracle.query_count()
    }

    fn target(&self) -> &TruthTable {
        self.oracle.table()
    }

    fn spectrum(&mut self) -> Arc<FourierSpectrum> {
        if self.spectrum.is_none() {
            self.spectrum = Some(Arc::new(fwht(self.oracle.table())));
        }
        Arc::clone(self.spectrum.as_ref().unwrap())
    }

    /// Message of the top-characters protocol: t characters.
    pub fn top_characters(&mut self, t: usize) -> Vec<u64> {
        let spec = self.spectrum();
        let ranked = spec.ranked();
        let t = t.min(ranked.len());
        match &self.kind {
            ProverKind::WrongHypothesis { selector: HypothesisSelector::SwapHeaviest } => {
                let mut set = ranked[..t].to_vec();
                if t < ranked.len() {
                    set[0] = *ranked.last().unwrap();
                }
                set
            }
            ProverKind::WrongHypothesis { .. } => ranked[ranked.len() - t..].to_vec(),
            ProverKind::GarbageProof => {
                let len = ranked.len();
                sample(&mut self.rng, len, t).into_iter().map(|i| i as u64).collect()
            }
            _ => ranked[..t].to_vec(),
        }
    }

    /// A class member claimed to be near-optimal for f.
    pub fn hypothesis(&mut self, class: &dyn EnumerableClass) -> usize {
        let f = self.target().clone();
        match &self.kind {
            ProverKind::GarbageProof => class.size(),
            ProverKind::WrongHypothesis { selector } => match *selector {
                HypothesisSelector::Index(i) => i,
                HypothesisSelector::Constant(sign) => {
                    let c = TruthTable::constant(class.arity(), sign).expect("valid arity");
                    (0..class.size()).find(|&i| class.member(i) == c).unwrap_or(class.size())
                }
                _ => farthest(&f, class),
            },
            _ => opt_dist(&f, class).map(|(_, i)| i).unwrap_or(class.size()),
        }
    }

    /// Hypothesis for a labeled sample in the ERM protocols.
    pub fn erm_hypothesis(&mut self, class: &dyn EnumerableClass, sample: &[LabeledSample]) -> usize {
        match &self.kind {
            ProverKind::GarbageProof => class.size(),
            ProverKind::WrongHypothesis { selector: HypothesisSelector::Index(i) } => *i,
            ProverKind::WrongHypothesis { .. } => {
                let mut worst = (f64::NEG_INFINITY, 0);
                for i in 0..class.size() {
                    let e = empirical_error(&class.member(i), sample).unwrap_or(0.0);
                    if e > worst.0 {
                        worst = (e, i);
                    }
                }
                worst.1
            }
            _ => erm_argmin(class, sample).map(|(i, _)| i).unwrap_or(class.size()),
        }
    }

    /// Labels for one query set of the sample-only simulation.
    pub fn label_queries(&mut self, iteration: u64, view: &ProverView) -> Vec<i8> {
        let mut labels: Vec<i8> = view.points.iter().map(|&x| self.oracle.query(x)).collect();
        let len = labels.len();
        if len == 0 {
            return labels;
        }
        match self.kind.clone() {
            ProverKind::LieOnRandomQueries { per_iteration, iterations } => {
                if iterations.map_or(true, |n| iteration < n) {
                    for i in sample(&mut self.rng, len, per_iteration.min(len)) {
                        labels[i] = -labels[i];
                    }
                }
            }
            ProverKind::LieOnSpecificIndex { policy, iterations } => {
                if iterations.map_or(true, |n| iteration < n) {
                    let i = match policy {
                        IndexPolicy::First => 0,
                        IndexPolicy::Last => len - 1,
                        IndexPolicy::Position(p) => p.min(len - 1),
                    };
                    labels[i] = -labels[i];
                }
            }
            ProverKind::MislabelFraction { p } => self.flip_fraction(&mut labels, p),
            _ => {}
        }
        labels
    }

    /// Labels for the points of the semi-supervised protocol.
    pub fn label_points(&mut self, points: &[u64]) -> Vec<i8> {
        let view = ProverView { n: self.target().n(), points: points.to_vec(), pattern: "plain".into() };
        self.label_queries(0, &view)
    }

    fn flip_fraction(&mut self, labels: &mut [i8], p: f64) {
        let k = ((p * labels.len() as f64).round() as usize).min(labels.len());
        for i in sample(&mut self.rng, labels.len(), k) {
            labels[i] = -labels[i];
        }
    }

    /// Random bits for strategies that need them outside a message.
    pub fn coin(&mut self) -> bool {
        self.rng.gen()
    }
}

fn farthest(f: &TruthTable, class: &dyn EnumerableClass) -> usize {
    let mut worst = (f64::NEG_INFINITY, 0);
    for i in 0..class.size() {
        let d = crate::boolfn::dist(f, &class.member(i)).unwrap_or(0.0);
        if d > worst.0 {
            worst = (d, i);
        }
    }
    worst.1
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn strategy_strings_round_trip() {
        for s in ["honest", "garbage", "lie-random:50", "lie-random:1@332", "lie-index:last@10", "wrong:swap-heaviest", "wrong:constant:1", "wrong:7", "mislabel:0.2"] {
            let k: ProverKind = s.parse().unwrap();
            assert_eq!(k.to_string().parse::<ProverKind>().unwrap(), k, "{s}");
        }
        assert!("mislabel:2".parse::<ProverKind>().is_err());
        assert!("sneaky".parse::<ProverKind>().is_err());
    }
}
