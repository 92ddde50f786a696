use crate::config::{Experiment, ExperimentConfig};
use crate::report::{Report, TrialOutcome};
use anyhow::{anyhow, Context, Result};
use pacverify::boolfn::*;
use pacverify::erm::{protocol_semi_supervised, protocol_supervised, ErmConfig, ErmOutcome, ExactPredicate, FiniteHypothesisClass};
use pacverify::fourier::{gl_star_with, is_eps_top, GlStarBudget, Protocol2, Protocol2Budget};
use pacverify::nw::*;
use pacverify::prover::{Prover, ProverKind};
use pacverify::rng::stream;
use pacverify::tolerant::{
    distance_estimate, verify_junta_random_examples, EstimatorConfig, EstimatorVerifier, EstimatorVerifierBudget, JuntaClass,
    StubTester,
};
use pacverify::transform::{run_transformed, TransformOptions};
use pacverify::{Counters, Verdict};
use rand::RngCore;
use rayon::prelude::*;
use serde_json::json;
use std::sync::Arc;
use std::time::Instant;

/// Members materialized for the ERM experiments.
const ERM_CLASS_BUDGET: usize = 1 << 16;

/// Budget of the random-example Fourier verifier when none is configured.
const DEFAULT_RE_BUDGET: Protocol2Budget =
    Protocol2Budget { coefficient_samples: Some(16), gl: GlStarBudget { samples: Some(32), basis_size: Some(3) } };

enum Setup {
    Glstar { truth: Option<Vec<f64>> },
    Fourier { protocol: Protocol2 },
    Distance { tester: StubTester },
    Junta { class: Arc<JuntaClass>, opt: f64 },
    Marginal { design: AmpDesign, samples: u64 },
    WeakLearner { design: SetDesign, distinguisher: ExactImageDistinguisher },
    Erm { class: FiniteHypothesisClass, opt: f64 },
}

struct Prepared {
    config: ExperimentConfig,
    f: Arc<TruthTable>,
    prover: ProverKind,
    setup: Setup,
}

fn junta_opt(f: &TruthTable, class: &dyn EnumerableClass) -> Result<f64> {
    Ok(opt_dist(f, class)?.0)
}

impl Prepared {
    fn new(config: &ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let c = config;
        let spec: FunctionSpec = c.function.parse()?;
        // the marginal test never queries f
        let f = Arc::new(match c.experiment {
            Experiment::NwMarginalTest => TruthTable::constant(c.n, 1)?,
            _ => make_function(c.n, &spec).with_context(|| format!("building '{}'", c.function))?,
        });
        let setup = match c.experiment {
            Experiment::Glstar => Setup::Glstar {
                truth: (c.n <= 20).then(|| {
                    let mut truth: Vec<f64> = fwht(&f).coeffs.iter().map(|v| v.abs()).collect();
                    truth.sort_by(|a, b| b.total_cmp(a));
                    truth
                }),
            },
            Experiment::VerifyFourierMq | Experiment::VerifyFourierRe => {
                let mut budget = Protocol2Budget {
                    coefficient_samples: c.coefficient_samples,
                    gl: GlStarBudget { samples: c.gl_samples, basis_size: c.basis_size },
                };
                if c.experiment == Experiment::VerifyFourierRe && budget == Protocol2Budget::default() {
                    budget = DEFAULT_RE_BUDGET;
                }
                Setup::Fourier { protocol: Protocol2::new(c.n, c.t, c.eps, c.delta)?.with_budget(budget) }
            }
            Experiment::EstimateDistance => Setup::Distance { tester: StubTester::new(&f, &JuntaClass::new(c.n, c.k)?)? },
            Experiment::VerifyJunta => {
                let class = Arc::new(JuntaClass::new(c.n, c.k)?);
                let opt = junta_opt(&f, class.as_ref())?;
                Setup::Junta { class, opt }
            }
            Experiment::NwMarginalTest => {
                let block = c.n * c.k + c.k;
                let set_design = build_design(c.design_m.unwrap_or(4 * block), block, c.l, c.design_d.unwrap_or(3))?;
                Setup::Marginal { design: AmpDesign::new(set_design, c.n, c.k)?, samples: c.samples.unwrap_or(20_000) }
            }
            Experiment::NwWeakLearner => {
                let design = build_design(c.design_m.unwrap_or(c.n + c.n / 2), c.n, c.l, c.design_d.unwrap_or(c.n - 1))?;
                let distinguisher = ExactImageDistinguisher::new(&f, &design)?;
                Setup::WeakLearner { design, distinguisher }
            }
            Experiment::VerifyErm | Experiment::VerifyErmSemi => {
                let class = FiniteHypothesisClass::from_class(&JuntaClass::new(c.n, c.k)?, ERM_CLASS_BUDGET, None)?;
                let opt = junta_opt(&f, &class)?;
                Setup::Erm { class, opt }
            }
        };
        Ok(Prepared { config: config.clone(), f, prover: c.prover.parse()?, setup })
    }

    fn oracles(&self, rng: &mut dyn RngCore) -> (MembershipOracle, RandomExampleOracle, Prover) {
        let re = RandomExampleOracle::uniform(Arc::clone(&self.f), stream(rng.next_u64(), 0));
        let prover = Prover::new(Arc::clone(&self.f), self.prover.clone(), stream(rng.next_u64(), 0));
        (MembershipOracle::new(Arc::clone(&self.f)), re, prover)
    }

    fn trial(&self, index: u64) -> Result<TrialOutcome> {
        let start = Instant::now();
        let c = &self.config;
        let mut rng = stream(c.seed, index);
        let (mut mq, mut re, mut prover) = self.oracles(&mut rng);
        let mut out = TrialOutcome::new(index);
        match &self.setup {
            Setup::Glstar { truth } => {
                let budget = GlStarBudget { samples: c.gl_samples, basis_size: c.basis_size };
                let r = gl_star_with(&mut mq, c.t, c.eps, c.delta, budget, &mut rng)?;
                if let Some(truth) = truth {
                    let err = r.sigmas.iter().zip(truth).map(|(s, g)| (s - g).abs()).fold(0.0, f64::max);
                    out.error = Some(err);
                    out.success = err <= c.eps;
                }
                out.summary = json!({ "sigmas": r.sigmas, "samples": r.samples, "s_formula": r.s_formula, "notes": r.notes });
            }
            Setup::Fourier { protocol } => {
                let (verdict, summary, counters) = if c.experiment == Experiment::VerifyFourierMq {
                    let r = protocol.run(&mut mq, &mut re, &mut prover, &mut rng)?;
                    (r.verdict, serde_json::to_value(&r.transcript)?, r.counters)
                } else {
                    let r = run_transformed(protocol, &mut prover, &mut re, c.delta, &TransformOptions::default(), &mut rng)?;
                    let summary = json!({
                        "iterations_planned": r.iterations_planned,
                        "iterations_run": r.iterations_run,
                        "failed_checks": r.failed_checks,
                        "rejecting_iterations": r.rejecting_iterations,
                        "proof_digest": r.proof_digest,
                    });
                    (r.verdict, summary, r.counters)
                };
                out.success = verdict.output().is_some_and(|top| is_eps_top(&self.f, &top.characters, c.eps));
                out.set_verdict(&verdict);
                out.summary = summary;
                if let Verdict::Accept(top) = &verdict {
                    out.summary["output"] = serde_json::to_value(top)?;
                }
                out.counters = counters;
            }
            Setup::Distance { tester } => {
                let config = EstimatorConfig { repetitions: c.repetitions, ..Default::default() };
                let est = distance_estimate(&mut mq, tester, c.eps, c.delta, &config, &mut rng)?;
                let err = (est.estimate - tester.opt).abs();
                out.error = Some(err);
                out.success = err <= c.eps;
                out.summary = json!({ "estimate": est.estimate, "exact": tester.opt, "tests": est.tests });
            }
            Setup::Junta { class, opt } => {
                let budget = EstimatorVerifierBudget {
                    hypothesis_samples: c.samples,
                    estimator: c.repetitions.map(|r| EstimatorConfig { repetitions: Some(r), ..Default::default() }),
                };
                let (verdict, counters, summary) = if c.random_examples {
                    let r = verify_junta_random_examples(
                        &mut re,
                        &mut prover,
                        class.clone(),
                        c.eps,
                        c.delta,
                        budget,
                        &TransformOptions::default(),
                        &mut rng,
                    )?;
                    (r.verdict, r.counters, json!({ "iterations_run": r.iterations_run, "failed_checks": r.failed_checks }))
                } else {
                    let verifier = EstimatorVerifier::new(class.clone(), &self.f, c.eps, c.delta)?.with_budget(budget);
                    let r = verifier.run(&mut mq, &mut re, &mut prover, &mut rng)?;
                    (r.verdict, r.counters, serde_json::to_value(&r.transcript)?)
                };
                if let Some(&h) = verdict.output() {
                    let err = dist(&class.member(h), &self.f)? - opt;
                    out.error = Some(err);
                    out.success = err <= c.eps;
                }
                out.set_verdict(&verdict);
                out.counters = counters;
                out.summary = summary;
            }
            Setup::Marginal { design, samples } => {
                let overlap = (index % (design.design.max_overlap() as u64 + 1)) as usize;
                let target = MarginalTarget::with_overlap(design, overlap)
                    .ok_or_else(|| anyhow!("no block pair of the design has overlap {overlap}"))?;
                let r = marginal_test(design, target, *samples, MarginalMode::Unembedded, &mut rng)?;
                out.success = r.pass;
                out.summary = json!({
                    "overlap": r.overlap,
                    "target": r.target,
                    "chi_square": r.chi,
                    "consistent_bins": r.consistent_bins,
                    "inconsistent_hits": r.inconsistent_hits,
                });
            }
            Setup::WeakLearner { design, distinguisher } => {
                let config = WeakLearnerConfig { repetitions: c.repetitions, agreement_samples: c.samples };
                let r = reconstruct_weak_learner(&mut mq, distinguisher, design, config, &mut rng)?;
                let agreement = exact_agreement(&r.hypothesis, &self.f)?;
                out.success = agreement > 0.5 + 1.0 / (8.0 * design.l as f64);
                out.summary = json!({
                    "agreement": agreement,
                    "estimated_agreement": r.estimated_agreement,
                    "pivot": r.pivot,
                    "repetitions": r.repetitions,
                    "distinguisher_advantage": distinguisher.advantage(),
                });
            }
            Setup::Erm { class, opt } => {
                let config = ErmConfig::default();
                let r: ErmOutcome = if c.experiment == Experiment::VerifyErm {
                    protocol_supervised(&mut re, &mut prover, class, c.eps, c.delta, &config, &ExactPredicate)?
                } else {
                    let mut unlabeled = UnlabeledSource::new(c.n, ExampleDistribution::uniform(), stream(rng.next_u64(), 0));
                    protocol_semi_supervised(
                        &mut re,
                        &mut unlabeled,
                        &mut prover,
                        class,
                        c.eps,
                        c.delta,
                        &config,
                        &ExactPredicate,
                        &mut rng,
                    )?
                };
                if let Some(&h) = r.verdict.output() {
                    let err = dist(&class.members()[h], &self.f)? - opt;
                    out.error = Some(err);
                    out.success = err <= c.eps;
                }
                out.set_verdict(&r.verdict);
                out.counters = r.counters;
                out.summary = serde_json::to_value(&r.transcript)?;
            }
        }
        if !matches!(self.setup, Setup::Fourier { .. } | Setup::Junta { .. } | Setup::Erm { .. }) {
            out.counters = Counters { membership_queries: mq.query_count(), random_examples: re.sample_count() };
        }
        if c.record_timing {
            out.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
        }
        Ok(out)
    }
}

/// Runs all trials of `config`; trial i draws from stream(seed, i), so the
/// report does not depend on the number of workers.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Report> {
    let prepared = Prepared::new(config)?;
    let start = Instant::now();
    let run = || -> Result<Vec<TrialOutcome>> { (0..config.trials).into_par_iter().map(|i| prepared.trial(i)).collect() };
    let trials = match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new().num_threads(w).build()?.install(run),
        None => run(),
    }?;
    let mut report = Report::aggregate(config, trials);
    if config.record_timing {
        report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    Ok(report)
}

pub(crate) fn verdict_label<T>(v: &Verdict<T>) -> (&'static str, Option<String>) {
    match v {
        Verdict::Accept(_) => ("accept", None),
        Verdict::Reject { reason } => ("reject", Some(reason.clone())),
    }
}
