use pacverify::boolfn::*;
use pacverify::erm::*;
use pacverify::prover::{HypothesisSelector, Prover, ProverKind};
use pacverify::rng::{seeded, stream};
use pacverify::tolerant::JuntaClass;
use proptest::prelude::*;
use rand::Rng;
use std::sync::Arc;

fn junta_class(n: usize) -> FiniteHypothesisClass {
    FiniteHypothesisClass::from_class(&JuntaClass::new(n, 1).unwrap(), 1 << 12, None).unwrap()
}

fn noisy_junta(n: usize, seed: u64) -> Arc<TruthTable> {
    let base = FunctionSpec::Junta { vars: vec![2], table: 0b10 };
    Arc::new(make_function(n, &FunctionSpec::Noisy { base: Box::new(base), rate: 0.1, seed }).unwrap())
}

fn labeled(f: &TruthTable, xs: impl IntoIterator<Item = u64>) -> Vec<LabeledSample> {
    xs.into_iter().map(|x| LabeledSample { x, y: f.get(x), origin: Origin::Verifier }).collect()
}

fn recount(h: &TruthTable, s: &[LabeledSample]) -> usize {
    s.iter().filter(|e| h.get(e.x) != e.y).count()
}

#[test]
fn empirical_errors() {
    let class = junta_class(8);
    let h = class.members()[13].clone();
    let mut rng = seeded(1);
    let s = labeled(&h, (0..300).map(|_| rng.gen_range(0..256)));
    assert_eq!(erm_argmin(&class, &s).unwrap().1, 0.0);
    let one = vec![LabeledSample { x: 3, y: -h.get(3), origin: Origin::Prover }];
    assert_eq!(empirical_error(&h, &one).unwrap(), 1.0);
    assert!(empirical_error(&h, &[]).is_err());
    assert!(erm_argmin(&class, &[]).is_err());

    let f = noisy_junta(8, 4);
    for _ in 0..20 {
        let s = labeled(&f, (0..200).map(|_| rng.gen_range(0..256)));
        let (i, e) = erm_argmin(&class, &s).unwrap();
        let counts: Vec<usize> = class.members().iter().map(|m| recount(m, &s)).collect();
        let min = *counts.iter().min().unwrap();
        assert_eq!(i, counts.iter().position(|&c| c == min).unwrap());
        assert_eq!(e, min as f64 / 200.0);
    }
}

#[test]
fn sample_sizes() {
    assert_eq!(sample_size(0.0, 1.0, (-1f64).exp(), 1.0).unwrap(), 1);
    assert_eq!(sample_size(10.0, 0.1, 0.05, 4.0).unwrap(), 5199);
    for eps in [0.02, 0.05, 0.1, 0.3] {
        let m = sample_size(7.0, eps, 0.1, 4.0).unwrap() as f64;
        let half = sample_size(7.0, 2.0 * eps, 0.1, 4.0).unwrap() as f64;
        assert!((m / 4.0 - half).abs() <= 1.0);
    }
    assert!(sample_size(1.0, 0.0, 0.1, 4.0).is_err());
    assert!(sample_size(1.0, 0.1, 1.0, 4.0).is_err());
    assert_eq!(labeled_count(0.5, 0.1).unwrap(), 48);
}

#[test]
fn almost_optimal_predicate() {
    let class = junta_class(6);
    let f = noisy_junta(6, 2);
    let mut rng = seeded(3);
    let s = labeled(&f, (0..100).map(|_| rng.gen_range(0..64)));
    let (best, _) = erm_argmin(&class, &s).unwrap();
    assert!(check_almost_optimal(&class, best, &s, 0.0));
    for h in 0..class.size() {
        assert!(check_almost_optimal(&class, h, &s, 1.0));
    }
    assert!(!check_almost_optimal(&class, class.size(), &s, 1.0));
    assert!(!check_almost_optimal(&class, 0, &[], 1.0));

    // f on ten points, and members that mislabel 0, 1, 3 and 6 of them
    let f = make_function(4, &FunctionSpec::Random { seed: 5 }).unwrap();
    let s = labeled(&f, 0..10);
    let members: Vec<TruthTable> = [0u64, 1, 3, 6]
        .iter()
        .map(|&k| TruthTable::from_fn(4, |x| if x < k { -f.get(x) } else { f.get(x) }).unwrap())
        .collect();
    let class = FiniteHypothesisClass::new(4, members, None).unwrap();
    let accepted: Vec<usize> = (0..4).filter(|&h| check_almost_optimal(&class, h, &s, 0.15)).collect();
    assert_eq!(accepted, vec![0, 1]);
}

#[test]
fn predicate_matches_recomputation() {
    let class = junta_class(5);
    let mut rng = seeded(8);
    for _ in 0..1000 {
        let len = rng.gen_range(1..40);
        let s: Vec<LabeledSample> = (0..len)
            .map(|_| LabeledSample { x: rng.gen_range(0..32), y: if rng.gen() { 1 } else { -1 }, origin: Origin::Verifier })
            .collect();
        let h = rng.gen_range(0..class.size() + 2);
        let eps = rng.gen_range(0.0..0.5);
        let expected = h < class.size() && {
            let opt = class.members().iter().map(|m| recount(m, &s)).min().unwrap() as f64 / len as f64;
            recount(&class.members()[h], &s) as f64 / len as f64 <= opt + eps + 1e-12
        };
        assert_eq!(check_almost_optimal(&class, h, &s, eps), expected);
    }
}

fn supervised(f: &Arc<TruthTable>, kind: ProverKind, eps: f64, seed: u64) -> ErmOutcome {
    let class = junta_class(f.n());
    let mut oracle = RandomExampleOracle::uniform(Arc::clone(f), stream(seed, 0));
    let mut prover = Prover::new(Arc::clone(f), kind, stream(seed, 1));
    protocol_supervised(&mut oracle, &mut prover, &class, eps, 0.1, &ErmConfig::default(), &ExactPredicate).unwrap()
}

#[test]
fn supervised_honest_noisy_junta() {
    let (eps, delta) = (0.3, 0.1);
    let f = noisy_junta(8, 11);
    let class = junta_class(8);
    let (opt, _) = opt_dist(&f, &class).unwrap();
    let mut good = 0;
    for seed in 0..200 {
        let out = supervised(&f, ProverKind::Honest, eps, seed);
        assert_eq!(out.counters.random_examples, out.transcript.m);
        assert_eq!(out.counters.membership_queries, 0);
        if let Some(&h) = out.verdict.output() {
            good += (dist(&class.members()[h], &f).unwrap() <= opt + eps) as usize;
        }
    }
    assert!(good as f64 / 200.0 >= 1.0 - delta - 0.02, "{good}");
}

#[test]
fn supervised_rejects_the_worst_hypothesis() {
    let f = noisy_junta(8, 12);
    for seed in 0..50 {
        let worst = supervised(&f, ProverKind::WrongHypothesis { selector: HypothesisSelector::Worst }, 0.3, seed);
        let gap = worst.transcript.empirical_error.unwrap() - worst.transcript.empirical_opt.unwrap();
        assert!(gap > 0.15);
        assert!(!worst.verdict.is_accept());
        let garbage = supervised(&f, ProverKind::GarbageProof, 0.3, seed);
        assert!(!garbage.verdict.is_accept());
    }
}

#[test]
fn supervised_realizable() {
    let f = Arc::new(make_function(8, &FunctionSpec::Junta { vars: vec![5], table: 0b01 }).unwrap());
    let class = junta_class(8);
    let mut good = 0;
    for seed in 0..200 {
        let out = supervised(&f, ProverKind::Honest, 0.3, seed);
        if let Some(&h) = out.verdict.output() {
            good += (dist(&class.members()[h], &f).unwrap() <= 0.3) as usize;
        }
    }
    assert!(good as f64 / 200.0 >= 0.88);
}

fn semi(f: &Arc<TruthTable>, kind: ProverKind, eps: f64, delta: f64, seed: u64) -> pacverify::Result<ErmOutcome> {
    let class = junta_class(f.n());
    let mut oracle = RandomExampleOracle::uniform(Arc::clone(f), stream(seed, 0));
    let mut unlabeled = UnlabeledSource::new(f.n(), ExampleDistribution::uniform(), stream(seed, 1));
    let mut prover = Prover::new(Arc::clone(f), kind, stream(seed, 2));
    protocol_semi_supervised(
        &mut oracle,
        &mut unlabeled,
        &mut prover,
        &class,
        eps,
        delta,
        &ErmConfig::default(),
        &ExactPredicate,
        &mut stream(seed, 3),
    )
}

#[test]
fn semi_supervised_honest() {
    let (eps, delta) = (0.5, 0.1);
    let f = noisy_junta(8, 21);
    let class = junta_class(8);
    let (opt, _) = opt_dist(&f, &class).unwrap();
    let (mut accepted, mut good) = (0, 0);
    for seed in 0..200 {
        let out = semi(&f, ProverKind::Honest, eps, delta, seed).unwrap();
        assert_eq!(out.counters.random_examples, 48);
        assert_eq!(out.transcript.q, 48);
        assert_eq!(out.transcript.label_mismatches, 0);
        if let Some(&h) = out.verdict.output() {
            accepted += 1;
            good += (dist(&class.members()[h], &f).unwrap() <= opt + eps) as usize;
        }
    }
    assert!(accepted as f64 / 200.0 >= 1.0 - delta - 0.02);
    assert!(good as f64 / 200.0 >= 1.0 - delta - 0.02);
}

#[test]
fn semi_supervised_catches_mislabeling() {
    let f = noisy_junta(8, 22);
    let mut caught = 0;
    for seed in 0..500 {
        let out = semi(&f, ProverKind::MislabelFraction { p: 0.2 }, 0.5, 0.1, seed).unwrap();
        caught += (out.transcript.label_mismatches > 0) as usize;
        if out.transcript.label_mismatches > 0 {
            assert!(!out.verdict.is_accept());
        }
    }
    assert!(caught as f64 / 500.0 >= 1.0 - 0.05 - 0.02, "{caught}");
    for seed in 0..100 {
        let out = semi(&f, ProverKind::MislabelFraction { p: 0.0 }, 0.5, 0.1, seed).unwrap();
        assert_eq!(out.transcript.label_mismatches, 0);
    }
}

#[test]
fn semi_supervised_configuration() {
    let f = noisy_junta(6, 1);
    assert!(matches!(semi(&f, ProverKind::Honest, 0.5, 0.4, 0), Err(pacverify::Error::Config(_))));
    let mut oracle = RandomExampleOracle::uniform(Arc::clone(&f), seeded(0));
    let mut unlabeled = oracle.unlabeled_source();
    assert!(matches!(
        prepare_semi_supervised(&mut oracle, &mut unlabeled, 10, 11, &mut seeded(1)),
        Err(pacverify::Error::Config(_))
    ));
}

#[test]
fn labeled_budget_ignores_class_and_arity() {
    for (n, k) in [(6, 1), (8, 1), (6, 2)] {
        let f = noisy_junta(n, 3);
        let class = FiniteHypothesisClass::from_class(&JuntaClass::new(n, k).unwrap(), 1 << 14, None).unwrap();
        let mut oracle = RandomExampleOracle::uniform(Arc::clone(&f), seeded(0));
        let mut unlabeled = oracle.unlabeled_source();
        let mut prover = Prover::honest(Arc::clone(&f), seeded(1));
        let out = protocol_semi_supervised(
            &mut oracle,
            &mut unlabeled,
            &mut prover,
            &class,
            0.5,
            0.1,
            &ErmConfig::default(),
            &ExactPredicate,
            &mut seeded(2),
        )
        .unwrap();
        assert_eq!(out.counters.random_examples, labeled_count(0.5, 0.1).unwrap());
    }
}

#[test]
fn labeled_positions_are_hidden() {
    let f = noisy_junta(8, 5);
    let (m, q) = (200u64, 20u64);
    let trials = 2000;
    let mut hits = 0u64;
    for seed in 0..trials {
        let mut oracle = RandomExampleOracle::uniform(Arc::clone(&f), stream(seed, 0));
        let mut unlabeled = oracle.unlabeled_source();
        let round = prepare_semi_supervised(&mut oracle, &mut unlabeled, m, q, &mut stream(seed, 1)).unwrap();
        assert_eq!(round.known.iter().filter(|k| k.is_some()).count() as u64, q);
        hits += round.known[..q as usize].iter().filter(|k| k.is_some()).count() as u64;
    }
    let p = q as f64 / m as f64;
    let n = (trials * q) as f64;
    let sigma = (p * (1.0 - p) / n).sqrt();
    assert!(hits as f64 / n <= p + 4.0 * sigma);
}

#[test]
fn transcript_hides_nothing_it_should_keep() {
    let f = noisy_junta(6, 9);
    let out = semi(&f, ProverKind::Honest, 0.5, 0.1, 4).unwrap();
    let json = serde_json::to_string(&out).unwrap();
    assert_eq!(serde_json::from_str::<ErmOutcome>(&json).unwrap(), out);
    assert!(json.contains("permutation_seed"));
    assert_eq!(out.transcript.c, 4.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn erm_is_always_almost_optimal(seed in any::<u64>(), len in 1usize..60, eps in 0.0f64..1.0) {
        let class = junta_class(5);
        let f = make_function(5, &FunctionSpec::Random { seed }).unwrap();
        let mut rng = seeded(seed);
        let s = labeled(&f, (0..len).map(|_| rng.gen_range(0..32)));
        let (h, e) = erm_argmin(&class, &s).unwrap();
        prop_assert!(check_almost_optimal(&class, h, &s, eps));
        prop_assert!(class.members().iter().all(|m| empirical_error(m, &s).unwrap() >= e));
    }

    #[test]
    fn sample_size_grows_as_delta_shrinks(vc in 0.0f64..20.0, eps in 0.01f64..1.0, d in 0.01f64..0.5) {
        prop_assert!(sample_size(vc, eps, d / 2.0, 4.0).unwrap() >= sample_size(vc, eps, d, 4.0).unwrap());
    }
}
