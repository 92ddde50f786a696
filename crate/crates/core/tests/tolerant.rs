use pacverify::boolfn::*;
use pacverify::prover::{HypothesisSelector, Prover, ProverKind};
use pacverify::rng::{seeded, stream};
use pacverify::stats::proportion_within;
use pacverify::tolerant::*;
use pacverify::transform::TransformOptions;
use proptest::prelude::*;
use std::sync::Arc;

fn junta_class(n: usize) -> Arc<JuntaClass> {
    Arc::new(JuntaClass::new(n, 2).unwrap())
}

fn table(n: usize, spec: &str) -> Arc<TruthTable> {
    Arc::new(make_function(n, &spec.parse().unwrap()).unwrap())
}

#[test]
fn tester_decisions_follow_the_window() {
    let class = junta_class(8);
    let member = table(8, "junta:1,4:0x6");
    let mut mq = MembershipOracle::new(Arc::clone(&member));
    let w = ToleranceWindow::new(0.2, 0.0).unwrap();
    let mut rng = seeded(1);
    let accepts = (0..300).filter(|_| tolerant_test(&mut mq, class.as_ref(), w, &mut rng).unwrap()).count();
    assert!(proportion_within(accepts as u64, 300, 2.0 / 3.0));
    assert_eq!(mq.query_count(), 300 * TesterQueries::default().count() as u64);

    let far = table(8, "random:5");
    let tester = StubTester::new(&far, class.as_ref()).unwrap();
    let w = ToleranceWindow::new(tester.opt - 0.05, tester.opt - 0.15).unwrap();
    assert!((tester.accept_probability(w) - 1.0 / 3.0).abs() < 1e-12);
    let mut mq = MembershipOracle::new(far);
    let rejects = (0..300).filter(|_| !tester.test(&mut mq, w, &mut rng).unwrap()).count();
    assert!(proportion_within(rejects as u64, 300, 2.0 / 3.0));
}

#[test]
fn window_validation() {
    assert!(ToleranceWindow::new(0.2, 0.3).is_err());
    assert!(ToleranceWindow::new(1.0, 0.3).is_err());
    let w = ToleranceWindow::around(0.98, 0.05).unwrap();
    assert!(w.c_u < 1.0 && w.c_l == 0.98 - 0.05);
    assert_eq!(ToleranceWindow::around(0.01, 0.05).unwrap().c_l, 0.0);
}

#[test]
fn estimates_for_members_and_complement_closed_classes() {
    let class = junta_class(8);
    let member = table(8, "junta:0,7:0x9");
    let tester = StubTester::new(&member, class.as_ref()).unwrap();
    assert_eq!(tester.opt, 0.0);
    let mut mq = MembershipOracle::new(member);
    for t in 0..20 {
        let est = distance_estimate(&mut mq, &tester, 0.05, 0.1, &EstimatorConfig::default(), &mut stream(2, t)).unwrap();
        assert!(est.estimate <= 0.05, "{}", est.estimate);
        assert_eq!(est.trace.len(), 5);
        assert_eq!(est.tests, 5 * 80);
    }
    let f = table(8, "random:9");
    let tester = StubTester::new(&f, class.as_ref()).unwrap();
    assert!(tester.opt <= 0.5);
    let mut mq = MembershipOracle::new(f);
    for t in 0..20 {
        let est = distance_estimate(&mut mq, &tester, 0.05, 0.1, &EstimatorConfig::default(), &mut stream(3, t)).unwrap();
        assert!(est.estimate <= 0.55);
    }
}

#[test]
fn estimator_accuracy_on_random_function() {
    let class = junta_class(10);
    let f = table(10, "random:2");
    let (exact, _) = opt_dist(&f, class.as_ref()).unwrap();
    let tester = StubTester::new(&f, class.as_ref()).unwrap();
    assert_eq!(tester.opt, exact);
    let mut ok = 0;
    for t in 0..100 {
        let mut mq = MembershipOracle::new(Arc::clone(&f));
        let est = distance_estimate(&mut mq, &tester, 0.05, 0.1, &EstimatorConfig::default(), &mut stream(4, t)).unwrap();
        ok += ((est.estimate - exact).abs() <= 0.05) as u32;
    }
    assert!(ok >= 88, "{ok}/100");
}

#[test]
fn binary_search_with_an_exact_oracle() {
    for target in [0.0, 0.13, 0.31, 0.5, 0.77] {
        let est = binary_search(0.01, 1, |w| Ok(target <= (w.c_u + w.c_l) / 2.0)).unwrap();
        assert!((est.estimate - target).abs() <= 0.01, "{target} {}", est.estimate);
    }
}

fn run_verifier(f: &Arc<TruthTable>, kind: ProverKind, seed: u64) -> EstimatorOutcome {
    let class = junta_class(f.n());
    let mut mq = MembershipOracle::new(Arc::clone(f));
    let mut re = RandomExampleOracle::uniform(Arc::clone(f), seeded(seed ^ 7));
    let mut prover = Prover::new(Arc::clone(f), kind, seeded(seed ^ 9));
    verify_via_estimator(&mut mq, &mut re, &mut prover, class, 0.2, 0.1, &mut seeded(seed)).unwrap()
}

#[test]
fn estimator_verifier_completeness_and_soundness() {
    let f = table(10, "noisy:0.1:4:junta:2,5:0x6");
    let class = junta_class(10);
    let (opt, _) = opt_dist(&f, class.as_ref()).unwrap();
    let constant = TruthTable::constant(10, 1).unwrap();
    assert!(dist(&f, &constant).unwrap() - opt > 0.2);
    let (mut honest, mut caught) = (0, 0);
    for seed in 0..200 {
        let out = run_verifier(&f, ProverKind::Honest, seed);
        honest += out.verdict.is_accept() as u32;
        if seed == 0 {
            assert_eq!(out.counters.random_examples, q_cb(0.2 / 6.0, 0.05).unwrap());
        }
        let out = run_verifier(&f, ProverKind::WrongHypothesis { selector: HypothesisSelector::Constant(1) }, seed);
        caught += !out.verdict.is_accept() as u32;
    }
    assert!(honest >= 176, "{honest}");
    assert!(caught >= 176, "{caught}");
}

#[test]
fn member_target_returns_itself() {
    let f = table(8, "junta:3,6:0xb");
    let class = junta_class(8);
    let out = run_verifier(&f, ProverKind::Honest, 1);
    let h = *out.verdict.output().unwrap();
    assert_eq!(class.member(h), *f);
    let out = run_verifier(&f, ProverKind::GarbageProof, 1);
    assert!(!out.verdict.is_accept());
}

fn junta_budget() -> EstimatorVerifierBudget {
    EstimatorVerifierBudget {
        hypothesis_samples: Some(20),
        estimator: Some(EstimatorConfig { repetitions: Some(9), ..Default::default() }),
    }
}

#[test]
fn junta_verification_from_random_examples() {
    let mut counts = Vec::new();
    for n in [8usize, 12] {
        let f = table(n, "junta:1,6:0x9");
        let class = junta_class(n);
        let mut re = RandomExampleOracle::uniform(Arc::clone(&f), seeded(1));
        let mut prover = Prover::honest(Arc::clone(&f), seeded(2));
        let out = verify_junta_random_examples(
            &mut re,
            &mut prover,
            class.clone(),
            0.3,
            0.1,
            junta_budget(),
            &TransformOptions::default(),
            &mut seeded(3),
        )
        .unwrap();
        let h = *out.verdict.output().expect("honest prover accepted");
        assert!(dist(&f, &class.member(h)).unwrap() <= 0.3);
        assert_eq!(out.counters.membership_queries, 0);
        counts.push(out.counters.random_examples);
    }
    assert_eq!(counts[0], counts[1]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn accept_probability_is_monotone_in_the_distance(d in 0.0f64..0.5, c_l in 0.0f64..0.4, width in 0.01f64..0.5) {
        let c_u = (c_l + width).min(0.99);
        prop_assume!(c_u > c_l);
        let w = ToleranceWindow::new(c_u, c_l).unwrap();
        let at = |opt: f64| StubTester { n: 4, opt, correctness: 2.0 / 3.0, queries: TesterQueries::default() }.accept_probability(w);
        prop_assert!(at(d) >= at(d + 0.01) - 1e-12);
        prop_assert!((1.0 / 3.0 - 1e-12..=2.0 / 3.0 + 1e-12).contains(&at(d)));
    }

    #[test]
    fn binary_search_steps_bracket_the_estimate(target in 0.0f64..1.0, eps in 0.01f64..0.5) {
        let est = binary_search(eps, 1, |w| Ok(target <= (w.c_u + w.c_l) / 2.0)).unwrap();
        prop_assert_eq!(est.trace.len(), search_steps(eps));
        prop_assert!((est.estimate - target).abs() <= eps);
    }
}
