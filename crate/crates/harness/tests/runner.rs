use pacverify_harness::*;

fn small(experiment: Experiment) -> ExperimentConfig {
    let mut c = ExperimentConfig::new(experiment);
    c.trials = 3;
    match experiment {
        Experiment::Glstar => {
            c.n = 6;
            c.t = 2;
            c.eps = 0.3;
        }
        Experiment::VerifyFourierMq | Experiment::VerifyFourierRe => {
            c.n = 6;
            c.t = 1;
            c.eps = 0.3;
            c.function = "noisy:0.05:3:character:0x25".into();
            c.coefficient_samples = Some(40);
            c.gl_samples = Some(2_000);
            c.basis_size = Some(3);
            if experiment == Experiment::VerifyFourierRe {
                c.delta = 0.3;
                c.coefficient_samples = Some(4);
                c.gl_samples = Some(4);
            }
        }
        Experiment::EstimateDistance | Experiment::VerifyJunta => {
            c.n = 6;
            c.eps = 0.2;
            c.function = "noisy:0.1:4:junta:1,3:0x6".into();
            c.samples = Some(50);
            c.repetitions = Some(9);
        }
        Experiment::NwMarginalTest => {
            c.n = 4;
            c.samples = Some(4_000);
        }
        Experiment::NwWeakLearner => {
            c.n = 4;
            c.function = "random:3".into();
            c.repetitions = Some(64);
        }
        Experiment::VerifyErm | Experiment::VerifyErmSemi => {
            c.k = 1;
            c.eps = 0.5;
            c.function = "noisy:0.1:3:junta:2:0x2".into();
        }
    }
    c
}

#[test]
fn every_experiment_runs() {
    for e in Experiment::ALL {
        let c = small(e);
        let r = run_experiment(&c).unwrap_or_else(|err| panic!("{e}: {err:#}"));
        assert_eq!(r.trials, 3, "{e}");
        assert_eq!(r.transcripts.len(), 3);
        assert_eq!(r.experiment, e.name());
        assert!(r.pass);
    }
}

#[test]
fn zero_trials_give_an_empty_passing_report() {
    let mut c = small(Experiment::VerifyErm);
    c.trials = 0;
    c.gates.min_accept_rate = Some(0.99);
    let r = run_experiment(&c).unwrap();
    assert_eq!((r.trials, r.accepted, r.successes), (0, 0, 0));
    assert_eq!(r.accept_rate, None);
    assert_eq!(r.error_quantiles, None);
    assert_eq!(r.membership_queries, None);
    assert!(r.pass);
    assert_eq!(r.trials_csv().unwrap().lines().count(), 1);
}

#[test]
fn reports_are_byte_identical_for_a_fixed_seed() {
    for e in [Experiment::VerifyFourierRe, Experiment::VerifyErmSemi, Experiment::NwMarginalTest] {
        let c = small(e);
        let a = run_experiment(&c).unwrap().to_json().unwrap();
        let b = run_experiment(&c).unwrap().to_json().unwrap();
        assert_eq!(a, b);
        let mut one = c.clone();
        one.workers = Some(1);
        let mut two = c.clone();
        two.workers = Some(2);
        let (x, y) = (run_experiment(&one).unwrap(), run_experiment(&two).unwrap());
        assert_eq!(x.transcripts, y.transcripts);
    }
}

#[test]
fn acceptance_rate_is_stable_across_master_seeds() {
    let mut c = small(Experiment::VerifyFourierMq);
    c.trials = 200;
    c.gates.min_accept_rate = Some(0.88);
    let a = run_experiment(&c).unwrap();
    c.seed = 77;
    let b = run_experiment(&c).unwrap();
    assert!(a.pass && b.pass);
    assert!((a.accept_rate.unwrap() - b.accept_rate.unwrap()).abs() <= 0.05);
    assert_ne!(a.config_hash, b.config_hash);
}

#[test]
fn transcripts_round_trip() {
    for e in [Experiment::Glstar, Experiment::VerifyJunta, Experiment::VerifyErmSemi] {
        let r = run_experiment(&small(e)).unwrap();
        let json = r.to_json().unwrap();
        let back = Report::from_json(&json).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json().unwrap(), json);
    }
}

#[test]
fn configs_parse_and_validate() {
    let c = small(Experiment::NwWeakLearner);
    let text = c.to_toml().unwrap();
    assert_eq!(ExperimentConfig::from_toml(&text).unwrap(), c);
    let parsed = ExperimentConfig::from_toml("experiment = \"verify-erm\"\ntrials = 5\n[gates]\nmin_accept_rate = 0.9\n").unwrap();
    assert_eq!(parsed.experiment, Experiment::VerifyErm);
    assert_eq!(parsed.gates.min_accept_rate, Some(0.9));
    assert_eq!(parsed.n, 8);
    for bad in [
        "experiment = \"verify-erm\"\nbogus = 1\n",
        "experiment = \"nope\"\n",
        "experiment = \"glstar\"\neps = 0.0\n",
        "experiment = \"glstar\"\nfunction = \"unknown\"\n",
        "experiment = \"glstar\"\nprover = \"sneaky\"\n",
        "experiment = \"glstar\"\n[gates]\nmin_accept_rate = 2.0\n",
    ] {
        assert!(ExperimentConfig::from_toml(bad).is_err(), "{bad}");
    }
    for file in ["protocol2_completeness", "transform_lie_heavy", "erm_semi_mislabel", "nw_weak_learner"] {
        let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{file}.toml"));
        ExperimentConfig::load(&path).unwrap();
    }
}

#[test]
fn gates_decide_the_outcome() {
    let mut c = small(Experiment::VerifyErm);
    c.prover = "wrong:worst".into();
    c.gates.min_accept_rate = Some(0.5);
    let r = run_experiment(&c).unwrap();
    assert_eq!(r.accept_rate, Some(0.0));
    assert!(!r.pass);
    assert!(!r.gates[0].pass);
    c.gates = Gates { max_accept_rate: Some(0.0), ..Default::default() };
    assert!(run_experiment(&c).unwrap().pass);
}

#[test]
fn prover_view_drops_private_fields() {
    let r = run_experiment(&small(Experiment::VerifyErmSemi)).unwrap();
    let full = r.to_json().unwrap();
    assert!(full.contains("permutation_seed"));
    let view = serde_json::to_string(&r.prover_view().unwrap()).unwrap();
    for key in PRIVATE_KEYS {
        assert!(!view.contains(key));
    }
}

#[test]
fn outputs_are_written() {
    let dir = std::env::temp_dir().join(format!("pacverify-harness-{}", std::process::id()));
    let r = run_experiment(&small(Experiment::EstimateDistance)).unwrap();
    r.write(&dir).unwrap();
    for f in ["report.json", "report.prover.json", "trials.csv", "summary.csv"] {
        assert!(dir.join(f).exists());
    }
    let csv = std::fs::read_to_string(dir.join("trials.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(csv.starts_with("trial,verdict,success,error"));
    std::fs::remove_dir_all(dir).unwrap();
}
