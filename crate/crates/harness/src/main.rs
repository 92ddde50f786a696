use anyhow::Result;
use clap::{Parser, Subcommand};
use pacverify_harness::{run_experiment, Experiment, ExperimentConfig, Report};
use std::io::{ErrorKind, Write};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "pacverify", version, about = "Runs seeded PAC-verification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML config.
    Run {
        config: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        trials: Option<u64>,
        #[command(flatten)]
        output: Output,
    },
    /// Heavy Fourier coefficients with membership queries.
    Glstar(Flags),
    /// Top-character verification with membership queries.
    VerifyFourierMq(Flags),
    /// Top-character verification compiled to random examples.
    VerifyFourierRe(Flags),
    /// Distance to k-juntas by binary search over a tolerant tester.
    EstimateDistance(Flags),
    /// Junta verification through the distance estimator.
    VerifyJunta(Flags),
    /// Marginals of the NW query distribution.
    NwMarginalTest(Flags),
    /// Weak learner from an exact-image distinguisher.
    NwWeakLearner(Flags),
    /// Supervised ERM verification.
    VerifyErm(Flags),
    /// Semi-supervised ERM verification with label spot checks.
    VerifyErmSemi(Flags),
}

#[derive(clap::Args)]
struct Output {
    /// Directory for report.json, report.prover.json, trials.csv and summary.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the prover-visible copy instead of the full report.
    #[arg(long)]
    prover_view: bool,
}

#[derive(clap::Args)]
struct Flags {
    /// TOML file whose values the flags override.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    t: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    l: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Target function, e.g. `majority3pad`, `character:0x25`, `noisy:0.1:7:junta:1,4:0x6`.
    #[arg(long)]
    function: Option<String>,
    /// Prover strategy, e.g. `honest`, `lie-random:50`, `wrong:swap-heaviest`, `mislabel:0.2`, `garbage`.
    #[arg(long)]
    prover: Option<String>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    repetitions: Option<usize>,
    #[arg(long)]
    coefficient_samples: Option<u64>,
    #[arg(long)]
    gl_samples: Option<u64>,
    #[arg(long)]
    basis_size: Option<usize>,
    #[arg(long)]
    design_m: Option<usize>,
    #[arg(long)]
    design_d: Option<usize>,
    #[arg(long)]
    random_examples: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    min_accept_rate: Option<f64>,
    #[arg(long)]
    max_accept_rate: Option<f64>,
    #[arg(long)]
    min_success_rate: Option<f64>,
    #[arg(long)]
    max_success_rate: Option<f64>,
    #[command(flatten)]
    output: Output,
}

macro_rules! overlay {
    ($cfg:ident, $flags:ident, $($field:ident),*) => {
        $(if let Some(v) = $flags.$field.clone() { $cfg.$field = v; })*
    };
}

macro_rules! overlay_opt {
    ($cfg:ident, $flags:ident, $($field:ident),*) => {
        $(if $flags.$field.is_some() { $cfg.$field = $flags.$field; })*
    };
}

impl Flags {
    fn config(&self, experiment: Experiment) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::new(experiment),
        };
        c.experiment = experiment;
        overlay!(c, self, n, t, k, l, eps, delta, trials, seed, function, prover);
        overlay_opt!(c, self, samples, repetitions, coefficient_samples, gl_samples, basis_size, design_m, design_d, workers);
        c.random_examples |= self.random_examples;
        let g = &mut c.gates;
        overlay_opt!(g, self, min_accept_rate, max_accept_rate, min_success_rate, max_success_rate);
        c.validate()?;
        Ok(c)
    }
}

fn emit(report: &Report, output: &Output) -> Result<()> {
    let text = if let Some(dir) = &output.out {
        report.write(dir)?;
        let rate = |r: Option<f64>| r.map_or("-".to_string(), |v| format!("{v:.4}"));
        format!(
            "{}: {} trials, accept rate {}, success rate {}, gates {}",
            report.experiment,
            report.trials,
            rate(report.accept_rate),
            rate(report.success_rate),
            if report.pass { "pass" } else { "FAIL" }
        )
    } else if output.prover_view {
        serde_json::to_string_pretty(&report.prover_view()?)?
    } else {
        report.to_json()?
    };
    match writeln!(std::io::stdout().lock(), "{text}") {
        Err(e) if e.kind() != ErrorKind::BrokenPipe => Err(e.into()),
        _ => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = (|| -> Result<bool> {
        let (config, output) = match cli.command {
            Command::Run { config, seed, trials, output } => {
                let mut c = ExperimentConfig::load(&config)?;
                c.seed = seed.unwrap_or(c.seed);
                c.trials = trials.unwrap_or(c.trials);
                (c, output)
            }
            Command::Glstar(f) => (f.config(Experiment::Glstar)?, f.output),
            Command::VerifyFourierMq(f) => (f.config(Experiment::VerifyFourierMq)?, f.output),
            Command::VerifyFourierRe(f) => (f.config(Experiment::VerifyFourierRe)?, f.output),
            Command::EstimateDistance(f) => (f.config(Experiment::EstimateDistance)?, f.output),
            Command::VerifyJunta(f) => (f.config(Experiment::VerifyJunta)?, f.output),
            Command::NwMarginalTest(f) => (f.config(Experiment::NwMarginalTest)?, f.output),
            Command::NwWeakLearner(f) => (f.config(Experiment::NwWeakLearner)?, f.output),
            Command::VerifyErm(f) => (f.config(Experiment::VerifyErm)?, f.output),
            Command::VerifyErmSemi(f) => (f.config(Experiment::VerifyErmSemi)?, f.output),
        };
        let report = run_experiment(&config)?;
        emit(&report, &output)?;
        Ok(report.pass)
    })();
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
