mod cli;
mod output;
mod scenario;

use std::process::ExitCode;

use clap::Parser;
use coordobs::observer::estimation_error;
use coordobs::{selftest, Error};

use cli::{Cli, Command, RunArgs, ScenarioName, Variant};
use output::SummaryRecord;
use scenario::{Params, RunConfig};

/// Failure with its exit status.
struct Failure {
    code: String,
    message: String,
    status: u8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: e.code().to_string(),
            message: e.to_string(),
            status: 1,
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: "io".into(),
            message: e.to_string(),
            status: 1,
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let text = e.to_string();
            let first = text
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            eprintln!("E:usage: {first}");
            return ExitCode::from(1);
        }
    };
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("E:{}: {}", f.code, f.message);
            ExitCode::from(f.status)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Oscillator { variant, run } => run_one(ScenarioName::Oscillator, variant, &run),
        Command::Bioreactor { run } => run_one(ScenarioName::Bioreactor, Variant::Dim6, &run),
        Command::Selftest { samples } => run_selftest(samples),
        Command::Sweep {
            scenario,
            param,
            values,
            metric,
            variant,
            run,
        } => sweep(scenario, variant, &run, &param, &values, &metric),
    }
}

fn run_one(name: ScenarioName, variant: Variant, args: &RunArgs) -> Result<(), Failure> {
    if args.list_keys {
        for (k, v) in Params::defaults(name, variant).entries() {
            println!("{k}={v}");
        }
        return Ok(());
    }
    if args.tol.is_nan() || args.tol <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "tol".into(),
            reason: "must be positive".into(),
        }
        .into());
    }
    let config = RunConfig::resolve(name, variant, &args.sim)?;
    let entries = config.params.entries();
    let scenario = config.params.build()?;
    let run = scenario.run(config.mode, &config.grid)?;
    if let Some(path) = &args.out {
        output::save_csv(&run, path)?;
    }
    let summary = estimation_error(&run, args.tol);
    let record = SummaryRecord::new(scenario.name(), config.mode.as_str(), &entries, &summary);
    if let Some(path) = &args.summary {
        output::save_summary(&record, path)?;
    }
    println!(
        "{} {}: final_error={:.6e} time_to({:e})={} min_det={} truncated={}",
        record.scenario,
        record.mode,
        summary.final_error,
        args.tol,
        summary.time_to.map_or("none".into(), |t| format!("{t}")),
        summary.min_det.map_or("n/a".into(), |d| format!("{d:.6e}")),
        summary.truncated,
    );
    match &run.truncation {
        Some(tr) if !args.expect_truncation => Err(Failure {
            code: "truncated".into(),
            message: format!("run stopped at t={} ({})", tr.t, tr.reason),
            status: 2,
        }),
        _ => Ok(()),
    }
}

fn run_selftest(samples: usize) -> Result<(), Failure> {
    let checks = selftest::run_all(samples);
    for c in &checks {
        println!("{c}");
    }
    let passed = checks.iter().filter(|c| c.passed).count();
    println!("{passed}/{} checks passed", checks.len());
    if passed == checks.len() {
        Ok(())
    } else {
        Err(Failure {
            code: "selftest".into(),
            message: format!("{} checks failed", checks.len() - passed),
            status: 1,
        })
    }
}

enum Metric {
    FinalError,
    TimeTo(f64),
}

impl Metric {
    fn parse(s: &str) -> Result<Self, Error> {
        let bad = || Error::InvalidParameter {
            name: "metric".into(),
            reason: format!("unknown metric `{s}`"),
        };
        match s.split_once(':') {
            None if s == "final_error" => Ok(Metric::FinalError),
            Some(("time_to", tol)) => match tol.parse::<f64>() {
                Ok(t) if t > 0.0 => Ok(Metric::TimeTo(t)),
                _ => Err(bad()),
            },
            _ => Err(bad()),
        }
    }

    fn column(&self) -> &'static str {
        match self {
            Metric::FinalError => "final_error",
            Metric::TimeTo(_) => "time_to",
        }
    }
}

fn sweep(
    name: ScenarioName,
    variant: Variant,
    sim: &cli::SimArgs,
    param: &str,
    values: &[f64],
    metric: &str,
) -> Result<(), Failure> {
    let metric = Metric::parse(metric)?;
    let base = RunConfig::resolve(name, variant, sim)?;
    let scenarios = values
        .iter()
        .map(|&v| {
            let mut p = base.params.clone();
            p.set(param, v)?;
            p.build()
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let results: Vec<_> = std::thread::scope(|scope| {
        let handles: Vec<_> = scenarios
            .iter()
            .map(|s| scope.spawn(|| s.run(base.mode, &base.grid)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    println!("{param},{},truncated", metric.column());
    for (v, r) in values.iter().zip(results) {
        let run = r?;
        let tol = match metric {
            Metric::TimeTo(t) => t,
            Metric::FinalError => f64::INFINITY,
        };
        let s = estimation_error(&run, tol);
        let value = match metric {
            Metric::FinalError => format!("{:.16e}", s.final_error),
            Metric::TimeTo(_) => s.time_to.map_or("none".into(), |t| format!("{t}")),
        };
        println!("{v},{value},{}", s.truncated);
    }
    Ok(())
}
