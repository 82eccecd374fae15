use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;
use std::time::Instant;

use pcmc::cli::{emit, parse_args, run_metadata, Destination};
use pcmc::run_experiment;

fn main() -> ExitCode {
    let args = match parse_args(std::env::args_os()) {
        Ok(a) => a,
        Err(e) => e.exit(),
    };
    let config = &args.config;
    if args.seed_generated {
        eprintln!(
            "no --seed given; using generated seed {}",
            config.master_seed
        );
    }
    eprintln!("{}", run_metadata(config));

    let started = Instant::now();
    let results = match run_experiment(config) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    eprintln!(
        "{} cells x {} trials in {:.1}s on {} worker{}",
        results.len(),
        config.trials_per_cell,
        started.elapsed().as_secs_f64(),
        config.worker_count,
        if config.worker_count == 1 { "" } else { "s" }
    );

    let written = match &args.output {
        Destination::Stdout => emit(&results, args.format, config, &mut io::stdout().lock()),
        Destination::File(path) => File::create(path)
            .and_then(|f| emit(&results, args.format, config, &mut BufWriter::new(f))),
    };
    if let Err(e) = written {
        eprintln!("error: cannot write results: {e}");
        return ExitCode::FAILURE;
    }

    let mut failed = false;
    for c in results.iter().filter(|c| c.failures > 0) {
        failed = true;
        eprintln!(
            "cell (order {}, D {}): {} eigenvector failures, first trials {:?} (seed {})",
            c.order, c.deviation, c.failures, c.failed_trials, config.master_seed
        );
    }
    if failed {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    }
}
