//! `bdris` command-line front end.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Result};
use clap::Parser;

use bdris::attack::Architecture;
use bdris::channel::UplinkMode;
use bdris::config::{parse_config, parse_schemes};
use bdris::sim::{rows_to_csv, run_sweep, write_csv, AttackKind, ExperimentSpec, SafeMode, Scheme, Sweep, SweepAxis};
use bdris::verify::{bench_attacks, run_suites};

#[global_allocator]
static GLOBAL: mimalloc::MiMalloc = mimalloc::MiMalloc;

/// Monte-Carlo robustness study of RSMA and SDMA under adversarial RIS reconfiguration.
#[derive(Parser, Debug)]
#[command(name = "bdris", version)]
struct Cli {
    /// Experiment file (`key = value` lines); flags override its values.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Data-phase attack.
    #[arg(long, value_name = "none|random|aligned")]
    attack: Option<AttackKind>,

    /// Surface architecture.
    #[arg(long, value_name = "single|group|fully")]
    arch: Option<Architecture>,

    /// Multiple-access scheme.
    #[arg(long, value_name = "rsma|sdma|both", value_parser = parse_schemes)]
    scheme: Option<Schemes>,

    /// Surface state during uplink training.
    #[arg(long, value_name = "absorb|reflect")]
    mode: Option<UplinkMode>,

    /// Sweep, e.g. `transmit_power_dbm=0,10,20`.
    #[arg(long, value_name = "AXIS=V1,V2,...", value_parser = parse_sweep)]
    sweep: Option<Sweep>,

    /// Trials per sweep point.
    #[arg(long, value_name = "N")]
    trials: Option<usize>,

    /// Base seed.
    #[arg(long, value_name = "S")]
    seed: Option<u64>,

    /// Reference system for the robustness metrics.
    #[arg(long, value_name = "static-ris|no-ris")]
    safe_mode: Option<SafeMode>,

    /// CSV destination; stdout when absent.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Run the invariant suites and exit.
    #[arg(long, conflicts_with_all = ["bench", "sweep", "out", "config"])]
    verify: bool,

    /// Time aligned-attack generation per architecture and exit.
    #[arg(long, conflicts_with_all = ["sweep", "out", "config"])]
    bench: bool,
}

type Schemes = Vec<Scheme>;

fn parse_sweep(text: &str) -> std::result::Result<Sweep, String> {
    let (axis, values) = text
        .split_once('=')
        .ok_or_else(|| format!("expected `axis=v1,v2,...`, found `{text}`"))?;
    let axis: SweepAxis = axis.trim().parse()?;
    let values = values
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("`{}` is not a number", v.trim())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(Sweep { axis, values })
}

fn build_spec(cli: &Cli) -> Result<ExperimentSpec> {
    let mut spec = match &cli.config {
        Some(path) => parse_config(path)?,
        None => ExperimentSpec::default(),
    };
    if let Some(a) = cli.attack {
        spec.attack = a;
    }
    if let Some(a) = cli.arch {
        spec.architecture = a;
    }
    if let Some(s) = &cli.scheme {
        spec.schemes = s.clone();
    }
    if let Some(m) = cli.mode {
        spec.scenario.uplink_mode = m;
    }
    if let Some(s) = &cli.sweep {
        spec.sweep = Some(s.clone());
    }
    if let Some(n) = cli.trials {
        spec.trials = n;
    }
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    if let Some(m) = cli.safe_mode {
        spec.safe_mode = m;
    }
    spec.validate()?;
    Ok(spec)
}

fn verify() -> Result<()> {
    let mut failed = 0;
    for s in run_suites() {
        println!("{} {}: {}", if s.passed { "PASS" } else { "FAIL" }, s.name, s.detail);
        failed += usize::from(!s.passed);
    }
    if failed > 0 {
        bail!("{failed} invariant suite(s) failed");
    }
    Ok(())
}

fn bench() -> Result<()> {
    let counts = [50, 100, 200];
    let rows = bench_attacks(&counts, 5, 1)?;
    println!("num_elements,arch,median_seconds");
    for r in &rows {
        println!("{},{},{:.6}", r.num_elements, r.architecture.name(), r.seconds);
    }
    for d in counts {
        let time = |a: Architecture| rows.iter().find(|r| r.num_elements == d && r.architecture == a).map(|r| r.seconds);
        let (group, fully) = (time(Architecture::Group), time(Architecture::Fully));
        match (group, fully) {
            (Some(g), Some(f)) if g < f => {}
            _ => bail!("group-connected generation is not faster than fully connected at D = {d}"),
        }
    }
    eprintln!("group-connected generation is faster than fully connected at every D");
    Ok(())
}

fn run(cli: &Cli) -> Result<()> {
    if cli.verify {
        return verify();
    }
    if cli.bench {
        return bench();
    }
    let spec = build_spec(cli)?;
    let rows = run_sweep(&spec)?;
    match &cli.out {
        Some(path) => {
            write_csv(path, &rows)?;
            eprintln!("wrote {} rows to {}", rows.len(), path.display());
        }
        None => print!("{}", rows_to_csv(&rows)),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
