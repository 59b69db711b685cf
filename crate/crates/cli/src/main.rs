use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qharper_cli::config::{RawConfig, ScenarioConfig};
use qharper_cli::error::{HarnessError, Result};
use qharper_cli::output;
use qharper_cli::scenario::{self, Parallelism};

#[derive(Parser)]
#[command(
    name = "qharper",
    version,
    about = "Quantized Harper map on the torus: unitary dynamics, translation noise, multipartite concurrence"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve an initial state and record the concurrence series.
    Evolve(RunArgs),
    /// Initial-momentum sweep (q0 in {0.25, 0.5}, p0 = 0.00..1.00 in 0.05 steps).
    Sweep(RunArgs),
    /// Classical phase portrait on a seed grid.
    Portrait(RunArgs),
    /// GHZ reference concurrence values.
    Ghz(RunArgs),
    /// Channel verification suite (CPTP contracts, path equivalence).
    Selfcheck(SelfcheckArgs),
}

#[derive(Args)]
struct RunArgs {
    /// TOML config file (flat keys, `schema = 1`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of qubits.
    #[arg(long)]
    k: Option<u32>,
    /// Kick strength for both Harper factors.
    #[arg(long)]
    chi: Option<f64>,
    /// Noise channel: none | diffusive | pdc | dpc.
    #[arg(long)]
    channel: Option<String>,
    /// Noise strength.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Number of map iterations.
    #[arg(long)]
    steps: Option<usize>,
    /// Initial packet position.
    #[arg(long)]
    q0: Option<f64>,
    /// Initial packet momentum.
    #[arg(long)]
    p0: Option<f64>,
    /// Trajectories for the stochastic mixed-state estimator.
    #[arg(long)]
    trajectories: Option<usize>,
    /// Master seed; all random streams derive from it.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SelfcheckArgs {
    #[command(flatten)]
    run: RunArgs,
    /// Scale the kernel weights to break normalization (negative control).
    #[arg(long, hide = true)]
    corrupt_kernel: Option<f64>,
}

impl RunArgs {
    fn resolve(&self, defaults: RawConfig) -> Result<ScenarioConfig> {
        let file = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        let overrides = RawConfig {
            k: self.k,
            chi: self.chi,
            channel: self.channel.clone(),
            epsilon: self.epsilon,
            steps: self.steps,
            q0: self.q0,
            p0: self.p0,
            trajectories: self.trajectories,
            seed: self.seed,
            out: self.out.clone(),
            ..RawConfig::default()
        };
        ScenarioConfig::resolve(&defaults.merged_with(&file).merged_with(&overrides))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Evolve(args) => {
            let config = args.resolve(RawConfig::default())?;
            let result = scenario::run_evolution(&config)?;
            let csv = output::series_csv(&result.series);
            let entry = output::write_output(&config.out, "series.csv", &csv)?;
            output::write_manifest(
                &config.out,
                "evolve",
                config.seed,
                &config.manifest_entries(),
                &[entry],
            )?;
            let last = result.series.records.last().expect("nonempty series");
            println!(
                "evolve: k={} channel={} steps={} C(0)={:.6} C({})={:.6} [{:.2?}]",
                config.k,
                config.channel.as_str(),
                result.series.records.len() - 1,
                result.series.records[0].concurrence,
                last.step,
                last.concurrence,
                result.wall
            );
            println!("wrote {}", config.out.join("series.csv").display());
            Ok(())
        }
        Command::Sweep(args) => {
            let config = args.resolve(RawConfig::default())?;
            let table = scenario::run_momentum_sweep(&config, Parallelism::Parallel)?;
            let csv = output::sweep_csv(&table);
            let entry = output::write_output(&config.out, "sweep.csv", &csv)?;
            output::write_manifest(
                &config.out,
                "sweep",
                config.seed,
                &config.manifest_entries(),
                &[entry],
            )?;
            println!(
                "sweep: k={} channel={} epsilon={} steps={} points={} [{:.2?}]",
                config.k,
                table.channel.as_str(),
                table.epsilon,
                table.steps,
                table.rows.len(),
                table.wall
            );
            println!("wrote {}", config.out.join("sweep.csv").display());
            Ok(())
        }
        Command::Portrait(args) => {
            let config = args.resolve(RawConfig::default())?;
            let rows = scenario::run_portrait(&config)?;
            let csv = output::portrait_csv(&rows);
            let entry = output::write_output(&config.out, "portrait.csv", &csv)?;
            output::write_manifest(
                &config.out,
                "portrait",
                config.seed,
                &config.manifest_entries(),
                &[entry],
            )?;
            println!(
                "portrait: chi1={} chi2={} seeds={} iterations={} rows={}",
                config.chi1,
                config.chi2,
                config.portrait_grid * config.portrait_grid + 2,
                config.portrait_iterations,
                rows.len()
            );
            println!("wrote {}", config.out.join("portrait.csv").display());
            Ok(())
        }
        Command::Ghz(args) => {
            let config = args.resolve(RawConfig::default())?;
            let report = scenario::ghz_reference(&config)?;
            let csv = output::ghz_csv(&report);
            let entry = output::write_output(&config.out, "ghz.csv", &csv)?;
            output::write_manifest(
                &config.out,
                "ghz",
                config.seed,
                &config.manifest_entries(),
                &[entry],
            )?;
            println!(
                "ghz: k={} closed_form={:.6} from_state={:.6}",
                report.k, report.closed_form, report.from_state
            );
            println!("wrote {}", config.out.join("ghz.csv").display());
            Ok(())
        }
        Command::Selfcheck(args) => {
            // the verification suite defaults to the k=5 working point
            let defaults = RawConfig {
                k: Some(5),
                epsilon: Some(0.04),
                ..RawConfig::default()
            };
            let config = args.run.resolve(defaults)?;
            let report = scenario::channel_selfcheck(&config, args.corrupt_kernel)?;
            for e in &report.entries {
                println!(
                    "{} {:<26} residual {:>12.3e}  (threshold {:.1e})",
                    if e.pass { "PASS" } else { "FAIL" },
                    e.name,
                    e.residual,
                    e.threshold
                );
            }
            let csv = output::selfcheck_csv(&report);
            let entry = output::write_output(&config.out, "selfcheck.csv", &csv)?;
            output::write_manifest(
                &config.out,
                "selfcheck",
                config.seed,
                &config.manifest_entries(),
                &[entry],
            )?;
            println!("wrote {}", config.out.join("selfcheck.csv").display());
            if report.pass() {
                println!("selfcheck: all {} checks passed", report.entries.len());
                Ok(())
            } else {
                Err(HarnessError::Invariant(format!(
                    "{} of {} channel checks failed",
                    report.entries.iter().filter(|e| !e.pass).count(),
                    report.entries.len()
                )))
            }
        }
    }
}
