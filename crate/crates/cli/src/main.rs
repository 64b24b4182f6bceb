//! `netcode`: command-line front end for netcode-core.
//!
//! Exit codes: 0 success (or achievable), 1 rate not achievable, 2 invalid
//! input, 3 request refused by a size guard.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use netcode_core::achieve::{self, AchieveError};
use netcode_core::coding::code_with_coefficients;
use netcode_core::experiment::{self, ExactProbability, ExperimentError, TrialReport};
use netcode_core::network::NetworkSpec;
use netcode_core::{Field, Network, RateVector};

#[derive(Parser)]
#[command(
    name = "netcode",
    version,
    about = "Random linear network coding experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and validate a network file.
    Validate { network: PathBuf },
    /// Decide whether a rate vector is achievable by random linear coding.
    Check {
        network: PathBuf,
        /// Comma-separated rates, one per source, e.g. `1,1`.
        #[arg(long)]
        rate: RateVector,
    },
    /// Monte Carlo estimate of the decoding success rate over one field.
    Simulate {
        network: PathBuf,
        #[arg(long)]
        rate: RateVector,
        /// Field descriptor: `p:<q>` for a prime field, `2^<k>` for GF(2^k).
        #[arg(long)]
        field: Field,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Monte Carlo estimates over a list of fields of increasing order.
    Sweep {
        network: PathBuf,
        #[arg(long)]
        rate: RateVector,
        /// Comma-separated field descriptors, e.g. `p:2,2^4,2^8,2^16`.
        #[arg(long, value_delimiter = ',', required = true)]
        fields: Vec<Field>,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Exact success probability by enumerating every coefficient tuple.
    Oracle {
        network: PathBuf,
        #[arg(long)]
        rate: RateVector,
        #[arg(long)]
        field: Field,
        /// Search for one coding under which every sink decodes instead.
        #[arg(long)]
        witness: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Enumerate achievable rate vectors with every entry at most `bound`.
    Region {
        network: PathBuf,
        #[arg(long)]
        bound: u32,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,
    /// Master seed; trial k uses stream k of a generator seeded with it.
    #[arg(long)]
    seed: u64,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Csv,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    fn guard(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

fn experiment_failure(err: ExperimentError) -> Failure {
    match err {
        ExperimentError::TooManyTuples { .. } => Failure::guard(format!("--field: {err}")),
        ExperimentError::ZeroTrials => Failure::input(format!("--trials: {err}")),
        ExperimentError::Rate(_) => Failure::input(format!("--rate: {err}")),
        ExperimentError::SweepOrder { .. } => Failure::input(format!("--fields: {err}")),
        ExperimentError::Io(_) | ExperimentError::Csv(_) => {
            Failure::input(format!("output: {err}"))
        }
        ExperimentError::Coding(_) => Failure::input(err.to_string()),
    }
}

fn achieve_failure(err: AchieveError) -> Failure {
    match err {
        AchieveError::RegionTooLarge { .. } => Failure::guard(format!("--bound: {err}")),
        AchieveError::Rate(_) => Failure::input(format!("--rate: {err}")),
        other => Failure::input(other.to_string()),
    }
}

fn load(path: &Path) -> Result<Network, Failure> {
    let shown = path.display();
    let text = fs::read_to_string(path).map_err(|e| Failure::input(format!("{shown}: {e}")))?;
    let spec = NetworkSpec::from_json(&text)
        .map_err(|e| Failure::input(format!("{shown}:{}:{}: {}", e.line, e.column, e.message)))?;
    let mut net = spec.validate().map_err(|e| {
        let lines: Vec<String> = e.0.iter().map(|v| format!("{shown}: {v}")).collect();
        Failure::input(lines.join("\n"))
    })?;
    if spec.name.is_none() {
        let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned());
        net.set_name(stem.unwrap_or_default());
    }
    Ok(net)
}

fn set_threads(threads: Option<u16>) -> Result<(), Failure> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n as usize)
            .build_global()
            .map_err(|e| Failure::input(format!("--threads: {e}")))?;
    }
    Ok(())
}

fn emit(out: &OutputArgs, text: &str) -> Result<(), Failure> {
    match &out.output {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::input(format!("--output {}: {e}", path.display()))),
        None => io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::input(format!("stdout: {e}"))),
    }
}

fn trial_table(reports: &[TrialReport]) -> String {
    let mut s = String::new();
    for r in reports {
        let _ = writeln!(
            s,
            "{} rate {} over {}: {} trials, seed {}",
            r.network, r.rate, r.field, r.trials, r.seed
        );
        let _ = writeln!(
            s,
            "  {:<12} {:>10} {:>12}",
            "sink", "successes", "success_rate"
        );
        let rows = r
            .per_sink
            .iter()
            .map(|c| (c.sink.as_str(), c.successes))
            .chain([("ALL", r.overall)]);
        for (sink, n) in rows {
            let _ = writeln!(
                s,
                "  {:<12} {:>10} {:>12.6}",
                sink,
                n,
                n as f64 / r.trials as f64
            );
        }
    }
    s
}

fn trial_output(out: &OutputArgs, reports: &[TrialReport]) -> Result<(), Failure> {
    match out.format {
        Format::Csv => emit(out, &experiment::trial_csv_string(reports)),
        Format::Table => emit(out, &trial_table(reports)),
    }
}

fn exact_table(p: &ExactProbability) -> String {
    let mut s = format!(
        "{} rate {} over {}: {} coefficient tuples\n",
        p.network, p.rate, p.field, p.tuples
    );
    let _ = writeln!(
        s,
        "  {:<12} {:>10} {:>16}",
        "sink", "successes", "probability"
    );
    for (k, c) in p.per_sink.iter().enumerate() {
        let _ = writeln!(
            s,
            "  {:<12} {:>10} {:>16}",
            c.sink,
            c.successes,
            p.sink_probability(k).to_string()
        );
    }
    let _ = writeln!(
        s,
        "  {:<12} {:>10} {:>16}",
        "ALL",
        p.overall,
        p.overall_probability().to_string()
    );
    s
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Validate { network } => {
            let net = load(&network)?;
            println!(
                "{}: {} nodes, {} edges, {} sources, {} sinks",
                network.display(),
                net.nodes().len(),
                net.edges().len(),
                net.source_count(),
                net.sinks().len()
            );
            Ok(0)
        }
        Command::Check { network, rate } => {
            let net = load(&network)?;
            let verdict = achieve::check_rate(&net, &rate).map_err(achieve_failure)?;
            print!("{}", verdict.table());
            Ok(if verdict.achievable { 0 } else { 1 })
        }
        Command::Simulate {
            network,
            rate,
            field,
            run,
        } => {
            let net = load(&network)?;
            set_threads(run.out.threads)?;
            let report = experiment::monte_carlo(&net, &rate, &field, run.trials, run.seed)
                .map_err(experiment_failure)?;
            trial_output(&run.out, &[report])?;
            Ok(0)
        }
        Command::Sweep {
            network,
            rate,
            fields,
            run,
        } => {
            let net = load(&network)?;
            set_threads(run.out.threads)?;
            let table = experiment::field_sweep(&net, &rate, &fields, run.trials, run.seed)
                .map_err(experiment_failure)?;
            trial_output(&run.out, &table.rows)?;
            Ok(0)
        }
        Command::Oracle {
            network,
            rate,
            field,
            witness,
            out,
        } => {
            let net = load(&network)?;
            set_threads(out.threads)?;
            if witness {
                let aug = net
                    .augment(&rate)
                    .map_err(|e| Failure::input(format!("--rate: {e}")))?;
                let text = match experiment::existence_search(&net, &rate, &field)
                    .map_err(experiment_failure)?
                {
                    Some(w) => {
                        let a = code_with_coefficients(&aug, &field, &w.coefficients)
                            .map_err(|e| Failure::input(e.to_string()))?;
                        format!("witness at tuple {}\n{}", w.tuple_index, a.dump(&aug))
                    }
                    None => format!("no coding over {field} decodes every sink\n"),
                };
                emit(&out, &text)?;
                return Ok(0);
            }
            let exact = experiment::brute_force(&net, &rate, &field).map_err(experiment_failure)?;
            let text = match out.format {
                Format::Table => exact_table(&exact),
                Format::Csv => {
                    let mut buf = Vec::new();
                    experiment::write_exact_csv(&mut buf, &[exact]).map_err(experiment_failure)?;
                    String::from_utf8(buf).expect("csv output is utf-8")
                }
            };
            emit(&out, &text)?;
            Ok(0)
        }
        Command::Region {
            network,
            bound,
            out,
        } => {
            let net = load(&network)?;
            set_threads(out.threads)?;
            let report = achieve::enumerate_region(&net, bound).map_err(achieve_failure)?;
            let mut s = String::new();
            match out.format {
                Format::Csv => {
                    s.push_str("rate,frontier\n");
                    for r in &report.achievable {
                        let _ = writeln!(s, "\"{}\",{}", r, report.frontier.contains(r));
                    }
                }
                Format::Table => {
                    let list = |v: &[RateVector]| {
                        v.iter()
                            .map(|r| format!("({r})"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    };
                    let _ = writeln!(s, "{}: bound {}", net.name(), bound);
                    let _ = writeln!(
                        s,
                        "achievable ({}): {}",
                        report.achievable.len(),
                        list(&report.achievable)
                    );
                    let _ = writeln!(
                        s,
                        "frontier ({}): {}",
                        report.frontier.len(),
                        list(&report.frontier)
                    );
                }
            }
            emit(&out, &s)?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
