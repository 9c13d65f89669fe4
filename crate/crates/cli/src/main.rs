use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rle_dtw::bench::{self, DistanceFamily, GenSpec, RunLengthDist};
use rle_dtw::dtw::Mode;
use rle_dtw::{DistanceFn, RleString};
use rle_dtw_cli::input::{self, InputFormat};
use rle_dtw_cli::{parse_epsilon, ApproxMode, CliError};
use serde_json::json;

#[derive(Parser)]
#[command(name = "rle-dtw", version, about = "DTW distance between run-length encoded strings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact DTW by the quadratic dynamic program.
    Exact(Inputs),
    /// (1 + eps)-approximate DTW on the run-block grid.
    Approx {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        epsilon: String,
        #[arg(long, value_enum, default_value_t = ApproxMode::Auto)]
        mode: ApproxMode,
    },
    /// Diagnostic dumps of the block grid or the approximation graph.
    Dump {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_enum)]
        dump: DumpKind,
        /// Required for the graph dump.
        #[arg(long)]
        epsilon: Option<String>,
    },
    /// Generate a seeded random instance.
    Gen(GenArgs),
    /// Seeded experiments, written as CSV.
    Bench {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Args)]
struct Inputs {
    /// File holding x, or `-` for standard input.
    #[arg(long)]
    x: String,
    /// File holding y, or `-` for standard input.
    #[arg(long)]
    y: String,
    #[arg(long, value_enum, default_value_t = InputFormat::Raw)]
    format: InputFormat,
    /// `hamming`, `absdiff` or `matrix:<path>`.
    #[arg(long, default_value = "absdiff")]
    delta: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum DumpKind {
    Grid,
    Graph,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    Hamming,
    Absdiff,
}

impl From<Family> for DistanceFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Hamming => DistanceFamily::Hamming,
            Family::Absdiff => DistanceFamily::AbsDiff,
        }
    }
}

#[derive(Args)]
struct RunLengths {
    #[arg(long, default_value_t = 1)]
    run_min: u64,
    #[arg(long, default_value_t = 50)]
    run_max: u64,
    /// Geometric run lengths with this success probability instead of uniform.
    #[arg(long)]
    geometric: Option<f64>,
}

impl RunLengths {
    fn dist(&self) -> RunLengthDist {
        match self.geometric {
            Some(p) => RunLengthDist::Geometric { p },
            None => RunLengthDist::Uniform {
                lo: self.run_min,
                hi: self.run_max,
            },
        }
    }
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    k: usize,
    #[arg(long)]
    l: usize,
    #[command(flatten)]
    runs: RunLengths,
    #[arg(long, default_value_t = 8)]
    alphabet: u32,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = InputFormat::Rle)]
    format: InputFormat,
    /// Write x here instead of embedding it in the JSON output.
    #[arg(long)]
    out_x: Option<String>,
    #[arg(long)]
    out_y: Option<String>,
}

#[derive(Subcommand)]
enum Experiment {
    /// Approximate versus exact values on random instances.
    Ratio {
        #[arg(long, default_value_t = 100)]
        instances: usize,
        #[arg(long, default_value_t = 30)]
        k_max: usize,
        #[arg(long, default_value_t = 30)]
        l_max: usize,
        #[command(flatten)]
        runs: RunLengths,
        #[arg(long, default_value_t = 8)]
        alphabet: u32,
        #[arg(long, value_enum, default_value_t = Family::Absdiff)]
        family: Family,
        /// Comma-separated `mode:eps` pairs, mode one of direct, poly, hamming.
        #[arg(long, default_value = "direct:0.25")]
        eps: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Edge counts for growing k = l against the size bound.
    Scaling {
        /// Comma-separated run counts.
        #[arg(long, default_value = "50,100")]
        k: String,
        /// Run counts of the calibration set that fixes the constant.
        #[arg(long, default_value = "10,20,30,40")]
        calibrate: String,
        #[arg(long, default_value = "0.5")]
        epsilon: String,
        #[command(flatten)]
        runs: RunLengths,
        #[arg(long, default_value_t = 8)]
        alphabet: u32,
        #[arg(long, value_enum, default_value_t = Family::Absdiff)]
        family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
}

fn load(inputs: &Inputs) -> Result<(RleString, RleString, DistanceFn), CliError> {
    if inputs.x == "-" && inputs.y == "-" {
        return Err(CliError::Usage(
            "only one of --x and --y can read standard input".into(),
        ));
    }
    let x = input::load_string(&inputs.x, inputs.format)?;
    let y = input::load_string(&inputs.y, inputs.format)?;
    let d = input::parse_delta(&inputs.delta)?;
    Ok((x, y, d))
}

fn parse_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .map(|v| {
            v.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("expected comma-separated integers, got {s:?}")))
        })
        .collect()
}

fn parse_mode_eps(s: &str) -> Result<Vec<(Mode, num_rational::BigRational)>, CliError> {
    s.split(',')
        .map(|pair| {
            let (mode, eps) = pair
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("expected mode:eps, got {pair:?}")))?;
            let mode = match mode.trim() {
                "direct" => Mode::ApproxDirect,
                "poly" => Mode::ApproxPoly,
                "hamming" => Mode::ApproxHamming,
                other => return Err(CliError::Usage(format!("unknown mode {other:?}"))),
            };
            Ok((mode, parse_epsilon(eps.trim())?))
        })
        .collect()
}

fn output(path: &Option<String>) -> Result<Box<dyn Write>, CliError> {
    Ok(match path {
        Some(p) => Box::new(File::create(p).map_err(|e| CliError::Io {
            path: p.clone(),
            message: e.to_string(),
        })?),
        None => Box::new(io::stdout().lock()),
    })
}

fn encode(s: &RleString, format: InputFormat) -> String {
    match format {
        InputFormat::Raw => s.letters().filter_map(|l| l.as_char()).collect(),
        InputFormat::Rle => s
            .runs()
            .iter()
            .map(|r| format!("{} {}\n", r.letter.as_char().unwrap_or('?'), r.count))
            .collect(),
    }
}

fn write_file(path: &str, body: &str) -> Result<(), CliError> {
    std::fs::write(path, body).map_err(|e| CliError::Io {
        path: path.to_string(),
        message: e.to_string(),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut stdout = io::stdout().lock();
    let io_err = rle_dtw_cli::stdout_error;
    match cli.command {
        Command::Exact(inputs) => {
            let (x, y, d) = load(&inputs)?;
            let r = rle_dtw_cli::run_exact(&x, &y, &d)?;
            writeln!(stdout, "{}", rle_dtw_cli::result_json(&r)).map_err(io_err)?;
        }
        Command::Approx { inputs, epsilon, mode } => {
            let eps = parse_epsilon(&epsilon)?;
            let (x, y, d) = load(&inputs)?;
            let r = rle_dtw_cli::run_approx(&x, &y, &d, &eps, mode)?;
            writeln!(stdout, "{}", rle_dtw_cli::result_json(&r)).map_err(io_err)?;
        }
        Command::Dump { inputs, dump, epsilon } => {
            let (x, y, d) = load(&inputs)?;
            match dump {
                DumpKind::Grid => {
                    let v = rle_dtw_cli::grid_dump(&x, &y, &d)?;
                    writeln!(stdout, "{v}").map_err(io_err)?;
                }
                DumpKind::Graph => {
                    let eps = parse_epsilon(epsilon.as_deref().ok_or(CliError::MissingEpsilon)?)?;
                    for line in rle_dtw_cli::graph_dump_lines(&x, &y, &d, &eps)? {
                        writeln!(stdout, "{line}").map_err(io_err)?;
                    }
                }
            }
        }
        Command::Gen(args) => {
            let spec = GenSpec {
                k: args.k,
                l: args.l,
                run_length: args.runs.dist(),
                alphabet_size: args.alphabet,
                family: DistanceFamily::AbsDiff,
                seed: args.seed,
            };
            let (x, y) = bench::generate_instance(&spec)?;
            let (ex, ey) = (encode(&x, args.format), encode(&y, args.format));
            let mut doc =
                json!({ "seed": args.seed, "k": x.run_count(), "l": y.run_count(), "m": x.len(), "n": y.len() });
            match &args.out_x {
                Some(p) => write_file(p, &ex)?,
                None => doc["x"] = json!(ex),
            }
            match &args.out_y {
                Some(p) => write_file(p, &ey)?,
                None => doc["y"] = json!(ey),
            }
            writeln!(stdout, "{doc}").map_err(io_err)?;
        }
        Command::Bench { experiment } => match experiment {
            Experiment::Ratio {
                instances,
                k_max,
                l_max,
                runs,
                alphabet,
                family,
                eps,
                seed,
                out,
            } => {
                let eps_list = parse_mode_eps(&eps)?;
                let specs = bench::random_specs(instances, k_max, l_max, runs.dist(), alphabet, family.into(), seed);
                let report = bench::run_ratio_experiment(&specs, &eps_list)?;
                drop(stdout);
                report.write_csv(output(&out)?)?;
            }
            Experiment::Scaling {
                k,
                calibrate,
                epsilon,
                runs,
                alphabet,
                family,
                seed,
                out,
            } => {
                let eps = parse_epsilon(&epsilon)?;
                let base = GenSpec {
                    k: 1,
                    l: 1,
                    run_length: runs.dist(),
                    alphabet_size: alphabet,
                    family: family.into(),
                    seed,
                };
                let calib: Vec<GenSpec> = parse_list(&calibrate)?
                    .into_iter()
                    .enumerate()
                    .map(|(t, k)| GenSpec {
                        k,
                        l: k,
                        seed: seed.wrapping_add(1_000_000 + t as u64),
                        ..base.clone()
                    })
                    .collect();
                let c = bench::calibrate_edge_constant(&calib, &eps)?;
                let report = bench::run_scaling_experiment(&parse_list(&k)?, &eps, &base, c)?;
                drop(stdout);
                report.write_csv(output(&out)?)?;
            }
        },
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) | Err(CliError::OutputClosed) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.code().1 as u8)
        }
    }
}
