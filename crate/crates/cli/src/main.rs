use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mqc_lab::lattices::{ChainOptions, OutcomeSource};
use mqc_lab_cli::analyze::{analyze, default_measures};
use mqc_lab_cli::bellpair::bellpair;
use mqc_lab_cli::encode::{encode_analyze, load_encoding, EncodingKind};
use mqc_lab_cli::family::{parse_sizes, FamilyKind, FamilySpec};
use mqc_lab_cli::measures::{Limits, Measure};
use mqc_lab_cli::pattern::pattern_run;
use mqc_lab_cli::protocol::{parse_extent, verify_protocol, Protocol};
use mqc_lab_cli::transform::{parse_ops, transform, write_graph};
use mqc_lab_cli::{configure_threads, emit, error_code, Format, Report, EXIT_USAGE};

/// Entanglement criteria and lattice protocols for measurement-based quantum computing.
#[derive(Parser)]
#[command(name = "mqc-lab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Largest state vector (in qubits) to simulate.
    #[arg(long, default_value_t = mqc_lab::DEFAULT_STATEVEC_LIMIT)]
    statevec_limit: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FamilyArgs {
    #[arg(long, value_enum)]
    family: FamilyKind,
    /// `A..B` (inclusive) or a comma-separated list, strictly increasing.
    #[arg(long)]
    sizes: Option<String>,
    /// Graph file for `--family file` (edge list or graph6).
    #[arg(long)]
    file: Option<PathBuf>,
}

impl FamilyArgs {
    fn spec(&self, seed: u64) -> anyhow::Result<FamilySpec> {
        let sizes = self.sizes.as_deref().map(parse_sizes).transpose()?;
        FamilySpec::new(self.family, sizes, seed, self.file.as_deref())
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate measures across a family's sizes and classify their scaling.
    Analyze {
        #[command(flatten)]
        family: FamilyArgs,
        /// Comma-separated; defaults to rank_width (W family: the state measures).
        #[arg(long, value_enum, value_delimiter = ',')]
        measures: Vec<Measure>,
        /// Also write `x y` columns per measure to this file.
        #[arg(long)]
        emit_plot_data: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run a lattice conversion or gate pattern and check every stage.
    VerifyProtocol {
        #[arg(value_enum)]
        protocol: Protocol,
        /// Output window `N` or `N1xN2` (lattice conversion only).
        #[arg(long, default_value = "2")]
        extent: String,
        /// Random inputs per gate pattern.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Find and verify a Pauli pattern leaving a Bell pair on vertices `a`, `b`.
    Bellpair {
        graph: PathBuf,
        a: u32,
        b: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Apply Pauli measurements and local complementations, e.g. `--ops Y3,Z5=1,LC2`.
    Transform {
        graph: PathBuf,
        #[arg(long)]
        ops: String,
        /// Write the resulting graph (relabelled 0..n) as an edge list.
        #[arg(long)]
        graph_out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Compare coarse-grained measures of encoded states with unencoded ones.
    EncodeAnalyze {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, value_enum)]
        encoding: Option<EncodingKind>,
        /// Block size of the built-in encodings.
        #[arg(long, default_value_t = 2)]
        m: usize,
        /// JSON file with `logical_zero` and `logical_one` amplitude maps.
        #[arg(long)]
        encoding_file: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Execute a JSON measurement pattern on the graph state of a graph file.
    PatternRun {
        pattern: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// JSON input state (`labels`, `amplitudes`) replacing |+> on those qubits.
        #[arg(long)]
        input: Option<PathBuf>,
        /// Sample this many outcome sequences instead of enumerating all.
        #[arg(long)]
        runs: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
}

fn finish(report: &impl Report, common: &Common) -> anyhow::Result<u8> {
    emit(report, common.format, common.out.as_deref())?;
    Ok(report.status().code())
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    configure_threads()?;
    match cli.command {
        Command::Analyze {
            family,
            measures,
            emit_plot_data,
            common,
        } => {
            let spec = family.spec(common.seed)?;
            let measures = if measures.is_empty() {
                default_measures(spec.kind)
            } else {
                measures
            };
            let limits = Limits {
                statevec_limit: common.statevec_limit,
                seed: common.seed,
                ..Limits::default()
            };
            let report = analyze(&spec, &measures, &limits)?;
            if let Some(path) = emit_plot_data {
                std::fs::write(&path, report.plot_data())?;
            }
            finish(&report, &common)
        }
        Command::VerifyProtocol {
            protocol,
            extent,
            trials,
            common,
        } => {
            let extent = parse_extent(&extent)?;
            let opts = ChainOptions {
                seed: common.seed,
                statevec_limit: common.statevec_limit,
                ..ChainOptions::default()
            };
            finish(&verify_protocol(protocol, extent, trials, &opts)?, &common)
        }
        Command::Bellpair {
            graph,
            a,
            b,
            common,
        } => finish(&bellpair(&graph, a, b, common.statevec_limit)?, &common),
        Command::Transform {
            graph,
            ops,
            graph_out,
            common,
        } => {
            let g = mqc_lab::graphstate::io::read_graph(&graph)?;
            let (report, gs) = transform(&g, &parse_ops(&ops)?, common.statevec_limit)?;
            if let Some(path) = graph_out {
                write_graph(gs.graph(), &path)?;
            }
            finish(&report, &common)
        }
        Command::EncodeAnalyze {
            family,
            encoding,
            m,
            encoding_file,
            common,
        } => {
            let spec = family.spec(common.seed)?;
            let (name, enc) = load_encoding(encoding, m, encoding_file.as_deref())?;
            let limits = Limits {
                statevec_limit: common.statevec_limit,
                seed: common.seed,
                ..Limits::default()
            };
            finish(&encode_analyze(&spec, &name, &enc, &limits)?, &common)
        }
        Command::PatternRun {
            pattern,
            graph,
            input,
            runs,
            common,
        } => {
            let source = match runs {
                Some(runs) => OutcomeSource::Sampled {
                    seed: common.seed,
                    runs,
                },
                None => OutcomeSource::Exhaustive,
            };
            finish(
                &pattern_run(
                    &pattern,
                    &graph,
                    input.as_deref(),
                    &source,
                    common.statevec_limit,
                )?,
                &common,
            )
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(error_code(&e))
        }
    }
}
