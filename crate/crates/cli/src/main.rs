mod commands;
mod output;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use logmax::Rational;
use serde::Serialize;

use output::Format;

#[derive(Parser, Debug, Serialize)]
#[command(name = "logmax", version, about = "Exact β-Jacobi moments and extremum statistics of log-correlated processes")]
pub struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Pretty, global = true)]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub output: Option<PathBuf>,
    /// Also print exact values as decimals with this many places.
    #[arg(long, global = true)]
    pub decimal: Option<usize>,
    /// Worker threads (default: available cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct Jacobi {
    #[arg(long, allow_hyphen_values = true)]
    pub kappa: Rational,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Rational,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Rational,
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub n: Rational,
    #[arg(long, allow_hyphen_values = true)]
    pub k: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelName {
    Gue,
    Lcgp,
    Fbm0,
    Laguerre,
    Gaussian,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelName,
    /// GUE charge q (a = b = (q + β²)/2).
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    pub q: Rational,
    #[arg(long, allow_hyphen_values = true)]
    pub abar: Option<Rational>,
    #[arg(long, allow_hyphen_values = true)]
    pub bbar: Option<Rational>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    Circular,
    Cauchy,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    Y,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Table {
    AppendixC,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ChainArgs {
    #[arg(long, default_value_t = 1_000_000)]
    pub sweeps: u64,
    #[arg(long, default_value_t = 20_000)]
    pub burn_in: u64,
    #[arg(long, default_value_t = 1)]
    pub thin: u64,
    #[arg(long, default_value_t = 1000)]
    pub batches: usize,
    #[arg(long, env = "LOGMAX_SEED", default_value_t = logmax::montecarlo::DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Jacobi moment ⟨(1/n) Σ yᵢ^k⟩ by the partition sum.
    Moment {
        #[command(flatten)]
        q: Jacobi,
        /// Contribution of every partition.
        #[arg(long)]
        per_partition: bool,
        /// Evaluate a negative moment with the partition-length shift l.
        #[arg(long)]
        shift: Option<i64>,
    },
    /// The same moment by nested contour residues.
    Contour {
        #[command(flatten)]
        q: Jacobi,
        /// Emit the pole tree (variable, pole, residue prefactor).
        #[arg(long)]
        pole_tree: bool,
        #[arg(long, default_value_t = 10_000)]
        max_nodes: usize,
    },
    /// Compare partition sum and contour residues exactly.
    Crosscheck {
        #[command(flatten)]
        q: Jacobi,
    },
    /// Frozen (or fixed-β) moments of the extremum position.
    Predict {
        #[command(flatten)]
        model: ModelArgs,
        /// Single order; otherwise 1..=kmax.
        #[arg(long, allow_hyphen_values = true)]
        k: Option<i64>,
        #[arg(long, default_value_t = 4)]
        kmax: u32,
        /// Inverse temperature; default is the frozen point β = 1.
        #[arg(long)]
        beta: Option<Rational>,
        /// Partition terms as Laurent series in β − 1 (up to the constant term).
        #[arg(long)]
        per_partition: bool,
    },
    /// Cumulants of the extremum position.
    Cumulants {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 6)]
        kmax: u32,
        #[arg(long)]
        beta: Option<Rational>,
    },
    /// Conjectured moments of the circular and Cauchy ensembles.
    Conjecture {
        #[arg(long, value_enum)]
        ensemble: Ensemble,
        #[arg(long)]
        kappa: Rational,
        /// μ (circular) or ρ (Cauchy).
        #[arg(long, allow_hyphen_values = true)]
        weight: Rational,
        #[arg(long)]
        n: Rational,
        #[arg(long)]
        k: i64,
    },
    /// Cumulants and Laplace transform of the minimum value V_m.
    Vmin {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 4)]
        pmax: u32,
        #[arg(long, default_value_t = logmax::extremes::DEFAULT_DIGITS)]
        digits: u32,
        /// Evaluate E e^{−nV_m} at these n (< 1).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        laplace: Vec<Rational>,
    },
    /// Position–value correlations.
    Corr {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 1)]
        k: u32,
        /// 1: ⟨δO δV⟩, 2: ⟨δO δV²⟩.
        #[arg(long, default_value_t = 1)]
        order: u32,
        #[arg(long, value_enum, default_value_t = Variable::Y)]
        variable: Variable,
    },
    /// Reproduce a table of exact values.
    Table {
        #[arg(value_enum)]
        table: Table,
        #[arg(long, value_enum)]
        model: ModelName,
    },
    /// Metropolis estimates for the β-Jacobi gas.
    McJacobi {
        #[arg(long)]
        kappa: Rational,
        #[arg(long, allow_hyphen_values = true)]
        a: Rational,
        #[arg(long, allow_hyphen_values = true)]
        b: Rational,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "1,2")]
        k: Vec<i32>,
        #[command(flatten)]
        chain: ChainArgs,
        /// Join exact values and z-scores.
        #[arg(long)]
        against_exact: bool,
    },
    /// Argmax of GUE characteristic polynomials.
    McGue {
        #[arg(long, value_delimiter = ',', default_value = "200,500,1000")]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 2000)]
        realizations: usize,
        #[arg(long, default_value_t = 8192)]
        grid: usize,
        #[arg(long, env = "LOGMAX_SEED", default_value_t = logmax::montecarlo::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        against_exact: bool,
    },
    /// Argmin of fBm0 on [0, L].
    McFbm0 {
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        /// η as a fraction of L.
        #[arg(long, default_value_t = 1.0 / 1024.0)]
        eta: f64,
        #[arg(long, default_value_t = 5000)]
        realizations: usize,
        #[arg(long, env = "LOGMAX_SEED", default_value_t = logmax::montecarlo::DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        against_exact: bool,
    },
    /// Metropolis estimates of ⟨cos kθ⟩ for the weighted circular gas.
    McCircular {
        #[arg(long)]
        kappa: Rational,
        #[arg(long, allow_hyphen_values = true)]
        mu: Rational,
        #[arg(long)]
        n: usize,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<u32>,
        #[command(flatten)]
        chain: ChainArgs,
        /// Join the conjectured values.
        #[arg(long)]
        against_exact: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Moment { .. } => "moment",
            Command::Contour { .. } => "contour",
            Command::Crosscheck { .. } => "crosscheck",
            Command::Predict { .. } => "predict",
            Command::Cumulants { .. } => "cumulants",
            Command::Conjecture { .. } => "conjecture",
            Command::Vmin { .. } => "vmin",
            Command::Corr { .. } => "corr",
            Command::Table { .. } => "table",
            Command::McJacobi { .. } => "mc-jacobi",
            Command::McGue { .. } => "mc-gue",
            Command::McFbm0 { .. } => "mc-fbm0",
            Command::McCircular { .. } => "mc-circular",
        }
    }
}

fn emit(cli: &Cli, text: &str) -> std::io::Result<()> {
    match &cli.output {
        Some(p) => std::fs::write(p, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(j).build_global() {
            eprintln!("logmax: cannot set up {j} workers: {e}");
            return ExitCode::from(2);
        }
    }
    let config = serde_json::to_value(&cli).expect("serializable");
    let name = cli.command.name();
    match commands::run(&cli.command) {
        Ok(report) => {
            let text = report.render(cli.format, name, &config, cli.decimal);
            if let Err(e) = emit(&cli, &text) {
                eprintln!("logmax: {e}");
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            if cli.format == Format::Json {
                let obj = serde_json::json!({
                    "command": name,
                    "config": config,
                    "error": { "kind": commands::error_kind(&e), "message": e.to_string() },
                });
                let _ = emit(&cli, &format!("{}\n", serde_json::to_string_pretty(&obj).expect("serializable")));
            } else {
                eprintln!("logmax {name}: {e}");
            }
            ExitCode::from(1)
        }
    }
}
