use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use qwalk::{CoinMode, InitialSpec64};

use crate::expr::{parse_complex, parse_real};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Discrete-time coined quantum walks on the line")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Position distributions for a range of steps.
    Simulate(SimulateArgs),
    /// Step-by-position probability matrix for steps 0..T.
    Chessboard(ChessboardArgs),
    /// Position and coin Shannon entropies per step.
    Entropy(EntropyArgs),
    /// KL divergence of the step-dependent walk from the step-independent one, or between two files.
    Kl(KlArgs),
    /// Fidelity of a walk distribution against a reference.
    Fidelity(FidelityArgs),
    /// Density-matrix walk with coin and position dephasing.
    Decohere(DecohereArgs),
    /// Rule-based classification of the step-dependent walk.
    Classify(ClassifyArgs),
    /// Bloch vectors of the local coin states.
    Bloch(BlochArgs),
    /// Distributions for the angles θ(1 + j/10), j = 0..10.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Sdc,
    Sic,
}

impl From<ModeArg> for CoinMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sdc => CoinMode::StepDependent,
            ModeArg::Sic => CoinMode::StepIndependent,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted or `-`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct WalkArgs {
    /// Coin angle, e.g. `pi/3`, `2pi/5`, `3.59pi/5`, `0.7`.
    #[arg(long, value_parser = angle, allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::Sdc)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub init: InitArgs,
}

#[derive(Debug, Clone, Args)]
pub struct InitArgs {
    /// Initial coin state `a,b` (complex literals such as `1/sqrt2,i/sqrt2`) or `0`, `1`, `+i`.
    #[arg(long = "init", value_parser = initial, default_value = "1,0", allow_hyphen_values = true)]
    pub init: InitialSpec64,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    /// Last step written.
    #[arg(long, default_value_t = 12)]
    pub steps: usize,
    /// First step written; defaults to 6, or `steps` when that is smaller.
    #[arg(long)]
    pub from: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ChessboardArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 50)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct KlArgs {
    /// Coin angle shared by both walks; not needed with `--p-file`/`--q-file`.
    #[arg(long, value_parser = angle, allow_hyphen_values = true, required_unless_present = "p_file")]
    pub theta: Option<f64>,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    /// Additive smoothing ε: finite divergences even when supports differ.
    #[arg(long, value_parser = non_negative)]
    pub kl_epsilon: Option<f64>,
    /// Distribution file for P, as written by `simulate`.
    #[arg(long, requires = "q_file", conflicts_with = "theta")]
    pub p_file: Option<PathBuf>,
    /// Distribution file for Q.
    #[arg(long, requires = "p_file")]
    pub q_file: Option<PathBuf>,
    /// Step to read from the files; the last one by default.
    #[arg(long)]
    pub step: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Against {
    /// Density-matrix walk with the `--against-theta` coin (Hadamard by default) and rates `--q`, `--s`.
    Decoherent,
    /// Step-independent walk at the same angle.
    Sic,
    /// Distribution read from `--q-file`.
    File,
}

#[derive(Debug, Clone, Args)]
pub struct FidelityArgs {
    #[arg(long, value_parser = angle, allow_hyphen_values = true, required_unless_present = "p_file")]
    pub theta: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Sdc)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub init: InitArgs,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, value_enum, default_value_t = Against::Decoherent)]
    pub against: Against,
    /// Coin angle of the decoherent reference walk (step-independent).
    #[arg(long, value_parser = angle, default_value = "pi/4", allow_hyphen_values = true)]
    pub against_theta: f64,
    /// Coin-measurement probability per step.
    #[arg(long, value_parser = probability, default_value_t = 0.0)]
    pub q: f64,
    /// Position-measurement probability per step.
    #[arg(long, value_parser = probability, default_value_t = 0.0)]
    pub s: f64,
    /// Read P from a file instead of running the walk.
    #[arg(long)]
    pub p_file: Option<PathBuf>,
    #[arg(long, required_if_eq("against", "file"))]
    pub q_file: Option<PathBuf>,
    #[arg(long)]
    pub step: Option<usize>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct DecohereArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 10)]
    pub steps: usize,
    #[arg(long, value_parser = probability, default_value_t = 0.0)]
    pub q: f64,
    #[arg(long, value_parser = probability, default_value_t = 0.0)]
    pub s: f64,
    /// Write purity, trace and coin coherence per step instead of distributions.
    #[arg(long)]
    pub purity: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_parser = angle, allow_hyphen_values = true, required_unless_present = "table1")]
    pub theta: Option<f64>,
    /// Classify every reference angle and compare with its expected label.
    #[arg(long, conflicts_with = "theta")]
    pub table1: bool,
    #[arg(long, default_value_t = qwalk::DEFAULT_HORIZON)]
    pub horizon: usize,
    /// TOML file overriding classifier thresholds.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct BlochArgs {
    #[command(flatten)]
    pub walk: WalkArgs,
    #[arg(long, default_value_t = 8)]
    pub steps: usize,
    /// Per-step edge vectors, their dot product and coin-state overlap.
    #[arg(long)]
    pub edges: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Base angle θ.
    #[arg(long, value_parser = angle, default_value = "pi/3", allow_hyphen_values = true)]
    pub theta: f64,
    #[arg(long, default_value_t = 12)]
    pub steps: usize,
    #[arg(long, default_value_t = 6)]
    pub from: usize,
    /// Write support counts and classes instead of distributions.
    #[arg(long)]
    pub summary: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

fn angle(s: &str) -> Result<f64, String> {
    parse_real(s).map_err(|e| e.to_string())
}

fn non_negative(s: &str) -> Result<f64, String> {
    let x = parse_real(s).map_err(|e| e.to_string())?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("must be non-negative, got {x}"))
    }
}

fn probability(s: &str) -> Result<f64, String> {
    let x = parse_real(s).map_err(|e| e.to_string())?;
    if (0.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        Err(format!("must lie in [0, 1], got {x}"))
    }
}

fn initial(s: &str) -> Result<InitialSpec64, String> {
    let spec = match s.trim() {
        "0" => InitialSpec64::zero(),
        "1" => InitialSpec64::one(),
        "+i" => InitialSpec64::plus_i(),
        pair => {
            let (a, b) = pair.split_once(',').ok_or("expected `a,b`, `0`, `1` or `+i`")?;
            let a = parse_complex(a).map_err(|e| e.to_string())?;
            let b = parse_complex(b).map_err(|e| e.to_string())?;
            InitialSpec64::new(a, b)
        }
    };
    let n2 = spec.norm_sqr();
    if (n2 - 1.0).abs() > 1e-9 {
        return Err(format!("|a|² + |b|² must be 1 within 1e-9, got {n2}"));
    }
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn initial_states() {
        assert_eq!(initial("0").unwrap(), InitialSpec64::zero());
        assert_eq!(initial("+i").unwrap(), InitialSpec64::plus_i());
        let s = initial("1/sqrt2, i/sqrt2").unwrap();
        assert!((s.b.im - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(initial("1,1").is_err());
        assert!(initial("0.6").is_err());
    }
}
