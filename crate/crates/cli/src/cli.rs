use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use exception_sieve_core::verify::StructuredSet;
use exception_sieve_core::{MapKind, Mode};

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "exception-sieve",
    version,
    about = "Certified enumeration of noncototients, nonaliquots and Robbins numbers",
    after_help = "Exit codes: 0 success, 1 failed verification report (X >= 1000), \
                  2 usage or domain error, 3 capacity exceeded, 4 I/O or corrupt cache.\n\
                  EXCEPTION_SIEVE_MAX_SCAN overrides every scan ceiling."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(1..=1024))]
    pub workers: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write data here instead of standard output; a run manifest is
    /// written to `<out>.manifest.json`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Build an attainment image and print its summary.
    Image(ImageArgs),
    /// List the certified exceptions and undecided values up to a limit.
    Exceptions(ImageArgs),
    /// Settle a single value by scanning its full preimage bound.
    Certify(TargetArgs),
    /// List all preimages of a value up to a ceiling.
    Preimages(PreimageArgs),
    /// Check a density theorem at a finite limit.
    Verify(VerifyArgs),
    /// Finite-range values of the lemma quantities.
    Diagnostics(DiagnosticArgs),
    /// Count or test membership in K, M1, M2 or M.
    Sets(SetArgs),
    /// Mersenne and 2p-noncototient flags of an odd prime.
    Classify(ValueArgs),
    /// Check the structure of primes whose Robbins value lies in M.
    Structure(LimitArgs),
    /// Proportion of n <= X with 12 | sigma(n).
    SigmaDensity(LimitArgs),
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Cototient,
    Aliquot,
    Robbins,
}

impl From<KindArg> for MapKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Cototient => MapKind::Cototient,
            KindArg::Aliquot => MapKind::Aliquot,
            KindArg::Robbins => MapKind::Robbins,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize, PartialEq, Eq)]
#[serde(rename_all = "kebab-case")]
pub enum ModeArg {
    Exact,
    EvenOnly,
    Heuristic,
}

#[derive(ValueEnum, Debug, Clone, Copy, Serialize)]
pub enum SetArg {
    #[value(name = "K", alias = "k")]
    K,
    #[value(name = "M1", alias = "m1")]
    M1,
    #[value(name = "M2", alias = "m2")]
    M2,
    #[value(name = "M", alias = "m")]
    M,
}

impl From<SetArg> for StructuredSet {
    fn from(s: SetArg) -> Self {
        match s {
            SetArg::K => StructuredSet::K,
            SetArg::M1 => StructuredSet::M1,
            SetArg::M2 => StructuredSet::M2,
            SetArg::M => StructuredSet::M,
        }
    }
}

fn positive() -> clap::builder::RangedU64ValueParser<u64> {
    clap::value_parser!(u64).range(1..)
}

#[derive(Args, Debug, Serialize)]
pub struct ImageArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, value_parser = positive())]
    pub limit: u64,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    pub mode: ModeArg,
    /// Preimage ceiling for heuristic mode.
    #[arg(long, value_parser = positive())]
    pub ceiling: Option<u64>,
    /// Image cache: reused when compatible, written otherwise.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

impl ImageArgs {
    pub fn mode(&self) -> Result<Mode, String> {
        match (self.mode, self.ceiling) {
            (ModeArg::Exact, None) => Ok(Mode::Exact),
            (ModeArg::EvenOnly, None) => Ok(Mode::EvenOnly),
            (ModeArg::Heuristic, Some(ceiling)) => Ok(Mode::Heuristic { ceiling }),
            (ModeArg::Heuristic, None) => Err("--mode heuristic requires --ceiling".into()),
            (_, Some(_)) => Err("--ceiling applies only to --mode heuristic".into()),
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct TargetArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, value_parser = positive())]
    pub value: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct PreimageArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    #[arg(long, value_parser = positive())]
    pub value: u64,
    #[arg(long, value_parser = positive())]
    pub ceiling: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
    pub theorem: u8,
    #[arg(long, value_parser = positive())]
    pub limit: u64,
    /// Image cache, as for `image`. An exact image also serves theorems 1 and 2.
    #[arg(long)]
    pub cache: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
pub struct DiagnosticArgs {
    #[arg(long, value_parser = clap::value_parser!(u8).range(1..=4))]
    pub lemma: u8,
    #[arg(long, value_parser = positive())]
    pub limit: u64,
    /// Prime threshold y (lemmas 1, 2 and 4), at least 2.
    #[arg(long, default_value_t = 3.0)]
    pub y: f64,
    /// Constant c1 of the divisibility threshold (lemma 3).
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct SetArgs {
    #[arg(long, value_enum)]
    pub set: SetArg,
    /// Count the set over 1..=limit.
    #[arg(long, value_parser = positive(), required_unless_present = "value")]
    pub limit: Option<u64>,
    /// Test membership of one value.
    #[arg(long, value_parser = positive(), conflicts_with = "limit")]
    pub value: Option<u64>,
}

#[derive(Args, Debug, Serialize)]
pub struct ValueArgs {
    #[arg(long, value_parser = positive())]
    pub value: u64,
}

#[derive(Args, Debug, Serialize)]
pub struct LimitArgs {
    #[arg(long, value_parser = positive())]
    pub limit: u64,
}
