//! Command-line driver for `exception-sieve-core`: image builds and caches,
//! exception listings, certification, theorem reports and diagnostics,
//! rendered as JSON or CSV.
//!
//! [`run`] is the whole program; `main` only forwards the process arguments
//! and exit code.

mod cache;
mod cli;
mod emit;
mod error;
mod manifest;

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{CommandFactory, Parser};
use serde::Serialize;

use exception_sieve_core::verify::{
    classify_prime, lemma_report, report_from_image, report_image_spec, robbins_structure_scan,
    set_count, set_membership, sigma_mod12_density, LemmaParams,
};
use exception_sieve_core::{
    build_image, certify, find_preimages, Capacity, Certificate, ImageMap, MapKind, Mode,
    ScanConfig,
};

pub use cache::{
    checksum, decode_image, encode_image, read_cache, write_cache, CACHE_MAGIC, CACHE_VERSION,
};
pub use emit::{decimal, round_sig};
pub use error::CliError;
pub use manifest::{manifest_path, RunManifest};

use cli::{Cli, Command, Format};
use error::Result;
use manifest::{FileRecord, Timer};

/// Decimal integer that replaces every scan ceiling.
pub const MAX_SCAN_ENV: &str = "EXCEPTION_SIEVE_MAX_SCAN";

/// Runs the tool with the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let stdout = io::stdout();
    let stderr = io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Runs the tool, writing data to `out` and messages to `err`; returns the
/// exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            let _ = write!(err, "\n{}", Cli::command().render_long_help());
            return 2;
        }
    };
    match execute(&cli, &argv, out) {
        Ok((code, notes)) => {
            for n in notes {
                let _ = writeln!(err, "exception-sieve: {n}");
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

struct Ctx {
    cfg: ScanConfig,
    timer: Timer,
    inputs: Vec<FileRecord>,
    outputs: Vec<FileRecord>,
    notes: Vec<String>,
}

fn capacity_from_env() -> Result<Capacity> {
    match std::env::var(MAX_SCAN_ENV) {
        Ok(v) => v.trim().parse::<u64>().map(Capacity::uniform).map_err(|_| {
            CliError::Usage(format!(
                "{MAX_SCAN_ENV} must be a decimal integer, got {v:?}"
            ))
        }),
        Err(std::env::VarError::NotPresent) => Ok(Capacity::default()),
        Err(e) => Err(CliError::Usage(format!("{MAX_SCAN_ENV}: {e}"))),
    }
}

fn execute(cli: &Cli, argv: &[OsString], out: &mut dyn Write) -> Result<(i32, Vec<String>)> {
    let cfg = ScanConfig {
        capacity: capacity_from_env()?,
        ..ScanConfig::default()
    };
    let workers = match cli.workers {
        Some(w) => w as usize,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))?;
    let mut ctx = Ctx {
        cfg,
        timer: Timer::new(),
        inputs: Vec::new(),
        outputs: Vec::new(),
        notes: Vec::new(),
    };
    let (body, code) = pool.install(|| dispatch(cli, &mut ctx))?;

    match &cli.out {
        Some(path) => {
            fs::write(path, &body).map_err(|e| CliError::io(path, e))?;
            ctx.outputs
                .push(FileRecord::new(path, checksum(body.as_bytes())));
            let parameters =
                serde_json::to_value(cli).map_err(|e| CliError::Encode(e.to_string()))?;
            let subcommand = serde_json::to_value(&cli.command)
                .ok()
                .and_then(|v| v.as_object().and_then(|o| o.keys().next().cloned()))
                .unwrap_or_default();
            let manifest = RunManifest {
                tool: env!("CARGO_PKG_NAME").to_string(),
                version: env!("CARGO_PKG_VERSION").to_string(),
                subcommand,
                argv: argv
                    .iter()
                    .map(|a| a.to_string_lossy().into_owned())
                    .collect(),
                parameters,
                capacity: ctx.cfg.capacity,
                segment_len: ctx.cfg.segment_len,
                workers,
                phases: ctx.timer.phases,
                inputs: ctx.inputs,
                outputs: ctx.outputs,
            };
            let mpath = manifest_path(path);
            let text = serde_json::to_string_pretty(&manifest)
                .map_err(|e| CliError::Encode(e.to_string()))?;
            fs::write(&mpath, text + "\n").map_err(|e| CliError::io(&mpath, e))?;
        }
        None => out
            .write_all(body.as_bytes())
            .and_then(|_| out.flush())
            .map_err(|e| CliError::io("<stdout>", e))?,
    }
    Ok((code, ctx.notes))
}

/// Loads a compatible cached image or builds one (and caches it).
fn acquire(
    ctx: &mut Ctx,
    kind: MapKind,
    limit: u64,
    mode: Mode,
    cache: Option<&Path>,
    accept_exact: bool,
) -> Result<ImageMap> {
    if let Some(path) = cache.filter(|p| p.exists()) {
        let (img, sum) = ctx.timer.time("read_cache", || read_cache(path))?;
        ctx.inputs.push(FileRecord::new(path, sum));
        let mode_ok = img.mode() == mode || (accept_exact && img.mode() == Mode::Exact);
        if img.kind() == kind && mode_ok && img.limit() >= limit {
            ctx.notes.push(format!(
                "reusing {} {} image to {} from {}",
                img.kind(),
                img.mode(),
                img.limit(),
                path.display()
            ));
            return Ok(if img.limit() > limit {
                img.restrict(limit)
            } else {
                img
            });
        }
        ctx.notes.push(format!(
            "{} does not cover this request; rebuilding",
            path.display()
        ));
    }
    let cfg = ctx.cfg;
    let img = ctx
        .timer
        .time("build_image", || build_image(kind, limit, mode, &cfg))?;
    ctx.notes
        .push(format!("built {kind} {mode} image to {limit}"));
    if let Some(path) = cache {
        let sum = ctx.timer.time("write_cache", || write_cache(&img, path))?;
        ctx.outputs.push(FileRecord::new(path, sum));
    }
    Ok(img)
}

fn render<T: Serialize>(
    format: Format,
    value: &T,
    header: &[&str],
    rows: Vec<Vec<String>>,
) -> Result<String> {
    match format {
        Format::Json => emit::json(value),
        Format::Csv => emit::csv(header, rows),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn ceiling_of(mode: Mode) -> Option<u64> {
    match mode {
        Mode::Heuristic { ceiling } => Some(ceiling),
        _ => None,
    }
}

#[derive(Serialize)]
struct ImageSummary {
    kind: MapKind,
    limit: u64,
    mode: &'static str,
    ceiling: Option<u64>,
    attained: u64,
    exceptions: u64,
    undecided: u64,
    cache: Option<PathBuf>,
}

#[derive(Serialize)]
struct ExceptionList {
    kind: MapKind,
    limit: u64,
    mode: &'static str,
    ceiling: Option<u64>,
    exceptions: Vec<u64>,
    undecided: Vec<u64>,
    count: u64,
}

#[derive(Serialize)]
struct CertifyOut {
    kind: MapKind,
    value: u64,
    #[serde(flatten)]
    certificate: Certificate,
}

fn dispatch(cli: &Cli, ctx: &mut Ctx) -> Result<(String, i32)> {
    let f = cli.format;
    let cfg = ctx.cfg;
    let body = match &cli.command {
        Command::Image(a) => {
            let mode = a.mode().map_err(CliError::Usage)?;
            let img = acquire(ctx, a.kind.into(), a.limit, mode, a.cache.as_deref(), false)?;
            let undecided = img.undecided().len() as u64;
            let s = ImageSummary {
                kind: img.kind(),
                limit: img.limit(),
                mode: mode.name(),
                ceiling: ceiling_of(mode),
                attained: img.bits().count_ones() - undecided,
                exceptions: img.exception_count(),
                undecided,
                cache: a.cache.clone(),
            };
            let row = vec![
                s.kind.to_string(),
                s.limit.to_string(),
                s.mode.to_string(),
                opt(s.ceiling),
                s.attained.to_string(),
                s.exceptions.to_string(),
                s.undecided.to_string(),
            ];
            let header = [
                "kind",
                "limit",
                "mode",
                "ceiling",
                "attained",
                "exceptions",
                "undecided",
            ];
            render(f, &s, &header, vec![row])?
        }
        Command::Exceptions(a) => {
            let mode = a.mode().map_err(CliError::Usage)?;
            let img = acquire(ctx, a.kind.into(), a.limit, mode, a.cache.as_deref(), false)?;
            let ex = img.exceptions();
            let rows = ex.exceptions.iter().map(|v| vec![v.to_string()]).collect();
            let list = ExceptionList {
                kind: img.kind(),
                limit: img.limit(),
                mode: mode.name(),
                ceiling: ceiling_of(mode),
                count: ex.exceptions.len() as u64,
                exceptions: ex.exceptions,
                undecided: ex.undecided,
            };
            render(f, &list, &["value"], rows)?
        }
        Command::Certify(a) => {
            let kind = a.kind.into();
            let certificate = ctx.timer.time("certify", || certify(kind, a.value, &cfg))?;
            let (status, witness) = match certificate {
                Certificate::Attained { witness } => ("attained", Some(witness)),
                Certificate::Exceptional => ("exceptional", None),
                Certificate::Undecidable => ("undecidable", None),
            };
            let row = vec![
                kind.to_string(),
                a.value.to_string(),
                status.to_string(),
                opt(witness),
            ];
            let out = CertifyOut {
                kind,
                value: a.value,
                certificate,
            };
            render(f, &out, &["kind", "value", "status", "witness"], vec![row])?
        }
        Command::Preimages(a) => {
            let kind = a.kind.into();
            let w = ctx.timer.time("find_preimages", || {
                find_preimages(kind, a.value, a.ceiling, &cfg)
            })?;
            let rows = w.preimages.iter().map(|v| vec![v.to_string()]).collect();
            render(f, &w, &["value"], rows)?
        }
        Command::Verify(a) => {
            let (kind, mode) = report_image_spec(a.theorem)?;
            let img = acquire(ctx, kind, a.limit, mode, a.cache.as_deref(), true)?;
            let r = ctx
                .timer
                .time("report", || report_from_image(a.theorem, &img))?;
            let code = if !r.pass && a.limit >= 1_000 { 1 } else { 0 };
            let row = vec![
                r.theorem.to_string(),
                r.x.to_string(),
                r.count.to_string(),
                decimal(r.bound_value),
                decimal(r.density),
                r.pass.to_string(),
            ];
            let header = ["theorem", "X", "count", "bound", "density", "pass"];
            return Ok((render(f, &r, &header, vec![row])?, code));
        }
        Command::Diagnostics(a) => {
            let params = LemmaParams { y: a.y, c1: a.c1 };
            let r = ctx
                .timer
                .time("diagnostics", || lemma_report(a.lemma, a.limit, params))?;
            let row = vec![
                r.lemma.to_string(),
                r.x.to_string(),
                r.count.to_string(),
                decimal(r.reciprocal_sum),
            ];
            render(f, &r, &["lemma", "X", "count", "reciprocal_sum"], vec![row])?
        }
        Command::Sets(a) => match (a.value, a.limit) {
            (Some(m), _) => {
                let r = set_membership(a.set.into(), m)?;
                let row = vec![
                    r.set.to_string(),
                    m.to_string(),
                    r.member.to_string(),
                    opt(r.alpha),
                    opt(r.k),
                ];
                render(f, &r, &["set", "m", "member", "alpha", "k"], vec![row])?
            }
            (None, Some(x)) => {
                let r = set_count(a.set.into(), x)?;
                let row = vec![
                    r.set.to_string(),
                    x.to_string(),
                    r.count.to_string(),
                    decimal(r.density),
                    decimal(r.paper_density),
                ];
                let header = ["set", "X", "count", "density", "paper_density"];
                render(f, &r, &header, vec![row])?
            }
            (None, None) => return Err(CliError::Usage("sets needs --limit or --value".into())),
        },
        Command::Classify(a) => {
            let r = ctx
                .timer
                .time("classify", || classify_prime(a.value, &cfg))?;
            let tri = |t| {
                serde_json::to_value(t)
                    .ok()
                    .and_then(|v| v.as_str().map(str::to_string))
                    .unwrap_or_default()
            };
            let row = vec![
                r.p.to_string(),
                r.is_mersenne.to_string(),
                tri(r.two_p_noncototient),
                tri(r.riesel),
            ];
            render(
                f,
                &r,
                &["p", "is_mersenne", "two_p_noncototient", "riesel"],
                vec![row],
            )?
        }
        Command::Structure(a) => {
            let r = ctx
                .timer
                .time("structure_scan", || robbins_structure_scan(a.limit, &cfg))?;
            let violations = r.violation_count();
            let row = vec![
                r.x.to_string(),
                r.primes_scanned.to_string(),
                violations.to_string(),
                r.square_divisor_primes.len().to_string(),
                r.conforming.to_string(),
                r.max_conforming_p.to_string(),
            ];
            let header = [
                "X",
                "primes_scanned",
                "violations",
                "square_divisor_primes",
                "conforming",
                "max_conforming_p",
            ];
            let code = i32::from(violations > 0);
            return Ok((render(f, &r, &header, vec![row])?, code));
        }
        Command::SigmaDensity(a) => {
            let r = ctx
                .timer
                .time("sigma_density", || sigma_mod12_density(a.limit, &cfg))?;
            let row = vec![a.limit.to_string(), r.count.to_string(), decimal(r.value)];
            render(f, &r, &["X", "count", "density"], vec![row])?
        }
    };
    Ok((body, 0))
}
