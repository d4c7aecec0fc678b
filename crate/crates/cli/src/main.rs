//! Batch front end: every command reads a sheaf description, computes over
//! an exact field, and emits deterministic JSON (no timestamps, stable key
//! order), so identical invocations produce byte-identical output.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use weylith::cache::{cache_key, CacheDir};
use weylith::error::{Error, Result};
use weylith::field::{Field, FpDefault, Rat};
use weylith::resultant::{resultant_operator, resultant_vanishing_probe, sylvester_resultant};
use weylith::tate::{tate_segment, SegmentArtifact, TateSegment};
use weylith::weyman::{
    complex_windows, weyman_complex_from_segment, ComplexArtifact, WeymanComplex,
};
use weylith::{SheafKind, SheafSpec};

#[derive(Parser)]
#[command(
    name = "weylith",
    version,
    about = "Exact resolutions, collapsed complexes, and resultants on projective space"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the cohomology table of a sheaf over the twist range the
    /// position window supports
    Cohomology(JobArgs),
    /// Compute a window of the exterior-side resolution as a JSON artifact
    Tate(JobArgs),
    /// Collapse the resolution at a level into polynomial matrices
    Weyman(JobArgs),
    /// Recompute a complex and report its structural checks
    Verify(JobArgs),
    /// Resultant of two binary forms through the level-2 complex
    Resultant(ResultantArgs),
    /// Evict least-recently-used cache entries down to a byte budget
    CacheGc(GcArgs),
}

#[derive(Args)]
struct JobArgs {
    /// Sheaf: twist:d | omega:a | veronese:d[,t] | quotient:g;g;... | @spec.json
    sheaf: String,
    /// Dimension of the underlying vector space W (ambient space has
    /// dimension one less); inferred for veronese, required otherwise
    /// unless the sheaf file provides it
    #[arg(long)]
    dim_w: Option<usize>,
    /// Regularity bound override (required for quotient and presentation)
    #[arg(long, allow_negative_numbers = true)]
    regularity: Option<i64>,
    /// Dimension of the support, for truncating the collapsed complex
    #[arg(long, allow_negative_numbers = true)]
    dim_support: Option<i64>,
    /// Level of the collapsing functor
    #[arg(long, default_value_t = 1)]
    ell: usize,
    /// Left end of the position window
    #[arg(long, allow_negative_numbers = true)]
    p_lo: Option<i64>,
    /// Right end of the position window
    #[arg(long, allow_negative_numbers = true)]
    p_hi: Option<i64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct CommonArgs {
    /// Coefficient field: q (exact rationals) or fp (default prime field)
    #[arg(long, default_value = "q")]
    field: String,
    /// Pretty-print the JSON output
    #[arg(long)]
    pretty: bool,
    /// Write output to a file instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    /// Cache directory (defaults to $WEYLITH_CACHE_DIR, then .weylith-cache)
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// Skip reading and writing cached artifacts
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args)]
struct ResultantArgs {
    /// Coefficients c_0,...,c_d of the first form (against x^t y^(d-t))
    #[arg(allow_hyphen_values = true)]
    f: Option<String>,
    /// Coefficients c_0,...,c_d of the second form
    #[arg(allow_hyphen_values = true)]
    g: Option<String>,
    /// Form degree, needed only when probing without concrete forms
    #[arg(long)]
    degree: Option<usize>,
    /// Run this many randomized agreement trials instead of one evaluation
    #[arg(long)]
    probe: Option<usize>,
    /// Seed for the randomized trials
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GcArgs {
    /// Byte budget to shrink the cache to
    #[arg(long, default_value_t = 256 * 1024 * 1024)]
    max_bytes: u64,
    #[command(flatten)]
    common: CommonArgs,
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::Cohomology(a) => dispatch(a, run_cohomology::<Rat>, run_cohomology::<FpDefault>),
        Cmd::Tate(a) => dispatch(a, run_tate::<Rat>, run_tate::<FpDefault>),
        Cmd::Weyman(a) => dispatch(a, run_weyman::<Rat>, run_weyman::<FpDefault>),
        Cmd::Verify(a) => dispatch(a, run_verify::<Rat>, run_verify::<FpDefault>),
        Cmd::Resultant(a) => match field_choice(&a.common.field)? {
            FieldChoice::Q => run_resultant::<Rat>(a),
            FieldChoice::Fp => run_resultant::<FpDefault>(a),
        },
        Cmd::CacheGc(a) => run_gc(a),
    }
}

enum FieldChoice {
    Q,
    Fp,
}

fn field_choice(name: &str) -> Result<FieldChoice> {
    match name {
        "q" | "Q" => Ok(FieldChoice::Q),
        "fp" | "Fp" => Ok(FieldChoice::Fp),
        other => Err(Error::Parse(format!(
            "unknown field '{other}', expected q or fp"
        ))),
    }
}

fn dispatch(
    args: JobArgs,
    over_q: fn(JobArgs) -> Result<()>,
    over_fp: fn(JobArgs) -> Result<()>,
) -> Result<()> {
    match field_choice(&args.common.field)? {
        FieldChoice::Q => over_q(args),
        FieldChoice::Fp => over_fp(args),
    }
}

fn parse_sheaf(args: &JobArgs) -> Result<SheafSpec> {
    let s = args.sheaf.trim();
    let mut spec = if let Some(path) = s.strip_prefix('@') {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str::<SheafSpec>(&text)?
    } else {
        let (head, rest) = s.split_once(':').ok_or_else(|| {
            Error::Parse(format!(
                "bad sheaf '{s}', expected kind:arguments or @file.json"
            ))
        })?;
        let kind = match head {
            "twist" => SheafKind::Twist {
                d: parse_num(rest, "twist")?,
            },
            "omega" => SheafKind::Omega {
                a: parse_num(rest, "wedge power")?,
            },
            "veronese" => match rest.split_once(',') {
                Some((d, t)) => SheafKind::Veronese {
                    d: parse_num(d, "veronese degree")?,
                    twist: parse_num(t, "veronese twist")?,
                },
                None => SheafKind::Veronese {
                    d: parse_num(rest, "veronese degree")?,
                    twist: 0,
                },
            },
            "quotient" => SheafKind::Quotient {
                gens: rest
                    .split(';')
                    .map(|g| g.trim().to_string())
                    .filter(|g| !g.is_empty())
                    .collect(),
            },
            other => {
                return Err(Error::Parse(format!(
                    "unknown sheaf kind '{other}'; use twist, omega, veronese, quotient, or @file.json"
                )))
            }
        };
        let dim_w = match (args.dim_w, &kind) {
            (Some(d), _) => d,
            (None, SheafKind::Veronese { d, .. }) => d + 1,
            (None, _) => {
                return Err(Error::InvalidInput(
                    "supply --dim-w for this sheaf kind".into(),
                ))
            }
        };
        SheafSpec::new(kind, dim_w)
    };
    if let Some(d) = args.dim_w {
        spec.dim_w = d;
    }
    if let Some(r) = args.regularity {
        spec.regularity = Some(r);
    }
    if let Some(ds) = args.dim_support {
        spec.dim_support = Some(ds);
    }
    spec.validate()?;
    Ok(spec)
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad {what} '{s}'")))
}

fn window(args: &JobArgs, spec: &SheafSpec) -> (i64, i64) {
    let d = spec.dim_w as i64;
    (args.p_lo.unwrap_or(-d), args.p_hi.unwrap_or(d))
}

fn cache_for(common: &CommonArgs) -> CacheDir {
    CacheDir::resolve(common.cache_dir.clone(), common.no_cache)
}

/// Load a segment from the cache or compute and store it. A cache entry
/// that fails to decode or verify is discarded with a warning.
fn cached_segment<F: Field>(
    spec: &SheafSpec,
    p_lo: i64,
    p_hi: i64,
    cache: &CacheDir,
) -> Result<TateSegment<F>> {
    let key = cache_key(&[
        "segment",
        &F::tag(),
        &spec.canonical_json(),
        &p_lo.to_string(),
        &p_hi.to_string(),
    ]);
    if let Some(text) = cache.load(&key) {
        let decoded = serde_json::from_str::<SegmentArtifact>(&text)
            .map_err(Error::from)
            .and_then(|a| TateSegment::from_artifact(&a));
        match decoded {
            Ok(seg) => return Ok(seg),
            Err(e) => eprintln!("warning: ignoring unusable cache entry {key}: {e}"),
        }
    }
    let seg = tate_segment::<F>(spec, p_lo, p_hi)?;
    cache.store(&key, &seg.to_json())?;
    Ok(seg)
}

fn cached_complex<F: Field>(
    spec: &SheafSpec,
    ell: usize,
    cache: &CacheDir,
) -> Result<WeymanComplex<F>> {
    let key = cache_key(&[
        "complex",
        &F::tag(),
        &spec.canonical_json(),
        &ell.to_string(),
    ]);
    if let Some(text) = cache.load(&key) {
        let decoded = serde_json::from_str::<ComplexArtifact>(&text)
            .map_err(Error::from)
            .and_then(|a| WeymanComplex::from_artifact(&a));
        match decoded {
            Ok(c) => return Ok(c),
            Err(e) => eprintln!("warning: ignoring unusable cache entry {key}: {e}"),
        }
    }
    let (_, _, seg_lo, seg_hi) = complex_windows(spec, ell)?;
    let seg = cached_segment::<F>(spec, seg_lo, seg_hi, cache)?;
    let complex = weyman_complex_from_segment(&seg, ell)?;
    cache.store(&key, &complex.to_json())?;
    Ok(complex)
}

fn emit(value: &Value, common: &CommonArgs) -> Result<()> {
    let mut text = if common.pretty {
        serde_json::to_string_pretty(value)?
    } else {
        serde_json::to_string(value)?
    };
    text.push('\n');
    match &common.out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn spec_value(spec: &SheafSpec) -> Result<Value> {
    Ok(serde_json::from_str(&spec.canonical_json())?)
}

fn run_cohomology<F: Field>(args: JobArgs) -> Result<()> {
    let spec = parse_sheaf(&args)?;
    let (p_lo, p_hi) = window(&args, &spec);
    let cache = cache_for(&args.common);
    let seg = cached_segment::<F>(&spec, p_lo, p_hi, &cache)?;
    let table = seg.cohomology_table()?;
    let value = json!({
        "spec": spec_value(&spec)?,
        "field": F::tag(),
        "p_lo": p_lo,
        "p_hi": p_hi,
        "regularity": seg.regularity,
        "table": table,
    });
    emit(&value, &args.common)
}

fn run_tate<F: Field>(args: JobArgs) -> Result<()> {
    let spec = parse_sheaf(&args)?;
    let (p_lo, p_hi) = window(&args, &spec);
    let cache = cache_for(&args.common);
    let seg = cached_segment::<F>(&spec, p_lo, p_hi, &cache)?;
    let value = serde_json::to_value(seg.to_artifact())?;
    emit(&value, &args.common)
}

fn run_weyman<F: Field>(args: JobArgs) -> Result<()> {
    let spec = parse_sheaf(&args)?;
    let cache = cache_for(&args.common);
    let complex = cached_complex::<F>(&spec, args.ell, &cache)?;
    let value = serde_json::to_value(complex.to_artifact())?;
    emit(&value, &args.common)
}

fn run_verify<F: Field>(args: JobArgs) -> Result<()> {
    let spec = parse_sheaf(&args)?;
    let cache = cache_for(&args.common);
    let complex = cached_complex::<F>(&spec, args.ell, &cache)?;
    let checks = complex.verify();
    let ok = checks.iter().all(|(_, ok)| *ok);
    let value = json!({
        "spec": spec_value(&spec)?,
        "field": F::tag(),
        "ell": args.ell,
        "segment_hash": complex.segment_hash,
        "checks": checks
            .iter()
            .map(|(name, ok)| json!({ "check": name, "ok": ok }))
            .collect::<Vec<_>>(),
        "ok": ok,
    });
    emit(&value, &args.common)?;
    if ok {
        Ok(())
    } else {
        Err(Error::Invariant("complex failed verification".into()))
    }
}

fn parse_coeffs<F: Field>(s: &str) -> Result<Vec<F>> {
    s.split(',')
        .map(|tok| {
            let tok = tok.trim();
            F::decode(tok)
                .or_else(|_| {
                    tok.parse::<i64>()
                        .map(F::from_i64)
                        .map_err(|_| format!("bad coefficient '{tok}'"))
                })
                .map_err(Error::Parse)
        })
        .collect()
}

fn run_resultant<F: Field + Send + Sync>(args: ResultantArgs) -> Result<()> {
    if let Some(trials) = args.probe {
        let d = args.degree.ok_or_else(|| {
            Error::InvalidInput("--probe needs --degree to fix the form degree".into())
        })?;
        let report = resultant_vanishing_probe::<F>(d, trials, args.seed)?;
        let value = json!({
            "degree": d,
            "field": F::tag(),
            "seed": args.seed,
            "trials": report.trials,
            "planted": report.planted,
            "disagreements": report.disagreements,
        });
        return emit(&value, &args.common);
    }
    let (Some(ftext), Some(gtext)) = (&args.f, &args.g) else {
        return Err(Error::InvalidInput(
            "supply two coefficient lists, or --probe with --degree".into(),
        ));
    };
    let f: Vec<F> = parse_coeffs(ftext)?;
    let g: Vec<F> = parse_coeffs(gtext)?;
    if f.len() != g.len() || f.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "need two coefficient lists of equal length at least 2, got {} and {}",
            f.len(),
            g.len()
        )));
    }
    let d = f.len() - 1;
    let op = resultant_operator::<F>(d)?;
    let value = op.eval(&f, &g);
    let sylv = sylvester_resultant(&f, &g);
    if value.is_zero() != sylv.is_zero() {
        return Err(Error::Invariant(
            "determinant and Sylvester resultant disagree on vanishing".into(),
        ));
    }
    let out = json!({
        "degree": d,
        "field": F::tag(),
        "f": f.iter().map(F::encode).collect::<Vec<_>>(),
        "g": g.iter().map(F::encode).collect::<Vec<_>>(),
        "matrix_size": op.size,
        "unit": op.unit.encode(),
        "resultant": value.encode(),
        "vanishes": value.is_zero(),
    });
    emit(&out, &args.common)
}

fn run_gc(args: GcArgs) -> Result<()> {
    let cache = cache_for(&args.common);
    let report = cache.gc(args.max_bytes)?;
    let value = json!({
        "cache_dir": cache.root().display().to_string(),
        "max_bytes": args.max_bytes,
        "kept": report.kept,
        "removed": report.removed,
        "kept_bytes": report.kept_bytes,
        "freed_bytes": report.freed_bytes,
    });
    emit(&value, &args.common)
}
