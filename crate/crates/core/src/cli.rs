//! `mrlab` command line.
//!
//! Every command prints one JSON document on stdout. Exit status is 0 when
//! the checked statement holds, 1 for a violation or failed hypothesis (the
//! JSON then carries a `witness`), and 2 for usage, parse and I/O errors.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use serde_json::{json, Value};

use crate::bounds::{classify_indices, coarse_constants, verify_tail_bound, BoundContext};
use crate::collinearity::{assemble_with_lines, audit_claim, resolve_delta, verify_lemma31, Verdict};
use crate::config::{restrict_partition, Block, ColoredConfig};
use crate::design::{audit_design, rank_bound};
use crate::error::{Error, Result};
use crate::generators::{gen_collinear, gen_grid, GridColoring};
use crate::lines::enumerate_lines;
use crate::matrix::SparseExactMatrix;
use crate::metrics::{compute_delta_with_lines, SingletonPolicy};
use crate::rank::{affine_dim, exact_rank, linear_dim};
use crate::scalar::{decimal, format_rational, parse_rational, Field};
use crate::search::{search, write_archive, SearchParams};
use crate::triples::{build_triples, verify_triples};

fn rational(text: &str) -> std::result::Result<BigRational, String> {
    parse_rational(text).map_err(|e| e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "mrlab", version, about = "Exact checks for colored point configurations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Configuration JSON file.
    config: PathBuf,
    /// Reinterpret the configuration over this field.
    #[arg(long)]
    field: Option<Field>,
    /// How classes of size one enter δ*: strict or vacuous.
    #[arg(long, default_value = "strict")]
    singletons: SingletonPolicy,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a fixture configuration.
    Gen {
        #[command(subcommand)]
        kind: GenKind,
        /// Write the configuration here instead of stdout.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// δ-profile of a configuration.
    Delta {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// Linear and affine dimensions.
    Dim {
        #[command(flatten)]
        cfg: ConfigArgs,
    },
    /// All lines through two or more points.
    Lines {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, default_value_t = 2)]
        min_size: usize,
    },
    /// Build the collinearity matrix for a cut and audit its P2 block.
    DesignAudit {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Evaluate the explicit dimension bounds.
    Bound {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[arg(long, value_parser = rational, conflicts_with = "optimize")]
        eps: Option<BigRational>,
        /// Minimize B_rec over an ε grid.
        #[arg(long)]
        optimize: bool,
        #[arg(long, default_value_t = 16)]
        grid: usize,
        /// Defaults to the measured δ*.
        #[arg(long, value_parser = rational)]
        delta: Option<BigRational>,
    },
    /// Check one of the lemmas or theorems directly.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Seeded hill-climbing search for high-dimensional configurations.
    Search(SearchArgs),
}

#[derive(Subcommand, Debug)]
enum GenKind {
    /// Points on one line, colors dealt round-robin.
    Collinear {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value = "rational")]
        field: Field,
    },
    /// The integer grid {0..side}².
    Grid {
        #[arg(long)]
        side: usize,
        #[arg(long, default_value = "rows")]
        coloring: GridColoring,
    },
}

#[derive(Args, Debug)]
struct CutArgs {
    #[arg(long)]
    x: usize,
    #[arg(long)]
    y: usize,
    #[arg(long, value_parser = rational)]
    c1: Option<BigRational>,
    #[arg(long, value_parser = rational)]
    c2: Option<BigRational>,
    /// Defaults to the measured δ*.
    #[arg(long, value_parser = rational)]
    delta: Option<BigRational>,
}

#[derive(Subcommand, Debug)]
enum VerifyKind {
    /// Triple system properties for one ground set size.
    Triples {
        #[arg(long)]
        r: usize,
    },
    /// Tail inequalities for a size vector.
    Tail {
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, value_parser = rational)]
        delta: BigRational,
        #[arg(long, value_parser = rational)]
        eps: BigRational,
    },
    /// Dimension inequality for one cut, with its rank chain.
    Lemma31 {
        #[command(flatten)]
        cfg: ConfigArgs,
        #[command(flatten)]
        cut: CutArgs,
    },
    /// Rank of a matrix against its design-parameter lower bound.
    Thm22 {
        /// Matrix in the sparse text format.
        matrix: PathBuf,
    },
    /// Integer bracket of the coarse-bound maximizer.
    Coarse {
        #[arg(long, value_parser = rational)]
        eps: BigRational,
        #[arg(long, value_parser = rational)]
        delta: Option<BigRational>,
    },
}

#[derive(Args, Debug)]
struct SearchArgs {
    /// Number of colors.
    #[arg(long, default_value_t = 2)]
    colors: usize,
    /// Grid side G.
    #[arg(long, default_value_t = 6)]
    side: usize,
    #[arg(long, default_value_t = 4)]
    dim: usize,
    #[arg(long, default_value_t = 12)]
    budget: usize,
    #[arg(long, default_value_t = 10_000)]
    iterations: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long, default_value_t = 4)]
    chains: usize,
    #[arg(long, default_value_t = 200)]
    patience: usize,
    #[arg(long, value_parser = rational, default_value = "1/4")]
    target: BigRational,
    /// Archive path (JSON lines). Without it the archive is embedded in stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Result of a command: exit status and the JSON document for stdout.
struct Outcome {
    code: i32,
    body: Value,
}

impl Outcome {
    fn ok(body: Value) -> Self {
        Outcome { code: 0, body }
    }

    fn verdict(holds: bool, body: Value) -> Self {
        Outcome {
            code: if holds { 0 } else { 1 },
            body,
        }
    }
}

fn load(args: &ConfigArgs) -> Result<ColoredConfig> {
    let text = std::fs::read_to_string(&args.config)?;
    let config = ColoredConfig::from_json_str(&text)?;
    match args.field {
        Some(f) if f != config.field() => {
            let mut raw = config.to_json();
            raw["field"] = json!(f);
            ColoredConfig::from_json(&raw)
        }
        _ => Ok(config),
    }
}

fn rat(r: &BigRational) -> Value {
    json!(format_rational(r))
}

fn cmd_gen(kind: &GenKind, out: Option<&Path>) -> Result<Outcome> {
    let config = match kind {
        GenKind::Collinear { sizes, field } => gen_collinear(sizes, *field)?,
        GenKind::Grid { side, coloring } => gen_grid(*side, *coloring)?,
    };
    let body = config.to_json();
    if let Some(path) = out {
        std::fs::write(path, serde_json::to_string_pretty(&body)? + "\n")?;
        return Ok(Outcome::ok(json!({
            "written": path.display().to_string(),
            "points": config.num_points(),
            "sizes": config.sizes(),
        })));
    }
    Ok(Outcome::ok(body))
}

fn cmd_dim(config: &ColoredConfig) -> Result<Outcome> {
    let points = config.points();
    let classes: Vec<Value> = (0..config.num_colors())
        .map(|c| {
            let pts = config.class(c);
            Ok(json!({
                "size": pts.len(),
                "linear_dim": linear_dim(pts)?,
                "affine_dim": affine_dim(pts)?,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(Outcome::ok(json!({
        "points": points.len(),
        "ambient_dim": config.dim(),
        "linear_dim": linear_dim(&points)?,
        "affine_dim": affine_dim(&points)?,
        "classes": classes,
    })))
}

fn cmd_lines(config: &ColoredConfig, min_size: usize) -> Outcome {
    let lines = enumerate_lines(config);
    let mut histogram: BTreeMap<usize, usize> = BTreeMap::new();
    for l in &lines {
        *histogram.entry(l.len()).or_default() += 1;
    }
    let shown: Vec<Value> = lines
        .iter()
        .filter(|l| l.len() >= min_size)
        .map(|l| l.to_json(config))
        .collect();
    Outcome::ok(json!({
        "total": lines.len(),
        "histogram": histogram.into_iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
        "lines": shown,
    }))
}

fn cmd_design_audit(config: &ColoredConfig, policy: SingletonPolicy, cut: &CutArgs) -> Result<Outcome> {
    let lines = enumerate_lines(config);
    let profile = compute_delta_with_lines(config, &lines, policy);
    let part = restrict_partition(config, cut.x, cut.y)?;
    let asm = assemble_with_lines(config, &part, &lines)?;
    let a2 = asm.a_block(Block::P2);
    let params = audit_design(&a2);
    let bound = if params.k > 0 {
        Some(rank_bound(part.p2.len(), params)?)
    } else {
        None
    };
    let rank_a2 = exact_rank(&a2);
    let mut body = json!({
        "assembly": asm.summary_json(),
        "params": params.to_json(),
        "rank_a2": rank_a2,
        "p2": part.p2.len(),
        "rank_bound": bound.as_ref().map(rat),
    });
    let mut code = 0;
    if let Some(b) = &bound {
        if BigRational::from_integer(rank_a2.into()) < *b {
            code = 1;
            body["witness"] = json!({
                "config": config.to_json(),
                "a2": a2.to_text(),
            });
        }
    }
    match (&cut.c1, &cut.c2) {
        (Some(c1), Some(c2)) => {
            let delta = resolve_delta(&profile, cut.delta.as_ref())?;
            let claim = audit_claim(config, &asm, &delta, c1, c2);
            if claim.verdict != Verdict::Holds {
                code = 1;
                body["witness"] = json!({
                    "config": config.to_json(),
                    "x": cut.x,
                    "y": cut.y,
                    "a2": a2.to_text(),
                });
            }
            body["claim"] = claim.to_json();
        }
        (None, None) => {}
        _ => return Err(Error::Parameter("--c1 and --c2 go together".into())),
    }
    Ok(Outcome { code, body })
}

fn cmd_bound(
    config: &ColoredConfig,
    policy: SingletonPolicy,
    eps: Option<&BigRational>,
    optimize: bool,
    grid: usize,
    delta: Option<&BigRational>,
) -> Result<Outcome> {
    let ctx = BoundContext::new(config, policy)?;
    let delta = delta.cloned().unwrap_or_else(|| ctx.delta_star.clone());
    let (eps, report) = match (eps, optimize) {
        (Some(e), false) => (e.clone(), ctx.evaluate(&delta, e)?),
        (None, true) => ctx.optimize(&delta, grid)?,
        _ => return Err(Error::Parameter("give exactly one of --eps and --optimize".into())),
    };
    let mut body = json!({
        "delta_star": rat(&ctx.delta_star),
        "delta": rat(&delta),
        "eps": rat(&eps),
        "eps_decimal": decimal(&eps),
        "report": report.to_json(),
    });
    if !report.holds() {
        body["witness"] = json!({
            "config": config.to_json(),
            "delta": rat(&delta),
            "eps": rat(&eps),
            "failed": report.failed_checks(),
        });
    }
    Ok(Outcome::verdict(report.holds(), body))
}

fn cmd_lemma31(config: &ColoredConfig, policy: SingletonPolicy, cut: &CutArgs) -> Result<Outcome> {
    let (Some(c1), Some(c2)) = (&cut.c1, &cut.c2) else {
        return Err(Error::Parameter("verify lemma31 needs --c1 and --c2".into()));
    };
    let lines = enumerate_lines(config);
    let profile = compute_delta_with_lines(config, &lines, policy);
    let delta = resolve_delta(&profile, cut.delta.as_ref())?;
    let part = restrict_partition(config, cut.x, cut.y)?;
    let asm = assemble_with_lines(config, &part, &lines)?;
    let report = verify_lemma31(config, &asm, &delta, c1, c2);
    let mut body = json!({
        "assembly": asm.summary_json(),
        "report": report.to_json(),
    });
    if report.verdict != Verdict::Holds {
        body["witness"] = json!({
            "config": config.to_json(),
            "x": cut.x,
            "y": cut.y,
            "c1": rat(c1),
            "c2": rat(c2),
            "delta": rat(&delta),
            "a": asm.a.to_text(),
            "failed": report.failed_checks(),
        });
    }
    Ok(Outcome::verdict(report.verdict == Verdict::Holds, body))
}

fn cmd_verify(kind: &VerifyKind) -> Result<Outcome> {
    match kind {
        VerifyKind::Triples { r } => {
            let ts = build_triples(*r)?;
            let verdict = verify_triples(&ts);
            let mut body = json!({
                "r": r,
                "triples": ts.triples.len(),
                "holds": verdict.holds(),
                "violations": verdict.violations.iter().map(|v| format!("{v:?}")).collect::<Vec<_>>(),
            });
            if !verdict.holds() {
                body["witness"] = serde_json::to_value(&*ts)?;
            }
            Ok(Outcome::verdict(verdict.holds(), body))
        }
        VerifyKind::Tail { sizes, delta, eps } => {
            let decomp = classify_indices(sizes, delta, eps)?;
            let report = verify_tail_bound(&decomp);
            Ok(Outcome::verdict(
                report.holds(),
                json!({ "decomposition": decomp.to_json(), "report": report.to_json() }),
            ))
        }
        VerifyKind::Lemma31 { cfg, cut } => cmd_lemma31(&load(cfg)?, cfg.singletons, cut),
        VerifyKind::Thm22 { matrix } => {
            let mat = SparseExactMatrix::from_text(&std::fs::read_to_string(matrix)?)?;
            let params = audit_design(&mat);
            let bound = rank_bound(mat.ncols(), params)?;
            let rank = exact_rank(&mat);
            let holds = BigRational::from_integer(rank.into()) >= bound;
            let mut body = json!({
                "rows": mat.nrows(),
                "columns": mat.ncols(),
                "params": params.to_json(),
                "rank": rank,
                "rank_bound": rat(&bound),
                "holds": holds,
            });
            if !holds {
                body["witness"] = json!({ "matrix": mat.to_text() });
            }
            Ok(Outcome::verdict(holds, body))
        }
        VerifyKind::Coarse { eps, delta } => {
            let report = coarse_constants(eps, delta.as_ref())?;
            Ok(Outcome::verdict(report.holds(), report.to_json()))
        }
    }
}

fn cmd_search(args: &SearchArgs) -> Result<Outcome> {
    let params = SearchParams {
        colors: args.colors,
        side: args.side,
        dim: args.dim,
        budget: args.budget,
        iterations: args.iterations,
        seed: args.seed,
        chains: args.chains,
        patience: args.patience,
        target: args.target.clone(),
    };
    let archive = search(&params, args.workers)?;
    let violations: Vec<Value> = archive
        .iter()
        .filter(|r| !r.eval.within_bound())
        .map(|r| r.to_json())
        .collect();
    let best = archive
        .iter()
        .filter(|r| r.eval.delta >= params.target)
        .max_by(|a, b| a.eval.dim.cmp(&b.eval.dim).then(b.chain.cmp(&a.chain)).then(b.iter.cmp(&a.iter)));
    let mut body = json!({
        "seed": args.seed,
        "records": archive.len(),
        "best": best.map(|r| r.to_json()),
    });
    match &args.out {
        Some(path) => {
            let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
            write_archive(&mut file, &archive)?;
            file.flush()?;
            body["archive"] = json!(path.display().to_string());
        }
        None => body["archive"] = json!(archive.iter().map(|r| r.to_json()).collect::<Vec<_>>()),
    }
    let holds = violations.is_empty();
    if !holds {
        body["witness"] = json!(violations);
    }
    Ok(Outcome::verdict(holds, body))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Gen { kind, out } => cmd_gen(kind, out.as_deref()),
        Command::Delta { cfg } => {
            let config = load(cfg)?;
            let lines = enumerate_lines(&config);
            Ok(Outcome::ok(compute_delta_with_lines(&config, &lines, cfg.singletons).to_json()))
        }
        Command::Dim { cfg } => cmd_dim(&load(cfg)?),
        Command::Lines { cfg, min_size } => Ok(cmd_lines(&load(cfg)?, *min_size)),
        Command::DesignAudit { cfg, cut } => cmd_design_audit(&load(cfg)?, cfg.singletons, cut),
        Command::Bound {
            cfg,
            eps,
            optimize,
            grid,
            delta,
        } => cmd_bound(&load(cfg)?, cfg.singletons, eps.as_ref(), *optimize, *grid, delta.as_ref()),
        Command::Verify { kind } => cmd_verify(kind),
        Command::Search(args) => cmd_search(args),
    }
}

/// Runs one invocation, writing JSON to `out` and diagnostics to `err`.
/// Returns the process exit status.
pub fn run<I, T, O, E>(argv: I, out: &mut O, err: &mut E) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    O: Write,
    E: Write,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            if code == 0 {
                let _ = write!(out, "{rendered}");
            } else {
                let _ = write!(err, "{rendered}");
            }
            return code;
        }
    };
    let (code, body) = match dispatch(&cli) {
        Ok(o) => (o.code, o.body),
        Err(e @ (Error::EmptyHypothesis | Error::DeltaAboveMeasured { .. })) => {
            let _ = writeln!(err, "mrlab: {e}");
            (1, json!({ "status": "hypothesis-failed", "reason": e.to_string() }))
        }
        Err(e) => {
            let _ = writeln!(err, "mrlab: {e}");
            return 2;
        }
    };
    let text = serde_json::to_string_pretty(&body).expect("JSON values serialize");
    if writeln!(out, "{text}").is_err() {
        return 2;
    }
    code
}
