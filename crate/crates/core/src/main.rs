use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use chevlab::autos::{
    factor_from_json, locally_inner_test, random_factor, AutoError, LocalMode, LocalVerdict, StandardAutomorphism,
};
use chevlab::cache::{CacheOutcome, TableCache};
use chevlab::decomp::{DecompError, Decomposer};
use chevlab::group::{GroupContext, GroupError, GroupWord, LieTables, Representation};
use chevlab::lie::AdjointRep;
use chevlab::replay::{lemma_replay, LemmaCase, ReplayOptions};
use chevlab::report::{Report, RunConfig};
use chevlab::rings::{LocalRing, RingDescriptor, RingError};
use chevlab::roots::{RootError, RootType};
use chevlab::sha::{self, FiniteGroup, ShaError};

#[derive(Parser, Debug)]
#[command(name = "chevlab", version, about = "Exact computations in Chevalley groups over finite local rings")]
struct Cli {
    /// Seed for every sampled step.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Cap on enumerated orbits, groups and search nodes.
    #[arg(long, global = true, default_value_t = 100_000)]
    budget: usize,
    /// Sample count for sampled modes.
    #[arg(long, global = true, default_value_t = 200)]
    samples: usize,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Root system data.
    Roots {
        #[command(subcommand)]
        op: RootsOp,
    },
    /// Evaluate or multiply words.
    Group {
        #[command(subcommand)]
        op: GroupOp,
    },
    /// Gauss or Bruhat decomposition of a word.
    Decompose {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long, value_enum, default_value_t = DecompMode::Gauss)]
        mode: DecompMode,
        #[arg(long)]
        word: String,
    },
    /// Standard automorphisms from a descriptor file.
    Aut {
        #[command(subcommand)]
        op: AutOp,
    },
    /// Lemma replays.
    Verify {
        #[command(subcommand)]
        op: VerifyOp,
    },
    /// Class-preserving automorphisms of a finite group fixture.
    Sha {
        #[arg(long)]
        group: PathBuf,
    },
}

#[derive(Subcommand, Debug)]
enum RootsOp {
    Info {
        #[arg(long)]
        phi: String,
        /// Also run the Jacobi, magnitude and integrality checks.
        #[arg(long)]
        check: bool,
    },
}

#[derive(Args, Debug, Clone)]
struct CtxArgs {
    #[arg(long)]
    phi: String,
    #[arg(long)]
    ring: String,
    #[arg(long, value_enum, default_value_t = Model::Adjoint)]
    model: Model,
    /// Skip the invertibility requirements on the ring.
    #[arg(long)]
    unrestricted: bool,
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq, Eq)]
enum Model {
    Adjoint,
    Natural,
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq, Eq)]
enum DecompMode {
    Gauss,
    Bruhat,
}

#[derive(Copy, Clone, Debug, ValueEnum, PartialEq, Eq)]
enum CheckMode {
    Exhaustive,
    Sampled,
}

#[derive(Subcommand, Debug)]
enum GroupOp {
    /// Evaluate a word (JSON, or `@file`).
    Eval {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        word: String,
    },
    /// Multiply two words and compare with the concatenated word.
    Mul {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        word: String,
        #[arg(long)]
        other: String,
    },
}

#[derive(Subcommand, Debug)]
enum AutOp {
    /// Image of a word.
    Apply {
        #[command(flatten)]
        ctx: CtxArgs,
        #[arg(long)]
        auto: PathBuf,
        #[arg(long)]
        word: String,
    },
    /// Standard-form consistency on random words and the locally inner test.
    Verify {
        #[command(flatten)]
        ctx: CtxArgs,
        /// Descriptor file; a random factor list when absent.
        #[arg(long)]
        auto: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = CheckMode::Exhaustive)]
        mode: CheckMode,
    },
}

#[derive(Subcommand, Debug)]
enum VerifyOp {
    Lemma {
        #[arg(long)]
        case: String,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        ring: String,
        /// Diagonal values on simple roots, comma separated.
        #[arg(long)]
        diagonal: Option<String>,
        /// Ring factor as accepted in descriptor files, e.g. `frobenius`.
        #[arg(long)]
        rho: Option<String>,
        /// Diagram permutation, 1-based and comma separated.
        #[arg(long)]
        delta: Option<String>,
    },
}

/// Error classes mapped to exit codes.
#[derive(Debug)]
enum Failure {
    Parse(anyhow::Error),
    Budget(anyhow::Error),
    Invariant(anyhow::Error),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Parse(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Invariant(_) => 4,
        }
    }

    fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Parse(e) | Failure::Budget(e) | Failure::Invariant(e) => e,
        }
    }
}

#[derive(Copy, Clone)]
enum Class {
    Parse,
    Budget,
    Invariant,
}

fn ring_class(r: &RingError) -> Class {
    match r {
        RingError::TooLarge { .. } => Class::Budget,
        _ => Class::Parse,
    }
}

fn root_class(r: &RootError) -> Class {
    match r {
        RootError::InvalidType(_) => Class::Parse,
        RootError::TooLarge { .. } => Class::Budget,
        RootError::Inconsistent(_) => Class::Invariant,
    }
}

fn group_class(g: &GroupError) -> Class {
    match g {
        GroupError::BadWord(_)
        | GroupError::InvertibilityRequired { .. }
        | GroupError::NaturalNeedsTypeA
        | GroupError::TorusNeedsAdjoint
        | GroupError::NotUnit(_) => Class::Parse,
        GroupError::Ring(r) => ring_class(r),
        _ => Class::Invariant,
    }
}

fn decomp_class(d: &DecompError) -> Class {
    match d {
        DecompError::NotAField(_) => Class::Parse,
        DecompError::TooLarge(_) => Class::Budget,
        DecompError::Group(g) => group_class(g),
        DecompError::Root(r) => root_class(r),
        DecompError::DecompositionFailed(_) => Class::Invariant,
    }
}

fn auto_class(a: &AutoError) -> Class {
    match a {
        AutoError::WordRequired | AutoError::BadFactor(_) | AutoError::NoNontrivialGraph(_) => Class::Parse,
        AutoError::GraphSigns(..) | AutoError::Invariant(_) => Class::Invariant,
        AutoError::Group(g) => group_class(g),
        AutoError::Decomp(d) => decomp_class(d),
        AutoError::Ring(r) => ring_class(r),
        AutoError::Root(r) => root_class(r),
    }
}

fn classify(e: anyhow::Error) -> Failure {
    let class = e
        .chain()
        .find_map(|c| {
            if c.is::<std::io::Error>() || c.is::<serde_json::Error>() || c.is::<UsageError>() {
                Some(Class::Parse)
            } else if let Some(x) = c.downcast_ref::<RingError>() {
                Some(ring_class(x))
            } else if let Some(x) = c.downcast_ref::<RootError>() {
                Some(root_class(x))
            } else if let Some(x) = c.downcast_ref::<GroupError>() {
                Some(group_class(x))
            } else if let Some(x) = c.downcast_ref::<DecompError>() {
                Some(decomp_class(x))
            } else if let Some(x) = c.downcast_ref::<AutoError>() {
                Some(auto_class(x))
            } else if let Some(x) = c.downcast_ref::<ShaError>() {
                Some(match x {
                    ShaError::Malformed(_) => Class::Parse,
                    ShaError::TooLarge { .. } | ShaError::Budget(_) => Class::Budget,
                })
            } else {
                c.downcast_ref::<chevlab::lie::LieError>().map(|_| Class::Invariant)
            }
        })
        .unwrap_or(Class::Invariant);
    match class {
        Class::Parse => Failure::Parse(e),
        Class::Budget => Failure::Budget(e),
        Class::Invariant => Failure::Invariant(e),
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{0}")]
struct UsageError(String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn load_tables(phi: &str) -> Result<Arc<LieTables>> {
    let ty: RootType = phi.parse()?;
    let cache = TableCache::from_env();
    match cache.tables(ty) {
        Ok((t, outcome)) => {
            if outcome == CacheOutcome::Rebuilt {
                eprintln!("chevlab: rebuilt corrupt cache entry {}", cache.path(ty).display());
            }
            Ok(t)
        }
        Err(chevlab::cache::CacheError::Lie(e)) => Err(e.into()),
        Err(e) => {
            eprintln!("chevlab: cache unavailable ({e}); building in memory");
            Ok(LieTables::build(ty)?)
        }
    }
}

fn parse_ring(s: &str) -> Result<Arc<LocalRing>> {
    let desc = RingDescriptor::parse(s)?;
    Ok(LocalRing::build(&desc)?)
}

fn context(a: &CtxArgs) -> Result<GroupContext> {
    let tables = load_tables(&a.phi)?;
    let ring = parse_ring(&a.ring)?;
    let rep = match a.model {
        Model::Adjoint => Representation::Adjoint,
        Model::Natural => Representation::NaturalA,
    };
    Ok(if a.unrestricted {
        GroupContext::unrestricted(tables, ring, rep)?
    } else {
        GroupContext::new(tables, ring, rep)?
    })
}

fn read_arg(s: &str) -> Result<String> {
    match s.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).with_context(|| format!("reading {path}")),
        None => Ok(s.to_string()),
    }
}

fn parse_word(ctx: &GroupContext, s: &str) -> Result<GroupWord> {
    let v: Value = serde_json::from_str(&read_arg(s)?).context("word must be JSON")?;
    Ok(ctx.word_from_json(&v)?)
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn file_record(path: &Path) -> Result<Value> {
    use sha2::{Digest, Sha256};
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    let hex: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
    Ok(json!({"path": path.display().to_string(), "sha256": hex}))
}

fn matrix_json(m: &chevlab::matrix::Matrix) -> Value {
    json!(m.rows())
}

fn ctx_config(cfg: &mut RunConfig, a: &CtxArgs) {
    cfg.phi = Some(a.phi.clone());
    cfg.ring = Some(a.ring.clone());
    cfg.model = Some(format!("{:?}", a.model).to_lowercase());
    if a.unrestricted {
        cfg.inputs.insert("unrestricted".into(), "true".into());
    }
}

fn config(cli: &Cli) -> RunConfig {
    let mut cfg = RunConfig {
        seed: cli.seed,
        budget: cli.budget,
        samples: cli.samples,
        output: cli.report.as_ref().map(|p| p.display().to_string()),
        ..Default::default()
    };
    let mut put = |k: &str, v: String| {
        cfg.inputs.insert(k.into(), v);
    };
    let command: Vec<&str>;
    let mut ctx_args = None;
    match &cli.command {
        Command::Roots { op: RootsOp::Info { phi, check } } => {
            command = vec!["roots", "info"];
            put("check", check.to_string());
            cfg.phi = Some(phi.clone());
        }
        Command::Group { op: GroupOp::Eval { ctx, word } } => {
            command = vec!["group", "eval"];
            put("word", word.clone());
            ctx_args = Some(ctx);
        }
        Command::Group { op: GroupOp::Mul { ctx, word, other } } => {
            command = vec!["group", "mul"];
            put("word", word.clone());
            put("other", other.clone());
            ctx_args = Some(ctx);
        }
        Command::Decompose { ctx, mode, word } => {
            command = vec!["decompose"];
            put("mode", format!("{mode:?}").to_lowercase());
            put("word", word.clone());
            ctx_args = Some(ctx);
        }
        Command::Aut { op: AutOp::Apply { ctx, auto, word } } => {
            command = vec!["aut", "apply"];
            put("auto", auto.display().to_string());
            put("word", word.clone());
            ctx_args = Some(ctx);
        }
        Command::Aut { op: AutOp::Verify { ctx, auto, mode } } => {
            command = vec!["aut", "verify"];
            if let Some(a) = auto {
                put("auto", a.display().to_string());
            }
            put("mode", format!("{mode:?}").to_lowercase());
            ctx_args = Some(ctx);
        }
        Command::Verify { op: VerifyOp::Lemma { case, phi, ring, diagonal, rho, delta } } => {
            command = vec!["verify", "lemma"];
            put("case", case.clone());
            for (k, v) in [("diagonal", diagonal), ("rho", rho), ("delta", delta)] {
                if let Some(v) = v {
                    put(k, v.clone());
                }
            }
            cfg.phi = Some(phi.clone());
            cfg.ring = Some(ring.clone());
        }
        Command::Sha { group } => {
            command = vec!["sha"];
            put("group", group.display().to_string());
        }
    }
    if let Some(a) = ctx_args {
        ctx_config(&mut cfg, a);
    }
    cfg.command = command.into_iter().map(String::from).collect();
    cfg
}

fn run(cli: &Cli, report: &mut Report) -> Result<()> {
    match &cli.command {
        Command::Roots { op: RootsOp::Info { phi, check } } => roots_info(phi, *check, report),
        Command::Group { op: GroupOp::Eval { ctx, word } } => {
            let ctx = context(ctx)?;
            let w = parse_word(&ctx, word)?;
            let g = ctx.element(w.clone())?;
            report.push(
                "element",
                json!({
                    "context": ctx.describe(),
                    "word": ctx.word_to_json(&w),
                    "label": ctx.word_label(&w),
                    "matrix": matrix_json(&g.matrix),
                    "in_u": ctx.in_u(&g.matrix),
                    "in_v": ctx.in_v(&g.matrix),
                    "in_torus": ctx.in_torus(&g.matrix),
                }),
            );
            Ok(())
        }
        Command::Group { op: GroupOp::Mul { ctx, word, other } } => {
            let ctx = context(ctx)?;
            let a = ctx.element(parse_word(&ctx, word)?)?;
            let b = ctx.element(parse_word(&ctx, other)?)?;
            let p = ctx.mul(&a, &b)?;
            let joined = ctx.eval_word(p.word.as_deref().unwrap_or_default())?;
            if joined != p.matrix {
                bail!(AutoError::Invariant("product disagrees with the concatenated word".into()));
            }
            report.push(
                "product",
                json!({
                    "context": ctx.describe(),
                    "word": p.word.as_deref().map(|w| ctx.word_to_json(w)),
                    "matrix": matrix_json(&p.matrix),
                }),
            );
            Ok(())
        }
        Command::Decompose { ctx, mode, word } => {
            let ctx = context(ctx)?;
            let g = ctx.element(parse_word(&ctx, word)?)?;
            let dec = Decomposer::new(&ctx);
            let (data, back) = match mode {
                DecompMode::Gauss => {
                    let f = dec.gauss(&g)?;
                    let back = ctx.eval_word(&f.word())?;
                    (
                        json!({
                            "t": ctx.word_to_json(&f.t),
                            "t_in_h": f.t_in_h,
                            "u1": ctx.word_to_json(&f.u1),
                            "v": ctx.word_to_json(&f.v),
                            "u2": ctx.word_to_json(&f.u2),
                        }),
                        back,
                    )
                }
                DecompMode::Bruhat => {
                    let f = dec.bruhat(&g)?;
                    let back = ctx.eval_word(&f.word())?;
                    (
                        json!({
                            "t": ctx.word_to_json(&f.t),
                            "t_in_h": f.t_in_h,
                            "u": ctx.word_to_json(&f.u),
                            "w": f.w_word.iter().map(|i| i + 1).collect::<Vec<_>>(),
                            "u2": ctx.word_to_json(&f.u2),
                        }),
                        back,
                    )
                }
            };
            let ok = back == g.matrix;
            report.push("decomposition", json!({"context": ctx.describe(), "parts": data, "remultiplies": ok}));
            if !ok {
                bail!(AutoError::Invariant("decomposition does not re-multiply to the input".into()));
            }
            Ok(())
        }
        Command::Aut { op: AutOp::Apply { ctx, auto, word } } => {
            let ctx = context(ctx)?;
            report.push("input", file_record(auto)?);
            let a = StandardAutomorphism::from_json(&ctx, &read_json(auto)?)?;
            a.validate(&ctx)?;
            let g = ctx.element(parse_word(&ctx, word)?)?;
            let img = a.apply(&ctx, &g)?;
            let via_form = a.standard_form(&ctx)?.automorphism().apply(&ctx, &g)?;
            report.push(
                "image",
                json!({
                    "context": ctx.describe(),
                    "automorphism": a.to_json(&ctx),
                    "image_word": img.word.as_deref().map(|w| ctx.word_to_json(w)),
                    "image_matrix": matrix_json(&img.matrix),
                    "standard_form_agrees": via_form.matrix == img.matrix,
                }),
            );
            if via_form.matrix != img.matrix {
                bail!(AutoError::Invariant("standard form disagrees with factor-by-factor application".into()));
            }
            Ok(())
        }
        Command::Aut { op: AutOp::Verify { ctx, auto, mode } } => aut_verify(cli, ctx, auto.as_deref(), *mode, report),
        Command::Verify { op: VerifyOp::Lemma { case, phi, ring, diagonal, rho, delta } } => {
            let case: LemmaCase = case.parse().map_err(usage)?;
            let tables = load_tables(phi)?;
            let ring = parse_ring(ring)?;
            let mut opts = ReplayOptions { seed: cli.seed, budget: cli.budget, ..Default::default() };
            if let Some(d) = diagonal {
                opts.diagonal = Some(d.split(',').map(|x| ring.parse_elem(x.trim())).collect::<Result<_, _>>()?);
            }
            if let Some(r) = rho {
                let v: Value = serde_json::from_str(r).unwrap_or_else(|_| Value::String(r.clone()));
                let ctx = GroupContext::unrestricted(Arc::clone(&tables), Arc::clone(&ring), Representation::Adjoint)?;
                match factor_from_json(&ctx, &json!({"ring": v}))? {
                    chevlab::autos::Factor::Ring(m) => opts.rho = Some(m),
                    _ => unreachable!(),
                }
            }
            if let Some(d) = delta {
                let perm = d
                    .split(',')
                    .map(|x| x.trim().parse::<usize>().ok().filter(|&p| p >= 1).map(|p| p - 1))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| usage("delta must be a 1-based comma separated permutation"))?;
                opts.delta = Some(chevlab::roots::DiagramAutomorphism { perm });
            }
            let r = lemma_replay(case, &tables, &ring, &opts)?;
            report.push("lemma", r.to_json());
            report.status = r.status().into();
            if r.status() == "incomplete" {
                report.exit_code = 3;
            }
            Ok(())
        }
        Command::Sha { group } => {
            report.push("input", file_record(group)?);
            let g = FiniteGroup::from_json(&read_json(group)?)?;
            let (rigid, cert) = sha::sha_rigid(&g, cli.budget)?;
            let ok = cert["invariants_ok"].as_bool() == Some(true);
            report.push("sha", cert);
            report.status = if rigid { "sha_rigid" } else { "not_sha_rigid" }.into();
            if !ok {
                bail!(AutoError::Invariant("Inn, Aut_c and Aut containment or counting checks failed".into()));
            }
            Ok(())
        }
    }
}

fn roots_info(phi: &str, check: bool, report: &mut Report) -> Result<()> {
    let tables = load_tables(phi)?;
    let rs = &tables.rs;
    let positive: Vec<Value> = (0..rs.num_positive())
        .map(|r| json!({"index": r, "coeffs": rs.root(r), "height": rs.height(r), "long": rs.is_long(r)}))
        .collect();
    report.push(
        "roots",
        json!({
            "type": rs.ty.to_string(),
            "rank": rs.rank(),
            "num_roots": rs.num_roots(),
            "num_positive": rs.num_positive(),
            "highest_root": rs.root(rs.highest_root()),
            "cartan_matrix": rs.cartan_matrix(),
            "weyl_order": rs.weyl_order_formula(),
            "degrees": rs.degrees(),
            "diagram_automorphisms": rs.diagram_automorphisms().iter()
                .map(|d| d.perm.iter().map(|i| i + 1).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "positive_roots": positive,
        }),
    );
    if check {
        let cb = tables.cb();
        let jac = cb.jacobi_violations().len();
        let mag = cb.magnitude_violations().len();
        let integ = AdjointRep::integrality_check(cb);
        let bad: usize = integ.iter().map(|r| r.violations.len()).sum();
        report.push(
            "lie_integrity",
            json!({"jacobi_violations": jac, "magnitude_violations": mag, "integrality_violations": bad}),
        );
        if jac + mag + bad > 0 {
            bail!(AutoError::Invariant(format!("{jac} Jacobi, {mag} magnitude, {bad} integrality violations")));
        }
    }
    Ok(())
}

fn aut_verify(cli: &Cli, a: &CtxArgs, auto: Option<&Path>, mode: CheckMode, report: &mut Report) -> Result<()> {
    let ctx = context(a)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let aut = match auto {
        Some(p) => {
            report.push("input", file_record(p)?);
            StandardAutomorphism::from_json(&ctx, &read_json(p)?)?
        }
        None => {
            let factors = (0..3).map(|_| random_factor(&ctx, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            StandardAutomorphism::new(factors)
        }
    };
    aut.validate(&ctx)?;
    let form = aut.standard_form(&ctx)?.automorphism();
    let with_torus = ctx.rep == Representation::Adjoint;
    let mut mismatches = 0;
    for _ in 0..cli.samples {
        let g = ctx.element(ctx.random_word(&mut rng, 6, with_torus))?;
        if aut.apply(&ctx, &g)?.matrix != form.apply(&ctx, &g)?.matrix {
            mismatches += 1;
        }
    }
    report.push(
        "standard_form",
        json!({
            "automorphism": aut.to_json(&ctx),
            "standard_form": form.to_json(&ctx),
            "words": cli.samples,
            "mismatches": mismatches,
        }),
    );
    if mismatches > 0 {
        bail!(AutoError::Invariant(format!("standard form disagrees on {mismatches} words")));
    }
    let local_mode = match mode {
        CheckMode::Exhaustive => LocalMode::Exhaustive,
        CheckMode::Sampled => LocalMode::Sampled { samples: cli.samples, seed: cli.seed },
    };
    let r = locally_inner_test(&ctx, &aut, local_mode, with_torus, cli.budget, (cli.samples, cli.seed))?;
    report.push("locally_inner", r.to_json(&ctx));
    report.status = r.verdict.as_str().into();
    if r.verdict == LocalVerdict::NoCounterexampleFound && r.fell_back {
        report.exit_code = 3;
    }
    Ok(())
}

fn write_report(cli: &Cli, report: &Report, started: Instant) -> Result<()> {
    let ts = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let text = report.render(ts, started.elapsed().as_millis());
    match &cli.report {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    let mut report = Report::new(config(&cli));
    let outcome = run(&cli, &mut report).map_err(classify);
    if let Err(f) = &outcome {
        eprintln!("chevlab: {:#}", f.error());
        if matches!(f, Failure::Parse(_)) {
            return ExitCode::from(2);
        }
        report.status = "error".into();
        report.exit_code = f.code() as i32;
        report.push("error", json!({"message": format!("{:#}", f.error())}));
    }
    if let Err(e) = write_report(&cli, &report, started) {
        eprintln!("chevlab: {e:#}");
        return ExitCode::from(2);
    }
    ExitCode::from(report.exit_code as u8)
}
