//! Acceptance grid. One PASS/FAIL line per criterion; exits nonzero if any
//! criterion fails. Time limits are wall-clock and pinned below.

mod common;

use std::collections::BTreeSet;
use std::path::Path;
use std::process::Command;
use std::sync::Arc;
use std::time::{Duration, Instant};

use chevlab::autos::{
    diagonal_to_inner, random_factor, torus_profile, CentralAssignment, Factor, StandardAutomorphism,
};
use chevlab::decomp::Decomposer;
use chevlab::group::{GroupContext, GroupElement, GroupError, Representation};
use chevlab::lie::{AdjointRep, ChevalleyBasis};
use chevlab::matrix::Matrix;
use chevlab::par;
use chevlab::replay::{lemma_replay, LemmaCase, ReplayOptions};
use chevlab::report::strip_header;
use chevlab::rings::Elem;
use chevlab::roots::RootSystem;
use chevlab::sha::{out_c, FiniteGroup};
use common::{fixture, ring, tables};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TYPES: [&str; 7] = ["A2", "A3", "B2", "C3", "D4", "G2", "F4"];
const RINGS: [&str; 5] = ["Z9", "Z25", "GF4", "GF8", "GF3[t]/(t^2)"];
const NON_FIELDS: [&str; 3] = ["Z9", "Z25", "GF3[t]/(t^2)"];

const LIMIT_LIE: Duration = Duration::from_secs(60);
const LIMIT_COMMUTATOR: Duration = Duration::from_secs(120);
const LIMIT_DECOMP: Duration = Duration::from_secs(300);
const LIMIT_REPLAY: Duration = Duration::from_secs(600);
const LIMIT_SHA_PER_GROUP: Duration = Duration::from_secs(60);
const NO_LIMIT: Duration = Duration::MAX;

const COMMUTATOR_PAIRS: usize = 500;
const GAUSS_WORDS: usize = 1000;
const STANDARD_FORM_WORDS: usize = 200;
const SEED: u64 = 0x5eed;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

/// Adjoint context honoring the invertibility table, `None` when excluded.
fn restricted(ty: &str, r: &str) -> Result<Option<GroupContext>, String> {
    match GroupContext::new(tables(ty), ring(r), Representation::Adjoint) {
        Ok(c) => Ok(Some(c)),
        Err(GroupError::InvertibilityRequired { .. }) => Ok(None),
        Err(e) => Err(format!("{ty}/{r}: {e}")),
    }
}

fn grid() -> Result<(Vec<GroupContext>, usize), String> {
    let mut out = Vec::new();
    let mut skipped = 0;
    for ty in TYPES {
        for r in RINGS {
            match restricted(ty, r)? {
                Some(c) => out.push(c),
                None => skipped += 1,
            }
        }
    }
    Ok((out, skipped))
}

fn c1_lie_integrity() -> Outcome {
    let mut pairs = 0;
    for ty in TYPES {
        let rs = Arc::new(RootSystem::build(ty.parse().unwrap()));
        let cb = ChevalleyBasis::build(Arc::clone(&rs)).map_err(|e| e.to_string())?;
        let jac = cb.jacobi_violations();
        ensure(jac.is_empty(), || format!("{ty}: {} Jacobi violations", jac.len()))?;
        let integ = AdjointRep::integrality_check(&cb);
        ensure(integ.iter().all(|r| r.violations.is_empty()), || format!("{ty}: non-integral exponential"))?;
        let k = rs.num_roots();
        for a in 0..k {
            for b in 0..k {
                if rs.add(a, b).is_none() {
                    continue;
                }
                // p from the root string through b, walked on coefficient vectors
                let mut p = 0;
                while rs.find(&rs.root(b).iter().zip(rs.root(a)).map(|(x, y)| x - (p + 1) * y).collect::<Vec<_>>()).is_some() {
                    p += 1;
                }
                ensure(cb.n(a, b).abs() == i64::from(p) + 1, || format!("{ty}: |N({a},{b})| != p+1"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{} types, {pairs} root pairs", TYPES.len()))
}

fn c2_commutators() -> Outcome {
    let (ctxs, skipped) = grid()?;
    let mut checked = 0;
    for (i, c) in ctxs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + i as u64);
        let k = c.rs().num_roots();
        let mut jobs = Vec::with_capacity(COMMUTATOR_PAIRS);
        while jobs.len() < COMMUTATOR_PAIRS {
            let (a, b) = (rng.gen_range(0..k), rng.gen_range(0..k));
            if b == c.rs().neg(a) {
                continue;
            }
            jobs.push((a, b, c.ring.random(&mut rng), c.ring.random(&mut rng)));
        }
        let bad = par::map(jobs, |(a, b, t, u)| {
            let word = c.commutator_formula(a, b, t, u).expect("table entry");
            let direct = c.commutator(&c.x_gen(a, t), &c.x_gen(b, u)).expect("invertible");
            c.eval_word(&word).expect("x letters") != direct.matrix
        })
        .into_iter()
        .filter(|&b| b)
        .count();
        ensure(bad == 0, || format!("{}: {bad} mismatches", c.describe()))?;
        checked += COMMUTATOR_PAIRS;
    }
    Ok(format!("{} contexts ({skipped} excluded by the table), {checked} pairs", ctxs.len()))
}

fn sl3_order(q: u64) -> usize {
    (q.pow(3) * (q * q - 1) * (q.pow(3) - 1)) as usize
}

fn c3_decompositions() -> Outcome {
    let mut gauss_ctxs = 0;
    for ty in TYPES {
        for r in NON_FIELDS {
            let Some(c) = restricted(ty, r)? else { continue };
            let d = Decomposer::new(&c);
            let mut rng = ChaCha8Rng::seed_from_u64(SEED);
            let words: Vec<_> = (0..GAUSS_WORDS).map(|_| c.random_word(&mut rng, 6, false)).collect();
            let failures: Vec<String> = par::map(words, |w| {
                let g = c.element(w).expect("word");
                let f = match d.gauss(&g) {
                    Ok(f) => f,
                    Err(e) => return Some(e.to_string()),
                };
                let shape = c.eval_word(&f.word()).ok() == Some(g.matrix.clone())
                    && f.t_in_h
                    && c.in_u(&c.eval_word(&f.u1).ok()?)
                    && c.in_v(&c.eval_word(&f.v).ok()?)
                    && c.in_u(&c.eval_word(&f.u2).ok()?)
                    && c.in_torus(&c.eval_word(&f.t).ok()?);
                (!shape).then(|| "shape or re-multiplication".to_string())
            })
            .into_iter()
            .flatten()
            .collect();
            ensure(failures.is_empty(), || format!("{}: {} failures, first {}", c.describe(), failures.len(), failures[0]))?;
            gauss_ctxs += 1;
        }
    }
    let mut bruhat = Vec::new();
    for (r, q) in [("F2", 2u64), ("F3", 3), ("GF4", 4)] {
        let c = GroupContext::unrestricted(tables("A2"), ring(r), Representation::NaturalA).map_err(|e| e.to_string())?;
        let d = Decomposer::new(&c);
        let oracle = d.bruhat_oracle(1 << 20).map_err(|e| format!("SL3({r}): {e}"))?;
        ensure(oracle.len() == sl3_order(q), || format!("SL3({r}): {} tuples, expected {}", oracle.len(), sl3_order(q)))?;
        let entries: Vec<_> = oracle.iter().collect();
        let bad = par::map(entries, |(m, key)| {
            let g = GroupElement { matrix: (*m).clone(), word: None };
            match d.bruhat(&g) {
                Ok(f) => &f.key != key || c.eval_word(&f.word()).ok().as_ref() != Some(m),
                Err(_) => true,
            }
        })
        .into_iter()
        .filter(|&b| b)
        .count();
        ensure(bad == 0, || format!("SL3({r}): {bad} elements disagree with the tuple oracle"))?;
        bruhat.push(format!("SL3({r}) {}", oracle.len()));
    }
    Ok(format!("gauss {gauss_ctxs} contexts x {GAUSS_WORDS} words; bruhat exhaustive {}", bruhat.join(", ")))
}

fn c4_torus_profiles() -> Outcome {
    let (ctxs, _) = grid()?;
    let mut profiles = 0;
    let mut cubes = 0;
    for c in &ctxs {
        let ring = &c.ring;
        let g2 = c.rs().ty.to_string() == "G2";
        for a in 0..c.rs().num_roots() {
            for &t in ring.units() {
                let p = torus_profile(c, a, t).map_err(|e| e.to_string())?;
                let short_g2 = g2 && !c.rs().is_long(a);
                let bound = if short_g2 { 3 } else { 2 };
                let allowed: BTreeSet<Elem> = (-bound..=bound).map(|e| ring.pow(t, e).unwrap()).collect();
                ensure(p.matches_exponents, || format!("{}: h_{a}({t}) is not t^<w,a>", c.describe()))?;
                ensure(p.entries.iter().all(|x| allowed.contains(x)), || format!("{}: entry outside support", c.describe()))?;
                ensure((p.max_exponent == 3) == short_g2, || format!("{}: root {a} max exponent {}", c.describe(), p.max_exponent))?;
                profiles += 1;
                cubes += usize::from(p.max_exponent == 3);
            }
        }
    }
    Ok(format!("{profiles} profiles, {cubes} with t^3 (all G2 short)"))
}

fn c5_diagonal_to_inner() -> Outcome {
    let mut done = Vec::new();
    let mut checks = 0;
    for ty in ["A2", "B2", "G2"] {
        for r in ["Z9", "Z25", "GF8"] {
            let Some(c) = restricted(ty, r)? else { continue };
            let ring = &c.ring;
            let units = ring.units().to_vec();
            let params: Vec<Elem> = ring.elements().collect();
            for &d1 in &units {
                for &d2 in &units {
                    let rep = diagonal_to_inner(&c, &[d1, d2], &params).map_err(|e| e.to_string())?;
                    ensure(rep.all_agree(), || format!("{}: d = ({d1}, {d2})", c.describe()))?;
                    ensure(rep.checks.len() == c.rs().num_positive() * params.len(), || "missing roots".into())?;
                    checks += rep.checks.len();
                }
            }
            done.push(format!("{ty}/{r}"));
        }
    }
    Ok(format!("{} ({checks} generator checks)", done.join(" ")))
}

fn c6_graph_replay() -> Outcome {
    let r = lemma_replay(LemmaCase::L33, &tables("A3"), &ring("F2"), &ReplayOptions::default()).map_err(|e| e.to_string())?;
    let step = |n: &str| r.steps.iter().find(|s| s.name == n).ok_or_else(|| format!("missing step {n}"));
    ensure(r.data["weyl_order"] == 24, || "Weyl group not fully scanned".into())?;
    let paths = step("cell_filter_paths")?;
    ensure(paths.agrees == Some(true), || format!("cell filter paths disagree: {}", paths.observed))?;
    let listed = step("cell_filter_claim")?.observed["enumerated"].as_array().map_or(0, Vec::len);
    ensure(paths.observed["by_images"] == listed, || "enumerated set incomplete".into())?;
    let exh = step("exhaustive_class_comparison")?;
    ensure(exh.observed["group_order"] == 20160, || format!("group order {}", exh.observed["group_order"]))?;
    let oracle = step("non_conjugacy")?;
    ensure(oracle.agrees.is_some() && oracle.agrees == exh.agrees, || "conjugacy paths disagree".into())?;
    ensure(r.internally_consistent, || "report flagged inconsistent".into())?;
    let verdict = if exh.agrees == Some(true) { "not conjugate" } else { "conjugate" };
    Ok(format!("cell filter {listed}/24, |SL4(F2)| = 20160, witness pair {verdict}, status {}", r.status()))
}

fn c7_sha() -> Outcome {
    let load = |f: &str| -> Result<FiniteGroup, String> {
        let text = std::fs::read_to_string(fixture(f)).map_err(|e| e.to_string())?;
        FiniteGroup::from_json(&serde_json::from_str(&text).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };
    let timed = |f: &str| -> Result<chevlab::sha::OutCReport, String> {
        let start = Instant::now();
        let r = out_c(&load(f)?, 1_000_000).map_err(|e| format!("{f}: {e}"))?;
        ensure(start.elapsed() < LIMIT_SHA_PER_GROUP, || format!("{f}: {:?}", start.elapsed()))?;
        ensure(r.invariants_ok, || format!("{f}: invariants"))?;
        Ok(r)
    };
    let s4 = timed("s4.json")?;
    ensure(s4.sha_rigid() && s4.aut_c == 24 && s4.inn == 24, || "S4".into())?;
    for f in ["q8.json", "d4.json"] {
        ensure(timed(f)?.out_c() == 1, || format!("{f}: Out_c nontrivial"))?;
    }
    for f in ["z5.json", "z6.json", "z2xz2.json", "z2xz2xz2.json", "z3xz3.json", "z4xz2.json"] {
        ensure(timed(f)?.aut_c == 1, || format!("{f}: Aut_c nontrivial"))?;
    }
    let hol = timed("hol_z8.json")?;
    ensure(hol.order == 32 && !hol.sha_rigid() && hol.out_c() > 1, || "order-32 fixture is rigid".into())?;
    Ok(format!("S4 rigid, Q8/D4 Out_c = 1, 6 abelian Aut_c = 1, order 32 fixture Out_c = {}", hol.out_c()))
}

fn c8_standard_form() -> Outcome {
    let cases: [(&str, &str, Representation); 5] = [
        ("A2", "Z9", Representation::Adjoint),
        ("A3", "GF4[t]/(t^2)", Representation::NaturalA),
        ("D4", "GF4", Representation::Adjoint),
        ("B2", "Z25", Representation::Adjoint),
        ("G2", "GF8", Representation::Adjoint),
    ];
    let mut words = 0;
    let mut comms = 0;
    for (i, (ty, r, rep)) in cases.into_iter().enumerate() {
        let c = GroupContext::new(tables(ty), ring(r), rep).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED + i as u64);
        let n = rng.gen_range(3..7);
        let a = StandardAutomorphism::new((0..n).map(|_| random_factor(&c, &mut rng)).collect::<Result<_, _>>().map_err(|e| e.to_string())?);
        let composed = a.standard_form(&c).map_err(|e| e.to_string())?.automorphism();
        let inputs: Vec<_> = (0..STANDARD_FORM_WORDS).map(|_| c.random_word(&mut rng, 6, true)).collect();
        let bad = par::map(inputs, |w| {
            let g = c.element(w).expect("word");
            a.apply(&c, &g).map(|x| x.matrix).ok() != composed.apply(&c, &g).map(|x| x.matrix).ok()
        })
        .into_iter()
        .filter(|&b| b)
        .count();
        ensure(bad == 0, || format!("{ty}/{r}: {bad} words disagree"))?;
        words += STANDARD_FORM_WORDS;

        if rep == Representation::Adjoint {
            let ring = &c.ring;
            let lambda = Factor::Central(
                (0..2)
                    .map(|_| CentralAssignment {
                        coset_rep: (0..c.rs().rank()).map(|_| ring.random_unit(&mut rng)).collect(),
                        z: Matrix::identity(c.dim(), ring),
                    })
                    .collect(),
            );
            lambda.validate(&c).map_err(|e| e.to_string())?;
            for _ in 0..20 {
                let g1 = c.element(c.random_word(&mut rng, 4, true)).unwrap();
                let g2 = c.element(c.random_word(&mut rng, 4, true)).unwrap();
                let k = c.commutator(&g1, &g2).map_err(|e| e.to_string())?;
                let img = chevlab::autos::apply_factor(&c, &lambda, &k).map_err(|e| e.to_string())?;
                ensure(img.matrix == k.matrix, || format!("{ty}/{r}: central factor moved a commutator"))?;
                comms += 1;
            }
        }
    }
    Ok(format!("{words} words over 5 contexts, {comms} commutators fixed"))
}

fn run_cli(args: &[&str], cache: &Path, threads: Option<&str>) -> Result<String, String> {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_chevlab"));
    cmd.env(chevlab::cache::CACHE_ENV, cache).args(args);
    if let Some(n) = threads {
        cmd.env("RAYON_NUM_THREADS", n);
    }
    let out = cmd.output().map_err(|e| e.to_string())?;
    let path = args.iter().skip_while(|a| **a != "--report").nth(1).expect("report path");
    ensure(out.status.code().is_some_and(|c| c != 2), || format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)))?;
    std::fs::read_to_string(path).map_err(|e| e.to_string())
}

fn c9_determinism() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let cache = dir.path().join("cache");
    let report = dir.path().join("r.jsonl");
    let rep = report.to_str().unwrap();
    let graph = fixture("auto_a2_graph.json");
    let hol = fixture("hol_z8.json");
    let runs: Vec<Vec<&str>> = vec![
        vec!["verify", "lemma", "--case", "3.3", "--phi", "A3", "--ring", "F2", "--seed", "1"],
        vec!["verify", "lemma", "--case", "3.4", "--phi", "A2", "--ring", "Z9", "--seed", "7"],
        vec!["aut", "verify", "--phi", "A2", "--ring", "F3", "--model", "natural", "--auto", graph.to_str().unwrap(), "--mode", "sampled", "--samples", "50", "--seed", "3"],
        vec!["sha", "--group", hol.to_str().unwrap()],
        vec!["decompose", "--phi", "B2", "--ring", "Z25", "--mode", "gauss", "--word", r#"[{"x":{"root":[1,1],"t":"7"}},{"x":{"root":[-1,0],"t":"3"}}]"#],
    ];
    for args in &runs {
        let mut full = args.clone();
        full.extend(["--report", rep]);
        let a = run_cli(&full, &cache, None)?;
        let b = run_cli(&full, &cache, None)?;
        let serial = run_cli(&full, &cache, Some("1"))?;
        ensure(strip_header(&a) == strip_header(&b), || format!("{args:?}: repeated runs differ"))?;
        ensure(strip_header(&a) == strip_header(&serial), || format!("{args:?}: single-thread run differs"))?;
        ensure(a.lines().count() >= 3, || format!("{args:?}: empty report"))?;
    }
    Ok(format!("{} commands x 3 runs byte-identical after the header", runs.len()))
}

fn main() {
    let criteria: [(u32, &str, Duration, fn() -> Outcome); 9] = [
        (1, "Lie integrity", LIMIT_LIE, c1_lie_integrity),
        (2, "commutator formula vs matrices", LIMIT_COMMUTATOR, c2_commutators),
        (3, "decomposition round trips", LIMIT_DECOMP, c3_decompositions),
        (4, "torus profile support", NO_LIMIT, c4_torus_profiles),
        (5, "diagonal is inner", NO_LIMIT, c5_diagonal_to_inner),
        (6, "graph lemma replay on A3/F2", LIMIT_REPLAY, c6_graph_replay),
        (7, "Sha engine fixtures", NO_LIMIT, c7_sha),
        (8, "standard form and central factors", NO_LIMIT, c8_standard_form),
        (9, "report determinism", NO_LIMIT, c9_determinism),
    ];
    let only: Option<u32> = std::env::args().nth(1).and_then(|a| a.parse().ok());
    let mut failed = 0;
    for (n, name, limit, f) in criteria {
        if only.is_some_and(|o| o != n) {
            continue;
        }
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > limit => Err(format!("exceeded {limit:?}")),
            o => o,
        };
        let limit_s = if limit == NO_LIMIT { String::new() } else { format!(" / {}s", limit.as_secs()) };
        match outcome {
            Ok(detail) => println!("PASS [{n}] {name} ({:.2}s{limit_s}): {detail}", elapsed.as_secs_f64()),
            Err(why) => {
                failed += 1;
                println!("FAIL [{n}] {name} ({:.2}s{limit_s}): {why}", elapsed.as_secs_f64());
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
