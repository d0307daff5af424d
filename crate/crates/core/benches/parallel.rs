//! Default rayon pool against a one-thread pool on the parallel hot paths.
//! Without the `parallel` feature both arms run the sequential fallback.

use std::hint::black_box;
use std::path::PathBuf;

use chevlab::autos::{locally_inner_test, Factor, LocalMode, StandardAutomorphism};
use chevlab::group::{GroupContext, LieTables, Representation};
use chevlab::rings::{LocalRing, RingDescriptor};
use chevlab::sha::{out_c, FiniteGroup};
use criterion::{criterion_group, criterion_main, Criterion};

fn sl3(ring: &str) -> GroupContext {
    let t = LieTables::build("A2".parse().unwrap()).unwrap();
    let r = LocalRing::build(&RingDescriptor::parse(ring).unwrap()).unwrap();
    GroupContext::unrestricted(t, r, Representation::NaturalA).unwrap()
}

fn fixture(name: &str) -> FiniteGroup {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name);
    FiniteGroup::from_json(&serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()).unwrap()
}

#[cfg(feature = "parallel")]
fn modes() -> Vec<(&'static str, Option<rayon::ThreadPool>)> {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("pool", None), ("single", Some(one))]
}

#[cfg(not(feature = "parallel"))]
fn modes() -> Vec<(&'static str, Option<()>)> {
    vec![("sequential", None)]
}

#[cfg(feature = "parallel")]
fn within<R: Send>(pool: &Option<rayon::ThreadPool>, f: impl FnOnce() -> R + Send) -> R {
    match pool {
        Some(p) => p.install(f),
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn within<R>(_: &Option<()>, f: impl FnOnce() -> R) -> R {
    f()
}

fn bench(c: &mut Criterion) {
    let ctx = sl3("F3");
    let graph = ctx.rs().diagram_automorphisms().into_iter().find(|d| !d.is_identity()).unwrap();
    let auto = StandardAutomorphism::new(vec![Factor::Graph(graph)]);
    let hol = fixture("hol_z8.json");

    let mut g = c.benchmark_group("locally_inner_sl3_f3");
    g.sample_size(10);
    for (name, pool) in modes() {
        g.bench_function(name, |b| {
            b.iter(|| within(&pool, || locally_inner_test(&ctx, &auto, LocalMode::Exhaustive, false, 10_000, (0, 0)).unwrap()))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("out_c_order_32");
    for (name, pool) in modes() {
        g.bench_function(name, |b| b.iter(|| within(&pool, || black_box(out_c(&hol, 1_000_000).unwrap().out_c()))));
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
