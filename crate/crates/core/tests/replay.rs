mod common;

use chevlab::replay::{lemma_replay, LemmaCase, ReplayOptions};
use chevlab::roots::RootSystem;
use common::{ring, tables};

fn find<'a>(r: &'a chevlab::replay::LemmaReport, name: &str) -> &'a chevlab::replay::Step {
    r.steps.iter().find(|s| s.name == name).unwrap_or_else(|| panic!("missing step {name}"))
}

/// Weyl elements of A3 keeping a1 and a2 positive, counted directly:
/// `w` keeps a simple root positive iff it is not a right descent.
fn a3_filter_size() -> usize {
    let rs = RootSystem::build("A3".parse().unwrap());
    let w = rs.weyl_group().unwrap();
    w.elements.iter().filter(|e| {
        let img = |i: usize| e.word.iter().rev().fold(i, |r, &s| rs.reflect(s as usize, r));
        rs.is_positive(img(0)) && rs.is_positive(img(1))
    }).count()
}

#[test]
fn graph_replay_on_sl4_f2() {
    let r = lemma_replay(LemmaCase::L33, &tables("A3"), &ring("F2"), &ReplayOptions::default()).unwrap();
    assert!(r.internally_consistent);
    assert!(r.hypotheses_hold);
    assert_eq!(r.data["weyl_order"], 24);

    let paths = find(&r, "cell_filter_paths");
    assert_eq!(paths.agrees, Some(true));
    assert_eq!(paths.observed["by_images"], paths.observed["by_descents"]);
    assert_eq!(paths.observed["by_images"], a3_filter_size());

    let claim = find(&r, "cell_filter_claim");
    assert_eq!(claim.observed["enumerated"].as_array().unwrap().len(), a3_filter_size());

    let exh = find(&r, "exhaustive_class_comparison");
    assert_eq!(exh.observed["group_order"], 20160);
    let oracle = find(&r, "non_conjugacy");
    assert_eq!(exh.agrees, oracle.agrees);
    assert_eq!(r.to_json()["status"], r.status());
}

#[test]
fn diagonal_replay_agrees() {
    let opts = ReplayOptions { diagonal: Some(vec![chevlab::rings::Elem(2), chevlab::rings::Elem(4)]), ..Default::default() };
    let r = lemma_replay(LemmaCase::L34, &tables("A2"), &ring("Z9"), &opts).unwrap();
    assert_eq!(r.status(), "consistent");
    assert!(r.steps.iter().all(|s| s.agrees != Some(false)));
}

#[test]
fn ring_permutation_replay_over_gf8() {
    let r = lemma_replay(LemmaCase::L32, &tables("A2"), &ring("GF8"), &ReplayOptions::default()).unwrap();
    assert_eq!(r.status(), "consistent");
    assert_eq!(find(&r, "cubes").agrees, Some(true));
}

#[test]
fn central_replay_is_consistent() {
    let r = lemma_replay(LemmaCase::L36, &tables("A2"), &ring("Z9"), &ReplayOptions::default()).unwrap();
    assert!(r.internally_consistent, "{}", r.to_json());
    assert_eq!(find(&r, "validation").agrees, Some(true));
}

#[test]
fn case_names_parse() {
    for s in ["3.2", "L3.3", "l3.4", "3.5", "3.6"] {
        assert!(s.parse::<LemmaCase>().is_ok());
    }
    assert!("3.7".parse::<LemmaCase>().is_err());
}
