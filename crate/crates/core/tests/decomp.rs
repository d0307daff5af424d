mod common;

use chevlab::decomp::{DecompError, Decomposer};
use chevlab::group::{GroupContext, Letter};
use common::{adjoint, natural};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn roots_of(w: &[Letter]) -> Vec<(usize, bool)> {
    w.iter()
        .map(|l| match l {
            Letter::X { root, .. } => (*root, true),
            _ => (usize::MAX, false),
        })
        .collect()
}

fn check_gauss(c: &GroupContext, seed: u64) -> Result<(), TestCaseError> {
    let d = Decomposer::new(c);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = c.element(c.random_word(&mut rng, 6, false)).unwrap();
    let f = d.gauss(&g).unwrap();
    let back = c.eval_word(&f.word()).unwrap();
    prop_assert!(back == g.matrix);
    prop_assert!(f.t_in_h);
    let all_h = f.t.iter().all(|l| matches!(l, Letter::H { .. }));
    prop_assert!(all_h);
    let rs = c.rs();
    for (part, positive) in [(&f.u1, true), (&f.u2, true), (&f.v, false)] {
        for (r, is_x) in roots_of(part) {
            prop_assert!(is_x);
            prop_assert_eq!(rs.is_positive(r), positive);
        }
    }
    let u1 = c.eval_word(&f.u1).unwrap();
    prop_assert!(c.in_u(&u1));
    prop_assert!(c.in_v(&c.eval_word(&f.v).unwrap()));
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn gauss_round_trips(k in 0usize..7, seed: u64) {
        let (t, r) = [("A2", "Z9"), ("B2", "Z25"), ("G2", "Z25"), ("A3", "GF4[t]/(t^2)"), ("C3", "GF3[t]/(t^2)"), ("A2", "Z8"), ("D4", "Z9")][k];
        check_gauss(&adjoint(t, r), seed)?;
    }

    #[test]
    fn gauss_natural_model(k in 0usize..3, seed: u64) {
        let (t, r) = [("A2", "Z9"), ("A3", "GF2[t]/(t^3)"), ("A1", "Z27")][k];
        check_gauss(&natural(t, r), seed)?;
    }

    #[test]
    fn bruhat_cell_is_unique_over_fields(k in 0usize..4, seed: u64) {
        let (t, r) = [("A2", "GF4"), ("B2", "F3"), ("G2", "F5"), ("A3", "F2")][k];
        let c = adjoint(t, r);
        let d = Decomposer::new(&c);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = c.element(c.random_word(&mut rng, 6, false)).unwrap();
        let f = d.bruhat(&g).unwrap();
        let back = c.eval_word(&f.word()).unwrap();
        prop_assert!(back == g.matrix);
        let cells = d.bruhat_cells(&g.matrix).unwrap();
        prop_assert_eq!(cells, vec![f.w]);
    }
}

#[test]
fn bruhat_matches_the_tuple_oracle_on_sl3_f2() {
    let c = natural("A2", "F2");
    let d = Decomposer::new(&c);
    let oracle = d.bruhat_oracle(1_000_000).unwrap();
    assert_eq!(oracle.len(), 168);
    for (m, key) in &oracle {
        let g = chevlab::group::GroupElement { matrix: m.clone(), word: None };
        let f = d.bruhat(&g).unwrap();
        assert_eq!(&f.key, key);
        assert_eq!(&c.eval_word(&f.word()).unwrap(), m);
    }
}

#[test]
fn bruhat_needs_a_field() {
    let c = adjoint("A2", "Z9");
    let d = Decomposer::new(&c);
    assert!(matches!(d.bruhat(&c.identity()), Err(DecompError::NotAField(_))));
}
