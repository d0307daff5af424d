mod common;

use chevlab::group::{GroupContext, Letter, Representation};
use chevlab::matrix::Matrix;
use chevlab::rings::Elem;
use common::{adjoint, natural};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CONTEXTS: [(&str, &str); 8] = [
    ("A2", "Z9"),
    ("A3", "GF4"),
    ("B2", "Z25"),
    ("G2", "Z25"),
    ("C3", "GF3[t]/(t^2)"),
    ("D4", "GF8"),
    ("B3", "Z9"),
    ("A2", "GF2[t]/(t^3)"),
];

fn pick(i: usize) -> GroupContext {
    let (t, r) = CONTEXTS[i % CONTEXTS.len()];
    adjoint(t, r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn commutator_formula_matches_matrices(i: usize, a: usize, b: usize, t: u32, u: u32) {
        let c = pick(i);
        let k = c.rs().num_roots();
        let (a, b) = (a % k, b % k);
        prop_assume!(b != c.rs().neg(a));
        let n = c.ring.order();
        let (t, u) = (Elem(t % n), Elem(u % n));
        let direct = c.commutator(&c.x_gen(a, t), &c.x_gen(b, u)).unwrap();
        let word = c.commutator_formula(a, b, t, u).unwrap();
        prop_assert_eq!(c.eval_word(&word).unwrap(), direct.matrix);
    }

    #[test]
    fn words_evaluate_multiplicatively(i: usize, seed: u64) {
        let c = pick(i);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w1 = c.random_word(&mut rng, 5, true);
        let w2 = c.random_word(&mut rng, 5, true);
        let joined: Vec<Letter> = w1.iter().chain(&w2).cloned().collect();
        let m1 = c.eval_word(&w1).unwrap();
        prop_assert_eq!(c.eval_word(&joined).unwrap(), m1.mul(&c.eval_word(&w2).unwrap(), &c.ring));
        let inv = c.eval_word(&c.inverse_word(&w1)).unwrap();
        prop_assert!(m1.mul(&inv, &c.ring).is_identity(&c.ring));
    }

    #[test]
    fn steinberg_and_torus_relations(i: usize, r: usize, t: u32, s_idx: usize, v_idx: usize) {
        let c = pick(i);
        let ring = &c.ring;
        let r = r % c.rs().num_roots();
        let t = Elem(t % ring.order());
        let units = ring.units();
        let (s, v) = (units[s_idx % units.len()], units[v_idx % units.len()]);
        // x(t) x(s) = x(t + s)
        prop_assert_eq!(c.x_matrix(r, t).mul(&c.x_matrix(r, s), ring), c.x_matrix(r, ring.add(t, s)));
        // w(s)^-1 = w(-s), h(s) h(v) = h(sv)
        let w = c.w_gen(r, s).unwrap();
        let w_neg = c.w_gen(r, ring.neg(s)).unwrap();
        prop_assert!(w.matrix.mul(&w_neg.matrix, ring).is_identity(ring));
        let h = c.h_gen(r, s).unwrap().matrix.mul(&c.h_gen(r, v).unwrap().matrix, ring);
        prop_assert_eq!(h, c.h_gen(r, ring.mul(s, v)).unwrap().matrix);
        // h_a(s) x_b(t) h_a(s)^-1 = x_b(s^<b,a^vee> t)
        let b = (r * 7 + 1) % c.rs().num_roots();
        let e = c.rs().pairing(b, r);
        let conj = c.conjugate(&c.h_gen(r, s).unwrap(), &c.x_gen(b, t)).unwrap();
        prop_assert_eq!(conj.matrix, c.x_matrix(b, ring.mul(ring.pow(s, e).unwrap(), t)));
    }

    #[test]
    fn weyl_elements_permute_root_subgroups(i: usize, a: usize, b: usize, t: u32) {
        let c = pick(i);
        let ring = &c.ring;
        let k = c.rs().num_roots();
        let (a, b) = (a % k, b % k);
        let t = Elem(t % ring.order());
        let w = c.w_gen(a, ring.one()).unwrap();
        let conj = c.conjugate(&w, &c.x_gen(b, t)).unwrap().matrix;
        let sb = c.rs().reflect_by(a, b);
        prop_assert!(conj == c.x_matrix(sb, t) || conj == c.x_matrix(sb, ring.neg(t)));
    }
}

#[test]
fn natural_model_is_elementary_matrices() {
    for (ty, r) in [("A1", "Z25"), ("A2", "GF4"), ("A3", "Z9"), ("A4", "GF3[t]/(t^2)")] {
        let c = natural(ty, r);
        let ring = &c.ring;
        let l = c.rs().rank();
        for root in 0..c.rs().num_roots() {
            let coeffs = c.rs().root(root);
            let sign = coeffs.iter().sum::<i32>().signum();
            let i = coeffs.iter().position(|&x| x != 0).unwrap();
            let j = coeffs.iter().rposition(|&x| x != 0).unwrap() + 1;
            let (row, col) = if sign > 0 { (i, j) } else { (j, i) };
            for t in ring.elements().take(7) {
                let mut e = Matrix::identity(l + 1, ring);
                e.set(row, col, t);
                assert_eq!(c.x_matrix(root, t), e, "{ty} {r} root {root}");
            }
        }
    }
}

#[test]
fn reduction_mod_radical_is_a_homomorphism() {
    let c = adjoint("B2", "Z25");
    let k = c.residue_context().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let g = c.element(c.random_word(&mut rng, 6, true)).unwrap();
        let h = c.element(c.random_word(&mut rng, 6, true)).unwrap();
        let lhs = c.reduce_mod_radical(&c.mul(&g, &h).unwrap());
        let rhs = k.mul(&c.reduce_mod_radical(&g), &c.reduce_mod_radical(&h)).unwrap();
        assert_eq!(lhs.matrix, rhs.matrix);
    }
}

#[test]
fn invertibility_table_for_theorem_contexts() {
    use chevlab::group::required_inverse;
    for (ty, need) in [("A1", None), ("A2", Some(2)), ("A3", None), ("B2", Some(2)), ("C3", Some(2)), ("G2", Some(3)), ("D4", None), ("F4", Some(2)), ("E6", None)] {
        assert_eq!(required_inverse(ty.parse().unwrap()), need, "{ty}");
    }
    let t = common::tables("G2");
    assert!(GroupContext::new(t.clone(), common::ring("Z9"), Representation::Adjoint).is_err());
    assert!(GroupContext::new(t, common::ring("Z25"), Representation::Adjoint).is_ok());
}
