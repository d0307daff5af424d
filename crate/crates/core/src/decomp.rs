//! Bruhat decomposition over fields and Gauss decomposition over local rings.
//!
//! Both decompositions rest on one exact kernel: the big-cell split
//! `h = b v` (`b` upper triangular, `v` unit lower triangular in the graded
//! basis), computed by column elimination with unit pivots and then certified
//! by reading off group coordinates of `b` and `v`.

use std::collections::HashMap;
use std::sync::OnceLock;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::group::{GroupContext, GroupElement, GroupError, GroupWord, Letter, Representation};
use crate::matrix::Matrix;
use crate::rings::Elem;
use crate::roots::{RootError, RootId, WeylGroup};

/// Candidate right factors tried before a Gauss decomposition gives up.
const GAUSS_TRIES: usize = 20_000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DecompError {
    #[error("Bruhat decomposition needs a field, got {0}")]
    NotAField(String),
    #[error("decomposition failed: {0}")]
    DecompositionFailed(String),
    #[error("group of order {0} exceeds the enumeration budget")]
    TooLarge(u64),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// Torus, unipotent and lower unipotent parts of a big-cell element.
#[derive(Clone, Debug)]
struct BigCell {
    torus: Vec<Elem>,
    u: Vec<Elem>,
    v: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaussForm {
    pub t: GroupWord,
    /// Whether `t` was written as a product of `h` generators.
    pub t_in_h: bool,
    pub u1: GroupWord,
    pub v: GroupWord,
    pub u2: GroupWord,
}

impl GaussForm {
    pub fn word(&self) -> GroupWord {
        [&self.t, &self.u1, &self.v, &self.u2].into_iter().flatten().cloned().collect()
    }
}

/// Canonical coordinates of a Bruhat form; equal iff the forms are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BruhatKey {
    pub torus: Vec<Elem>,
    pub u: Vec<Elem>,
    pub w: usize,
    pub u2: Vec<Elem>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BruhatForm {
    pub t: GroupWord,
    pub t_in_h: bool,
    pub u: GroupWord,
    /// Index into the Weyl group enumeration and its reduced word.
    pub w: usize,
    pub w_word: Vec<u8>,
    /// The representative `w_{i_1}(1) ... w_{i_k}(1)` as a word.
    pub w_rep: GroupWord,
    pub u2: GroupWord,
    pub key: BruhatKey,
}

impl BruhatForm {
    pub fn word(&self) -> GroupWord {
        [&self.t, &self.u, &self.w_rep, &self.u2].into_iter().flatten().cloned().collect()
    }
}

struct WeylData {
    group: WeylGroup,
    reps: Vec<(Matrix, Matrix)>,
}

/// Solves `chi_i = prod_j s_j^{A_ij}` in a cyclic unit group.
struct TorusSolver {
    /// `|R*|`; exponents are reduced modulo it.
    order: i64,
    /// `U A V = diag(d)`.
    d: Vec<i64>,
    u: Vec<Vec<i64>>,
    v: Vec<Vec<i64>>,
}

/// Per-context decomposition engine with cached Weyl representatives.
pub struct Decomposer<'a> {
    pub ctx: &'a GroupContext,
    weyl: OnceLock<Result<WeylData, RootError>>,
    torus: TorusSolver,
}

impl<'a> Decomposer<'a> {
    pub fn new(ctx: &'a GroupContext) -> Self {
        let ring = &ctx.ring;
        let rs = ctx.rs();
        let a: Vec<Vec<i64>> = (0..rs.rank()).map(|i| (0..rs.rank()).map(|j| rs.cartan(i, j)).collect()).collect();
        let (d, u, v) = smith_diagonal(&a);
        let torus = TorusSolver { order: ring.units().len() as i64, d, u, v };
        Decomposer { ctx, weyl: OnceLock::new(), torus }
    }

    fn weyl(&self) -> Result<&WeylData, DecompError> {
        let data = self.weyl.get_or_init(|| {
            let group = self.ctx.rs().weyl_group()?;
            let reps = group
                .elements
                .iter()
                .map(|w| {
                    let m = self.ctx.eval_word(&self.w_rep(&w.word)).expect("w(1) is defined");
                    let inv = m.inverse(&self.ctx.ring).expect("group elements are invertible");
                    (m, inv)
                })
                .collect();
            Ok(WeylData { group, reps })
        });
        data.as_ref().map_err(|e| DecompError::Root(e.clone()))
    }

    pub fn weyl_group(&self) -> Result<&WeylGroup, DecompError> {
        Ok(&self.weyl()?.group)
    }

    /// `w_{i_1}(1) ... w_{i_k}(1)` for a reduced word.
    pub fn w_rep(&self, word: &[u8]) -> GroupWord {
        word.iter().map(|&i| Letter::W { root: i as RootId, t: self.ctx.ring.one() }).collect()
    }

    /// Splits `h = t u v` with unit pivots, certifying group membership.
    fn big_cell(&self, h: &Matrix) -> Option<BigCell> {
        let ctx = self.ctx;
        let ring = &ctx.ring;
        let n = h.dim();
        // Column operations from the right: make `h` upper triangular.
        let mut b = h.clone();
        for k in (0..n).rev() {
            let p = b.get(k, k);
            let pinv = ring.inv(p)?;
            for j in 0..k {
                let f = b.get(k, j);
                if f != Elem(0) {
                    let c = ring.neg(ring.mul(f, pinv));
                    for i in 0..=k {
                        let v = b.get(i, k);
                        if v != Elem(0) {
                            b.set(i, j, ring.add(b.get(i, j), ring.mul(c, v)));
                        }
                    }
                }
            }
        }
        let torus = b.diagonal();
        let tinv: Vec<Elem> = torus.iter().map(|&x| ring.inv(x).expect("pivots are units")).collect();
        let mut u1 = b.clone();
        for i in 0..n {
            for j in 0..n {
                u1.set(i, j, ring.mul(tinv[i], b.get(i, j)));
            }
        }
        let u = ctx.unipotent_coords(&u1, &ctx.positive_order()).ok()??;
        // v = u1^{-1} t^{-1} h
        let mut v_mat = h.clone();
        for i in 0..n {
            for j in 0..n {
                v_mat.set(i, j, ring.mul(tinv[i], h.get(i, j)));
            }
        }
        for (r, &a) in ctx.positive_order().iter().zip(&u) {
            ctx.left_mul_x(&mut v_mat, *r, ring.neg(a));
        }
        let v = ctx.unipotent_coords(&v_mat, &ctx.negative_order()).ok()??;
        if !self.is_torus(&torus) {
            return None;
        }
        Some(BigCell { torus, u, v })
    }

    /// Whether a diagonal is that of a torus element of the model.
    fn is_torus(&self, diag: &[Elem]) -> bool {
        let ctx = self.ctx;
        match ctx.rep {
            Representation::NaturalA => {
                diag.iter().fold(ctx.ring.one(), |acc, &x| ctx.ring.mul(acc, x)) == ctx.ring.one()
            }
            Representation::Adjoint => {
                let chi = self.character(diag);
                ctx.torus_element(&chi).map(|t| t.matrix.diagonal() == diag).unwrap_or(false)
            }
        }
    }

    fn character(&self, diag: &[Elem]) -> Vec<Elem> {
        let cb = self.ctx.tables.cb();
        (0..self.ctx.rs().rank()).map(|i| diag[cb.root_basis(i)]).collect()
    }

    /// Writes a torus diagonal as `h` generators when possible, otherwise as a
    /// single torus letter. The flag reports which happened.
    pub fn torus_word(&self, diag: &[Elem]) -> Result<(GroupWord, bool), DecompError> {
        let ctx = self.ctx;
        let ring = &ctx.ring;
        let l = ctx.rs().rank();
        let candidate: Option<Vec<Elem>> = match ctx.rep {
            Representation::NaturalA => {
                let mut acc = ring.one();
                Some(
                    (0..l)
                        .map(|j| {
                            acc = ring.mul(acc, diag[j]);
                            acc
                        })
                        .collect(),
                )
            }
            Representation::Adjoint => self.solve_character(&self.character(diag)),
        };
        if let Some(s) = candidate {
            let word: GroupWord = s
                .iter()
                .enumerate()
                .filter(|&(_, &x)| x != ring.one())
                .map(|(j, &x)| Letter::H { root: j, t: x })
                .collect();
            if ctx.eval_word(&word)?.diagonal() == diag {
                return Ok((word, true));
            }
        }
        if diag.iter().all(|&x| x == ring.one()) {
            return Ok((Vec::new(), true));
        }
        match ctx.rep {
            Representation::Adjoint => Ok((vec![Letter::Torus { chi: self.character(diag) }], false)),
            Representation::NaturalA => Err(DecompError::DecompositionFailed("diagonal not in the torus".into())),
        }
    }

    /// Solves `chi = character(h(s))` in the unit group: diagonal exponents
    /// are inverted by searching `d`-th roots among the units.
    fn solve_character(&self, chi: &[Elem]) -> Option<Vec<Elem>> {
        let ts = &self.torus;
        let ring = &self.ctx.ring;
        let l = chi.len();
        let combine = |m: &[Vec<i64>], xs: &[Elem], i: usize| -> Elem {
            (0..l).fold(ring.one(), |acc, j| ring.mul(acc, ring.pow(xs[j], m[i][j].rem_euclid(ts.order)).expect("nonnegative")))
        };
        let uc: Vec<Elem> = (0..l).map(|i| combine(&ts.u, chi, i)).collect();
        let mut y = Vec::with_capacity(l);
        for i in 0..l {
            let e = ts.d[i].rem_euclid(ts.order);
            y.push(ring.units().iter().copied().find(|&x| ring.pow(x, e) == Some(uc[i]))?);
        }
        Some((0..l).map(|i| combine(&ts.v, &y, i)).collect())
    }

    fn u_word(&self, order: &[RootId], coords: &[Elem]) -> GroupWord {
        order
            .iter()
            .zip(coords)
            .filter(|(_, &c)| c != Elem(0))
            .map(|(&root, &t)| Letter::X { root, t })
            .collect()
    }

    /// `g = t u1 v u2`. The right factor `u2` is searched among lifts of
    /// residue-field unipotents, starting with the identity, until `g u2^{-1}`
    /// lies in the big cell; the search is deterministic.
    pub fn gauss(&self, g: &GroupElement) -> Result<GaussForm, DecompError> {
        let ctx = self.ctx;
        let ring = &ctx.ring;
        let k = ring.residue_field();
        let pos = ctx.positive_order();
        let mut rng = ChaCha8Rng::seed_from_u64(0x6a05);
        for attempt in 0..GAUSS_TRIES {
            let z: Vec<Elem> = if attempt == 0 {
                vec![Elem(0); pos.len()]
            } else {
                // Sparse candidates first, dense ones later.
                let density = (attempt as f64 / 64.0).min(1.0);
                pos.iter()
                    .map(|_| {
                        if rand::Rng::gen_bool(&mut rng, density.max(0.25)) {
                            ring.lift(k.random(&mut rng))
                        } else {
                            Elem(0)
                        }
                    })
                    .collect()
            };
            let mut h = g.matrix.clone();
            for (&r, &c) in pos.iter().zip(&z).rev() {
                if c != Elem(0) {
                    ctx.right_mul_x(&mut h, r, ring.neg(c));
                }
            }
            if let Some(cell) = self.big_cell(&h) {
                let (t, t_in_h) = self.torus_word(&cell.torus)?;
                return Ok(GaussForm {
                    t,
                    t_in_h,
                    u1: self.u_word(&pos, &cell.u),
                    v: self.u_word(&ctx.negative_order(), &cell.v),
                    u2: self.u_word(&pos, &z),
                });
            }
        }
        Err(DecompError::DecompositionFailed(format!("no big-cell factor after {GAUSS_TRIES} tries")))
    }

    /// Bruhat parts for Weyl element `w` if `g` lies in `B w U_w^-`.
    fn bruhat_at(&self, g: &Matrix, w: usize) -> Option<(BigCell, Vec<Elem>)> {
        let ctx = self.ctx;
        let data = self.weyl().ok()?;
        let we = &data.group.elements[w];
        let (rep, rep_inv) = &data.reps[w];
        let rs = ctx.rs();
        let h = g.mul(rep_inv, &ctx.ring);
        let cell = self.big_cell(&h)?;
        // v must lie in V intersected with w U w^{-1}.
        let winv_pos = |beta: RootId| {
            let img = (0..rs.num_roots()).find(|&a| we.apply(a) == beta).expect("w is a bijection");
            rs.is_positive(img)
        };
        let neg = ctx.negative_order();
        if neg.iter().zip(&cell.v).any(|(&b, &c)| c != Elem(0) && !winv_pos(b)) {
            return None;
        }
        let mut v = Matrix::identity(ctx.dim(), &ctx.ring);
        for (&b, &c) in neg.iter().zip(&cell.v) {
            if c != Elem(0) {
                ctx.right_mul_x(&mut v, b, c);
            }
        }
        let u2 = rep_inv.mul(&v, &ctx.ring).mul(rep, &ctx.ring);
        let pos = ctx.positive_order();
        let coords = ctx.unipotent_coords(&u2, &pos).ok()??;
        if pos.iter().zip(&coords).any(|(&a, &c)| c != Elem(0) && rs.is_positive(we.apply(a))) {
            return None;
        }
        Some((cell, coords))
    }

    /// All Weyl elements whose cell contains `g` (exactly one over a field).
    pub fn bruhat_cells(&self, g: &Matrix) -> Result<Vec<usize>, DecompError> {
        self.require_field()?;
        let n = self.weyl()?.group.len();
        Ok((0..n).filter(|&w| self.bruhat_at(g, w).is_some()).collect())
    }

    fn require_field(&self) -> Result<(), DecompError> {
        if !self.ctx.ring.is_field() {
            return Err(DecompError::NotAField(self.ctx.ring.descriptor().short_name()));
        }
        Ok(())
    }

    /// `g = t u w u2` with `w(alpha) < 0` for every root of `u2`.
    pub fn bruhat(&self, g: &GroupElement) -> Result<BruhatForm, DecompError> {
        self.require_field()?;
        let data = self.weyl()?;
        for w in 0..data.group.len() {
            if let Some((cell, u2)) = self.bruhat_at(&g.matrix, w) {
                return self.bruhat_form(w, cell, u2);
            }
        }
        Err(DecompError::DecompositionFailed("element lies in no Bruhat cell".into()))
    }

    fn bruhat_form(&self, w: usize, cell: BigCell, u2: Vec<Elem>) -> Result<BruhatForm, DecompError> {
        let ctx = self.ctx;
        let data = self.weyl()?;
        let pos = ctx.positive_order();
        // h = g w^{-1} = t u v, so g = t u (v w) = t u w (w^{-1} v w).
        let (t, t_in_h) = self.torus_word(&cell.torus)?;
        let word = data.group.elements[w].word.clone();
        Ok(BruhatForm {
            t,
            t_in_h,
            u: self.u_word(&pos, &cell.u),
            w,
            w_rep: self.w_rep(&word),
            w_word: word,
            u2: self.u_word(&pos, &u2),
            key: BruhatKey { torus: cell.torus, u: cell.u, w, u2 },
        })
    }

    /// Every product `t u w u2` over a finite field, keyed by its matrix.
    /// Fails if two tuples give the same element.
    pub fn bruhat_oracle(&self, budget: u64) -> Result<HashMap<Matrix, BruhatKey>, DecompError> {
        self.require_field()?;
        let ctx = self.ctx;
        let ring = &ctx.ring;
        let data = self.weyl()?;
        let rs = ctx.rs();
        let q = ring.order() as u64;
        let m = rs.num_positive();
        let pos = ctx.positive_order();
        let tori = self.enumerate_h()?;
        let cells: u64 = data
            .group
            .elements
            .iter()
            .map(|w| q.pow(w.length as u32))
            .sum();
        let total = tori.len() as u64 * q.pow(m as u32) * cells;
        if total > budget {
            return Err(DecompError::TooLarge(total));
        }
        let all_u: Vec<Vec<Elem>> = tuples(ring.order(), m);
        let mut out = HashMap::new();
        for (tm, tdiag) in &tori {
            for u in &all_u {
                let mut tu = tm.clone();
                for (&r, &c) in pos.iter().zip(u) {
                    if c != Elem(0) {
                        ctx.right_mul_x(&mut tu, r, c);
                    }
                }
                for (w, we) in data.group.elements.iter().enumerate() {
                    let inv: Vec<usize> = (0..m).filter(|&a| !rs.is_positive(we.apply(a))).collect();
                    let base = tu.mul(&data.reps[w].0, ring);
                    for sub in tuples(ring.order(), inv.len()) {
                        let mut g = base.clone();
                        let mut u2 = vec![Elem(0); m];
                        for (&a, &c) in inv.iter().zip(&sub) {
                            u2[a] = c;
                        }
                        for (&r, &c) in pos.iter().zip(&u2) {
                            if c != Elem(0) {
                                ctx.right_mul_x(&mut g, r, c);
                            }
                        }
                        let key = BruhatKey { torus: tdiag.clone(), u: u.clone(), w, u2 };
                        if out.insert(g, key).is_some() {
                            return Err(DecompError::DecompositionFailed("two Bruhat tuples collide".into()));
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// All products of `h` generators of simple roots, as (matrix, diagonal).
    pub fn enumerate_h(&self) -> Result<Vec<(Matrix, Vec<Elem>)>, DecompError> {
        let ctx = self.ctx;
        let units = ctx.ring.units().to_vec();
        let l = ctx.rs().rank();
        let mut seen = HashMap::new();
        let mut out = Vec::new();
        for idx in tuples(units.len() as u32, l) {
            let word: GroupWord = idx.iter().enumerate().map(|(j, e)| Letter::H { root: j, t: units[e.0 as usize] }).collect();
            let m = ctx.eval_word(&word)?;
            let d = m.diagonal();
            if seen.insert(d.clone(), ()).is_none() {
                out.push((m, d));
            }
        }
        out.sort_by(|a, b| a.1.cmp(&b.1));
        Ok(out)
    }
}

/// All vectors in `{0..q-1}^len` in lexicographic order.
fn tuples(q: u32, len: usize) -> Vec<Vec<Elem>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|v| {
                (0..q).map(move |x| {
                    let mut v = v.clone();
                    v.push(Elem(x));
                    v
                })
            })
            .collect();
    }
    out
}

/// Diagonalizes an integer matrix by unimodular row and column operations:
/// returns `(d, u, v)` with `u a v = diag(d)`.
fn smith_diagonal(a: &[Vec<i64>]) -> (Vec<i64>, Vec<Vec<i64>>, Vec<Vec<i64>>) {
    let n = a.len();
    let ident = |n: usize| -> Vec<Vec<i64>> { (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect() };
    let mut m = a.to_vec();
    let (mut u, mut v) = (ident(n), ident(n));
    for k in 0..n {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in k..n {
                for j in k..n {
                    if m[i][j] != 0 && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs()) {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            m.swap(k, pi);
            u.swap(k, pi);
            for row in m.iter_mut() {
                row.swap(k, pj);
            }
            for row in v.iter_mut() {
                row.swap(k, pj);
            }
            let p = m[k][k];
            let mut clean = true;
            for i in k + 1..n {
                let q = m[i][k] / p;
                if q != 0 {
                    for j in 0..n {
                        m[i][j] -= q * m[k][j];
                        u[i][j] -= q * u[k][j];
                    }
                }
                clean &= m[i][k] == 0;
            }
            for j in k + 1..n {
                let q = m[k][j] / p;
                if q != 0 {
                    for i in 0..n {
                        m[i][j] -= q * m[i][k];
                        v[i][j] -= q * v[i][k];
                    }
                }
                clean &= m[k][j] == 0;
            }
            if clean {
                break;
            }
        }
    }
    ((0..n).map(|i| m[i][i]).collect(), u, v)
}

/// `x_a(t) x_{-a}(u)` rewritten as `V T U` when `1 + tu` is a unit, and as
/// `U W U` through `w_a` otherwise.
pub fn rank_one_rewrite(ctx: &GroupContext, a: RootId, t: Elem, u: Elem) -> Result<GroupWord, GroupError> {
    let ring = &ctx.ring;
    let neg = ctx.rs().neg(a);
    let s = ring.add(ring.one(), ring.mul(t, u));
    if let Some(si) = ring.inv(s) {
        return Ok(vec![
            Letter::X { root: neg, t: ring.mul(u, si) },
            Letter::H { root: a, t: s },
            Letter::X { root: a, t: ring.mul(t, si) },
        ]);
    }
    // 1 + tu in the radical forces u to be a unit:
    // x_{-a}(u) = x_a(u^{-1}) w_a(-u^{-1}) x_a(u^{-1}).
    let ui = ring.inv(u).ok_or(GroupError::NotUnit(u.0))?;
    Ok(vec![
        Letter::X { root: a, t: ring.add(t, ui) },
        Letter::W { root: a, t: ring.neg(ui) },
        Letter::X { root: a, t: ui },
    ])
}

/// Collects a word of positive-root letters into height order using the
/// commutator table: `x_a(s) x_b(t) = [x_a(s), x_b(t)] x_b(t) x_a(s)`.
pub fn unipotent_normal_form(ctx: &GroupContext, word: &[Letter]) -> Result<GroupWord, DecompError> {
    let ring = &ctx.ring;
    let mut w: Vec<(RootId, Elem)> = Vec::with_capacity(word.len());
    for l in word {
        match l {
            Letter::X { root, t } if ctx.rs().is_positive(*root) => w.push((*root, *t)),
            _ => return Err(DecompError::DecompositionFailed("normal form needs positive-root letters".into())),
        }
    }
    let mut steps = 0usize;
    loop {
        w.retain(|&(_, t)| t != Elem(0));
        let Some(i) = (0..w.len().saturating_sub(1)).find(|&i| w[i].0 >= w[i + 1].0) else { break };
        steps += 1;
        if steps > 1_000_000 {
            return Err(DecompError::DecompositionFailed("collection did not terminate".into()));
        }
        let ((a, s), (b, t)) = (w[i], w[i + 1]);
        if a == b {
            w[i] = (a, ring.add(s, t));
            w.remove(i + 1);
            continue;
        }
        let comm = ctx.commutator_formula(a, b, s, t)?;
        let mut repl: Vec<(RootId, Elem)> = comm
            .into_iter()
            .map(|l| match l {
                Letter::X { root, t } => (root, t),
                _ => unreachable!("commutator formulas are X words"),
            })
            .collect();
        repl.push((b, t));
        repl.push((a, s));
        w.splice(i..i + 2, repl);
    }
    Ok(w.into_iter().map(|(root, t)| Letter::X { root, t }).collect())
}
