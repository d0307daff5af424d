//! Chevalley group elements over a local ring.
//!
//! A [`GroupContext`] fixes a root system, a ring and a representation
//! (adjoint for every type, natural for `A_l`). Elements are exact matrices,
//! optionally with the word that produced them; equality is matrix equality.

use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::lie::{powers_of, AdjointRep, ChevalleyBasis, LieError};
use crate::matrix::Matrix;
use crate::rings::{Elem, LocalRing, RingError};
use crate::roots::{CartanType, RootId, RootSystem, RootType};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("elements belong to different contexts")]
    ContextMismatch,
    #[error("parameter {0} is not a unit")]
    NotUnit(u32),
    #[error("{ty} requires 1/{n} in the ring {ring}")]
    InvertibilityRequired { ty: String, n: i64, ring: String },
    #[error("the natural representation is only available for type A")]
    NaturalNeedsTypeA,
    #[error("torus characters are only available in the adjoint model")]
    TorusNeedsAdjoint,
    #[error("commutator of opposite roots has no commutator formula")]
    OppositeRoots,
    #[error("no unit probe entry for root {0}")]
    NoProbe(RootId),
    #[error("bad group word: {0}")]
    BadWord(String),
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Ring(#[from] RingError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Representation {
    Adjoint,
    NaturalA,
}

/// One generator letter of a group word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Letter {
    X { root: RootId, t: Elem },
    W { root: RootId, t: Elem },
    H { root: RootId, t: Elem },
    /// Adjoint torus element with `chi[i]` the value on the simple root `i`.
    Torus { chi: Vec<Elem> },
}

pub type GroupWord = Vec<Letter>;

/// `[x_a(t), x_b(u)] = prod x_{i a + j b}(c t^i u^j)`, terms in product order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorTerm {
    pub i: u32,
    pub j: u32,
    pub root: RootId,
    pub coeff: i64,
}

/// Commutator table indexed by ordered root pairs, `None` for opposite roots.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommutatorTable {
    pub num_roots: usize,
    pub terms: Vec<Option<Vec<CommutatorTerm>>>,
}

impl CommutatorTable {
    /// Solves for all coefficients against exact integer adjoint matrices at
    /// `t = u = 1`, peeling product terms in order of `(i + j, i)`.
    pub fn derive(rep: &AdjointRep) -> Result<Self, LieError> {
        let rs = rep.root_system();
        let k = rs.num_roots();
        let pairs: Vec<(RootId, RootId)> = (0..k).flat_map(|a| (0..k).map(move |b| (a, b))).collect();
        let terms = crate::par::map(pairs, |(a, b)| {
            if b == rs.neg(a) {
                return Ok(None);
            }
            let mut targets = Vec::new();
            for i in 1..=3 {
                for j in 1..=3 {
                    if let Some(g) = rs.combo(i, a, j, b) {
                        targets.push((i as u32, j as u32, g));
                    }
                }
            }
            targets.sort_by_key(|&(i, j, _)| (i + j, i));
            let mut found = Vec::new();
            for &(i, j, g) in &targets {
                let (row, col, c) = probe_linear(rep, g);
                let mut v = vec![0i64; rep.dim()];
                v[col] = 1;
                // M e_col with M = x_a(1) x_b(1) x_a(-1) x_b(-1), then peel.
                for (r, s) in [(b, -1), (a, -1), (b, 1), (a, 1)] {
                    v = int_exp_apply(rep, r, s, &v);
                }
                for t in &found {
                    let t: &CommutatorTerm = t;
                    v = int_exp_apply(rep, t.root, -t.coeff, &v);
                }
                if v[row] % c != 0 {
                    return Err(LieError::SignInconsistency(1));
                }
                found.push(CommutatorTerm { i, j, root: g, coeff: v[row] / c });
            }
            found.retain(|t| t.coeff != 0);
            Ok(Some(found))
        });
        Ok(CommutatorTable { num_roots: k, terms: terms.into_iter().collect::<Result<_, _>>()? })
    }

    pub fn get(&self, a: RootId, b: RootId) -> Option<&[CommutatorTerm]> {
        self.terms[a * self.num_roots + b].as_deref()
    }
}

/// A linear-term entry `(row, col, coefficient)` of `ad e_g`, preferring `±1`.
fn probe_linear(rep: &AdjointRep, g: RootId) -> (usize, usize, i64) {
    let terms = rep.exp_terms(g);
    let lin = terms.iter().filter(|t| t.power == 1);
    let best = lin.min_by_key(|t| (t.coeff.abs(), t.col, t.row)).expect("ad e_g is nonzero");
    (best.row as usize, best.col as usize, best.coeff)
}

/// `x_r(s) v` over the integers.
fn int_exp_apply(rep: &AdjointRep, r: RootId, s: i64, v: &[i64]) -> Vec<i64> {
    let mut out = v.to_vec();
    for t in rep.exp_terms(r) {
        out[t.row as usize] += t.coeff * s.pow(t.power as u32) * v[t.col as usize];
    }
    out
}

/// Structure constants, adjoint exponentials and the commutator table.
#[derive(Clone, Debug)]
pub struct LieTables {
    pub rs: Arc<RootSystem>,
    pub adjoint: AdjointRep,
    pub commutators: CommutatorTable,
}

impl LieTables {
    pub fn build(ty: RootType) -> Result<Arc<Self>, LieError> {
        let rs = Arc::new(RootSystem::build(ty));
        let cb = ChevalleyBasis::build(Arc::clone(&rs))?;
        let adjoint = AdjointRep::build(cb)?;
        let commutators = CommutatorTable::derive(&adjoint)?;
        Ok(Arc::new(LieTables { rs, adjoint, commutators }))
    }

    pub fn cb(&self) -> &ChevalleyBasis {
        &self.adjoint.cb
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub matrix: Matrix,
    pub word: Option<GroupWord>,
}

impl GroupElement {
    pub fn from_matrix(matrix: Matrix) -> Self {
        GroupElement { matrix, word: None }
    }
}

/// Minimal 1/n requirements by type, as in the rigidity theorem's hypotheses.
pub fn required_inverse(ty: RootType) -> Option<i64> {
    match ty.kind {
        CartanType::A if ty.rank == 2 => Some(2),
        CartanType::B | CartanType::C | CartanType::F => Some(2),
        CartanType::G => Some(3),
        _ => None,
    }
}

#[derive(Clone, Debug)]
pub struct GroupContext {
    pub tables: Arc<LieTables>,
    pub ring: Arc<LocalRing>,
    pub rep: Representation,
    pub restricted: bool,
    levels: Vec<i32>,
    /// Per root: matrix entries of `x_r(t) - I` as `(row, col, power, coeff)`.
    x_terms: Vec<Vec<(usize, usize, u8, i64)>>,
    /// Per root: a linear entry whose coefficient is a unit in the ring.
    probes: Vec<Option<(usize, usize, Elem)>>,
}

impl PartialEq for GroupContext {
    fn eq(&self, other: &Self) -> bool {
        self.tables.rs.ty == other.tables.rs.ty && self.ring == other.ring && self.rep == other.rep
    }
}

impl GroupContext {
    /// Context honoring the invertibility hypotheses (1/2 or 1/3).
    pub fn new(tables: Arc<LieTables>, ring: Arc<LocalRing>, rep: Representation) -> Result<Self, GroupError> {
        if let Some(n) = required_inverse(tables.rs.ty) {
            if !ring.require_invertible(n) {
                return Err(GroupError::InvertibilityRequired {
                    ty: tables.rs.ty.to_string(),
                    n,
                    ring: ring.descriptor().short_name(),
                });
            }
        }
        Self::unrestricted(tables, ring, rep)
    }

    /// Context without the invertibility hypotheses (e.g. `SL_3(F_2)`).
    pub fn unrestricted(tables: Arc<LieTables>, ring: Arc<LocalRing>, rep: Representation) -> Result<Self, GroupError> {
        let rs = Arc::clone(&tables.rs);
        let (levels, x_terms) = match rep {
            Representation::Adjoint => {
                let cb = tables.cb();
                let levels = (0..cb.dim()).map(|b| cb.level(b)).collect();
                let x_terms = (0..rs.num_roots())
                    .map(|r| {
                        tables.adjoint.exp_terms(r).iter().map(|t| (t.row as usize, t.col as usize, t.power, t.coeff)).collect()
                    })
                    .collect();
                (levels, x_terms)
            }
            Representation::NaturalA => {
                if rs.ty.kind != CartanType::A {
                    return Err(GroupError::NaturalNeedsTypeA);
                }
                let n = rs.rank() + 1;
                let levels = (0..n).map(|i| -(i as i32)).collect();
                let x_terms = (0..rs.num_roots())
                    .map(|r| {
                        let (i, j) = natural_indices(&rs, r);
                        vec![(i, j, 1u8, 1i64)]
                    })
                    .collect();
                (levels, x_terms)
            }
        };
        let mut ctx = GroupContext { tables, ring, rep, restricted: false, levels, x_terms, probes: Vec::new() };
        ctx.probes = (0..rs.num_roots())
            .map(|r| {
                ctx.x_terms[r]
                    .iter()
                    .filter(|e| e.2 == 1 && ctx.ring.is_unit(ctx.ring.from_int(e.3)))
                    .min_by_key(|e| (e.3.abs(), e.1, e.0))
                    .map(|e| (e.0, e.1, ctx.ring.from_int(e.3)))
            })
            .collect();
        ctx.restricted = required_inverse(rs.ty).is_none_or(|n| ctx.ring.require_invertible(n));
        Ok(ctx)
    }

    pub fn rs(&self) -> &Arc<RootSystem> {
        &self.tables.rs
    }

    pub fn dim(&self) -> usize {
        self.levels.len()
    }

    /// Level (weight height) of each basis vector; non-increasing.
    pub fn levels(&self) -> &[i32] {
        &self.levels
    }

    pub fn describe(&self) -> String {
        format!("{} {:?} over {}", self.rs().ty, self.rep, self.ring.descriptor().short_name())
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement { matrix: Matrix::identity(self.dim(), &self.ring), word: Some(Vec::new()) }
    }

    fn x_entries(&self, r: RootId, t: Elem) -> Vec<(usize, usize, Elem)> {
        let ring = &self.ring;
        let pw = powers_of(t, ring, 4);
        self.x_terms[r]
            .iter()
            .map(|&(i, j, k, c)| (i, j, ring.mul(ring.from_int(c), pw[k as usize])))
            .filter(|e| e.2 != Elem(0))
            .collect()
    }

    pub fn x_matrix(&self, r: RootId, t: Elem) -> Matrix {
        let mut m = Matrix::identity(self.dim(), &self.ring);
        for (i, j, v) in self.x_entries(r, t) {
            m.set(i, j, self.ring.add(m.get(i, j), v));
        }
        m
    }

    /// `m <- x_r(t) m`.
    pub fn left_mul_x(&self, m: &mut Matrix, r: RootId, t: Elem) {
        let src = m.clone();
        for (i, j, v) in self.x_entries(r, t) {
            for c in 0..self.dim() {
                let s = src.get(j, c);
                if s != Elem(0) {
                    m.set(i, c, self.ring.add(m.get(i, c), self.ring.mul(v, s)));
                }
            }
        }
    }

    /// `m <- m x_r(t)`.
    pub fn right_mul_x(&self, m: &mut Matrix, r: RootId, t: Elem) {
        let src = m.clone();
        for (i, j, v) in self.x_entries(r, t) {
            for row in 0..self.dim() {
                let s = src.get(row, i);
                if s != Elem(0) {
                    m.set(row, j, self.ring.add(m.get(row, j), self.ring.mul(s, v)));
                }
            }
        }
    }

    fn check_unit(&self, t: Elem) -> Result<Elem, GroupError> {
        self.ring.inv(t).ok_or(GroupError::NotUnit(t.0))
    }

    /// Multiplies `m` on the right by the matrix of one letter.
    pub fn right_mul_letter(&self, m: &mut Matrix, l: &Letter) -> Result<(), GroupError> {
        let ring = &self.ring;
        match l {
            Letter::X { root, t } => self.right_mul_x(m, *root, *t),
            Letter::W { root, t } => {
                let ti = self.check_unit(*t)?;
                let neg = self.rs().neg(*root);
                self.right_mul_x(m, *root, *t);
                self.right_mul_x(m, neg, ring.neg(ti));
                self.right_mul_x(m, *root, *t);
            }
            Letter::H { root, t } => {
                self.check_unit(*t)?;
                // h(t) = w(t) w(1)^{-1} = w(t) w(-1)
                self.right_mul_letter(m, &Letter::W { root: *root, t: *t })?;
                self.right_mul_letter(m, &Letter::W { root: *root, t: ring.neg(ring.one()) })?;
            }
            Letter::Torus { chi } => {
                let d = self.torus_diagonal(chi)?;
                for row in 0..self.dim() {
                    for (c, &dc) in d.iter().enumerate() {
                        m.set(row, c, ring.mul(m.get(row, c), dc));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn eval_word(&self, w: &[Letter]) -> Result<Matrix, GroupError> {
        let mut m = Matrix::identity(self.dim(), &self.ring);
        for l in w {
            self.right_mul_letter(&mut m, l)?;
        }
        Ok(m)
    }

    pub fn element(&self, w: GroupWord) -> Result<GroupElement, GroupError> {
        Ok(GroupElement { matrix: self.eval_word(&w)?, word: Some(w) })
    }

    pub fn x_gen(&self, r: RootId, t: Elem) -> GroupElement {
        GroupElement { matrix: self.x_matrix(r, t), word: Some(vec![Letter::X { root: r, t }]) }
    }

    pub fn w_gen(&self, r: RootId, t: Elem) -> Result<GroupElement, GroupError> {
        self.element(vec![Letter::W { root: r, t }])
    }

    pub fn h_gen(&self, r: RootId, t: Elem) -> Result<GroupElement, GroupError> {
        self.element(vec![Letter::H { root: r, t }])
    }

    /// Diagonal of the adjoint torus element with character `chi`.
    fn torus_diagonal(&self, chi: &[Elem]) -> Result<Vec<Elem>, GroupError> {
        if self.rep != Representation::Adjoint {
            return Err(GroupError::TorusNeedsAdjoint);
        }
        let rs = self.rs();
        if chi.len() != rs.rank() {
            return Err(GroupError::BadWord(format!("torus character needs {} values", rs.rank())));
        }
        for &c in chi {
            self.check_unit(c)?;
        }
        let cb = self.tables.cb();
        Ok((0..self.dim())
            .map(|b| match cb.basis_root(b) {
                None => self.ring.one(),
                Some(r) => self.character_value(chi, rs.root(r)),
            })
            .collect())
    }

    /// `prod chi_i^{m_i}` for a lattice vector `m`.
    pub fn character_value(&self, chi: &[Elem], m: &[i32]) -> Elem {
        m.iter().zip(chi).fold(self.ring.one(), |acc, (&e, &c)| {
            self.ring.mul(acc, self.ring.pow(c, e as i64).expect("characters take unit values"))
        })
    }

    pub fn torus_element(&self, chi: &[Elem]) -> Result<GroupElement, GroupError> {
        self.element(vec![Letter::Torus { chi: chi.to_vec() }])
    }

    fn check_dims(&self, g: &GroupElement) -> Result<(), GroupError> {
        if g.matrix.dim() != self.dim() {
            return Err(GroupError::ContextMismatch);
        }
        Ok(())
    }

    pub fn mul(&self, a: &GroupElement, b: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_dims(a)?;
        self.check_dims(b)?;
        let word = match (&a.word, &b.word) {
            (Some(x), Some(y)) => Some(x.iter().chain(y).cloned().collect()),
            _ => None,
        };
        Ok(GroupElement { matrix: a.matrix.mul(&b.matrix, &self.ring), word })
    }

    pub fn inv(&self, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.check_dims(g)?;
        let matrix = g.matrix.inverse(&self.ring).ok_or(GroupError::NotUnit(0))?;
        Ok(GroupElement { matrix, word: g.word.as_ref().map(|w| self.inverse_word(w)) })
    }

    pub fn inverse_word(&self, w: &[Letter]) -> GroupWord {
        let ring = &self.ring;
        w.iter()
            .rev()
            .map(|l| match l {
                Letter::X { root, t } => Letter::X { root: *root, t: ring.neg(*t) },
                Letter::W { root, t } => Letter::W { root: *root, t: ring.neg(*t) },
                Letter::H { root, t } => Letter::H { root: *root, t: ring.inv(*t).unwrap_or(*t) },
                Letter::Torus { chi } => Letter::Torus { chi: chi.iter().map(|&c| ring.inv(c).unwrap_or(c)).collect() },
            })
            .collect()
    }

    /// `g1 g2 g1^{-1} g2^{-1}`.
    pub fn commutator(&self, g1: &GroupElement, g2: &GroupElement) -> Result<GroupElement, GroupError> {
        let a = self.mul(g1, g2)?;
        let b = self.mul(&a, &self.inv(g1)?)?;
        self.mul(&b, &self.inv(g2)?)
    }

    /// `x g x^{-1}`.
    pub fn conjugate(&self, x: &GroupElement, g: &GroupElement) -> Result<GroupElement, GroupError> {
        self.mul(&self.mul(x, g)?, &self.inv(x)?)
    }

    /// Word for `[x_a(t), x_b(u)]` read from the frozen table.
    pub fn commutator_formula(&self, a: RootId, b: RootId, t: Elem, u: Elem) -> Result<GroupWord, GroupError> {
        let terms = self.tables.commutators.get(a, b).ok_or(GroupError::OppositeRoots)?;
        let ring = &self.ring;
        Ok(terms
            .iter()
            .map(|term| {
                let ti = ring.pow(t, term.i as i64).expect("nonnegative");
                let uj = ring.pow(u, term.j as i64).expect("nonnegative");
                let v = ring.mul(ring.from_int(term.coeff), ring.mul(ti, uj));
                Letter::X { root: term.root, t: v }
            })
            .filter(|l| !matches!(l, Letter::X { t, .. } if *t == Elem(0)))
            .collect())
    }

    /// Identity plus entries strictly raising the level.
    pub fn in_u(&self, g: &Matrix) -> bool {
        self.unitriangular(g, |ri, cj| ri > cj)
    }

    pub fn in_v(&self, g: &Matrix) -> bool {
        self.unitriangular(g, |ri, cj| ri < cj)
    }

    fn unitriangular(&self, g: &Matrix, allowed: impl Fn(i32, i32) -> bool) -> bool {
        let n = self.dim();
        (0..n).all(|i| {
            (0..n).all(|j| {
                let v = g.get(i, j);
                if i == j {
                    v == self.ring.one()
                } else {
                    v == Elem(0) || allowed(self.levels[i], self.levels[j])
                }
            })
        })
    }

    pub fn in_torus(&self, g: &Matrix) -> bool {
        g.is_diagonal()
    }

    /// Coordinates `a` with `g = x_{r_0}(a_0) x_{r_1}(a_1) ...` for the given
    /// root order (heights non-decreasing in absolute value, all roots of one
    /// sign). `None` if `g` is not such a product.
    pub fn unipotent_coords(&self, g: &Matrix, order: &[RootId]) -> Result<Option<Vec<Elem>>, GroupError> {
        let mut res = g.clone();
        let mut out = Vec::with_capacity(order.len());
        for &r in order {
            let (row, col, c) = self.probes[r].ok_or(GroupError::NoProbe(r))?;
            let a = self.ring.mul(res.get(row, col), self.ring.inv(c).expect("probe coefficients are units"));
            self.left_mul_x(&mut res, r, self.ring.neg(a));
            out.push(a);
        }
        Ok(res.is_identity(&self.ring).then_some(out))
    }

    /// Positive roots in height order.
    pub fn positive_order(&self) -> Vec<RootId> {
        (0..self.rs().num_positive()).collect()
    }

    /// Negative roots in order of increasing depth.
    pub fn negative_order(&self) -> Vec<RootId> {
        let m = self.rs().num_positive();
        (m..2 * m).collect()
    }

    /// The same element over the residue field.
    pub fn residue_context(&self) -> Result<GroupContext, GroupError> {
        let k = self.ring.residue_field();
        if self.restricted {
            GroupContext::new(Arc::clone(&self.tables), k, self.rep)
        } else {
            GroupContext::unrestricted(Arc::clone(&self.tables), k, self.rep)
        }
    }

    /// Entrywise residue map; the word's parameters are reduced as well.
    pub fn reduce_mod_radical(&self, g: &GroupElement) -> GroupElement {
        let ring = &self.ring;
        let word = g.word.as_ref().map(|w| {
            w.iter()
                .map(|l| match l {
                    Letter::X { root, t } => Letter::X { root: *root, t: ring.residue(*t) },
                    Letter::W { root, t } => Letter::W { root: *root, t: ring.residue(*t) },
                    Letter::H { root, t } => Letter::H { root: *root, t: ring.residue(*t) },
                    Letter::Torus { chi } => Letter::Torus { chi: chi.iter().map(|&c| ring.residue(c)).collect() },
                })
                .collect()
        });
        GroupElement { matrix: g.matrix.map(|e| ring.residue(e)), word }
    }

    /// Random word over `X`, `W` and `H` letters (and torus letters in the
    /// adjoint model when `torus` is set).
    pub fn random_word<R: Rng + ?Sized>(&self, rng: &mut R, len: usize, torus: bool) -> GroupWord {
        let k = self.rs().num_roots();
        let kinds = if torus && self.rep == Representation::Adjoint { 4 } else { 3 };
        (0..len)
            .map(|_| {
                let root = rng.gen_range(0..k);
                match rng.gen_range(0..kinds + 2) {
                    0 => Letter::W { root, t: self.ring.random_unit(rng) },
                    1 => Letter::H { root, t: self.ring.random_unit(rng) },
                    3 if kinds == 4 => Letter::Torus { chi: (0..self.rs().rank()).map(|_| self.ring.random_unit(rng)).collect() },
                    _ => Letter::X { root, t: self.ring.random(rng) },
                }
            })
            .collect()
    }

    /// JSON form of a word, roots as coefficient vectors.
    pub fn word_to_json(&self, w: &[Letter]) -> Value {
        let rs = self.rs();
        Value::Array(
            w.iter()
                .map(|l| match l {
                    Letter::X { root, t } => json!({"x": {"root": rs.root(*root), "t": t.0.to_string()}}),
                    Letter::W { root, t } => json!({"w": {"root": rs.root(*root), "t": t.0.to_string()}}),
                    Letter::H { root, t } => json!({"h": {"root": rs.root(*root), "t": t.0.to_string()}}),
                    Letter::Torus { chi } => json!({"torus": chi.iter().map(|c| c.0.to_string()).collect::<Vec<_>>()}),
                })
                .collect(),
        )
    }

    pub fn word_from_json(&self, v: &Value) -> Result<GroupWord, GroupError> {
        let bad = |m: &str| GroupError::BadWord(m.to_string());
        let arr = v.as_array().ok_or_else(|| bad("expected a list of letters"))?;
        let parse_t = |x: &Value| -> Result<Elem, GroupError> {
            match x {
                Value::String(s) => Ok(self.ring.parse_elem(s)?),
                Value::Number(n) => {
                    let i = n.as_i64().ok_or_else(|| bad("integer parameter expected"))?;
                    Ok(self.ring.parse_elem(&i.to_string())?)
                }
                _ => Err(bad("parameter must be a string or integer")),
            }
        };
        arr.iter()
            .map(|item| {
                let obj = item.as_object().filter(|o| o.len() == 1).ok_or_else(|| bad("letter must be a one-key object"))?;
                let (key, body) = obj.iter().next().expect("one key");
                if key == "torus" {
                    let vals = body.as_array().ok_or_else(|| bad("torus expects a list"))?;
                    let chi = vals.iter().map(parse_t).collect::<Result<Vec<_>, _>>()?;
                    return Ok(Letter::Torus { chi });
                }
                let coeffs: Vec<i32> = serde_json::from_value(body.get("root").cloned().unwrap_or(Value::Null))
                    .map_err(|_| bad("root must be an integer vector"))?;
                let root = self.rs().find(&coeffs).ok_or_else(|| bad(&format!("{coeffs:?} is not a root")))?;
                let t = parse_t(body.get("t").ok_or_else(|| bad("missing parameter t"))?)?;
                match key.as_str() {
                    "x" => Ok(Letter::X { root, t }),
                    "w" => Ok(Letter::W { root, t }),
                    "h" => Ok(Letter::H { root, t }),
                    other => Err(bad(&format!("unknown letter `{other}`"))),
                }
            })
            .collect()
    }

    /// Human-readable word, e.g. `x[a1](3) h[a2](2)`.
    pub fn word_label(&self, w: &[Letter]) -> String {
        let rs = self.rs();
        if w.is_empty() {
            return "e".into();
        }
        w.iter()
            .map(|l| match l {
                Letter::X { root, t } => format!("x[{}]({})", rs.label(*root), t),
                Letter::W { root, t } => format!("w[{}]({})", rs.label(*root), t),
                Letter::H { root, t } => format!("h[{}]({})", rs.label(*root), t),
                Letter::Torus { chi } => {
                    format!("torus({})", chi.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// `(i, j)` with root `r` equal to `eps_i - eps_j` in type `A`.
fn natural_indices(rs: &RootSystem, r: RootId) -> (usize, usize) {
    let pos = if rs.is_positive(r) { r } else { rs.neg(r) };
    let c = rs.root(pos);
    let i = c.iter().position(|&x| x != 0).expect("roots are nonzero");
    let j = c.iter().rposition(|&x| x != 0).expect("roots are nonzero") + 1;
    if rs.is_positive(r) {
        (i, j)
    } else {
        (j, i)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingDescriptor;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ctx(ty: &str, ring: &str, rep: Representation) -> GroupContext {
        let tables = LieTables::build(ty.parse().unwrap()).unwrap();
        let ring = LocalRing::build(&RingDescriptor::parse(ring).unwrap()).unwrap();
        GroupContext::unrestricted(tables, ring, rep).unwrap()
    }

    #[test]
    fn natural_a2_commutator_entry() {
        let c = ctx("A2", "Z9", Representation::NaturalA);
        let (t, u) = (Elem(4), Elem(5));
        let g = c.commutator(&c.x_gen(0, t), &c.x_gen(1, u)).unwrap();
        let mut expect = Matrix::identity(3, &c.ring);
        expect.set(0, 2, Elem(2)); // 20 mod 9
        assert_eq!(g.matrix, expect);
        assert_eq!(c.eval_word(&c.commutator_formula(0, 1, t, u).unwrap()).unwrap(), expect);
    }

    #[test]
    fn a1_natural_w_and_h() {
        let c = ctx("A1", "Z25", Representation::NaturalA);
        let w = c.w_gen(0, c.ring.one()).unwrap();
        assert_eq!(w.matrix, Matrix::from_ints(&[vec![0, 1], vec![-1, 0]], &c.ring));
        let t = Elem(7);
        let h = c.h_gen(0, t).unwrap();
        let ti = c.ring.inv(t).unwrap();
        assert_eq!(h.matrix, Matrix::from_rows(vec![vec![t, Elem(0)], vec![Elem(0), ti]]));
        assert!(c.h_gen(0, c.ring.one()).unwrap().matrix.is_identity(&c.ring));
        assert_eq!(c.w_gen(0, Elem(5)).unwrap_err(), GroupError::NotUnit(5));
    }

    #[test]
    fn b2_short_long_commutator_has_two_terms() {
        let c = ctx("B2", "Z25", Representation::Adjoint);
        // B2: a1 long, a2 short.
        let terms = c.tables.commutators.get(1, 0).unwrap();
        let ij: Vec<(u32, u32)> = terms.iter().map(|t| (t.i, t.j)).collect();
        assert_eq!(ij, vec![(1, 1), (2, 1)]);
    }

    #[test]
    fn invertibility_is_enforced() {
        let tables = LieTables::build("B2".parse().unwrap()).unwrap();
        let f4 = LocalRing::build(&RingDescriptor::GF { p: 2, n: 2 }).unwrap();
        assert!(matches!(
            GroupContext::new(Arc::clone(&tables), f4, Representation::Adjoint),
            Err(GroupError::InvertibilityRequired { n: 2, .. })
        ));
        let z9 = LocalRing::build(&RingDescriptor::Zmod { p: 3, k: 2 }).unwrap();
        assert!(GroupContext::new(tables, z9, Representation::Adjoint).is_ok());
    }

    #[test]
    fn torus_acts_by_characters() {
        let c = ctx("A2", "Z9", Representation::Adjoint);
        let chi = vec![Elem(2), Elem(4)];
        let d = c.torus_element(&chi).unwrap();
        let cb = c.tables.cb();
        let b = cb.root_basis(2);
        assert_eq!(d.matrix.get(b, b), Elem(8));
        let x = c.x_gen(0, Elem(1));
        assert_eq!(c.conjugate(&d, &x).unwrap().matrix, c.x_matrix(0, Elem(2)));
    }

    #[test]
    fn membership_shapes() {
        let c = ctx("A2", "GF4", Representation::Adjoint);
        let u = c.element(vec![Letter::X { root: 0, t: Elem(2) }, Letter::X { root: 2, t: Elem(3) }]).unwrap();
        assert!(c.in_u(&u.matrix) && !c.in_v(&u.matrix));
        let w = c.w_gen(0, c.ring.one()).unwrap();
        assert!(!c.in_u(&w.matrix) && !c.in_v(&w.matrix) && !c.in_torus(&w.matrix));
        assert!(c.in_torus(&c.h_gen(1, Elem(2)).unwrap().matrix));
        let coords = c.unipotent_coords(&u.matrix, &c.positive_order()).unwrap().unwrap();
        assert_eq!(coords, vec![Elem(2), Elem(0), Elem(3)]);
    }

    #[test]
    fn reduction_mod_radical() {
        let c = ctx("A2", "Z9", Representation::Adjoint);
        let k = c.residue_context().unwrap();
        assert!(c.reduce_mod_radical(&c.x_gen(0, Elem(3))).matrix.is_identity(&k.ring));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            let g1 = c.element(c.random_word(&mut rng, 5, false)).unwrap();
            let g2 = c.element(c.random_word(&mut rng, 5, false)).unwrap();
            let lhs = c.reduce_mod_radical(&c.mul(&g1, &g2).unwrap());
            let rhs = k.mul(&c.reduce_mod_radical(&g1), &c.reduce_mod_radical(&g2)).unwrap();
            assert_eq!(lhs.matrix, rhs.matrix);
            assert_eq!(k.eval_word(lhs.word.as_ref().unwrap()).unwrap(), lhs.matrix);
        }
    }

    #[test]
    fn word_json_round_trip() {
        let c = ctx("A2", "Z9", Representation::Adjoint);
        let v: Value = serde_json::from_str(r#"[{"x":{"root":[1,0],"t":"4"}},{"h":{"root":[0,1],"t":"2"}}]"#).unwrap();
        let w = c.word_from_json(&v).unwrap();
        assert_eq!(w, vec![Letter::X { root: 0, t: Elem(4) }, Letter::H { root: 1, t: Elem(2) }]);
        assert_eq!(c.word_to_json(&w), v);
        let bad: Value = serde_json::from_str(r#"[{"x":{"root":[1,1,1],"t":"4"}}]"#).unwrap();
        assert!(c.word_from_json(&bad).is_err());
    }
}
