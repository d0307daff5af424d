//! Standard automorphisms (inner, diagonal, graph, ring, central), their
//! normal form `rho . Lambda . delta . d . i_g`, and exact conjugacy tools.
//!
//! Automorphisms other than inner ones act on words letter by letter; the
//! image matrix is always recomputed from the transformed word.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use thiserror::Error;

use crate::decomp::{DecompError, Decomposer};
use crate::group::{GroupContext, GroupElement, GroupError, GroupWord, Letter, Representation};
use crate::lie::ChevalleyBasis;
use crate::matrix::Matrix;
use crate::par;
use crate::rings::{Elem, LocalRing, RingError, RingMorphism};
use crate::roots::{CartanType, DiagramAutomorphism, RootError, RootId, RootSystem};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AutoError {
    #[error("a word witness is required to apply a non-inner factor")]
    WordRequired,
    #[error("invalid factor: {0}")]
    BadFactor(String),
    #[error("graph automorphism signs are inconsistent at roots {0} and {1}")]
    GraphSigns(RootId, RootId),
    #[error("{0} has no nontrivial graph automorphism witness")]
    NoNontrivialGraph(String),
    #[error("internal invariant failed: {0}")]
    Invariant(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Decomp(#[from] DecompError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Root(#[from] RootError),
}

/// A central automorphism is given on coset representatives of `G/E`
/// (adjoint torus characters) by central values.
#[derive(Clone, Debug, PartialEq)]
pub struct CentralAssignment {
    pub coset_rep: Vec<Elem>,
    pub z: Matrix,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Factor {
    Inner(GroupElement),
    Diagonal(Vec<Elem>),
    Graph(DiagramAutomorphism),
    Ring(RingMorphism),
    Central(Vec<CentralAssignment>),
}

impl Factor {
    pub fn kind(&self) -> &'static str {
        match self {
            Factor::Inner(_) => "inner",
            Factor::Diagonal(_) => "diagonal",
            Factor::Graph(_) => "graph",
            Factor::Ring(_) => "ring",
            Factor::Central(_) => "central",
        }
    }

    pub fn validate(&self, ctx: &GroupContext) -> Result<(), AutoError> {
        let bad = |m: String| Err(AutoError::BadFactor(m));
        let rs = ctx.rs();
        match self {
            Factor::Inner(x) => {
                if x.matrix.dim() != ctx.dim() || x.matrix.inverse(&ctx.ring).is_none() {
                    return bad("inner factor is not an invertible element of this context".into());
                }
            }
            Factor::Diagonal(d) => {
                if d.len() != rs.rank() {
                    return bad(format!("diagonal factor needs {} values", rs.rank()));
                }
                if let Some(x) = d.iter().find(|&&x| !ctx.ring.is_unit(x)) {
                    return bad(format!("diagonal value {x} is not a unit"));
                }
            }
            Factor::Graph(delta) => {
                if !rs.diagram_automorphisms().contains(delta) {
                    return bad(format!("{:?} is not a diagram automorphism of {}", delta.perm, rs.ty));
                }
                graph_signs(ctx.tables.cb(), delta)?;
            }
            Factor::Ring(rho) => {
                if **rho.source() != *ctx.ring || **rho.target() != *ctx.ring {
                    return bad("ring factor acts on a different ring".into());
                }
                rho.validate()?;
                if !rho.is_bijective() {
                    return bad("ring factor is not onto".into());
                }
            }
            Factor::Central(list) => {
                if !list.is_empty() && ctx.rep != Representation::Adjoint {
                    return bad("the natural model has G = E, so central factors carry no cosets".into());
                }
                let probes = centrality_probes(ctx)?;
                for a in list {
                    if a.coset_rep.len() != rs.rank() || a.coset_rep.iter().any(|&c| !ctx.ring.is_unit(c)) {
                        return bad("coset representative must be a unit character".into());
                    }
                    if a.z.dim() != ctx.dim() || a.z.inverse(&ctx.ring).is_none() {
                        return bad("central value is not invertible".into());
                    }
                    let ring = &ctx.ring;
                    if probes.iter().any(|p| a.z.mul(p, ring) != p.mul(&a.z, ring)) {
                        return bad("central value does not commute with the group".into());
                    }
                }
            }
        }
        Ok(())
    }

    /// The inverse automorphism.
    pub fn inverse(&self, ctx: &GroupContext) -> Result<Factor, AutoError> {
        let ring = &ctx.ring;
        Ok(match self {
            Factor::Inner(x) => Factor::Inner(ctx.inv(x)?),
            Factor::Diagonal(d) => Factor::Diagonal(d.iter().map(|&x| ring.try_inv(x)).collect::<Result<_, _>>()?),
            Factor::Graph(delta) => Factor::Graph(delta.inverse()),
            Factor::Ring(rho) => Factor::Ring(rho.inverse().ok_or_else(|| AutoError::BadFactor("ring factor is not bijective".into()))?),
            Factor::Central(list) => Factor::Central(
                list.iter()
                    .map(|a| {
                        let z = a.z.inverse(ring).ok_or_else(|| AutoError::BadFactor("central value is singular".into()))?;
                        Ok(CentralAssignment { coset_rep: a.coset_rep.clone(), z })
                    })
                    .collect::<Result<_, AutoError>>()?,
            ),
        })
    }
}

/// Elements whose commutation with `z` certifies `z` central: `x_a(t)` for
/// all roots and additive generators, plus torus generators (adjoint).
fn centrality_probes(ctx: &GroupContext) -> Result<Vec<Matrix>, AutoError> {
    let mut out: Vec<Matrix> = elementary_generators(ctx).into_iter().map(|g| g.matrix).collect();
    out.extend(torus_generators(ctx)?.into_iter().map(|g| g.matrix));
    Ok(out)
}

/// Signs `c_a` with `delta(e_a) = c_a e_{delta(a)}` for the Lie algebra
/// automorphism fixing `e_{+-a_i} -> e_{+-delta(a_i)}`. Computed by height
/// and then checked against every structure constant.
pub fn graph_signs(cb: &ChevalleyBasis, delta: &DiagramAutomorphism) -> Result<Vec<i64>, AutoError> {
    let rs = cb.root_system();
    let m = rs.num_positive();
    let l = rs.rank();
    let mut c = vec![0i64; rs.num_roots()];
    for i in 0..l {
        c[i] = 1;
        c[rs.neg(i)] = 1;
    }
    for r in l..m {
        for target in [r, rs.neg(r)] {
            // peel a simple root of the same sign
            let (a, b) = (0..l)
                .map(|i| if rs.is_positive(target) { i } else { rs.neg(i) })
                .find_map(|a| {
                    let diff: Vec<i32> = rs.root(target).iter().zip(rs.root(a)).map(|(x, y)| x - y).collect();
                    rs.find(&diff).map(|b| (a, b))
                })
                .expect("every non-simple root is a simple root plus a root");
            let (da, db) = (rs.apply_diagram(delta, a), rs.apply_diagram(delta, b));
            let n = cb.n(a, b);
            let nd = cb.n(da, db);
            c[target] = c[a] * c[b] * nd / n;
        }
    }
    for a in 0..rs.num_roots() {
        if c[a] != c[rs.neg(a)] || c[a].abs() != 1 {
            return Err(AutoError::GraphSigns(a, rs.neg(a)));
        }
        for b in 0..rs.num_roots() {
            if let Some(s) = rs.add(a, b) {
                let (da, db) = (rs.apply_diagram(delta, a), rs.apply_diagram(delta, b));
                if c[s] * cb.n(a, b) != c[a] * c[b] * cb.n(da, db) {
                    return Err(AutoError::GraphSigns(a, b));
                }
            }
        }
    }
    Ok(c)
}

/// Matrix `P` of the graph automorphism on the adjoint module, so that
/// `delta(g) = P g P^{-1}`.
pub fn graph_matrix(ctx: &GroupContext, delta: &DiagramAutomorphism) -> Result<Matrix, AutoError> {
    if ctx.rep != Representation::Adjoint {
        return Err(GroupError::TorusNeedsAdjoint.into());
    }
    let cb = ctx.tables.cb();
    let rs = ctx.rs();
    let c = graph_signs(cb, delta)?;
    let mut p = Matrix::zero(ctx.dim());
    for r in 0..rs.num_roots() {
        p.set(cb.root_basis(rs.apply_diagram(delta, r)), cb.root_basis(r), ctx.ring.from_int(c[r]));
    }
    for i in 0..rs.rank() {
        p.set(cb.cartan_basis(delta.perm[i]), cb.cartan_basis(i), ctx.ring.one());
    }
    Ok(p)
}

fn root_character(ctx: &GroupContext, d: &[Elem], r: RootId) -> Elem {
    ctx.character_value(d, ctx.rs().root(r))
}

/// Letter-by-letter image of a word under a non-inner, non-central factor.
fn map_word(ctx: &GroupContext, f: &Factor, w: &[Letter]) -> Result<GroupWord, AutoError> {
    let ring = &ctx.ring;
    let rs = ctx.rs();
    Ok(match f {
        Factor::Diagonal(d) => w
            .iter()
            .map(|l| match l {
                Letter::X { root, t } => Letter::X { root: *root, t: ring.mul(root_character(ctx, d, *root), *t) },
                Letter::W { root, t } => Letter::W { root: *root, t: ring.mul(root_character(ctx, d, *root), *t) },
                other => other.clone(),
            })
            .collect(),
        Factor::Graph(delta) => {
            let c = graph_signs(ctx.tables.cb(), delta)?;
            let sgn = |r: RootId, t: Elem| if c[r] == 1 { t } else { ring.neg(t) };
            w.iter()
                .map(|l| match l {
                    Letter::X { root, t } => Letter::X { root: rs.apply_diagram(delta, *root), t: sgn(*root, *t) },
                    Letter::W { root, t } => Letter::W { root: rs.apply_diagram(delta, *root), t: sgn(*root, *t) },
                    Letter::H { root, t } => Letter::H { root: rs.apply_diagram(delta, *root), t: *t },
                    Letter::Torus { chi } => Letter::Torus { chi: permute_character(delta, chi) },
                })
                .collect()
        }
        Factor::Ring(rho) => w
            .iter()
            .map(|l| match l {
                Letter::X { root, t } => Letter::X { root: *root, t: rho.apply(*t) },
                Letter::W { root, t } => Letter::W { root: *root, t: rho.apply(*t) },
                Letter::H { root, t } => Letter::H { root: *root, t: rho.apply(*t) },
                Letter::Torus { chi } => Letter::Torus { chi: chi.iter().map(|&x| rho.apply(x)).collect() },
            })
            .collect(),
        Factor::Inner(_) | Factor::Central(_) => unreachable!("handled on elements"),
    })
}

/// `chi'` with `chi'(delta a_i) = chi(a_i)`.
fn permute_character(delta: &DiagramAutomorphism, chi: &[Elem]) -> Vec<Elem> {
    let mut out = chi.to_vec();
    for (i, &p) in delta.perm.iter().enumerate() {
        out[p] = chi[i];
    }
    out
}

/// Whether the adjoint torus characters `a` and `b` agree modulo `H`.
fn same_coset(ctx: &GroupContext, dec: &Decomposer, a: &[Elem], b: &[Elem]) -> Result<bool, AutoError> {
    let ring = &ctx.ring;
    let q: Vec<Elem> = a.iter().zip(b).map(|(&x, &y)| Ok(ring.mul(x, ring.try_inv(y)?))).collect::<Result<_, RingError>>()?;
    let diag = ctx.torus_element(&q)?.matrix.diagonal();
    Ok(dec.torus_word(&diag)?.1)
}

/// `lambda(g)` read off the torus letters of the word.
fn central_value(ctx: &GroupContext, list: &[CentralAssignment], w: &[Letter]) -> Result<Matrix, AutoError> {
    let ring = &ctx.ring;
    let mut z = Matrix::identity(ctx.dim(), ring);
    if list.is_empty() {
        return Ok(z);
    }
    let dec = Decomposer::new(ctx);
    for l in w {
        if let Letter::Torus { chi } = l {
            for a in list {
                if same_coset(ctx, &dec, chi, &a.coset_rep)? {
                    z = z.mul(&a.z, ring);
                    break;
                }
                let inv: Vec<Elem> = a.coset_rep.iter().map(|&x| ring.try_inv(x)).collect::<Result<_, _>>()?;
                if same_coset(ctx, &dec, chi, &inv)? {
                    z = z.mul(&a.z.inverse(ring).expect("validated"), ring);
                    break;
                }
            }
        }
    }
    Ok(z)
}

/// Image of `g` under one factor.
pub fn apply_factor(ctx: &GroupContext, f: &Factor, g: &GroupElement) -> Result<GroupElement, AutoError> {
    let ring = &ctx.ring;
    match f {
        Factor::Inner(x) => {
            let xi = ctx.inv(x)?;
            let matrix = x.matrix.mul(&g.matrix, ring).mul(&xi.matrix, ring);
            let word = match (&x.word, &g.word, &xi.word) {
                (Some(a), Some(b), Some(c)) => Some(a.iter().chain(b).chain(c).cloned().collect()),
                _ => None,
            };
            Ok(GroupElement { matrix, word })
        }
        Factor::Central(list) => {
            let w = g.word.as_ref().ok_or(AutoError::WordRequired)?;
            let z = central_value(ctx, list, w)?;
            if z.is_identity(ring) {
                Ok(g.clone())
            } else {
                Ok(GroupElement { matrix: z.mul(&g.matrix, ring), word: None })
            }
        }
        _ => {
            let w = g.word.as_ref().ok_or(AutoError::WordRequired)?;
            Ok(ctx.element(map_word(ctx, f, w)?)?)
        }
    }
}

/// Matrix-level image where a closed form exists: diagonal (adjoint torus
/// conjugation), graph (adjoint `P g P^{-1}`), ring (entrywise).
pub fn apply_factor_matrix(ctx: &GroupContext, f: &Factor, m: &Matrix) -> Result<Option<Matrix>, AutoError> {
    let ring = &ctx.ring;
    Ok(match f {
        Factor::Inner(x) => Some(x.matrix.mul(m, ring).mul(&ctx.inv(x)?.matrix, ring)),
        Factor::Ring(rho) => Some(m.map(|e| rho.apply(e))),
        Factor::Diagonal(d) if ctx.rep == Representation::Adjoint => {
            let t = ctx.torus_element(d)?;
            Some(t.matrix.mul(m, ring).mul(&ctx.inv(&t)?.matrix, ring))
        }
        Factor::Graph(delta) if ctx.rep == Representation::Adjoint => {
            let p = graph_matrix(ctx, delta)?;
            let pi = p.inverse(ring).ok_or_else(|| AutoError::Invariant("graph matrix is singular".into()))?;
            Some(p.mul(m, ring).mul(&pi, ring))
        }
        _ => None,
    })
}

/// Factors listed in application order: `factors[0]` acts first.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct StandardAutomorphism {
    pub factors: Vec<Factor>,
}

impl StandardAutomorphism {
    pub fn new(factors: Vec<Factor>) -> Self {
        StandardAutomorphism { factors }
    }

    pub fn validate(&self, ctx: &GroupContext) -> Result<(), AutoError> {
        self.factors.iter().try_for_each(|f| f.validate(ctx))
    }

    pub fn apply(&self, ctx: &GroupContext, g: &GroupElement) -> Result<GroupElement, AutoError> {
        let mut cur = g.clone();
        for f in &self.factors {
            cur = apply_factor(ctx, f, &cur)?;
        }
        Ok(cur)
    }

    pub fn inverse(&self, ctx: &GroupContext) -> Result<StandardAutomorphism, AutoError> {
        Ok(StandardAutomorphism { factors: self.factors.iter().rev().map(|f| f.inverse(ctx)).collect::<Result<_, _>>()? })
    }

    /// Rewrites the factor list as `rho . Lambda . delta . d . i_g`.
    pub fn standard_form(&self, ctx: &GroupContext) -> Result<StandardForm, AutoError> {
        let mut sf = StandardForm::identity(ctx);
        for f in &self.factors {
            sf.then(ctx, f)?;
        }
        Ok(sf)
    }

    pub fn to_json(&self, ctx: &GroupContext) -> Value {
        Value::Array(self.factors.iter().map(|f| factor_to_json(ctx, f)).collect())
    }

    /// Parses `{"factors": [...]}` or a bare list; see [`factor_from_json`].
    pub fn from_json(ctx: &GroupContext, v: &Value) -> Result<Self, AutoError> {
        let list = v.get("factors").unwrap_or(v);
        let arr = list.as_array().ok_or_else(|| AutoError::BadFactor("expected a list of factors".into()))?;
        let factors = arr.iter().map(|f| factor_from_json(ctx, f)).collect::<Result<Vec<_>, _>>()?;
        let a = StandardAutomorphism { factors };
        a.validate(ctx)?;
        Ok(a)
    }
}

/// `phi = rho . Lambda . delta . d . i_g`.
#[derive(Clone, Debug)]
pub struct StandardForm {
    pub inner: GroupElement,
    pub diagonal: Vec<Elem>,
    pub graph: DiagramAutomorphism,
    pub central: Vec<CentralAssignment>,
    pub ring: RingMorphism,
}

impl StandardForm {
    pub fn identity(ctx: &GroupContext) -> Self {
        StandardForm {
            inner: ctx.identity(),
            diagonal: vec![ctx.ring.one(); ctx.rs().rank()],
            graph: DiagramAutomorphism::identity(ctx.rs().rank()),
            central: Vec::new(),
            ring: RingMorphism::identity(&ctx.ring),
        }
    }

    /// Application-order factor list `[i_g, d, delta, Lambda, rho]`.
    pub fn factors(&self) -> Vec<Factor> {
        vec![
            Factor::Inner(self.inner.clone()),
            Factor::Diagonal(self.diagonal.clone()),
            Factor::Graph(self.graph.clone()),
            Factor::Central(self.central.clone()),
            Factor::Ring(self.ring.clone()),
        ]
    }

    pub fn automorphism(&self) -> StandardAutomorphism {
        StandardAutomorphism::new(self.factors())
    }

    /// Replaces `self` by `f . self`, moving `f` to its slot.
    pub fn then(&mut self, ctx: &GroupContext, f: &Factor) -> Result<(), AutoError> {
        f.validate(ctx)?;
        let ring = &ctx.ring;
        let rho_inv = self.ring.inverse().ok_or_else(|| AutoError::Invariant("ring part is not bijective".into()))?;
        match f {
            Factor::Ring(r) => self.ring = r.compose(&self.ring),
            Factor::Central(list) => {
                // Lambda' rho = rho (rho^{-1} Lambda' rho)
                for a in list {
                    self.central.push(CentralAssignment {
                        coset_rep: a.coset_rep.iter().map(|&x| rho_inv.apply(x)).collect(),
                        z: a.z.map(|e| rho_inv.apply(e)),
                    });
                }
            }
            Factor::Graph(delta) => {
                // delta commutes with rho; delta Lambda = (delta Lambda delta^{-1}) delta
                let p = if self.central.iter().any(|a| !a.z.is_identity(ring)) { Some(graph_matrix(ctx, delta)?) } else { None };
                for a in &mut self.central {
                    a.coset_rep = permute_character(delta, &a.coset_rep);
                    if let Some(p) = &p {
                        let pi = p.inverse(ring).expect("signed permutation");
                        a.z = p.mul(&a.z, ring).mul(&pi, ring);
                    }
                }
                self.graph = delta.compose(&self.graph);
            }
            Factor::Diagonal(d) => {
                // d' rho = rho d1 with d1 = rho^{-1}(d'); d1 delta = delta d2 with d2_i = d1_{delta(i)}
                let d1: Vec<Elem> = d.iter().map(|&x| rho_inv.apply(x)).collect();
                for i in 0..self.diagonal.len() {
                    self.diagonal[i] = ring.mul(self.diagonal[i], d1[self.graph.perm[i]]);
                }
            }
            Factor::Inner(x) => {
                // i_x phi = phi i_{phi^{-1}(x)}, and i_y i_g = i_{yg} with phi^{-1}(x) = g^{-1} psi^{-1}(x) g
                if x.word.is_none() {
                    return Err(AutoError::WordRequired);
                }
                let psi = StandardAutomorphism::new(vec![
                    Factor::Diagonal(self.diagonal.clone()),
                    Factor::Graph(self.graph.clone()),
                    Factor::Central(self.central.clone()),
                    Factor::Ring(self.ring.clone()),
                ]);
                let y = psi.inverse(ctx)?.apply(ctx, x)?;
                self.inner = ctx.mul(&y, &self.inner)?;
            }
        }
        Ok(())
    }
}

fn factor_to_json(ctx: &GroupContext, f: &Factor) -> Value {
    let codes = |v: &[Elem]| v.iter().map(|e| e.0.to_string()).collect::<Vec<_>>();
    match f {
        Factor::Inner(x) => match &x.word {
            Some(w) => json!({"inner": ctx.word_to_json(w)}),
            None => json!({"inner": {"matrix": x.matrix.rows()}}),
        },
        Factor::Diagonal(d) => json!({"diagonal": codes(d)}),
        Factor::Graph(delta) => json!({"graph": delta.perm.iter().map(|p| p + 1).collect::<Vec<_>>()}),
        Factor::Ring(rho) => json!({"ring": {"table": rho.table().iter().map(|e| e.0).collect::<Vec<_>>()}}),
        Factor::Central(list) => json!({"central": list.iter().map(|a| json!({
            "coset": codes(&a.coset_rep),
            "z": a.z.rows(),
        })).collect::<Vec<_>>()}),
    }
}

/// One factor from JSON. Forms:
/// `{"inner": word}`, `{"diagonal": ["2","4"]}`, `{"graph": [3,2,1]}`
/// (1-based image of each simple root), `{"ring": "frobenius"}`,
/// `{"ring": {"frobenius": k}}`, `{"ring": {"images": [...]}}`,
/// `{"ring": {"table": [...]}}`, `{"central": [{"coset": [...], "z": "identity"}]}`.
pub fn factor_from_json(ctx: &GroupContext, v: &Value) -> Result<Factor, AutoError> {
    let bad = |m: &str| AutoError::BadFactor(m.to_string());
    let obj = v.as_object().filter(|o| o.len() == 1).ok_or_else(|| bad("factor must be a one-key object"))?;
    let (key, body) = obj.iter().next().expect("one key");
    let ring = &ctx.ring;
    let elems = |x: &Value| -> Result<Vec<Elem>, AutoError> {
        let arr = x.as_array().ok_or_else(|| bad("expected a list of ring elements"))?;
        arr.iter()
            .map(|e| match e {
                Value::String(s) => Ok(ring.parse_elem(s)?),
                Value::Number(n) => Ok(ring.parse_elem(&n.to_string())?),
                _ => Err(bad("ring element must be a string or integer")),
            })
            .collect()
    };
    match key.as_str() {
        "inner" => Ok(Factor::Inner(ctx.element(ctx.word_from_json(body)?)?)),
        "diagonal" => Ok(Factor::Diagonal(elems(body)?)),
        "graph" => {
            let perm: Vec<usize> = serde_json::from_value(body.clone()).map_err(|_| bad("graph expects a permutation"))?;
            if perm.contains(&0) {
                return Err(bad("graph permutation is 1-based"));
            }
            Ok(Factor::Graph(DiagramAutomorphism { perm: perm.into_iter().map(|p| p - 1).collect() }))
        }
        "ring" => {
            let rho = match body {
                Value::String(s) if s == "frobenius" => RingMorphism::frobenius(ring),
                Value::String(s) if s == "identity" => RingMorphism::identity(ring),
                Value::Object(o) if o.contains_key("frobenius") => {
                    let k = o["frobenius"].as_u64().ok_or_else(|| bad("frobenius power must be a nonnegative integer"))?;
                    let f = RingMorphism::frobenius(ring);
                    (0..k).fold(RingMorphism::identity(ring), |acc, _| f.compose(&acc))
                }
                Value::Object(o) if o.contains_key("images") => RingMorphism::from_generator_images(ring, ring, &elems(&o["images"])?)?,
                Value::Object(o) if o.contains_key("table") => RingMorphism::from_table(ring, ring, elems(&o["table"])?)?,
                _ => return Err(bad("unknown ring factor")),
            };
            Ok(Factor::Ring(rho))
        }
        "central" => {
            let arr = body.as_array().ok_or_else(|| bad("central expects a list"))?;
            let list = arr
                .iter()
                .map(|a| {
                    let coset_rep = elems(a.get("coset").ok_or_else(|| bad("missing coset"))?)?;
                    let z = match a.get("z") {
                        None => Matrix::identity(ctx.dim(), ring),
                        Some(Value::String(s)) if s == "identity" => Matrix::identity(ctx.dim(), ring),
                        Some(rows) => {
                            let rows: Vec<Vec<i64>> = serde_json::from_value(rows.clone()).map_err(|_| bad("z must be an integer matrix"))?;
                            Matrix::from_ints(&rows, ring)
                        }
                    };
                    Ok(CentralAssignment { coset_rep, z })
                })
                .collect::<Result<_, AutoError>>()?;
            Ok(Factor::Central(list))
        }
        other => Err(bad(&format!("unknown factor `{other}`"))),
    }
}

/// Multiset data for `h_a(t)` in the weight basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusProfile {
    pub root: RootId,
    pub t: Elem,
    /// `<weight, a^vee>` per basis vector.
    pub exponents: Vec<i64>,
    pub entries: Vec<Elem>,
    /// The matrix is diagonal with entries `t^exponent`.
    pub matches_exponents: bool,
    /// All exponents in `{0, +-1, +-2}`, or `+-3` for a short `G2` root.
    pub support_ok: bool,
    pub max_exponent: i64,
}

impl TorusProfile {
    pub fn sorted_exponents(&self) -> Vec<i64> {
        let mut e = self.exponents.clone();
        e.sort_unstable_by(|a, b| b.cmp(a));
        e
    }

    pub fn to_json(&self) -> Value {
        let mut entries: Vec<u32> = self.entries.iter().map(|e| e.0).collect();
        entries.sort_unstable();
        json!({
            "t": self.t.0,
            "exponents": self.sorted_exponents(),
            "entries": entries,
            "matches_exponents": self.matches_exponents,
            "support_ok": self.support_ok,
        })
    }
}

/// Weight of each basis vector paired with the coroot of `a`.
pub fn weight_pairings(ctx: &GroupContext, a: RootId) -> Vec<i64> {
    let rs = ctx.rs();
    match ctx.rep {
        Representation::Adjoint => {
            let cb = ctx.tables.cb();
            (0..ctx.dim()).map(|b| cb.basis_root(b).map_or(0, |beta| rs.pairing(beta, a))).collect()
        }
        Representation::NaturalA => {
            let pos = if rs.is_positive(a) { a } else { rs.neg(a) };
            let c = rs.root(pos);
            let i = c.iter().position(|&x| x != 0).expect("nonzero root");
            let j = c.iter().rposition(|&x| x != 0).expect("nonzero root") + 1;
            let s = if rs.is_positive(a) { 1 } else { -1 };
            (0..ctx.dim()).map(|k| if k == i { s } else if k == j { -s } else { 0 }).collect()
        }
    }
}

pub fn torus_profile(ctx: &GroupContext, a: RootId, t: Elem) -> Result<TorusProfile, AutoError> {
    let ring = &ctx.ring;
    let rs = ctx.rs();
    let h = ctx.h_gen(a, t)?.matrix;
    let exponents = weight_pairings(ctx, a);
    let entries = h.diagonal();
    let matches_exponents = h.is_diagonal()
        && exponents.iter().zip(&entries).all(|(&e, &x)| ring.pow(t, e) == Some(x));
    let g2_short = rs.ty.kind == CartanType::G && !rs.is_long(a);
    let bound = if g2_short { 3 } else { 2 };
    let max_exponent = exponents.iter().map(|e| e.abs()).max().unwrap_or(0);
    Ok(TorusProfile { root: a, t, exponents, entries, matches_exponents, support_ok: max_exponent <= bound, max_exponent })
}

/// The multisets `{t^e}` and `{rho(t)^e}` for `e` in `{0, +-1, +-2}` (and
/// `+-3` when `cubes`) coincide.
pub fn ring_permutation_check(ring: &LocalRing, rho: &RingMorphism, t: Elem, cubes: bool) -> bool {
    let exps: &[i64] = if cubes { &[0, 1, -1, 2, -2, 3, -3] } else { &[0, 1, -1, 2, -2] };
    let set = |x: Elem| {
        let mut v: Vec<Elem> = exps.iter().map(|&e| ring.pow(x, e).expect("t is a unit")).collect();
        v.sort_unstable();
        v
    };
    set(t) == set(rho.apply(t))
}

/// `prod (X - e)` over the entries, coefficients from `X^n` down.
pub fn poly_from_roots(entries: &[Elem], ring: &LocalRing) -> Vec<Elem> {
    let mut p = vec![ring.one()];
    for &e in entries {
        let mut next = vec![ring.zero(); p.len() + 1];
        for (i, &c) in p.iter().enumerate() {
            next[i] = ring.add(next[i], c);
            next[i + 1] = ring.sub(next[i + 1], ring.mul(c, e));
        }
        p = next;
    }
    p
}

/// One generator-wise comparison of `i_t` against the diagonal factor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagonalCheck {
    pub root: RootId,
    pub t: Elem,
    pub expected: Elem,
    pub agrees: bool,
}

#[derive(Clone, Debug)]
pub struct DiagonalToInner {
    pub element: GroupElement,
    pub checks: Vec<DiagonalCheck>,
}

impl DiagonalToInner {
    pub fn all_agree(&self) -> bool {
        self.checks.iter().all(|c| c.agrees)
    }
}

/// The torus element `t_1` with `chi(a_i) = d_i`; conjugation by it is
/// compared with the diagonal factor on `x_a(t)` for every positive root and
/// every supplied `t`.
pub fn diagonal_to_inner(ctx: &GroupContext, d: &[Elem], params: &[Elem]) -> Result<DiagonalToInner, AutoError> {
    let f = Factor::Diagonal(d.to_vec());
    f.validate(ctx)?;
    let element = ctx.torus_element(d)?;
    let inv = ctx.inv(&element)?;
    let ring = &ctx.ring;
    let jobs: Vec<(RootId, Elem)> =
        (0..ctx.rs().num_positive()).flat_map(|r| params.iter().map(move |&t| (r, t))).collect();
    let checks = par::map(jobs, |(root, t)| {
        let x = ctx.x_gen(root, t);
        let conj = element.matrix.mul(&x.matrix, ring).mul(&inv.matrix, ring);
        let image = apply_factor(ctx, &f, &x).expect("validated diagonal factor");
        let expected = ring.mul(root_character(ctx, d, root), t);
        let agrees = conj == image.matrix && image.matrix == ctx.x_matrix(root, expected);
        DiagonalCheck { root, t, expected, agrees }
    });
    Ok(DiagonalToInner { element, checks })
}

/// Parameters to test: the whole ring when small, otherwise `0`, `1`, the
/// ring generators and seeded random elements.
pub fn sample_params(ring: &LocalRing, cap: usize, seed: u64) -> Vec<Elem> {
    if ring.order() as usize <= cap {
        return ring.elements().collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = vec![ring.zero(), ring.one()];
    out.extend(ring.generators());
    while out.len() < cap {
        let x = ring.random(&mut rng);
        if !out.contains(&x) {
            out.push(x);
        }
    }
    out
}

/// The proof's witness `g` for a nontrivial graph automorphism.
pub fn graph_witness(rs: &RootSystem, delta: &DiagramAutomorphism) -> Result<GroupWord, AutoError> {
    let l = rs.rank();
    let none = || AutoError::NoNontrivialGraph(rs.ty.to_string());
    if delta.is_identity() {
        return Err(none());
    }
    let count = match rs.ty.kind {
        CartanType::A => l - 1,
        CartanType::D => l - 1,
        CartanType::E if l == 6 => 5,
        _ => return Err(none()),
    };
    Ok((0..count).map(|i| Letter::X { root: i, t: Elem(1) }).collect())
}

/// `x_a(t)` for every root and every additive generator `t`.
pub fn elementary_generators(ctx: &GroupContext) -> Vec<GroupElement> {
    let adds = ctx.ring.additive_generators();
    (0..ctx.rs().num_roots()).flat_map(|r| adds.iter().map(move |&t| (r, t))).map(|(r, t)| ctx.x_gen(r, t)).collect()
}

/// Adjoint torus elements `chi = (1, .., u, .., 1)` for unit-group generators
/// `u`; empty in the natural model.
pub fn torus_generators(ctx: &GroupContext) -> Result<Vec<GroupElement>, AutoError> {
    if ctx.rep != Representation::Adjoint {
        return Ok(Vec::new());
    }
    let ring = &ctx.ring;
    let l = ctx.rs().rank();
    let mut out = Vec::new();
    for i in 0..l {
        for &u in &ring.unit_group_generators() {
            let mut chi = vec![ring.one(); l];
            chi[i] = u;
            out.push(ctx.torus_element(&chi)?);
        }
    }
    Ok(out)
}

/// Generators of `E`, or of `G = T E` when `with_torus`.
pub fn group_generators(ctx: &GroupContext, with_torus: bool) -> Result<Vec<GroupElement>, AutoError> {
    let mut gens = elementary_generators(ctx);
    if with_torus {
        gens.extend(torus_generators(ctx)?);
    }
    Ok(gens)
}

/// Breadth-first search tree over matrices; node 0 is the root.
#[derive(Clone, Debug)]
pub struct SearchTree {
    pub elements: Vec<Matrix>,
    pub index: HashMap<Matrix, usize>,
    /// `(parent, generator)` for every non-root node.
    parent: Vec<(u32, u32)>,
    pub complete: bool,
}

impl SearchTree {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn parent(&self, i: usize) -> Option<(usize, usize)> {
        (i > 0).then(|| (self.parent[i].0 as usize, self.parent[i].1 as usize))
    }

    /// Generator indices on the path from the root, root side first.
    pub fn path(&self, mut i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while let Some((p, g)) = self.parent(i) {
            out.push(g);
            i = p;
        }
        out.reverse();
        out
    }

    /// Deterministic BFS: each level is expanded in parallel, then merged in
    /// node-then-generator order. Stops early once `target` is reached and
    /// marks the tree incomplete past `budget` nodes.
    fn grow(
        root: Matrix,
        gens: usize,
        step: impl Fn(&Matrix, usize) -> Matrix + Sync + Send,
        budget: usize,
        target: Option<&Matrix>,
    ) -> SearchTree {
        let mut tree = SearchTree { elements: vec![root.clone()], index: HashMap::new(), parent: vec![(0, 0)], complete: true };
        tree.index.insert(root, 0);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            if target.is_some_and(|t| tree.index.contains_key(t)) {
                tree.complete = false;
                return tree;
            }
            let elements = &tree.elements;
            let expanded = par::map(frontier, |i| (i, (0..gens).map(|g| step(&elements[i], g)).collect::<Vec<_>>()));
            let mut next = Vec::new();
            for (i, images) in expanded {
                for (g, m) in images.into_iter().enumerate() {
                    if tree.index.contains_key(&m) {
                        continue;
                    }
                    if tree.elements.len() >= budget {
                        tree.complete = false;
                        return tree;
                    }
                    let id = tree.elements.len();
                    tree.index.insert(m.clone(), id);
                    tree.elements.push(m);
                    tree.parent.push((i as u32, g as u32));
                    next.push(id);
                }
            }
            frontier = next;
        }
        tree
    }
}

/// `<gens>` by right multiplication from the identity, or `None` past
/// `budget` elements. The word of node `i` is the product of its path.
pub fn enumerate_group(ctx: &GroupContext, gens: &[GroupElement], budget: usize) -> Option<SearchTree> {
    let ring = &ctx.ring;
    let mats: Vec<&Matrix> = gens.iter().map(|g| &g.matrix).collect();
    let tree = SearchTree::grow(Matrix::identity(ctx.dim(), ring), gens.len(), |m, g| m.mul(mats[g], ring), budget, None);
    tree.complete.then_some(tree)
}

fn path_word(gens: &[GroupElement], path: &[usize]) -> Option<GroupWord> {
    let mut w = Vec::new();
    for &g in path {
        w.extend(gens[g].word.as_ref()?.iter().cloned());
    }
    Some(w)
}

/// Conjugation orbit of `g` under `gens` (node = `x g x^{-1}` where `x` is
/// the product of the path generators, last generator leftmost).
fn conjugation_orbit(
    ctx: &GroupContext,
    g: &Matrix,
    gens: &[(Matrix, Matrix)],
    budget: usize,
    target: Option<&Matrix>,
) -> SearchTree {
    let ring = &ctx.ring;
    SearchTree::grow(g.clone(), gens.len(), |m, k| gens[k].0.mul(m, ring).mul(&gens[k].1, ring), budget, target)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ConjugacyStatus {
    Conjugate,
    NotConjugate,
    Undecided,
}

impl ConjugacyStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            ConjugacyStatus::Conjugate => "conjugate",
            ConjugacyStatus::NotConjugate => "not_conjugate",
            ConjugacyStatus::Undecided => "undecided",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ConjugacyReport {
    pub status: ConjugacyStatus,
    /// `x` with `x g x^{-1} = g'`, verified exactly.
    pub witness: Option<GroupElement>,
    /// The full class of `g` was enumerated.
    pub exhaustive: bool,
    pub orbit_size: usize,
    pub generators: usize,
    /// Auxiliary invariant; never used to conclude non-conjugacy.
    pub char_poly_equal: bool,
}

impl ConjugacyReport {
    pub fn to_json(&self, ctx: &GroupContext) -> Value {
        json!({
            "status": self.status.as_str(),
            "witness": self.witness.as_ref().and_then(|w| w.word.as_ref()).map(|w| ctx.word_to_json(w)),
            "witness_verified": self.witness.is_some(),
            "exhaustive": self.exhaustive,
            "orbit_size": self.orbit_size,
            "generators": self.generators,
            "char_poly_equal": self.char_poly_equal,
        })
    }
}

/// Decides whether `g'` is conjugate to `g` under `<gens>` by growing the
/// conjugation orbit of `g`. Not-conjugate verdicts need the full orbit.
pub fn conjugacy_oracle(
    ctx: &GroupContext,
    g: &GroupElement,
    g2: &GroupElement,
    gens: &[GroupElement],
    budget: usize,
) -> Result<ConjugacyReport, AutoError> {
    let ring = &ctx.ring;
    let char_poly_equal = g.matrix.char_poly(ring) == g2.matrix.char_poly(ring);
    if g.matrix == g2.matrix {
        return Ok(ConjugacyReport {
            status: ConjugacyStatus::Conjugate,
            witness: Some(ctx.identity()),
            exhaustive: false,
            orbit_size: 1,
            generators: gens.len(),
            char_poly_equal,
        });
    }
    let pairs: Vec<(Matrix, Matrix)> = gens
        .iter()
        .map(|s| Ok((s.matrix.clone(), ctx.inv(s)?.matrix)))
        .collect::<Result<_, GroupError>>()?;
    let orbit = conjugation_orbit(ctx, &g.matrix, &pairs, budget, Some(&g2.matrix));
    let (status, witness) = match orbit.index.get(&g2.matrix) {
        Some(&i) => {
            let mut path = orbit.path(i);
            path.reverse();
            let mut x = GroupElement { matrix: Matrix::identity(ctx.dim(), ring), word: Some(Vec::new()) };
            for k in path {
                x = ctx.mul(&x, &gens[k])?;
            }
            let check = x.matrix.mul(&g.matrix, ring).mul(&ctx.inv(&x)?.matrix, ring);
            if check != g2.matrix {
                return Err(AutoError::Invariant("conjugacy witness failed verification".into()));
            }
            (ConjugacyStatus::Conjugate, Some(x))
        }
        None if orbit.complete => (ConjugacyStatus::NotConjugate, None),
        None => (ConjugacyStatus::Undecided, None),
    };
    let exhaustive = orbit.complete;
    Ok(ConjugacyReport { status, witness, exhaustive, orbit_size: orbit.len(), generators: gens.len(), char_poly_equal })
}

/// Class index of every element of an enumerated group; classes are
/// numbered by their smallest element index.
pub fn conjugacy_classes(ctx: &GroupContext, group: &SearchTree, gens: &[GroupElement]) -> Result<Vec<u32>, AutoError> {
    let ring = &ctx.ring;
    let pairs: Vec<(Matrix, Matrix)> =
        gens.iter().map(|s| Ok((s.matrix.clone(), ctx.inv(s)?.matrix))).collect::<Result<_, GroupError>>()?;
    // conjugation images of every element by every generator, one parallel pass
    let images: Vec<Vec<u32>> = par::map((0..group.len()).collect(), |i| {
        let m = &group.elements[i];
        pairs.iter().map(|(s, si)| group.index.get(&s.mul(m, ring).mul(si, ring)).map_or(u32::MAX, |&j| j as u32)).collect()
    });
    let mut class = vec![u32::MAX; group.len()];
    let mut next = 0u32;
    for start in 0..group.len() {
        if class[start] != u32::MAX {
            continue;
        }
        class[start] = next;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &j in &images[i] {
                if j == u32::MAX {
                    return Err(AutoError::Invariant("conjugate left the group".into()));
                }
                if class[j as usize] == u32::MAX {
                    class[j as usize] = next;
                    stack.push(j as usize);
                }
            }
        }
        next += 1;
    }
    Ok(class)
}

/// Class sizes in class-index order.
pub fn class_sizes(class: &[u32]) -> Vec<usize> {
    let n = class.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
    let mut sizes = vec![0; n];
    for &c in class {
        sizes[c as usize] += 1;
    }
    sizes
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LocalVerdict {
    LocallyInner,
    NotLocallyInner,
    NoCounterexampleFound,
}

impl LocalVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            LocalVerdict::LocallyInner => "locally_inner",
            LocalVerdict::NotLocallyInner => "not_locally_inner",
            LocalVerdict::NoCounterexampleFound => "no_counterexample_found",
        }
    }
}

#[derive(Clone, Debug)]
pub struct LocallyInnerReport {
    /// `exhaustive` or `sampled` (also when exhaustive fell back).
    pub mode: &'static str,
    pub fell_back: bool,
    pub verdict: LocalVerdict,
    pub group_order: Option<usize>,
    pub classes: Option<usize>,
    pub checked: usize,
    pub undecided: usize,
    /// `x` with `a(x)` not conjugate to `x`, and `a(x)`.
    pub witness: Option<(GroupElement, Matrix)>,
}

impl LocallyInnerReport {
    pub fn to_json(&self, ctx: &GroupContext) -> Value {
        json!({
            "mode": self.mode,
            "fell_back_to_sampling": self.fell_back,
            "verdict": self.verdict.as_str(),
            "group_order": self.group_order,
            "classes": self.classes,
            "checked": self.checked,
            "undecided": self.undecided,
            "witness": self.witness.as_ref().map(|(x, img)| json!({
                "element": x.word.as_ref().map(|w| ctx.word_to_json(w)),
                "image": img.rows(),
            })),
        })
    }
}

/// Checks `a(x) ~ x` over `<gens>`. Exhaustive mode enumerates the group,
/// propagates `a` along the search tree and compares class indices; past the
/// budget it falls back to sampling with the given seed and count.
pub fn locally_inner_test(
    ctx: &GroupContext,
    a: &StandardAutomorphism,
    mode: LocalMode,
    with_torus: bool,
    budget: usize,
    fallback: (usize, u64),
) -> Result<LocallyInnerReport, AutoError> {
    a.validate(ctx)?;
    let gens = group_generators(ctx, with_torus)?;
    let ring = &ctx.ring;
    if mode == LocalMode::Exhaustive {
        if let Some(group) = enumerate_group(ctx, &gens, budget) {
            let class = conjugacy_classes(ctx, &group, &gens)?;
            let gen_images: Vec<Matrix> =
                gens.iter().map(|s| a.apply(ctx, s).map(|e| e.matrix)).collect::<Result<_, _>>()?;
            let mut images = vec![Matrix::identity(ctx.dim(), ring)];
            for i in 1..group.len() {
                let (p, g) = group.parent(i).expect("non-root");
                images.push(images[p].mul(&gen_images[g], ring));
            }
            let ids: Vec<usize> = (0..group.len()).collect();
            let bad = par::find_first(&ids, |&i| match group.index.get(&images[i]) {
                Some(&j) if class[j] == class[i] => None,
                _ => Some(i),
            });
            let witness = match bad {
                Some((_, i)) => {
                    let word = path_word(&gens, &group.path(i));
                    Some((GroupElement { matrix: group.elements[i].clone(), word }, images[i].clone()))
                }
                None => None,
            };
            return Ok(LocallyInnerReport {
                mode: "exhaustive",
                fell_back: false,
                verdict: if witness.is_some() { LocalVerdict::NotLocallyInner } else { LocalVerdict::LocallyInner },
                group_order: Some(group.len()),
                classes: Some(class_sizes(&class).len()),
                checked: group.len(),
                undecided: 0,
                witness,
            });
        }
    }
    let (samples, seed, fell_back) = match mode {
        LocalMode::Sampled { samples, seed } => (samples, seed, false),
        LocalMode::Exhaustive => (fallback.0, fallback.1, true),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut undecided = 0;
    let mut witness = None;
    let mut checked = 0;
    for _ in 0..samples {
        let x = ctx.element(ctx.random_word(&mut rng, 6, with_torus))?;
        let img = a.apply(ctx, &x)?;
        checked += 1;
        let rep = conjugacy_oracle(ctx, &x, &img, &gens, budget)?;
        match rep.status {
            ConjugacyStatus::Conjugate => {}
            ConjugacyStatus::Undecided => undecided += 1,
            ConjugacyStatus::NotConjugate => {
                witness = Some((x, img.matrix));
                break;
            }
        }
    }
    Ok(LocallyInnerReport {
        mode: "sampled",
        fell_back,
        verdict: if witness.is_some() { LocalVerdict::NotLocallyInner } else { LocalVerdict::NoCounterexampleFound },
        group_order: None,
        classes: None,
        checked,
        undecided,
        witness,
    })
}

/// A random single factor for property tests. Inner factors are short
/// random words; graph factors are drawn from the diagram automorphisms;
/// ring factors from the automorphism list; central factors are trivial.
pub fn random_factor<R: rand::Rng + ?Sized>(ctx: &GroupContext, rng: &mut R) -> Result<Factor, AutoError> {
    let ring = &ctx.ring;
    Ok(match rng.gen_range(0..5) {
        0 => Factor::Inner(ctx.element(ctx.random_word(rng, 3, false))?),
        1 => Factor::Diagonal((0..ctx.rs().rank()).map(|_| ring.random_unit(rng)).collect()),
        2 => {
            let auts = ctx.rs().diagram_automorphisms();
            Factor::Graph(auts[rng.gen_range(0..auts.len())].clone())
        }
        3 => {
            let auts = ring.automorphisms();
            Factor::Ring(auts[rng.gen_range(0..auts.len())].clone())
        }
        _ => {
            let list = if ctx.rep == Representation::Adjoint {
                vec![CentralAssignment {
                    coset_rep: (0..ctx.rs().rank()).map(|_| ring.random_unit(rng)).collect(),
                    z: Matrix::identity(ctx.dim(), ring),
                }]
            } else {
                Vec::new()
            };
            Factor::Central(list)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::LieTables;
    use crate::rings::RingDescriptor;
    use crate::roots::RootType;
    use rand::Rng;

    fn ctx(ty: &str, ring: &str, rep: Representation) -> GroupContext {
        let t = LieTables::build(ty.parse::<RootType>().unwrap()).unwrap();
        let r = LocalRing::build(&RingDescriptor::parse(ring).unwrap()).unwrap();
        GroupContext::unrestricted(t, r, rep).unwrap()
    }

    #[test]
    fn graph_signs_exist_for_all_diagram_automorphisms() {
        for ty in ["A2", "A3", "A4", "D4", "D5", "E6"] {
            let t = LieTables::build(ty.parse::<RootType>().unwrap()).unwrap();
            for delta in t.rs.diagram_automorphisms() {
                graph_signs(t.cb(), &delta).unwrap();
            }
        }
    }

    #[test]
    fn letter_action_matches_matrix_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (ty, ring) in [("A3", "Z9"), ("D4", "GF4"), ("A2", "GF8"), ("B2", "Z25"), ("E6", "Z5")] {
            let c = ctx(ty, ring, Representation::Adjoint);
            for _ in 0..12 {
                let f = random_factor(&c, &mut rng).unwrap();
                let g = c.element(c.random_word(&mut rng, 5, true)).unwrap();
                let img = apply_factor(&c, &f, &g).unwrap();
                if let Some(m) = apply_factor_matrix(&c, &f, &g.matrix).unwrap() {
                    assert_eq!(img.matrix, m, "{ty}/{ring} {}", f.kind());
                }
            }
        }
    }

    #[test]
    fn standard_form_agrees_with_factor_list() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (ty, ring, rep) in [
            ("A2", "GF4", Representation::NaturalA),
            ("A3", "GF3[t]/(t^2)", Representation::Adjoint),
            ("D4", "GF8", Representation::Adjoint),
        ] {
            let c = ctx(ty, ring, rep);
            for _ in 0..6 {
                let n = rng.gen_range(1..6);
                let a = StandardAutomorphism::new((0..n).map(|_| random_factor(&c, &mut rng).unwrap()).collect());
                let sf = a.standard_form(&c).unwrap().automorphism();
                for _ in 0..5 {
                    let g = c.element(c.random_word(&mut rng, 4, true)).unwrap();
                    assert_eq!(a.apply(&c, &g).unwrap().matrix, sf.apply(&c, &g).unwrap().matrix, "{ty}/{ring}");
                }
            }
        }
    }

    #[test]
    fn graph_on_a2_swaps_simple_roots() {
        let c = ctx("A2", "Z9", Representation::NaturalA);
        let delta = c.rs().diagram_automorphisms().into_iter().find(|d| !d.is_identity()).unwrap();
        let img = apply_factor(&c, &Factor::Graph(delta), &c.x_gen(0, Elem(5))).unwrap();
        assert_eq!(img.word.unwrap(), vec![Letter::X { root: 1, t: Elem(5) }]);
    }

    #[test]
    fn diagonal_to_inner_on_a2_z9() {
        let c = ctx("A2", "Z9", Representation::Adjoint);
        let r = diagonal_to_inner(&c, &[Elem(2), Elem(4)], &[Elem(1)]).unwrap();
        assert!(r.all_agree());
        let top = c.rs().find(&[1, 1]).unwrap();
        assert_eq!(r.checks.iter().find(|k| k.root == 0).unwrap().expected, Elem(2));
        assert_eq!(r.checks.iter().find(|k| k.root == top).unwrap().expected, Elem(8));
    }

    #[test]
    fn torus_profiles() {
        let c = ctx("A1", "Z25", Representation::Adjoint);
        let p = torus_profile(&c, 0, Elem(2)).unwrap();
        assert_eq!(p.sorted_exponents(), vec![2, 0, -2]);
        let c = ctx("A2", "Z9", Representation::Adjoint);
        let p = torus_profile(&c, 0, Elem(2)).unwrap();
        assert_eq!(p.sorted_exponents(), vec![2, 1, 1, 0, 0, -1, -1, -2]);
        assert!(p.matches_exponents && p.support_ok);
        let c = ctx("G2", "Z25", Representation::Adjoint);
        let short = (0..c.rs().num_roots()).find(|&r| !c.rs().is_long(r)).unwrap();
        assert_eq!(torus_profile(&c, short, Elem(2)).unwrap().max_exponent, 3);
    }

    #[test]
    fn permutation_check_examples() {
        let r = LocalRing::build(&RingDescriptor::parse("GF4").unwrap()).unwrap();
        let f = RingMorphism::frobenius(&r);
        let t = r.unit_generator().unwrap();
        assert!(ring_permutation_check(&r, &f, t, false));
        assert!(ring_permutation_check(&r, &RingMorphism::identity(&r), t, true));
    }

    #[test]
    fn sl3_f2_conjugacy() {
        let c = ctx("A2", "F2", Representation::NaturalA);
        let gens = elementary_generators(&c);
        let g = enumerate_group(&c, &gens, 1000).unwrap();
        assert_eq!(g.len(), 168);
        let classes = conjugacy_classes(&c, &g, &gens).unwrap();
        let mut sizes = class_sizes(&classes);
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 21, 24, 24, 42, 56]);
        let rep = conjugacy_oracle(&c, &c.x_gen(0, Elem(1)), &c.x_gen(1, Elem(1)), &gens, 1000).unwrap();
        assert_eq!(rep.status, ConjugacyStatus::Conjugate);
    }
}
