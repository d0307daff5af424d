//! Reduced irreducible root systems, Weyl groups and diagram automorphisms.
//!
//! Roots are integer coefficient vectors over the simple roots (Bourbaki
//! numbering). Positive roots are indexed `0..m` in height order, ties broken
//! so that larger leading coefficients come first; in particular the simple
//! roots are `0..rank` in their natural order. Index `m + i` is `-root(i)`.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on Weyl group enumeration.
pub const MAX_WEYL_ORDER: u64 = 1_000_000;

pub type RootId = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RootError {
    #[error("invalid root system type `{0}`")]
    InvalidType(String),
    #[error("Weyl group of order {order} exceeds the cap {cap}")]
    TooLarge { order: u64, cap: u64 },
    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CartanType {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
}

/// A root-system label such as `A3` or `G2`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RootType {
    pub kind: CartanType,
    pub rank: usize,
}

impl RootType {
    pub fn new(kind: CartanType, rank: usize) -> Result<Self, RootError> {
        let ok = match kind {
            CartanType::A => rank >= 1,
            CartanType::B | CartanType::C => rank >= 2,
            CartanType::D => rank >= 4,
            CartanType::E => (6..=8).contains(&rank),
            CartanType::F => rank == 4,
            CartanType::G => rank == 2,
        };
        if !ok {
            return Err(RootError::InvalidType(format!("{kind:?}{rank}")));
        }
        Ok(RootType { kind, rank })
    }
}

impl fmt::Display for RootType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}{}", self.kind, self.rank)
    }
}

impl FromStr for RootType {
    type Err = RootError;
    fn from_str(s: &str) -> Result<Self, RootError> {
        let s = s.trim();
        let bad = || RootError::InvalidType(s.to_string());
        let mut chars = s.chars();
        let kind = match chars.next().map(|c| c.to_ascii_uppercase()) {
            Some('A') => CartanType::A,
            Some('B') => CartanType::B,
            Some('C') => CartanType::C,
            Some('D') => CartanType::D,
            Some('E') => CartanType::E,
            Some('F') => CartanType::F,
            Some('G') => CartanType::G,
            _ => return Err(bad()),
        };
        let rest = chars.as_str().trim_start_matches('_');
        let rank = rest.parse().map_err(|_| bad())?;
        RootType::new(kind, rank)
    }
}

/// Symmetric Gram matrix `(alpha_i, alpha_j)` scaled so short roots have norm 2.
fn gram_matrix(t: RootType) -> Vec<Vec<i64>> {
    let l = t.rank;
    let mut g = vec![vec![0i64; l]; l];
    let link = |g: &mut Vec<Vec<i64>>, i: usize, j: usize, v: i64| {
        g[i][j] = v;
        g[j][i] = v;
    };
    match t.kind {
        CartanType::A => {
            for i in 0..l {
                g[i][i] = 2;
                if i + 1 < l {
                    link(&mut g, i, i + 1, -1);
                }
            }
        }
        CartanType::B => {
            for i in 0..l {
                g[i][i] = if i + 1 == l { 2 } else { 4 };
                if i + 1 < l {
                    link(&mut g, i, i + 1, -2);
                }
            }
        }
        CartanType::C => {
            for i in 0..l {
                g[i][i] = if i + 1 == l { 4 } else { 2 };
                if i + 1 < l {
                    link(&mut g, i, i + 1, if i + 2 == l { -2 } else { -1 });
                }
            }
        }
        CartanType::D => {
            for i in 0..l {
                g[i][i] = 2;
            }
            for i in 0..l - 2 {
                link(&mut g, i, i + 1, -1);
            }
            link(&mut g, l - 3, l - 1, -1);
        }
        CartanType::E => {
            for i in 0..l {
                g[i][i] = 2;
            }
            // 1-3-4-5-6-7-8 with 2 attached to 4.
            link(&mut g, 0, 2, -1);
            link(&mut g, 1, 3, -1);
            for i in 2..l - 1 {
                link(&mut g, i, i + 1, -1);
            }
        }
        CartanType::F => {
            g[0][0] = 4;
            g[1][1] = 4;
            g[2][2] = 2;
            g[3][3] = 2;
            link(&mut g, 0, 1, -2);
            link(&mut g, 1, 2, -2);
            link(&mut g, 2, 3, -1);
        }
        CartanType::G => {
            g[0][0] = 2;
            g[1][1] = 6;
            link(&mut g, 0, 1, -3);
        }
    }
    g
}

#[derive(Clone, Debug)]
pub struct RootSystem {
    pub ty: RootType,
    gram: Vec<Vec<i64>>,
    roots: Vec<Vec<i32>>,
    index: HashMap<Vec<i32>, RootId>,
    m: usize,
    /// `norms[r] = (r, r)`; simple-root pairings against all roots.
    norms: Vec<i64>,
    /// `sum[a * 2m + b]` is the index of `a + b` if it is a root.
    sum: Vec<Option<RootId>>,
}

impl RootSystem {
    pub fn build(ty: RootType) -> Self {
        let gram = gram_matrix(ty);
        let l = ty.rank;
        let inner_simple = |v: &[i32], i: usize| -> i64 { (0..l).map(|j| v[j] as i64 * gram[j][i]).sum() };
        // Closure of the simple roots under simple reflections.
        let mut seen: HashMap<Vec<i32>, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        for i in 0..l {
            let mut v = vec![0; l];
            v[i] = 1;
            seen.insert(v.clone(), ());
            queue.push_back(v);
        }
        while let Some(v) = queue.pop_front() {
            for i in 0..l {
                let c = 2 * inner_simple(&v, i) / gram[i][i];
                if c == 0 {
                    continue;
                }
                let mut w = v.clone();
                w[i] -= c as i32;
                if !seen.contains_key(&w) {
                    seen.insert(w.clone(), ());
                    queue.push_back(w);
                }
            }
        }
        let mut pos: Vec<Vec<i32>> = seen.into_keys().filter(|v| v.iter().all(|&c| c >= 0)).collect();
        pos.sort_by(|a, b| {
            let (ha, hb): (i32, i32) = (a.iter().sum(), b.iter().sum());
            ha.cmp(&hb).then_with(|| b.cmp(a))
        });
        let m = pos.len();
        let mut roots = pos.clone();
        roots.extend(pos.iter().map(|v| v.iter().map(|c| -c).collect::<Vec<_>>()));
        let index: HashMap<Vec<i32>, RootId> = roots.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
        let norms = roots
            .iter()
            .map(|v| {
                (0..l).map(|i| (0..l).map(|j| v[i] as i64 * v[j] as i64 * gram[i][j]).sum::<i64>()).sum()
            })
            .collect();
        let mut sum = vec![None; 4 * m * m];
        for a in 0..2 * m {
            for b in 0..2 * m {
                let s: Vec<i32> = roots[a].iter().zip(&roots[b]).map(|(x, y)| x + y).collect();
                sum[a * 2 * m + b] = index.get(&s).copied();
            }
        }
        RootSystem { ty, gram, roots, index, m, norms, sum }
    }

    pub fn rank(&self) -> usize {
        self.ty.rank
    }

    /// Number of positive roots.
    pub fn num_positive(&self) -> usize {
        self.m
    }

    pub fn num_roots(&self) -> usize {
        2 * self.m
    }

    pub fn root(&self, r: RootId) -> &[i32] {
        &self.roots[r]
    }

    pub fn roots(&self) -> &[Vec<i32>] {
        &self.roots
    }

    pub fn find(&self, coeffs: &[i32]) -> Option<RootId> {
        self.index.get(coeffs).copied()
    }

    pub fn is_positive(&self, r: RootId) -> bool {
        r < self.m
    }

    pub fn neg(&self, r: RootId) -> RootId {
        (r + self.m) % (2 * self.m)
    }

    pub fn height(&self, r: RootId) -> i32 {
        self.roots[r].iter().sum()
    }

    pub fn highest_root(&self) -> RootId {
        self.m - 1
    }

    /// `(r, r)` in the normalization where short roots have norm 2.
    pub fn norm(&self, r: RootId) -> i64 {
        self.norms[r]
    }

    pub fn is_long(&self, r: RootId) -> bool {
        self.norms[r] == self.norms.iter().copied().max().unwrap_or(2)
    }

    /// Symmetric form `(a, b)` on arbitrary lattice vectors.
    pub fn inner_vec(&self, a: &[i32], b: &[i32]) -> i64 {
        let l = self.rank();
        (0..l).map(|i| (0..l).map(|j| a[i] as i64 * b[j] as i64 * self.gram[i][j]).sum::<i64>()).sum()
    }

    pub fn inner(&self, a: RootId, b: RootId) -> i64 {
        self.inner_vec(&self.roots[a], &self.roots[b])
    }

    /// `<beta, alpha^vee> = 2 (beta, alpha) / (alpha, alpha)`.
    pub fn pairing(&self, beta: RootId, alpha: RootId) -> i64 {
        2 * self.inner(beta, alpha) / self.norm(alpha)
    }

    pub fn pairing_vec(&self, beta: &[i32], alpha: RootId) -> i64 {
        2 * self.inner_vec(beta, &self.roots[alpha]) / self.norm(alpha)
    }

    /// Cartan matrix entry `<alpha_i, alpha_j^vee>`.
    pub fn cartan(&self, i: usize, j: usize) -> i64 {
        2 * self.gram[i][j] / self.gram[j][j]
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        (0..self.rank()).map(|i| (0..self.rank()).map(|j| self.cartan(i, j)).collect()).collect()
    }

    pub fn add(&self, a: RootId, b: RootId) -> Option<RootId> {
        self.sum[a * 2 * self.m + b]
    }

    /// Index of `i a + j b` if it is a root.
    pub fn combo(&self, i: i32, a: RootId, j: i32, b: RootId) -> Option<RootId> {
        let v: Vec<i32> = self.roots[a].iter().zip(&self.roots[b]).map(|(x, y)| i * x + j * y).collect();
        self.find(&v)
    }

    /// `(p, q)` maximal with `beta - p alpha, ..., beta + q alpha` all roots.
    pub fn root_string(&self, alpha: RootId, beta: RootId) -> (i32, i32) {
        let (mut p, mut q) = (0, 0);
        while self.combo(1, beta, -(p + 1), alpha).is_some() {
            p += 1;
        }
        while self.combo(1, beta, q + 1, alpha).is_some() {
            q += 1;
        }
        (p, q)
    }

    /// Simple reflection `s_i` applied to a root.
    pub fn reflect(&self, i: usize, r: RootId) -> RootId {
        let c = self.pairing(r, i) as i32;
        let mut v = self.roots[r].clone();
        v[i] -= c;
        self.find(&v).expect("root systems are closed under reflections")
    }

    /// Reflection `s_alpha` for an arbitrary root.
    pub fn reflect_by(&self, alpha: RootId, r: RootId) -> RootId {
        let c = self.pairing(r, alpha) as i32;
        let v: Vec<i32> = self.roots[r].iter().zip(&self.roots[alpha]).map(|(x, a)| x - c * a).collect();
        self.find(&v).expect("root systems are closed under reflections")
    }

    /// Coefficients of the coroot `alpha^vee` over the simple coroots.
    pub fn coroot_coeffs(&self, alpha: RootId) -> Vec<i64> {
        let n = self.norm(alpha);
        (0..self.rank()).map(|i| self.roots[alpha][i] as i64 * self.gram[i][i] / n).collect()
    }

    /// Order of the Weyl group from the degrees of basic invariants.
    pub fn weyl_order_formula(&self) -> u64 {
        self.degrees().iter().product()
    }

    pub fn degrees(&self) -> Vec<u64> {
        let l = self.rank() as u64;
        match self.ty.kind {
            CartanType::A => (2..=l + 1).collect(),
            CartanType::B | CartanType::C => (1..=l).map(|i| 2 * i).collect(),
            CartanType::D => {
                let mut d: Vec<u64> = (1..l).map(|i| 2 * i).collect();
                d.push(l);
                d
            }
            CartanType::E => match l {
                6 => vec![2, 5, 6, 8, 9, 12],
                7 => vec![2, 6, 8, 10, 12, 14, 18],
                _ => vec![2, 8, 12, 14, 18, 20, 24, 30],
            },
            CartanType::F => vec![2, 6, 8, 12],
            CartanType::G => vec![2, 6],
        }
    }

    /// All permutations of the simple roots preserving the Cartan matrix.
    pub fn diagram_automorphisms(&self) -> Vec<DiagramAutomorphism> {
        let l = self.rank();
        let mut out = Vec::new();
        let mut perm: Vec<usize> = (0..l).collect();
        permutations(&mut perm, 0, &mut |p| {
            if (0..l).all(|i| (0..l).all(|j| self.cartan(p[i], p[j]) == self.cartan(i, j))) {
                out.push(DiagramAutomorphism { perm: p.to_vec() });
            }
        });
        out.sort_by(|a, b| a.perm.cmp(&b.perm));
        out
    }

    /// Image of root `r` under the linear extension of a diagram automorphism.
    pub fn apply_diagram(&self, d: &DiagramAutomorphism, r: RootId) -> RootId {
        let mut v = vec![0; self.rank()];
        for (i, &c) in self.roots[r].iter().enumerate() {
            v[d.perm[i]] += c;
        }
        self.find(&v).expect("diagram automorphisms permute roots")
    }

    pub fn weyl_group(&self) -> Result<WeylGroup, RootError> {
        WeylGroup::enumerate(self)
    }

    /// Short label of a root, e.g. `a1+a2` or `-(a1+2a2)`.
    pub fn label(&self, r: RootId) -> String {
        let pos = if self.is_positive(r) { r } else { self.neg(r) };
        let mut parts = Vec::new();
        for (i, &c) in self.roots[pos].iter().enumerate() {
            match c {
                0 => {}
                1 => parts.push(format!("a{}", i + 1)),
                _ => parts.push(format!("{c}a{}", i + 1)),
            }
        }
        let s = parts.join("+");
        if self.is_positive(r) {
            s
        } else if parts.len() == 1 {
            format!("-{s}")
        } else {
            format!("-({s})")
        }
    }
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagramAutomorphism {
    /// `perm[i]` is the index of the image of simple root `i`.
    pub perm: Vec<usize>,
}

impl DiagramAutomorphism {
    pub fn identity(rank: usize) -> Self {
        DiagramAutomorphism { perm: (0..rank).collect() }
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.perm.len()];
        for (i, &p) in self.perm.iter().enumerate() {
            inv[p] = i;
        }
        DiagramAutomorphism { perm: inv }
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &Self) -> Self {
        DiagramAutomorphism { perm: other.perm.iter().map(|&i| self.perm[i]).collect() }
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self.compose(&p);
            k += 1;
        }
        k
    }
}

/// A Weyl group element as a permutation of root indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeylElement {
    pub perm: Vec<u16>,
    /// Reduced word in simple reflections (0-based indices), from BFS.
    pub word: Vec<u8>,
    pub length: usize,
}

impl WeylElement {
    pub fn apply(&self, r: RootId) -> RootId {
        self.perm[r] as RootId
    }

    pub fn is_identity(&self) -> bool {
        self.length == 0
    }

    /// Number of positive roots sent to negative roots.
    pub fn inversions(&self, rs: &RootSystem) -> usize {
        (0..rs.num_positive()).filter(|&r| !rs.is_positive(self.apply(r))).count()
    }

    /// Reduced word with 1-based indices, e.g. `s1s2`; `e` for the identity.
    pub fn word_label(&self) -> String {
        if self.word.is_empty() {
            return "e".into();
        }
        self.word.iter().map(|i| format!("s{}", i + 1)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct WeylGroup {
    pub elements: Vec<WeylElement>,
    index: HashMap<Vec<u16>, usize>,
    rank: usize,
}

impl WeylGroup {
    /// Breadth-first closure from the identity under right multiplication by
    /// simple reflections; elements are keyed by the images of the simple
    /// roots, and BFS depth is the length.
    pub fn enumerate(rs: &RootSystem) -> Result<Self, RootError> {
        let expected = rs.weyl_order_formula();
        if expected > MAX_WEYL_ORDER {
            return Err(RootError::TooLarge { order: expected, cap: MAX_WEYL_ORDER });
        }
        let l = rs.rank();
        let n = rs.num_roots();
        let reflections: Vec<Vec<u16>> =
            (0..l).map(|i| (0..n).map(|r| rs.reflect(i, r) as u16).collect()).collect();
        let id = WeylElement { perm: (0..n as u16).collect(), word: Vec::new(), length: 0 };
        let mut elements = vec![id];
        let mut index = HashMap::new();
        index.insert(elements[0].perm[..l].to_vec(), 0);
        let mut head = 0;
        while head < elements.len() {
            for (i, s) in reflections.iter().enumerate() {
                let cur = &elements[head];
                let perm: Vec<u16> = s.iter().map(|&r| cur.perm[r as usize]).collect();
                let key = perm[..l].to_vec();
                if index.contains_key(&key) {
                    continue;
                }
                let mut word = cur.word.clone();
                word.push(i as u8);
                let length = cur.length + 1;
                index.insert(key, elements.len());
                elements.push(WeylElement { perm, word, length });
                if elements.len() as u64 > MAX_WEYL_ORDER {
                    return Err(RootError::TooLarge { order: elements.len() as u64, cap: MAX_WEYL_ORDER });
                }
            }
            head += 1;
        }
        Ok(WeylGroup { elements, index, rank: l })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn find(&self, perm: &[u16]) -> Option<usize> {
        self.index.get(&perm[..self.rank]).copied()
    }

    pub fn find_by_word(&self, rs: &RootSystem, word: &[u8]) -> usize {
        let mut perm: Vec<u16> = (0..rs.num_roots() as u16).collect();
        for &i in word {
            perm = (0..rs.num_roots()).map(|r| perm[rs.reflect(i as usize, r)]).collect();
        }
        self.find(&perm).expect("words evaluate inside W")
    }

    /// Index of `w * s_i`.
    pub fn times_simple(&self, rs: &RootSystem, w: usize, i: usize) -> usize {
        let perm = &self.elements[w].perm;
        let key: Vec<u16> = (0..self.rank).map(|j| perm[rs.reflect(i, j)]).collect();
        self.index[&key]
    }

    /// Right descent set `{ i : l(w s_i) < l(w) }`.
    pub fn descents(&self, rs: &RootSystem, w: usize) -> Vec<usize> {
        let len = self.elements[w].length;
        (0..self.rank).filter(|&i| self.elements[self.times_simple(rs, w, i)].length < len).collect()
    }

    /// Number of elements of each length.
    pub fn length_counts(&self) -> Vec<u64> {
        let max = self.elements.iter().map(|w| w.length).max().unwrap_or(0);
        let mut c = vec![0u64; max + 1];
        for w in &self.elements {
            c[w.length] += 1;
        }
        c
    }

    pub fn cell_filter_by_images(&self, rs: &RootSystem, set: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| set.iter().all(|&i| rs.is_positive(self.elements[w].apply(i))))
            .collect()
    }

    pub fn cell_filter_by_descents(&self, rs: &RootSystem, set: &[usize]) -> Vec<usize> {
        (0..self.len())
            .filter(|&w| {
                let d = self.descents(rs, w);
                set.iter().all(|i| !d.contains(i))
            })
            .collect()
    }

    /// `{ w : w(alpha_i) > 0 for i in set }` (0-based simple indices),
    /// computed by root images and by descent sets, which must agree.
    pub fn cell_filter(&self, rs: &RootSystem, set: &[usize]) -> Result<Vec<usize>, RootError> {
        let a = self.cell_filter_by_images(rs, set);
        let b = self.cell_filter_by_descents(rs, set);
        if a != b {
            return Err(RootError::Inconsistent(format!(
                "cell filter mismatch for {set:?}: {} by images, {} by descents",
                a.len(),
                b.len()
            )));
        }
        Ok(a)
    }
}
