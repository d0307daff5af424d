//! Brute-force class-preserving automorphisms of explicitly given finite
//! groups: classes, Aut, Inn, Aut_c, Out_c and the rigidity verdict.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Deserialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::par;

/// Hard cap on the order of any ingested group.
pub const ORDER_CAP: usize = 100_000;
/// Cap on the order for automorphism and endomorphism searches.
pub const AUT_CAP: usize = 2_000;

#[derive(Debug, Error)]
pub enum ShaError {
    #[error("group of order {order} exceeds the cap {cap}")]
    TooLarge { order: usize, cap: usize },
    #[error("malformed group: {0}")]
    Malformed(String),
    #[error("search budget of {0} candidate maps exhausted")]
    Budget(usize),
}

pub type El = u32;

enum Mult {
    Table(Vec<El>),
    Perm { index: HashMap<Vec<u32>, El> },
}

/// Elements are `0..order`; the identity is element 0.
pub struct FiniteGroup {
    n: usize,
    mult: Mult,
    /// Permutation images (0-based) when built from permutations.
    perms: Option<Vec<Vec<u32>>>,
    /// Index base used for labels when built from a Cayley table.
    base: usize,
    relabel: Vec<usize>,
    inverse: Vec<El>,
    order: Vec<u32>,
    gens: Vec<El>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Fixture {
    Perm { perm_gens: Vec<Vec<usize>> },
    Cayley { cayley: Vec<Vec<usize>> },
}

fn compose(a: &[u32], b: &[u32]) -> Vec<u32> {
    // left to right: apply a, then b
    a.iter().map(|&x| b[x as usize]).collect()
}

impl FiniteGroup {
    pub fn from_json(v: &Value) -> Result<Self, ShaError> {
        match Fixture::deserialize(v).map_err(|e| ShaError::Malformed(e.to_string()))? {
            Fixture::Perm { perm_gens } => Self::from_perm_gens(&perm_gens),
            Fixture::Cayley { cayley } => Self::from_cayley(&cayley),
        }
    }

    /// Permutations given as 1-based image lists; shorter ones are padded
    /// with fixed points.
    pub fn from_perm_gens(gens: &[Vec<usize>]) -> Result<Self, ShaError> {
        let degree = gens.iter().map(Vec::len).max().unwrap_or(1).max(1);
        let mut pg = Vec::new();
        for (k, g) in gens.iter().enumerate() {
            let mut p: Vec<u32> = (0..degree as u32).collect();
            let mut seen = vec![false; degree];
            for (i, &x) in g.iter().enumerate() {
                if x == 0 || x > g.len() || seen[x - 1] {
                    return Err(ShaError::Malformed(format!("generator {} is not a permutation of 1..{}", k + 1, g.len())));
                }
                seen[x - 1] = true;
                p[i] = (x - 1) as u32;
            }
            pg.push(p);
        }
        let id: Vec<u32> = (0..degree as u32).collect();
        let mut elems = vec![id.clone()];
        let mut index = HashMap::from([(id, 0 as El)]);
        let mut head = 0;
        while head < elems.len() {
            for g in &pg {
                let y = compose(&elems[head], g);
                if !index.contains_key(&y) {
                    if elems.len() == ORDER_CAP {
                        return Err(ShaError::TooLarge { order: ORDER_CAP + 1, cap: ORDER_CAP });
                    }
                    index.insert(y.clone(), elems.len() as El);
                    elems.push(y);
                }
            }
            head += 1;
        }
        let n = elems.len();
        let gens: Vec<El> = pg.iter().map(|p| index[p]).filter(|&g| g != 0).collect();
        let mut inverse = vec![0; n];
        for (i, p) in elems.iter().enumerate() {
            let mut q = vec![0u32; degree];
            for (a, &b) in p.iter().enumerate() {
                q[b as usize] = a as u32;
            }
            inverse[i] = index[&q];
        }
        let mult = if n <= AUT_CAP {
            let mut t = vec![0; n * n];
            for a in 0..n {
                for b in 0..n {
                    t[a * n + b] = index[&compose(&elems[a], &elems[b])];
                }
            }
            Mult::Table(t)
        } else {
            Mult::Perm { index }
        };
        let mut g = FiniteGroup { n, mult, perms: Some(elems), base: 1, relabel: Vec::new(), inverse, order: Vec::new(), gens };
        g.finish();
        Ok(g)
    }

    /// A full multiplication table, 0- or 1-based (detected from the entries).
    pub fn from_cayley(rows: &[Vec<usize>]) -> Result<Self, ShaError> {
        let n = rows.len();
        if n == 0 {
            return Err(ShaError::Malformed("empty Cayley table".into()));
        }
        if n > ORDER_CAP {
            return Err(ShaError::TooLarge { order: n, cap: ORDER_CAP });
        }
        if let Some(r) = rows.iter().position(|r| r.len() != n) {
            return Err(ShaError::Malformed(format!("row {} has {} entries, expected {n}", r + 1, rows[r].len())));
        }
        let min = rows.iter().flatten().min().copied().unwrap_or(0);
        let base = usize::from(min >= 1);
        let mut raw = vec![0 as El; n * n];
        for (a, r) in rows.iter().enumerate() {
            for (b, &x) in r.iter().enumerate() {
                if x < base || x - base >= n {
                    return Err(ShaError::Malformed(format!("entry {x} out of range (closure)")));
                }
                raw[a * n + b] = (x - base) as El;
            }
        }
        let e = (0..n)
            .find(|&e| (0..n).all(|x| raw[e * n + x] as usize == x && raw[x * n + e] as usize == x))
            .ok_or_else(|| ShaError::Malformed("no identity element".into()))?;
        // relabel so the identity is element 0
        let mut relabel: Vec<usize> = (0..n).collect();
        relabel.swap(0, e);
        let mut pos = vec![0usize; n];
        for (new, &old) in relabel.iter().enumerate() {
            pos[old] = new;
        }
        let mut t = vec![0 as El; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = pos[raw[relabel[a] * n + relabel[b]] as usize] as El;
            }
        }
        let mut inverse = vec![0; n];
        for a in 0..n {
            let b = (0..n)
                .find(|&b| t[a * n + b] == 0 && t[b * n + a] == 0)
                .ok_or_else(|| ShaError::Malformed(format!("element {} has no inverse", relabel[a] + base)))?;
            inverse[a] = b as El;
        }
        let mut g = FiniteGroup { n, mult: Mult::Table(t), perms: None, base, relabel, inverse, order: Vec::new(), gens: Vec::new() };
        g.gens = g.greedy_generators();
        // Light's test over the generators
        for &c in &g.gens {
            for x in 0..n as El {
                let xc = g.mul(x, c);
                for y in 0..n as El {
                    if g.mul(xc, y) != g.mul(x, g.mul(c, y)) {
                        return Err(ShaError::Malformed("multiplication is not associative".into()));
                    }
                }
            }
        }
        g.finish();
        Ok(g)
    }

    fn finish(&mut self) {
        self.order = (0..self.n as El).map(|x| self.compute_order(x)).collect();
        if self.perms.is_some() && self.n <= AUT_CAP {
            self.gens = self.greedy_generators();
        }
    }

    fn compute_order(&self, x: El) -> u32 {
        let (mut y, mut k) = (x, 1);
        while y != 0 && k <= self.n as u32 {
            y = self.mul(y, x);
            k += 1;
        }
        k
    }

    /// Elements of decreasing order not yet in the span, until everything is.
    fn greedy_generators(&self) -> Vec<El> {
        let ord: Vec<u32> = if self.order.is_empty() {
            (0..self.n as El).map(|x| self.compute_order(x)).collect()
        } else {
            self.order.clone()
        };
        let mut cand: Vec<El> = (1..self.n as El).collect();
        cand.sort_by_key(|&x| (std::cmp::Reverse(ord[x as usize]), x));
        let mut gens = Vec::new();
        let mut span = self.span(&gens);
        for x in cand {
            if span.len() == self.n {
                break;
            }
            if !span.contains_key(&x) {
                gens.push(x);
                span = self.span(&gens);
            }
        }
        gens
    }

    /// BFS spanning tree of the subgroup generated by `gens`: element ->
    /// (parent, generator index) in discovery order.
    fn span(&self, gens: &[El]) -> HashMap<El, Option<(El, usize)>> {
        let mut seen = HashMap::from([(0 as El, None)]);
        let mut queue = VecDeque::from([0 as El]);
        while let Some(x) = queue.pop_front() {
            for (j, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(y) {
                    e.insert(Some((x, j)));
                    queue.push_back(y);
                }
            }
        }
        seen
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn generators(&self) -> &[El] {
        &self.gens
    }

    pub fn element_order(&self, x: El) -> u32 {
        self.order[x as usize]
    }

    pub fn inv(&self, x: El) -> El {
        self.inverse[x as usize]
    }

    pub fn mul(&self, a: El, b: El) -> El {
        match &self.mult {
            Mult::Table(t) => t[a as usize * self.n + b as usize],
            Mult::Perm { index } => {
                let p = self.perms.as_ref().expect("permutation data");
                index[&compose(&p[a as usize], &p[b as usize])]
            }
        }
    }

    /// `g x g^-1`.
    pub fn conj(&self, g: El, x: El) -> El {
        self.mul(self.mul(g, x), self.inv(g))
    }

    /// Human label: a 1-based permutation or the input table index.
    pub fn label(&self, x: El) -> Value {
        match &self.perms {
            Some(p) => json!(p[x as usize].iter().map(|&i| i + 1).collect::<Vec<_>>()),
            None => json!(self.relabel[x as usize] + self.base),
        }
    }

    /// Class id per element; ids ordered by smallest member.
    pub fn conjugacy_classes(&self) -> Vec<u32> {
        const NONE: u32 = u32::MAX;
        let mut class = vec![NONE; self.n];
        let mut next = 0;
        for x in 0..self.n {
            if class[x] != NONE {
                continue;
            }
            class[x] = next;
            let mut stack = vec![x as El];
            while let Some(y) = stack.pop() {
                for &g in &self.gens {
                    let z = self.conj(g, y);
                    if class[z as usize] == NONE {
                        class[z as usize] = next;
                        stack.push(z);
                    }
                }
            }
            next += 1;
        }
        class
    }

    pub fn center(&self) -> Vec<El> {
        (0..self.n as El).filter(|&x| self.gens.iter().all(|&g| self.mul(x, g) == self.mul(g, x))).collect()
    }

    /// Extends generator images to a total map, or `None` when the images
    /// do not respect the relations among `gens`.
    fn extend(&self, gens: &[El], imgs: &[El]) -> Option<HashMap<El, El>> {
        let mut map = HashMap::from([(0 as El, 0 as El)]);
        let mut queue = VecDeque::from([0 as El]);
        while let Some(x) = queue.pop_front() {
            let fx = map[&x];
            for (j, &g) in gens.iter().enumerate() {
                let y = self.mul(x, g);
                let fy = self.mul(fx, imgs[j]);
                match map.get(&y) {
                    Some(&v) if v != fy => return None,
                    Some(_) => {}
                    None => {
                        map.insert(y, fy);
                        queue.push_back(y);
                    }
                }
            }
        }
        Some(map)
    }

    fn morphism(&self, imgs: &[El]) -> Option<Morphism> {
        let map = self.extend(&self.gens, imgs)?;
        let images = (0..self.n as El).map(|x| map[&x]).collect();
        Some(Morphism { images })
    }

    fn check_search(&self) -> Result<(), ShaError> {
        if self.n > AUT_CAP {
            return Err(ShaError::TooLarge { order: self.n, cap: AUT_CAP });
        }
        Ok(())
    }

    /// Backtracking over generator images drawn from `cands[i]`, pruning
    /// each prefix by the relations of the subgroup it generates.
    fn backtrack(&self, cands: &[Vec<El>], budget: usize, keep: impl Fn(&Morphism) -> bool + Sync + Send) -> Result<Vec<Morphism>, ShaError> {
        let k = self.gens.len();
        if k == 0 {
            return Ok(vec![Morphism { images: vec![0] }]);
        }
        let counter = std::sync::atomic::AtomicUsize::new(0);
        let per_first = par::flat_map(0..cands[0].len(), |i| {
            let mut out = Vec::new();
            let mut imgs = vec![cands[0][i]];
            self.dfs(cands, &mut imgs, &mut out, &keep, &counter, budget);
            out
        });
        if counter.load(std::sync::atomic::Ordering::Relaxed) > budget {
            return Err(ShaError::Budget(budget));
        }
        let mut found = per_first;
        found.sort_by(|a, b| a.images.cmp(&b.images));
        Ok(found)
    }

    fn dfs(
        &self,
        cands: &[Vec<El>],
        imgs: &mut Vec<El>,
        out: &mut Vec<Morphism>,
        keep: &(impl Fn(&Morphism) -> bool + Sync),
        counter: &std::sync::atomic::AtomicUsize,
        budget: usize,
    ) {
        if counter.fetch_add(1, std::sync::atomic::Ordering::Relaxed) > budget {
            return;
        }
        let m = imgs.len();
        if self.extend(&self.gens[..m], imgs).is_none() {
            return;
        }
        if m == self.gens.len() {
            if let Some(f) = self.morphism(imgs) {
                if keep(&f) {
                    out.push(f);
                }
            }
            return;
        }
        for &y in &cands[m] {
            imgs.push(y);
            self.dfs(cands, imgs, out, keep, counter, budget);
            imgs.pop();
        }
    }

    /// All automorphisms; generator images must match element order and
    /// class size.
    pub fn automorphism_search(&self, budget: usize) -> Result<Vec<Morphism>, ShaError> {
        self.check_search()?;
        let class = self.conjugacy_classes();
        let sizes = class_sizes(&class);
        let csize = |x: El| sizes[class[x as usize] as usize];
        let cands: Vec<Vec<El>> = self
            .gens
            .iter()
            .map(|&g| (0..self.n as El).filter(|&y| self.order[y as usize] == self.order[g as usize] && csize(y) == csize(g)).collect())
            .collect();
        self.backtrack(&cands, budget, |f| f.is_bijective())
    }

    /// Class-preserving endomorphisms, bijective or not.
    pub fn class_preserving_endomorphisms(&self, budget: usize) -> Result<Vec<Morphism>, ShaError> {
        self.check_search()?;
        let class = self.conjugacy_classes();
        let cands: Vec<Vec<El>> = self
            .gens
            .iter()
            .map(|&g| (0..self.n as El).filter(|&y| class[y as usize] == class[g as usize]).collect())
            .collect();
        self.backtrack(&cands, budget, |f| f.preserves(&class))
    }

    /// Distinct inner automorphisms, one per coset of the center.
    pub fn inner_automorphisms(&self) -> Vec<Morphism> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for g in 0..self.n as El {
            let key: Vec<El> = self.gens.iter().map(|&x| self.conj(g, x)).collect();
            if seen.insert(key) {
                out.push(Morphism { images: (0..self.n as El).map(|x| self.conj(g, x)).collect() });
            }
        }
        out
    }

    pub fn gen_images(&self, f: &Morphism) -> Vec<El> {
        self.gens.iter().map(|&g| f.images[g as usize]).collect()
    }

    pub fn morphism_json(&self, f: &Morphism) -> Value {
        json!(self
            .gens
            .iter()
            .map(|&g| json!({"generator": self.label(g), "image": self.label(f.images[g as usize])}))
            .collect::<Vec<_>>())
    }
}

pub fn class_sizes(class: &[u32]) -> Vec<usize> {
    let k = class.iter().max().map_or(0, |&m| m as usize + 1);
    let mut s = vec![0; k];
    for &c in class {
        s[c as usize] += 1;
    }
    s
}

/// A total map on elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Morphism {
    pub images: Vec<El>,
}

impl Morphism {
    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.images.len()];
        self.images.iter().all(|&y| !std::mem::replace(&mut seen[y as usize], true))
    }

    pub fn preserves(&self, class: &[u32]) -> bool {
        self.images.iter().enumerate().all(|(x, &y)| class[x] == class[y as usize])
    }

    /// `self` after `other`.
    pub fn after(&self, other: &Morphism) -> Morphism {
        Morphism { images: other.images.iter().map(|&y| self.images[y as usize]).collect() }
    }
}

#[derive(Clone, Debug)]
pub struct OutCReport {
    pub order: usize,
    pub class_sizes: Vec<usize>,
    pub center: usize,
    pub aut: usize,
    pub inn: usize,
    /// `|G| / |Z(G)|`, computed from the center.
    pub inn_from_center: usize,
    pub aut_c: usize,
    pub end_c: usize,
    pub end_c_all_injective: bool,
    /// Inn in Aut_c in Aut, Aut_c closed under inner composition, and
    /// Aut_c equal to the independently scanned End_c.
    pub invariants_ok: bool,
    /// One per coset of Inn in Aut_c; the identity first.
    pub representatives: Vec<Morphism>,
}

impl OutCReport {
    pub fn out_c(&self) -> usize {
        self.representatives.len()
    }

    pub fn sha_rigid(&self) -> bool {
        self.out_c() == 1 && self.end_c_all_injective
    }
}

pub fn out_c(g: &FiniteGroup, budget: usize) -> Result<OutCReport, ShaError> {
    let class = g.conjugacy_classes();
    let aut = g.automorphism_search(budget)?;
    let inn = g.inner_automorphisms();
    let center = g.center().len();
    let aut_c: Vec<&Morphism> = aut.iter().filter(|f| f.preserves(&class)).collect();
    let end_c = g.class_preserving_endomorphisms(budget)?;

    let key = |f: &Morphism| g.gen_images(f);
    let aut_keys: BTreeSet<Vec<El>> = aut.iter().map(key).collect();
    let aut_c_keys: BTreeSet<Vec<El>> = aut_c.iter().map(|f| key(f)).collect();
    let end_c_keys: BTreeSet<Vec<El>> = end_c.iter().map(key).collect();
    let inn_keys: BTreeSet<Vec<El>> = inn.iter().map(key).collect();
    let closed = aut_c.iter().all(|a| inn.iter().all(|c| aut_c_keys.contains(&key(&a.after(c)))));
    let invariants_ok = inn_keys.is_subset(&aut_c_keys) && aut_c_keys.is_subset(&aut_keys) && closed && aut_c_keys == end_c_keys;

    let mut covered = BTreeSet::new();
    let mut representatives = Vec::new();
    let id = Morphism { images: (0..g.order() as El).collect() };
    let ordered = std::iter::once(&id).chain(aut_c.iter().copied());
    for a in ordered {
        if covered.contains(&key(a)) {
            continue;
        }
        for c in &inn {
            covered.insert(key(&a.after(c)));
        }
        representatives.push(a.clone());
    }
    Ok(OutCReport {
        order: g.order(),
        class_sizes: class_sizes(&class),
        center,
        aut: aut.len(),
        inn: inn.len(),
        inn_from_center: g.order() / center,
        aut_c: aut_c.len(),
        end_c: end_c.len(),
        end_c_all_injective: end_c.iter().all(Morphism::is_bijective),
        invariants_ok,
        representatives,
    })
}

/// Verdict plus certificate: the Out_c coset representatives and, when not
/// rigid, a class-preserving outer witness.
pub fn sha_rigid(g: &FiniteGroup, budget: usize) -> Result<(bool, Value), ShaError> {
    let r = out_c(g, budget)?;
    let rigid = r.sha_rigid();
    Ok((rigid, report_json(g, &r)))
}

pub fn report_json(g: &FiniteGroup, r: &OutCReport) -> Value {
    json!({
        "order": r.order,
        "generators": g.generators().iter().map(|&x| g.label(x)).collect::<Vec<_>>(),
        "class_sizes": r.class_sizes,
        "center": r.center,
        "aut": r.aut,
        "inn": r.inn,
        "inn_from_center": r.inn_from_center,
        "aut_c": r.aut_c,
        "end_c": r.end_c,
        "end_c_all_injective": r.end_c_all_injective,
        "out_c": r.out_c(),
        "invariants_ok": r.invariants_ok && r.inn == r.inn_from_center,
        "sha_rigid": r.sha_rigid(),
        "out_c_representatives": r.representatives.iter().map(|f| g.morphism_json(f)).collect::<Vec<_>>(),
        "witness": r.representatives.get(1).map(|f| g.morphism_json(f)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> FiniteGroup {
        FiniteGroup::from_perm_gens(&[vec![2, 1, 3], vec![2, 3, 1]]).unwrap()
    }

    #[test]
    fn s3_classes_and_automorphisms() {
        let g = s3();
        assert_eq!(g.order(), 6);
        let mut s = class_sizes(&g.conjugacy_classes());
        s.sort();
        assert_eq!(s, vec![1, 2, 3]);
        let aut = g.automorphism_search(1 << 20).unwrap();
        assert_eq!(aut.len(), 6);
        assert_eq!(g.inner_automorphisms().len(), 6);
    }

    #[test]
    fn cyclic_five() {
        let g = FiniteGroup::from_perm_gens(&[vec![2, 3, 4, 5, 1]]).unwrap();
        assert_eq!(g.automorphism_search(1 << 20).unwrap().len(), 4);
        let r = out_c(&g, 1 << 20).unwrap();
        assert_eq!(r.aut_c, 1);
        assert!(r.sha_rigid());
    }

    #[test]
    fn cayley_relabels_identity_and_rejects_garbage() {
        // Z/3 with identity written as 2 (1-based)
        let t = vec![vec![3, 1, 2], vec![1, 2, 3], vec![2, 3, 1]];
        let g = FiniteGroup::from_cayley(&t).unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.label(0), json!(2));
        assert!(FiniteGroup::from_cayley(&[vec![0, 1], vec![0, 1]]).is_err());
        assert!(FiniteGroup::from_cayley(&[vec![0, 5], vec![1, 0]]).is_err());
        let nonassoc = vec![vec![0, 1, 2], vec![1, 0, 1], vec![2, 2, 0]];
        assert!(FiniteGroup::from_cayley(&nonassoc).is_err());
    }

    #[test]
    fn bad_permutation_rejected() {
        assert!(FiniteGroup::from_perm_gens(&[vec![1, 1, 2]]).is_err());
    }
}
