//! Chevalley basis, adjoint representation and integral exponentials.
//!
//! Basis order of the adjoint module: positive roots by decreasing height,
//! then `h_1..h_l`, then negative roots by increasing depth. With this order
//! the level (height, 0 on the Cartan part) is non-increasing along the basis,
//! so `U` is block upper unitriangular and `V` block lower unitriangular.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::matrix::Matrix;
use crate::par;
use crate::rings::{Elem, LocalRing};
use crate::roots::{RootId, RootSystem};

/// Bumped whenever the sign convention or table layout changes.
pub const CONVENTION_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("structure constants fail {0} checks")]
    SignInconsistency(usize),
    #[error("exponential series of ad e_{root} is not integral at power {power}")]
    IntegralityFailure { root: RootId, power: u32 },
    #[error("structure-constant table has the wrong shape")]
    BadTable,
}

/// Sparse integer vector `(basis index, coefficient)`.
pub type SparseVec = Vec<(usize, i64)>;

#[derive(Clone, Debug)]
pub struct ChevalleyBasis {
    rs: Arc<RootSystem>,
    /// `n[a * 2m + b] = N_{a,b}`, zero when `a + b` is not a root.
    n: Vec<i64>,
}

impl ChevalleyBasis {
    /// Computes the signed table from extraspecial pairs and verifies it.
    pub fn build(rs: Arc<RootSystem>) -> Result<Self, LieError> {
        let cb = Self::compute(rs);
        let bad = cb.jacobi_violations().len() + cb.magnitude_violations().len();
        if bad > 0 {
            return Err(LieError::SignInconsistency(bad));
        }
        Ok(cb)
    }

    /// Wraps a raw table without verification (cache reloads, fixtures).
    pub fn from_table(rs: Arc<RootSystem>, n: Vec<i64>) -> Result<Self, LieError> {
        let k = rs.num_roots();
        if n.len() != k * k {
            return Err(LieError::BadTable);
        }
        Ok(ChevalleyBasis { rs, n })
    }

    pub fn table(&self) -> &[i64] {
        &self.n
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.rs
    }

    fn compute(rs: Arc<RootSystem>) -> Self {
        let m = rs.num_positive();
        let k = 2 * m;
        let mut cb = ChevalleyBasis { rs: Arc::clone(&rs), n: vec![0; k * k] };
        // Positive sums in height order; every constant on the right-hand
        // side of the four-root relation involves a smaller height.
        for xi in rs.rank()..m {
            let pairs: Vec<(RootId, RootId)> =
                (0..m).filter_map(|a| rs.combo(1, xi, -1, a).filter(|&b| a < b && b < m).map(|b| (a, b))).collect();
            let (g, d) = pairs[0];
            let p = rs.root_string(g, d).0 as i64;
            cb.set(g, d, p + 1);
            let n_gd = p + 1;
            let xi_norm = rs.norm(xi);
            for &(a, b) in &pairs[1..] {
                // a + b + (-g) + (-d) = 0.
                let mut acc = 0i64;
                let mut den = 1i64;
                let mut terms = Vec::new();
                if let Some(s) = rs.combo(1, b, -1, g) {
                    terms.push((cb.get(b, rs.neg(g)) * cb.get(a, rs.neg(d)), rs.norm(s)));
                }
                if let Some(s) = rs.combo(1, a, -1, g) {
                    terms.push((cb.get(rs.neg(g), a) * cb.get(b, rs.neg(d)), rs.norm(s)));
                }
                for &(_, nrm) in &terms {
                    den = lcm(den, nrm);
                }
                for (num, nrm) in terms {
                    acc += num * (den / nrm);
                }
                let value = xi_norm * acc / (den * n_gd);
                debug_assert_eq!(xi_norm * acc % (den * n_gd), 0);
                cb.set(a, b, value);
            }
        }
        let full: Vec<i64> = (0..k * k).map(|i| cb.get(i / k, i % k)).collect();
        cb.n = full;
        cb
    }

    fn set(&mut self, a: RootId, b: RootId, v: i64) {
        let k = self.rs.num_roots();
        self.n[a * k + b] = v;
        self.n[b * k + a] = -v;
    }

    /// Evaluates `N_{a,b}` from the positive-pair entries filled so far.
    fn get(&self, a: RootId, b: RootId) -> i64 {
        let rs = &self.rs;
        let k = rs.num_roots();
        let Some(s) = rs.add(a, b) else { return 0 };
        match (rs.is_positive(a), rs.is_positive(b)) {
            (true, true) => self.n[a * k + b],
            (false, false) => -self.get(rs.neg(a), rs.neg(b)),
            (false, true) => -self.get(b, a),
            (true, false) => {
                // a + b + c = 0 with c = -s: N_{a,b}/(c,c) = N_{b,c}/(a,a) = N_{c,a}/(b,b).
                let c = rs.neg(s);
                if rs.is_positive(s) {
                    -rs.norm(c) * self.get(rs.neg(b), s) / rs.norm(a)
                } else {
                    rs.norm(c) * self.get(c, a) / rs.norm(b)
                }
            }
        }
    }

    #[inline]
    pub fn n(&self, a: RootId, b: RootId) -> i64 {
        self.n[a * self.rs.num_roots() + b]
    }

    pub fn dim(&self) -> usize {
        self.rs.num_roots() + self.rs.rank()
    }

    /// Basis index of `e_r`.
    pub fn root_basis(&self, r: RootId) -> usize {
        let m = self.rs.num_positive();
        if r < m {
            m - 1 - r
        } else {
            r + self.rs.rank()
        }
    }

    /// Basis index of `h_i`.
    pub fn cartan_basis(&self, i: usize) -> usize {
        self.rs.num_positive() + i
    }

    /// Root of a basis vector, `None` on the Cartan part.
    pub fn basis_root(&self, b: usize) -> Option<RootId> {
        let (m, l) = (self.rs.num_positive(), self.rs.rank());
        if b < m {
            Some(m - 1 - b)
        } else if b < m + l {
            None
        } else {
            Some(b - l)
        }
    }

    /// Height of the weight of a basis vector.
    pub fn level(&self, b: usize) -> i32 {
        self.basis_root(b).map_or(0, |r| self.rs.height(r))
    }

    pub fn basis_label(&self, b: usize) -> String {
        match self.basis_root(b) {
            Some(r) => format!("e[{}]", self.rs.label(r)),
            None => format!("h{}", b - self.rs.num_positive() + 1),
        }
    }

    /// `[x, y]` for basis vectors.
    pub fn bracket(&self, x: usize, y: usize) -> SparseVec {
        let rs = &self.rs;
        match (self.basis_root(x), self.basis_root(y)) {
            (None, None) => Vec::new(),
            (None, Some(b)) => {
                let i = x - rs.num_positive();
                let c = rs.pairing(b, i);
                if c == 0 { Vec::new() } else { vec![(y, c)] }
            }
            (Some(_), None) => self.bracket(y, x).into_iter().map(|(i, c)| (i, -c)).collect(),
            (Some(a), Some(b)) => {
                if b == rs.neg(a) {
                    rs.coroot_coeffs(a)
                        .into_iter()
                        .enumerate()
                        .filter(|&(_, c)| c != 0)
                        .map(|(i, c)| (self.cartan_basis(i), c))
                        .collect()
                } else if let Some(s) = rs.add(a, b) {
                    vec![(self.root_basis(s), self.n(a, b))]
                } else {
                    Vec::new()
                }
            }
        }
    }

    fn bracket_vec(&self, v: &SparseVec, y: usize) -> SparseVec {
        let mut out: SparseVec = Vec::new();
        for &(x, c) in v {
            for (z, d) in self.bracket(x, y) {
                add_entry(&mut out, z, c * d);
            }
        }
        out
    }

    /// Basis triples `(x, y, z)`, `x < y < z`, violating the Jacobi identity.
    pub fn jacobi_violations(&self) -> Vec<(usize, usize, usize)> {
        let d = self.dim();
        let mut bad: Vec<(usize, usize, usize)> = par::flat_map(0..d, |x| {
            let mut local = Vec::new();
            for y in x + 1..d {
                let xy = self.bracket(x, y);
                for z in y + 1..d {
                    let mut sum: SparseVec = Vec::new();
                    // [[x,y],z] + [[y,z],x] + [[z,x],y]
                    for (i, c) in self.bracket_vec(&xy, z) {
                        add_entry(&mut sum, i, c);
                    }
                    for (i, c) in self.bracket_vec(&self.bracket(y, z), x) {
                        add_entry(&mut sum, i, c);
                    }
                    for (i, c) in self.bracket_vec(&self.bracket(z, x), y) {
                        add_entry(&mut sum, i, c);
                    }
                    if !sum.is_empty() {
                        local.push((x, y, z));
                    }
                }
            }
            local
        });
        bad.sort_unstable();
        bad
    }

    /// Pairs with `|N_{a,b}| != p + 1` (or nonzero where `a + b` is not a root).
    pub fn magnitude_violations(&self) -> Vec<(RootId, RootId)> {
        let rs = &self.rs;
        let k = rs.num_roots();
        let mut bad = Vec::new();
        for a in 0..k {
            for b in 0..k {
                let expected = match rs.add(a, b) {
                    Some(_) => rs.root_string(a, b).0 as i64 + 1,
                    None => 0,
                };
                if self.n(a, b).abs() != expected {
                    bad.push((a, b));
                }
            }
        }
        bad
    }

    /// Sparse columns of `ad e_r`: `(row, col, coefficient)`.
    pub fn ad(&self, r: RootId) -> Vec<(usize, usize, i64)> {
        let x = self.root_basis(r);
        let mut out = Vec::new();
        for col in 0..self.dim() {
            for (row, c) in self.bracket(x, col) {
                out.push((row, col, c));
            }
        }
        out
    }
}

fn add_entry(v: &mut SparseVec, i: usize, c: i64) {
    if c == 0 {
        return;
    }
    if let Some(pos) = v.iter().position(|&(j, _)| j == i) {
        v[pos].1 += c;
        if v[pos].1 == 0 {
            v.swap_remove(pos);
        }
    } else {
        v.push((i, c));
    }
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 { a.abs() } else { gcd(b, a % b) }
}

fn lcm(a: i64, b: i64) -> i64 {
    a / gcd(a, b) * b
}

/// One term `coeff * t^power` at matrix position `(row, col)` of `x_r(t) - I`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpTerm {
    pub row: u16,
    pub col: u16,
    pub power: u8,
    pub coeff: i64,
}

/// Adjoint representation with certified integral exponentials.
#[derive(Clone, Debug)]
pub struct AdjointRep {
    pub cb: ChevalleyBasis,
    exp: Vec<Vec<ExpTerm>>,
    nilpotency: Vec<u32>,
}

/// Outcome of the exact exponential expansion for one root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralityReport {
    pub root: RootId,
    pub nilpotency: u32,
    /// `(power, row, col)` of entries of `(ad)^k` not divisible by `k!`.
    pub violations: Vec<(u32, usize, usize)>,
}

impl AdjointRep {
    pub fn build(cb: ChevalleyBasis) -> Result<Self, LieError> {
        let reports = Self::integrality_check(&cb);
        let mut exp = Vec::new();
        let mut nilpotency = Vec::new();
        for rep in &reports {
            if let Some(&(power, _, _)) = rep.violations.first() {
                return Err(LieError::IntegralityFailure { root: rep.root, power });
            }
            exp.push(Self::series(&cb, rep.root).0);
            nilpotency.push(rep.nilpotency);
        }
        Ok(AdjointRep { cb, exp, nilpotency })
    }

    /// Reassembles a representation from cached tables.
    pub fn from_parts(cb: ChevalleyBasis, exp: Vec<Vec<ExpTerm>>, nilpotency: Vec<u32>) -> Result<Self, LieError> {
        if exp.len() != cb.rs.num_roots() || nilpotency.len() != exp.len() {
            return Err(LieError::BadTable);
        }
        Ok(AdjointRep { cb, exp, nilpotency })
    }

    pub fn exp_tables(&self) -> &[Vec<ExpTerm>] {
        &self.exp
    }

    pub fn nilpotency(&self) -> &[u32] {
        &self.nilpotency
    }

    /// Exact expansion of `sum_k (ad e_r)^k / k!` with divisibility checked.
    fn series(cb: &ChevalleyBasis, r: RootId) -> (Vec<ExpTerm>, u32, Vec<(u32, usize, usize)>) {
        let d = cb.dim();
        let ad = cb.ad(r);
        let mut power = Matrix64::identity(d);
        let mut terms = Vec::new();
        let mut violations = Vec::new();
        let mut fact = 1i64;
        let mut k = 0u32;
        loop {
            k += 1;
            power = power.left_mul_sparse(&ad);
            if power.is_zero() {
                break;
            }
            fact *= k as i64;
            for (row, col, v) in power.nonzero() {
                if v % fact != 0 {
                    violations.push((k, row, col));
                } else {
                    terms.push(ExpTerm { row: row as u16, col: col as u16, power: k as u8, coeff: v / fact });
                }
            }
        }
        (terms, k, violations)
    }

    pub fn integrality_check(cb: &ChevalleyBasis) -> Vec<IntegralityReport> {
        par::map((0..cb.rs.num_roots()).collect(), |r| {
            let (_, nilpotency, violations) = Self::series(cb, r);
            IntegralityReport { root: r, nilpotency, violations }
        })
    }

    pub fn dim(&self) -> usize {
        self.cb.dim()
    }

    pub fn root_system(&self) -> &Arc<RootSystem> {
        &self.cb.rs
    }

    pub fn exp_terms(&self, r: RootId) -> &[ExpTerm] {
        &self.exp[r]
    }

    /// `x_r(t) = exp(t ad e_r)` evaluated over `ring`.
    pub fn exp_unipotent(&self, r: RootId, t: Elem, ring: &LocalRing) -> Matrix {
        let mut m = Matrix::identity(self.dim(), ring);
        let powers = powers_of(t, ring, 4);
        for term in &self.exp[r] {
            let (i, j) = (term.row as usize, term.col as usize);
            let v = ring.mul(ring.from_int(term.coeff), powers[term.power as usize]);
            m.set(i, j, ring.add(m.get(i, j), v));
        }
        m
    }
}

pub(crate) fn powers_of(t: Elem, ring: &LocalRing, k: usize) -> Vec<Elem> {
    let mut p = vec![ring.one()];
    for i in 1..=k {
        p.push(ring.mul(p[i - 1], t));
    }
    p
}

/// Small dense integer matrix used only for the exact series.
struct Matrix64 {
    n: usize,
    data: Vec<i64>,
}

impl Matrix64 {
    fn identity(n: usize) -> Self {
        let mut data = vec![0; n * n];
        for i in 0..n {
            data[i * n + i] = 1;
        }
        Matrix64 { n, data }
    }

    fn left_mul_sparse(&self, s: &[(usize, usize, i64)]) -> Self {
        let n = self.n;
        let mut data = vec![0i64; n * n];
        for &(i, k, c) in s {
            for j in 0..n {
                data[i * n + j] += c * self.data[k * n + j];
            }
        }
        Matrix64 { n, data }
    }

    fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    fn nonzero(&self) -> impl Iterator<Item = (usize, usize, i64)> + '_ {
        self.data.iter().enumerate().filter(|(_, &v)| v != 0).map(move |(i, &v)| (i / self.n, i % self.n, v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingDescriptor;

    fn basis(s: &str) -> ChevalleyBasis {
        ChevalleyBasis::build(Arc::new(RootSystem::build(s.parse().unwrap()))).unwrap()
    }

    #[test]
    fn a2_extraspecial_sign() {
        let cb = basis("A2");
        assert_eq!(cb.n(0, 1), 1);
        assert_eq!(cb.n(1, 0), -1);
        assert_eq!(cb.n(0, 0), 0);
    }

    #[test]
    fn g2_largest_constant_is_three() {
        let cb = basis("G2");
        assert_eq!(cb.table().iter().map(|v| v.abs()).max(), Some(3));
    }

    #[test]
    fn tables_are_consistent() {
        for name in ["A1", "A3", "B3", "C3", "D4", "G2", "F4"] {
            let cb = basis(name);
            assert!(cb.jacobi_violations().is_empty(), "{name}");
            assert!(cb.magnitude_violations().is_empty(), "{name}");
        }
    }

    #[test]
    fn corrupted_sign_is_detected() {
        let cb = basis("A3");
        let k = cb.root_system().num_roots();
        let mut t = cb.table().to_vec();
        let (a, b) = (0, 4); // a1 + (a2+a3)
        assert_ne!(t[a * k + b], 0);
        t[a * k + b] = -t[a * k + b];
        t[b * k + a] = -t[b * k + a];
        let bad = ChevalleyBasis::from_table(Arc::clone(cb.root_system()), t).unwrap();
        assert!(!bad.jacobi_violations().is_empty());
    }

    #[test]
    fn a1_adjoint_exponential() {
        let rep = AdjointRep::build(basis("A1")).unwrap();
        let r = LocalRing::build(&RingDescriptor::Zmod { p: 5, k: 2 }).unwrap();
        let t = Elem(7);
        let x = rep.exp_unipotent(0, t, &r);
        // basis (e_a, h, e_-a): columns are images.
        let expect = [
            vec![1, -2 * 7, -49],
            vec![0, 1, 7],
            vec![0, 0, 1],
        ];
        assert_eq!(x, Matrix::from_ints(&expect, &r));
        assert!(rep.exp_unipotent(0, Elem(0), &r).is_identity(&r));
    }

    #[test]
    fn nilpotency_matches_root_strings() {
        for name in ["A2", "B2", "G2", "F4", "D4"] {
            let cb = basis(name);
            let rs = Arc::clone(cb.root_system());
            let rep = AdjointRep::build(cb).unwrap();
            for a in 0..rs.num_roots() {
                let longest = (0..rs.num_roots())
                    .filter(|&b| b != a && b != rs.neg(a))
                    .map(|b| {
                        let (p, q) = rs.root_string(a, b);
                        p + q
                    })
                    .max()
                    .unwrap_or(0);
                assert_eq!(rep.nilpotency()[a] as i32, (longest + 1).max(3), "{name} root {a}");
            }
        }
    }
}
