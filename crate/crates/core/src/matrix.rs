//! Dense square matrices over a [`LocalRing`].

use serde::{Deserialize, Serialize};

use crate::rings::{Elem, LocalRing};

/// Square matrix stored row-major; entries are codes of the owning ring.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Matrix {
    n: usize,
    data: Vec<Elem>,
}

impl Matrix {
    pub fn zero(n: usize) -> Self {
        Matrix { n, data: vec![Elem(0); n * n] }
    }

    pub fn identity(n: usize, ring: &LocalRing) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.data[i * n + i] = ring.one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Elem>>) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Matrix { n, data: rows.into_iter().flatten().collect() }
    }

    /// Integer matrix reduced into the ring.
    pub fn from_ints(rows: &[Vec<i64>], ring: &LocalRing) -> Self {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&v| ring.from_int(v)).collect()).collect())
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Elem {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Elem) {
        self.data[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Elem] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.data.chunks(self.n).map(|r| r.iter().map(|e| e.0).collect()).collect()
    }

    pub fn is_identity(&self, ring: &LocalRing) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| self.get(i, j) == if i == j { ring.one() } else { ring.zero() }))
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j) == Elem(0)))
    }

    pub fn diagonal(&self) -> Vec<Elem> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul(&self, other: &Matrix, ring: &LocalRing) -> Matrix {
        let n = self.n;
        debug_assert_eq!(n, other.n);
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Elem(0) {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, &b) in dst.iter_mut().zip(orow) {
                    if b != Elem(0) {
                        *d = ring.add(*d, ring.mul(a, b));
                    }
                }
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(Elem) -> Elem) -> Matrix {
        Matrix { n: self.n, data: self.data.iter().map(|&e| f(e)).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zero(n);
        for i in 0..n {
            for j in 0..n {
                out.data[j * n + i] = self.data[i * n + j];
            }
        }
        out
    }

    /// Inverse by Gauss-Jordan elimination with unit pivots. Over a local
    /// ring a matrix is invertible iff every column step finds a unit.
    pub fn inverse(&self, ring: &LocalRing) -> Option<Matrix> {
        let n = self.n;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n, ring);
        for col in 0..n {
            let piv = (col..n).find(|&r| ring.is_unit(a.get(r, col)))?;
            if piv != col {
                a.swap_rows(piv, col);
                inv.swap_rows(piv, col);
            }
            let s = ring.inv(a.get(col, col))?;
            a.scale_row(col, s, ring);
            inv.scale_row(col, s, ring);
            for r in 0..n {
                let f = a.get(r, col);
                if r != col && f != Elem(0) {
                    let nf = ring.neg(f);
                    a.add_row_multiple(r, col, nf, ring);
                    inv.add_row_multiple(r, col, nf, ring);
                }
            }
        }
        Some(inv)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.n {
            self.data.swap(a * self.n + j, b * self.n + j);
        }
    }

    fn scale_row(&mut self, r: usize, s: Elem, ring: &LocalRing) {
        for j in 0..self.n {
            let v = self.get(r, j);
            self.set(r, j, ring.mul(v, s));
        }
    }

    /// `row[dst] += f * row[src]`.
    pub fn add_row_multiple(&mut self, dst: usize, src: usize, f: Elem, ring: &LocalRing) {
        for j in 0..self.n {
            let v = self.get(src, j);
            if v != Elem(0) {
                let d = self.get(dst, j);
                self.set(dst, j, ring.add(d, ring.mul(f, v)));
            }
        }
    }

    /// Characteristic polynomial `det(xI - M)` by the division-free Berkowitz
    /// algorithm; coefficients from `x^n` down to the constant term.
    pub fn char_poly(&self, ring: &LocalRing) -> Vec<Elem> {
        let n = self.n;
        let mut poly = vec![ring.one()];
        for k in 0..n {
            // Leading principal (k+1)x(k+1) block: A = [[B, c], [r, a]].
            let a = self.get(k, k);
            let r: Vec<Elem> = (0..k).map(|j| self.get(k, j)).collect();
            let c: Vec<Elem> = (0..k).map(|i| self.get(i, k)).collect();
            // Toeplitz column: 1, -a, -r c, -r B c, -r B^2 c, ...
            let mut col = vec![ring.one(), ring.neg(a)];
            let mut v = c.clone();
            for _ in 0..k {
                let rv = dot(&r, &v, ring);
                col.push(ring.neg(rv));
                v = (0..k).map(|i| dot_row(self, i, &v, k, ring)).collect();
            }
            let mut next = vec![ring.zero(); k + 2];
            for (i, slot) in next.iter_mut().enumerate() {
                let mut acc = ring.zero();
                for (j, &pj) in poly.iter().enumerate() {
                    if i >= j && i - j < col.len() {
                        acc = ring.add(acc, ring.mul(col[i - j], pj));
                    }
                }
                *slot = acc;
            }
            poly = next;
        }
        poly
    }
}

fn dot(a: &[Elem], b: &[Elem], ring: &LocalRing) -> Elem {
    a.iter().zip(b).fold(ring.zero(), |acc, (&x, &y)| ring.add(acc, ring.mul(x, y)))
}

fn dot_row(m: &Matrix, i: usize, v: &[Elem], k: usize, ring: &LocalRing) -> Elem {
    (0..k).fold(ring.zero(), |acc, j| ring.add(acc, ring.mul(m.get(i, j), v[j])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rings::RingDescriptor;

    #[test]
    fn inverse_and_char_poly_over_z9() {
        let r = LocalRing::build(&RingDescriptor::Zmod { p: 3, k: 2 }).unwrap();
        let m = Matrix::from_ints(&[vec![2, 1, 0], vec![3, 1, 4], vec![0, 0, 1]], &r);
        let inv = m.inverse(&r).unwrap();
        assert!(m.mul(&inv, &r).is_identity(&r));
        // det = 2 - 3 = -1, trace = 4
        let cp = m.char_poly(&r);
        assert_eq!(cp[0], r.one());
        assert_eq!(cp[1], r.from_int(-4));
        assert_eq!(cp[3], r.from_int(1));
        let singular = Matrix::from_ints(&[vec![3, 0], vec![0, 1]], &r);
        assert!(singular.inverse(&r).is_none());
    }
}
