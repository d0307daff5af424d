//! Finite commutative local rings with exact arithmetic.
//!
//! Three families are supported: `Z/p^k`, finite fields `GF(p^n)` and
//! truncated polynomial rings `GF(p^n)[t]/(t^d)`. Elements are canonical
//! integer codes (`Elem`), always interpreted relative to the ring that
//! produced them:
//!
//! * `Z/m`: the least nonnegative residue;
//! * `GF(p^n)`: `sum a_i p^i` for the coefficient vector of the reducing
//!   polynomial representative;
//! * `GF(q)[t]/(t^d)`: `sum c_j q^j` where `c_j` are field codes.
//!
//! In every family the residue map is `code % |k|` and the lift of a residue
//! class is the same code, which keeps equality, hashing and reduction cheap.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Hard cap on ring order; every ring is fully enumerable.
pub const MAX_RING_ORDER: u32 = 10_000;

/// Rings at or below this order get full addition and multiplication tables.
const TABLE_CAP: u32 = 1024;

const NO_INVERSE: u32 = u32::MAX;

/// Canonical representative of a ring element.
#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Elem(pub u32);

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("ring is not local: {element} is neither a unit nor nilpotent")]
    NotLocal { element: u32 },
    #[error("ring order {order} exceeds the cap {cap}")]
    TooLarge { order: u64, cap: u32 },
    #[error("invalid ring descriptor: {0}")]
    InvalidDescriptor(String),
    #[error("map is not a ring homomorphism: fails {op} at ({a}, {b})")]
    NotHomomorphism { a: u32, b: u32, op: &'static str },
    #[error("expected {expected} generator images, got {got}")]
    BadImages { expected: usize, got: usize },
    #[error("element {0} is not a unit")]
    NotUnit(u32),
    #[error("element code {code} out of range for ring of order {order}")]
    OutOfRange { code: u64, order: u32 },
    #[error("cannot parse ring element `{0}`")]
    ParseElement(String),
}

/// Serializable description of a ring, e.g. `{"kind":"Zmod","p":3,"k":2}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum RingDescriptor {
    Zmod { p: u32, k: u32 },
    GF { p: u32, n: u32 },
    TruncPoly { p: u32, n: u32, deg: u32 },
}

impl RingDescriptor {
    /// Parses either a JSON descriptor or a short name such as `Z9`, `Z/25`,
    /// `F2`, `GF8` or `GF3[t]/(t^2)`.
    pub fn parse(s: &str) -> Result<Self, RingError> {
        let s = s.trim();
        if s.starts_with('{') {
            return serde_json::from_str(s).map_err(|e| RingError::InvalidDescriptor(e.to_string()));
        }
        let bad = || RingError::InvalidDescriptor(s.to_string());
        if let Some(rest) = s.strip_prefix("Z/").or_else(|| s.strip_prefix('Z')) {
            let m: u32 = rest.parse().map_err(|_| bad())?;
            if m < 2 {
                return Err(bad());
            }
            return Ok(match prime_power(m) {
                Some((p, k)) => RingDescriptor::Zmod { p, k },
                None => RingDescriptor::Zmod { p: m, k: 1 },
            });
        }
        let body = s.strip_prefix("GF").or_else(|| s.strip_prefix('F')).ok_or_else(bad)?;
        let (field, trunc) = match body.find('[') {
            Some(i) => (&body[..i], Some(&body[i..])),
            None => (body, None),
        };
        let q: u32 = field.parse().map_err(|_| bad())?;
        let (p, n) = prime_power(q).ok_or_else(bad)?;
        match trunc {
            None => Ok(RingDescriptor::GF { p, n }),
            Some(t) => {
                let d = t
                    .strip_prefix("[t]/(t^")
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(bad)?;
                let deg: u32 = d.parse().map_err(|_| bad())?;
                Ok(RingDescriptor::TruncPoly { p, n, deg })
            }
        }
    }

    /// Short human-readable name (`Z9`, `GF8`, `GF3[t]/(t^2)`).
    pub fn short_name(&self) -> String {
        match *self {
            RingDescriptor::Zmod { p, k } => format!("Z{}", (p as u64).pow(k)),
            RingDescriptor::GF { p, n } => format!("GF{}", (p as u64).pow(n)),
            RingDescriptor::TruncPoly { p, n, deg } => format!("GF{}[t]/(t^{})", (p as u64).pow(n), deg),
        }
    }
}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d: &u32| d * d <= n).all(|d| n % d != 0)
}

/// Returns `(p, k)` with `m = p^k`, `p` prime.
pub fn prime_power(m: u32) -> Option<(u32, u32)> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|d| m % d == 0)?;
    let (mut r, mut k) = (m, 0);
    while r % p == 0 {
        r /= p;
        k += 1;
    }
    (r == 1).then_some((p, k))
}

/// Arithmetic in `GF(p^n)` on base-`p` digit codes.
#[derive(Clone, Debug)]
struct Field {
    p: u32,
    n: u32,
    q: u32,
    /// log table indexed by code (undefined at 0) and antilog table.
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl Field {
    fn new(p: u32, n: u32) -> Result<Self, RingError> {
        if !is_prime(p) || n == 0 {
            return Err(RingError::InvalidDescriptor(format!("GF({p}^{n}) needs a prime p and n >= 1")));
        }
        let q = checked_pow(p, n)?;
        let modulus = irreducible_poly(p, n);
        let mul_poly = |a: u32, b: u32| -> u32 {
            let (da, db) = (digits(a, p, n), digits(b, p, n));
            let mut prod = vec![0u64; (2 * n) as usize];
            for (i, &x) in da.iter().enumerate() {
                for (j, &y) in db.iter().enumerate() {
                    prod[i + j] += (x * y) as u64;
                }
            }
            // Reduce modulo the monic modulus from the top degree down.
            for deg in (n as usize..prod.len()).rev() {
                let c = prod[deg] % p as u64;
                if c != 0 {
                    for (i, &m) in modulus.iter().enumerate().take(n as usize) {
                        let idx = deg - n as usize + i;
                        prod[idx] += (p as u64 - c) * m as u64;
                    }
                }
                prod[deg] = 0;
            }
            undigits(prod.iter().take(n as usize).map(|&c| (c % p as u64) as u32), p)
        };
        // Find a primitive element by brute force and build log tables.
        let mut log = vec![0u32; q as usize];
        let mut exp = vec![0u32; (q - 1) as usize];
        'search: for g in 1..q {
            let mut x = 1u32;
            for i in 0..q - 1 {
                if i > 0 && x == 1 {
                    continue 'search;
                }
                exp[i as usize] = x;
                x = mul_poly(x, g);
            }
            if x != 1 {
                continue;
            }
            for (i, &e) in exp.iter().enumerate() {
                log[e as usize] = i as u32;
            }
            return Ok(Field { p, n, q, log, exp });
        }
        unreachable!("multiplicative group of a finite field is cyclic")
    }

    fn add(&self, a: u32, b: u32) -> u32 {
        if self.n == 1 {
            return (a + b) % self.p;
        }
        let (mut a, mut b, mut out, mut place) = (a, b, 0, 1);
        while a > 0 || b > 0 {
            out += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        out
    }

    fn neg(&self, a: u32) -> u32 {
        let (mut a, mut out, mut place) = (a, 0, 1);
        while a > 0 {
            out += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        out
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        if a == 0 || b == 0 {
            return 0;
        }
        let e = (self.log[a as usize] + self.log[b as usize]) % (self.q - 1);
        self.exp[e as usize]
    }

    fn inv(&self, a: u32) -> Option<u32> {
        (a != 0).then(|| self.exp[((self.q - 1 - self.log[a as usize]) % (self.q - 1)) as usize])
    }
}

fn checked_pow(p: u32, k: u32) -> Result<u32, RingError> {
    let v = (p as u64).checked_pow(k).unwrap_or(u64::MAX);
    if v > MAX_RING_ORDER as u64 {
        return Err(RingError::TooLarge { order: v, cap: MAX_RING_ORDER });
    }
    Ok(v as u32)
}

fn digits(mut a: u32, base: u32, len: u32) -> Vec<u32> {
    (0..len)
        .map(|_| {
            let d = a % base;
            a /= base;
            d
        })
        .collect()
}

fn undigits(ds: impl DoubleEndedIterator<Item = u32>, base: u32) -> u32 {
    ds.rev().fold(0, |acc, d| acc * base + d)
}

/// Lexicographically smallest monic irreducible polynomial of degree `n`
/// over `F_p`, returned as coefficients `c_0..c_n` (with `c_n = 1`).
fn irreducible_poly(p: u32, n: u32) -> Vec<u32> {
    if n == 1 {
        return vec![0, 1];
    }
    let count = (p as u64).pow(n);
    for code in 0..count {
        let mut c = digits(code as u32, p, n);
        c.push(1);
        if c[0] == 0 {
            continue;
        }
        // A polynomial of degree <= 3 is irreducible iff it has no roots; for
        // larger degrees check divisibility by all monic polynomials of
        // degree <= n/2.
        let reducible = (1..=n / 2).any(|d| {
            (0..(p as u64).pow(d)).any(|dc| {
                let mut div = digits(dc as u32, p, d);
                div.push(1);
                poly_rem(&c, &div, p).iter().all(|&x| x == 0)
            })
        });
        if !reducible {
            return c;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    let mut r: Vec<u64> = a.iter().map(|&x| x as u64).collect();
    let dm = m.len() - 1;
    for deg in (dm..r.len()).rev() {
        let c = r[deg] % p as u64;
        if c != 0 {
            for (i, &mi) in m.iter().enumerate() {
                let idx = deg - dm + i;
                r[idx] += (p as u64 - c) * mi as u64;
            }
        }
    }
    r.iter().take(dm).map(|&x| (x % p as u64) as u32).collect()
}

#[derive(Clone, Debug)]
enum Repr {
    Zmod { m: u32 },
    /// `GF(q)[t]/(t^deg)`; `deg == 1` is the field itself.
    Poly { field: Field, deg: u32 },
}

/// A validated finite commutative local ring.
#[derive(Clone, Debug)]
pub struct LocalRing {
    desc: RingDescriptor,
    order: u32,
    repr: Repr,
    add_table: Option<Vec<u32>>,
    mul_table: Option<Vec<u32>>,
    inv_table: Vec<u32>,
    units: Vec<Elem>,
    radical: Vec<Elem>,
    nilpotency: u32,
    residue_order: u32,
    residue: Option<Arc<LocalRing>>,
}

impl PartialEq for LocalRing {
    fn eq(&self, other: &Self) -> bool {
        self.desc == other.desc
    }
}
impl Eq for LocalRing {}

impl LocalRing {
    pub fn build(desc: &RingDescriptor) -> Result<Arc<LocalRing>, RingError> {
        let (repr, order) = match *desc {
            RingDescriptor::Zmod { p, k } => {
                if p < 2 || k == 0 {
                    return Err(RingError::InvalidDescriptor(format!("Z/{p}^{k}")));
                }
                let m = checked_pow(p, k)?;
                (Repr::Zmod { m }, m)
            }
            RingDescriptor::GF { p, n } => {
                let field = Field::new(p, n)?;
                let q = field.q;
                (Repr::Poly { field, deg: 1 }, q)
            }
            RingDescriptor::TruncPoly { p, n, deg } => {
                if deg == 0 {
                    return Err(RingError::InvalidDescriptor("truncation degree must be >= 1".into()));
                }
                let q = checked_pow(p, n)?;
                let order = checked_pow(q, deg)?;
                (Repr::Poly { field: Field::new(p, n)?, deg }, order)
            }
        };
        let mut ring = LocalRing {
            desc: desc.clone(),
            order,
            repr,
            add_table: None,
            mul_table: None,
            inv_table: Vec::new(),
            units: Vec::new(),
            radical: Vec::new(),
            nilpotency: 1,
            residue_order: order,
            residue: None,
        };
        if order <= TABLE_CAP {
            let n = order as usize;
            let mut add = vec![0u32; n * n];
            let mut mul = vec![0u32; n * n];
            for a in 0..order {
                for b in 0..order {
                    add[a as usize * n + b as usize] = ring.add_raw(a, b);
                    mul[a as usize * n + b as usize] = ring.mul_raw(a, b);
                }
            }
            ring.add_table = Some(add);
            ring.mul_table = Some(mul);
        }
        ring.classify()?;
        Ok(Arc::new(ring))
    }

    /// Splits the ring into verified units and verified nilpotents; anything
    /// else means the ring is not local.
    fn classify(&mut self) -> Result<(), RingError> {
        let one = self.one();
        let bound = 32 - self.order.leading_zeros() + 1;
        let mut inv = vec![NO_INVERSE; self.order as usize];
        let mut nilpotency = 1;
        for x in 0..self.order {
            let e = Elem(x);
            if let Some(y) = self.candidate_inverse(e) {
                if self.mul(e, y) == one {
                    inv[x as usize] = y.0;
                    self.units.push(e);
                    continue;
                }
            }
            // Nilpotent elements satisfy x^j = 0 for some j <= log2(order).
            let mut power = e;
            let mut j = 1;
            while power != Elem(0) && j <= bound {
                power = self.mul(power, e);
                j += 1;
            }
            if power != Elem(0) {
                return Err(RingError::NotLocal { element: x });
            }
            nilpotency = nilpotency.max(j);
            self.radical.push(e);
        }
        self.inv_table = inv;
        self.nilpotency = nilpotency;
        // The radical is an ideal of index |k|, and |k| = |R| / |Rad R|.
        self.residue_order = self.order / self.radical.len() as u32;
        if self.radical.len() > 1 {
            let res_desc = match &self.repr {
                Repr::Zmod { .. } => {
                    let (p, _) = prime_power(self.order).ok_or(RingError::NotLocal { element: 0 })?;
                    RingDescriptor::GF { p, n: 1 }
                }
                Repr::Poly { field, .. } => RingDescriptor::GF { p: field.p, n: field.n },
            };
            self.residue = Some(LocalRing::build(&res_desc)?);
        }
        Ok(())
    }

    fn candidate_inverse(&self, a: Elem) -> Option<Elem> {
        match &self.repr {
            Repr::Zmod { m } => {
                let (g, x, _) = ext_gcd(a.0 as i64, *m as i64);
                (g == 1).then(|| Elem(x.rem_euclid(*m as i64) as u32))
            }
            Repr::Poly { field, deg } => {
                let q = field.q;
                let c0 = a.0 % q;
                let c0_inv = field.inv(c0)?;
                if *deg == 1 {
                    return Some(Elem(c0_inv));
                }
                // a = c0 (1 + s) with s nilpotent; invert the geometric series.
                let s = self.mul_raw(a.0, c0_inv);
                let s = self.add_raw(s, field.neg(1));
                let neg_s = self.neg_raw(s);
                let mut term = 1u32;
                let mut sum = 0u32;
                for _ in 0..*deg {
                    sum = self.add_raw(sum, term);
                    term = self.mul_raw(term, neg_s);
                }
                Some(Elem(self.mul_raw(sum, c0_inv)))
            }
        }
    }

    fn add_raw(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Zmod { m } => ((a as u64 + b as u64) % *m as u64) as u32,
            Repr::Poly { field, deg } => {
                if *deg == 1 {
                    return field.add(a, b);
                }
                let q = field.q;
                let (mut a, mut b, mut out, mut place) = (a, b, 0u32, 1u32);
                for _ in 0..*deg {
                    out += field.add(a % q, b % q) * place;
                    a /= q;
                    b /= q;
                    place = place.wrapping_mul(q);
                }
                out
            }
        }
    }

    fn neg_raw(&self, a: u32) -> u32 {
        match &self.repr {
            Repr::Zmod { m } => (*m - a % *m) % *m,
            Repr::Poly { field, deg } => {
                let q = field.q;
                let (mut a, mut out, mut place) = (a, 0u32, 1u32);
                for _ in 0..*deg {
                    out += field.neg(a % q) * place;
                    a /= q;
                    place = place.wrapping_mul(q);
                }
                out
            }
        }
    }

    fn mul_raw(&self, a: u32, b: u32) -> u32 {
        match &self.repr {
            Repr::Zmod { m } => ((a as u64 * b as u64) % *m as u64) as u32,
            Repr::Poly { field, deg } => {
                if *deg == 1 {
                    return field.mul(a, b);
                }
                let q = field.q;
                let da = digits(a, q, *deg);
                let db = digits(b, q, *deg);
                let mut out = vec![0u32; *deg as usize];
                for (i, &x) in da.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in db.iter().enumerate().take(*deg as usize - i) {
                        out[i + j] = field.add(out[i + j], field.mul(x, y));
                    }
                }
                undigits(out.into_iter(), q)
            }
        }
    }

    pub fn descriptor(&self) -> &RingDescriptor {
        &self.desc
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn characteristic(&self) -> u32 {
        match &self.repr {
            Repr::Zmod { m } => *m,
            Repr::Poly { field, .. } => field.p,
        }
    }

    pub fn is_field(&self) -> bool {
        self.radical.len() == 1
    }

    pub fn zero(&self) -> Elem {
        Elem(0)
    }

    pub fn one(&self) -> Elem {
        Elem(1 % self.order)
    }

    /// Iterates over all elements in code order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order).map(Elem)
    }

    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    pub fn radical(&self) -> &[Elem] {
        &self.radical
    }

    /// Smallest `N` with `x^N = 0` for every radical element `x`.
    pub fn nilpotency_degree(&self) -> u32 {
        self.nilpotency
    }

    pub fn elem(&self, code: u64) -> Result<Elem, RingError> {
        if code >= self.order as u64 {
            return Err(RingError::OutOfRange { code, order: self.order });
        }
        Ok(Elem(code as u32))
    }

    /// Parses a decimal code, or a negative integer taken as `n * 1`.
    pub fn parse_elem(&self, s: &str) -> Result<Elem, RingError> {
        let s = s.trim();
        if let Some(neg) = s.strip_prefix('-') {
            let v: i64 = neg.parse().map_err(|_| RingError::ParseElement(s.into()))?;
            return Ok(self.from_int(-v));
        }
        let v: u64 = s.parse().map_err(|_| RingError::ParseElement(s.into()))?;
        self.elem(v)
    }

    /// Image of the integer `n` under `Z -> R`.
    pub fn from_int(&self, n: i64) -> Elem {
        let c = self.characteristic() as i64;
        Elem(n.rem_euclid(c) as u32)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        match (&self.add_table, &self.repr) {
            (_, Repr::Zmod { m }) => Elem(((a.0 as u64 + b.0 as u64) % *m as u64) as u32),
            (Some(t), _) => Elem(t[a.0 as usize * self.order as usize + b.0 as usize]),
            (None, _) => Elem(self.add_raw(a.0, b.0)),
        }
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        match (&self.mul_table, &self.repr) {
            (_, Repr::Zmod { m }) => Elem(((a.0 as u64 * b.0 as u64) % *m as u64) as u32),
            (Some(t), _) => Elem(t[a.0 as usize * self.order as usize + b.0 as usize]),
            (None, _) => Elem(self.mul_raw(a.0, b.0)),
        }
    }

    pub fn neg(&self, a: Elem) -> Elem {
        Elem(self.neg_raw(a.0))
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.inv_table[a.0 as usize] != NO_INVERSE
    }

    pub fn inv(&self, a: Elem) -> Option<Elem> {
        let v = self.inv_table[a.0 as usize];
        (v != NO_INVERSE).then_some(Elem(v))
    }

    pub fn try_inv(&self, a: Elem) -> Result<Elem, RingError> {
        self.inv(a).ok_or(RingError::NotUnit(a.0))
    }

    /// `a^e` for any integer `e`; negative exponents need a unit.
    pub fn pow(&self, a: Elem, e: i64) -> Option<Elem> {
        let base = if e < 0 { self.inv(a)? } else { a };
        let mut e = e.unsigned_abs();
        let (mut acc, mut b) = (self.one(), base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        Some(acc)
    }

    /// Whether `n * 1` is a unit.
    pub fn require_invertible(&self, n: i64) -> bool {
        self.is_unit(self.from_int(n))
    }

    /// The residue field `R / Rad R` (the ring itself when it is a field).
    pub fn residue_field(self: &Arc<Self>) -> Arc<LocalRing> {
        self.residue.clone().unwrap_or_else(|| Arc::clone(self))
    }

    pub fn residue(&self, x: Elem) -> Elem {
        Elem(x.0 % self.residue_order)
    }

    /// Canonical lift of a residue-field element.
    pub fn lift(&self, y: Elem) -> Elem {
        Elem(y.0)
    }

    /// Ring generators used by [`RingMorphism::from_generator_images`]:
    /// the field generator `x` (when the residue field is not prime) and the
    /// nilpotent `t` for truncated polynomial rings.
    pub fn generators(&self) -> Vec<Elem> {
        match &self.repr {
            Repr::Zmod { .. } => Vec::new(),
            Repr::Poly { field, deg } => {
                let mut g = Vec::new();
                if field.n > 1 {
                    g.push(Elem(field.p));
                }
                if *deg > 1 {
                    g.push(Elem(field.q));
                }
                g
            }
        }
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        Elem(rng.gen_range(0..self.order))
    }

    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Elem {
        self.units[rng.gen_range(0..self.units.len())]
    }

    /// A generator of the unit group when it is cyclic, found by scan.
    pub fn unit_generator(&self) -> Option<Elem> {
        let n = self.units.len() as i64;
        self.units.iter().copied().find(|&u| {
            let mut x = u;
            for _ in 1..n {
                if x == self.one() {
                    return false;
                }
                x = self.mul(x, u);
            }
            true
        })
    }

    /// A minimal-by-scan generating set of the additive group.
    pub fn additive_generators(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut span = vec![false; self.order as usize];
        span[0] = true;
        for e in self.elements() {
            if span[e.0 as usize] {
                continue;
            }
            gens.push(e);
            let mut frontier: Vec<Elem> = (0..self.order).map(Elem).filter(|x| span[x.0 as usize]).collect();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = self.add(x, g);
                    if !std::mem::replace(&mut span[y.0 as usize], true) {
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }

    /// A generating set of the unit group, chosen greedily in code order.
    pub fn unit_group_generators(&self) -> Vec<Elem> {
        let mut gens = Vec::new();
        let mut sub = vec![false; self.order as usize];
        sub[self.one().0 as usize] = true;
        for &u in &self.units {
            if sub[u.0 as usize] {
                continue;
            }
            gens.push(u);
            let mut frontier: Vec<Elem> = self.units.iter().copied().filter(|x| sub[x.0 as usize]).collect();
            while let Some(x) = frontier.pop() {
                for &g in &gens {
                    let y = self.mul(x, g);
                    if !std::mem::replace(&mut sub[y.0 as usize], true) {
                        frontier.push(y);
                    }
                }
            }
        }
        gens
    }

    /// Every ring automorphism, found by trying all images of
    /// [`LocalRing::generators`] (the field generator anywhere, `t` in the
    /// radical). The identity comes first.
    pub fn automorphisms(self: &Arc<Self>) -> Vec<RingMorphism> {
        let gens = self.generators();
        let mut choices: Vec<Vec<Elem>> = Vec::new();
        for &g in &gens {
            if self.is_unit(g) {
                choices.push(self.elements().collect());
            } else {
                choices.push(self.radical().to_vec());
            }
        }
        let mut out = vec![RingMorphism::identity(self)];
        let mut idx = vec![0usize; gens.len()];
        if gens.is_empty() {
            return out;
        }
        loop {
            let images: Vec<Elem> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            if let Ok(m) = RingMorphism::from_generator_images(self, self, &images) {
                if !m.is_identity() && m.is_bijective() && m.validate().is_ok() {
                    out.push(m);
                }
            }
            let mut k = 0;
            loop {
                if k == idx.len() {
                    return out;
                }
                idx[k] += 1;
                if idx[k] < choices[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a % b);
        (g, y, x - (a / b) * y)
    }
}

/// A map between rings, stored as a full table on the (enumerable) source.
#[derive(Clone, Debug)]
pub struct RingMorphism {
    source: Arc<LocalRing>,
    target: Arc<LocalRing>,
    table: Vec<Elem>,
}

impl PartialEq for RingMorphism {
    fn eq(&self, other: &Self) -> bool {
        self.source == other.source && self.target == other.target && self.table == other.table
    }
}

impl RingMorphism {
    pub fn identity(ring: &Arc<LocalRing>) -> Self {
        Self::from_fn(ring, ring, |x| x)
    }

    pub fn from_fn(source: &Arc<LocalRing>, target: &Arc<LocalRing>, f: impl Fn(Elem) -> Elem) -> Self {
        RingMorphism {
            source: Arc::clone(source),
            target: Arc::clone(target),
            table: source.elements().map(f).collect(),
        }
    }

    pub fn from_table(source: &Arc<LocalRing>, target: &Arc<LocalRing>, table: Vec<Elem>) -> Result<Self, RingError> {
        if table.len() != source.order() as usize {
            return Err(RingError::BadImages { expected: source.order() as usize, got: table.len() });
        }
        if let Some(bad) = table.iter().find(|e| e.0 >= target.order()) {
            return Err(RingError::OutOfRange { code: bad.0 as u64, order: target.order() });
        }
        Ok(RingMorphism { source: Arc::clone(source), target: Arc::clone(target), table })
    }

    /// The map determined by images of [`LocalRing::generators`], extended
    /// by evaluating each element's polynomial representative. The result is
    /// not validated.
    pub fn from_generator_images(
        source: &Arc<LocalRing>,
        target: &Arc<LocalRing>,
        images: &[Elem],
    ) -> Result<Self, RingError> {
        let gens = source.generators();
        if gens.len() != images.len() {
            return Err(RingError::BadImages { expected: gens.len(), got: images.len() });
        }
        let table = match &source.repr {
            Repr::Zmod { .. } => source.elements().map(|x| target.from_int(x.0 as i64)).collect(),
            Repr::Poly { field, deg } => {
                let (p, n, q) = (field.p, field.n, field.q);
                let mut idx = 0;
                let x_img = if n > 1 {
                    idx += 1;
                    images[0]
                } else {
                    target.one()
                };
                let t_img = if *deg > 1 { images[idx] } else { target.zero() };
                source
                    .elements()
                    .map(|e| {
                        let mut acc = target.zero();
                        for (j, c) in digits(e.0, q, *deg).into_iter().enumerate() {
                            let tj = target.pow(t_img, j as i64).expect("nonnegative power");
                            for (i, a) in digits(c, p, n).into_iter().enumerate() {
                                if a == 0 {
                                    continue;
                                }
                                let xi = target.pow(x_img, i as i64).expect("nonnegative power");
                                let term = target.mul(target.from_int(a as i64), target.mul(xi, tj));
                                acc = target.add(acc, term);
                            }
                        }
                        acc
                    })
                    .collect()
            }
        };
        if let Some(bad) = images.iter().find(|e| e.0 >= target.order()) {
            return Err(RingError::OutOfRange { code: bad.0 as u64, order: target.order() });
        }
        Ok(RingMorphism { source: Arc::clone(source), target: Arc::clone(target), table })
    }

    /// `x -> x^p` on a ring of characteristic `p`.
    pub fn frobenius(ring: &Arc<LocalRing>) -> Self {
        let p = ring.characteristic() as i64;
        Self::from_fn(ring, ring, |x| ring.pow(x, p).expect("nonnegative power"))
    }

    pub fn source(&self) -> &Arc<LocalRing> {
        &self.source
    }

    pub fn target(&self) -> &Arc<LocalRing> {
        &self.target
    }

    pub fn table(&self) -> &[Elem] {
        &self.table
    }

    #[inline]
    pub fn apply(&self, x: Elem) -> Elem {
        self.table[x.0 as usize]
    }

    /// Exhaustive check of `f(1) = 1`, additivity and multiplicativity. The
    /// first failing pair is reported as the witness.
    pub fn validate(&self) -> Result<(), RingError> {
        let (s, t) = (&self.source, &self.target);
        for a in s.elements() {
            for b in s.elements() {
                if self.apply(s.add(a, b)) != t.add(self.apply(a), self.apply(b)) {
                    return Err(RingError::NotHomomorphism { a: a.0, b: b.0, op: "addition" });
                }
                if self.apply(s.mul(a, b)) != t.mul(self.apply(a), self.apply(b)) {
                    return Err(RingError::NotHomomorphism { a: a.0, b: b.0, op: "multiplication" });
                }
            }
        }
        if self.apply(s.one()) != t.one() {
            return Err(RingError::NotHomomorphism { a: 1, b: 1, op: "unit" });
        }
        Ok(())
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.target.order() as usize];
        self.source.order() == self.target.order()
            && self.table.iter().all(|e| !std::mem::replace(&mut seen[e.0 as usize], true))
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.table.iter().enumerate().all(|(i, e)| e.0 as usize == i)
    }

    /// `self` after `other`.
    pub fn compose(&self, other: &RingMorphism) -> RingMorphism {
        RingMorphism {
            source: Arc::clone(&other.source),
            target: Arc::clone(&self.target),
            table: other.table.iter().map(|&x| self.apply(x)).collect(),
        }
    }

    pub fn inverse(&self) -> Option<RingMorphism> {
        if !self.is_bijective() {
            return None;
        }
        let mut table = vec![Elem(0); self.table.len()];
        for (i, e) in self.table.iter().enumerate() {
            table[e.0 as usize] = Elem(i as u32);
        }
        Some(RingMorphism { source: Arc::clone(&self.target), target: Arc::clone(&self.source), table })
    }

    /// Order as an automorphism, `None` if not bijective on a single ring.
    pub fn order(&self) -> Option<u32> {
        if self.source != self.target || !self.is_bijective() {
            return None;
        }
        let mut power = self.clone();
        for k in 1..=self.table.len() as u32 {
            if power.is_identity() {
                return Some(k);
            }
            power = self.compose(&power);
        }
        None
    }

    pub fn maps_radical_into_radical(&self) -> bool {
        self.source.radical().iter().all(|&x| !self.target.is_unit(self.apply(x)))
    }

    /// The induced map on residue fields, `y -> res(f(lift(y)))`.
    pub fn induced_residue(&self) -> RingMorphism {
        let ks = self.source.residue_field();
        let kt = self.target.residue_field();
        RingMorphism::from_fn(&ks, &kt, |y| self.target.residue(self.apply(self.source.lift(y))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ring(s: &str) -> Arc<LocalRing> {
        LocalRing::build(&RingDescriptor::parse(s).unwrap()).unwrap()
    }

    #[test]
    fn z4_structure() {
        let r = ring("Z4");
        assert_eq!(r.units(), &[Elem(1), Elem(3)]);
        assert_eq!(r.radical(), &[Elem(0), Elem(2)]);
        assert_eq!(r.residue_field().descriptor(), &RingDescriptor::GF { p: 2, n: 1 });
        assert_eq!(r.nilpotency_degree(), 2);
    }

    #[test]
    fn gf4_is_its_own_residue_field() {
        let r = ring("GF4");
        assert_eq!(r.radical(), &[Elem(0)]);
        assert_eq!(r.units().len(), 3);
        assert!(Arc::ptr_eq(&r.residue_field(), &r));
    }

    #[test]
    fn truncated_polynomials_over_f2() {
        let r = ring("GF2[t]/(t^2)");
        assert_eq!(r.order(), 4);
        // t has code 2
        assert_eq!(r.radical(), &[Elem(0), Elem(2)]);
        assert_eq!(r.residue_field().order(), 2);
        assert_eq!(r.mul(Elem(2), Elem(2)), Elem(0));
    }

    #[test]
    fn non_local_and_oversized_rings_are_rejected() {
        let z6 = LocalRing::build(&RingDescriptor::Zmod { p: 6, k: 1 });
        assert_eq!(z6.unwrap_err(), RingError::NotLocal { element: 2 });
        let big = LocalRing::build(&RingDescriptor::Zmod { p: 101, k: 2 });
        assert!(matches!(big, Err(RingError::TooLarge { .. })));
        assert!(RingDescriptor::parse("Q7").is_err());
        assert!(RingDescriptor::parse("GF6").is_err());
    }

    #[test]
    fn json_descriptors() {
        let d: RingDescriptor = serde_json::from_str(r#"{"kind":"TruncPoly","p":2,"n":1,"deg":2}"#).unwrap();
        assert_eq!(d, RingDescriptor::TruncPoly { p: 2, n: 1, deg: 2 });
        assert_eq!(RingDescriptor::parse(r#"{"kind":"Zmod","p":3,"k":2}"#).unwrap(), RingDescriptor::Zmod { p: 3, k: 2 });
        assert_eq!(RingDescriptor::parse("GF3[t]/(t^2)").unwrap().short_name(), "GF3[t]/(t^2)");
    }

    #[test]
    fn invertibility_table() {
        assert!(ring("Z9").require_invertible(2));
        assert!(!ring("Z4").require_invertible(2));
        assert!(ring("GF8").require_invertible(3));
        assert!(!ring("Z9").require_invertible(3));
    }

    #[test]
    fn residue_and_lift() {
        let r = ring("Z9");
        assert_eq!(r.residue(Elem(3)), Elem(0));
        assert_eq!(r.residue(Elem(5)), Elem(2));
        assert_eq!(r.lift(Elem(2)), Elem(2));
        let k = r.residue_field();
        for a in r.elements() {
            for b in r.elements() {
                assert_eq!(r.residue(r.mul(a, b)), k.mul(r.residue(a), r.residue(b)));
                assert_eq!(r.residue(r.add(a, b)), k.add(r.residue(a), r.residue(b)));
            }
        }
    }

    #[test]
    fn every_unit_inverse_is_exact() {
        for name in ["Z9", "Z25", "GF4", "GF8", "GF9", "GF3[t]/(t^2)", "GF4[t]/(t^3)", "Z27"] {
            let r = ring(name);
            assert_eq!(r.units().len() + r.radical().len(), r.order() as usize);
            for &u in r.units() {
                assert_eq!(r.mul(u, r.inv(u).unwrap()), r.one(), "{name}");
            }
        }
    }

    #[test]
    fn frobenius_on_gf4_has_order_two() {
        let r = ring("GF4");
        let f = RingMorphism::frobenius(&r);
        f.validate().unwrap();
        assert_eq!(f.order(), Some(2));
        let g = RingMorphism::from_generator_images(&r, &r, &[r.mul(Elem(2), Elem(2))]).unwrap();
        assert_eq!(f, g);
    }

    #[test]
    fn translation_is_not_a_homomorphism() {
        let r = ring("Z9");
        RingMorphism::identity(&r).validate().unwrap();
        let shift = RingMorphism::from_fn(&r, &r, |x| r.add(x, r.one()));
        assert_eq!(shift.validate(), Err(RingError::NotHomomorphism { a: 0, b: 0, op: "addition" }));
    }

    #[test]
    fn truncated_ring_automorphism_and_residue_compatibility() {
        let r = ring("GF4[t]/(t^2)");
        let k = r.residue_field();
        let x = r.generators()[0];
        let t = r.generators()[1];
        // x -> x^2, t -> x t
        let rho = RingMorphism::from_generator_images(&r, &r, &[r.mul(x, x), r.mul(x, t)]).unwrap();
        rho.validate().unwrap();
        assert!(rho.is_bijective());
        assert!(rho.maps_radical_into_radical());
        let bar = rho.induced_residue();
        bar.validate().unwrap();
        for a in r.elements() {
            assert_eq!(r.residue(rho.apply(a)), bar.apply(r.residue(a)));
        }
        assert_eq!(k.order(), 4);
    }

    #[test]
    fn generating_sets_and_automorphism_counts() {
        assert_eq!(ring("Z9").additive_generators(), vec![Elem(1)]);
        assert_eq!(ring("GF8").additive_generators().len(), 3);
        assert_eq!(ring("GF3[t]/(t^2)").additive_generators().len(), 2);
        assert_eq!(ring("GF4[t]/(t^2)").unit_group_generators().len(), 3);
        assert_eq!(ring("Z25").unit_group_generators().len(), 1);
        // Gal(GF8/F2) = C3; GF3[t]/(t^2) has t -> 2t; Z/n is rigid
        assert_eq!(ring("GF8").automorphisms().len(), 3);
        assert_eq!(ring("GF3[t]/(t^2)").automorphisms().len(), 2);
        assert_eq!(ring("Z27").automorphisms().len(), 1);
        // x -> x^{2^a}, t -> c t with c a unit: 2 * 3
        assert_eq!(ring("GF4[t]/(t^2)").automorphisms().len(), 6);
    }
}
