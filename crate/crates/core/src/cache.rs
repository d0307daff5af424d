//! On-disk cache of structure constants, exponential tables and commutator
//! tables, keyed by root type, rank and convention version.
//!
//! The format is line-oriented text closed by a SHA-256 line over everything
//! before it; a file that fails to parse or verify is rebuilt.

use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::sync::Arc;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::group::{CommutatorTable, CommutatorTerm, LieTables};
use crate::lie::{AdjointRep, ChevalleyBasis, ExpTerm, LieError, CONVENTION_VERSION};
use crate::roots::{RootSystem, RootType};

pub const CACHE_ENV: &str = "CHEVLAB_CACHE_DIR";
pub const DEFAULT_CACHE_DIR: &str = ".chevlab-cache";

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("no cache entry at {0}")]
    Missing(PathBuf),
    #[error("corrupt cache entry {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },
    #[error("cache i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Lie(#[from] LieError),
}

#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum CacheOutcome {
    Hit,
    Built,
    /// An entry existed but was unreadable, stale or tampered with.
    Rebuilt,
}

#[derive(Clone, Debug)]
pub struct TableCache {
    pub dir: PathBuf,
    pub version: u32,
}

impl TableCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        TableCache { dir: dir.into(), version: CONVENTION_VERSION }
    }

    /// Directory from the environment, else the default.
    pub fn from_env() -> Self {
        Self::new(std::env::var_os(CACHE_ENV).map_or_else(|| PathBuf::from(DEFAULT_CACHE_DIR), PathBuf::from))
    }

    pub fn with_version(mut self, version: u32) -> Self {
        self.version = version;
        self
    }

    pub fn path(&self, ty: RootType) -> PathBuf {
        self.dir.join(format!("{ty}.v{}.tables", self.version))
    }

    /// Loads from the cache, building and storing on a miss or a bad entry.
    pub fn tables(&self, ty: RootType) -> Result<(Arc<LieTables>, CacheOutcome), CacheError> {
        let outcome = match self.load(ty) {
            Ok(t) => return Ok((t, CacheOutcome::Hit)),
            Err(CacheError::Missing(_)) => CacheOutcome::Built,
            Err(CacheError::Corrupt { .. }) => CacheOutcome::Rebuilt,
            Err(e) => return Err(e),
        };
        let t = LieTables::build(ty)?;
        self.store(&t)?;
        Ok((t, outcome))
    }

    pub fn store(&self, t: &LieTables) -> Result<PathBuf, CacheError> {
        fs::create_dir_all(&self.dir)?;
        let path = self.path(t.rs.ty);
        let tmp = path.with_extension(format!("tmp{}", std::process::id()));
        fs::write(&tmp, encode(t, self.version))?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    pub fn load(&self, ty: RootType) -> Result<Arc<LieTables>, CacheError> {
        let path = self.path(ty);
        let text = match fs::read_to_string(&path) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Err(CacheError::Missing(path)),
            Err(e) if e.kind() == std::io::ErrorKind::InvalidData => {
                return Err(CacheError::Corrupt { path, reason: "not utf-8".into() })
            }
            Err(e) => return Err(e.into()),
        };
        decode(&text, ty, self.version).map_err(|reason| CacheError::Corrupt { path, reason })
    }
}

fn digest(body: &str) -> String {
    Sha256::digest(body.as_bytes()).iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub fn encode(t: &LieTables, version: u32) -> String {
    let mut s = String::new();
    let k = t.rs.num_roots();
    let _ = writeln!(s, "chevlab-tables\ntype {}\nconvention {version}", t.rs.ty);
    let n = t.cb().table();
    let nz: Vec<usize> = (0..n.len()).filter(|&i| n[i] != 0).collect();
    let _ = writeln!(s, "structure {k} {}", nz.len());
    for i in nz {
        let _ = writeln!(s, "{} {} {}", i / k, i % k, n[i]);
    }
    for (r, (terms, nil)) in t.adjoint.exp_tables().iter().zip(t.adjoint.nilpotency()).enumerate() {
        let _ = writeln!(s, "exp {r} {nil} {}", terms.len());
        for e in terms {
            let _ = writeln!(s, "{} {} {} {}", e.row, e.col, e.power, e.coeff);
        }
    }
    let _ = writeln!(s, "commutators {}", t.commutators.terms.iter().filter(|x| x.as_ref().is_some_and(|v| !v.is_empty())).count());
    for (idx, terms) in t.commutators.terms.iter().enumerate() {
        let Some(terms) = terms.as_ref().filter(|v| !v.is_empty()) else { continue };
        let _ = write!(s, "{} {} {}", idx / k, idx % k, terms.len());
        for c in terms {
            let _ = write!(s, " {} {} {} {}", c.i, c.j, c.root, c.coeff);
        }
        s.push('\n');
    }
    let sum = digest(&s);
    let _ = writeln!(s, "sha256 {sum}");
    s
}

struct Tokens<'a> {
    it: std::str::SplitAsciiWhitespace<'a>,
}

impl Tokens<'_> {
    fn word(&mut self, w: &str) -> Result<(), String> {
        match self.it.next() {
            Some(x) if x == w => Ok(()),
            other => Err(format!("expected `{w}`, found {other:?}")),
        }
    }

    fn num<T: std::str::FromStr>(&mut self) -> Result<T, String> {
        let w = self.it.next().ok_or("truncated")?;
        w.parse().map_err(|_| format!("bad number `{w}`"))
    }
}

pub fn decode(text: &str, ty: RootType, version: u32) -> Result<Arc<LieTables>, String> {
    let body_end = text.rfind("sha256 ").ok_or("missing checksum")?;
    let (body, tail) = text.split_at(body_end);
    if tail.trim_end() != format!("sha256 {}", digest(body)) {
        return Err("checksum mismatch".into());
    }
    let mut t = Tokens { it: body.split_ascii_whitespace() };
    t.word("chevlab-tables")?;
    t.word("type")?;
    t.word(&ty.to_string())?;
    t.word("convention")?;
    if t.num::<u32>()? != version {
        return Err("convention version does not match the key".into());
    }
    let rs = Arc::new(RootSystem::build(ty));
    let k = rs.num_roots();
    let dim = k + rs.rank();
    t.word("structure")?;
    if t.num::<usize>()? != k {
        return Err("structure header".into());
    }
    let mut n = vec![0i64; k * k];
    for _ in 0..t.num::<usize>()? {
        let (a, b): (usize, usize) = (t.num()?, t.num()?);
        if a >= k || b >= k {
            return Err("structure index".into());
        }
        n[a * k + b] = t.num()?;
    }
    let mut exp = Vec::with_capacity(k);
    let mut nil = Vec::with_capacity(k);
    for r in 0..k {
        t.word("exp")?;
        if t.num::<usize>()? != r {
            return Err("exp header".into());
        }
        nil.push(t.num()?);
        let len: usize = t.num()?;
        let mut terms = Vec::with_capacity(len);
        for _ in 0..len {
            let e = ExpTerm { row: t.num()?, col: t.num()?, power: t.num()?, coeff: t.num()? };
            if e.row as usize >= dim || e.col as usize >= dim || e.power > 4 {
                return Err("exp entry out of range".into());
            }
            terms.push(e);
        }
        exp.push(terms);
    }
    t.word("commutators")?;
    let mut comm: Vec<Option<Vec<CommutatorTerm>>> =
        (0..k * k).map(|i| if rs.neg(i / k) == i % k { None } else { Some(Vec::new()) }).collect();
    for _ in 0..t.num::<usize>()? {
        let (a, b, len): (usize, usize, usize) = (t.num()?, t.num()?, t.num()?);
        let slot = comm.get_mut(a * k + b).and_then(Option::as_mut).ok_or("commutator index")?;
        for _ in 0..len {
            let c = CommutatorTerm { i: t.num()?, j: t.num()?, root: t.num()?, coeff: t.num()? };
            if c.root >= k {
                return Err("commutator root".into());
            }
            slot.push(c);
        }
    }
    if t.it.next().is_some() {
        return Err("trailing data".into());
    }
    let cb = ChevalleyBasis::from_table(Arc::clone(&rs), n).map_err(|e| e.to_string())?;
    let adjoint = AdjointRep::from_parts(cb, exp, nil).map_err(|e| e.to_string())?;
    Ok(Arc::new(LieTables { rs, adjoint, commutators: CommutatorTable { num_roots: k, terms: comm } }))
}

/// Bit-exact comparison of two table sets.
pub fn tables_equal(a: &LieTables, b: &LieTables) -> bool {
    a.rs.ty == b.rs.ty
        && a.cb().table() == b.cb().table()
        && a.adjoint.exp_tables() == b.adjoint.exp_tables()
        && a.adjoint.nilpotency() == b.adjoint.nilpotency()
        && a.commutators == b.commutators
}

/// Loads `ty` through the cache named by the environment; on cache I/O
/// failure falls back to an in-memory build.
pub fn tables_for(ty: RootType) -> Result<Arc<LieTables>, LieError> {
    match TableCache::from_env().tables(ty) {
        Ok((t, _)) => Ok(t),
        Err(CacheError::Lie(e)) => Err(e),
        Err(_) => LieTables::build(ty),
    }
}
