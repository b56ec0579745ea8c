//! The r-ELSV side: prefactor, intersection tables, special-case backends and
//! a backend that solves for table entries from oracle Hurwitz numbers.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combi::{self, ProfileError, Regime, SpinProfile};
use crate::hurwitz::{HurwitzError, HurwitzQuery, Oracle};
use crate::ratcore::scalar::{self, factorial, render, Scalar};
use crate::ratcore::{Bundle, GradedClass, Symbol};

pub const CACHE_ENV: &str = "RELSV_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ElsvError {
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error(transparent)]
    Hurwitz(#[from] HurwitzError),
    #[error("backend {backend} does not accept regime {regime}")]
    BackendMismatch { backend: String, regime: String },
    #[error("table for (g,r,a,l) = {table} does not match profile {profile}")]
    TableMismatch { table: String, profile: String },
    #[error("intersection table has no entry for b={b:?}, k={k}")]
    IncompleteTable { b: Vec<u32>, k: u32 },
    #[error("class cannot be integrated: {0}")]
    NotIntegrable(String),
    #[error("rank {rank} < {unknowns} unknowns from {samples} samples; more samples are needed")]
    RankDeficient { rank: usize, unknowns: usize, samples: usize },
    #[error("inconsistent system, residuals: {}", .residuals.join("; "))]
    Inconsistent { residuals: Vec<String> },
    #[error("no valid samples for g={g} r={r} a={a:?}")]
    NoSamples { g: u32, r: u32, a: Vec<u32> },
    #[error("the solve backend needs a Solver")]
    SolverRequired,
    #[error("table file: {0}")]
    Io(String),
}

/// `m! r^{m+l+2g-2} prod (mu_i/r)^{floor(mu_i/r)} / floor(mu_i/r)!`
pub fn prefactor(p: &SpinProfile) -> Scalar {
    let r = scalar::int(p.r as i64);
    let e = p.m as i64 + p.l() as i64 + 2 * p.g as i64 - 2;
    let mut acc = scalar::big(factorial(p.m as u64)) * scalar::pow(&r, e).expect("r > 0");
    for &x in &p.mu {
        let f = x / p.r;
        let base = Scalar::new(BigInt::from(x), BigInt::from(p.r));
        acc *= num_traits::pow(base, f as usize) / scalar::big(factorial(f as u64));
    }
    acc
}

/// Intersection numbers `int psi^b c_k(-R rho_* L)` with `|b| + k = 3g - 3 + l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionTable {
    pub g: u32,
    pub r: u32,
    pub a: Vec<u32>,
    pub l: u32,
    pub entries: BTreeMap<(Vec<u32>, u32), Scalar>,
}

#[derive(Serialize, Deserialize)]
struct TableFile {
    g: u32,
    r: u32,
    a: Vec<u32>,
    l: u32,
    entries: Vec<EntryFile>,
}

#[derive(Serialize, Deserialize)]
struct EntryFile {
    b: Vec<u32>,
    k: u32,
    value: String,
}

impl IntersectionTable {
    pub fn key(&self) -> TableKey {
        TableKey {
            g: self.g,
            r: self.r,
            a: self.a.clone(),
        }
    }

    pub fn dimension(&self) -> u32 {
        (3 * self.g + self.l).saturating_sub(3)
    }

    pub fn get(&self, b: &[u32]) -> Option<&Scalar> {
        let k = self.dimension() - b.iter().sum::<u32>();
        self.entries.get(&(b.to_vec(), k))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let file = TableFile {
            g: self.g,
            r: self.r,
            a: self.a.clone(),
            l: self.l,
            entries: self
                .entries
                .iter()
                .map(|((b, k), v)| EntryFile {
                    b: b.clone(),
                    k: *k,
                    value: render(v),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("table serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<IntersectionTable, ElsvError> {
        let file: TableFile = serde_json::from_value(v.clone()).map_err(|e| ElsvError::Io(e.to_string()))?;
        if file.a.len() != file.l as usize {
            return Err(ElsvError::Io(format!("a has {} entries but l = {}", file.a.len(), file.l)));
        }
        let d = (3 * file.g + file.l).saturating_sub(3);
        let mut entries = BTreeMap::new();
        for e in file.entries {
            if e.b.len() != file.l as usize || e.b.iter().sum::<u32>() + e.k != d {
                return Err(ElsvError::Io(format!("entry b={:?} k={} has wrong shape", e.b, e.k)));
            }
            let v = scalar::parse(&e.value).map_err(|x| ElsvError::Io(x.to_string()))?;
            entries.insert((e.b, e.k), v);
        }
        Ok(IntersectionTable {
            g: file.g,
            r: file.r,
            a: file.a,
            l: file.l,
            entries,
        })
    }

    pub fn load(path: &Path) -> Result<IntersectionTable, ElsvError> {
        let text = std::fs::read_to_string(path).map_err(|e| ElsvError::Io(format!("{}: {e}", path.display())))?;
        let v: serde_json::Value = serde_json::from_str(&text).map_err(|e| ElsvError::Io(e.to_string()))?;
        Self::from_json(&v)
    }

    pub fn save(&self, path: &Path) -> Result<(), ElsvError> {
        let text = serde_json::to_string_pretty(&self.to_json()).expect("json");
        std::fs::write(path, text + "\n").map_err(|e| ElsvError::Io(format!("{}: {e}", path.display())))
    }
}

/// `(g, r, a)`; `l` is the length of `a`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TableKey {
    pub g: u32,
    pub r: u32,
    pub a: Vec<u32>,
}

impl TableKey {
    pub fn of(p: &SpinProfile) -> TableKey {
        TableKey {
            g: p.g,
            r: p.r,
            a: p.a.clone(),
        }
    }

    pub fn l(&self) -> u32 {
        self.a.len() as u32
    }

    pub fn file_name(&self) -> String {
        let a: Vec<String> = self.a.iter().map(|x| x.to_string()).collect();
        format!("table_g{}_r{}_a{}_l{}.json", self.g, self.r, a.join("-"), self.l())
    }
}

impl fmt::Display for TableKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {:?}, {})", self.g, self.r, self.a, self.l())
    }
}

/// All `(b, k)` with `|b| + k = d`, in a fixed order.
pub fn unknowns(d: u32, l: u32) -> Vec<(Vec<u32>, u32)> {
    fn rec(l: usize, rem: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for x in 0..=rem {
            cur.push(x);
            rec(l, rem - x, cur, out);
            cur.pop();
        }
    }
    let mut bs = Vec::new();
    rec(l as usize, d, &mut Vec::new(), &mut bs);
    bs.into_iter()
        .map(|b| {
            let k = d - b.iter().sum::<u32>();
            (b, k)
        })
        .collect()
}

fn basis_value(p: &SpinProfile, b: &[u32]) -> Scalar {
    let mut acc = Scalar::one();
    for (&x, &e) in p.mu.iter().zip(b) {
        acc *= num_traits::pow(Scalar::new(BigInt::from(x), BigInt::from(p.r)), e as usize);
    }
    acc
}

fn check_table(p: &SpinProfile, t: &IntersectionTable) -> Result<(), ElsvError> {
    if t.g != p.g || t.r != p.r || t.a != p.a || t.l != p.l() {
        return Err(ElsvError::TableMismatch {
            table: t.key().to_string(),
            profile: p.to_string(),
        });
    }
    Ok(())
}

/// `sum_{(b,k)} table[b,k] prod (mu_i/r)^{b_i}`
pub fn integrand_value(p: &SpinProfile, table: &IntersectionTable) -> Result<Scalar, ElsvError> {
    check_table(p, table)?;
    let mut acc = Scalar::zero();
    for (b, k) in unknowns(p.truncation(), p.l()) {
        let v = table
            .entries
            .get(&(b.clone(), k))
            .ok_or_else(|| ElsvError::IncompleteTable { b: b.clone(), k })?;
        acc += v * basis_value(p, &b);
    }
    Ok(acc)
}

/// Integrates a non-equivariant class against a table: degree-`D` monomials in
/// psi and `c_k(-R rho_* L)` are looked up, lower degrees vanish.
pub fn integrate_class(class: &GradedClass, table: &IntersectionTable) -> Result<Scalar, ElsvError> {
    let d = table.dimension();
    let mut acc = Scalar::zero();
    for (mono, coeff) in class.terms() {
        let c = coeff
            .as_constant()
            .ok_or_else(|| ElsvError::NotIntegrable(format!("coefficient {coeff} depends on t")))?;
        if mono.degree() != d {
            continue;
        }
        let mut b = vec![0u32; table.l as usize];
        let mut k = 0;
        for (s, e) in mono.factors() {
            match s {
                Symbol::Psi(i) if (1..=table.l).contains(i) => b[*i as usize - 1] += e,
                Symbol::Chern(Bundle::MinusRrhoL, j) if *e == 1 && k == 0 => k = *j,
                _ => return Err(ElsvError::NotIntegrable(format!("monomial {mono}"))),
            }
        }
        let v = table
            .entries
            .get(&(b.clone(), k))
            .ok_or(ElsvError::IncompleteTable { b, k })?;
        acc += c * v;
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Backend {
    SpecialCase01,
    SpecialCase02,
    SolveFromHurwitz,
    UserTable(IntersectionTable),
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::SpecialCase01 => "special01",
            Backend::SpecialCase02 => "special02",
            Backend::SolveFromHurwitz => "solve",
            Backend::UserTable(_) => "table",
        }
    }

    /// The special-case backend for a one- or two-pointed genus-zero profile.
    pub fn special_for(p: &SpinProfile) -> Option<Backend> {
        match p.regime {
            Regime::OnePointed => Some(Backend::SpecialCase01),
            Regime::TwoPointed => Some(Backend::SpecialCase02),
            Regime::General => None,
        }
    }
}

/// Integrand of the one-pointed case: `1/mu_1^2` when `r | mu_1 - 1`, else 0.
pub fn special_value01(p: &SpinProfile) -> Result<Scalar, ElsvError> {
    if p.regime != Regime::OnePointed {
        return Err(mismatch("special01", p));
    }
    let mu1 = p.mu[0];
    if (mu1 - 1) % p.r == 0 {
        Ok(Scalar::new(BigInt::one(), BigInt::from(mu1 as u64 * mu1 as u64)))
    } else {
        Ok(Scalar::zero())
    }
}

/// Integrand of the two-pointed case: `1/(mu_1+mu_2)` when `r | mu_1 + mu_2`, else 0.
pub fn special_value02(p: &SpinProfile) -> Result<Scalar, ElsvError> {
    if p.regime != Regime::TwoPointed {
        return Err(mismatch("special02", p));
    }
    let s = p.mu[0] + p.mu[1];
    if s % p.r == 0 {
        Ok(Scalar::new(BigInt::one(), BigInt::from(s)))
    } else {
        Ok(Scalar::zero())
    }
}

fn mismatch(backend: &str, p: &SpinProfile) -> ElsvError {
    ElsvError::BackendMismatch {
        backend: backend.to_string(),
        regime: p.regime.as_str().to_string(),
    }
}

/// Prefactor times the backend's integrand value.
pub fn evaluate(p: &SpinProfile, backend: &Backend) -> Result<Scalar, ElsvError> {
    let integrand = match backend {
        Backend::SpecialCase01 => special_value01(p)?,
        Backend::SpecialCase02 => special_value02(p)?,
        Backend::UserTable(t) => {
            if p.regime != Regime::General {
                return Err(mismatch("table", p));
            }
            integrand_value(p, t)?
        }
        Backend::SolveFromHurwitz => return Err(ElsvError::SolverRequired),
    };
    Ok(prefactor(p) * integrand)
}

/// Exact solve of `H / prefactor = sum table[b,k] prod (mu_i/r)^{b_i}` over
/// the given samples.
pub fn solve_backend(
    g: u32,
    r: u32,
    a: &[u32],
    samples: &[SpinProfile],
    oracle: &Oracle,
) -> Result<IntersectionTable, ElsvError> {
    let l = a.len() as u32;
    for s in samples {
        if s.g != g || s.r != r || s.a != a || s.regime != Regime::General {
            return Err(ElsvError::TableMismatch {
                table: TableKey { g, r, a: a.to_vec() }.to_string(),
                profile: s.to_string(),
            });
        }
    }
    let d = (3 * g + l).saturating_sub(3);
    let cols = unknowns(d, l);
    let mut rows = Vec::with_capacity(samples.len());
    for s in samples {
        let h = oracle.evaluate(&HurwitzQuery {
            profile: s.clone(),
            connected: true,
        })?;
        let rhs = h / prefactor(s);
        let row: Vec<Scalar> = cols.iter().map(|(b, _)| basis_value(s, b)).collect();
        rows.push((row, rhs));
    }
    let solution = solve_exact(&rows, cols.len(), samples)?;
    Ok(IntersectionTable {
        g,
        r,
        a: a.to_vec(),
        l,
        entries: cols.into_iter().zip(solution).collect(),
    })
}

/// Gaussian elimination over the rationals. Full column rank is required;
/// extra rows must be consistent.
fn solve_exact(
    rows: &[(Vec<Scalar>, Scalar)],
    n: usize,
    samples: &[SpinProfile],
) -> Result<Vec<Scalar>, ElsvError> {
    let mut m: Vec<Vec<Scalar>> = rows
        .iter()
        .map(|(row, rhs)| {
            let mut v = row.clone();
            v.push(rhs.clone());
            v
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for col in 0..n {
        let Some(p) = (pivot_row..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][col].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != pivot_row && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                let (src, dst) = if i < pivot_row {
                    let (a, b) = m.split_at_mut(pivot_row);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[pivot_row], &mut b[0])
                };
                for (x, y) in dst.iter_mut().zip(src.iter()) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        pivot_row += 1;
    }
    if pivots.len() < n {
        return Err(ElsvError::RankDeficient {
            rank: pivots.len(),
            unknowns: n,
            samples: rows.len(),
        });
    }
    let residuals: Vec<String> = m[pivot_row..]
        .iter()
        .enumerate()
        .filter(|(_, row)| !row[n].is_zero())
        .map(|(i, row)| format!("row {} residual {}", i + pivot_row, render(&row[n])))
        .collect();
    if !residuals.is_empty() {
        let mut residuals = residuals;
        residuals.push(format!(
            "samples: {}",
            samples.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
        ));
        return Err(ElsvError::Inconsistent { residuals });
    }
    Ok((0..n).map(|i| m[i][n].clone()).collect())
}

/// Valid profiles with fixed residue data `a`, ordered by `|mu|` then
/// lexicographically, with `|mu| <= max_size`.
pub fn generate_samples(g: u32, r: u32, a: &[u32], max_size: u32) -> Vec<SpinProfile> {
    let res: Vec<u32> = a.iter().map(|&x| r - 1 - x).collect();
    let mut out = Vec::new();
    fn rec(i: usize, res: &[u32], r: u32, budget: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == res.len() {
            out.push(cur.clone());
            return;
        }
        let mut x = if res[i] == 0 { r } else { res[i] };
        while x <= budget {
            cur.push(x);
            rec(i + 1, res, r, budget - x, cur, out);
            cur.pop();
            x += r;
        }
    }
    if a.iter().any(|&x| x >= r) {
        return out;
    }
    let mut mus = Vec::new();
    rec(0, &res, r, max_size, &mut Vec::new(), &mut mus);
    mus.sort_by(|x, y| {
        let sx: u32 = x.iter().sum();
        let sy: u32 = y.iter().sum();
        sx.cmp(&sy).then_with(|| x.cmp(y))
    });
    for mu in mus {
        if let Ok(p) = combi::validate(g, r, &mu) {
            if p.a == a && p.regime == Regime::General {
                out.push(p);
            }
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct HeldOut {
    pub profile: SpinProfile,
    pub predicted: Scalar,
    pub oracle: Scalar,
}

impl HeldOut {
    pub fn agrees(&self) -> bool {
        self.predicted == self.oracle
    }
}

#[derive(Debug, Clone)]
pub struct FitReport {
    pub table: IntersectionTable,
    pub samples: Vec<SpinProfile>,
    pub held_out: Vec<HeldOut>,
}

impl FitReport {
    pub fn held_out_ok(&self) -> bool {
        self.held_out.iter().all(HeldOut::agrees)
    }
}

/// Fits a table from the smallest samples reaching full rank, then predicts
/// up to `held_out` further samples and compares against the oracle.
pub fn fit(g: u32, r: u32, a: &[u32], oracle: &Oracle, held_out: usize) -> Result<FitReport, ElsvError> {
    fit_bounded(g, r, a, oracle, held_out, oracle.config().char_bound as u32)
}

/// As [`fit`], with samples restricted to `|mu| <= max_size`.
pub fn fit_bounded(
    g: u32,
    r: u32,
    a: &[u32],
    oracle: &Oracle,
    held_out: usize,
    max_size: u32,
) -> Result<FitReport, ElsvError> {
    let l = a.len() as u32;
    let all = generate_samples(g, r, a, max_size);
    if all.is_empty() {
        return Err(ElsvError::NoSamples { g, r, a: a.to_vec() });
    }
    let n = unknowns((3 * g + l).saturating_sub(3), l).len();
    let mut take = n.min(all.len());
    let table = loop {
        match solve_backend(g, r, a, &all[..take], oracle) {
            Ok(t) => break t,
            Err(ElsvError::RankDeficient { .. }) if take < all.len() => take += 1,
            Err(e) => return Err(e),
        }
    };
    let mut report = Vec::new();
    for p in all.iter().skip(take).take(held_out) {
        let predicted = prefactor(p) * integrand_value(p, &table)?;
        let h = oracle.evaluate(&HurwitzQuery {
            profile: p.clone(),
            connected: true,
        })?;
        report.push(HeldOut {
            profile: p.clone(),
            predicted,
            oracle: h,
        });
    }
    Ok(FitReport {
        table,
        samples: all[..take].to_vec(),
        held_out: report,
    })
}

/// In-memory table cache, optionally persisted as JSON files in a directory.
pub struct TableCache {
    dir: Option<PathBuf>,
    mem: RwLock<HashMap<TableKey, Arc<IntersectionTable>>>,
}

impl TableCache {
    pub fn new(dir: Option<PathBuf>) -> TableCache {
        TableCache {
            dir,
            mem: RwLock::new(HashMap::new()),
        }
    }

    /// Uses the directory named by `RELSV_CACHE_DIR`, if set.
    pub fn from_env() -> TableCache {
        Self::new(std::env::var_os(CACHE_ENV).map(PathBuf::from))
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn path_for(&self, key: &TableKey) -> Option<PathBuf> {
        self.dir.as_ref().map(|d| d.join(key.file_name()))
    }

    pub fn get(&self, key: &TableKey) -> Option<Arc<IntersectionTable>> {
        if let Some(t) = self.mem.read().unwrap().get(key) {
            return Some(t.clone());
        }
        let path = self.path_for(key)?;
        let t = IntersectionTable::load(&path).ok()?;
        if t.key() != *key {
            return None;
        }
        let t = Arc::new(t);
        self.mem.write().unwrap().insert(key.clone(), t.clone());
        Some(t)
    }

    pub fn insert(&self, table: IntersectionTable) -> Result<Arc<IntersectionTable>, ElsvError> {
        let key = table.key();
        if let Some(path) = self.path_for(&key) {
            std::fs::create_dir_all(path.parent().unwrap()).map_err(|e| ElsvError::Io(e.to_string()))?;
            table.save(&path)?;
        }
        let t = Arc::new(table);
        self.mem.write().unwrap().insert(key, t.clone());
        Ok(t)
    }
}

/// Evaluates any backend, fitting and caching tables for the solve backend.
pub struct Solver<'a> {
    pub oracle: &'a Oracle,
    pub cache: &'a TableCache,
    pub held_out: usize,
}

impl Solver<'_> {
    pub fn table(&self, key: &TableKey) -> Result<Arc<IntersectionTable>, ElsvError> {
        if let Some(t) = self.cache.get(key) {
            return Ok(t);
        }
        let report = fit(key.g, key.r, &key.a, self.oracle, self.held_out)?;
        if let Some(bad) = report.held_out.iter().find(|h| !h.agrees()) {
            return Err(ElsvError::Inconsistent {
                residuals: vec![format!(
                    "held-out {}: predicted {} oracle {}",
                    bad.profile,
                    render(&bad.predicted),
                    render(&bad.oracle)
                )],
            });
        }
        self.cache.insert(report.table)
    }

    pub fn evaluate(&self, p: &SpinProfile, backend: &Backend) -> Result<Scalar, ElsvError> {
        match backend {
            Backend::SolveFromHurwitz => match p.regime {
                Regime::General => {
                    let t = self.table(&TableKey::of(p))?;
                    Ok(prefactor(p) * integrand_value(p, &t)?)
                }
                _ => evaluate(p, &Backend::special_for(p).expect("unstable regime")),
            },
            _ => evaluate(p, backend),
        }
    }

    /// As [`Solver::evaluate`], with zero for an empty space.
    pub fn evaluate_gmu(&self, g: u32, r: u32, mu: &[u32], backend: &Backend) -> Result<Scalar, ElsvError> {
        match combi::validate(g, r, mu) {
            Ok(p) => self.evaluate(&p, backend),
            Err(e) if e.is_empty_space() => Ok(Scalar::zero()),
            Err(e) => Err(e.into()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combi::validate;
    use crate::ratcore::scalar::{int, q};

    #[test]
    fn prefactor_examples() {
        assert_eq!(prefactor(&validate(0, 2, &[3]).unwrap()), q(3, 2));
        assert_eq!(prefactor(&validate(0, 2, &[3, 5]).unwrap()), int(1800));
        assert_eq!(prefactor(&validate(1, 1, &[2]).unwrap()), int(12));
    }

    #[test]
    fn special_cases() {
        let p = validate(0, 2, &[3]).unwrap();
        assert_eq!(evaluate(&p, &Backend::SpecialCase01).unwrap(), q(1, 6));
        let p = validate(0, 2, &[3, 5]).unwrap();
        assert_eq!(evaluate(&p, &Backend::SpecialCase02).unwrap(), int(225));
        assert!(matches!(
            evaluate(&p, &Backend::SpecialCase01),
            Err(ElsvError::BackendMismatch { .. })
        ));
    }

    #[test]
    fn integrand_shape() {
        let p = validate(1, 1, &[2]).unwrap();
        let mut entries = BTreeMap::new();
        entries.insert((vec![1], 0), q(1, 24));
        entries.insert((vec![0], 1), q(-1, 24));
        let t = IntersectionTable {
            g: 1,
            r: 1,
            a: vec![0],
            l: 1,
            entries,
        };
        assert_eq!(integrand_value(&p, &t).unwrap(), q(1, 24));
        assert_eq!(evaluate(&p, &Backend::UserTable(t.clone())).unwrap(), q(1, 2));
        let mut partial = t.clone();
        partial.entries.remove(&(vec![0], 1));
        assert!(matches!(
            integrand_value(&p, &partial),
            Err(ElsvError::IncompleteTable { k: 1, .. })
        ));
        let back = IntersectionTable::from_json(&t.to_json()).unwrap();
        assert_eq!(back, t);
        assert_eq!(t.to_json()["entries"][0]["value"], "-1/24");
    }

    #[test]
    fn unknown_counts() {
        assert_eq!(unknowns(0, 3).len(), 1);
        assert_eq!(unknowns(1, 1).len(), 2);
        assert_eq!(unknowns(3, 3).len(), 20);
    }

    #[test]
    fn samples_share_residues() {
        let s = generate_samples(0, 2, &[1, 1, 0], 9);
        assert!(!s.is_empty());
        for p in &s {
            assert_eq!(p.a, vec![1, 1, 0]);
        }
        let sizes: Vec<u32> = s.iter().map(SpinProfile::size).collect();
        assert!(sizes.windows(2).all(|w| w[0] <= w[1]));
    }
}
