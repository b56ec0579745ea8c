//! Symmetric-group data for the Hurwitz oracle: partitions, characters,
//! dimensions, `z_mu`, Bernoulli numbers and shifted power sums.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::ratcore::scalar::{self, factorial, q, Scalar};

pub const DEFAULT_BOUND: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CharError {
    #[error("character table for S_{d} exceeds the configured bound {bound}")]
    BoundExceeded { d: usize, bound: usize },
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
}

/// Weakly decreasing list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    parts: Vec<u32>,
}

impl Partition {
    pub fn new(parts: Vec<u32>) -> Result<Self, CharError> {
        if parts.contains(&0) || !parts.windows(2).all(|w| w[0] >= w[1]) {
            return Err(CharError::InvalidPartition(format!("{parts:?}")));
        }
        Ok(Partition { parts })
    }

    /// Sorts the given parts into a partition.
    pub fn from_unsorted(parts: &[u32]) -> Result<Self, CharError> {
        let mut v = parts.to_vec();
        v.sort_unstable_by(|a, b| b.cmp(a));
        Self::new(v)
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn size(&self) -> u32 {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn conjugate(&self) -> Partition {
        let n = self.parts.first().copied().unwrap_or(0);
        let parts = (1..=n)
            .map(|j| self.parts.iter().filter(|&&p| p >= j).count() as u32)
            .collect();
        Partition { parts }
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v: Vec<String> = self.parts.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", v.join(","))
    }
}

/// All partitions of `d` in reverse lexicographic order.
pub fn partitions(d: u32) -> Vec<Partition> {
    fn rec(rem: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if rem == 0 {
            out.push(Partition { parts: cur.clone() });
            return;
        }
        for p in (1..=rem.min(max)).rev() {
            cur.push(p);
            rec(rem - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(d, d, &mut Vec::new(), &mut out);
    out
}

/// `d! / prod(hook lengths)`
pub fn dim(lambda: &Partition) -> BigInt {
    let conj = lambda.conjugate();
    let mut hooks = BigInt::one();
    for (i, &li) in lambda.parts.iter().enumerate() {
        for j in 0..li as usize {
            let arm = li as usize - j - 1;
            let leg = conj.parts[j] as usize - i - 1;
            hooks *= arm + leg + 1;
        }
    }
    factorial(lambda.size() as u64) / hooks
}

/// `prod_i i^{m_i} m_i!`
pub fn z(rho: &Partition) -> BigInt {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for &p in &rho.parts {
        *counts.entry(p).or_insert(0) += 1;
    }
    let mut acc = BigInt::one();
    for (i, m) in counts {
        acc *= num_traits::pow(BigInt::from(i), m as usize) * factorial(m);
    }
    acc
}

/// Murnaghan-Nakayama on beta-sets, memoized on `(lambda, remaining rho)`.
struct Mn {
    memo: HashMap<(Vec<u32>, Vec<u32>), i64>,
}

impl Mn {
    fn chi(&mut self, lambda: &[u32], rho: &[u32]) -> i64 {
        if rho.is_empty() {
            return if lambda.is_empty() { 1 } else { 0 };
        }
        let key = (lambda.to_vec(), rho.to_vec());
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let k = rho[0];
        let n = lambda.len() as u32;
        let beta: Vec<u32> = lambda
            .iter()
            .enumerate()
            .map(|(i, &l)| l + n - 1 - i as u32)
            .collect();
        let mut total = 0i64;
        for &b in &beta {
            if b < k || beta.contains(&(b - k)) {
                continue;
            }
            let nb = b - k;
            let crossings = beta.iter().filter(|&&x| nb < x && x < b).count();
            let mut next: Vec<u32> = beta.iter().map(|&x| if x == b { nb } else { x }).collect();
            next.sort_unstable_by(|x, y| y.cmp(x));
            let shape: Vec<u32> = next
                .iter()
                .enumerate()
                .map(|(i, &x)| x - (n - 1 - i as u32))
                .filter(|&p| p > 0)
                .collect();
            let v = self.chi(&shape, &rho[1..]);
            total += if crossings % 2 == 0 { v } else { -v };
        }
        self.memo.insert(key, total);
        total
    }
}

/// Full integer character table of `S_d`.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    d: u32,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    values: Vec<Vec<i64>>,
}

impl CharacterTable {
    pub fn build(d: u32) -> CharacterTable {
        let partitions = partitions(d);
        let index = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let mut mn = Mn {
            memo: HashMap::new(),
        };
        let values = partitions
            .iter()
            .map(|lam| {
                partitions
                    .iter()
                    .map(|rho| mn.chi(&lam.parts, &rho.parts))
                    .collect()
            })
            .collect();
        CharacterTable {
            d,
            partitions,
            index,
            values,
        }
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    /// `chi^lambda(rho)`; both must be partitions of `d`.
    pub fn chi(&self, lambda: &Partition, rho: &Partition) -> i64 {
        self.values[self.index[lambda]][self.index[rho]]
    }
}

fn cache() -> &'static RwLock<HashMap<u32, Arc<CharacterTable>>> {
    static CACHE: OnceLock<RwLock<HashMap<u32, Arc<CharacterTable>>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

pub fn characters(d: u32) -> Result<Arc<CharacterTable>, CharError> {
    characters_bounded(d, DEFAULT_BOUND)
}

/// Cached table; concurrent first builds may race, producing identical tables.
pub fn characters_bounded(d: u32, bound: usize) -> Result<Arc<CharacterTable>, CharError> {
    if d as usize > bound {
        return Err(CharError::BoundExceeded {
            d: d as usize,
            bound,
        });
    }
    if let Some(t) = cache().read().unwrap().get(&d) {
        return Ok(t.clone());
    }
    let table = Arc::new(CharacterTable::build(d));
    let mut w = cache().write().unwrap();
    Ok(w.entry(d).or_insert(table).clone())
}

/// Exact Bernoulli number with `B_1 = -1/2`.
pub fn bernoulli(n: u32) -> Scalar {
    let mut b: Vec<Scalar> = vec![Scalar::one()];
    for m in 1..=n as u64 {
        let mut acc = Scalar::zero();
        for (k, bk) in b.iter().enumerate() {
            acc += scalar::big(binomial(BigInt::from(m + 1), BigInt::from(k))) * bk;
        }
        b.push(-acc / scalar::int(m as i64 + 1));
    }
    b.pop().unwrap()
}

/// `zeta(-k) = -B_{k+1}/(k+1)` for `k >= 1`.
pub fn zeta_at_negative(k: u32) -> Scalar {
    -bernoulli(k + 1) / scalar::int(k as i64 + 1)
}

/// Shifted symmetric power sum
/// `sum_i [(l_i - i + 1/2)^k - (-i + 1/2)^k] + (1 - 2^-k) zeta(-k)`.
pub fn shifted_power_sum(lambda: &Partition, k: u32) -> Scalar {
    let half = q(1, 2);
    let mut acc = Scalar::zero();
    for (i, &l) in lambda.parts.iter().enumerate() {
        let i = scalar::int(i as i64 + 1);
        let a = scalar::int(l as i64) - &i + &half;
        let b = -&i + &half;
        acc += num_traits::pow(a, k as usize) - num_traits::pow(b, k as usize);
    }
    acc + shifted_constant(k)
}

/// `(1 - 2^-k) zeta(-k)`, the value of the shifted power sum on the empty partition.
pub fn shifted_constant(k: u32) -> Scalar {
    let two_k = num_traits::pow(BigInt::from(2), k as usize);
    (Scalar::one() - Scalar::new(BigInt::one(), two_k)) * zeta_at_negative(k)
}
