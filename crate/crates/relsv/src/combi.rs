//! Profile validation and the integer bookkeeping derived from `(g, r, mu)`.

use num_bigint::BigInt;
use num_traits::One;
use serde::Serialize;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

use crate::ratcore::scalar::{factorial, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProfileError {
    /// The moduli space is empty: `2g - 2 + l + |mu|` is not divisible by `r`.
    #[error("empty space: 2g-2+l+|mu| = {total} has residue {residue} mod {r}")]
    Divisibility { total: i64, r: u32, residue: u32 },
    #[error("malformed profile: {0}")]
    Malformed(String),
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl ProfileError {
    pub fn is_empty_space(&self) -> bool {
        matches!(self, ProfileError::Divisibility { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Regime {
    #[serde(rename = "01")]
    OnePointed,
    #[serde(rename = "02")]
    TwoPointed,
    #[serde(rename = "general")]
    General,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::OnePointed => "01",
            Regime::TwoPointed => "02",
            Regime::General => "general",
        }
    }
}

/// A validated `(g, r, mu)` with its derived data.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SpinProfile {
    pub g: u32,
    pub r: u32,
    pub mu: Vec<u32>,
    pub m: u32,
    pub a: Vec<u32>,
    pub regime: Regime,
}

impl fmt::Display for SpinProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mu: Vec<String> = self.mu.iter().map(|x| x.to_string()).collect();
        write!(f, "g={} r={} mu=({})", self.g, self.r, mu.join(","))
    }
}

/// `<a/r>`, the remainder in `a = floor(a/r) r + <a/r>`.
pub fn remainder(a: u32, r: u32) -> u32 {
    a % r
}

pub fn validate(g: u32, r: u32, mu: &[u32]) -> Result<SpinProfile, ProfileError> {
    if r == 0 {
        return Err(ProfileError::Malformed("r must be positive".into()));
    }
    if mu.is_empty() {
        return Err(ProfileError::Malformed("mu must have at least one part".into()));
    }
    if mu.contains(&0) {
        return Err(ProfileError::Malformed("parts of mu must be positive".into()));
    }
    let l = mu.len() as i64;
    let size: i64 = mu.iter().map(|&x| x as i64).sum();
    let total = 2 * g as i64 - 2 + l + size;
    let residue = total.rem_euclid(r as i64);
    if residue != 0 || total < 0 {
        return Err(ProfileError::Divisibility {
            total,
            r,
            residue: residue as u32,
        });
    }
    let m = (total / r as i64) as u32;
    let a = mu.iter().map(|&x| r - 1 - remainder(x, r)).collect();
    let regime = match (g, mu.len()) {
        (0, 1) => Regime::OnePointed,
        (0, 2) => Regime::TwoPointed,
        _ => Regime::General,
    };
    Ok(SpinProfile {
        g,
        r,
        mu: mu.to_vec(),
        m,
        a,
        regime,
    })
}

impl SpinProfile {
    pub fn l(&self) -> u32 {
        self.mu.len() as u32
    }

    pub fn size(&self) -> u32 {
        self.mu.iter().sum()
    }

    /// `3g - 3 + l`, negative for the two unstable regimes.
    pub fn dimension(&self) -> i64 {
        3 * self.g as i64 - 3 + self.l() as i64
    }

    /// Truncation degree for graded classes on this profile.
    pub fn truncation(&self) -> u32 {
        self.dimension().max(0) as u32
    }

    pub fn floors(&self) -> Vec<u32> {
        self.mu.iter().map(|&x| x / self.r).collect()
    }

    pub fn floor_sum(&self) -> i64 {
        self.floors().iter().map(|&x| x as i64).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("profile serializes")
    }
}

/// Degree of the root bundle `L` on the contracted component:
/// `m - l - sum floor(mu_i/r)`, cross-checked against `(2g - 2 - sum a_i)/r`.
pub fn spin_bundle_degree(p: &SpinProfile) -> Result<i64, ProfileError> {
    let direct = p.m as i64 - p.l() as i64 - p.floor_sum();
    let num = 2 * p.g as i64 - 2 - p.a.iter().map(|&x| x as i64).sum::<i64>();
    if num.rem_euclid(p.r as i64) != 0 || num / p.r as i64 != direct {
        return Err(ProfileError::Inconsistent(format!(
            "{p}: m-l-sum floor = {direct}, (2g-2-sum a)/r = {num}/{}",
            p.r
        )));
    }
    Ok(direct)
}

/// Degree of the root bundle on the vertex before forgetting the orbifold
/// structure at the flag nodes with `r | mu_i`: `spin_bundle_degree + delta`.
pub fn vertex_root_degree(p: &SpinProfile) -> Result<i64, ProfileError> {
    Ok(spin_bundle_degree(p)? + flag_divisible_count(p) as i64)
}

/// `floor(mu_i / r)`
pub fn edge_root_degree(mu_i: u32, r: u32) -> u32 {
    mu_i / r
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FixedLocusLabel {
    /// Number of branch points sent to infinity.
    pub n: u32,
    pub simple: bool,
}

impl fmt::Display for FixedLocusLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.simple {
            write!(f, "h{} (simple)", self.n)
        } else {
            write!(f, "h{}", self.n)
        }
    }
}

/// Labels `h_n = [(m-n)(0) + n(inf)]` for `n = 0..=m`.
pub fn fixed_locus_labels(p: &SpinProfile) -> Vec<FixedLocusLabel> {
    (0..=p.m)
        .map(|n| FixedLocusLabel { n, simple: n == 0 })
        .collect()
}

/// `1 / (mu_1 ... mu_l)`
pub fn pushforward_degree(p: &SpinProfile) -> Scalar {
    let prod: BigInt = p.mu.iter().map(|&x| BigInt::from(x)).product();
    Scalar::new(BigInt::one(), prod)
}

/// `#{i : r | mu_i}`
pub fn flag_divisible_count(p: &SpinProfile) -> u32 {
    p.mu.iter().filter(|&&x| x % p.r == 0).count() as u32
}

/// `|Aut mu|` for the underlying unordered partition.
pub fn aut_order(mu: &[u32]) -> BigInt {
    let mut counts: BTreeMap<u32, u64> = BTreeMap::new();
    for &x in mu {
        *counts.entry(x).or_insert(0) += 1;
    }
    counts.values().map(|&c| factorial(c)).product()
}

/// Valid profiles with `g <= g_max`, `1 <= l <= l_max`, `1 <= r <= r_max` and
/// non-decreasing parts `mu_i <= mu_max`, sorted.
pub fn grid(g_max: u32, l_max: u32, r_max: u32, mu_max: u32) -> Vec<SpinProfile> {
    fn rec(l: usize, lo: u32, hi: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == l {
            out.push(cur.clone());
            return;
        }
        for x in lo..=hi {
            cur.push(x);
            rec(l, x, hi, cur, out);
            cur.pop();
        }
    }
    let mut mus = Vec::new();
    for l in 1..=l_max as usize {
        rec(l, 1, mu_max, &mut Vec::new(), &mut mus);
    }
    let mut out = Vec::new();
    for g in 0..=g_max {
        for r in 1..=r_max {
            for mu in &mus {
                if let Ok(p) = validate(g, r, mu) {
                    out.push(p);
                }
            }
        }
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratcore::scalar::q;

    #[test]
    fn validate_examples() {
        let p = validate(0, 2, &[3]).unwrap();
        assert_eq!((p.m, p.a.clone(), p.regime), (1, vec![0], Regime::OnePointed));
        assert_eq!(
            validate(0, 2, &[2]),
            Err(ProfileError::Divisibility { total: 1, r: 2, residue: 1 })
        );
        assert!(matches!(
            validate(0, 3, &[4, 6]),
            Err(ProfileError::Divisibility { residue: 1, .. })
        ));
        let p = validate(1, 3, &[4, 6]).unwrap();
        assert_eq!((p.m, p.a.clone(), p.regime), (4, vec![1, 2], Regime::General));
        assert!(matches!(validate(0, 0, &[3]), Err(ProfileError::Malformed(_))));
        assert!(matches!(validate(0, 2, &[]), Err(ProfileError::Malformed(_))));
        assert!(matches!(validate(0, 2, &[0, 2]), Err(ProfileError::Malformed(_))));
        assert!(validate(0, 2, &[2]).unwrap_err().is_empty_space());
        assert_eq!(validate(0, 4, &[1]).unwrap().m, 0);
    }

    #[test]
    fn remainder_examples() {
        assert_eq!(remainder(7, 3), 1);
        assert_eq!(remainder(6, 3), 0);
        assert_eq!(remainder(2, 5), 2);
    }

    #[test]
    fn spin_bundle_degree_examples() {
        assert_eq!(spin_bundle_degree(&validate(0, 2, &[3, 5]).unwrap()), Ok(-1));
        assert_eq!(spin_bundle_degree(&validate(1, 3, &[2]).unwrap()), Ok(0));
        let p = validate(1, 1, &[2]).unwrap();
        assert_eq!(p.m, 3);
        assert_eq!(spin_bundle_degree(&p), Ok(0));
    }

    #[test]
    fn edge_root_degree_examples() {
        assert_eq!(edge_root_degree(3, 2), 1);
        assert_eq!(edge_root_degree(6, 3), 2);
        assert_eq!(edge_root_degree(1, 5), 0);
    }

    #[test]
    fn label_examples() {
        let p = validate(0, 1, &[3]).unwrap();
        assert_eq!(p.m, 2);
        let labels = fixed_locus_labels(&p);
        assert_eq!(labels.len(), 3);
        assert!(labels[0].simple && !labels[1].simple && !labels[2].simple);
        assert_eq!(labels[2].n, 2);
        let p0 = validate(0, 3, &[1]).unwrap();
        assert_eq!(p0.m, 0);
        assert_eq!(fixed_locus_labels(&p0).len(), 1);
        assert_eq!(fixed_locus_labels(&validate(0, 2, &[3]).unwrap()).len(), 2);
    }

    #[test]
    fn pushforward_and_flags() {
        assert_eq!(pushforward_degree(&validate(0, 2, &[3]).unwrap()), q(1, 3));
        assert_eq!(pushforward_degree(&validate(0, 2, &[3, 5]).unwrap()), q(1, 15));
        assert_eq!(pushforward_degree(&validate(0, 1, &[1, 1]).unwrap()), q(1, 1));
        assert_eq!(flag_divisible_count(&validate(1, 2, &[3, 4, 2]).unwrap()), 2);
        assert_eq!(flag_divisible_count(&validate(0, 1, &[3, 4]).unwrap()), 2);
        assert_eq!(flag_divisible_count(&validate(3, 5, &[3, 4, 1]).unwrap()), 0);
    }

    #[test]
    fn vertex_degree_carries_divisible_flags() {
        let p = validate(1, 1, &[2]).unwrap();
        assert_eq!(vertex_root_degree(&p), Ok(1));
    }

    #[test]
    fn profile_json() {
        let v = validate(0, 2, &[3]).unwrap().to_json();
        assert_eq!(
            v,
            serde_json::json!({"g":0,"r":2,"mu":[3],"m":1,"a":[0],"regime":"01"})
        );
    }

    #[test]
    fn aut() {
        assert_eq!(aut_order(&[1, 1, 2, 2, 2]), BigInt::from(12));
    }
}
