//! Independent oracle for `H^r_{g,mu}`.
//!
//! The primary route is a character sum over completed-cycle eigenvalues with
//! connected parts extracted by inclusion-exclusion over labelled parts and
//! insertion slots. At `r = 1` a brute-force monodromy count is available as
//! ground truth. The normalization relating the bracket to `H^r` is fitted
//! once per `r` against closed-form values and then applied uniformly.

use std::collections::HashMap;
use std::fmt;
use std::sync::RwLock;

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::charsym::{self, CharError, Partition};
use crate::combi::{self, ProfileError, Regime, SpinProfile};
use crate::elsv::{self, Backend};
use crate::ratcore::scalar::{self, factorial, render, Scalar};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HurwitzError {
    #[error(transparent)]
    Char(#[from] CharError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
    #[error("enumeration bound exceeded: {0}")]
    Bound(String),
    #[error(transparent)]
    Calibration(#[from] CalibrationError),
    #[error("closed-form target: {0}")]
    Target(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CalibrationError {
    #[error("calibration for r={r} needs two points with equal l and consecutive m")]
    Underdetermined { r: u32 },
    #[error("calibration for r={r}: no rational root for beta^{l} = {value}")]
    NoRoot { r: u32, l: u32, value: String },
    #[error("calibration for r={r} is inconsistent: {}", .diagnostics.summary())]
    Inconsistent {
        r: u32,
        diagnostics: CalibrationDiagnostics,
    },
}

/// Why no single normalization fits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CalibrationDiagnostics {
    pub attempts: Vec<CalibrationAttempt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CalibrationAttempt {
    pub aut_mode: AutMode,
    pub alpha: Option<String>,
    pub beta: Option<String>,
    pub misfits: Vec<Misfit>,
}

/// A calibration point whose target differs from the fitted prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Misfit {
    pub profile: String,
    pub target: String,
    pub predicted: String,
    /// `target / predicted`
    pub ratio: String,
}

impl CalibrationDiagnostics {
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .attempts
            .iter()
            .map(|a| {
                let first = a
                    .misfits
                    .first()
                    .map(|m| format!(", e.g. {} target {} predicted {} ratio {}", m.profile, m.target, m.predicted, m.ratio))
                    .unwrap_or_default();
                format!(
                    "{:?}: alpha={} beta={} with {} misfit(s){}",
                    a.aut_mode,
                    a.alpha.as_deref().unwrap_or("-"),
                    a.beta.as_deref().unwrap_or("-"),
                    a.misfits.len(),
                    first
                )
            })
            .collect();
        parts.join("; ")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum AutMode {
    /// Parts of mu are labelled; connected values carry `|Aut mu|`.
    Ordered,
    Unordered,
}

/// `H = alpha^m beta^l * connected bracket`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Calibration {
    pub r: u32,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub aut_mode: AutMode,
}

impl fmt::Display for Calibration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "r={} alpha={} beta={} {:?}",
            self.r,
            render(&self.alpha),
            render(&self.beta),
            self.aut_mode
        )
    }
}

/// Which closed-form values a calibration is fitted against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CalibrationSet {
    /// Every one- and two-pointed genus-zero value.
    All,
    OnePointed,
    TwoPointed,
}

#[derive(Debug, Clone)]
pub struct CalibrationPoint {
    pub profile: SpinProfile,
    pub target: Scalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Characters,
    BruteForce,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Characters => "characters",
            Method::BruteForce => "bruteforce",
        }
    }
}

#[derive(Debug, Clone)]
pub struct HurwitzQuery {
    pub profile: SpinProfile,
    pub connected: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct OracleConfig {
    pub char_bound: usize,
    pub brute_max_size: u32,
    pub brute_max_m: u32,
    pub calibration_set: CalibrationSet,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            char_bound: charsym::DEFAULT_BOUND,
            brute_max_size: 7,
            brute_max_m: 6,
            calibration_set: CalibrationSet::TwoPointed,
        }
    }
}

/// `sum_{lambda |- d} (dim/d!) (chi^lambda(mu)/z_mu) pbar_{r+1}(lambda)^m` for
/// unordered `mu`, using the default character bound.
pub fn disconnected_bracket(mu: &[u32], r: u32, m: u32) -> Result<Scalar, HurwitzError> {
    bracket(mu, r, m, charsym::DEFAULT_BOUND)
}

fn bracket(mu: &[u32], r: u32, m: u32, bound: usize) -> Result<Scalar, HurwitzError> {
    let rho = Partition::from_unsorted(mu)?;
    let d = rho.size();
    let table = charsym::characters_bounded(d, bound)?;
    let dfact = scalar::big(factorial(d as u64));
    let zmu = scalar::big(charsym::z(&rho));
    let terms: Vec<Scalar> = table
        .partitions()
        .par_iter()
        .map(|lam| {
            let chi = table.chi(lam, &rho);
            if chi == 0 {
                return Scalar::zero();
            }
            let pb = charsym::shifted_power_sum(lam, r + 1);
            scalar::big(charsym::dim(lam)) * scalar::int(chi) * num_traits::pow(pb, m as usize)
        })
        .collect();
    let sum: Scalar = terms.into_iter().fold(Scalar::zero(), |a, b| a + b);
    Ok(sum / (dfact * zmu))
}

/// Genus forced on a connected piece with `parts` and `k` insertions, if it is
/// a non-negative integer.
pub fn forced_genus(parts: &[u32], r: u32, k: u32) -> Option<u32> {
    let twice = r as i64 * k as i64 + 2 - parts.len() as i64 - parts.iter().map(|&x| x as i64).sum::<i64>();
    if twice < 0 || twice % 2 != 0 {
        None
    } else {
        Some((twice / 2) as u32)
    }
}

/// Character-sum oracle with memoized brackets and per-`r` calibrations.
pub struct Oracle {
    cfg: OracleConfig,
    brackets: RwLock<HashMap<(Vec<u32>, u32, u32), Scalar>>,
    calibrations: RwLock<HashMap<(u32, CalibrationSet), Calibration>>,
}

impl Default for Oracle {
    fn default() -> Self {
        Oracle::new(OracleConfig::default())
    }
}

impl Oracle {
    pub fn new(cfg: OracleConfig) -> Oracle {
        Oracle {
            cfg,
            brackets: RwLock::new(HashMap::new()),
            calibrations: RwLock::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &OracleConfig {
        &self.cfg
    }

    /// Memoized raw bracket for the unordered partition underlying `mu`.
    pub fn raw_bracket(&self, mu: &[u32], r: u32, m: u32) -> Result<Scalar, HurwitzError> {
        let mut key_mu = mu.to_vec();
        key_mu.sort_unstable_by(|a, b| b.cmp(a));
        let key = (key_mu, r, m);
        if let Some(v) = self.brackets.read().unwrap().get(&key) {
            return Ok(v.clone());
        }
        let v = bracket(&key.0, r, m, self.cfg.char_bound)?;
        self.brackets.write().unwrap().insert(key, v.clone());
        Ok(v)
    }

    fn disconnected(&self, mu: &[u32], r: u32, m: u32, mode: AutMode) -> Result<Scalar, HurwitzError> {
        let raw = self.raw_bracket(mu, r, m)?;
        Ok(match mode {
            AutMode::Ordered => raw * scalar::big(combi::aut_order(mu)),
            AutMode::Unordered => raw,
        })
    }

    /// Connected bracket for labelled parts `mu` with `m` labelled insertions.
    pub fn connected(&self, mu: &[u32], r: u32, m: u32, mode: AutMode) -> Result<Scalar, HurwitzError> {
        self.connected_impl(mu, r, m, mode, true)
    }

    /// As [`Oracle::connected`], but without skipping pieces whose forced genus
    /// is not a non-negative integer. Those pieces must come out as zero anyway.
    pub fn connected_unpruned(&self, mu: &[u32], r: u32, m: u32, mode: AutMode) -> Result<Scalar, HurwitzError> {
        self.connected_impl(mu, r, m, mode, false)
    }

    fn connected_impl(
        &self,
        mu: &[u32],
        r: u32,
        m: u32,
        mode: AutMode,
        prune: bool,
    ) -> Result<Scalar, HurwitzError> {
        if mu.len() > 16 {
            return Err(HurwitzError::Bound(format!("{} parts", mu.len())));
        }
        let full = (1u32 << mu.len()) - 1;
        let mut memo: HashMap<(u32, u32), Scalar> = HashMap::new();
        self.conn_block(mu, full, m, r, mode, prune, &mut memo)
    }

    #[allow(clippy::too_many_arguments)]
    fn conn_block(
        &self,
        mu: &[u32],
        mask: u32,
        k: u32,
        r: u32,
        mode: AutMode,
        prune: bool,
        memo: &mut HashMap<(u32, u32), Scalar>,
    ) -> Result<Scalar, HurwitzError> {
        if let Some(v) = memo.get(&(mask, k)) {
            return Ok(v.clone());
        }
        let parts = select(mu, mask);
        let value = if mask == 0 {
            // degree-zero pieces: exp(c x) has connected part c x
            if k == 1 {
                charsym::shifted_constant(r + 1)
            } else {
                Scalar::zero()
            }
        } else if prune && forced_genus(&parts, r, k).is_none() {
            Scalar::zero()
        } else {
            let mut val = self.disconnected(&parts, r, k, mode)?;
            let first = mask & mask.wrapping_neg();
            let rest = mask ^ first;
            let mut sub = rest;
            loop {
                let block = sub | first;
                let comp = mask ^ block;
                for j in 0..=k {
                    if block == mask && j == k {
                        continue;
                    }
                    let c = self.conn_block(mu, block, j, r, mode, prune, memo)?;
                    if c.is_zero() {
                        continue;
                    }
                    let dis = self.disconnected(&select(mu, comp), r, k - j, mode)?;
                    let bin = scalar::big(binomial(BigInt::from(k), BigInt::from(j)));
                    val -= bin * c * dis;
                }
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & rest;
            }
            val
        };
        memo.insert((mask, k), value.clone());
        Ok(value)
    }

    /// Calibration against the closed-form values selected by `set`, memoized.
    pub fn calibration(&self, r: u32, set: CalibrationSet) -> Result<Calibration, HurwitzError> {
        if let Some(c) = self.calibrations.read().unwrap().get(&(r, set)) {
            return Ok(c.clone());
        }
        let c = self.calibrate_on(r, &calibration_points(r, set)?)?;
        self.calibrations.write().unwrap().insert((r, set), c.clone());
        Ok(c)
    }

    /// Fits `alpha`, `beta` and the automorphism convention to `points`.
    pub fn calibrate_on(&self, r: u32, points: &[CalibrationPoint]) -> Result<Calibration, HurwitzError> {
        let mut attempts = Vec::new();
        for mode in [AutMode::Ordered, AutMode::Unordered] {
            let mut ratios = Vec::new();
            for pt in points {
                let raw = self.connected(&pt.profile.mu, r, pt.profile.m, mode)?;
                ratios.push((pt, raw));
            }
            let attempt = fit_attempt(r, mode, &ratios)?;
            match attempt {
                Ok(c) => return Ok(c),
                Err(a) => attempts.push(a),
            }
        }
        Err(CalibrationError::Inconsistent {
            r,
            diagnostics: CalibrationDiagnostics { attempts },
        }
        .into())
    }

    /// `H^r_{g,mu}` by the character route under the configured calibration.
    pub fn evaluate(&self, query: &HurwitzQuery) -> Result<Scalar, HurwitzError> {
        let p = &query.profile;
        let cal = self.calibration(p.r, self.cfg.calibration_set)?;
        self.evaluate_with(query, &cal)
    }

    pub fn evaluate_with(&self, query: &HurwitzQuery, cal: &Calibration) -> Result<Scalar, HurwitzError> {
        let p = &query.profile;
        let raw = if query.connected {
            self.connected(&p.mu, p.r, p.m, cal.aut_mode)?
        } else {
            self.disconnected(&p.mu, p.r, p.m, cal.aut_mode)?
        };
        Ok(normalize(cal, p, raw))
    }

    /// Connected `H^r_{g,mu}`, or zero when the space is empty.
    pub fn evaluate_gmu(&self, g: u32, r: u32, mu: &[u32]) -> Result<Scalar, HurwitzError> {
        match combi::validate(g, r, mu) {
            Ok(p) => self.evaluate(&HurwitzQuery {
                profile: p,
                connected: true,
            }),
            Err(e) if e.is_empty_space() => Ok(Scalar::zero()),
            Err(e) => Err(e.into()),
        }
    }

    /// Brute-force value at `r = 1` under this oracle's bounds.
    pub fn brute_force(&self, mu: &[u32], m: u32) -> Result<Scalar, HurwitzError> {
        brute_force_r1_bounded(mu, m, self.cfg.brute_max_size, self.cfg.brute_max_m)
    }
}

fn normalize(cal: &Calibration, p: &SpinProfile, raw: Scalar) -> Scalar {
    let a = num_traits::pow(cal.alpha.clone(), p.m as usize);
    let b = num_traits::pow(cal.beta.clone(), p.l() as usize);
    a * b * raw
}

fn select(mu: &[u32], mask: u32) -> Vec<u32> {
    mu.iter()
        .enumerate()
        .filter(|(i, _)| mask >> i & 1 == 1)
        .map(|(_, &x)| x)
        .collect()
}

fn rational_root(x: &Scalar, n: u32) -> Option<Scalar> {
    if n == 1 {
        return Some(x.clone());
    }
    if x.is_negative() && n % 2 == 0 {
        return None;
    }
    let sign = if x.is_negative() { -1 } else { 1 };
    let num = x.numer().abs();
    let den = x.denom().clone();
    let a = num.nth_root(n);
    let b = den.nth_root(n);
    if num_traits::pow(a.clone(), n as usize) == num && num_traits::pow(b.clone(), n as usize) == den {
        Some(Scalar::new(a * sign, b))
    } else {
        None
    }
}

fn fit_attempt(
    r: u32,
    mode: AutMode,
    ratios: &[(&CalibrationPoint, Scalar)],
) -> Result<Result<Calibration, CalibrationAttempt>, HurwitzError> {
    let usable: Vec<(&SpinProfile, Scalar)> = ratios
        .iter()
        .filter(|(_, raw)| !raw.is_zero())
        .map(|(pt, raw)| (&pt.profile, &pt.target / raw))
        .collect();
    // alpha from two points with equal l and consecutive m
    let mut alpha = None;
    'outer: for (p1, c1) in &usable {
        for (p2, c2) in &usable {
            if p1.l() == p2.l() && p2.m == p1.m + 1 && !c1.is_zero() {
                alpha = Some(c2 / c1);
                break 'outer;
            }
        }
    }
    let alpha = match alpha {
        Some(a) => a,
        None => return Err(CalibrationError::Underdetermined { r }.into()),
    };
    // beta from the point with the fewest parts, positive root
    let (pb, cb) = usable
        .iter()
        .min_by_key(|(p, _)| (p.l(), p.m))
        .ok_or(CalibrationError::Underdetermined { r })?;
    let beta_l = cb / num_traits::pow(alpha.clone(), pb.m as usize);
    let beta = match rational_root(&beta_l, pb.l()) {
        Some(b) => b,
        None => {
            return Ok(Err(CalibrationAttempt {
                aut_mode: mode,
                alpha: Some(render(&alpha)),
                beta: None,
                misfits: vec![Misfit {
                    profile: pb.to_string(),
                    target: render(&beta_l),
                    predicted: "-".into(),
                    ratio: "-".into(),
                }],
            }))
        }
    };
    let cal = Calibration {
        r,
        alpha,
        beta,
        aut_mode: mode,
    };
    let mut misfits = Vec::new();
    for (pt, raw) in ratios {
        let predicted = normalize(&cal, &pt.profile, raw.clone());
        if predicted != pt.target {
            let ratio = if predicted.is_zero() {
                "inf".to_string()
            } else {
                render(&(&pt.target / &predicted))
            };
            misfits.push(Misfit {
                profile: pt.profile.to_string(),
                target: render(&pt.target),
                predicted: render(&predicted),
                ratio,
            });
        }
    }
    if misfits.is_empty() {
        Ok(Ok(cal))
    } else {
        Ok(Err(CalibrationAttempt {
            aut_mode: mode,
            alpha: Some(render(&cal.alpha)),
            beta: Some(render(&cal.beta)),
            misfits,
        }))
    }
}

/// Closed-form genus-zero values used to pin the normalization. The
/// one-pointed family is `mu_1 = r k + 1`; the two-pointed family is every
/// ordered pair with `mu_1 + mu_2 <= 8` divisible by `r`.
pub fn calibration_points(r: u32, set: CalibrationSet) -> Result<Vec<CalibrationPoint>, HurwitzError> {
    let mut out = Vec::new();
    if matches!(set, CalibrationSet::All | CalibrationSet::OnePointed) {
        for k in 1..=4u32 {
            let mu1 = r * k + 1;
            if mu1 > 9 {
                break;
            }
            out.push(point(0, r, &[mu1], Backend::SpecialCase01)?);
        }
    }
    if matches!(set, CalibrationSet::All | CalibrationSet::TwoPointed) {
        for s in 2..=8u32 {
            if s % r != 0 {
                continue;
            }
            for a in 1..s {
                out.push(point(0, r, &[a, s - a], Backend::SpecialCase02)?);
            }
        }
    }
    Ok(out)
}

fn point(g: u32, r: u32, mu: &[u32], backend: Backend) -> Result<CalibrationPoint, HurwitzError> {
    let profile = combi::validate(g, r, mu)?;
    let target = elsv::evaluate(&profile, &backend).map_err(|e| HurwitzError::Target(e.to_string()))?;
    Ok(CalibrationPoint { profile, target })
}

/// One-shot strict calibration of the oracle against every closed-form point.
pub fn calibrate(r: u32) -> Result<Calibration, HurwitzError> {
    Oracle::default().calibration(r, CalibrationSet::All)
}

/// `|Aut mu| / d! * #{(tau_1..tau_m) transpositions : the product has cycle
/// type mu and the tau generate a transitive group}`.
pub fn brute_force_r1(mu: &[u32], m: u32) -> Result<Scalar, HurwitzError> {
    brute_force_r1_bounded(mu, m, 7, 6)
}

pub fn brute_force_r1_bounded(mu: &[u32], m: u32, max_size: u32, max_m: u32) -> Result<Scalar, HurwitzError> {
    let d: u32 = mu.iter().sum();
    if d > max_size || m > max_m {
        return Err(HurwitzError::Bound(format!(
            "brute force needs |mu| <= {max_size} and m <= {max_m}, got |mu| = {d}, m = {m}"
        )));
    }
    if d == 0 || mu.contains(&0) {
        return Err(ProfileError::Malformed("mu must be a nonempty list of positive parts".into()).into());
    }
    let n = d as usize;
    let transpositions: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    // state: (product permutation, component label per point)
    let start_perm: Vec<u8> = (0..n as u8).collect();
    let mut states: HashMap<(Vec<u8>, Vec<u8>), u64> = HashMap::new();
    states.insert((start_perm.clone(), start_perm), 1);
    for _ in 0..m {
        let mut next: HashMap<(Vec<u8>, Vec<u8>), u64> = HashMap::new();
        for ((perm, labels), count) in &states {
            for &(i, j) in &transpositions {
                let mut p = perm.clone();
                p.swap(i, j);
                let (a, b) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                let l: Vec<u8> = labels.iter().map(|&x| if x == b { a } else { x }).collect();
                *next.entry((p, l)).or_insert(0) += count;
            }
        }
        states = next;
    }
    let target = Partition::from_unsorted(mu)?;
    let mut total: u64 = 0;
    for ((perm, labels), count) in &states {
        if labels.iter().any(|&x| x != 0) {
            continue;
        }
        if cycle_type(perm) == target {
            total += count;
        }
    }
    let aut = combi::aut_order(mu);
    Ok(Scalar::new(aut * BigInt::from(total), factorial(d as u64)))
}

fn cycle_type(perm: &[u8]) -> Partition {
    let mut seen = vec![false; perm.len()];
    let mut lens = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut x = s;
        while !seen[x] {
            seen[x] = true;
            x = perm[x] as usize;
            len += 1;
        }
        lens.push(len);
    }
    Partition::from_unsorted(&lens).expect("cycle lengths are positive")
}

/// The regimes whose closed forms are used for calibration.
pub fn is_calibration_regime(p: &SpinProfile) -> bool {
    matches!(p.regime, Regime::OnePointed | Regime::TwoPointed)
}
