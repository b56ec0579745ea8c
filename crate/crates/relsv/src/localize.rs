//! Euler classes of the moving parts at the simple fixed locus, the closed form
//! of `1/e(N^vir)`, and the equivariant Hurwitz class.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::{json, Value};
use thiserror::Error;

use crate::combi::{self, ProfileError, Regime, SpinProfile};
use crate::ratcore::scalar::{self, factorial, Scalar};
use crate::ratcore::{Bundle, GradedClass, Laurent, Monomial, RatError, Sign, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalizeError {
    #[error("{what} is not defined in regime {regime}")]
    Regime { what: &'static str, regime: &'static str },
    #[error("part index {0} out of range")]
    PartIndex(usize),
    #[error(transparent)]
    Ring(#[from] RatError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// How the Hodge factor of the base contribution is written. `Literal` uses
/// `1/c_{1/t}(-E)`, `Dual` uses `1/c_{1/t}(E^v)`; they agree only through
/// Mumford's relation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HodgeForm {
    #[default]
    Literal,
    Dual,
}

/// Deliberate corruption used to check that the verifier can fail.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mutation {
    #[default]
    None,
    /// Multiplies the base contribution by `t^k`.
    BaseTShift(i64),
}

fn sc(n: i64, d: i64) -> Scalar {
    scalar::q(n, d)
}

fn bi(n: u32) -> Scalar {
    scalar::int(n as i64)
}

fn mono(c: Scalar, e: i64) -> Laurent {
    Laurent::monomial(c, e)
}

fn cls(d: u32, c: Laurent) -> GradedClass {
    GradedClass::from_laurent(d, c)
}

/// `(c t)^e` as a Laurent monomial.
fn scaled_t_pow(c: &Scalar, e: i64) -> Laurent {
    mono(scalar::pow(c, e).expect("nonzero"), e)
}

fn fact(n: u32) -> Scalar {
    scalar::big(factorial(n as u64))
}

fn powi(x: u32, e: u32) -> Scalar {
    scalar::big(num_traits::pow(BigInt::from(x), e as usize))
}

/// `1 - (x/t) psi_i`
fn psi_factor(d: u32, i: u32, x: &Scalar) -> GradedClass {
    let mut f = GradedClass::one(d);
    f = f
        .add(&GradedClass::term(d, Monomial::symbol(Symbol::Psi(i)), mono(-x.clone(), -1)))
        .expect("same truncation");
    f
}

fn mul_all(d: u32, xs: impl IntoIterator<Item = GradedClass>) -> GradedClass {
    xs.into_iter()
        .fold(GradedClass::one(d), |acc, x| acc.mul(&x).expect("same truncation"))
}

fn regime_err(what: &'static str, p: &SpinProfile) -> LocalizeError {
    LocalizeError::Regime {
        what,
        regime: p.regime.as_str(),
    }
}

pub fn contrib_base(p: &SpinProfile) -> GradedClass {
    contrib_base_with(p, HodgeForm::Literal)
}

pub fn contrib_base_with(p: &SpinProfile, form: HodgeForm) -> GradedClass {
    let d = p.truncation();
    match p.regime {
        Regime::OnePointed => {
            let x = p.mu[0];
            cls(d, mono(fact(x) / powi(x, x - 1), x as i64 - 1))
        }
        Regime::TwoPointed => {
            let (x, y) = (p.mu[0], p.mu[1]);
            let c = fact(x) / powi(x, x + 1) * fact(y) / powi(y, y + 1) * bi(x + y) / bi(p.r);
            cls(d, mono(c, (x + y) as i64))
        }
        Regime::General => {
            let r = bi(p.r);
            let lead = mono(
                scalar::pow(&r, -(p.l() as i64)).unwrap(),
                1 - p.g as i64 + p.size() as i64,
            );
            let inv_t = Laurent::t_pow(-1);
            let hodge = match form {
                HodgeForm::Literal => GradedClass::chern_polynomial(Bundle::Hodge, Sign::Plus, &inv_t, d),
                HodgeForm::Dual => GradedClass::chern_polynomial(Bundle::HodgeDual, Sign::Minus, &inv_t, d),
            }
            .expect("monomial parameter");
            let parts = p.mu.iter().enumerate().map(|(i, &x)| {
                psi_factor(d, i as u32 + 1, &bi(x)).scale_scalar(&(fact(x) / powi(x, x + 1)))
            });
            mul_all(d, std::iter::once(hodge).chain(parts)).scale(&lead)
        }
    }
}

/// `m - g + 1 - l - sum floor(mu_i/r) + #{i : r | mu_i}`
pub fn vertex_exponent(p: &SpinProfile) -> i64 {
    p.m as i64 - p.g as i64 + 1 - p.l() as i64 - p.floor_sum() + combi::flag_divisible_count(p) as i64
}

pub fn contrib_vertex(p: &SpinProfile) -> Result<GradedClass, LocalizeError> {
    if p.regime != Regime::General {
        return Err(regime_err("vertex contribution", p));
    }
    let d = p.truncation();
    let r_over_t = mono(bi(p.r), -1);
    let plus_rrhol = GradedClass::chern_polynomial(Bundle::MinusRrhoL, Sign::Minus, &r_over_t, d)?;
    let hodge_inv = GradedClass::chern_polynomial(Bundle::Hodge, Sign::Minus, &Laurent::t_pow(-1), d)?;
    let t_over_r = scaled_t_pow(&sc(1, p.r as i64), vertex_exponent(p));
    let lead = t_over_r.shift(-(p.g as i64 - 1 + p.l() as i64));
    Ok(plus_rrhol.mul(&hodge_inv)?.scale(&lead))
}

pub fn contrib_flag(p: &SpinProfile) -> Result<GradedClass, LocalizeError> {
    let d = p.truncation();
    match p.regime {
        Regime::OnePointed => Err(regime_err("flag contribution", p)),
        Regime::TwoPointed => {
            if p.mu[0] % p.r == 0 {
                Ok(GradedClass::from_scalar(d, sc(1, p.r as i64)))
            } else {
                Ok(cls(d, Laurent::t_pow(-1)))
            }
        }
        Regime::General => {
            let delta = combi::flag_divisible_count(p) as i64;
            let c = scalar::pow(&bi(p.r), -delta).unwrap();
            Ok(cls(d, mono(c, delta - p.l() as i64)))
        }
    }
}

/// Edge contribution for part `i` (0-based).
pub fn contrib_edge(p: &SpinProfile, i: usize) -> Result<GradedClass, LocalizeError> {
    let &x = p.mu.get(i).ok_or(LocalizeError::PartIndex(i))?;
    let d = p.truncation();
    let c = match p.regime {
        Regime::OnePointed => {
            let f = (x - 1) / p.r;
            let t_mu = sc(1, x as i64);
            let num = fact(f) * scalar::pow(&t_mu, f as i64).unwrap();
            let den = fact(x - 1) * scalar::pow(&t_mu, x as i64 - 1).unwrap();
            mono(num / den, f as i64 - (x as i64 - 1))
        }
        _ => {
            let f = x / p.r;
            let num = fact(f) / powi(x, f);
            let den = fact(x) / powi(x, x);
            mono(num / den, f as i64 - x as i64)
        }
    };
    Ok(cls(d, c))
}

/// `1/e(N^vir)` with `psi_i` paired with `1/t`.
pub fn inverse_euler_closed(p: &SpinProfile) -> GradedClass {
    let d = p.truncation();
    let r = bi(p.r);
    let t_over_r = sc(1, p.r as i64);
    let edge_prod: Scalar = p
        .mu
        .iter()
        .map(|&x| {
            let f = x / p.r;
            bi(x) * num_traits::pow(sc(x as i64, p.r as i64), f as usize) / fact(f)
        })
        .product();
    match p.regime {
        Regime::OnePointed => {
            let x = p.mu[0];
            let c = edge_prod / (&r * powi(x, 2));
            cls(d, scaled_t_pow(&t_over_r, -(p.m as i64)).scale(&c))
        }
        Regime::TwoPointed => {
            let c = edge_prod / bi(p.mu[0] + p.mu[1]);
            cls(d, scaled_t_pow(&t_over_r, -(p.m as i64)).scale(&c))
        }
        Regime::General => {
            let lead = scaled_t_pow(&t_over_r, d as i64 - p.m as i64)
                .scale(&(scalar::pow(&r, p.l() as i64 + 2 * p.g as i64 - 2).unwrap() * edge_prod));
            let rrhol = GradedClass::chern_polynomial(Bundle::MinusRrhoL, Sign::Plus, &mono(r.clone(), -1), d)
                .expect("monomial parameter");
            let psis = p.mu.iter().enumerate().map(|(i, &x)| {
                psi_factor(d, i as u32 + 1, &bi(x))
                    .inverse()
                    .expect("unit constant term")
            });
            mul_all(d, std::iter::once(rrhol).chain(psis)).scale(&lead)
        }
    }
}

/// The same class written with `(1 - (mu_i/r) psi_i)^{-1}`, i.e. `psi_i`
/// weighted by `1/r` instead of `1/t`. Equals [`inverse_euler_closed`] after
/// `regrade_psi(r/t)`.
pub fn inverse_euler_psi_over_r(p: &SpinProfile) -> GradedClass {
    let closed = inverse_euler_closed(p);
    if p.regime != Regime::General {
        return closed;
    }
    let d = p.truncation();
    let mut out = GradedClass::zero(d);
    let t_over_r = mono(sc(1, p.r as i64), 1);
    for (m, c) in closed.terms() {
        let w = t_over_r.pow(m.psi_degree() as i64).expect("monomial");
        out = out
            .add(&GradedClass::term(d, m.clone(), c * &w))
            .expect("same truncation");
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct ContributionReport {
    pub profile: SpinProfile,
    pub base: GradedClass,
    pub vertex: Option<GradedClass>,
    pub flag: Option<GradedClass>,
    pub edges: Vec<GradedClass>,
    pub combined_from_lemmas: GradedClass,
    pub closed_form: GradedClass,
    pub identity_holds: bool,
}

impl ContributionReport {
    pub fn to_json(&self) -> Value {
        json!({
            "profile": self.profile.to_json(),
            "base": self.base.to_json(),
            "vertex": self.vertex.as_ref().map(GradedClass::to_json),
            "flag": self.flag.as_ref().map(GradedClass::to_json),
            "edges": self.edges.iter().map(GradedClass::to_json).collect::<Vec<_>>(),
            "combined_from_lemmas": self.combined_from_lemmas.to_json(),
            "closed_form": self.closed_form.to_json(),
            "identity_holds": self.identity_holds,
        })
    }
}

/// `prod e(flag) / (e(base) e(vertex) prod e(edge_i))`, compared with the
/// closed form after Mumford reduction.
pub fn verify_identity(p: &SpinProfile) -> ContributionReport {
    verify_identity_with(p, HodgeForm::Literal, Mutation::None)
}

pub fn verify_identity_with(p: &SpinProfile, form: HodgeForm, mutation: Mutation) -> ContributionReport {
    let d = p.truncation();
    let mut base = contrib_base_with(p, form);
    if let Mutation::BaseTShift(k) = mutation {
        base = base.scale(&Laurent::t_pow(k));
    }
    let vertex = contrib_vertex(p).ok();
    let flag = contrib_flag(p).ok();
    let edges: Vec<GradedClass> = (0..p.mu.len())
        .map(|i| contrib_edge(p, i).expect("index in range"))
        .collect();
    // Reducing before inverting is sound since the reduction is a ring map,
    // and keeps the dual Hodge series from growing the product.
    let denom = mul_all(
        d,
        std::iter::once(base.mumford_reduce())
            .chain(vertex.clone())
            .chain(edges.iter().cloned()),
    )
    .mumford_reduce();
    let combined = denom
        .inverse()
        .and_then(|inv| inv.mul(&flag.clone().unwrap_or_else(|| GradedClass::one(d))))
        .map(|c| c.mumford_reduce());
    let closed_form = inverse_euler_closed(p).mumford_reduce();
    let (combined_from_lemmas, identity_holds) = match combined {
        Ok(c) => {
            let ok = c == closed_form;
            (c, ok)
        }
        Err(_) => (GradedClass::zero(d), false),
    };
    ContributionReport {
        profile: p.clone(),
        base,
        vertex,
        flag,
        edges,
        combined_from_lemmas,
        closed_form,
        identity_holds,
    }
}

/// Reports for every profile, in the order given, computed in parallel.
pub fn verify_grid(profiles: &[SpinProfile], form: HodgeForm, mutation: Mutation) -> Vec<ContributionReport> {
    profiles
        .par_iter()
        .map(|p| verify_identity_with(p, form, mutation))
        .collect()
}

/// `m! t^m / e(N^vir)` pushed forward with degree `prod 1/mu_i`.
pub fn hurwitz_class(p: &SpinProfile) -> GradedClass {
    let c = fact(p.m) * combi::pushforward_degree(p);
    inverse_euler_closed(p).scale(&mono(c, p.m as i64))
}

/// The non-equivariant limit of [`hurwitz_class`] as a number; only for the
/// unstable regimes, where the class is a scalar.
pub fn hurwitz_value(p: &SpinProfile) -> Result<Scalar, LocalizeError> {
    if p.regime == Regime::General {
        return Err(regime_err("scalar Hurwitz value", p));
    }
    let limit = hurwitz_class(p).nonequivariant_limit()?;
    Ok(limit.constant_part().coeff(0))
}

/// As [`hurwitz_value`], with zero for an empty space.
pub fn hurwitz_value_gmu(g: u32, r: u32, mu: &[u32]) -> Result<Scalar, LocalizeError> {
    match combi::validate(g, r, mu) {
        Ok(p) => hurwitz_value(&p),
        Err(e) if e.is_empty_space() => Ok(Scalar::zero()),
        Err(e) => Err(e.into()),
    }
}

/// Human-readable summary lines of a report.
pub fn render_report(rep: &ContributionReport) -> String {
    let mut out = format!("profile   {}\n", rep.profile);
    out += &format!("base      {}\n", rep.base);
    if let Some(v) = &rep.vertex {
        out += &format!("vertex    {v}\n");
    }
    if let Some(f) = &rep.flag {
        out += &format!("flag      {f}\n");
    }
    for (i, e) in rep.edges.iter().enumerate() {
        out += &format!("edge{}     {e}\n", i + 1);
    }
    out += &format!("combined  {}\n", rep.combined_from_lemmas);
    out += &format!("closed    {}\n", rep.closed_form);
    out += &format!("identity  {}\n", rep.identity_holds);
    out
}

/// Coefficient of `psi^b c_k(-R rho_* L)` in the limit of the Hurwitz class.
pub fn limit_coefficient(p: &SpinProfile, b: &[u32], k: u32) -> Result<Scalar, LocalizeError> {
    let limit = hurwitz_class(p).nonequivariant_limit()?;
    let mut factors: Vec<(Symbol, u32)> = b
        .iter()
        .enumerate()
        .filter(|(_, &e)| e > 0)
        .map(|(i, &e)| (Symbol::Psi(i as u32 + 1), e))
        .collect();
    if k > 0 {
        factors.push((Symbol::Chern(Bundle::MinusRrhoL, k), 1));
    }
    Ok(limit.coeff(&Monomial::from_factors(factors)).coeff(0))
}
