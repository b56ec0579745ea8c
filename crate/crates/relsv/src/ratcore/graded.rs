//! Truncated commutative ring generated by psi classes and the Chern classes of
//! a few tagged bundles, with Laurent coefficients in t.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use super::laurent::Laurent;
use super::scalar::{self, Scalar};
use super::RatError;

/// K-theory classes whose Chern classes appear as generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Bundle {
    /// `-R rho_* L` for the universal r-th root `L`.
    MinusRrhoL,
    /// The Hodge bundle `rho_* omega`.
    Hodge,
    /// The dual Hodge bundle. Only ever an intermediate: `mumford_reduce` removes it.
    HodgeDual,
}

impl Bundle {
    pub fn tag(self) -> &'static str {
        match self {
            Bundle::MinusRrhoL => "-RrhoL",
            Bundle::Hodge => "rho*omega",
            Bundle::HodgeDual => "rho*omega^v",
        }
    }

    pub fn from_tag(s: &str) -> Option<Bundle> {
        [Bundle::MinusRrhoL, Bundle::Hodge, Bundle::HodgeDual]
            .into_iter()
            .find(|b| b.tag() == s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Psi(u32),
    Chern(Bundle, u32),
}

impl Symbol {
    pub fn degree(self) -> u32 {
        match self {
            Symbol::Psi(_) => 1,
            Symbol::Chern(_, k) => k,
        }
    }

    pub fn name(self) -> String {
        match self {
            Symbol::Psi(i) => format!("psi{i}"),
            Symbol::Chern(b, k) => format!("c{k}({})", b.tag()),
        }
    }

    pub fn parse(s: &str) -> Result<Symbol, RatError> {
        let err = || RatError::Parse(s.to_string());
        if let Some(rest) = s.strip_prefix("psi") {
            let i: u32 = rest.parse().map_err(|_| err())?;
            return Ok(Symbol::Psi(i));
        }
        let rest = s.strip_prefix('c').ok_or_else(err)?;
        let open = rest.find('(').ok_or_else(err)?;
        let k: u32 = rest[..open].parse().map_err(|_| err())?;
        let tag = rest[open + 1..].strip_suffix(')').ok_or_else(err)?;
        let b = Bundle::from_tag(tag).ok_or_else(err)?;
        if k == 0 {
            return Err(err());
        }
        Ok(Symbol::Chern(b, k))
    }
}

/// A product of symbols, stored sorted with positive exponents.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn symbol(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Symbol, u32)>) -> Self {
        let mut acc: BTreeMap<Symbol, u32> = BTreeMap::new();
        for (s, e) in factors {
            if e > 0 {
                *acc.entry(s).or_insert(0) += e;
            }
        }
        Monomial(acc.into_iter().collect())
    }

    pub fn factors(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(s, e)| s.degree() * e).sum()
    }

    pub fn psi_degree(&self) -> u32 {
        self.0
            .iter()
            .filter(|(s, _)| matches!(s, Symbol::Psi(_)))
            .map(|(_, e)| e)
            .sum()
    }

    pub fn exponent(&self, s: Symbol) -> u32 {
        self.0
            .iter()
            .find(|(x, _)| *x == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0, a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// Names in JSON form, a power rendered as `name^e`.
    pub fn names(&self) -> Vec<String> {
        self.0
            .iter()
            .map(|(s, e)| {
                if *e == 1 {
                    s.name()
                } else {
                    format!("{}^{}", s.name(), e)
                }
            })
            .collect()
    }

    pub fn parse_names(names: &[String]) -> Result<Monomial, RatError> {
        let mut factors = Vec::new();
        for n in names {
            let (base, e) = match n.rsplit_once('^') {
                Some((b, e)) if !e.is_empty() && e.bytes().all(|c| c.is_ascii_digit()) => {
                    (b, e.parse::<u32>().map_err(|_| RatError::Parse(n.clone()))?)
                }
                _ => (n.as_str(), 1),
            };
            factors.push((Symbol::parse(base)?, e));
        }
        Ok(Monomial::from_factors(factors))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        write!(f, "{}", self.names().join("*"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sign {
    Plus,
    Minus,
}

/// Element of the ring truncated above total class degree `truncation`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedClass {
    truncation: u32,
    terms: BTreeMap<Monomial, Laurent>,
}

impl GradedClass {
    pub fn zero(truncation: u32) -> Self {
        GradedClass {
            truncation,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(truncation: u32) -> Self {
        Self::from_laurent(truncation, Laurent::one())
    }

    pub fn from_laurent(truncation: u32, c: Laurent) -> Self {
        Self::term(truncation, Monomial::one(), c)
    }

    pub fn from_scalar(truncation: u32, c: Scalar) -> Self {
        Self::from_laurent(truncation, Laurent::constant(c))
    }

    pub fn symbol(truncation: u32, s: Symbol) -> Self {
        Self::term(truncation, Monomial::symbol(s), Laurent::one())
    }

    pub fn term(truncation: u32, m: Monomial, c: Laurent) -> Self {
        let mut out = Self::zero(truncation);
        out.add_term(m, c);
        out
    }

    pub fn truncation(&self) -> u32 {
        self.truncation
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Laurent)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &Monomial) -> Laurent {
        self.terms.get(m).cloned().unwrap_or_default()
    }

    /// The coefficient of the unit monomial.
    pub fn constant_part(&self) -> Laurent {
        self.coeff(&Monomial::one())
    }

    /// Returns the Laurent value when no formal class survives.
    pub fn as_laurent(&self) -> Option<Laurent> {
        if self.terms.keys().all(Monomial::is_one) {
            Some(self.constant_part())
        } else {
            None
        }
    }

    fn add_term(&mut self, m: Monomial, c: Laurent) {
        if c.is_zero() || m.degree() > self.truncation {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                x.add_assign_ref(&c);
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check(&self, other: &GradedClass) -> Result<(), RatError> {
        if self.truncation != other.truncation {
            return Err(RatError::TruncationMismatch {
                left: self.truncation,
                right: other.truncation,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &GradedClass) -> Result<GradedClass, RatError> {
        self.check(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &GradedClass) -> Result<GradedClass, RatError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> GradedClass {
        GradedClass {
            truncation: self.truncation,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &GradedClass) -> Result<GradedClass, RatError> {
        self.check(other)?;
        let d = self.truncation;
        let rhs: Vec<(u32, &Monomial, &Laurent)> = other
            .terms
            .iter()
            .map(|(m, c)| (m.degree(), m, c))
            .collect();
        let mut out = GradedClass::zero(d);
        for (m1, c1) in &self.terms {
            let d1 = m1.degree();
            for (d2, m2, c2) in &rhs {
                if d1 + d2 > d {
                    continue;
                }
                out.add_term(m1.mul(m2), c1 * *c2);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &Laurent) -> GradedClass {
        let mut out = GradedClass::zero(self.truncation);
        for (m, x) in &self.terms {
            out.add_term(m.clone(), x * c);
        }
        out
    }

    pub fn scale_scalar(&self, c: &Scalar) -> GradedClass {
        self.scale(&Laurent::constant(c.clone()))
    }

    pub fn pow(&self, n: u32) -> GradedClass {
        let mut acc = GradedClass::one(self.truncation);
        for _ in 0..n {
            acc = acc.mul(self).expect("same truncation");
        }
        acc
    }

    /// Multiplicative inverse. The degree-zero part must be a unit of the
    /// Laurent ring; the remainder is nilpotent in the truncated ring.
    pub fn inverse(&self) -> Result<GradedClass, RatError> {
        let u = self.constant_part();
        let u_inv = u.inverse()?;
        let d = self.truncation;
        // self = u (1 + n) with n nilpotent
        let n = self
            .scale(&u_inv)
            .sub(&GradedClass::one(d))
            .expect("same truncation");
        let minus_n = n.neg();
        let mut acc = GradedClass::one(d);
        let mut power = GradedClass::one(d);
        for _ in 0..d {
            power = power.mul(&minus_n)?;
            if power.is_zero() {
                break;
            }
            acc = acc.add(&power)?;
        }
        Ok(acc.scale(&u_inv))
    }

    /// `c_s(E) = sum_k c_k(E) s^k` for sign `Plus`, its inverse for `Minus`.
    pub fn chern_polynomial(
        bundle: Bundle,
        sign: Sign,
        parameter: &Laurent,
        truncation: u32,
    ) -> Result<GradedClass, RatError> {
        if parameter.as_monomial().is_none() {
            return Err(RatError::UnsupportedParameter(parameter.to_string()));
        }
        let mut series = GradedClass::one(truncation);
        let mut s_pow = Laurent::one();
        for k in 1..=truncation {
            s_pow = &s_pow * parameter;
            series.add_term(Monomial::symbol(Symbol::Chern(bundle, k)), s_pow.clone());
        }
        match sign {
            Sign::Plus => Ok(series),
            Sign::Minus => series.inverse(),
        }
    }

    /// Replaces every Chern generator of `from` by the same-degree generator of `to`.
    pub fn substitute_bundle(&self, from: Bundle, to: Bundle) -> GradedClass {
        let mut out = GradedClass::zero(self.truncation);
        for (m, c) in &self.terms {
            let factors = m.factors().iter().map(|(s, e)| match s {
                Symbol::Chern(b, k) if *b == from => (Symbol::Chern(to, *k), *e),
                _ => (*s, *e),
            });
            out.add_term(Monomial::from_factors(factors), c.clone());
        }
        out
    }

    /// Multiplies each term by `unit^(psi degree)`.
    pub fn regrade_psi(&self, unit: &Laurent) -> Result<GradedClass, RatError> {
        let mut out = GradedClass::zero(self.truncation);
        for (m, c) in &self.terms {
            let w = unit.pow(m.psi_degree() as i64)?;
            out.add_term(m.clone(), c * &w);
        }
        Ok(out)
    }

    /// Rewrites dual Hodge classes by `c_k(E^v) = (-1)^k c_k(E)` and then uses
    /// `c(E) c(E^v) = 1` to eliminate every even Hodge class, leaving a normal
    /// form in the odd ones.
    pub fn mumford_reduce(&self) -> GradedClass {
        let d = self.truncation;
        let mut even: HashMap<u32, GradedClass> = HashMap::new();
        let mut out = GradedClass::zero(d);
        for (m, c) in &self.terms {
            let mut rest = Vec::new();
            let mut sign_flip = false;
            let mut evens: Vec<(u32, u32)> = Vec::new();
            for (s, e) in m.factors() {
                match s {
                    Symbol::Chern(Bundle::HodgeDual, k) | Symbol::Chern(Bundle::Hodge, k) => {
                        if *s == Symbol::Chern(Bundle::HodgeDual, *k) && k % 2 == 1 && e % 2 == 1 {
                            sign_flip = !sign_flip;
                        }
                        if k % 2 == 0 {
                            evens.push((*k, *e));
                        } else {
                            rest.push((Symbol::Chern(Bundle::Hodge, *k), *e));
                        }
                    }
                    _ => rest.push((*s, *e)),
                }
            }
            let coeff = if sign_flip { -c } else { c.clone() };
            let mut piece = GradedClass::term(d, Monomial::from_factors(rest), coeff);
            for (k, e) in evens {
                let sub = even_hodge(k, d, &mut even);
                for _ in 0..e {
                    piece = piece.mul(&sub).expect("same truncation");
                }
            }
            for (pm, pc) in piece.terms {
                out.add_term(pm, pc);
            }
        }
        out
    }

    /// The t^0 layer, provided no term carries a negative power of t.
    pub fn nonequivariant_limit(&self) -> Result<GradedClass, RatError> {
        let mut out = GradedClass::zero(self.truncation);
        for (m, c) in &self.terms {
            if let Some(e) = c.min_exponent() {
                if e < 0 {
                    return Err(RatError::NegativeTPower {
                        monomial: m.to_string(),
                        t_exp: e,
                    });
                }
            }
            out.add_term(m.clone(), Laurent::constant(c.coeff(0)));
        }
        Ok(out)
    }

    /// True when every term `t^a X` has `a + deg X == weight`.
    pub fn is_t_homogeneous(&self, weight: i64) -> bool {
        self.terms.iter().all(|(m, c)| {
            c.iter()
                .all(|(e, _)| e + m.degree() as i64 == weight)
        })
    }

    pub fn to_json(&self) -> Value {
        let mut rows = Vec::new();
        for (m, c) in &self.terms {
            for (e, x) in c.iter() {
                rows.push(json!({
                    "monomial": m.names(),
                    "coeff": {"t_exp": e, "value": scalar::render(x)},
                }));
            }
        }
        Value::Array(rows)
    }

    pub fn from_json(truncation: u32, v: &Value) -> Result<GradedClass, RatError> {
        let bad = || RatError::Parse(v.to_string());
        let rows = v.as_array().ok_or_else(bad)?;
        let mut out = GradedClass::zero(truncation);
        for row in rows {
            let names: Vec<String> = row["monomial"]
                .as_array()
                .ok_or_else(bad)?
                .iter()
                .map(|n| n.as_str().map(str::to_string).ok_or_else(bad))
                .collect::<Result<_, _>>()?;
            let m = Monomial::parse_names(&names)?;
            let e = row["coeff"]["t_exp"].as_i64().ok_or_else(bad)?;
            let x = scalar::parse(row["coeff"]["value"].as_str().ok_or_else(bad)?)?;
            out.add_term(m, Laurent::monomial(x, e));
        }
        Ok(out)
    }
}

/// `c_{2j}(E)` expressed through odd Hodge classes.
fn even_hodge(k: u32, d: u32, memo: &mut HashMap<u32, GradedClass>) -> GradedClass {
    debug_assert!(k % 2 == 0 && k > 0);
    if let Some(x) = memo.get(&k) {
        return x.clone();
    }
    let mut acc = GradedClass::zero(d);
    if k <= d {
        for j in 1..k {
            let left = hodge_expr(k - j, d, memo);
            let right = hodge_expr(j, d, memo);
            let prod = left.mul(&right).expect("same truncation");
            acc = if j % 2 == 1 {
                acc.sub(&prod).unwrap()
            } else {
                acc.add(&prod).unwrap()
            };
        }
        acc = acc.scale_scalar(&scalar::q(-1, 2));
    }
    memo.insert(k, acc.clone());
    acc
}

fn hodge_expr(k: u32, d: u32, memo: &mut HashMap<u32, GradedClass>) -> GradedClass {
    if k % 2 == 1 {
        GradedClass::symbol(d, Symbol::Chern(Bundle::Hodge, k))
    } else {
        even_hodge(k, d, memo)
    }
}

impl fmt::Display for GradedClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(m, c)| {
                if m.is_one() {
                    format!("({c})")
                } else {
                    format!("({c})*{m}")
                }
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

impl GradedClass {
    /// Largest absolute t-exponent, used for diagnostics only.
    pub fn t_span(&self) -> Option<(i64, i64)> {
        let mut lo: Option<i64> = None;
        let mut hi: Option<i64> = None;
        for c in self.terms.values() {
            if let (Some(a), Some(b)) = (c.min_exponent(), c.max_exponent()) {
                lo = Some(lo.map_or(a, |x| x.min(a)));
                hi = Some(hi.map_or(b, |x| x.max(b)));
            }
        }
        lo.zip(hi)
    }

    /// Sum of the absolute values of all scalar coefficients; zero iff the class is zero.
    pub fn l1_norm(&self) -> Scalar {
        let mut acc = Scalar::zero();
        for c in self.terms.values() {
            for (_, x) in c.iter() {
                acc += x.abs();
            }
        }
        acc
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.constant_part() == Laurent::one()
    }

    pub fn unit_scalar(&self) -> bool {
        self.constant_part().as_constant().is_some_and(|c| c.is_one())
    }
}
