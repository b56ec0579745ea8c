use proptest::prelude::*;

use relsv::ratcore::scalar::q;
use relsv::ratcore::{Bundle, GradedClass, Laurent, Monomial, RatError, Sign, Symbol};

const D: u32 = 3;

fn generators() -> Vec<Symbol> {
    vec![
        Symbol::Psi(1),
        Symbol::Psi(2),
        Symbol::Chern(Bundle::MinusRrhoL, 1),
        Symbol::Chern(Bundle::MinusRrhoL, 2),
        Symbol::Chern(Bundle::Hodge, 1),
        Symbol::Chern(Bundle::Hodge, 2),
        Symbol::Chern(Bundle::HodgeDual, 1),
    ]
}

fn term() -> impl Strategy<Value = (Vec<(usize, u32)>, i64, i64, i64)> {
    (
        prop::collection::vec((0..7usize, 1..3u32), 0..3),
        -4i64..5,
        1i64..4,
        -2i64..3,
    )
}

fn class() -> impl Strategy<Value = GradedClass> {
    prop::collection::vec(term(), 0..5).prop_map(|terms| {
        let gens = generators();
        let mut c = GradedClass::zero(D);
        for (factors, n, d, e) in terms {
            let m = Monomial::from_factors(factors.into_iter().map(|(i, p)| (gens[i], p)));
            let t = GradedClass::term(D, m, Laurent::monomial(q(n, d), e));
            c = c.add(&t).unwrap();
        }
        c
    })
}

fn unit_class() -> impl Strategy<Value = GradedClass> {
    (class(), 1i64..5, -2i64..3).prop_map(|(c, n, e)| {
        let mut nil = GradedClass::zero(D);
        for (m, coeff) in c.terms() {
            if !m.is_one() {
                nil = nil.add(&GradedClass::term(D, m.clone(), coeff.clone())).unwrap();
            }
        }
        GradedClass::from_laurent(D, Laurent::monomial(q(n, 1), e)).add(&nil).unwrap()
    })
}

proptest! {
    #[test]
    fn commutative(a in class(), b in class()) {
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.add(&b).unwrap(), b.add(&a).unwrap());
    }

    #[test]
    fn associative(a in class(), b in class(), c in class()) {
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
    }

    #[test]
    fn distributive(a in class(), b in class(), c in class()) {
        let lhs = a.mul(&b.add(&c).unwrap()).unwrap();
        let rhs = a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn identities(a in class()) {
        prop_assert_eq!(a.mul(&GradedClass::one(D)).unwrap(), a.clone());
        prop_assert!(a.sub(&a).unwrap().is_zero());
        prop_assert_eq!(a.add(&a.neg()).unwrap(), GradedClass::zero(D));
    }

    #[test]
    fn inverse_of_unit(u in unit_class()) {
        let inv = u.inverse().unwrap();
        prop_assert!(u.mul(&inv).unwrap().is_one());
    }

    #[test]
    fn chern_series_are_inverse(d in 0u32..=8, n in 1i64..6, den in 1i64..4, e in -2i64..3, which in 0usize..3) {
        let bundle = [Bundle::MinusRrhoL, Bundle::Hodge, Bundle::HodgeDual][which];
        let s = Laurent::monomial(q(n, den), e);
        let plus = GradedClass::chern_polynomial(bundle, Sign::Plus, &s, d).unwrap();
        let minus = GradedClass::chern_polynomial(bundle, Sign::Minus, &s, d).unwrap();
        prop_assert!(plus.mul(&minus).unwrap().is_one());
    }

    #[test]
    fn mumford_is_idempotent(a in class()) {
        let once = a.mumford_reduce();
        prop_assert_eq!(once.mumford_reduce(), once.clone());
        for (m, _) in once.terms() {
            for (s, _) in m.factors() {
                match s {
                    Symbol::Chern(Bundle::HodgeDual, _) => prop_assert!(false, "dual class survives"),
                    Symbol::Chern(Bundle::Hodge, k) => prop_assert!(k % 2 == 1),
                    _ => {}
                }
            }
        }
    }

    #[test]
    fn mumford_is_multiplicative(a in class(), b in class()) {
        let lhs = a.mul(&b).unwrap().mumford_reduce();
        let rhs = a.mumford_reduce().mul(&b.mumford_reduce()).unwrap().mumford_reduce();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn regrade_is_multiplicative(a in class(), b in class(), n in 1i64..4, e in -1i64..2) {
        let u = Laurent::monomial(q(n, 1), e);
        let lhs = a.mul(&b).unwrap().regrade_psi(&u).unwrap();
        let rhs = a.regrade_psi(&u).unwrap().mul(&b.regrade_psi(&u).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn json_roundtrip(a in class()) {
        prop_assert_eq!(GradedClass::from_json(D, &a.to_json()).unwrap(), a);
    }
}

#[test]
fn hodge_times_dual_reduces_to_one() {
    for d in 0..=8 {
        let s = Laurent::t_pow(-1);
        let c = GradedClass::chern_polynomial(Bundle::Hodge, Sign::Plus, &s, d).unwrap();
        let cv = GradedClass::chern_polynomial(Bundle::HodgeDual, Sign::Plus, &s, d).unwrap();
        assert!(c.mul(&cv).unwrap().mumford_reduce().is_one(), "D = {d}");
    }
}

#[test]
fn limit_rejects_negative_powers() {
    let c = GradedClass::term(D, Monomial::symbol(Symbol::Psi(1)), Laurent::monomial(q(1, 2), -1));
    assert!(matches!(c.nonequivariant_limit(), Err(RatError::NegativeTPower { t_exp: -1, .. })));
    let c = GradedClass::term(D, Monomial::symbol(Symbol::Psi(1)), Laurent::monomial(q(1, 2), 1))
        .add(&GradedClass::from_scalar(D, q(3, 1)))
        .unwrap();
    assert_eq!(c.nonequivariant_limit().unwrap(), GradedClass::from_scalar(D, q(3, 1)));
}

#[test]
fn truncation_mismatch_is_an_error() {
    let a = GradedClass::one(2);
    let b = GradedClass::one(3);
    assert!(matches!(a.mul(&b), Err(RatError::TruncationMismatch { .. })));
}

#[test]
fn chern_parameter_must_be_a_monomial() {
    let s = &Laurent::one() + &Laurent::t_pow(-1);
    assert!(GradedClass::chern_polynomial(Bundle::Hodge, Sign::Plus, &s, 2).is_err());
}
