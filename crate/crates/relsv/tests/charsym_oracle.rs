// Character tables against the Frobenius formula
// chi^lambda(rho) = [x^{lambda + delta}] a_delta(x) p_rho(x),
// and Bernoulli numbers against the Akiyama-Tanigawa algorithm.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_traits::{One, Zero};

use relsv::charsym::{self, Partition};
use relsv::ratcore::scalar::{factorial, q};
use relsv::Scalar;

type Poly = HashMap<Vec<u32>, i64>;

fn power_sum(n: usize, k: u32) -> Poly {
    (0..n)
        .map(|i| {
            let mut e = vec![0; n];
            e[i] = k;
            (e, 1)
        })
        .collect()
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(e).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

fn permutations(n: usize) -> Vec<(Vec<usize>, i64)> {
    fn rec(cur: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out.into_iter()
        .map(|p| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| p[i] > p[j])
                .count();
            let sign = if inversions % 2 == 0 { 1 } else { -1 };
            (p, sign)
        })
        .collect()
}

fn frobenius_character(lambda: &[u32], rho: &[u32], perms: &[(Vec<usize>, i64)]) -> i64 {
    let n: usize = lambda.iter().sum::<u32>() as usize;
    let mut p: Poly = [(vec![0; n], 1)].into_iter().collect();
    for &k in rho {
        p = mul(&p, &power_sum(n, k));
    }
    let delta: Vec<i64> = (0..n).map(|i| (n - 1 - i) as i64).collect();
    let mut target: Vec<i64> = (0..n).map(|i| *lambda.get(i).unwrap_or(&0) as i64 + delta[i]).collect();
    let mut total = 0;
    for (perm, sign) in perms {
        let mut exp = Vec::with_capacity(n);
        let mut ok = true;
        for i in 0..n {
            let e = target[i] - delta[perm[i]];
            if e < 0 {
                ok = false;
                break;
            }
            exp.push(e as u32);
        }
        if ok {
            total += sign * p.get(&exp).copied().unwrap_or(0);
        }
    }
    target.clear();
    total
}

#[test]
fn tables_match_frobenius_formula() {
    for d in 1..=6u32 {
        let perms = permutations(d as usize);
        let table = charsym::characters(d).unwrap();
        for lam in table.partitions() {
            for rho in table.partitions() {
                let want = frobenius_character(lam.parts(), rho.parts(), &perms);
                assert_eq!(table.chi(lam, rho), want, "d={d} lambda={lam} rho={rho}");
            }
        }
    }
}

#[test]
fn orthogonality() {
    for d in 1..=9u32 {
        let table = charsym::characters(d).unwrap();
        let parts = table.partitions();
        let dfact = Scalar::from_integer(factorial(d as u64));
        for a in parts {
            for b in parts {
                let mut row = Scalar::zero();
                for rho in parts {
                    let zr = Scalar::from_integer(charsym::z(rho));
                    row += Scalar::from_integer(BigInt::from(table.chi(a, rho) * table.chi(b, rho))) / zr;
                }
                let want = if a == b { Scalar::one() } else { Scalar::zero() };
                assert_eq!(row, want, "rows {a} {b}");
            }
        }
        for r1 in parts {
            for r2 in parts {
                let col: i64 = parts.iter().map(|l| table.chi(l, r1) * table.chi(l, r2)).sum();
                let want = if r1 == r2 { charsym::z(r1) } else { BigInt::zero() };
                assert_eq!(BigInt::from(col), want);
            }
        }
        let sum_sq: BigInt = parts.iter().map(|l| charsym::dim(l) * charsym::dim(l)).sum();
        assert_eq!(Scalar::from_integer(sum_sq), dfact);
        let identity = Partition::new(vec![1; d as usize]).unwrap();
        for l in parts {
            assert_eq!(BigInt::from(table.chi(l, &identity)), charsym::dim(l));
        }
    }
}

#[test]
fn partition_counts() {
    let counts: Vec<usize> = (0..=12).map(|d| charsym::partitions(d).len()).collect();
    assert_eq!(counts, [1, 1, 2, 3, 5, 7, 11, 15, 22, 30, 42, 56, 77]);
}

#[test]
fn bound_is_enforced() {
    assert!(charsym::characters_bounded(13, 12).is_err());
    assert!(charsym::characters_bounded(5, 12).is_ok());
}

/// Akiyama-Tanigawa; yields `B_1 = +1/2`.
fn akiyama_tanigawa(n: usize) -> Vec<Scalar> {
    let mut a: Vec<Scalar> = Vec::new();
    let mut out = Vec::new();
    for m in 0..=n {
        a.push(q(1, m as i64 + 1));
        for j in (1..=m).rev() {
            a[j - 1] = Scalar::from_integer(BigInt::from(j)) * (&a[j - 1] - &a[j]);
        }
        out.push(a[0].clone());
    }
    out
}

#[test]
fn bernoulli_matches_independent_algorithm() {
    let at = akiyama_tanigawa(24);
    for (n, b) in at.iter().enumerate() {
        let want = if n == 1 { -b.clone() } else { b.clone() };
        assert_eq!(charsym::bernoulli(n as u32), want, "B_{n}");
    }
    assert_eq!(charsym::zeta_at_negative(1), q(-1, 12));
    assert_eq!(charsym::zeta_at_negative(3), q(1, 120));
    assert_eq!(charsym::zeta_at_negative(2), q(0, 1));
}

#[test]
fn shifted_power_sums() {
    // On the empty partition only the constant survives.
    let empty = Partition::new(vec![]).unwrap();
    assert_eq!(charsym::shifted_power_sum(&empty, 3), q(7, 8) * q(1, 120));
    assert_eq!(charsym::shifted_constant(2), q(0, 1));
    // p_2 is twice the content sum.
    for d in 1..=7 {
        for lam in charsym::partitions(d) {
            let mut content = 0i64;
            for (i, &l) in lam.parts().iter().enumerate() {
                for j in 0..l as i64 {
                    content += j - i as i64;
                }
            }
            assert_eq!(charsym::shifted_power_sum(&lam, 2), q(2 * content, 1));
        }
    }
    // Conjugation negates contents, so the shifted sums pick up (-1)^k.
    for lam in charsym::partitions(6) {
        for k in 2..=5u32 {
            let c = charsym::shifted_constant(k);
            let a = charsym::shifted_power_sum(&lam, k) - &c;
            let b = charsym::shifted_power_sum(&lam.conjugate(), k) - &c;
            let want = if k % 2 == 0 { -a } else { a };
            assert_eq!(b, want, "{lam} k={k}");
        }
    }
}
