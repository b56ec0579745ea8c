// Acceptance suite: one PASS/FAIL line per criterion, exact rational equality
// throughout. Exits non-zero if any criterion fails.

use std::time::Instant;

use num_bigint::BigInt;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use relsv::combi::{self, validate, SpinProfile};
use relsv::elsv::{self, Backend};
use relsv::hurwitz::{self, CalibrationSet, HurwitzQuery, Oracle, OracleConfig};
use relsv::localize::{self, HodgeForm, Mutation};
use relsv::ratcore::scalar::{factorial, render};
use relsv::Scalar;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

fn int(n: u64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

fn main_grid() -> Vec<SpinProfile> {
    combi::grid(2, 3, 4, 8)
}

fn criterion_1(grid: &[SpinProfile]) -> Outcome {
    let mut failures = Vec::new();
    for form in [HodgeForm::Literal, HodgeForm::Dual] {
        for rep in localize::verify_grid(grid, form, Mutation::None) {
            if !rep.identity_holds {
                failures.push((form, rep));
            }
        }
    }
    let mutated = localize::verify_identity_with(&validate(1, 2, &[3, 4, 2]).unwrap(), HodgeForm::Literal, Mutation::BaseTShift(1));
    if mutated.identity_holds {
        return outcome(false, "mutated contribution still satisfies the identity");
    }
    if failures.is_empty() {
        return outcome(true, format!("{} profiles x 2 Hodge forms", grid.len()));
    }
    let mut regimes: Vec<String> = failures
        .iter()
        .map(|(_, r)| format!("{}/r={}", r.profile.regime.as_str(), r.profile.r))
        .collect();
    regimes.sort();
    regimes.dedup();
    let (_, first) = &failures[0];
    outcome(
        false,
        format!(
            "{} of {} checks fail (classes {}); first {}: product {} vs closed {}",
            failures.len(),
            2 * grid.len(),
            regimes.join(","),
            first.profile,
            first.combined_from_lemmas,
            first.closed_form
        ),
    )
}

fn criterion_2(grid: &[SpinProfile]) -> Outcome {
    let mut bad = Vec::new();
    for p in grid {
        let class = localize::hurwitz_class(p);
        let weight = p.truncation() as i64;
        if !class.is_t_homogeneous(weight) {
            bad.push(format!("{p}: not t-homogeneous"));
            continue;
        }
        if let Err(e) = class.nonequivariant_limit() {
            bad.push(format!("{p}: {e}"));
        }
    }
    if bad.is_empty() {
        outcome(true, format!("{} profiles", grid.len()))
    } else {
        outcome(false, format!("{} failures, first {}", bad.len(), bad[0]))
    }
}

fn criterion_3() -> Outcome {
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let mut checked = 0;
    let mut tries = 0;
    while checked < 1000 && tries < 1_000_000 {
        tries += 1;
        let g = rng.gen_range(0..=4);
        let r = rng.gen_range(1..=7);
        let l = rng.gen_range(1..=5);
        let mu: Vec<u32> = (0..l).map(|_| rng.gen_range(1..=20)).collect();
        let Ok(p) = validate(g, r, &mu) else { continue };
        let lhs = r as i64 * (p.m as i64 - p.l() as i64 - p.floor_sum());
        let rhs = 2 * g as i64 - 2 - p.a.iter().map(|&x| x as i64).sum::<i64>();
        if lhs != rhs {
            return outcome(false, format!("{p}: {lhs} != {rhs}"));
        }
        checked += 1;
    }
    outcome(checked == 1000, format!("{checked} random valid profiles"))
}

/// `mu_1^{m-2} / r`
fn one_pointed_formula(p: &SpinProfile) -> Scalar {
    let mu1 = Scalar::from_integer(BigInt::from(p.mu[0]));
    pow_signed(&mu1, p.m as i64 - 2) / int(p.r as u64)
}

fn pow_signed(x: &Scalar, e: i64) -> Scalar {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// `m! r^m prod (mu_i/r)^{floor} / floor! / (mu_1 + mu_2)`
fn two_pointed_formula(p: &SpinProfile) -> Scalar {
    let r = p.r as i64;
    let mut v = Scalar::from_integer(factorial(p.m as u64)) * pow_signed(&frac(r, 1), p.m as i64);
    for &x in &p.mu {
        let f = x / p.r;
        v *= pow_signed(&frac(x as i64, r), f as i64) / Scalar::from_integer(factorial(f as u64));
    }
    v / int((p.mu[0] + p.mu[1]) as u64)
}

fn criterion_4(oracle: &Oracle) -> Outcome {
    let mut notes = Vec::new();
    let mut closed_ok = true;
    let mut oracle_ok = true;
    let ones = [(1, 2), (1, 3), (2, 3), (2, 5), (3, 4), (4, 5)];
    for (r, mu1) in ones {
        let p = validate(0, r, &[mu1]).unwrap();
        let f = one_pointed_formula(&p);
        let e = elsv::evaluate(&p, &Backend::SpecialCase01).unwrap();
        let l = localize::hurwitz_value(&p).unwrap();
        if e != f || l != f {
            closed_ok = false;
            notes.push(format!("{p}: formula {} elsv {} localize {}", render(&f), render(&e), render(&l)));
        }
        match oracle.evaluate(&HurwitzQuery { profile: p.clone(), connected: true }) {
            Ok(h) if h == f => {}
            Ok(h) => {
                oracle_ok = false;
                notes.push(format!("{p}: oracle {} vs {}", render(&h), render(&f)));
            }
            Err(e) => {
                oracle_ok = false;
                notes.push(format!("{p}: oracle error {e}"));
            }
        }
    }
    // Pairs with mu_1 + mu_2 > 8 are outside the two-pointed calibration set.
    let twos: [(u32, [u32; 2]); 6] = [(1, [2, 7]), (2, [3, 7]), (2, [4, 6]), (3, [4, 5]), (4, [5, 7]), (3, [2, 10])];
    for (r, mu) in twos {
        let p = validate(0, r, &mu).unwrap();
        let f = two_pointed_formula(&p);
        let e = elsv::evaluate(&p, &Backend::SpecialCase02).unwrap();
        let l = localize::hurwitz_value(&p).unwrap();
        if e != f || l != f {
            closed_ok = false;
            notes.push(format!("{p}: formula {} elsv {} localize {}", render(&f), render(&e), render(&l)));
        }
        match oracle.evaluate(&HurwitzQuery { profile: p.clone(), connected: true }) {
            Ok(h) if h == f => {}
            Ok(h) => {
                oracle_ok = false;
                notes.push(format!("{p}: oracle {} vs {}", render(&h), render(&f)));
            }
            Err(e) => {
                oracle_ok = false;
                notes.push(format!("{p}: oracle error {e}"));
            }
        }
    }
    let fixture = validate(0, 2, &[3, 5]).unwrap();
    let v225 = [
        elsv::evaluate(&fixture, &Backend::SpecialCase02).unwrap(),
        localize::hurwitz_value(&fixture).unwrap(),
        two_pointed_formula(&fixture),
    ];
    if v225.iter().any(|v| *v != int(225)) {
        closed_ok = false;
        notes.push(format!("r=2 mu=(3,5): {:?}", v225.iter().map(render).collect::<Vec<_>>()));
    }
    let pass = closed_ok && oracle_ok;
    let head = format!("closed forms {}, oracle {}", ok_word(closed_ok), ok_word(oracle_ok));
    if notes.is_empty() {
        outcome(pass, format!("{head}; 6 one-pointed, 6 two-pointed, 225 confirmed"))
    } else {
        outcome(pass, format!("{head}; {}", notes.join("; ")))
    }
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "agree"
    } else {
        "disagree"
    }
}

fn criterion_5(oracle: &Oracle) -> Outcome {
    let mut checked = 0;
    let mut bad = Vec::new();
    for d in 1..=5u32 {
        for part in relsv::charsym::partitions(d) {
            let mu: Vec<u32> = part.parts().iter().map(|&x| x as u32).collect();
            for m in 0..=4u32 {
                let Ok(p) = validate_any_genus(&mu, m) else { continue };
                let brute = hurwitz::brute_force_r1(&mu, m).unwrap();
                let chars = oracle
                    .evaluate(&HurwitzQuery { profile: p.clone(), connected: true })
                    .unwrap();
                if brute != chars {
                    bad.push(format!("{p} m={m}: brute {} chars {}", render(&brute), render(&chars)));
                }
                checked += 1;
            }
        }
    }
    let fixed = [
        (0, vec![2], frac(1, 2)),
        (0, vec![1, 1], frac(1, 1)),
        (0, vec![3], frac(1, 1)),
        (1, vec![2], frac(1, 2)),
    ];
    for (g, mu, want) in fixed {
        let p = validate(g, 1, &mu).unwrap();
        let brute = hurwitz::brute_force_r1(&mu, p.m).unwrap();
        let chars = oracle.evaluate_gmu(g, 1, &mu).unwrap();
        if brute != want || chars != want {
            bad.push(format!("{p}: brute {} chars {} want {}", render(&brute), render(&chars), render(&want)));
        }
    }
    if bad.is_empty() {
        outcome(true, format!("{checked} (mu, m) pairs plus 4 fixed values"))
    } else {
        outcome(false, bad.join("; "))
    }
}

/// The r = 1 profile with `m` simple branch points, if the genus is integral.
fn validate_any_genus(mu: &[u32], m: u32) -> Result<SpinProfile, ()> {
    let l = mu.len() as i64;
    let size: i64 = mu.iter().map(|&x| x as i64).sum();
    let twice_g = m as i64 + 2 - l - size;
    if twice_g < 0 || twice_g % 2 != 0 {
        return Err(());
    }
    let p = validate((twice_g / 2) as u32, 1, mu).map_err(|_| ())?;
    assert_eq!(p.m, m);
    Ok(p)
}

fn criterion_6() -> Outcome {
    // Residue classes such as r=4, a=(0,3,3) need |mu| up to 19 before three
    // samples are left over for prediction.
    let oracle = &Oracle::new(OracleConfig {
        char_bound: 20,
        ..OracleConfig::default()
    });
    let mut notes = Vec::new();
    let mut pass = true;
    let mut tables = 0;
    for r in 1..=4u32 {
        let mut residues = Vec::new();
        for a0 in 0..r {
            for a1 in a0..r {
                for a2 in a1..r {
                    residues.push(vec![a0, a1, a2]);
                }
            }
        }
        for a in residues {
            if elsv::generate_samples(0, r, &a, oracle.config().char_bound as u32).is_empty() {
                continue;
            }
            match elsv::fit(0, r, &a, oracle, 3) {
                Ok(rep) => {
                    tables += 1;
                    let v = rep.table.entries.get(&(vec![0, 0, 0], 0)).cloned().unwrap_or_default();
                    if v != frac(1, r as i64) {
                        pass = false;
                        notes.push(format!("g=0 r={r} a={a:?}: {}", render(&v)));
                    }
                    if rep.held_out.len() < 3 || !rep.held_out_ok() {
                        pass = false;
                        notes.push(format!("g=0 r={r} a={a:?}: {} held-out, ok={}", rep.held_out.len(), rep.held_out_ok()));
                    }
                }
                Err(e) => {
                    pass = false;
                    notes.push(format!("g=0 r={r} a={a:?}: {e}"));
                }
            }
        }
    }
    match elsv::fit(1, 1, &[0], oracle, 3) {
        Ok(rep) => {
            tables += 1;
            let psi = rep.table.entries.get(&(vec![1], 0)).cloned().unwrap_or_default();
            let c1 = rep.table.entries.get(&(vec![0], 1)).cloned().unwrap_or_default();
            if psi != frac(1, 24) || c1 != frac(-1, 24) {
                pass = false;
                notes.push(format!("g=1 r=1: psi {} c1 {}", render(&psi), render(&c1)));
            }
            if rep.held_out.len() < 3 || !rep.held_out_ok() {
                pass = false;
                notes.push(format!("g=1 r=1: {} held-out, ok={}", rep.held_out.len(), rep.held_out_ok()));
            }
        }
        Err(e) => {
            pass = false;
            notes.push(format!("g=1 r=1: {e}"));
        }
    }
    if notes.is_empty() {
        outcome(pass, format!("{tables} tables fitted, each predicts >= 3 held-out samples"))
    } else {
        outcome(pass, notes.join("; "))
    }
}

fn criterion_7() -> Outcome {
    let oracle = Oracle::new(OracleConfig {
        calibration_set: CalibrationSet::All,
        ..OracleConfig::default()
    });
    let mut notes = Vec::new();
    let mut pass = true;
    for r in 1..=4 {
        match oracle.calibration(r, CalibrationSet::All) {
            Ok(c) => notes.push(format!("r={r}: {c}")),
            Err(e) => {
                pass = false;
                notes.push(format!("r={r}: {e}"));
            }
        }
    }
    outcome(pass, notes.join("; "))
}

fn main() {
    let oracle = Oracle::default();
    let grid = main_grid();
    let checks: Vec<(&str, Box<dyn Fn() -> Outcome + '_>)> = vec![
        ("1 contribution product equals closed form", Box::new(|| criterion_1(&grid))),
        ("2 non-equivariant limit exists", Box::new(|| criterion_2(&grid))),
        ("3 degree identity", Box::new(criterion_3)),
        ("4 genus-zero closed forms", Box::new(|| criterion_4(&oracle))),
        ("5 r=1 characters vs brute force", Box::new(|| criterion_5(&oracle))),
        ("6 solve backend", Box::new(criterion_6)),
        ("7 single calibration", Box::new(criterion_7)),
    ];
    let mut failed = 0;
    for (name, f) in checks {
        let start = Instant::now();
        let o = f();
        let tag = if o.pass { "PASS" } else { "FAIL" };
        if !o.pass {
            failed += 1;
        }
        println!("{tag} criterion {name} [{:.1?}]: {}", start.elapsed(), o.detail);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
