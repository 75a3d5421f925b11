//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use reidzeta::arith::{abs_archimedean, abs_padic, factorize, rat, BigRat, IntMat, Poly};
use reidzeta::engine::{abelian_r, nilpotent_r, r_sequence, RValue};
use reidzeta::group::{EndoPair, EndoSystem, NilpotentFactor, NilpotentGroupData, SArithAbelianGroup};
use reidzeta::oracle::{
    brute_force_abelian_r, brute_force_finite_group_r, heisenberg_prediction, heisenberg_quotient,
    DEFAULT_CELL_BUDGET,
};
use reidzeta::spectra::{finite_place_product, joint_eigenvalues};
use reidzeta::zeta::{
    classify_dichotomy, counts_to_rats, detect_linear_recurrence, gf_decomposition, zeta_coefficients,
    ClassifyOptions, DichotomyVerdict, ZetaError, ZetaSeries,
};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn within(start: Instant, limit: Duration) -> Result<Duration, String> {
    let t = start.elapsed();
    if t < limit {
        Ok(t)
    } else {
        Err(format!("took {t:?}, limit {limit:?}"))
    }
}

fn scalar_system(group: SArithAbelianGroup, phi: i64, psi: i64) -> EndoSystem {
    EndoSystem::abelian(group, EndoPair::new(IntMat::from_ints(&[[phi]]), IntMat::from_ints(&[[psi]]))).unwrap()
}

fn shear_pair() -> EndoPair {
    EndoPair::new(IntMat::from_ints(&[[1, 1], [0, 1]]), IntMat::from_ints(&[[1, 0], [1, 1]]))
}

fn to_rat(x: &BigUint) -> BigRat {
    BigRat::from_integer(BigInt::from(x.clone()))
}

fn finite(r: RValue) -> Option<BigUint> {
    r.finite().cloned()
}

fn criterion_1() -> Check {
    let start = Instant::now();
    let sys = scalar_system(SArithAbelianGroup::integers(1), 3, 1);
    let r = r_sequence(&sys, 30).map_err(|e| e.to_string())?;
    for (i, x) in r.iter().enumerate() {
        let expected = BigUint::from(3u32).pow(i as u32 + 1) - 1u32;
        ensure!(*x == expected, "R_{} = {x}, expected {expected}", i + 1);
    }
    // (1 - s) Σ 3^k s^k: a_0 = 1, a_m = 3^m - 3^{m-1}
    let z = zeta_coefficients(&counts_to_rats(&r));
    for (m, a) in z.coefficients().iter().enumerate() {
        let expected = if m == 0 { BigInt::one() } else { BigInt::from(3).pow(m as u32) - BigInt::from(3).pow(m as u32 - 1) };
        ensure!(*a == BigRat::from_integer(expected.clone()), "a_{m} = {a}, expected {expected}");
    }
    ensure!(z.order() == 30, "expected 30 coefficients past a_0");
    let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    let DichotomyVerdict::Rational { rational_form, .. } = &v else {
        return Err(format!("verdict {v:?}"));
    };
    ensure!(
        rational_form.numerator() == [BigInt::from(1), BigInt::from(-1)]
            && rational_form.denominator() == [BigInt::from(1), BigInt::from(-3)],
        "rational form {rational_form}"
    );
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("R_n = 3^n - 1 (n <= 30), Z = {rational_form}, {t:?}"))
}

/// `|x|_3^{-1}` by dividing out 3 until it no longer divides.
fn three_part(x: &BigUint) -> BigUint {
    let three = BigUint::from(3u32);
    let mut x = x.clone();
    let mut out = BigUint::one();
    while (&x % &three).is_zero() {
        x /= &three;
        out *= &three;
    }
    out
}

fn criterion_2() -> Check {
    let start = Instant::now();
    let group = SArithAbelianGroup::new(1, &[3]).unwrap();
    let sys = scalar_system(group, 6, 3);
    let r = r_sequence(&sys, 50).map_err(|e| e.to_string())?;
    for (i, x) in r.iter().enumerate() {
        let a = (BigUint::one() << (i + 1)) - 1u32;
        let expected = &a / three_part(&a);
        ensure!(*x == expected, "R_{} = {x}, expected {expected}", i + 1);
    }
    let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    let DichotomyVerdict::NaturalBoundary { witness, .. } = v else {
        return Err(format!("verdict {v:?}"));
    };
    ensure!(witness.prime.get() == 3 && witness.index == 1, "witness {witness}");
    let rec = detect_linear_recurrence(&counts_to_rats(&r[..40]), 12);
    ensure!(
        matches!(rec, Err(ZetaError::NoRecurrenceFound { .. })),
        "recurrence detection returned {rec:?}"
    );
    let t = within(start, Duration::from_secs(2))?;
    Ok(format!("R_n = |2^n-1|·|2^n-1|_3 (n <= 50), boundary witness {witness}, no recurrence <= 12, {t:?}"))
}

/// `exp(F)` for `F(0) = 0` as `Σ_k F^k / k!`, truncated after `len` terms.
fn exp_series(f: &Poly, len: usize) -> Vec<BigRat> {
    let mut acc = Poly::one();
    let mut term = Poly::one();
    for k in 1..len {
        term = term.mul_trunc(f, len).scale(&BigRat::new(BigInt::one(), BigInt::from(k)));
        acc = acc.add(&term);
    }
    let mut out = acc.into_coeffs();
    out.resize(len, BigRat::zero());
    out
}

fn criterion_3() -> Check {
    let start = Instant::now();
    let sys = EndoSystem::abelian(SArithAbelianGroup::integers(2), shear_pair()).unwrap();
    let r = r_sequence(&sys, 30).map_err(|e| e.to_string())?;
    for (i, x) in r.iter().enumerate() {
        let n = i as u64 + 1;
        ensure!(*x == BigUint::from(n * n), "R_{n} = {x}");
    }
    // s/(1-s)^2 = Σ n s^n
    let f = Poly::new((0..=30i64).map(rat).collect());
    let expected = ZetaSeries::new(exp_series(&f, 31));
    let z = zeta_coefficients(&counts_to_rats(&r));
    ensure!(z == expected, "zeta coefficients differ from exp(s/(1-s)^2)");
    let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
    let DichotomyVerdict::NotApplicable { reason } = &v else {
        return Err(format!("verdict {v:?}"));
    };
    ensure!(reason.to_string().contains("non-commuting"), "reason {reason}");
    let t = within(start, Duration::from_secs(1))?;
    Ok(format!("R_n = n^2 (n <= 30), Z = exp(s/(1-s)^2) to 30 terms, NotApplicable, {t:?}"))
}

fn random_matrix(rng: &mut ChaCha8Rng, d: usize, range: i64) -> IntMat {
    IntMat::new(d, d, (0..d * d).map(|_| rat(rng.gen_range(-range..=range))).collect()).unwrap()
}

fn criterion_4() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut instances = 0;
    let mut two_factor = 0;
    while instances < 24 {
        let count = if instances % 2 == 0 { 2 } else { 3 };
        let mut factors = Vec::new();
        while factors.len() < count {
            let d = rng.gen_range(1..=2);
            let pair = EndoPair::new(random_matrix(&mut rng, d, 3), random_matrix(&mut rng, d, 3));
            // trivial coincidence sets for n <= 3, within oracle budget
            let ok = (1..=3).all(|n| {
                let p = pair.pow(n).unwrap();
                brute_force_abelian_r(&p.phi, &p.psi, 1_000_000).is_ok()
            });
            if ok {
                factors.push(NilpotentFactor::new(SArithAbelianGroup::integers(d), pair).unwrap());
            }
        }
        let data = NilpotentGroupData::new(factors.clone()).unwrap();
        for n in 1..=3u64 {
            let mut expected = BigUint::one();
            for f in &factors {
                let p = f.pair().pow(n).unwrap();
                expected *= BigUint::from(brute_force_abelian_r(&p.phi, &p.psi, 1_000_000).unwrap());
            }
            let got = nilpotent_r(&data, n).map_err(|e| e.to_string())?;
            ensure!(got == RValue::Finite(expected.clone()), "instance {instances}, n = {n}: {got} vs {expected}");
        }
        if count == 2 {
            two_factor += 1;
        }
        instances += 1;
    }

    let mut heisenberg = 0;
    for q in [2u32, 3, 5] {
        let mut pairs = Vec::new();
        for entries in 0..(q as i64).pow(4) {
            let digit = |k: u32| (entries / (q as i64).pow(k)) % q as i64;
            pairs.push((IntMat::from_ints(&[[digit(0), 0], [0, digit(1)]]), IntMat::from_ints(&[[digit(2), 0], [0, digit(3)]])));
        }
        if q == 5 {
            // a fixed random sample keeps the exhaustive table checks cheap
            let mut sample = Vec::new();
            for _ in 0..80 {
                sample.push(pairs[rng.gen_range(0..pairs.len())].clone());
            }
            pairs = sample;
        }
        for (phi, psi) in pairs {
            let Some(predicted) = heisenberg_prediction(q, &phi, &psi) else { continue };
            let table = heisenberg_quotient(q, &phi, &psi).map_err(|e| e.to_string())?;
            let counted = brute_force_finite_group_r(&table);
            ensure!(counted == predicted, "H(Z/{q}) with {phi} / {psi}: counted {counted}, predicted {predicted}");
            heisenberg += 1;
        }
    }
    let t = within(start, Duration::from_secs(30))?;
    Ok(format!(
        "{instances} factor-data instances ({two_factor} two-factor), {heisenberg} Heisenberg quotients agree, {t:?}"
    ))
}

fn criterion_5() -> Check {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut cases = 0;
    let mut largest = 0u64;
    while cases < 200 {
        let d = rng.gen_range(1..=3);
        let n = rng.gen_range(1..=4u64);
        let pair = EndoPair::new(random_matrix(&mut rng, d, 2), random_matrix(&mut rng, d, 2));
        let powered = pair.pow(n).unwrap();
        let det = powered.psi.sub(&powered.phi).unwrap().det().unwrap().abs();
        let Some(det) = det.to_integer().to_u64() else { continue };
        if det == 0 || det > 5000 || det.pow(d as u32) > DEFAULT_CELL_BUDGET {
            continue;
        }
        let oracle = brute_force_abelian_r(&powered.phi, &powered.psi, DEFAULT_CELL_BUDGET).map_err(|e| e.to_string())?;
        let engine = abelian_r(&SArithAbelianGroup::integers(d), &pair, n).map_err(|e| e.to_string())?;
        ensure!(
            finite(engine.clone()) == Some(BigUint::from(oracle)),
            "d = {d}, n = {n}, {pair:?}: engine {engine}, oracle {oracle}"
        );
        largest = largest.max(det);
        cases += 1;
    }
    let t = within(start, Duration::from_secs(60))?;
    Ok(format!("{cases} pairs agree with union-find (largest |det| {largest}), {t:?}"))
}

/// `P diag(a) P^{-1}`, `P diag(b) P^{-1}` with `P` unimodular and eigenvalues
/// in `Z[1/S]`.
fn random_commuting(rng: &mut ChaCha8Rng) -> (SArithAbelianGroup, EndoPair) {
    let d = rng.gen_range(1..=3);
    let primes: Vec<u128> = [2u128, 3, 5].into_iter().filter(|_| rng.gen_bool(0.5)).collect();
    let group = SArithAbelianGroup::new(d, &primes).unwrap();
    let mut eigen = || -> BigRat {
        let mut x = rat(rng.gen_range(-6i64..=6));
        for &p in &primes {
            let e: i32 = rng.gen_range(-1..=1);
            x *= Pow::pow(rat(p as i64), e);
        }
        x
    };
    let a: Vec<BigRat> = (0..d).map(|_| eigen()).collect();
    let b: Vec<BigRat> = (0..d).map(|_| eigen()).collect();
    let mut p = IntMat::identity(d);
    for _ in 0..3 {
        if d == 1 {
            break;
        }
        let i = rng.gen_range(0..d);
        let j = (i + rng.gen_range(1..d)) % d;
        let mut e = IntMat::identity(d);
        e.set(i, j, rat(rng.gen_range(-2i64..=2)));
        p = p.mul(&e).unwrap();
    }
    let inv = p.inverse().unwrap();
    let conj = |v: Vec<BigRat>| p.mul(&IntMat::diagonal(v)).unwrap().mul(&inv).unwrap();
    (group, EndoPair::new(conj(a), conj(b)))
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut determinants = 0;
    let mut infinite = 0;
    for case in 0..50 {
        let (group, pair) = random_commuting(&mut rng);
        let pairs = joint_eigenvalues(&pair).map_err(|e| e.to_string())?;
        for n in 1..=10u64 {
            let local = finite_place_product(&group, &pairs, n).map_err(|e| e.to_string())?;
            let r = abelian_r(&group, &pair, n).map_err(|e| e.to_string())?;
            ensure!(
                local == finite(r.clone()).as_ref().map(to_rat),
                "case {case} ({group}), n = {n}: local product {local:?}, R = {r}"
            );
            let a = pair.psi.pow(n).unwrap().sub(&pair.phi.pow(n).unwrap()).unwrap().det().unwrap();
            if a.is_zero() {
                infinite += 1;
                continue;
            }
            let mut product = abs_archimedean(&a);
            for part in [a.numer(), a.denom()] {
                for (p, _) in factorize(&part.abs().to_biguint().unwrap()).unwrap() {
                    product *= abs_padic(&a, p);
                }
            }
            ensure!(product.is_one(), "case {case}, n = {n}: product formula gives {product} for det {a}");
            determinants += 1;
        }
    }
    Ok(format!("50 commuting pairs, n <= 10: local products match R, product formula on {determinants} determinants ({infinite} infinite R)"))
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn small_pair(d: usize) -> impl Strategy<Value = EndoPair> {
    (prop::collection::vec(-3i64..=3, d * d), prop::collection::vec(-3i64..=3, d * d)).prop_map(move |(a, b)| {
        EndoPair::new(
            IntMat::new(d, d, a.into_iter().map(rat).collect()).unwrap(),
            IntMat::new(d, d, b.into_iter().map(rat).collect()).unwrap(),
        )
    })
}

/// Unimodular `U` from elementary moves, `psi = ±U^k` and `phi` a
/// polynomial in `U`, so the two commute.
fn unimodular_commuting() -> impl Strategy<Value = (usize, EndoPair)> {
    (2usize..=3, prop::collection::vec((0usize..3, 0usize..3, -2i64..=2), 1..=4), prop::collection::vec(-3i64..=3, 3), 0u32..=2, any::<bool>())
        .prop_map(|(d, moves, c, k, neg)| {
            let mut u = IntMat::identity(d);
            for (i, j, f) in moves {
                let (i, j) = (i % d, j % d);
                if i != j {
                    let mut e = IntMat::identity(d);
                    e.set(i, j, rat(f));
                    u = u.mul(&e).unwrap();
                }
            }
            let u2 = u.mul(&u).unwrap();
            let phi = IntMat::scalar(d, rat(c[0])).add(&u.scale(&rat(c[1]))).unwrap().add(&u2.scale(&rat(c[2]))).unwrap();
            let mut psi = u.pow(k.max(1) as u64).unwrap();
            if k == 0 {
                psi = IntMat::identity(d);
            }
            if neg {
                psi = psi.neg();
            }
            (d, EndoPair::new(phi, psi))
        })
}

fn criterion_7() -> Check {
    let cases = 128;
    let mut runner = TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() });

    let primes = prop::sample::subsequence(vec![2u128, 3, 5], 0..=3);
    runner
        .run(&((1usize..=3).prop_flat_map(|d| (Just(d), small_pair(d))), primes, 1u64..=3), |((d, pair), s, n)| {
            let g = SArithAbelianGroup::new(d, &s).unwrap();
            let a = abelian_r(&g, &pair, n).map_err(|e| fail(e.to_string()))?;
            let b = abelian_r(&g, &pair.swapped(), n).map_err(|e| fail(e.to_string()))?;
            prop_assert_eq!(a, b);
            Ok(())
        })
        .map_err(|e| format!("symmetry: {e}"))?;

    runner
        .run(&(unimodular_commuting(), 1u64..=3), |((d, pair), n)| {
            let g = SArithAbelianGroup::integers(d);
            prop_assert_eq!(pair.phi.mul(&pair.psi).unwrap(), pair.psi.mul(&pair.phi).unwrap());
            let reduced = EndoPair::new(pair.psi.inverse().unwrap().mul(&pair.phi).unwrap(), IntMat::identity(d));
            let a = abelian_r(&g, &pair, n).map_err(|e| fail(e.to_string()))?;
            let b = abelian_r(&g, &reduced, n).map_err(|e| fail(e.to_string()))?;
            prop_assert_eq!(a, b);
            Ok(())
        })
        .map_err(|e| format!("automorphism reduction: {e}"))?;

    runner
        .run(&prop::collection::vec((-50i64..=50, 1i64..=6), 0..=25), |r| {
            let r: Vec<BigRat> = r.into_iter().map(|(a, b)| BigRat::new(a.into(), b.into())).collect();
            prop_assert_eq!(zeta_coefficients(&r).recover_numbers(), r);
            Ok(())
        })
        .map_err(|e| format!("exp/log roundtrip: {e}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut eligible = 0;
    let mut boundary = 0;
    while eligible < cases {
        let (group, pair) = random_commuting(&mut rng);
        let sys = EndoSystem::abelian(group.clone(), pair.clone()).unwrap();
        let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
        if matches!(v, DichotomyVerdict::NotApplicable { .. }) {
            continue;
        }
        boundary += matches!(v, DichotomyVerdict::NaturalBoundary { .. }) as usize;
        let pairs = joint_eigenvalues(&pair).map_err(|e| e.to_string())?;
        let gf = gf_decomposition(&[(group.clone(), pairs)], 1..=8).map_err(|e| e.to_string())?;
        for (i, (g, f)) in gf.into_iter().enumerate() {
            let n = i as u64 + 1;
            let r = finite(abelian_r(&group, &pair, n).map_err(|e| e.to_string())?);
            ensure!(r.as_ref().map(to_rat) == Some(&g * &f), "g f != R for {pair:?} on {group}, n = {n}");
        }
        eligible += 1;
    }
    Ok(format!(
        "symmetry, automorphism reduction, exp/log roundtrip ({cases} cases each), g·f = R on {eligible} eligible inputs ({boundary} with boundary)"
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 7] = [
        ("1 powers of three", criterion_1),
        ("2 boundary example", criterion_2),
        ("3 shear pair", criterion_3),
        ("4 product formula", criterion_4),
        ("5 oracle sweep", criterion_5),
        ("6 local reconstruction", criterion_6),
        ("7 invariants", criterion_7),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {name}: PASS ({detail})"),
            Err(detail) => {
                failed += 1;
                println!("criterion {name}: FAIL ({detail})");
            }
        }
    }
    if failed > 0 {
        println!("{failed} of 7 criteria failed");
        std::process::exit(1);
    }
    println!("all 7 criteria passed");
}
