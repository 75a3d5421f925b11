use num_bigint::{BigInt, BigUint};
use num_traits::{Pow, Signed};
use proptest::prelude::*;

use reidzeta::arith::{rat, BigRat, IntMat};
use reidzeta::engine::{abelian_r, r_sequence, RValue};
use reidzeta::group::{EndoPair, EndoSystem, NilpotentFactor, NilpotentGroupData, SArithAbelianGroup};
use reidzeta::oracle::{brute_force_abelian_r, DEFAULT_CELL_BUDGET};
use reidzeta::spectra::joint_eigenvalues;
use reidzeta::zeta::{
    classify_dichotomy, counts_to_rats, detect_linear_recurrence, zeta_coefficients, ClassifyOptions,
    DichotomyVerdict, GfDecomposition,
};

fn diagonalizable_pair() -> impl Strategy<Value = (SArithAbelianGroup, EndoPair)> {
    (
        1usize..=3,
        prop::collection::vec((-5i64..=5, -1i32..=1), 3),
        prop::collection::vec((-5i64..=5, -1i32..=1), 3),
        prop::collection::vec(-2i64..=2, 3),
        prop::sample::subsequence(vec![2u128, 3, 5], 0..=2),
    )
        .prop_map(|(d, a, b, shear, primes)| {
            let base = primes.first().copied().unwrap_or(1) as i64;
            let eig = |(x, e): (i64, i32)| rat(x) * Pow::pow(rat(base), e);
            let pm = match d {
                1 => IntMat::identity(1),
                2 => IntMat::from_ints(&[[1, shear[0]], [0, 1]]),
                _ => IntMat::from_ints(&[[1, shear[0], shear[1]], [0, 1, shear[2]], [0, 0, 1]]),
            };
            let inv = pm.inverse().unwrap();
            let conj = |v: &[(i64, i32)]| {
                let diag = IntMat::diagonal(v[..d].iter().copied().map(eig).collect());
                pm.mul(&diag).unwrap().mul(&inv).unwrap()
            };
            (SArithAbelianGroup::new(d, &primes).unwrap(), EndoPair::new(conj(&a), conj(&b)))
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rational_verdicts_expand_to_the_zeta_series((group, pair) in diagonalizable_pair()) {
        let sys = EndoSystem::abelian(group, pair).unwrap();
        let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).unwrap();
        if let DichotomyVerdict::Rational { product_form: Some(pf), rational_form, .. } = v {
            let terms = 2 * pf.factors.len() + 5;
            let r = r_sequence(&sys, terms as u64).unwrap();
            let z = zeta_coefficients(&counts_to_rats(&r));
            prop_assert_eq!(&pf.expand(terms), &z);
            prop_assert_eq!(rational_form.expand(terms + 1), z.coefficients().to_vec());
        }
    }

    #[test]
    fn dominant_term((group, pair) in diagonalizable_pair()) {
        let sys = EndoSystem::abelian(group.clone(), pair.clone()).unwrap();
        let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).unwrap();
        if let DichotomyVerdict::Rational { product_form: Some(pf), .. } = v {
            let pairs = joint_eigenvalues(&pair).unwrap();
            let gf = GfDecomposition::new(&[(group, pairs)]).unwrap();
            let top = gf.dominant_modulus();
            // unique largest |w_j|, with c_j = 1
            prop_assert_eq!(pf.factors[0].0.abs(), top.clone());
            prop_assert_eq!(&pf.factors[0].1, &BigInt::from(1));
            prop_assert!(pf.factors[1..].iter().all(|(w, _)| w.abs() < top));
        }
    }

    #[test]
    fn engine_matches_oracle(
        d in 1usize..=3,
        a in prop::collection::vec(-3i64..=3, 9),
        b in prop::collection::vec(-3i64..=3, 9),
        n in 1u64..=3,
    ) {
        let m = |v: &[i64]| IntMat::new(d, d, v[..d * d].iter().map(|&x| rat(x)).collect()).unwrap();
        let pair = EndoPair::new(m(&a), m(&b));
        let p = pair.pow(n).unwrap();
        let engine = abelian_r(&SArithAbelianGroup::integers(d), &pair, n).unwrap();
        match brute_force_abelian_r(&p.phi, &p.psi, DEFAULT_CELL_BUDGET) {
            Ok(count) => prop_assert_eq!(engine, RValue::Finite(BigUint::from(count))),
            Err(reidzeta::oracle::OracleError::SingularDifference) => prop_assert_eq!(engine, RValue::Infinite),
            Err(_) => {}
        }
    }
}

#[test]
fn nilpotent_rational_verdict_expands() {
    let f = |a: i64, b: i64| {
        NilpotentFactor::new(
            SArithAbelianGroup::integers(1),
            EndoPair::new(IntMat::from_ints(&[[a]]), IntMat::from_ints(&[[b]])),
        )
        .unwrap()
    };
    let jordan = NilpotentFactor::new(
        SArithAbelianGroup::integers(2),
        EndoPair::new(IntMat::from_ints(&[[-3, 1], [0, -3]]), IntMat::identity(2)),
    )
    .unwrap();
    let sys = EndoSystem::Nilpotent(NilpotentGroupData::new(vec![jordan, f(5, 2), f(-2, 0)]).unwrap());
    let v = classify_dichotomy(&sys, None, &ClassifyOptions::default()).unwrap();
    let DichotomyVerdict::Rational { product_form: Some(pf), rational_form, .. } = v else { panic!("{v:?}") };
    let r = r_sequence(&sys, 30).unwrap();
    assert_eq!(pf.expand(30), zeta_coefficients(&counts_to_rats(&r)));
    // (3^n - (-1)^n)^2 (5^n - 2^n) 2^n has a rational Z*, and so a recurrence
    let rec = detect_linear_recurrence(&counts_to_rats(&r), 12).unwrap();
    assert!(rec.order <= 12);
    assert_eq!(rational_form.expand(31), zeta_coefficients(&counts_to_rats(&r)).coefficients());
}

#[test]
fn boundary_sequences_have_no_short_recurrence() {
    // Z[1/2] with (3, 1): R_n = (3^n - 1) |3^n - 1|_2
    let sys = EndoSystem::abelian(
        SArithAbelianGroup::new(1, &[2]).unwrap(),
        EndoPair::new(IntMat::from_ints(&[[3]]), IntMat::from_ints(&[[1]])),
    )
    .unwrap();
    let r = r_sequence(&sys, 40).unwrap();
    let expected: Vec<BigRat> = (1..=40u32)
        .map(|n| {
            let a: BigInt = Pow::pow(BigInt::from(3), n) - 1;
            let two = a.trailing_zeros().unwrap();
            BigRat::from_integer(a >> two)
        })
        .collect();
    assert_eq!(counts_to_rats(&r), expected);
    assert!(detect_linear_recurrence(&expected, 12).is_err());
}
