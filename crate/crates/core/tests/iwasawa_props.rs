use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wachlab_core::iwasawa::*;

const ORDER: usize = 32;

fn element(p: u64, vals: &[i64], den: i64) -> IwasawaElement {
    let n = (p - 1) as usize;
    let comps = (0..n)
        .map(|i| (0..ORDER).map(|k| BigRational::new(vals[(i * ORDER + k) % vals.len()].into(), den.into())).collect())
        .collect();
    IwasawaElement::from_components(p, comps).unwrap()
}

fn strategy() -> impl Strategy<Value = (u64, Vec<i64>)> {
    (prop::sample::select(vec![3u64, 5, 7]), prop::collection::vec(-20i64..20, 17..40))
}

fn v_p(x: &BigRational, p: u64) -> Option<i64> {
    if x.is_zero() {
        return None;
    }
    let pb = BigInt::from(p);
    let count = |mut n: BigInt| {
        let mut v = 0i64;
        while n.is_multiple_of(&pb) {
            n /= &pb;
            v += 1;
        }
        v
    };
    Some(count(x.numer().clone()) - count(x.denom().clone()))
}

/// Direct evaluation of `Σ c_k ((1+p)(1+T) - 1)^k` at `T = 0`, i.e. `Σ c_k p^k`.
fn twisted_constant_oracle(coeffs: &[BigRational], p: u64) -> BigRational {
    let mut pk = BigRational::one();
    let mut total = BigRational::zero();
    for c in coeffs {
        total += c * &pk;
        pk *= BigRational::from_integer(BigInt::from(p));
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn idempotents((p, _) in strategy()) {
        let n = (p - 1) as usize;
        let mut sum = IwasawaElement::zero(p, ORDER);
        for i in 0..n {
            let e = IwasawaElement::idempotent(p, i, ORDER);
            sum = sum.add(&e);
            for j in 0..n {
                let prod = e.mul(&IwasawaElement::idempotent(p, j, ORDER));
                prop_assert_eq!(prod, if i == j { e.clone() } else { IwasawaElement::zero(p, ORDER) });
            }
        }
        prop_assert_eq!(sum, IwasawaElement::one(p, ORDER));
    }

    #[test]
    fn twist_round_trip((p, vals) in strategy(), den in 1i64..10) {
        let x = element(p, &vals, den);
        prop_assert_eq!(x.twist1().twist_inverse(), x.clone());
        prop_assert_eq!(x.twist_inverse().twist1(), x);
    }

    #[test]
    fn twist_is_ring_automorphism((p, a) in strategy(), b in prop::collection::vec(-20i64..20, 17..40)) {
        let x = element(p, &a, 1);
        let y = element(p, &b, 1);
        prop_assert_eq!(x.mul_exact(&y).twist1(), x.twist1().mul_exact(&y.twist1()));
        prop_assert_eq!(x.add(&y).twist1(), x.twist1().add(&y.twist1()));
    }

    #[test]
    fn eval_at_zero_is_multiplicative((p, a) in strategy(), b in prop::collection::vec(-20i64..20, 17..40)) {
        let x = element(p, &a, 1);
        let y = element(p, &b, 1);
        prop_assert_eq!(x.mul(&y).eval_at_zero(), x.eval_at_zero() * y.eval_at_zero());
        prop_assert_eq!(x.add(&y).eval_at_zero(), x.eval_at_zero() + y.eval_at_zero());
    }

    #[test]
    fn twisted_evaluation_is_evaluation_at_chi((p, a) in strategy()) {
        let x = element(p, &a, 1);
        let direct = twisted_constant_oracle(x.component(1), p);
        prop_assert_eq!(x.twist1().eval_at_zero(), direct.clone());
        prop_assert_eq!(x.eval_at_character(1), direct);
    }

    #[test]
    fn lambda_units_are_multiplicative((p, a) in strategy(), b in prop::collection::vec(-20i64..20, 17..40)) {
        let x = element(p, &a, 1);
        let y = element(p, &b, 1);
        let both = x.is_lambda_unit().unwrap() && y.is_lambda_unit().unwrap();
        prop_assert_eq!(x.mul(&y).is_lambda_unit().unwrap(), both);
        if x.is_lambda_unit().unwrap() {
            prop_assert!(x.twist1().is_lambda_unit().unwrap());
        }
    }

    #[test]
    fn twist_lemma_on_constructed_pairs((p, a) in strategy()) {
        let d = element(p, &a, 1);
        prop_assert!(delta_twist_consistency(&d, &d.twist1()));
        let mut off = d.twist1();
        let bump = BigRational::from_integer(BigInt::from(p).pow(19));
        let c = off.coeff(0, 3) + bump;
        off.set_coeff(0, 3, c);
        prop_assert!(!delta_twist_consistency(&d, &off));
    }
}

#[test]
fn unrelated_units_are_inconsistent() {
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for p in [3u64, 5, 7] {
            let mut draw = || {
                let vals: Vec<i64> = (0..(p as usize - 1) * ORDER)
                    .map(|k| if k % ORDER == 0 { 1 + p as i64 * rng.gen_range(-5..5) } else { rng.gen_range(-20..20) })
                    .collect();
                element(p, &vals, 1)
            };
            let (u, v) = (draw(), draw());
            assert!(u.is_lambda_unit().unwrap() && v.is_lambda_unit().unwrap());
            assert!(!delta_twist_consistency(&u, &v), "seed {seed}, p = {p}");
        }
    }
}

#[test]
fn ell_at_characters() {
    let precision = 20;
    for p in [3u64, 5, 7] {
        for j in -3i64..=3 {
            let l = ell(p, j, ORDER, precision).unwrap();
            assert_eq!(l.eval_at_character(0), BigRational::from_integer((-j).into()));
            for k in 1i64..=4 {
                let diff = l.eval_at_character(k) - BigRational::from_integer((k - j).into());
                let v = v_p(&diff, p).unwrap_or(i64::MAX);
                assert!(v >= 15, "p = {p}, j = {j}, k = {k}: v = {v}");
            }
        }
    }
}
