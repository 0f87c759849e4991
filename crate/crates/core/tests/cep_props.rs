use proptest::prelude::*;
use wachlab_core::cep::*;
use wachlab_core::filmod::FilPhiModule;
use wachlab_core::padic::*;
use wachlab_core::Error;

fn ctx(p: u64) -> PrecisionContext {
    PrecisionContext::unramified_base(p, 12).unwrap()
}

fn unimodular(ctx: &PrecisionContext, n: usize, vals: &[i64]) -> OFMatrix {
    // Unit lower-triangular times unit upper-triangular.
    let lower = OFMatrix::from_fn(ctx, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => OFElement::one(ctx),
        std::cmp::Ordering::Greater => OFElement::from_i64(ctx, vals[i * n + j]),
        std::cmp::Ordering::Less => OFElement::zero(ctx),
    });
    let upper = OFMatrix::from_fn(ctx, n, n, |i, j| match i.cmp(&j) {
        std::cmp::Ordering::Equal => OFElement::from_i64(ctx, 1 + ctx.p() as i64 * vals[i]),
        std::cmp::Ordering::Less => OFElement::from_i64(ctx, vals[(i * n + j + 3) % vals.len()]),
        std::cmp::Ordering::Greater => OFElement::zero(ctx),
    });
    &lower * &upper
}

/// `0 -> Z^a -f-> Z^{a+b} -g-> Z^b -> 0` with `f = [diag(p^x) | 0] W`,
/// `g = W^{-1} [0 ; diag(p^y)]`; the exponent is `sum x - sum y`.
fn short_ladder(ctx: &PrecisionContext, xs: &[u32], ys: &[u32], vals: &[i64]) -> ExactSequenceLadder {
    let (a, b) = (xs.len(), ys.len());
    let n = a + b;
    let w = unimodular(ctx, n, vals);
    let left = OFMatrix::from_fn(ctx, a, n, |i, j| {
        if i == j { OFElement::one(ctx).mul_p_pow(xs[i]) } else { OFElement::zero(ctx) }
    });
    let right = OFMatrix::from_fn(ctx, n, b, |i, j| {
        if i == a + j { OFElement::one(ctx).mul_p_pow(ys[j]) } else { OFElement::zero(ctx) }
    });
    ExactSequenceLadder::new("A", a)
        .then(LatticeMap::integral(&left * &w), "B")
        .unwrap()
        .then(LatticeMap::integral(&w.inverse().unwrap() * &right), "C")
        .unwrap()
}

fn ladder_strategy() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, Vec<i64>)> {
    (1usize..3, 1usize..3).prop_flat_map(|(a, b)| {
        (
            prop::collection::vec(0u32..4, a),
            prop::collection::vec(0u32..4, b),
            prop::collection::vec(-9i64..9, (a + b) * (a + b) + 3),
        )
    })
}

fn module_strategy() -> impl Strategy<Value = (u64, Vec<u32>, Vec<i64>, i64)> {
    (prop::sample::select(vec![3u64, 5, 7]), 1usize..4).prop_flat_map(|(p, d)| {
        (
            Just(p),
            prop::collection::vec(0u32..p as u32, d).prop_map(|mut j| {
                j.sort();
                j
            }),
            prop::collection::vec(-30i64..30, d * d),
            -(p as i64 - 2)..2,
        )
    })
}

fn build(p: u64, jumps: &[u32], vals: &[i64], shift: i64) -> Option<FilPhiModule> {
    let c = ctx(p);
    let d = jumps.len();
    let a = OFMatrix::from_fn(&c, d, d, |i, j| OFElement::from_i64(&c, vals[i * d + j]));
    FilPhiModule::new(&c, jumps.to_vec(), a, shift).ok()
}

#[test]
fn gamma_star_units_across_window() {
    for p in [3u64, 5, 7, 11] {
        let p_i = p as i64;
        for j in -(p_i - 2)..=(p_i - 1) {
            assert_eq!(gamma_star(-j, p).v_p, 0, "p = {p}, j = {j}");
        }
        assert!(gamma_star_window_unit(-(p_i - 2), p_i - 1, p));
    }
}

#[test]
fn gamma_star_matches_factorials() {
    let p = 5;
    let mut fact = num_bigint::BigInt::from(1);
    for n in 0..40u64 {
        if n > 0 {
            fact *= n;
        }
        let mut v = 0;
        let mut m = fact.clone();
        while &m % p == num_bigint::BigInt::from(0) {
            m /= p;
            v += 1;
        }
        let g = gamma_star(n as i64 + 1, p as u64);
        assert_eq!(g.value, num_rational::BigRational::from_integer(fact.clone()));
        assert_eq!(g.v_p, v);
        assert_eq!(gamma_star(-(n as i64), p as u64).v_p, -v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, ..ProptestConfig::default() })]

    #[test]
    fn ladder_exponent_oracle((xs, ys, vals) in ladder_strategy()) {
        let c = ctx(5);
        let l = short_ladder(&c, &xs, &ys, &vals);
        let expected = xs.iter().sum::<u32>() as i64 - ys.iter().sum::<u32>() as i64;
        prop_assert_eq!(exact_sequence_exponent(&l, "A").unwrap(), expected);
    }

    #[test]
    fn ladder_exponent_additive(
        (x1, y1, v1) in ladder_strategy(),
        (x2, y2, v2) in ladder_strategy(),
    ) {
        let c = ctx(5);
        let a = short_ladder(&c, &x1, &y1, &v1);
        let b = short_ladder(&c, &x2, &y2, &v2);
        let joined = a.concat(&b).unwrap();
        let sign = if a.ranks().len() % 2 == 0 { 1 } else { -1 };
        prop_assert_eq!(
            exact_sequence_exponent(&joined, "A").unwrap(),
            exact_sequence_exponent(&a, "A").unwrap() + sign * exact_sequence_exponent(&b, "A").unwrap()
        );
    }

    #[test]
    fn ladder_exponent_base_change_invariant(
        (xs, ys, vals) in ladder_strategy(),
        uvals in prop::collection::vec(-9i64..9, 19),
        k in 0usize..3,
    ) {
        let c = ctx(5);
        let l = short_ladder(&c, &xs, &ys, &vals);
        let n = l.ranks()[k];
        let u = unimodular(&c, n, &uvals[..n * n + 3]);
        let changed = l.change_basis(k, &u).unwrap();
        prop_assert_eq!(
            exact_sequence_exponent(&changed, "A").unwrap(),
            exact_sequence_exponent(&l, "A").unwrap()
        );
    }

    #[test]
    fn dual_determinant_valuation((p, jumps, vals, shift) in module_strategy()) {
        let Some(m) = build(p, &jumps, &vals, shift) else { return Ok(()) };
        let t_h = m.hodge_invariants().t_h;
        prop_assert_eq!(det_minus_phi_dual(&m).unwrap().v_p, m.rank() as i64 - t_h);
    }

    #[test]
    fn tamagawa_exponent_vanishes((p, jumps, vals, shift) in module_strategy()) {
        let Some(m) = build(p, &jumps, &vals, shift) else { return Ok(()) };
        match tam_exponent(&m) {
            Ok(e) => prop_assert_eq!(e, 0),
            Err(Error::Degenerate(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }

    #[test]
    fn cep_forms_agree((p, jumps, vals, shift) in module_strategy()) {
        let Some(m) = build(p, &jumps, &vals, shift) else { return Ok(()) };
        let flags = m.category_membership();
        prop_assume!(flags.both);
        match cep_check(&m) {
            Ok(r) => {
                prop_assert!(r.verdict);
                prop_assert_eq!(r.cep_lattice_exponent, r.tam_ratio_exponent);
                prop_assert_eq!((r.tam_exponent_v, r.tam_exponent_dual, r.gamma_star_total_vp, r.eta_exponent), (0, 0, 0, 0));
            }
            Err(Error::Degenerate(_)) | Err(Error::InvalidModule(_)) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
