use proptest::prelude::*;
use wachlab_core::filmod::*;
use wachlab_core::padic::*;

fn matrix(ctx: &PrecisionContext, d: usize, vals: &[i64]) -> OFMatrix {
    OFMatrix::from_fn(ctx, d, d, |i, j| OFElement::from_i64(ctx, vals[i * d + j]))
}

fn module_strategy() -> impl Strategy<Value = (u64, Vec<u32>, Vec<i64>, Vec<i64>)> {
    (prop::sample::select(vec![3u64, 5, 7]), 1usize..4).prop_flat_map(|(p, d)| {
        (
            Just(p),
            prop::collection::vec(0u32..p as u32, d).prop_map(|mut j| {
                j.sort();
                j
            }),
            prop::collection::vec(-20i64..20, d * d),
            prop::collection::vec(-20i64..20, d * d),
        )
    })
}

fn build(p: u64, jumps: &[u32], vals: &[i64]) -> Option<FilPhiModule> {
    let ctx = PrecisionContext::unramified_base(p, 20).unwrap();
    let a = matrix(&ctx, jumps.len(), vals);
    FilPhiModule::new(&ctx, jumps.to_vec(), a, 0).ok()
}

fn slope_multiplicity(m: &FilPhiModule, s: i64) -> usize {
    newton_slopes(&m.phi_matrix())
        .unwrap()
        .iter()
        .filter(|x| **x == Slope::from_integer(s))
        .count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn det_valuation_is_hodge_sum((p, jumps, vals, _) in module_strategy()) {
        let Some(m) = build(p, &jumps, &vals) else { return Ok(()) };
        let v = m.phi_matrix().det().unwrap().valuation().unwrap() as i64;
        prop_assert_eq!(v, m.hodge_invariants().t_h);
        prop_assert_eq!(v, jumps.iter().map(|&r| r as i64).sum::<i64>());
    }

    #[test]
    fn raw_round_trip((p, jumps, vals, basis) in module_strategy()) {
        let Some(m) = build(p, &jumps, &vals) else { return Ok(()) };
        let b = matrix(m.ctx(), m.rank(), &basis);
        prop_assume!(b.is_invertible());
        let raw = m.to_raw(&b).unwrap();
        let res = raw.strong_divisibility_check().unwrap();
        prop_assert!(res.divisible);
        let back = res.module.unwrap();
        prop_assert_eq!(back.jumps(), m.jumps());
        prop_assert_eq!(back.unit_root_rank(), m.unit_root_rank());
        prop_assert_eq!(back.top_slope_absent(), m.top_slope_absent());
    }

    #[test]
    fn overstated_jump_breaks_divisibility((p, jumps, vals, basis) in module_strategy(), pick in 0usize..3) {
        let Some(m) = build(p, &jumps, &vals) else { return Ok(()) };
        let d = m.rank();
        let b = matrix(m.ctx(), d, &basis);
        prop_assume!(b.is_invertible());
        let i = pick % d;
        let r = jumps[i] as usize;
        prop_assume!(r + 1 < p as usize);
        let raw = m.to_raw(&b).unwrap();
        // add row i of B to Fil^{r+1}
        let mut fil = raw.filtration().to_vec();
        let row = b.select(&[i], &(0..d).collect::<Vec<_>>());
        if fil.len() == r + 1 {
            fil.push(row);
        } else {
            fil[r + 1] = fil[r + 1].vstack(&row).unwrap();
        }
        let bad = RawFilPhiModule::new(m.ctx(), raw.phi().clone(), fil).unwrap();
        prop_assert!(!bad.strong_divisibility_check().unwrap().divisible);
    }

    #[test]
    fn dual_twist_is_involutive((p, jumps, vals, _) in module_strategy(), shift in -3i64..3) {
        let Some(m) = build(p, &jumps, &vals) else { return Ok(()) };
        let m = FilPhiModule::new(m.ctx(), m.jumps().to_vec(), m.a().clone(), shift).unwrap();
        let dual = m.dual_twist(1).unwrap();
        prop_assert_eq!(dual.hodge_invariants().t_h, m.rank() as i64 - m.hodge_invariants().t_h);
        let back = dual.dual_twist(1).unwrap();
        prop_assert_eq!(back.actual_jumps(), m.actual_jumps());
        prop_assert_eq!(back.a(), m.a());
    }

    #[test]
    fn category_flags_swap_under_duality((p, jumps, vals, _) in module_strategy()) {
        // the flags refer to the window [0, r_d]; it is self-dual only when r_1 = 0
        let jumps: Vec<u32> = jumps.iter().map(|&r| r - jumps[0]).collect();
        let Some(m) = build(p, &jumps, &vals) else { return Ok(()) };
        let dual = m.dual_twist(1).unwrap();
        let (f, g) = (m.category_membership(), dual.category_membership());
        prop_assert_eq!(f.ab_star, g.a_star_b);
        prop_assert_eq!(f.a_star_b, g.ab_star);
        prop_assert_eq!(f.ab_star, slope_multiplicity(&m, 0) == 0);
        prop_assert_eq!(f.a_star_b, slope_multiplicity(&m, m.top_jump() as i64) == 0);
    }

    #[test]
    fn unit_root_rank_counts_slope_zero((p, jumps, vals, _) in module_strategy()) {
        let Some(m) = build(p, &jumps, &vals) else { return Ok(()) };
        prop_assert_eq!(m.unit_root_rank(), slope_multiplicity(&m, 0));
    }
}
