//! Randomized invariants over the exact constructions.

use proptest::prelude::*;

use coarsekit_core::norm::norm_bounds;
use coarsekit_core::operator::SparseOperator;
use coarsekit_core::space::{make_window, Family};
use coarsekit_core::translations::{to_operator, PartialTranslation};
use coarsekit_core::{ratio, Rational, RationalOperator};

fn z_window(n: u64) -> coarsekit_core::space::Space {
    make_window(&Family::Z, n).unwrap()
}

/// Random partial translation on a 12-point line: a permutation fragment.
fn translation_strategy() -> impl Strategy<Value = Vec<(usize, usize)>> {
    // choose disjoint sources and targets from a shuffled deck
    (Just(()), proptest::collection::vec(0..12usize, 0..12)).prop_map(|(_, raw)| {
        let mut used_src = [false; 12];
        let mut used_dst = [false; 12];
        let mut pairs = Vec::new();
        for (k, &dst) in raw.iter().enumerate() {
            let src = (k * 5 + dst) % 12;
            if !used_src[src] && !used_dst[dst] {
                used_src[src] = true;
                used_dst[dst] = true;
                pairs.push((src, dst));
            }
        }
        pairs
    })
}

fn operator_strategy(dim: usize) -> impl Strategy<Value = RationalOperator> {
    proptest::collection::vec(
        ((0..dim), (0..dim), -5i64..=5, 1i64..=3),
        0..=2 * dim,
    )
    .prop_map(move |entries| {
        let mut op = RationalOperator::zero(dim);
        for (x, y, n, d) in entries {
            op.set(x, y, ratio(n, d));
        }
        op
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn operator_of_composition_is_product(a in translation_strategy(), b in translation_strategy()) {
        let s = z_window(12);
        let ta = PartialTranslation::from_pairs(&s, &a).unwrap();
        let tb = PartialTranslation::from_pairs(&s, &b).unwrap();
        let va: RationalOperator = to_operator(&s, &ta);
        let vb: RationalOperator = to_operator(&s, &tb);
        let vc: RationalOperator = to_operator(&s, &ta.compose(&tb, &s));
        prop_assert_eq!(va.mul(&vb), vc);
    }

    #[test]
    fn inverse_gives_transpose(a in translation_strategy()) {
        let s = z_window(12);
        let t = PartialTranslation::from_pairs(&s, &a).unwrap();
        let v: RationalOperator = to_operator(&s, &t);
        let w: RationalOperator = to_operator(&s, &t.inverse());
        prop_assert_eq!(v.transpose(), w.clone());
        // W V = 1_dom, V W = 1_ran
        prop_assert_eq!(w.mul(&v), RationalOperator::indicator(12, &t.domain()));
        prop_assert_eq!(v.mul(&w), RationalOperator::indicator(12, &t.range()));
    }

    #[test]
    fn norm_sandwich(op in operator_strategy(8)) {
        for p in [1.0, 1.5, 2.0, 3.0] {
            let est = norm_bounds(&op, p).unwrap();
            prop_assert!(est.lower <= est.upper + 1e-12, "p={p}: {} > {}", est.lower, est.upper);
        }
        // p = 1 agrees with the exact column-sum oracle
        let est = norm_bounds(&op, 1.0).unwrap();
        let oracle = op.norm_p1();
        let as_f = oracle.numer().to_string().parse::<f64>().unwrap()
            / oracle.denom().to_string().parse::<f64>().unwrap();
        prop_assert!((est.lower - as_f).abs() < 1e-9);
    }

    #[test]
    fn submultiplicative_p1(a in operator_strategy(6), b in operator_strategy(6)) {
        let prod = a.mul(&b).norm_p1();
        prop_assert!(prod <= a.norm_p1() * b.norm_p1());
    }

    #[test]
    fn restriction_contracts_p1_and_pinf(op in operator_strategy(8), mask in proptest::collection::vec(any::<bool>(), 8)) {
        let set: Vec<usize> = (0..8).filter(|&i| mask[i]).collect();
        let cut = op.restrict(&set);
        prop_assert!(cut.norm_p1() <= op.norm_p1());
        prop_assert!(cut.norm_pinf() <= op.norm_pinf());
    }

    #[test]
    fn separated_partition_invariants(n in 2u64..30, s in 1u64..6) {
        let space = z_window(n);
        let part = space.separated_partition(s).unwrap();
        part.verify(&space).unwrap();
        // covers every point exactly once
        let mut count = vec![0usize; space.len()];
        for class in &part.classes {
            for &x in class {
                count[x] += 1;
            }
        }
        prop_assert!(count.iter().all(|&c| c == 1));
    }

    #[test]
    fn r_components_match_bfs_oracle(n in 1u64..5, r in 0u64..4) {
        let sizes = [1, 2, 1, 3, 1];
        let gaps = [1, 2, 3, 4];
        let take = n as usize;
        let space = coarsekit_core::space::gap_union(&sizes[..take.max(1)], &gaps).unwrap();
        let fast = space.r_components(r).classes;
        let slow = coarsekit_core::space::r_components_bfs(&space, r);
        prop_assert_eq!(fast, slow);
    }

    #[test]
    fn expectation_is_contractive_projection(op in operator_strategy(8)) {
        let e = coarsekit_core::roe::cond_expectation(&op);
        prop_assert_eq!(coarsekit_core::roe::cond_expectation(&e), e.clone());
        prop_assert!(e.norm_p1() <= op.norm_p1());
        prop_assert!(e.norm_pinf() <= op.norm_pinf());
    }

    #[test]
    fn block_decompose_exactness(op in operator_strategy(8)) {
        // gap blocks: {0,1}, {2,3,4}, {5,6,7} with gaps 2, 3
        let space = coarsekit_core::space::gap_union(&[2, 3, 3], &[2, 3]).unwrap();
        let dec = coarsekit_core::roe::block_decompose(&op, &space, 1);
        let mut sum = dec.residue.clone();
        for b in &dec.blocks {
            sum = sum.add(b);
        }
        prop_assert_eq!(sum, op.clone());
        if op.propagation(&space) <= 1 {
            prop_assert!(dec.residue.is_zero());
        }
    }
}

#[test]
fn scalar_generic_over_floats() {
    // the same construction code runs over f64 entries
    let mut a: SparseOperator<f64> = SparseOperator::zero(3);
    a.set(0, 1, 0.5);
    a.set(1, 2, -0.25);
    assert_eq!(a.mul(&a).get(0, 2), -0.125);
    let r: RationalOperator =
        RationalOperator::from_entries(3, [(0, 1, ratio(1, 2)), (1, 2, ratio(-1, 4))]).unwrap();
    assert_eq!(r.to_float().get(0, 1), 0.5);
    let _: Rational = r.norm_p1();
}
