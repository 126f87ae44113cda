use proptest::prelude::*;
use roundlab_core::numeric::{integer, rational};
use roundlab_core::roundness::{
    estimate_roundness, find_violation_exhaustive, simplex_gap, verify_witness, DoubleSimplex,
    EstimateMode, EstimateOptions,
};
use roundlab_core::{snowflake, FiniteMetricSpace, Numerics};

fn cycle(n: usize) -> FiniteMetricSpace {
    FiniteMetricSpace::from_fn(n, |i, j| {
        let d = i.abs_diff(j);
        integer(d.min(n - d) as i64)
    })
    .unwrap()
}

fn exhaustive(max_size: usize) -> EstimateOptions {
    EstimateOptions {
        max_size,
        p_tolerance: 1e-3,
        p_cap: 16.0,
        budget: u64::MAX,
        mode: EstimateMode::Exhaustive,
    }
}

#[test]
fn monotone_in_p() {
    let num = Numerics::default();
    for n in [3usize, 4, 5, 6] {
        let space = cycle(n);
        let grid = [0.25, 0.5, 0.9, 1.0, 1.1, 1.5, 2.0, 3.0];
        let found: Vec<bool> = grid
            .iter()
            .map(|&p| {
                find_violation_exhaustive(&space, 2, p, u64::MAX, &num)
                    .unwrap()
                    .is_some()
            })
            .collect();
        for w in found.windows(2) {
            assert!(!w[0] || w[1], "C_{n}: {found:?}");
        }
    }
}

#[test]
fn snowflake_doubles_four_cycle() {
    let num = Numerics::default();
    let plain = estimate_roundness(&cycle(4), None, &exhaustive(2), &num).unwrap();
    assert!(plain.lower <= 1.0 && plain.upper.unwrap() >= 1.0);
    assert!(plain.upper.unwrap() - plain.lower <= 1e-3);
    let half = snowflake(cycle(4), rational(1, 2)).unwrap();
    let est = estimate_roundness(&half, None, &exhaustive(2), &num).unwrap();
    assert!(est.lower <= 2.0 && est.upper.unwrap() >= 2.0, "{est:?}");
}

#[test]
fn witnesses_survive_recomputation() {
    let num = Numerics::default();
    let doubled = num.with_precision(160);
    for n in [4usize, 6] {
        for p in [1.2, 2.5] {
            let w = find_violation_exhaustive(&cycle(n), 2, p, u64::MAX, &num)
                .unwrap()
                .unwrap();
            let again = verify_witness(&cycle(n), &w, p, &doubled).unwrap();
            assert!(again.violated && again.gap < 0.0);
        }
    }
}

fn gap_of(space: &FiniteMetricSpace, xs: &[usize], ys: &[usize], p: f64) -> f64 {
    let ds = DoubleSimplex::new(xs.to_vec(), ys.to_vec()).unwrap();
    simplex_gap(space, &ds, p, &Numerics::default())
        .unwrap()
        .gap
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gap_symmetries(
        pts in prop::collection::vec(0i64..50, 6),
        p in 0.0f64..4.0,
        rot in 0usize..3,
    ) {
        let space = FiniteMetricSpace::from_fn(6, |i, j| integer((pts[i] - pts[j]).abs() + i64::from(i != j))).unwrap();
        let (xs, ys) = ([0usize, 1, 2], [3usize, 4, 5]);
        let base = gap_of(&space, &xs, &ys, p);
        let tol = 1e-9 * base.abs().max(1.0);
        prop_assert!((gap_of(&space, &ys, &xs, p) - base).abs() <= tol);
        let mut xr = xs;
        xr.rotate_left(rot);
        let mut yr = ys;
        yr.rotate_right(rot);
        prop_assert!((gap_of(&space, &xr, &yr, p) - base).abs() <= tol);
        // relabel: reverse the point order and map the configuration along
        let flipped = FiniteMetricSpace::from_fn(6, |i, j| space.get(5 - i, 5 - j).clone()).unwrap();
        let relabel = |v: [usize; 3]| v.map(|i| 5 - i);
        prop_assert!((gap_of(&flipped, &relabel(xs), &relabel(ys), p) - base).abs() <= tol);
    }
}

#[test]
fn zero_exponent_convention() {
    // d^0 = 1 for distinct points: 2 edges vs 4 connecting lines.
    let space = cycle(4);
    assert_eq!(gap_of(&space, &[0, 2], &[1, 3], 0.0), 2.0);
}
