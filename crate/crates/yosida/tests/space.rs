//! Property tests for norms and one-sided duality brackets.
//!
//! The closed-form brackets are cross-checked against the difference
//! quotient `(|x + h y| - |x|) / h`, which converges to the plus bracket
//! from above as `h` decreases to 0 and to the minus bracket from below as
//! `h` increases to 0 (convexity of the norm makes the quotient monotone
//! in `h`).  That limit definition is the independent oracle; the closed
//! forms are what the library ships.

use proptest::prelude::*;
use yosida::{NormKind, Space};

const KINDS: [NormKind; 3] = [NormKind::Euclidean, NormKind::Sup, NormKind::One];

fn add_scaled(x: &[f64], y: &[f64], h: f64) -> Vec<f64> {
    x.iter().zip(y).map(|(a, b)| a + h * b).collect()
}

fn quotient(space: Space, y: &[f64], x: &[f64], h: f64) -> f64 {
    (space.norm(&add_scaled(x, y, h)).unwrap() - space.norm(x).unwrap()) / h
}

fn small_vec(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-5.0..5.0f64, dim)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn brackets_are_ordered_and_bounded_by_the_norm(
        (x, y) in (2usize..5).prop_flat_map(|d| (small_vec(d), small_vec(d)))
    ) {
        for kind in KINDS {
            let space = Space::new(x.len(), kind).unwrap();
            let br = space.bracket(&y, &x).unwrap();
            let ny = space.norm(&y).unwrap();
            prop_assert!(br.minus <= br.plus + 1e-12);
            prop_assert!(br.plus <= ny + 1e-12);
            prop_assert!(br.minus >= -ny - 1e-12);
        }
    }

    #[test]
    fn difference_quotients_sandwich_the_brackets(
        (x, y) in (2usize..5).prop_flat_map(|d| (small_vec(d), small_vec(d)))
    ) {
        for kind in KINDS {
            let space = Space::new(x.len(), kind).unwrap();
            if space.norm(&x).unwrap() < 1e-6 {
                continue; // near zero the quotient is dominated by |y| anyway
            }
            let br = space.bracket(&y, &x).unwrap();
            // Convexity: quotient(h) decreases to [y,x]_+ as h -> 0+ and
            // increases to [y,x]_- as h -> 0-.
            for h in [1e-1, 1e-3, 1e-6] {
                prop_assert!(
                    br.plus <= quotient(space, &y, &x, h) + 1e-9,
                    "plus bracket exceeds a positive difference quotient"
                );
                prop_assert!(
                    br.minus >= quotient(space, &y, &x, -h) - 1e-9,
                    "minus bracket undershoots a negative difference quotient"
                );
            }
            // The quotient at h = 1e-6 is already within O(h) of the limit.
            prop_assert!((quotient(space, &y, &x, 1e-6) - br.plus).abs() < 1e-4);
            prop_assert!((quotient(space, &y, &x, -1e-6) - br.minus).abs() < 1e-4);
        }
    }

    #[test]
    fn brackets_are_positively_homogeneous_in_both_arguments(
        (x, y, a) in (2usize..4)
            .prop_flat_map(|d| (small_vec(d), small_vec(d), 0.1..4.0f64))
    ) {
        for kind in KINDS {
            let space = Space::new(x.len(), kind).unwrap();
            let base = space.bracket(&y, &x).unwrap();
            let ys: Vec<f64> = y.iter().map(|v| a * v).collect();
            let scaled_y = space.bracket(&ys, &x).unwrap();
            prop_assert!((scaled_y.plus - a * base.plus).abs() <= 1e-9 * (1.0 + a));
            prop_assert!((scaled_y.minus - a * base.minus).abs() <= 1e-9 * (1.0 + a));
            if space.norm(&x).unwrap() > 1e-6 {
                let xs: Vec<f64> = x.iter().map(|v| a * v).collect();
                let scaled_x = space.bracket(&y, &xs).unwrap();
                prop_assert!((scaled_x.plus - base.plus).abs() <= 1e-9);
                prop_assert!((scaled_x.minus - base.minus).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn plus_bracket_is_subadditive_in_the_direction(
        (x, y1, y2) in (2usize..4)
            .prop_flat_map(|d| (small_vec(d), small_vec(d), small_vec(d)))
    ) {
        for kind in KINDS {
            let space = Space::new(x.len(), kind).unwrap();
            let sum: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| a + b).collect();
            let bs = space.bracket(&sum, &x).unwrap();
            let b1 = space.bracket(&y1, &x).unwrap();
            let b2 = space.bracket(&y2, &x).unwrap();
            prop_assert!(bs.plus <= b1.plus + b2.plus + 1e-9);
            prop_assert!(bs.minus >= b1.minus + b2.minus - 1e-9);
        }
    }

    #[test]
    fn norm_drift_along_a_curve_is_bounded_by_bracket_integrals(
        (x, y) in (2usize..4).prop_flat_map(|d| (small_vec(d), small_vec(d)))
    ) {
        // For the straight line x + t y the norm's derivative lies between
        // the brackets, so |x + h y| - |x| sits between h-averages of them.
        let h = 1e-3;
        for kind in KINDS {
            let space = Space::new(x.len(), kind).unwrap();
            let drift = space.norm(&add_scaled(&x, &y, h)).unwrap() - space.norm(&x).unwrap();
            let lo: f64 = space.bracket(&y, &x).unwrap().minus;
            let ny = space.norm(&y).unwrap();
            // One-sided: drift <= h |y| always, and drift >= h [y,x]_- - O(h^2).
            prop_assert!(drift <= h * ny + 1e-12);
            prop_assert!(drift >= h * lo - 2.0 * h * h * ny.max(1.0) - 1e-12);
        }
    }
}

#[test]
fn bracket_at_the_origin_degenerates_to_the_norm() {
    for kind in KINDS {
        let space = Space::new(3, kind).unwrap();
        let y = [1.0, -2.0, 0.5];
        let br = space.bracket(&y, &[0.0, 0.0, 0.0]).unwrap();
        let ny = space.norm(&y).unwrap();
        assert_eq!(br.plus, ny);
        assert_eq!(br.minus, -ny);
    }
}

#[test]
fn euclidean_bracket_is_the_normalized_inner_product() {
    let space = Space::new(2, NormKind::Euclidean).unwrap();
    let br = space.bracket(&[1.0, 1.0], &[3.0, 4.0]).unwrap();
    let expect = (3.0 + 4.0) / 5.0;
    assert!((br.plus - expect).abs() < 1e-15);
    assert_eq!(br.plus, br.minus);
}

#[test]
fn dimension_mismatches_are_rejected() {
    let space = Space::new(2, NormKind::Sup).unwrap();
    assert!(space.norm(&[1.0]).is_err());
    assert!(space.bracket(&[1.0], &[1.0, 2.0]).is_err());
    assert!(space.norm_diff(&[1.0, 2.0], &[1.0]).is_err());
    assert!(Space::new(0, NormKind::One).is_err());
}
