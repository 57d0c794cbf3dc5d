use proptest::prelude::*;

use qmatrank::diagram::{Board, ShapeSpec};
use qmatrank::perms::{all, HULL_PATTERNS};
use qmatrank::rooks::{qrook, Convention};

fn partitions(max: usize, len: usize) -> Vec<Vec<usize>> {
    if len == 0 {
        return vec![vec![]];
    }
    let mut out = vec![vec![]];
    for first in 1..=max {
        for rest in partitions(first, len - 1) {
            let mut v = vec![first];
            v.extend(rest);
            out.push(v);
        }
    }
    out
}

#[test]
fn straight_shapes_se_equals_ne_up_to_six() {
    for n in 1..=6 {
        for lam in partitions(n, n) {
            let english = ShapeSpec::straight(lam.clone()).unwrap().board(n, n).unwrap();
            let rotated = english.rot180();
            for r in 0..=n {
                let se = qrook(&rotated, r, Convention::SE).unwrap();
                assert_eq!(se, qrook(&rotated, r, Convention::NE).unwrap(), "{lam:?} r={r}");
                assert_eq!(se, qrook(&english, r, Convention::NE).unwrap(), "{lam:?} r={r}");
            }
        }
    }
}

#[test]
fn hull_rooks_give_poincare_for_avoiders() {
    for n in 1..=6 {
        for w in all(n).filter(|w| w.avoids_all(&HULL_PATTERNS)) {
            let a = w.hull_shape().mu_size() as i64;
            let se = qrook(&w.left_hull(), n, Convention::SE).unwrap();
            assert_eq!(se.shift(a), w.poincare().unwrap(), "w={w}");
        }
    }
}

fn arb_board(max: usize) -> impl Strategy<Value = Board> {
    (1..=max, 1..=max).prop_flat_map(|(m, n)| {
        prop::collection::vec(0..(1u64 << n), m).prop_map(move |rows| Board::from_row_masks(n, rows).unwrap())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn degree_is_at_most_free_cells(b in arb_board(5)) {
        for r in 0..=b.m().min(b.n()) {
            for conv in [Convention::SE, Convention::NE] {
                let p = qrook(&b, r, conv).unwrap();
                if let Some(top) = p.max_exp() {
                    prop_assert!(top <= (b.len() as i64) - r as i64);
                    prop_assert!(p.min_exp().unwrap() >= 0);
                }
            }
        }
    }
}
