mod support;

use proptest::prelude::*;
use support::invariants::*;

fn grid_parts() -> impl Strategy<Value = GridParts> {
    (100i32..400, 100i32..400).prop_flat_map(|(w, h)| {
        (
            prop::collection::vec((0..w, 0..h, 1..h), 0..8),
            prop::collection::vec((0..h, 0..w, 1..w), 0..8),
            prop::collection::vec((0..w - 20, 0..h - 10, 5i32..60, 3i32..20), 0..3),
        )
            .prop_map(move |(verticals, horizontals, titles)| GridParts {
                width: w,
                height: h,
                verticals,
                horizontals,
                titles,
            })
    })
}

fn blobs() -> impl Strategy<Value = (Vec<Blob>, Vec<bool>)> {
    (1usize..12).prop_flat_map(|n| {
        (
            prop::collection::vec((0i32..200, 20i32..150, 4i32..12), n).prop_map(|v| {
                v.into_iter().enumerate().map(|(i, (x, w, h))| (x, 10 + 40 * i as i32, w, h)).collect()
            }),
            prop::collection::vec(any::<bool>(), n),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn raw_grid_boxes_partition_page(parts in grid_parts()) {
        prop_assert_eq!(check_partition(&parts.raw_grid()), Ok(()));
    }

    #[test]
    fn generated_grid_boxes_partition_page(parts in grid_parts()) {
        prop_assert_eq!(check_partition(&parts.generated()), Ok(()));
    }

    #[test]
    fn prolongation_grows_to_fixpoint(parts in grid_parts()) {
        prop_assert_eq!(check_prolongation(&parts.raw_grid()), Ok(()));
    }

    #[test]
    fn reading_order_is_permutation(parts in grid_parts()) {
        prop_assert_eq!(check_order_permutation(&parts.generated()), Ok(()));
    }

    #[test]
    fn lines_conserved_through_split_and_assign(parts in grid_parts(), (b, f) in blobs()) {
        let grid = newsseg_core::grid::SeparatorGrid {
            page: newsseg_core::Rect::new(0, 0, 400, 600),
            ..parts.raw_grid()
        };
        prop_assert_eq!(check_line_conservation(make_lines(&b, &f), &grid), Ok(()));
    }
}

#[test]
fn seeded_invariant_sweep() {
    check_all(300, 21).unwrap();
}

#[test]
fn fused_fixture_is_split() {
    use newsseg_core::textlines::{compute_line_stats, split_merged_lines, SplitParams};
    let blobs = [(10, 10, 100, 8), (10, 50, 100, 8), (10, 90, 100, 8), (10, 130, 100, 8), (10, 170, 100, 8)];
    let lines = make_lines(&blobs, &[true, false, false, false, false]);
    assert_eq!(lines.len(), 4);
    let stats = compute_line_stats(&lines);
    let params = SplitParams { factor: 1.2, ..SplitParams::default() };
    let split = split_merged_lines(lines, &stats, &params);
    assert!(split.len() >= 5, "fused pair left whole: {} lines", split.len());
}
