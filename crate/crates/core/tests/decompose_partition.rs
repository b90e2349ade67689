mod common;

use common::oracles;
use panelkit_core::decompose::{exposed_faces, Direction, OmissionReason};
use panelkit_core::{decompose, select};
use proptest::prelude::*;

fn check(cells: &[[u32; 3]]) {
    let grid = common::grid(1.0, cells);
    let d = decompose(&grid).unwrap();
    assert_eq!(oracles::from_decomposition(&d), oracles::partition(cells, grid.dims()));
}

#[test]
fn face_counts() {
    let count = |cells: &[[u32; 3]]| exposed_faces(&common::grid(1.0, cells)).unwrap().len();
    assert_eq!(count(&[[0, 0, 0]]), 6);
    assert_eq!(count(&[[0, 0, 0], [1, 0, 0]]), 10);
    let cube: Vec<[u32; 3]> = (0..8).map(|n| [n & 1, (n >> 1) & 1, n >> 2]).collect();
    assert_eq!(count(&cube), 24);
    assert_eq!(oracles::exposed(&cube).len(), 24);
}

#[test]
fn fixtures_match_oracle() {
    for name in common::FIXTURES {
        let d = common::fixture(name);
        let cells: Vec<[u32; 3]> = d.grid.occupied_cells().map(|c| [c.i, c.j, c.k]).collect();
        assert_eq!(oracles::from_decomposition(&d), oracles::partition(&cells, d.grid.dims()), "{name}");
    }
}

#[test]
fn chair_labels() {
    let d = common::fixture("chair");
    assert_eq!(d.label_count(), 7);
    let seat = d.patch(1).unwrap();
    assert_eq!((seat.normal, seat.area_cells), (Direction::PosZ, 4));
    let front = d.patch(7).unwrap();
    assert_eq!((front.normal, front.area_cells), (Direction::NegY, 4));
    let back = d.patch(5).unwrap();
    assert_eq!(back.normal, Direction::PosY);
    assert!(d.omitted.iter().all(|o| o.reason == OmissionReason::DownwardHorizontal));
}

#[test]
fn table_inner_leg_faces_are_omitted() {
    let d = common::fixture("table");
    let inward = d.omitted.iter().filter(|o| o.reason == OmissionReason::InwardVertical).count();
    assert_eq!(inward, 8);
    assert_eq!(select::rule_based_select(&d).labels.into_iter().collect::<Vec<_>>(), [1]);
}

#[test]
fn randomized_grids_up_to_125_cells() {
    let mut rng = common::rng(125);
    for n in 0..300 {
        let density = [0.1, 0.3, 0.5, 0.8][n % 4];
        let cells = common::random_grid(&mut rng, 5, density);
        check(&cells);
    }
}

#[test]
fn decomposition_json_round_trip() {
    let d = common::fixture("lamp");
    let json = serde_json::to_string(&d).unwrap();
    let back: panelkit_core::Decomposition = serde_json::from_str(&json).unwrap();
    assert_eq!(back, d);
    assert!(json.contains("\"normal\":\"+Z\""));
}

proptest! {
    #[test]
    fn partition_property(raw in prop::collection::btree_set((0u32..5, 0u32..5, 0u32..5), 1..=125)) {
        let cells: Vec<[u32; 3]> = raw.into_iter().map(|(i, j, k)| [i, j, k]).collect();
        let grid = common::grid(1.0, &cells);
        let d = decompose(&grid).unwrap();
        let faces = exposed_faces(&grid).unwrap();
        let members: usize = d.all_patches().map(|p| p.cells.len()).sum();
        prop_assert_eq!(members, faces.len());
        prop_assert_eq!(oracles::from_decomposition(&d), oracles::partition(&cells, grid.dims()));
    }
}
