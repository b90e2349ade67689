//! Regenerates the voxel-aligned OBJ fixtures under `fixtures/meshes`.
//!
//! Each shape is a union of unit cells scaled to a 0.3 m structural edge.

use std::path::PathBuf;

use panelkit_core::geometry::write_obj;
use panelkit_core::{surface_mesh, CellIndex, VoxelGrid};

fn cuboid(out: &mut Vec<[u32; 3]>, x: std::ops::Range<u32>, y: std::ops::Range<u32>, z: std::ops::Range<u32>) {
    for i in x {
        for j in y.clone() {
            for k in z.clone() {
                out.push([i, j, k]);
            }
        }
    }
}

fn ring(out: &mut Vec<[u32; 3]>, size: u32, z: std::ops::Range<u32>) {
    for i in 0..size {
        for j in 0..size {
            if i == 0 || j == 0 || i == size - 1 || j == size - 1 {
                for k in z.clone() {
                    out.push([i, j, k]);
                }
            }
        }
    }
}

fn shapes() -> Vec<(&'static str, Vec<[u32; 3]>)> {
    let mut chair = Vec::new();
    cuboid(&mut chair, 0..2, 0..2, 0..1);
    cuboid(&mut chair, 0..2, 2..3, 0..3);

    let mut table = Vec::new();
    cuboid(&mut table, 0..3, 0..3, 2..3);
    for (x, y) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
        cuboid(&mut table, x..x + 1, y..y + 1, 0..2);
    }

    let mut shelf = Vec::new();
    cuboid(&mut shelf, 0..1, 0..1, 0..4);
    cuboid(&mut shelf, 3..4, 0..1, 0..4);
    cuboid(&mut shelf, 1..3, 0..1, 0..1);
    cuboid(&mut shelf, 1..3, 0..1, 2..3);

    let mut lamp = Vec::new();
    cuboid(&mut lamp, 0..3, 0..3, 0..1);
    cuboid(&mut lamp, 1..2, 1..2, 1..5);
    ring(&mut lamp, 3, 4..6);

    let mut bowl = Vec::new();
    cuboid(&mut bowl, 0..5, 0..5, 0..1);
    ring(&mut bowl, 5, 1..3);

    let mut trash = Vec::new();
    cuboid(&mut trash, 0..3, 0..3, 0..1);
    ring(&mut trash, 3, 1..4);

    vec![
        ("chair", chair),
        ("table", table),
        ("shelf", shelf),
        ("lamp", lamp),
        ("bowl", bowl),
        ("trash", trash),
    ]
}

fn main() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/meshes");
    std::fs::create_dir_all(&dir).expect("create fixture dir");
    for (name, cells) in shapes() {
        let mut cells: Vec<CellIndex> = cells.into_iter().map(CellIndex::from).collect();
        cells.sort();
        cells.dedup();
        let grid = VoxelGrid::from_cells(0.3, &cells).expect("grid");
        let mesh = surface_mesh(&grid).expect("mesh");
        assert!(mesh.is_watertight(), "{name} is not watertight");
        let path = dir.join(format!("{name}.obj"));
        std::fs::write(&path, write_obj(&mesh)).expect("write fixture");
        println!("{} cells -> {}", cells.len(), path.display());
    }
}
