//! Brute-force reference implementations used by several test targets.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use panelkit_core::decompose::{Decomposition, Direction, OmissionReason};
use panelkit_core::plan::{AssemblyModel, ComponentKind, PlacementTarget};

type Cell = [i64; 3];

const DIRS: [(Direction, [i64; 3]); 6] = [
    (Direction::PosZ, [0, 0, 1]),
    (Direction::PosX, [1, 0, 0]),
    (Direction::NegX, [-1, 0, 0]),
    (Direction::PosY, [0, 1, 0]),
    (Direction::NegY, [0, -1, 0]),
    (Direction::NegZ, [0, 0, -1]),
];

fn axis_of(d: [i64; 3]) -> usize {
    d.iter().position(|&v| v != 0).unwrap()
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// A patch as the oracle sees it: direction, sorted member cells, and the
/// omission reason if filtered.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OraclePatch {
    pub dir: Direction,
    pub cells: Vec<Cell>,
    pub omitted: Option<OmissionReason>,
}

/// Exposed faces by direct neighbour lookup.
pub fn exposed(cells: &[[u32; 3]]) -> Vec<(Cell, Direction, [i64; 3])> {
    let occ: HashSet<Cell> = cells.iter().map(|c| [c[0] as i64, c[1] as i64, c[2] as i64]).collect();
    let mut out = Vec::new();
    for &c in &occ {
        for (dir, d) in DIRS {
            let n = [c[0] + d[0], c[1] + d[1], c[2] + d[2]];
            if !occ.contains(&n) {
                out.push((c, dir, d));
            }
        }
    }
    out
}

/// Union-find merge of exposed faces, then the two omission rules, with a
/// column march for the inward test.
pub fn partition(cells: &[[u32; 3]], dims: [u32; 3]) -> Vec<OraclePatch> {
    let occ: HashSet<Cell> = cells.iter().map(|c| [c[0] as i64, c[1] as i64, c[2] as i64]).collect();
    let faces = exposed(cells);
    let mut parent: Vec<usize> = (0..faces.len()).collect();
    for a in 0..faces.len() {
        for b in a + 1..faces.len() {
            let (ca, da, va) = faces[a];
            let (cb, db, _) = faces[b];
            if da != db {
                continue;
            }
            let ax = axis_of(va);
            if ca[ax] != cb[ax] {
                continue;
            }
            let dist: i64 = (0..3).map(|i| (ca[i] - cb[i]).abs()).sum();
            if dist == 1 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for f in 0..faces.len() {
        let r = find(&mut parent, f);
        groups.entry(r).or_default().push(f);
    }
    let mut out = Vec::new();
    for members in groups.values() {
        let (_, dir, d) = faces[members[0]];
        let mut mcells: Vec<Cell> = members.iter().map(|&f| faces[f].0).collect();
        mcells.sort();
        let omitted = match dir {
            Direction::PosZ => None,
            Direction::NegZ => Some(OmissionReason::DownwardHorizontal),
            _ => {
                let ax = axis_of(d);
                let s = d[ax];
                let mut centroid = [0.0f64; 3];
                for c in &mcells {
                    for i in 0..3 {
                        centroid[i] += c[i] as f64 + 0.5 + 0.5 * d[i] as f64;
                    }
                }
                for v in &mut centroid {
                    *v /= mcells.len() as f64;
                }
                let mut probe = [centroid[0].floor() as i64, centroid[1].floor() as i64, centroid[2].floor() as i64];
                let plane = mcells[0][ax] + if s > 0 { 1 } else { 0 };
                probe[ax] = if s > 0 { plane } else { plane - 1 };
                let mut inward = false;
                while probe[ax] >= 0 && probe[ax] < dims[ax] as i64 {
                    if occ.contains(&probe) {
                        inward = true;
                        break;
                    }
                    probe[ax] += s;
                }
                inward.then_some(OmissionReason::InwardVertical)
            }
        };
        out.push(OraclePatch { dir, cells: mcells, omitted });
    }
    out.sort();
    out
}

/// The decomposition restated in oracle form, after checking label order.
pub fn from_decomposition(d: &Decomposition) -> Vec<OraclePatch> {
    let mut keys = Vec::new();
    for (n, p) in d.patches.iter().enumerate() {
        assert_eq!(p.label, Some(n as u32 + 1), "labels are 1..=n in order");
        keys.push((p.normal, p.plane_coord, p.min_cell()));
    }
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted, "labels follow (normal, plane, min cell)");
    let mut out: Vec<OraclePatch> = d
        .patches
        .iter()
        .map(|p| (p, None))
        .chain(d.omitted.iter().map(|o| (&o.patch, Some(o.reason))))
        .map(|(p, omitted)| {
            assert!(p.label.is_none() || omitted.is_none());
            assert_eq!(p.area_cells, p.cells.len());
            let mut cells: Vec<Cell> = p
                .cells
                .iter()
                .map(|f| {
                    assert_eq!(f.dir, p.normal);
                    [f.cell.i as i64, f.cell.j as i64, f.cell.k as i64]
                })
                .collect();
            cells.sort();
            OraclePatch { dir: p.normal, cells, omitted }
        })
        .collect();
    out.sort();
    out
}

/// Replays prefixes of an ordered model and returns the first broken rule.
///
/// Rules: structural cells never descend in `k`; each cell above the ground
/// layer touches an earlier cell; ties within a layer are resolved by the
/// smallest `(j, i)` among cells that touch an earlier cell; every panel
/// comes after its owning cell.
pub fn check_sequence(model: &AssemblyModel) -> Result<(), String> {
    let all: BTreeSet<Cell> = model
        .placements
        .iter()
        .filter(|p| p.ctype == ComponentKind::Structural)
        .map(|p| {
            let c = p.target.cell();
            [c.i as i64, c.j as i64, c.k as i64]
        })
        .collect();
    let mut placed: BTreeSet<Cell> = BTreeSet::new();
    let mut last_k = -1;
    let touches = |placed: &BTreeSet<Cell>, c: Cell| {
        DIRS.iter().any(|(_, d)| placed.contains(&[c[0] + d[0], c[1] + d[1], c[2] + d[2]]))
    };
    for (n, p) in model.placements.iter().enumerate() {
        match p.target {
            PlacementTarget::Cell { cell } => {
                let c = [cell.i as i64, cell.j as i64, cell.k as i64];
                if c[2] < last_k {
                    return Err(format!("step {n}: layer {} after {last_k}", c[2]));
                }
                last_k = c[2];
                let adjacent = touches(&placed, c);
                if c[2] > 0 && !adjacent {
                    return Err(format!("step {n}: {c:?} touches nothing placed"));
                }
                let candidates: Vec<Cell> = all
                    .iter()
                    .copied()
                    .filter(|x| x[2] == c[2] && !placed.contains(x) && touches(&placed, *x))
                    .collect();
                let best = candidates.iter().min_by_key(|x| (x[1], x[0]));
                match best {
                    Some(b) if *b != c => return Err(format!("step {n}: {c:?} chosen over {b:?}")),
                    None => {
                        let rest = all.iter().filter(|x| x[2] == c[2] && !placed.contains(*x)).min_by_key(|x| (x[1], x[0]));
                        if rest != Some(&c) {
                            return Err(format!("step {n}: new run should start at {rest:?}"));
                        }
                    }
                    _ => {}
                }
                placed.insert(c);
            }
            PlacementTarget::Face { cell, .. } => {
                let c = [cell.i as i64, cell.j as i64, cell.k as i64];
                if !placed.contains(&c) {
                    return Err(format!("step {n}: panel before owner {c:?}"));
                }
            }
        }
    }
    if placed != all {
        return Err("not every cell placed".into());
    }
    Ok(())
}

/// `Rx(a) * Ry(b) * Rz(c)` built by explicit matrix products.
pub fn euler_xyz(r: [f64; 3]) -> [[f64; 3]; 3] {
    let (a, b, c) = (r[0], r[1], r[2]);
    let rx = [[1.0, 0.0, 0.0], [0.0, a.cos(), -a.sin()], [0.0, a.sin(), a.cos()]];
    let ry = [[b.cos(), 0.0, b.sin()], [0.0, 1.0, 0.0], [-b.sin(), 0.0, b.cos()]];
    let rz = [[c.cos(), -c.sin(), 0.0], [c.sin(), c.cos(), 0.0], [0.0, 0.0, 1.0]];
    let mul = |m: [[f64; 3]; 3], n: [[f64; 3]; 3]| {
        let mut o = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                o[i][j] = (0..3).map(|k| m[i][k] * n[k][j]).sum();
            }
        }
        o
    };
    mul(mul(rx, ry), rz)
}
