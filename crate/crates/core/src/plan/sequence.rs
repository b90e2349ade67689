use alloc::collections::{BTreeMap, BTreeSet};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::assembly::{AssemblyModel, ComponentKind, ComponentPlacement, PlacementTarget};
use super::PlanError;
use crate::geometry::CellIndex;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SequenceWarning {
    /// The occupied set splits into several 6-connected pieces.
    Disconnected { components: usize },
    /// A cell above the ground layer had no placed neighbour when its layer
    /// was swept; it can only be supported from above.
    Unsupported { cell: CellIndex },
    /// A panel whose owning cell is not in the assembly.
    OrphanPanel { cell: CellIndex },
}

fn neighbours(c: CellIndex) -> impl Iterator<Item = CellIndex> {
    crate::geometry::NEIGHBOURS_6.into_iter().filter_map(move |d| c.offset(d))
}

fn component_count(cells: &BTreeSet<CellIndex>) -> usize {
    let mut seen = BTreeSet::new();
    let mut count = 0;
    for &start in cells {
        if !seen.insert(start) {
            continue;
        }
        count += 1;
        let mut stack = alloc::vec![start];
        while let Some(c) = stack.pop() {
            for n in neighbours(c) {
                if cells.contains(&n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
    }
    count
}

/// Orders placements bottom-to-top.
///
/// Layers are swept in increasing `k`. Within a layer the next cell is the
/// smallest `(j, i)` among remaining cells that touch an already placed
/// cell; when none does, the smallest remaining cell starts a new run
/// (expected on the ground layer, flagged above it). Each layer's panels
/// follow its cells, ordered by owner position and then face direction.
pub fn sequence(model: &AssemblyModel) -> Result<AssemblyModel, PlanError> {
    if model.placements.is_empty() {
        return Err(PlanError::EmptyAssembly);
    }
    let mut layers: BTreeMap<u32, BTreeSet<(u32, u32)>> = BTreeMap::new();
    let mut structural: BTreeMap<CellIndex, &ComponentPlacement> = BTreeMap::new();
    let mut panels: BTreeMap<CellIndex, Vec<&ComponentPlacement>> = BTreeMap::new();
    for p in &model.placements {
        match (p.ctype, p.target) {
            (ComponentKind::Structural, PlacementTarget::Cell { cell }) => {
                layers.entry(cell.k).or_default().insert((cell.j, cell.i));
                structural.insert(cell, p);
            }
            (_, target) => panels.entry(target.cell()).or_default().push(p),
        }
    }

    let mut warnings = Vec::new();
    let occupied: BTreeSet<CellIndex> = structural.keys().copied().collect();
    let pieces = component_count(&occupied);
    if pieces > 1 {
        warnings.push(SequenceWarning::Disconnected { components: pieces });
    }

    let mut out: Vec<ComponentPlacement> = Vec::with_capacity(model.placements.len());
    let mut placed: BTreeSet<CellIndex> = BTreeSet::new();
    for (&k, remaining) in &mut layers {
        let mut layer_order: Vec<CellIndex> = Vec::with_capacity(remaining.len());
        let mut frontier: BTreeSet<(u32, u32)> = remaining
            .iter()
            .copied()
            .filter(|&(j, i)| k > 0 && placed.contains(&CellIndex::new(i, j, k - 1)))
            .collect();
        while let Some(&first) = remaining.iter().next() {
            let (j, i) = match frontier.pop_first() {
                Some(c) => c,
                None => {
                    if k > 0 {
                        warnings.push(SequenceWarning::Unsupported {
                            cell: CellIndex::new(first.1, first.0, k),
                        });
                    }
                    first
                }
            };
            remaining.remove(&(j, i));
            let cell = CellIndex::new(i, j, k);
            placed.insert(cell);
            layer_order.push(cell);
            out.push(structural[&cell].clone());
            for n in neighbours(cell) {
                if n.k == k && remaining.contains(&(n.j, n.i)) {
                    frontier.insert((n.j, n.i));
                }
            }
        }
        for cell in layer_order {
            if let Some(mut ps) = panels.remove(&cell) {
                ps.sort_by_key(|p| match p.target {
                    PlacementTarget::Face { dir, .. } => Some(dir),
                    PlacementTarget::Cell { .. } => None,
                });
                out.extend(ps.into_iter().cloned());
            }
        }
    }
    for (cell, ps) in panels {
        warnings.push(SequenceWarning::OrphanPanel { cell });
        out.extend(ps.into_iter().cloned());
    }

    Ok(AssemblyModel {
        placements: out,
        grid: model.grid.clone(),
        panel_labels: model.panel_labels.clone(),
        panel_thickness: model.panel_thickness,
        ordered: true,
        warnings,
    })
}
