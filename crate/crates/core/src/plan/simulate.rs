use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::assembly::{panel_pose, structural_pose, ComponentKind, PlacementTarget};
use super::program::{step_motions, Motion, PickPlaceStep, Pose, RobotProgram};
use crate::decompose::CellFace;
use crate::geometry::{CellIndex, ComponentSpec};

const POSE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ViolationKind {
    /// Program frame disagrees with the component spec.
    FrameMismatch,
    WrongSource,
    InvalidTarget,
    TemplateMismatch,
    GripperSequence,
    PoseMismatch,
    Occupied,
    Collision,
    Unsupported,
    PanelBeforeSupport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    /// 1-based step number; 0 for program-level problems.
    pub step: usize,
    pub kind: ViolationKind,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimulationReport {
    pub verdict: Verdict,
    pub steps: usize,
    pub violations: Vec<Violation>,
}

impl SimulationReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub fn has(&self, kind: ViolationKind) -> bool {
        self.violations.iter().any(|v| v.kind == kind)
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Gripper {
    Unknown,
    Open,
    Holding,
}

type Key = [i64; 3];

fn key(c: CellIndex) -> Key {
    [c.i as i64, c.j as i64, c.k as i64]
}

/// Everything placed so far, indexed by the grid slot each part sits in.
/// A panel sits in the empty cell across its face.
#[derive(Default)]
struct World {
    cells: BTreeSet<Key>,
    faces: BTreeSet<CellFace>,
    panel_slots: BTreeSet<Key>,
    /// (i, j) -> layers with something in them.
    columns: BTreeMap<[i64; 2], BTreeSet<i64>>,
}

impl World {
    fn cell_placed(&self, k: Key) -> bool {
        self.cells.contains(&k)
    }

    fn anything_above(&self, slot: Key) -> bool {
        self.columns
            .get(&[slot[0], slot[1]])
            .is_some_and(|ks| ks.range(slot[2] + 1..).next().is_some())
    }

    fn mark_column(&mut self, slot: Key) {
        self.columns.entry([slot[0], slot[1]]).or_default().insert(slot[2]);
    }
}

fn pose_close(a: &Pose, b: &Pose) -> bool {
    let dp = a.position - b.position;
    let dr = (0..3).all(|n| libm::fabs(a.rotation[n] - b.rotation[n]) <= POSE_TOL);
    libm::fabs(dp.x) <= POSE_TOL && libm::fabs(dp.y) <= POSE_TOL && libm::fabs(dp.z) <= POSE_TOL && dr
}

struct Sim<'a> {
    program: &'a RobotProgram,
    spec: &'a ComponentSpec,
    world: World,
    gripper: Gripper,
    violations: Vec<Violation>,
}

impl Sim<'_> {
    fn flag(&mut self, step: usize, kind: ViolationKind, message: String) {
        self.violations.push(Violation { step, kind, message });
    }

    fn run_motions(&mut self, step: usize, motions: &[Motion]) {
        for m in motions {
            match m {
                Motion::MoveTo { .. } => {}
                Motion::CloseGripper { .. } => {
                    if self.gripper != Gripper::Open {
                        self.flag(step, ViolationKind::GripperSequence, "close while not open".into());
                    }
                    self.gripper = Gripper::Holding;
                }
                Motion::OpenGripper { .. } => {
                    if step > 0 && self.gripper != Gripper::Holding {
                        self.flag(step, ViolationKind::GripperSequence, "release while not holding".into());
                    }
                    self.gripper = Gripper::Open;
                }
            }
        }
    }

    fn check_step(&mut self, n: usize, step: &PickPlaceStep) {
        let program = self.program;
        if step.source.serves() != step.ctype {
            self.flag(n, ViolationKind::WrongSource, alloc::format!("{:?} from {:?}", step.ctype, step.source));
        }
        match program.stations.iter().find(|s| s.id == step.source) {
            Some(s) if pose_close(&step.pickup, &Pose::new(s.pickup, [0.0; 3])) => {}
            _ => self.flag(n, ViolationKind::WrongSource, "pickup pose is not the station pose".into()),
        }
        if step.motions != step_motions(step.pickup, step.place, &program.params) {
            self.flag(n, ViolationKind::TemplateMismatch, "motions differ from the pick/place template".into());
        }
        self.run_motions(n, &step.motions);

        match (step.ctype, step.target) {
            (ComponentKind::Structural, PlacementTarget::Cell { cell }) => {
                let (p, r) = structural_pose(&program.frame, cell);
                if !pose_close(&step.place, &Pose::new(p, r)) {
                    self.flag(n, ViolationKind::PoseMismatch, alloc::format!("cell {cell:?}"));
                }
                self.place_cell(n, cell);
            }
            (ComponentKind::Panel, PlacementTarget::Face { cell, dir }) => {
                let face = CellFace::new(cell, dir);
                let (p, r) = panel_pose(&program.frame, face, self.spec.panel_thickness);
                if !pose_close(&step.place, &Pose::new(p, r)) {
                    self.flag(n, ViolationKind::PoseMismatch, alloc::format!("face {cell:?} {dir}"));
                }
                self.place_panel(n, face);
            }
            (ctype, target) => {
                self.flag(n, ViolationKind::InvalidTarget, alloc::format!("{ctype:?} cannot fill {target:?}"));
            }
        }
    }

    fn place_cell(&mut self, n: usize, cell: CellIndex) {
        let k = key(cell);
        if self.world.cell_placed(k) || self.world.panel_slots.contains(&k) {
            self.flag(n, ViolationKind::Occupied, alloc::format!("cell {cell:?}"));
        }
        if self.world.anything_above(k) {
            self.flag(n, ViolationKind::Collision, alloc::format!("descent onto {cell:?} is blocked"));
        }
        let supported = cell.k == 0
            || crate::geometry::NEIGHBOURS_6
                .iter()
                .any(|d| self.world.cell_placed([k[0] + d[0] as i64, k[1] + d[1] as i64, k[2] + d[2] as i64]));
        if !supported {
            self.flag(n, ViolationKind::Unsupported, alloc::format!("cell {cell:?}"));
        }
        self.world.cells.insert(k);
        self.world.mark_column(k);
    }

    fn place_panel(&mut self, n: usize, face: CellFace) {
        let slot = face.neighbour();
        if self.world.faces.contains(&face) || self.world.cell_placed(slot) {
            self.flag(n, ViolationKind::Occupied, alloc::format!("face {:?} {}", face.cell, face.dir));
        }
        // For a downward panel the owning cell itself is above the slot.
        if self.world.anything_above(slot) {
            self.flag(n, ViolationKind::Collision, alloc::format!("descent onto {:?} {} is blocked", face.cell, face.dir));
        }
        if !self.world.cell_placed(key(face.cell)) {
            self.flag(n, ViolationKind::PanelBeforeSupport, alloc::format!("owner {:?} not placed", face.cell));
        }
        self.world.faces.insert(face);
        self.world.panel_slots.insert(slot);
        self.world.mark_column(slot);
    }
}

/// Replays `program` on an empty world and reports every rule it breaks.
///
/// Parts are tracked per grid slot: a cell, or the empty cell across a
/// panel's face. Each placement descends vertically, so any part already in
/// a higher slot of the same column blocks it. Arm reach and kinematics are
/// not modeled.
pub fn simulate(program: &RobotProgram, spec: &ComponentSpec) -> SimulationReport {
    let mut sim = Sim {
        program,
        spec,
        world: World::default(),
        gripper: Gripper::Unknown,
        violations: Vec::new(),
    };
    let edge = spec.structural_edge;
    if libm::fabs(program.frame.cell_size - edge) > 1e-9 * edge.max(1.0) {
        sim.flag(
            0,
            ViolationKind::FrameMismatch,
            alloc::format!("cell size {} but structural edge {}", program.frame.cell_size, edge),
        );
    }
    sim.run_motions(0, &program.init);
    for (n, step) in program.steps.iter().enumerate() {
        sim.check_step(n + 1, step);
    }
    let verdict = if sim.violations.is_empty() {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    SimulationReport {
        verdict,
        steps: program.steps.len(),
        violations: sim.violations,
    }
}
