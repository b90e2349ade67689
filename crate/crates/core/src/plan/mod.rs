//! From a labeled decomposition to an ordered pick-and-place program.
//!
//! [`build_assembly`] turns occupied cells and selected patches into
//! placements, [`sequence`] orders them bottom-to-top, [`emit_program`]
//! expands each placement into the eight-motion pick/place template and
//! [`simulate`] replays a program against an empty world.
//!
//! Rotations are intrinsic XYZ Euler angles in radians: the matrix is
//! `Rx(rx) * Ry(ry) * Rz(rz)`. A panel's local +Z axis is its outward normal.

mod assembly;
mod program;
mod sequence;
mod simulate;

use alloc::string::String;
use alloc::vec::Vec;

pub use assembly::{
    build_assembly, euler_xyz_matrix, panel_pose, panel_rotation, structural_pose, AssemblyModel,
    ComponentKind, ComponentPlacement, GridFrame, PlacementTarget,
};
pub use program::{
    emit_program, step_motions, GripperParams, Motion, PickPlaceStep, Pose, RobotProgram, SourceStation, StationId,
};
pub use sequence::{sequence, SequenceWarning};
pub use simulate::{simulate, SimulationReport, Verdict, Violation, ViolationKind};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("panel labels not in the decomposition: {0:?}")]
    UnknownLabels(Vec<u32>),
    #[error("grid does not match the decomposition")]
    GridMismatch,
    #[error("assembly has no placements")]
    EmptyAssembly,
    #[error("invalid configuration: {0}")]
    Config(String),
}
