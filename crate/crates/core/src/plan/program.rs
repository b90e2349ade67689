use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::assembly::{AssemblyModel, ComponentKind, GridFrame, PlacementTarget};
use super::PlanError;
use crate::math::Vec3;

/// Position plus intrinsic XYZ Euler angles, serialized as a 6-tuple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 6]", into = "[f64; 6]")]
pub struct Pose {
    pub position: Vec3,
    pub rotation: [f64; 3],
}

impl Pose {
    pub fn new(position: Vec3, rotation: [f64; 3]) -> Self {
        Self { position, rotation }
    }

    pub fn raised(&self, dz: f64) -> Pose {
        Pose {
            position: self.position + Vec3::new(0.0, 0.0, dz),
            rotation: self.rotation,
        }
    }
}

impl From<[f64; 6]> for Pose {
    fn from(a: [f64; 6]) -> Self {
        Pose::new(Vec3::new(a[0], a[1], a[2]), [a[3], a[4], a[5]])
    }
}

impl From<Pose> for [f64; 6] {
    fn from(p: Pose) -> Self {
        [
            p.position.x,
            p.position.y,
            p.position.z,
            p.rotation[0],
            p.rotation[1],
            p.rotation[2],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum StationId {
    S0Conveyor,
    S1Stack,
}

impl StationId {
    pub fn serves(self) -> ComponentKind {
        match self {
            StationId::S0Conveyor => ComponentKind::Structural,
            StationId::S1Stack => ComponentKind::Panel,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceStation {
    pub id: StationId,
    pub pickup: Vec3,
}

impl SourceStation {
    /// Conveyor and panel stack beside a structure built near the origin.
    pub fn defaults() -> (SourceStation, SourceStation) {
        (
            SourceStation {
                id: StationId::S0Conveyor,
                pickup: Vec3::new(-0.8, 0.0, 0.0),
            },
            SourceStation {
                id: StationId::S1Stack,
                pickup: Vec3::new(-0.8, 0.6, 0.0),
            },
        )
    }
}

/// Clearance height and two-finger gripper settings. Widths in meters,
/// force in newtons.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperParams {
    pub h_safe: f64,
    pub w_open: f64,
    pub w_release: f64,
    pub f_grab: f64,
}

impl GripperParams {
    pub fn for_edge(structural_edge: f64) -> Self {
        Self {
            h_safe: 2.0 * structural_edge,
            w_open: 0.085,
            w_release: 0.085,
            f_grab: 40.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Motion {
    MoveTo { pose: Pose },
    CloseGripper { force: f64 },
    OpenGripper { width: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickPlaceStep {
    /// Position of the placement in the ordered model.
    pub component: usize,
    pub ctype: ComponentKind,
    pub source: StationId,
    pub target: PlacementTarget,
    pub pickup: Pose,
    pub place: Pose,
    pub motions: Vec<Motion>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobotProgram {
    pub frame: GridFrame,
    pub params: GripperParams,
    pub stations: [SourceStation; 2],
    /// Motions run once before the first step.
    pub init: Vec<Motion>,
    pub steps: Vec<PickPlaceStep>,
}

/// The fixed eight-motion pick/place expansion.
pub fn step_motions(pickup: Pose, place: Pose, params: &GripperParams) -> Vec<Motion> {
    let h = params.h_safe;
    alloc::vec![
        Motion::MoveTo { pose: pickup.raised(h) },
        Motion::MoveTo { pose: pickup },
        Motion::CloseGripper { force: params.f_grab },
        Motion::MoveTo { pose: pickup.raised(h) },
        Motion::MoveTo { pose: place.raised(h) },
        Motion::MoveTo { pose: place },
        Motion::OpenGripper { width: params.w_release },
        Motion::MoveTo { pose: place.raised(h) },
    ]
}

fn positive(name: &str, v: f64) -> Result<(), PlanError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(PlanError::Config(alloc::format!("{name} must be finite and > 0")))
    }
}

/// One step per placement, in model order.
pub fn emit_program(
    model: &AssemblyModel,
    stations: (SourceStation, SourceStation),
    params: GripperParams,
) -> Result<RobotProgram, PlanError> {
    positive("h_safe", params.h_safe)?;
    positive("w_open", params.w_open)?;
    positive("w_release", params.w_release)?;
    positive("f_grab", params.f_grab)?;
    let frame = model.frame();
    if params.h_safe <= frame.cell_size {
        return Err(PlanError::Config(alloc::format!(
            "h_safe {} must exceed the component height {}",
            params.h_safe, frame.cell_size
        )));
    }
    let (s0, s1) = stations;
    if s0.id != StationId::S0Conveyor || s1.id != StationId::S1Stack {
        return Err(PlanError::Config("stations must be (S0_CONVEYOR, S1_STACK)".into()));
    }
    let steps = model
        .placements
        .iter()
        .enumerate()
        .map(|(n, p)| {
            let station = match p.ctype {
                ComponentKind::Structural => s0,
                ComponentKind::Panel => s1,
            };
            let pickup = Pose::new(station.pickup, [0.0; 3]);
            let place = Pose::new(p.position, p.rotation);
            PickPlaceStep {
                component: n,
                ctype: p.ctype,
                source: station.id,
                target: p.target,
                pickup,
                place,
                motions: step_motions(pickup, place, &params),
            }
        })
        .collect();
    Ok(RobotProgram {
        frame,
        params,
        stations: [s0, s1],
        init: alloc::vec![Motion::OpenGripper { width: params.w_open }],
        steps,
    })
}
