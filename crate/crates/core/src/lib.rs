//! Turns a triangle mesh into a multi-component assembly of structural cubes
//! and functional panels, and plans its pick-and-place execution.
//!
//! The pipeline is:
//!
//! 1. [`geometry`]: parse OBJ/STL bytes and voxelize onto the structural grid.
//! 2. [`decompose`]: merge exposed cell faces into coplanar patches, omit the
//!    ones a top-down arm cannot reach, and label the rest `1..=n`.
//! 3. [`render`]: project the labeled voxel model into axonometric scenes
//!    (SVG text or an RGB raster).
//! 4. [`select`]: choose which labels receive panels, either through a
//!    vision-language model behind [`select::ChatVisionClient`] or with the
//!    rule-based and random baselines.
//! 5. [`plan`]: build the placement lists, order them bottom-to-top, emit the
//!    robot program and check it in a placement simulator.
//!
//! [`evalstats`] holds the selection-rate and McNemar statistics used to
//! compare strategies in user studies.
//!
//! The crate is `no_std` and needs only `alloc`.

#![cfg_attr(not(feature = "std"), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod decompose;
pub mod evalstats;
pub mod geometry;
pub mod math;
pub mod plan;
pub mod render;
pub mod select;

pub use decompose::{decompose, surface_mesh, CellFace, Decomposition, Direction, FacePatch};
pub use geometry::{load_mesh, voxelize, CellIndex, ComponentSpec, MeshFormat, TriangleMesh, VoxelGrid};
pub use math::Vec3;
