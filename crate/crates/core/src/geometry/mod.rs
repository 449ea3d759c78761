//! Geometric primitives: boxes, pinhole projection, rigid transforms, ground
//! planes and ground depth maps.
//!
//! All coordinates are in the camera frame (x right, y down, z forward)
//! unless stated otherwise. Everything here is a pure function of its inputs.

mod boxes;
mod camera;
mod depth;
pub mod linalg;
mod plane;
mod transform;

use thiserror::Error;

pub use boxes::{box_corners, ground_corners, Box2D, Box3D};
pub use camera::{project_box_to_2d, project_point, CameraModel, MIN_DEPTH};
pub use depth::{ground_depth_map, gridded_depth_map, DepthMap, DEFAULT_Z_MAX};
pub use linalg::{Mat3, Vec3};
pub use plane::{
    fit_gridded_ground, fit_plane, ground_center, GriddedGround, GroundPlane, DEFAULT_CELL_SIZE,
    DEFAULT_MIN_POINTS_PER_CELL,
};
pub use transform::{compose_transforms, RigidTransform};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("point is behind the camera (z = {z})")]
    PointBehindCamera { z: f64 },
    #[error("box corner {corner} is behind the camera")]
    BoxBehindCamera { corner: usize },
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
}

impl GeometryError {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        GeometryError::Invalid { what, reason: reason.into() }
    }
}
