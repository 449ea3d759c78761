//! Evaluation toolkit for roadside monocular 3D object detection.
//!
//! * [`geometry`]: boxes, projection, ground planes and ground depth maps.
//! * [`metrics`]: matching, AP at 40 recall positions, the ground-aware
//!   similarity metrics and the combined Rope score.
//! * [`io`]: label, calibration, config and report file formats.
//! * [`synth`]: deterministic synthetic roadside scenes and detector noise.
//!
//! Geometry and metric kernels are generic over [`Scalar`] (`f32` or `f64`);
//! the aliases at the crate root fix the scalar to `f64`, which is what the
//! file formats and the generator use.

pub mod category;
pub mod geometry;
pub mod io;
pub mod scalar;
pub mod synth;

pub use category::Category;
pub use scalar::Scalar;

pub type Vec3 = geometry::Vec3<f64>;
pub type Mat3 = geometry::Mat3<f64>;
pub type Box3D = geometry::Box3D<f64>;
pub type Box2D = geometry::Box2D<f64>;
pub type CameraModel = geometry::CameraModel<f64>;
pub type RigidTransform = geometry::RigidTransform<f64>;
pub type GroundPlane = geometry::GroundPlane<f64>;
pub type GriddedGround = geometry::GriddedGround<f64>;
pub type DepthMap = geometry::DepthMap<f64>;

pub mod metrics;

pub type Detection = metrics::Detection<f64>;
pub type Annotation = metrics::Annotation<f64>;
pub use metrics::{EvalConfig, MetricReport};
