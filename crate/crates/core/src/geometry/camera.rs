use serde::{Deserialize, Serialize};

use super::boxes::{box_corners, Box2D, Box3D};
use super::linalg::Vec3;
use super::GeometryError;
use crate::scalar::Scalar;

/// Minimum depth in meters for a point to count as in front of the camera.
pub const MIN_DEPTH: f64 = 1e-6;

/// Pinhole intrinsics (no distortion) plus image size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CameraModel<T> {
    pub fx: T,
    pub fy: T,
    pub cx: T,
    pub cy: T,
    pub width: u32,
    pub height: u32,
}

impl<T: Scalar> CameraModel<T> {
    pub fn new(fx: T, fy: T, cx: T, cy: T, width: u32, height: u32) -> Result<Self, GeometryError> {
        if !(fx.is_finite() && fy.is_finite() && fx > T::zero() && fy > T::zero()) {
            return Err(GeometryError::invalid("camera", "focal lengths must be positive"));
        }
        if width == 0 || height == 0 {
            return Err(GeometryError::invalid("camera", "image size must be positive"));
        }
        let (w, h) = (T::lit(width as f64), T::lit(height as f64));
        if !(cx > T::zero() && cx < w && cy > T::zero() && cy < h) {
            return Err(GeometryError::invalid("camera", "principal point must lie inside the image"));
        }
        Ok(Self { fx, fy, cx, cy, width, height })
    }

    /// Viewing ray through pixel `(u, v)`, scaled so that its z component is 1.
    pub fn ray(&self, u: T, v: T) -> Vec3<T> {
        Vec3::new((u - self.cx) / self.fx, (v - self.cy) / self.fy, T::one())
    }

    /// Camera-frame point at depth `z` along the ray through `(u, v)`.
    pub fn back_project(&self, u: T, v: T, z: T) -> Vec3<T> {
        self.ray(u, v).scale(z)
    }

    pub fn cast<U: Scalar>(&self) -> CameraModel<U> {
        CameraModel {
            fx: U::lit(self.fx.as_f64()),
            fy: U::lit(self.fy.as_f64()),
            cx: U::lit(self.cx.as_f64()),
            cy: U::lit(self.cy.as_f64()),
            width: self.width,
            height: self.height,
        }
    }
}

/// Pinhole projection `u = fx X/Z + cx`, `v = fy Y/Z + cy`.
#[allow(clippy::neg_cmp_op_on_partial_ord)] // also rejects NaN
pub fn project_point<T: Scalar>(cam: &CameraModel<T>, p: Vec3<T>) -> Result<(T, T), GeometryError> {
    if !(p.z > T::lit(MIN_DEPTH)) {
        return Err(GeometryError::PointBehindCamera { z: p.z.as_f64() });
    }
    Ok((cam.fx * p.x / p.z + cam.cx, cam.fy * p.y / p.z + cam.cy))
}

/// Amodal 2D box: the tight bounds of all eight projected corners, not
/// clipped to the image.
pub fn project_box_to_2d<T: Scalar>(cam: &CameraModel<T>, b: &Box3D<T>) -> Result<Box2D<T>, GeometryError> {
    let mut out = Box2D {
        xmin: T::infinity(),
        ymin: T::infinity(),
        xmax: T::neg_infinity(),
        ymax: T::neg_infinity(),
    };
    for (i, c) in box_corners(b).into_iter().enumerate() {
        let (u, v) = project_point(cam, c).map_err(|_| GeometryError::BoxBehindCamera { corner: i })?;
        out.xmin = out.xmin.min(u);
        out.ymin = out.ymin.min(v);
        out.xmax = out.xmax.max(u);
        out.ymax = out.ymax.max(v);
    }
    Ok(out)
}
