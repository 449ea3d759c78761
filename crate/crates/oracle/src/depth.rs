//! Ray/plane depth by bisection on the signed distance.

use roadside_eval::{CameraModel, GroundPlane};

/// Depth `z` of the first ground hit for pixel `(u, v)` in `(0, z_max]`, or
/// `None`. The point along the ray at depth `z` is `z * ray`; the camera sits
/// on the non-ground side, so a hit is a sign change of the signed distance.
pub fn bisect_depth(cam: &CameraModel, plane: &GroundPlane, u: f64, v: f64, z_max: f64) -> Option<f64> {
    let ray = [(u - cam.cx) / cam.fx, (v - cam.cy) / cam.fy, 1.0];
    let [a, b, c, d] = plane.coefficients();
    let f = |z: f64| a * ray[0] * z + b * ray[1] * z + c * ray[2] * z + d;
    let (mut lo, mut hi) = (0.0, z_max);
    if f(lo).signum() == f(hi).signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid).signum() == f(lo).signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
