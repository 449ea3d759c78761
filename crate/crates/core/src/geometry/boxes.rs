use serde::{Deserialize, Serialize};

use super::linalg::{Mat3, Vec3};
use super::GeometryError;
use crate::scalar::{normalize_angle, Scalar};

/// A 7-DOF cuboid in the camera frame.
///
/// `center` is the geometric center of the cuboid (not the bottom face).
/// `length` runs along the heading, `width` across it and `height` along the
/// camera-frame vertical axis (y, pointing down). `yaw` rotates the heading
/// about that axis and is kept in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box3D<T> {
    pub center: Vec3<T>,
    pub length: T,
    pub width: T,
    pub height: T,
    pub yaw: T,
}

impl<T: Scalar> Box3D<T> {
    pub fn new(center: Vec3<T>, length: T, width: T, height: T, yaw: T) -> Result<Self, GeometryError> {
        if !center.is_finite() || !yaw.is_finite() {
            return Err(GeometryError::invalid("box", "non-finite center or yaw"));
        }
        for (name, v) in [("length", length), ("width", width), ("height", height)] {
            if !(v.is_finite() && v > T::zero()) {
                return Err(GeometryError::invalid("box", format!("{name} must be positive, got {v}")));
            }
        }
        Ok(Self { center, length, width, height, yaw: normalize_angle(yaw) })
    }

    /// Center of the bottom face (the face resting on the ground).
    pub fn bottom_center(&self) -> Vec3<T> {
        Vec3::new(self.center.x, self.center.y + self.height / T::lit(2.0), self.center.z)
    }

    pub fn footprint_area(&self) -> T {
        self.length * self.width
    }

    pub fn volume(&self) -> T {
        self.length * self.width * self.height
    }

    /// Vertical extent `[top, bottom]` along camera y.
    pub fn vertical_interval(&self) -> (T, T) {
        let half = self.height / T::lit(2.0);
        (self.center.y - half, self.center.y + half)
    }

    /// Bird's-eye footprint as `(x, z)` vertices, counterclockwise in the
    /// `(x, z)` plane; same order as the bottom corners.
    pub fn footprint(&self) -> [[T; 2]; 4] {
        ground_corners(self).map(|c| [c.x, c.z])
    }

    pub fn cast<U: Scalar>(&self) -> Box3D<U> {
        Box3D {
            center: self.center.cast(),
            length: U::lit(self.length.as_f64()),
            width: U::lit(self.width.as_f64()),
            height: U::lit(self.height.as_f64()),
            yaw: U::lit(self.yaw.as_f64()),
        }
    }
}

/// Axis-aligned image rectangle in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Box2D<T> {
    pub xmin: T,
    pub ymin: T,
    pub xmax: T,
    pub ymax: T,
}

impl<T: Scalar> Box2D<T> {
    pub fn new(xmin: T, ymin: T, xmax: T, ymax: T) -> Result<Self, GeometryError> {
        let finite = [xmin, ymin, xmax, ymax].iter().all(|v| v.is_finite());
        if !finite || xmin > xmax || ymin > ymax {
            return Err(GeometryError::invalid("2d box", "expected finite xmin <= xmax and ymin <= ymax"));
        }
        Ok(Self { xmin, ymin, xmax, ymax })
    }

    pub fn area(&self) -> T {
        (self.xmax - self.xmin) * (self.ymax - self.ymin)
    }

    pub fn intersection_area(&self, o: &Self) -> T {
        let w = (self.xmax.min(o.xmax) - self.xmin.max(o.xmin)).max(T::zero());
        let h = (self.ymax.min(o.ymax) - self.ymin.max(o.ymin)).max(T::zero());
        w * h
    }

    pub fn iou(&self, o: &Self) -> T {
        let inter = self.intersection_area(o);
        let union = self.area() + o.area() - inter;
        if union <= T::zero() {
            T::zero()
        } else {
            (inter / union).min(T::one())
        }
    }
}

/// Local-frame `(x, z)` offsets of the bottom face in units of the half
/// length / half width, counterclockwise seen from above.
const FACE_SIGNS: [(f64, f64); 4] = [(1.0, -1.0), (1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0)];

/// The eight corners of a box.
///
/// Indices 0-3 are the bottom face, counterclockwise seen from above
/// (starting at the front-right corner in the box frame); index `i + 4` sits
/// directly above index `i`, offset by `height` along the vertical axis.
pub fn box_corners<T: Scalar>(b: &Box3D<T>) -> [Vec3<T>; 8] {
    let rot = Mat3::rotation_y(b.yaw);
    let half = T::lit(0.5);
    let (hl, hw, hh) = (b.length * half, b.width * half, b.height * half);
    let mut out = [Vec3::zero(); 8];
    for (i, &(sx, sz)) in FACE_SIGNS.iter().enumerate() {
        let local = Vec3::new(hl * T::lit(sx), T::zero(), hw * T::lit(sz));
        let off = rot.mul_vec(local);
        out[i] = Vec3::new(b.center.x + off.x, b.center.y + hh, b.center.z + off.z);
        out[i + 4] = Vec3::new(b.center.x + off.x, b.center.y - hh, b.center.z + off.z);
    }
    out
}

/// The four bottom-face corners, i.e. `box_corners(b)[0..4]`.
pub fn ground_corners<T: Scalar>(b: &Box3D<T>) -> [Vec3<T>; 4] {
    let c = box_corners(b);
    [c[0], c[1], c[2], c[3]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_cube(yaw: f64) -> Box3D<f64> {
        Box3D::new(Vec3::zero(), 1.0, 1.0, 1.0, yaw).unwrap()
    }

    pub(crate) fn arb_box() -> impl Strategy<Value = Box3D<f64>> {
        (
            (-30.0..30.0f64, -5.0..5.0f64, 1.0..120.0f64),
            (0.1..12.0f64, 0.1..4.0f64, 0.1..4.0f64),
            -3.1..3.1f64,
        )
            .prop_map(|((x, y, z), (l, w, h), yaw)| Box3D::new(Vec3::new(x, y, z), l, w, h, yaw).unwrap())
    }

    #[test]
    fn unit_cube_corners() {
        let c = box_corners(&unit_cube(0.0));
        for p in c {
            assert_eq!(p.x.abs(), 0.5);
            assert_eq!(p.y.abs(), 0.5);
            assert_eq!(p.z.abs(), 0.5);
        }
        assert_eq!(c[0], Vec3::new(0.5, 0.5, -0.5));
        assert_eq!(c[1], Vec3::new(0.5, 0.5, 0.5));
        assert_eq!(c[2], Vec3::new(-0.5, 0.5, 0.5));
        assert_eq!(c[3], Vec3::new(-0.5, 0.5, -0.5));
        let mut sorted: Vec<_> = c.iter().map(|p| (p.x, p.y, p.z)).collect();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sorted.dedup();
        assert_eq!(sorted.len(), 8);
    }

    #[test]
    fn ground_corners_are_lowest() {
        // y points down, so the bottom face has the largest y (lowest height).
        let g = ground_corners(&unit_cube(0.0));
        assert!(g.iter().all(|p| p.y == 0.5));
    }

    #[test]
    fn half_turn_shifts_bottom_indices_by_two() {
        let a = box_corners(&unit_cube(0.0));
        let b = box_corners(&unit_cube(std::f64::consts::PI));
        for i in 0..4 {
            assert!(b[i].distance(a[(i + 2) % 4]) < 1e-12);
            assert!(b[i + 4].distance(a[(i + 2) % 4 + 4]) < 1e-12);
        }
    }

    #[test]
    fn footprint_is_counterclockwise() {
        let f = Box3D::new(Vec3::new(1.0, 0.0, 9.0), 4.0, 2.0, 1.5, 0.4).unwrap().footprint();
        let mut twice_area = 0.0f64;
        for i in 0..4 {
            let (p, q) = (f[i], f[(i + 1) % 4]);
            twice_area += p[0] * q[1] - q[0] * p[1];
        }
        assert!((twice_area / 2.0 - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(Box3D::new(Vec3::zero(), 0.0, 1.0, 1.0, 0.0).is_err());
        assert!(Box3D::new(Vec3::zero(), 1.0, -1.0, 1.0, 0.0).is_err());
        assert!(Box3D::new(Vec3::new(f64::NAN, 0.0, 0.0), 1.0, 1.0, 1.0, 0.0).is_err());
        assert!(Box2D::new(3.0, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn box2d_iou() {
        let a = Box2D::new(0.0f64, 0.0, 2.0, 2.0).unwrap();
        let b = Box2D::new(1.0, 0.0, 3.0, 2.0).unwrap();
        assert!((a.iou(&b) - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(a.iou(&a), 1.0);
    }

    proptest! {
        #[test]
        fn corners_mean_is_center(b in arb_box()) {
            let c = box_corners(&b);
            let mean = c.iter().fold(Vec3::zero(), |acc, p| acc + *p).scale(1.0 / 8.0);
            prop_assert!(mean.distance(b.center) < 1e-9);
            for i in 0..4 {
                let d = c[i] - c[i + 4];
                prop_assert!(d.x == 0.0 && d.z == 0.0);
                prop_assert!((d.y - b.height).abs() < 1e-9);
            }
        }

        #[test]
        fn bottom_mean_is_bottom_center(b in arb_box()) {
            let g = ground_corners(&b);
            let mean = g.iter().fold(Vec3::zero(), |acc, p| acc + *p).scale(0.25);
            prop_assert!(mean.distance(b.bottom_center()) < 1e-9);
            let all = box_corners(&b);
            prop_assert!(g.iter().all(|p| all.contains(p)));
        }

        #[test]
        fn ground_corner_distances(b in arb_box()) {
            let g = ground_corners(&b);
            let mut d: Vec<f64> = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    d.push(g[i].distance(g[j]));
                }
            }
            d.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let diag = (b.length * b.length + b.width * b.width).sqrt();
            let mut want = [b.length, b.length, b.width, b.width, diag, diag];
            want.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for (x, y) in d.iter().zip(want.iter()) {
                prop_assert!((x - y).abs() < 1e-9);
            }
        }
    }
}
