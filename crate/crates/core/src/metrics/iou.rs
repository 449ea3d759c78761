//! Overlap measures between 3D boxes.

use crate::geometry::Box3D;
use crate::scalar::Scalar;

type P2<T> = [T; 2];

fn cross<T: Scalar>(o: P2<T>, a: P2<T>, b: P2<T>) -> T {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Shoelace area of a counterclockwise polygon.
pub(crate) fn polygon_area<T: Scalar>(poly: &[P2<T>]) -> T {
    if poly.len() < 3 {
        return T::zero();
    }
    let mut acc = T::zero();
    for i in 0..poly.len() {
        let (p, q) = (poly[i], poly[(i + 1) % poly.len()]);
        acc = acc + p[0] * q[1] - q[0] * p[1];
    }
    acc / T::lit(2.0)
}

/// Sutherland-Hodgman clipping of a convex polygon by a convex
/// counterclockwise clip polygon.
fn clip_convex<T: Scalar>(subject: &[P2<T>], clip: &[P2<T>]) -> Vec<P2<T>> {
    let mut out: Vec<P2<T>> = subject.to_vec();
    for i in 0..clip.len() {
        if out.is_empty() {
            break;
        }
        let (e0, e1) = (clip[i], clip[(i + 1) % clip.len()]);
        let input = std::mem::take(&mut out);
        for j in 0..input.len() {
            let cur = input[j];
            let prev = input[(j + input.len() - 1) % input.len()];
            let dc = cross(e0, e1, cur);
            let dp = cross(e0, e1, prev);
            let cur_in = dc >= T::zero();
            let prev_in = dp >= T::zero();
            if cur_in != prev_in {
                let t = dp / (dp - dc);
                out.push([prev[0] + (cur[0] - prev[0]) * t, prev[1] + (cur[1] - prev[1]) * t]);
            }
            if cur_in {
                out.push(cur);
            }
        }
    }
    out
}

/// Intersection area of the two bird's-eye footprints.
pub fn bev_intersection_area<T: Scalar>(a: &Box3D<T>, b: &Box3D<T>) -> T {
    let reach = |x: &Box3D<T>| (x.length * x.length + x.width * x.width).sqrt() / T::lit(2.0);
    let dx = a.center.x - b.center.x;
    let dz = a.center.z - b.center.z;
    let r = reach(a) + reach(b);
    if dx * dx + dz * dz > r * r {
        return T::zero();
    }
    polygon_area(&clip_convex(&a.footprint(), &b.footprint())).max(T::zero())
}

/// IoU of the two footprints on the horizontal (x, z) plane.
pub fn rotated_iou_bev<T: Scalar>(a: &Box3D<T>, b: &Box3D<T>) -> T {
    let inter = bev_intersection_area(a, b);
    let union = a.footprint_area() + b.footprint_area() - inter;
    if union <= T::zero() {
        return T::zero();
    }
    (inter / union).max(T::zero()).min(T::one())
}

/// Volumetric IoU: footprint intersection times vertical overlap.
pub fn iou_3d<T: Scalar>(a: &Box3D<T>, b: &Box3D<T>) -> T {
    let (a_top, a_bottom) = a.vertical_interval();
    let (b_top, b_bottom) = b.vertical_interval();
    let overlap = a_bottom.min(b_bottom) - a_top.max(b_top);
    if overlap <= T::zero() {
        return T::zero();
    }
    let inter = bev_intersection_area(a, b) * overlap;
    let union = a.volume() + b.volume() - inter;
    if union <= T::zero() {
        return T::zero();
    }
    (inter / union).max(T::zero()).min(T::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Mat3, Vec3};
    use proptest::prelude::*;

    fn b(x: f64, y: f64, z: f64, l: f64, w: f64, h: f64, yaw: f64) -> Box3D<f64> {
        Box3D::new(Vec3::new(x, y, z), l, w, h, yaw).unwrap()
    }

    #[test]
    fn identical_boxes() {
        let a = b(1.0, 1.0, 20.0, 4.2, 1.7, 1.5, 0.7);
        assert!((rotated_iou_bev(&a, &a) - 1.0).abs() < 1e-12);
        assert!((iou_3d(&a, &a) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn disjoint_boxes() {
        let a = b(0.0, 0.0, 20.0, 4.0, 2.0, 1.5, 0.3);
        let c = b(9.0, 0.0, 20.0, 4.0, 2.0, 1.5, -1.0);
        assert_eq!(rotated_iou_bev(&a, &c), 0.0);
        assert_eq!(iou_3d(&a, &c), 0.0);
    }

    #[test]
    fn half_offset_unit_squares() {
        let a = b(0.0, 0.0, 10.0, 1.0, 1.0, 1.0, 0.0);
        let c = b(0.5, 0.0, 10.0, 1.0, 1.0, 1.0, 0.0);
        assert!((rotated_iou_bev(&a, &c) - 1.0 / 3.0).abs() < 1e-15);
        assert!((iou_3d(&a, &c) - 1.0 / 3.0).abs() < 1e-15);
        let d = b(0.0, 0.0, 10.5, 1.0, 1.0, 1.0, 0.0);
        assert!((rotated_iou_bev(&a, &d) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn vertical_separation() {
        let a = b(0.0, 0.0, 10.0, 2.0, 2.0, 1.0, 0.0);
        let c = b(0.0, 1.5, 10.0, 2.0, 2.0, 2.0, 0.0);
        assert_eq!(iou_3d(&a, &c), 0.0);
        assert!((rotated_iou_bev(&a, &c) - 1.0).abs() < 1e-12);
        let d = b(0.0, 0.5, 10.0, 2.0, 2.0, 2.0, 0.0);
        // overlap 1 of heights 1 and 2: 4 / (4 + 8 - 4)
        assert!((iou_3d(&a, &d) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn diamond_in_square() {
        // square rotated by 45 degrees inscribed... a 2x2 square vs its 45-degree copy
        let a = b(0.0, 0.0, 10.0, 2.0, 2.0, 1.0, 0.0);
        let c = b(0.0, 0.0, 10.0, 2.0, 2.0, 1.0, std::f64::consts::FRAC_PI_4);
        // intersection is a regular octagon with inradius 1: area 8 (sqrt2 - 1)
        let inter = 8.0 * (2f64.sqrt() - 1.0);
        assert!((rotated_iou_bev(&a, &c) - inter / (8.0 - inter)).abs() < 1e-12);
    }

    fn arb_pair() -> impl Strategy<Value = (Box3D<f64>, Box3D<f64>)> {
        (
            (-2.0..2.0f64, -0.5..0.5f64, -2.0..2.0f64, 0.3..6.0f64, 0.3..3.0f64, 0.3..3.0f64, -3.1..3.1f64),
            (0.3..6.0f64, 0.3..3.0f64, 0.3..3.0f64, -3.1..3.1f64),
        )
            .prop_map(|((dx, dy, dz, l1, w1, h1, y1), (l2, w2, h2, y2))| {
                (b(0.0, 0.0, 30.0, l1, w1, h1, y1), b(dx, dy, 30.0 + dz, l2, w2, h2, y2))
            })
    }

    proptest! {
        #[test]
        fn iou_symmetric_and_bounded((a, c) in arb_pair()) {
            let (ab, ba) = (rotated_iou_bev(&a, &c), rotated_iou_bev(&c, &a));
            prop_assert!((0.0..=1.0).contains(&ab));
            prop_assert!((ab - ba).abs() < 1e-9);
            let (ab3, ba3) = (iou_3d(&a, &c), iou_3d(&c, &a));
            prop_assert!((0.0..=1.0).contains(&ab3));
            prop_assert!((ab3 - ba3).abs() < 1e-9);
            prop_assert!(ab3 <= ab + 1e-12 || a.height != c.height);
        }

        #[test]
        fn iou_rigid_invariant((a, c) in arb_pair(), yaw in -3.1..3.1f64, tx in -20.0..20.0f64, tz in -20.0..20.0f64) {
            let rot = Mat3::rotation_y(yaw);
            let t = Vec3::new(tx, 0.3, tz);
            let mv = |x: &Box3D<f64>| Box3D::new(rot.mul_vec(x.center) + t, x.length, x.width, x.height, x.yaw + yaw).unwrap();
            let (a2, c2) = (mv(&a), mv(&c));
            prop_assert!((rotated_iou_bev(&a, &c) - rotated_iou_bev(&a2, &c2)).abs() < 1e-9);
            prop_assert!((iou_3d(&a, &c) - iou_3d(&a2, &c2)).abs() < 1e-9);
        }
    }
}
