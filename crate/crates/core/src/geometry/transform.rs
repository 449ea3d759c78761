use serde::{Deserialize, Serialize};

use super::linalg::{Mat3, Vec3};
use super::GeometryError;
use crate::scalar::Scalar;

/// Proper rigid motion `p -> rotation * p + translation`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidTransform<T> {
    rotation: Mat3<T>,
    translation: Vec3<T>,
}

impl<T: Scalar> RigidTransform<T> {
    /// Validates orthonormality and `det = +1` within the scalar tolerance.
    pub fn new(rotation: Mat3<T>, translation: Vec3<T>) -> Result<Self, GeometryError> {
        let tol = T::tolerance();
        let gram = rotation.transpose().mul_mat(&rotation);
        if !translation.is_finite() || gram.max_abs_diff(&Mat3::identity()) > tol {
            return Err(GeometryError::invalid("rigid transform", "rotation is not orthonormal"));
        }
        if (rotation.determinant() - T::one()).abs() > tol {
            return Err(GeometryError::invalid("rigid transform", "rotation is a reflection"));
        }
        Ok(Self { rotation, translation })
    }

    pub fn identity() -> Self {
        Self { rotation: Mat3::identity(), translation: Vec3::zero() }
    }

    /// Pure rotation about the camera-frame vertical axis.
    pub fn rotation_y(angle: T) -> Self {
        Self { rotation: Mat3::rotation_y(angle), translation: Vec3::zero() }
    }

    /// Builds a transform from a row-major `[R | t]` 3x4 block.
    pub fn from_row_major_3x4(v: &[T; 12]) -> Result<Self, GeometryError> {
        let rotation = Mat3::from_rows([[v[0], v[1], v[2]], [v[4], v[5], v[6]], [v[8], v[9], v[10]]]);
        Self::new(rotation, Vec3::new(v[3], v[7], v[11]))
    }

    pub fn to_row_major_3x4(&self) -> [T; 12] {
        let r = &self.rotation.m;
        let t = self.translation;
        [r[0][0], r[0][1], r[0][2], t.x, r[1][0], r[1][1], r[1][2], t.y, r[2][0], r[2][1], r[2][2], t.z]
    }

    pub fn rotation(&self) -> &Mat3<T> {
        &self.rotation
    }

    pub fn translation(&self) -> Vec3<T> {
        self.translation
    }

    pub fn apply(&self, p: Vec3<T>) -> Vec3<T> {
        self.rotation.mul_vec(p) + self.translation
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        Self { rotation: rt, translation: -rt.mul_vec(self.translation) }
    }
}

/// Composition `a ∘ b`: the result applies `b` first, then `a`.
///
/// Chaining LiDAR-to-world with world-to-camera gives LiDAR-to-camera as
/// `compose_transforms(&world_to_cam, &lidar_to_world)`.
pub fn compose_transforms<T: Scalar>(a: &RigidTransform<T>, b: &RigidTransform<T>) -> RigidTransform<T> {
    RigidTransform {
        rotation: a.rotation.mul_mat(&b.rotation),
        translation: a.rotation.mul_vec(b.translation) + a.translation,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_transform() -> impl Strategy<Value = RigidTransform<f64>> {
        (
            (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64),
            -3.2..3.2f64,
            (-50.0..50.0f64, -50.0..50.0f64, -50.0..50.0f64),
        )
            .prop_map(|((ax, ay, az), angle, (tx, ty, tz))| {
                let rot = Mat3::from_axis_angle(Vec3::new(ax, ay, az + 1e-3), angle);
                RigidTransform::new(rot, Vec3::new(tx, ty, tz)).unwrap()
            })
    }

    fn close(a: &RigidTransform<f64>, b: &RigidTransform<f64>, tol: f64) -> bool {
        a.rotation.max_abs_diff(&b.rotation) < tol && a.translation.distance(b.translation) < tol
    }

    #[test]
    fn identity_compose_identity() {
        let i = RigidTransform::<f64>::identity();
        assert_eq!(compose_transforms(&i, &i), i);
    }

    #[test]
    fn quarter_turn_twice_is_half_turn() {
        let q = RigidTransform::rotation_y(std::f64::consts::FRAC_PI_2);
        let h = compose_transforms(&q, &q);
        let expected = RigidTransform::rotation_y(std::f64::consts::PI);
        // pointwise oracle: applying q twice must equal the half turn
        let pts = [Vec3::new(0.3, -1.2, 2.5), Vec3::new(-4.0, 0.1, 0.7), Vec3::new(1.0, 1.0, -9.0)];
        for p in pts {
            let twice = q.apply(q.apply(p));
            assert!(h.apply(p).distance(twice) < 1e-12);
            assert!(h.apply(p).distance(expected.apply(p)) < 1e-12);
        }
        assert!(h.apply(Vec3::new(1.0, 0.0, 0.0)).distance(Vec3::new(-1.0, 0.0, 0.0)) < 1e-12);
        assert!(h.apply(Vec3::new(0.0, 0.0, 1.0)).distance(Vec3::new(0.0, 0.0, -1.0)) < 1e-12);
        assert!(h.apply(Vec3::new(0.0, 1.0, 0.0)).distance(Vec3::new(0.0, 1.0, 0.0)) < 1e-12);
    }

    #[test]
    fn rejects_reflection_and_shear() {
        let refl = Mat3::from_rows([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, -1.0]]);
        assert!(RigidTransform::new(refl, Vec3::zero()).is_err());
        let shear = Mat3::from_rows([[1.0, 0.1, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!(RigidTransform::new(shear, Vec3::zero()).is_err());
    }

    proptest! {
        #[test]
        fn inverse_composes_to_identity(t in arb_transform()) {
            let i = compose_transforms(&t, &t.inverse());
            prop_assert!(close(&i, &RigidTransform::identity(), 1e-9));
        }

        #[test]
        fn composition_is_associative(a in arb_transform(), b in arb_transform(), c in arb_transform()) {
            let left = compose_transforms(&compose_transforms(&a, &b), &c);
            let right = compose_transforms(&a, &compose_transforms(&b, &c));
            prop_assert!(close(&left, &right, 1e-9));
        }

        #[test]
        fn composition_applies_b_then_a(a in arb_transform(), b in arb_transform(),
                                        p in (-10.0..10.0f64, -10.0..10.0f64, -10.0..10.0f64)) {
            let p = Vec3::new(p.0, p.1, p.2);
            let ab = compose_transforms(&a, &b);
            prop_assert!(ab.apply(p).distance(a.apply(b.apply(p))) < 1e-9);
            prop_assert!(RigidTransform::new(*ab.rotation(), ab.translation()).is_ok());
        }
    }
}
