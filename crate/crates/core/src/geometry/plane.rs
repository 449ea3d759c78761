use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::boxes::Box3D;
use super::linalg::{symmetric_eigen, Mat3, Vec3};
use super::GeometryError;
use crate::scalar::Scalar;

/// Ground plane `alpha*x + beta*y + gamma*z + d = 0` in the camera frame.
///
/// The normal is unit length and oriented away from the camera origin, so
/// `d < 0` and points on the camera side have negative signed distance. For a
/// level camera mounted `h` meters above flat ground this is `(0, 1, 0, -h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundPlane<T> {
    alpha: T,
    beta: T,
    gamma: T,
    d: T,
}

impl<T: Scalar> GroundPlane<T> {
    /// Normalizes the coefficients and fixes the orientation. Normals that
    /// are already unit length to within rounding are kept bit for bit, so
    /// re-normalizing a stored plane is the identity.
    ///
    /// Fails when the normal vanishes or the plane passes through the camera
    /// origin (orientation undefined).
    pub fn new(alpha: T, beta: T, gamma: T, d: T) -> Result<Self, GeometryError> {
        let n = Vec3::new(alpha, beta, gamma);
        let len = n.norm();
        if !(len.is_finite() && d.is_finite()) || len <= T::zero() {
            return Err(GeometryError::DegenerateInput("plane normal is zero or non-finite".into()));
        }
        let mut s = if (len - T::one()).abs() <= T::lit(4.0) * T::epsilon() { T::one() } else { T::one() / len };
        if d * s == T::zero() {
            return Err(GeometryError::DegenerateInput("plane passes through the camera origin".into()));
        }
        if d > T::zero() {
            s = -s;
        }
        Ok(Self { alpha: alpha * s, beta: beta * s, gamma: gamma * s, d: d * s })
    }

    pub fn coefficients(&self) -> [T; 4] {
        [self.alpha, self.beta, self.gamma, self.d]
    }

    pub fn normal(&self) -> Vec3<T> {
        Vec3::new(self.alpha, self.beta, self.gamma)
    }

    pub fn d(&self) -> T {
        self.d
    }

    pub fn signed_distance(&self, p: Vec3<T>) -> T {
        self.normal().dot(p) + self.d
    }

    /// Orthogonal projection of `p` onto the plane.
    pub fn project(&self, p: Vec3<T>) -> Vec3<T> {
        p - self.normal().scale(self.signed_distance(p))
    }

    /// Depth `Z = -d / (n . ray)` at which a camera ray with unit z component
    /// meets the plane. Non-positive or non-finite results mean no hit in
    /// front of the camera.
    pub fn depth_along_ray(&self, ray: Vec3<T>) -> T {
        -self.d / self.normal().dot(ray)
    }

    /// Angle between normals in radians, ignoring orientation.
    pub fn normal_angle(&self, o: &Self) -> T {
        self.normal().dot(o.normal()).abs().min(T::one()).acos()
    }

    pub fn max_coefficient_diff(&self, o: &Self) -> T {
        let (a, b) = (self.coefficients(), o.coefficients());
        (0..4).map(|i| (a[i] - b[i]).abs()).fold(T::zero(), T::max)
    }

    pub fn cast<U: Scalar>(&self) -> GroundPlane<U> {
        let c = self.coefficients().map(|v| U::lit(v.as_f64()));
        GroundPlane { alpha: c[0], beta: c[1], gamma: c[2], d: c[3] }
    }
}

/// Ground center of a box: its 3D center projected orthogonally onto the plane.
pub fn ground_center<T: Scalar>(b: &Box3D<T>, plane: &GroundPlane<T>) -> Vec3<T> {
    plane.project(b.center)
}

/// Total-least-squares plane through `points`.
///
/// The normal is the direction of least variance of the centered points.
pub fn fit_plane<T: Scalar>(points: &[Vec3<T>]) -> Result<GroundPlane<T>, GeometryError> {
    if points.len() < 3 {
        return Err(GeometryError::DegenerateInput(format!("need at least 3 points, got {}", points.len())));
    }
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::DegenerateInput("non-finite point".into()));
    }
    let n = T::lit(points.len() as f64);
    let centroid = points.iter().fold(Vec3::zero(), |acc, p| acc + *p).scale(T::one() / n);
    let mut cov = [[T::zero(); 3]; 3];
    for p in points {
        let c = (*p - centroid).to_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] = cov[i][j] + c[i] * c[j];
            }
        }
    }
    let (values, vectors) = symmetric_eigen(&Mat3::from_rows(cov));
    let spread = values[2].max(T::zero()).sqrt();
    let middle = values[1].max(T::zero()).sqrt();
    if spread == T::zero() || middle <= T::tolerance() * spread {
        return Err(GeometryError::DegenerateInput("points are collinear".into()));
    }
    let normal = vectors[0];
    GroundPlane::new(normal.x, normal.y, normal.z, -normal.dot(centroid))
}

/// Piecewise-planar ground: one plane per square footprint cell.
///
/// Cells are indexed on the camera-frame `(x, z)` footprint:
/// `i = floor((x - origin[0]) / cell_size)`, `j = floor((z - origin[1]) / cell_size)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GriddedGround<T> {
    pub cell_size: T,
    pub origin: [T; 2],
    pub cells: BTreeMap<(i64, i64), GroundPlane<T>>,
    pub fallback: GroundPlane<T>,
}

pub const DEFAULT_CELL_SIZE: f64 = 5.0;
pub const DEFAULT_MIN_POINTS_PER_CELL: usize = 3;

impl<T: Scalar> GriddedGround<T> {
    pub fn new(cell_size: T, origin: [T; 2], fallback: GroundPlane<T>) -> Result<Self, GeometryError> {
        if !(cell_size.is_finite() && cell_size > T::zero()) || !origin.iter().all(|v| v.is_finite()) {
            return Err(GeometryError::invalid("gridded ground", "cell size must be positive and origin finite"));
        }
        Ok(Self { cell_size, origin, cells: BTreeMap::new(), fallback })
    }

    pub fn cell_of(&self, x: T, z: T) -> Option<(i64, i64)> {
        let i = ((x - self.origin[0]) / self.cell_size).floor();
        let j = ((z - self.origin[1]) / self.cell_size).floor();
        Some((i.to_i64()?, j.to_i64()?))
    }

    /// The plane governing footprint `(x, z)`: its cell plane or the fallback.
    pub fn plane_at(&self, x: T, z: T) -> &GroundPlane<T> {
        self.cell_of(x, z).and_then(|c| self.cells.get(&c)).unwrap_or(&self.fallback)
    }
}

/// Bins points into `cell_size` squares on the `(x, z)` footprint and fits a
/// plane per cell holding at least `min_points_per_cell` points. Cells whose
/// points are too few or degenerate are left empty and use the global fit.
pub fn fit_gridded_ground<T: Scalar>(
    points: &[Vec3<T>],
    cell_size: T,
    min_points_per_cell: usize,
) -> Result<GriddedGround<T>, GeometryError> {
    let fallback = fit_plane(points)?;
    let mut grid = GriddedGround::new(cell_size, [T::zero(), T::zero()], fallback)?;
    let mut bins: BTreeMap<(i64, i64), Vec<Vec3<T>>> = BTreeMap::new();
    for p in points {
        if let Some(cell) = grid.cell_of(p.x, p.z) {
            bins.entry(cell).or_default().push(*p);
        }
    }
    for (cell, pts) in bins {
        if pts.len() < min_points_per_cell {
            continue;
        }
        if let Ok(plane) = fit_plane(&pts) {
            grid.cells.insert(cell, plane);
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalization_and_orientation() {
        let p = GroundPlane::new(0.0, 2.0, 0.0, -10.0).unwrap();
        assert_eq!(p.coefficients(), [0.0, 1.0, 0.0, -5.0]);
        let q = GroundPlane::new(0.0, -1.0, 0.0, 5.0).unwrap();
        assert_eq!(q.coefficients(), [0.0, 1.0, 0.0, -5.0]);
        assert!(GroundPlane::new(0.0, 1.0, 0.0, 0.0).is_err());
        assert!(GroundPlane::new(0.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn ground_center_axis_aligned() {
        let plane = GroundPlane::new(0.0, 1.0, 0.0, -5.0).unwrap();
        let b = Box3D::new(Vec3::new(0.0, 4.0, 20.0), 4.0, 2.0, 2.0, 0.3).unwrap();
        assert_eq!(ground_center(&b, &plane), Vec3::new(0.0, 5.0, 20.0));
        let on = Box3D::new(Vec3::new(1.0, 5.0, 7.0), 1.0, 1.0, 1.0, 0.0).unwrap();
        assert_eq!(ground_center(&on, &plane), on.center);
    }

    #[test]
    fn fit_exact_level_plane() {
        let pts: Vec<_> = (0..20).map(|i| Vec3::new((i % 5) as f64 - 2.0, 5.0, 10.0 + (i / 5) as f64)).collect();
        let p = fit_plane(&pts).unwrap();
        let c = p.coefficients();
        assert!((c[0]).abs() < 1e-12 && (c[1] - 1.0).abs() < 1e-12 && c[2].abs() < 1e-12);
        assert!((c[3] + 5.0).abs() < 1e-9);
    }

    #[test]
    fn fit_rejects_degenerate() {
        let two = [Vec3::new(0.0, 1.0, 2.0), Vec3::new(1.0, 1.0, 2.0)];
        assert!(matches!(fit_plane(&two), Err(GeometryError::DegenerateInput(_))));
        let line: Vec<_> = (0..10).map(|i| Vec3::new(i as f64, 2.0 * i as f64 + 1.0, 3.0)).collect();
        assert!(matches!(fit_plane(&line), Err(GeometryError::DegenerateInput(_))));
        let same = [Vec3::new(1.0, 1.0, 1.0); 5];
        assert!(fit_plane(&same).is_err());
    }

    #[test]
    fn gridded_uses_fallback_for_sparse_cells() {
        let mut pts: Vec<_> = (0..25).map(|i| Vec3::new((i % 5) as f64, 3.0, (i / 5) as f64)).collect();
        pts.push(Vec3::new(12.0, 3.0, 12.0));
        pts.push(Vec3::new(13.0, 3.0, 13.0));
        let g = fit_gridded_ground(&pts, 5.0, 3).unwrap();
        assert!(g.cells.contains_key(&(0, 0)));
        assert!(!g.cells.contains_key(&(2, 2)));
        assert_eq!(g.plane_at(12.5, 12.5), &g.fallback);
        assert!(fit_gridded_ground(&pts, 0.0, 3).is_err());
    }

    fn plane_strategy() -> impl Strategy<Value = (GroundPlane<f64>, Vec<Vec3<f64>>)> {
        (-0.3..0.3f64, -0.3..0.3f64, 2.0..10.0f64, 0u64..1000).prop_map(|(tx, tz, h, seed)| {
            let n = Vec3::new(tx, 1.0, tz);
            let plane = GroundPlane::new(n.x, n.y, n.z, -h * n.norm()).unwrap();
            // deterministic scatter of footprint samples, lifted onto the plane
            let mut pts = Vec::new();
            let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            for _ in 0..30 {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let x = ((s >> 11) as f64 / (1u64 << 53) as f64) * 40.0 - 20.0;
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let z = ((s >> 11) as f64 / (1u64 << 53) as f64) * 80.0 + 5.0;
                let c = plane.coefficients();
                let y = -(c[0] * x + c[2] * z + c[3]) / c[1];
                pts.push(Vec3::new(x, y, z));
            }
            (plane, pts)
        })
    }

    proptest! {
        #[test]
        fn ground_center_on_plane((plane, pts) in plane_strategy(), dy in -3.0..3.0f64) {
            let b = Box3D::new(pts[0] + Vec3::new(0.0, dy, 0.0), 4.0, 2.0, 1.5, 0.2).unwrap();
            let g = ground_center(&b, &plane);
            prop_assert!(plane.signed_distance(g).abs() < 1e-9);
            let disp = b.center - g;
            prop_assert!(disp.cross(plane.normal()).norm() < 1e-9);
        }

        #[test]
        fn fit_recovers_exact_plane((plane, pts) in plane_strategy()) {
            let fit = fit_plane(&pts).unwrap();
            prop_assert!(fit.max_coefficient_diff(&plane) < 1e-9);
        }

        #[test]
        fn fit_is_permutation_invariant((_plane, pts) in plane_strategy(), rot in 0usize..30) {
            let mut shuffled = pts.clone();
            shuffled.rotate_left(rot);
            shuffled.reverse();
            let a = fit_plane(&pts).unwrap();
            let b = fit_plane(&shuffled).unwrap();
            prop_assert!(a.max_coefficient_diff(&b) < 1e-9);
        }

        #[test]
        fn fit_is_rigid_equivariant((plane, pts) in plane_strategy(), yaw in -0.5..0.5f64, shift in -3.0..3.0f64) {
            let rot = Mat3::rotation_y(yaw);
            let t = Vec3::new(shift, 0.0, 0.5 * shift);
            let moved: Vec<_> = pts.iter().map(|p| rot.mul_vec(*p) + t).collect();
            let n = rot.mul_vec(plane.normal());
            let expected = GroundPlane::new(n.x, n.y, n.z, plane.d() - n.dot(t)).unwrap();
            let fit = fit_plane(&moved).unwrap();
            prop_assert!(fit.max_coefficient_diff(&expected) < 1e-9);
        }

        #[test]
        fn gridded_fit_on_single_plane_matches_global((plane, pts) in plane_strategy()) {
            let mut dense = pts.clone();
            let c = plane.coefficients();
            for i in 0..40 {
                for j in 0..40 {
                    let (x, z) = (i as f64 - 20.0, j as f64 * 2.0 + 5.0);
                    dense.push(Vec3::new(x, -(c[0] * x + c[2] * z + c[3]) / c[1], z));
                }
            }
            let g = fit_gridded_ground(&dense, 5.0, 3).unwrap();
            prop_assert!(!g.cells.is_empty());
            for cell in g.cells.values() {
                prop_assert!(cell.max_coefficient_diff(&g.fallback) < 1e-6);
                prop_assert!(cell.max_coefficient_diff(&plane) < 1e-6);
            }
        }
    }
}
