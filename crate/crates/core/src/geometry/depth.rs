use rayon::prelude::*;

use super::camera::CameraModel;
use super::linalg::Vec3;
use super::plane::{GriddedGround, GroundPlane};
use crate::scalar::Scalar;

/// Default far limit for ground depth maps, meters.
pub const DEFAULT_Z_MAX: f64 = 200.0;

/// Per-pixel ground depth, row-major. Pixels with no valid ground hit hold
/// `+inf` (the INVALID sentinel).
#[derive(Debug, Clone, PartialEq)]
pub struct DepthMap<T> {
    pub width: u32,
    pub height: u32,
    pub z_max: T,
    pub values: Vec<T>,
}

impl<T: Scalar> DepthMap<T> {
    pub fn get(&self, x: u32, y: u32) -> Option<T> {
        let v = self.values[y as usize * self.width as usize + x as usize];
        v.is_finite().then_some(v)
    }

    pub fn is_valid(&self, x: u32, y: u32) -> bool {
        self.get(x, y).is_some()
    }

    pub fn valid_count(&self) -> usize {
        self.values.iter().filter(|v| v.is_finite()).count()
    }
}

/// Applies the validity rule `0 < z <= z_max`; everything else is INVALID.
#[inline]
fn validate<T: Scalar>(z: T, z_max: T) -> T {
    if z.is_finite() && z > T::zero() && z <= z_max {
        z
    } else {
        T::infinity()
    }
}

fn build<T: Scalar, F>(cam: &CameraModel<T>, z_max: T, per_pixel: F) -> DepthMap<T>
where
    F: Fn(T, T) -> T + Sync,
{
    let w = cam.width as usize;
    let mut values = vec![T::infinity(); w * cam.height as usize];
    values.par_chunks_mut(w).enumerate().for_each(|(row, out)| {
        let v = T::lit(row as f64);
        for (col, cell) in out.iter_mut().enumerate() {
            *cell = validate(per_pixel(T::lit(col as f64), v), z_max);
        }
    });
    DepthMap { width: cam.width, height: cam.height, z_max, values }
}

/// Depth of the ground plane seen through every pixel:
/// `Z = -d / (alpha (x - cx)/fx + beta (y - cy)/fy + gamma)`.
///
/// Pixel `(x, y)` uses integer column/row coordinates.
pub fn ground_depth_map<T: Scalar>(cam: &CameraModel<T>, plane: &GroundPlane<T>, z_max: T) -> DepthMap<T> {
    build(cam, z_max, |u, v| plane.depth_along_ray(cam.ray(u, v)))
}

/// Cell planes over the bounding box of the populated cells, row-major in `j`.
struct DenseCells<T> {
    i0: i64,
    j0: i64,
    ni: i64,
    nj: i64,
    planes: Vec<Option<GroundPlane<T>>>,
}

/// Largest bounding box, in cells, stored densely.
const MAX_DENSE_CELLS: i64 = 1 << 24;

impl<T: Scalar> DenseCells<T> {
    fn new(grid: &GriddedGround<T>) -> Option<Self> {
        let (i0, i1) = grid.cells.keys().fold((i64::MAX, i64::MIN), |(a, b), k| (a.min(k.0), b.max(k.0)));
        let (j0, j1) = grid.cells.keys().fold((i64::MAX, i64::MIN), |(a, b), k| (a.min(k.1), b.max(k.1)));
        let ni = i1.checked_sub(i0)?.checked_add(1)?;
        let nj = j1.checked_sub(j0)?.checked_add(1)?;
        if ni.checked_mul(nj)? > MAX_DENSE_CELLS {
            return None;
        }
        let mut planes = vec![None; (ni * nj) as usize];
        for (&(i, j), p) in &grid.cells {
            planes[((j - j0) * ni + (i - i0)) as usize] = Some(*p);
        }
        Some(Self { i0, j0, ni, nj, planes })
    }

    fn get(&self, i: i64, j: i64) -> Option<&GroundPlane<T>> {
        if i < self.i0 || j < self.j0 || i >= self.i0 + self.ni || j >= self.j0 + self.nj {
            return None;
        }
        self.planes[((j - self.j0) * self.ni + (i - self.i0)) as usize].as_ref()
    }
}

fn floor_index<T: Scalar>(v: T) -> i64 {
    // Saturate far outside any stored cell.
    v.floor().as_f64().clamp(-9.0e15, 9.0e15) as i64
}

/// Accepts `z` as the new nearest hit when it lands in the footprint of the
/// cell `(i, j)` whose plane produced it.
#[inline]
fn in_cell_hit<T: Scalar>(grid: &GriddedGround<T>, plane: &GroundPlane<T>, ray: Vec3<T>, cell: (i64, i64), best: T) -> Option<T> {
    let z = plane.depth_along_ray(ray);
    (z.is_finite() && z > T::zero() && z < best && grid.cell_of(ray.x * z, z) == Some(cell)).then_some(z)
}

fn nearest_hit_scan<T: Scalar>(grid: &GriddedGround<T>, ray: Vec3<T>) -> T {
    let mut best = T::infinity();
    for (cell, plane) in &grid.cells {
        if let Some(z) = in_cell_hit(grid, plane, ray, *cell, best) {
            best = z;
        }
    }
    best
}

/// Visits only the cells whose footprint the ray's ground track `(x, z) =
/// (ray.x * t, t)`, `t > 0`, can pass through: for each row of cells along
/// `z`, the columns spanned by the track over that row, widened by one.
fn nearest_hit_dense<T: Scalar>(grid: &GriddedGround<T>, dense: &DenseCells<T>, ray: Vec3<T>) -> T {
    let cs = grid.cell_size;
    let [ox, oz] = grid.origin;
    let mut best = T::infinity();
    let j_first = dense.j0.max(floor_index((T::zero() - oz) / cs));
    for j in j_first..dense.j0 + dense.nj {
        let z_lo = (oz + T::lit(j as f64) * cs).max(T::zero());
        let z_hi = oz + T::lit((j + 1) as f64) * cs;
        let (xa, xb) = (ray.x * z_lo, ray.x * z_hi);
        let i_lo = (floor_index((xa.min(xb) - ox) / cs) - 1).max(dense.i0);
        let i_hi = (floor_index((xa.max(xb) - ox) / cs) + 1).min(dense.i0 + dense.ni - 1);
        for i in i_lo..=i_hi {
            if let Some(plane) = dense.get(i, j) {
                if let Some(z) = in_cell_hit(grid, plane, ray, (i, j), best) {
                    best = z;
                }
            }
        }
    }
    best
}

/// Ground depth against a piecewise-planar ground.
///
/// Each ray is intersected with the cell planes; the nearest hit whose
/// footprint falls inside the cell that owns the plane wins. Rays that hit no
/// cell in its own footprint fall back to the global plane.
pub fn gridded_depth_map<T: Scalar>(cam: &CameraModel<T>, grid: &GriddedGround<T>, z_max: T) -> DepthMap<T> {
    let dense = DenseCells::new(grid);
    build(cam, z_max, |u, v| {
        let ray = cam.ray(u, v);
        let best = match &dense {
            Some(d) => nearest_hit_dense(grid, d, ray),
            None => nearest_hit_scan(grid, ray),
        };
        if best.is_finite() {
            best
        } else {
            grid.fallback.depth_along_ray(ray)
        }
    })
}
