use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rayon::prelude::*;

use super::config::SceneConfig;
use super::{frame_id, stream, SynthError, FRAME_STREAM};
use crate::category::Category;
use crate::geometry::{project_box_to_2d, Box2D, Box3D, CameraModel, GroundPlane, Vec3};
use crate::io::Calibration;
use crate::metrics::{Annotation, FrameAnnotations, FrameDetections, FramePlanes};
use crate::scalar::normalize_angle;

/// Smallest generated object dimension, meters.
const MIN_SIZE: f64 = 0.1;
/// Fraction of the horizontal half field of view used for placement.
const LATERAL_FILL: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneFrame {
    pub frame_id: String,
    pub calibration: Calibration,
    /// Objects with a 3D box first, then image-only labels.
    pub annotations: Vec<Annotation<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    pub frames: Vec<SceneFrame>,
}

impl Scene {
    pub fn ground_truth(&self) -> FrameAnnotations<f64> {
        self.frames.iter().map(|f| (f.frame_id.clone(), f.annotations.clone())).collect()
    }

    pub fn planes(&self) -> FramePlanes<f64> {
        self.frames.iter().map(|f| (f.frame_id.clone(), f.calibration.plane)).collect()
    }

    /// Every 3D-labeled object as a score-1 detection.
    pub fn as_detections(&self) -> FrameDetections<f64> {
        self.frames
            .iter()
            .map(|f| (f.frame_id.clone(), f.annotations.iter().filter_map(Annotation::as_detection).collect()))
            .collect()
    }
}

pub(crate) fn poisson(rng: &mut ChaCha8Rng, mean: f64) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map_or(0, |p| p.sample(rng) as usize)
}

pub(crate) fn normal(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn truncated_normal(rng: &mut ChaCha8Rng, mean: f64, std: f64, lo: f64, hi: f64) -> f64 {
    if std == 0.0 || lo == hi {
        return mean.clamp(lo, hi);
    }
    for _ in 0..1000 {
        let v = mean + std * normal(rng);
        if (lo..=hi).contains(&v) {
            return v;
        }
    }
    // The window sits far in a tail; fall back to uniform.
    rng.random_range(lo..=hi)
}

fn pick_category(rng: &mut ChaCha8Rng, cfg: &SceneConfig) -> Category {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = Category::Car;
    for (cat, w) in cfg.category_weights.iter().filter(|(_, w)| **w > 0.0) {
        acc += w;
        last = *cat;
        if u < acc {
            return *cat;
        }
    }
    last
}

/// Amodal projection clipped to the image, or `None` when the box is behind
/// the camera or entirely outside the image.
pub fn image_box(cam: &CameraModel<f64>, b: &Box3D<f64>) -> Option<Box2D<f64>> {
    clip(cam, &project_box_to_2d(cam, b).ok()?)
}

fn clip(cam: &CameraModel<f64>, a: &Box2D<f64>) -> Option<Box2D<f64>> {
    let (w, h) = (f64::from(cam.width), f64::from(cam.height));
    let c = Box2D { xmin: a.xmin.max(0.0), ymin: a.ymin.max(0.0), xmax: a.xmax.min(w), ymax: a.ymax.min(h) };
    (c.xmin < c.xmax && c.ymin < c.ymax).then_some(c)
}

/// 0 when the projection lies inside the image, 1 when at least half of it
/// is visible, 2 otherwise.
fn truncation_level(amodal: &Box2D<f64>, visible: &Box2D<f64>) -> u8 {
    if visible == amodal {
        0
    } else if visible.area() >= 0.5 * amodal.area() {
        1
    } else {
        2
    }
}

/// Area of `a` covered by the union of `others`, by coordinate compression.
fn covered_area(a: &Box2D<f64>, others: &[Box2D<f64>]) -> f64 {
    let clipped: Vec<Box2D<f64>> = others
        .iter()
        .map(|o| Box2D { xmin: o.xmin.max(a.xmin), ymin: o.ymin.max(a.ymin), xmax: o.xmax.min(a.xmax), ymax: o.ymax.min(a.ymax) })
        .filter(|o| o.xmin < o.xmax && o.ymin < o.ymax)
        .collect();
    if clipped.is_empty() {
        return 0.0;
    }
    let mut xs: Vec<f64> = clipped.iter().flat_map(|o| [o.xmin, o.xmax]).collect();
    let mut ys: Vec<f64> = clipped.iter().flat_map(|o| [o.ymin, o.ymax]).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    ys.sort_by(f64::total_cmp);
    ys.dedup();
    let mut area = 0.0;
    for xw in xs.windows(2) {
        for yw in ys.windows(2) {
            let (mx, my) = (0.5 * (xw[0] + xw[1]), 0.5 * (yw[0] + yw[1]));
            if clipped.iter().any(|o| o.xmin <= mx && mx <= o.xmax && o.ymin <= my && my <= o.ymax) {
                area += (xw[1] - xw[0]) * (yw[1] - yw[0]);
            }
        }
    }
    area
}

fn occlusion_level(a: &Box2D<f64>, occluders: &[Box2D<f64>]) -> u8 {
    let area = a.area();
    if area <= 0.0 {
        return 0;
    }
    let f = covered_area(a, occluders) / area;
    if f <= 0.0 {
        0
    } else if f <= 0.5 {
        1
    } else {
        2
    }
}

/// Depth of the ground seen by the bottom image row at the principal column.
fn nearest_visible_ground(cam: &CameraModel<f64>, plane: &GroundPlane<f64>) -> f64 {
    let z = plane.depth_along_ray(cam.ray(cam.cx, f64::from(cam.height)));
    if z.is_finite() && z > 0.0 {
        z
    } else {
        0.0
    }
}

struct Placed {
    category: Category,
    box3d: Box3D<f64>,
    amodal: Option<Box2D<f64>>,
}

fn place_object(cfg: &SceneConfig, cam: &CameraModel<f64>, plane: &GroundPlane<f64>, rng: &mut ChaCha8Rng) -> Placed {
    let category = pick_category(rng, cfg);
    let prior = cfg.sizes[&category];
    let mut dims = [0.0; 3];
    for (k, d) in dims.iter_mut().enumerate() {
        *d = truncated_normal(rng, prior.mean[k], prior.std[k], MIN_SIZE, f64::INFINITY);
    }
    let [length, height, width] = dims;
    let yaw = normalize_angle(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
    let d = &cfg.depth;
    let radius = 0.5 * length.hypot(width);
    let lo = d.range[0].max(nearest_visible_ground(cam, plane)).max(radius + 1.0).min(d.range[1]);
    let z = truncated_normal(rng, d.mean, d.std, lo, d.range[1].max(lo));
    let x = rng.random_range(-1.0..=1.0) * LATERAL_FILL * (cam.cx / cam.fx) * z;
    let [a, b, c, dd] = plane.coefficients();
    let y_bottom = -(a * x + c * z + dd) / b;
    let box3d = Box3D::new(Vec3::new(x, y_bottom - 0.5 * height, z), length, width, height, yaw)
        .expect("sampled box is valid");
    let amodal = project_box_to_2d(cam, &box3d).ok();
    Placed { category, box3d, amodal }
}

fn image_only(cfg: &SceneConfig, cam: &CameraModel<f64>, rng: &mut ChaCha8Rng) -> (Category, Box2D<f64>) {
    let category = pick_category(rng, cfg);
    let (w, h) = (f64::from(cam.width), f64::from(cam.height));
    let bw = rng.random_range(15.0..80.0f64).min(w);
    let bh = rng.random_range(15.0..80.0f64).min(h);
    let x0 = rng.random_range(0.0..=(w - bw));
    let y0 = rng.random_range(0.0..=(h - bh));
    (category, Box2D { xmin: x0, ymin: y0, xmax: x0 + bw, ymax: y0 + bh })
}

fn generate_frame(cfg: &SceneConfig, index: usize) -> SceneFrame {
    let id = frame_id(index);
    let mut rng = stream(cfg.seed, b"frame", index, FRAME_STREAM);
    let c = &cfg.camera;
    let height = rng.random_range(c.height[0]..=c.height[1]);
    let pitch = rng.random_range(c.pitch[0]..=c.pitch[1]);
    let focal = rng.random_range(c.focal[0]..=c.focal[1]);
    let n3d = poisson(&mut rng, cfg.objects_per_frame);
    let n2d = poisson(&mut rng, cfg.image_only_per_frame);

    let camera = CameraModel::new(
        focal,
        focal,
        0.5 * f64::from(c.image_width),
        0.5 * f64::from(c.image_height),
        c.image_width,
        c.image_height,
    )
    .expect("validated camera ranges");
    let plane = GroundPlane::new(0.0, pitch.cos(), pitch.sin(), -height).expect("validated height");

    let placed: Vec<Placed> =
        (0..n3d).map(|i| place_object(cfg, &camera, &plane, &mut stream(cfg.seed, b"object", index, i as u32))).collect();
    let extra: Vec<(Category, Box2D<f64>)> =
        (0..n2d).map(|i| image_only(cfg, &camera, &mut stream(cfg.seed, b"image_only", index, i as u32))).collect();

    // Visible 2D boxes; objects outside the image keep a degenerate box at
    // the nearest border.
    let visible: Vec<Box2D<f64>> = placed
        .iter()
        .map(|p| {
            let a = p.amodal.unwrap_or(Box2D { xmin: 0.0, ymin: 0.0, xmax: 0.0, ymax: 0.0 });
            clip(&camera, &a).unwrap_or_else(|| {
                let (w, h) = (f64::from(camera.width), f64::from(camera.height));
                let (x, y) = (a.xmin.clamp(0.0, w), a.ymin.clamp(0.0, h));
                Box2D { xmin: x, ymin: y, xmax: x, ymax: y }
            })
        })
        .collect();

    let mut annotations = Vec::with_capacity(n3d + n2d);
    for (i, p) in placed.iter().enumerate() {
        let z = p.box3d.center.z;
        let occluders: Vec<Box2D<f64>> = placed
            .iter()
            .enumerate()
            .filter(|(j, q)| q.box3d.center.z < z || (q.box3d.center.z == z && *j < i))
            .map(|(j, _)| visible[j])
            .collect();
        let truncation = p.amodal.map_or(2, |a| truncation_level(&a, &visible[i]));
        let mut ann = Annotation::new(&id, p.category, occlusion_level(&visible[i], &occluders), truncation, visible[i], Some(p.box3d))
            .expect("levels are in range");
        ann.alpha = normalize_angle(p.box3d.yaw - p.box3d.center.x.atan2(z));
        annotations.push(ann);
    }
    for (category, b) in extra {
        let ann = Annotation::new(&id, category, occlusion_level(&b, &visible), 0, b, None).expect("levels are in range");
        annotations.push(ann);
    }
    SceneFrame {
        frame_id: id,
        calibration: Calibration { camera, plane, lidar_to_camera: None, gridded: None },
        annotations,
    }
}

/// Generates `cfg.frames` frames. Each frame samples a camera (height, pitch
/// and focal length uniform within the configured ranges, principal point
/// at the image center), derives the ground plane, then places objects whose
/// bottom-face center lies on that plane.
pub fn generate_scene(cfg: &SceneConfig) -> Result<Scene, SynthError> {
    cfg.validate()?;
    let frames = (0..cfg.frames).into_par_iter().map(|i| generate_frame(cfg, i)).collect();
    Ok(Scene { frames })
}
