use std::collections::BTreeMap;

use rand::Rng;

use super::config::NoiseModel;
use super::scene::{image_box, normal, poisson, Scene};
use super::stream;
use crate::category::Category;
use crate::geometry::{Box3D, Vec3};
use crate::metrics::{Detection, FrameDetections};
use crate::scalar::normalize_angle;

/// Clutter boxes are placed in this depth window, meters.
const CLUTTER_DEPTH: [f64; 2] = [5.0, 120.0];

/// Perturbed detections plus, for every detection, the index of the
/// annotation it was derived from (`None` for clutter).
#[derive(Debug, Clone, PartialEq)]
pub struct Perturbed {
    pub detections: FrameDetections<f64>,
    pub sources: BTreeMap<String, Vec<Option<usize>>>,
}

fn detection(frame: &str, category: Category, b: Box3D<f64>, score: f64, cam: &crate::geometry::CameraModel<f64>) -> Detection<f64> {
    Detection {
        frame_id: frame.to_string(),
        category,
        box3d: b,
        box2d: image_box(cam, &b),
        score,
        alpha: normalize_angle(b.yaw - b.center.x.atan2(b.center.z)),
    }
}

/// Simulates a detector on every 3D-labeled object of `scene`.
///
/// Per object: drop with `drop_probability`, otherwise add Gaussian noise to
/// the center (sigma grows with depth), yaw and relative size, and score the
/// result by its error. Clutter boxes rest on the frame's ground plane at a
/// uniform depth and lateral position with low uniform scores.
pub fn perturb(scene: &Scene, noise: &NoiseModel, seed: u64) -> Perturbed {
    let mut detections = BTreeMap::new();
    let mut sources = BTreeMap::new();
    for (fi, frame) in scene.frames.iter().enumerate() {
        let cam = &frame.calibration.camera;
        let mut dets = Vec::new();
        let mut src = Vec::new();
        for (oi, ann) in frame.annotations.iter().enumerate() {
            let Some(gt) = ann.box3d else { continue };
            let mut rng = stream(seed, b"noise", fi, oi as u32);
            let drop: f64 = rng.random();
            let e = [normal(&mut rng), normal(&mut rng), normal(&mut rng)];
            let e_yaw = normal(&mut rng);
            let e_size = [normal(&mut rng), normal(&mut rng), normal(&mut rng)];
            if drop < noise.drop_probability {
                continue;
            }
            let sigma = noise.center_sigma + noise.center_sigma_per_meter * gt.center.z;
            let offset = Vec3::new(e[0], e[1], e[2]).scale(sigma);
            let dyaw = noise.yaw_sigma * e_yaw;
            let scale = e_size.map(|v| (1.0 + noise.size_sigma * v).max(0.0));
            let dims = [
                (gt.length * scale[0]).max(0.1),
                (gt.width * scale[1]).max(0.1),
                (gt.height * scale[2]).max(0.1),
            ];
            let b = if sigma == 0.0 && dyaw == 0.0 && noise.size_sigma == 0.0 {
                gt
            } else {
                Box3D::new(gt.center + offset, dims[0], dims[1], dims[2], normalize_angle(gt.yaw + dyaw))
                    .expect("perturbed box is valid")
            };
            let rel = |a: f64, b: f64| (a - b).abs() / b;
            let error = offset.norm()
                + dyaw.abs()
                + rel(b.length, gt.length)
                + rel(b.width, gt.width)
                + rel(b.height, gt.height);
            let mut d = detection(&frame.frame_id, ann.category, b, (-error / noise.score_scale).exp(), cam);
            if b == gt {
                d.box2d = Some(ann.box2d);
                d.alpha = ann.alpha;
            }
            dets.push(d);
            src.push(Some(oi));
        }

        let mut rng = stream(seed, b"clutter", fi, super::FRAME_STREAM);
        let n = poisson(&mut rng, noise.clutter_rate);
        let plane = frame.calibration.plane;
        let templates: Vec<_> = frame.annotations.iter().filter_map(|a| a.box3d.map(|b| (a.category, b))).collect();
        for k in 0..n {
            let mut rng = stream(seed, b"clutter", fi, k as u32);
            let (category, t) = if templates.is_empty() {
                (Category::Car, Box3D::new(Vec3::new(0.0, 0.0, 1.0), 4.2, 1.7, 1.3, 0.0).expect("valid"))
            } else {
                templates[rng.random_range(0..templates.len())]
            };
            let z = rng.random_range(CLUTTER_DEPTH[0]..CLUTTER_DEPTH[1]);
            let x = rng.random_range(-1.0..=1.0) * (cam.cx / cam.fx) * z;
            let [a, bb, c, d] = plane.coefficients();
            let y = -(a * x + c * z + d) / bb - 0.5 * t.height;
            let yaw = normalize_angle(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI));
            let score = rng.random::<f64>() * noise.clutter_max_score;
            let b = Box3D::new(Vec3::new(x, y, z), t.length, t.width, t.height, yaw).expect("valid clutter box");
            dets.push(detection(&frame.frame_id, category, b, score, cam));
            src.push(None);
        }
        detections.insert(frame.frame_id.clone(), dets);
        sources.insert(frame.frame_id.clone(), src);
    }
    Perturbed { detections, sources }
}
