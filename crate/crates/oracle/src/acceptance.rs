//! The numbered acceptance criteria as plain functions, shared by the
//! acceptance test target and the command-line self-test.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use rand::Rng;
use roadside_eval::geometry::{fit_plane, ground_depth_map, gridded_depth_map, DEFAULT_Z_MAX};
use roadside_eval::io::{
    decode_utf8, format_calib, format_depth_map, format_eval_config, format_ground_truth, format_predictions,
    parse_calib, parse_depth_map, parse_eval_config, parse_ground_truth, parse_predictions, parse_report,
    serialize_report, Calibration, ParseError,
};
use roadside_eval::metrics::{
    ap_r40, center_similarity, evaluate, orientation_similarity, rotated_iou_bev, CellReport, PrCurve, TpSample,
};
use roadside_eval::synth::{generate_scene, perturb, NoiseModel, SceneConfig};
use roadside_eval::{
    Annotation, Box2D, Box3D, CameraModel, Category, Detection, EvalConfig, GriddedGround, GroundPlane, MetricReport, Vec3,
};

use crate::random::{dyadic, gaussian, nearby_box, random_box, rng};
use crate::{ap, integrate, iou};

#[derive(Debug, Clone)]
pub struct Outcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2}. {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.seconds,
            self.detail
        )
    }
}

/// Problem sizes. `Full` uses the sizes the criteria are stated with;
/// `Quick` shrinks the expensive ones for a fast smoke run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scale {
    Full,
    Quick,
}

fn timed(id: u8, title: &'static str, f: impl FnOnce() -> (bool, String)) -> Outcome {
    let start = Instant::now();
    let (passed, detail) = match catch_unwind(AssertUnwindSafe(f)) {
        Ok(r) => r,
        Err(_) => (false, "panicked".to_string()),
    };
    Outcome { id, title, passed, detail, seconds: start.elapsed().as_secs_f64() }
}

fn cell_is_perfect(c: &CellReport) -> bool {
    let near = |v: f64, want: f64| (v - want).abs() <= 1e-9;
    near(c.ap, 100.0)
        && [c.acs, c.aos, c.aas, c.ags].iter().all(|s| near(*s, 1.0))
        && near(c.agd, 0.0)
        && near(c.rope_score, 100.0)
        && !c.similarity_undefined
}

/// Criterion 1: Ground truth scored against itself is perfect in every populated cell.
pub fn metric_identity() -> Outcome {
    timed(1, "metric identity on 200 synthetic frames", || {
        let start = Instant::now();
        let scene = generate_scene(&SceneConfig { frames: 200, seed: 1, ..SceneConfig::default() }).expect("valid config");
        let report = evaluate(&scene.ground_truth(), &scene.as_detections(), &scene.planes(), &EvalConfig::default())
            .expect("consistent inputs");
        let secs = start.elapsed().as_secs_f64();
        let populated: Vec<&CellReport> = report.cells.iter().filter(|c| c.is_populated()).collect();
        let bad = populated.iter().filter(|c| !cell_is_perfect(c)).count();
        (
            bad == 0 && !populated.is_empty() && secs < 10.0,
            format!("{} populated cells, {bad} imperfect, {secs:.2} s (limit 10 s)", populated.len()),
        )
    })
}

/// Criterion 2: Rotated BEV IoU against a stratified sampling estimate.
pub fn rotated_iou_oracle(scale: Scale) -> Outcome {
    let (pairs, side) = match scale {
        Scale::Full => (1000, 1000),
        Scale::Quick => (100, 300),
    };
    let tol = if scale == Scale::Full { 2e-3 } else { 6e-3 };
    timed(2, "rotated IoU vs sampled area", move || {
        let start = Instant::now();
        let mut r = rng(2);
        let mut worst = 0.0f64;
        for _ in 0..pairs {
            let a = random_box(&mut r);
            let b = if r.random_bool(0.85) { nearby_box(&mut r, &a) } else { random_box(&mut r) };
            let est = iou::monte_carlo_iou_bev(&a, &b, side, [r.random(), r.random()]);
            worst = worst.max((rotated_iou_bev(&a, &b) - est).abs());
        }
        let secs = start.elapsed().as_secs_f64();
        (
            worst < tol && secs < 60.0,
            format!("{pairs} pairs, {} points each, max |diff| {worst:.2e} (limit {tol:.0e}), {secs:.1} s (limit 60 s)", side * side),
        )
    })
}

/// Criterion 3: AP at 40 recall positions against an exhaustive cutoff sweep.
pub fn ap_oracle() -> Outcome {
    timed(3, "AP|R40 vs exhaustive sweep", || {
        let mut r = rng(3);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let n = r.random_range(1..=20);
            let scored: Vec<(f64, bool)> = (0..n).map(|_| (r.random_range(0..10) as f64 / 10.0, r.random_bool(0.6))).collect();
            let gt = scored.iter().filter(|s| s.1).count() + r.random_range(0..4);
            let got = ap_r40(&PrCurve::from_scored(&scored, gt));
            worst = worst.max((got - ap::average_precision(&scored, gt, 40)).abs());
        }
        (worst <= 1e-12, format!("50 instances, max |diff| {worst:.1e} (limit 1e-12)"))
    })
}

/// Criterion 4: Orientation similarity at its analytic points.
pub fn aos_analytic() -> Outcome {
    timed(4, "orientation similarity closed form", || {
        use std::f64::consts::PI;
        let cases = [(0.0, 1.0), (PI / 4.0, 0.5), (PI / 2.0, 0.0), (PI, 1.0)];
        let got: Vec<f64> = cases.iter().map(|(d, _)| orientation_similarity(*d)).collect();
        let ok = cases.iter().zip(&got).all(|((_, want), g)| g == want);
        (ok, format!("values at 0, pi/4, pi/2, pi: {got:?}"))
    })
}

/// Criterion 5: Flat-ground depth in closed form, and the uniform grid reducing to the
/// single plane.
pub fn ground_depth_closed_form() -> Outcome {
    timed(5, "ground depth closed form and uniform grid", || {
        let h = 6.0;
        let cam = CameraModel::new(2000.0, 2000.0, 960.0, 540.0, 1920, 1080).expect("valid camera");
        let plane = GroundPlane::new(0.0, 1.0, 0.0, -h).expect("valid plane");
        let map = ground_depth_map(&cam, &plane, DEFAULT_Z_MAX);
        let mut r = rng(5);
        let mut worst = 0.0f64;
        let mut mismatched = 0;
        for _ in 0..100 {
            let v = r.random_range(541..1080u32);
            let want = h * cam.fy / (f64::from(v) - cam.cy);
            match map.get(960, v) {
                Some(z) if want <= DEFAULT_Z_MAX => worst = worst.max((z - want).abs()),
                None if want > DEFAULT_Z_MAX => {}
                _ => mismatched += 1,
            }
        }
        let above_invalid = (0..=540u32).all(|v| (0..cam.width).all(|u| !map.is_valid(u, v)));
        let mut grid = GriddedGround::new(5.0, [0.0, 0.0], plane).expect("valid grid");
        for i in -60..60 {
            for j in 0..60 {
                grid.cells.insert((i, j), plane);
            }
        }
        let same = gridded_depth_map(&cam, &grid, DEFAULT_Z_MAX).values == map.values;
        (
            worst <= 1e-9 && mismatched == 0 && above_invalid && same,
            format!(
                "100 rows: max |diff| {worst:.1e} (limit 1e-9), {mismatched} validity mismatches; horizon and above invalid: {above_invalid}; uniform grid identical: {same}"
            ),
        )
    })
}

/// Criterion 6: Plane recovery from exact and noisy points.
pub fn plane_fit_recovery() -> Outcome {
    timed(6, "plane fit recovery", || {
        let mut r = rng(6);
        let mut worst_exact = 0.0f64;
        let mut within = 0;
        for _ in 0..100 {
            let truth = GroundPlane::new(r.random_range(-0.1..0.1), 1.0, r.random_range(-0.3..0.3), -r.random_range(3.0..9.0))
                .expect("valid plane");
            let [a, b, c, d] = truth.coefficients();
            let sample = |r: &mut rand_chacha::ChaCha8Rng, noise: f64| {
                let x = r.random_range(-20.0..20.0);
                let z = r.random_range(5.0..60.0);
                let y = -(a * x + c * z + d) / b;
                Vec3::new(x, y, z) + truth.normal().scale(noise * gaussian(r))
            };
            let exact: Vec<Vec3> = (0..50).map(|_| sample(&mut r, 0.0)).collect();
            worst_exact = worst_exact.max(fit_plane(&exact).expect("non-degenerate").max_coefficient_diff(&truth));
            let noisy: Vec<Vec3> = (0..200).map(|_| sample(&mut r, 0.01)).collect();
            let fit = fit_plane(&noisy).expect("non-degenerate");
            if fit.normal_angle(&truth).to_degrees() <= 0.5 {
                within += 1;
            }
        }
        (
            worst_exact <= 1e-9 && within >= 95,
            format!("exact points: max coefficient diff {worst_exact:.1e} (limit 1e-9); noisy: {within}/100 normals within 0.5 deg (need 95)"),
        )
    })
}

fn provenance_samples(scene: &roadside_eval::synth::Scene, noise: &NoiseModel, seed: u64) -> Vec<TpSample<f64>> {
    let p = perturb(scene, noise, seed);
    let mut out = Vec::new();
    for f in &scene.frames {
        for (d, src) in p.detections[&f.frame_id].iter().zip(&p.sources[&f.frame_id]) {
            if let Some(i) = src {
                let gt = f.annotations[*i].box3d.expect("sources point at 3D labels");
                out.push(TpSample { predicted: d.box3d, ground_truth: gt, plane: f.calibration.plane });
            }
        }
    }
    out
}

/// Criterion 7: Measured similarity responds to injected noise as expected.
pub fn noise_response(scale: Scale) -> Outcome {
    let frames = if scale == Scale::Full { 1000 } else { 200 };
    timed(7, "noise response of AOS and ACS", move || {
        let quiet = NoiseModel { drop_probability: 0.0, clutter_rate: 0.0, ..NoiseModel::zero() };
        let scene = generate_scene(&SceneConfig { frames: 450, seed: 7, ..SceneConfig::default() }).expect("valid config");
        let yaw = NoiseModel { yaw_sigma: 0.1, ..quiet };
        let samples = provenance_samples(&scene, &yaw, 70);
        let n = samples.len().min(10_000);
        let aos = samples[..n].iter().map(|s| orientation_similarity(s.predicted.yaw - s.ground_truth.yaw)).sum::<f64>() / n as f64;
        let want = integrate::expected_orientation_similarity(0.1);
        let aos_ok = n == 10_000 && (aos - want).abs() <= 0.005;

        let scene = generate_scene(&SceneConfig { frames, seed: 8, ..SceneConfig::default() }).expect("valid config");
        let sigmas = [0.1, 0.5, 1.0, 2.0];
        let acs: Vec<f64> = sigmas
            .iter()
            .map(|s| {
                let samples = provenance_samples(&scene, &NoiseModel { center_sigma: *s, ..quiet }, 71);
                samples.iter().map(center_similarity).sum::<f64>() / samples.len() as f64
            })
            .collect();
        let strictly = acs.windows(2).all(|w| w[1] < w[0]);
        (
            aos_ok && strictly,
            format!(
                "AOS {aos:.5} vs expected {want:.5} over {n} pairs (limit 0.005); mean ACS over {frames} frames at sigma {sigmas:?}: {:?}",
                acs.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>()
            ),
        )
    })
}

/// Criterion 8: Generated car lengths follow the configured size statistics.
pub fn size_statistics() -> Outcome {
    timed(8, "synthetic car length statistics", || {
        let scene = generate_scene(&SceneConfig { frames: 450, seed: 8, ..SceneConfig::cars_only() }).expect("valid config");
        let lengths: Vec<f64> = scene
            .frames
            .iter()
            .flat_map(|f| f.annotations.iter().filter_map(|a| a.box3d.map(|b| b.length)))
            .take(10_000)
            .collect();
        let mean = lengths.iter().sum::<f64>() / lengths.len() as f64;
        (
            lengths.len() == 10_000 && (mean - 4.247).abs() <= 0.01,
            format!("{} cars, mean length {mean:.4} m (target 4.247 +- 0.01)", lengths.len()),
        )
    })
}

fn fuzz_input(r: &mut rand_chacha::ChaCha8Rng) -> Vec<u8> {
    const ALPHABET: &[u8] = b"0123456789 .-e\n:\tcarP2g[]=\"inf_ab,";
    let len = r.random_range(0..160);
    (0..len)
        .map(|_| if r.random_bool(0.8) { ALPHABET[r.random_range(0..ALPHABET.len())] } else { r.random() })
        .collect()
}

fn structured(e: &ParseError) -> bool {
    match e.location() {
        Some((line, column)) => line >= 1 && column >= 1,
        None => matches!(e, ParseError::MissingSection(_)),
    }
}

fn random_box3d(r: &mut rand_chacha::ChaCha8Rng) -> Box3D {
    Box3D::new(
        Vec3::new(dyadic(r, -30.0, 30.0), dyadic(r, -3.0, 8.0), dyadic(r, 1.0, 150.0)),
        dyadic(r, 0.25, 12.0),
        dyadic(r, 0.25, 3.0),
        dyadic(r, 0.25, 4.0),
        dyadic(r, -3.0, 3.0),
    )
    .expect("valid box")
}

fn random_box2d(r: &mut rand_chacha::ChaCha8Rng) -> Box2D {
    let (x, y) = (dyadic(r, 0.0, 1800.0), dyadic(r, 0.0, 1000.0));
    Box2D::new(x, y, x + dyadic(r, 0.0, 100.0), y + dyadic(r, 0.0, 80.0)).expect("ordered")
}

fn random_category(r: &mut rand_chacha::ChaCha8Rng) -> Category {
    Category::ALL[r.random_range(0..Category::ALL.len())]
}

fn round_trips(r: &mut rand_chacha::ChaCha8Rng) -> Result<(), String> {
    // Ground-truth labels.
    let gts: Vec<Annotation> = (0..r.random_range(0..12))
        .map(|_| {
            let three = r.random_bool(0.8).then(|| random_box3d(r));
            let mut a = Annotation::new("f", random_category(r), r.random_range(0..3), r.random_range(0..3), random_box2d(r), three)
                .expect("valid");
            a.alpha = dyadic(r, -3.0, 3.0);
            a
        })
        .collect();
    let back = parse_ground_truth(&format_ground_truth(&gts), "f").map_err(|e| e.to_string())?;
    if back.records != gts {
        return Err("ground-truth labels changed".into());
    }
    // Predictions.
    let dets: Vec<Detection> = (0..r.random_range(0..12))
        .map(|_| {
            let mut d = Detection::new("f", random_category(r), random_box3d(r), Some(random_box2d(r)), dyadic(r, 0.0, 1.0))
                .expect("valid");
            d.alpha = dyadic(r, -3.0, 3.0);
            d
        })
        .collect();
    let back = parse_predictions(&format_predictions(&dets), "f").map_err(|e| e.to_string())?;
    if back.records != dets {
        return Err("predictions changed".into());
    }
    // Calibration.
    let f = r.random_range(500.0..4000.0);
    let cal = Calibration {
        camera: CameraModel::new(f, f * r.random_range(0.99..1.01), r.random_range(900.0..1000.0), r.random_range(500.0..580.0), 1920, 1080)
            .expect("valid"),
        plane: GroundPlane::new(r.random_range(-0.1..0.1), 1.0, r.random_range(-0.4..0.4), -r.random_range(2.0..10.0)).expect("valid"),
        lidar_to_camera: None,
        gridded: None,
    };
    if parse_calib(&format_calib(&cal)).map_err(|e| e.to_string())? != cal {
        return Err("calibration changed".into());
    }
    // Depth maps.
    let cam = CameraModel::new(f / 20.0, f / 20.0, 16.0, 12.0, 32, 24).expect("valid");
    let map = ground_depth_map(&cam, &cal.plane, r.random_range(20.0..300.0));
    if parse_depth_map(&format_depth_map(&map)).map_err(|e| e.to_string())? != map {
        return Err("depth map changed".into());
    }
    // Configs.
    let mut cfg = EvalConfig { omega_ap: dyadic(r, 1.0, 10.0), recall_positions: r.random_range(1..100), ..EvalConfig::default() };
    cfg.iou_thresholds.retain(|_, _| r.random_bool(0.6));
    if parse_eval_config(&format_eval_config(&cfg)).map_err(|e| e.to_string())? != cfg {
        return Err("config changed".into());
    }
    // Reports: values are quantized once on the first write.
    let mut report = MetricReport::empty(cfg);
    report.meta.frames = r.random_range(0..500);
    for cat in [Category::Car, Category::Pedestrian] {
        for bucket in ["all", "0-30"] {
            let v: Vec<f64> = (0..8).map(|_| r.random::<f64>()).collect();
            report.cells.push(CellReport {
                category: cat,
                iou_threshold: 0.5,
                bucket: bucket.into(),
                num_ground_truth: 10,
                true_positives: 6,
                false_positives: 3,
                false_negatives: 4,
                ap: 100.0 * v[0],
                acs: v[1],
                aos: v[2],
                aas: v[3],
                agd: 3.0 * v[4],
                ags: v[5],
                rope_score: 100.0 * v[6],
                similarity_undefined: false,
                operating_score: Some(v[7]),
                operating_true_positives: 5,
            });
        }
    }
    let once = parse_report(&serialize_report(&report)).map_err(|e| e.to_string())?;
    if parse_report(&serialize_report(&once)).map_err(|e| e.to_string())? != once {
        return Err("report changed".into());
    }
    Ok(())
}

/// Criterion 9: Parsers reject garbage with positioned errors, and every format
/// round-trips.
pub fn format_robustness(scale: Scale) -> Outcome {
    let (fuzz, trips) = if scale == Scale::Full { (100_000, 1000) } else { (10_000, 100) };
    timed(9, "parser fuzzing and round trips", move || {
        let mut r = rng(9);
        let mut crashes = 0;
        let mut unstructured = 0;
        for i in 0..fuzz {
            let bytes = fuzz_input(&mut r);
            let result = catch_unwind(|| -> Result<(), ParseError> {
                let text = decode_utf8(&bytes)?;
                match i % 7 {
                    0 => parse_ground_truth(text, "f").map(drop),
                    1 => parse_predictions(text, "f").map(drop),
                    2 => parse_calib(text).map(drop),
                    3 => parse_depth_map(text).map(drop),
                    4 => parse_eval_config(text).map(drop),
                    5 => parse_report(text).map(drop),
                    _ => SceneConfig::from_toml(text).map(drop),
                }
            });
            match result {
                Err(_) => crashes += 1,
                Ok(Err(e)) if !structured(&e) => unstructured += 1,
                _ => {}
            }
        }
        let mut failures = Vec::new();
        for _ in 0..trips {
            if let Err(e) = round_trips(&mut r) {
                failures.push(e);
            }
        }
        (
            crashes == 0 && unstructured == 0 && failures.is_empty(),
            format!(
                "{fuzz} inputs: {crashes} panics, {unstructured} unstructured errors; {trips} round-trip instances: {} failures{}",
                failures.len(),
                failures.first().map(|f| format!(" (first: {f})")).unwrap_or_default()
            ),
        )
    })
}

/// Criteria 1 to 9, in order.
pub fn run_library_criteria(scale: Scale) -> Vec<Outcome> {
    vec![
        metric_identity(),
        rotated_iou_oracle(scale),
        ap_oracle(),
        aos_analytic(),
        ground_depth_closed_form(),
        plane_fit_recovery(),
        noise_response(scale),
        size_statistics(),
        format_robustness(scale),
    ]
}
