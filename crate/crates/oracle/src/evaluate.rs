//! Single-pass reference evaluator producing the same report layout as the
//! toolkit.

use roadside_eval::metrics::{CellReport, FrameAnnotations, FrameDetections, FramePlanes, MetricReport};
use roadside_eval::{Box3D, EvalConfig, GroundPlane};

use crate::ap::{average_precision, max_f1_cutoff};
use crate::iou::footprint;
use crate::matching::{greedy, Outcome};

fn project(p: [f64; 3], plane: &GroundPlane) -> [f64; 3] {
    let [a, b, c, d] = plane.coefficients();
    let s = (a * p[0] + b * p[1] + c * p[2] + d) / (a * a + b * b + c * c);
    [p[0] - s * a, p[1] - s * b, p[2] - s * c]
}

fn dist(p: [f64; 3], q: [f64; 3]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt()
}

fn norm(p: [f64; 3]) -> f64 {
    dist(p, [0.0; 3])
}

fn gc(b: &Box3D, plane: &GroundPlane) -> [f64; 3] {
    project([b.center.x, b.center.y, b.center.z], plane)
}

fn bottom(b: &Box3D) -> [[f64; 3]; 4] {
    footprint(b).map(|[x, z]| [x, b.center.y + 0.5 * b.height, z])
}

/// Mean corner distance minimized over cyclic relabelings.
pub fn ground_vertex_distance(p: &Box3D, g: &Box3D) -> f64 {
    let (pc, gc) = (bottom(p), bottom(g));
    (0..4)
        .map(|s| (0..4).map(|k| dist(gc[k], pc[(k + s) % 4])).sum::<f64>() / 4.0)
        .fold(f64::INFINITY, f64::min)
}

/// `[acs, aos, aas, ags]` terms and the vertex distance of one pair.
pub fn similarity_terms(p: &Box3D, g: &Box3D, plane: &GroundPlane, ags_on_gt: bool) -> ([f64; 4], f64) {
    let (gp, gg) = (gc(p, plane), gc(g, plane));
    let acs = 1.0 - (dist(gp, gg) / norm(gg)).min(1.0);
    let dyaw = (p.yaw - g.yaw).abs() % std::f64::consts::PI;
    let aos = 0.5 * (1.0 + (2.0 * dyaw).cos());
    let (ap, ag) = (p.length * p.width, g.length * g.width);
    let aas = 1.0 - ((ap - ag).abs() / ag).min(1.0);
    let agd = ground_vertex_distance(p, g);
    let anchor = if ags_on_gt { gg } else { gp };
    let ags = 1.0 - (agd / norm(anchor)).min(1.0);
    ([acs, aos, aas, ags], agd)
}

struct Tp {
    score: f64,
    gt_depth: f64,
    terms: [f64; 4],
    agd: f64,
}

pub fn evaluate(gts: &FrameAnnotations<f64>, dets: &FrameDetections<f64>, planes: &FramePlanes<f64>, cfg: &EvalConfig) -> MetricReport {
    let mut report = MetricReport::empty(cfg.clone());
    report.meta.frames = gts.len();
    let ags_on_gt = cfg.ags_normalizer == roadside_eval::metrics::AgsNormalizer::GroundTruth;
    for (category, list) in &cfg.iou_thresholds {
        let mut thresholds = list.clone();
        thresholds.sort_by(f64::total_cmp);
        thresholds.dedup();
        for t in thresholds {
            let mut tps: Vec<Tp> = Vec::new();
            let mut fps: Vec<(f64, f64)> = Vec::new();
            let mut gt_depths: Vec<f64> = Vec::new();
            for (frame, frame_gts) in gts {
                let empty = Vec::new();
                let frame_dets = dets.get(frame).unwrap_or(&empty);
                let plane = &planes[frame];
                gt_depths.extend(frame_gts.iter().filter(|g| g.category == *category).filter_map(|g| g.box3d.map(|b| b.center.z)));
                for (di, o) in greedy(frame_dets, frame_gts, *category, t, cfg.ignore_iou_2d).into_iter().enumerate() {
                    let d = &frame_dets[di];
                    match o {
                        Some(Outcome::Matched(gi)) => {
                            let g = frame_gts[gi].box3d.unwrap();
                            let (terms, agd) = similarity_terms(&d.box3d, &g, plane, ags_on_gt);
                            tps.push(Tp { score: d.score, gt_depth: g.center.z, terms, agd });
                        }
                        Some(Outcome::Unmatched) => fps.push((d.score, d.box3d.center.z)),
                        _ => {}
                    }
                }
            }
            for bucket in &cfg.range_buckets {
                let inside = |z: f64| z >= bucket.z_min && z < bucket.z_max;
                let n = gt_depths.iter().filter(|z| inside(**z)).count();
                let tp: Vec<&Tp> = tps.iter().filter(|x| inside(x.gt_depth)).collect();
                let fp: Vec<f64> = fps.iter().filter(|x| inside(x.1)).map(|x| x.0).collect();
                let scored: Vec<(f64, bool)> =
                    tp.iter().map(|x| (x.score, true)).chain(fp.iter().map(|s| (*s, false))).collect();
                let ap = average_precision(&scored, n, cfg.recall_positions);
                let cut = max_f1_cutoff(&scored, n);
                let kept: Vec<&&Tp> = tp.iter().filter(|x| cut.is_some_and(|c| x.score >= c)).collect();
                let k = kept.len() as f64;
                let (sims, agd) = if kept.is_empty() {
                    ([0.0; 4], 0.0)
                } else {
                    let mut s = [0.0; 4];
                    for (i, v) in s.iter_mut().enumerate() {
                        *v = kept.iter().map(|x| x.terms[i]).sum::<f64>() / k;
                    }
                    (s, kept.iter().map(|x| x.agd).sum::<f64>() / k)
                };
                let s_pct = 100.0 * (sims[0] + sims[1] + sims[2] + sims[3]) / 4.0;
                let rope = (cfg.omega_ap * ap + cfg.omega_similarity * s_pct) / (cfg.omega_ap + cfg.omega_similarity);
                report.cells.push(CellReport {
                    category: *category,
                    iou_threshold: t,
                    bucket: bucket.name.clone(),
                    num_ground_truth: n,
                    true_positives: tp.len(),
                    false_positives: fp.len(),
                    false_negatives: n - tp.len(),
                    ap,
                    acs: sims[0],
                    aos: sims[1],
                    aas: sims[2],
                    agd,
                    ags: sims[3],
                    rope_score: rope,
                    similarity_undefined: kept.is_empty(),
                    operating_score: cut,
                    operating_true_positives: kept.len(),
                });
            }
        }
    }
    report
}

/// Largest absolute difference over all numeric fields, or `None` when the
/// reports differ structurally (cell keys, counts, flags).
pub fn max_field_difference(a: &MetricReport, b: &MetricReport) -> Option<f64> {
    if a.cells.len() != b.cells.len() || a.meta.frames != b.meta.frames {
        return None;
    }
    let mut worst = 0.0f64;
    for (x, y) in a.cells.iter().zip(&b.cells) {
        let same = x.category == y.category
            && x.iou_threshold == y.iou_threshold
            && x.bucket == y.bucket
            && x.num_ground_truth == y.num_ground_truth
            && x.true_positives == y.true_positives
            && x.false_positives == y.false_positives
            && x.false_negatives == y.false_negatives
            && x.similarity_undefined == y.similarity_undefined
            && x.operating_true_positives == y.operating_true_positives
            && x.operating_score.is_some() == y.operating_score.is_some();
        if !same {
            return None;
        }
        let pairs = [
            (x.ap, y.ap),
            (x.acs, y.acs),
            (x.aos, y.aos),
            (x.aas, y.aas),
            (x.agd, y.agd),
            (x.ags, y.ags),
            (x.rope_score, y.rope_score),
            (x.operating_score.unwrap_or(0.0), y.operating_score.unwrap_or(0.0)),
        ];
        for (p, q) in pairs {
            worst = worst.max((p - q).abs());
        }
    }
    Some(worst)
}
