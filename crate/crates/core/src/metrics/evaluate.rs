use std::collections::BTreeMap;

use rayon::prelude::*;

use super::ap::{average_precision, PrCurve};
use super::config::{EvalConfig, RangeBucket};
use super::matching::match_frame_with;
use super::report::{CellReport, MetricReport};
use super::similarity::{aas, acs, agd_ags, aos, rope_score_weighted, TpSample};
use super::types::{Annotation, Detection};
use super::MetricsError;
use crate::category::Category;
use crate::geometry::GroundPlane;
use crate::scalar::Scalar;

/// Ground truth per frame id.
pub type FrameAnnotations<T> = BTreeMap<String, Vec<Annotation<T>>>;
/// Detections per frame id; frames may be missing (no detections).
pub type FrameDetections<T> = BTreeMap<String, Vec<Detection<T>>>;
/// Ground plane per frame id.
pub type FramePlanes<T> = BTreeMap<String, GroundPlane<T>>;

#[derive(Debug, Clone, Copy)]
enum Status<T> {
    TruePositive { gt_depth: T, sample: TpSample<T> },
    FalsePositive,
    Ignored,
}

#[derive(Debug, Clone, Copy)]
struct Entry<T> {
    score: T,
    depth: T,
    status: Status<T>,
}

/// Matching results of one frame for one (category, threshold).
struct FrameOutcome<T> {
    entries: Vec<Entry<T>>,
    /// Depths of every ground-truth object with a 3D box in this category.
    gt_depths: Vec<T>,
}

fn check_frames<T: Scalar>(
    gts: &FrameAnnotations<T>,
    dets: &FrameDetections<T>,
    planes: &FramePlanes<T>,
) -> Result<(), MetricsError> {
    for (frame, list) in dets {
        if !gts.contains_key(frame) {
            return Err(MetricsError::FrameMismatch {
                expected: "a frame present in the ground truth".into(),
                found: frame.clone(),
            });
        }
        if let Some(d) = list.iter().find(|d| &d.frame_id != frame) {
            return Err(MetricsError::FrameMismatch { expected: frame.clone(), found: d.frame_id.clone() });
        }
    }
    for (frame, list) in gts {
        if !planes.contains_key(frame) {
            return Err(MetricsError::MissingPlane(frame.clone()));
        }
        if let Some(g) = list.iter().find(|g| &g.frame_id != frame) {
            return Err(MetricsError::FrameMismatch { expected: frame.clone(), found: g.frame_id.clone() });
        }
    }
    Ok(())
}

fn match_one<T: Scalar>(
    gts: &[Annotation<T>],
    dets: &[Detection<T>],
    plane: &GroundPlane<T>,
    category: Category,
    threshold: T,
    ignore_iou_2d: T,
) -> Result<FrameOutcome<T>, MetricsError> {
    let m = match_frame_with(dets, gts, category, threshold, ignore_iou_2d)?;
    let mut entries = Vec::with_capacity(m.true_positives.len() + m.false_positives.len() + m.ignored.len());
    for &(di, gi) in &m.true_positives {
        let gt_box = gts[gi].box3d.expect("matched annotations carry a 3D box");
        let sample = TpSample { predicted: dets[di].box3d, ground_truth: gt_box, plane: *plane };
        entries.push((di, Status::TruePositive { gt_depth: gt_box.center.z, sample }));
    }
    entries.extend(m.false_positives.iter().map(|&di| (di, Status::FalsePositive)));
    entries.extend(m.ignored.iter().map(|&di| (di, Status::Ignored)));
    // detection input order keeps accumulation independent of match order
    entries.sort_by_key(|(di, _)| *di);
    let entries = entries
        .into_iter()
        .map(|(di, status)| Entry { score: dets[di].score, depth: dets[di].box3d.center.z, status })
        .collect();
    let gt_depths = gts
        .iter()
        .filter(|g| g.category == category)
        .filter_map(|g| g.box3d.map(|b| b.center.z))
        .collect();
    Ok(FrameOutcome { entries, gt_depths })
}

fn score_cell<T: Scalar>(
    outcomes: &[FrameOutcome<T>],
    bucket: &RangeBucket,
    category: Category,
    threshold: f64,
    cfg: &EvalConfig,
) -> Result<CellReport, MetricsError> {
    let inside = |z: T| bucket.contains(z.as_f64());
    let mut scored = Vec::new();
    let mut samples = Vec::new();
    let mut num_gt = 0usize;
    for frame in outcomes {
        num_gt += frame.gt_depths.iter().filter(|z| inside(**z)).count();
        for e in &frame.entries {
            match e.status {
                Status::TruePositive { gt_depth, sample } if inside(gt_depth) => {
                    scored.push((e.score, true));
                    samples.push((e.score, sample));
                }
                Status::FalsePositive if inside(e.depth) => scored.push((e.score, false)),
                _ => {}
            }
        }
    }
    let tp = samples.len();
    let fp = scored.len() - tp;
    let curve = PrCurve::from_scored(&scored, num_gt);
    let ap = average_precision(&curve, cfg.recall_positions);

    let operating = curve.max_f1().map(|s| s.score);
    let at_operating: Vec<TpSample<T>> = match operating {
        Some(cut) => samples.iter().filter(|(s, _)| *s >= cut).map(|(_, x)| *x).collect(),
        None => Vec::new(),
    };
    let (sims, agd, undefined) = if at_operating.is_empty() {
        ([T::zero(); 4], T::zero(), true)
    } else {
        let (agd, ags) = agd_ags(&at_operating, cfg.ags_normalizer)?;
        ([acs(&at_operating)?, aos(&at_operating)?, aas(&at_operating)?, ags], agd, false)
    };
    let rope = rope_score_weighted(ap, sims, T::lit(cfg.omega_ap), T::lit(cfg.omega_similarity));
    Ok(CellReport {
        category,
        iou_threshold: threshold,
        bucket: bucket.name.clone(),
        num_ground_truth: num_gt,
        true_positives: tp,
        false_positives: fp,
        false_negatives: num_gt - tp,
        ap: ap.as_f64(),
        acs: sims[0].as_f64(),
        aos: sims[1].as_f64(),
        aas: sims[2].as_f64(),
        agd: agd.as_f64(),
        ags: sims[3].as_f64(),
        rope_score: rope.as_f64(),
        similarity_undefined: undefined,
        operating_score: operating.map(|s| s.as_f64()),
        operating_true_positives: at_operating.len(),
    })
}

/// Full evaluation over all frames.
///
/// For each configured category and IoU threshold every frame is matched
/// once. Each range bucket then keeps the true positives and false negatives
/// whose ground-truth center depth falls inside it and the false positives
/// whose own center depth does; everything else is ignored for that bucket,
/// so TP/FP/FN counts add up across a partition of depth. AP comes from the
/// PR sweep over all frames; the similarity metrics are averaged over the
/// true positives at the max-F1 score cutoff.
pub fn evaluate<T: Scalar>(
    gts: &FrameAnnotations<T>,
    dets: &FrameDetections<T>,
    planes: &FramePlanes<T>,
    cfg: &EvalConfig,
) -> Result<MetricReport, MetricsError> {
    cfg.validate()?;
    check_frames(gts, dets, planes)?;
    let frames: Vec<(&String, &Vec<Annotation<T>>)> = gts.iter().collect();
    let mut report = MetricReport::empty(cfg.clone());
    report.meta.frames = frames.len();

    for (&category, thresholds) in &cfg.iou_thresholds {
        let mut thresholds = thresholds.clone();
        thresholds.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        thresholds.dedup();
        for threshold in thresholds {
            let outcomes = frames
                .par_iter()
                .map(|(frame, frame_gts)| {
                    let frame_dets = dets.get(*frame).map(Vec::as_slice).unwrap_or(&[]);
                    match_one(
                        frame_gts,
                        frame_dets,
                        &planes[*frame],
                        category,
                        T::lit(threshold),
                        T::lit(cfg.ignore_iou_2d),
                    )
                })
                .collect::<Result<Vec<_>, _>>()?;
            for bucket in &cfg.range_buckets {
                report.cells.push(score_cell(&outcomes, bucket, category, threshold, cfg)?);
            }
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Box2D, Box3D, Vec3};

    fn plane() -> GroundPlane<f64> {
        GroundPlane::new(0.0, 1.0, 0.0, -6.0).unwrap()
    }

    fn annotation(frame: &str, x: f64, z: f64) -> Annotation<f64> {
        let b = Box3D::new(Vec3::new(x, 5.25, z), 4.2, 1.7, 1.5, 0.1).unwrap();
        Annotation::new(frame, Category::Car, 0, 0, Box2D::new(0.0, 0.0, 1.0, 1.0).unwrap(), Some(b)).unwrap()
    }

    fn scene() -> (FrameAnnotations<f64>, FramePlanes<f64>) {
        let mut gts = BTreeMap::new();
        let mut planes = BTreeMap::new();
        for f in 0..4 {
            let id = format!("{f:06}");
            let list = (0..5).map(|i| annotation(&id, i as f64 * 6.0 - 12.0, 15.0 + 25.0 * i as f64)).collect();
            gts.insert(id.clone(), list);
            planes.insert(id, plane());
        }
        (gts, planes)
    }

    fn car_only() -> EvalConfig {
        let mut cfg = EvalConfig::default();
        cfg.iou_thresholds.retain(|c, _| *c == Category::Car);
        cfg
    }

    #[test]
    fn identity_gives_perfect_scores() {
        let (gts, planes) = scene();
        let dets: FrameDetections<f64> = gts
            .iter()
            .map(|(k, v)| (k.clone(), v.iter().filter_map(Annotation::as_detection).collect()))
            .collect();
        let r = evaluate(&gts, &dets, &planes, &car_only()).unwrap();
        assert_eq!(r.cells.len(), 2 * 5);
        for c in r.cells.iter().filter(|c| c.is_populated()) {
            assert_eq!(c.ap, 100.0);
            assert_eq!((c.acs, c.aos, c.aas, c.ags, c.agd), (1.0, 1.0, 1.0, 1.0, 0.0));
            assert_eq!(c.rope_score, 100.0);
        }
    }

    #[test]
    fn no_detections() {
        let (gts, planes) = scene();
        let r = evaluate(&gts, &BTreeMap::new(), &planes, &car_only()).unwrap();
        for c in &r.cells {
            assert_eq!(c.ap, 0.0);
            assert!(c.similarity_undefined);
            assert_eq!(c.rope_score, 0.0);
            assert_eq!(c.false_negatives, c.num_ground_truth);
        }
    }

    #[test]
    fn errors() {
        let (gts, mut planes) = scene();
        let mut dets = BTreeMap::new();
        dets.insert("nope".to_string(), vec![]);
        assert!(matches!(evaluate(&gts, &dets, &planes, &car_only()), Err(MetricsError::FrameMismatch { .. })));
        planes.remove("000001");
        assert!(matches!(
            evaluate(&gts, &BTreeMap::new(), &planes, &car_only()),
            Err(MetricsError::MissingPlane(f)) if f == "000001"
        ));
    }

    #[test]
    fn bucket_counts_partition_all() {
        let (gts, planes) = scene();
        let mut dets: FrameDetections<f64> = BTreeMap::new();
        for (k, v) in &gts {
            let mut list: Vec<Detection<f64>> = v.iter().skip(1).filter_map(Annotation::as_detection).collect();
            for d in list.iter_mut() {
                d.box3d.center.x += 0.4;
                d.score = 0.5 + d.box3d.center.z / 1000.0;
            }
            let mut clutter = list[0].clone();
            clutter.box3d.center.x += 30.0;
            clutter.score = 0.2;
            list.push(clutter);
            dets.insert(k.clone(), list);
        }
        let mut cfg = car_only();
        cfg.range_buckets = vec![
            RangeBucket::new("all", 0.0, f64::INFINITY),
            RangeBucket::new("near", 0.0, 50.0),
            RangeBucket::new("far", 50.0, f64::INFINITY),
        ];
        let r = evaluate(&gts, &dets, &planes, &cfg).unwrap();
        for t in [0.5, 0.7] {
            let all = r.cell(Category::Car, t, "all").unwrap();
            let near = r.cell(Category::Car, t, "near").unwrap();
            let far = r.cell(Category::Car, t, "far").unwrap();
            assert_eq!(all.true_positives, near.true_positives + far.true_positives);
            assert_eq!(all.false_positives, near.false_positives + far.false_positives);
            assert_eq!(all.false_negatives, near.false_negatives + far.false_negatives);
            assert!(all.false_negatives >= 4);
        }
    }
}
