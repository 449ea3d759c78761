use super::iou::iou_3d;
use super::types::{Annotation, Detection};
use super::MetricsError;
use crate::category::Category;
use crate::scalar::Scalar;

/// 2D IoU above which an unmatched detection falls inside an image-only
/// label and is ignored.
pub const IGNORE_IOU_2D: f64 = 0.5;

/// Outcome of matching one frame. All indices refer to the input slices.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MatchSet {
    /// `(detection, annotation)` pairs.
    pub true_positives: Vec<(usize, usize)>,
    pub false_positives: Vec<usize>,
    /// Annotations with a 3D box that no detection claimed.
    pub false_negatives: Vec<usize>,
    /// Detections covered by an image-only annotation.
    pub ignored: Vec<usize>,
}

/// Indices of `dets` of the given category, by descending score; equal
/// scores keep input order.
pub(crate) fn score_order<T: Scalar>(dets: &[Detection<T>], category: Category) -> Vec<usize> {
    let mut order: Vec<usize> = (0..dets.len()).filter(|&i| dets[i].category == category).collect();
    order.sort_by(|&a, &b| dets[b].score.partial_cmp(&dets[a].score).unwrap_or(std::cmp::Ordering::Equal));
    order
}

/// Greedy matching by confidence with single-use ground truth.
///
/// Detections are visited by descending score and claim the unmatched
/// annotation with the highest 3D IoU at or above `iou_threshold`; IoU ties
/// go to the earlier annotation. A detection that claims nothing but
/// overlaps an image-only annotation by 2D IoU >= 0.5 is ignored. Items of
/// other categories are skipped.
pub fn match_frame<T: Scalar>(
    dets: &[Detection<T>],
    gts: &[Annotation<T>],
    category: Category,
    iou_threshold: T,
) -> Result<MatchSet, MetricsError> {
    match_frame_with(dets, gts, category, iou_threshold, T::lit(IGNORE_IOU_2D))
}

pub(crate) fn match_frame_with<T: Scalar>(
    dets: &[Detection<T>],
    gts: &[Annotation<T>],
    category: Category,
    iou_threshold: T,
    ignore_iou_2d: T,
) -> Result<MatchSet, MetricsError> {
    let frame = dets.first().map(|d| &d.frame_id).or_else(|| gts.first().map(|g| &g.frame_id));
    if let Some(frame) = frame {
        let stray = dets.iter().map(|d| &d.frame_id).chain(gts.iter().map(|g| &g.frame_id)).find(|f| *f != frame);
        if let Some(found) = stray {
            return Err(MetricsError::FrameMismatch { expected: frame.clone(), found: found.clone() });
        }
    }

    let mut claimed = vec![false; gts.len()];
    let mut out = MatchSet::default();
    for di in score_order(dets, category) {
        let det = &dets[di];
        let mut best: Option<(usize, T)> = None;
        for (gi, gt) in gts.iter().enumerate() {
            if claimed[gi] || gt.category != category {
                continue;
            }
            let Some(gt_box) = &gt.box3d else { continue };
            let iou = iou_3d(&det.box3d, gt_box);
            if iou >= iou_threshold && best.is_none_or(|(_, b)| iou > b) {
                best = Some((gi, iou));
            }
        }
        if let Some((gi, _)) = best {
            claimed[gi] = true;
            out.true_positives.push((di, gi));
            continue;
        }
        let covered = det.box2d.is_some_and(|b2| {
            gts.iter()
                .any(|g| g.category == category && g.box3d.is_none() && g.box2d.iou(&b2) >= ignore_iou_2d)
        });
        if covered {
            out.ignored.push(di);
        } else {
            out.false_positives.push(di);
        }
    }
    out.false_negatives = (0..gts.len())
        .filter(|&gi| !claimed[gi] && gts[gi].category == category && gts[gi].box3d.is_some())
        .collect();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Box2D, Box3D, Vec3};

    fn gt(x: f64, z: f64) -> Annotation<f64> {
        let b = Box3D::new(Vec3::new(x, 1.0, z), 4.0, 2.0, 1.5, 0.0).unwrap();
        Annotation::new("f", Category::Car, 0, 0, Box2D::new(0.0, 0.0, 10.0, 10.0).unwrap(), Some(b)).unwrap()
    }

    fn det(x: f64, z: f64, score: f64) -> Detection<f64> {
        let b = Box3D::new(Vec3::new(x, 1.0, z), 4.0, 2.0, 1.5, 0.0).unwrap();
        Detection::new("f", Category::Car, b, Some(Box2D::new(100.0, 100.0, 120.0, 120.0).unwrap()), score).unwrap()
    }

    #[test]
    fn exact_match() {
        let m = match_frame(&[det(0.0, 20.0, 0.9)], &[gt(0.0, 20.0)], Category::Car, 0.7).unwrap();
        assert_eq!(m.true_positives, vec![(0, 0)]);
        assert!(m.false_positives.is_empty() && m.false_negatives.is_empty());
    }

    #[test]
    fn no_detections() {
        let m = match_frame::<f64>(&[], &[gt(0.0, 20.0)], Category::Car, 0.7).unwrap();
        assert_eq!(m.false_negatives, vec![0]);
    }

    #[test]
    fn higher_score_claims_first() {
        // both detections overlap the single GT; the more confident one wins
        let dets = [det(0.3, 20.0, 0.5), det(0.6, 20.0, 0.8)];
        let m = match_frame(&dets, &[gt(0.0, 20.0)], Category::Car, 0.5).unwrap();
        assert_eq!(m.true_positives, vec![(1, 0)]);
        assert_eq!(m.false_positives, vec![0]);
    }

    #[test]
    fn equal_scores_follow_input_order() {
        let dets = [det(0.6, 20.0, 0.5), det(0.3, 20.0, 0.5)];
        let m = match_frame(&dets, &[gt(0.0, 20.0)], Category::Car, 0.5).unwrap();
        assert_eq!(m.true_positives, vec![(0, 0)]);
    }

    #[test]
    fn image_only_labels_are_ignore_regions() {
        let mut ignore = gt(50.0, 90.0);
        ignore.box3d = None;
        ignore.box2d = Box2D::new(101.0, 100.0, 121.0, 120.0).unwrap();
        let m = match_frame(&[det(-30.0, 60.0, 0.4)], &[gt(0.0, 20.0), ignore], Category::Car, 0.5).unwrap();
        assert_eq!(m.ignored, vec![0]);
        assert!(m.false_positives.is_empty());
        assert_eq!(m.false_negatives, vec![0]);
    }

    #[test]
    fn other_categories_are_skipped() {
        let mut ped = gt(0.0, 20.0);
        ped.category = Category::Pedestrian;
        let m = match_frame(&[det(0.0, 20.0, 0.9)], &[ped], Category::Car, 0.5).unwrap();
        assert_eq!(m.false_positives, vec![0]);
        assert!(m.false_negatives.is_empty());
    }

    #[test]
    fn frame_mismatch() {
        let mut d = det(0.0, 20.0, 0.9);
        d.frame_id = "other".into();
        assert!(matches!(
            match_frame(&[d], &[gt(0.0, 20.0)], Category::Car, 0.5),
            Err(MetricsError::FrameMismatch { .. })
        ));
    }
}
