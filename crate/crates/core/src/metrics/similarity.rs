//! Ground-aware similarity metrics over true-positive pairs, and the
//! combined Rope score.

use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::geometry::{ground_center, ground_corners, Box3D, GroundPlane};
use crate::scalar::Scalar;

/// A matched prediction/ground-truth pair with the ground plane of its frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TpSample<T> {
    pub predicted: Box3D<T>,
    pub ground_truth: Box3D<T>,
    pub plane: GroundPlane<T>,
}

/// Which ground-center norm divides the vertex distance in AGS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgsNormalizer {
    /// Norm of the predicted ground center.
    #[default]
    Predicted,
    GroundTruth,
}

/// `1 - min(1, |pred_gc - gt_gc| / |gt_gc|)` with ground centers from
/// [`ground_center`].
pub fn center_similarity<T: Scalar>(s: &TpSample<T>) -> T {
    let gt = ground_center(&s.ground_truth, &s.plane);
    let pred = ground_center(&s.predicted, &s.plane);
    T::one() - (pred.distance(gt) / gt.norm()).min(T::one())
}

/// `(1 + cos 2 dtheta) / 2`; heading flips by pi are not penalized.
pub fn orientation_similarity<T: Scalar>(delta_yaw: T) -> T {
    let folded = delta_yaw.abs() % T::PI();
    (T::one() + (folded + folded).cos()) / T::lit(2.0)
}

/// `1 - min(1, |pred_area - gt_area| / gt_area)` on footprints `L * W`.
pub fn area_similarity<T: Scalar>(predicted: &Box3D<T>, ground_truth: &Box3D<T>) -> T {
    let gt = ground_truth.footprint_area();
    T::one() - ((predicted.footprint_area() - gt).abs() / gt).min(T::one())
}

/// Mean distance between the four ground vertices of the two boxes, under
/// the cyclic relabeling of the predicted vertices that minimizes it.
/// Returns the distance and the chosen shift (predicted index `g + shift`
/// pairs with ground-truth index `g`).
pub fn ground_vertex_distance<T: Scalar>(predicted: &Box3D<T>, ground_truth: &Box3D<T>) -> (T, usize) {
    let gt = ground_corners(ground_truth);
    let pred = ground_corners(predicted);
    let mut best = (T::infinity(), 0);
    for shift in 0..4 {
        let mean = (0..4).map(|g| gt[g].distance(pred[(g + shift) % 4])).sum::<T>() / T::lit(4.0);
        if mean < best.0 {
            best = (mean, shift);
        }
    }
    best
}

fn mean_of<T: Scalar>(samples: &[TpSample<T>], term: impl Fn(&TpSample<T>) -> T) -> Result<T, MetricsError> {
    if samples.is_empty() {
        return Err(MetricsError::EmptyTruePositives);
    }
    Ok(samples.iter().map(term).sum::<T>() / T::lit(samples.len() as f64))
}

/// Average ground-center similarity.
pub fn acs<T: Scalar>(samples: &[TpSample<T>]) -> Result<T, MetricsError> {
    mean_of(samples, center_similarity)
}

/// Average orientation similarity.
pub fn aos<T: Scalar>(samples: &[TpSample<T>]) -> Result<T, MetricsError> {
    mean_of(samples, |s| orientation_similarity(s.predicted.yaw - s.ground_truth.yaw))
}

/// Average area similarity.
pub fn aas<T: Scalar>(samples: &[TpSample<T>]) -> Result<T, MetricsError> {
    mean_of(samples, |s| area_similarity(&s.predicted, &s.ground_truth))
}

/// Average ground-vertex distance (meters) and ground-vertex similarity.
pub fn agd_ags<T: Scalar>(samples: &[TpSample<T>], normalizer: AgsNormalizer) -> Result<(T, T), MetricsError> {
    let agd = mean_of(samples, |s| ground_vertex_distance(&s.predicted, &s.ground_truth).0)?;
    let ags = mean_of(samples, |s| {
        let (dist, _) = ground_vertex_distance(&s.predicted, &s.ground_truth);
        let anchor = match normalizer {
            AgsNormalizer::Predicted => &s.predicted,
            AgsNormalizer::GroundTruth => &s.ground_truth,
        };
        T::one() - (dist / ground_center(anchor, &s.plane).norm()).min(T::one())
    })?;
    Ok((agd, ags))
}

pub const OMEGA_AP: f64 = 8.0;
pub const OMEGA_SIMILARITY: f64 = 2.0;

/// `(w_ap * AP + w_s * S) / (w_ap + w_s)` with `S` the mean of the four
/// similarities expressed in percent. `ap` is already in percent.
pub fn rope_score_weighted<T: Scalar>(ap: T, similarities: [T; 4], omega_ap: T, omega_similarity: T) -> T {
    let s = similarities.iter().copied().sum::<T>() / T::lit(4.0) * T::lit(100.0);
    (omega_ap * ap + omega_similarity * s) / (omega_ap + omega_similarity)
}

/// Rope score with the standard weights 8 (AP) and 2 (similarities).
pub fn rope_score<T: Scalar>(ap: T, acs: T, aos: T, aas: T, ags: T) -> T {
    rope_score_weighted(ap, [acs, aos, aas, ags], T::lit(OMEGA_AP), T::lit(OMEGA_SIMILARITY))
}
