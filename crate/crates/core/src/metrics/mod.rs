//! Matching, AP|R40, the ground-aware similarity metrics and the combined
//! Rope score, reported per category, IoU threshold and depth range.

mod ap;
mod config;
mod evaluate;
mod iou;
mod matching;
mod report;
mod similarity;
mod types;

use thiserror::Error;

pub use ap::{ap_r40, average_precision, PrCurve, PrSample, R40};
pub use config::{default_thresholds, EvalConfig, OperatingPoint, RangeBucket};
pub use evaluate::{evaluate, FrameAnnotations, FrameDetections, FramePlanes};
pub use iou::{bev_intersection_area, iou_3d, rotated_iou_bev};
pub use matching::{match_frame, MatchSet, IGNORE_IOU_2D};
pub use report::{CellReport, MetricReport, ReportMeta, REPORT_FORMAT};
pub use similarity::{
    aas, acs, agd_ags, aos, area_similarity, center_similarity, ground_vertex_distance, orientation_similarity,
    rope_score, rope_score_weighted, AgsNormalizer, TpSample, OMEGA_AP, OMEGA_SIMILARITY,
};
pub use types::{Annotation, Detection};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("no true positives to average over")]
    EmptyTruePositives,
    #[error("frame mismatch: expected {expected}, found {found}")]
    FrameMismatch { expected: String, found: String },
    #[error("no ground plane for frame {0}")]
    MissingPlane(String),
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
    #[error("{0}")]
    Invalid(String),
}
