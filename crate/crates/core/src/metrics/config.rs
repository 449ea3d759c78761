use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::similarity::{AgsNormalizer, OMEGA_AP, OMEGA_SIMILARITY};
use super::MetricsError;
use crate::category::{Category, CategoryGroup};

/// A half-open depth interval `[z_min, z_max)` on the ground-truth center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeBucket {
    pub name: String,
    pub z_min: f64,
    pub z_max: f64,
}

impl RangeBucket {
    pub fn new(name: impl Into<String>, z_min: f64, z_max: f64) -> Self {
        Self { name: name.into(), z_min, z_max }
    }

    pub fn contains(&self, z: f64) -> bool {
        z >= self.z_min && z < self.z_max
    }
}

/// How the per-cell operating point for the similarity metrics is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatingPoint {
    /// Score cutoff with the highest F1 on the cell's PR sweep.
    #[default]
    MaxF1,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalConfig {
    /// Evaluated categories and their 3D IoU thresholds.
    pub iou_thresholds: BTreeMap<Category, Vec<f64>>,
    pub range_buckets: Vec<RangeBucket>,
    pub omega_ap: f64,
    pub omega_similarity: f64,
    pub recall_positions: usize,
    pub ags_normalizer: AgsNormalizer,
    pub operating_point: OperatingPoint,
    /// 2D IoU at which an unmatched detection counts as covered by an
    /// image-only label.
    pub ignore_iou_2d: f64,
}

/// Default thresholds per category group: `{0.5, 0.7}` for motor vehicles,
/// `{0.25, 0.5}` for non-motor vehicles and pedestrians.
pub fn default_thresholds(group: CategoryGroup) -> Option<Vec<f64>> {
    match group {
        CategoryGroup::MotorVehicle => Some(vec![0.5, 0.7]),
        CategoryGroup::NonMotorVehicle | CategoryGroup::Pedestrian => Some(vec![0.25, 0.5]),
        CategoryGroup::Other => None,
    }
}

impl Default for EvalConfig {
    fn default() -> Self {
        let iou_thresholds = Category::ALL
            .iter()
            .filter_map(|c| default_thresholds(c.group()).map(|t| (*c, t)))
            .collect();
        Self {
            iou_thresholds,
            range_buckets: vec![
                RangeBucket::new("all", 0.0, f64::INFINITY),
                RangeBucket::new("0-30", 0.0, 30.0),
                RangeBucket::new("30-60", 30.0, 60.0),
                RangeBucket::new("60-90", 60.0, 90.0),
                RangeBucket::new("90-120", 90.0, 120.0),
            ],
            omega_ap: OMEGA_AP,
            omega_similarity: OMEGA_SIMILARITY,
            recall_positions: super::ap::R40,
            ags_normalizer: AgsNormalizer::Predicted,
            operating_point: OperatingPoint::MaxF1,
            ignore_iou_2d: super::matching::IGNORE_IOU_2D,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<(), MetricsError> {
        let bad = |m: String| Err(MetricsError::InvalidConfig(m));
        for (cat, ts) in &self.iou_thresholds {
            if ts.is_empty() {
                return bad(format!("{cat}: empty threshold list"));
            }
            if let Some(t) = ts.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
                return bad(format!("{cat}: threshold {t} outside (0, 1]"));
            }
        }
        if !(self.omega_ap > 0.0 && self.omega_similarity > 0.0) {
            return bad("weights must be positive".into());
        }
        if self.recall_positions == 0 {
            return bad("recall_positions must be positive".into());
        }
        if !(self.ignore_iou_2d > 0.0 && self.ignore_iou_2d <= 1.0) {
            return bad("ignore_iou_2d outside (0, 1]".into());
        }
        for b in &self.range_buckets {
            if b.z_min.is_nan() || b.z_max.is_nan() || b.z_min >= b.z_max {
                return bad(format!("range bucket {}: empty interval", b.name));
            }
        }
        let mut names: Vec<_> = self.range_buckets.iter().map(|b| &b.name).collect();
        names.sort();
        if names.windows(2).any(|w| w[0] == w[1]) {
            return bad("duplicate range bucket names".into());
        }
        Ok(())
    }
}
