use serde::{Deserialize, Serialize};

use super::config::EvalConfig;
use crate::category::Category;

pub const REPORT_FORMAT: &str = "v1";

/// Metrics for one (category, IoU threshold, range bucket) cell.
///
/// `ap` and `rope_score` are percentages; the similarities are in `[0, 1]`
/// and `agd` is in meters. Counts cover every detection, while the
/// similarities are computed on the true positives scored at or above
/// `operating_score`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub category: Category,
    pub iou_threshold: f64,
    pub bucket: String,
    pub num_ground_truth: usize,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub ap: f64,
    pub acs: f64,
    pub aos: f64,
    pub aas: f64,
    pub agd: f64,
    pub ags: f64,
    pub rope_score: f64,
    /// Set when the operating point holds no true positive; the similarities
    /// are then reported as 0.
    pub similarity_undefined: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_score: Option<f64>,
    pub operating_true_positives: usize,
}

impl CellReport {
    /// A cell is populated when it holds at least one ground-truth object.
    pub fn is_populated(&self) -> bool {
        self.num_ground_truth > 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportMeta {
    pub format: String,
    pub devkit_version: String,
    pub frames: usize,
    pub config: EvalConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub meta: ReportMeta,
    #[serde(default)]
    pub cells: Vec<CellReport>,
}

impl MetricReport {
    pub fn empty(config: EvalConfig) -> Self {
        Self {
            meta: ReportMeta {
                format: REPORT_FORMAT.into(),
                devkit_version: env!("CARGO_PKG_VERSION").into(),
                frames: 0,
                config,
            },
            cells: Vec::new(),
        }
    }

    pub fn cell(&self, category: Category, iou_threshold: f64, bucket: &str) -> Option<&CellReport> {
        self.cells
            .iter()
            .find(|c| c.category == category && c.iou_threshold == iou_threshold && c.bucket == bucket)
    }

    /// Fixed-width per-class summary (AP and Rope score per threshold, first
    /// range bucket).
    pub fn summary_table(&self) -> String {
        let mut out = String::new();
        let first_bucket = self.meta.config.range_buckets.first().map(|b| b.name.as_str());
        out.push_str(&format!(
            "{:<18} {:>6} {:>8} {:>8} {:>6} {:>6} {:>6}\n",
            "category", "iou", "AP", "Rope", "GT", "TP", "FP"
        ));
        for c in self.cells.iter().filter(|c| Some(c.bucket.as_str()) == first_bucket) {
            out.push_str(&format!(
                "{:<18} {:>6.2} {:>8.3} {:>8.3} {:>6} {:>6} {:>6}\n",
                c.category.token(),
                c.iou_threshold,
                c.ap,
                c.rope_score,
                c.num_ground_truth,
                c.true_positives,
                c.false_positives
            ));
        }
        out
    }
}
