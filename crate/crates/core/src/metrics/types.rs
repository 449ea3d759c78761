use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::category::Category;
use crate::geometry::{Box2D, Box3D};
use crate::scalar::Scalar;

/// A scored prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Detection<T> {
    pub frame_id: String,
    pub category: Category,
    pub box3d: Box3D<T>,
    pub box2d: Option<Box2D<T>>,
    pub score: T,
    /// Observation angle carried through from label files; unused by the metrics.
    pub alpha: T,
}

/// A ground-truth object. `box3d` is absent for objects labeled only in the
/// image; those act as ignore regions during matching.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation<T> {
    pub frame_id: String,
    pub category: Category,
    pub occlusion: u8,
    pub truncation: u8,
    pub box2d: Box2D<T>,
    pub box3d: Option<Box3D<T>>,
    pub alpha: T,
}

impl<T: Scalar> Detection<T> {
    pub fn new(
        frame_id: impl Into<String>,
        category: Category,
        box3d: Box3D<T>,
        box2d: Option<Box2D<T>>,
        score: T,
    ) -> Result<Self, MetricsError> {
        if !(score >= T::zero() && score <= T::one()) {
            return Err(MetricsError::Invalid(format!("score {score} outside [0, 1]")));
        }
        Ok(Self { frame_id: frame_id.into(), category, box3d, box2d, score, alpha: T::zero() })
    }
}

impl<T: Scalar> Annotation<T> {
    pub fn new(
        frame_id: impl Into<String>,
        category: Category,
        occlusion: u8,
        truncation: u8,
        box2d: Box2D<T>,
        box3d: Option<Box3D<T>>,
    ) -> Result<Self, MetricsError> {
        if occlusion > 2 || truncation > 2 {
            return Err(MetricsError::Invalid(format!(
                "occlusion {occlusion} / truncation {truncation} outside 0..=2"
            )));
        }
        Ok(Self { frame_id: frame_id.into(), category, occlusion, truncation, box2d, box3d, alpha: T::zero() })
    }

    /// Treats this annotation as a perfect detection with score 1.
    /// Returns `None` for image-only labels.
    pub fn as_detection(&self) -> Option<Detection<T>> {
        Some(Detection {
            frame_id: self.frame_id.clone(),
            category: self.category,
            box3d: self.box3d?,
            box2d: Some(self.box2d),
            score: T::one(),
            alpha: self.alpha,
        })
    }
}
