//! Precision/recall sweeps and interpolated average precision.

use crate::scalar::Scalar;

/// Number of recall positions used by AP|R40.
pub const R40: usize = 40;

/// One point of the sweep: everything scored at or above `score`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrSample<T> {
    pub score: T,
    pub true_positives: usize,
    pub false_positives: usize,
    pub recall: T,
    pub precision: T,
}

/// Precision/recall pairs at every distinct score cutoff, highest cutoff
/// first, so recall is nondecreasing along `samples`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrCurve<T> {
    pub samples: Vec<PrSample<T>>,
    pub num_ground_truth: usize,
}

impl<T: Scalar> PrCurve<T> {
    /// Builds the sweep from `(score, is_true_positive)` pairs.
    pub fn from_scored(scored: &[(T, bool)], num_ground_truth: usize) -> Self {
        let mut sorted = scored.to_vec();
        sorted.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
        let mut samples = Vec::new();
        let (mut tp, mut fp) = (0usize, 0usize);
        let mut i = 0;
        while i < sorted.len() {
            let score = sorted[i].0;
            while i < sorted.len() && sorted[i].0 == score {
                if sorted[i].1 {
                    tp += 1;
                } else {
                    fp += 1;
                }
                i += 1;
            }
            let recall = if num_ground_truth == 0 {
                T::zero()
            } else {
                T::lit(tp as f64) / T::lit(num_ground_truth as f64)
            };
            let precision = T::lit(tp as f64) / T::lit((tp + fp) as f64);
            samples.push(PrSample { score, true_positives: tp, false_positives: fp, recall, precision });
        }
        Self { samples, num_ground_truth }
    }

    /// Sample with the highest F1 among those with at least one true
    /// positive; ties go to the higher score cutoff. F1 is compared exactly
    /// as the fraction `2 TP / (2 TP + FP + FN)`. `None` when no cutoff has
    /// a true positive.
    pub fn max_f1(&self) -> Option<&PrSample<T>> {
        let n = self.num_ground_truth as u128;
        let mut best: Option<(&PrSample<T>, u128, u128)> = None;
        for s in &self.samples {
            if s.true_positives == 0 {
                continue;
            }
            let tp = s.true_positives as u128;
            let num = 2 * tp;
            let den = tp + s.false_positives as u128 + n;
            if best.is_none_or(|(_, bn, bd)| num * bd > bn * den) {
                best = Some((s, num, den));
            }
        }
        best.map(|(s, _, _)| s)
    }
}

pub fn average_precision<T: Scalar>(curve: &PrCurve<T>, positions: usize) -> T {
    if positions == 0 || curve.num_ground_truth == 0 || curve.samples.is_empty() {
        return T::zero();
    }
    // best precision over samples[i..]
    let mut tail_max = vec![T::zero(); curve.samples.len() + 1];
    for i in (0..curve.samples.len()).rev() {
        tail_max[i] = tail_max[i + 1].max(curve.samples[i].precision);
    }
    let n = T::lit(positions as f64);
    let mut first = 0;
    let mut total = T::zero();
    for k in 1..=positions {
        let level = T::lit(k as f64) / n;
        while first < curve.samples.len() && curve.samples[first].recall < level {
            first += 1;
        }
        total = total + tail_max[first];
    }
    total / n * T::lit(100.0)
}

/// AP|R40 in percent.
pub fn ap_r40<T: Scalar>(curve: &PrCurve<T>) -> T {
    average_precision(curve, R40)
}
