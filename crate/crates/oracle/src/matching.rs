//! Greedy matching from a precomputed IoU table.

use roadside_eval::{Annotation, Category, Detection};

use crate::iou::iou_3d;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Matched to this annotation index.
    Matched(usize),
    Unmatched,
    /// Unmatched but inside an image-only label of the same class.
    Ignored,
}

/// Per-detection outcome, `None` for detections of other categories.
pub fn greedy(dets: &[Detection], gts: &[Annotation], category: Category, threshold: f64, ignore_2d: f64) -> Vec<Option<Outcome>> {
    let table: Vec<Vec<Option<f64>>> = dets
        .iter()
        .map(|d| {
            gts.iter()
                .map(|g| match g.box3d {
                    Some(b) if g.category == category && d.category == category => Some(iou_3d(&d.box3d, &b)),
                    _ => None,
                })
                .collect()
        })
        .collect();
    let mut order: Vec<usize> = (0..dets.len()).filter(|&i| dets[i].category == category).collect();
    // Insertion sort: stable, descending score.
    for i in 1..order.len() {
        let mut j = i;
        while j > 0 && dets[order[j - 1]].score < dets[order[j]].score {
            order.swap(j - 1, j);
            j -= 1;
        }
    }
    let mut taken = vec![false; gts.len()];
    let mut out = vec![None; dets.len()];
    for di in order {
        let mut pick: Option<usize> = None;
        for gi in 0..gts.len() {
            let Some(v) = table[di][gi] else { continue };
            if taken[gi] || v < threshold {
                continue;
            }
            if pick.is_none() || v > table[di][pick.unwrap()].unwrap() {
                pick = Some(gi);
            }
        }
        out[di] = Some(match pick {
            Some(gi) => {
                taken[gi] = true;
                Outcome::Matched(gi)
            }
            None => {
                let inside = dets[di].box2d.is_some_and(|d2| {
                    gts.iter().any(|g| {
                        if g.category != category || g.box3d.is_some() {
                            return false;
                        }
                        let g2 = g.box2d;
                        let w = (d2.xmax.min(g2.xmax) - d2.xmin.max(g2.xmin)).max(0.0);
                        let h = (d2.ymax.min(g2.ymax) - d2.ymin.max(g2.ymin)).max(0.0);
                        let i = w * h;
                        let u = (d2.xmax - d2.xmin) * (d2.ymax - d2.ymin) + (g2.xmax - g2.xmin) * (g2.ymax - g2.ymin) - i;
                        u > 0.0 && i / u >= ignore_2d
                    })
                });
                if inside {
                    Outcome::Ignored
                } else {
                    Outcome::Unmatched
                }
            }
        });
    }
    out
}
