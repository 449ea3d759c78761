//! AP by sweeping every score cutoff and recounting from scratch.

/// Recall and precision of the detections scoring at or above each distinct
/// score, computed independently per cutoff.
pub fn sweep(scored: &[(f64, bool)], num_gt: usize) -> Vec<(f64, usize, usize, f64, f64)> {
    let mut cutoffs: Vec<f64> = scored.iter().map(|s| s.0).collect();
    cutoffs.sort_by(|a, b| b.total_cmp(a));
    cutoffs.dedup();
    cutoffs
        .into_iter()
        .map(|c| {
            let tp = scored.iter().filter(|s| s.0 >= c && s.1).count();
            let fp = scored.iter().filter(|s| s.0 >= c && !s.1).count();
            let recall = if num_gt == 0 { 0.0 } else { tp as f64 / num_gt as f64 };
            (c, tp, fp, recall, tp as f64 / (tp + fp) as f64)
        })
        .collect()
}

/// Interpolated AP in percent over recall levels `k / positions`.
pub fn average_precision(scored: &[(f64, bool)], num_gt: usize, positions: usize) -> f64 {
    if num_gt == 0 || positions == 0 {
        return 0.0;
    }
    let pts = sweep(scored, num_gt);
    let mut total = 0.0;
    for k in 1..=positions {
        let level = k as f64 / positions as f64;
        let best = pts.iter().filter(|p| p.3 >= level).map(|p| p.4).fold(0.0, f64::max);
        total += best;
    }
    total / positions as f64 * 100.0
}

/// Cutoff maximizing `2 TP / (2 TP + FP + FN)`, highest cutoff on ties.
pub fn max_f1_cutoff(scored: &[(f64, bool)], num_gt: usize) -> Option<f64> {
    let mut best: Option<(f64, usize, usize)> = None;
    for (c, tp, fp, _, _) in sweep(scored, num_gt) {
        if tp == 0 {
            continue;
        }
        let (num, den) = (2 * tp, 2 * tp + fp + (num_gt - tp));
        match best {
            Some((_, bn, bd)) if num * bd <= bn * den => {}
            _ => best = Some((c, num, den)),
        }
    }
    best.map(|b| b.0)
}
