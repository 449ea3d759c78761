use std::collections::BTreeMap;
use std::fmt::Write;

use super::SynthError;
use crate::category::Category;
use crate::metrics::Annotation;

/// Width of the depth histogram bins, meters.
pub const DEPTH_BIN_WIDTH: f64 = 10.0;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneStatistics {
    pub frames: usize,
    /// Labels per frame (every label has a 2D box).
    pub per_frame_2d: Vec<usize>,
    /// Labels with a 3D box per frame.
    pub per_frame_3d: Vec<usize>,
    pub mean_2d: f64,
    pub mean_3d: f64,
    /// Counts of 3D objects by center depth; bin `i` is `[10 i, 10 (i + 1))`.
    pub depth_histogram: Vec<usize>,
    /// Share of all labels at occlusion level 0, 1, 2.
    pub occlusion_shares: [f64; 3],
    pub truncation_shares: [f64; 3],
    pub per_category: BTreeMap<Category, usize>,
}

pub fn scene_statistics<'a, I>(frames: I) -> Result<SceneStatistics, SynthError>
where
    I: IntoIterator<Item = &'a [Annotation<f64>]>,
{
    let mut s = SceneStatistics {
        frames: 0,
        per_frame_2d: Vec::new(),
        per_frame_3d: Vec::new(),
        mean_2d: 0.0,
        mean_3d: 0.0,
        depth_histogram: Vec::new(),
        occlusion_shares: [0.0; 3],
        truncation_shares: [0.0; 3],
        per_category: BTreeMap::new(),
    };
    let mut occ = [0usize; 3];
    let mut trunc = [0usize; 3];
    for frame in frames {
        s.frames += 1;
        s.per_frame_2d.push(frame.len());
        s.per_frame_3d.push(frame.iter().filter(|a| a.box3d.is_some()).count());
        for a in frame {
            occ[usize::from(a.occlusion.min(2))] += 1;
            trunc[usize::from(a.truncation.min(2))] += 1;
            *s.per_category.entry(a.category).or_default() += 1;
            if let Some(b) = a.box3d {
                let z = b.center.z;
                if z >= 0.0 && z.is_finite() {
                    let bin = (z / DEPTH_BIN_WIDTH).floor() as usize;
                    if s.depth_histogram.len() <= bin {
                        s.depth_histogram.resize(bin + 1, 0);
                    }
                    s.depth_histogram[bin] += 1;
                }
            }
        }
    }
    if s.frames == 0 {
        return Err(SynthError::EmptyInput);
    }
    let n = s.frames as f64;
    s.mean_2d = s.per_frame_2d.iter().sum::<usize>() as f64 / n;
    s.mean_3d = s.per_frame_3d.iter().sum::<usize>() as f64 / n;
    let labels: usize = s.per_frame_2d.iter().sum();
    if labels > 0 {
        for k in 0..3 {
            s.occlusion_shares[k] = occ[k] as f64 / labels as f64;
            s.truncation_shares[k] = trunc[k] as f64 / labels as f64;
        }
    }
    Ok(s)
}

impl SceneStatistics {
    /// Plain-text summary with bar histograms.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "frames: {}", self.frames);
        let _ = writeln!(out, "objects per frame: 2D {:.3}, 3D {:.3}", self.mean_2d, self.mean_3d);
        let total: usize = self.depth_histogram.iter().sum();
        let _ = writeln!(out, "\ndepth distribution of 3D objects:");
        let peak = self.depth_histogram.iter().copied().max().unwrap_or(0).max(1);
        for (i, c) in self.depth_histogram.iter().enumerate() {
            let lo = i as f64 * DEPTH_BIN_WIDTH;
            let bar = "#".repeat(c * 40 / peak);
            let share = if total > 0 { *c as f64 / total as f64 } else { 0.0 };
            let _ = writeln!(out, "{:>4}-{:<4} {:>7} {:>6.3} {bar}", lo, lo + DEPTH_BIN_WIDTH, c, share);
        }
        let _ = writeln!(out, "\nocclusion shares: {:.3} {:.3} {:.3}", self.occlusion_shares[0], self.occlusion_shares[1], self.occlusion_shares[2]);
        let _ = writeln!(out, "truncation shares: {:.3} {:.3} {:.3}", self.truncation_shares[0], self.truncation_shares[1], self.truncation_shares[2]);
        let _ = writeln!(out, "\nper category:");
        for (cat, n) in &self.per_category {
            let _ = writeln!(out, "{:<18} {:>7}", cat.token(), n);
        }
        out
    }
}
