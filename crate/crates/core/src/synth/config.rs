use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::category::Category;
use crate::io::ParseError;

/// Mean and standard deviation of `[length, height, width]` in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SizePrior {
    pub mean: [f64; 3],
    pub std: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraRanges {
    /// Mounting height above the ground, meters.
    pub height: [f64; 2],
    /// Downward tilt, radians.
    pub pitch: [f64; 2],
    /// Focal length in pixels (`fx = fy`).
    pub focal: [f64; 2],
    pub image_width: u32,
    pub image_height: u32,
}

impl Default for CameraRanges {
    fn default() -> Self {
        Self {
            height: [4.0, 8.0],
            pitch: [5.0 * PI / 180.0, 25.0 * PI / 180.0],
            focal: [2100.0, 2800.0],
            image_width: 1920,
            image_height: 1080,
        }
    }
}

/// Normal distribution of object depth along the optical axis, truncated to
/// `range` and to the nearest ground visible in the image.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DepthPrior {
    pub mean: f64,
    pub std: f64,
    pub range: [f64; 2],
}

impl Default for DepthPrior {
    fn default() -> Self {
        Self { mean: 70.0, std: 25.0, range: [10.0, 140.0] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SceneConfig {
    pub seed: u64,
    pub frames: usize,
    pub camera: CameraRanges,
    /// Poisson mean of objects with a 3D box per frame.
    pub objects_per_frame: f64,
    /// Poisson mean of additional image-only labels per frame.
    pub image_only_per_frame: f64,
    pub depth: DepthPrior,
    pub category_weights: BTreeMap<Category, f64>,
    pub sizes: BTreeMap<Category, SizePrior>,
}

fn prior(mean: [f64; 3], std: [f64; 3]) -> SizePrior {
    SizePrior { mean, std }
}

/// Size statistics per class. Barrow and the static classes are
/// placeholders; the rest are measured dataset statistics.
pub(crate) fn default_sizes() -> BTreeMap<Category, SizePrior> {
    use Category::*;
    BTreeMap::from([
        (Car, prior([4.247, 1.325, 1.706], [0.315, 0.258, 0.234])),
        (Truck, prior([7.122, 2.623, 1.706], [2.067, 0.628, 0.492])),
        (Van, prior([4.651, 1.750, 1.757], [0.429, 0.311, 0.268])),
        (Bus, prior([10.575, 3.009, 2.533], [1.806, 0.404, 0.426])),
        (Pedestrian, prior([0.478, 1.610, 0.501], [0.178, 0.160, 0.143])),
        (Cyclist, prior([1.525, 1.382, 0.505], [0.264, 0.280, 0.217])),
        (Tricyclist, prior([2.631, 1.539, 1.077], [0.497, 0.196, 0.292])),
        (Motorcyclist, prior([1.692, 1.418, 0.613], [0.276, 0.175, 0.211])),
        (Barrow, prior([1.2, 1.0, 0.6], [0.2, 0.15, 0.1])),
        (TrafficCone, prior([0.4, 0.7, 0.4], [0.05, 0.1, 0.05])),
        (TrianglePlate, prior([0.5, 0.45, 0.15], [0.05, 0.05, 0.03])),
        (UnknownMovable, prior([1.0, 1.0, 1.0], [0.3, 0.3, 0.3])),
        (UnknownUnmovable, prior([1.0, 1.0, 1.0], [0.3, 0.3, 0.3])),
    ])
}

impl Default for SceneConfig {
    fn default() -> Self {
        use Category::*;
        Self {
            seed: 0,
            frames: 100,
            camera: CameraRanges::default(),
            objects_per_frame: 24.0,
            image_only_per_frame: 10.0,
            depth: DepthPrior::default(),
            category_weights: BTreeMap::from([
                (Car, 0.55),
                (Van, 0.08),
                (Truck, 0.06),
                (Bus, 0.04),
                (Pedestrian, 0.12),
                (Cyclist, 0.06),
                (Motorcyclist, 0.05),
                (Tricyclist, 0.03),
                (Barrow, 0.01),
            ]),
            sizes: default_sizes(),
        }
    }
}

fn range_ok(r: [f64; 2]) -> bool {
    r[0].is_finite() && r[1].is_finite() && r[0] <= r[1]
}

impl SceneConfig {
    /// A config producing only cars, with the measured car size statistics.
    pub fn cars_only() -> Self {
        Self { category_weights: BTreeMap::from([(Category::Car, 1.0)]), ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::Config(m.to_string()));
        let c = &self.camera;
        if !(range_ok(c.height) && c.height[0] > 0.0) {
            return bad("camera height range must be positive and ordered");
        }
        if !(range_ok(c.pitch) && c.pitch[0] >= 0.0 && c.pitch[1] < PI / 2.0) {
            return bad("pitch range must lie in [0, pi/2)");
        }
        if !(range_ok(c.focal) && c.focal[0] > 0.0) {
            return bad("focal range must be positive and ordered");
        }
        if c.image_width == 0 || c.image_height == 0 {
            return bad("image size must be positive");
        }
        let d = &self.depth;
        if !(range_ok(d.range) && d.range[0] > 0.0 && d.std >= 0.0 && d.mean.is_finite()) {
            return bad("depth prior needs a positive ordered range and std >= 0");
        }
        for v in [self.objects_per_frame, self.image_only_per_frame] {
            if !(v.is_finite() && v >= 0.0) {
                return bad("object rates must be finite and non-negative");
            }
        }
        if self.frames >= 1 << 32 {
            return bad("too many frames");
        }
        let total: f64 = self.category_weights.values().sum();
        if self.category_weights.values().any(|w| w.is_nan() || *w < 0.0) || (total - 1.0).abs() > 1e-9 {
            return bad("category weights must be non-negative and sum to 1");
        }
        for (cat, w) in &self.category_weights {
            if *w == 0.0 {
                continue;
            }
            let Some(s) = self.sizes.get(cat) else {
                return Err(SynthError::Config(format!("no size prior for {cat}")));
            };
            if s.mean.iter().any(|m| !(m.is_finite() && *m > 0.0)) || s.std.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(SynthError::Config(format!("size prior for {cat} needs positive means and stds >= 0")));
            }
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, ParseError> {
        let cfg: Self = toml::from_str(text).map_err(|e| crate::io::toml_error(text, &e))?;
        cfg.validate().map_err(|e| ParseError::Syntax { line: 1, column: 1, reason: e.to_string() })?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scene config serializes to TOML")
    }
}

/// Per-object detector noise. Noise draws are made for every object
/// regardless of the sigmas, so runs with different sigmas share their
/// underlying random numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseModel {
    /// Isotropic center noise, meters.
    pub center_sigma: f64,
    /// Additional center noise per meter of depth.
    pub center_sigma_per_meter: f64,
    pub yaw_sigma: f64,
    /// Relative size noise: each dimension is scaled by `1 + N(0, size_sigma)`.
    pub size_sigma: f64,
    pub drop_probability: f64,
    /// Poisson mean of spurious boxes per frame.
    pub clutter_rate: f64,
    /// Clutter scores are uniform on `[0, clutter_max_score)`.
    pub clutter_max_score: f64,
    /// Score is `exp(-error / score_scale)` where error sums the center
    /// offset in meters, the absolute yaw error and the relative size errors.
    pub score_scale: f64,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            center_sigma: 0.1,
            center_sigma_per_meter: 0.002,
            yaw_sigma: 0.1,
            size_sigma: 0.03,
            drop_probability: 0.1,
            clutter_rate: 2.0,
            clutter_max_score: 0.3,
            score_scale: 2.0,
        }
    }
}

impl NoiseModel {
    pub fn zero() -> Self {
        Self {
            center_sigma: 0.0,
            center_sigma_per_meter: 0.0,
            yaw_sigma: 0.0,
            size_sigma: 0.0,
            drop_probability: 0.0,
            clutter_rate: 0.0,
            clutter_max_score: 0.0,
            score_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let sigmas = [self.center_sigma, self.center_sigma_per_meter, self.yaw_sigma, self.size_sigma, self.clutter_rate];
        if sigmas.iter().any(|s| !(s.is_finite() && *s >= 0.0)) {
            return Err(SynthError::Config("sigmas and rates must be finite and >= 0".into()));
        }
        for p in [self.drop_probability, self.clutter_max_score] {
            if !(0.0..=1.0).contains(&p) {
                return Err(SynthError::Config("probabilities and scores must lie in [0, 1]".into()));
            }
        }
        if !(self.score_scale.is_finite() && self.score_scale > 0.0) {
            return Err(SynthError::Config("score_scale must be positive".into()));
        }
        Ok(())
    }

    pub fn from_toml(text: &str) -> Result<Self, ParseError> {
        let n: Self = toml::from_str(text).map_err(|e| crate::io::toml_error(text, &e))?;
        n.validate().map_err(|e| ParseError::Syntax { line: 1, column: 1, reason: e.to_string() })?;
        Ok(n)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("noise model serializes to TOML")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid_and_round_trip() {
        let c = SceneConfig::default();
        c.validate().unwrap();
        assert_eq!(SceneConfig::from_toml(&c.to_toml()).unwrap(), c);
        let n = NoiseModel::default();
        assert_eq!(NoiseModel::from_toml(&n.to_toml()).unwrap(), n);
        NoiseModel::zero().validate().unwrap();
    }

    #[test]
    fn partial_toml() {
        let c = SceneConfig::from_toml("seed = 9\nframes = 3\n[camera]\nheight = [5.0, 5.0]\n").unwrap();
        assert_eq!((c.seed, c.frames, c.camera.height), (9, 3, [5.0, 5.0]));
        assert_eq!(c.camera.focal, CameraRanges::default().focal);
    }

    #[test]
    fn invalid_configs() {
        let mut c = SceneConfig::default();
        c.category_weights.insert(Category::Car, 0.6);
        assert!(c.validate().is_err());
        let mut c = SceneConfig::default();
        c.camera.height = [8.0, 4.0];
        assert!(c.validate().is_err());
        let mut c = SceneConfig::cars_only();
        c.sizes.get_mut(&Category::Car).unwrap().std[0] = -1.0;
        assert!(c.validate().is_err());
        assert!(SceneConfig::from_toml("colour = 3\n").unwrap_err().location().is_some());
        let n = NoiseModel { drop_probability: 1.5, ..NoiseModel::zero() };
        assert!(n.validate().is_err());
    }
}
