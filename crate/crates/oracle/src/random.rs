//! Seeded instance generators for cross-checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use roadside_eval::{Box3D, Vec3};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_box(r: &mut ChaCha8Rng) -> Box3D {
    Box3D::new(
        Vec3::new(r.random_range(-3.0..3.0), r.random_range(-1.0..1.0), r.random_range(10.0..16.0)),
        r.random_range(0.3..8.0),
        r.random_range(0.3..3.0),
        r.random_range(0.5..3.0),
        r.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
    .expect("valid box")
}

/// A box near `a`, so that pairs overlap more often than not.
pub fn nearby_box(r: &mut ChaCha8Rng, a: &Box3D) -> Box3D {
    let reach = 0.5 * (a.length + a.width);
    Box3D::new(
        a.center + Vec3::new(r.random_range(-reach..reach), r.random_range(-0.5..0.5), r.random_range(-reach..reach)),
        r.random_range(0.3..8.0),
        r.random_range(0.3..3.0),
        r.random_range(0.5..3.0),
        r.random_range(-std::f64::consts::PI..std::f64::consts::PI),
    )
    .expect("valid box")
}

/// Standard normal draw by the Box-Muller transform.
pub fn gaussian(r: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - r.random::<f64>();
    let u2: f64 = r.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// A value on the 1/256 grid, so sums and differences stay exact.
pub fn dyadic(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    let k = r.random_range((lo * 256.0).ceil() as i64..=(hi * 256.0).floor() as i64);
    k as f64 / 256.0
}
