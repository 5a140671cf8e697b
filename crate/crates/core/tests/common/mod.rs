#![allow(dead_code)]

use fohybrid::data::{Feature, FeatureRanges, OperatingPoint, N_FEATURES};
use fohybrid::physics::FluxEquation;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Uniform points over the default synthetic ranges.
pub fn random_points(n: usize, seed: u64) -> Vec<OperatingPoint> {
    let ranges = FeatureRanges::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let z: [f64; N_FEATURES] = std::array::from_fn(|i| {
                let [lo, hi] = ranges.get(Feature::ALL[i]);
                rng.random_range(lo..=hi)
            });
            OperatingPoint::from_array(&z)
        })
        .collect()
}

/// Right-hand side `A (Pi_D,i - Pi_F,m)` written out directly from the
/// transport equation, for use as an independent check.
pub fn flux_rhs(eq: &FluxEquation, jw: f64) -> f64 {
    let icp = (-jw * eq.s / eq.d_s).exp();
    let ecp = (jw / eq.k_feed).exp();
    let draw = eq.k_draw.map_or(1.0, |kd| (-jw / kd).exp());
    let num = eq.pi_d_bulk * draw * icp - eq.pi_f_bulk * ecp;
    let den = 1.0 + eq.b / jw * (ecp - icp);
    eq.a * num / den
}

/// Damped fixed-point iteration `j <- j + w (G(j) - j)` with the damping
/// `w = 1 / (1 - G'(j))` refreshed from a secant slope every step.
pub fn fixed_point_flux(eq: &FluxEquation) -> f64 {
    let mut j = 0.5 * eq.a * (eq.pi_d_bulk - eq.pi_f_bulk);
    let mut prev: Option<(f64, f64)> = None;
    for _ in 0..10_000 {
        let g = flux_rhs(eq, j);
        let slope = match prev {
            Some((jp, gp)) if j != jp => (g - gp) / (j - jp),
            _ => 0.0,
        };
        let w = (1.0 / (1.0 - slope)).clamp(0.05, 1.0);
        let next = j + w * (g - j);
        prev = Some((j, g));
        if (next - j).abs() <= 1e-17 * j.abs() {
            return next;
        }
        j = next;
    }
    j
}
