use serde::{Deserialize, Serialize};

const SQRT_5: f64 = 2.236_067_977_499_79;

/// Matérn 5/2 hyperparameters with one length scale per input dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelParams {
    /// sigma_f^2, in target units squared.
    pub signal_variance: f64,
    pub length_scales: Vec<f64>,
    /// sigma_n^2, in target units squared.
    pub noise_variance: f64,
}

impl KernelParams {
    pub fn isotropic(
        dim: usize,
        length_scale: f64,
        signal_variance: f64,
        noise_variance: f64,
    ) -> Self {
        Self {
            signal_variance,
            length_scales: vec![length_scale; dim],
            noise_variance,
        }
    }

    pub fn dim(&self) -> usize {
        self.length_scales.len()
    }

    pub fn is_valid(&self) -> bool {
        let pos = |v: f64| v > 0.0 && v.is_finite();
        pos(self.signal_variance)
            && pos(self.noise_variance)
            && !self.length_scales.is_empty()
            && self.length_scales.iter().all(|&l| pos(l))
    }
}

/// Scaled distance `r = sqrt(sum_d ((x_d - y_d) / l_d)^2)`.
pub fn scaled_distance(x: &[f64], y: &[f64], length_scales: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), length_scales.len());
    debug_assert_eq!(y.len(), length_scales.len());
    x.iter()
        .zip(y)
        .zip(length_scales)
        .map(|((a, b), l)| ((a - b) / l).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Matérn 5/2 correlation as a function of the scaled distance.
pub fn matern52_of_r(r: f64) -> f64 {
    let s = SQRT_5 * r;
    (1.0 + s + s * s / 3.0) * (-s).exp()
}

/// `sigma_f^2 (1 + sqrt(5) r + 5/3 r^2) exp(-sqrt(5) r)`.
pub fn matern52(x: &[f64], y: &[f64], params: &KernelParams) -> f64 {
    params.signal_variance * matern52_of_r(scaled_distance(x, y, &params.length_scales))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_distance_gives_signal_variance() {
        let p = KernelParams::isotropic(10, 0.7, 2.5, 1e-3);
        let x = [0.3; 10];
        assert_eq!(matern52(&x, &x, &p), 2.5);
    }

    #[test]
    fn decays_at_large_distance() {
        assert!(matern52_of_r(50.0) < 1e-15);
    }

    #[test]
    fn unit_distance_value() {
        // (1 + sqrt5 + 5/3) e^{-sqrt5}, evaluated independently in extended precision.
        let expected = 0.523_994_108_831_820_3;
        let mut x = [0.0; 10];
        x[3] = 1.0;
        let p = KernelParams::isotropic(10, 1.0, 1.0, 1e-6);
        let k = matern52(&x, &[0.0; 10], &p);
        assert!((k - expected).abs() < 1e-15, "{k}");
    }

    proptest::proptest! {
        #[test]
        fn symmetric(
            x in proptest::collection::vec(-3.0f64..3.0, 10),
            y in proptest::collection::vec(-3.0f64..3.0, 10),
            l in proptest::collection::vec(0.05f64..20.0, 10),
        ) {
            let p = KernelParams { signal_variance: 1.3, length_scales: l, noise_variance: 1e-4 };
            proptest::prop_assert_eq!(matern52(&x, &y, &p).to_bits(), matern52(&y, &x, &p).to_bits());
        }
    }
}
