//! Sherwood-number correlations for a rectangular flow channel.

use std::sync::{Arc, LazyLock};

use crate::registry::{Registry, UnknownStrategy};

/// Laminar/turbulent switch used by [`AutoByReynolds`].
pub const TRANSITION_REYNOLDS: f64 = 2100.0;

pub trait SherwoodCorrelation: Send + Sync {
    fn name(&self) -> &'static str;
    fn sherwood(&self, re: f64, sc: f64, d_h: f64, l_x: f64) -> f64;
}

/// Lévêque developing-boundary-layer correlation, `1.85 (Re Sc d_h / L)^(1/3)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LaminarLeveque;

impl SherwoodCorrelation for LaminarLeveque {
    fn name(&self) -> &'static str {
        "laminar-leveque"
    }
    fn sherwood(&self, re: f64, sc: f64, d_h: f64, l_x: f64) -> f64 {
        1.85 * (re * sc * d_h / l_x).cbrt()
    }
}

/// Dittus-Boelter type power law, `0.04 Re^0.75 Sc^0.33`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TurbulentPowerLaw;

impl SherwoodCorrelation for TurbulentPowerLaw {
    fn name(&self) -> &'static str {
        "turbulent-power-law"
    }
    fn sherwood(&self, re: f64, sc: f64, _d_h: f64, _l_x: f64) -> f64 {
        0.04 * re.powf(0.75) * sc.powf(0.33)
    }
}

/// Laminar below [`TRANSITION_REYNOLDS`], turbulent at or above it. The two
/// branches are not made continuous at the switch.
#[derive(Debug, Clone, Copy, Default)]
pub struct AutoByReynolds;

impl SherwoodCorrelation for AutoByReynolds {
    fn name(&self) -> &'static str {
        "auto-by-Re"
    }
    fn sherwood(&self, re: f64, sc: f64, d_h: f64, l_x: f64) -> f64 {
        if re < TRANSITION_REYNOLDS {
            LaminarLeveque.sherwood(re, sc, d_h, l_x)
        } else {
            TurbulentPowerLaw.sherwood(re, sc, d_h, l_x)
        }
    }
}

static CORRELATIONS: LazyLock<Registry<dyn SherwoodCorrelation>> = LazyLock::new(|| {
    let mut reg: Registry<dyn SherwoodCorrelation> = Registry::new("sherwood correlation");
    for c in [
        Arc::new(LaminarLeveque) as Arc<dyn SherwoodCorrelation>,
        Arc::new(TurbulentPowerLaw),
        Arc::new(AutoByReynolds),
    ] {
        reg.register(c.name(), c);
    }
    reg
});

/// The built-in correlations, keyed by their config names.
pub fn sherwood_correlations() -> &'static Registry<dyn SherwoodCorrelation> {
    &CORRELATIONS
}

pub fn resolve(name: &str) -> Result<Arc<dyn SherwoodCorrelation>, UnknownStrategy> {
    CORRELATIONS.get(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names() {
        assert_eq!(
            sherwood_correlations().names(),
            vec!["auto-by-Re", "laminar-leveque", "turbulent-power-law"]
        );
        assert!(resolve("dittus").is_err());
    }

    #[test]
    fn auto_switches_at_2100_without_continuity() {
        let auto = resolve("auto-by-Re").unwrap();
        let below = auto.sherwood(2099.999, 600.0, 4e-3, 0.1);
        let at = auto.sherwood(2100.0, 600.0, 4e-3, 0.1);
        assert_eq!(below, LaminarLeveque.sherwood(2099.999, 600.0, 4e-3, 0.1));
        assert_eq!(at, TurbulentPowerLaw.sherwood(2100.0, 600.0, 4e-3, 0.1));
        assert!((below - at).abs() > 1.0);
    }

    #[test]
    fn leveque_cube_root_scaling() {
        let s1 = LaminarLeveque.sherwood(100.0, 600.0, 4e-3, 0.1);
        let s2 = LaminarLeveque.sherwood(200.0, 600.0, 4e-3, 0.1);
        assert!((s2 / s1 - 2f64.cbrt()).abs() < 1e-14);
    }
}
