use super::brent::{brent, BrentError};
use super::sherwood;
use super::{
    FluidProperties, HydroState, PhysicalFluxBreakdown, PhysicsConfig, PhysicsError, GAS_CONSTANT,
    MAX_EXPONENT, WATER_DENSITY, WATER_VISCOSITY,
};
use crate::data::{Feature, OperatingPoint};

/// Lower end of the flux bracket (m/s).
const BRACKET_LO: f64 = 1e-12;
/// The bracket's upper end is this multiple of the ideal flux `A * Pi_Db`.
const BRACKET_HI_FACTOR: f64 = 1.01;

pub fn structural_parameter(t_psl: f64, tau: f64, eps_psl: f64) -> Result<f64, PhysicsError> {
    if !(eps_psl > 0.0 && eps_psl <= 1.0) {
        return Err(PhysicsError::Domain(format!(
            "porosity must lie in (0, 1], got {eps_psl}"
        )));
    }
    if !(t_psl > 0.0) || !(tau >= 1.0) {
        return Err(PhysicsError::Domain(format!(
            "need t_psl > 0 and tau >= 1, got t_psl = {t_psl}, tau = {tau}"
        )));
    }
    Ok(tau * t_psl / eps_psl)
}

fn polynomial(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

pub fn fluid_properties(c: f64, cfg: &PhysicsConfig) -> Result<FluidProperties, PhysicsError> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(PhysicsError::Domain(format!(
            "concentration must be >= 0, got {c}"
        )));
    }
    let corr = cfg.property_correlations.as_ref();
    let eval = |coeffs: Option<&Vec<f64>>, default: f64, property: &'static str| {
        let v = coeffs.map_or(default, |p| polynomial(p, c));
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err(PhysicsError::Correlation {
                property,
                concentration: c,
                value: v,
            })
        }
    };
    let density = eval(
        corr.and_then(|p| p.density.as_ref()),
        WATER_DENSITY,
        "density",
    )?;
    let dynamic_viscosity = eval(
        corr.and_then(|p| p.viscosity.as_ref()),
        WATER_VISCOSITY,
        "viscosity",
    )?;
    let d_s = eval(
        corr.and_then(|p| p.diffusivity.as_ref()),
        cfg.d_s_ref,
        "diffusivity",
    )?;
    let osmotic_pressure = match corr.and_then(|p| p.osmotic_pressure.as_ref()) {
        Some(p) => {
            let v = polynomial(p, c);
            if !(v >= 0.0) || !v.is_finite() {
                return Err(PhysicsError::Correlation {
                    property: "osmotic pressure",
                    concentration: c,
                    value: v,
                });
            }
            v
        }
        // van 't Hoff with c converted to mol/m³
        None => cfg.vant_hoff_i * (c * 1000.0) * GAS_CONSTANT * cfg.temperature,
    };
    Ok(FluidProperties {
        density,
        dynamic_viscosity,
        d_s,
        osmotic_pressure,
    })
}

/// Channel mass-transfer coefficient for an infinitely wide parallel-plate
/// channel of height `t_c` (hydraulic diameter `2 t_c`).
pub fn mass_transfer_coefficient(
    u: f64,
    l_x: f64,
    t_c: f64,
    props: &FluidProperties,
    cfg: &PhysicsConfig,
) -> Result<HydroState, PhysicsError> {
    if !(u > 0.0 && l_x > 0.0 && t_c > 0.0) {
        return Err(PhysicsError::Domain(format!(
            "velocity and channel dimensions must be > 0 (u = {u}, L_x = {l_x}, t_c = {t_c})"
        )));
    }
    let correlation = sherwood::resolve(&cfg.sherwood)?;
    let d_h = 2.0 * t_c;
    let re = props.density * u * d_h / props.dynamic_viscosity;
    let sc = props.dynamic_viscosity / (props.density * props.d_s);
    let sh = correlation.sherwood(re, sc, d_h, l_x);
    let k = sh * props.d_s / d_h;
    Ok(HydroState { d_h, re, sc, sh, k })
}

/// The implicit flux equation at one operating point, with all
/// flux-independent quantities evaluated once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxEquation {
    pub a: f64,
    pub b: f64,
    pub pi_d_bulk: f64,
    pub pi_f_bulk: f64,
    pub s: f64,
    /// Draw-solute diffusivity inside the support layer (m²/s).
    pub d_s: f64,
    pub k_feed: f64,
    pub k_draw: Option<f64>,
}

fn check_point(point: &OperatingPoint) -> Result<(), PhysicsError> {
    // A = 0 is admitted here (it yields zero flux) even though datasets reject it.
    let z = point.to_array();
    for f in Feature::ALL {
        let v = z[f.index()];
        let ok = if f == Feature::A {
            v >= 0.0 && v.is_finite()
        } else {
            f.admits(v)
        };
        if !ok {
            return Err(PhysicsError::Domain(format!(
                "feature {f} = {v} out of domain"
            )));
        }
    }
    Ok(())
}

impl FluxEquation {
    pub fn new(point: &OperatingPoint, cfg: &PhysicsConfig) -> Result<Self, PhysicsError> {
        cfg.validate()?;
        check_point(point)?;
        let feed = fluid_properties(point.cf_in, cfg)?;
        let draw = fluid_properties(point.cd_in, cfg)?;
        let k_feed = match cfg.k_feed_override {
            Some(k) => k,
            None => mass_transfer_coefficient(point.uf_in, point.l_x, point.t_c, &feed, cfg)?.k,
        };
        let k_draw = if cfg.draw_side_ecp {
            Some(mass_transfer_coefficient(point.ud_in, point.l_x, point.t_c, &draw, cfg)?.k)
        } else {
            None
        };
        Ok(Self {
            a: point.a,
            b: cfg.b,
            pi_d_bulk: draw.osmotic_pressure,
            pi_f_bulk: feed.osmotic_pressure,
            s: structural_parameter(point.t_psl, point.tau, point.eps_psl)?,
            d_s: draw.d_s,
            k_feed,
            k_draw,
        })
    }

    /// Active-layer osmotic pressure difference `Pi_D,i - Pi_F,m` at flux `jw >= 0`
    /// (the `jw -> 0` limit is taken analytically).
    pub fn driving_pressure(&self, jw: f64) -> Result<f64, PhysicsError> {
        let ecp = jw / self.k_feed;
        if ecp > MAX_EXPONENT {
            return Err(PhysicsError::Overflow { jw, ratio: ecp });
        }
        let icp = -jw * self.s / self.d_s;
        let pi_d = match self.k_draw {
            Some(kd) => self.pi_d_bulk * (-jw / kd).exp(),
            None => self.pi_d_bulk,
        };
        let num = pi_d * icp.exp() - self.pi_f_bulk * ecp.exp();
        let growth = if jw == 0.0 {
            1.0 / self.k_feed + self.s / self.d_s
        } else {
            (ecp.exp_m1() - icp.exp_m1()) / jw
        };
        Ok(num / (1.0 + self.b * growth))
    }

    /// `F(jw) = jw - A (Pi_D,i - Pi_F,m)`.
    pub fn residual(&self, jw: f64) -> Result<f64, PhysicsError> {
        Ok(jw - self.a * self.driving_pressure(jw)?)
    }

    /// `(Pi_D,i, Pi_F,m)` at flux `jw`, including the reverse-solute terms.
    pub fn interface_pressures(&self, jw: f64) -> Result<(f64, f64), PhysicsError> {
        if jw == 0.0 {
            return Ok((self.pi_d_bulk, self.pi_f_bulk));
        }
        let delta = self.driving_pressure(jw)?;
        let ecp = jw / self.k_feed;
        let pi_f_m = self.pi_f_bulk * ecp.exp() + self.b / jw * delta * ecp.exp_m1();
        Ok((pi_f_m + delta, pi_f_m))
    }
}

/// `F(jw)` for a strictly positive trial flux.
pub fn flux_residual(
    jw_trial: f64,
    point: &OperatingPoint,
    cfg: &PhysicsConfig,
) -> Result<f64, PhysicsError> {
    if !(jw_trial > 0.0) || !jw_trial.is_finite() {
        return Err(PhysicsError::Domain(format!(
            "trial flux must be > 0, got {jw_trial}"
        )));
    }
    FluxEquation::new(point, cfg)?.residual(jw_trial)
}

pub fn solve_physical_flux(
    point: &OperatingPoint,
    cfg: &PhysicsConfig,
) -> Result<PhysicalFluxBreakdown, PhysicsError> {
    let eq = FluxEquation::new(point, cfg)?;
    let zero = |eq: &FluxEquation| PhysicalFluxBreakdown {
        jw: 0.0,
        pi_d_bulk: eq.pi_d_bulk,
        pi_f_bulk: eq.pi_f_bulk,
        pi_d_interface: eq.pi_d_bulk,
        pi_f_membrane: eq.pi_f_bulk,
        s: eq.s,
        k_feed: eq.k_feed,
        residual: 0.0,
        iterations: 0,
        zero_driving_force: true,
    };
    if eq.a == 0.0 || eq.pi_d_bulk <= eq.pi_f_bulk {
        return Ok(zero(&eq));
    }

    let hi = eq.a * eq.pi_d_bulk * BRACKET_HI_FACTOR;
    let mut lo = BRACKET_LO.min(0.5 * hi);
    // If even 1e-12 m/s overshoots, the root lies below it; F(0) < 0 always here.
    if eq.residual(lo)? >= 0.0 {
        lo = 0.0;
    }
    let root =
        brent(|j| eq.residual(j), lo, hi, 0.0, cfg.solver_max_iter).map_err(|e| match e {
            BrentError::NoSignChange { lo, hi, f_lo, f_hi } => {
                PhysicsError::Bracket { lo, hi, f_lo, f_hi }
            }
            BrentError::MaxIterations { best } => PhysicsError::Convergence {
                iterations: best.iterations,
                residual: best.fx.abs(),
            },
            BrentError::Eval(e) => e,
        })?;
    let residual = root.fx.abs();
    if residual > cfg.solver_tol {
        return Err(PhysicsError::Convergence {
            iterations: root.iterations,
            residual,
        });
    }
    let (pi_d_interface, pi_f_membrane) = eq.interface_pressures(root.x)?;
    Ok(PhysicalFluxBreakdown {
        jw: root.x,
        pi_d_bulk: eq.pi_d_bulk,
        pi_f_bulk: eq.pi_f_bulk,
        pi_d_interface,
        pi_f_membrane,
        s: eq.s,
        k_feed: eq.k_feed,
        residual,
        iterations: root.iterations,
        zero_driving_force: false,
    })
}
