//! Mechanistic forward-osmosis water flux model.
//!
//! The flux `J_w` solves the implicit transport equation with internal
//! concentration polarization in the porous support (through the structural
//! parameter `S = tau * t_psl / eps_psl`), external concentration polarization
//! on the feed side (through the mass-transfer coefficient `k`) and reverse
//! solute permeation (through `B`):
//!
//! ```text
//! J_w = A * (Pi_Db exp(-J_w S / D_s) - Pi_Fb exp(J_w / k))
//!         / (1 + (B / J_w) (exp(J_w / k) - exp(-J_w S / D_s)))
//! ```
//!
//! It is solved with Brent's method on a bracket bounded above by the ideal
//! membrane flux.

mod brent;
mod flux;
pub mod sherwood;

use serde::{Deserialize, Serialize};

pub use brent::{brent, BrentError, BrentRoot};
pub use flux::{
    fluid_properties, flux_residual, mass_transfer_coefficient, solve_physical_flux,
    structural_parameter, FluxEquation,
};
pub use sherwood::{sherwood_correlations, SherwoodCorrelation};

use crate::registry::UnknownStrategy;

/// Universal gas constant (J/(mol·K)).
pub const GAS_CONSTANT: f64 = 8.314;
/// Density of water at 298.15 K (kg/m³).
pub const WATER_DENSITY: f64 = 997.05;
/// Dynamic viscosity of water at 298.15 K (Pa·s).
pub const WATER_VISCOSITY: f64 = 8.9e-4;
/// Largest admissible `J_w / k` before `exp` is considered to overflow.
pub const MAX_EXPONENT: f64 = 700.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PhysicsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid physics configuration: {0}")]
    Config(String),
    #[error(transparent)]
    UnknownCorrelation(#[from] UnknownStrategy),
    #[error(
        "{property} correlation gives non-positive value {value} at c = {concentration} mol/L"
    )]
    Correlation {
        property: &'static str,
        concentration: f64,
        value: f64,
    },
    #[error("trial flux {jw} m/s is unphysical: J_w/k = {ratio} overflows exp")]
    Overflow { jw: f64, ratio: f64 },
    #[error("no sign change on flux bracket [{lo}, {hi}]: F(lo) = {f_lo}, F(hi) = {f_hi}")]
    Bracket {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("flux solve did not converge after {iterations} iterations (|F| = {residual})")]
    Convergence { iterations: usize, residual: f64 },
}

/// Polynomial coefficients `c0 + c1 c + c2 c² + ...` in the concentration
/// (mol/L). Any property left `None` uses the reference-water default.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PropertyCorrelations {
    /// kg/m³
    pub density: Option<Vec<f64>>,
    /// Pa·s
    pub viscosity: Option<Vec<f64>>,
    /// m²/s
    pub diffusivity: Option<Vec<f64>>,
    /// Pa
    pub osmotic_pressure: Option<Vec<f64>>,
}

/// Membrane, solution and solver constants that are not input features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsConfig {
    /// Salt permeability coefficient B (m/s).
    pub b: f64,
    /// Absolute temperature (K).
    pub temperature: f64,
    pub vant_hoff_i: f64,
    /// Solute diffusivity at `temperature` (m²/s).
    pub d_s_ref: f64,
    pub property_correlations: Option<PropertyCorrelations>,
    /// Registered name of the Sherwood correlation.
    pub sherwood: String,
    /// Fixed feed-side mass-transfer coefficient (m/s) bypassing the correlation.
    pub k_feed_override: Option<f64>,
    /// Adds dilutive external polarization on the draw side, `exp(-J_w / k_draw)`.
    pub draw_side_ecp: bool,
    /// Absolute residual tolerance on the flux equation (m/s).
    pub solver_tol: f64,
    pub solver_max_iter: usize,
}

impl Default for PhysicsConfig {
    /// NaCl at 298.15 K.
    fn default() -> Self {
        Self {
            b: 1e-7,
            temperature: 298.15,
            vant_hoff_i: 2.0,
            d_s_ref: 1.49e-9,
            property_correlations: None,
            sherwood: "auto-by-Re".into(),
            k_feed_override: None,
            draw_side_ecp: false,
            solver_tol: 1e-14,
            solver_max_iter: 200,
        }
    }
}

impl PhysicsConfig {
    pub fn validate(&self) -> Result<(), PhysicsError> {
        let bad = |what: &str| Err(PhysicsError::Config(what.to_string()));
        if !(self.b >= 0.0) || !self.b.is_finite() {
            return bad("B must be >= 0");
        }
        if !(self.temperature > 0.0) {
            return bad("temperature must be > 0");
        }
        if !(self.vant_hoff_i >= 1.0) {
            return bad("van 't Hoff factor must be >= 1");
        }
        if !(self.d_s_ref > 0.0) {
            return bad("reference diffusivity must be > 0");
        }
        if !(self.solver_tol > 0.0) {
            return bad("solver_tol must be > 0");
        }
        if self.solver_max_iter == 0 {
            return bad("solver_max_iter must be > 0");
        }
        if let Some(k) = self.k_feed_override {
            if !(k > 0.0) || !k.is_finite() {
                return bad("k_feed_override must be > 0");
            }
        }
        sherwood::resolve(&self.sherwood)?;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluidProperties {
    /// kg/m³
    pub density: f64,
    /// Pa·s
    pub dynamic_viscosity: f64,
    /// m²/s
    pub d_s: f64,
    /// Pa
    pub osmotic_pressure: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroState {
    pub d_h: f64,
    pub re: f64,
    pub sc: f64,
    pub sh: f64,
    /// Mass-transfer coefficient (m/s).
    pub k: f64,
}

/// Solved flux with the osmotic pressures on both sides of the active layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalFluxBreakdown {
    /// Water flux (m/s).
    pub jw: f64,
    pub pi_d_bulk: f64,
    pub pi_f_bulk: f64,
    /// Draw osmotic pressure at the active/support interface, after ICP.
    pub pi_d_interface: f64,
    /// Feed osmotic pressure at the membrane surface, after ECP.
    pub pi_f_membrane: f64,
    /// Structural parameter (m).
    pub s: f64,
    pub k_feed: f64,
    /// |F(jw)| at the returned flux (m/s).
    pub residual: f64,
    pub iterations: usize,
    /// True when the bulk draw pressure does not exceed the feed pressure
    /// (or A = 0) and the flux is zero without solving.
    pub zero_driving_force: bool,
}
