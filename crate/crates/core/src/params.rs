//! Physical parameters of the dual-lambda four-wave-mixing medium.
//!
//! Unit conventions, fixed once here and used everywhere else:
//! * Rabi frequencies are stored in units of the excited-state decay rate
//!   `gamma_sp`; detunings are stored in rad/s.
//! * Config files quote frequencies as `*_MHz`, meaning the cyclic frequency
//!   f = omega / 2 pi in MHz; conversion happens exactly once, at ingestion.
//! * The medium length never appears on its own: propagation strength enters
//!   through the optical depth `alpha`, and phase mismatch through the
//!   length-integrated `delta_k_l`.

use std::f64::consts::TAU;

use crate::config::Config;
use crate::error::{Error, Result};

/// Excited-state decay rate of the default medium, rad/s (6 MHz linewidth).
pub const GAMMA_SP_DEFAULT: f64 = TAU * 6.0e6;

/// Convert a config-style MHz value (cyclic frequency) to rad/s.
pub fn mhz_to_rad(f_mhz: f64) -> f64 {
    TAU * 1.0e6 * f_mhz
}

/// Convert rad/s back to cyclic MHz for reporting.
pub fn rad_to_mhz(omega: f64) -> f64 {
    omega / (TAU * 1.0e6)
}

/// One configuration of the atomic medium plus the two strong control fields.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MediumParams {
    /// Optical depth (dimensionless, >= 0).
    pub alpha: f64,
    /// Ground-state decoherence rate, in units of `gamma_sp`.
    pub gamma: f64,
    /// Excited-state spontaneous decay rate, rad/s.
    pub gamma_sp: f64,
    /// Coupling-field Rabi frequency, in units of `gamma_sp`.
    pub omega_c: f64,
    /// Driving-field Rabi frequency, in units of `gamma_sp`.
    pub omega_d: f64,
    /// One-photon detuning of the detuned lambda pair, rad/s.
    pub delta_one: f64,
    /// Residual phase mismatch accumulated over the medium length, radians.
    pub delta_k_l: f64,
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            alpha: 0.0,
            gamma: 0.0,
            gamma_sp: GAMMA_SP_DEFAULT,
            omega_c: 1.0,
            omega_d: 1.0,
            delta_one: 0.0,
            delta_k_l: 0.0,
        }
    }
}

impl MediumParams {
    /// Validate the stored values. Control-field positivity is checked
    /// separately by the solver, which is the operation that needs it.
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0) {
            return Err(Error::InvalidParam {
                name: "alpha",
                reason: format!("optical depth must be >= 0, got {}", self.alpha),
            });
        }
        if !(self.gamma >= 0.0) {
            return Err(Error::InvalidParam {
                name: "gamma",
                reason: format!("decoherence rate must be >= 0, got {}", self.gamma),
            });
        }
        if !(self.gamma_sp > 0.0) {
            return Err(Error::InvalidParam {
                name: "Gamma_MHz",
                reason: format!(
                    "excited-state decay rate must be > 0, got {}",
                    self.gamma_sp
                ),
            });
        }
        if !(self.omega_c >= 0.0) {
            return Err(Error::InvalidParam {
                name: "omega_c",
                reason: format!("Rabi frequency must be >= 0, got {}", self.omega_c),
            });
        }
        if !(self.omega_d >= 0.0) {
            return Err(Error::InvalidParam {
                name: "omega_d",
                reason: format!("Rabi frequency must be >= 0, got {}", self.omega_d),
            });
        }
        if !self.delta_one.is_finite() || !self.delta_k_l.is_finite() {
            return Err(Error::InvalidParam {
                name: "Delta_MHz",
                reason: "detuning and phase mismatch must be finite".into(),
            });
        }
        Ok(())
    }

    /// Both control fields on; required before requesting a transfer matrix.
    pub fn require_control_fields(&self) -> Result<()> {
        if self.omega_c <= 0.0 || self.omega_d <= 0.0 {
            return Err(Error::SingularSystem(
                "both control fields must be nonzero (omega_c > 0, omega_d > 0)".into(),
            ));
        }
        Ok(())
    }

    /// Read the standard medium keys from a flat config.
    ///
    /// Keys: `alpha`, `gamma_over_Gamma`, `Gamma_MHz`, `omega_c_over_Gamma`,
    /// `omega_d_over_Gamma`, `Delta_MHz`, `delta_k_L` (the last two optional,
    /// default 0).
    pub fn from_config(cfg: &Config) -> Result<Self> {
        let params = Self {
            alpha: cfg.f64("alpha")?,
            gamma: cfg.f64("gamma_over_Gamma")?,
            gamma_sp: mhz_to_rad(cfg.f64_or("Gamma_MHz", 6.0)?),
            omega_c: cfg.f64("omega_c_over_Gamma")?,
            omega_d: cfg.f64("omega_d_over_Gamma")?,
            delta_one: mhz_to_rad(cfg.f64_or("Delta_MHz", 0.0)?),
            delta_k_l: cfg.f64_or("delta_k_L", 0.0)?,
        };
        params.validate()?;
        Ok(params)
    }

    /// Coupling Rabi frequency in rad/s.
    pub fn omega_c_rad(&self) -> f64 {
        self.omega_c * self.gamma_sp
    }

    /// Driving Rabi frequency in rad/s.
    pub fn omega_d_rad(&self) -> f64 {
        self.omega_d * self.gamma_sp
    }
}
