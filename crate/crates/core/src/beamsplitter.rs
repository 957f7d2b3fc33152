//! Beam-splitter coefficients of the two-frequency-mode gate.
//!
//! A (generally lossy) frequency beam splitter maps the two input amplitudes
//! to the two outputs via
//!
//! ```text
//!     [ t1           r2 e^{i phi2} ]
//!     [ r1 e^{i phi1}    t2        ]
//! ```
//!
//! with real moduli t, r and the phase differences phi between each reflected
//! and transmitted output.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::mat2::Mat2;

/// Which input port a quantity refers to. Input 1 is the mode that is on
/// one-photon resonance (the probe-side port); input 2 is the detuned mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputPort {
    One,
    Two,
}

/// Moduli and phases of the realized beam splitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BsCoefficients {
    pub t1: f64,
    pub r1: f64,
    pub t2: f64,
    pub r2: f64,
    /// arg(reflected) - arg(transmitted) for input 1, wrapped to (-pi, pi].
    pub phi1: f64,
    /// Same for input 2.
    pub phi2: f64,
}

impl BsCoefficients {
    /// Construct from intensity coefficients and the two phases.
    pub fn from_intensities(
        t1_sq: f64,
        r1_sq: f64,
        t2_sq: f64,
        r2_sq: f64,
        phi1: f64,
        phi2: f64,
    ) -> Result<Self> {
        for (name, v) in [
            ("t1_sq", t1_sq),
            ("r1_sq", r1_sq),
            ("t2_sq", t2_sq),
            ("r2_sq", r2_sq),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParam {
                    name: "coefficients",
                    reason: format!("{name} must lie in [0, 1], got {v}"),
                });
            }
        }
        Ok(Self {
            t1: t1_sq.sqrt(),
            r1: r1_sq.sqrt(),
            t2: t2_sq.sqrt(),
            r2: r2_sq.sqrt(),
            phi1: wrap_phase(phi1),
            phi2: wrap_phase(phi2),
        })
    }

    /// The gate phase phi1 + phi2; pi for an ideal symmetric splitter.
    pub fn gate_phase(&self) -> f64 {
        self.phi1 + self.phi2
    }

    /// The phase imbalance phi1 - phi2 between the two inputs.
    pub fn phase_imbalance(&self) -> f64 {
        self.phi1 - self.phi2
    }

    /// Total transmission seen from one input.
    pub fn total_transmission(&self, input: InputPort) -> f64 {
        match input {
            InputPort::One => self.t1 * self.t1 + self.r1 * self.r1,
            InputPort::Two => self.t2 * self.t2 + self.r2 * self.r2,
        }
    }

    /// Rebuild the complex gate matrix from the coefficients.
    pub fn matrix(&self) -> Mat2 {
        Mat2::new(
            C64::new(self.t1, 0.0),
            C64::from_polar(self.r2, self.phi2),
            C64::from_polar(self.r1, self.phi1),
            C64::new(self.t2, 0.0),
        )
    }
}

/// Fraction of output photons that changed frequency mode: r^2 / (t^2 + r^2).
pub fn split_ratio(c: &BsCoefficients, input: InputPort) -> Result<f64> {
    let (t, r) = match input {
        InputPort::One => (c.t1, c.r1),
        InputPort::Two => (c.t2, c.r2),
    };
    let total = t * t + r * r;
    if total <= 0.0 {
        return Err(Error::UndefinedRatio(
            "zero total output; split ratio undefined",
        ));
    }
    Ok(r * r / total)
}

/// Wrap an angle to (-pi, pi].
pub fn wrap_phase(phi: f64) -> f64 {
    use std::f64::consts::{PI, TAU};
    let mut x = phi.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn symmetric() -> BsCoefficients {
        BsCoefficients {
            t1: FRAC_1_SQRT_2,
            r1: FRAC_1_SQRT_2,
            t2: FRAC_1_SQRT_2,
            r2: FRAC_1_SQRT_2,
            phi1: PI / 2.0,
            phi2: PI / 2.0,
        }
    }

    #[test]
    fn symmetric_case_splits_evenly() {
        let s = split_ratio(&symmetric(), InputPort::One).unwrap();
        assert!((s - 0.5).abs() < 1e-15);
    }

    #[test]
    fn no_reflection_means_zero_split() {
        let c = BsCoefficients {
            r1: 0.0,
            ..symmetric()
        };
        assert_eq!(split_ratio(&c, InputPort::One).unwrap(), 0.0);
    }

    #[test]
    fn near_balanced_measured_point() {
        // t^2 = 0.45, r^2 = 0.46 -> 0.46 / 0.91.
        let c = BsCoefficients::from_intensities(0.45, 0.46, 0.5, 0.5, 0.0, 0.0).unwrap();
        let s = split_ratio(&c, InputPort::One).unwrap();
        assert!((s - 0.46 / 0.91).abs() < 1e-12);
        assert!((s - 0.505).abs() < 1e-3);
    }

    #[test]
    fn zero_output_is_an_error() {
        let c = BsCoefficients {
            t1: 0.0,
            r1: 0.0,
            ..symmetric()
        };
        assert!(split_ratio(&c, InputPort::One).is_err());
    }

    #[test]
    fn phase_wrapping() {
        assert!((wrap_phase(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(-PI) - PI).abs() < 1e-12);
        assert!((wrap_phase(0.3) - 0.3).abs() < 1e-15);
    }

    #[test]
    fn matrix_roundtrip() {
        let c = BsCoefficients::from_intensities(0.46, 0.46, 0.51, 0.39, 1.9, 1.1).unwrap();
        let m = c.matrix();
        assert!((m.m11.re - c.t1).abs() < 1e-15);
        assert!((m.m21.norm() - c.r1).abs() < 1e-15);
        assert!((m.m21.arg() - c.phi1).abs() < 1e-15);
        assert!((m.m12.arg() - c.phi2).abs() < 1e-15);
    }
}
