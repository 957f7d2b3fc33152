//! Figures of merit of the realized gate: fidelity against the matched ideal
//! 50/50 splitter, and transmission/split-ratio scans over the two detunings.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::beamsplitter::BsCoefficients;
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::params::{rad_to_mhz, MediumParams};
use crate::pulse::{gaussian_pulse, TimeGrid};
use crate::solver::{energy_transmission, propagate_pulse, transfer_matrix, Port};

/// Realized gate `v` paired with its ideal reference `u`.
#[derive(Clone, Copy, Debug)]
pub struct GateOperator {
    pub v: Mat2,
    pub u: Mat2,
}

impl GateOperator {
    /// Pair a realized gate with an ideal reference; `u` must be unitary.
    pub fn new(v: Mat2, u: Mat2) -> Result<Self> {
        let g = u.dagger().matmul(&u);
        let off = g.m12.norm().max(g.m21.norm());
        let diag = (g.m11 - C64::new(1.0, 0.0))
            .norm()
            .max((g.m22 - C64::new(1.0, 0.0)).norm());
        if off.max(diag) > 1e-12 {
            return Err(Error::InvalidParam {
                name: "u",
                reason: format!(
                    "reference operator not unitary (deviation {:.2e})",
                    off.max(diag)
                ),
            });
        }
        Ok(Self { v, u })
    }

    /// Build the pair from measured coefficients: `v` is the coefficient
    /// matrix, `u` the ideal splitter matched to the measured phase
    /// imbalance.
    pub fn from_coefficients(c: &BsCoefficients) -> Self {
        Self {
            v: c.matrix(),
            u: ideal_u(c.phase_imbalance()),
        }
    }
}

/// Ideal 50/50 splitter with phase imbalance `delta_phi` between its inputs:
///
/// ```text
/// (1/sqrt 2) [ 1                    e^{i (pi - dphi)/2} ]
///            [ e^{i (pi + dphi)/2}  1                   ]
/// ```
pub fn ideal_u(delta_phi: f64) -> Mat2 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let upper = (std::f64::consts::PI - delta_phi) / 2.0;
    let lower = (std::f64::consts::PI + delta_phi) / 2.0;
    Mat2::new(
        C64::new(s, 0.0),
        C64::from_polar(s, upper),
        C64::from_polar(s, lower),
        C64::new(s, 0.0),
    )
}

/// Process fidelity |Tr(V^dagger U)|^2 / (4 T) for success probability T.
pub fn fidelity_trace(v: &Mat2, u: &Mat2, t: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveT(t));
    }
    let tr = v.dagger().matmul(u).trace();
    Ok(tr.norm_sqr() / (4.0 * t))
}

/// Closed-form fidelity of the coefficient matrix against the matched ideal
/// splitter: `1/2 + (tbar rbar / T) sin(phi / 2)` with
/// `tbar = (t1 + t2)/2`, `rbar = (r1 + r2)/2`, `T = tbar^2 + rbar^2`,
/// `phi = phi1 + phi2`.
pub fn fidelity_closed(c: &BsCoefficients) -> Result<f64> {
    let t_bar = 0.5 * (c.t1 + c.t2);
    let r_bar = 0.5 * (c.r1 + c.r2);
    let t_succ = t_bar * t_bar + r_bar * r_bar;
    if !(t_succ > 0.0) {
        return Err(Error::NonPositiveT(t_succ));
    }
    Ok(0.5 + t_bar * r_bar / t_succ * (0.5 * c.gate_phase()).sin())
}

/// Success probability convention used with [`fidelity_trace`] when pairing
/// it against [`fidelity_closed`]: `T = tbar^2 + rbar^2`.
pub fn success_probability(c: &BsCoefficients) -> f64 {
    let t_bar = 0.5 * (c.t1 + c.t2);
    let r_bar = 0.5 * (c.r1 + c.r2);
    t_bar * t_bar + r_bar * r_bar
}

/// Which detuning a scan sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanAxis {
    /// Two-photon detuning of the ground-state coherence.
    TwoPhoton,
    /// One-photon detuning of the detuned lambda pair.
    OnePhoton,
}

/// How each scan point is evaluated.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ScanMode {
    /// Steady-state transfer matrix (fast, default).
    Cw,
    /// Propagate a Gaussian probe pulse of the given intensity e^-2 full
    /// width (seconds) and use energy transmissions; slower but matches
    /// pulsed measurements.
    Pulsed { e2_full_width: f64 },
}

/// Probe-input transmissions along a detuning scan.
#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    /// Scanned detuning values, rad/s.
    pub axis: Vec<f64>,
    /// Energy transmission surviving in the probe mode.
    pub t_probe: Vec<f64>,
    /// Energy transmission converted to the signal mode.
    pub t_signal: Vec<f64>,
    /// Sum of the two.
    pub total: Vec<f64>,
    /// Converted fraction of the output, t_signal / (t_probe + t_signal).
    pub split: Vec<f64>,
}

impl ScanResult {
    /// CSV with header `axis_MHz,t_probe,t_signal,total,split`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("axis_MHz,t_probe,t_signal,total,split\n");
        for i in 0..self.axis.len() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                rad_to_mhz(self.axis[i]),
                self.t_probe[i],
                self.t_signal[i],
                self.total[i],
                self.split[i]
            ));
        }
        out
    }
}

/// Sweep one detuning with the probe mode as the only input.
///
/// For [`ScanAxis::OnePhoton`] the swept values replace the medium's
/// one-photon detuning and the two-photon detuning stays at `delta0`; for
/// [`ScanAxis::TwoPhoton`] the swept values are the two-photon detuning.
pub fn scan(
    p: &MediumParams,
    axis: ScanAxis,
    values: &[f64],
    delta0: f64,
    mode: ScanMode,
) -> Result<ScanResult> {
    if values.is_empty() {
        return Err(Error::InvalidParam {
            name: "scan_points",
            reason: "scan grid is empty".into(),
        });
    }
    let increasing = values.windows(2).all(|w| w[1] > w[0]);
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    if !increasing && !decreasing {
        return Err(Error::InvalidParam {
            name: "scan_points",
            reason: "scan grid must be strictly monotone".into(),
        });
    }
    p.validate()?;
    p.require_control_fields()?;

    let points: Result<Vec<(f64, f64)>> = values
        .par_iter()
        .map(|&value| {
            let (medium, delta) = match axis {
                ScanAxis::TwoPhoton => (*p, value),
                ScanAxis::OnePhoton => (
                    MediumParams {
                        delta_one: value,
                        ..*p
                    },
                    delta0,
                ),
            };
            match mode {
                ScanMode::Cw => {
                    let tm = transfer_matrix(&medium, delta)?;
                    Ok((tm.m.m11.norm_sqr(), tm.m.m21.norm_sqr()))
                }
                ScanMode::Pulsed { e2_full_width } => {
                    let grid = TimeGrid::centered(0.0, 8.0 * e2_full_width, 4096)?;
                    let input = gaussian_pulse(0.0, e2_full_width, 1.0, grid)?;
                    let (probe, signal) = propagate_pulse(&medium, delta, &input, Port::Probe)?;
                    Ok((
                        energy_transmission(&input, &probe),
                        energy_transmission(&input, &signal),
                    ))
                }
            }
        })
        .collect();
    let points = points?;

    let mut result = ScanResult {
        axis: values.to_vec(),
        t_probe: Vec::with_capacity(values.len()),
        t_signal: Vec::with_capacity(values.len()),
        total: Vec::with_capacity(values.len()),
        split: Vec::with_capacity(values.len()),
    };
    for (tp, ts) in points {
        let total = tp + ts;
        if !(total > 0.0) {
            return Err(Error::UndefinedRatio("zero total output in scan"));
        }
        result.t_probe.push(tp);
        result.t_signal.push(ts);
        result.total.push(total);
        result.split.push(ts / total);
    }
    Ok(result)
}

/// Evenly spaced grid helper, inclusive of both ends.
pub fn linspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![start];
    }
    (0..n)
        .map(|i| start + (stop - start) * i as f64 / (n - 1) as f64)
        .collect()
}
