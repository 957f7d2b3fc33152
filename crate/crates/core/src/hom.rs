//! Two-photon interference statistics of the gate's output ports.
//!
//! The headline quantity is the normalized cross correlation
//! `g2 = <n1 n2> / (<n1><n2>)` between the two output modes when one pulse
//! enters each input. For equal-mean-photon-number, phase-uncorrelated
//! coherent inputs the closed form is
//!
//! ```text
//! g2 = 1 + 2 t1 t2 r1 r2 cos(phi) / ((t1^2 + r2^2)(t2^2 + r1^2))
//! ```
//!
//! with phi the gate phase. A phase-averaged Monte Carlo over coherent
//! inputs and a two-mode Fock amplitude give independent routes to the same
//! physics, and the delay scan reproduces the interference dip as the two
//! input envelopes are slid across each other.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::beamsplitter::BsCoefficients;
use crate::error::{Error, Result};
use crate::fit::{fit_gaussian_baseline, Weighting};
use crate::pulse::PulseEnvelope;

/// Prefactor of cos(phi) in the closed form; the dip depth is this times
/// cos(phi).
pub fn interference_factor(c: &BsCoefficients) -> Result<f64> {
    let denom = (c.t1 * c.t1 + c.r2 * c.r2) * (c.t2 * c.t2 + c.r1 * c.r1);
    if !(denom > 0.0) {
        return Err(Error::UndefinedRatio(
            "both output means vanish; g2 undefined",
        ));
    }
    Ok(2.0 * c.t1 * c.t2 * c.r1 * c.r2 / denom)
}

/// Closed-form g2 for phase-uncorrelated coherent inputs of equal mean
/// photon number.
pub fn g2_closed(c: &BsCoefficients) -> Result<f64> {
    Ok(1.0 + interference_factor(c)? * c.gate_phase().cos())
}

/// cos(phi) recovered from a measured dip minimum.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CosPhiEstimate {
    pub value: f64,
    pub sigma: f64,
    /// True when the raw estimate fell outside [-1, 1] (within its
    /// uncertainty) and was clamped.
    pub clamped: bool,
}

/// Invert the closed form for cos(phi) given the measured dip minimum and
/// its standard error.
pub fn invert_cos_phi(g2_min: f64, g2_sigma: f64, c: &BsCoefficients) -> Result<CosPhiEstimate> {
    let factor = interference_factor(c)?;
    if factor == 0.0 {
        return Err(Error::UndefinedRatio(
            "no interference term; cos(phi) unconstrained",
        ));
    }
    let value = (g2_min - 1.0) / factor;
    let sigma = (g2_sigma / factor).abs();
    if value.abs() <= 1.0 {
        Ok(CosPhiEstimate {
            value,
            sigma,
            clamped: false,
        })
    } else if value.abs() - 1.0 <= sigma {
        Ok(CosPhiEstimate {
            value: value.clamp(-1.0, 1.0),
            sigma,
            clamped: true,
        })
    } else {
        Err(Error::InconsistentCosPhi { value, sigma })
    }
}

/// Monte Carlo estimate with a bootstrap standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    pub std_error: f64,
}

const MC_BATCHES: u64 = 64;
const BOOTSTRAP_RESAMPLES: usize = 200;

/// Phase-averaged coherent-state Monte Carlo for g2.
///
/// Each sample draws a uniform relative phase, feeds coherent amplitudes of
/// `mean_photons` into both ports, and records the two output intensities.
/// Deterministic for a fixed seed, independent of thread count.
pub fn g2_coherent_mc(
    c: &BsCoefficients,
    mean_photons: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 10_000 {
        return Err(Error::InvalidParam {
            name: "n_samples",
            reason: format!("need at least 10^4 samples, got {n_samples}"),
        });
    }
    if !(mean_photons > 0.0) {
        return Err(Error::InvalidParam {
            name: "mean_photons",
            reason: format!("mean photon number must be > 0, got {mean_photons}"),
        });
    }
    interference_factor(c)?; // validates the denominator

    let m = c.matrix();
    let a = mean_photons.sqrt();
    let per_batch = n_samples.div_ceil(MC_BATCHES);

    // (sum n1 n2, sum n1, sum n2, count) per batch.
    let batches: Vec<(f64, f64, f64, u64)> = (0..MC_BATCHES)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (b.wrapping_mul(0x9E37_79B9_7F4A_7C15)));
            // Last batch absorbs the remainder.
            let count = if b == MC_BATCHES - 1 {
                n_samples - per_batch * (MC_BATCHES - 1)
            } else {
                per_batch
            };
            let mut s12 = 0.0;
            let mut s1 = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                let in2 = C64::from_polar(a, theta);
                let (o1, o2) = m.apply((C64::new(a, 0.0), in2));
                let n1 = o1.norm_sqr();
                let n2 = o2.norm_sqr();
                s12 += n1 * n2;
                s1 += n1;
                s2 += n2;
            }
            (s12, s1, s2, count)
        })
        .collect();

    let g2_of = |sel: &[usize]| -> f64 {
        let (mut s12, mut s1, mut s2, mut n) = (0.0, 0.0, 0.0, 0u64);
        for &i in sel {
            let b = batches[i];
            s12 += b.0;
            s1 += b.1;
            s2 += b.2;
            n += b.3;
        }
        let nf = n as f64;
        (s12 / nf) / ((s1 / nf) * (s2 / nf))
    };

    let all: Vec<usize> = (0..batches.len()).collect();
    let value = g2_of(&all);

    let mut boot_rng = ChaCha8Rng::seed_from_u64(seed ^ 0x0B00_7B00_7B00_7B00);
    let mut resampled = Vec::with_capacity(BOOTSTRAP_RESAMPLES);
    for _ in 0..BOOTSTRAP_RESAMPLES {
        let sel: Vec<usize> = (0..batches.len())
            .map(|_| boot_rng.gen_range(0..batches.len()))
            .collect();
        resampled.push(g2_of(&sel));
    }
    let mean = resampled.iter().sum::<f64>() / resampled.len() as f64;
    let var =
        resampled.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (resampled.len() - 1) as f64;

    Ok(McEstimate {
        value,
        std_error: var.sqrt(),
    })
}

/// Two-photon coincidence for Fock-state inputs |1, 1>.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FockCoincidence {
    /// Amplitude of both photons leaving in different modes:
    /// t1 t2 + r1 r2 e^{i phi}.
    pub amplitude: C64,
    /// |amplitude|^2: probability of a coincidence (loss treated as
    /// heralded discard).
    pub probability: f64,
    /// Coincidence normalized by the product of single-port means.
    pub g2: f64,
}

/// Coincidence statistics for two single photons entering the two ports.
pub fn g2_fock(c: &BsCoefficients) -> Result<FockCoincidence> {
    let denom = (c.t1 * c.t1 + c.r2 * c.r2) * (c.t2 * c.t2 + c.r1 * c.r1);
    if !(denom > 0.0) {
        return Err(Error::UndefinedRatio(
            "both output means vanish; g2 undefined",
        ));
    }
    let amplitude = C64::new(c.t1 * c.t2, 0.0) + C64::from_polar(c.r1 * c.r2, c.gate_phase());
    let probability = amplitude.norm_sqr();
    Ok(FockCoincidence {
        amplitude,
        probability,
        g2: probability / denom,
    })
}

/// Dip scan of g2 against the delay between the two input pulses.
#[derive(Clone, Debug, PartialEq)]
pub struct HomScanResult {
    /// Delay values, seconds.
    pub tau: Vec<f64>,
    /// g2 at each delay.
    pub g2: Vec<f64>,
    /// Fitted extremum of the dip, `baseline + amplitude`.
    pub g2_min: f64,
    /// Fitted dip center, seconds.
    pub dip_center: f64,
    /// Fitted e^-2 full width of the dip, seconds.
    pub dip_e2_width: f64,
}

#[derive(Serialize)]
struct HomSummary {
    g2_min: f64,
    dip_center_us: f64,
    dip_e2_width_us: f64,
}

impl HomScanResult {
    /// CSV with header `tau_us,g2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau_us,g2\n");
        for (t, g) in self.tau.iter().zip(self.g2.iter()) {
            out.push_str(&format!("{},{}\n", t * 1e6, g));
        }
        out
    }

    /// JSON summary of the fitted dip.
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&HomSummary {
            g2_min: self.g2_min,
            dip_center_us: self.dip_center * 1e6,
            dip_e2_width_us: self.dip_e2_width * 1e6,
        })
        .expect("summary serializes")
    }
}

/// Scan g2 over the relative delay of the two input envelopes.
///
/// The delay enters only through the temporal-mode overlap:
/// `g2(tau) = 1 + factor cos(phi) O(tau)` with
/// `O(tau) = |<psi1 | psi2(t - tau)>|^2` for unit-norm envelopes. A Gaussian
/// plus baseline is fitted to the scan to summarize the dip.
pub fn hom_delay_scan(
    c: &BsCoefficients,
    envelope1: &PulseEnvelope,
    envelope2: &PulseEnvelope,
    tau_grid: &[f64],
) -> Result<HomScanResult> {
    if tau_grid.len() < 8 {
        return Err(Error::InvalidParam {
            name: "tau_grid",
            reason: format!("need at least 8 delay points, got {}", tau_grid.len()),
        });
    }
    let e1 = envelope1.energy();
    let e2 = envelope2.energy();
    if e1 <= 0.0 || e2 <= 0.0 || (e1 - e2).abs() > 1e-6 * e1.max(e2) {
        return Err(Error::InvalidParam {
            name: "envelopes",
            reason: format!("inputs must carry equal photon number, got {e1} vs {e2}"),
        });
    }
    let depth = interference_factor(c)? * c.gate_phase().cos();

    let g2: Vec<f64> = tau_grid
        .iter()
        .map(|&tau| 1.0 + depth * envelope1.mode_overlap(envelope2, tau))
        .collect();

    // The extremum must sit strictly inside the scanned window.
    let extremum_idx = if depth <= 0.0 {
        g2.iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap()
    } else {
        g2.iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap()
    };
    if extremum_idx == 0 || extremum_idx == g2.len() - 1 {
        return Err(Error::DipNotCovered(format!(
            "extremum at the {} end of the delay grid",
            if extremum_idx == 0 { "low" } else { "high" }
        )));
    }

    let fit = fit_gaussian_baseline(tau_grid, &g2, Weighting::Uniform)?;
    Ok(HomScanResult {
        tau: tau_grid.to_vec(),
        g2,
        g2_min: fit.baseline + fit.amplitude,
        dip_center: fit.center,
        dip_e2_width: fit.e2_full_width,
    })
}
