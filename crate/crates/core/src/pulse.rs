//! Complex pulse envelopes on uniform time grids.
//!
//! Photon number is the integral of |amplitude|^2 over time; the `e^-2 full
//! width` of a pulse always refers to its intensity profile, matching how
//! pulse widths are quoted throughout the toolkit.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};

/// Relative amplitude below which the envelope counts as negligible at the
/// grid edges (wraparound guard for spectral propagation).
pub const EDGE_NEGLIGIBLE: f64 = 1e-6;

/// Uniform time grid: `n` samples starting at `t0` with spacing `dt` (seconds).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t0: f64,
    pub dt: f64,
    pub n: usize,
}

impl TimeGrid {
    pub fn new(t0: f64, dt: f64, n: usize) -> Result<Self> {
        if !(dt > 0.0) || !t0.is_finite() {
            return Err(Error::InvalidParam {
                name: "t_grid",
                reason: format!("need finite t0 and dt > 0, got t0 = {t0}, dt = {dt}"),
            });
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(Error::InvalidParam {
                name: "grid_points",
                reason: format!("sample count must be a power of two >= 2, got {n}"),
            });
        }
        Ok(Self { t0, dt, n })
    }

    /// Grid of `n` samples spanning `span` seconds centered on `center`.
    pub fn centered(center: f64, span: f64, n: usize) -> Result<Self> {
        if !(span > 0.0) {
            return Err(Error::InvalidParam {
                name: "grid_span",
                reason: format!("span must be > 0, got {span}"),
            });
        }
        let dt = span / n as f64;
        Self::new(center - 0.5 * span, dt, n)
    }

    pub fn t(&self, i: usize) -> f64 {
        self.t0 + self.dt * i as f64
    }

    pub fn times(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(move |i| self.t(i))
    }

    /// Signed angular frequency of DFT bin `j` (rad/s), negative past Nyquist.
    pub fn omega(&self, j: usize) -> f64 {
        let n = self.n as f64;
        let j_signed = if j <= self.n / 2 {
            j as f64
        } else {
            j as f64 - n
        };
        std::f64::consts::TAU * j_signed / (n * self.dt)
    }
}

/// Complex field amplitude of one frequency mode, sampled on a [`TimeGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct PulseEnvelope {
    pub grid: TimeGrid,
    pub amplitude: Vec<C64>,
}

impl PulseEnvelope {
    pub fn new(grid: TimeGrid, amplitude: Vec<C64>) -> Result<Self> {
        if amplitude.len() != grid.n {
            return Err(Error::InvalidParam {
                name: "amplitude",
                reason: format!(
                    "amplitude length {} does not match grid length {}",
                    amplitude.len(),
                    grid.n
                ),
            });
        }
        Ok(Self { grid, amplitude })
    }

    pub fn zeros(grid: TimeGrid) -> Self {
        Self {
            grid,
            amplitude: vec![C64::new(0.0, 0.0); grid.n],
        }
    }

    /// Integral of |amplitude|^2 dt: the photon number carried by the pulse.
    pub fn energy(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm_sqr()).sum::<f64>() * self.grid.dt
    }

    pub fn peak_abs(&self) -> f64 {
        self.amplitude.iter().map(|a| a.norm()).fold(0.0, f64::max)
    }

    /// Intensity-weighted mean arrival time.
    pub fn centroid(&self) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for (i, a) in self.amplitude.iter().enumerate() {
            let w = a.norm_sqr();
            num += w * self.grid.t(i);
            den += w;
        }
        num / den
    }

    pub fn scaled(&self, k: C64) -> Self {
        Self {
            grid: self.grid,
            amplitude: self.amplitude.iter().map(|a| k * a).collect(),
        }
    }

    /// Largest edge amplitude relative to the peak.
    pub fn edge_ratio(&self) -> f64 {
        let peak = self.peak_abs();
        if peak == 0.0 {
            return 0.0;
        }
        let first = self.amplitude.first().map(|a| a.norm()).unwrap_or(0.0);
        let last = self.amplitude.last().map(|a| a.norm()).unwrap_or(0.0);
        first.max(last) / peak
    }

    /// Error out if the envelope would wrap around under spectral transforms.
    pub fn require_edges_negligible(&self) -> Result<()> {
        let ratio = self.edge_ratio();
        if ratio >= EDGE_NEGLIGIBLE {
            return Err(Error::GridTruncation { edge_ratio: ratio });
        }
        Ok(())
    }

    /// Envelope delayed by `tau` seconds, via an exact spectral phase ramp.
    pub fn delayed(&self, tau: f64) -> Self {
        let n = self.grid.n;
        let mut planner = FftPlanner::<f64>::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let mut buf = self.amplitude.clone();
        fwd.process(&mut buf);
        for (j, b) in buf.iter_mut().enumerate() {
            // Bin j reconstructs with e^{+i omega_j t}, so a delay by tau
            // multiplies it by e^{-i omega_j tau}.
            *b *= C64::from_polar(1.0, -self.grid.omega(j) * tau);
        }
        inv.process(&mut buf);
        let scale = 1.0 / n as f64;
        for b in buf.iter_mut() {
            *b *= scale;
        }
        Self {
            grid: self.grid,
            amplitude: buf,
        }
    }

    /// Temporal-mode overlap |<psi1|psi2(t - tau)>|^2 with both envelopes
    /// normalized to unit photon number.
    pub fn mode_overlap(&self, other: &Self, tau: f64) -> f64 {
        let shifted = other.delayed(tau);
        let inner: C64 = self
            .amplitude
            .iter()
            .zip(shifted.amplitude.iter())
            .map(|(a, b)| a.conj() * b)
            .sum();
        let inner = inner * self.grid.dt;
        let norm = self.energy() * other.energy();
        if norm == 0.0 {
            return 0.0;
        }
        inner.norm_sqr() / norm
    }
}

/// Transform-limited Gaussian pulse with intensity e^-2 full width
/// `e2_full_width`, centered at `center`, carrying `photon_number`.
///
/// Intensity profile: |a(t)|^2 = A exp(-8 (t - center)^2 / w^2) with A chosen
/// so the time integral equals `photon_number` exactly.
pub fn gaussian_pulse(
    center: f64,
    e2_full_width: f64,
    photon_number: f64,
    grid: TimeGrid,
) -> Result<PulseEnvelope> {
    if !(e2_full_width > 0.0) {
        return Err(Error::InvalidParam {
            name: "e2_full_width",
            reason: format!("width must be > 0, got {e2_full_width}"),
        });
    }
    if !(photon_number >= 0.0) {
        return Err(Error::InvalidParam {
            name: "photon_number",
            reason: format!("photon number must be >= 0, got {photon_number}"),
        });
    }
    let w = e2_full_width;
    // integral of exp(-8 t^2 / w^2) dt = w sqrt(pi / 8)
    let peak_intensity = photon_number / (w * (std::f64::consts::PI / 8.0).sqrt());
    let amplitude = grid
        .times()
        .map(|t| {
            let x = (t - center) / w;
            C64::new((peak_intensity * (-8.0 * x * x).exp()).sqrt(), 0.0)
        })
        .collect();
    let pulse = PulseEnvelope::new(grid, amplitude)?;
    if photon_number > 0.0 {
        pulse.require_edges_negligible()?;
    }
    Ok(pulse)
}

#[cfg(test)]
mod tests {
    use super::*;

    const US: f64 = 1e-6;

    fn grid_for(width: f64) -> TimeGrid {
        TimeGrid::centered(0.0, 10.0 * width, 4096).unwrap()
    }

    #[test]
    fn intensity_at_half_width_is_e_minus_2() {
        let w = 3.0 * US;
        let p = gaussian_pulse(0.0, w, 1.0, grid_for(w)).unwrap();
        let peak = p.peak_abs().powi(2);
        // Sample nearest grid points to +-w/2 and compare against the
        // analytic profile there (grid points do not land exactly on w/2).
        let dt = p.grid.dt;
        let idx = ((0.5 * w - p.grid.t0) / dt).round() as usize;
        let t = p.grid.t(idx);
        let expected = peak * (-8.0 * (t / w).powi(2)).exp();
        let got = p.amplitude[idx].norm_sqr();
        assert!((got - expected).abs() / expected < 1e-12);
        // And the analytic value at exactly w/2 is e^-2 of peak.
        let analytic = peak * (-2.0f64).exp();
        let interp = peak * (-8.0 * (0.5f64).powi(2)).exp();
        assert!((interp - analytic).abs() / analytic < 1e-15);
    }

    #[test]
    fn photon_number_normalization() {
        let w = 1.7 * US;
        let p = gaussian_pulse(0.0, w, 1.0, grid_for(w)).unwrap();
        assert!((p.energy() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn amplitude_width_is_sqrt2_times_intensity_width() {
        let w = 1.7 * US;
        let p = gaussian_pulse(0.0, w, 1.0, grid_for(w)).unwrap();
        let peak = p.peak_abs();
        let target = peak * (-2.0f64).exp();
        // Find the e^-2 crossing of |a| by linear interpolation.
        let mut crossing = None;
        for i in p.grid.n / 2..p.grid.n - 1 {
            let a = p.amplitude[i].norm();
            let b = p.amplitude[i + 1].norm();
            if a >= target && b < target {
                let frac = (a - target) / (a - b);
                crossing = Some(p.grid.t(i) + frac * p.grid.dt);
                break;
            }
        }
        let half_width = crossing.expect("crossing in grid");
        let measured_full_width = 2.0 * half_width;
        let expected = std::f64::consts::SQRT_2 * w;
        assert!(
            (measured_full_width - expected).abs() / expected < 1e-3,
            "measured {measured_full_width:e}, expected {expected:e}"
        );
    }

    #[test]
    fn short_grid_is_flagged() {
        let w = 3.0 * US;
        let grid = TimeGrid::centered(0.0, 2.0 * w, 256).unwrap();
        let err = gaussian_pulse(0.0, w, 1.0, grid).unwrap_err();
        assert!(matches!(err, Error::GridTruncation { .. }));
    }

    #[test]
    fn non_power_of_two_grid_rejected() {
        assert!(TimeGrid::new(0.0, 1e-9, 1000).is_err());
        assert!(TimeGrid::new(0.0, 1e-9, 1024).is_ok());
    }

    #[test]
    fn delayed_shifts_centroid() {
        let w = 1.7 * US;
        let p = gaussian_pulse(0.0, w, 1.0, grid_for(w)).unwrap();
        let shifted = p.delayed(0.4 * US);
        assert!((shifted.centroid() - 0.4 * US).abs() < 1e-3 * US);
        assert!((shifted.energy() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaussian_mode_overlap_matches_closed_form() {
        let w = 1.7 * US;
        let p = gaussian_pulse(0.0, w, 1.0, grid_for(w)).unwrap();
        for tau in [0.0, 0.3 * US, 0.85 * US, 1.7 * US, -1.2 * US] {
            let got = p.mode_overlap(&p, tau);
            let expected = (-4.0 * tau * tau / (w * w)).exp();
            assert!(
                (got - expected).abs() < 1e-6,
                "tau = {tau:e}: got {got}, expected {expected}"
            );
        }
    }
}
