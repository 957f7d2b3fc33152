//! Forward model of the pulsed counting experiment and the estimator that
//! recovers output-to-input photon ratios from binned counts.
//!
//! Counts in each time bin are Poisson around
//! `n_trials * (photons_per_pulse * eff * bin_fraction + baseline_rate * bin_width)`,
//! where `bin_fraction` is the share of the pulse intensity falling in the
//! bin and the baseline collects control-field leakage plus dark counts.
//! Photon numbers are read back from Gaussian-plus-baseline fits, excluding
//! the baseline.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fit::{fit_gaussian_baseline, GaussianBaselineFit, Weighting};
use crate::pulse::PulseEnvelope;

/// One detection channel: collection efficiency (including detector quantum
/// efficiency) and a flat baseline rate in counts per second per trial.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectionChannel {
    pub collection_eff: f64,
    pub baseline_rate: f64,
}

impl DetectionChannel {
    pub fn new(collection_eff: f64, baseline_rate: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&collection_eff) {
            return Err(Error::InvalidParam {
                name: "collection_eff",
                reason: format!("efficiency must lie in [0, 1], got {collection_eff}"),
            });
        }
        if !(baseline_rate >= 0.0) {
            return Err(Error::InvalidParam {
                name: "baseline_rate",
                reason: format!("baseline rate must be >= 0, got {baseline_rate}"),
            });
        }
        Ok(Self {
            collection_eff,
            baseline_rate,
        })
    }
}

/// Binned counts accumulated over repeated trials.
#[derive(Clone, Debug, PartialEq)]
pub struct CountHistogram {
    /// Left edge of the first bin, seconds.
    pub t_start: f64,
    /// Uniform bin width, seconds.
    pub bin_width: f64,
    pub counts: Vec<u64>,
    pub n_trials: u64,
}

impl CountHistogram {
    pub fn bin_center(&self, i: usize) -> f64 {
        self.t_start + (i as f64 + 0.5) * self.bin_width
    }

    pub fn bin_centers(&self) -> Vec<f64> {
        (0..self.counts.len()).map(|i| self.bin_center(i)).collect()
    }

    pub fn bin_edges(&self) -> Vec<f64> {
        (0..=self.counts.len())
            .map(|i| self.t_start + i as f64 * self.bin_width)
            .collect()
    }

    pub fn total_counts(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// CSV with header `bin_start_us,counts`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_start_us,counts\n");
        for (i, &c) in self.counts.iter().enumerate() {
            out.push_str(&format!(
                "{},{}\n",
                (self.t_start + i as f64 * self.bin_width) * 1e6,
                c
            ));
        }
        out
    }
}

/// Simulate the counting record of one channel watching a pulse.
///
/// The histogram covers the envelope's time grid. Deterministic per seed.
pub fn simulate_counts(
    envelope: &PulseEnvelope,
    photons_per_pulse: f64,
    ch: &DetectionChannel,
    bin_width: f64,
    n_trials: u64,
    seed: u64,
) -> Result<CountHistogram> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParam {
            name: "bin_width",
            reason: format!("bin width must be > 0, got {bin_width}"),
        });
    }
    if n_trials == 0 {
        return Err(Error::InvalidParam {
            name: "n_trials",
            reason: "need at least one trial".into(),
        });
    }
    if !(photons_per_pulse >= 0.0) {
        return Err(Error::InvalidParam {
            name: "photons_per_pulse",
            reason: format!("photon number must be >= 0, got {photons_per_pulse}"),
        });
    }

    let span = envelope.grid.dt * envelope.grid.n as f64;
    let n_bins = (span / bin_width).floor() as usize;
    if n_bins < 1 {
        return Err(Error::InvalidParam {
            name: "bin_width",
            reason: format!("bin width {bin_width} exceeds the envelope span {span}"),
        });
    }
    let t_start = envelope.grid.t0;

    // Intensity share of each bin.
    let mut fractions = vec![0.0f64; n_bins];
    let mut total = 0.0;
    for (i, a) in envelope.amplitude.iter().enumerate() {
        let w = a.norm_sqr();
        total += w;
        let bin = ((envelope.grid.t(i) - t_start) / bin_width) as usize;
        if bin < n_bins {
            fractions[bin] += w;
        }
    }
    if total > 0.0 {
        for f in fractions.iter_mut() {
            *f /= total;
        }
    }

    let trials = n_trials as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = fractions
        .iter()
        .map(|&frac| {
            let mean = trials
                * (photons_per_pulse * ch.collection_eff * frac + ch.baseline_rate * bin_width);
            if mean > 0.0 {
                Poisson::new(mean)
                    .expect("positive finite mean")
                    .sample(&mut rng) as u64
            } else {
                0
            }
        })
        .collect();

    Ok(CountHistogram {
        t_start,
        bin_width,
        counts,
        n_trials,
    })
}

/// Gaussian-plus-baseline fit of a count histogram.
///
/// Requires at least 8 bins and a peak that stands out from the baseline by
/// more than three standard deviations.
pub fn fit_histogram(h: &CountHistogram, weighting: Weighting) -> Result<GaussianBaselineFit> {
    if h.counts.len() < 8 {
        return Err(Error::DegenerateData(format!(
            "need at least 8 bins, got {}",
            h.counts.len()
        )));
    }
    let y: Vec<f64> = h.counts.iter().map(|&c| c as f64).collect();
    let edge = (y.len() / 4).max(1);
    let baseline_guess: f64 = y[..edge]
        .iter()
        .chain(y[y.len() - edge..].iter())
        .sum::<f64>()
        / (2 * edge) as f64;
    let peak = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if peak <= baseline_guess + 3.0 * baseline_guess.max(1.0).sqrt() {
        return Err(Error::DegenerateData(format!(
            "peak {peak} not distinguishable from baseline {baseline_guess:.1}"
        )));
    }
    fit_gaussian_baseline(&h.bin_centers(), &y, weighting)
}

/// Photon number in one channel: Gaussian area above baseline, corrected for
/// trials and collection efficiency. Returns (photons, sigma).
pub fn photons_from_fit(
    fit: &GaussianBaselineFit,
    h: &CountHistogram,
    collection_eff: f64,
) -> Result<(f64, f64)> {
    if !(collection_eff > 0.0) {
        return Err(Error::InvalidParam {
            name: "collection_eff",
            reason: format!("efficiency must be > 0 to invert counts, got {collection_eff}"),
        });
    }
    let (area, area_sigma) = fit.gaussian_area();
    let norm = h.bin_width * h.n_trials as f64 * collection_eff;
    Ok((area / norm, area_sigma / norm))
}

/// Ratio estimate with its first-order uncertainty and the per-channel fits.
#[derive(Debug)]
pub struct RatioEstimate {
    pub ratio: f64,
    pub sigma: f64,
    pub photons_in: f64,
    pub photons_out: f64,
    pub input_fit: GaussianBaselineFit,
    pub output_fits: Vec<GaussianBaselineFit>,
}

#[derive(Serialize)]
struct FitReport {
    amplitude: f64,
    amplitude_sigma: f64,
    center_us: f64,
    e2_full_width_us: f64,
    baseline: f64,
    baseline_sigma: f64,
}

impl FitReport {
    fn from(fit: &GaussianBaselineFit) -> Self {
        Self {
            amplitude: fit.amplitude,
            amplitude_sigma: fit.sigma(0),
            center_us: fit.center * 1e6,
            e2_full_width_us: fit.e2_full_width * 1e6,
            baseline: fit.baseline,
            baseline_sigma: fit.sigma(3),
        }
    }
}

#[derive(Serialize)]
struct RatioSummary {
    ratio: f64,
    sigma: f64,
    photons_in: f64,
    photons_out: f64,
    input_fit: FitReport,
    output_fits: Vec<FitReport>,
}

impl RatioEstimate {
    pub fn summary_json(&self) -> String {
        serde_json::to_string_pretty(&RatioSummary {
            ratio: self.ratio,
            sigma: self.sigma,
            photons_in: self.photons_in,
            photons_out: self.photons_out,
            input_fit: FitReport::from(&self.input_fit),
            output_fits: self.output_fits.iter().map(FitReport::from).collect(),
        })
        .expect("summary serializes")
    }
}

/// Total output photons over input photons, baseline excluded on every
/// channel, uncertainties propagated from the fit covariances.
pub fn output_input_ratio(
    h_in: &CountHistogram,
    h_out_list: &[&CountHistogram],
    eff_in: f64,
    eff_out_list: &[f64],
    weighting: Weighting,
) -> Result<RatioEstimate> {
    if h_out_list.is_empty() || h_out_list.len() != eff_out_list.len() {
        return Err(Error::InvalidParam {
            name: "outputs",
            reason: format!(
                "need one efficiency per output histogram, got {} histograms / {} efficiencies",
                h_out_list.len(),
                eff_out_list.len()
            ),
        });
    }

    let input_fit = fit_histogram(h_in, weighting)?;
    let (p_in, s_in) = photons_from_fit(&input_fit, h_in, eff_in)?;
    if !(p_in > 0.0) {
        return Err(Error::UndefinedRatio("non-positive input photon number"));
    }

    let mut p_out = 0.0;
    let mut var_out = 0.0;
    let mut output_fits = Vec::with_capacity(h_out_list.len());
    for (h, &eff) in h_out_list.iter().zip(eff_out_list) {
        let fit = fit_histogram(h, weighting)?;
        let (p, s) = photons_from_fit(&fit, h, eff)?;
        p_out += p;
        var_out += s * s;
        output_fits.push(fit);
    }

    let ratio = p_out / p_in;
    let sigma = (var_out / (p_in * p_in) + (p_out * s_in / (p_in * p_in)).powi(2)).sqrt();
    Ok(RatioEstimate {
        ratio,
        sigma,
        photons_in: p_in,
        photons_out: p_out,
        input_fit,
        output_fits,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pulse::{gaussian_pulse, TimeGrid};

    const US: f64 = 1e-6;

    fn pulse(width: f64, center: f64) -> PulseEnvelope {
        let grid = TimeGrid::centered(center, 16.0 * width, 2048).unwrap();
        gaussian_pulse(center, width, 1.0, grid).unwrap()
    }

    #[test]
    fn dark_channel_stays_silent() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(0.5, 0.0).unwrap();
        let h = simulate_counts(&env, 0.0, &ch, 450e-9, 1000, 1).unwrap();
        assert_eq!(h.total_counts(), 0);
    }

    #[test]
    fn mean_counts_preserved() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(1.0, 0.0).unwrap();
        let h = simulate_counts(&env, 1.0, &ch, 450e-9, 1_000_000, 42).unwrap();
        let total = h.total_counts() as f64;
        // Poisson sigma on 1e6 expected counts is 1e3.
        assert!((total - 1.0e6).abs() < 4.0e3, "total {total}");
    }

    #[test]
    fn single_photon_splitter_peak_scale() {
        // Narrow pulse, 225 ns bins, 32k trials at 0.17 efficiency: peak bin
        // counts land in the thousands.
        let env = pulse(1.2 * US, 0.0);
        let ch = DetectionChannel::new(0.17, 2_000.0).unwrap();
        let h = simulate_counts(&env, 1.0, &ch, 225e-9, 32_000, 5).unwrap();
        let peak = *h.counts.iter().max().unwrap();
        assert!(
            (500..10_000).contains(&(peak as usize)),
            "peak bin counts {peak}"
        );
    }

    #[test]
    fn fit_recovers_injected_baseline() {
        let env = pulse(3.0 * US, 0.0);
        let baseline_rate = 50_000.0; // counts/s per trial
        let ch = DetectionChannel::new(0.13, baseline_rate).unwrap();
        let h = simulate_counts(&env, 0.68, &ch, 450e-9, 24_000, 11).unwrap();
        let fit = fit_histogram(&h, Weighting::Uniform).unwrap();
        let expected_baseline = baseline_rate * 450e-9 * 24_000.0;
        let tol = 4.0 * fit.sigma(3).max(expected_baseline.sqrt());
        assert!(
            (fit.baseline - expected_baseline).abs() < tol,
            "baseline {} vs {expected_baseline}",
            fit.baseline
        );
    }

    #[test]
    fn identical_channels_give_unit_ratio() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(0.13, 20_000.0).unwrap();
        let h_in = simulate_counts(&env, 0.7, &ch, 450e-9, 24_000, 21).unwrap();
        let h_out = simulate_counts(&env, 0.7, &ch, 450e-9, 24_000, 22).unwrap();
        let est = output_input_ratio(
            &h_in,
            &[&h_out],
            ch.collection_eff,
            &[ch.collection_eff],
            Weighting::Uniform,
        )
        .unwrap();
        assert!(
            (est.ratio - 1.0).abs() < 4.0 * est.sigma,
            "ratio {} +- {}",
            est.ratio,
            est.sigma
        );
    }

    #[test]
    fn efficiency_rescaling_cancels_exactly() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(0.13, 20_000.0).unwrap();
        let h_in = simulate_counts(&env, 0.7, &ch, 450e-9, 24_000, 31).unwrap();
        let h_out = simulate_counts(&env, 0.6, &ch, 450e-9, 24_000, 32).unwrap();
        let a = output_input_ratio(&h_in, &[&h_out], 0.13, &[0.12], Weighting::Uniform).unwrap();
        let k = 3.7;
        let b = output_input_ratio(&h_in, &[&h_out], 0.13 * k, &[0.12 * k], Weighting::Uniform)
            .unwrap();
        assert!((a.ratio - b.ratio).abs() < 1e-12);
    }

    #[test]
    fn poisson_weighting_agrees_with_uniform_on_strong_peaks() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(0.13, 20_000.0).unwrap();
        let h = simulate_counts(&env, 0.68, &ch, 450e-9, 24_000, 13).unwrap();
        let a = fit_histogram(&h, Weighting::Uniform).unwrap();
        let b = fit_histogram(&h, Weighting::PoissonCounts).unwrap();
        assert!((a.amplitude - b.amplitude).abs() / a.amplitude < 0.05);
        assert!((a.e2_full_width - b.e2_full_width).abs() / a.e2_full_width < 0.05);
        assert!((a.baseline - b.baseline).abs() / a.baseline < 0.05);
    }

    #[test]
    fn too_few_bins_rejected() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(0.5, 0.0).unwrap();
        let h = simulate_counts(&env, 1.0, &ch, 12.0 * US, 10_000, 3).unwrap();
        assert!(h.counts.len() < 8);
        assert!(matches!(
            fit_histogram(&h, Weighting::Uniform),
            Err(Error::DegenerateData(_))
        ));
    }

    #[test]
    fn flat_histogram_rejected() {
        let env = pulse(3.0 * US, 0.0);
        let ch = DetectionChannel::new(0.0, 100_000.0).unwrap();
        let h = simulate_counts(&env, 0.0, &ch, 450e-9, 10_000, 9).unwrap();
        assert!(matches!(
            fit_histogram(&h, Weighting::Uniform),
            Err(Error::DegenerateData(_))
        ));
    }
}
