//! Spectral pulse propagation through the medium.
//!
//! The control fields are monochromatic, so a weak-field spectral component
//! offset by `omega` from its carrier sees every detuning shifted by the same
//! amount. Propagating a pulse therefore reduces to applying the steady-state
//! transfer matrix bin by bin in the Fourier domain.

use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::params::MediumParams;
use crate::pulse::PulseEnvelope;
use crate::solver::steady::transfer_matrix;

/// Which frequency mode carries the input pulse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Port {
    Probe,
    Signal,
}

/// Propagate `input` (entering on `port`) through the medium at base
/// two-photon detuning `delta0` (rad/s). Returns (probe_out, signal_out) on
/// the input's time grid.
pub fn propagate_pulse(
    p: &MediumParams,
    delta0: f64,
    input: &PulseEnvelope,
    port: Port,
) -> Result<(PulseEnvelope, PulseEnvelope)> {
    p.validate()?;
    p.require_control_fields()?;
    input.require_edges_negligible()?;

    let n = input.grid.n;
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(n);
    let inv = planner.plan_fft_inverse(n);

    let mut spec_in = input.amplitude.clone();
    fwd.process(&mut spec_in);

    let mut spec_probe = vec![C64::new(0.0, 0.0); n];
    let mut spec_signal = vec![C64::new(0.0, 0.0); n];
    for (j, amp) in spec_in.iter().enumerate() {
        // Bin j reconstructs with e^{+i omega_j t}; as a field component it
        // sits lower in frequency by omega_j, so every detuning shifts by
        // -omega_j.
        let delta = delta0 - input.grid.omega(j);
        let tm = transfer_matrix(p, delta)?;
        let inputs = match port {
            Port::Probe => (*amp, C64::new(0.0, 0.0)),
            Port::Signal => (C64::new(0.0, 0.0), *amp),
        };
        let (op, os) = tm.m.apply(inputs);
        spec_probe[j] = op;
        spec_signal[j] = os;
    }

    inv.process(&mut spec_probe);
    inv.process(&mut spec_signal);
    let scale = 1.0 / n as f64;
    for v in spec_probe.iter_mut().chain(spec_signal.iter_mut()) {
        *v *= scale;
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite("propagated pulse"));
        }
    }

    Ok((
        PulseEnvelope::new(input.grid, spec_probe)?,
        PulseEnvelope::new(input.grid, spec_signal)?,
    ))
}

/// Energy transmission of one output relative to the input pulse.
pub fn energy_transmission(input: &PulseEnvelope, output: &PulseEnvelope) -> f64 {
    let e_in = input.energy();
    if e_in == 0.0 {
        return 0.0;
    }
    output.energy() / e_in
}

/// Group delay as the difference of intensity-weighted centroids (seconds).
pub fn group_delay(input: &PulseEnvelope, output: &PulseEnvelope) -> f64 {
    output.centroid() - input.centroid()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::mhz_to_rad;
    use crate::pulse::{gaussian_pulse, TimeGrid};

    const US: f64 = 1e-6;

    fn probe_pulse() -> PulseEnvelope {
        let grid = TimeGrid::centered(0.0, 24.0 * US, 4096).unwrap();
        gaussian_pulse(0.0, 3.0 * US, 1.0, grid).unwrap()
    }

    fn conversion_medium() -> MediumParams {
        MediumParams {
            alpha: 110.0,
            gamma: 3e-3,
            omega_c: 3.0,
            omega_d: 3.0,
            delta_one: mhz_to_rad(-205.0),
            ..Default::default()
        }
    }

    #[test]
    fn empty_medium_passes_pulse_through() {
        let p = MediumParams {
            alpha: 0.0,
            omega_c: 3.0,
            omega_d: 3.0,
            ..Default::default()
        };
        let input = probe_pulse();
        let (probe, signal) = propagate_pulse(&p, 0.0, &input, Port::Probe).unwrap();
        assert!((energy_transmission(&input, &probe) - 1.0).abs() < 1e-12);
        assert!(signal.energy() < 1e-20);
        assert!(group_delay(&input, &probe).abs() < 1e-12 * US);
    }

    #[test]
    fn balanced_conversion_point() {
        // Near-50/50 operation: converted and surviving transmissions around
        // 0.45 each with sub-microsecond positive delays.
        let input = probe_pulse();
        let (probe, signal) =
            propagate_pulse(&conversion_medium(), 0.0, &input, Port::Probe).unwrap();
        let t_probe = energy_transmission(&input, &probe);
        let t_signal = energy_transmission(&input, &signal);
        assert!(
            (t_signal - 0.46).abs() < 0.10,
            "converted transmission {t_signal}"
        );
        assert!(
            (t_probe - 0.45).abs() < 0.10,
            "surviving transmission {t_probe}"
        );
        let d_probe = group_delay(&input, &probe);
        let d_signal = group_delay(&input, &signal);
        assert!(d_probe > 0.0 && d_probe < 1.0 * US, "probe delay {d_probe}");
        assert!(
            d_signal > 0.0 && d_signal < 1.0 * US,
            "signal delay {d_signal}"
        );
    }

    #[test]
    fn signal_input_side() {
        // Feeding the detuned port: surviving output stays near half, the
        // converted component is delayed, the surviving one barely moves.
        let input = probe_pulse();
        let (probe, signal) =
            propagate_pulse(&conversion_medium(), 0.0, &input, Port::Signal).unwrap();
        let t_surviving = energy_transmission(&input, &signal);
        let t_converted = energy_transmission(&input, &probe);
        assert!(
            (t_surviving - 0.53).abs() < 0.10,
            "surviving transmission {t_surviving}"
        );
        assert!(
            (t_converted - 0.38).abs() < 0.10,
            "converted transmission {t_converted}"
        );
        let d_converted = group_delay(&input, &probe);
        let d_surviving = group_delay(&input, &signal);
        assert!(
            d_converted > 0.05 * US && d_converted < 0.5 * US,
            "converted delay {d_converted}"
        );
        assert!(
            d_surviving.abs() < 0.1 * US,
            "surviving delay {d_surviving}"
        );
    }

    #[test]
    fn linear_in_the_input() {
        let input = probe_pulse();
        let p = conversion_medium();
        let (probe_1, signal_1) = propagate_pulse(&p, 0.0, &input, Port::Probe).unwrap();
        let k = C64::new(0.3, -1.7);
        let scaled_in = input.scaled(k);
        let (probe_k, signal_k) = propagate_pulse(&p, 0.0, &scaled_in, Port::Probe).unwrap();
        let peak = probe_1.peak_abs();
        for i in 0..input.grid.n {
            assert!((probe_k.amplitude[i] - k * probe_1.amplitude[i]).norm() < 1e-12 * peak);
            assert!((signal_k.amplitude[i] - k * signal_1.amplitude[i]).norm() < 1e-12 * peak);
        }
    }

    #[test]
    fn wraparound_guard() {
        let grid = TimeGrid::centered(0.0, 4.0 * US, 1024).unwrap();
        let mut amp = vec![C64::new(0.0, 0.0); 1024];
        for (i, a) in amp.iter_mut().enumerate() {
            *a = C64::new(1.0 + i as f64 / 1024.0, 0.0); // hot at both edges
        }
        let input = PulseEnvelope::new(grid, amp).unwrap();
        let err = propagate_pulse(&conversion_medium(), 0.0, &input, Port::Probe).unwrap_err();
        assert!(matches!(err, Error::GridTruncation { .. }));
    }

    #[test]
    fn grid_refinement_is_converged() {
        // Doubling the sample count changes the transmissions only at the
        // rounding level.
        let p = conversion_medium();
        let coarse_grid = TimeGrid::centered(0.0, 24.0 * US, 2048).unwrap();
        let fine_grid = TimeGrid::centered(0.0, 24.0 * US, 4096).unwrap();
        let coarse_in = gaussian_pulse(0.0, 3.0 * US, 1.0, coarse_grid).unwrap();
        let fine_in = gaussian_pulse(0.0, 3.0 * US, 1.0, fine_grid).unwrap();
        let (pc, sc) = propagate_pulse(&p, 0.0, &coarse_in, Port::Probe).unwrap();
        let (pf, sf) = propagate_pulse(&p, 0.0, &fine_in, Port::Probe).unwrap();
        let tc = (
            energy_transmission(&coarse_in, &pc),
            energy_transmission(&coarse_in, &sc),
        );
        let tf = (
            energy_transmission(&fine_in, &pf),
            energy_transmission(&fine_in, &sf),
        );
        assert!((tc.0 - tf.0).abs() < 1e-6);
        assert!((tc.1 - tf.1).abs() < 1e-6);
    }
}
