//! Direct time-domain co-integration of the coherence and field equations.
//!
//! This is the independent verification route for the spectral method: the
//! coherence equations are integrated in retarded time (RK4) at each depth
//! slice, and the two field envelopes are marched in depth with a first-order
//! upwind step. Nothing here reuses the steady-state solution.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::params::MediumParams;
use crate::pulse::PulseEnvelope;
use crate::solver::spectral::Port;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy)]
struct CoherenceState {
    rho31: C64,
    rho41: C64,
    rho21: C64,
}

impl CoherenceState {
    fn zero() -> Self {
        Self {
            rho31: C64::new(0.0, 0.0),
            rho41: C64::new(0.0, 0.0),
            rho21: C64::new(0.0, 0.0),
        }
    }
}

struct Rates {
    /// 1/2 - i delta0, in decay-rate units.
    g3: C64,
    /// 1/2 - i (delta0 + Delta).
    g4: C64,
    /// gamma - i delta0.
    g2: C64,
    omega_c: f64,
    omega_d: f64,
}

impl Rates {
    fn derivative(&self, s: &CoherenceState, op: C64, os: C64) -> CoherenceState {
        CoherenceState {
            rho31: 0.5 * I * (op + self.omega_c * s.rho21) - self.g3 * s.rho31,
            rho41: 0.5 * I * (os + self.omega_d * s.rho21) - self.g4 * s.rho41,
            rho21: 0.5 * I * (self.omega_c * s.rho31 + self.omega_d * s.rho41) - self.g2 * s.rho21,
        }
    }
}

fn rk4_step(
    rates: &Rates,
    s: &CoherenceState,
    dt: f64,
    om0: (C64, C64),
    om1: (C64, C64),
) -> CoherenceState {
    let om_mid = (0.5 * (om0.0 + om1.0), 0.5 * (om0.1 + om1.1));
    let k1 = rates.derivative(s, om0.0, om0.1);
    let s2 = CoherenceState {
        rho31: s.rho31 + 0.5 * dt * k1.rho31,
        rho41: s.rho41 + 0.5 * dt * k1.rho41,
        rho21: s.rho21 + 0.5 * dt * k1.rho21,
    };
    let k2 = rates.derivative(&s2, om_mid.0, om_mid.1);
    let s3 = CoherenceState {
        rho31: s.rho31 + 0.5 * dt * k2.rho31,
        rho41: s.rho41 + 0.5 * dt * k2.rho41,
        rho21: s.rho21 + 0.5 * dt * k2.rho21,
    };
    let k3 = rates.derivative(&s3, om_mid.0, om_mid.1);
    let s4 = CoherenceState {
        rho31: s.rho31 + dt * k3.rho31,
        rho41: s.rho41 + dt * k3.rho41,
        rho21: s.rho21 + dt * k3.rho21,
    };
    let k4 = rates.derivative(&s4, om1.0, om1.1);
    let sixth = dt / 6.0;
    CoherenceState {
        rho31: s.rho31 + sixth * (k1.rho31 + 2.0 * k2.rho31 + 2.0 * k3.rho31 + k4.rho31),
        rho41: s.rho41 + sixth * (k1.rho41 + 2.0 * k2.rho41 + 2.0 * k3.rho41 + k4.rho41),
        rho21: s.rho21 + sixth * (k1.rho21 + 2.0 * k2.rho21 + 2.0 * k3.rho21 + k4.rho21),
    }
}

/// Advance the coherences across one field sample interval, sub-stepping so
/// the fastest rate (set by the one-photon detuning) stays inside the RK4
/// stability region. Fields are interpolated linearly within the interval.
fn advance_interval(
    rates: &Rates,
    mut state: CoherenceState,
    dt: f64,
    om0: (C64, C64),
    om1: (C64, C64),
    n_sub: usize,
) -> CoherenceState {
    if n_sub == 1 {
        return rk4_step(rates, &state, dt, om0, om1);
    }
    let h = dt / n_sub as f64;
    let lerp =
        |f: f64| -> (C64, C64) { (om0.0 + f * (om1.0 - om0.0), om0.1 + f * (om1.1 - om0.1)) };
    for s in 0..n_sub {
        let a = lerp(s as f64 / n_sub as f64);
        let b = lerp((s + 1) as f64 / n_sub as f64);
        state = rk4_step(rates, &state, h, a, b);
    }
    state
}

/// One full integration at fixed depth resolution `nz`. The time resolution
/// is the input grid's.
pub fn time_domain_propagate(
    p: &MediumParams,
    delta0: f64,
    input: &PulseEnvelope,
    port: Port,
    nz: usize,
) -> Result<(PulseEnvelope, PulseEnvelope)> {
    p.validate()?;
    p.require_control_fields()?;
    input.require_edges_negligible()?;
    if nz == 0 {
        return Err(Error::InvalidParam {
            name: "nz",
            reason: "need at least one depth slice".into(),
        });
    }

    let nt = input.grid.n;
    // Time in decay-rate units keeps every coefficient O(1).
    let dt = input.grid.dt * p.gamma_sp;
    let dl = delta0 / p.gamma_sp;
    let dd = p.delta_one / p.gamma_sp;
    let rates = Rates {
        g3: C64::new(0.5, -dl),
        g4: C64::new(0.5, -(dl + dd)),
        g2: C64::new(p.gamma, -dl),
        omega_c: p.omega_c,
        omega_d: p.omega_d,
    };
    // Fastest eigenvalue scale of the coherence system; keep |lambda| h <= 1.
    let rate_scale =
        rates.g3.norm().max(rates.g4.norm()).max(rates.g2.norm()) + 0.5 * (p.omega_c + p.omega_d);
    let n_sub = (dt * rate_scale).ceil().max(1.0) as usize;

    let mut probe: Vec<C64> = match port {
        Port::Probe => input.amplitude.clone(),
        Port::Signal => vec![C64::new(0.0, 0.0); nt],
    };
    let mut signal: Vec<C64> = match port {
        Port::Probe => vec![C64::new(0.0, 0.0); nt],
        Port::Signal => input.amplitude.clone(),
    };

    let dz = 1.0 / nz as f64;
    let gain = I * (0.5 * p.alpha * dz);
    let mismatch = I * (p.delta_k_l * dz);
    let mut rho31 = vec![C64::new(0.0, 0.0); nt];
    let mut rho41 = vec![C64::new(0.0, 0.0); nt];

    for _ in 0..nz {
        // Coherence response to the fields at this depth, atoms initially idle.
        let mut state = CoherenceState::zero();
        rho31[0] = state.rho31;
        rho41[0] = state.rho41;
        for k in 0..nt - 1 {
            state = advance_interval(
                &rates,
                state,
                dt,
                (probe[k], signal[k]),
                (probe[k + 1], signal[k + 1]),
                n_sub,
            );
            rho31[k + 1] = state.rho31;
            rho41[k + 1] = state.rho41;
        }
        // Upwind depth step for both envelopes.
        for k in 0..nt {
            probe[k] += gain * rho31[k];
            let s = signal[k];
            signal[k] = s + gain * rho41[k] + mismatch * s;
        }
    }

    for v in probe.iter().chain(signal.iter()) {
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::NonFinite("time-domain propagation"));
        }
    }

    Ok((
        PulseEnvelope::new(input.grid, probe)?,
        PulseEnvelope::new(input.grid, signal)?,
    ))
}

/// Time-domain route with a built-in step-halving convergence check: the
/// result at (nz, nt) must agree with the nz/2 run and with the run on a
/// time grid decimated by two, to 0.5% in both output energies.
pub fn time_domain_oracle(
    p: &MediumParams,
    delta0: f64,
    input: &PulseEnvelope,
    port: Port,
    nz: usize,
) -> Result<(PulseEnvelope, PulseEnvelope)> {
    let fine = time_domain_propagate(p, delta0, input, port, nz)?;
    let coarse_z = time_domain_propagate(p, delta0, input, port, (nz / 2).max(1))?;
    let decimated = decimate(input)?;
    let coarse_t = time_domain_propagate(p, delta0, &decimated, port, nz)?;

    let e_in = input.energy();
    let limit = 5e-3;
    let checks: [(&'static str, f64, f64); 4] = [
        (
            "probe energy vs nz/2",
            fine.0.energy() / e_in,
            coarse_z.0.energy() / e_in,
        ),
        (
            "signal energy vs nz/2",
            fine.1.energy() / e_in,
            coarse_z.1.energy() / e_in,
        ),
        (
            "probe energy vs nt/2",
            fine.0.energy() / e_in,
            coarse_t.0.energy() / decimated.energy(),
        ),
        (
            "signal energy vs nt/2",
            fine.1.energy() / e_in,
            coarse_t.1.energy() / decimated.energy(),
        ),
    ];
    for (quantity, a, b) in checks {
        let change = (a - b).abs();
        if change > limit {
            return Err(Error::NotConverged {
                quantity,
                change,
                limit,
            });
        }
    }
    Ok(fine)
}

fn decimate(input: &PulseEnvelope) -> Result<PulseEnvelope> {
    let grid = crate::pulse::TimeGrid::new(input.grid.t0, input.grid.dt * 2.0, input.grid.n / 2)?;
    let amplitude = input.amplitude.iter().step_by(2).copied().collect();
    PulseEnvelope::new(grid, amplitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::mhz_to_rad;
    use crate::pulse::{gaussian_pulse, TimeGrid};
    use crate::solver::spectral::{energy_transmission, group_delay, propagate_pulse};

    const US: f64 = 1e-6;

    fn probe_pulse(n: usize) -> PulseEnvelope {
        let grid = TimeGrid::centered(0.0, 24.0 * US, n).unwrap();
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
    fn empty_medium_identity() {
        let p = MediumParams {
            alpha: 0.0,
            omega_c: 3.0,
            omega_d: 3.0,
            ..Default::default()
        };
        let input = probe_pulse(1024);
        let (probe, signal) = time_domain_propagate(&p, 0.0, &input, Port::Probe, 4).unwrap();
        assert!((energy_transmission(&input, &probe) - 1.0).abs() < 1e-12);
        assert!(signal.energy() < 1e-20);
    }

    #[test]
    fn agrees_with_spectral_route() {
        let p = conversion_medium();
        let input = probe_pulse(2048);
        let (sp, ss) = propagate_pulse(&p, 0.0, &input, Port::Probe).unwrap();
        let (tp, ts) = time_domain_oracle(&p, 0.0, &input, Port::Probe, 1200).unwrap();
        let (tsp, tss) = (
            energy_transmission(&input, &sp),
            energy_transmission(&input, &ss),
        );
        let (ttp, tts) = (
            energy_transmission(&input, &tp),
            energy_transmission(&input, &ts),
        );
        assert!(
            (tsp - ttp).abs() < 0.01,
            "probe: spectral {tsp} vs time {ttp}"
        );
        assert!(
            (tss - tts).abs() < 0.01,
            "signal: spectral {tss} vs time {tts}"
        );
        // Delays should agree too, well within a tenth of the pulse width.
        assert!((group_delay(&input, &sp) - group_delay(&input, &tp)).abs() < 0.1 * US);
        assert!((group_delay(&input, &ss) - group_delay(&input, &ts)).abs() < 0.1 * US);
    }

    #[test]
    fn slow_light_delay_scales_with_optical_depth() {
        // Plain transparency-window propagation: far-detuned second mode so
        // only the resonant pair matters; delay doubles with alpha.
        let base = MediumParams {
            alpha: 60.0,
            gamma: 0.0,
            omega_c: 2.0,
            omega_d: 2.0,
            delta_one: mhz_to_rad(-1500.0),
            ..Default::default()
        };
        let doubled = MediumParams {
            alpha: 120.0,
            ..base
        };
        let input = probe_pulse(1024);
        let (p1, _) = time_domain_propagate(&base, 0.0, &input, Port::Probe, 300).unwrap();
        let (p2, _) = time_domain_propagate(&doubled, 0.0, &input, Port::Probe, 300).unwrap();
        let d1 = group_delay(&input, &p1);
        let d2 = group_delay(&input, &p2);
        assert!(d1 > 0.0);
        assert!((d2 / d1 - 2.0).abs() < 0.05, "d1 = {d1:e}, d2 = {d2:e}");
    }

    #[test]
    fn oracle_rejects_unresolved_settings() {
        let p = conversion_medium();
        let input = probe_pulse(2048);
        let err = time_domain_oracle(&p, 0.0, &input, Port::Probe, 4).unwrap_err();
        assert!(matches!(err, Error::NotConverged { .. }));
    }
}
