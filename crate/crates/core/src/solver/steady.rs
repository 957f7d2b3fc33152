//! Steady-state response of the dual-lambda medium and the resulting
//! two-mode transfer matrix.
//!
//! Model (weak fields to first order, rotating frame, time in units of the
//! excited-state decay rate):
//!
//! ```text
//! d rho31 / dt = (i/2) Op + (i/2) Oc rho21 - (1/2 - i d) rho31
//! d rho41 / dt = (i/2) Os + (i/2) Od rho21 - (1/2 - i (d + D)) rho41
//! d rho21 / dt = (i/2) Oc rho31 + (i/2) Od rho41 - (g - i d) rho21
//! ```
//!
//! with `d` the two-photon detuning, `D` the one-photon detuning of the
//! detuned pair, and `g` the ground-state decoherence rate. Setting the time
//! derivatives to zero makes the coherences linear in the weak fields,
//! `rho = C (Op, Os)`, and the field-propagation equations become
//! `d(Op, Os)/dzeta = G (Op, Os)` over the normalized depth `zeta in [0, 1]`
//! with the constant generator `G = (i alpha / 2) C` (plus a linear phase
//! term on the converted mode when a residual mismatch is configured).
//! The transfer matrix is `exp(G)`.

use num_complex::Complex64 as C64;

use crate::beamsplitter::{wrap_phase, BsCoefficients};
use crate::error::{Error, Result};
use crate::mat2::Mat2;
use crate::params::MediumParams;

const I: C64 = C64::new(0.0, 1.0);

/// First-order coherence amplitudes driven by given weak-field amplitudes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coherences {
    pub rho31: C64,
    pub rho41: C64,
    pub rho21: C64,
}

/// Complex two-mode map at one spectral detuning. Column basis is
/// (probe-in, signal-in); row basis is (probe-out, signal-out).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransferMatrix {
    pub m: Mat2,
    /// Two-photon detuning at which the matrix was evaluated, rad/s.
    pub delta: f64,
}

/// Complex decay denominators of the optical coherences plus the dressed
/// ground-state denominator, all in decay-rate units.
struct Denominators {
    g3: C64,
    g4: C64,
    /// D = (gamma - i d) + Oc^2/(4 g3) + Od^2/(4 g4).
    d: C64,
}

fn denominators(p: &MediumParams, delta: f64) -> Result<Denominators> {
    let dl = delta / p.gamma_sp;
    let dd = p.delta_one / p.gamma_sp;
    let g3 = C64::new(0.5, -dl);
    let g4 = C64::new(0.5, -(dl + dd));
    let g2 = C64::new(p.gamma, -dl);
    let d = g2 + p.omega_c * p.omega_c / (4.0 * g3) + p.omega_d * p.omega_d / (4.0 * g4);
    if d.norm() < 1e-300 {
        return Err(Error::SingularSystem(format!(
            "dressed denominator vanished at delta = {delta} rad/s"
        )));
    }
    Ok(Denominators { g3, g4, d })
}

/// Steady-state coherences for weak-field amplitudes (omega_p, omega_s),
/// both in units of the excited-state decay rate.
pub fn steady_state_coherences(
    p: &MediumParams,
    delta: f64,
    omega_p: C64,
    omega_s: C64,
) -> Result<Coherences> {
    p.validate()?;
    p.require_control_fields()?;
    let Denominators { g3, g4, d } = denominators(p, delta)?;
    let rho21 = -(p.omega_c * omega_p / g3 + p.omega_d * omega_s / g4) / (4.0 * d);
    let rho31 = I / (2.0 * g3) * (omega_p + p.omega_c * rho21);
    let rho41 = I / (2.0 * g4) * (omega_s + p.omega_d * rho21);
    Ok(Coherences {
        rho31,
        rho41,
        rho21,
    })
}

/// Generator of the depth evolution, d(Op, Os)/dzeta = G (Op, Os).
pub(crate) fn generator(p: &MediumParams, delta: f64) -> Result<Mat2> {
    let Denominators { g3, g4, d, .. } = denominators(p, delta)?;
    let oc = p.omega_c;
    let od = p.omega_d;
    // rho = C (Op, Os), columns from unit probe / unit signal input.
    let c11 = I / (2.0 * g3) * (1.0 - oc * oc / (4.0 * d * g3));
    let c12 = I / (2.0 * g3) * (-(oc * od) / (4.0 * d * g4));
    let c21 = I / (2.0 * g4) * (-(oc * od) / (4.0 * d * g3));
    let c22 = I / (2.0 * g4) * (1.0 - od * od / (4.0 * d * g4));
    let k = I * (0.5 * p.alpha);
    let mut g = Mat2::new(k * c11, k * c12, k * c21, k * c22);
    // Residual phase mismatch: linear phase picked up by the converted mode
    // across the medium.
    g.m22 += I * p.delta_k_l;
    Ok(g)
}

/// Steady-state transfer matrix at two-photon detuning `delta` (rad/s),
/// by exact exponentiation of the depth generator.
pub fn transfer_matrix(p: &MediumParams, delta: f64) -> Result<TransferMatrix> {
    p.validate()?;
    p.require_control_fields()?;
    if p.alpha == 0.0 {
        return Ok(TransferMatrix {
            m: Mat2::identity(),
            delta,
        });
    }
    let m = generator(p, delta)?.exp();
    if !m.is_finite() {
        return Err(Error::NonFinite("transfer matrix"));
    }
    Ok(TransferMatrix { m, delta })
}

/// Independent route to the same matrix: fixed-step RK4 integration of
/// dM/dzeta = G M from the identity. Used to cross-check the exponential.
pub fn transfer_matrix_rk4(p: &MediumParams, delta: f64, n_steps: usize) -> Result<TransferMatrix> {
    p.validate()?;
    p.require_control_fields()?;
    if p.alpha == 0.0 {
        return Ok(TransferMatrix {
            m: Mat2::identity(),
            delta,
        });
    }
    let g = generator(p, delta)?;
    let h = C64::new(1.0 / n_steps as f64, 0.0);
    let half = C64::new(0.5, 0.0);
    let sixth = C64::new(1.0 / 6.0, 0.0);
    let two = C64::new(2.0, 0.0);
    let mut m = Mat2::identity();
    for _ in 0..n_steps {
        let k1 = g.matmul(&m);
        let k2 = g.matmul(&m.add(&k1.scale(h * half)));
        let k3 = g.matmul(&m.add(&k2.scale(h * half)));
        let k4 = g.matmul(&m.add(&k3.scale(h)));
        let incr = k1.add(&k2.scale(two)).add(&k3.scale(two)).add(&k4);
        m = m.add(&incr.scale(h * sixth));
    }
    if !m.is_finite() {
        return Err(Error::NonFinite("transfer matrix (rk4)"));
    }
    Ok(TransferMatrix { m, delta })
}

/// Read the beam-splitter moduli and phases off a transfer matrix.
///
/// Zero entries yield zero modulus and, by convention, zero phase; use
/// [`has_degenerate_phase`] to detect that case.
pub fn extract_bs_coefficients(tm: &TransferMatrix) -> BsCoefficients {
    let m = &tm.m;
    BsCoefficients {
        t1: m.m11.norm(),
        r1: m.m21.norm(),
        t2: m.m22.norm(),
        r2: m.m12.norm(),
        phi1: wrap_phase(phase_or_zero(m.m21) - phase_or_zero(m.m11)),
        phi2: wrap_phase(phase_or_zero(m.m12) - phase_or_zero(m.m22)),
    }
}

/// True when any modulus vanishes, so the corresponding phase difference is
/// a convention rather than a measurement.
pub fn has_degenerate_phase(c: &BsCoefficients) -> bool {
    c.t1 == 0.0 || c.r1 == 0.0 || c.t2 == 0.0 || c.r2 == 0.0
}

fn phase_or_zero(z: C64) -> f64 {
    if z.norm() == 0.0 {
        0.0
    } else {
        z.arg()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::mhz_to_rad;

    fn tuning_medium(alpha: f64) -> MediumParams {
        MediumParams {
            alpha,
            gamma: 3e-3,
            omega_c: 3.0,
            omega_d: 3.0,
            delta_one: mhz_to_rad(-205.0),
            ..Default::default()
        }
    }

    #[test]
    fn empty_medium_is_identity() {
        let p = tuning_medium(0.0);
        let tm = transfer_matrix(&p, 0.0).unwrap();
        assert!((tm.m.m11 - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!((tm.m.m22 - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(tm.m.m12.norm() < 1e-15);
        assert!(tm.m.m21.norm() < 1e-15);
    }

    #[test]
    fn far_detuned_signal_decouples() {
        let p = MediumParams {
            delta_one: -1e6 * crate::params::GAMMA_SP_DEFAULT,
            gamma: 0.0,
            ..tuning_medium(130.0)
        };
        let tm = transfer_matrix(&p, 0.0).unwrap();
        assert!((tm.m.m22.norm() - 1.0).abs() < 1e-4);
        assert!(tm.m.m12.norm() < 1e-4);
        assert!(tm.m.m21.norm() < 1e-4);
        // Probe sees plain EIT at line center: near-unit transmission too.
        assert!((tm.m.m11.norm() - 1.0).abs() < 1e-2);
    }

    #[test]
    fn resonant_probe_without_controls_errors() {
        let p = MediumParams {
            omega_c: 0.0,
            omega_d: 0.0,
            ..tuning_medium(10.0)
        };
        assert!(matches!(
            transfer_matrix(&p, 0.0),
            Err(Error::SingularSystem(_))
        ));
    }

    #[test]
    fn exponential_matches_rk4_route() {
        let p = tuning_medium(130.0);
        for delta_mhz in [0.0, -1.0, 0.7, 2.0] {
            let delta = mhz_to_rad(delta_mhz);
            let a = transfer_matrix(&p, delta).unwrap().m;
            let b = transfer_matrix_rk4(&p, delta, 10_000).unwrap().m;
            for (x, y) in [
                (a.m11, b.m11),
                (a.m12, b.m12),
                (a.m21, b.m21),
                (a.m22, b.m22),
            ] {
                assert!((x - y).norm() < 1e-8, "delta {delta_mhz} MHz: {x} vs {y}");
            }
        }
    }

    #[test]
    fn coherences_linear_in_weak_fields() {
        let p = tuning_medium(130.0);
        let delta = mhz_to_rad(0.3);
        let base =
            steady_state_coherences(&p, delta, C64::new(0.7, 0.1), C64::new(-0.2, 0.4)).unwrap();
        let k = C64::new(-1.3, 2.2);
        let scaled =
            steady_state_coherences(&p, delta, k * C64::new(0.7, 0.1), k * C64::new(-0.2, 0.4))
                .unwrap();
        assert!((scaled.rho31 - k * base.rho31).norm() < 1e-14);
        assert!((scaled.rho41 - k * base.rho41).norm() < 1e-14);
        assert!((scaled.rho21 - k * base.rho21).norm() < 1e-14);
    }

    #[test]
    fn conversion_is_symmetric_without_mismatch() {
        // The off-diagonal couplings are equal by construction, so the
        // exponential stays symmetric.
        let p = MediumParams {
            omega_c: 1.4,
            omega_d: 3.1,
            gamma: 2e-3,
            ..tuning_medium(90.0)
        };
        let tm = transfer_matrix(&p, mhz_to_rad(0.4)).unwrap();
        assert!((tm.m.m12 - tm.m.m21).norm() < 1e-12);
    }

    #[test]
    fn extraction_of_identity() {
        let tm = TransferMatrix {
            m: Mat2::identity(),
            delta: 0.0,
        };
        let c = extract_bs_coefficients(&tm);
        assert_eq!(c.t1, 1.0);
        assert_eq!(c.t2, 1.0);
        assert_eq!(c.r1, 0.0);
        assert_eq!(c.r2, 0.0);
        assert!(has_degenerate_phase(&c));
    }

    #[test]
    fn extraction_of_symmetric_splitter() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let tm = TransferMatrix {
            m: Mat2::new(
                C64::new(s, 0.0),
                C64::new(0.0, s),
                C64::new(0.0, s),
                C64::new(s, 0.0),
            ),
            delta: 0.0,
        };
        let c = extract_bs_coefficients(&tm);
        assert!((c.t1 - s).abs() < 1e-15);
        assert!((c.r1 - s).abs() < 1e-15);
        assert!((c.phi1 - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((c.phi2 - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        assert!((c.gate_phase() - std::f64::consts::PI).abs() < 1e-15);
        assert!(!has_degenerate_phase(&c));
    }

    #[test]
    fn large_mismatch_suppresses_conversion() {
        let matched = tuning_medium(130.0);
        let r1_matched = extract_bs_coefficients(&transfer_matrix(&matched, 0.0).unwrap()).r1;
        let mismatched = MediumParams {
            delta_k_l: 40.0,
            ..matched
        };
        let tm = transfer_matrix(&mismatched, 0.0).unwrap();
        let c = extract_bs_coefficients(&tm);
        assert!(
            c.r1 < 0.2 * r1_matched,
            "conversion {} not suppressed (matched {})",
            c.r1,
            r1_matched
        );
        assert!(tm.m.max_singular_value() <= 1.0 + 1e-6);
    }

    #[test]
    fn mismatch_skews_the_two_photon_response() {
        // The detuned pair already tilts the two-photon response a little;
        // a residual mismatch makes the asymmetry much stronger.
        let asym = |p: &MediumParams| -> f64 {
            let delta = mhz_to_rad(0.8);
            let plus = transfer_matrix(p, delta).unwrap().m.m11.norm_sqr();
            let minus = transfer_matrix(p, -delta).unwrap().m.m11.norm_sqr();
            (plus - minus).abs()
        };
        let base = MediumParams {
            delta_one: mhz_to_rad(-135.0),
            ..tuning_medium(130.0)
        };
        let skewed = MediumParams {
            delta_k_l: 1.5,
            ..base
        };
        assert!(
            asym(&skewed) > 2.5 * asym(&base),
            "mismatch asymmetry {} vs base {}",
            asym(&skewed),
            asym(&base)
        );
    }

    #[test]
    fn balanced_point_coefficients() {
        // Walk the tuning curve to the 50/50 crossing beyond -100 MHz and
        // read the coefficients there: both intensities near 0.44 with
        // total transmission around 0.88.
        let p = MediumParams {
            delta_one: 0.0,
            ..tuning_medium(130.0)
        };
        let mut best: Option<(f64, BsCoefficients)> = None;
        for i in 0..400 {
            let delta_one = mhz_to_rad(-300.0 + 200.0 * i as f64 / 399.0);
            let tm = transfer_matrix(&MediumParams { delta_one, ..p }, 0.0).unwrap();
            let c = extract_bs_coefficients(&tm);
            let split = c.r1 * c.r1 / (c.t1 * c.t1 + c.r1 * c.r1);
            let dist = (split - 0.5).abs();
            if best.as_ref().map(|(d, _)| dist < *d).unwrap_or(true) {
                best = Some((dist, c));
            }
        }
        let (_, c) = best.unwrap();
        assert!((c.t1 * c.t1 - 0.44).abs() < 0.05, "t1^2 = {}", c.t1 * c.t1);
        assert!((c.r1 * c.r1 - 0.44).abs() < 0.05, "r1^2 = {}", c.r1 * c.r1);
        let total = c.t1 * c.t1 + c.r1 * c.r1;
        assert!((total - 0.88).abs() < 0.05, "total = {total}");
    }

    #[test]
    fn passivity_at_tuning_extremes() {
        for alpha in [0.0, 20.0, 130.0, 200.0] {
            for delta_mhz in [-2.0, 0.0, 2.0] {
                for d1_mhz in [-300.0, -125.0, 0.0, 90.0] {
                    let p = MediumParams {
                        delta_one: mhz_to_rad(d1_mhz),
                        ..tuning_medium(alpha)
                    };
                    let tm = transfer_matrix(&p, mhz_to_rad(delta_mhz)).unwrap();
                    let sv = tm.m.max_singular_value();
                    assert!(
                        sv <= 1.0 + 1e-6,
                        "sv = {sv} at alpha {alpha}, delta {delta_mhz}, Delta {d1_mhz}"
                    );
                }
            }
        }
    }
}
