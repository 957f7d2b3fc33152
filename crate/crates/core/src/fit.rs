//! Least-squares fit of a Gaussian peak (or dip) on a flat baseline.
//!
//! Model: `y(t) = A exp(-8 (t - c)^2 / w^2) + B`, where `w` is the e^-2 full
//! width of the Gaussian. Solved by Levenberg-Marquardt with an analytic
//! Jacobian. The abscissa is internally shifted and scaled to O(1) so the
//! normal equations stay well conditioned for microsecond-scale times.

use crate::error::{Error, Result};

/// Residual weighting for the fit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Weighting {
    /// Plain least squares; parameter covariance scaled by the residual
    /// variance.
    Uniform,
    /// Weights 1/max(y, 1), appropriate for Poisson-distributed counts;
    /// covariance taken directly from the weighted normal matrix.
    PoissonCounts,
}

/// Fit result. Parameter order in `covariance` is
/// (amplitude, center, e2_full_width, baseline).
#[derive(Clone, Debug)]
pub struct GaussianBaselineFit {
    pub amplitude: f64,
    pub center: f64,
    pub e2_full_width: f64,
    pub baseline: f64,
    pub covariance: [[f64; 4]; 4],
    pub rms_residual: f64,
    pub iterations: usize,
}

impl GaussianBaselineFit {
    pub fn sigma(&self, i: usize) -> f64 {
        self.covariance[i][i].max(0.0).sqrt()
    }

    /// Area under the Gaussian component (above baseline):
    /// `A w sqrt(pi/8)`, with first-order uncertainty from the (A, w) block.
    pub fn gaussian_area(&self) -> (f64, f64) {
        let k = (std::f64::consts::PI / 8.0).sqrt();
        let area = self.amplitude * self.e2_full_width * k;
        let da = self.e2_full_width * k;
        let dw = self.amplitude * k;
        let var = da * da * self.covariance[0][0]
            + dw * dw * self.covariance[2][2]
            + 2.0 * da * dw * self.covariance[0][2];
        (area, var.max(0.0).sqrt())
    }

    pub fn value_at(&self, t: f64) -> f64 {
        let x = (t - self.center) / self.e2_full_width;
        self.amplitude * (-8.0 * x * x).exp() + self.baseline
    }
}

const MAX_ITERATIONS: usize = 200;

/// Fit the four-parameter model to (x, y) samples.
pub fn fit_gaussian_baseline(
    x: &[f64],
    y: &[f64],
    weighting: Weighting,
) -> Result<GaussianBaselineFit> {
    if x.len() != y.len() || x.len() < 5 {
        return Err(Error::DegenerateData(format!(
            "need at least 5 matching samples, got {} x / {} y",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();

    // Scale the abscissa to O(1).
    let x_min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let x_max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = x_max - x_min;
    if !(span > 0.0) {
        return Err(Error::DegenerateData("zero abscissa span".into()));
    }
    let u: Vec<f64> = x.iter().map(|&t| (t - x_min) / span).collect();

    let weights: Vec<f64> = match weighting {
        Weighting::Uniform => vec![1.0; n],
        Weighting::PoissonCounts => y.iter().map(|&v| 1.0 / v.max(1.0)).collect(),
    };

    let mut params = initial_guess(&u, y)?;
    let mut lambda = 1e-3;
    let mut chi2 = chi_squared(&u, y, &weights, &params);
    let chi2_start = chi2;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let (jtj, jtr) = normal_equations(&u, y, &weights, &params);
        // Relative-gradient optimality test: |J^T W r|_i is bounded by
        // sqrt(chi2 (J^T W J)_ii), so this ratio is scale free.
        let gmax = jtr.iter().map(|g| g.abs()).fold(0.0, f64::max);
        let diag_max = (0..4).map(|i| jtj[i][i]).fold(0.0, f64::max);
        let at_optimum =
            gmax <= 1e-10 * (chi2 * diag_max).sqrt().max(1e-300) || chi2 <= 1e-24 * chi2_start;
        if at_optimum {
            converged = true;
            break;
        }
        // Damped normal matrix.
        let mut damped = jtj;
        for (i, row) in damped.iter_mut().enumerate() {
            row[i] *= 1.0 + lambda;
        }
        let step = solve4(&damped, &jtr);
        let accepted = step.map(|step| {
            let mut trial = [
                params[0] + step[0],
                params[1] + step[1],
                params[2] + step[2],
                params[3] + step[3],
            ];
            trial[2] = trial[2].abs().max(1e-9); // model is even in w
            let trial_chi2 = chi_squared(&u, y, &weights, &trial);
            (step, trial, trial_chi2)
        });
        match accepted {
            Some((_, trial, trial_chi2)) if trial_chi2.is_finite() && trial_chi2 <= chi2 => {
                let improvement = (chi2 - trial_chi2) / chi2.max(1e-300);
                params = trial;
                chi2 = trial_chi2;
                lambda = (lambda / 3.0).max(1e-12);
                if improvement < 1e-8 {
                    converged = true;
                    break;
                }
            }
            Some((step, _, _)) => {
                // Rejected step. Once the damping is heavy and the proposed
                // move is negligible relative to the parameters, nothing
                // representable improves chi2 any further.
                let rel_step = step
                    .iter()
                    .zip(params.iter())
                    .map(|(s, p)| s.abs() / p.abs().max(1e-12))
                    .fold(0.0, f64::max);
                if lambda > 1e6 && rel_step < 1e-9 {
                    converged = true;
                    break;
                }
                lambda *= 10.0;
                if lambda > 1e12 && rel_step > 1e-6 {
                    return Err(Error::FitDiverged {
                        iterations,
                        last_residual: (chi2 / n as f64).sqrt(),
                    });
                }
            }
            None => {
                lambda *= 10.0;
                if lambda > 1e12 {
                    return Err(Error::FitDiverged {
                        iterations,
                        last_residual: (chi2 / n as f64).sqrt(),
                    });
                }
            }
        }
    }
    if !converged {
        return Err(Error::FitDiverged {
            iterations,
            last_residual: (chi2 / n as f64).sqrt(),
        });
    }

    // Covariance in scaled coordinates, then mapped back.
    let (jtj, _) = normal_equations(&u, y, &weights, &params);
    let mut cov = invert4(&jtj)
        .ok_or_else(|| Error::DegenerateData("singular normal matrix at the optimum".into()))?;
    if weighting == Weighting::Uniform {
        let dof = (n as isize - 4).max(1) as f64;
        let s2 = chi2 / dof;
        for row in cov.iter_mut() {
            for v in row.iter_mut() {
                *v *= s2;
            }
        }
    }
    // u = (t - x_min)/span: center and width scale by `span`.
    let scale = [1.0, span, span, 1.0];
    let mut covariance = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            covariance[i][j] = cov[i][j] * scale[i] * scale[j];
        }
    }

    Ok(GaussianBaselineFit {
        amplitude: params[0],
        center: x_min + params[1] * span,
        e2_full_width: params[2] * span,
        baseline: params[3],
        covariance,
        rms_residual: (chi2 / n as f64).sqrt(),
        iterations,
    })
}

fn initial_guess(u: &[f64], y: &[f64]) -> Result<[f64; 4]> {
    let n = u.len();
    // Baseline from the outer quarter of samples on each side.
    let edge = (n / 4).max(1);
    let baseline: f64 =
        y[..edge].iter().chain(y[n - edge..].iter()).sum::<f64>() / (2 * edge) as f64;
    // The extremum relative to the baseline locates the peak or dip.
    let (k_ext, dev) = y
        .iter()
        .enumerate()
        .map(|(k, &v)| (k, v - baseline))
        .max_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
        .unwrap();
    if dev == 0.0 {
        return Err(Error::DegenerateData("flat data, nothing to fit".into()));
    }
    // Width from the half-maximum crossings around the extremum. A global
    // moment would be swamped by baseline noise on low-count data.
    let half = 0.5 * dev.abs();
    let mut lo = k_ext;
    while lo > 0 && (y[lo] - baseline).abs() > half {
        lo -= 1;
    }
    let mut hi = k_ext;
    while hi + 1 < n && (y[hi] - baseline).abs() > half {
        hi += 1;
    }
    let fwhm = (u[hi] - u[lo]).max(u[1] - u[0]);
    // exp(-8 x^2 / w^2) falls to 1/2 over w sqrt(ln2 / 8) either side.
    let width = (fwhm / (2.0 * (std::f64::consts::LN_2 / 8.0).sqrt())).min(1.5);
    Ok([dev, u[k_ext], width, baseline])
}

fn model(u: f64, p: &[f64; 4]) -> f64 {
    let x = (u - p[1]) / p[2];
    p[0] * (-8.0 * x * x).exp() + p[3]
}

fn chi_squared(u: &[f64], y: &[f64], w: &[f64], p: &[f64; 4]) -> f64 {
    u.iter()
        .zip(y)
        .zip(w)
        .map(|((&ui, &yi), &wi)| {
            let r = yi - model(ui, p);
            wi * r * r
        })
        .sum()
}

fn normal_equations(u: &[f64], y: &[f64], w: &[f64], p: &[f64; 4]) -> ([[f64; 4]; 4], [f64; 4]) {
    let mut jtj = [[0.0; 4]; 4];
    let mut jtr = [0.0; 4];
    for ((&ui, &yi), &wi) in u.iter().zip(y).zip(w) {
        let d = ui - p[1];
        let x = d / p[2];
        let e = (-8.0 * x * x).exp();
        let j = [
            e,
            p[0] * e * 16.0 * d / (p[2] * p[2]),
            p[0] * e * 16.0 * d * d / (p[2] * p[2] * p[2]),
            1.0,
        ];
        let r = yi - model(ui, p);
        for a in 0..4 {
            jtr[a] += wi * j[a] * r;
            for b in 0..4 {
                jtj[a][b] += wi * j[a] * j[b];
            }
        }
    }
    (jtj, jtr)
}

/// Solve a 4x4 system by Gaussian elimination with partial pivoting.
fn solve4(a: &[[f64; 4]; 4], b: &[f64; 4]) -> Option<[f64; 4]> {
    let mut m = *a;
    let mut v = *b;
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-300 {
            return None;
        }
        m.swap(col, pivot);
        v.swap(col, pivot);
        for row in col + 1..4 {
            let f = m[row][col] / m[col][col];
            let pivot_row = m[col];
            for (entry, pivot) in m[row][col..].iter_mut().zip(&pivot_row[col..]) {
                *entry -= f * pivot;
            }
            v[row] -= f * v[col];
        }
    }
    let mut x = [0.0; 4];
    for col in (0..4).rev() {
        let mut s = v[col];
        for k in col + 1..4 {
            s -= m[col][k] * x[k];
        }
        x[col] = s / m[col][col];
    }
    x.iter().all(|q| q.is_finite()).then_some(x)
}

fn invert4(a: &[[f64; 4]; 4]) -> Option<[[f64; 4]; 4]> {
    let mut inv = [[0.0; 4]; 4];
    for col in 0..4 {
        let mut e = [0.0; 4];
        e[col] = 1.0;
        let x = solve4(a, &e)?;
        for row in 0..4 {
            inv[row][col] = x[row];
        }
    }
    Some(inv)
}
