//! Minimal complex 2x2 matrix arithmetic.
//!
//! Everything in this crate lives in a two-mode field space, so a dedicated
//! fixed-size type beats pulling in a general linear-algebra stack. The one
//! nontrivial routine is the matrix exponential, computed in closed form via
//! the traceless decomposition A = (tr/2) I + B with B^2 = mu^2 I.

use num_complex::Complex64 as C64;

/// Complex 2x2 matrix, row-major: `[[m11, m12], [m21, m22]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub m11: C64,
    pub m12: C64,
    pub m21: C64,
    pub m22: C64,
}

impl Mat2 {
    pub fn new(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        Self { m11, m12, m21, m22 }
    }

    pub fn identity() -> Self {
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        Self::new(one, zero, zero, one)
    }

    pub fn zero() -> Self {
        let zero = C64::new(0.0, 0.0);
        Self::new(zero, zero, zero, zero)
    }

    pub fn trace(&self) -> C64 {
        self.m11 + self.m22
    }

    pub fn det(&self) -> C64 {
        self.m11 * self.m22 - self.m12 * self.m21
    }

    pub fn scale(&self, k: C64) -> Self {
        Self::new(k * self.m11, k * self.m12, k * self.m21, k * self.m22)
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::new(
            self.m11 + other.m11,
            self.m12 + other.m12,
            self.m21 + other.m21,
            self.m22 + other.m22,
        )
    }

    pub fn matmul(&self, other: &Self) -> Self {
        Self::new(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )
    }

    /// Matrix-vector product on a two-mode amplitude pair.
    pub fn apply(&self, v: (C64, C64)) -> (C64, C64) {
        (
            self.m11 * v.0 + self.m12 * v.1,
            self.m21 * v.0 + self.m22 * v.1,
        )
    }

    pub fn dagger(&self) -> Self {
        Self::new(
            self.m11.conj(),
            self.m21.conj(),
            self.m12.conj(),
            self.m22.conj(),
        )
    }

    pub fn is_finite(&self) -> bool {
        [self.m11, self.m12, self.m21, self.m22]
            .iter()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// exp(A), exact for 2x2: with B = A - (tr/2) I and mu^2 = -det(B),
    /// exp(A) = e^{tr/2} [cosh(mu) I + sinch(mu) B].
    pub fn exp(&self) -> Self {
        let half_tr = 0.5 * self.trace();
        let b = Self::new(self.m11 - half_tr, self.m12, self.m21, self.m22 - half_tr);
        let mu = (-b.det()).sqrt();
        let (ch, sh_over_mu) = cosh_sinch(mu);
        let prefactor = half_tr.exp();
        Self::new(
            prefactor * (ch + sh_over_mu * b.m11),
            prefactor * (sh_over_mu * b.m12),
            prefactor * (sh_over_mu * b.m21),
            prefactor * (ch + sh_over_mu * b.m22),
        )
    }

    /// Largest singular value, from the eigenvalues of M^dagger M.
    pub fn max_singular_value(&self) -> f64 {
        let g = self.dagger().matmul(self);
        // G is Hermitian positive semidefinite; diagonal entries are real.
        let a = g.m11.re;
        let d = g.m22.re;
        let off = g.m12.norm();
        let mean = 0.5 * (a + d);
        let disc = (0.5 * (a - d)).hypot(off);
        (mean + disc).max(0.0).sqrt()
    }
}

/// (cosh(mu), sinh(mu)/mu) with a series fallback for small |mu|.
fn cosh_sinch(mu: C64) -> (C64, C64) {
    if mu.norm() < 1e-4 {
        let mu2 = mu * mu;
        let one = C64::new(1.0, 0.0);
        let ch = one + mu2 * 0.5 + mu2 * mu2 / 24.0;
        let sinch = one + mu2 / 6.0 + mu2 * mu2 / 120.0;
        (ch, sinch)
    } else {
        (mu.cosh(), mu.sinh() / mu)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let e = Mat2::zero().exp();
        assert!((e.m11 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((e.m22 - c(1.0, 0.0)).norm() < 1e-15);
        assert!(e.m12.norm() < 1e-15);
        assert!(e.m21.norm() < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let a = Mat2::new(c(0.3, -0.7), c(0.0, 0.0), c(0.0, 0.0), c(-1.1, 0.4));
        let e = a.exp();
        assert!((e.m11 - a.m11.exp()).norm() < 1e-14);
        assert!((e.m22 - a.m22.exp()).norm() < 1e-14);
    }

    #[test]
    fn exp_matches_scaling_and_squaring() {
        // exp(A) == exp(A/2^k)^(2^k) with the small block summed by Taylor
        // series. Few squarings keep rounding amplification below 1e-13.
        let a = Mat2::new(c(0.2, 0.9), c(-0.4, 0.1), c(0.55, -0.3), c(-0.8, -0.6));
        let k = 10u32;
        let small = a.scale(c(2f64.powi(-(k as i32)), 0.0));
        let mut approx = Mat2::identity();
        let mut term = Mat2::identity();
        for order in 1..=12 {
            term = term.matmul(&small).scale(c(1.0 / order as f64, 0.0));
            approx = approx.add(&term);
        }
        for _ in 0..k {
            approx = approx.matmul(&approx);
        }
        let e = a.exp();
        for (x, y) in [
            (e.m11, approx.m11),
            (e.m12, approx.m12),
            (e.m21, approx.m21),
            (e.m22, approx.m22),
        ] {
            assert!((x - y).norm() < 1e-12, "x = {x}, y = {y}");
        }
    }

    #[test]
    fn exp_handles_degenerate_eigenvalues() {
        // Nilpotent upper-triangular block: exp = I + A exactly.
        let a = Mat2::new(c(0.0, 0.0), c(2.5, -1.0), c(0.0, 0.0), c(0.0, 0.0));
        let e = a.exp();
        assert!((e.m12 - a.m12).norm() < 1e-15);
        assert!((e.m11 - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn singular_values_of_unitary_are_one() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let u = Mat2::new(c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0));
        assert!((u.max_singular_value() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn singular_value_of_scaled_identity() {
        let m = Mat2::identity().scale(c(0.0, 0.37));
        assert!((m.max_singular_value() - 0.37).abs() < 1e-14);
    }
}
