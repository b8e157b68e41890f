//! Jacobi theta and Dedekind eta on the upper half-plane, and the
//! determinant of the flat-bundle Laplacian on an elliptic curve expressed
//! through them. Product formulas are primary; independent q-series serve
//! as oracles in the tests.

use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};

const CI: Complex64 = Complex64::new(0.0, 1.0);

/// A modulus τ in the upper half-plane, with nome q = e^{iπτ}.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModularPoint {
    tau: Complex64,
}

impl ModularPoint {
    pub fn new(tau: Complex64) -> Result<Self> {
        // Finite-and-positive, stated so that NaN fails both clauses.
        let ok = tau.im.is_finite() && tau.im > 0.0 && tau.re.is_finite();
        if !ok {
            return Err(Error::OutOfDomain("modulus must satisfy Im τ > 0".into()));
        }
        Ok(ModularPoint { tau })
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn y(&self) -> f64 {
        self.tau.im
    }

    /// q^p = e^{iπτp}, evaluated through the exponential so that fractional
    /// powers never touch a branch cut.
    pub fn q_pow(&self, p: f64) -> Complex64 {
        (CI * PI * self.tau * p).exp()
    }
}

/// A character of the torus fundamental group, A ↦ e^{2πia}, B ↦ e^{2πib},
/// stored with a, b reduced to [0, 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlatCharacter {
    a: f64,
    b: f64,
}

impl FlatCharacter {
    pub fn new(a: f64, b: f64) -> Self {
        FlatCharacter {
            a: a.rem_euclid(1.0),
            b: b.rem_euclid(1.0),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn is_trivial(&self) -> bool {
        self.a == 0.0 && self.b == 0.0
    }
}

/// Number of product factors after which the remaining tail multiplies the
/// result by 1 + O(1e−16): each factor beyond m deviates from 1 by at most
/// (2 + 2e^{2π|Im z|})|q|^{2m}.
fn terms_needed(m: &ModularPoint, im_z: f64) -> usize {
    let log_c = (2.0 + 2.0 * (2.0 * PI * im_z.abs()).exp()).ln();
    let needed = (log_c + 16.0 * std::f64::consts::LN_10) / (2.0 * PI * m.y());
    (needed.ceil() as usize).clamp(8, 512)
}

/// ϑ(z, τ) = −2q^{1/4} sin(πz) Π_{m≥1} (1−q^{2m})(1 − 2cos(2πz)q^{2m} + q^{4m}),
/// truncated when the tail factor is within 1e−16 of 1.
pub fn jacobi_theta(z: Complex64, m: &ModularPoint) -> Complex64 {
    jacobi_theta_with_terms(z, m, terms_needed(m, z.im))
}

/// Product evaluation with an explicit factor count (convergence control).
pub fn jacobi_theta_with_terms(z: Complex64, m: &ModularPoint, terms: usize) -> Complex64 {
    let pi_z = PI * z;
    let cos2 = (2.0 * pi_z).cos();
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 1..=terms {
        let q2 = m.q_pow(2.0 * j as f64);
        let q4 = m.q_pow(4.0 * j as f64);
        prod *= (Complex64::new(1.0, 0.0) - q2) * (Complex64::new(1.0, 0.0) - 2.0 * cos2 * q2 + q4);
    }
    -2.0 * m.q_pow(0.25) * pi_z.sin() * prod
}

/// Independent series form −2Σ_{n≥0} (−1)ⁿ q^{(n+1/2)²} sin((2n+1)πz),
/// used as the oracle against the product.
pub fn theta_series_oracle(z: Complex64, m: &ModularPoint, terms: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for n in 0..terms {
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let e = (n as f64 + 0.5) * (n as f64 + 0.5);
        sum += sign * m.q_pow(e) * ((2 * n + 1) as f64 * PI * z).sin();
    }
    -2.0 * sum
}

/// η(τ) = q^{1/12} Π_{n≥1} (1 − q^{2n}) with the same truncation rule.
pub fn dedekind_eta(m: &ModularPoint) -> Complex64 {
    dedekind_eta_with_terms(m, terms_needed(m, 0.0))
}

/// Product evaluation with an explicit factor count (convergence control).
pub fn dedekind_eta_with_terms(m: &ModularPoint, terms: usize) -> Complex64 {
    let mut prod = Complex64::new(1.0, 0.0);
    for j in 1..=terms {
        prod *= Complex64::new(1.0, 0.0) - m.q_pow(2.0 * j as f64);
    }
    m.q_pow(1.0 / 12.0) * prod
}

/// Pentagonal-number series q^{1/12} Σ_k (−1)ᵏ q^{k(3k−1)}, the oracle for
/// the eta product.
pub fn eta_pentagonal_oracle(m: &ModularPoint, terms: usize) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    for k in -(terms as i64)..=(terms as i64) {
        let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let e = (k * (3 * k - 1)) as f64;
        sum += sign * m.q_pow(e);
    }
    m.q_pow(1.0 / 12.0) * sum
}

/// Determinant of the flat-bundle Laplacian over the elliptic curve with
/// modulus τ and character (a, b):
/// e^{−2πa²·Im τ} |ϑ(b − τa, τ)|² / |η(τ)|².
/// Nonnegative, zero exactly at the trivial character.
pub fn ray_singer_det(c: &FlatCharacter, m: &ModularPoint) -> f64 {
    ray_singer_det_raw(c.a(), c.b(), m)
}

/// Same formula at unreduced (a, b): the lattice invariance under a → a+1
/// and b → b+1 is a theta quasi-periodicity statement and is tested against
/// this literal evaluation.
pub fn ray_singer_det_raw(a: f64, b: f64, m: &ModularPoint) -> f64 {
    let z = Complex64::new(b, 0.0) - m.tau() * a;
    let theta = jacobi_theta(z, m);
    let eta = dedekind_eta(m);
    (-2.0 * PI * a * a * m.y()).exp() * theta.norm_sqr() / eta.norm_sqr()
}
