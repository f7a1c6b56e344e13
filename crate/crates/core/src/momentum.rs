//! Momentum-space analysis of the dephasing walk.
//!
//! In the `k` basis one step acts on the coin alone, as dephasing followed by
//! the Hadamard flip and the shift phases. On the Pauli components
//! `(r2, r3, r4) = (Tr sx rho, Tr sy rho, Tr sz rho)` the step is the real
//! 3x3 matrix `M_k`; the trace component is untouched. Velocity correlators
//! then give the exact finite-time moments as geometric matrix sums,
//!
//! ```text
//! <x>   =   (1/2pi) int dk  e3^T (1-M)^-1 (M - M^{t+1}) r,
//! <x^2> = t + (1/2pi) int dk  e3^T [t - R + R M^t] R M (0, 0, 2)^T,
//! ```
//!
//! with `R = (1-M)^-1`, and in the long-time limit the closed forms
//!
//! ```text
//! <x>   -> (r2 Re k - r3 Im k + r4 |k|^2) / (1 - |k|^2),
//! <x^2> -> t (1 + |k|^2)/(1 - |k|^2) - (7/2) 2|k|^2/(1 - |k|^2)^2.
//! ```
//!
//! The k integrals are smooth and 2pi-periodic, so uniform trapezoidal
//! quadrature converges spectrally.

use crate::channel::CoinDensity;
use crate::error::{Error, Result};
use crate::C64;
use nalgebra::{Matrix3, Vector3};

/// Pauli components of a coin operator; `r1` is the trace component and is 1
/// for a state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochVector {
    pub r1: f64,
    pub r2: f64,
    pub r3: f64,
    pub r4: f64,
}

impl BlochVector {
    /// Components of a valid coin state (`r1 = 1`, Bloch norm <= 1).
    pub fn new(r2: f64, r3: f64, r4: f64) -> Result<Self> {
        let norm_sq = r2 * r2 + r3 * r3 + r4 * r4;
        if norm_sq > 1.0 + 1e-12 {
            return Err(Error::InvalidState(format!(
                "Bloch norm {} exceeds 1",
                norm_sq.sqrt()
            )));
        }
        Ok(Self { r1: 1.0, r2, r3, r4 })
    }

    pub fn from_coin(coin: &CoinDensity) -> Self {
        let (r2, r3, r4) = coin.bloch();
        Self { r1: 1.0, r2, r3, r4 }
    }

    /// The symmetric initial coin `(|+1> + i|-1>)/sqrt(2)`, Bloch (0, 1, 0).
    pub fn symmetric_coin() -> Self {
        Self { r1: 1.0, r2: 0.0, r3: 1.0, r4: 0.0 }
    }

    fn vec3(&self) -> Vector3<f64> {
        Vector3::new(self.r2, self.r3, self.r4)
    }
}

/// One-step superoperator at momentum `k` restricted to the Pauli block.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentumMatrix {
    pub k: f64,
    pub kappa: C64,
    pub m: Matrix3<f64>,
}

/// Settings for the uniform trapezoidal k quadrature on `[-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub points: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        Self { points: 1024 }
    }
}

impl QuadratureSettings {
    pub fn new(points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParameter("quadrature needs at least 2 points".into()));
        }
        Ok(Self { points })
    }

    /// Averages `f` over `k in [-pi, pi]` with weight `1/2pi`. The integrand
    /// is periodic, so the rule uses `points` uniform panels with equal
    /// weights, summed in fixed index order.
    pub fn average<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let n = self.points;
        let h = std::f64::consts::TAU / n as f64;
        let mut acc = 0.0;
        for i in 0..n {
            let k = -std::f64::consts::PI + i as f64 * h;
            acc += f(k);
        }
        acc / n as f64
    }
}

/// Builds `M_k` for a coherence factor kappa: the composition of dephasing,
/// Hadamard conjugation and the shift-phase rotation on the Pauli components.
pub fn build_mk(k: f64, kappa: C64) -> Result<MomentumMatrix> {
    if kappa.norm() > 1.0 + 1e-15 {
        return Err(Error::KappaOutOfRange(kappa.norm()));
    }
    let (a, b) = (kappa.re, kappa.im);
    let s = (2.0 * k).sin();
    let c = (2.0 * k).cos();
    let m = Matrix3::new(
        s * b, s * a, c, //
        -c * b, -c * a, s, //
        a, -b, 0.0,
    );
    Ok(MomentumMatrix { k, kappa, m })
}

fn check_strict_contraction(kappa: C64) -> Result<f64> {
    let magnitude = kappa.norm();
    if (magnitude - 1.0).abs() <= 1e-12 {
        return Err(Error::ResolventSingular);
    }
    if magnitude > 1.0 {
        return Err(Error::KappaOutOfRange(magnitude));
    }
    Ok(magnitude)
}

fn matrix_power(m: &Matrix3<f64>, mut exp: usize) -> Matrix3<f64> {
    let mut base = *m;
    let mut acc = Matrix3::identity();
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= base;
        }
        base = base * base;
        exp >>= 1;
    }
    acc
}

fn resolvent(m: &Matrix3<f64>) -> Matrix3<f64> {
    (Matrix3::identity() - m)
        .try_inverse()
        .expect("1 - M_k is invertible for |kappa| < 1 (det = 1 - |kappa|^2)")
}

/// Exact first moment after `t` steps of the frozen-kappa walk,
/// `<x> = (1/2pi) int dk e3^T (1-M)^-1 (M - M^{t+1}) r`.
pub fn first_moment_exact(
    t: usize,
    kappa: C64,
    r: &BlochVector,
    quad: &QuadratureSettings,
) -> Result<f64> {
    check_strict_contraction(kappa)?;
    if t < 1 {
        return Err(Error::InvalidParameter("first_moment_exact requires t >= 1".into()));
    }
    let rv = r.vec3();
    Ok(quad.average(|k| {
        let m = build_mk(k, kappa).expect("|kappa| < 1 checked").m;
        let geo = resolvent(&m) * (m - matrix_power(&m, t + 1));
        (geo * rv).z
    }))
}

/// Exact second moment after `t` steps of the frozen-kappa walk,
/// `<x^2> = t + (1/2pi) int dk e3^T [t - R + R M^t] R M (0, 0, 2)^T`,
/// the closed form of the nested geometric sum
/// `sum_{j=1}^{t} sum_{j'=1}^{j-1} M^{j-j'}`.
pub fn second_moment_exact(
    t: usize,
    kappa: C64,
    _r: &BlochVector,
    quad: &QuadratureSettings,
) -> Result<f64> {
    check_strict_contraction(kappa)?;
    if t < 1 {
        return Err(Error::InvalidParameter("second_moment_exact requires t >= 1".into()));
    }
    let correction = quad.average(|k| {
        let m = build_mk(k, kappa).expect("|kappa| < 1 checked").m;
        let res = resolvent(&m);
        let rm = res * m;
        let sum = rm.scale(t as f64) - res * rm + res * rm * matrix_power(&m, t);
        2.0 * sum[(2, 2)]
    });
    Ok(t as f64 + correction)
}

/// Long-time limit of the first moment,
/// `(r2 Re k - r3 Im k + r4 |k|^2) / (1 - |k|^2)`.
pub fn longtime_first_moment(kappa: C64, r: &BlochVector) -> Result<f64> {
    let magnitude = check_strict_contraction(kappa)?;
    let u = magnitude * magnitude;
    Ok((r.r2 * kappa.re - r.r3 * kappa.im + r.r4 * u) / (1.0 - u))
}

/// Long-time position variance,
/// `var = t (1 + u)/(1 - u) - 7u/(1 - u)^2 - <x>_inf^2` with `u = |kappa|^2`.
///
/// The second moment is independent of the initial coin; the subtracted
/// square of the asymptotic first moment is not.
pub fn longtime_variance(t: usize, kappa: C64, r: &BlochVector) -> Result<f64> {
    let magnitude = check_strict_contraction(kappa)?;
    let u = magnitude * magnitude;
    let mean = longtime_first_moment(kappa, r)?;
    let second = t as f64 * (1.0 + u) / (1.0 - u) - 7.0 * u / ((1.0 - u) * (1.0 - u));
    Ok(second - mean * mean)
}
