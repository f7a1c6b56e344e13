//! Reservoir kernel and decoherence function.
//!
//! A Lorentzian reservoir on resonance with the coin qubit yields the
//! exponential two-point correlation function `f(t) = g0*eta*exp(-eta|t|)/2`.
//! The decoherence function `kappa(t)` solves the integro-differential
//! equation
//!
//! ```text
//! d/dt kappa(t) = -int_0^t f(t - s) kappa(s) ds,    kappa(0) = 1,
//! ```
//!
//! and admits a closed form in both coupling regimes. The instantaneous
//! dephasing rate `gamma(t) = -Re[kd/kappa]` and energy shift
//! `epsilon(t) = -Im[kd/kappa]` follow by logarithmic differentiation;
//! `gamma(t) < 0` on some interval is the signature of non-Markovianity.

use crate::error::{Error, Result};
use crate::C64;

/// Threshold on |kappa| below which the rates are reported as singular
/// rather than as finite-difference noise.
pub const RATE_SINGULARITY_THRESHOLD: f64 = 1e-8;

/// Coupling regime of the exponential kernel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `g0 <= eta/2`: |kappa| decreases monotonically (the boundary
    /// `g0 = eta/2` is classified as weak and handled by an analytic limit).
    Weak,
    /// `g0 > eta/2`: kappa oscillates and changes sign.
    Strong,
}

/// Parameters of the exponential reservoir kernel.
///
/// `g0` is the coupling strength between the coin qubit and its environment,
/// `eta` the spectral width; both carry units of inverse time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    g0: f64,
    eta: f64,
}

impl KernelParams {
    /// Creates kernel parameters, requiring `g0 > 0` and `eta > 0`.
    pub fn new(g0: f64, eta: f64) -> Result<Self> {
        if g0 <= 0.0 || !g0.is_finite() {
            return Err(Error::InvalidParameter(format!("g0 must be positive, got {g0}")));
        }
        if eta <= 0.0 || !eta.is_finite() {
            return Err(Error::InvalidParameter(format!("eta must be positive, got {eta}")));
        }
        Ok(Self { g0, eta })
    }

    pub fn g0(&self) -> f64 {
        self.g0
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// Regime classification; the degenerate point `g0 = eta/2` counts as weak.
    pub fn regime(&self) -> Regime {
        if self.g0 > self.eta / 2.0 {
            Regime::Strong
        } else {
            Regime::Weak
        }
    }

    /// `d = sqrt(eta^2 - 2 g0 eta)`, real in the weak regime.
    pub fn d(&self) -> f64 {
        (self.eta * self.eta - 2.0 * self.g0 * self.eta).max(0.0).sqrt()
    }

    /// `d' = Im{d} = sqrt(2 g0 eta - eta^2)`, real in the strong regime.
    /// The positive root is taken; the closed form is even in `d'`.
    pub fn d_prime(&self) -> f64 {
        (2.0 * self.g0 * self.eta - self.eta * self.eta).max(0.0).sqrt()
    }
}

/// Sampled decoherence function kappa(t) on a uniform time grid.
#[derive(Debug, Clone)]
pub struct DecoherenceFunction {
    params: KernelParams,
    dt: f64,
    samples: Vec<(f64, C64)>,
}

impl DecoherenceFunction {
    /// Grid spacing.
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &KernelParams {
        &self.params
    }

    /// The `(t, kappa(t))` samples, starting at `(0, 1)`.
    pub fn samples(&self) -> &[(f64, C64)] {
        &self.samples
    }

    /// Largest sampled time.
    pub fn t_max(&self) -> f64 {
        self.samples.last().map(|&(t, _)| t).unwrap_or(0.0)
    }

    /// kappa at an arbitrary time in the sampled range, by linear
    /// interpolation between the bracketing grid nodes.
    pub fn kappa_at(&self, t: f64) -> Result<C64> {
        if t < 0.0 || t > self.t_max() + 1e-12 {
            return Err(Error::OutOfRange { t, t_max: self.t_max() });
        }
        let n = self.samples.len();
        let idx = (t / self.dt).floor() as usize;
        if idx + 1 >= n {
            return Ok(self.samples[n - 1].1);
        }
        let (t0, k0) = self.samples[idx];
        let (t1, k1) = self.samples[idx + 1];
        let w = (t - t0) / (t1 - t0);
        Ok(k0 * (1.0 - w) + k1 * w)
    }

    /// Index of the grid node nearest to `t`.
    fn nearest_index(&self, t: f64) -> Result<usize> {
        if t < -1e-12 || t > self.t_max() + 1e-12 {
            return Err(Error::OutOfRange { t, t_max: self.t_max() });
        }
        let idx = (t / self.dt).round() as usize;
        Ok(idx.min(self.samples.len() - 1))
    }
}

/// Instantaneous dephasing rate and energy shift at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSample {
    pub t: f64,
    /// Decay rate `gamma(t) = -Re[kd/kappa]`; negative values flag
    /// non-Markovian backflow.
    pub gamma: f64,
    /// Energy shift `epsilon(t) = -Im[kd/kappa]`; zero for the resonant
    /// (real) kernel.
    pub epsilon: f64,
    /// Set when |kappa| is below [`RATE_SINGULARITY_THRESHOLD`] and the
    /// logarithmic derivative is meaningless; `gamma`/`epsilon` are then 0.
    pub singular: bool,
}

/// Exponential two-point correlation function `f(t) = g0*eta*exp(-eta|t|)/2`.
pub fn correlation_function(params: &KernelParams, t: f64) -> f64 {
    0.5 * params.g0 * params.eta * (-params.eta * t.abs()).exp()
}

/// Closed-form decoherence function.
///
/// Weak regime (`g0 <= eta/2`, `d = sqrt(eta^2 - 2 g0 eta)`):
///
/// ```text
/// kappa(t) = exp(-eta t/2) [cosh(d t/2) + (eta/d) sinh(d t/2)]
/// ```
///
/// Strong regime (`g0 > eta/2`, `d' = sqrt(2 g0 eta - eta^2)`):
///
/// ```text
/// kappa(t) = exp(-eta t/2) [cos(d' t/2) + (eta/d') sin(d' t/2)]
/// ```
///
/// The degenerate point `d = 0` uses the removable-singularity limit
/// `kappa(t) = exp(-eta t/2) (1 + eta t/2)`. The result is real for this
/// kernel and returned as a complex scalar with zero imaginary part.
pub fn kappa_closed_form(params: &KernelParams, t: f64) -> Result<C64> {
    if t < 0.0 {
        return Err(Error::InvalidParameter(format!("t must be nonnegative, got {t}")));
    }
    let eta = params.eta;
    let envelope = (-eta * t / 2.0).exp();
    let value = match params.regime() {
        Regime::Weak => {
            let d = params.d();
            if d < 1e-14 * eta {
                envelope * (1.0 + eta * t / 2.0)
            } else {
                // cosh/sinh grow like exp(dt/2) with d < eta, so the product
                // with the envelope stays bounded; combine exponentials to
                // avoid overflow at large eta*t.
                let ep = (-(eta - d) * t / 2.0).exp();
                let em = (-(eta + d) * t / 2.0).exp();
                0.5 * (ep + em) + (eta / d) * 0.5 * (ep - em)
            }
        }
        Regime::Strong => {
            let dp = params.d_prime();
            envelope * ((dp * t / 2.0).cos() + (eta / dp) * (dp * t / 2.0).sin())
        }
    };
    Ok(C64::new(value, 0.0))
}

/// Solves the kappa integro-differential equation for the exponential kernel
/// on the grid `{0, dt, ..., ~t_max}` with a second-order predictor-corrector
/// and a trapezoidal memory integral.
///
/// The exponential kernel lets the memory integral be updated in O(1) per
/// step, so the whole solve is O(t_max/dt). Global error is O(dt^2).
pub fn kappa_volterra(params: &KernelParams, dt: f64, t_max: f64) -> Result<DecoherenceFunction> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if t_max < dt {
        return Err(Error::InvalidParameter(format!(
            "t_max = {t_max} must be at least dt = {dt}"
        )));
    }
    let n_steps = (t_max / dt).round() as usize;
    let n_steps = n_steps.max(1);
    let g0 = params.g0;
    let eta = params.eta;
    let f0 = 0.5 * g0 * eta;
    let decay = (-eta * dt).exp();

    let mut samples = Vec::with_capacity(n_steps + 1);
    samples.push((0.0, C64::new(1.0, 0.0)));

    // Trapezoidal memory integral at t_n:
    //   I_n = dt * f0 * (J_n + kappa_n / 2),
    //   J_n = sum_{m=1}^{n-1} exp(-eta (n-m) dt) kappa_m
    //       + (1/2) exp(-eta n dt) kappa_0,
    // with the recursion J_{n+1} = exp(-eta dt) (J_n + kappa_n). Seeding
    // J_0 = -kappa_0/2 makes the recursion uniform and gives I_0 = 0.
    let mut kappa = C64::new(1.0, 0.0);
    let mut j_acc = C64::new(-0.5, 0.0);
    for n in 0..n_steps {
        let deriv_n = -dt * f0 * (j_acc + 0.5 * kappa);
        // Predict kappa_{n+1}, then correct with the trapezoidal rule in time.
        let predicted = kappa + deriv_n * dt;
        let j_next = (j_acc + kappa) * decay;
        let deriv_next = -dt * f0 * (j_next + 0.5 * predicted);
        let next = kappa + (deriv_n + deriv_next) * (dt / 2.0);
        samples.push(((n + 1) as f64 * dt, next));
        kappa = next;
        j_acc = j_next;
    }

    Ok(DecoherenceFunction { params: *params, dt, samples })
}

/// Samples the closed-form kappa on a uniform grid. Useful where the exact
/// values are wanted without solver error (schedules, analytic columns).
pub fn sample_closed_form(
    params: &KernelParams,
    dt: f64,
    t_max: f64,
) -> Result<DecoherenceFunction> {
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if t_max < dt {
        return Err(Error::InvalidParameter(format!(
            "t_max = {t_max} must be at least dt = {dt}"
        )));
    }
    let n_steps = ((t_max / dt).round() as usize).max(1);
    let samples = (0..=n_steps)
        .map(|n| {
            let t = n as f64 * dt;
            kappa_closed_form(params, t).map(|k| (t, k))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DecoherenceFunction { params: *params, dt, samples })
}

/// Generic Volterra solver for an arbitrary kernel callback `f(t)`.
///
/// Same predictor-corrector scheme as [`kappa_volterra`] but with the full
/// O(n^2) trapezoidal history sum; only the exponential kernel is shipped
/// and tested beyond smoke level.
pub fn volterra_solve<F>(kernel: F, dt: f64, t_max: f64) -> Result<Vec<(f64, C64)>>
where
    F: Fn(f64) -> f64,
{
    if dt <= 0.0 || !dt.is_finite() {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    if t_max < dt {
        return Err(Error::InvalidParameter(format!(
            "t_max = {t_max} must be at least dt = {dt}"
        )));
    }
    let n_steps = ((t_max / dt).round() as usize).max(1);
    let f_grid: Vec<f64> = (0..=n_steps + 1).map(|m| kernel(m as f64 * dt)).collect();
    let mut kappas: Vec<C64> = Vec::with_capacity(n_steps + 1);
    kappas.push(C64::new(1.0, 0.0));

    let memory = |kappas: &[C64], n: usize, tail: C64| -> C64 {
        // integral_0^{t_n} f(t_n - s) kappa(s) ds, trapezoid, with kappa(t_n) = tail
        if n == 0 {
            return C64::new(0.0, 0.0);
        }
        let mut acc = 0.5 * f_grid[n] * kappas[0];
        for m in 1..n {
            acc += f_grid[n - m] * kappas[m];
        }
        acc += 0.5 * f_grid[0] * tail;
        acc * dt
    };

    for n in 0..n_steps {
        let kn = kappas[n];
        let deriv_n = -memory(&kappas, n, kn);
        let predicted = kn + deriv_n * dt;
        kappas.push(predicted); // placeholder at index n+1 for the corrector pass
        let deriv_next = -memory(&kappas, n + 1, predicted);
        kappas[n + 1] = kn + (deriv_n + deriv_next) * (dt / 2.0);
    }

    Ok(kappas
        .into_iter()
        .enumerate()
        .map(|(i, k)| (i as f64 * dt, k))
        .collect())
}

/// Dephasing rate and energy shift at the grid node nearest to `t`.
///
/// The derivative is a central finite difference on the sample grid
/// (one-sided at the ends). Near zeros of kappa the sample is flagged
/// singular instead of returning non-finite values.
pub fn rates(df: &DecoherenceFunction, t: f64) -> Result<RateSample> {
    let idx = df.nearest_index(t)?;
    let samples = df.samples();
    let n = samples.len();
    let (t_i, kappa) = samples[idx];
    if kappa.norm() < RATE_SINGULARITY_THRESHOLD {
        return Ok(RateSample { t: t_i, gamma: 0.0, epsilon: 0.0, singular: true });
    }
    let dt = df.dt();
    let derivative = if idx == 0 {
        (samples[1].1 - samples[0].1) / dt
    } else if idx == n - 1 {
        (samples[n - 1].1 - samples[n - 2].1) / dt
    } else {
        (samples[idx + 1].1 - samples[idx - 1].1) / (2.0 * dt)
    };
    let log_deriv = derivative / kappa;
    Ok(RateSample {
        t: t_i,
        gamma: -log_deriv.re,
        epsilon: -log_deriv.im,
        singular: false,
    })
}
