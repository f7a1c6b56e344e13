//! Density-matrix evolution of the walker+coin system in the position basis.
//!
//! One step applies, in order, the coin dephasing map `1_w (x) D_kappa`, the
//! coin flip `1_w (x) C`, and the conditional shift
//! `F = S (x) |+1><+1| + S^H (x) |-1><-1|`. The lattice is sized to the full
//! walk length up front, so the light cone `|x| <= t` and the parity rule
//! `P(x; t) = 0 for odd x + t` hold exactly (the corresponding matrix entries
//! are never touched by any arithmetic).

use crate::channel::{CoinDensity, StepSchedule};
use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// A validated 2x2 coin operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoinOperator {
    entries: [[C64; 2]; 2],
}

impl CoinOperator {
    /// Builds a coin operator, checking unitarity to 1e-12.
    pub fn new(entries: [[C64; 2]; 2]) -> Result<Self> {
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for l in 0..2 {
                    acc += entries[l][i].conj() * entries[l][j];
                }
                let expect = if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) };
                if (acc - expect).norm() > 1e-12 {
                    return Err(Error::InvalidParameter("coin operator is not unitary".into()));
                }
            }
        }
        Ok(Self { entries })
    }

    /// The Hadamard coin.
    pub fn hadamard() -> Self {
        let h = C64::new(FRAC_1_SQRT_2, 0.0);
        Self { entries: [[h, h], [h, -h]] }
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[row][col]
    }
}

impl Default for CoinOperator {
    fn default() -> Self {
        Self::hadamard()
    }
}

/// Configuration of one walk run.
#[derive(Debug, Clone)]
pub struct WalkConfig {
    steps: usize,
    initial_coin: CoinDensity,
    coin_op: CoinOperator,
    schedule: StepSchedule,
}

impl WalkConfig {
    /// A walk with the given schedule, the Hadamard coin operator and the
    /// symmetric initial coin `(|+1> + i|-1>)/sqrt(2)`.
    pub fn new(steps: usize, schedule: StepSchedule) -> Result<Self> {
        Self::with_coin(steps, CoinDensity::symmetric(), CoinOperator::hadamard(), schedule)
    }

    pub fn with_coin(
        steps: usize,
        initial_coin: CoinDensity,
        coin_op: CoinOperator,
        schedule: StepSchedule,
    ) -> Result<Self> {
        if schedule.len() < steps {
            return Err(Error::InvalidParameter(format!(
                "schedule provides {} factors for {} steps",
                schedule.len(),
                steps
            )));
        }
        Ok(Self { steps, initial_coin, coin_op, schedule })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn initial_coin(&self) -> &CoinDensity {
        &self.initial_coin
    }

    pub fn coin_op(&self) -> &CoinOperator {
        &self.coin_op
    }

    pub fn schedule(&self) -> &StepSchedule {
        &self.schedule
    }
}

/// Walker+coin density matrix on the truncated lattice `x in [-L, L]`.
///
/// Basis ordering is position-major, then coin `{+1, -1}`:
/// `index(x, c) = 2 (x + L) + c` with coin 0 the right-mover `|+1>`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    t: usize,
    half_width: usize,
    rho: DMatrix<C64>,
}

impl JointState {
    /// Walker at the origin holding `coin`, on a lattice sized for `steps`
    /// walk steps.
    pub fn at_origin(steps: usize, coin: &CoinDensity) -> Self {
        let half_width = steps;
        let dim = 2 * (2 * half_width + 1);
        let mut rho = DMatrix::zeros(dim, dim);
        let origin = 2 * half_width; // index of (x = 0, c = 0)
        for c in 0..2 {
            for cp in 0..2 {
                rho[(origin + c, origin + cp)] = coin.entry(c, cp);
            }
        }
        Self { t: 0, half_width, rho }
    }

    pub fn t(&self) -> usize {
        self.t
    }

    pub fn half_width(&self) -> usize {
        self.half_width
    }

    /// Dimension of the dense matrix, `2 (2L + 1)`.
    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    fn index(&self, x: i64, coin: usize) -> usize {
        2 * (x + self.half_width as i64) as usize + coin
    }

    /// Matrix element `<x, c| rho |x', c'>`.
    pub fn entry(&self, x: i64, coin: usize, xp: i64, coin_p: usize) -> C64 {
        self.rho[(self.index(x, coin), self.index(xp, coin_p))]
    }

    /// Overwrites the 2x2 coin block at a position pair. Used by coin-side
    /// channels and measurements; physicality remains the caller's business.
    pub fn set_coin_block(&mut self, x: i64, xp: i64, block: &[[C64; 2]; 2]) {
        for c in 0..2 {
            for cp in 0..2 {
                let (i, j) = (self.index(x, c), self.index(xp, cp));
                self.rho[(i, j)] = block[c][cp];
            }
        }
    }

    /// Positions carrying support at the current step: `|x| <= t` with
    /// `x + t` even.
    pub fn support(&self) -> Vec<i64> {
        let t = self.t as i64;
        (-t..=t).step_by(2).collect()
    }

    /// Trace of the density matrix.
    pub fn trace(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.rho.nrows() {
            acc += self.rho[(i, i)];
        }
        acc
    }

    /// Largest entrywise deviation from Hermitian symmetry.
    pub fn hermiticity_residual(&self) -> f64 {
        let n = self.rho.nrows();
        let mut res = 0.0f64;
        for i in 0..n {
            for j in i..n {
                res = res.max((self.rho[(i, j)] - self.rho[(j, i)].conj()).norm());
            }
        }
        res
    }

    /// Purity `Tr(rho^2)`, exact for Hermitian rho.
    pub fn purity(&self) -> f64 {
        self.rho.iter().map(|z| z.norm_sqr()).sum()
    }

    /// Largest |entry| outside the light cone `|x| <= t` (0 when the
    /// invariant holds; the evolution keeps these entries untouched).
    pub fn max_abs_outside_light_cone(&self) -> f64 {
        let t = self.t as i64;
        let l = self.half_width as i64;
        let mut res = 0.0f64;
        for x in -l..=l {
            for xp in -l..=l {
                if x.abs() <= t && xp.abs() <= t {
                    continue;
                }
                for c in 0..2 {
                    for cp in 0..2 {
                        res = res.max(self.entry(x, c, xp, cp).norm());
                    }
                }
            }
        }
        res
    }

    /// Walker-side block `<x| (1 (x) <c|) rho (1 (x) |c'>) |x'>` restricted to
    /// the support sublattice. Rows/columns follow [`Self::support`] order.
    pub fn coin_block(&self, coin: usize, coin_p: usize) -> DMatrix<C64> {
        let support = self.support();
        let n = support.len();
        DMatrix::from_fn(n, n, |i, j| self.entry(support[i], coin, support[j], coin_p))
    }

    /// Reduced walker state on the support sublattice.
    pub fn reduced_walker(&self) -> DMatrix<C64> {
        self.coin_block(0, 0) + self.coin_block(1, 1)
    }

    /// Reduced 2x2 coin state.
    pub fn reduced_coin(&self) -> [[C64; 2]; 2] {
        let mut out = [[C64::new(0.0, 0.0); 2]; 2];
        let l = self.half_width as i64;
        for x in -l..=l {
            for c in 0..2 {
                for cp in 0..2 {
                    out[c][cp] += self.entry(x, c, x, cp);
                }
            }
        }
        out
    }

    /// The joint state compressed to its support, as a `2 (t+1)` square
    /// matrix with coin-major block ordering `[[R00, R01], [R10, R11]]`.
    pub fn compressed(&self) -> DMatrix<C64> {
        let support = self.support();
        let n = support.len();
        DMatrix::from_fn(2 * n, 2 * n, |i, j| {
            let (c, xi) = (i / n, i % n);
            let (cp, xj) = (j / n, j % n);
            self.entry(support[xi], c, support[xj], cp)
        })
    }

    /// Smallest eigenvalue of the (support-compressed) density matrix.
    /// Opt-in because it costs a full eigendecomposition.
    pub fn min_eigenvalue(&self) -> f64 {
        self.compressed()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |a, &b| a.min(b))
    }

    /// Advances one step: dephasing with `kappa`, coin flip, conditional
    /// shift. Fails when the lattice cannot hold another step.
    pub fn step(&self, kappa: C64, coin_op: &CoinOperator) -> Result<JointState> {
        if self.t >= self.half_width {
            return Err(Error::LatticeOverflow { step: self.t + 1, half_width: self.half_width });
        }
        if kappa.norm() > 1.0 + 1e-15 {
            return Err(Error::KappaOutOfRange(kappa.norm()));
        }
        let positions = 2 * self.half_width + 1;
        let mut rho = self.rho.clone();

        // 1 (x) dephasing: coin coherences scale by kappa, populations fixed.
        let kc = kappa.conj();
        for xi in 0..positions {
            for xj in 0..positions {
                rho[(2 * xi, 2 * xj + 1)] *= kc;
                rho[(2 * xi + 1, 2 * xj)] *= kappa;
            }
        }

        // 1 (x) C: conjugate every 2x2 coin block by the coin operator.
        let c = coin_op;
        for xi in 0..positions {
            for xj in 0..positions {
                let b = [
                    [rho[(2 * xi, 2 * xj)], rho[(2 * xi, 2 * xj + 1)]],
                    [rho[(2 * xi + 1, 2 * xj)], rho[(2 * xi + 1, 2 * xj + 1)]],
                ];
                for r in 0..2 {
                    for s in 0..2 {
                        let mut acc = C64::new(0.0, 0.0);
                        for p in 0..2 {
                            for q in 0..2 {
                                acc += c.entry(r, p) * b[p][q] * c.entry(s, q).conj();
                            }
                        }
                        rho[(2 * xi + r, 2 * xj + s)] = acc;
                    }
                }
            }
        }

        // F: index permutation (x, 0) -> (x+1, 0), (x, 1) -> (x-1, 1).
        let dim = rho.nrows();
        let mut shifted = DMatrix::zeros(dim, dim);
        let l = self.half_width as i64;
        let t_next = self.t as i64 + 1;
        for x in -l..=l {
            for c in 0..2usize {
                let x_to = if c == 0 { x + 1 } else { x - 1 };
                if x_to.abs() > l {
                    continue; // source entries here are zero by the light cone
                }
                for xp in -l..=l {
                    for cp in 0..2usize {
                        let xp_to = if cp == 0 { xp + 1 } else { xp - 1 };
                        if xp_to.abs() > l {
                            continue;
                        }
                        let v = rho[(self.index(x, c), self.index(xp, cp))];
                        if v != C64::new(0.0, 0.0) {
                            shifted[(self.index(x_to, c), self.index(xp_to, cp))] = v;
                        }
                    }
                }
            }
        }
        debug_assert!(t_next as usize <= self.half_width);

        Ok(JointState { t: self.t + 1, half_width: self.half_width, rho: shifted })
    }
}

/// Iterator over the states of a walk, yielding `t = 0 ..= steps`.
pub struct Evolution {
    config: WalkConfig,
    current: Option<JointState>,
    emitted: usize,
}

impl Iterator for Evolution {
    type Item = Result<JointState>;

    fn next(&mut self) -> Option<Self::Item> {
        let state = self.current.as_ref()?;
        if self.emitted == 0 {
            self.emitted = 1;
            return Some(Ok(state.clone()));
        }
        if self.emitted > self.config.steps() {
            return None;
        }
        let kappa = self.config.schedule().factor(self.emitted - 1);
        match state.step(kappa, self.config.coin_op()) {
            Ok(next) => {
                self.emitted += 1;
                self.current = Some(next.clone());
                Some(Ok(next))
            }
            Err(e) => {
                self.current = None;
                Some(Err(e))
            }
        }
    }
}

/// Evolves the configured walk, yielding a state per step starting with the
/// initial state.
pub fn evolve(config: &WalkConfig) -> Evolution {
    let initial = JointState::at_origin(config.steps(), config.initial_coin());
    Evolution { config: config.clone(), current: Some(initial), emitted: 0 }
}

/// Runs the walk to completion and collects every state. Prefer streaming
/// over [`evolve`] for long runs; a 100-step trajectory holds ~260 MB.
pub fn evolve_collect(config: &WalkConfig) -> Result<Vec<JointState>> {
    evolve(config).collect()
}

/// Probabilities `P(x; t)` for `x in [-t, t]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PositionDistribution {
    t: usize,
    probabilities: Vec<f64>,
}

impl PositionDistribution {
    pub fn t(&self) -> usize {
        self.t
    }

    /// `P(x)`; zero outside `[-t, t]`.
    pub fn probability(&self, x: i64) -> f64 {
        let t = self.t as i64;
        if x < -t || x > t {
            0.0
        } else {
            self.probabilities[(x + t) as usize]
        }
    }

    /// `(x, P(x))` pairs over `[-t, t]`.
    pub fn points(&self) -> impl Iterator<Item = (i64, f64)> + '_ {
        let t = self.t as i64;
        self.probabilities.iter().enumerate().map(move |(i, &p)| (i as i64 - t, p))
    }

    pub fn total(&self) -> f64 {
        self.probabilities.iter().sum()
    }
}

/// Position distribution of a state, tracing over the coin.
pub fn position_distribution(state: &JointState) -> PositionDistribution {
    let t = state.t() as i64;
    let probabilities = (-t..=t)
        .map(|x| state.entry(x, 0, x, 0).re + state.entry(x, 1, x, 1).re)
        .collect();
    PositionDistribution { t: state.t(), probabilities }
}

/// m-th raw moment `sum_x x^m P(x)` for `m in {1, 2}`.
pub fn moments(dist: &PositionDistribution, m: u32) -> Result<f64> {
    if !(1..=2).contains(&m) {
        return Err(Error::InvalidParameter(format!("moment order must be 1 or 2, got {m}")));
    }
    Ok(dist.points().map(|(x, p)| (x as f64).powi(m as i32) * p).sum())
}

/// Variance `<x^2> - <x>^2`.
pub fn variance(dist: &PositionDistribution) -> f64 {
    let m1 = moments(dist, 1).expect("m = 1 is valid");
    let m2 = moments(dist, 2).expect("m = 2 is valid");
    m2 - m1 * m1
}

/// Dispersion `sigma = sqrt(var)`.
pub fn dispersion(dist: &PositionDistribution) -> f64 {
    variance(dist).max(0.0).sqrt()
}

/// Symmetric binomial baseline: the classical random walk after `t` steps,
/// `P(x) = C(t, (t+x)/2) / 2^t` on `{-t, -t+2, ..., t}`.
pub fn classical_rw_distribution(t: usize) -> PositionDistribution {
    let mut probabilities = vec![0.0; 2 * t + 1];
    // binomial weights by the stable multiplicative recurrence
    let mut w = 0.5f64.powi(t as i32);
    for k in 0..=t {
        probabilities[2 * k] = w;
        w *= (t - k) as f64 / (k + 1) as f64;
    }
    PositionDistribution { t, probabilities }
}
