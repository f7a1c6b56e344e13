//! Quantum correlations between walker and coin.
//!
//! Total correlations are measured by the quantum mutual information
//! `I = S(rho_w) + S(rho_c) - S(rho)` (entropies in bits). Coin-side
//! projective measurements `Pi rho = sum_k (1 (x) Pi_k) rho (1 (x) Pi_k)`
//! never increase it; the gap defines
//!
//! - MID: `I[rho] - I[Pi_eig rho]`, measuring in the eigenbasis of the
//!   reduced coin state (no optimization), and
//! - QD:  `I[rho] - sup_Pi I[Pi rho]`, with the supremum over all coin bases
//!   taken by a coarse Bloch-angle grid followed by Nelder-Mead refinement.
//!
//! A useful identity: measuring the coin leaves the walker marginal
//! untouched, so `I[Pi rho] = S(rho_w) + H(p) - S(Pi rho)` needs only the
//! eigenvalues of the two conditional walker blocks.
//!
//! When the coin spectrum is degenerate the MID basis is ambiguous; the
//! record is flagged and the loss-minimizing basis over the degenerate
//! subspace (here: the whole Bloch sphere) is used, which makes MID coincide
//! with QD for that step.

use crate::error::{Error, Result};
use crate::walk::JointState;
use crate::C64;
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

/// Eigenvalue-gap threshold below which the reduced coin is treated as
/// degenerate.
pub const DEGENERACY_GAP: f64 = 1e-10;

/// A pair of orthogonal rank-1 coin projectors parameterized by Bloch angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementBasis {
    theta: f64,
    phi: f64,
    b0: [C64; 2],
    b1: [C64; 2],
}

impl MeasurementBasis {
    /// Basis whose first vector points along `(theta, phi)` on the Bloch
    /// sphere: `|b0> = cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>`.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let phase = C64::from_polar(1.0, phi);
        Self {
            theta,
            phi,
            b0: [C64::new(ct, 0.0), phase * st],
            b1: [C64::new(st, 0.0), -phase * ct],
        }
    }

    /// The computational (sigma_z) basis.
    pub fn computational() -> Self {
        Self {
            theta: 0.0,
            phi: 0.0,
            b0: [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            b1: [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
        }
    }

    pub fn angles(&self) -> (f64, f64) {
        (self.theta, self.phi)
    }

    /// The two projector matrices `(Pi_0, Pi_1)`.
    pub fn projectors(&self) -> ([[C64; 2]; 2], [[C64; 2]; 2]) {
        let proj = |v: &[C64; 2]| {
            [
                [v[0] * v[0].conj(), v[0] * v[1].conj()],
                [v[1] * v[0].conj(), v[1] * v[1].conj()],
            ]
        };
        (proj(&self.b0), proj(&self.b1))
    }
}

/// Per-step correlation measures along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationRecord {
    pub t: usize,
    /// Quantum mutual information in bits.
    pub mutual_info: f64,
    /// Measurement-induced disturbance in bits.
    pub mid: f64,
    /// Quantum discord in bits.
    pub qd: f64,
    /// Bloch angles of the discord-optimal measurement.
    pub qd_argmax: (f64, f64),
    /// Set when the reduced coin spectrum was degenerate and the MID basis
    /// was resolved by optimization.
    pub degenerate: bool,
    /// Cleared when simplex refinement hit its iteration cap and fell back
    /// to the best grid point.
    pub qd_converged: bool,
}

/// Optimizer settings for the discord supremum (and the degenerate-MID
/// fallback).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationOpts {
    /// Coarse grid resolution in theta.
    pub grid_theta: usize,
    /// Coarse grid resolution in phi.
    pub grid_phi: usize,
    /// Simplex convergence tolerance on the Bloch angles.
    pub angle_tol: f64,
    /// Iteration cap for the simplex refinement.
    pub max_refine_iters: usize,
    /// Optional refinement seed (e.g. the previous step's argmax).
    pub seed_angles: Option<(f64, f64)>,
    /// Extra random refinement starts; 0 keeps the optimizer fully
    /// deterministic without a seed.
    pub random_restarts: usize,
    /// RNG seed for the random restarts.
    pub rng_seed: u64,
}

impl Default for CorrelationOpts {
    fn default() -> Self {
        Self {
            grid_theta: 32,
            grid_phi: 64,
            angle_tol: 1e-4,
            max_refine_iters: 200,
            seed_angles: None,
            random_restarts: 0,
            rng_seed: 0,
        }
    }
}

impl CorrelationOpts {
    /// A coarser grid for whole-trajectory scans, where the seed chain makes
    /// dense grids redundant.
    pub fn trajectory_default() -> Self {
        Self { grid_theta: 8, grid_phi: 16, ..Self::default() }
    }
}

/// Result of the discord optimization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscordResult {
    pub value: f64,
    pub theta: f64,
    pub phi: f64,
    pub converged: bool,
}

fn entropy_from_eigenvalues<I: IntoIterator<Item = f64>>(eigs: I) -> f64 {
    let mut acc = 0.0;
    for lambda in eigs {
        if lambda > 0.0 {
            acc -= lambda * lambda.log2();
        }
    }
    acc
}

/// Von Neumann entropy `-Tr rho log2 rho` of a Hermitian unit-trace matrix.
/// Eigenvalues above `-1e-8` are admitted and clipped to zero.
pub fn von_neumann_entropy(rho: &DMatrix<C64>) -> Result<f64> {
    let n = rho.nrows();
    if n != rho.ncols() {
        return Err(Error::InvalidState("matrix is not square".into()));
    }
    let mut trace = 0.0;
    for i in 0..n {
        trace += rho[(i, i)].re;
    }
    if (trace - 1.0).abs() > 1e-6 {
        return Err(Error::InvalidState(format!("trace = {trace}, expected 1")));
    }
    let mut herm = 0.0f64;
    for i in 0..n {
        for j in i..n {
            herm = herm.max((rho[(i, j)] - rho[(j, i)].conj()).norm());
        }
    }
    if herm > 1e-8 {
        return Err(Error::InvalidState(format!("Hermiticity residual {herm}")));
    }
    Ok(entropy_from_eigenvalues(rho.clone().symmetric_eigenvalues().iter().copied()))
}

/// Shared per-state quantities: support-compressed coin blocks and the
/// marginal/joint entropies.
struct Analysis {
    /// `blocks[c][cp]` is the walker operator `<.|(1 (x) <c|) rho (1 (x) |cp>)|.>`.
    blocks: [[DMatrix<C64>; 2]; 2],
    s_walker: f64,
    mutual_info: f64,
    coin_bloch: (f64, f64, f64),
}

impl Analysis {
    fn new(state: &JointState) -> Self {
        let blocks = [
            [state.coin_block(0, 0), state.coin_block(0, 1)],
            [state.coin_block(1, 0), state.coin_block(1, 1)],
        ];
        let walker = &blocks[0][0] + &blocks[1][1];
        let s_walker = entropy_from_eigenvalues(walker.symmetric_eigenvalues().iter().copied());

        let coin = state.reduced_coin();
        let rx = 2.0 * coin[0][1].re;
        let ry = -2.0 * coin[0][1].im;
        let rz = coin[0][0].re - coin[1][1].re;
        let norm = (rx * rx + ry * ry + rz * rz).sqrt().min(1.0);
        let s_coin = entropy_from_eigenvalues([(1.0 + norm) / 2.0, (1.0 - norm) / 2.0]);

        let s_joint =
            entropy_from_eigenvalues(state.compressed().symmetric_eigenvalues().iter().copied());
        Self {
            blocks,
            s_walker,
            mutual_info: s_walker + s_coin - s_joint,
            coin_bloch: (rx, ry, rz),
        }
    }

    /// Conditional walker block for a measurement vector `v`,
    /// `B(v) = sum_{c,cp} conj(v_c) v_cp R_{c cp}`.
    fn conditional_block(&self, v: &[C64; 2]) -> DMatrix<C64> {
        let mut out = self.blocks[0][0].scale(0.0);
        for c in 0..2 {
            for cp in 0..2 {
                let w = v[c].conj() * v[cp];
                if w != C64::new(0.0, 0.0) {
                    out += self.blocks[c][cp].map(|z| z * w);
                }
            }
        }
        out
    }

    /// Mutual information of the measured state,
    /// `I[Pi rho] = S(rho_w) + H(p) - S(Pi rho)`.
    fn measured_mutual_info(&self, basis: &MeasurementBasis) -> f64 {
        let b0 = self.conditional_block(&basis.b0);
        let b1 = self.conditional_block(&basis.b1);
        let mut p0 = 0.0;
        let mut p1 = 0.0;
        for i in 0..b0.nrows() {
            p0 += b0[(i, i)].re;
            p1 += b1[(i, i)].re;
        }
        let h_outcomes = entropy_from_eigenvalues([p0, p1]);
        let s_measured = entropy_from_eigenvalues(
            b0.symmetric_eigenvalues()
                .iter()
                .chain(b1.symmetric_eigenvalues().iter())
                .copied(),
        );
        self.s_walker + h_outcomes - s_measured
    }

    /// Eigenbasis angles of the reduced coin and whether its spectrum is
    /// degenerate (gap = Bloch norm).
    fn coin_eigenbasis(&self) -> ((f64, f64), bool) {
        let (rx, ry, rz) = self.coin_bloch;
        let norm = (rx * rx + ry * ry + rz * rz).sqrt();
        if norm < DEGENERACY_GAP {
            ((0.0, 0.0), true)
        } else {
            (((rz / norm).clamp(-1.0, 1.0).acos(), ry.atan2(rx).rem_euclid(std::f64::consts::TAU)), false)
        }
    }

    /// Supremum of `I[Pi rho]` by grid search plus simplex refinement.
    /// Always evaluates the extra candidate bases handed in, so the result
    /// is certified to be at least their best value.
    fn maximize_measured_mi(
        &self,
        opts: &CorrelationOpts,
        extra_candidates: &[(f64, f64)],
    ) -> DiscordResult {
        let mut candidates: Vec<(f64, f64)> = Vec::new();
        candidates.push((0.0, 0.0));
        candidates.extend_from_slice(extra_candidates);
        if let Some(seed) = opts.seed_angles {
            candidates.push(seed);
        }
        let (nt, np) = (opts.grid_theta.max(1), opts.grid_phi.max(1));
        for i in 0..nt {
            let theta = (i as f64 + 0.5) * std::f64::consts::PI / nt as f64;
            for j in 0..np {
                let phi = j as f64 * std::f64::consts::TAU / np as f64;
                candidates.push((theta, phi));
            }
        }
        if opts.random_restarts > 0 {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(opts.rng_seed);
            for _ in 0..opts.random_restarts {
                let theta = (1.0 - 2.0 * rng.gen::<f64>()).clamp(-1.0, 1.0).acos();
                let phi = rng.gen::<f64>() * std::f64::consts::TAU;
                candidates.push((theta, phi));
            }
        }

        // deterministic parallel evaluation: values land in candidate order
        let values: Vec<f64> = candidates
            .par_iter()
            .map(|&(theta, phi)| self.measured_mutual_info(&MeasurementBasis::from_angles(theta, phi)))
            .collect();
        let mut best_idx = 0;
        for (i, v) in values.iter().enumerate() {
            if *v > values[best_idx] {
                best_idx = i;
            }
        }

        let objective = |theta: f64, phi: f64| {
            self.measured_mutual_info(&MeasurementBasis::from_angles(theta, phi))
        };
        let grid_scale = std::f64::consts::PI / nt as f64;
        let (angles, value, converged) = nelder_mead_max(
            &objective,
            candidates[best_idx],
            grid_scale * 0.5,
            opts.angle_tol,
            opts.max_refine_iters,
        );
        if value >= values[best_idx] {
            let (theta, phi) = canonical_angles(angles.0, angles.1);
            DiscordResult { value, theta, phi, converged }
        } else {
            // refinement can only fail to improve; fall back to the grid
            let (theta, phi) = canonical_angles(candidates[best_idx].0, candidates[best_idx].1);
            DiscordResult { value: values[best_idx], theta, phi, converged: false }
        }
    }
}

/// Maps Bloch angles to the canonical ranges `theta in [0, pi]`,
/// `phi in [0, 2pi)`.
fn canonical_angles(theta: f64, phi: f64) -> (f64, f64) {
    let tau = std::f64::consts::TAU;
    let mut theta = theta.rem_euclid(tau);
    let mut phi = phi;
    if theta > std::f64::consts::PI {
        theta = tau - theta;
        phi += std::f64::consts::PI;
    }
    (theta, phi.rem_euclid(tau))
}

/// Nelder-Mead maximization in two variables. Returns the best vertex, its
/// value and whether the simplex shrank below `tol` within `max_iters`.
fn nelder_mead_max<F: Fn(f64, f64) -> f64>(
    f: &F,
    start: (f64, f64),
    scale: f64,
    tol: f64,
    max_iters: usize,
) -> ((f64, f64), f64, bool) {
    let g = |p: (f64, f64)| -f(p.0, p.1);
    let mut simplex = [
        start,
        (start.0 + scale, start.1),
        (start.0, start.1 + scale),
    ];
    let mut values = simplex.map(g);
    let mut converged = false;
    for _ in 0..max_iters {
        // order: index 0 best (smallest g), index 2 worst
        let mut order = [0usize, 1, 2];
        order.sort_by(|&a, &b| values[a].partial_cmp(&values[b]).unwrap());
        simplex = order.map(|i| simplex[i]);
        values = order.map(|i| values[i]);

        let spread = simplex
            .iter()
            .flat_map(|a| simplex.iter().map(move |b| (a.0 - b.0).hypot(a.1 - b.1)))
            .fold(0.0f64, f64::max);
        if spread < tol {
            converged = true;
            break;
        }

        let centroid = (
            0.5 * (simplex[0].0 + simplex[1].0),
            0.5 * (simplex[0].1 + simplex[1].1),
        );
        let reflect = (
            centroid.0 + (centroid.0 - simplex[2].0),
            centroid.1 + (centroid.1 - simplex[2].1),
        );
        let gr = g(reflect);
        if gr < values[0] {
            let expand = (
                centroid.0 + 2.0 * (reflect.0 - centroid.0),
                centroid.1 + 2.0 * (reflect.1 - centroid.1),
            );
            let ge = g(expand);
            if ge < gr {
                simplex[2] = expand;
                values[2] = ge;
            } else {
                simplex[2] = reflect;
                values[2] = gr;
            }
        } else if gr < values[1] {
            simplex[2] = reflect;
            values[2] = gr;
        } else {
            let contract = if gr < values[2] {
                (
                    centroid.0 + 0.5 * (reflect.0 - centroid.0),
                    centroid.1 + 0.5 * (reflect.1 - centroid.1),
                )
            } else {
                (
                    centroid.0 + 0.5 * (simplex[2].0 - centroid.0),
                    centroid.1 + 0.5 * (simplex[2].1 - centroid.1),
                )
            };
            let gc = g(contract);
            if gc < values[2].min(gr) {
                simplex[2] = contract;
                values[2] = gc;
            } else {
                for i in 1..3 {
                    simplex[i] = (
                        simplex[0].0 + 0.5 * (simplex[i].0 - simplex[0].0),
                        simplex[0].1 + 0.5 * (simplex[i].1 - simplex[0].1),
                    );
                    values[i] = g(simplex[i]);
                }
            }
        }
    }
    let mut best = 0;
    for i in 1..3 {
        if values[i] < values[best] {
            best = i;
        }
    }
    (simplex[best], -values[best], converged)
}

/// Quantum mutual information `S(rho_w) + S(rho_c) - S(rho)` in bits.
pub fn mutual_information(state: &JointState) -> f64 {
    Analysis::new(state).mutual_info
}

/// Coin-side projective measurement of the joint state,
/// `sum_k (1 (x) Pi_k) rho (1 (x) Pi_k)`.
pub fn measured_state(state: &JointState, basis: &MeasurementBasis) -> JointState {
    let (pi0, pi1) = basis.projectors();
    let l = state.half_width() as i64;
    let mut out = state.clone();
    for x in -l..=l {
        for xp in -l..=l {
            let block = [
                [state.entry(x, 0, xp, 0), state.entry(x, 0, xp, 1)],
                [state.entry(x, 1, xp, 0), state.entry(x, 1, xp, 1)],
            ];
            let mut measured = [[C64::new(0.0, 0.0); 2]; 2];
            for pi in [&pi0, &pi1] {
                for r in 0..2 {
                    for s in 0..2 {
                        for p in 0..2 {
                            for q in 0..2 {
                                measured[r][s] += pi[r][p] * block[p][q] * pi[q][s];
                            }
                        }
                    }
                }
            }
            out.set_coin_block(x, xp, &measured);
        }
    }
    out
}

/// Measurement-induced disturbance `I[rho] - I[Pi_eig rho]` in bits, with
/// the coin measured in the eigenbasis of its reduced state. A degenerate
/// coin spectrum falls back to the optimizing strategy (see module docs).
pub fn mid(state: &JointState) -> f64 {
    let analysis = Analysis::new(state);
    let (angles, degenerate) = analysis.coin_eigenbasis();
    if degenerate {
        let best = analysis.maximize_measured_mi(&CorrelationOpts::default(), &[]);
        analysis.mutual_info - best.value
    } else {
        analysis.mutual_info
            - analysis.measured_mutual_info(&MeasurementBasis::from_angles(angles.0, angles.1))
    }
}

/// Quantum discord `I[rho] - sup_Pi I[Pi rho]` in bits, with the supremum
/// certified as a maximum over the evaluated candidate set (the MID basis is
/// always included, so `QD <= MID` holds numerically).
pub fn discord(state: &JointState, opts: &CorrelationOpts) -> (f64, DiscordResult) {
    let analysis = Analysis::new(state);
    let (mid_angles, _) = analysis.coin_eigenbasis();
    let best = analysis.maximize_measured_mi(opts, &[mid_angles]);
    (analysis.mutual_info - best.value, best)
}

/// All correlation measures of one state.
pub fn correlation_record(state: &JointState, opts: &CorrelationOpts) -> CorrelationRecord {
    let analysis = Analysis::new(state);
    let (mid_angles, degenerate) = analysis.coin_eigenbasis();
    let best = analysis.maximize_measured_mi(opts, &[mid_angles]);
    let mid = if degenerate {
        analysis.mutual_info - best.value
    } else {
        analysis.mutual_info
            - analysis.measured_mutual_info(&MeasurementBasis::from_angles(mid_angles.0, mid_angles.1))
    };
    CorrelationRecord {
        t: state.t(),
        mutual_info: analysis.mutual_info,
        mid,
        qd: analysis.mutual_info - best.value,
        qd_argmax: (best.theta, best.phi),
        degenerate,
        qd_converged: best.converged,
    }
}

/// Correlation records along a trajectory, reusing each step's discord
/// argmax as the next step's refinement seed.
pub fn correlation_trajectory<I>(states: I, opts: &CorrelationOpts) -> Result<Vec<CorrelationRecord>>
where
    I: IntoIterator<Item = Result<JointState>>,
{
    let mut records = Vec::new();
    let mut step_opts = *opts;
    for state in states {
        let record = correlation_record(&state?, &step_opts);
        step_opts.seed_angles = Some(record.qd_argmax);
        records.push(record);
    }
    Ok(records)
}
