//! Pure-state amplitude-recursion oracle for the ideal (kappa = 1) walk.
//!
//! Deliberately independent of the library's density-matrix path: amplitudes
//! live in two plain vectors and the Hadamard/shift recursion is written out
//! by hand.

#![allow(dead_code)]

use num_complex::Complex64 as C64;

pub struct PureWalk {
    /// Amplitude of coin |+1> at position `index - t`.
    right: Vec<C64>,
    /// Amplitude of coin |-1> at position `index - t`.
    left: Vec<C64>,
    t: usize,
}

impl PureWalk {
    /// Walker at the origin with coin amplitudes `(up, down)` (normalized
    /// internally).
    pub fn new(up: C64, down: C64) -> Self {
        let norm = (up.norm_sqr() + down.norm_sqr()).sqrt();
        Self { right: vec![up / norm], left: vec![down / norm], t: 0 }
    }

    /// The walk's default coin `(|+1> + i|-1>)/sqrt(2)`.
    pub fn symmetric() -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 1.0))
    }

    pub fn t(&self) -> usize {
        self.t
    }

    /// One ideal step: Hadamard on the coin, then the conditional shift.
    pub fn step(&mut self) {
        let n = self.right.len();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut right = vec![C64::new(0.0, 0.0); n + 2];
        let mut left = vec![C64::new(0.0, 0.0); n + 2];
        for i in 0..n {
            let r = self.right[i];
            let l = self.left[i];
            // H: |+1> -> (|+1> + |-1>)/sqrt2, |-1> -> (|+1> - |-1>)/sqrt2
            let new_r = (r + l) * s;
            let new_l = (r - l) * s;
            // positions sit at x = (old index) - t; the new arrays are offset
            // by one more to the left, so index i maps to i+1 before shifting
            right[i + 2] += new_r; // x + 1
            left[i] += new_l; // x - 1
        }
        self.right = right;
        self.left = left;
        self.t += 1;
    }

    /// `P(x)` over `x = -t ..= t` (step 2 in index, matching the light cone).
    pub fn probabilities(&self) -> Vec<(i64, f64)> {
        let t = self.t as i64;
        self.right
            .iter()
            .zip(&self.left)
            .enumerate()
            .map(|(i, (r, l))| (i as i64 - t, r.norm_sqr() + l.norm_sqr()))
            .collect()
    }

    pub fn mean(&self) -> f64 {
        self.probabilities().iter().map(|&(x, p)| x as f64 * p).sum()
    }

    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        let second: f64 = self.probabilities().iter().map(|&(x, p)| (x * x) as f64 * p).sum();
        second - mean * mean
    }

    pub fn norm_sqr(&self) -> f64 {
        self.probabilities().iter().map(|&(_, p)| p).sum()
    }
}
