//! Closed-form cell values for the game on the unit interval, used as exact
//! oracles for the solver and the simulator.
//!
//! The game runs on (0,1) with absorption at 0 and payoff concentrated at
//! the right end. With `N = 1/eps` cells, the cell values `a_0..a_N` solve
//! a three-term recurrence with a reflected right end and admit closed
//! forms:
//!
//! - strip-only payoff: `a_k = eps * g1 * k`
//! - full payoff (strip plus `eps^3` everywhere):
//!   `a_k = -eps^3 k^2 + Theta eps k` with `Theta = g1 + 2 eps + eps^2`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant1D {
    /// `eps*g1/2` in the last cell, zero elsewhere.
    StripOnly,
    /// `eps*g1/2` in the last cell plus `eps^3` in every cell.
    FullPayoff,
}

#[derive(Debug, Clone, Copy)]
pub struct Oracle1DParams {
    pub eps: f64,
    pub g1: f64,
    pub variant: Variant1D,
}

impl Oracle1DParams {
    pub fn new(eps: f64, g1: f64, variant: Variant1D) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParam(format!("eps must be positive, got {eps}")));
        }
        let n = (1.0 / eps).round();
        if (n * eps - 1.0).abs() > 1e-12 || n < 1.0 {
            return Err(Error::InvalidParam(format!(
                "1/eps must be an integer, got eps={eps}"
            )));
        }
        if !(g1 > 0.0) {
            return Err(Error::InvalidParam(format!("g1 must be positive, got {g1}")));
        }
        Ok(Oracle1DParams { eps, g1, variant })
    }

    pub fn cells(&self) -> usize {
        (1.0 / self.eps).round() as usize
    }

    /// `Theta = g1 + 2 eps + eps^2` for the full-payoff variant.
    pub fn theta(&self) -> f64 {
        self.g1 + 2.0 * self.eps + self.eps * self.eps
    }
}

/// Exact cell values `a_0..a_N`.
pub fn oracle_values(p: &Oracle1DParams) -> Vec<f64> {
    let n = p.cells();
    let eps = p.eps;
    match p.variant {
        Variant1D::StripOnly => (0..=n).map(|k| eps * p.g1 * k as f64).collect(),
        Variant1D::FullPayoff => {
            let theta = p.theta();
            (0..=n)
                .map(|k| {
                    let kf = k as f64;
                    -eps.powi(3) * kf * kf + theta * eps * kf
                })
                .collect()
        }
    }
}

/// Maximum absolute residual of the defining recurrences over all cells.
///
/// Residuals use the variant's payoff terms: `a_0` itself, the interior
/// relation `a_k - (a_{k-1} + a_{k+1})/2 - f_int`, and the reflected end
/// `a_N - (a_{N-1} + a_N)/2 - eps*g1/2 - f_int`, where `f_int` is zero for
/// the strip-only variant and `eps^3` for the full variant.
pub fn check_recurrences(p: &Oracle1DParams, values: &[f64]) -> Result<f64> {
    let n = p.cells();
    if values.len() != n + 1 {
        return Err(Error::InvalidParam(format!(
            "expected {} cell values, got {}",
            n + 1,
            values.len()
        )));
    }
    let f_int = match p.variant {
        Variant1D::StripOnly => 0.0,
        Variant1D::FullPayoff => p.eps * p.eps * p.eps,
    };
    let mut worst = values[0].abs();
    for k in 1..n {
        let r = values[k] - 0.5 * (values[k - 1] + values[k + 1]) - f_int;
        worst = worst.max(r.abs());
    }
    let end = values[n] - 0.5 * (values[n - 1] + values[n]) - 0.5 * p.eps * p.g1 - f_int;
    Ok(worst.max(end.abs()))
}

/// Sup-norm gap between the cell values and the limit `u(x) = g1 * x`
/// evaluated at the cell coordinates `k * eps`.
pub fn limit_gap(p: &Oracle1DParams) -> f64 {
    oracle_values(p)
        .iter()
        .enumerate()
        .map(|(k, a)| (a - p.g1 * k as f64 * p.eps).abs())
        .fold(0.0, f64::max)
}
