//! Numerical verification of the analytic apparatus behind the game:
//! barrier supersolutions, Lipschitz and compactness estimates, operator
//! residuals, and eps-convergence studies.

mod barrier;
mod convergence;
mod residual;

pub use barrier::{
    barrier_value, check_barrier_bound, check_supersolution, measure_reachability,
    solve_first_stage, stage_one_payoff_table, BarrierParams,
};
pub use convergence::{convergence_study, two_leg_constant, HRule, StudyReport, StudyRow};
pub use residual::{infinity_laplacian_residual, neumann_residual};

use rayon::prelude::*;

use crate::dpp::ValueFunction;
use crate::error::{Error, Result};
use crate::geometry::Point;

/// Structured outcome of a single check: pass iff the worst margin
/// satisfies the check's inequality (nonnegative by convention).
#[derive(Debug, Clone)]
pub struct AnalysisReport {
    pub check: String,
    pub pass: bool,
    /// Worst (most violating) margin encountered; nonnegative when the
    /// check holds everywhere.
    pub worst_margin: f64,
    pub worst_location: Option<Point>,
    /// Parameters used, for the report file.
    pub details: String,
}

impl AnalysisReport {
    pub fn record(&self) -> String {
        let loc = match self.worst_location {
            Some(p) => format!("({:.6}, {:.6})", p.x, p.y),
            None => "-".to_string(),
        };
        format!(
            "check={} pass={} margin={:.6e} location={} {}",
            self.check, self.pass, self.worst_margin, loc, self.details
        )
    }
}

/// Modulus-of-continuity hypothesis: for `|x - y| > a_eps`,
/// `|u(x) - u(y)| <= omega(|x - y|)`, together with a uniform bound.
#[derive(Debug, Clone, Copy)]
pub struct ModulusParams {
    /// Separation scale below which pairs are exempt (defaults to eps).
    pub a_eps: f64,
    /// Linear modulus coefficient: `omega(s) = c * s`.
    pub omega_c: f64,
    /// Uniform bound to verify: `|u| <= k_bound`.
    pub k_bound: f64,
}

impl ModulusParams {
    pub fn linear(a_eps: f64, omega_c: f64, k_bound: f64) -> Result<Self> {
        if omega_c < 0.0 || a_eps < 0.0 || k_bound < 0.0 {
            return Err(Error::InvalidParam(
                "modulus parameters must be nonnegative".into(),
            ));
        }
        Ok(ModulusParams {
            a_eps,
            omega_c,
            k_bound,
        })
    }
}

/// Measured separated-pair Lipschitz constant:
/// `max |u(x) - u(y)| / |x - y|` over node pairs with `|x - y| > separation`.
pub fn measure_lipschitz(u: &ValueFunction, separation: f64) -> Result<(f64, (Point, Point))> {
    let grid = &u.grid;
    if separation < grid.eps - grid.domain.tol() {
        return Err(Error::InvalidParam(format!(
            "separation {separation} must be at least eps = {}",
            grid.eps
        )));
    }
    let nodes = &grid.nodes;
    let vals = &u.values;
    let per_row: Vec<(f64, usize, usize)> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let mut best = (f64::NEG_INFINITY, i, i);
            for j in i + 1..nodes.len() {
                let d = nodes[i].dist(nodes[j]);
                if d > separation {
                    let r = (vals[i] - vals[j]).abs() / d;
                    if r > best.0 {
                        best = (r, i, j);
                    }
                }
            }
            best
        })
        .collect();
    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    let mut any = false;
    for row in per_row {
        if row.0 > f64::NEG_INFINITY {
            any = true;
            if row.0 > best.0 {
                best = row;
            }
        }
    }
    if !any {
        return Err(Error::Analysis(format!(
            "no node pairs separated by more than {separation}"
        )));
    }
    Ok((best.0, (nodes[best.1], nodes[best.2])))
}

/// Lipschitz report: measures the separated-pair constant and, when a
/// bound is supplied (the barrier bound `4K/(1-c) + 1` when `c` is
/// measurable), compares against it.
pub fn lipschitz_report(
    u: &ValueFunction,
    separation: f64,
    bound: Option<f64>,
) -> Result<AnalysisReport> {
    let (constant, (px, py)) = measure_lipschitz(u, separation)?;
    let (pass, margin) = match bound {
        Some(b) => (constant <= b, b - constant),
        None => (true, f64::INFINITY),
    };
    Ok(AnalysisReport {
        check: "lipschitz".into(),
        pass,
        worst_margin: margin,
        worst_location: Some(px),
        details: format!(
            "constant={constant:.6e} pair=(({:.4},{:.4}),({:.4},{:.4})) separation={separation} bound={}",
            px.x,
            px.y,
            py.x,
            py.y,
            bound.map(|b| format!("{b:.6e}")).unwrap_or_else(|| "-".into())
        ),
    })
}

/// Verifies the compactness hypotheses on a solved value: the uniform
/// bound `|u| <= k_bound` and the modulus inequality over all node pairs
/// separated by more than `a_eps`.
pub fn modulus_check(u: &ValueFunction, m: &ModulusParams) -> Result<AnalysisReport> {
    let grid = &u.grid;
    let nodes = &grid.nodes;
    let vals = &u.values;

    let sup = vals.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
    let bound_margin = m.k_bound - sup;

    let per_row: Vec<(f64, usize, usize)> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            // Most violating pair in this row: minimize omega(d) - |du|.
            let mut worst = (f64::INFINITY, i, i);
            for j in i + 1..nodes.len() {
                let d = nodes[i].dist(nodes[j]);
                if d > m.a_eps {
                    let margin = m.omega_c * d - (vals[i] - vals[j]).abs();
                    if margin < worst.0 {
                        worst = (margin, i, j);
                    }
                }
            }
            worst
        })
        .collect();
    let mut worst = (f64::INFINITY, 0usize, 0usize);
    for row in per_row {
        if row.0 < worst.0 {
            worst = row;
        }
    }

    // A vacuous pair scan still verifies the uniform bound.
    let pair_margin = worst.0;
    let overall = pair_margin.min(bound_margin);
    let location = if pair_margin <= bound_margin && pair_margin < f64::INFINITY {
        Some(nodes[worst.1])
    } else {
        None
    };
    Ok(AnalysisReport {
        check: "modulus".into(),
        pass: overall >= 0.0,
        worst_margin: overall,
        worst_location: location,
        details: format!(
            "omega_c={:.6e} a_eps={:.6e} k_bound={:.6e} sup_u={sup:.6e}",
            m.omega_c, m.a_eps, m.k_bound
        ),
    })
}
