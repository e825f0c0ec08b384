//! Convergence studies across a decreasing list of game steps.
//!
//! In 1-D the solved values compare against the explicit limit
//! `g(b) * k * eps`; in 2-D no closed-form limit exists, so successive
//! solutions compare on the coarsest grid's nodes and the study reports
//! sup-differences, Lipschitz constants, uniform bounds, and residual
//! summaries.

use std::sync::Arc;

use crate::analysis::{measure_lipschitz, residual};
use crate::dpp::{
    build_grid, solve_dpp, GField, GridMode, PayoffVariant, RunningPayoff, ValueFunction,
};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryLabel, Domain, Point};

/// Spacing rule for lattice grids.
#[derive(Debug, Clone, Copy)]
pub enum HRule {
    Fixed(f64),
    /// `h = eps / divisor`.
    EpsOver(f64),
}

impl HRule {
    pub fn spacing(&self, eps: f64) -> f64 {
        match self {
            HRule::Fixed(h) => *h,
            HRule::EpsOver(d) => eps / d,
        }
    }
}

#[derive(Debug, Clone)]
pub struct StudyRow {
    pub eps: f64,
    pub h: f64,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
    pub sup_u: f64,
    pub lipschitz: f64,
    /// 1-D only: `sup_k |u_k - g(b) k eps|`.
    pub limit_gap: Option<f64>,
    /// 2-D only: sup-difference against the previous eps on common
    /// evaluation points (absent on the first row).
    pub successive_diff: Option<f64>,
    pub neumann_residual_max: Option<f64>,
    pub interior_residual_max: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub rows: Vec<StudyRow>,
}

impl StudyReport {
    /// True when the 2-D successive sup-differences strictly decrease.
    pub fn diffs_decrease(&self) -> bool {
        let diffs: Vec<f64> = self
            .rows
            .iter()
            .filter_map(|r| r.successive_diff)
            .collect();
        diffs.windows(2).all(|w| w[1] < w[0])
    }
}

/// Solves the game for each eps in a strictly decreasing list and
/// collects convergence diagnostics. Solver failures to converge are
/// flagged per row, not raised.
pub fn convergence_study(
    domain: &Domain,
    g: GField,
    variant: PayoffVariant,
    eps_list: &[f64],
    h_rule: HRule,
    tol: Option<f64>,
    max_iter: Option<usize>,
) -> Result<StudyReport> {
    if eps_list.is_empty() {
        return Err(Error::InvalidParam("eps list must not be empty".into()));
    }
    if !eps_list.windows(2).all(|w| w[1] < w[0]) {
        return Err(Error::InvalidParam(
            "eps list must be strictly decreasing".into(),
        ));
    }
    let mode = if domain.is_1d() {
        GridMode::Chain1D
    } else {
        GridMode::Lattice2D
    };

    let mut rows = Vec::with_capacity(eps_list.len());
    let mut probes: Option<Vec<Point>> = None;
    let mut previous: Option<ValueFunction> = None;

    for &eps in eps_list {
        let h = h_rule.spacing(eps);
        let grid = Arc::new(build_grid(domain, eps, h, mode)?);
        let payoff = RunningPayoff::new(eps, g, variant)?;
        let u = solve_dpp(
            grid.clone(),
            &payoff,
            tol.unwrap_or_else(|| mode.default_tol()),
            max_iter.unwrap_or_else(|| mode.default_max_iter()),
        )?;

        let lipschitz = measure_lipschitz(&u, eps).map(|(l, _)| l).unwrap_or(0.0);

        let limit_gap = if mode == GridMode::Chain1D {
            let (_, b) = domain.bounding_box();
            let g1 = g.eval(b);
            Some(
                u.values
                    .iter()
                    .enumerate()
                    .map(|(k, v)| (v - g1 * k as f64 * eps).abs())
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };

        let successive_diff = match (&previous, mode) {
            (Some(prev), GridMode::Lattice2D) => {
                let pts = probes.get_or_insert_with(|| prev.grid.nodes.clone());
                Some(
                    pts.iter()
                        .map(|&p| {
                            (u.grid.nearest_value(&u.values, p)
                                - prev.grid.nearest_value(&prev.values, p))
                            .abs()
                        })
                        .fold(0.0, f64::max),
                )
            }
            _ => None,
        };
        if probes.is_none() && mode == GridMode::Lattice2D {
            probes = Some(grid.nodes.clone());
        }

        let h_fd = 2.0 * grid.spacing;
        let neumann_residual_max = neumann_summary(domain, &u, &g, h_fd);
        let interior_residual_max = interior_summary(domain, &u, h_fd);

        rows.push(StudyRow {
            eps,
            h: grid.spacing,
            iterations: u.iterations,
            residual: u.residual,
            converged: u.converged,
            sup_u: u.sup(),
            lipschitz,
            limit_gap,
            successive_diff,
            neumann_residual_max,
            interior_residual_max,
        });
        previous = Some(u);
    }
    Ok(StudyReport { rows })
}

fn neumann_summary(domain: &Domain, u: &ValueFunction, g: &GField, h_fd: f64) -> Option<f64> {
    let grid = u.grid.clone();
    let values = u.values.clone();
    let field = move |p: Point| grid.nearest_value(&values, p);
    let mut worst: Option<f64> = None;
    for bp in domain.boundary_sample(256).ok()? {
        if bp.label != BoundaryLabel::Neumann {
            continue;
        }
        if let Ok(r) = residual::neumann_residual(domain, &field, &bp, g, h_fd) {
            worst = Some(worst.map_or(r.abs(), |w: f64| w.max(r.abs())));
        }
    }
    worst
}

fn interior_summary(domain: &Domain, u: &ValueFunction, h_fd: f64) -> Option<f64> {
    let grid = u.grid.clone();
    let values = u.values.clone();
    let field = move |p: Point| grid.nearest_value(&values, p);
    let stride = (u.grid.len() / 200).max(1);
    let mut worst: Option<f64> = None;
    for i in (0..u.grid.len()).step_by(stride) {
        let x = u.grid.nodes[i];
        if domain.dist_to_boundary(x) <= h_fd {
            continue;
        }
        if let Ok(r) = residual::infinity_laplacian_residual(domain, &field, x, h_fd) {
            worst = Some(worst.map_or(r.abs(), |w: f64| w.max(r.abs())));
        }
    }
    worst
}

/// Chains the difference `|u(y0) - u(x0)|` through an interior waypoint
/// and returns the worst chained ratio
/// `(|u(x1) - u(y0)| + |u(x1) - u(x0)|) / |y0 - x0|` over the pairs.
///
/// The waypoint sits on the segment from the domain centroid toward the
/// pair midpoint, at boundary distance at least
/// `max(|x0 - y0|/4, 2*eps)`.
pub fn two_leg_constant(u: &ValueFunction, pairs: &[(Point, Point)]) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::InvalidParam("no pairs supplied".into()));
    }
    let domain = &u.grid.domain;
    let eps = u.grid.eps;
    let mut worst = 0.0f64;
    for &(x0, y0) in pairs {
        let sep = x0.dist(y0);
        if sep <= eps {
            return Err(Error::InvalidParam(format!(
                "pair separation {sep} must exceed eps = {eps}"
            )));
        }
        let x1 = waypoint(domain, x0, y0, eps)?;
        let ux0 = u.grid.nearest_value(&u.values, x0);
        let uy0 = u.grid.nearest_value(&u.values, y0);
        let ux1 = u.grid.nearest_value(&u.values, x1);
        worst = worst.max(((ux1 - uy0).abs() + (ux1 - ux0).abs()) / sep);
    }
    Ok(worst)
}

fn waypoint(domain: &Domain, x0: Point, y0: Point, eps: f64) -> Result<Point> {
    let target = (0.25 * x0.dist(y0)).max(2.0 * eps);
    let centroid = domain.centroid();
    let mid = Point::new(0.5 * (x0.x + y0.x), 0.5 * (x0.y + y0.y));
    // Walk from the midpoint toward the centroid; take the first point
    // deep enough inside.
    for k in 0..=256 {
        let t = k as f64 / 256.0;
        let p = Point::new(
            mid.x + t * (centroid.x - mid.x),
            mid.y + t * (centroid.y - mid.y),
        );
        if domain.dist_to_boundary(p) >= target {
            return Ok(p);
        }
    }
    Err(Error::Analysis(format!(
        "no interior waypoint at depth {target} between ({}, {}) and ({}, {})",
        x0.x, x0.y, y0.x, y0.y
    )))
}
