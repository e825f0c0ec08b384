//! Barrier supersolution for the first-stage game.
//!
//! The first stage absorbs at an interior target `x0` with a running
//! payoff of `eps*K` in the eps-strip around the whole boundary and
//! `eps^3` elsewhere. The barrier
//!
//! `vbar(x) = eps + C1*|x - x0| - C2*eps*|x - x0|^2`
//!
//! with `C1 = 4K/(1 - c)` and `C2 >= 1` dominates the fixed-point
//! operator of that game: away from the strip the radial second
//! difference telescopes to `C2*eps^3 >= eps^3`, and in the strip the
//! outward radial reach is limited to `c*eps` by the geometry, so the
//! drift `C1*(1 - c)*eps/2 = 2*eps*K` beats the strip payoff.
//!
//! The check evaluates the sup/inf of the barrier over the continuum
//! closed eps-ball intersected with the closed domain. Restricting the
//! extrema to lattice neighbors is strictly smaller on the sup side at
//! nodes whose radial direction is not lattice-aligned, which breaks the
//! interior identity by `O(h^2/rho)` and falsely reports violations; the
//! radial form is exact there.

use std::sync::Arc;

use rayon::prelude::*;

use crate::analysis::AnalysisReport;
use crate::dpp::{
    build_first_stage_grid, payoff_table_with, solve_dpp_with_table, Grid, GridMode,
    ValueFunction,
};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point};

const SPHERE_SAMPLES: usize = 720;
const BOUNDARY_SAMPLES: usize = 8192;

#[derive(Debug, Clone, Copy)]
pub struct BarrierParams {
    /// Absorbing target of the first-stage game.
    pub x0: Point,
    /// `K`: maximum of `g/2` over the payoff boundary.
    pub k_max: f64,
    /// Reachability constant in (0,1): in the strip, one move gains at
    /// most `c*eps` of distance from `x0`.
    pub c: f64,
    /// `C1 = 4*K/(1 - c)`.
    pub c1: f64,
    /// `C2 >= 1`.
    pub c2: f64,
    pub eps: f64,
}

impl BarrierParams {
    pub fn new(x0: Point, k_max: f64, c: f64, c2: f64, eps: f64) -> Result<Self> {
        if !(k_max > 0.0) {
            return Err(Error::InvalidParam(format!("K must be positive, got {k_max}")));
        }
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::InvalidParam(format!(
                "barrier constants are undefined unless 0 < c < 1, got c = {c}"
            )));
        }
        if !(c2 >= 1.0) {
            return Err(Error::InvalidParam(format!("C2 must be at least 1, got {c2}")));
        }
        if !(eps > 0.0) {
            return Err(Error::InvalidParam(format!("eps must be positive, got {eps}")));
        }
        Ok(BarrierParams {
            x0,
            k_max,
            c,
            c1: 4.0 * k_max / (1.0 - c),
            c2,
            eps,
        })
    }
}

/// `vbar(x) = eps + C1*|x - x0| - C2*eps*|x - x0|^2`.
pub fn barrier_value(p: &BarrierParams, x: Point) -> f64 {
    let r = x.dist(p.x0);
    p.eps + p.c1 * r - p.c2 * p.eps * r * r
}

/// Per-node payoff of the first-stage game: `eps*K` in the strip
/// `d(x, boundary) < eps`, `eps^3` outside. The strip test is strict so
/// that nodes at depth exactly `eps`, which still reach the full radial
/// move, take the interior branch.
pub fn stage_one_payoff_table(grid: &Grid, eps: f64, k_max: f64) -> Vec<f64> {
    let domain = grid.domain.clone();
    let tol = domain.tol();
    payoff_table_with(grid, |x| {
        if domain.dist_to_boundary(x) < eps - tol {
            eps * k_max
        } else {
            eps * eps * eps
        }
    })
}

/// Solves the first-stage game: absorb at the node nearest `x0`, strip
/// payoff `eps*K` around the whole boundary.
pub fn solve_first_stage(
    domain: &Domain,
    eps: f64,
    h: f64,
    x0: Point,
    k_max: f64,
    tol: f64,
    max_iter: usize,
) -> Result<ValueFunction> {
    let grid = Arc::new(build_first_stage_grid(domain, eps, h, x0)?);
    let table = stage_one_payoff_table(&grid, eps, k_max);
    solve_dpp_with_table(grid, table, tol, max_iter)
}

/// Outward radial reach from `x`: `max |y - x0|` over the closed
/// `eps`-ball around `x` intersected with the closed domain, minus
/// `|x - x0|`. Exactly `eps` when the outward ray point stays in the
/// domain; otherwise estimated from sphere directions and boundary
/// samples inside the ball.
fn radial_reach(domain: &Domain, x0: Point, x: Point, eps: f64, boundary: &[Point]) -> f64 {
    let rho = x.dist(x0);
    let dir = match x.sub(x0).unit() {
        Some(d) => d,
        None => return eps,
    };
    if domain.contains(x.add(dir.scale(eps))) {
        return eps;
    }
    let tol = domain.tol();
    let mut best = rho;
    for k in 0..SPHERE_SAMPLES {
        let theta = (k as f64 + 0.5) * std::f64::consts::TAU / SPHERE_SAMPLES as f64;
        let y = Point::new(x.x + eps * theta.cos(), x.y + eps * theta.sin());
        if domain.contains(y) {
            best = best.max(y.dist(x0));
        }
    }
    for &b in boundary {
        if b.dist(x) <= eps + tol {
            best = best.max(b.dist(x0));
        }
    }
    (best - rho).min(eps)
}

/// Margin of the fixed-point inequality for the barrier at radius `rho`
/// with outward reach `a`, inward reach `b`, and running payoff `f`:
///
/// `vbar(rho) - (vbar(rho + a) + vbar(rho - b))/2 - f`
///
/// expanded algebraically so the interior case `a = b = eps` suffers no
/// cancellation and evaluates to exactly `(C2 - 1)*eps^3`.
fn case_margin(p: &BarrierParams, rho: f64, a: f64, b: f64, f: f64) -> f64 {
    let quad = 0.5 * (a * a + b * b) + rho * (a - b);
    p.c2 * p.eps * quad - 0.5 * p.c1 * (a - b) - f
}

fn scan_extents(
    grid: &Grid,
    x0: Point,
    eps: f64,
) -> Result<Vec<(usize, f64, f64, bool)>> {
    if grid.mode != GridMode::Lattice2D {
        return Err(Error::InvalidGrid(
            "the supersolution scan requires a 2-D lattice grid".into(),
        ));
    }
    let domain = &grid.domain;
    let tol = domain.tol();
    let boundary: Vec<Point> = domain
        .boundary_sample(BOUNDARY_SAMPLES)?
        .into_iter()
        .map(|bp| bp.position)
        .collect();
    // (node, rho, outward reach, in strip)
    Ok((0..grid.len())
        .into_par_iter()
        .filter_map(|i| {
            if grid.dirichlet[i] {
                return None;
            }
            let x = grid.nodes[i];
            let rho = x.dist(x0);
            if rho <= eps {
                return None;
            }
            let strip = domain.dist_to_boundary(x) < eps - tol;
            let a = radial_reach(domain, x0, x, eps, &boundary);
            Some((i, rho, a, strip))
        })
        .collect())
}

/// Measured reachability constant of the discrete first-stage game: the
/// largest `a/eps` over strip nodes with `|x - x0| > eps`, where `a` is
/// the outward radial reach of the ball. This is the constant the strip
/// estimate needs; boundary transversality bounds it from above.
pub fn measure_reachability(grid: &Grid, x0: Point, eps: f64) -> Result<f64> {
    let extents = scan_extents(grid, x0, eps)?;
    let mut c = f64::NEG_INFINITY;
    let mut any = false;
    for (_, _, a, strip) in extents {
        if strip {
            any = true;
            c = c.max(a / eps);
        }
    }
    if !any {
        return Err(Error::Analysis(
            "no strip nodes to measure the reachability constant".into(),
        ));
    }
    Ok(c)
}

/// Verifies the supersolution inequality at every non-absorbing node with
/// `|x - x0| > eps`:
///
/// `vbar(x) >= (sup vbar + inf vbar)/2 + f(x)`
///
/// over the closed eps-ball intersected with the closed domain, with the
/// first-stage payoff (`eps*K` in the boundary strip, `eps^3` outside).
/// Reports the worst margin and its node; a negative margin at a coarse
/// `eps` is a legitimate finding, not an error.
pub fn check_supersolution(p: &BarrierParams, grid: &Grid) -> Result<AnalysisReport> {
    let diam = grid.domain.diameter();
    if p.c1 <= 2.0 * p.c2 * p.eps * diam {
        return Err(Error::Analysis(format!(
            "barrier is not monotone over the domain: C1 = {} <= 2*C2*eps*diam = {}",
            p.c1,
            2.0 * p.c2 * p.eps * diam
        )));
    }
    let extents = scan_extents(grid, p.x0, p.eps)?;
    if extents.is_empty() {
        return Err(Error::Analysis(
            "no nodes outside the eps-ball around x0".into(),
        ));
    }
    let eps3 = p.eps * p.eps * p.eps;
    let mut worst = f64::INFINITY;
    let mut worst_node = extents[0].0;
    let mut checked = 0usize;
    for (i, rho, a, strip) in extents {
        let f = if strip { p.eps * p.k_max } else { eps3 };
        let m = case_margin(p, rho, a, p.eps, f);
        checked += 1;
        if m < worst {
            worst = m;
            worst_node = i;
        }
    }
    Ok(AnalysisReport {
        check: "barrier_supersolution".into(),
        pass: worst >= 0.0,
        worst_margin: worst,
        worst_location: Some(grid.nodes[worst_node]),
        details: format!(
            "K={} c={} C1={:.6e} C2={} eps={} nodes_checked={checked}",
            p.k_max, p.c, p.c1, p.c2, p.eps
        ),
    })
}

/// Verifies the barrier bound on a solved first-stage value: at every
/// node with `|y - x0| > eps`,
/// `v(y) <= (4K/(1-c) + 1) * |y - x0|`.
pub fn check_barrier_bound(v: &ValueFunction, p: &BarrierParams) -> Result<AnalysisReport> {
    let bound = p.c1 + 1.0;
    let mut worst = f64::INFINITY;
    let mut worst_node = None;
    for i in 0..v.grid.len() {
        let rho = v.grid.nodes[i].dist(p.x0);
        if rho <= p.eps {
            continue;
        }
        let m = bound * rho - v.values[i];
        if m < worst {
            worst = m;
            worst_node = Some(v.grid.nodes[i]);
        }
    }
    if worst_node.is_none() {
        return Err(Error::Analysis(
            "no nodes outside the eps-ball around x0".into(),
        ));
    }
    Ok(AnalysisReport {
        check: "barrier_bound".into(),
        pass: worst >= 0.0,
        worst_margin: worst,
        worst_location: worst_node,
        details: format!("bound_coefficient={bound:.6e} eps={}", p.eps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::build_grid;
    use crate::geometry::BoundaryLabel;
    use approx::assert_relative_eq;

    fn disk() -> Domain {
        // Dirichlet on the left half circle, Neumann on the right; the
        // first-stage payoff only sees the geometry, not the labels.
        Domain::disk(
            Point::new(0.0, 0.0),
            1.0,
            vec![
                crate::geometry::DiskArc {
                    start: std::f64::consts::FRAC_PI_2,
                    end: 1.5 * std::f64::consts::PI,
                    label: BoundaryLabel::Dirichlet,
                },
                crate::geometry::DiskArc {
                    start: 1.5 * std::f64::consts::PI,
                    end: 2.5 * std::f64::consts::PI,
                    label: BoundaryLabel::Neumann,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn barrier_formula() {
        let p = BarrierParams::new(Point::new(0.0, 0.0), 1.0, 0.5, 1.0, 0.1).unwrap();
        assert_relative_eq!(p.c1, 8.0, epsilon = 1e-15);
        // C1*(1-c)/4 recovers K.
        assert_relative_eq!(p.c1 * (1.0 - p.c) / 4.0, p.k_max, epsilon = 1e-15);
        // Vertex value and a spot value.
        assert_eq!(barrier_value(&p, Point::new(0.0, 0.0)), 0.1);
        assert_relative_eq!(
            barrier_value(&p, Point::new(0.5, 0.0)),
            0.1 + 4.0 - 0.025,
            epsilon = 1e-15
        );
    }

    #[test]
    fn params_are_validated() {
        let x0 = Point::new(0.0, 0.0);
        assert!(BarrierParams::new(x0, 1.0, 1.0, 1.0, 0.1).is_err());
        assert!(BarrierParams::new(x0, 1.0, 0.0, 1.0, 0.1).is_err());
        assert!(BarrierParams::new(x0, 1.0, 1.5, 1.0, 0.1).is_err());
        assert!(BarrierParams::new(x0, 1.0, 0.5, 0.5, 0.1).is_err());
        assert!(BarrierParams::new(x0, 0.0, 0.5, 1.0, 0.1).is_err());
    }

    #[test]
    fn interior_margin_telescopes_exactly() {
        // With a = b = eps the linear term drops and the quadratic
        // telescopes to C2*eps^3; net of f = eps^3 that is (C2-1)*eps^3.
        let eps = 0.05;
        let f = eps * eps * eps;
        let p1 = BarrierParams::new(Point::new(0.0, 0.0), 1.0, 0.5, 1.0, eps).unwrap();
        assert_eq!(case_margin(&p1, 0.7, eps, eps, f), 0.0);
        let p2 = BarrierParams::new(Point::new(0.0, 0.0), 1.0, 0.5, 2.0, eps).unwrap();
        assert_relative_eq!(case_margin(&p2, 0.7, eps, eps, f), f, epsilon = 1e-18);
    }

    #[test]
    fn disk_center_supersolution_passes_with_measured_c() {
        let dom = disk();
        let eps = 0.1;
        let grid = build_grid(&dom, eps, eps / 4.0, GridMode::Lattice2D).unwrap();
        let c = measure_reachability(&grid, Point::new(0.0, 0.0), eps).unwrap();
        assert!(c > 0.0 && c < 1.0, "measured reachability {c}");
        let p = BarrierParams::new(Point::new(0.0, 0.0), 1.0, c, 1.0, eps).unwrap();
        let rep = check_supersolution(&p, &grid).unwrap();
        assert!(rep.pass, "worst margin {} at {:?}", rep.worst_margin, rep.worst_location);
        assert!(rep.worst_margin >= 0.0);
    }

    #[test]
    fn coarse_eps_with_fixed_c_fails_and_reports_the_node() {
        let dom = disk();
        let eps = 0.2;
        let grid = build_grid(&dom, eps, 0.05, GridMode::Lattice2D).unwrap();
        let p = BarrierParams::new(Point::new(0.0, 0.0), 10.0, 0.5, 1.0, eps).unwrap();
        let rep = check_supersolution(&p, &grid).unwrap();
        assert!(!rep.pass);
        assert!(rep.worst_margin < 0.0);
        assert!(rep.worst_location.is_some());
    }

    #[test]
    fn first_stage_value_respects_the_barrier_bound() {
        let dom = disk();
        let eps = 0.1;
        let x0 = Point::new(0.0, 0.0);
        let grid = build_grid(&dom, eps, eps / 3.0, GridMode::Lattice2D).unwrap();
        let c = measure_reachability(&grid, x0, eps).unwrap();
        let p = BarrierParams::new(x0, 1.0, c, 1.0, eps).unwrap();
        let v = solve_first_stage(&dom, eps, eps / 3.0, x0, 1.0, 1e-8, 200_000).unwrap();
        assert!(v.converged, "first stage residual {}", v.residual);
        let rep = check_barrier_bound(&v, &p).unwrap();
        assert!(rep.pass, "worst margin {}", rep.worst_margin);
    }

    #[test]
    fn absorbing_target_value_is_zero() {
        let dom = disk();
        let v = solve_first_stage(
            &dom,
            0.1,
            0.1 / 3.0,
            Point::new(0.0, 0.0),
            1.0,
            1e-8,
            200_000,
        )
        .unwrap();
        let target = v.grid.nearest_node(Point::new(0.0, 0.0));
        assert_eq!(v.values[target], 0.0);
        // Every other node accrues positive payoff.
        for i in 0..v.grid.len() {
            if i != target {
                assert!(v.values[i] > 0.0);
            }
        }
    }
}
