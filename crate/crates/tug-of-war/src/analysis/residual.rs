//! Finite-difference residuals of the interior operator and the boundary
//! condition.
//!
//! The 1-homogeneous operator is the second derivative along the
//! normalized gradient; where the gradient degenerates the probe falls
//! back to the largest scaled second difference over coordinate
//! directions, matching the limit formula `2(u(y) - u(x))/|y - x|^2`.

use crate::dpp::GField;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryLabel, BoundaryPoint, Domain, Point};

/// Gradient magnitudes below this threshold take the degenerate branch.
const GRADIENT_DEGENERACY: f64 = 1e-8;

/// Second difference of `u` along the normalized gradient at `x`, both
/// obtained by central differences with step `h_fd`. Requires
/// `dist(x, boundary) > h_fd` so every probe stays inside the domain.
pub fn infinity_laplacian_residual(
    domain: &Domain,
    u: impl Fn(Point) -> f64,
    x: Point,
    h_fd: f64,
) -> Result<f64> {
    if !(h_fd > 0.0) {
        return Err(Error::InvalidParam(format!("h_fd must be positive, got {h_fd}")));
    }
    if domain.dist_to_boundary(x) <= h_fd {
        return Err(Error::Analysis(format!(
            "probe ({}, {}) is within h_fd of the boundary",
            x.x, x.y
        )));
    }
    let axes: &[Point] = if domain.is_1d() {
        &[Point { x: 1.0, y: 0.0 }]
    } else {
        &[Point { x: 1.0, y: 0.0 }, Point { x: 0.0, y: 1.0 }]
    };
    let mut grad = Point::new(0.0, 0.0);
    for e in axes {
        let d = (u(x.add(e.scale(h_fd))) - u(x.sub(e.scale(h_fd)))) / (2.0 * h_fd);
        grad = grad.add(e.scale(d));
    }
    if grad.norm() > GRADIENT_DEGENERACY {
        let ghat = grad.unit().expect("norm checked above");
        let plus = u(x.add(ghat.scale(h_fd)));
        let minus = u(x.sub(ghat.scale(h_fd)));
        Ok((plus - 2.0 * u(x) + minus) / (h_fd * h_fd))
    } else {
        // Degenerate gradient: largest one-sided probe over coordinate
        // directions.
        let mut best = f64::NEG_INFINITY;
        for e in axes {
            for sign in [1.0, -1.0] {
                let y = x.add(e.scale(sign * h_fd));
                best = best.max(2.0 * (u(y) - u(x)) / (h_fd * h_fd));
            }
        }
        Ok(best)
    }
}

/// One-sided inward difference of the normal derivative against `g`:
/// `(u(p) - u(p - h_fd*n))/h_fd - g(p)` at a Neumann boundary point.
pub fn neumann_residual(
    domain: &Domain,
    u: impl Fn(Point) -> f64,
    bp: &BoundaryPoint,
    g: &GField,
    h_fd: f64,
) -> Result<f64> {
    if bp.label != BoundaryLabel::Neumann {
        return Err(Error::Analysis(
            "normal-derivative residual applies to Neumann boundary points".into(),
        ));
    }
    if !(h_fd > 0.0) {
        return Err(Error::InvalidParam(format!("h_fd must be positive, got {h_fd}")));
    }
    let inward = bp.position.sub(bp.normal.scale(h_fd));
    if !domain.contains(inward) {
        return Err(Error::Analysis(format!(
            "inward probe ({}, {}) exits the domain",
            inward.x, inward.y
        )));
    }
    Ok((u(bp.position) - u(inward)) / h_fd - g.eval(bp.position))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::{build_grid, GridMode};
    use crate::geometry::DiskArc;
    use crate::oracle1d::{oracle_values, Oracle1DParams, Variant1D};
    use approx::assert_relative_eq;

    fn big_disk() -> Domain {
        Domain::disk_all_dirichlet(Point::new(0.0, 0.0), 4.0).unwrap()
    }

    fn interval() -> Domain {
        Domain::interval(0.0, 1.0, BoundaryLabel::Dirichlet, BoundaryLabel::Neumann).unwrap()
    }

    #[test]
    fn linear_fields_are_harmonic() {
        let dom = big_disk();
        let u = |p: Point| 3.0 * p.x - 2.0 * p.y + 0.7;
        for x in [Point::new(0.0, 0.0), Point::new(1.0, -1.5), Point::new(-2.0, 0.3)] {
            let r = infinity_laplacian_residual(&dom, u, x, 1e-3).unwrap();
            assert!(r.abs() <= 1e-6, "residual {r} at ({}, {})", x.x, x.y);
        }
    }

    #[test]
    fn cone_is_harmonic_away_from_the_tip() {
        let dom = big_disk();
        let z = Point::new(0.5, -0.25);
        let u = move |p: Point| p.dist(z);
        for x in [Point::new(2.0, 1.0), Point::new(-1.0, 2.0), Point::new(-2.0, -1.0)] {
            let r = infinity_laplacian_residual(&dom, u, x, 1e-3).unwrap();
            assert!(r.abs() <= 1e-5, "residual {r}");
        }
    }

    #[test]
    fn quadratic_has_unit_second_derivative_along_the_gradient() {
        let dom = big_disk();
        let u = |p: Point| 0.5 * (p.x * p.x + p.y * p.y);
        let r = infinity_laplacian_residual(&dom, u, Point::new(1.0, 0.0), 1e-4).unwrap();
        assert_relative_eq!(r, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn degenerate_gradient_uses_the_limit_probe() {
        let dom = big_disk();
        // Gradient vanishes at the origin; the probe reads off the
        // largest directional second difference, which is 2 for |x|^2.
        let u = |p: Point| p.x * p.x + p.y * p.y;
        let r = infinity_laplacian_residual(&dom, u, Point::new(0.0, 0.0), 1e-4).unwrap();
        assert_relative_eq!(r, 2.0, epsilon = 1e-6);
    }

    #[test]
    fn probes_near_the_boundary_are_rejected() {
        let dom = big_disk();
        let u = |_: Point| 0.0;
        assert!(infinity_laplacian_residual(&dom, u, Point::new(3.9999, 0.0), 1e-3).is_err());
    }

    #[test]
    fn one_dimensional_limit_is_harmonic() {
        let dom = interval();
        let u = |p: Point| 2.5 * p.x;
        for k in 1..100 {
            let x = Point::new(k as f64 / 100.0, 0.0);
            if dom.dist_to_boundary(x) <= 1e-3 {
                continue;
            }
            let r = infinity_laplacian_residual(&dom, u, x, 1e-3).unwrap();
            assert!(r.abs() <= 1e-6, "residual {r} at x={}", x.x);
        }
    }

    #[test]
    fn neumann_residual_of_the_limit_vanishes() {
        let dom = interval();
        let g1 = 1.5;
        let u = move |p: Point| g1 * p.x;
        let bp = BoundaryPoint {
            position: Point::new(1.0, 0.0),
            normal: Point::new(1.0, 0.0),
            label: BoundaryLabel::Neumann,
        };
        let r = neumann_residual(&dom, u, &bp, &GField::Constant(g1), 0.1).unwrap();
        assert!(r.abs() <= 1e-14, "residual {r}");
    }

    #[test]
    fn discrete_chain_value_matches_g_exactly_for_dyadic_eps() {
        // eps = 1/16 keeps every cell value dyadic, so the one-sided
        // difference of the stored values cancels bit for bit.
        let eps = 1.0 / 16.0;
        let dom = interval();
        let grid = build_grid(&dom, eps, 0.0, GridMode::Chain1D).unwrap();
        let values = oracle_values(&Oracle1DParams::new(eps, 1.0, Variant1D::StripOnly).unwrap());
        let u = |p: Point| grid.nearest_value(&values, p);
        let bp = BoundaryPoint {
            position: Point::new(1.0, 0.0),
            normal: Point::new(1.0, 0.0),
            label: BoundaryLabel::Neumann,
        };
        let r = neumann_residual(&dom, u, &bp, &GField::Constant(1.0), eps).unwrap();
        assert_eq!(r, 0.0);
    }

    #[test]
    fn zero_field_reports_minus_g() {
        let dom = interval();
        let bp = BoundaryPoint {
            position: Point::new(1.0, 0.0),
            normal: Point::new(1.0, 0.0),
            label: BoundaryLabel::Neumann,
        };
        let r = neumann_residual(&dom, |_| 0.0, &bp, &GField::Constant(1.0), 0.05).unwrap();
        assert_eq!(r, -1.0);
    }

    #[test]
    fn dirichlet_points_are_rejected() {
        let dom = interval();
        let bp = BoundaryPoint {
            position: Point::new(0.0, 0.0),
            normal: Point::new(-1.0, 0.0),
            label: BoundaryLabel::Dirichlet,
        };
        assert!(neumann_residual(&dom, |_| 0.0, &bp, &GField::Constant(1.0), 0.05).is_err());
    }

    #[test]
    fn inward_probe_must_stay_inside() {
        let dom = Domain::disk(
            Point::new(0.0, 0.0),
            1.0,
            vec![
                DiskArc {
                    start: 0.0,
                    end: std::f64::consts::PI,
                    label: BoundaryLabel::Neumann,
                },
                DiskArc {
                    start: std::f64::consts::PI,
                    end: std::f64::consts::TAU,
                    label: BoundaryLabel::Dirichlet,
                },
            ],
        )
        .unwrap();
        let bp = BoundaryPoint {
            position: Point::new(0.0, 1.0),
            normal: Point::new(0.0, 1.0),
            label: BoundaryLabel::Neumann,
        };
        // A probe longer than the diameter exits through the far side.
        assert!(neumann_residual(&dom, |_| 0.0, &bp, &GField::Constant(1.0), 2.5).is_err());
    }
}
