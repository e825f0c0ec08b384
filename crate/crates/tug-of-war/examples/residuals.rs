//! Operator and boundary-condition residuals on analytic fields: linear
//! profiles and distance cones are annihilated by the operator, the
//! half-quadratic reads back its second derivative, and the 1-D limit
//! satisfies the Neumann condition exactly.
//!
//! ```bash
//! cargo run --release --example residuals
//! ```

use tug_of_war::analysis::{infinity_laplacian_residual, neumann_residual};
use tug_of_war::{
    build_grid, oracle_values, BoundaryLabel, BoundaryPoint, Domain, GField, GridMode,
    Oracle1DParams, Point, Variant1D,
};

type Field = Box<dyn Fn(Point) -> f64>;

fn main() {
    let disk = Domain::disk_all_dirichlet(Point::new(0.0, 0.0), 4.0).unwrap();
    let h_fd = 1e-3;

    println!("interior operator residuals (h_fd = {h_fd}):");
    let cases: Vec<(&str, Field)> = vec![
        ("linear 3x - 2y", Box::new(|p: Point| 3.0 * p.x - 2.0 * p.y)),
        (
            "cone |x - (0.5,-0.25)|",
            Box::new(|p: Point| p.dist(Point::new(0.5, -0.25))),
        ),
        (
            "half quadratic |x|^2/2",
            Box::new(|p: Point| 0.5 * (p.x * p.x + p.y * p.y)),
        ),
    ];
    for (name, field) in &cases {
        print!("  {name:<24}");
        for x in [Point::new(1.0, 0.0), Point::new(-1.5, 2.0), Point::new(2.0, -2.0)] {
            let r = infinity_laplacian_residual(&disk, field, x, h_fd).unwrap();
            print!(" {r:>12.3e}");
        }
        println!();
    }
    println!("  (the half quadratic reports its second derivative, 1, along the gradient)");

    // Degenerate-gradient probe at the vertex of |x|^2.
    let r = infinity_laplacian_residual(
        &disk,
        |p: Point| p.x * p.x + p.y * p.y,
        Point::new(0.0, 0.0),
        h_fd,
    )
    .unwrap();
    println!("  |x|^2 at its vertex (degenerate gradient): {r:.6}");

    // Neumann residuals at the right endpoint of the unit interval.
    let interval =
        Domain::interval(0.0, 1.0, BoundaryLabel::Dirichlet, BoundaryLabel::Neumann).unwrap();
    let g1 = 1.0;
    let bp = BoundaryPoint {
        position: Point::new(1.0, 0.0),
        normal: Point::new(1.0, 0.0),
        label: BoundaryLabel::Neumann,
    };
    let limit = move |p: Point| g1 * p.x;
    let r = neumann_residual(&interval, limit, &bp, &GField::Constant(g1), 0.05).unwrap();
    println!("\nnormal-derivative residual of the limit profile: {r:.3e}");

    // Discrete chain values with a dyadic step: the one-sided difference
    // cancels exactly.
    let eps = 1.0 / 16.0;
    let grid = build_grid(&interval, eps, 0.0, GridMode::Chain1D).unwrap();
    let values = oracle_values(&Oracle1DParams::new(eps, g1, Variant1D::StripOnly).unwrap());
    let field = |p: Point| grid.nearest_value(&values, p);
    let r = neumann_residual(&interval, field, &bp, &GField::Constant(g1), eps).unwrap();
    println!("discrete chain (eps = 1/16), h_fd = eps: residual = {r:.1}");
}
