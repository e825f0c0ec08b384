//! Solve the game on the unit disk with a Dirichlet left half circle and
//! a Neumann right half, then report value statistics along the
//! horizontal diameter.
//!
//! ```bash
//! cargo run --release --example solve_disk
//! ```

use std::sync::Arc;

use tug_of_war::analysis::measure_lipschitz;
use tug_of_war::{
    build_grid, solve_dpp, BoundaryLabel, DiskArc, Domain, GField, GridMode, Point,
    RunningPayoff,
};

fn mixed_disk() -> Domain {
    Domain::disk(
        Point::new(0.0, 0.0),
        1.0,
        vec![
            DiskArc {
                start: std::f64::consts::FRAC_PI_2,
                end: 1.5 * std::f64::consts::PI,
                label: BoundaryLabel::Dirichlet,
            },
            DiskArc {
                start: 1.5 * std::f64::consts::PI,
                end: 2.5 * std::f64::consts::PI,
                label: BoundaryLabel::Neumann,
            },
        ],
    )
    .unwrap()
}

fn main() {
    let eps = 0.1;
    let h = eps / 4.0;
    let domain = mixed_disk();
    let grid = Arc::new(build_grid(&domain, eps, h, GridMode::Lattice2D).unwrap());
    println!(
        "lattice: {} nodes ({} absorbing), eps = {eps}, h = {h}",
        grid.len(),
        grid.dirichlet.iter().filter(|&&d| d).count()
    );

    let payoff = RunningPayoff::full(eps, GField::Constant(1.0)).unwrap();
    let u = solve_dpp(grid.clone(), &payoff, 1e-10, 100_000).unwrap();
    println!(
        "solved in {} iterations, residual {:.3e}, converged {}",
        u.iterations, u.residual, u.converged
    );
    println!("sup u = {:.6}", u.sup());
    let (l, pair) = measure_lipschitz(&u, eps).unwrap();
    println!(
        "separated-pair Lipschitz constant {l:.4} attained at ({:.3},{:.3})-({:.3},{:.3})",
        pair.0.x, pair.0.y, pair.1.x, pair.1.y
    );

    // Profile along the horizontal diameter: absorbing on the left,
    // payoff boundary on the right.
    println!("\nvalue along y = 0:");
    println!("  {:>8} {:>10}", "x", "u");
    let mut x = -1.0;
    while x <= 1.0 + 1e-9 {
        let p = Point::new(x, 0.0);
        println!("  {x:>8.2} {:>10.6}", grid.nearest_value(&u.values, p));
        x += 0.2;
    }
}
