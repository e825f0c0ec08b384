//! Barrier supersolution for the first-stage game on the unit disk:
//! measure the reachability constant, scan the fixed-point inequality at
//! every node, then solve the first-stage game and verify the linear
//! bound it implies.
//!
//! ```bash
//! cargo run --release --example barrier_check
//! ```

use tug_of_war::analysis::{
    barrier_value, check_barrier_bound, check_supersolution, measure_reachability,
    solve_first_stage, BarrierParams,
};
use tug_of_war::{build_grid, BoundaryLabel, DiskArc, Domain, GridMode, Point};

fn disk() -> Domain {
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
    let domain = disk();
    let x0 = Point::new(0.0, 0.0);
    let k_max = 1.0;

    println!("supersolution scan, x0 at the center, K = {k_max}:");
    println!(
        "  {:>6} {:>8} {:>10} {:>12} {:>12}",
        "eps", "nodes", "c", "C1", "worst margin"
    );
    for eps in [0.1, 0.05] {
        let grid = build_grid(&domain, eps, eps / 4.0, GridMode::Lattice2D).unwrap();
        let c = measure_reachability(&grid, x0, eps).unwrap();
        let params = BarrierParams::new(x0, k_max, c, 1.0, eps).unwrap();
        let report = check_supersolution(&params, &grid).unwrap();
        println!(
            "  {eps:>6} {:>8} {c:>10.6} {:>12.2} {:>12.3e}  {}",
            grid.len(),
            params.c1,
            report.worst_margin,
            if report.pass { "pass" } else { "FAIL" }
        );
    }

    // A deliberately coarse configuration with a fixed c: the inequality
    // fails and the report names the offending node.
    let eps = 0.2;
    let grid = build_grid(&domain, eps, 0.05, GridMode::Lattice2D).unwrap();
    let params = BarrierParams::new(x0, 10.0, 0.5, 1.0, eps).unwrap();
    let report = check_supersolution(&params, &grid).unwrap();
    println!(
        "\ncoarse counterexample (eps = 0.2, K = 10, c fixed at 0.5): pass = {}, \
         margin {:.3e} at {:?}",
        report.pass, report.worst_margin, report.worst_location
    );

    // Solve the first-stage game (absorb at x0, strip payoff around the
    // whole boundary) and verify v <= (C1 + 1)|x - x0| beyond eps.
    let eps = 0.1;
    let c = {
        let grid = build_grid(&domain, eps, eps / 3.0, GridMode::Lattice2D).unwrap();
        measure_reachability(&grid, x0, eps).unwrap()
    };
    let params = BarrierParams::new(x0, k_max, c, 1.0, eps).unwrap();
    let v = solve_first_stage(&domain, eps, eps / 3.0, x0, k_max, 1e-8, 200_000).unwrap();
    println!(
        "\nfirst-stage solve: {} nodes, {} iterations, sup v = {:.4}",
        v.grid.len(),
        v.iterations,
        v.sup()
    );
    let bound = check_barrier_bound(&v, &params).unwrap();
    println!(
        "linear bound v <= (C1 + 1)|x - x0|: pass = {}, worst margin {:.4}",
        bound.pass, bound.worst_margin
    );
    println!(
        "barrier at |x - x0| = 0.5: vbar = {:.4}",
        barrier_value(&params, Point::new(0.5, 0.0))
    );
}
