//! Solve the 1-D game on the unit interval and compare against the
//! closed-form cell values.
//!
//! ```bash
//! cargo run --release --example solve_1d
//! ```

use std::sync::Arc;

use tug_of_war::{
    build_grid, oracle_values, solve_dpp, BoundaryLabel, Domain, GField, GridMode,
    Oracle1DParams, PayoffVariant, RunningPayoff, Variant1D,
};

fn main() {
    let eps = 0.1;
    let g1 = 1.0;
    let domain =
        Domain::interval(0.0, 1.0, BoundaryLabel::Dirichlet, BoundaryLabel::Neumann).unwrap();
    let grid = Arc::new(build_grid(&domain, eps, 0.0, GridMode::Chain1D).unwrap());

    for (label, variant, oracle_variant) in [
        ("strip-only", PayoffVariant::StripOnly, Variant1D::StripOnly),
        ("full", PayoffVariant::Full, Variant1D::FullPayoff),
    ] {
        let payoff = RunningPayoff::new(eps, GField::Constant(g1), variant).unwrap();
        let u = solve_dpp(grid.clone(), &payoff, 1e-14, 1_000_000).unwrap();
        let oracle = oracle_values(&Oracle1DParams::new(eps, g1, oracle_variant).unwrap());

        println!("payoff variant: {label}");
        println!(
            "  converged in {} iterations, residual {:.3e}",
            u.iterations, u.residual
        );
        println!("  {:>4} {:>12} {:>12} {:>10}", "cell", "solved", "closed form", "error");
        let mut sup_err = 0.0f64;
        for (k, (solved, exact)) in u.values.iter().zip(&oracle).enumerate() {
            let err = (solved - exact).abs();
            sup_err = sup_err.max(err);
            println!("  {k:>4} {solved:>12.8} {exact:>12.8} {err:>10.2e}");
        }
        println!("  sup error: {sup_err:.2e}\n");
    }
}
