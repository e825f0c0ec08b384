//! Closed-form 1-D cell values: recurrence residuals and the gap to the
//! limit profile `g(1) * x` across a sweep of game steps.
//!
//! ```bash
//! cargo run --release --example closed_form_1d
//! ```

use tug_of_war::{check_recurrences, limit_gap, oracle_values, Oracle1DParams, Variant1D};

fn main() {
    let g1 = 1.0;
    for variant in [Variant1D::StripOnly, Variant1D::FullPayoff] {
        println!("variant: {variant:?}");
        println!(
            "  {:>8} {:>8} {:>14} {:>14}",
            "eps", "cells", "recurrence", "limit gap"
        );
        for eps in [0.1, 0.05, 0.025, 0.0125] {
            let p = Oracle1DParams::new(eps, g1, variant).unwrap();
            let values = oracle_values(&p);
            let residual = check_recurrences(&p, &values).unwrap();
            let gap = limit_gap(&p);
            println!(
                "  {:>8} {:>8} {:>14.3e} {:>14.6e}",
                eps,
                p.cells(),
                residual,
                gap
            );
        }
        println!();
    }

    // The full-payoff values interpolate between the linear limit and the
    // quadratic correction; show one profile.
    let p = Oracle1DParams::new(0.1, g1, Variant1D::FullPayoff).unwrap();
    println!("full payoff, eps = 0.1 (Theta = {:.4}):", p.theta());
    println!("  {:>4} {:>12} {:>12}", "k", "a_k", "g1*k*eps");
    for (k, a) in oracle_values(&p).iter().enumerate() {
        println!("  {k:>4} {a:>12.6} {:>12.6}", g1 * k as f64 * 0.1);
    }
}
