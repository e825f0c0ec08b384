//! Monte Carlo game simulation: estimate expected payoffs under optimal
//! 1-D strategies and compare against the fixed-point values; replay one
//! episode move by move.
//!
//! ```bash
//! cargo run --release --example simulate_game
//! ```

use std::sync::Arc;

use tug_of_war::{
    build_grid, estimate_value, oracle_values, play_episode, solve_dpp, BoundaryLabel, Domain,
    GField, GridMode, Oracle1DParams, Player, PayoffVariant, RunningPayoff, Strategy, Variant1D,
};

fn main() {
    let eps = 0.1;
    let domain =
        Domain::interval(0.0, 1.0, BoundaryLabel::Dirichlet, BoundaryLabel::Neumann).unwrap();
    let grid = Arc::new(build_grid(&domain, eps, 0.0, GridMode::Chain1D).unwrap());
    let payoff = RunningPayoff::strip_only(eps, GField::Constant(1.0)).unwrap();

    let s_right = Strategy::optimal_1d(&grid, Player::I).unwrap();
    let s_left = Strategy::optimal_1d(&grid, Player::II).unwrap();
    let oracle = oracle_values(&Oracle1DParams::new(eps, 1.0, Variant1D::StripOnly).unwrap());

    println!("expected payoff vs game value (10000 episodes per start):");
    println!(
        "  {:>5} {:>10} {:>10} {:>10} {:>6}",
        "start", "estimate", "std err", "value", "sigmas"
    );
    for start in [2, 5, 8] {
        let est = estimate_value(
            &grid, &payoff, &s_right, &s_left, start, 10_000, 7, 1_000_000,
        )
        .unwrap();
        let sigmas = (est.mean - oracle[start]).abs() / est.std_error;
        println!(
            "  {start:>5} {:>10.5} {:>10.5} {:>10.5} {sigmas:>6.2}",
            est.mean, est.std_error, oracle[start]
        );
    }

    // Greedy strategies read the solved value instead of the 1-D shortcut
    // and recover the same estimates.
    let u = solve_dpp(grid.clone(), &payoff, 1e-13, 1_000_000).unwrap();
    let g_i = Strategy::greedy(&u, Player::I);
    let g_ii = Strategy::greedy(&u, Player::II);
    let est = estimate_value(&grid, &payoff, &g_i, &g_ii, 5, 10_000, 7, 1_000_000).unwrap();
    println!(
        "\ngreedy strategies from cell 5: {:.5} +- {:.5} (value {:.5})",
        est.mean, est.std_error, oracle[5]
    );

    // One full episode, move by move.
    let trace = play_episode(&grid, &payoff, &s_right, &s_left, 5, 12345, 1_000_000).unwrap();
    println!(
        "\nsample episode from cell 5: {} moves, payoff {:.4}, terminated {}",
        trace.steps, trace.payoff_accumulated, trace.terminated
    );
    print!("  path:");
    for node in trace.nodes.iter().take(25) {
        print!(" {node}");
    }
    if trace.nodes.len() > 25 {
        print!(" ...");
    }
    println!();

    // A zero-payoff hook game: every episode pays nothing.
    let zero = RunningPayoff::zero(eps);
    let est = estimate_value(&grid, &zero, &s_right, &s_left, 5, 100, 7, 1_000_000).unwrap();
    assert_eq!(est.mean, 0.0);
    println!("zero-payoff hook: mean {:.1}, as expected", est.mean);

    let _ = PayoffVariant::Full; // see solve_1d for the full-payoff game
}
