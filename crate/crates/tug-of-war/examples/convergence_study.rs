//! Convergence studies: the 1-D values against their explicit limit, and
//! 2-D disk values against each other across a shrinking game step.
//!
//! ```bash
//! cargo run --release --example convergence_study
//! ```

use tug_of_war::analysis::{convergence_study, HRule};
use tug_of_war::{BoundaryLabel, DiskArc, Domain, GField, PayoffVariant, Point};

fn main() {
    let interval =
        Domain::interval(0.0, 1.0, BoundaryLabel::Dirichlet, BoundaryLabel::Neumann).unwrap();
    let report = convergence_study(
        &interval,
        GField::Constant(1.0),
        PayoffVariant::Full,
        &[0.1, 0.05, 0.025],
        HRule::EpsOver(4.0),
        Some(1e-13),
        None,
    )
    .unwrap();
    println!("1-D full payoff vs the limit g(1)*x:");
    println!(
        "  {:>8} {:>8} {:>12} {:>10} {:>10}",
        "eps", "iters", "limit gap", "4*eps", "lipschitz"
    );
    for row in &report.rows {
        println!(
            "  {:>8} {:>8} {:>12.6e} {:>10.3} {:>10.4}",
            row.eps,
            row.iterations,
            row.limit_gap.unwrap(),
            4.0 * row.eps,
            row.lipschitz
        );
    }

    let disk = Domain::disk(
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
    .unwrap();
    let report = convergence_study(
        &disk,
        GField::Constant(1.0),
        PayoffVariant::Full,
        &[0.2, 0.1, 0.05],
        HRule::EpsOver(3.0),
        Some(1e-8),
        Some(100_000),
    )
    .unwrap();
    println!("\n2-D disk, successive solutions on common evaluation points:");
    println!(
        "  {:>8} {:>8} {:>10} {:>14} {:>10}",
        "eps", "iters", "sup u", "sup diff", "lipschitz"
    );
    for row in &report.rows {
        println!(
            "  {:>8} {:>8} {:>10.4} {:>14} {:>10.4}",
            row.eps,
            row.iterations,
            row.sup_u,
            row.successive_diff
                .map(|d| format!("{d:.6}"))
                .unwrap_or_else(|| "-".into()),
            row.lipschitz
        );
    }
    println!(
        "  successive sup-differences decrease: {}",
        report.diffs_decrease()
    );
}
