//! Boundary geometry: sampled boundary points with outward normals, and
//! transversality constants for disks and polygons.
//!
//! The constant at `x0` is the smallest inner product between the
//! direction from `x0` to a boundary point and that point's outward
//! normal; it is 1 at a disk center, `sqrt(1 - d^2)` at distance `d` from
//! it, `sqrt(2)/2` at a square center, and 0 on the interior of a flat
//! edge.
//!
//! ```bash
//! cargo run --release --example transversality
//! ```

use tug_of_war::{BoundaryLabel, DiskArc, Domain, Point};

fn main() {
    let disk = Domain::disk(
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
    let square = Domain::convex_polygon(
        vec![
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
        ],
        vec![
            BoundaryLabel::Dirichlet,
            BoundaryLabel::Neumann,
            BoundaryLabel::Dirichlet,
            BoundaryLabel::Dirichlet,
        ],
    )
    .unwrap();

    println!("eight boundary samples of the half-and-half disk:");
    for bp in disk.boundary_sample(8).unwrap() {
        println!(
            "  ({:>7.4}, {:>7.4})  normal ({:>7.4}, {:>7.4})  {:?}",
            bp.position.x, bp.position.y, bp.normal.x, bp.normal.y, bp.label
        );
    }

    let samples = 4096;
    println!("\ntransversality constants ({samples} boundary samples):");
    let cases = [
        ("disk center", &disk, Point::new(0.0, 0.0)),
        ("disk at distance 0.5", &disk, Point::new(0.5, 0.0)),
        ("disk at distance 0.9", &disk, Point::new(0.9, 0.0)),
        ("square center", &square, Point::new(0.5, 0.5)),
        ("square near a corner", &square, Point::new(0.9, 0.9)),
        ("square on an edge", &square, Point::new(0.5, 0.0)),
    ];
    for (name, domain, x0) in cases {
        let c = domain.transversality_constant(x0, samples).unwrap();
        println!("  {name:<24} c = {c:.6}");
    }
    println!("\n(flat boundary pieces drive the constant to zero from points on them;");
    println!(" strict convexity keeps it positive everywhere in the interior)");
}
