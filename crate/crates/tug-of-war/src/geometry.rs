//! Domains, boundary labeling, normals, distances, and the transversality
//! condition.
//!
//! A [`Domain`] is a 1-D interval, a convex polygon, or a disk, with its
//! boundary partitioned into Dirichlet (absorbing) and Neumann (payoff)
//! pieces. Intervals live on the x-axis; all points are 2-D.

use crate::error::{Error, Result};

/// Relative tolerance used for containment and distance comparisons,
/// scaled by the domain diameter.
pub const REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist(&self, other: Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn sub(&self, other: Point) -> Point {
        Point::new(self.x - other.x, self.y - other.y)
    }

    pub fn add(&self, other: Point) -> Point {
        Point::new(self.x + other.x, self.y + other.y)
    }

    pub fn scale(&self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }

    pub fn dot(&self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn unit(&self) -> Option<Point> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self.scale(1.0 / n))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryLabel {
    Dirichlet,
    Neumann,
}

/// A sampled boundary point with its unit outward normal and label.
#[derive(Debug, Clone, Copy)]
pub struct BoundaryPoint {
    pub position: Point,
    pub normal: Point,
    pub label: BoundaryLabel,
}

/// Angular arc of a disk boundary, `start <= theta < end` in radians with
/// `end - start <= 2*pi`. `end` may exceed `2*pi` to express wrap-around.
#[derive(Debug, Clone, Copy)]
pub struct DiskArc {
    pub start: f64,
    pub end: f64,
    pub label: BoundaryLabel,
}

#[derive(Debug, Clone)]
pub enum Domain {
    Interval {
        a: f64,
        b: f64,
        left: BoundaryLabel,
        right: BoundaryLabel,
    },
    /// Counterclockwise convex polygon; `edge_labels[i]` labels the edge
    /// from `vertices[i]` to `vertices[(i+1) % n]`.
    ConvexPolygon {
        vertices: Vec<Point>,
        edge_labels: Vec<BoundaryLabel>,
    },
    Disk {
        center: Point,
        radius: f64,
        arcs: Vec<DiskArc>,
    },
}

const TAU: f64 = std::f64::consts::TAU;

fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t == TAU {
        0.0
    } else {
        t
    }
}

impl Domain {
    pub fn interval(a: f64, b: f64, left: BoundaryLabel, right: BoundaryLabel) -> Result<Domain> {
        if !(a < b) {
            return Err(Error::InvalidDomain(format!(
                "interval requires a < b, got a={a}, b={b}"
            )));
        }
        let d = Domain::Interval { a, b, left, right };
        d.require_dirichlet()?;
        Ok(d)
    }

    pub fn convex_polygon(
        vertices: Vec<Point>,
        edge_labels: Vec<BoundaryLabel>,
    ) -> Result<Domain> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::InvalidDomain(format!(
                "polygon needs at least 3 vertices, got {n}"
            )));
        }
        if edge_labels.len() != n {
            return Err(Error::InvalidDomain(format!(
                "polygon with {n} edges needs {n} labels, got {}",
                edge_labels.len()
            )));
        }
        // Counterclockwise and convex: every cross product of consecutive
        // edge vectors must be strictly positive.
        for i in 0..n {
            let p0 = vertices[i];
            let p1 = vertices[(i + 1) % n];
            let p2 = vertices[(i + 2) % n];
            let e1 = p1.sub(p0);
            let e2 = p2.sub(p1);
            let cross = e1.x * e2.y - e1.y * e2.x;
            if cross <= 0.0 {
                return Err(Error::InvalidDomain(format!(
                    "polygon is not convex/counterclockwise at vertex {}",
                    (i + 1) % n
                )));
            }
        }
        let d = Domain::ConvexPolygon {
            vertices,
            edge_labels,
        };
        d.require_dirichlet()?;
        Ok(d)
    }

    pub fn disk(center: Point, radius: f64, arcs: Vec<DiskArc>) -> Result<Domain> {
        if !(radius > 0.0) {
            return Err(Error::InvalidDomain(format!(
                "disk radius must be positive, got {radius}"
            )));
        }
        if arcs.is_empty() {
            return Err(Error::InvalidDomain("disk needs at least one arc".into()));
        }
        let mut arcs = arcs;
        for arc in &arcs {
            if !(arc.end > arc.start) || arc.end - arc.start > TAU + 1e-9 {
                return Err(Error::InvalidDomain(format!(
                    "disk arc [{}, {}) is empty or longer than a full turn",
                    arc.start, arc.end
                )));
            }
        }
        arcs.sort_by(|u, v| {
            normalize_angle(u.start)
                .partial_cmp(&normalize_angle(v.start))
                .unwrap()
        });
        // Arcs must tile the circle: each start matches the previous end and
        // the lengths sum to a full turn.
        let total: f64 = arcs.iter().map(|a| a.end - a.start).sum();
        if (total - TAU).abs() > 1e-9 {
            return Err(Error::InvalidDomain(format!(
                "disk arcs cover angle {total} instead of 2*pi"
            )));
        }
        for i in 0..arcs.len() {
            let cur_end = normalize_angle(arcs[i].end);
            let next_start = normalize_angle(arcs[(i + 1) % arcs.len()].start);
            let gap = (cur_end - next_start).abs();
            if gap > 1e-9 && (gap - TAU).abs() > 1e-9 {
                return Err(Error::InvalidDomain(
                    "disk arcs overlap or leave a gap".into(),
                ));
            }
        }
        let d = Domain::Disk {
            center,
            radius,
            arcs,
        };
        d.require_dirichlet()?;
        Ok(d)
    }

    /// Disk with a single Dirichlet arc covering the whole circle.
    pub fn disk_all_dirichlet(center: Point, radius: f64) -> Result<Domain> {
        Domain::disk(
            center,
            radius,
            vec![DiskArc {
                start: 0.0,
                end: TAU,
                label: BoundaryLabel::Dirichlet,
            }],
        )
    }

    fn require_dirichlet(&self) -> Result<()> {
        if !self.labels().contains(&BoundaryLabel::Dirichlet) {
            return Err(Error::InvalidDomain(
                "at least one boundary piece must be Dirichlet".into(),
            ));
        }
        Ok(())
    }

    fn labels(&self) -> Vec<BoundaryLabel> {
        match self {
            Domain::Interval { left, right, .. } => vec![*left, *right],
            Domain::ConvexPolygon { edge_labels, .. } => edge_labels.clone(),
            Domain::Disk { arcs, .. } => arcs.iter().map(|a| a.label).collect(),
        }
    }

    pub fn is_1d(&self) -> bool {
        matches!(self, Domain::Interval { .. })
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Interval { a, b, .. } => b - a,
            Domain::ConvexPolygon { vertices, .. } => {
                let mut d = 0.0f64;
                for i in 0..vertices.len() {
                    for j in i + 1..vertices.len() {
                        d = d.max(vertices[i].dist(vertices[j]));
                    }
                }
                d
            }
            Domain::Disk { radius, .. } => 2.0 * radius,
        }
    }

    /// Absolute distance tolerance: `REL_TOL * diameter`.
    pub fn tol(&self) -> f64 {
        REL_TOL * self.diameter()
    }

    pub fn centroid(&self) -> Point {
        match self {
            Domain::Interval { a, b, .. } => Point::new(0.5 * (a + b), 0.0),
            Domain::ConvexPolygon { vertices, .. } => {
                let n = vertices.len() as f64;
                let (sx, sy) = vertices
                    .iter()
                    .fold((0.0, 0.0), |(sx, sy), p| (sx + p.x, sy + p.y));
                Point::new(sx / n, sy / n)
            }
            Domain::Disk { center, .. } => *center,
        }
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        match self {
            Domain::Interval { a, b, .. } => (Point::new(*a, 0.0), Point::new(*b, 0.0)),
            Domain::ConvexPolygon { vertices, .. } => {
                let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
                let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
                for v in vertices {
                    lo.x = lo.x.min(v.x);
                    lo.y = lo.y.min(v.y);
                    hi.x = hi.x.max(v.x);
                    hi.y = hi.y.max(v.y);
                }
                (lo, hi)
            }
            Domain::Disk { center, radius, .. } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
        }
    }

    /// True iff `p` lies in the closure of the domain, with inclusion
    /// tolerance `REL_TOL * diameter`.
    pub fn contains(&self, p: Point) -> bool {
        let tol = self.tol();
        match self {
            Domain::Interval { a, b, .. } => {
                p.y.abs() <= tol && p.x >= a - tol && p.x <= b + tol
            }
            Domain::ConvexPolygon { vertices, .. } => {
                let n = vertices.len();
                for i in 0..n {
                    let v0 = vertices[i];
                    let v1 = vertices[(i + 1) % n];
                    let e = v1.sub(v0);
                    let len = e.norm();
                    // Signed distance to the edge line; positive outside.
                    let s = (e.x * (p.y - v0.y) - e.y * (p.x - v0.x)) / len;
                    if s < -tol {
                        return false;
                    }
                }
                true
            }
            Domain::Disk { center, radius, .. } => p.dist(*center) <= radius + tol,
        }
    }

    /// Distance from `p` to the whole boundary.
    pub fn dist_to_boundary(&self, p: Point) -> f64 {
        self.nearest_on_boundary(p, None)
            .map(|(_, d)| d)
            .unwrap_or(f64::INFINITY)
    }

    /// Distance from `p` to the Neumann part of the boundary; `+inf` when
    /// the Neumann set is empty. `p` must lie in the closure of the domain.
    pub fn dist_to_neumann(&self, p: Point) -> Result<f64> {
        if !self.contains(p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        Ok(self
            .nearest_on_boundary(p, Some(BoundaryLabel::Neumann))
            .map(|(_, d)| d)
            .unwrap_or(f64::INFINITY))
    }

    /// Nearest Neumann boundary point and its distance, if any.
    pub fn nearest_neumann(&self, p: Point) -> Result<Option<(Point, f64)>> {
        if !self.contains(p) {
            return Err(Error::OutsideDomain { x: p.x, y: p.y });
        }
        Ok(self.nearest_on_boundary(p, Some(BoundaryLabel::Neumann)))
    }

    /// Distance to Dirichlet boundary pieces (no containment check; used
    /// when classifying grid nodes).
    pub fn dist_to_dirichlet(&self, p: Point) -> f64 {
        self.nearest_on_boundary(p, Some(BoundaryLabel::Dirichlet))
            .map(|(_, d)| d)
            .unwrap_or(f64::INFINITY)
    }

    /// Nearest boundary point among pieces matching `label` (all pieces
    /// when `label` is `None`).
    pub fn nearest_on_boundary(
        &self,
        p: Point,
        label: Option<BoundaryLabel>,
    ) -> Option<(Point, f64)> {
        let mut best: Option<(Point, f64)> = None;
        let mut consider = |q: Point| {
            let d = p.dist(q);
            if best.map(|(_, bd)| d < bd).unwrap_or(true) {
                best = Some((q, d));
            }
        };
        match self {
            Domain::Interval { a, b, left, right } => {
                if label.map(|l| l == *left).unwrap_or(true) {
                    consider(Point::new(*a, 0.0));
                }
                if label.map(|l| l == *right).unwrap_or(true) {
                    consider(Point::new(*b, 0.0));
                }
            }
            Domain::ConvexPolygon {
                vertices,
                edge_labels,
            } => {
                let n = vertices.len();
                for i in 0..n {
                    if label.map(|l| l == edge_labels[i]).unwrap_or(true) {
                        let q = nearest_on_segment(p, vertices[i], vertices[(i + 1) % n]);
                        consider(q);
                    }
                }
            }
            Domain::Disk {
                center,
                radius,
                arcs,
            } => {
                for arc in arcs {
                    if label.map(|l| l == arc.label).unwrap_or(true) {
                        consider(nearest_on_arc(p, *center, *radius, arc));
                    }
                }
            }
        }
        best
    }

    /// `n` points approximately uniformly spaced along the boundary, each
    /// with its outward normal and label. Intervals always yield exactly
    /// their two endpoints. Samples landing on a polygon corner are
    /// assigned to the adjacent edge with the lower index.
    pub fn boundary_sample(&self, n: usize) -> Result<Vec<BoundaryPoint>> {
        if n < 4 {
            return Err(Error::InvalidParam(format!(
                "boundary_sample needs n >= 4, got {n}"
            )));
        }
        match self {
            Domain::Interval { a, b, left, right } => Ok(vec![
                BoundaryPoint {
                    position: Point::new(*a, 0.0),
                    normal: Point::new(-1.0, 0.0),
                    label: *left,
                },
                BoundaryPoint {
                    position: Point::new(*b, 0.0),
                    normal: Point::new(1.0, 0.0),
                    label: *right,
                },
            ]),
            Domain::ConvexPolygon {
                vertices,
                edge_labels,
            } => {
                let m = vertices.len();
                let lengths: Vec<f64> = (0..m)
                    .map(|i| vertices[i].dist(vertices[(i + 1) % m]))
                    .collect();
                let perimeter: f64 = lengths.iter().sum();
                let mut cum = vec![0.0; m + 1];
                for i in 0..m {
                    cum[i + 1] = cum[i] + lengths[i];
                }
                let mut out = Vec::with_capacity(n);
                for k in 0..n {
                    // Midpoint rule along arc length.
                    let s = (k as f64 + 0.5) * perimeter / n as f64;
                    // Corner hits resolve to the lower-index edge: pick the
                    // first edge whose closed end reaches s.
                    let mut e = m - 1;
                    for i in 0..m {
                        if s <= cum[i + 1] {
                            e = i;
                            break;
                        }
                    }
                    let t = ((s - cum[e]) / lengths[e]).clamp(0.0, 1.0);
                    let v0 = vertices[e];
                    let v1 = vertices[(e + 1) % m];
                    let dir = v1.sub(v0).unit().expect("degenerate polygon edge");
                    out.push(BoundaryPoint {
                        position: Point::new(v0.x + t * (v1.x - v0.x), v0.y + t * (v1.y - v0.y)),
                        // CCW polygon: outward normal is the edge direction
                        // rotated -90 degrees.
                        normal: Point::new(dir.y, -dir.x),
                        label: edge_labels[e],
                    });
                }
                Ok(out)
            }
            Domain::Disk {
                center,
                radius,
                arcs,
            } => {
                let mut out = Vec::with_capacity(n);
                for k in 0..n {
                    let theta = (k as f64 + 0.5) * TAU / n as f64;
                    let normal = Point::new(theta.cos(), theta.sin());
                    let label = arcs
                        .iter()
                        .find(|a| {
                            let t = normalize_angle(theta);
                            let rel = (t - normalize_angle(a.start)).rem_euclid(TAU);
                            rel < a.end - a.start
                        })
                        .map(|a| a.label)
                        .unwrap_or(BoundaryLabel::Dirichlet);
                    out.push(BoundaryPoint {
                        position: center.add(normal.scale(*radius)),
                        normal,
                        label,
                    });
                }
                Ok(out)
            }
        }
    }

    /// Sampled lower estimate of the transversality constant at `x0`: the
    /// minimum over sampled boundary points `y != x0` of
    /// `<(y - x0)/|y - x0|, n(y)>`, clamped to `[-1, 1]`.
    pub fn transversality_constant(&self, x0: Point, boundary_samples: usize) -> Result<f64> {
        if boundary_samples < 16 {
            return Err(Error::InvalidParam(format!(
                "transversality needs at least 16 boundary samples, got {boundary_samples}"
            )));
        }
        if !(self.diameter() > 0.0) {
            return Err(Error::InvalidDomain("degenerate domain".into()));
        }
        let tol = self.tol();
        let mut c = f64::INFINITY;
        for bp in self.boundary_sample(boundary_samples)? {
            let dir = bp.position.sub(x0);
            let dist = dir.norm();
            if dist <= tol {
                continue;
            }
            c = c.min(dir.scale(1.0 / dist).dot(bp.normal));
        }
        if !c.is_finite() {
            return Err(Error::InvalidParam(
                "every boundary sample coincides with x0".into(),
            ));
        }
        Ok(c.clamp(-1.0, 1.0))
    }
}

/// Closest point to `p` on the segment `[v0, v1]`.
pub fn nearest_on_segment(p: Point, v0: Point, v1: Point) -> Point {
    let e = v1.sub(v0);
    let len2 = e.dot(e);
    if len2 == 0.0 {
        return v0;
    }
    let t = (p.sub(v0).dot(e) / len2).clamp(0.0, 1.0);
    Point::new(v0.x + t * e.x, v0.y + t * e.y)
}

fn nearest_on_arc(p: Point, center: Point, radius: f64, arc: &DiskArc) -> Point {
    let rel = p.sub(center);
    let span = arc.end - arc.start;
    let endpoint = |theta: f64| center.add(Point::new(theta.cos(), theta.sin()).scale(radius));
    if let Some(dir) = rel.unit() {
        let phi = dir.y.atan2(dir.x);
        let offset = (phi - normalize_angle(arc.start)).rem_euclid(TAU);
        if offset <= span {
            return center.add(dir.scale(radius));
        }
        let p0 = endpoint(arc.start);
        let p1 = endpoint(arc.end);
        if p.dist(p0) <= p.dist(p1) {
            p0
        } else {
            p1
        }
    } else {
        // p is the center: every arc point is equidistant.
        endpoint(arc.start + 0.5 * span)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use BoundaryLabel::{Dirichlet, Neumann};

    pub fn unit_interval() -> Domain {
        Domain::interval(0.0, 1.0, Dirichlet, Neumann).unwrap()
    }

    pub fn unit_square(labels: [BoundaryLabel; 4]) -> Domain {
        Domain::convex_polygon(
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
                Point::new(0.0, 1.0),
            ],
            labels.to_vec(),
        )
        .unwrap()
    }

    fn unit_disk_mixed() -> Domain {
        // Dirichlet on the left half circle, Neumann on the right.
        Domain::disk(
            Point::new(0.0, 0.0),
            1.0,
            vec![
                DiskArc {
                    start: std::f64::consts::FRAC_PI_2,
                    end: 1.5 * std::f64::consts::PI,
                    label: Dirichlet,
                },
                DiskArc {
                    start: 1.5 * std::f64::consts::PI,
                    end: 2.5 * std::f64::consts::PI,
                    label: Neumann,
                },
            ],
        )
        .unwrap()
    }

    #[test]
    fn interval_contains() {
        let d = unit_interval();
        assert!(d.contains(Point::new(0.5, 0.0)));
        assert!(d.contains(Point::new(1.0, 0.0)));
        assert!(!d.contains(Point::new(1.5, 0.0)));
        assert!(!d.contains(Point::new(0.5, 0.1)));
    }

    #[test]
    fn square_contains() {
        let d = unit_square([Dirichlet; 4]);
        assert!(d.contains(Point::new(0.5, 0.5)));
        assert!(d.contains(Point::new(1.0, 1.0)));
        assert!(!d.contains(Point::new(1.5, 0.5)));
    }

    #[test]
    fn interval_requires_order() {
        assert!(Domain::interval(1.0, 0.0, Dirichlet, Neumann).is_err());
        assert!(Domain::interval(0.0, 0.0, Dirichlet, Neumann).is_err());
    }

    #[test]
    fn needs_a_dirichlet_piece() {
        assert!(Domain::interval(0.0, 1.0, Neumann, Neumann).is_err());
    }

    #[test]
    fn rejects_nonconvex_polygon() {
        let r = Domain::convex_polygon(
            vec![
                Point::new(0.0, 0.0),
                Point::new(2.0, 0.0),
                Point::new(1.0, 0.5),
                Point::new(2.0, 2.0),
            ],
            vec![Dirichlet; 4],
        );
        assert!(r.is_err());
    }

    #[test]
    fn rejects_clockwise_polygon() {
        let r = Domain::convex_polygon(
            vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)],
            vec![Dirichlet; 3],
        );
        assert!(r.is_err());
    }

    #[test]
    fn interval_neumann_distance() {
        let d = unit_interval();
        assert_relative_eq!(
            d.dist_to_neumann(Point::new(0.3, 0.0)).unwrap(),
            0.7,
            epsilon = 1e-15
        );
    }

    #[test]
    fn square_neumann_distance_to_right_edge() {
        let d = unit_square([Dirichlet, Neumann, Dirichlet, Dirichlet]);
        assert_relative_eq!(
            d.dist_to_neumann(Point::new(0.2, 0.5)).unwrap(),
            0.8,
            epsilon = 1e-15
        );
    }

    #[test]
    fn empty_neumann_set_gives_infinity() {
        let d = unit_square([Dirichlet; 4]);
        assert_eq!(d.dist_to_neumann(Point::new(0.5, 0.5)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn outside_point_is_a_domain_error() {
        let d = unit_interval();
        assert!(d.dist_to_neumann(Point::new(2.0, 0.0)).is_err());
    }

    #[test]
    fn interval_boundary_sample_is_two_endpoints() {
        let d = unit_interval();
        let bps = d.boundary_sample(64).unwrap();
        assert_eq!(bps.len(), 2);
        assert_eq!(bps[0].position, Point::new(0.0, 0.0));
        assert_eq!(bps[0].normal, Point::new(-1.0, 0.0));
        assert_eq!(bps[0].label, Dirichlet);
        assert_eq!(bps[1].position, Point::new(1.0, 0.0));
        assert_eq!(bps[1].normal, Point::new(1.0, 0.0));
        assert_eq!(bps[1].label, Neumann);
    }

    #[test]
    fn square_four_samples_hit_edge_midpoints() {
        let d = unit_square([Dirichlet, Neumann, Dirichlet, Dirichlet]);
        let bps = d.boundary_sample(4).unwrap();
        assert_eq!(bps.len(), 4);
        assert_relative_eq!(bps[0].position.x, 0.5, epsilon = 1e-15);
        assert_relative_eq!(bps[0].position.y, 0.0, epsilon = 1e-15);
        assert_eq!(bps[0].normal, Point::new(0.0, -1.0));
        assert_relative_eq!(bps[1].position.x, 1.0, epsilon = 1e-15);
        assert_relative_eq!(bps[1].position.y, 0.5, epsilon = 1e-15);
        assert_eq!(bps[1].label, Neumann);
    }

    #[test]
    fn disk_samples_have_radial_normals() {
        let d = unit_disk_mixed();
        let bps = d.boundary_sample(8).unwrap();
        assert_eq!(bps.len(), 8);
        for bp in &bps {
            assert_relative_eq!(bp.normal.norm(), 1.0, epsilon = 1e-14);
            let radial = bp.position.unit().unwrap();
            assert_relative_eq!(radial.dot(bp.normal), 1.0, epsilon = 1e-14);
            assert!(d.contains(bp.position));
        }
    }

    #[test]
    fn boundary_samples_pass_contains() {
        for d in [
            unit_interval(),
            unit_square([Dirichlet, Neumann, Dirichlet, Neumann]),
            unit_disk_mixed(),
        ] {
            for bp in d.boundary_sample(257).unwrap() {
                assert!(d.contains(bp.position), "sample off the domain: {:?}", bp.position);
            }
        }
    }

    #[test]
    fn disk_center_transversality_is_one() {
        let d = unit_disk_mixed();
        let c = d
            .transversality_constant(Point::new(0.0, 0.0), 4096)
            .unwrap();
        assert!((1.0 - 1e-12..=1.0).contains(&c));
    }

    #[test]
    fn square_center_transversality_matches_dense_sampling() {
        let d = unit_square([Dirichlet; 4]);
        let center = Point::new(0.5, 0.5);
        // Independent dense-sampling estimate; the exact value is sqrt(2)/2,
        // approached as samples close in on the corners.
        let dense = d.transversality_constant(center, 1 << 18).unwrap();
        let expected = std::f64::consts::FRAC_1_SQRT_2;
        assert!((dense - expected).abs() < 1e-5, "dense estimate {dense}");
        let c = d.transversality_constant(center, 4096).unwrap();
        assert!((c - expected).abs() < 1e-3, "4096-sample estimate {c}");
    }

    #[test]
    fn square_edge_point_transversality_is_zero() {
        let d = unit_square([Dirichlet; 4]);
        let c = d
            .transversality_constant(Point::new(0.5, 0.0), 4096)
            .unwrap();
        assert!(c.abs() < 1e-12, "same-edge samples must give zero, got {c}");
    }

    #[test]
    fn disk_interior_transversality_formula() {
        // For the unit disk and |x0| = d, the exact constant is sqrt(1 - d^2).
        let dom = unit_disk_mixed();
        let c = dom
            .transversality_constant(Point::new(0.5, 0.0), 8192)
            .unwrap();
        assert!((c - (1.0f64 - 0.25).sqrt()).abs() < 1e-3, "got {c}");
        assert!(c > 0.0);
    }

    #[test]
    fn transversality_lower_bounds_samples() {
        let d = unit_square([Dirichlet, Neumann, Dirichlet, Dirichlet]);
        for x in [Point::new(0.25, 0.5), Point::new(0.9, 0.1), Point::new(0.5, 0.99)] {
            let c = d.transversality_constant(x, 512).unwrap();
            for bp in d.boundary_sample(512).unwrap() {
                let dir = bp.position.sub(x);
                if dir.norm() <= d.tol() {
                    continue;
                }
                let dot = dir.unit().unwrap().dot(bp.normal);
                assert!(dot >= c - 1e-9);
            }
        }
    }

    #[test]
    fn arc_coverage_is_validated() {
        let bad = Domain::disk(
            Point::new(0.0, 0.0),
            1.0,
            vec![DiskArc {
                start: 0.0,
                end: 3.0,
                label: Dirichlet,
            }],
        );
        assert!(bad.is_err());
    }
}
