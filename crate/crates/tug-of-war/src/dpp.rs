//! Discretization and the dynamic-programming fixed point.
//!
//! The value of the game satisfies
//! `u(x) = (sup u + inf u)/2 + f(x)` over the closed eps-ball around `x`
//! intersected with the closed domain, with `u = 0` on absorbing nodes.
//! [`solve_dpp`] iterates this operator from zero with a Jacobi
//! (double-buffer) sweep; iterates increase monotonically and converge
//! geometrically at a rate set by the absorption probability.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{BoundaryLabel, Domain, Point};

/// Below this node count sweeps stay sequential; the arithmetic is
/// identical either way.
const PAR_THRESHOLD: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridMode {
    /// Exact 1-D cell chain on an interval: node 0 is the absorbing left
    /// endpoint, nodes `1..=N` are cell midpoints, `N*eps = b - a`.
    Chain1D,
    /// Square lattice with spacing `h <= eps/3` restricted to the domain.
    Lattice2D,
}

impl GridMode {
    pub fn default_tol(self) -> f64 {
        match self {
            GridMode::Chain1D => 1e-12,
            GridMode::Lattice2D => 1e-10,
        }
    }

    pub fn default_max_iter(self) -> usize {
        match self {
            GridMode::Chain1D => 1_000_000,
            GridMode::Lattice2D => 100_000,
        }
    }
}

/// Discrete state space: nodes, absorbing mask, and closed-ball neighbor
/// lists in CSR layout (every list contains the node itself and is sorted
/// by node index).
#[derive(Debug, Clone)]
pub struct Grid {
    pub mode: GridMode,
    pub domain: Domain,
    pub nodes: Vec<Point>,
    /// Grid spacing `h` (equals `eps` in chain mode).
    pub spacing: f64,
    /// Game step: moves stay within the closed `eps`-ball.
    pub eps: f64,
    pub dirichlet: Vec<bool>,
    neighbor_offsets: Vec<u32>,
    neighbor_indices: Vec<u32>,
}

impl Grid {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn neighbors_of(&self, i: usize) -> &[u32] {
        &self.neighbor_indices
            [self.neighbor_offsets[i] as usize..self.neighbor_offsets[i + 1] as usize]
    }

    /// Index of the node nearest to `p` (lowest index wins ties).
    pub fn nearest_node(&self, p: Point) -> usize {
        let mut best = 0usize;
        let mut best_d = f64::INFINITY;
        for (i, q) in self.nodes.iter().enumerate() {
            let d = p.dist(*q);
            if d < best_d {
                best_d = d;
                best = i;
            }
        }
        best
    }

    /// Evaluate a per-node field at an arbitrary point by nearest node.
    pub fn nearest_value(&self, values: &[f64], p: Point) -> f64 {
        values[self.nearest_node(p)]
    }

    pub fn non_dirichlet_count(&self) -> usize {
        self.dirichlet.iter().filter(|&&d| !d).count()
    }
}

/// Builds the discrete state space.
///
/// Chain mode requires an interval with a Dirichlet left endpoint, a
/// Neumann right endpoint, and `(b - a)/eps` integer; `h` is ignored.
/// Lattice mode requires a 2-D domain and `h <= eps/3`; nodes within `h`
/// of a Dirichlet boundary piece are absorbing.
pub fn build_grid(domain: &Domain, eps: f64, h: f64, mode: GridMode) -> Result<Grid> {
    match mode {
        GridMode::Chain1D => build_chain(domain, eps),
        GridMode::Lattice2D => build_lattice(domain, eps, h, None),
    }
}

/// Lattice grid for the first-stage game: the only absorbing node is the
/// one nearest to `x0`; the boundary does not absorb.
pub fn build_first_stage_grid(domain: &Domain, eps: f64, h: f64, x0: Point) -> Result<Grid> {
    build_lattice(domain, eps, h, Some(x0))
}

fn build_chain(domain: &Domain, eps: f64) -> Result<Grid> {
    let (a, b) = match domain {
        Domain::Interval { a, b, left, right } => {
            if *left != BoundaryLabel::Dirichlet || *right != BoundaryLabel::Neumann {
                return Err(Error::InvalidGrid(
                    "chain mode needs a Dirichlet left endpoint and a Neumann right endpoint"
                        .into(),
                ));
            }
            (*a, *b)
        }
        _ => return Err(Error::InvalidGrid("chain mode needs an interval domain".into())),
    };
    if !(eps > 0.0) {
        return Err(Error::InvalidGrid(format!("eps must be positive, got {eps}")));
    }
    let n_f = (b - a) / eps;
    let n = n_f.round();
    if n < 1.0 || (n * eps - (b - a)).abs() > 1e-12 * (b - a) {
        return Err(Error::InvalidGrid(format!(
            "(b - a)/eps must be an integer in chain mode, got {n_f}"
        )));
    }
    let n = n as usize;
    let mut nodes = Vec::with_capacity(n + 1);
    nodes.push(Point::new(a, 0.0));
    for k in 1..=n {
        nodes.push(Point::new(a + (k as f64 - 0.5) * eps, 0.0));
    }
    let mut dirichlet = vec![false; n + 1];
    dirichlet[0] = true;

    let mut offsets = Vec::with_capacity(n + 2);
    let mut indices = Vec::new();
    offsets.push(0u32);
    for k in 0..=n {
        if k > 0 {
            indices.push((k - 1) as u32);
        }
        indices.push(k as u32);
        if k < n {
            indices.push((k + 1) as u32);
        }
        offsets.push(indices.len() as u32);
    }

    Ok(Grid {
        mode: GridMode::Chain1D,
        domain: domain.clone(),
        nodes,
        spacing: eps,
        eps,
        dirichlet,
        neighbor_offsets: offsets,
        neighbor_indices: indices,
    })
}

fn build_lattice(domain: &Domain, eps: f64, h: f64, absorb_at: Option<Point>) -> Result<Grid> {
    if domain.is_1d() {
        return Err(Error::InvalidGrid("lattice mode needs a 2-D domain".into()));
    }
    if !(eps > 0.0) || !(h > 0.0) {
        return Err(Error::InvalidGrid(format!(
            "eps and h must be positive, got eps={eps}, h={h}"
        )));
    }
    let tol = domain.tol();
    if h > eps / 3.0 + tol {
        return Err(Error::InvalidGrid(format!(
            "lattice mode needs h <= eps/3, got h={h}, eps={eps}"
        )));
    }

    // Anchor the lattice so a node sits at the disk center; polygons
    // anchor at the bounding-box corner.
    let (lo, hi) = domain.bounding_box();
    let anchor = match domain {
        Domain::Disk { center, .. } => *center,
        _ => lo,
    };
    let i_min = ((lo.x - anchor.x) / h - 0.5).ceil() as i64;
    let i_max = ((hi.x - anchor.x) / h + 0.5).floor() as i64;
    let j_min = ((lo.y - anchor.y) / h - 0.5).ceil() as i64;
    let j_max = ((hi.y - anchor.y) / h + 0.5).floor() as i64;

    let mut nodes = Vec::new();
    let mut index_of: HashMap<(i64, i64), u32> = HashMap::new();
    let mut coords = Vec::new();
    for j in j_min..=j_max {
        for i in i_min..=i_max {
            let p = Point::new(anchor.x + i as f64 * h, anchor.y + j as f64 * h);
            if domain.contains(p) {
                index_of.insert((i, j), nodes.len() as u32);
                coords.push((i, j));
                nodes.push(p);
            }
        }
    }
    if nodes.is_empty() {
        return Err(Error::InvalidGrid("lattice contains no nodes".into()));
    }

    // All lattice offsets within the closed eps-ball, in index order
    // (node indices increase lexicographically in (j, i)).
    let reach = (eps / h).ceil() as i64 + 1;
    let mut offsets_ball: Vec<(i64, i64)> = Vec::new();
    for dj in -reach..=reach {
        for di in -reach..=reach {
            if (di as f64 * h).hypot(dj as f64 * h) <= eps + tol {
                offsets_ball.push((di, dj));
            }
        }
    }

    let mut offsets = Vec::with_capacity(nodes.len() + 1);
    let mut indices = Vec::new();
    offsets.push(0u32);
    for &(i, j) in &coords {
        for &(di, dj) in &offsets_ball {
            if let Some(&idx) = index_of.get(&(i + di, j + dj)) {
                indices.push(idx);
            }
        }
        offsets.push(indices.len() as u32);
    }

    let dirichlet = match absorb_at {
        None => nodes
            .iter()
            .map(|&p| domain.dist_to_dirichlet(p) <= h + tol)
            .collect(),
        Some(x0) => {
            let mut mask = vec![false; nodes.len()];
            let mut best = 0usize;
            let mut best_d = f64::INFINITY;
            for (k, &p) in nodes.iter().enumerate() {
                let d = p.dist(x0);
                if d < best_d {
                    best_d = d;
                    best = k;
                }
            }
            mask[best] = true;
            mask
        }
    };

    Ok(Grid {
        mode: GridMode::Lattice2D,
        domain: domain.clone(),
        nodes,
        spacing: h,
        eps,
        dirichlet,
        neighbor_offsets: offsets,
        neighbor_indices: indices,
    })
}

/// Boundary field `g`: a positive Lipschitz function evaluated at the
/// nearest Neumann boundary point of a game state.
#[derive(Debug, Clone, Copy)]
pub enum GField {
    Constant(f64),
    Affine { base: f64, gx: f64, gy: f64 },
}

impl GField {
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            GField::Constant(c) => *c,
            GField::Affine { base, gx, gy } => base + gx * p.x + gy * p.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffVariant {
    /// `eps*g/2` within distance `eps` of the Neumann boundary, zero
    /// elsewhere.
    StripOnly,
    /// `eps*g/2` within the strip plus `eps^3` everywhere.
    Full,
    /// Identically zero (test hook).
    Zero,
}

/// Running payoff accrued at each non-absorbing state.
#[derive(Debug, Clone)]
pub struct RunningPayoff {
    pub eps: f64,
    pub g: GField,
    pub variant: PayoffVariant,
}

impl RunningPayoff {
    pub fn new(eps: f64, g: GField, variant: PayoffVariant) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(Error::InvalidParam(format!("eps must be positive, got {eps}")));
        }
        Ok(RunningPayoff { eps, g, variant })
    }

    pub fn full(eps: f64, g: GField) -> Result<Self> {
        Self::new(eps, g, PayoffVariant::Full)
    }

    pub fn strip_only(eps: f64, g: GField) -> Result<Self> {
        Self::new(eps, g, PayoffVariant::StripOnly)
    }

    pub fn zero(eps: f64) -> Self {
        RunningPayoff {
            eps,
            g: GField::Constant(1.0),
            variant: PayoffVariant::Zero,
        }
    }

    /// Checks `g > 0` on sampled Neumann boundary points.
    pub fn validate(&self, domain: &Domain) -> Result<()> {
        if self.variant == PayoffVariant::Zero {
            return Ok(());
        }
        for bp in domain.boundary_sample(1024)? {
            if bp.label == BoundaryLabel::Neumann && self.g.eval(bp.position) <= 0.0 {
                return Err(Error::InvalidParam(format!(
                    "g must be positive on the Neumann boundary; g({:.6}, {:.6}) = {}",
                    bp.position.x,
                    bp.position.y,
                    self.g.eval(bp.position)
                )));
            }
        }
        Ok(())
    }
}

/// Running payoff at a single non-absorbing state.
///
/// The strip term evaluates `g` at the nearest Neumann boundary point.
/// Points on the Dirichlet boundary carry no payoff and are rejected.
pub fn running_payoff_at(p: &RunningPayoff, domain: &Domain, x: Point) -> Result<f64> {
    if domain.dist_to_dirichlet(x) <= domain.tol() {
        return Err(Error::InvalidParam(format!(
            "no running payoff at absorbing state ({}, {})",
            x.x, x.y
        )));
    }
    if p.variant == PayoffVariant::Zero {
        if !domain.contains(x) {
            return Err(Error::OutsideDomain { x: x.x, y: x.y });
        }
        return Ok(0.0);
    }
    let eps3 = p.eps * p.eps * p.eps;
    let strip = match domain.nearest_neumann(x)? {
        Some((nearest, dist)) if dist <= p.eps => 0.5 * p.eps * p.g.eval(nearest),
        _ => 0.0,
    };
    Ok(match p.variant {
        PayoffVariant::StripOnly => strip,
        PayoffVariant::Full => strip + eps3,
        PayoffVariant::Zero => unreachable!(),
    })
}

/// Per-node payoff table; absorbing nodes get zero.
pub fn payoff_table(grid: &Grid, payoff: &RunningPayoff) -> Result<Vec<f64>> {
    payoff.validate(&grid.domain)?;
    grid.nodes
        .iter()
        .zip(&grid.dirichlet)
        .map(|(&p, &absorbing)| {
            if absorbing {
                Ok(0.0)
            } else {
                running_payoff_at_unmasked(payoff, &grid.domain, p)
            }
        })
        .collect()
}

/// Payoff table for an explicit per-node payoff rule (used by the
/// first-stage game of the barrier analysis).
pub fn payoff_table_with(grid: &Grid, f: impl Fn(Point) -> f64) -> Vec<f64> {
    grid.nodes
        .iter()
        .zip(&grid.dirichlet)
        .map(|(&p, &absorbing)| if absorbing { 0.0 } else { f(p) })
        .collect()
}

// Same as `running_payoff_at` without the Dirichlet-proximity check:
// lattice nodes may sit near the absorbing boundary without being masked.
fn running_payoff_at_unmasked(p: &RunningPayoff, domain: &Domain, x: Point) -> Result<f64> {
    if p.variant == PayoffVariant::Zero {
        return Ok(0.0);
    }
    let eps3 = p.eps * p.eps * p.eps;
    let strip = match domain.nearest_neumann(x)? {
        Some((nearest, dist)) if dist <= p.eps => 0.5 * p.eps * p.g.eval(nearest),
        _ => 0.0,
    };
    Ok(match p.variant {
        PayoffVariant::StripOnly => strip,
        PayoffVariant::Full => strip + eps3,
        PayoffVariant::Zero => unreachable!(),
    })
}

#[inline]
fn node_update(grid: &Grid, table: &[f64], u: &[f64], i: usize) -> f64 {
    if grid.dirichlet[i] {
        return 0.0;
    }
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for &j in grid.neighbors_of(i) {
        let v = u[j as usize];
        if v > hi {
            hi = v;
        }
        if v < lo {
            lo = v;
        }
    }
    0.5 * hi + 0.5 * lo + table[i]
}

/// One Jacobi sweep of the fixed-point operator with a precomputed payoff
/// table.
pub fn dpp_sweep(grid: &Grid, table: &[f64], u: &[f64], out: &mut [f64]) {
    debug_assert_eq!(u.len(), grid.len());
    debug_assert_eq!(out.len(), grid.len());
    if grid.len() >= PAR_THRESHOLD {
        out.par_iter_mut()
            .enumerate()
            .for_each(|(i, o)| *o = node_update(grid, table, u, i));
    } else {
        for (i, o) in out.iter_mut().enumerate() {
            *o = node_update(grid, table, u, i);
        }
    }
}

/// Applies the fixed-point operator once: zero on absorbing nodes,
/// `(max + min)/2` over the neighbor ball plus the running payoff
/// elsewhere. In chain mode this reduces to the exact 1-D recurrences,
/// including the reflected right end.
pub fn dpp_operator(grid: &Grid, payoff: &RunningPayoff, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != grid.len() {
        return Err(Error::InvalidParam(format!(
            "value vector has {} entries, grid has {}",
            u.len(),
            grid.len()
        )));
    }
    let table = payoff_table(grid, payoff)?;
    let mut out = vec![0.0; grid.len()];
    dpp_sweep(grid, &table, u, &mut out);
    Ok(out)
}

/// Solved value function with iteration metadata.
#[derive(Debug, Clone)]
pub struct ValueFunction {
    pub grid: Arc<Grid>,
    pub values: Vec<f64>,
    pub iterations: usize,
    /// Sup-norm of the last update.
    pub residual: f64,
    pub converged: bool,
}

impl ValueFunction {
    pub fn sup(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, &v| m.max(v))
    }
}

fn sup_diff(a: &[f64], b: &[f64]) -> f64 {
    if a.len() >= PAR_THRESHOLD {
        a.par_iter()
            .zip(b.par_iter())
            .map(|(x, y)| (x - y).abs())
            .reduce(|| 0.0, f64::max)
    } else {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    }
}

/// Iterates the fixed-point operator from zero until the sup-norm update
/// drops to `tol` or `max_iter` sweeps have run. Non-convergence is
/// reported through the flag, not as an error.
pub fn solve_dpp(
    grid: Arc<Grid>,
    payoff: &RunningPayoff,
    tol: f64,
    max_iter: usize,
) -> Result<ValueFunction> {
    solve_dpp_with_table(grid.clone(), payoff_table(&grid, payoff)?, tol, max_iter)
}

/// Same iteration with an explicit payoff table.
pub fn solve_dpp_with_table(
    grid: Arc<Grid>,
    table: Vec<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<ValueFunction> {
    if !(tol > 0.0) {
        return Err(Error::InvalidParam(format!("tol must be positive, got {tol}")));
    }
    if max_iter < 1 {
        return Err(Error::InvalidParam("max_iter must be at least 1".into()));
    }
    if table.len() != grid.len() {
        return Err(Error::InvalidParam(format!(
            "payoff table has {} entries, grid has {}",
            table.len(),
            grid.len()
        )));
    }
    let n = grid.len();
    let mut cur = vec![0.0f64; n];
    let mut next = vec![0.0f64; n];
    let mut iterations = 0;
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for it in 1..=max_iter {
        dpp_sweep(&grid, &table, &cur, &mut next);
        residual = sup_diff(&next, &cur);
        std::mem::swap(&mut cur, &mut next);
        iterations = it;
        if residual <= tol {
            converged = true;
            break;
        }
    }
    Ok(ValueFunction {
        grid,
        values: cur,
        iterations,
        residual,
        converged,
    })
}
