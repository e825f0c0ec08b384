//! Monte Carlo simulation of the game under pluggable stationary
//! strategies.
//!
//! Each turn a fair coin decides which player moves; the winner's strategy
//! selects the next state among the current node's neighbors. Running
//! payoff accrues at every occupied non-terminal state (including the
//! start) before the move; the game ends with final payoff zero on the
//! absorbing set. Episode streams are reproducible: per-episode seeds are
//! derived from the base seed with a splittable mixer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dpp::{payoff_table, Grid, GridMode, RunningPayoff, ValueFunction};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Player {
    I,
    II,
}

type StrategyRule = Box<dyn Fn(&Grid, usize) -> usize + Send + Sync>;

/// Stationary rule mapping the current node to a neighbor node.
pub struct Strategy {
    pub name: String,
    rule: StrategyRule,
}

impl std::fmt::Debug for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Strategy").field("name", &self.name).finish()
    }
}

impl Strategy {
    pub fn propose(&self, grid: &Grid, node: usize) -> usize {
        (self.rule)(grid, node)
    }

    /// Optimal 1-D strategies: Player I steps one cell right (clipped at
    /// the reflecting end), Player II one cell left (into absorption).
    pub fn optimal_1d(grid: &Grid, player: Player) -> Result<Strategy> {
        if grid.mode != GridMode::Chain1D {
            return Err(Error::InvalidGrid(
                "optimal 1-D strategies require a chain grid".into(),
            ));
        }
        let last = grid.len() - 1;
        let (name, rule): (&str, StrategyRule) = match player {
            Player::I => ("optimal-1d-right", Box::new(move |_, k| (k + 1).min(last))),
            Player::II => ("optimal-1d-left", Box::new(|_, k| k.saturating_sub(1))),
        };
        Ok(Strategy {
            name: name.into(),
            rule,
        })
    }

    /// Greedy strategy on a solved value function: Player I moves to an
    /// argmax over the neighbor ball, Player II to an argmin; ties break
    /// to the lowest node index.
    pub fn greedy(value: &ValueFunction, player: Player) -> Strategy {
        let values = value.values.clone();
        let maximize = player == Player::I;
        Strategy {
            name: match player {
                Player::I => "greedy-max".into(),
                Player::II => "greedy-min".into(),
            },
            rule: Box::new(move |grid, node| {
                let mut best = node;
                let mut best_v = if maximize {
                    f64::NEG_INFINITY
                } else {
                    f64::INFINITY
                };
                // Neighbor lists are sorted by index, so strict comparison
                // keeps the lowest-index extremum.
                for &j in grid.neighbors_of(node) {
                    let v = values[j as usize];
                    if (maximize && v > best_v) || (!maximize && v < best_v) {
                        best_v = v;
                        best = j as usize;
                    }
                }
                best
            }),
        }
    }
}

/// One simulated game: visited nodes, coin tosses, and accrued payoff.
#[derive(Debug, Clone)]
pub struct GameTrace {
    /// Visited node indices, starting at `x0`.
    pub nodes: Vec<u32>,
    /// One entry per move; `true` means Player I won the toss.
    pub tosses: Vec<bool>,
    /// Running payoff accrued at each state a move was made from.
    pub payoff_increments: Vec<f64>,
    pub payoff_accumulated: f64,
    /// Reached the absorbing set.
    pub terminated: bool,
    /// Number of moves (the stopping time when terminated).
    pub steps: usize,
}

/// Monte Carlo estimate of the expected payoff.
#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub episodes: u64,
    /// Episodes that hit the step cap without absorbing; reported, never
    /// silently dropped.
    pub truncated_episodes: u64,
    /// Set when the standard error is undefined (a single episode) and
    /// reported as zero.
    pub degenerate_std_error: bool,
}

/// SplitMix64 step, used to derive independent per-episode seeds.
pub fn episode_seed(seed: u64, episode: u64) -> u64 {
    let mut z = (seed ^ episode).wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

struct EpisodeOutcome {
    payoff: f64,
    steps: usize,
    terminated: bool,
}

#[allow(clippy::too_many_arguments)]
fn run_episode(
    grid: &Grid,
    table: &[f64],
    s_i: &Strategy,
    s_ii: &Strategy,
    x0: usize,
    seed: u64,
    max_steps: usize,
    mut record: Option<&mut GameTrace>,
) -> Result<EpisodeOutcome> {
    let tol = grid.domain.tol();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node = x0;
    let mut acc = 0.0;
    let mut steps = 0usize;
    let mut terminated = false;
    loop {
        if grid.dirichlet[node] {
            terminated = true;
            break;
        }
        if steps >= max_steps {
            break;
        }
        let f = table[node];
        acc += f;
        let toss: bool = rng.random();
        let next = if toss {
            s_i.propose(grid, node)
        } else {
            s_ii.propose(grid, node)
        };
        if next >= grid.len() {
            return Err(Error::InvalidParam(format!(
                "strategy proposed node {next} outside the grid"
            )));
        }
        let dist = grid.nodes[node].dist(grid.nodes[next]);
        if dist > grid.eps + tol {
            return Err(Error::InvalidParam(format!(
                "strategy moved {dist} > eps = {} from node {node}",
                grid.eps
            )));
        }
        if let Some(trace) = record.as_deref_mut() {
            trace.tosses.push(toss);
            trace.payoff_increments.push(f);
            trace.nodes.push(next as u32);
        }
        node = next;
        steps += 1;
    }
    Ok(EpisodeOutcome {
        payoff: acc,
        steps,
        terminated,
    })
}

/// Plays a single episode and records the full trace.
///
/// A start on the absorbing set returns immediately with zero payoff and
/// zero steps.
pub fn play_episode(
    grid: &Grid,
    payoff: &RunningPayoff,
    s_i: &Strategy,
    s_ii: &Strategy,
    x0: usize,
    rng_seed: u64,
    max_steps: usize,
) -> Result<GameTrace> {
    if x0 >= grid.len() {
        return Err(Error::InvalidParam(format!("start node {x0} outside the grid")));
    }
    if max_steps < 1 {
        return Err(Error::InvalidParam("max_steps must be at least 1".into()));
    }
    let table = payoff_table(grid, payoff)?;
    let mut trace = GameTrace {
        nodes: vec![x0 as u32],
        tosses: Vec::new(),
        payoff_increments: Vec::new(),
        payoff_accumulated: 0.0,
        terminated: false,
        steps: 0,
    };
    let outcome = run_episode(
        grid,
        &table,
        s_i,
        s_ii,
        x0,
        rng_seed,
        max_steps,
        Some(&mut trace),
    )?;
    trace.payoff_accumulated = outcome.payoff;
    trace.terminated = outcome.terminated;
    trace.steps = outcome.steps;
    Ok(trace)
}

/// Sample mean and standard error over independent episodes.
///
/// Episode `i` uses the derived seed `episode_seed(rng_seed, i)`, so the
/// estimate is deterministic for a fixed seed and episodes may run in
/// parallel; the reduction always sums in episode order.
#[allow(clippy::too_many_arguments)]
pub fn estimate_value(
    grid: &Grid,
    payoff: &RunningPayoff,
    s_i: &Strategy,
    s_ii: &Strategy,
    x0: usize,
    episodes: u64,
    rng_seed: u64,
    max_steps: usize,
) -> Result<McEstimate> {
    if episodes < 1 {
        return Err(Error::InvalidParam("episodes must be at least 1".into()));
    }
    if x0 >= grid.len() {
        return Err(Error::InvalidParam(format!("start node {x0} outside the grid")));
    }
    let table = payoff_table(grid, payoff)?;
    let outcomes: Vec<Result<(f64, bool)>> = (0..episodes)
        .into_par_iter()
        .map(|i| {
            run_episode(
                grid,
                &table,
                s_i,
                s_ii,
                x0,
                episode_seed(rng_seed, i),
                max_steps,
                None,
            )
            .map(|o| (o.payoff, o.terminated))
        })
        .collect();

    let mut payoffs = Vec::with_capacity(episodes as usize);
    let mut truncated = 0u64;
    for o in outcomes {
        let (p, terminated) = o?;
        payoffs.push(p);
        if !terminated {
            truncated += 1;
        }
    }
    let n = payoffs.len() as f64;
    let mean = payoffs.iter().sum::<f64>() / n;
    let (std_error, degenerate) = if payoffs.len() < 2 {
        (0.0, true)
    } else {
        let var = payoffs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
        (var.sqrt() / n.sqrt(), false)
    };
    Ok(McEstimate {
        mean,
        std_error,
        episodes,
        truncated_episodes: truncated,
        degenerate_std_error: degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dpp::{build_grid, solve_dpp, GField, GridMode, PayoffVariant};
    use crate::geometry::{BoundaryLabel, Domain, Point};
    use crate::oracle1d::{oracle_values, Oracle1DParams, Variant1D};
    use std::sync::Arc;

    fn chain(eps: f64) -> Grid {
        let dom = Domain::interval(0.0, 1.0, BoundaryLabel::Dirichlet, BoundaryLabel::Neumann)
            .unwrap();
        build_grid(&dom, eps, 0.0, GridMode::Chain1D).unwrap()
    }

    fn strip_payoff(eps: f64) -> RunningPayoff {
        RunningPayoff::strip_only(eps, GField::Constant(1.0)).unwrap()
    }

    #[test]
    fn optimal_1d_moves() {
        let g = chain(0.1);
        let right = Strategy::optimal_1d(&g, Player::I).unwrap();
        let left = Strategy::optimal_1d(&g, Player::II).unwrap();
        assert_eq!(right.propose(&g, 5), 6);
        assert_eq!(right.propose(&g, 10), 10, "clipped at the right end");
        assert_eq!(left.propose(&g, 5), 4);
        assert_eq!(left.propose(&g, 1), 0, "moves into absorption");
    }

    #[test]
    fn optimal_1d_rejects_lattice() {
        let dom = Domain::convex_polygon(
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
        let g = build_grid(&dom, 0.15, 0.05, GridMode::Lattice2D).unwrap();
        assert!(Strategy::optimal_1d(&g, Player::I).is_err());
    }

    #[test]
    fn greedy_matches_optimal_on_monotone_chain() {
        let g = Arc::new(chain(0.1));
        let u = solve_dpp(g.clone(), &strip_payoff(0.1), 1e-13, 1_000_000).unwrap();
        let greedy_i = Strategy::greedy(&u, Player::I);
        let greedy_ii = Strategy::greedy(&u, Player::II);
        let opt_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let opt_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        for k in 1..g.len() {
            assert_eq!(greedy_i.propose(&g, k), opt_i.propose(&g, k), "I at {k}");
            assert_eq!(greedy_ii.propose(&g, k), opt_ii.propose(&g, k), "II at {k}");
        }
    }

    #[test]
    fn greedy_attains_the_extremum() {
        let g = Arc::new(chain(0.1));
        // Constant field: any neighbor attains the extremum.
        let u = ValueFunction {
            grid: g.clone(),
            values: vec![1.0; g.len()],
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
        let s = Strategy::greedy(&u, Player::I);
        for k in 0..g.len() {
            let chosen = s.propose(&g, k);
            let max = g
                .neighbors_of(k)
                .iter()
                .map(|&j| u.values[j as usize])
                .fold(f64::NEG_INFINITY, f64::max);
            assert_eq!(u.values[chosen], max);
        }
    }

    #[test]
    fn greedy_is_exact_on_lattice_neighbors() {
        let dom = Domain::convex_polygon(
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
        let g = Arc::new(build_grid(&dom, 0.15, 0.05, GridMode::Lattice2D).unwrap());
        let payoff = RunningPayoff::full(0.15, GField::Constant(1.0)).unwrap();
        let u = solve_dpp(g.clone(), &payoff, 1e-9, 100_000).unwrap();
        let s_max = Strategy::greedy(&u, Player::I);
        let s_min = Strategy::greedy(&u, Player::II);
        for k in (0..g.len()).step_by(17) {
            let nb = g.neighbors_of(k);
            let max = nb.iter().map(|&j| u.values[j as usize]).fold(f64::NEG_INFINITY, f64::max);
            let min = nb.iter().map(|&j| u.values[j as usize]).fold(f64::INFINITY, f64::min);
            assert_eq!(u.values[s_max.propose(&g, k)], max);
            assert_eq!(u.values[s_min.propose(&g, k)], min);
        }
    }

    #[test]
    fn absorbing_start_returns_immediately() {
        let g = chain(0.1);
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        let t = play_episode(&g, &strip_payoff(0.1), &s_i, &s_ii, 0, 7, 1000).unwrap();
        assert!(t.terminated);
        assert_eq!(t.steps, 0);
        assert_eq!(t.payoff_accumulated, 0.0);
        assert_eq!(t.nodes, vec![0]);
    }

    #[test]
    fn traces_are_deterministic() {
        let g = chain(0.1);
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        let a = play_episode(&g, &strip_payoff(0.1), &s_i, &s_ii, 5, 42, 1_000_000).unwrap();
        let b = play_episode(&g, &strip_payoff(0.1), &s_i, &s_ii, 5, 42, 1_000_000).unwrap();
        assert_eq!(a.nodes, b.nodes);
        assert_eq!(a.tosses, b.tosses);
        assert_eq!(a.payoff_accumulated, b.payoff_accumulated);
        assert!(a.terminated);
        assert_eq!(*a.nodes.last().unwrap(), 0);
        // Accumulated payoff matches the recorded increments.
        let sum: f64 = a.payoff_increments.iter().sum();
        assert_eq!(sum, a.payoff_accumulated);
    }

    #[test]
    fn coin_stream_has_fair_runs() {
        // Disjoint blocks of four tosses: all-heads frequency near 1/16.
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let blocks = 200_000;
        let mut all_heads = 0u32;
        for _ in 0..blocks {
            let mut heads = true;
            for _ in 0..4 {
                heads &= rng.random::<bool>();
            }
            if heads {
                all_heads += 1;
            }
        }
        let freq = all_heads as f64 / blocks as f64;
        let expect = 1.0 / 16.0;
        // Three sigma for a binomial proportion.
        let sigma = (expect * (1.0 - expect) / blocks as f64).sqrt();
        assert!(
            (freq - expect).abs() <= 3.0 * sigma,
            "all-heads frequency {freq} vs {expect}"
        );
    }

    #[test]
    fn shift_coupling_preserves_order() {
        // Same toss sequence from x < y: states and payoffs stay ordered.
        let g = chain(0.1);
        let payoff = strip_payoff(0.1);
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        for seed in [1u64, 9, 77, 2024] {
            let lo = play_episode(&g, &payoff, &s_i, &s_ii, 3, seed, 1_000_000).unwrap();
            let hi = play_episode(&g, &payoff, &s_i, &s_ii, 6, seed, 1_000_000).unwrap();
            let shared = lo.tosses.len().min(hi.tosses.len());
            assert_eq!(lo.tosses[..shared], hi.tosses[..shared], "tosses differ");
            for k in 0..=shared.min(lo.nodes.len() - 1) {
                assert!(
                    lo.nodes[k] <= hi.nodes[k],
                    "order broken at step {k}: {} > {}",
                    lo.nodes[k],
                    hi.nodes[k]
                );
            }
            // The lower game ends first and collects no more than the higher.
            assert!(lo.steps <= hi.steps);
            assert!(lo.payoff_accumulated <= hi.payoff_accumulated + 1e-15);
        }
    }

    #[test]
    fn estimate_matches_dpp_value() {
        let g = chain(0.1);
        let payoff = strip_payoff(0.1);
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        let est = estimate_value(&g, &payoff, &s_i, &s_ii, 5, 10_000, 4242, 1_000_000).unwrap();
        let oracle = oracle_values(&Oracle1DParams::new(0.1, 1.0, Variant1D::StripOnly).unwrap());
        assert_eq!(est.truncated_episodes, 0);
        assert!(!est.degenerate_std_error);
        assert!(
            (est.mean - oracle[5]).abs() <= 3.0 * est.std_error,
            "mean {} vs {} (se {})",
            est.mean,
            oracle[5],
            est.std_error
        );
    }

    #[test]
    fn greedy_full_payoff_estimate_matches_oracle() {
        let eps = 0.1;
        let g = Arc::new(chain(eps));
        let payoff = RunningPayoff::new(eps, GField::Constant(1.0), PayoffVariant::Full).unwrap();
        let u = solve_dpp(g.clone(), &payoff, 1e-13, 1_000_000).unwrap();
        let s_i = Strategy::greedy(&u, Player::I);
        let s_ii = Strategy::greedy(&u, Player::II);
        let est = estimate_value(&g, &payoff, &s_i, &s_ii, 4, 10_000, 99, 1_000_000).unwrap();
        let oracle = oracle_values(&Oracle1DParams::new(eps, 1.0, Variant1D::FullPayoff).unwrap());
        assert!(
            (est.mean - oracle[4]).abs() <= 3.0 * est.std_error,
            "mean {} vs {} (se {})",
            est.mean,
            oracle[4],
            est.std_error
        );
    }

    #[test]
    fn single_episode_reports_degenerate_std_error() {
        let g = chain(0.1);
        let payoff = strip_payoff(0.1);
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        let est = estimate_value(&g, &payoff, &s_i, &s_ii, 5, 1, 7, 1_000_000).unwrap();
        assert!(est.degenerate_std_error);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn absorbing_start_estimate_is_zero() {
        let g = chain(0.1);
        let payoff = strip_payoff(0.1);
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::II).unwrap();
        let est = estimate_value(&g, &payoff, &s_i, &s_ii, 0, 100, 7, 1_000).unwrap();
        assert_eq!(est.mean, 0.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn oversized_moves_are_rejected() {
        let g = chain(0.1);
        let payoff = strip_payoff(0.1);
        let jumper = || Strategy {
            name: "jumper".into(),
            rule: Box::new(|grid: &Grid, _| grid.len() - 1),
        };
        let r = play_episode(&g, &payoff, &jumper(), &jumper(), 2, 7, 1_000);
        assert!(r.is_err(), "a move beyond the eps ball must be rejected");
    }

    #[test]
    fn truncation_is_counted() {
        let g = chain(0.1);
        let payoff = strip_payoff(0.1);
        // Both players push right: the game never absorbs.
        let s_i = Strategy::optimal_1d(&g, Player::I).unwrap();
        let s_ii = Strategy::optimal_1d(&g, Player::I).unwrap();
        let est = estimate_value(&g, &payoff, &s_i, &s_ii, 5, 10, 7, 50).unwrap();
        assert_eq!(est.truncated_episodes, 10);
    }
}
