//! Batch commands behind the `tow` binary: solve, oracle1d, simulate,
//! analyze, study.
//!
//! Every command reads an [`ExperimentConfig`], writes CSV/report files
//! into the output directory, and returns an exit code: 0 success or
//! all-pass, 1 check failure, 2 config error (raised as
//! [`Error::Config`]), 3 solver non-convergence. Outputs are
//! deterministic functions of (config, seed): numbers are written with 17
//! significant digits and no timestamps.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use crate::analysis::{
    check_supersolution, convergence_study, infinity_laplacian_residual, lipschitz_report,
    measure_lipschitz, measure_reachability, modulus_check, neumann_residual, AnalysisReport,
    BarrierParams, ModulusParams,
};
use crate::config::{CheckKind, ExperimentConfig, StartSpec, StrategyKind};
use crate::dpp::{build_grid, solve_dpp, Grid, GridMode, RunningPayoff, ValueFunction};
use crate::error::{Error, Result};
use crate::game::{episode_seed, estimate_value, play_episode, GameTrace, Player, Strategy};
use crate::geometry::{BoundaryLabel, BoundaryPoint, Domain, Point};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NOT_CONVERGED: i32 = 3;

/// What a command produced: the process exit code and summary lines for
/// stdout.
#[derive(Debug)]
pub struct CommandOutcome {
    pub exit_code: i32,
    pub messages: Vec<String>,
}

/// 17 significant digits, bit-stable across runs.
pub fn fmt_f(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn solve_from_config(cfg: &ExperimentConfig) -> Result<ValueFunction> {
    let eps = cfg.single_eps()?;
    let h = cfg.h_rule.spacing(eps);
    let grid = Arc::new(build_grid(&cfg.domain, eps, h, cfg.mode)?);
    let payoff = RunningPayoff::new(eps, cfg.g, cfg.variant)?;
    solve_dpp(
        grid,
        &payoff,
        cfg.tol.unwrap_or_else(|| cfg.mode.default_tol()),
        cfg.max_iter.unwrap_or_else(|| cfg.mode.default_max_iter()),
    )
}

fn value_csv(u: &ValueFunction) -> String {
    let grid = &u.grid;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# eps={} h={} iterations={} residual={} converged={}",
        fmt_f(grid.eps),
        fmt_f(grid.spacing),
        u.iterations,
        fmt_f(u.residual),
        u.converged
    );
    if grid.mode == GridMode::Chain1D {
        out.push_str("node_index,x,value\n");
        for (i, (p, v)) in grid.nodes.iter().zip(&u.values).enumerate() {
            let _ = writeln!(out, "{i},{},{}", fmt_f(p.x), fmt_f(*v));
        }
    } else {
        out.push_str("node_index,x,y,value\n");
        for (i, (p, v)) in grid.nodes.iter().zip(&u.values).enumerate() {
            let _ = writeln!(out, "{i},{},{},{}", fmt_f(p.x), fmt_f(p.y), fmt_f(*v));
        }
    }
    out
}

/// Solves the game and writes `value.csv` plus `solve_summary.txt`.
pub fn cmd_solve(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CommandOutcome> {
    let eps = cfg.single_eps()?;
    let u = solve_from_config(cfg)?;
    write_file(out_dir, "value.csv", &value_csv(&u))?;

    let lipschitz = measure_lipschitz(&u, cfg.separation.unwrap_or(eps)).ok();
    let mut summary = String::new();
    let _ = writeln!(summary, "iterations={}", u.iterations);
    let _ = writeln!(summary, "residual={}", fmt_f(u.residual));
    let _ = writeln!(summary, "converged={}", u.converged);
    let _ = writeln!(summary, "sup_u={}", fmt_f(u.sup()));
    let _ = writeln!(
        summary,
        "lipschitz={}",
        lipschitz
            .as_ref()
            .map(|(l, _)| fmt_f(*l))
            .unwrap_or_else(|| "-".into())
    );
    write_file(out_dir, "solve_summary.txt", &summary)?;

    let exit_code = if u.converged { EXIT_OK } else { EXIT_NOT_CONVERGED };
    Ok(CommandOutcome {
        exit_code,
        messages: vec![format!(
            "solve: {} nodes, {} iterations, residual {:.3e}, sup u {:.6}",
            u.grid.len(),
            u.iterations,
            u.residual,
            u.sup()
        )],
    })
}

/// Writes the closed-form cell values as `oracle.csv`
/// (columns `k,a_k,limit,gap`).
pub fn cmd_oracle1d(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CommandOutcome> {
    use crate::oracle1d::{oracle_values, Oracle1DParams, Variant1D};

    let eps = cfg.single_eps()?;
    let Domain::Interval { a, b, .. } = &cfg.domain else {
        return Err(Error::config("domain.kind", "oracle1d needs an interval domain"));
    };
    if ((b - a) - 1.0).abs() > 1e-12 {
        return Err(Error::config(
            "domain.b",
            "the closed forms require a unit interval",
        ));
    }
    let variant = match cfg.variant {
        crate::dpp::PayoffVariant::StripOnly => Variant1D::StripOnly,
        crate::dpp::PayoffVariant::Full => Variant1D::FullPayoff,
        crate::dpp::PayoffVariant::Zero => {
            return Err(Error::config(
                "payoff.variant",
                "oracle1d needs strip_only or full",
            ))
        }
    };
    let g1 = cfg.g.eval(Point::new(*b, 0.0));
    if !(g1 > 0.0) {
        return Err(Error::config("g.value", "g must be positive at the right endpoint"));
    }
    let params = Oracle1DParams::new(eps, g1, variant)
        .map_err(|e| Error::config("grid.eps", e.to_string()))?;
    let values = oracle_values(&params);

    let mut out = String::from("k,a_k,limit,gap\n");
    for (k, v) in values.iter().enumerate() {
        let limit = g1 * k as f64 * eps;
        let _ = writeln!(
            out,
            "{k},{},{},{}",
            fmt_f(*v),
            fmt_f(limit),
            fmt_f((v - limit).abs())
        );
    }
    write_file(out_dir, "oracle.csv", &out)?;
    Ok(CommandOutcome {
        exit_code: EXIT_OK,
        messages: vec![format!(
            "oracle1d: {} cells, variant {:?}, a_N = {:.6}",
            params.cells(),
            variant,
            values.last().unwrap()
        )],
    })
}

fn start_nodes(cfg: &ExperimentConfig, grid: &Grid) -> Result<Vec<usize>> {
    if cfg.starts.is_empty() {
        return Err(Error::config(
            "sim.start_cells",
            "simulate needs sim.start_cells or sim.start_points",
        ));
    }
    let mut nodes = Vec::new();
    for s in &cfg.starts {
        match *s {
            StartSpec::Cell(k) => {
                if k >= grid.len() {
                    return Err(Error::config(
                        "sim.start_cells",
                        format!("cell {k} outside the grid of {} nodes", grid.len()),
                    ));
                }
                nodes.push(k);
            }
            StartSpec::At(p) => {
                if !grid.domain.contains(p) {
                    return Err(Error::config(
                        "sim.start_points",
                        format!("point ({}, {}) lies outside the domain", p.x, p.y),
                    ));
                }
                nodes.push(grid.nearest_node(p));
            }
        }
    }
    Ok(nodes)
}

fn strategies(
    cfg: &ExperimentConfig,
    grid: &Arc<Grid>,
) -> Result<(Strategy, Strategy, Option<ValueFunction>)> {
    match cfg.strategy {
        StrategyKind::Optimal1D => Ok((
            Strategy::optimal_1d(grid, Player::I)?,
            Strategy::optimal_1d(grid, Player::II)?,
            None,
        )),
        StrategyKind::Greedy => {
            let payoff = RunningPayoff::new(grid.eps, cfg.g, cfg.variant)?;
            let u = solve_dpp(
                grid.clone(),
                &payoff,
                cfg.tol.unwrap_or_else(|| cfg.mode.default_tol()),
                cfg.max_iter.unwrap_or_else(|| cfg.mode.default_max_iter()),
            )?;
            let s_i = Strategy::greedy(&u, Player::I);
            let s_ii = Strategy::greedy(&u, Player::II);
            Ok((s_i, s_ii, Some(u)))
        }
    }
}

fn trace_csv(grid: &Grid, trace: &GameTrace) -> String {
    let two_d = grid.mode == GridMode::Lattice2D;
    let mut out = String::from(if two_d {
        "step,x,y,toss,payoff_increment\n"
    } else {
        "step,x,toss,payoff_increment\n"
    });
    for k in 0..trace.nodes.len() {
        let p = grid.nodes[trace.nodes[k] as usize];
        let (toss, inc) = if k < trace.tosses.len() {
            (
                if trace.tosses[k] { "I" } else { "II" }.to_string(),
                fmt_f(trace.payoff_increments[k]),
            )
        } else {
            (String::new(), String::new())
        };
        if two_d {
            let _ = writeln!(out, "{k},{},{},{toss},{inc}", fmt_f(p.x), fmt_f(p.y));
        } else {
            let _ = writeln!(out, "{k},{},{toss},{inc}", fmt_f(p.x));
        }
    }
    out
}

/// Runs Monte Carlo estimates for each configured start node and writes
/// `estimates.csv` (one row per start).
pub fn cmd_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CommandOutcome> {
    let eps = cfg.single_eps()?;
    let h = cfg.h_rule.spacing(eps);
    let grid = Arc::new(build_grid(&cfg.domain, eps, h, cfg.mode)?);
    let payoff = RunningPayoff::new(eps, cfg.g, cfg.variant)?;
    let (s_i, s_ii, solved) = strategies(cfg, &grid)?;
    if let Some(u) = &solved {
        if !u.converged {
            return Ok(CommandOutcome {
                exit_code: EXIT_NOT_CONVERGED,
                messages: vec![format!(
                    "simulate: greedy strategies need a converged value (residual {:.3e})",
                    u.residual
                )],
            });
        }
    }
    let starts = start_nodes(cfg, &grid)?;

    let two_d = grid.mode == GridMode::Lattice2D;
    let mut csv = String::from(if two_d {
        "start_node,x,y,mean,std_error,episodes,truncated\n"
    } else {
        "start_node,x,mean,std_error,episodes,truncated\n"
    });
    let mut messages = Vec::new();
    for (idx, &x0) in starts.iter().enumerate() {
        let est = estimate_value(
            &grid,
            &payoff,
            &s_i,
            &s_ii,
            x0,
            cfg.episodes,
            cfg.seed,
            cfg.max_steps,
        )?;
        let p = grid.nodes[x0];
        if two_d {
            let _ = writeln!(
                csv,
                "{x0},{},{},{},{},{},{}",
                fmt_f(p.x),
                fmt_f(p.y),
                fmt_f(est.mean),
                fmt_f(est.std_error),
                est.episodes,
                est.truncated_episodes
            );
        } else {
            let _ = writeln!(
                csv,
                "{x0},{},{},{},{},{}",
                fmt_f(p.x),
                fmt_f(est.mean),
                fmt_f(est.std_error),
                est.episodes,
                est.truncated_episodes
            );
        }
        messages.push(format!(
            "simulate: start {x0} mean {:.6} +- {:.6} ({} episodes, {} truncated)",
            est.mean, est.std_error, est.episodes, est.truncated_episodes
        ));
        if cfg.export_trace {
            let trace = play_episode(
                &grid,
                &payoff,
                &s_i,
                &s_ii,
                x0,
                episode_seed(cfg.seed, 0),
                cfg.max_steps,
            )?;
            write_file(out_dir, &format!("trace_start{idx}.csv"), &trace_csv(&grid, &trace))?;
        }
    }
    write_file(out_dir, "estimates.csv", &csv)?;
    Ok(CommandOutcome {
        exit_code: EXIT_OK,
        messages,
    })
}

fn derived_k_max(cfg: &ExperimentConfig) -> Result<f64> {
    if let Some(k) = cfg.k_max {
        return Ok(k);
    }
    let mut k: Option<f64> = None;
    for bp in cfg.domain.boundary_sample(1024)? {
        if bp.label == BoundaryLabel::Neumann {
            let v = 0.5 * cfg.g.eval(bp.position);
            k = Some(k.map_or(v, |cur: f64| cur.max(v)));
        }
    }
    k.ok_or_else(|| {
        Error::config(
            "analysis.k",
            "no Neumann boundary to derive K from; set analysis.k",
        )
    })
}

fn residual_reports(cfg: &ExperimentConfig, u: &ValueFunction) -> Result<Vec<AnalysisReport>> {
    let Domain::Interval { a, b, .. } = &cfg.domain else {
        return Err(Error::config(
            "analysis.checks",
            "the residual check applies to interval domains",
        ));
    };
    let (a, b) = (*a, *b);
    let eps = u.grid.eps;
    let g1 = cfg.g.eval(Point::new(b, 0.0));
    let mut reports = Vec::new();

    // Interior operator residual of the limit profile g(b)*(x - a) at 100
    // probes.
    let h_fd = 1e-3 * (b - a);
    let limit = move |p: Point| g1 * (p.x - a);
    let mut worst = 0.0f64;
    let mut worst_at = Point::new(a, 0.0);
    let mut probes = 0;
    for k in 1..=100 {
        let x = Point::new(a + (b - a) * k as f64 / 101.0, 0.0);
        if cfg.domain.dist_to_boundary(x) <= h_fd {
            continue;
        }
        let r = infinity_laplacian_residual(&cfg.domain, limit, x, h_fd)?;
        probes += 1;
        if r.abs() > worst {
            worst = r.abs();
            worst_at = x;
        }
    }
    let tol_interior = 1e-6;
    reports.push(AnalysisReport {
        check: "interior_residual_limit".into(),
        pass: worst <= tol_interior,
        worst_margin: tol_interior - worst,
        worst_location: Some(worst_at),
        details: format!("probes={probes} h_fd={h_fd:.3e} tol={tol_interior:.0e}"),
    });

    // Normal-derivative residual of the solved chain value at the right
    // endpoint, one-sided with h_fd = eps. The full-variant interior term
    // shifts the discrete slope by 2*eps^2.
    let grid = u.grid.clone();
    let values = u.values.clone();
    let field = move |p: Point| grid.nearest_value(&values, p);
    let bp = BoundaryPoint {
        position: Point::new(b, 0.0),
        normal: Point::new(1.0, 0.0),
        label: BoundaryLabel::Neumann,
    };
    let r = neumann_residual(&cfg.domain, field, &bp, &cfg.g, eps)?;
    let tol_neumann = 4.0 * eps * eps * g1.max(1.0) + 1e-9;
    reports.push(AnalysisReport {
        check: "neumann_residual_chain".into(),
        pass: r.abs() <= tol_neumann,
        worst_margin: tol_neumann - r.abs(),
        worst_location: Some(bp.position),
        details: format!("residual={} h_fd={eps} tol={tol_neumann:.3e}", fmt_f(r)),
    });
    Ok(reports)
}

/// Runs the enabled checks and writes `analysis_report.txt`; exit code 0
/// iff every enabled check passes.
pub fn cmd_analyze(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CommandOutcome> {
    if cfg.checks.is_empty() {
        return Err(Error::config("analysis.checks", "no checks enabled"));
    }
    let eps = cfg.single_eps()?;
    let needs_value = cfg
        .checks
        .iter()
        .any(|c| matches!(c, CheckKind::Lipschitz | CheckKind::Modulus | CheckKind::Residual));

    let u = if needs_value { Some(solve_from_config(cfg)?) } else { None };
    if let Some(u) = &u {
        if !u.converged {
            return Ok(CommandOutcome {
                exit_code: EXIT_NOT_CONVERGED,
                messages: vec![format!(
                    "analyze: solver did not converge (residual {:.3e})",
                    u.residual
                )],
            });
        }
    }

    let mut reports: Vec<AnalysisReport> = Vec::new();
    for check in &cfg.checks {
        match check {
            CheckKind::Barrier => {
                if cfg.mode != GridMode::Lattice2D {
                    return Err(Error::config(
                        "analysis.checks",
                        "the barrier check needs a 2-D lattice",
                    ));
                }
                let h = cfg.h_rule.spacing(eps);
                let grid = build_grid(&cfg.domain, eps, h, cfg.mode)?;
                let x0 = cfg.x0.unwrap_or_else(|| cfg.domain.centroid());
                let k_max = derived_k_max(cfg)?;
                let c = match cfg.c_override {
                    Some(c) => c,
                    None => measure_reachability(&grid, x0, eps)?,
                };
                let params = BarrierParams::new(x0, k_max, c, cfg.c2, eps)?;
                reports.push(check_supersolution(&params, &grid)?);
            }
            CheckKind::Lipschitz => {
                let u = u.as_ref().expect("value solved above");
                let separation = cfg.separation.unwrap_or(eps);
                let x0 = cfg.x0.unwrap_or_else(|| cfg.domain.centroid());
                let bound = match (derived_k_max(cfg), cfg.domain.transversality_constant(x0, 4096))
                {
                    (Ok(k), Ok(c)) if c > 0.0 && c < 1.0 => Some(4.0 * k / (1.0 - c) + 1.0),
                    _ => None,
                };
                reports.push(lipschitz_report(u, separation, bound)?);
            }
            CheckKind::Modulus => {
                let u = u.as_ref().expect("value solved above");
                let separation = cfg.separation.unwrap_or(eps);
                let omega_c = match cfg.omega_c {
                    Some(c) => c,
                    None => measure_lipschitz(u, separation)?.0,
                };
                let params = ModulusParams::linear(
                    cfg.a_eps.unwrap_or(eps),
                    omega_c,
                    cfg.k_bound.unwrap_or_else(|| 2.0 * u.sup()),
                )?;
                reports.push(modulus_check(u, &params)?);
            }
            CheckKind::Residual => {
                let u = u.as_ref().expect("value solved above");
                reports.extend(residual_reports(cfg, u)?);
            }
        }
    }

    let mut report_text = String::new();
    for r in &reports {
        let _ = writeln!(report_text, "{}", r.record());
    }
    write_file(out_dir, "analysis_report.txt", &report_text)?;

    let mut messages: Vec<String> = reports.iter().map(|r| r.record()).collect();
    let all_pass = reports.iter().all(|r| r.pass);
    if !all_pass {
        let worst = reports
            .iter()
            .filter(|r| !r.pass)
            .min_by(|x, y| x.worst_margin.partial_cmp(&y.worst_margin).unwrap())
            .expect("at least one failing check");
        messages.push(format!("worst offender: {}", worst.record()));
    }
    Ok(CommandOutcome {
        exit_code: if all_pass { EXIT_OK } else { EXIT_CHECK_FAILED },
        messages,
    })
}

/// Runs the eps sweep and writes `study.csv`.
pub fn cmd_study(cfg: &ExperimentConfig, out_dir: &Path) -> Result<CommandOutcome> {
    let report = convergence_study(
        &cfg.domain,
        cfg.g,
        cfg.variant,
        &cfg.eps_list,
        cfg.h_rule,
        cfg.tol,
        cfg.max_iter,
    )?;

    let opt = |v: Option<f64>| v.map(fmt_f).unwrap_or_default();
    let mut csv = String::from(
        "eps,h,iterations,residual,converged,sup_u,lipschitz,limit_gap,successive_diff,neumann_residual_max,interior_residual_max\n",
    );
    for row in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{},{},{},{},{}",
            fmt_f(row.eps),
            fmt_f(row.h),
            row.iterations,
            fmt_f(row.residual),
            row.converged,
            fmt_f(row.sup_u),
            fmt_f(row.lipschitz),
            opt(row.limit_gap),
            opt(row.successive_diff),
            opt(row.neumann_residual_max),
            opt(row.interior_residual_max)
        );
    }
    write_file(out_dir, "study.csv", &csv)?;

    let all_converged = report.rows.iter().all(|r| r.converged);
    let messages = report
        .rows
        .iter()
        .map(|r| {
            format!(
                "study: eps {:.6} sup_u {:.6} lipschitz {:.6} gap/diff {:.6e}",
                r.eps,
                r.sup_u,
                r.lipschitz,
                r.limit_gap.or(r.successive_diff).unwrap_or(f64::NAN)
            )
        })
        .collect();
    Ok(CommandOutcome {
        exit_code: if all_converged { EXIT_OK } else { EXIT_NOT_CONVERGED },
        messages,
    })
}
