//! Experiment configuration: a flat key-value text format with dotted
//! section keys, e.g. `domain.kind = disk`, `solver.tol = 1e-12`.
//!
//! Lines are `key = value`; `#` starts a comment; list values separate
//! tokens with whitespace. Every module precondition is validated here,
//! before any computation starts, and violations name the offending
//! field.

use std::collections::HashMap;
use std::path::Path;

use crate::analysis::HRule;
use crate::dpp::{GField, GridMode, PayoffVariant};
use crate::error::{Error, Result};
use crate::geometry::{BoundaryLabel, DiskArc, Domain, Point};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrategyKind {
    /// One cell toward the payoff end / one cell toward absorption
    /// (chain grids only).
    Optimal1D,
    /// Argmax/argmin of the solved value over the neighbor ball.
    Greedy,
}

#[derive(Debug, Clone, Copy)]
pub enum StartSpec {
    Cell(usize),
    At(Point),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    Barrier,
    Lipschitz,
    Modulus,
    Residual,
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub domain: Domain,
    pub g: GField,
    pub variant: PayoffVariant,
    pub mode: GridMode,
    /// One entry for solve/simulate/analyze; a decreasing list for study.
    pub eps_list: Vec<f64>,
    pub h_rule: HRule,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,

    pub episodes: u64,
    pub seed: u64,
    pub max_steps: usize,
    pub starts: Vec<StartSpec>,
    pub strategy: StrategyKind,
    pub export_trace: bool,

    pub checks: Vec<CheckKind>,
    pub x0: Option<Point>,
    pub k_max: Option<f64>,
    pub c_override: Option<f64>,
    pub c2: f64,
    pub separation: Option<f64>,
    pub omega_c: Option<f64>,
    pub a_eps: Option<f64>,
    pub k_bound: Option<f64>,
}

impl ExperimentConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let raw = parse_pairs(text)?;
        build(raw)
    }

    /// The single eps required by solve/simulate/analyze.
    pub fn single_eps(&self) -> Result<f64> {
        if self.eps_list.len() != 1 {
            return Err(Error::config(
                "grid.eps",
                "this command needs a single eps; use grid.eps, not grid.eps_list",
            ));
        }
        Ok(self.eps_list[0])
    }
}

fn parse_pairs(text: &str) -> Result<HashMap<String, String>> {
    let mut map = HashMap::new();
    for (lineno, raw_line) in text.lines().enumerate() {
        let line = match raw_line.find('#') {
            Some(idx) => &raw_line[..idx],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::config(
                format!("line {}", lineno + 1),
                format!("expected `key = value`, got `{line}`"),
            ));
        };
        let key = key.trim().to_string();
        let value = value.trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(Error::config(
                format!("line {}", lineno + 1),
                "empty key or value",
            ));
        }
        if map.insert(key.clone(), value).is_some() {
            return Err(Error::config(key, "duplicate key"));
        }
    }
    Ok(map)
}

struct Raw {
    map: HashMap<String, String>,
}

impl Raw {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn require(&mut self, key: &str) -> Result<String> {
        self.take(key)
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn f64_opt(&mut self, key: &str) -> Result<Option<f64>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<f64>()
                .map(Some)
                .map_err(|_| Error::config(key, format!("not a number: `{s}`"))),
        }
    }

    fn f64_req(&mut self, key: &str) -> Result<f64> {
        self.f64_opt(key)?
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    fn u64_opt(&mut self, key: &str) -> Result<Option<u64>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => s
                .parse::<u64>()
                .map(Some)
                .map_err(|_| Error::config(key, format!("not an unsigned integer: `{s}`"))),
        }
    }

    fn bool_opt(&mut self, key: &str) -> Result<Option<bool>> {
        match self.take(key) {
            None => Ok(None),
            Some(s) => match s.as_str() {
                "true" => Ok(Some(true)),
                "false" => Ok(Some(false)),
                _ => Err(Error::config(key, format!("expected true|false, got `{s}`"))),
            },
        }
    }
}

fn parse_label(key: &str, s: &str) -> Result<BoundaryLabel> {
    match s {
        "dirichlet" | "d" => Ok(BoundaryLabel::Dirichlet),
        "neumann" | "n" => Ok(BoundaryLabel::Neumann),
        _ => Err(Error::config(
            key,
            format!("expected dirichlet|neumann, got `{s}`"),
        )),
    }
}

fn parse_point(key: &str, s: &str) -> Result<Point> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(Error::config(key, format!("expected `x y`, got `{s}`")));
    }
    let x = parts[0]
        .parse::<f64>()
        .map_err(|_| Error::config(key, format!("not a number: `{}`", parts[0])))?;
    let y = parts[1]
        .parse::<f64>()
        .map_err(|_| Error::config(key, format!("not a number: `{}`", parts[1])))?;
    Ok(Point::new(x, y))
}

fn build_domain(raw: &mut Raw) -> Result<Domain> {
    let kind = raw.require("domain.kind")?;
    let domain = match kind.as_str() {
        "interval" => {
            let a = raw.f64_req("domain.a")?;
            let b = raw.f64_req("domain.b")?;
            let left = parse_label("domain.left", &raw.require("domain.left")?)?;
            let right = parse_label("domain.right", &raw.require("domain.right")?)?;
            Domain::interval(a, b, left, right)
        }
        "polygon" => {
            let vs = raw.require("domain.vertices")?;
            let mut vertices = Vec::new();
            for tok in vs.split_whitespace() {
                let Some((x, y)) = tok.split_once(',') else {
                    return Err(Error::config(
                        "domain.vertices",
                        format!("expected `x,y` pairs, got `{tok}`"),
                    ));
                };
                let x = x.parse::<f64>().map_err(|_| {
                    Error::config("domain.vertices", format!("not a number: `{x}`"))
                })?;
                let y = y.parse::<f64>().map_err(|_| {
                    Error::config("domain.vertices", format!("not a number: `{y}`"))
                })?;
                vertices.push(Point::new(x, y));
            }
            let ls = raw.require("domain.edge_labels")?;
            let labels = ls
                .split_whitespace()
                .map(|tok| parse_label("domain.edge_labels", tok))
                .collect::<Result<Vec<_>>>()?;
            Domain::convex_polygon(vertices, labels)
        }
        "disk" => {
            let center = parse_point("domain.center", &raw.require("domain.center")?)?;
            let radius = raw.f64_req("domain.radius")?;
            let arcs_s = raw.require("domain.arcs")?;
            let mut arcs = Vec::new();
            for tok in arcs_s.split_whitespace() {
                let parts: Vec<&str> = tok.split(':').collect();
                if parts.len() != 3 {
                    return Err(Error::config(
                        "domain.arcs",
                        format!("expected `label:start:end`, got `{tok}`"),
                    ));
                }
                let label = parse_label("domain.arcs", parts[0])?;
                let start = parts[1].parse::<f64>().map_err(|_| {
                    Error::config("domain.arcs", format!("not a number: `{}`", parts[1]))
                })?;
                let end = parts[2].parse::<f64>().map_err(|_| {
                    Error::config("domain.arcs", format!("not a number: `{}`", parts[2]))
                })?;
                arcs.push(DiskArc { start, end, label });
            }
            Domain::disk(center, radius, arcs)
        }
        other => {
            return Err(Error::config(
                "domain.kind",
                format!("expected interval|polygon|disk, got `{other}`"),
            ))
        }
    };
    domain.map_err(|e| Error::config("domain", e.to_string()))
}

fn build(map: HashMap<String, String>) -> Result<ExperimentConfig> {
    let mut raw = Raw { map };

    let domain = build_domain(&mut raw)?;

    let g = match raw.take("g.kind").as_deref() {
        None | Some("constant") => {
            let value = raw.f64_opt("g.value")?.unwrap_or(1.0);
            if !(value > 0.0) {
                return Err(Error::config("g.value", "g must be positive"));
            }
            GField::Constant(value)
        }
        Some("affine") => GField::Affine {
            base: raw.f64_req("g.base")?,
            gx: raw.f64_opt("g.gx")?.unwrap_or(0.0),
            gy: raw.f64_opt("g.gy")?.unwrap_or(0.0),
        },
        Some(other) => {
            return Err(Error::config(
                "g.kind",
                format!("expected constant|affine, got `{other}`"),
            ))
        }
    };

    let variant = match raw.take("payoff.variant").as_deref() {
        None | Some("full") => PayoffVariant::Full,
        Some("strip_only") => PayoffVariant::StripOnly,
        Some("zero") => PayoffVariant::Zero,
        Some(other) => {
            return Err(Error::config(
                "payoff.variant",
                format!("expected full|strip_only|zero, got `{other}`"),
            ))
        }
    };

    let mode = match raw.take("grid.mode").as_deref() {
        Some("chain") => GridMode::Chain1D,
        Some("lattice") => GridMode::Lattice2D,
        None => {
            if domain.is_1d() {
                GridMode::Chain1D
            } else {
                GridMode::Lattice2D
            }
        }
        Some(other) => {
            return Err(Error::config(
                "grid.mode",
                format!("expected chain|lattice, got `{other}`"),
            ))
        }
    };
    if mode == GridMode::Chain1D && !domain.is_1d() {
        return Err(Error::config("grid.mode", "chain mode needs an interval domain"));
    }
    if mode == GridMode::Lattice2D && domain.is_1d() {
        return Err(Error::config("grid.mode", "lattice mode needs a 2-D domain"));
    }

    let eps_list = match (raw.take("grid.eps"), raw.take("grid.eps_list")) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "grid.eps",
                "give either grid.eps or grid.eps_list, not both",
            ))
        }
        (Some(s), None) => {
            let eps = s
                .parse::<f64>()
                .map_err(|_| Error::config("grid.eps", format!("not a number: `{s}`")))?;
            vec![eps]
        }
        (None, Some(s)) => {
            let list = s
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::config("grid.eps_list", format!("not a number: `{t}`")))
                })
                .collect::<Result<Vec<f64>>>()?;
            if list.is_empty() {
                return Err(Error::config("grid.eps_list", "empty list"));
            }
            if !list.windows(2).all(|w| w[1] < w[0]) {
                return Err(Error::config(
                    "grid.eps_list",
                    "eps list must be strictly decreasing",
                ));
            }
            list
        }
        (None, None) => return Err(Error::config("grid.eps", "missing required key")),
    };
    for &eps in &eps_list {
        if !(eps > 0.0) {
            return Err(Error::config("grid.eps", format!("eps must be positive, got {eps}")));
        }
        if mode == GridMode::Chain1D {
            if let Domain::Interval { a, b, .. } = &domain {
                let n = ((b - a) / eps).round();
                if n < 1.0 || (n * eps - (b - a)).abs() > 1e-12 * (b - a) {
                    return Err(Error::config(
                        "grid.eps",
                        format!("(b - a)/eps must be an integer in chain mode, got eps={eps}"),
                    ));
                }
            }
        }
    }

    let h_rule = match (raw.take("grid.h"), raw.take("grid.h_rule")) {
        (Some(_), Some(_)) => {
            return Err(Error::config(
                "grid.h",
                "give either grid.h or grid.h_rule, not both",
            ))
        }
        (Some(s), None) => {
            let h = s
                .parse::<f64>()
                .map_err(|_| Error::config("grid.h", format!("not a number: `{s}`")))?;
            if !(h > 0.0) {
                return Err(Error::config("grid.h", "h must be positive"));
            }
            HRule::Fixed(h)
        }
        (None, Some(s)) => {
            let Some(div) = s.strip_prefix("eps/") else {
                return Err(Error::config(
                    "grid.h_rule",
                    format!("expected `eps/<divisor>`, got `{s}`"),
                ));
            };
            let d = div
                .parse::<f64>()
                .map_err(|_| Error::config("grid.h_rule", format!("not a number: `{div}`")))?;
            if !(d >= 3.0) {
                return Err(Error::config("grid.h_rule", "divisor must be at least 3"));
            }
            HRule::EpsOver(d)
        }
        (None, None) => HRule::EpsOver(4.0),
    };
    if mode == GridMode::Lattice2D {
        for &eps in &eps_list {
            let h = h_rule.spacing(eps);
            if h > eps / 3.0 + domain.tol() {
                return Err(Error::config(
                    "grid.h",
                    format!("lattice mode needs h <= eps/3, got h={h}, eps={eps}"),
                ));
            }
        }
    }

    let tol = raw.f64_opt("solver.tol")?;
    if let Some(t) = tol {
        if !(t > 0.0) {
            return Err(Error::config("solver.tol", "tol must be positive"));
        }
    }
    let max_iter = raw.u64_opt("solver.max_iter")?.map(|v| v as usize);
    if let Some(m) = max_iter {
        if m < 1 {
            return Err(Error::config("solver.max_iter", "max_iter must be at least 1"));
        }
    }

    let episodes = raw.u64_opt("sim.episodes")?.unwrap_or(10_000);
    if episodes < 1 {
        return Err(Error::config("sim.episodes", "episodes must be at least 1"));
    }
    let seed = raw.u64_opt("sim.seed")?.unwrap_or(0);
    let max_steps = raw.u64_opt("sim.max_steps")?.unwrap_or(1_000_000) as usize;
    if max_steps < 1 {
        return Err(Error::config("sim.max_steps", "max_steps must be at least 1"));
    }

    let mut starts = Vec::new();
    if let Some(s) = raw.take("sim.start_cells") {
        for tok in s.split_whitespace() {
            let k = tok
                .parse::<usize>()
                .map_err(|_| Error::config("sim.start_cells", format!("not an index: `{tok}`")))?;
            starts.push(StartSpec::Cell(k));
        }
    }
    if let Some(s) = raw.take("sim.start_points") {
        for tok in s.split_whitespace() {
            let Some((x, y)) = tok.split_once(',') else {
                return Err(Error::config(
                    "sim.start_points",
                    format!("expected `x,y` pairs, got `{tok}`"),
                ));
            };
            let x = x
                .parse::<f64>()
                .map_err(|_| Error::config("sim.start_points", format!("not a number: `{x}`")))?;
            let y = y
                .parse::<f64>()
                .map_err(|_| Error::config("sim.start_points", format!("not a number: `{y}`")))?;
            starts.push(StartSpec::At(Point::new(x, y)));
        }
    }

    let strategy = match raw.take("sim.strategy").as_deref() {
        None | Some("greedy") => StrategyKind::Greedy,
        Some("optimal1d") => StrategyKind::Optimal1D,
        Some(other) => {
            return Err(Error::config(
                "sim.strategy",
                format!("expected optimal1d|greedy, got `{other}`"),
            ))
        }
    };
    if strategy == StrategyKind::Optimal1D && mode != GridMode::Chain1D {
        return Err(Error::config(
            "sim.strategy",
            "optimal1d requires a chain grid",
        ));
    }
    let export_trace = raw.bool_opt("sim.export_trace")?.unwrap_or(false);

    let mut checks = Vec::new();
    if let Some(s) = raw.take("analysis.checks") {
        for tok in s.split_whitespace() {
            checks.push(match tok {
                "barrier" => CheckKind::Barrier,
                "lipschitz" => CheckKind::Lipschitz,
                "modulus" => CheckKind::Modulus,
                "residual" => CheckKind::Residual,
                other => {
                    return Err(Error::config(
                        "analysis.checks",
                        format!("unknown check `{other}`"),
                    ))
                }
            });
        }
    }
    let x0 = match raw.take("analysis.x0") {
        Some(s) => Some(parse_point("analysis.x0", &s)?),
        None => None,
    };
    let k_max = raw.f64_opt("analysis.k")?;
    if let Some(k) = k_max {
        if !(k > 0.0) {
            return Err(Error::config("analysis.k", "K must be positive"));
        }
    }
    let c_override = raw.f64_opt("analysis.c")?;
    if let Some(c) = c_override {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::config("analysis.c", "c must lie strictly in (0, 1)"));
        }
    }
    let c2 = raw.f64_opt("analysis.c2")?.unwrap_or(1.0);
    if !(c2 >= 1.0) {
        return Err(Error::config("analysis.c2", "C2 must be at least 1"));
    }
    let separation = raw.f64_opt("analysis.separation")?;
    let omega_c = raw.f64_opt("analysis.omega_c")?;
    let a_eps = raw.f64_opt("analysis.a_eps")?;
    let k_bound = raw.f64_opt("analysis.k_bound")?;

    if let Some(key) = raw.map.keys().next() {
        return Err(Error::config(key.clone(), "unknown key"));
    }

    Ok(ExperimentConfig {
        domain,
        g,
        variant,
        mode,
        eps_list,
        h_rule,
        tol,
        max_iter,
        episodes,
        seed,
        max_steps,
        starts,
        strategy,
        export_trace,
        checks,
        x0,
        k_max,
        c_override,
        c2,
        separation,
        omega_c,
        a_eps,
        k_bound,
    })
}
