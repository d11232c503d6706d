//! Convergence-study harness: run the solver stack over a sequence of mesh
//! counts, measure sup-norm errors against the exact solution, estimate
//! empirical orders, and format the result as CSV or a markdown table.

use std::time::Duration;

use serde::Deserialize;

use crate::operator::UrysohnProblem;
use crate::problems;
use crate::projection::CollocationGrid;
use crate::quadrature::{CompositeQuadrature, QuadratureRule};
use crate::solver::{iterate, richardson, solve_modified_projection, NewtonSettings, SolveError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown problem '{0}' (known: {})", problems::REGISTRY.join(", "))]
    UnknownProblem(String),
    #[error("problem has no exact solution; error columns cannot be computed")]
    MissingExactSolution,
    #[error("solver failed at n = {n}: {source}")]
    Solve {
        n: usize,
        #[source]
        source: SolveError,
    },
}

/// Signals that an error pair has hit the floating-point floor and no order
/// can be estimated from it.
#[derive(Debug, Error)]
#[error("order estimate needs strictly positive errors, got ({err_n:.3e}, {err_2n:.3e})")]
pub struct NonPositiveError {
    pub err_n: f64,
    pub err_2n: f64,
}

/// How the quadrature mesh count m is derived from the collocation mesh
/// count n.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MRule {
    /// The same m for every n.
    Fixed(usize),
    /// m = p * n.
    Multiple(usize),
    /// m = n^2.
    Square,
}

impl MRule {
    pub fn m_for(&self, n: usize) -> usize {
        match *self {
            MRule::Fixed(m) => m,
            MRule::Multiple(p) => p * n,
            MRule::Square => n * n,
        }
    }
}

impl std::fmt::Display for MRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MRule::Fixed(m) => write!(f, "fixed({m})"),
            MRule::Multiple(p) => write!(f, "multiple({p})"),
            MRule::Square => write!(f, "square"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Markdown,
}

/// The problem an experiment runs on: a registry name or a problem built in
/// code.
#[derive(Debug, Clone)]
pub enum ProblemSpec {
    Registry(String),
    Inline { label: String, problem: UrysohnProblem },
}

impl ProblemSpec {
    pub fn label(&self) -> &str {
        match self {
            ProblemSpec::Registry(name) => name,
            ProblemSpec::Inline { label, .. } => label,
        }
    }

    fn resolve(&self) -> Result<UrysohnProblem, ExperimentError> {
        match self {
            ProblemSpec::Registry(name) => {
                problems::by_name(name).ok_or_else(|| ExperimentError::UnknownProblem(name.clone()))
            }
            ProblemSpec::Inline { problem, .. } => Ok(problem.clone()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub problem: ProblemSpec,
    pub r: usize,
    pub n_values: Vec<usize>,
    pub quad_rho: usize,
    pub m_rule: MRule,
    pub newton: NewtonSettings,
    pub eval_grid_points: usize,
    pub output_format: OutputFormat,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        let fail = |msg: String| Err(ExperimentError::Config(msg));
        if self.n_values.is_empty() {
            return fail("n_values must not be empty".into());
        }
        if !self.n_values.windows(2).all(|w| w[0] < w[1]) {
            return fail("n_values must be strictly increasing".into());
        }
        if self.n_values[0] == 0 {
            return fail("n_values must be positive".into());
        }
        if self.r == 0 || self.r > crate::projection::MAX_ORDER {
            return fail(format!("r must be in 1..={}", crate::projection::MAX_ORDER));
        }
        if self.quad_rho == 0 || self.quad_rho > crate::quadrature::MAX_RHO {
            return fail(format!(
                "quad_rho must be in 1..={}",
                crate::quadrature::MAX_RHO
            ));
        }
        if !(self.newton.tol > 0.0) || self.newton.max_iters == 0 {
            return fail("newton settings need tol > 0 and max_iters >= 1".into());
        }
        if self.eval_grid_points < 2 {
            return fail("eval_grid_points must be at least 2".into());
        }
        for &n in &self.n_values {
            let m = self.m_rule.m_for(n);
            if m == 0 || m % n != 0 {
                return fail(format!(
                    "m rule {} gives m = {m} at n = {n}, which is not a positive multiple of n",
                    self.m_rule
                ));
            }
        }
        Ok(())
    }

    /// Parse the JSON config-file form. Unknown keys are rejected.
    pub fn from_json(text: &str) -> Result<Self, ExperimentError> {
        let file: ConfigFile = serde_json::from_str(text)
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        let config = Self {
            problem: ProblemSpec::Registry(file.problem),
            r: file.r,
            n_values: file.n_values,
            quad_rho: file.quad_rho,
            m_rule: file.m_rule,
            newton: NewtonSettings {
                tol: file.newton.tol,
                max_iters: file.newton.max_iters,
                ..NewtonSettings::default()
            },
            eval_grid_points: file.eval_grid_points,
            output_format: file.output_format,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    problem: String,
    r: usize,
    n_values: Vec<usize>,
    quad_rho: usize,
    m_rule: MRule,
    #[serde(default)]
    newton: NewtonFile,
    #[serde(default = "default_eval_grid_points")]
    eval_grid_points: usize,
    #[serde(default)]
    output_format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct NewtonFile {
    #[serde(default = "default_newton_tol")]
    tol: f64,
    #[serde(default = "default_newton_iters")]
    max_iters: usize,
}

impl Default for NewtonFile {
    fn default() -> Self {
        Self {
            tol: default_newton_tol(),
            max_iters: default_newton_iters(),
        }
    }
}

fn default_eval_grid_points() -> usize {
    1001
}

fn default_newton_tol() -> f64 {
    1e-13
}

fn default_newton_iters() -> usize {
    50
}

/// One line of a convergence table.
#[derive(Debug, Clone)]
pub struct ReportRow {
    pub n: usize,
    pub m: usize,
    pub err_mod: f64,
    pub delta_mod: Option<f64>,
    pub err_iter: f64,
    pub delta_iter: Option<f64>,
    pub err_extrap: Option<f64>,
    pub delta_extrap: Option<f64>,
}

/// Per-row execution details, kept out of the formatted table so repeated
/// runs stay byte-identical.
#[derive(Debug, Clone)]
pub struct RowStats {
    pub n: usize,
    pub newton_iterations: usize,
    pub nystrom_iterations: usize,
    pub runtime: Duration,
}

#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub rows: Vec<ReportRow>,
    pub stats: Vec<RowStats>,
    /// One-line echo of the configuration that produced the rows.
    pub config_echo: String,
}

impl ConvergenceReport {
    pub fn to_csv(&self, full_precision: bool) -> String {
        let mut out =
            String::from("n,m,err_mod,delta_mod,err_iter,delta_iter,err_extrap,delta_extrap\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.n,
                row.m,
                fmt_err(row.err_mod, full_precision),
                fmt_delta(row.delta_mod, full_precision),
                fmt_err(row.err_iter, full_precision),
                fmt_delta(row.delta_iter, full_precision),
                row.err_extrap
                    .map(|e| fmt_err(e, full_precision))
                    .unwrap_or_default(),
                fmt_delta(row.delta_extrap, full_precision),
            ));
        }
        out
    }

    pub fn to_markdown(&self, full_precision: bool) -> String {
        let mut out = String::new();
        out.push_str(&format!("{}\n\n", self.config_echo));
        out.push_str("| n | m | err_mod | delta_mod | err_iter | delta_iter | err_extrap | delta_extrap |\n");
        out.push_str("|---|---|---------|-----------|----------|------------|------------|--------------|\n");
        for row in &self.rows {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {} | {} | {} |\n",
                row.n,
                row.m,
                fmt_err(row.err_mod, full_precision),
                fmt_delta(row.delta_mod, full_precision),
                fmt_err(row.err_iter, full_precision),
                fmt_delta(row.delta_iter, full_precision),
                row.err_extrap
                    .map(|e| fmt_err(e, full_precision))
                    .unwrap_or_default(),
                fmt_delta(row.delta_extrap, full_precision),
            ));
        }
        out
    }

    pub fn format(&self, format: OutputFormat, full_precision: bool) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(full_precision),
            OutputFormat::Markdown => self.to_markdown(full_precision),
        }
    }
}

fn fmt_err(v: f64, full: bool) -> String {
    if full {
        format!("{v:e}")
    } else {
        format!("{v:.2e}")
    }
}

fn fmt_delta(v: Option<f64>, full: bool) -> String {
    match v {
        None => String::new(),
        Some(d) if full => format!("{d:e}"),
        Some(d) => format!("{d:.2}"),
    }
}

/// Sup norm of `approx - reference` over the union of a uniform grid, the
/// collocation nodes, the quadrature nodes and both endpoints.
///
/// The node families are included explicitly: superconvergent solutions can
/// take their largest error near breakpoints, between uniform grid points.
pub fn sup_error<A, R>(
    approx: A,
    reference: R,
    grid: &CollocationGrid,
    quad: &CompositeQuadrature,
    eval_grid_points: usize,
) -> f64
where
    A: Fn(f64) -> f64,
    R: Fn(f64) -> f64,
{
    assert!(eval_grid_points >= 2, "need at least the two endpoints");
    let step = 1.0 / (eval_grid_points - 1) as f64;
    let uniform = (0..eval_grid_points).map(|i| (i as f64 * step).min(1.0));
    let mut max_err = 0.0f64;
    for s in uniform
        .chain(grid.nodes().iter().copied())
        .chain(quad.nodes().iter().copied())
        .chain([0.0, 1.0])
    {
        let e = (approx(s) - reference(s)).abs();
        if e > max_err {
            max_err = e;
        }
    }
    max_err
}

/// log2(err_n / err_2n), the empirical order from one mesh doubling.
pub fn estimate_order(err_n: f64, err_2n: f64) -> Result<f64, NonPositiveError> {
    if err_n > 0.0 && err_2n > 0.0 {
        Ok((err_n / err_2n).log2())
    } else {
        Err(NonPositiveError { err_n, err_2n })
    }
}

/// Errors at or below this are rounding noise; an order estimated from them
/// would be meaningless, so the report leaves the cell blank.
const DELTA_NOISE_FLOOR: f64 = 5e-15;

fn order_cell(prev: Option<f64>, current: f64) -> Option<f64> {
    let prev = prev?;
    if prev <= DELTA_NOISE_FLOOR || current <= DELTA_NOISE_FLOOR {
        return None;
    }
    estimate_order(prev, current).ok()
}

/// Run the full stack over the configured mesh sequence.
///
/// For each n the modified projection equation is solved and the iterated
/// solution formed; when the previous entry of `n_values` is exactly n/2 an
/// extrapolated solution is built from the pair and its error reported at
/// this row. Order columns are filled only across consecutive doublings.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ConvergenceReport, ExperimentError> {
    config.validate()?;
    let problem = config.problem.resolve()?;
    let phi = problem
        .exact_solution()
        .ok_or(ExperimentError::MissingExactSolution)?;

    let base_rule = QuadratureRule::gauss_legendre(config.quad_rho)
        .map_err(|e| ExperimentError::Config(e.to_string()))?;

    let mut rows: Vec<ReportRow> = Vec::new();
    let mut stats = Vec::new();
    // iterated evaluator of the previous row, kept for extrapolation
    let mut previous: Option<(usize, Box<dyn Fn(f64) -> f64>)> = None;

    for &n in &config.n_values {
        let started = std::time::Instant::now();
        let m = config.m_rule.m_for(n);
        let quad = CompositeQuadrature::new(base_rule.clone(), m)
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        let grid = CollocationGrid::new(n, config.r)
            .map_err(|e| ExperimentError::Config(e.to_string()))?;
        let bundle = solve_modified_projection(&problem, &quad, &grid, &config.newton)
            .map_err(|source| ExperimentError::Solve { n, source })?;

        let err_mod = sup_error(
            |s| bundle.eval_modified(s),
            phi,
            &grid,
            &quad,
            config.eval_grid_points,
        );
        let iterated = iterate(&bundle);
        let err_iter = sup_error(&iterated, phi, &grid, &quad, config.eval_grid_points);

        let err_extrap = match &previous {
            Some((n_prev, coarse)) if *n_prev * 2 == n => {
                let extrap = richardson(coarse, &iterated, config.r);
                Some(sup_error(
                    extrap,
                    phi,
                    &grid,
                    &quad,
                    config.eval_grid_points,
                ))
            }
            _ => None,
        };

        let last = rows.last();
        let consecutive = last.map(|row| row.n * 2 == n).unwrap_or(false);
        let delta_mod = if consecutive {
            order_cell(last.map(|r| r.err_mod), err_mod)
        } else {
            None
        };
        let delta_iter = if consecutive {
            order_cell(last.map(|r| r.err_iter), err_iter)
        } else {
            None
        };
        let delta_extrap = match (err_extrap, last.and_then(|r| r.err_extrap), consecutive) {
            (Some(cur), Some(prev), true) => order_cell(Some(prev), cur),
            _ => None,
        };

        rows.push(ReportRow {
            n,
            m,
            err_mod,
            delta_mod,
            err_iter,
            delta_iter,
            err_extrap,
            delta_extrap,
        });
        stats.push(RowStats {
            n,
            newton_iterations: bundle.newton_report().iterations,
            nystrom_iterations: bundle.nystrom().report().iterations,
            runtime: started.elapsed(),
        });
        previous = Some((n, Box::new(iterated)));
    }

    Ok(ConvergenceReport {
        rows,
        stats,
        config_echo: format!(
            "problem={} r={} quad_rho={} m_rule={} n_values={:?} newton_tol={:.1e} eval_grid_points={}",
            config.problem.label(),
            config.r,
            config.quad_rho,
            config.m_rule,
            config.n_values,
            config.newton.tol,
            config.eval_grid_points,
        ),
    })
}

/// Built-in experiment configurations.
pub const PRESETS: &[&str] = &["table-4.4", "table-4.5-analog", "table-4.6"];

/// Look up a built-in configuration by name.
///
/// `table-4.4`: midpoint collocation (r = 1) against a fixed fine quadrature
/// mesh. `table-4.6`: two Gauss points per subinterval (r = 2) with the
/// quadrature mesh count growing as n^2. `table-4.5-analog`: the r = 2
/// variant of the fixed-mesh setup.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let standard = |r: usize, m_rule: MRule| ExperimentConfig {
        problem: ProblemSpec::Registry("inverse-sum".into()),
        r,
        n_values: vec![2, 4, 8, 16, 32],
        quad_rho: 2,
        m_rule,
        newton: NewtonSettings::default(),
        eval_grid_points: 1001,
        output_format: OutputFormat::Csv,
    };
    match name {
        "table-4.4" => Some(standard(1, MRule::Fixed(256))),
        "table-4.5-analog" => Some(standard(2, MRule::Fixed(256))),
        "table-4.6" => Some(standard(2, MRule::Square)),
        _ => None,
    }
}
