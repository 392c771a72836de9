//! The forward-backward iteration
//!
//! ```text
//! y_t     = x_t − α ∇g(x_t)
//! x_{t+1} ∈ ε-prox_{αf}(y_t)
//! ```
//!
//! with step-size validation, stopping rules and per-iteration logging.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use crate::diagnostics::{compute_thresholds, contraction_factor, Thresholds};
use crate::error::{check_dim, Error, Result};
use crate::functions::CompositeProblem;
use crate::linalg::Vector;

/// Slack on the descent checks.
pub const DESCENT_SLACK: f64 = 1e-12;

/// Header of the trajectory CSV.
pub const TRAJECTORY_HEADER: [&str; 7] = ["t", "objective", "f_value", "g_value", "step_norm", "dist_to_S", "zeta"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Inexact,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Inexact => "inexact",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Mode::Exact),
            "inexact" => Ok(Mode::Inexact),
            other => Err(Error::Parse(format!("unknown mode {other:?} (expected exact or inexact)"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig {
    pub alpha: f64,
    pub eps: f64,
    pub max_iterations: usize,
    /// Stop once `‖x_t − x_{t+1}‖ ≤ step_tolerance`. A negative value never
    /// triggers.
    pub step_tolerance: f64,
    pub mode: Mode,
    /// Log `dist(x_t, S)` and `ζ` when the problem knows its solution set.
    pub log_distances: bool,
    /// Stop once `dist(x_t, S) ≤ tol` (needs a solution set).
    pub distance_tolerance: Option<f64>,
    /// Run even when the step-size gate fails; recorded in the trajectory.
    pub allow_invalid_parameters: bool,
    /// Keep every iterate in the trajectory.
    pub keep_iterates: bool,
}

impl SolverConfig {
    pub fn exact(alpha: f64) -> Self {
        Self {
            alpha,
            eps: 0.0,
            max_iterations: 1000,
            step_tolerance: 1e-10,
            mode: Mode::Exact,
            log_distances: true,
            distance_tolerance: None,
            allow_invalid_parameters: false,
            keep_iterates: false,
        }
    }

    pub fn inexact(alpha: f64, eps: f64) -> Self {
        Self {
            eps,
            mode: Mode::Inexact,
            ..Self::exact(alpha)
        }
    }

    pub fn with_max_iterations(mut self, n: usize) -> Self {
        self.max_iterations = n;
        self
    }

    pub fn with_step_tolerance(mut self, tol: f64) -> Self {
        self.step_tolerance = tol;
        self
    }

    pub fn with_distance_tolerance(mut self, tol: f64) -> Self {
        self.distance_tolerance = Some(tol);
        self
    }

    pub fn allowing_invalid_parameters(mut self) -> Self {
        self.allow_invalid_parameters = true;
        self
    }

    pub fn keeping_iterates(mut self) -> Self {
        self.keep_iterates = true;
        self
    }
}

/// Step-size and accuracy bounds for a problem with constants `(ρ, L_g, μ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamReport {
    /// `μ²/(2(ρ+1)) · min{1/(L_g+1), 1/(ρ+2)}`
    pub eps_bound: f64,
    /// `2ε(ρ+1)/(μ² − 2ε(ρ+1))`, zero when `ε = 0`.
    pub alpha_lower: f64,
    /// `min{1/L_g, 1/(ρ+1)}`
    pub alpha_upper: f64,
    /// `min{1/L_g, 1/ρ}`
    pub exact_alpha_upper: f64,
    /// `2/(ρ + L_g)`
    pub descent_alpha_upper: f64,
    pub valid: bool,
    pub violated_conditions: Vec<String>,
    pub alpha: f64,
    pub eps: f64,
}

impl ParamReport {
    /// Whether a run in `mode` may proceed: inexact runs need the full
    /// conditions, exact runs need `α < min{1/L_g, 1/ρ}`.
    pub fn admits(&self, mode: Mode) -> bool {
        match mode {
            Mode::Inexact => self.valid,
            Mode::Exact => self.eps == 0.0 && self.alpha > 0.0 && self.alpha < self.exact_alpha_upper,
        }
    }

    /// Reasons [`ParamReport::admits`] fails for `mode`.
    pub fn rejection_reasons(&self, mode: Mode) -> Vec<String> {
        match mode {
            Mode::Inexact => self.violated_conditions.clone(),
            Mode::Exact => {
                let mut reasons = Vec::new();
                if self.eps != 0.0 {
                    reasons.push(format!("exact mode needs eps = 0, got {}", self.eps));
                }
                if !(self.alpha > 0.0 && self.alpha < self.exact_alpha_upper) {
                    reasons.push(format!(
                        "alpha = {} must lie in (0, min(1/L_g, 1/rho)) = (0, {})",
                        self.alpha, self.exact_alpha_upper
                    ));
                }
                reasons
            }
        }
    }
}

fn reciprocal(v: f64) -> f64 {
    if v == 0.0 {
        f64::INFINITY
    } else {
        1.0 / v
    }
}

/// Evaluates the step-size/accuracy conditions
///
/// ```text
/// ε < μ²/(2(ρ+1)) · min{1/(L_g+1), 1/(ρ+2)}
/// 2ε(ρ+1)/(μ² − 2ε(ρ+1)) ≤ α < min{1/L_g, 1/(ρ+1)}
/// ```
///
/// For `ε = 0` only `0 < α < min{1/L_g, 1/(ρ+1)}` is checked and `μ` may be
/// unknown (pass `0`).
pub fn validate_parameters(rho: f64, lipschitz: f64, mu: f64, alpha: f64, eps: f64) -> Result<ParamReport> {
    for (name, v) in [("rho", rho), ("L_g", lipschitz), ("alpha", alpha), ("eps", eps)] {
        if !v.is_finite() {
            return Err(Error::InvalidParameter(format!("{name} must be finite, got {v}")));
        }
    }
    if rho < 0.0 || lipschitz < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "rho and L_g must be >= 0, got rho={rho}, L_g={lipschitz}"
        )));
    }
    if eps < 0.0 {
        return Err(Error::InvalidParameter(format!("eps must be >= 0, got {eps}")));
    }
    if eps > 0.0 && !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "a positive sharpness constant is required when eps > 0, got mu={mu}"
        )));
    }
    let mu = if mu.is_finite() && mu > 0.0 { mu } else { 0.0 };

    let eps_bound = mu * mu / (2.0 * (rho + 1.0)) * (1.0 / (lipschitz + 1.0)).min(1.0 / (rho + 2.0));
    let alpha_upper = reciprocal(lipschitz).min(1.0 / (rho + 1.0));
    let exact_alpha_upper = reciprocal(lipschitz).min(reciprocal(rho));
    let descent_alpha_upper = 2.0 * reciprocal(rho + lipschitz);
    let alpha_lower = if eps == 0.0 {
        0.0
    } else {
        let denom = mu * mu - 2.0 * eps * (rho + 1.0);
        if denom > 0.0 {
            2.0 * eps * (rho + 1.0) / denom
        } else {
            f64::INFINITY
        }
    };

    let mut violated = Vec::new();
    if !(alpha > 0.0) {
        violated.push(format!("alpha must be > 0, got {alpha}"));
    }
    if eps > 0.0 && !(eps < eps_bound) {
        violated.push(format!("eps = {eps} must be < {eps_bound}"));
    }
    if eps > 0.0 && !(alpha >= alpha_lower) {
        violated.push(format!("alpha = {alpha} must be >= {alpha_lower}"));
    }
    if !(alpha < alpha_upper) {
        violated.push(format!("alpha = {alpha} must be < min(1/L_g, 1/(rho+1)) = {alpha_upper}"));
    }
    Ok(ParamReport {
        eps_bound,
        alpha_lower,
        alpha_upper,
        exact_alpha_upper,
        descent_alpha_upper,
        valid: violated.is_empty(),
        violated_conditions: violated,
        alpha,
        eps,
    })
}

/// One forward-backward step `prox(x − α∇g(x), α)`.
pub fn fb_step(
    x: &[f64],
    alpha: f64,
    gradient: impl Fn(&[f64]) -> Result<Vector>,
    mut prox: impl FnMut(&[f64], f64) -> Result<Vector>,
) -> Result<Vector> {
    let grad = gradient(x)?;
    check_dim("forward step", x.len(), grad.len())?;
    let mut y = Vector::from_slice(x)?;
    y.axpy(-alpha, &grad);
    prox(&y, alpha)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CertificateStatus {
    /// Exact prox, or no certificate produced.
    NotApplicable,
    Satisfied,
    Violated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterationRecord {
    pub t: usize,
    pub objective: f64,
    pub f_value: f64,
    pub g_value: f64,
    /// `‖x_{t−1} − x_t‖`, absent for the initial point.
    pub step_norm: Option<f64>,
    pub dist_to_s: Option<f64>,
    /// Contraction factor of this iterate.
    pub zeta: Option<f64>,
    pub certificate: CertificateStatus,
    /// FNV-1a hash of the iterate's bit pattern.
    pub state_hash: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunStatus {
    StepTolerance,
    DistanceTolerance,
    MaxIterations,
    /// An oracle failed; the trajectory ends at the last good iterate.
    Failed(String),
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub records: Vec<IterationRecord>,
    pub status: RunStatus,
    pub mode: Mode,
    pub alpha: f64,
    pub eps: f64,
    pub rho: f64,
    pub lipschitz: f64,
    pub mu: Option<f64>,
    pub report: ParamReport,
    /// Set when the run went ahead despite a failed parameter gate.
    pub parameters_overridden: bool,
    pub thresholds: Option<Thresholds>,
    /// Steps `t` where the descent check between `x_t` and `x_{t+1}` failed.
    pub descent_violations: Vec<usize>,
    pub final_point: Vector,
    pub iterates: Option<Vec<Vector>>,
}

impl Trajectory {
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    pub fn objectives(&self) -> Vec<f64> {
        self.records.iter().map(|r| r.objective).collect()
    }

    /// Logged distances, in order, stopping at the first unlogged one.
    pub fn distances(&self) -> Vec<f64> {
        self.records.iter().map_while(|r| r.dist_to_s).collect()
    }

    pub fn zetas(&self) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.zeta).collect()
    }

    pub fn certificate_failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.certificate == CertificateStatus::Violated)
            .count()
    }

    pub fn last(&self) -> &IterationRecord {
        self.records.last().expect("trajectory has an initial record")
    }

    /// Key/value summary appended to the CSV export.
    pub fn summary(&self) -> Vec<(String, String)> {
        let mut rows = vec![
            ("mode".to_string(), self.mode.to_string()),
            ("alpha".to_string(), fmt_float(self.alpha)),
            ("eps".to_string(), fmt_float(self.eps)),
            ("rho".to_string(), fmt_float(self.rho)),
            ("lipschitz".to_string(), fmt_float(self.lipschitz)),
            ("iterations".to_string(), self.iterations().to_string()),
            ("status".to_string(), status_label(&self.status)),
            ("parameters_valid".to_string(), self.report.valid.to_string()),
            ("parameters_overridden".to_string(), self.parameters_overridden.to_string()),
            ("descent_violations".to_string(), self.descent_violations.len().to_string()),
            ("certificate_failures".to_string(), self.certificate_failures().to_string()),
        ];
        if let Some(mu) = self.mu {
            rows.push(("mu".to_string(), fmt_float(mu)));
        }
        if let Some(th) = &self.thresholds {
            rows.push(("e_minus".to_string(), fmt_float(th.e_minus)));
            rows.push(("e_plus".to_string(), fmt_float(th.e_plus)));
        }
        rows
    }

    /// Writes the per-iteration table followed by `#summary,key,value` rows
    /// for the built-in summary and `extra`.
    pub fn write_csv<W: Write>(&self, out: W, extra: &[(String, String)]) -> Result<()> {
        let rows: Vec<TrajectoryRow> = self.records.iter().map(TrajectoryRow::from).collect();
        let mut summary = self.summary();
        summary.extend_from_slice(extra);
        write_trajectory_csv(out, &rows, &summary)
    }
}

fn status_label(status: &RunStatus) -> String {
    match status {
        RunStatus::StepTolerance => "step_tolerance".into(),
        RunStatus::DistanceTolerance => "distance_tolerance".into(),
        RunStatus::MaxIterations => "max_iterations".into(),
        RunStatus::Failed(msg) => format!("failed: {msg}"),
    }
}

/// 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// A row of the trajectory CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryRow {
    pub t: usize,
    pub objective: f64,
    pub f_value: f64,
    pub g_value: f64,
    pub step_norm: Option<f64>,
    pub dist_to_s: Option<f64>,
    pub zeta: Option<f64>,
}

impl From<&IterationRecord> for TrajectoryRow {
    fn from(r: &IterationRecord) -> Self {
        Self {
            t: r.t,
            objective: r.objective,
            f_value: r.f_value,
            g_value: r.g_value,
            step_norm: r.step_norm,
            dist_to_s: r.dist_to_s,
            zeta: r.zeta,
        }
    }
}

/// Parsed trajectory CSV.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrajectoryTable {
    pub rows: Vec<TrajectoryRow>,
    pub summary: Vec<(String, String)>,
}

impl TrajectoryTable {
    pub fn summary_value(&self, key: &str) -> Option<&str> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn distances(&self) -> Vec<f64> {
        self.rows.iter().map_while(|r| r.dist_to_s).collect()
    }
}

pub fn write_trajectory_csv<W: Write>(out: W, rows: &[TrajectoryRow], summary: &[(String, String)]) -> Result<()> {
    let opt = |v: Option<f64>| v.map(fmt_float).unwrap_or_default();
    let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
    w.write_record(TRAJECTORY_HEADER)?;
    for r in rows {
        w.write_record([
            r.t.to_string(),
            fmt_float(r.objective),
            fmt_float(r.f_value),
            fmt_float(r.g_value),
            opt(r.step_norm),
            opt(r.dist_to_s),
            opt(r.zeta),
        ])?;
    }
    for (k, v) in summary {
        w.write_record(["#summary", k.as_str(), v.as_str()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: BufRead>(input: R) -> Result<TrajectoryTable> {
    let mut table = TrajectoryTable::default();
    let mut body = String::new();
    for line in input.lines() {
        let line = line?;
        if let Some(rest) = line.strip_prefix("#summary,") {
            let (k, v) = rest
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("malformed summary row {line:?}")))?;
            table.summary.push((k.to_string(), v.to_string()));
        } else if !line.starts_with('#') {
            body.push_str(&line);
            body.push('\n');
        }
    }
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header = reader.headers()?.clone();
    if header.iter().ne(TRAJECTORY_HEADER.iter().copied()) {
        return Err(Error::Parse(format!(
            "unexpected trajectory header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let num = |s: &str, field: &str| -> Result<f64> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse(format!("field {field}: {s:?}: {e}")))
    };
    let opt = |s: &str, field: &str| -> Result<Option<f64>> {
        if s.trim().is_empty() {
            Ok(None)
        } else {
            num(s, field).map(Some)
        }
    };
    for record in reader.records() {
        let r = record?;
        table.rows.push(TrajectoryRow {
            t: r[0].trim().parse().map_err(|e| Error::Parse(format!("field t: {:?}: {e}", &r[0])))?,
            objective: num(&r[1], "objective")?,
            f_value: num(&r[2], "f_value")?,
            g_value: num(&r[3], "g_value")?,
            step_norm: opt(&r[4], "step_norm")?,
            dist_to_s: opt(&r[5], "dist_to_S")?,
            zeta: opt(&r[6], "zeta")?,
        });
    }
    Ok(table)
}

fn state_hash(x: &[f64]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for v in x {
        for byte in v.to_bits().to_le_bytes() {
            h ^= u64::from(byte);
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

struct Evaluation {
    f: f64,
    g: f64,
}

fn evaluate(problem: &CompositeProblem, x: &[f64]) -> Result<Evaluation> {
    let (f, g) = problem.values(x)?;
    if !(f + g).is_finite() {
        return Err(Error::NonFinite("objective"));
    }
    Ok(Evaluation { f, g })
}

/// Runs the forward-backward iteration from `x0`.
///
/// Parameter-gate failures are errors unless
/// [`SolverConfig::allow_invalid_parameters`] is set. Oracle failures after
/// the start end the run with [`RunStatus::Failed`].
pub fn run_fb(problem: &CompositeProblem, config: &SolverConfig, x0: &[f64]) -> Result<Trajectory> {
    check_dim("initial point", problem.dim(), x0.len())?;
    let x0 = Vector::from_slice(x0)?;
    if config.mode == Mode::Exact && config.eps != 0.0 {
        return Err(Error::InvalidParameter(format!(
            "exact mode needs eps = 0, got {}",
            config.eps
        )));
    }
    let mu = problem.sharpness.unwrap_or(0.0);
    let report = validate_parameters(problem.rho, problem.lipschitz, mu, config.alpha, config.eps)?;
    let admitted = report.admits(config.mode);
    if !admitted && !config.allow_invalid_parameters {
        return Err(Error::ParameterConditions(report.rejection_reasons(config.mode)));
    }
    let alpha = config.alpha;
    let eps = config.eps;
    let thresholds = problem
        .sharpness
        .and_then(|mu| compute_thresholds(mu, problem.rho, alpha, eps).ok());
    let track = config.log_distances && problem.solution_set.is_some();
    let dist = |x: &[f64]| if track { problem.distance_to_solutions(x) } else { None };
    let zeta = |d: Option<f64>| match (d, problem.sharpness, thresholds) {
        (Some(d), Some(mu), Some(th)) => contraction_factor(d, mu, problem.rho, alpha, th.e_minus, config.mode),
        _ => None,
    };
    let strict_descent = config.mode == Mode::Exact && 2.0 / alpha > problem.rho + problem.lipschitz;

    let start = evaluate(problem, &x0)?;
    let mut records = vec![IterationRecord {
        t: 0,
        objective: start.f + start.g,
        f_value: start.f,
        g_value: start.g,
        step_norm: None,
        dist_to_s: dist(&x0),
        zeta: None,
        certificate: CertificateStatus::NotApplicable,
        state_hash: state_hash(&x0),
    }];
    let mut iterates = config.keep_iterates.then(|| vec![x0.clone()]);
    let mut descent_violations = Vec::new();
    let mut x = x0;
    let mut status = RunStatus::MaxIterations;
    if let (Some(tol), Some(d)) = (config.distance_tolerance, records[0].dist_to_s) {
        if d <= tol && config.max_iterations > 0 {
            status = RunStatus::DistanceTolerance;
        }
    }

    if status == RunStatus::MaxIterations {
        for t in 0..config.max_iterations {
            let step = (|| -> Result<(Vector, CertificateStatus, Evaluation)> {
                let mut certificate = CertificateStatus::NotApplicable;
                let next = fb_step(
                    &x,
                    alpha,
                    |z| problem.g.gradient(z),
                    |y, a| match config.mode {
                        Mode::Exact => problem.f.prox(y, a),
                        Mode::Inexact => {
                            let outcome = problem.f.eps_prox(y, a, eps)?;
                            if let Some(c) = &outcome.certificate {
                                certificate = if c.satisfied {
                                    CertificateStatus::Satisfied
                                } else {
                                    CertificateStatus::Violated
                                };
                            }
                            Ok(outcome.point)
                        }
                    },
                )?;
                if !next.is_finite() {
                    return Err(Error::NonFinite("iterate"));
                }
                let eval = evaluate(problem, &next)?;
                Ok((next, certificate, eval))
            })();
            let (next, certificate, eval) = match step {
                Ok(v) => v,
                Err(e) => {
                    status = RunStatus::Failed(e.to_string());
                    break;
                }
            };
            let step_norm = x.distance(&next);
            let objective = eval.f + eval.g;
            let decrease = records[t].objective - objective;
            let floor = match config.mode {
                Mode::Exact if strict_descent => -DESCENT_SLACK,
                Mode::Exact => f64::NEG_INFINITY,
                Mode::Inexact => -eps - (2.0 * eps / alpha).sqrt() * step_norm - DESCENT_SLACK,
            };
            if decrease < floor {
                descent_violations.push(t);
            }
            let d = dist(&next);
            records.push(IterationRecord {
                t: t + 1,
                objective,
                f_value: eval.f,
                g_value: eval.g,
                step_norm: Some(step_norm),
                dist_to_s: d,
                zeta: zeta(d),
                certificate,
                state_hash: state_hash(&next),
            });
            if let Some(it) = iterates.as_mut() {
                it.push(next.clone());
            }
            x = next;
            if step_norm <= config.step_tolerance {
                status = RunStatus::StepTolerance;
                break;
            }
            if let (Some(tol), Some(d)) = (config.distance_tolerance, d) {
                if d <= tol {
                    status = RunStatus::DistanceTolerance;
                    break;
                }
            }
        }
    }

    Ok(Trajectory {
        records,
        status,
        mode: config.mode,
        alpha,
        eps,
        rho: problem.rho,
        lipschitz: problem.lipschitz,
        mu: problem.sharpness,
        report,
        parameters_overridden: !admitted,
        thresholds,
        descent_violations,
        final_point: x,
        iterates,
    })
}
