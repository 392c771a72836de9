//! Certified ε-proximal points for `F(x) = Σᵢ |(xᵢ − aᵢ)(xᵢ − bᵢ)|` through
//! the smooth surrogate `F̂(x) = Σᵢ √(((xᵢ − aᵢ)(xᵢ − bᵢ))² + εᵢ²)`.
//!
//! `F ≤ F̂ ≤ F + Σεᵢ`, so the unique minimiser of the surrogate prox
//! objective lies in the `Σεᵢ`-sublevel set of the exact one.

use crate::error::{check_dim, Error, Result};
use crate::functions::check_prox_step;
use crate::linalg::Vector;

/// Derivative tolerance of the scalar sub-solver.
pub const SUBSOLVER_TOLERANCE: f64 = 1e-12;
/// Iteration cap of the scalar sub-solver.
pub const SUBSOLVER_MAX_ITERATIONS: usize = 200;
/// Absolute slack when comparing prox objectives.
pub const CERTIFICATE_SLACK: f64 = 1e-12;

/// Per-coordinate roots and smoothing levels.
#[derive(Clone, Debug, PartialEq)]
pub struct SurrogateSpec {
    a: Vec<f64>,
    b: Vec<f64>,
    eps: Vec<f64>,
}

impl SurrogateSpec {
    pub fn new(a: Vec<f64>, b: Vec<f64>, eps: Vec<f64>) -> Result<Self> {
        let n = a.len();
        if n == 0 {
            return Err(Error::InvalidParameter("surrogate needs at least one coordinate".into()));
        }
        check_dim("surrogate roots", n, b.len())?;
        check_dim("surrogate smoothing levels", n, eps.len())?;
        for i in 0..n {
            if !(a[i].is_finite() && b[i].is_finite() && a[i] < b[i]) {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {i}: roots must satisfy a < b, got ({}, {})",
                    a[i], b[i]
                )));
            }
            if !(eps[i] > 0.0) || !eps[i].is_finite() {
                return Err(Error::InvalidParameter(format!(
                    "coordinate {i}: smoothing level must be > 0, got {}",
                    eps[i]
                )));
            }
        }
        Ok(Self { a, b, eps })
    }

    /// Same roots on every coordinate and the total budget split equally.
    pub fn uniform(n: usize, a: f64, b: f64, total: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("surrogate needs at least one coordinate".into()));
        }
        let share = total / n as f64;
        Self::new(vec![a; n], vec![b; n], vec![share; n])
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// `Σεᵢ`
    pub fn budget(&self) -> f64 {
        self.eps.iter().sum()
    }

    pub fn smoothing(&self) -> &[f64] {
        &self.eps
    }

    /// The exact penalty `F(x)`.
    pub fn exact_value(&self, x: &[f64]) -> Result<f64> {
        check_dim("surrogate", self.dim(), x.len())?;
        Ok((0..self.dim())
            .map(|i| ((x[i] - self.a[i]) * (x[i] - self.b[i])).abs())
            .sum())
    }

    /// Exact prox objective `F(x) + ‖x − y‖²/(2α)`.
    pub fn prox_objective(&self, x: &[f64], y: &[f64], alpha: f64) -> Result<f64> {
        check_dim("prox objective", x.len(), y.len())?;
        let quad: f64 = x.iter().zip(y).map(|(s, t)| (s - t) * (s - t)).sum();
        Ok(self.exact_value(x)? + quad / (2.0 * alpha))
    }

    fn surrogate_prox_objective(&self, x: &[f64], y: &[f64], alpha: f64) -> Result<f64> {
        let quad: f64 = x.iter().zip(y).map(|(s, t)| (s - t) * (s - t)).sum();
        Ok(surrogate_value(self, x)? + quad / (2.0 * alpha))
    }
}

/// `F̂(x)`
pub fn surrogate_value(spec: &SurrogateSpec, x: &[f64]) -> Result<f64> {
    check_dim("surrogate", spec.dim(), x.len())?;
    Ok((0..spec.dim())
        .map(|i| {
            let q = (x[i] - spec.a[i]) * (x[i] - spec.b[i]);
            q.hypot(spec.eps[i])
        })
        .sum())
}

/// Outcome of comparing a candidate prox point with a reference.
#[derive(Clone, Debug, PartialEq)]
pub struct EpsProxCertificate {
    pub candidate: Vector,
    /// Surrogate prox objective at the candidate, when a surrogate was used.
    pub surrogate_objective: Option<f64>,
    pub candidate_objective: f64,
    pub reference_objective: f64,
    pub budget: f64,
    pub satisfied: bool,
}

impl EpsProxCertificate {
    /// `h(candidate) − h(reference)`
    pub fn gap(&self) -> f64 {
        self.candidate_objective - self.reference_objective
    }
}

/// Checks `h(candidate) ≤ h(reference) + ε` up to [`CERTIFICATE_SLACK`].
pub fn certify_eps_solution(
    h: impl Fn(&[f64]) -> f64,
    candidate: &Vector,
    reference: &Vector,
    eps: f64,
) -> Result<EpsProxCertificate> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!("budget must be >= 0, got {eps}")));
    }
    let candidate_objective = h(candidate);
    let reference_objective = h(reference);
    Ok(EpsProxCertificate {
        candidate: candidate.clone(),
        surrogate_objective: None,
        candidate_objective,
        reference_objective,
        budget: eps,
        satisfied: candidate_objective <= reference_objective + eps + CERTIFICATE_SLACK,
    })
}

struct Scalar {
    a: f64,
    b: f64,
    eps: f64,
    y: f64,
    inv_alpha: f64,
}

impl Scalar {
    /// First and second derivative of `√(q² + ε²) + (x − y)²/(2α)`.
    fn derivatives(&self, x: f64) -> (f64, f64) {
        let q = (x - self.a) * (x - self.b);
        let dq = 2.0 * x - self.a - self.b;
        let s = q.hypot(self.eps);
        let d1 = q * dq / s + (x - self.y) * self.inv_alpha;
        let d2 = dq * dq * self.eps * self.eps / (s * s * s) + 2.0 * q / s + self.inv_alpha;
        (d1, d2)
    }

    /// Safeguarded Newton on the derivative with a bisection fallback.
    fn solve(&self) -> Result<f64> {
        let mut lo = self.y.min(self.a) - 1.0;
        let mut hi = self.y.max(self.b) + 1.0;
        let mut x = self.y;
        let mut last = f64::NAN;
        for _ in 0..SUBSOLVER_MAX_ITERATIONS {
            let (d1, d2) = self.derivatives(x);
            last = d1;
            if d1.abs() < SUBSOLVER_TOLERANCE {
                return Ok(x);
            }
            if d1 < 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            // Bracket at machine resolution: nothing left to refine.
            if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()).max(1.0) {
                return Ok(x);
            }
            let newton = x - d1 / d2;
            x = if d2 > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
        }
        Err(Error::NotConverged {
            iterations: SUBSOLVER_MAX_ITERATIONS,
            derivative: last,
            lo,
            hi,
        })
    }
}

/// Exact minimiser of `|(x − a)(x − b)| + (x − y)²/(2α)` for `α < 1/2`,
/// by enumerating the stationary points of the three quadratic pieces.
pub(crate) fn exact_prox_scalar(a: f64, b: f64, y: f64, alpha: f64) -> f64 {
    let inv = 1.0 / alpha;
    let h = |x: f64| ((x - a) * (x - b)).abs() + (x - y) * (x - y) * inv / 2.0;
    let mut candidates = vec![a, b];
    let outer = (y * inv + a + b) / (2.0 + inv);
    if outer <= a || outer >= b {
        candidates.push(outer);
    }
    let inner = (y * inv - a - b) / (inv - 2.0);
    if inner > a && inner < b {
        candidates.push(inner);
    }
    candidates
        .into_iter()
        .min_by(|s, t| h(*s).total_cmp(&h(*t)))
        .expect("non-empty")
}

/// Minimises the surrogate prox objective coordinate by coordinate and
/// certifies the result against the exact prox with budget `Σεᵢ`.
///
/// Requires `0 < α < 1/2`, which keeps every scalar problem strongly convex.
pub fn eps_prox(spec: &SurrogateSpec, y: &[f64], alpha: f64) -> Result<(Vector, EpsProxCertificate)> {
    check_dim("eps-prox", spec.dim(), y.len())?;
    check_prox_step(alpha)?;
    let mut out = Vec::with_capacity(spec.dim());
    let mut reference = Vec::with_capacity(spec.dim());
    for i in 0..spec.dim() {
        let scalar = Scalar {
            a: spec.a[i],
            b: spec.b[i],
            eps: spec.eps[i],
            y: y[i],
            inv_alpha: 1.0 / alpha,
        };
        out.push(scalar.solve()?);
        reference.push(exact_prox_scalar(spec.a[i], spec.b[i], y[i], alpha));
    }
    let candidate = Vector::new(out)?;
    let reference = Vector::from_vec_unchecked(reference);
    let h = |x: &[f64]| spec.prox_objective(x, y, alpha).expect("dimensions checked");
    let mut certificate = certify_eps_solution(h, &candidate, &reference, spec.budget())?;
    certificate.surrogate_objective = Some(spec.surrogate_prox_objective(&candidate, y, alpha)?);
    Ok((candidate, certificate))
}
