//! Objective terms: weakly convex penalties with proximal oracles, smooth
//! terms with gradient oracles, and the [`CompositeProblem`] bundle the
//! solver consumes.

mod penalties;
mod smooth;

pub use penalties::{binary_prox_scalar, BinaryPenalty, SpherePenalty};
pub(crate) use penalties::check_prox_step;
pub use smooth::{ball_projection, norm_prox, BallDistanceTerm, SquaredDistance, DEFAULT_NORM_ITERATIONS};

use crate::diagnostics::dist_to_binary_set;
use crate::error::{check_dim, Error, Result};
use crate::inexact_prox::EpsProxCertificate;
use crate::linalg::{norm, Vector};

/// Result of an (ε-)proximal oracle call.
#[derive(Clone, Debug)]
pub struct ProxOutcome {
    pub point: Vector,
    /// Present when the point came from an inexact oracle that certified it.
    pub certificate: Option<EpsProxCertificate>,
}

impl ProxOutcome {
    pub fn exact(point: Vector) -> Self {
        Self {
            point,
            certificate: None,
        }
    }
}

/// A weakly convex term `f` with a proximal oracle.
pub trait Penalty: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    /// Exact proximal point `argmin f(x) + ‖x − y‖²/(2α)`.
    fn prox(&self, y: &[f64], alpha: f64) -> Result<Vector>;

    /// A point whose prox objective is within `eps` of the minimum. The
    /// default returns the exact prox, which qualifies for every `eps ≥ 0`.
    fn eps_prox(&self, y: &[f64], alpha: f64, eps: f64) -> Result<ProxOutcome> {
        let _ = eps;
        Ok(ProxOutcome::exact(self.prox(y, alpha)?))
    }
}

/// A differentiable term `g` with a gradient oracle.
pub trait SmoothTerm: Send + Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> Result<f64>;

    fn gradient(&self, x: &[f64]) -> Result<Vector>;
}

/// Exact nearest-point oracle for the solution set `S` of a problem.
pub trait SolutionSet: Send + Sync {
    /// `(dist(x, S), nearest point)`.
    fn nearest(&self, x: &[f64]) -> (f64, Vector);
}

/// `{a, b}ⁿ`; ties at the midpoint go to `b`.
#[derive(Clone, Copy, Debug)]
pub struct BinarySet {
    pub a: f64,
    pub b: f64,
}

impl SolutionSet for BinarySet {
    fn nearest(&self, x: &[f64]) -> (f64, Vector) {
        dist_to_binary_set(x, self.a, self.b)
    }
}

/// A finite set of points; ties go to the first listed point.
#[derive(Clone, Debug)]
pub struct FiniteSet(pub Vec<Vector>);

impl SolutionSet for FiniteSet {
    fn nearest(&self, x: &[f64]) -> (f64, Vector) {
        let mut best: Option<(f64, &Vector)> = None;
        for p in &self.0 {
            let d = p.distance(x);
            if best.map_or(true, |(bd, _)| d < bd) {
                best = Some((d, p));
            }
        }
        let (d, p) = best.expect("finite solution set is non-empty");
        (d, p.clone())
    }
}

/// The unit sphere; the origin maps to the first basis vector.
#[derive(Clone, Copy, Debug)]
pub struct UnitSphere;

impl SolutionSet for UnitSphere {
    fn nearest(&self, x: &[f64]) -> (f64, Vector) {
        let r = norm(x);
        if r == 0.0 {
            return (1.0, Vector::basis(x.len(), 0));
        }
        ((r - 1.0).abs(), Vector::from_vec_unchecked(x.iter().map(|t| t / r).collect()))
    }
}

/// `minimize f(x) + g(x)` together with the constants the theory needs.
pub struct CompositeProblem {
    pub f: Box<dyn Penalty>,
    pub g: Box<dyn SmoothTerm>,
    /// Weak-convexity modulus of `f`.
    pub rho: f64,
    /// Lipschitz constant of `∇g`.
    pub lipschitz: f64,
    /// Sharpness constant of `f + g`, when known.
    pub sharpness: Option<f64>,
    pub solution_set: Option<Box<dyn SolutionSet>>,
}

impl CompositeProblem {
    pub fn new(f: Box<dyn Penalty>, g: Box<dyn SmoothTerm>, rho: f64, lipschitz: f64) -> Result<Self> {
        check_dim("composite problem", f.dim(), g.dim())?;
        for (name, v) in [("rho", rho), ("Lipschitz constant", lipschitz)] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        Ok(Self {
            f,
            g,
            rho,
            lipschitz,
            sharpness: None,
            solution_set: None,
        })
    }

    pub fn with_sharpness(mut self, mu: f64) -> Result<Self> {
        if !(mu > 0.0) || !mu.is_finite() {
            return Err(Error::InvalidParameter(format!("sharpness constant must be > 0, got {mu}")));
        }
        self.sharpness = Some(mu);
        Ok(self)
    }

    pub fn with_solution_set(mut self, set: impl SolutionSet + 'static) -> Self {
        self.solution_set = Some(Box::new(set));
        self
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    /// `(f(x), g(x))`
    pub fn values(&self, x: &[f64]) -> Result<(f64, f64)> {
        Ok((self.f.value(x)?, self.g.value(x)?))
    }

    pub fn objective(&self, x: &[f64]) -> Result<f64> {
        let (f, g) = self.values(x)?;
        Ok(f + g)
    }

    pub fn distance_to_solutions(&self, x: &[f64]) -> Option<f64> {
        self.solution_set.as_ref().map(|s| s.nearest(x).0)
    }
}

/// `f = F − (L/2)‖·‖²`, whose prox is a rescaled prox of `F`.
struct ShiftedPenalty {
    inner: Box<dyn Penalty>,
    shift: f64,
}

impl ShiftedPenalty {
    fn rescale(&self, y: &[f64], alpha: f64) -> Result<(Vec<f64>, f64)> {
        let c = 1.0 - alpha * self.shift;
        if !(c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "step {alpha} too large for the reformulated penalty (needs alpha * L < 1 with L = {})",
                self.shift
            )));
        }
        Ok((y.iter().map(|t| t / c).collect(), alpha / c))
    }
}

impl Penalty for ShiftedPenalty {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let sq: f64 = x.iter().map(|t| t * t).sum();
        Ok(self.inner.value(x)? - 0.5 * self.shift * sq)
    }

    fn prox(&self, y: &[f64], alpha: f64) -> Result<Vector> {
        let (y2, a2) = self.rescale(y, alpha)?;
        self.inner.prox(&y2, a2)
    }

    fn eps_prox(&self, y: &[f64], alpha: f64, eps: f64) -> Result<ProxOutcome> {
        // The two prox objectives differ by a constant, so ε-solutions agree.
        let (y2, a2) = self.rescale(y, alpha)?;
        self.inner.eps_prox(&y2, a2, eps)
    }
}

/// `g = G + (L/2)‖·‖²`
struct AugmentedSmooth {
    inner: Box<dyn SmoothTerm>,
    shift: f64,
}

impl SmoothTerm for AugmentedSmooth {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        let sq: f64 = x.iter().map(|t| t * t).sum();
        Ok(self.inner.value(x)? + 0.5 * self.shift * sq)
    }

    fn gradient(&self, x: &[f64]) -> Result<Vector> {
        let mut grad = self.inner.gradient(x)?;
        grad.axpy(self.shift, x);
        Ok(grad)
    }
}

/// Moves the curvature of a smooth but possibly nonconvex `G` into the
/// weakly convex part: for `F` `ρ_F`-weakly convex and `∇G` `L_G`-Lipschitz,
/// returns `f = F − (L_G/2)‖·‖²` (`ρ_F + L_G`-weakly convex) and
/// `g = G + (L_G/2)‖·‖²` (convex, `2 L_G`-smooth). `f + g = F + G` pointwise.
pub fn reformulate_problem(
    rho_f: f64,
    lipschitz_g: f64,
    f: Box<dyn Penalty>,
    g: Box<dyn SmoothTerm>,
) -> Result<CompositeProblem> {
    if !(rho_f >= 0.0) || !(lipschitz_g >= 0.0) || !rho_f.is_finite() || !lipschitz_g.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "constants must be finite and >= 0, got rho={rho_f}, L={lipschitz_g}"
        )));
    }
    if lipschitz_g == 0.0 {
        return CompositeProblem::new(f, g, rho_f, 0.0);
    }
    CompositeProblem::new(
        Box::new(ShiftedPenalty {
            inner: f,
            shift: lipschitz_g,
        }),
        Box::new(AugmentedSmooth {
            inner: g,
            shift: lipschitz_g,
        }),
        rho_f + lipschitz_g,
        2.0 * lipschitz_g,
    )
}
