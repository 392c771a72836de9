use super::SmoothTerm;
use crate::error::{check_dim, Error, Result};
use crate::linalg::{CsrMatrix, Vector};

/// Power iterations used when a ball-distance term estimates its own
/// Lipschitz constant.
pub const DEFAULT_NORM_ITERATIONS: usize = 100;

/// Block soft-threshold `(1 − θ/‖z‖)₊ z`, the proximal map of `θ‖·‖₂`.
pub fn norm_prox(z: &[f64], theta: f64) -> Result<Vector> {
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold must be >= 0, got {theta}")));
    }
    let n = crate::linalg::norm(z);
    if n <= theta {
        return Ok(Vector::from_vec_unchecked(vec![0.0; z.len()]));
    }
    let s = 1.0 - theta / n;
    Ok(Vector::from_vec_unchecked(z.iter().map(|v| v * s).collect()))
}

/// Projection onto the closed ball `B̄(center, θ)`, computed as
/// `x − prox_{θ‖·‖₂}(x − center)`.
pub fn ball_projection(x: &[f64], center: &[f64], theta: f64) -> Result<Vector> {
    check_dim("ball projection", center.len(), x.len())?;
    if !(theta > 0.0) {
        return Err(Error::InvalidParameter(format!("ball radius must be > 0, got {theta}")));
    }
    let shifted: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
    let p = norm_prox(&shifted, theta)?;
    Ok(Vector::from_vec_unchecked(
        x.iter().zip(p.iter()).map(|(a, q)| a - q).collect(),
    ))
}

/// `x ↦ ½ dist²(A x, B̄(y, θ))`.
///
/// Convex with gradient `Aᵀ prox_{θ‖·‖₂}(A x − y)`, which is `‖A‖²`-Lipschitz.
#[derive(Clone, Debug)]
pub struct BallDistanceTerm {
    matrix: CsrMatrix,
    center: Vector,
    theta: f64,
    lipschitz: f64,
}

impl BallDistanceTerm {
    /// Builds the term and estimates `L = ‖A‖²` with
    /// [`DEFAULT_NORM_ITERATIONS`] power iterations.
    pub fn new(matrix: CsrMatrix, center: Vector, theta: f64) -> Result<Self> {
        let sigma = matrix.operator_norm_estimate(DEFAULT_NORM_ITERATIONS, 0);
        Self::with_lipschitz(matrix, center, theta, sigma * sigma)
    }

    pub fn with_lipschitz(matrix: CsrMatrix, center: Vector, theta: f64, lipschitz: f64) -> Result<Self> {
        check_dim("ball-distance center", matrix.n_rows(), center.len())?;
        if !(theta > 0.0) || !theta.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be > 0, got {theta}")));
        }
        if !(lipschitz >= 0.0) || !lipschitz.is_finite() {
            return Err(Error::InvalidParameter(format!("Lipschitz constant must be >= 0, got {lipschitz}")));
        }
        Ok(Self {
            matrix,
            center,
            theta,
            lipschitz,
        })
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn center(&self) -> &Vector {
        &self.center
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    fn excess(&self, x: &[f64]) -> Result<Vector> {
        let ax = self.matrix.matvec(x)?;
        norm_prox(&ax.sub(&self.center), self.theta)
    }

    /// Whether `A x` lies in the ball.
    pub fn is_feasible(&self, x: &[f64]) -> Result<bool> {
        Ok(self.excess(x)?.iter().all(|v| *v == 0.0))
    }
}

impl SmoothTerm for BallDistanceTerm {
    fn dim(&self) -> usize {
        self.matrix.n_cols()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        Ok(0.5 * self.excess(x)?.norm_squared())
    }

    fn gradient(&self, x: &[f64]) -> Result<Vector> {
        let e = self.excess(x)?;
        self.matrix.matvec_transpose(&e)
    }
}

/// `x ↦ ½‖x − c‖²`.
#[derive(Clone, Debug)]
pub struct SquaredDistance {
    center: Vector,
}

impl SquaredDistance {
    pub fn new(center: Vector) -> Self {
        Self { center }
    }

    pub const fn lipschitz(&self) -> f64 {
        1.0
    }
}

impl SmoothTerm for SquaredDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim("squared distance", self.center.len(), x.len())?;
        Ok(0.5 * self.center.sub(x).norm_squared())
    }

    fn gradient(&self, x: &[f64]) -> Result<Vector> {
        check_dim("squared distance", self.center.len(), x.len())?;
        Ok(Vector::from_vec_unchecked(
            x.iter().zip(self.center.iter()).map(|(a, c)| a - c).collect(),
        ))
    }
}
