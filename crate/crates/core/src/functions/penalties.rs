use super::{Penalty, ProxOutcome};
use crate::diagnostics::dist_to_binary_set;
use crate::error::{check_dim, Error, Result};
use crate::inexact_prox::{self, SurrogateSpec};
use crate::linalg::Vector;

pub(crate) fn check_prox_step(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "proximal step {alpha} must lie in (0, 1/2) for a single-valued prox"
        )))
    }
}

/// Closed-form proximal point of `t ↦ |t² − 1|` with step `alpha ∈ (0, 1/2)`.
///
/// The middle region `[1 − 2α, 1 + 2α]` is closed and maps to `sign(y)`.
pub fn binary_prox_scalar(y: f64, alpha: f64) -> f64 {
    let r = y.abs();
    if r > 1.0 + 2.0 * alpha {
        y / (1.0 + 2.0 * alpha)
    } else if r < 1.0 - 2.0 * alpha {
        y / (1.0 - 2.0 * alpha)
    } else {
        y.signum()
    }
}

/// Separable two-root penalty `x ↦ Σᵢ |(xᵢ − a)(xᵢ − b)|`.
///
/// Weakly convex with modulus 2 and globally sharp with constant
/// `(b − a)/2` with respect to `{a, b}ⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct BinaryPenalty {
    a: f64,
    b: f64,
    dim: usize,
}

impl BinaryPenalty {
    pub fn new(dim: usize, a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::InvalidParameter(format!("roots must satisfy a < b, got a={a}, b={b}")));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Self { a, b, dim })
    }

    /// Roots `(−1, 1)`, i.e. `Σ |xᵢ² − 1|`.
    pub fn standard(dim: usize) -> Self {
        Self::new(dim, -1.0, 1.0).expect("valid roots")
    }

    pub fn roots(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn is_standard(&self) -> bool {
        self.a == -1.0 && self.b == 1.0
    }

    pub const fn weak_convexity(&self) -> f64 {
        2.0
    }

    pub fn sharpness(&self) -> f64 {
        (self.b - self.a) / 2.0
    }

    pub fn scalar_value(&self, t: f64) -> f64 {
        ((t - self.a) * (t - self.b)).abs()
    }

    /// Nearest point of `{a, b}ⁿ` and the distance to it.
    pub fn nearest_solution(&self, x: &[f64]) -> (f64, Vector) {
        dist_to_binary_set(x, self.a, self.b)
    }

    /// Smoothed surrogate splitting the total budget `eps` equally over the
    /// coordinates.
    pub fn surrogate(&self, eps: f64) -> Result<SurrogateSpec> {
        SurrogateSpec::uniform(self.dim, self.a, self.b, eps)
    }
}

impl Penalty for BinaryPenalty {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim("binary penalty", self.dim, x.len())?;
        Ok(x.iter().map(|&t| self.scalar_value(t)).sum())
    }

    /// Only the roots `(−1, 1)` have a closed form; other roots go through
    /// [`Penalty::eps_prox`] with a positive budget.
    fn prox(&self, y: &[f64], alpha: f64) -> Result<Vector> {
        check_dim("binary prox", self.dim, y.len())?;
        check_prox_step(alpha)?;
        if !self.is_standard() {
            return Err(Error::Unsupported(format!(
                "no closed-form prox for roots ({}, {}); use an inexact prox with a positive budget",
                self.a, self.b
            )));
        }
        Ok(Vector::from_vec_unchecked(
            y.iter().map(|&t| binary_prox_scalar(t, alpha)).collect(),
        ))
    }

    fn eps_prox(&self, y: &[f64], alpha: f64, eps: f64) -> Result<ProxOutcome> {
        if eps <= 0.0 {
            return Ok(ProxOutcome::exact(self.prox(y, alpha)?));
        }
        check_dim("binary eps-prox", self.dim, y.len())?;
        let spec = self.surrogate(eps)?;
        let (point, certificate) = inexact_prox::eps_prox(&spec, y, alpha)?;
        Ok(ProxOutcome {
            point,
            certificate: Some(certificate),
        })
    }
}

/// `x ↦ |‖x‖² − 1|`, weakly convex with modulus 2 and sharp with constant 1
/// with respect to the unit sphere.
#[derive(Clone, Debug, PartialEq)]
pub struct SpherePenalty {
    dim: usize,
}

impl SpherePenalty {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be >= 1".into()));
        }
        Ok(Self { dim })
    }

    pub const fn weak_convexity(&self) -> f64 {
        2.0
    }

    pub const fn sharpness(&self) -> f64 {
        1.0
    }

    /// Distance to the unit sphere, `|‖x‖ − 1|`.
    pub fn distance_to_sphere(&self, x: &[f64]) -> f64 {
        (crate::linalg::norm(x) - 1.0).abs()
    }
}

impl Penalty for SpherePenalty {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Result<f64> {
        check_dim("sphere penalty", self.dim, x.len())?;
        let sq: f64 = x.iter().map(|t| t * t).sum();
        Ok((sq - 1.0).abs())
    }

    /// Radial application of the scalar binary prox. At `y = 0` the unique
    /// minimiser is the origin itself.
    fn prox(&self, y: &[f64], alpha: f64) -> Result<Vector> {
        check_dim("sphere prox", self.dim, y.len())?;
        check_prox_step(alpha)?;
        let r = crate::linalg::norm(y);
        if r == 0.0 {
            return Ok(Vector::zeros(self.dim));
        }
        let scale = if r > 1.0 + 2.0 * alpha {
            1.0 / (1.0 + 2.0 * alpha)
        } else if r < 1.0 - 2.0 * alpha {
            1.0 / (1.0 - 2.0 * alpha)
        } else {
            1.0 / r
        };
        Ok(Vector::from_vec_unchecked(y.iter().map(|t| t * scale).collect()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid_prox(y: f64, alpha: f64) -> f64 {
        let h = |x: f64| (x * x - 1.0).abs() + (x - y) * (x - y) / (2.0 * alpha);
        let mut best = (f64::INFINITY, 0.0);
        let steps = 600_000;
        for k in 0..=steps {
            let x = -3.0 + 6.0 * k as f64 / steps as f64;
            let v = h(x);
            if v < best.0 {
                best = (v, x);
            }
        }
        best.1
    }

    #[test]
    fn binary_value_examples() {
        let p = BinaryPenalty::standard(2);
        assert_eq!(p.value(&[1.0, -1.0]).unwrap(), 0.0);
        assert_eq!(p.value(&[0.0, 0.0]).unwrap(), 2.0);
        assert_eq!(BinaryPenalty::standard(1).value(&[2.0]).unwrap(), 3.0);
        assert!(p.value(&[1.0]).is_err());
    }

    #[test]
    fn binary_prox_matches_grid_oracle() {
        // frozen from the grid oracle: 4/3, 1, 0.5
        for (y, expected) in [(2.0, 4.0 / 3.0), (1.2, 1.0), (0.25, 0.5)] {
            let got = binary_prox_scalar(y, 0.25);
            assert!((got - expected).abs() < 1e-12);
            assert!((got - grid_prox(y, 0.25)).abs() < 1e-4);
        }
        for alpha in [0.01, 0.2, 0.49] {
            assert_eq!(binary_prox_scalar(1.0, alpha), 1.0);
        }
    }

    #[test]
    fn binary_prox_rejects_bad_steps_and_roots() {
        let p = BinaryPenalty::standard(1);
        assert!(p.prox(&[1.0], 0.5).is_err());
        assert!(p.prox(&[1.0], 0.0).is_err());
        assert!(p.prox(&[1.0], -0.1).is_err());
        let q = BinaryPenalty::new(1, 0.0, 1.0).unwrap();
        assert!(matches!(q.prox(&[0.3], 0.2), Err(Error::Unsupported(_))));
        assert!(BinaryPenalty::new(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn middle_region_is_closed() {
        let alpha = 0.25;
        assert_eq!(binary_prox_scalar(1.5, alpha), 1.0);
        assert_eq!(binary_prox_scalar(0.5, alpha), 1.0);
        assert_eq!(binary_prox_scalar(-0.5, alpha), -1.0);
    }

    #[test]
    fn sphere_prox_examples() {
        let s = SpherePenalty::new(2).unwrap();
        let p = s.prox(&[2.0, 0.0], 0.1).unwrap();
        assert!((p[0] - 2.0 / 1.2).abs() < 1e-15 && p[1] == 0.0);
        // radial reduction: the scalar grid oracle at ‖y‖ = 2 agrees
        assert!((grid_prox(2.0, 0.1) - 2.0 / 1.2).abs() < 1e-4);

        let on = [0.6, 0.8];
        let p = s.prox(&on, 0.3).unwrap();
        assert!((p[0] - 0.6).abs() < 1e-15 && (p[1] - 0.8).abs() < 1e-15);

        let alpha = 0.2;
        let p = s.prox(&[0.0, 0.0], alpha).unwrap();
        assert_eq!(p.as_slice(), &[0.0, 0.0]);
        let h = |x: &[f64]| s.value(x).unwrap() + x.iter().map(|t| t * t).sum::<f64>() / (2.0 * alpha);
        assert!(h(&p) < h(&[1.0, 0.0]));
    }
}
