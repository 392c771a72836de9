//! Computable convergence theory: tube radii, contraction factors,
//! sharpness and criticality probes, and geometric rate fitting.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{norm, Vector};
use crate::solver::Mode;

/// Radii of the convergence tube and of the criticality rings.
///
/// `e_minus`/`e_plus` bound the region in which the forward-backward
/// iterates contract towards `S`; `tau1`/`tau2` (with `C = ρ/2`) delimit the
/// distances at which a non-solution `C`-ε-critical point can sit.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Thresholds {
    pub e_minus: f64,
    pub e_plus: f64,
    pub tau1: f64,
    pub tau2: f64,
    /// `μ² − 2ε(ρ+1)(α+1)/α`
    pub tube_discriminant: f64,
    /// `μ² − 4Cε`
    pub ring_discriminant: f64,
}

impl Thresholds {
    pub fn ordered(&self) -> bool {
        self.tau1 <= self.e_minus && self.e_minus < self.e_plus && self.e_plus <= self.tau2
    }
}

pub fn compute_thresholds(mu: f64, rho: f64, alpha: f64, eps: f64) -> Result<Thresholds> {
    if !(mu > 0.0) || !(rho >= 0.0) || !(alpha > 0.0) || !(eps >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "thresholds need mu > 0, rho >= 0, alpha > 0, eps >= 0 (got mu={mu}, rho={rho}, alpha={alpha}, eps={eps})"
        )));
    }
    let tube = mu * mu - 2.0 * eps * (rho + 1.0) * (alpha + 1.0) / alpha;
    if tube < 0.0 {
        return Err(Error::ParameterConditions(vec![format!(
            "accuracy too coarse for the step: mu^2 - 2 eps (rho+1)(alpha+1)/alpha = {tube:e} < 0 \
             (equivalently alpha is below the lower step bound)"
        )]));
    }
    let c = rho / 2.0;
    let ring = mu * mu - 4.0 * c * eps;
    if ring < 0.0 {
        return Err(Error::ParameterConditions(vec![format!(
            "accuracy too coarse for the ring radii: mu^2 - 2 rho eps = {ring:e} < 0"
        )]));
    }
    let sqrt_tube = tube.sqrt();
    let sqrt_ring = ring.sqrt();
    let (tau1, tau2) = if c > 0.0 {
        // τ₁ in the cancellation-free form 2ε/(μ + √·)
        (2.0 * eps / (mu + sqrt_ring), (mu + sqrt_ring) / (2.0 * c))
    } else {
        (eps / mu, f64::INFINITY)
    };
    Ok(Thresholds {
        e_minus: (mu - sqrt_tube) / (rho + 1.0),
        e_plus: (mu + sqrt_tube) / (rho + 1.0),
        tau1,
        tau2,
        tube_discriminant: tube,
        ring_discriminant: ring,
    })
}

/// Distance from `x` to `{a, b}ⁿ` and the nearest point; a coordinate at the
/// midpoint rounds to `b`.
pub fn dist_to_binary_set(x: &[f64], a: f64, b: f64) -> (f64, Vector) {
    let mid = 0.5 * (a + b);
    let mut sq = 0.0;
    let nearest: Vec<f64> = x
        .iter()
        .map(|&t| {
            let p = if t < mid { a } else { b };
            sq += (t - p) * (t - p);
            p
        })
        .collect();
    (sq.sqrt(), Vector::from_vec_unchecked(nearest))
}

/// Per-iteration contraction factor.
///
/// * exact: `1 − αρ + 2αμ / dist(x_{t+1}, S)`
/// * inexact: `1 − αρ − α + 2αμ / (dist(x_{t+1}, S) + E⁻)`
///
/// `None` means the denominator vanished, i.e. the iterate is a solution.
pub fn contraction_factor(dist_next: f64, mu: f64, rho: f64, alpha: f64, e_minus: f64, mode: Mode) -> Option<f64> {
    match mode {
        Mode::Exact => (dist_next > 0.0).then(|| 1.0 - alpha * rho + 2.0 * alpha * mu / dist_next),
        Mode::Inexact => {
            let denom = dist_next + e_minus;
            (denom > 0.0).then(|| 1.0 - alpha * rho - alpha + 2.0 * alpha * mu / denom)
        }
    }
}

/// Steps `t` at which `ζ_{t+1}(d²_{t+1} − E⁻²) ≤ d²_t − E⁻² + slack` fails,
/// checked only while `d_t > E⁻`. `zetas[t]` pairs with `distances[t]`.
pub fn contraction_violations(distances: &[f64], zetas: &[Option<f64>], e_minus: f64, slack: f64) -> Vec<usize> {
    let e2 = e_minus * e_minus;
    (0..distances.len().saturating_sub(1))
        .filter(|&t| {
            let (d0, d1) = (distances[t], distances[t + 1]);
            if d0 <= e_minus {
                return false;
            }
            match zetas.get(t + 1).copied().flatten() {
                Some(z) => z * (d1 * d1 - e2) > d0 * d0 - e2 + slack,
                None => false,
            }
        })
        .collect()
}

/// Random point generator for the probes.
#[derive(Clone, Debug)]
pub enum SampleSpec {
    /// Independent uniform coordinates in `[lo, hi]`.
    UniformBox { dim: usize, lo: f64, hi: f64 },
    /// `center + std · N(0, I)`.
    Gaussian { center: Vector, std: f64 },
}

impl SampleSpec {
    pub fn dim(&self) -> usize {
        match self {
            SampleSpec::UniformBox { dim, .. } => *dim,
            SampleSpec::Gaussian { center, .. } => center.len(),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Vec<f64> {
        match self {
            SampleSpec::UniformBox { dim, lo, hi } => (0..*dim).map(|_| rng.gen_range(*lo..=*hi)).collect(),
            SampleSpec::Gaussian { center, std } => center
                .iter()
                .map(|c| c + std * standard_normal(rng))
                .collect(),
        }
    }
}

/// Box–Muller standard normal draw.
pub fn standard_normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SharpnessReport {
    /// Smallest observed `(h(x) − h*) / dist(x, S)`.
    pub min_ratio: f64,
    /// Samples with ratio below the requested constant.
    pub violations: usize,
    pub evaluated: usize,
    /// Samples that landed in `S` and were skipped.
    pub skipped: usize,
}

/// Relative slack applied to sharpness ratios to absorb rounding.
pub const SHARPNESS_RELATIVE_SLACK: f64 = 1e-12;

/// Samples `n_samples` points and measures the sharpness ratio
/// `(h(x) − h*) / dist(x, S)` against the requested constant `mu`.
pub fn sharpness_probe(
    objective: impl Fn(&[f64]) -> f64,
    optimal_value: f64,
    distance: impl Fn(&[f64]) -> f64,
    sampler: &SampleSpec,
    n_samples: usize,
    mu: f64,
    seed: u64,
) -> Result<SharpnessReport> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("sharpness probe needs at least one sample".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SharpnessReport {
        min_ratio: f64::INFINITY,
        violations: 0,
        evaluated: 0,
        skipped: 0,
    };
    for _ in 0..n_samples {
        let x = sampler.sample(&mut rng);
        let d = distance(&x);
        if d == 0.0 {
            report.skipped += 1;
            continue;
        }
        let ratio = (objective(&x) - optimal_value) / d;
        report.evaluated += 1;
        report.min_ratio = report.min_ratio.min(ratio);
        if ratio < mu * (1.0 - SHARPNESS_RELATIVE_SLACK) {
            report.violations += 1;
        }
    }
    Ok(report)
}

/// Absolute slack of the criticality inequality.
pub const CRITICALITY_SLACK: f64 = 1e-12;

/// Default probe configuration for [`eps_criticality_check`].
pub const DEFAULT_CRITICALITY_PROBES: usize = 10_000;
pub const DEFAULT_CRITICALITY_RADIUS: f64 = 3.0;

/// Gaussian probes around `x0` with standard deviation `radius`.
pub fn gaussian_probes(x0: &[f64], radius: f64, n: usize, seed: u64) -> Vec<Vector> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| Vector::from_vec_unchecked(x0.iter().map(|c| c + radius * standard_normal(&mut rng)).collect()))
        .collect()
}

/// First probe `x` with `h(x) − h(x0) < −C‖x − x0‖² − ε`, if any.
pub fn criticality_witness<'a>(
    h: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    c: f64,
    eps: f64,
    probes: impl IntoIterator<Item = &'a Vector>,
) -> Option<Vector> {
    let h0 = h(x0);
    probes
        .into_iter()
        .find(|x| {
            let sq: f64 = x.iter().zip(x0).map(|(a, b)| (a - b) * (a - b)).sum();
            h(x) - h0 < -c * sq - eps - CRITICALITY_SLACK
        })
        .cloned()
}

/// Sampled necessary test for `0 ∈ ∂^ε_C h(x0)`. `false` comes with a
/// certified witness (see [`criticality_witness`]); `true` only means no probe
/// refuted criticality.
pub fn eps_criticality_check<'a>(
    h: impl Fn(&[f64]) -> f64,
    x0: &[f64],
    c: f64,
    eps: f64,
    probes: impl IntoIterator<Item = &'a Vector>,
) -> bool {
    criticality_witness(h, x0, c, eps, probes).is_none()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    /// `exp(slope)` of the least-squares line through `log d²ₜ`.
    pub factor: f64,
    pub r_squared: f64,
    /// Number of leading positive entries used.
    pub points: usize,
}

/// Fits `log(dₜ²) ≈ c + t·log(factor)` on the leading run of positive
/// distances.
pub fn rate_fit(distances: &[f64]) -> Result<RateFit> {
    let window: Vec<f64> = distances.iter().copied().take_while(|d| *d > 0.0 && d.is_finite()).collect();
    if window.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "rate fit needs at least 3 leading positive distances, got {}",
            window.len()
        )));
    }
    let n = window.len() as f64;
    let ys: Vec<f64> = window.iter().map(|d| (d * d).ln()).collect();
    let t_mean = (n - 1.0) / 2.0;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (t, y) in ys.iter().enumerate() {
        let dt = t as f64 - t_mean;
        let dy = y - y_mean;
        sxy += dt * dy;
        sxx += dt * dt;
        syy += dy * dy;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(RateFit {
        factor: slope.exp(),
        r_squared,
        points: window.len(),
    })
}

/// Recomputes contraction factors from logged distances, pairing each
/// `distances[t]` with the factor for that iterate (`None` at `t = 0`).
pub fn recompute_zetas(distances: &[f64], mu: f64, rho: f64, alpha: f64, e_minus: f64, mode: Mode) -> Vec<Option<f64>> {
    distances
        .iter()
        .enumerate()
        .map(|(t, d)| {
            if t == 0 {
                None
            } else {
                contraction_factor(*d, mu, rho, alpha, e_minus, mode)
            }
        })
        .collect()
}

/// `‖x‖` helper used by the sphere examples.
pub fn distance_to_unit_sphere(x: &[f64]) -> f64 {
    (norm(x) - 1.0).abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{BinaryPenalty, Penalty};

    #[test]
    fn exact_thresholds() {
        let t = compute_thresholds(1.0, 2.0, 0.2, 0.0).unwrap();
        assert_eq!((t.e_minus, t.e_plus, t.tau1, t.tau2), (0.0, 2.0 / 3.0, 0.0, 1.0));
        assert!(t.ordered());
    }

    #[test]
    fn inexact_thresholds_are_ordered() {
        let t = compute_thresholds(1.0, 2.0, 0.3, 0.01).unwrap();
        // E⁻ = (1 − √(1 − 0.06·1.3/0.3))/3
        let e_minus = (1.0 - (1.0f64 - 0.06 * 1.3 / 0.3).sqrt()) / 3.0;
        assert!((t.e_minus - e_minus).abs() < 1e-15);
        assert!(t.ordered(), "{t:?}");
    }

    #[test]
    fn boundary_accuracy_is_rejected() {
        let (mu, rho, alpha) = (1.0, 2.0, 0.25);
        let boundary = mu * mu * alpha / (2.0 * (rho + 1.0) * (alpha + 1.0));
        assert!(compute_thresholds(mu, rho, alpha, boundary * (1.0 - 1e-9)).is_ok());
        assert!(matches!(
            compute_thresholds(mu, rho, alpha, boundary * (1.0 + 1e-9)),
            Err(Error::ParameterConditions(_))
        ));
    }

    #[test]
    fn binary_distance_examples() {
        let (d, p) = dist_to_binary_set(&[0.0; 4], -1.0, 1.0);
        assert_eq!(d, 2.0);
        assert_eq!(p.as_slice(), &[1.0; 4]);
        assert_eq!(dist_to_binary_set(&[1.0, -1.0, 1.0], -1.0, 1.0).0, 0.0);
        let (d, p) = dist_to_binary_set(&[0.5, -0.5], -1.0, 1.0);
        assert_eq!(d, 0.5f64.sqrt());
        assert_eq!(p.as_slice(), &[1.0, -1.0]);
    }

    #[test]
    fn contraction_factor_examples() {
        assert_eq!(contraction_factor(0.5, 1.0, 2.0, 0.25, 0.0, Mode::Exact), Some(1.5));
        assert_eq!(contraction_factor(1.0, 1.0, 2.0, 0.25, 0.0, Mode::Exact), Some(1.0));
        assert_eq!(contraction_factor(0.0, 1.0, 2.0, 0.25, 0.0, Mode::Exact), None);
        let (mu, rho, alpha, eps) = (1.0, 2.0, 0.25, 0.02);
        let t = compute_thresholds(mu, rho, alpha, eps).unwrap();
        let z = contraction_factor(t.e_plus, mu, rho, alpha, t.e_minus, Mode::Inexact).unwrap();
        assert!((z - 1.0).abs() < 1e-14);
    }

    #[test]
    fn sharpness_probe_examples() {
        let f = BinaryPenalty::standard(3);
        let r = sharpness_probe(
            |x| f.value(x).unwrap(),
            0.0,
            |x| dist_to_binary_set(x, -1.0, 1.0).0,
            &SampleSpec::UniformBox { dim: 3, lo: -3.0, hi: 3.0 },
            10_000,
            1.0,
            1,
        )
        .unwrap();
        assert_eq!(r.violations, 0);
        assert!(r.min_ratio >= 1.0);

        let dist = |x: &[f64]| dist_to_binary_set(x, -1.0, 1.0).0;
        let r = sharpness_probe(dist, 0.0, dist, &SampleSpec::UniformBox { dim: 2, lo: -3.0, hi: 3.0 }, 1000, 1.0, 2)
            .unwrap();
        assert_eq!(r.min_ratio, 1.0);
        assert_eq!(r.violations, 0);

        let half_sq = |x: &[f64]| 0.5 * dist(x).powi(2);
        let near = SampleSpec::Gaussian {
            center: Vector::new(vec![1.0, -1.0]).unwrap(),
            std: 1e-3,
        };
        let r = sharpness_probe(half_sq, 0.0, dist, &near, 1000, 1.0, 3).unwrap();
        assert!(r.min_ratio < 1e-3);
        assert_eq!(r.violations, r.evaluated);
        assert!(sharpness_probe(dist, 0.0, dist, &near, 0, 1.0, 3).is_err());
    }

    #[test]
    fn criticality_examples() {
        let f = BinaryPenalty::standard(1);
        let h = |x: &[f64]| f.value(x).unwrap();
        let probes = gaussian_probes(&[0.0], 3.0, 10_000, 7);
        assert!(eps_criticality_check(h, &[0.0], 1.0, 0.0, &probes));
        assert!(eps_criticality_check(h, &[-1.0], 0.0, 0.0, &probes));
        let one = [Vector::new(vec![1.0]).unwrap()];
        assert!(!eps_criticality_check(h, &[0.5], 1.0, 0.0, &one));
        assert_eq!(criticality_witness(h, &[0.5], 1.0, 0.0, &one).unwrap().as_slice(), &[1.0]);
    }

    #[test]
    fn rate_fit_examples() {
        let geo: Vec<f64> = (0..20).map(|t| 0.5f64.powi(t)).collect();
        let fit = rate_fit(&geo).unwrap();
        assert!((fit.factor - 0.25).abs() < 1e-9);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
        let fit = rate_fit(&[0.3; 5]).unwrap();
        assert!((fit.factor - 1.0).abs() < 1e-15);
        let fit = rate_fit(&[1.0, 0.5, 0.25, 0.0, 7.0]).unwrap();
        assert_eq!(fit.points, 3);
        assert!(rate_fit(&[1.0, 0.5, 0.0]).is_err());
    }

    #[test]
    fn contraction_violation_detection() {
        let d = [0.8, 0.4, 0.1];
        let z = [None, Some(2.0), Some(2.0)];
        assert!(contraction_violations(&d, &z, 0.0, 1e-12).is_empty());
        let z_bad = [None, Some(10.0), Some(2.0)];
        assert_eq!(contraction_violations(&d, &z_bad, 0.0, 1e-12), vec![0]);
    }
}
