//! Binary tomography: parallel-beam projectors, phantoms, noisy sinograms,
//! least-squares baselines and the continuously relaxed binary
//! reconstruction (CRBT)
//!
//! ```text
//! minimize  Σ |xⱼ² − 1| + ½ dist²(A x, B̄(y, θ))
//! ```

mod image;
mod lsqr;
mod projector;

use std::io::{BufRead, Write};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub use image::{make_phantom, misclassification_rate, read_pgm, threshold_to_binary, write_pgm, BinaryImage, PhantomKind};
pub use lsqr::{lsqr_solve, DEFAULT_LSQR_ITERATIONS};
pub use projector::{build_projector, trace_ray, Ray, ScanGeometry};

use crate::diagnostics::standard_normal;
use crate::error::{check_dim, Error, Result};
use crate::functions::{BallDistanceTerm, BinaryPenalty, CompositeProblem, FiniteSet, DEFAULT_NORM_ITERATIONS};
use crate::linalg::{CsrMatrix, Vector};
use crate::solver::{fmt_float, run_fb, SolverConfig, Trajectory};

/// Ball radius used when noise-free data would otherwise give `θ = 0`.
pub const MIN_THETA: f64 = 1e-8;

/// Header of the sinogram CSV.
pub const SINOGRAM_HEADER: [&str; 4] = ["angle_index", "angle_deg", "detector", "value"];

/// Measured projections `y = A x̄ + ω`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sinogram {
    pub values: Vector,
    pub sigma: f64,
    pub seed: u64,
}

/// `y = A x + ω` with `ω` i.i.d. `N(0, σ²)` drawn from a seeded ChaCha8
/// stream through Box–Muller.
pub fn simulate_sinogram(a: &CsrMatrix, x: &BinaryImage, sigma: f64, seed: u64) -> Result<Sinogram> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::InvalidParameter(format!("noise level must be >= 0, got {sigma}")));
    }
    let mut values = a.matvec(&x.to_vector())?;
    if sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        values = values.map(|v| v + sigma * standard_normal(&mut rng));
    }
    Ok(Sinogram { values, sigma, seed })
}

/// `max(10 (n_detectors · σ)², MIN_THETA)`
pub fn default_theta(n_detectors: usize, sigma: f64) -> f64 {
    (10.0 * (n_detectors as f64 * sigma).powi(2)).max(MIN_THETA)
}

pub fn write_sinogram_csv<W: Write>(out: W, values: &[f64], geometry: &ScanGeometry) -> Result<()> {
    check_dim("sinogram", geometry.n_rays(), values.len())?;
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SINOGRAM_HEADER)?;
    for (a, angle) in geometry.angles().iter().enumerate() {
        for k in 0..geometry.n_detectors() {
            let v = values[a * geometry.n_detectors() + k];
            w.write_record([a.to_string(), fmt_float(*angle), k.to_string(), fmt_float(v)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a sinogram CSV back into its values and geometry. Rows may come in
/// any order but must cover every `(angle_index, detector)` pair once.
pub fn read_sinogram_csv<R: BufRead>(input: R) -> Result<(Vector, ScanGeometry)> {
    let mut reader = csv::Reader::from_reader(input);
    let header = reader.headers()?.clone();
    if header.iter().ne(SINOGRAM_HEADER.iter().copied()) {
        return Err(Error::Parse(format!(
            "unexpected sinogram header {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let r = record?;
        let field = |i: usize| r[i].trim().to_string();
        let bad = |i: usize| Error::Parse(format!("sinogram field {}: {:?}", SINOGRAM_HEADER[i], &r[i]));
        let a: usize = field(0).parse().map_err(|_| bad(0))?;
        let angle: f64 = field(1).parse().map_err(|_| bad(1))?;
        let k: usize = field(2).parse().map_err(|_| bad(2))?;
        let v: f64 = field(3).parse().map_err(|_| bad(3))?;
        rows.push((a, angle, k, v));
    }
    let n_angles = rows.iter().map(|r| r.0 + 1).max().unwrap_or(0);
    let n_det = rows.iter().map(|r| r.2 + 1).max().unwrap_or(0);
    if rows.is_empty() || rows.len() != n_angles * n_det {
        return Err(Error::Parse(format!(
            "sinogram has {} rows, expected a full {n_angles}x{n_det} table",
            rows.len()
        )));
    }
    let mut values = vec![f64::NAN; rows.len()];
    let mut angles = vec![f64::NAN; n_angles];
    for (a, angle, k, v) in rows {
        let slot = &mut values[a * n_det + k];
        if !slot.is_nan() {
            return Err(Error::Parse(format!("duplicate sinogram entry ({a}, {k})")));
        }
        *slot = v;
        if !angles[a].is_nan() && angles[a] != angle {
            return Err(Error::Parse(format!("angle index {a} has conflicting angles")));
        }
        angles[a] = angle;
    }
    Ok((Vector::new(values)?, ScanGeometry::new(angles, n_det)?))
}

/// Settings of a CRBT run. Unset fields take their defaults: `θ` from
/// [`default_theta`], `L_g = ‖A‖²` by power iteration and
/// `α = 0.9 · min(1/L_g, 1/2)`.
#[derive(Clone, Debug)]
pub struct CrbtOptions {
    pub theta: Option<f64>,
    pub alpha: Option<f64>,
    pub lipschitz: Option<f64>,
    pub max_iterations: usize,
    pub step_tolerance: f64,
    /// Starting point, zero when unset.
    pub x0: Option<Vector>,
    /// Reference image whose distance is logged along the run.
    pub reference: Option<Vector>,
    /// Sharpness constant used for logging contraction factors.
    pub sharpness: Option<f64>,
}

impl Default for CrbtOptions {
    fn default() -> Self {
        Self {
            theta: None,
            alpha: None,
            lipschitz: None,
            max_iterations: 2000,
            step_tolerance: 1e-10,
            x0: None,
            reference: None,
            sharpness: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CrbtRun {
    pub image: BinaryImage,
    /// Final continuous iterate before thresholding.
    pub solution: Vector,
    pub trajectory: Trajectory,
    pub theta: f64,
    pub alpha: f64,
    pub lipschitz: f64,
}

/// Builds `f = Σ|xⱼ² − 1|`, `g = ½ dist²(A x, B̄(y, θ))` with `ρ = 2`.
pub fn crbt_problem(a: &CsrMatrix, y: &Vector, theta: f64, lipschitz: Option<f64>) -> Result<CompositeProblem> {
    let g = match lipschitz {
        Some(l) => BallDistanceTerm::with_lipschitz(a.clone(), y.clone(), theta, l)?,
        None => BallDistanceTerm::new(a.clone(), y.clone(), theta)?,
    };
    let lg = g.lipschitz();
    let f = BinaryPenalty::standard(a.n_cols());
    let rho = f.weak_convexity();
    CompositeProblem::new(Box::new(f), Box::new(g), rho, lg)
}

/// Exact forward-backward reconstruction followed by sign thresholding.
pub fn reconstruct_crbt(
    a: &CsrMatrix,
    sinogram: &Sinogram,
    geometry: &ScanGeometry,
    width: usize,
    height: usize,
    options: &CrbtOptions,
) -> Result<CrbtRun> {
    check_dim("reconstruction grid", a.n_cols(), width * height)?;
    check_dim("reconstruction rays", a.n_rows(), geometry.n_rays())?;
    let theta = options
        .theta
        .unwrap_or_else(|| default_theta(geometry.n_detectors(), sinogram.sigma));
    let mut problem = crbt_problem(a, &sinogram.values, theta, options.lipschitz)?;
    if let Some(r) = &options.reference {
        check_dim("reference image", a.n_cols(), r.len())?;
        problem = problem.with_solution_set(FiniteSet(vec![r.clone()]));
    }
    if let Some(mu) = options.sharpness {
        problem = problem.with_sharpness(mu)?;
    }
    let lipschitz = problem.lipschitz;
    let bound = (1.0 / lipschitz).min(0.5);
    let alpha = options.alpha.unwrap_or(0.9 * bound);
    if !(alpha > 0.0 && alpha < bound) {
        return Err(Error::ParameterConditions(vec![format!(
            "alpha = {alpha} must lie in (0, min(1/L_g, 1/2)) = (0, {bound}) with L_g = {lipschitz}"
        )]));
    }
    let config = SolverConfig::exact(alpha)
        .with_max_iterations(options.max_iterations)
        .with_step_tolerance(options.step_tolerance);
    let x0 = options.x0.clone().unwrap_or_else(|| Vector::zeros(a.n_cols()));
    let trajectory = run_fb(&problem, &config, &x0)?;
    let solution = trajectory.final_point.clone();
    let image = threshold_to_binary(&solution, width, height)?;
    Ok(CrbtRun {
        image,
        solution,
        trajectory,
        theta,
        alpha,
        lipschitz,
    })
}

/// `‖A‖²` estimate with the same settings as [`BallDistanceTerm::new`].
pub fn projector_lipschitz(a: &CsrMatrix) -> f64 {
    a.operator_norm_estimate(DEFAULT_NORM_ITERATIONS, 0).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::RunStatus;

    #[test]
    fn noiseless_sinogram_is_exact() {
        let img = make_phantom(PhantomKind::Disk, 8, 8, 0).unwrap();
        let a = build_projector(8, 8, &ScanGeometry::uniform(4, 12).unwrap()).unwrap();
        let s = simulate_sinogram(&a, &img, 0.0, 1).unwrap();
        assert_eq!(s.values, a.matvec(&img.to_vector()).unwrap());
        let n1 = simulate_sinogram(&a, &img, 0.1, 5).unwrap();
        assert_eq!(n1, simulate_sinogram(&a, &img, 0.1, 5).unwrap());
        assert_ne!(n1, simulate_sinogram(&a, &img, 0.1, 6).unwrap());
    }

    #[test]
    fn default_theta_rule() {
        assert!((default_theta(64, 0.01) - 10.0 * 0.64f64.powi(2)).abs() < 1e-12);
        assert_eq!(default_theta(64, 0.0), MIN_THETA);
    }

    #[test]
    fn sinogram_csv_roundtrip() {
        let g = ScanGeometry::new(vec![0.0, 50.0, 100.0], 2).unwrap();
        let vals = [1.0, 2.5, -0.125, 1.0 / 3.0, 7.0, 0.0];
        let mut buf = Vec::new();
        write_sinogram_csv(&mut buf, &vals, &g).unwrap();
        assert!(buf.starts_with(b"angle_index,angle_deg,detector,value\n"));
        let (v, g2) = read_sinogram_csv(buf.as_slice()).unwrap();
        assert_eq!(v.as_slice(), &vals);
        assert_eq!(g2, g);
        assert!(write_sinogram_csv(Vec::new(), &vals[..5], &g).is_err());
    }

    #[test]
    fn ground_truth_is_a_fixed_point() {
        let truth = make_phantom(PhantomKind::Disk, 8, 8, 0).unwrap();
        let g = ScanGeometry::uniform(4, 12).unwrap();
        let a = build_projector(8, 8, &g).unwrap();
        let s = simulate_sinogram(&a, &truth, 0.0, 0).unwrap();
        let opts = CrbtOptions {
            theta: Some(1.0),
            x0: Some(truth.to_vector()),
            ..CrbtOptions::default()
        };
        let run = reconstruct_crbt(&a, &s, &g, 8, 8, &opts).unwrap();
        assert_eq!(run.trajectory.iterations(), 1);
        assert_eq!(run.trajectory.status, RunStatus::StepTolerance);
        assert_eq!(run.image, truth);
        let p = crbt_problem(&a, &s.values, 1.0, None).unwrap();
        assert_eq!(p.objective(&truth.to_vector()).unwrap(), 0.0);
        assert!(p.g.gradient(&truth.to_vector()).unwrap().iter().all(|v| *v == 0.0));
    }

    #[test]
    fn oversized_step_is_rejected() {
        let truth = make_phantom(PhantomKind::Disk, 8, 8, 0).unwrap();
        let g = ScanGeometry::uniform(4, 12).unwrap();
        let a = build_projector(8, 8, &g).unwrap();
        let s = simulate_sinogram(&a, &truth, 0.0, 0).unwrap();
        let opts = CrbtOptions {
            alpha: Some(0.5),
            ..CrbtOptions::default()
        };
        assert!(matches!(
            reconstruct_crbt(&a, &s, &g, 8, 8, &opts),
            Err(Error::ParameterConditions(_))
        ));
    }
}
