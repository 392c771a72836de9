// Tube radii, contraction factors, sharpness and criticality probes, and a
// geometric rate fit on an inexact run.

use std::error::Error;

use wcfb::diagnostics::{
    compute_thresholds, contraction_violations, dist_to_binary_set, eps_criticality_check, gaussian_probes,
    rate_fit, sharpness_probe, SampleSpec,
};
use wcfb::functions::{BinarySet, SquaredDistance};
use wcfb::linalg::Vector;
use wcfb::{run_fb, BinaryPenalty, CompositeProblem, Penalty, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (mu, rho, alpha, eps) = (1.0, 2.0, 0.25, 0.02);
    let exact = compute_thresholds(mu, rho, alpha, 0.0)?;
    let th = compute_thresholds(mu, rho, alpha, eps)?;
    println!("eps = 0    : E- {:.4} E+ {:.4} tau1 {:.4} tau2 {:.4}", exact.e_minus, exact.e_plus, exact.tau1, exact.tau2);
    println!("eps = {eps} : E- {:.4} E+ {:.4} tau1 {:.4} tau2 {:.4}", th.e_minus, th.e_plus, th.tau1, th.tau2);

    let f = BinaryPenalty::standard(2);
    let report = sharpness_probe(
        |x| f.value(x).unwrap_or(f64::NAN),
        0.0,
        |x| dist_to_binary_set(x, -1.0, 1.0).0,
        &SampleSpec::UniformBox { dim: 2, lo: -3.0, hi: 3.0 },
        20_000,
        mu,
        1,
    )?;
    println!("sharpness: min ratio {:.4}, {} violations", report.min_ratio, report.violations);

    let f1 = BinaryPenalty::standard(1);
    let probes = gaussian_probes(&[0.0], 3.0, 10_000, 2);
    let critical = eps_criticality_check(|x| f1.value(x).unwrap_or(f64::NAN), &[0.0], rho / 2.0, 0.0, &probes);
    println!("midpoint 0 is (rho/2)-critical: {critical}");

    let problem = CompositeProblem::new(
        Box::new(BinaryPenalty::standard(2)),
        Box::new(SquaredDistance::new(Vector::new(vec![1.0, -1.0])?)),
        rho,
        1.0,
    )?
    .with_sharpness(mu)?
    .with_solution_set(BinarySet { a: -1.0, b: 1.0 });
    let traj = run_fb(&problem, &SolverConfig::inexact(alpha, eps).with_max_iterations(200), &[0.3, -0.2])?;
    let d = traj.distances();
    println!("final dist {:.3e} <= E- {:.3e}", d[d.len() - 1], th.e_minus);
    println!("contraction violations: {:?}", contraction_violations(&d, &traj.zetas(), th.e_minus, 1e-9));

    let geometric: Vec<f64> = (0..12).map(|t| 0.8 * 0.7f64.powi(t)).collect();
    let fit = rate_fit(&geometric)?;
    println!("rate fit on 0.8 * 0.7^t: factor {:.4} (r^2 {:.6})", fit.factor, fit.r_squared);
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
