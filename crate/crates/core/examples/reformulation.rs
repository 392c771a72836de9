// Moving the curvature of a nonconvex smooth term into the weakly convex
// part, then running forward-backward on the result.

use std::error::Error;

use wcfb::functions::{reformulate_problem, BinarySet};
use wcfb::linalg::Vector;
use wcfb::{run_fb, BinaryPenalty, Result as WcfbResult, SmoothTerm, SolverConfig};

/// `G(x) = ½ Σ sin²(xᵢ − 1)`: smooth, nonconvex, gradient 1-Lipschitz.
struct Wavy(usize);

impl SmoothTerm for Wavy {
    fn dim(&self) -> usize {
        self.0
    }

    fn value(&self, x: &[f64]) -> WcfbResult<f64> {
        Ok(x.iter().map(|t| 0.5 * (t - 1.0).sin().powi(2)).sum())
    }

    fn gradient(&self, x: &[f64]) -> WcfbResult<Vector> {
        Vector::new(x.iter().map(|t| 0.5 * (2.0 * (t - 1.0)).sin()).collect())
    }
}

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let problem = reformulate_problem(2.0, 1.0, Box::new(BinaryPenalty::standard(2)), Box::new(Wavy(2)))?
        .with_solution_set(BinarySet { a: -1.0, b: 1.0 });
    println!("rho_f = {}, L_g = {}", problem.rho, problem.lipschitz);
    let alpha = 0.9 * (1.0 / problem.lipschitz).min(1.0 / problem.rho);
    let traj = run_fb(&problem, &SolverConfig::exact(alpha), &[0.4, 0.9])?;
    println!(
        "alpha {alpha:.3}: {} iterations, final {:?}, objective {:.6}",
        traj.iterations(),
        traj.final_point.as_slice(),
        traj.last().objective
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
