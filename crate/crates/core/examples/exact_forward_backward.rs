// Exact forward-backward on a small sharp problem: four binary unknowns
// pulled towards a target by `½ dist²(x, B̄(x*, θ))`.

use std::error::Error;

use wcfb::functions::{BinarySet, FiniteSet};
use wcfb::linalg::{CsrMatrix, Vector};
use wcfb::{run_fb, validate_parameters, BallDistanceTerm, BinaryPenalty, CompositeProblem, SolverConfig};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let target = Vector::new(vec![1.0, -1.0, 1.0, 1.0])?;
    let g = BallDistanceTerm::with_lipschitz(CsrMatrix::identity(4), target.clone(), 1e-6, 1.0)?;
    let problem = CompositeProblem::new(Box::new(BinaryPenalty::standard(4)), Box::new(g), 2.0, 1.0)?
        .with_sharpness(1.0)?
        .with_solution_set(FiniteSet(vec![target.clone()]));

    let report = validate_parameters(2.0, 1.0, 1.0, 0.25, 0.0)?;
    println!("alpha < {} required, 0.25 valid: {}", report.alpha_upper, report.valid);

    let x0 = [0.2, -1.0, 1.0, 1.0];
    let traj = run_fb(&problem, &SolverConfig::exact(0.25), &x0)?;
    for r in &traj.records {
        println!(
            "t={} objective={:.6e} dist={:.3e} zeta={}",
            r.t,
            r.objective,
            r.dist_to_s.unwrap_or(f64::NAN),
            r.zeta.map_or("-".into(), |z| format!("{z:.4}"))
        );
    }
    println!("final point {:?} ({:?})", traj.final_point.as_slice(), traj.status);

    // Same start, but measured against the whole binary lattice.
    let g = BallDistanceTerm::with_lipschitz(CsrMatrix::identity(4), target, 1e-6, 1.0)?;
    let lattice = CompositeProblem::new(Box::new(BinaryPenalty::standard(4)), Box::new(g), 2.0, 1.0)?
        .with_solution_set(BinarySet { a: -1.0, b: 1.0 });
    let traj = run_fb(&lattice, &SolverConfig::exact(0.25), &x0)?;
    println!("distances to {{-1, 1}}^4: {:?}", traj.distances());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
