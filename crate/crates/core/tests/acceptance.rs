//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use wcfb::diagnostics::{
    compute_thresholds, contraction_violations, dist_to_binary_set, distance_to_unit_sphere, sharpness_probe,
    SampleSpec,
};
use wcfb::functions::{binary_prox_scalar, FiniteSet};
use wcfb::inexact_prox::{certify_eps_solution, eps_prox, SurrogateSpec};
use wcfb::linalg::{CsrMatrix, Vector};
use wcfb::tomography::{
    build_projector, crbt_problem, default_theta, lsqr_solve, make_phantom, misclassification_rate,
    reconstruct_crbt, simulate_sinogram, threshold_to_binary, CrbtOptions, PhantomKind, ScanGeometry,
    DEFAULT_LSQR_ITERATIONS,
};
use wcfb::{
    run_fb, validate_parameters, BallDistanceTerm, BinaryPenalty, CompositeProblem, Penalty, SmoothTerm,
    SolverConfig, SpherePenalty,
};

const PROX_SAMPLES: usize = 1_000;
const PROX_GRID_STEP: f64 = 1e-5;
const PROX_OBJECTIVE_TOL: f64 = 1e-9;
const PROX_ARGUMENT_TOL: f64 = 1e-4;
const PROX_TIME_LIMIT_S: f64 = 5.0;

const DESCENT_ITERATIONS: usize = 500;
const DESCENT_TOL: f64 = 1e-12;

const DESK_ALPHA: f64 = 0.25;
const DESK_THETA: f64 = 1e-6;
const DESK_START_DIST: f64 = 0.8;
const RATE_SLACK: f64 = 1e-9;
const RATE_TARGET: f64 = 1e-8;
const RATE_MAX_ITERATIONS: usize = 200;

const INEXACT_EPS: f64 = 0.02;
const INEXACT_ITERATIONS: usize = 500;
const INEXACT_DIST_SLACK: f64 = 1e-6;
const CONTRACTION_SLACK: f64 = 1e-9;

const THRESHOLD_TUPLES: usize = 1_000;
const CERTIFICATE_SWEEPS: usize = 1_000;

const GRADIENT_POINTS: usize = 100;
const GRADIENT_STEP: f64 = 1e-5;
const GRADIENT_REL_TOL: f64 = 1e-6;

const SHARPNESS_SAMPLES: usize = 100_000;

const RECON_SIZE: usize = 16;
const RECON_ANGLES: usize = 8;
const RECON_DETECTORS: usize = 24;
const RECON_SIGMA: f64 = 0.01;
const RECON_SEEDS: u64 = 5;
const RECON_TIME_LIMIT_S: f64 = 30.0;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// x* = (1, −1, 1, 1); x₀ moves the first coordinate by 0.8 towards 0.
fn desk_problem() -> (CompositeProblem, Vector, Vec<f64>) {
    let target = Vector::new(vec![1.0, -1.0, 1.0, 1.0]).unwrap();
    let g = BallDistanceTerm::with_lipschitz(CsrMatrix::identity(4), target.clone(), DESK_THETA, 1.0).unwrap();
    let problem = CompositeProblem::new(Box::new(BinaryPenalty::standard(4)), Box::new(g), 2.0, 1.0)
        .unwrap()
        .with_sharpness(1.0)
        .unwrap()
        .with_solution_set(FiniteSet(vec![target.clone()]));
    let mut x0 = target.clone().into_inner();
    x0[0] -= DESK_START_DIST;
    (problem, target, x0)
}

fn c1_prox_oracle() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst_obj, mut worst_arg) = (f64::NEG_INFINITY, 0.0f64);
    for _ in 0..PROX_SAMPLES {
        let y: f64 = rng.gen_range(-4.0..=4.0);
        let alpha: f64 = rng.gen_range(0.01..0.49);
        let h = |x: f64| (x * x - 1.0).abs() + (x - y) * (x - y) / (2.0 * alpha);
        // any minimiser satisfies (x − y)² ≤ 2α h(y)
        let radius = (2.0 * alpha * h(y)).sqrt() + PROX_GRID_STEP;
        let (lo, hi) = (y - radius, y + radius);
        let steps = ((hi - lo) / PROX_GRID_STEP).ceil() as usize;
        let (mut best_x, mut best_h) = (lo, h(lo));
        for k in 1..=steps {
            let x = lo + k as f64 * PROX_GRID_STEP;
            let v = h(x);
            if v < best_h {
                best_h = v;
                best_x = x;
            }
        }
        let p = binary_prox_scalar(y, alpha);
        worst_obj = worst_obj.max(h(p) - best_h);
        worst_arg = worst_arg.max((p - best_x).abs());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst_obj <= PROX_OBJECTIVE_TOL && worst_arg <= PROX_ARGUMENT_TOL && secs < PROX_TIME_LIMIT_S,
        format!(
            "{PROX_SAMPLES} samples: max objective excess {worst_obj:.2e} (tol {PROX_OBJECTIVE_TOL:e}), \
             max argument gap {worst_arg:.2e} (tol {PROX_ARGUMENT_TOL:e}), {secs:.2} s (limit {PROX_TIME_LIMIT_S} s)"
        ),
    )
}

fn c2_strict_descent() -> Outcome {
    let truth = make_phantom(PhantomKind::Disk, RECON_SIZE, RECON_SIZE, 0).unwrap();
    let geometry = ScanGeometry::uniform(RECON_ANGLES, RECON_DETECTORS).unwrap();
    let a = build_projector(RECON_SIZE, RECON_SIZE, &geometry).unwrap();
    let sino = simulate_sinogram(&a, &truth, RECON_SIGMA, 1).unwrap();
    let theta = default_theta(geometry.n_detectors(), RECON_SIGMA);
    let problem = crbt_problem(&a, &sino.values, theta, None).unwrap();
    let alpha = 0.9 * (1.0 / problem.lipschitz).min(0.5);
    let config = SolverConfig::exact(alpha)
        .with_max_iterations(DESCENT_ITERATIONS)
        .with_step_tolerance(-1.0);
    let traj = run_fb(&problem, &config, &vec![0.0; a.n_cols()]).unwrap();
    let obj = traj.objectives();
    let worst = obj.windows(2).map(|w| w[0] - w[1]).fold(f64::INFINITY, f64::min);
    outcome(
        traj.iterations() >= DESCENT_ITERATIONS && worst >= -DESCENT_TOL && traj.descent_violations.is_empty(),
        format!(
            "{} iterations, L_g {:.4}, alpha {alpha:.4e}, min decrease {worst:.3e} (tol -{DESCENT_TOL:e}), \
             objective {:.4e} -> {:.4e}",
            traj.iterations(),
            problem.lipschitz,
            obj[0],
            obj[obj.len() - 1]
        ),
    )
}

fn c3_exact_rate() -> Outcome {
    let (problem, _, x0) = desk_problem();
    let (mu, rho) = (1.0, 2.0);
    let xi = 1.0 + DESK_ALPHA * (2.0 * mu / DESK_START_DIST - rho);
    let config = SolverConfig::exact(DESK_ALPHA)
        .with_max_iterations(RATE_MAX_ITERATIONS)
        .with_distance_tolerance(RATE_TARGET);
    let traj = run_fb(&problem, &config, &x0).unwrap();
    let d = traj.distances();
    let worst_ratio = d
        .windows(2)
        .filter(|w| w[0] > 0.0)
        .map(|w| (w[1] * w[1]) / (w[0] * w[0]))
        .fold(0.0f64, f64::max);
    let bound_ok = d
        .windows(2)
        .all(|w| w[1] * w[1] <= w[0] * w[0] / xi + RATE_SLACK);
    let reached = d.last().is_some_and(|&v| v < RATE_TARGET);
    outcome(
        (xi - 1.125).abs() < 1e-15 && (d[0] - DESK_START_DIST).abs() < 1e-15 && bound_ok && reached,
        format!(
            "xi {xi}, dist {d:?}, worst dist^2 ratio {worst_ratio:.4} <= 1/xi {:.4}, \
             below {RATE_TARGET:e} after {} iterations (limit {RATE_MAX_ITERATIONS})",
            1.0 / xi,
            traj.iterations()
        ),
    )
}

fn c4_inexact_threshold() -> Outcome {
    let (problem, _, x0) = desk_problem();
    let report = validate_parameters(2.0, 1.0, 1.0, DESK_ALPHA, INEXACT_EPS).unwrap();
    let th = compute_thresholds(1.0, 2.0, DESK_ALPHA, INEXACT_EPS).unwrap();
    let config = SolverConfig::inexact(DESK_ALPHA, INEXACT_EPS)
        .with_max_iterations(INEXACT_ITERATIONS)
        .with_step_tolerance(-1.0);
    let traj = run_fb(&problem, &config, &x0).unwrap();
    let d = traj.distances();
    let last = d[d.len() - 1];
    let violations = contraction_violations(&d, &traj.zetas(), th.e_minus, CONTRACTION_SLACK);
    let checked = d.iter().take(d.len() - 1).filter(|&&v| v > th.e_minus).count();
    outcome(
        report.valid
            && traj.iterations() == INEXACT_ITERATIONS
            && last <= th.e_minus + INEXACT_DIST_SLACK
            && violations.is_empty()
            && traj.certificate_failures() == 0,
        format!(
            "eps {INEXACT_EPS} (bound {:.5}), alpha {DESK_ALPHA} in [{:.4}, {:.4}), E- {:.6}: \
             dist after {} iterations {last:.3e}; contraction inequality checked at {checked} steps, \
             {} violations; {} certificate failures",
            report.eps_bound,
            report.alpha_lower,
            report.alpha_upper,
            th.e_minus,
            traj.iterations(),
            violations.len(),
            traj.certificate_failures()
        ),
    )
}

fn c5_thresholds() -> Outcome {
    let exact = [0.1, 0.2, 0.3]
        .iter()
        .all(|&alpha| {
            let t = compute_thresholds(1.0, 2.0, alpha, 0.0).unwrap();
            (t.e_minus, t.e_plus, t.tau1, t.tau2) == (0.0, 2.0 / 3.0, 0.0, 1.0)
        });
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut tested, mut bad) = (0, 0);
    while tested < THRESHOLD_TUPLES {
        let mu: f64 = rng.gen_range(0.1..5.0);
        let rho: f64 = rng.gen_range(0.1..5.0);
        let lg: f64 = rng.gen_range(0.0..5.0);
        let eps = rng.gen_range(0.0..1.0) * validate_parameters(rho, lg, mu, 0.1, 0.0).unwrap().eps_bound;
        let r = validate_parameters(rho, lg, mu, 0.1, eps).unwrap();
        if !(r.alpha_lower < r.alpha_upper) {
            continue;
        }
        let alpha = rng.gen_range(r.alpha_lower..r.alpha_upper);
        if !validate_parameters(rho, lg, mu, alpha, eps).unwrap().valid {
            continue;
        }
        tested += 1;
        match compute_thresholds(mu, rho, alpha, eps) {
            Ok(t) if t.ordered() => {}
            _ => bad += 1,
        }
    }
    outcome(
        exact && bad == 0,
        format!("(mu, rho, eps) = (1, 2, 0) gives (0, 2/3, 0, 1): {exact}; ordering failures {bad}/{tested}"),
    )
}

fn c6_certificates() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut failures, mut worst_slack) = (0, f64::INFINITY);
    for _ in 0..CERTIFICATE_SWEEPS {
        let n = rng.gen_range(1..=8);
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(-4.0..4.0)).collect();
        let alpha = rng.gen_range(0.01..0.49);
        let eps = 10f64.powf(rng.gen_range(-6.0..-0.3));
        let spec = SurrogateSpec::uniform(n, -1.0, 1.0, eps).unwrap();
        let (x, _) = eps_prox(&spec, &y, alpha).unwrap();
        let closed = Vector::new(y.iter().map(|&t| binary_prox_scalar(t, alpha)).collect()).unwrap();
        let h = |z: &[f64]| {
            z.iter()
                .zip(&y)
                .map(|(zi, yi)| (zi * zi - 1.0).abs() + (zi - yi) * (zi - yi) / (2.0 * alpha))
                .sum::<f64>()
        };
        let cert = certify_eps_solution(h, &x, &closed, spec.budget()).unwrap();
        if !cert.satisfied {
            failures += 1;
        }
        worst_slack = worst_slack.min(cert.budget - cert.gap());
    }
    outcome(
        failures == 0,
        format!("{CERTIFICATE_SWEEPS} sweeps, {failures} failures, smallest budget margin {worst_slack:.3e}"),
    )
}

fn c7_gradient() -> Outcome {
    let truth = make_phantom(PhantomKind::Disk, 8, 8, 0).unwrap();
    let geometry = ScanGeometry::uniform(4, 12).unwrap();
    let a = build_projector(8, 8, &geometry).unwrap();
    let sino = simulate_sinogram(&a, &truth, 0.01, 3).unwrap();
    let g = BallDistanceTerm::new(a, sino.values, default_theta(12, 0.01)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst = 0.0f64;
    for _ in 0..GRADIENT_POINTS {
        let x: Vec<f64> = (0..64).map(|_| rng.gen_range(-1.5..1.5)).collect();
        let grad = g.gradient(&x).unwrap();
        let mut fd = vec![0.0; 64];
        let mut xp = x.clone();
        for j in 0..64 {
            xp[j] = x[j] + GRADIENT_STEP;
            let up = g.value(&xp).unwrap();
            xp[j] = x[j] - GRADIENT_STEP;
            let down = g.value(&xp).unwrap();
            xp[j] = x[j];
            fd[j] = (up - down) / (2.0 * GRADIENT_STEP);
        }
        let err = grad.distance(&fd) / grad.norm().max(f64::MIN_POSITIVE);
        worst = worst.max(err);
    }
    outcome(
        worst <= GRADIENT_REL_TOL,
        format!("{GRADIENT_POINTS} points on 8x8: max relative error {worst:.3e} (tol {GRADIENT_REL_TOL:e})"),
    )
}

fn c8_sharpness() -> Outcome {
    let box_for = |n| SampleSpec::UniformBox { dim: n, lo: -3.0, hi: 3.0 };
    let mut lines = Vec::new();
    let mut pass = true;
    for n in [1usize, 2, 8] {
        let f = BinaryPenalty::standard(n);
        let rb = sharpness_probe(
            |x| f.value(x).unwrap(),
            0.0,
            |x| dist_to_binary_set(x, -1.0, 1.0).0,
            &box_for(n),
            SHARPNESS_SAMPLES,
            1.0,
            80 + n as u64,
        )
        .unwrap();
        let s = SpherePenalty::new(n).unwrap();
        let rs = sharpness_probe(
            |x| s.value(x).unwrap(),
            0.0,
            distance_to_unit_sphere,
            &box_for(n),
            SHARPNESS_SAMPLES,
            1.0,
            90 + n as u64,
        )
        .unwrap();
        pass &= rb.violations == 0 && rs.violations == 0;
        lines.push(format!(
            "n={n}: binary {} violations (min ratio {:.4}), sphere {} violations (min ratio {:.4})",
            rb.violations, rb.min_ratio, rs.violations, rs.min_ratio
        ));
    }
    outcome(pass, format!("{SHARPNESS_SAMPLES} samples each; {}", lines.join("; ")))
}

fn c9_reconstruction() -> Outcome {
    let start = Instant::now();
    let n = RECON_SIZE;
    let truth = make_phantom(PhantomKind::Disk, n, n, 0).unwrap();
    let geometry = ScanGeometry::uniform(RECON_ANGLES, RECON_DETECTORS).unwrap();
    let a = build_projector(n, n, &geometry).unwrap();
    let clean = simulate_sinogram(&a, &truth, 0.0, 0).unwrap();
    let run = reconstruct_crbt(&a, &clean, &geometry, n, n, &CrbtOptions::default()).unwrap();
    let noiseless = misclassification_rate(&run.image, &truth).unwrap();
    let mut pairs = Vec::new();
    for seed in 1..=RECON_SEEDS {
        let sino = simulate_sinogram(&a, &truth, RECON_SIGMA, seed).unwrap();
        let crbt = reconstruct_crbt(&a, &sino, &geometry, n, n, &CrbtOptions::default()).unwrap();
        let lsqr = lsqr_solve(&a, &sino.values, DEFAULT_LSQR_ITERATIONS).unwrap();
        let tlsqr = threshold_to_binary(&lsqr, n, n).unwrap();
        pairs.push((
            misclassification_rate(&crbt.image, &truth).unwrap(),
            misclassification_rate(&tlsqr, &truth).unwrap(),
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    let noisy_ok = pairs.iter().all(|(c, t)| c <= t);
    outcome(
        noiseless == 0.0 && noisy_ok && secs < RECON_TIME_LIMIT_S,
        format!(
            "noiseless crbt misclassification {noiseless} ({} iterations); sigma {RECON_SIGMA} (crbt, tlsqr) per seed {pairs:?}; \
             {secs:.2} s (limit {RECON_TIME_LIMIT_S} s)",
            run.trajectory.iterations()
        ),
    )
}

fn c10_parameter_gate() -> Outcome {
    let r = validate_parameters(2.0, 1.0, 1.0, 0.2, 0.01).unwrap();
    let bound_exact = r.eps_bound == 1.0 / 24.0;
    let accepts = [(0.2, 0.0), (0.3, 0.0), (0.25, 0.02), (0.2, 0.01)]
        .iter()
        .all(|&(alpha, eps)| validate_parameters(2.0, 1.0, 1.0, alpha, eps).unwrap().valid);
    let rejects = [(0.5, 0.0), (1.0 / 3.0, 0.0), (0.1, 0.02), (0.25, 0.05), (0.3, 1.0 / 24.0), (0.0, 0.0)]
        .iter()
        .all(|&(alpha, eps)| !validate_parameters(2.0, 1.0, 1.0, alpha, eps).unwrap().valid);
    let mu_required = validate_parameters(2.0, 1.0, 0.0, 0.2, 0.01).is_err();
    let (problem, _, x0) = desk_problem();
    let run_rejects = run_fb(&problem, &SolverConfig::inexact(0.1, INEXACT_EPS), &x0).is_err();
    outcome(
        bound_exact && accepts && rejects && mu_required && run_rejects,
        format!(
            "eps_bound {} == 1/24: {bound_exact}; documented valid accepted: {accepts}; violations rejected: {rejects}; \
             mu required for eps > 0: {mu_required}; run refused on invalid input: {run_rejects}",
            r.eps_bound
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("prox oracle equivalence", c1_prox_oracle),
        ("strict descent on 16x16 tomography", c2_strict_descent),
        ("exact linear rate on the desk problem", c3_exact_rate),
        ("inexact threshold and contraction inequality", c4_inexact_threshold),
        ("threshold formulas and ordering", c5_thresholds),
        ("eps-prox certification", c6_certificates),
        ("gradient finite-difference check", c7_gradient),
        ("sharpness probe", c8_sharpness),
        ("end-to-end reconstruction", c9_reconstruction),
        ("parameter gate", c10_parameter_gate),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!("{} #{} {name}: {}", if o.pass { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
