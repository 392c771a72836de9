// End-to-end binary tomography on a 16x16 disk: projector, noisy
// sinogram, LSQR and thresholded LSQR baselines, and the relaxed binary
// reconstruction.

use std::error::Error;

use wcfb::tomography::{
    build_projector, lsqr_solve, make_phantom, misclassification_rate, reconstruct_crbt, simulate_sinogram,
    threshold_to_binary, CrbtOptions, PhantomKind, ScanGeometry, DEFAULT_LSQR_ITERATIONS,
};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let n = 16;
    let truth = make_phantom(PhantomKind::Disk, n, n, 0)?;
    let geometry = ScanGeometry::uniform(8, 24)?;
    let a = build_projector(n, n, &geometry)?;
    println!("projector {}x{}, {} nonzeros", a.n_rows(), a.n_cols(), a.nnz());

    for sigma in [0.0, 0.01] {
        let sino = simulate_sinogram(&a, &truth, sigma, 7)?;
        let lsqr = lsqr_solve(&a, &sino.values, DEFAULT_LSQR_ITERATIONS)?;
        let tlsqr = threshold_to_binary(&lsqr, n, n)?;
        let run = reconstruct_crbt(&a, &sino, &geometry, n, n, &CrbtOptions::default())?;
        println!(
            "sigma {sigma}: theta {:.3e}, crbt {} iterations, misclassification crbt {:.4} tlsqr {:.4}",
            run.theta,
            run.trajectory.iterations(),
            misclassification_rate(&run.image, &truth)?,
            misclassification_rate(&tlsqr, &truth)?
        );
    }
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
