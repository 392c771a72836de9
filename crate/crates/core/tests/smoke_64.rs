//! Full-size reconstruction of every phantom kind. Prints the error rates of
//! both methods; only checks that the runs complete.

use wcfb::tomography::{
    build_projector, lsqr_solve, make_phantom, misclassification_rate, reconstruct_crbt, simulate_sinogram,
    threshold_to_binary, CrbtOptions, PhantomKind, ScanGeometry, DEFAULT_LSQR_ITERATIONS,
};

#[test]
fn reconstructs_64_by_64_phantoms() {
    let n = 64;
    let geometry = ScanGeometry::new(vec![0.0, 50.0, 100.0, 150.0], 64).unwrap();
    let a = build_projector(n, n, &geometry).unwrap();
    for kind in [PhantomKind::Disk, PhantomKind::Bars, PhantomKind::Blob] {
        let truth = make_phantom(kind, n, n, 1).unwrap();
        let sino = simulate_sinogram(&a, &truth, 0.01, 1).unwrap();
        let crbt = reconstruct_crbt(&a, &sino, &geometry, n, n, &CrbtOptions::default()).unwrap();
        let lsqr = lsqr_solve(&a, &sino.values, DEFAULT_LSQR_ITERATIONS).unwrap();
        let tlsqr = threshold_to_binary(&lsqr, n, n).unwrap();
        let (rc, rt) = (
            misclassification_rate(&crbt.image, &truth).unwrap(),
            misclassification_rate(&tlsqr, &truth).unwrap(),
        );
        println!(
            "{kind}: crbt {rc:.4} ({} iterations, theta {:.3e}), tlsqr {rt:.4}",
            crbt.trajectory.iterations(),
            crbt.theta
        );
        assert!(rc.is_finite() && rt.is_finite());
    }
}
