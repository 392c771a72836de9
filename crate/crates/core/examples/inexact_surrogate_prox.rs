// Certified ε-proximal points through the smoothed surrogate, for the
// standard roots and for roots without a closed-form prox.

use std::error::Error;

use wcfb::inexact_prox::{eps_prox, surrogate_value, SurrogateSpec};
use wcfb::{BinaryPenalty, Penalty};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let (alpha, eps) = (0.3, 0.05);
    let spec = SurrogateSpec::uniform(3, -1.0, 1.0, eps)?;
    let y = [0.1, 1.4, -2.2];
    let (x, cert) = eps_prox(&spec, &y, alpha)?;
    println!("surrogate at x: {:.6}", surrogate_value(&spec, &x)?);
    println!(
        "eps-prox {:?}: gap {:.3e} <= budget {} : {}",
        x.as_slice(),
        cert.gap(),
        cert.budget,
        cert.satisfied
    );

    let f = BinaryPenalty::new(2, 0.0, 1.0)?;
    let outcome = f.eps_prox(&[0.45, 1.3], alpha, 0.01)?;
    let cert = outcome.certificate.expect("inexact oracle certifies");
    println!(
        "roots (0, 1): {:?} gap {:.3e} satisfied {}",
        outcome.point.as_slice(),
        cert.gap(),
        cert.satisfied
    );
    println!("closed form for roots (0, 1) is unsupported: {}", f.prox(&[0.45, 1.3], alpha).is_err());
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
