// Closed-form proximal maps: the binary penalty, the sphere penalty and the
// block soft-threshold behind the ball projection.

use std::error::Error;

use wcfb::functions::{ball_projection, binary_prox_scalar, norm_prox};
use wcfb::{BinaryPenalty, Penalty, SpherePenalty};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let alpha = 0.25;
    println!("prox of |x^2 - 1| with alpha = {alpha}");
    for y in [-2.0, -1.2, -0.25, 0.0, 0.25, 1.0, 1.2, 2.0] {
        println!("  y = {y:>5}  ->  {:.6}", binary_prox_scalar(y, alpha));
    }

    let f = BinaryPenalty::standard(3);
    let y = [2.0, 0.25, -1.2];
    let p = f.prox(&y, alpha)?;
    println!("vector prox {:?} -> {:?} (f = {})", y, p.as_slice(), f.value(&p)?);

    let sphere = SpherePenalty::new(2)?;
    for y in [[2.0, 0.0], [0.6, 0.8], [0.1, 0.0], [0.0, 0.0]] {
        println!("sphere prox {:?} -> {:?}", y, sphere.prox(&y, 0.1)?.as_slice());
    }

    println!("norm prox (3, 4), theta 1 -> {:?}", norm_prox(&[3.0, 4.0], 1.0)?.as_slice());
    println!(
        "ball projection of (2, 0) onto B(0, 1) -> {:?}",
        ball_projection(&[2.0, 0.0], &[0.0, 0.0], 1.0)?.as_slice()
    );
    Ok(())
}

fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
