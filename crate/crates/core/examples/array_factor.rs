//! Fixed-layout baseline: steered linear array and the convergence of a
//! sampled aperture to its continuous limit.
//!
//!     cargo run --example array_factor

use std::f64::consts::PI;

use fluidrad::array_factor::{aperture_deviation, array_factor, ArrayLayout, ExcitationWeights, Taper};
use fluidrad::Result;

fn main() -> Result<()> {
    let k = 2.0 * PI;
    let layout = ArrayLayout::fixed_grid([0.0, 0.0, 0.5], [1, 1, 16])?;
    let theta0 = 60f64.to_radians();
    let w = ExcitationWeights::steered(&layout, k, theta0, 0.0);

    let (mut best, mut best_theta) = (0.0, 0.0);
    for i in 0..=720 {
        let theta = (i as f64 * 0.25).to_radians();
        let af = array_factor(&layout, &w, k, theta, 0.0)?.norm();
        if af > best {
            best = af;
            best_theta = theta;
        }
    }
    println!(
        "16 elements, lambda/2 spacing, steered to 60 deg: beam at {:.2} deg, |AF| = {best:.3}",
        best_theta.to_degrees()
    );

    let thetas: Vec<f64> = (0..=360).map(|i| (i as f64 * 0.5).to_radians()).collect();
    for taper in [Taper::Uniform, Taper::Cosine] {
        println!("\n{taper:?} aperture, 4 lambda long");
        for n in [16, 32, 64, 128, 256] {
            let dev = aperture_deviation(2.0, taper, n, k, &thetas)?;
            println!("  N = {n:3}  max relative deviation {dev:.3e}");
        }
    }
    Ok(())
}
