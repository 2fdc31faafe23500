//! Directivity and beamwidth of textbook patterns on the angle grid.
//!
//!     cargo run --example directivity

use std::f64::consts::PI;

use fluidrad::prelude::*;

fn main() -> Result<()> {
    let grid = AngleGrid::with_step_deg(0.5, 5.0)?;
    let k = 2.0 * PI;

    let short = FarFieldPattern::from_fn(&grid, |d| Complex64::new(d.sin_theta, 0.0));
    let half_wave = FarFieldPattern::from_fn(&grid, |d| {
        let v = if d.sin_theta > 0.0 {
            (PI / 2.0 * d.cos_theta).cos() / d.sin_theta
        } else {
            0.0
        };
        Complex64::new(v, 0.0)
    });
    // radiated by the eigenmode machinery instead of a closed form
    let wire = Eigenmode::new(ModeIndex::new(0, 0, 1), DomainBox::line(Axis::Z, 0.25)?, BoundaryCondition::dirichlet())?;
    let mode = mode_pattern(&wire, Axis::Z, k, &grid)?;

    for (label, p) in [("sin(theta)", &short), ("half-wave closed form", &half_wave), ("half-wave eigenmode", &mode)] {
        let f = pattern_features(p, Cut::Elevation { phi: 0.0 })?;
        println!(
            "{label:>22}: D = {:.4} ({:.2} dBi), HPBW = {:.2} deg",
            directivity(p)?,
            10.0 * directivity(p)?.log10(),
            f.hpbw.unwrap_or(f64::NAN).to_degrees()
        );
    }
    Ok(())
}
