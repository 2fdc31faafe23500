//! The same wire radiates a doughnut or a four-lobe pattern depending on
//! which port scheme drives it.
//!
//!     cargo run --example dipole_reshape

use fluidrad::prelude::*;
use fluidrad::reconfig::{dipole_reshape, DipoleExcitation, DipoleScenario};

fn describe(label: &str, s: &DipoleScenario) -> Result<()> {
    let grid = AngleGrid::with_step_deg(0.5, 90.0)?;
    let p = dipole_reshape(s, &grid)?;
    let f = pattern_features(&p, Cut::Elevation { phi: 0.0 })?;
    let deg = |v: &[f64]| v.iter().map(|a| format!("{:.1}", a.to_degrees())).collect::<Vec<_>>().join(", ");
    println!("{label}");
    println!("  k = {:.4} rad/m ({:.3} k1)", s.op.k, s.op.k / s.resonance(1));
    println!("  peaks [{}] deg", deg(&f.peaks));
    println!("  nulls [{}] deg", deg(&f.nulls));
    if let Some(h) = f.hpbw {
        println!("  hpbw  {:.2} deg", h.to_degrees());
    }
    println!("  D     {:.4}", directivity(&p)?);
    Ok(())
}

fn main() -> Result<()> {
    let h = 0.25;
    let k1 = std::f64::consts::PI / (2.0 * h);

    let op = OperatingPoint::new(0.99 * k1, 100.0)?;
    let centre = DipoleScenario::new(h, DipoleExcitation::DifferentialCenter, op)?;
    describe("centre feed near k1", &centre)?;

    let op = OperatingPoint::new(0.99 * 2.0 * k1, 100.0)?;
    let dual = DipoleScenario::new(h, DipoleExcitation::CommonDual { offset: h / 2.0 }, op)?;
    describe("\nanti-phase ports at +-H/2 near k2", &dual)?;
    Ok(())
}
