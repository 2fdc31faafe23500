//! Spectral Green's function of a Dirichlet wire and the parity selection
//! done by the feed.
//!
//!     cargo run --example green_function

use fluidrad::prelude::*;

fn main() -> Result<()> {
    let h = 0.25;
    let domain = DomainBox::line(Axis::Z, h)?;
    let bc = BoundaryCondition::dirichlet();
    let op = OperatingPoint::new(10.0, 100.0)?;
    let ceiling = 400.0;

    let (a, b) = ([0.0, 0.0, 0.07], [0.0, 0.0, -0.12]);
    let g_ab = green_eval(a, b, &op, &domain, &bc, ceiling)?;
    let g_ba = green_eval(b, a, &op, &domain, &bc, ceiling)?;
    println!("G(a, b) = {g_ab:.9}");
    println!("G(b, a) = {g_ba:.9}  (|diff| = {:.1e})", (g_ab - g_ba).norm());

    // same drive, three feeds
    for feed in [
        FeedScheme::center_impulse(),
        FeedScheme::dual_impulse(Axis::Z, 0.1, PortPhase::AntiPhase),
        FeedScheme::center_doublet(Axis::Z),
    ] {
        let current = build_current(&domain, &bc, &feed, &op, 60.0)?;
        println!("\n{}:", feed.label());
        for row in excited_mode_report(&current, 6) {
            println!("  {:<10} |a| = {:.3e}  {}", row.index.to_string(), row.magnitude, row.parity[2]);
        }
        let i0 = current.value_at([0.0, 0.0, 0.0]);
        println!("  I(0) = {i0:.4e}");
    }
    Ok(())
}
