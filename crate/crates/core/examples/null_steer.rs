//! Steering an azimuth null by sliding a radiator against a fixed
//! anti-phase reference, compared with the two-source closed form.
//!
//!     cargo run --example null_steer

use std::f64::consts::PI;

use fluidrad::prelude::*;
use fluidrad::reconfig::{null_steer_sweep, two_source_nulls, NullSteerScenario};

fn main() -> Result<()> {
    let lambda = 1.0;
    let k = 2.0 * PI / lambda;
    let grid = AngleGrid::new(181, 1440)?;
    let wire = Eigenmode::new(
        ModeIndex::new(0, 0, 1),
        DomainBox::line(Axis::Z, lambda / 4.0)?,
        BoundaryCondition::dirichlet(),
    )?;
    let element = mode_pattern(&wire, Axis::Z, k, &grid)?;
    let scenario = NullSteerScenario::new(element, k, 0.0, lambda / 2.0, lambda / 40.0)?;
    let trace = null_steer_sweep(&scenario)?;

    println!("  L/lambda   tracked   closed form");
    for r in &trace.records {
        let t = r.tracked_null.expect("null present");
        let oracle = two_source_nulls(k, r.shift, scenario.base_offset[1])
            .into_iter()
            .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
            .expect("closed-form null");
        println!(
            "  {:8.3} {:9.2} {:12.3}",
            r.shift / lambda,
            t.to_degrees(),
            oracle.to_degrees()
        );
    }
    Ok(())
}
