//! Moving a single feed along a wire to maximize or null the broadside
//! field.
//!
//!     cargo run --example feed_optimize

use std::f64::consts::PI;

use fluidrad::prelude::*;
use fluidrad::reconfig::{feed_position_optimize, FeedCriterion, FeedSearch};

fn main() -> Result<()> {
    let h = 0.25;
    let domain = DomainBox::line(Axis::Z, h)?;
    let bc = BoundaryCondition::dirichlet();
    let k1 = PI / (2.0 * h);

    for (label, k, criterion) in [
        ("max broadside near k1", 0.99 * k1, FeedCriterion::Max),
        ("null broadside near k2", 0.99 * 2.0 * k1, FeedCriterion::Null),
        ("max broadside near k3", 0.99 * 3.0 * k1, FeedCriterion::Max),
    ] {
        let search = FeedSearch {
            axis: Axis::Z,
            target_theta: PI / 2.0,
            target_phi: 0.0,
            criterion,
            resolution: h / 20.0,
            k_ceiling: 16.0 * k1,
        };
        let op = OperatingPoint::new(k, 100.0)?;
        let best = feed_position_optimize(&domain, &bc, &op, &search)?;
        println!(
            "{label:>24}: z = {:+.4} m ({:+.3} H), objective {:.4e}, {} grid points",
            best.position[2],
            best.position[2] / h,
            best.value,
            best.candidates
        );
    }
    Ok(())
}
