//! Switched parasitic ring of eight lamps around a monopole: patterns for a
//! few states and the exhaustive search for the best state toward a target.
//!
//!     cargo run --example plasma_ring

use std::f64::consts::PI;

use fluidrad::prelude::*;
use fluidrad::reconfig::{plasma_optimize, plasma_pattern, PlasmaCriterion, PlasmaRing, PlasmaRingScenario};

fn main() -> Result<()> {
    let k = 2.0 * PI; // lambda = 1 m
    let ring = PlasmaRing::new(8, 0.25, k)?;
    let grid = AngleGrid::new(181, 720)?;
    let horizon = Cut::Azimuth { theta: PI / 2.0 };

    let states: [(&str, [bool; 8]); 3] = [
        ("all off", [false; 8]),
        ("two lit", [false, false, false, false, true, true, false, false]),
        ("five lit", [false, false, false, true, true, true, true, true]),
    ];
    for (label, state) in states {
        let s = PlasmaRingScenario::new(ring, state.to_vec())?;
        let p = plasma_pattern(&s, &grid)?;
        let cut = p.cut(horizon)?;
        let (lo, hi) = cut
            .power
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), &u| (lo.min(u), hi.max(u)));
        let f = cut_features(&cut, FeatureThresholds::default());
        let peaks: Vec<String> = f.peaks.iter().map(|a| format!("{:.1}", a.to_degrees())).collect();
        println!(
            "{label:>9}: ripple {:6.2} dB, peaks at [{}] deg",
            10.0 * (hi / lo).log10(),
            peaks.join(", ")
        );
    }

    let target = 45f64.to_radians();
    let best = plasma_optimize(&ring, PI / 2.0, target, PlasmaCriterion::MaxGain)?;
    let bits: String = best.state.iter().map(|&on| if on { '1' } else { '0' }).collect();
    println!("\nbest state toward phi = 45 deg: {bits}  |F|^2 = {:.4} ({} states)", best.value, best.evaluated);
    let worst = plasma_optimize(&ring, PI / 2.0, target, PlasmaCriterion::MinGain)?;
    let bits: String = worst.state.iter().map(|&on| if on { '1' } else { '0' }).collect();
    println!("deepest state toward phi = 45 deg: {bits}  |F|^2 = {:.4}", worst.value);
    Ok(())
}
