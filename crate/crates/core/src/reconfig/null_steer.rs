//! Null steering by shifting a radiator against a fixed reference source.
//!
//! The composite field is `f(r̂) [w_ref + exp(j k r̂·(d0 + L x̂))]`: a
//! reference source at the origin with weight `w_ref` and the radiator at a
//! base offset `d0` displaced by `L` along x. With `w_ref = -1` the azimuth
//! nulls sit where `k (L cos φ + d0_y sin φ) = 2 π m`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::radiation::{pattern_features_with, translate_phase, Cut, FarFieldPattern, FeatureThresholds};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NullSteerScenario {
    /// Far-field pattern of the radiator at its base position; the reference
    /// source shares it.
    pub element: FarFieldPattern,
    pub k: f64,
    /// Radiator position at zero shift.
    pub base_offset: Point,
    pub reference_weight: Complex64,
    pub shift_min: f64,
    pub shift_max: f64,
    pub shift_step: f64,
    /// Elevation of the azimuth observation cut.
    pub cut_theta: f64,
    /// Initial guess for the tracked null, radians.
    pub track_from: f64,
    pub thresholds: FeatureThresholds,
}

impl NullSteerScenario {
    /// Anti-phase reference, radiator half a wavelength off along y, sweep
    /// over `[shift_min, shift_max]`, horizon cut.
    pub fn new(element: FarFieldPattern, k: f64, shift_min: f64, shift_max: f64, shift_step: f64) -> Result<Self> {
        let s = Self {
            element,
            k,
            base_offset: [0.0, PI / k, 0.0],
            reference_weight: Complex64::new(-1.0, 0.0),
            shift_min,
            shift_max,
            shift_step,
            cut_theta: PI / 2.0,
            track_from: 0.0,
            thresholds: FeatureThresholds::default(),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::InvalidOperatingPoint { k: self.k, q: f64::NAN });
        }
        if !(self.shift_min < self.shift_max) {
            return Err(Error::InvalidScenario("shift range must satisfy min < max".into()));
        }
        if !(self.shift_step > 0.0) {
            return Err(Error::InvalidScenario("shift step must be > 0".into()));
        }
        self.element
            .grid()
            .theta_index(self.cut_theta)
            .ok_or_else(|| Error::CutNotOnGrid(Cut::Azimuth { theta: self.cut_theta }.to_string()))?;
        Ok(())
    }

    /// Shift values covering the range, both ends included.
    pub fn shifts(&self) -> Vec<f64> {
        let n = ((self.shift_max - self.shift_min) / self.shift_step + 1e-9).floor() as usize;
        (0..=n)
            .map(|i| self.shift_min + i as f64 * self.shift_step)
            .collect()
    }

    /// Composite pattern at shift `l`.
    pub fn composite(&self, l: f64) -> Result<FarFieldPattern> {
        let d = [self.base_offset[0] + l, self.base_offset[1], self.base_offset[2]];
        let moved = translate_phase(&self.element, d, self.k);
        moved.add(&self.element.scaled(self.reference_weight))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteerRecord {
    pub shift: f64,
    /// Null azimuths wrapped to `(-pi, pi]`.
    pub nulls: Vec<f64>,
    pub null_depths_db: Vec<f64>,
    /// Null followed continuously from `track_from`.
    pub tracked_null: Option<f64>,
    /// Azimuth of the strongest sample, wrapped to `(-pi, pi]`.
    pub peak: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteerTrace {
    pub records: Vec<SteerRecord>,
}

impl SteerTrace {
    pub fn tracked(&self) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.tracked_null).collect()
    }
}

pub(crate) fn wrap_pi(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    if w > PI {
        w - 2.0 * PI
    } else {
        w
    }
}

fn circular_distance(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Sweep the radiator shift and record the azimuth nulls at each step.
pub fn null_steer_sweep(scenario: &NullSteerScenario) -> Result<SteerTrace> {
    scenario.validate()?;
    let cut = Cut::Azimuth { theta: scenario.cut_theta };
    let mut records = Vec::new();
    let mut previous = scenario.track_from;
    for l in scenario.shifts() {
        let pattern = scenario.composite(l)?;
        let features = pattern_features_with(&pattern, cut, scenario.thresholds)?;
        let samples = pattern.cut(cut)?;
        let max = samples.max();
        let peak = samples
            .power
            .iter()
            .position(|&v| v == max && max > 0.0)
            .map(|j| wrap_pi(samples.angle(j)));
        let nulls: Vec<f64> = features.nulls.iter().map(|&a| wrap_pi(a)).collect();
        let tracked = nulls
            .iter()
            .copied()
            .min_by(|a, b| {
                circular_distance(*a, previous)
                    .total_cmp(&circular_distance(*b, previous))
                    .then(a.total_cmp(b))
            });
        if let Some(t) = tracked {
            previous = t;
        }
        records.push(SteerRecord {
            shift: l,
            nulls,
            null_depths_db: features.null_levels_db,
            tracked_null: tracked,
            peak,
        });
    }
    Ok(SteerTrace { records })
}

/// Closed-form horizon nulls of the anti-phase pair with the radiator at
/// `(L, d, 0)`: solutions of `k (L cos φ + d sin φ) = 2 pi m`, wrapped to
/// `(-pi, pi]`, ascending.
pub fn two_source_nulls(k: f64, shift: f64, offset: f64) -> Vec<f64> {
    let r = shift.hypot(offset);
    let beta = offset.atan2(shift);
    let mut out = Vec::new();
    if r == 0.0 {
        return out;
    }
    // L cos φ + d sin φ = r cos(φ - beta)
    let mmax = (k * r / (2.0 * PI)).floor() as i64;
    for m in -mmax..=mmax {
        let c = 2.0 * PI * m as f64 / (k * r);
        if c.abs() > 1.0 {
            continue;
        }
        let a = c.acos();
        for phi in [beta + a, beta - a] {
            let w = wrap_pi(phi);
            if !out.iter().any(|&x: &f64| circular_distance(x, w) < 1e-12) {
                out.push(w);
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}
