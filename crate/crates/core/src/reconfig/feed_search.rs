//! Feed-position search for a target far-field direction.
//!
//! The current excited by an impulse at `r'` is `Σ I_n(r') I_n / D_n`, so its
//! far field in any direction is `Σ I_n(r') f_n / D_n`. The eigenpatterns
//! `f_n` and denominators `D_n` are computed once, after which each candidate
//! feed costs one mode evaluation per term.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenmode::{enumerate_modes, BoundaryCondition, DomainBox, Eigenmode};
use crate::numeric::{golden_section_min, pairwise_sum_c};
use crate::radiation::{mode_field_at, Direction};
use crate::spectral::OperatingPoint;
use crate::{Axis, Error, Point, Result};

/// Step of the reference samples used to normalize the NULL objective.
const REFERENCE_STEP_DEG: f64 = 2.0;
const GOLDEN_TOL: f64 = 1e-10;
const GOLDEN_ITER: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedCriterion {
    /// Maximize `|F(target)|^2`.
    Max,
    /// Minimize `|F(target)|^2` relative to the strongest reference sample.
    Null,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedSearch {
    pub axis: Axis,
    pub target_theta: f64,
    pub target_phi: f64,
    pub criterion: FeedCriterion,
    /// Grid spacing in meters.
    pub resolution: f64,
    pub k_ceiling: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeedOptimum {
    pub position: Point,
    /// `|F(target)|^2` (MAX) or its ratio to the reference maximum (NULL).
    pub value: f64,
    pub candidates: usize,
}

struct Landscape {
    modes: Vec<Eigenmode>,
    /// Per direction (target first): per mode `f_n / D_n` for `E_theta` and `E_phi`.
    fields: Vec<Vec<(Complex64, Complex64)>>,
    criterion: FeedCriterion,
}

impl Landscape {
    fn power(&self, dir: usize, feed: Point) -> f64 {
        let row = &self.fields[dir];
        let (t, p): (Vec<Complex64>, Vec<Complex64>) = self
            .modes
            .iter()
            .zip(row)
            .map(|(m, &(ft, fp))| {
                let v = m.value_at(feed);
                (ft * v, fp * v)
            })
            .unzip();
        pairwise_sum_c(&t).norm_sqr() + pairwise_sum_c(&p).norm_sqr()
    }

    /// Quantity to minimize.
    fn cost(&self, feed: Point) -> f64 {
        let target = self.power(0, feed);
        match self.criterion {
            FeedCriterion::Max => -target,
            FeedCriterion::Null => {
                let reference = (0..self.fields.len())
                    .map(|d| self.power(d, feed))
                    .fold(0.0, f64::max);
                if reference > 0.0 {
                    target / reference
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    fn value(&self, cost: f64) -> f64 {
        match self.criterion {
            FeedCriterion::Max => -cost,
            FeedCriterion::Null => cost,
        }
    }
}

fn reference_directions(theta0: f64, phi0: f64) -> Vec<(f64, f64)> {
    let n_el = (180.0 / REFERENCE_STEP_DEG) as usize;
    let n_az = (360.0 / REFERENCE_STEP_DEG) as usize;
    let mut out = vec![(theta0, phi0)];
    for i in 0..=n_el {
        let t = PI * i as f64 / n_el as f64;
        out.push((t, phi0));
        out.push((t, phi0 + PI));
    }
    for j in 0..n_az {
        out.push((theta0, 2.0 * PI * j as f64 / n_az as f64));
    }
    out
}

/// Coordinates `i * resolution` strictly inside `(-l, l)`, ascending.
fn axis_candidates(l: f64, resolution: f64) -> Vec<f64> {
    let n = (l / resolution).floor() as i64;
    (-n..=n)
        .map(|i| i as f64 * resolution)
        .filter(|c| c.abs() < l)
        .collect()
}

/// Grid search over interior impulse-feed positions, then one golden-section
/// pass per active axis around the best grid point. Grid ties resolve to the
/// lexicographically smallest position; refinements are kept only when
/// strictly better.
pub fn feed_position_optimize(
    domain: &DomainBox,
    bc: &BoundaryCondition,
    op: &OperatingPoint,
    search: &FeedSearch,
) -> Result<FeedOptimum> {
    if !(search.resolution.is_finite() && search.resolution > 0.0) {
        return Err(Error::InvalidScenario("search resolution must be > 0".into()));
    }
    let modes = enumerate_modes(domain, bc, search.k_ceiling.max(op.k))?;
    let directions: Vec<(f64, f64)> = match search.criterion {
        FeedCriterion::Max => vec![(search.target_theta, search.target_phi)],
        FeedCriterion::Null => reference_directions(search.target_theta, search.target_phi),
    };
    let per_mode: Vec<Vec<(Complex64, Complex64)>> = modes
        .par_iter()
        .map(|m| {
            let d = op.denominator(m)?;
            directions
                .iter()
                .map(|&(t, p)| {
                    let (et, ep) = mode_field_at(m, search.axis, op.k, Direction::new(t, p));
                    Ok((et / d, ep / d))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let fields = (0..directions.len())
        .map(|di| per_mode.iter().map(|row| row[di]).collect())
        .collect();
    let land = Landscape {
        modes,
        fields,
        criterion: search.criterion,
    };

    let per_axis: Vec<Vec<f64>> = Axis::ALL
        .iter()
        .map(|&a| match domain.half_extent(a) {
            Some(l) => axis_candidates(l, search.resolution),
            None => vec![0.0],
        })
        .collect();
    let mut candidates = Vec::new();
    for &x in &per_axis[0] {
        for &y in &per_axis[1] {
            for &z in &per_axis[2] {
                candidates.push([x, y, z]);
            }
        }
    }
    if candidates.is_empty() {
        return Err(Error::InvalidScenario("no interior grid positions".into()));
    }
    let costs: Vec<f64> = candidates.par_iter().map(|&c| land.cost(c)).collect();
    let mut best = 0;
    for i in 1..costs.len() {
        if costs[i] < costs[best] {
            best = i;
        }
    }
    let mut position = candidates[best];
    let mut cost = costs[best];

    for axis in Axis::ALL {
        let Some(l) = domain.half_extent(axis) else {
            continue;
        };
        let a = axis.index();
        let limit = l * (1.0 - 1e-9);
        let lo = (position[a] - search.resolution).max(-limit);
        let hi = (position[a] + search.resolution).min(limit);
        let (x, c) = golden_section_min(
            |x| {
                let mut p = position;
                p[a] = x;
                land.cost(p)
            },
            lo,
            hi,
            GOLDEN_TOL,
            GOLDEN_ITER,
        );
        if c < cost {
            position[a] = x;
            cost = c;
        }
    }
    Ok(FeedOptimum {
        position,
        value: land.value(cost),
        candidates: candidates.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const H: f64 = 0.25;

    fn setup(k: f64) -> (DomainBox, BoundaryCondition, OperatingPoint) {
        (
            DomainBox::line(Axis::Z, H).unwrap(),
            BoundaryCondition::dirichlet(),
            OperatingPoint::new(k, 100.0).unwrap(),
        )
    }

    fn search(criterion: FeedCriterion) -> FeedSearch {
        FeedSearch {
            axis: Axis::Z,
            target_theta: PI / 2.0,
            target_phi: 0.0,
            criterion,
            resolution: H / 20.0,
            k_ceiling: 16.0 * PI / (2.0 * H),
        }
    }

    #[test]
    fn max_broadside_near_first_resonance_is_central() {
        let (d, bc, op) = setup(0.99 * PI / (2.0 * H));
        let best = feed_position_optimize(&d, &bc, &op, &search(FeedCriterion::Max)).unwrap();
        assert!(best.position[2].abs() < 1e-6, "{:?}", best.position);
        assert_eq!(best.position[0], 0.0);
    }

    #[test]
    fn null_broadside_near_second_resonance_is_off_center() {
        let (d, bc, op) = setup(0.99 * PI / H);
        let best = feed_position_optimize(&d, &bc, &op, &search(FeedCriterion::Null)).unwrap();
        assert!(best.position[2].abs() > H / 20.0, "{:?}", best.position);
        assert!(best.value < 1e-3);
    }

    #[test]
    fn flat_landscape_takes_smallest_coordinates() {
        // the axial direction is a null for every feed
        let (d, bc, op) = setup(3.0);
        let mut s = search(FeedCriterion::Max);
        s.target_theta = 0.0;
        let best = feed_position_optimize(&d, &bc, &op, &s).unwrap();
        assert_eq!(best.position, [0.0, 0.0, -19.0 * (H / 20.0)]);
        assert_eq!(best.value, 0.0);
    }

    #[test]
    fn resolution_must_be_positive() {
        let (d, bc, op) = setup(1.0);
        let mut s = search(FeedCriterion::Max);
        s.resolution = 0.0;
        assert!(feed_position_optimize(&d, &bc, &op, &s).is_err());
    }
}
