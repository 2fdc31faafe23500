//! Switched parasitic ring around a driven monopole.
//!
//! Each lamp that is switched ON re-radiates the field it receives from the
//! monopole with a shared complex coupling `c`. The received field is
//! retarded by the ring radius, so
//!
//! ```text
//! F(θ, φ) = g(θ) [1 + c e^{-jkρ} Σ_{n ON} exp(j k ρ sinθ cos(φ - φ_n))],   φ_n = 2πn/N
//! ```
//!
//! OFF lamps contribute nothing. Without the retardation factor a real `c`
//! would make every azimuth pattern symmetric under `φ -> φ + π`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::numeric::{pairwise_sum_c, trig_at};
use crate::radiation::{AngleGrid, Direction, FarFieldPattern};
use crate::{Error, Result};

/// Largest ring searched exhaustively.
pub const MAX_EXHAUSTIVE_LAMPS: usize = 20;

const ALIGN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementPattern {
    /// `g = 1`.
    Isotropic,
    /// Vertical monopole, `g = sin θ`.
    Monopole,
}

/// Ring geometry and coupling, without a switch state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlasmaRing {
    pub lamps: usize,
    /// Ring radius in meters.
    pub radius: f64,
    pub coupling: Complex64,
    pub k: f64,
    pub element: ElementPattern,
}

impl PlasmaRing {
    /// Default coupling `0.4 e^{jπ}`.
    pub fn default_coupling() -> Complex64 {
        Complex64::from_polar(0.4, PI)
    }

    pub fn new(lamps: usize, radius: f64, k: f64) -> Result<Self> {
        let ring = Self {
            lamps,
            radius,
            coupling: Self::default_coupling(),
            k,
            element: ElementPattern::Monopole,
        };
        ring.validate()?;
        Ok(ring)
    }

    pub fn with_coupling(mut self, coupling: Complex64) -> Result<Self> {
        self.coupling = coupling;
        self.validate()?;
        Ok(self)
    }

    pub fn with_element(mut self, element: ElementPattern) -> Self {
        self.element = element;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lamps < 2 {
            return Err(Error::InvalidScenario("ring needs at least 2 lamps".into()));
        }
        if !(self.radius.is_finite() && self.radius > 0.0) {
            return Err(Error::InvalidScenario(format!("ring radius must be > 0, got {}", self.radius)));
        }
        if !(self.k.is_finite() && self.k > 0.0) {
            return Err(Error::InvalidOperatingPoint { k: self.k, q: f64::NAN });
        }
        if !(self.coupling.norm() < 1.0) {
            return Err(Error::InvalidScenario(format!(
                "coupling magnitude must be < 1, got {}",
                self.coupling.norm()
            )));
        }
        Ok(())
    }

    fn element_gain(&self, sin_theta: f64) -> f64 {
        match self.element {
            ElementPattern::Isotropic => 1.0,
            ElementPattern::Monopole => sin_theta,
        }
    }

    /// Coupling including the retardation from the monopole to the ring.
    pub fn effective_coupling(&self) -> Complex64 {
        self.coupling * Complex64::from_polar(1.0, -self.k * self.radius)
    }

    /// `g(θ) [1 + c e^{-jkρ} Σ exp(j k ρ sinθ cos_n)]`, with the lamp terms summed in
    /// ascending order of their azimuth offset key so that rotated states
    /// reproduce bitwise-identical values.
    fn combine(&self, sin_theta: f64, mut lamps: Vec<(i64, f64)>) -> Complex64 {
        lamps.sort_by_key(|&(key, _)| key);
        let kr = self.k * self.radius * sin_theta;
        let terms: Vec<Complex64> = lamps
            .iter()
            .map(|&(_, c)| Complex64::from_polar(1.0, kr * c))
            .collect();
        let ring = Complex64::new(1.0, 0.0) + self.effective_coupling() * pairwise_sum_c(&terms);
        ring * self.element_gain(sin_theta)
    }

    /// `F` for a switch state in the direction `(theta, phi)`.
    pub fn field(&self, state: &[bool], theta: f64, phi: f64) -> Complex64 {
        let d = Direction::new(theta, phi);
        let n = self.lamps as i64;
        let pos = phi.rem_euclid(2.0 * PI) * n as f64 / (2.0 * PI);
        let aligned = (pos - pos.round()).abs() < ALIGN_TOL;
        let lamps = on_lamps(state)
            .map(|l| {
                if aligned {
                    let rel = (pos.round() as i64 - l as i64).rem_euclid(n);
                    (rel, trig_at(rel, n).0)
                } else {
                    let phi_n = 2.0 * PI * l as f64 / n as f64;
                    (l as i64, (phi - phi_n).cos())
                }
            })
            .collect();
        self.combine(d.sin_theta, lamps)
    }

    /// `|F|^2` relative to the lone element (`c = 0`) in the same direction.
    pub fn objective(&self, state: &[bool], theta: f64, phi: f64) -> f64 {
        self.field(state, theta, phi).norm_sqr()
    }
}

fn on_lamps(state: &[bool]) -> impl Iterator<Item = usize> + '_ {
    state.iter().enumerate().filter(|(_, &on)| on).map(|(i, _)| i)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlasmaRingScenario {
    pub ring: PlasmaRing,
    pub state: Vec<bool>,
}

impl PlasmaRingScenario {
    pub fn new(ring: PlasmaRing, state: Vec<bool>) -> Result<Self> {
        ring.validate()?;
        if state.len() != ring.lamps {
            return Err(Error::LengthMismatch {
                left: state.len(),
                right: ring.lamps,
            });
        }
        Ok(Self { ring, state })
    }

    /// The same state advanced by `m` lamp positions.
    pub fn rotated(&self, m: i64) -> Self {
        Self {
            ring: self.ring,
            state: rotate_state(&self.state, m),
        }
    }
}

/// Lamp `i` of the result carries the state of lamp `i - m`.
pub fn rotate_state(state: &[bool], m: i64) -> Vec<bool> {
    let n = state.len() as i64;
    (0..n)
        .map(|i| state[(i - m).rem_euclid(n) as usize])
        .collect()
}

/// Pattern of the ring on `grid` (`E_theta` only).
///
/// When the phi sampling is a multiple of the lamp count, lamp offsets are
/// taken from the exact integer trig table, so rotating the state by one lamp
/// rotates the sampled pattern exactly.
pub fn plasma_pattern(scenario: &PlasmaRingScenario, grid: &AngleGrid) -> Result<FarFieldPattern> {
    let ring = &scenario.ring;
    let np = grid.phi_count();
    let n = ring.lamps;
    let aligned = np % n == 0;
    let stride = (np / n) as i64;
    let on: Vec<usize> = on_lamps(&scenario.state).collect();
    let fields: Vec<Complex64> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / np, idx % np);
            let d = grid.direction(i, j);
            let lamps = on
                .iter()
                .map(|&l| {
                    if aligned {
                        let rel = (j as i64 - l as i64 * stride).rem_euclid(np as i64);
                        (rel, trig_at(rel, np as i64).0)
                    } else {
                        let phi_n = 2.0 * PI * l as f64 / n as f64;
                        (l as i64, (grid.phi()[j] - phi_n).cos())
                    }
                })
                .collect();
            ring.combine(d.sin_theta, lamps)
        })
        .collect();
    FarFieldPattern::new(grid.clone(), fields, vec![Complex64::new(0.0, 0.0); grid.len()], None)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlasmaCriterion {
    MaxGain,
    MinGain,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlasmaOptimum {
    pub state: Vec<bool>,
    /// `|F|^2` at the target for the returned state.
    pub value: f64,
    /// Number of states evaluated.
    pub evaluated: usize,
}

/// State with lamp `i` taken from bit `N-1-i` of `mask`, so ascending masks
/// are lexicographically ascending states (`false < true`).
pub fn state_from_mask(mask: u64, lamps: usize) -> Vec<bool> {
    (0..lamps).map(|i| (mask >> (lamps - 1 - i)) & 1 == 1).collect()
}

/// Exhaustive search over all `2^N` switch states for the best `|F|^2` at
/// `(theta, phi)`. Ties go to the lexicographically smallest state.
pub fn plasma_optimize(
    ring: &PlasmaRing,
    theta: f64,
    phi: f64,
    criterion: PlasmaCriterion,
) -> Result<PlasmaOptimum> {
    ring.validate()?;
    if ring.lamps > MAX_EXHAUSTIVE_LAMPS {
        return Err(Error::SearchTooLarge {
            lamps: ring.lamps,
            limit: MAX_EXHAUSTIVE_LAMPS,
        });
    }
    let count = 1u64 << ring.lamps;
    let values: Vec<f64> = (0..count)
        .into_par_iter()
        .map(|mask| ring.objective(&state_from_mask(mask, ring.lamps), theta, phi))
        .collect();
    let better = |a: f64, b: f64| match criterion {
        PlasmaCriterion::MaxGain => a > b,
        PlasmaCriterion::MinGain => a < b,
    };
    let mut best = 0usize;
    for (i, &v) in values.iter().enumerate().skip(1) {
        if better(v, values[best]) {
            best = i;
        }
    }
    Ok(PlasmaOptimum {
        state: state_from_mask(best as u64, ring.lamps),
        value: values[best],
        evaluated: values.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiation::{pattern_features, Cut};

    const K: f64 = 2.0 * PI;

    fn ring() -> PlasmaRing {
        // k rho = pi / 2
        PlasmaRing::new(8, 0.25, K).unwrap()
    }

    fn grid() -> AngleGrid {
        AngleGrid::new(181, 720).unwrap()
    }

    #[test]
    fn all_off_is_omnidirectional() {
        let s = PlasmaRingScenario::new(ring(), vec![false; 8]).unwrap();
        let p = plasma_pattern(&s, &grid()).unwrap();
        let g = p.grid();
        for i in 0..g.theta_count() {
            let first = p.sample(i, 0).0;
            assert!((0..g.phi_count()).all(|j| p.sample(i, j).0 == first));
        }
    }

    #[test]
    fn rotation_is_exact_on_aligned_grid() {
        let s = PlasmaRingScenario::new(ring(), vec![true, true, false, true, false, false, false, true]).unwrap();
        let g = grid();
        let p = plasma_pattern(&s, &g).unwrap();
        let stride = g.phi_count() / 8;
        for m in 1..8 {
            let r = plasma_pattern(&s.rotated(m as i64), &g).unwrap();
            for i in (0..181).step_by(7) {
                for j in 0..g.phi_count() {
                    assert_eq!(r.sample(i, (j + m * stride) % g.phi_count()), p.sample(i, j));
                }
            }
        }
    }

    #[test]
    fn contiguous_arc_is_unidirectional() {
        let s = PlasmaRingScenario::new(ring(), vec![true, true, true, true, false, false, false, false]).unwrap();
        let g = grid();
        let p = plasma_pattern(&s, &g).unwrap();
        let cut = p.cut(Cut::Azimuth { theta: PI / 2.0 }).unwrap();
        let (peak_j, peak) = cut
            .power
            .iter()
            .enumerate()
            .fold((0, 0.0), |acc, (j, &v)| if v > acc.1 { (j, v) } else { acc });
        let back = cut.power[(peak_j + g.phi_count() / 2) % g.phi_count()];
        assert!(10.0 * (peak / back).log10() > 3.0);
        // the ON arc is centered at 3*pi/8; the beam points away from it
        let peak_phi = cut.angle(peak_j);
        let arc_center = 3.0 * PI / 8.0;
        let sep = ((peak_phi - arc_center).rem_euclid(2.0 * PI) - PI).abs();
        assert!(sep < PI / 2.0, "peak at {peak_phi}");
        let f = pattern_features(&p, Cut::Azimuth { theta: PI / 2.0 }).unwrap();
        assert!(!f.peaks.is_empty());
    }

    #[test]
    fn point_evaluation_matches_grid() {
        let s = PlasmaRingScenario::new(ring(), vec![true, false, true, true, false, false, true, false]).unwrap();
        let g = grid();
        let p = plasma_pattern(&s, &g).unwrap();
        for j in [0, 90, 133, 450] {
            let v = s.ring.field(&s.state, PI / 2.0, g.phi()[j]);
            assert!((v - p.sample(90, j).0).norm() < 1e-14);
        }
        assert_eq!(s.ring.field(&s.state, PI / 2.0, g.phi()[180]), p.sample(90, 180).0);
    }

    #[test]
    fn optimizer_ties_and_dominance() {
        let uncoupled = ring().with_coupling(Complex64::new(0.0, 0.0)).unwrap();
        let opt = plasma_optimize(&uncoupled, PI / 2.0, 0.3, PlasmaCriterion::MaxGain).unwrap();
        assert_eq!(opt.state, vec![false; 8]);

        let r = ring();
        let opt = plasma_optimize(&r, PI / 2.0, 0.0, PlasmaCriterion::MaxGain).unwrap();
        assert_eq!(opt.evaluated, 256);
        assert!(opt.value >= r.objective(&[false; 8], PI / 2.0, 0.0));
        for mask in 0..256u64 {
            assert!(opt.value >= r.objective(&state_from_mask(mask, 8), PI / 2.0, 0.0));
        }
        let next = plasma_optimize(&r, PI / 2.0, 2.0 * PI / 8.0, PlasmaCriterion::MaxGain).unwrap();
        assert_eq!(next.value, opt.value);
        assert_eq!(r.objective(&rotate_state(&opt.state, 1), PI / 2.0, 2.0 * PI / 8.0), next.value);
        let worst = plasma_optimize(&r, PI / 2.0, 0.0, PlasmaCriterion::MinGain).unwrap();
        assert!(worst.value <= opt.value);
    }

    #[test]
    fn invalid_rings() {
        assert!(PlasmaRing::new(1, 0.2, K).is_err());
        assert!(PlasmaRing::new(8, -0.2, K).is_err());
        assert!(ring().with_coupling(Complex64::new(1.0, 0.0)).is_err());
        assert!(PlasmaRingScenario::new(ring(), vec![true; 3]).is_err());
        let big = PlasmaRing::new(21, 0.2, K).unwrap();
        assert!(matches!(
            plasma_optimize(&big, 1.0, 0.0, PlasmaCriterion::MaxGain),
            Err(Error::SearchTooLarge { .. })
        ));
    }
}
