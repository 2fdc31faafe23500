//! Far-field eigenpatterns and pattern metrics.
//!
//! A scalar current `J(r)` flowing along the polarization axis `u` radiates
//!
//! ```text
//! E(theta, phi) ∝ S(r̂) · (u - (u·r̂) r̂),    S(r̂) = ∫ J(r) exp(j k r̂·r) dV
//! ```
//!
//! Eigenmodes are separable, so `S` is a product of one-dimensional
//! transforms evaluated with mirrored Gauss-Legendre rules. Even harmonics
//! transform to purely real cosine integrals and odd harmonics to purely
//! imaginary sine integrals, which keeps parity nulls exact.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenmode::{AxisHarmonic, Eigenmode, Parity};
use crate::numeric::{pairwise_sum, pairwise_sum_c, trig_at, SymmetricRule};
use crate::spectral::SpectralCurrent;
use crate::{Axis, Error, Point, Result};

/// Gauss-Legendre nodes per panel; one panel spans one period of the
/// fastest oscillation in the integrand.
pub const NODES_PER_WAVELENGTH: usize = 64;

/// Floor applied when converting power to decibels.
pub const POWER_DB_FLOOR: f64 = -300.0;

const ANGLE_MATCH_TOL: f64 = 1e-9;

/// Unit vector direction with precomputed trigonometry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction {
    pub cos_theta: f64,
    pub sin_theta: f64,
    pub cos_phi: f64,
    pub sin_phi: f64,
}

impl Direction {
    pub fn new(theta: f64, phi: f64) -> Self {
        Self {
            cos_theta: theta.cos(),
            sin_theta: theta.sin(),
            cos_phi: phi.cos(),
            sin_phi: phi.sin(),
        }
    }

    /// `r̂ = (sinθ cosφ, sinθ sinφ, cosθ)`.
    pub fn unit(&self) -> Point {
        [
            self.sin_theta * self.cos_phi,
            self.sin_theta * self.sin_phi,
            self.cos_theta,
        ]
    }

    /// `(u·θ̂, u·φ̂)` for a unit current along `axis`.
    pub fn projection(&self, axis: Axis) -> (f64, f64) {
        match axis {
            Axis::X => (self.cos_theta * self.cos_phi, -self.sin_phi),
            Axis::Y => (self.cos_theta * self.sin_phi, self.cos_phi),
            Axis::Z => (-self.sin_theta, 0.0),
        }
    }

    /// `exp(j k r̂·d)`.
    pub fn phase(&self, displacement: Point, k: f64) -> Complex64 {
        let u = self.unit();
        let arg = k * (u[0] * displacement[0] + u[1] * displacement[1] + u[2] * displacement[2]);
        Complex64::from_polar(1.0, arg)
    }
}

/// Uniform spherical sampling: `theta` over `[0, pi]` with both endpoints,
/// `phi` over `[0, 2pi)`.
///
/// Trigonometric tables come from [`trig_at`], so mirrored samples carry
/// bitwise-identical magnitudes and `cos(pi/2)` is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleGrid {
    theta: Vec<f64>,
    phi: Vec<f64>,
    theta_trig: Vec<(f64, f64)>,
    phi_trig: Vec<(f64, f64)>,
}

impl AngleGrid {
    pub const MIN_THETA_SAMPLES: usize = 181;

    pub fn new(theta_count: usize, phi_count: usize) -> Result<Self> {
        if theta_count < Self::MIN_THETA_SAMPLES {
            return Err(Error::InvalidGrid(format!(
                "theta needs at least {} samples, got {theta_count}",
                Self::MIN_THETA_SAMPLES
            )));
        }
        if phi_count == 0 {
            return Err(Error::InvalidGrid("phi needs at least one sample".into()));
        }
        let tsteps = 2 * (theta_count as i64 - 1);
        let theta = (0..theta_count)
            .map(|i| PI * i as f64 / (theta_count - 1) as f64)
            .collect();
        let theta_trig = (0..theta_count as i64).map(|i| trig_at(i, tsteps)).collect();
        let phi = (0..phi_count)
            .map(|j| 2.0 * PI * j as f64 / phi_count as f64)
            .collect();
        let phi_trig = (0..phi_count as i64)
            .map(|j| trig_at(j, phi_count as i64))
            .collect();
        Ok(Self {
            theta,
            phi,
            theta_trig,
            phi_trig,
        })
    }

    /// Grid from angular steps in degrees; both must divide their range.
    pub fn with_step_deg(theta_step: f64, phi_step: f64) -> Result<Self> {
        let count = |range: f64, step: f64, what: &str| -> Result<usize> {
            if !(step.is_finite() && step > 0.0) {
                return Err(Error::InvalidGrid(format!("{what} step must be > 0")));
            }
            let n = range / step;
            if (n - n.round()).abs() > 1e-9 {
                return Err(Error::InvalidGrid(format!(
                    "{what} step {step} deg does not divide {range} deg"
                )));
            }
            Ok(n.round() as usize)
        };
        let nt = count(180.0, theta_step, "theta")? + 1;
        let np = count(360.0, phi_step, "phi")?;
        Self::new(nt, np)
    }

    /// The `phi = 0` / `phi = pi` plane only.
    pub fn elevation_plane(theta_count: usize) -> Result<Self> {
        Self::new(theta_count, 2)
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn theta_count(&self) -> usize {
        self.theta.len()
    }

    pub fn phi_count(&self) -> usize {
        self.phi.len()
    }

    pub fn len(&self) -> usize {
        self.theta.len() * self.phi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat sample index; theta-major.
    #[inline]
    pub fn index(&self, i_theta: usize, j_phi: usize) -> usize {
        i_theta * self.phi.len() + j_phi
    }

    pub fn direction(&self, i_theta: usize, j_phi: usize) -> Direction {
        let (cos_theta, sin_theta) = self.theta_trig[i_theta];
        let (cos_phi, sin_phi) = self.phi_trig[j_phi];
        Direction {
            cos_theta,
            sin_theta,
            cos_phi,
            sin_phi,
        }
    }

    pub fn directions(&self) -> impl Iterator<Item = Direction> + '_ {
        (0..self.theta.len())
            .flat_map(move |i| (0..self.phi.len()).map(move |j| self.direction(i, j)))
    }

    pub fn theta_step(&self) -> f64 {
        PI / (self.theta.len() - 1) as f64
    }

    pub fn phi_step(&self) -> f64 {
        2.0 * PI / self.phi.len() as f64
    }

    pub fn theta_index(&self, theta: f64) -> Option<usize> {
        let pos = theta / self.theta_step();
        let i = pos.round();
        if i < 0.0 || i as usize >= self.theta.len() || (pos - i).abs() * self.theta_step() > ANGLE_MATCH_TOL {
            return None;
        }
        Some(i as usize)
    }

    pub fn phi_index(&self, phi: f64) -> Option<usize> {
        let wrapped = phi.rem_euclid(2.0 * PI);
        let pos = wrapped / self.phi_step();
        let i = pos.round();
        if (pos - i).abs() * self.phi_step() > ANGLE_MATCH_TOL {
            return None;
        }
        Some(i as usize % self.phi.len())
    }
}

/// Sampled complex far field `(E_theta, E_phi)` on an [`AngleGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct FarFieldPattern {
    grid: AngleGrid,
    e_theta: Vec<Complex64>,
    e_phi: Vec<Complex64>,
    axis: Option<Axis>,
}

impl FarFieldPattern {
    pub fn new(
        grid: AngleGrid,
        e_theta: Vec<Complex64>,
        e_phi: Vec<Complex64>,
        axis: Option<Axis>,
    ) -> Result<Self> {
        if e_theta.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: e_theta.len(),
                right: grid.len(),
            });
        }
        if e_phi.len() != grid.len() {
            return Err(Error::LengthMismatch {
                left: e_phi.len(),
                right: grid.len(),
            });
        }
        Ok(Self {
            grid,
            e_theta,
            e_phi,
            axis,
        })
    }

    /// Unit `E_theta` everywhere.
    pub fn isotropic(grid: &AngleGrid) -> Self {
        Self::from_fn(grid, |_| Complex64::new(1.0, 0.0))
    }

    /// `E_theta = f(direction)`, `E_phi = 0`.
    pub fn from_fn<F>(grid: &AngleGrid, f: F) -> Self
    where
        F: Fn(Direction) -> Complex64,
    {
        let e_theta = grid.directions().map(f).collect();
        Self {
            grid: grid.clone(),
            e_theta,
            e_phi: vec![Complex64::new(0.0, 0.0); grid.len()],
            axis: None,
        }
    }

    pub fn grid(&self) -> &AngleGrid {
        &self.grid
    }

    pub fn e_theta(&self) -> &[Complex64] {
        &self.e_theta
    }

    pub fn e_phi(&self) -> &[Complex64] {
        &self.e_phi
    }

    pub fn axis(&self) -> Option<Axis> {
        self.axis
    }

    pub fn sample(&self, i_theta: usize, j_phi: usize) -> (Complex64, Complex64) {
        let idx = self.grid.index(i_theta, j_phi);
        (self.e_theta[idx], self.e_phi[idx])
    }

    /// `U = |E_theta|^2 + |E_phi|^2` per sample.
    pub fn power(&self) -> Vec<f64> {
        self.e_theta
            .iter()
            .zip(&self.e_phi)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }

    pub fn max_power(&self) -> f64 {
        self.power().into_iter().fold(0.0, f64::max)
    }

    /// Power in dB relative to the pattern maximum, floored at
    /// [`POWER_DB_FLOOR`]. An all-zero pattern maps to the floor.
    pub fn power_db_normalized(&self) -> Vec<f64> {
        let p = self.power();
        let max = p.iter().copied().fold(0.0, f64::max);
        p.into_iter().map(|u| power_to_db(u, max)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.e_theta
            .iter()
            .chain(&self.e_phi)
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        self.map_samples(|_, et, ep| (alpha * et, alpha * ep))
    }

    /// Pointwise `self + other`.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let axis = if self.axis == other.axis { self.axis } else { None };
        Ok(Self {
            grid: self.grid.clone(),
            e_theta: self.e_theta.iter().zip(&other.e_theta).map(|(a, b)| a + b).collect(),
            e_phi: self.e_phi.iter().zip(&other.e_phi).map(|(a, b)| a + b).collect(),
            axis,
        })
    }

    /// Multiply every sample by a scalar function of direction.
    pub fn modulated<F>(&self, f: F) -> Self
    where
        F: Fn(Direction) -> Complex64,
    {
        self.map_samples(|d, et, ep| {
            let s = f(d);
            (s * et, s * ep)
        })
    }

    fn map_samples<F>(&self, f: F) -> Self
    where
        F: Fn(Direction, Complex64, Complex64) -> (Complex64, Complex64),
    {
        let (e_theta, e_phi) = self
            .grid
            .directions()
            .zip(self.e_theta.iter().zip(&self.e_phi))
            .map(|(d, (&et, &ep))| f(d, et, ep))
            .unzip();
        Self {
            grid: self.grid.clone(),
            e_theta,
            e_phi,
            axis: self.axis,
        }
    }

    /// Power samples along a cut, ordered by cut angle.
    pub fn cut(&self, cut: Cut) -> Result<CutSamples> {
        let power = self.power();
        let g = &self.grid;
        match cut {
            Cut::Elevation { phi } => {
                let j0 = g.phi_index(phi).ok_or_else(|| Error::CutNotOnGrid(cut.to_string()))?;
                let n = g.theta_count();
                let mut samples: Vec<f64> = (0..n).map(|i| power[g.index(i, j0)]).collect();
                let back = g.phi_index(g.phi()[j0] + PI);
                match back {
                    Some(j1) if j1 != j0 => {
                        samples.extend((1..n - 1).rev().map(|i| power[g.index(i, j1)]));
                        Ok(CutSamples {
                            step: g.theta_step(),
                            power: samples,
                            circular: true,
                        })
                    }
                    _ => Ok(CutSamples {
                        step: g.theta_step(),
                        power: samples,
                        circular: false,
                    }),
                }
            }
            Cut::Azimuth { theta } => {
                let i0 = g.theta_index(theta).ok_or_else(|| Error::CutNotOnGrid(cut.to_string()))?;
                Ok(CutSamples {
                    step: g.phi_step(),
                    power: (0..g.phi_count()).map(|j| power[g.index(i0, j)]).collect(),
                    circular: true,
                })
            }
        }
    }
}

pub(crate) fn power_to_db(u: f64, max: f64) -> f64 {
    if max <= 0.0 || u <= 0.0 {
        return POWER_DB_FLOOR;
    }
    (10.0 * (u / max).log10()).max(POWER_DB_FLOOR)
}

/// A planar cut through the pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "plane")]
pub enum Cut {
    /// Fixed `phi`. When `phi + pi` is also sampled the cut is the full
    /// great circle: angle `psi` runs over `[0, 2pi)`, with `psi = theta` on
    /// the `phi` half-plane and `psi = 2pi - theta` on the opposite one.
    /// Otherwise it is the half circle `theta ∈ [0, pi]`.
    Elevation { phi: f64 },
    /// Fixed `theta`, angle is `phi`.
    Azimuth { theta: f64 },
}

impl fmt::Display for Cut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cut::Elevation { phi } => write!(f, "elevation phi={phi}"),
            Cut::Azimuth { theta } => write!(f, "azimuth theta={theta}"),
        }
    }
}

/// Power along a cut; sample `i` sits at angle `i * step`.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSamples {
    pub step: f64,
    pub power: Vec<f64>,
    pub circular: bool,
}

impl CutSamples {
    pub fn angle(&self, i: usize) -> f64 {
        i as f64 * self.step
    }

    pub fn max(&self) -> f64 {
        self.power.iter().copied().fold(0.0, f64::max)
    }
}

/// Relative levels used to classify nulls and peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureThresholds {
    /// A local minimum is a null when at or below this level (dB re peak).
    pub null_db: f64,
    /// A local maximum is a peak when at or above this level (dB re peak).
    pub peak_db: f64,
}

impl Default for FeatureThresholds {
    fn default() -> Self {
        Self {
            null_db: -30.0,
            peak_db: -10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PatternFeatures {
    /// Null angles in radians along the cut.
    pub nulls: Vec<f64>,
    /// Level of each null in dB relative to the cut maximum.
    pub null_levels_db: Vec<f64>,
    /// Peak angles in radians along the cut.
    pub peaks: Vec<f64>,
    /// Half-power beamwidth around the first global peak, radians.
    pub hpbw: Option<f64>,
    /// Global peak over the second-highest local maximum, dB.
    pub peak_ratio_db: Option<f64>,
}

struct Run {
    start: usize,
    len: usize,
    value: f64,
}

fn runs(c: &CutSamples) -> Option<Vec<Run>> {
    let u = &c.power;
    let n = u.len();
    if n == 0 {
        return None;
    }
    let start = if c.circular {
        (0..n).find(|&i| u[i] != u[(i + n - 1) % n])?
    } else {
        0
    };
    let mut out: Vec<Run> = Vec::new();
    for s in 0..n {
        let i = (start + s) % n;
        match out.last_mut() {
            Some(r) if r.value == u[i] => r.len += 1,
            _ => out.push(Run {
                start: i,
                len: 1,
                value: u[i],
            }),
        }
    }
    if out.len() == 1 {
        return None;
    }
    Some(out)
}

/// Local extrema of a cut as `(center angle, value)`.
fn extrema(c: &CutSamples) -> (Vec<(f64, f64)>, Vec<(f64, f64)>) {
    let Some(rs) = runs(c) else {
        return (Vec::new(), Vec::new());
    };
    let m = rs.len();
    let period = c.step * c.power.len() as f64;
    let mut maxima = Vec::new();
    let mut minima = Vec::new();
    for (idx, r) in rs.iter().enumerate() {
        let prev = if idx > 0 {
            Some(rs[idx - 1].value)
        } else if c.circular {
            Some(rs[m - 1].value)
        } else {
            None
        };
        let next = if idx + 1 < m {
            Some(rs[idx + 1].value)
        } else if c.circular {
            Some(rs[0].value)
        } else {
            None
        };
        let mut center = (r.start as f64 + (r.len - 1) as f64 / 2.0) * c.step;
        if c.circular {
            center = center.rem_euclid(period);
        }
        if prev.is_none_or(|p| p < r.value) && next.is_none_or(|q| q < r.value) {
            maxima.push((center, r.value));
        }
        if prev.is_none_or(|p| p > r.value) && next.is_none_or(|q| q > r.value) {
            minima.push((center, r.value));
        }
    }
    let by_angle = |a: &(f64, f64), b: &(f64, f64)| a.0.total_cmp(&b.0);
    maxima.sort_by(by_angle);
    minima.sort_by(by_angle);
    (maxima, minima)
}

fn half_power_beamwidth(c: &CutSamples) -> Option<f64> {
    let u = &c.power;
    let n = u.len() as isize;
    let max = c.max();
    if max <= 0.0 {
        return None;
    }
    let peak = u.iter().position(|&v| v == max)? as isize;
    let half = 0.5 * max;
    let at = |offset: isize| -> Option<f64> {
        let i = peak + offset;
        if c.circular {
            Some(u[i.rem_euclid(n) as usize])
        } else if (0..n).contains(&i) {
            Some(u[i as usize])
        } else {
            None
        }
    };
    let edge = |dir: isize| -> Option<f64> {
        let mut prev = max;
        for s in 1..n {
            let v = at(dir * s)?;
            if v < half {
                let frac = (prev - half) / (prev - v);
                return Some(dir as f64 * ((s - 1) as f64 + frac) * c.step);
            }
            prev = v;
        }
        None
    };
    let right = edge(1)?;
    let left = edge(-1)?;
    Some(right - left)
}

/// Nulls, peaks, beamwidth and peak ratio along `cut`.
pub fn pattern_features(pattern: &FarFieldPattern, cut: Cut) -> Result<PatternFeatures> {
    pattern_features_with(pattern, cut, FeatureThresholds::default())
}

pub fn pattern_features_with(
    pattern: &FarFieldPattern,
    cut: Cut,
    thresholds: FeatureThresholds,
) -> Result<PatternFeatures> {
    let samples = pattern.cut(cut)?;
    Ok(cut_features(&samples, thresholds))
}

pub fn cut_features(samples: &CutSamples, thresholds: FeatureThresholds) -> PatternFeatures {
    let max = samples.max();
    let (maxima, minima) = extrema(samples);
    if max <= 0.0 {
        return PatternFeatures {
            nulls: Vec::new(),
            null_levels_db: Vec::new(),
            peaks: Vec::new(),
            hpbw: None,
            peak_ratio_db: None,
        };
    }
    let null_level = max * 10f64.powf(thresholds.null_db / 10.0);
    let peak_level = max * 10f64.powf(thresholds.peak_db / 10.0);
    let (nulls, null_levels_db) = minima
        .iter()
        .filter(|&&(_, v)| v <= null_level)
        .map(|&(a, v)| (a, power_to_db(v, max)))
        .unzip();
    let peaks = maxima
        .iter()
        .filter(|&&(_, v)| v >= peak_level)
        .map(|&(a, _)| a)
        .collect();
    let mut levels: Vec<f64> = maxima.iter().map(|&(_, v)| v).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    let peak_ratio_db = if levels.len() >= 2 {
        Some(10.0 * (levels[0] / levels[1]).log10())
    } else {
        None
    };
    PatternFeatures {
        nulls,
        null_levels_db,
        peaks,
        hpbw: if maxima.is_empty() {
            None
        } else {
            half_power_beamwidth(samples)
        },
        peak_ratio_db,
    }
}

/// `4 pi max(U) / ∮ U dΩ`, trapezoidal in theta with the `sin(theta)`
/// Jacobian and uniform in phi. A single phi sample is taken to represent an
/// axisymmetric pattern.
pub fn directivity(pattern: &FarFieldPattern) -> Result<f64> {
    let g = pattern.grid();
    let u = pattern.power();
    let max = u.iter().copied().fold(0.0, f64::max);
    if !(max > 0.0 && max.is_finite()) {
        return Err(Error::ZeroPattern);
    }
    let nt = g.theta_count();
    let np = g.phi_count();
    let rows: Vec<f64> = (0..nt)
        .map(|i| {
            let ring: Vec<f64> = (0..np).map(|j| u[g.index(i, j)]).collect();
            let w = if i == 0 || i == nt - 1 { 0.5 } else { 1.0 };
            let (_, sin_t) = g.direction(i, 0).cos_sin_theta();
            w * sin_t * pairwise_sum(&ring) / np as f64
        })
        .collect();
    let integral = 2.0 * PI * g.theta_step() * pairwise_sum(&rows);
    Ok(4.0 * PI * max / integral)
}

impl Direction {
    fn cos_sin_theta(&self) -> (f64, f64) {
        (self.cos_theta, self.sin_theta)
    }
}

/// Multiply every sample by `exp(j k r̂·d)`: the pattern of the same source
/// displaced by `d`.
pub fn translate_phase(pattern: &FarFieldPattern, displacement: Point, k: f64) -> FarFieldPattern {
    pattern.modulated(|d| d.phase(displacement, k))
}

/// `∫_{-l}^{l} h(c) exp(j q c) dc` on a mirrored rule.
fn harmonic_transform(rule: &SymmetricRule, h: &AxisHarmonic, q: f64) -> Complex64 {
    let mut terms: Vec<f64> = rule
        .pairs()
        .iter()
        .map(|&(x, w)| match h.parity {
            Parity::Even => 2.0 * w * h.value(x) * (q * x).cos(),
            Parity::Odd => 2.0 * w * h.value(x) * (q * x).sin(),
        })
        .collect();
    if h.parity == Parity::Even && rule.center_weight() != 0.0 {
        terms.push(rule.center_weight() * h.value(0.0));
    }
    let s = pairwise_sum(&terms);
    match h.parity {
        Parity::Even => Complex64::new(s, 0.0),
        Parity::Odd => Complex64::new(0.0, s),
    }
}

fn check_k(k: f64) -> Result<()> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::InvalidOperatingPoint { k, q: f64::NAN });
    }
    Ok(())
}

/// Heuristic lobe guard: at least two elevation samples per expected lobe.
fn check_resolution(extents: &[Option<f64>; 3], k: f64, grid: &AngleGrid) -> Result<()> {
    let diameter = 2.0 * extents.iter().flatten().map(|l| l * l).sum::<f64>().sqrt();
    let lobes = k * diameter / PI + 1.0;
    let required = (2.0 * lobes).ceil() as usize;
    if grid.theta_count() < required {
        return Err(Error::GridTooCoarse {
            samples: grid.theta_count(),
            required,
        });
    }
    Ok(())
}

/// Separable radiation of a set of modal terms sharing one domain.
struct Plan<'a> {
    extents: [Option<f64>; 3],
    rules: [Option<SymmetricRule>; 3],
    /// Distinct harmonics per axis, keyed by index.
    harmonics: [Vec<(u32, AxisHarmonic)>; 3],
    /// Per term: amplitude times normalization, and the slot of each axis harmonic.
    terms: Vec<(Complex64, [usize; 3])>,
    _modes: std::marker::PhantomData<&'a Eigenmode>,
}

impl<'a> Plan<'a> {
    fn new(terms: &[(&'a Eigenmode, Complex64)], k: f64) -> Self {
        let extents = terms
            .first()
            .map(|(m, _)| [Axis::X, Axis::Y, Axis::Z].map(|a| m.domain().half_extent(a)))
            .unwrap_or([None; 3]);
        let mut harmonics: [BTreeMap<u32, AxisHarmonic>; 3] = Default::default();
        let mut kappa_max = [0.0f64; 3];
        for (mode, amp) in terms {
            for axis in Axis::ALL {
                let a = axis.index();
                let h = mode.harmonic(axis);
                harmonics[a].insert(mode.index().get(axis), h);
                if *amp != Complex64::new(0.0, 0.0) {
                    kappa_max[a] = kappa_max[a].max(h.wavenumber);
                }
            }
        }
        let rules = [0, 1, 2].map(|a| {
            extents[a].map(|l| SymmetricRule::for_oscillation(l, kappa_max[a] + k, NODES_PER_WAVELENGTH))
        });
        let harmonics = harmonics.map(|m| m.into_iter().collect::<Vec<_>>());
        let terms = terms
            .iter()
            .map(|(mode, amp)| {
                let slots = Axis::ALL.map(|axis| {
                    let idx = mode.index().get(axis);
                    harmonics[axis.index()]
                        .binary_search_by_key(&idx, |&(i, _)| i)
                        .expect("harmonic registered above")
                });
                (amp * mode.normalization(), slots)
            })
            .collect();
        Self {
            extents,
            rules,
            harmonics,
            terms,
            _modes: std::marker::PhantomData,
        }
    }

    /// Space factor `S(r̂)` of the superposition.
    fn space_factor(&self, d: &Direction, k: f64) -> Complex64 {
        let u = d.unit();
        let per_axis: [Vec<Complex64>; 3] = [0, 1, 2].map(|a| match &self.rules[a] {
            Some(rule) => self.harmonics[a]
                .iter()
                .map(|(_, h)| harmonic_transform(rule, h, k * u[a]))
                .collect(),
            None => vec![Complex64::new(1.0, 0.0); self.harmonics[a].len()],
        });
        let values: Vec<Complex64> = self
            .terms
            .iter()
            .map(|(amp, s)| amp * per_axis[0][s[0]] * per_axis[1][s[1]] * per_axis[2][s[2]])
            .collect();
        pairwise_sum_c(&values)
    }

    fn pattern(&self, axis: Axis, k: f64, grid: &AngleGrid) -> Result<FarFieldPattern> {
        check_resolution(&self.extents, k, grid)?;
        let fields: Vec<(Complex64, Complex64)> = (0..grid.len())
            .into_par_iter()
            .map(|idx| {
                let d = grid.direction(idx / grid.phi_count(), idx % grid.phi_count());
                let s = self.space_factor(&d, k);
                let (pt, pp) = d.projection(axis);
                (s * pt, s * pp)
            })
            .collect();
        let (e_theta, e_phi) = fields.into_iter().unzip();
        FarFieldPattern::new(grid.clone(), e_theta, e_phi, Some(axis))
    }
}

/// Far-field eigenpattern `f_nmp` of a unit-amplitude mode whose current
/// flows along `axis`.
pub fn mode_pattern(mode: &Eigenmode, axis: Axis, k: f64, grid: &AngleGrid) -> Result<FarFieldPattern> {
    check_k(k)?;
    Plan::new(&[(mode, Complex64::new(1.0, 0.0))], k).pattern(axis, k, grid)
}

/// `F = sum a_nmp f_nmp` radiated at the drive wavenumber of `current`.
pub fn total_pattern(current: &SpectralCurrent, axis: Axis, grid: &AngleGrid) -> Result<FarFieldPattern> {
    if current.is_empty() {
        return Err(Error::InvalidScenario("current has no modal terms".into()));
    }
    let k = current.operating_point().k;
    let terms: Vec<(&Eigenmode, Complex64)> = current
        .terms()
        .iter()
        .map(|t| (&t.mode, t.amplitude))
        .collect();
    Plan::new(&terms, k).pattern(axis, k, grid)
}

/// Far field of a unit-amplitude mode in a single direction.
pub fn mode_field_at(mode: &Eigenmode, axis: Axis, k: f64, direction: Direction) -> (Complex64, Complex64) {
    let s = Plan::new(&[(mode, Complex64::new(1.0, 0.0))], k).space_factor(&direction, k);
    let (pt, pp) = direction.projection(axis);
    (s * pt, s * pp)
}

/// Far field of `current` in a single direction.
pub fn field_at(current: &SpectralCurrent, axis: Axis, direction: Direction) -> (Complex64, Complex64) {
    let k = current.operating_point().k;
    let terms: Vec<(&Eigenmode, Complex64)> = current
        .terms()
        .iter()
        .map(|t| (&t.mode, t.amplitude))
        .collect();
    let s = Plan::new(&terms, k).space_factor(&direction, k);
    let (pt, pp) = direction.projection(axis);
    (s * pt, s * pp)
}

/// Radiate the summed current by direct tensor-product quadrature over the
/// box, without using separability. Intended for cross-checks; cost grows
/// with the product of per-axis node counts.
pub fn radiate_current(current: &SpectralCurrent, axis: Axis, grid: &AngleGrid) -> Result<FarFieldPattern> {
    if current.is_empty() {
        return Err(Error::InvalidScenario("current has no modal terms".into()));
    }
    let k = current.operating_point().k;
    let domain = current.domain();
    check_resolution(&Axis::ALL.map(|a| domain.half_extent(a)), k, grid)?;
    let kappa = current.max_axis_wavenumber();
    let mut nodes: Vec<(Point, f64)> = vec![([0.0; 3], 1.0)];
    for axis_a in Axis::ALL {
        let Some(l) = domain.half_extent(axis_a) else {
            continue;
        };
        let rule = SymmetricRule::for_oscillation(l, kappa + k, NODES_PER_WAVELENGTH);
        let mut line: Vec<(f64, f64)> = Vec::with_capacity(rule.node_count());
        for &(x, w) in rule.pairs() {
            line.push((x, w));
            line.push((-x, w));
        }
        if rule.center_weight() != 0.0 {
            line.push((0.0, rule.center_weight()));
        }
        nodes = nodes
            .iter()
            .flat_map(|&(p, w)| {
                line.iter().map(move |&(x, wx)| {
                    let mut q = p;
                    q[axis_a.index()] = x;
                    (q, w * wx)
                })
            })
            .collect();
    }
    let weighted: Vec<(Point, Complex64)> = nodes
        .into_iter()
        .map(|(p, w)| (p, current.value_at(p) * w))
        .collect();
    let fields: Vec<(Complex64, Complex64)> = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let d = grid.direction(idx / grid.phi_count(), idx % grid.phi_count());
            let v: Vec<Complex64> = weighted.iter().map(|(p, jw)| jw * d.phase(*p, k)).collect();
            let s = pairwise_sum_c(&v);
            let (pt, pp) = d.projection(axis);
            (s * pt, s * pp)
        })
        .collect();
    let (e_theta, e_phi) = fields.into_iter().unzip();
    FarFieldPattern::new(grid.clone(), e_theta, e_phi, Some(axis))
}
