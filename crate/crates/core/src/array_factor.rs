//! Discrete and continuous array factors.
//!
//! `AF(θ, φ) = Σ w_n exp(j k r_n·r̂)`; temporal phase shifts live in the
//! complex weights. The continuous line aperture is the limit of a dense,
//! uniformly spaced array.

use std::f64::consts::PI;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::numeric::{pairwise_sum_c, GaussLegendre};
use crate::radiation::{Direction, FarFieldPattern};
use crate::{Error, Point, Result};

/// Gauss-Legendre nodes per wavelength of aperture for the continuous AF.
const APERTURE_NODES_PER_WAVELENGTH: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LayoutKind {
    /// Regular grid with fixed separations `(D_x, D_y, D_z)`.
    FixedGrid { spacing: [f64; 3], counts: [usize; 3] },
    /// Arbitrary, individually movable element positions.
    Movable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayLayout {
    positions: Vec<Point>,
    kind: LayoutKind,
}

impl ArrayLayout {
    /// `counts[a]` elements along axis `a` spaced by `spacing[a]`, centered
    /// on the origin. Ordering is x fastest, then y, then z.
    pub fn fixed_grid(spacing: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        if counts.iter().any(|&c| c == 0) || spacing.iter().any(|s| !s.is_finite()) {
            return Err(Error::EmptyLayout);
        }
        let offset = |a: usize, i: usize| (i as f64 - (counts[a] - 1) as f64 / 2.0) * spacing[a];
        let mut positions = Vec::with_capacity(counts.iter().product());
        for iz in 0..counts[2] {
            for iy in 0..counts[1] {
                for ix in 0..counts[0] {
                    positions.push([offset(0, ix), offset(1, iy), offset(2, iz)]);
                }
            }
        }
        Ok(Self {
            positions,
            kind: LayoutKind::FixedGrid { spacing, counts },
        })
    }

    pub fn movable(positions: Vec<Point>) -> Result<Self> {
        if positions.is_empty() || positions.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::EmptyLayout);
        }
        Ok(Self {
            positions,
            kind: LayoutKind::Movable,
        })
    }

    /// All elements displaced by `d`; the result is a movable layout.
    pub fn translated(&self, d: Point) -> Self {
        Self {
            positions: self
                .positions
                .iter()
                .map(|p| [p[0] + d[0], p[1] + d[1], p[2] + d[2]])
                .collect(),
            kind: LayoutKind::Movable,
        }
    }

    pub fn positions(&self) -> &[Point] {
        &self.positions
    }

    pub fn kind(&self) -> &LayoutKind {
        &self.kind
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Complex element weights: amplitude and temporal phase `δ_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExcitationWeights(pub Vec<Complex64>);

impl ExcitationWeights {
    pub fn uniform(n: usize) -> Self {
        Self(vec![Complex64::new(1.0, 0.0); n])
    }

    pub fn from_amplitude_phase(amplitudes: &[f64], phases: &[f64]) -> Result<Self> {
        if amplitudes.len() != phases.len() {
            return Err(Error::LengthMismatch {
                left: amplitudes.len(),
                right: phases.len(),
            });
        }
        Ok(Self(
            amplitudes
                .iter()
                .zip(phases)
                .map(|(&a, &p)| Complex64::from_polar(a, p))
                .collect(),
        ))
    }

    /// Uniform amplitude with progressive phase `δ_n = -k r_n·r̂₀` that
    /// points the main beam at `(theta0, phi0)`.
    pub fn steered(layout: &ArrayLayout, k: f64, theta0: f64, phi0: f64) -> Self {
        let d = Direction::new(theta0, phi0);
        Self(
            layout
                .positions()
                .iter()
                .map(|&p| d.phase(p, k).conj())
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn total_magnitude(&self) -> f64 {
        self.0.iter().map(|w| w.norm()).sum()
    }
}

fn check_lengths(layout: &ArrayLayout, weights: &ExcitationWeights) -> Result<()> {
    if layout.len() != weights.len() {
        return Err(Error::LengthMismatch {
            left: layout.len(),
            right: weights.len(),
        });
    }
    Ok(())
}

fn af_in(layout: &ArrayLayout, weights: &ExcitationWeights, k: f64, d: Direction) -> Complex64 {
    let terms: Vec<Complex64> = layout
        .positions()
        .iter()
        .zip(&weights.0)
        .map(|(&p, &w)| w * d.phase(p, k))
        .collect();
    pairwise_sum_c(&terms)
}

/// `AF(θ, φ)`.
pub fn array_factor(
    layout: &ArrayLayout,
    weights: &ExcitationWeights,
    k: f64,
    theta: f64,
    phi: f64,
) -> Result<Complex64> {
    check_lengths(layout, weights)?;
    Ok(af_in(layout, weights, k, Direction::new(theta, phi)))
}

/// `AF` in a precomputed direction (e.g. a grid sample).
pub fn array_factor_in(
    layout: &ArrayLayout,
    weights: &ExcitationWeights,
    k: f64,
    direction: Direction,
) -> Result<Complex64> {
    check_lengths(layout, weights)?;
    Ok(af_in(layout, weights, k, direction))
}

/// `F = f · AF` pointwise on the element pattern's grid.
pub fn pattern_multiply(
    element: &FarFieldPattern,
    layout: &ArrayLayout,
    weights: &ExcitationWeights,
    k: f64,
) -> Result<FarFieldPattern> {
    check_lengths(layout, weights)?;
    Ok(element.modulated(|d| af_in(layout, weights, k, d)))
}

/// Aperture illumination `w(z)` on `[-a, a]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Taper {
    Uniform,
    /// `cos(pi z / 2a)`.
    Cosine,
}

impl Taper {
    pub fn weight(self, z: f64, half_length: f64) -> f64 {
        match self {
            Taper::Uniform => 1.0,
            Taper::Cosine => (PI * z / (2.0 * half_length)).cos(),
        }
    }
}

impl FromStr for Taper {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "uniform" => Ok(Taper::Uniform),
            "cosine" | "cos" => Ok(Taper::Cosine),
            _ => Err(Error::UnknownTaper(s.to_string())),
        }
    }
}

/// `∫_{-a}^{a} w(z) exp(j k z cosθ) dz` for a line aperture on the z axis.
pub fn continuous_aperture_af(half_length: f64, taper: Taper, k: f64, theta: f64) -> Result<Complex64> {
    if !(half_length.is_finite() && half_length > 0.0) {
        return Err(Error::InvalidScenario(format!(
            "aperture half-length must be > 0, got {half_length}"
        )));
    }
    let q = k * theta.cos();
    let wavelengths = 2.0 * half_length * k / (2.0 * PI);
    let panels = wavelengths.ceil().max(1.0) as usize;
    let gl = GaussLegendre::new(APERTURE_NODES_PER_WAVELENGTH);
    let h = 2.0 * half_length / panels as f64;
    let parts: Vec<Complex64> = (0..panels)
        .map(|p| {
            let a = -half_length + p as f64 * h;
            let re = gl.integrate(a, a + h, |z| taper.weight(z, half_length) * (q * z).cos());
            let im = gl.integrate(a, a + h, |z| taper.weight(z, half_length) * (q * z).sin());
            Complex64::new(re, im)
        })
        .collect();
    Ok(pairwise_sum_c(&parts))
}

/// Midpoint discretization of a line aperture into `n` elements along z
/// with weights `w(z_i) * 2a / n`, so the total weight matches the integral.
pub fn discretize_aperture(half_length: f64, taper: Taper, n: usize) -> Result<(ArrayLayout, ExcitationWeights)> {
    if n == 0 {
        return Err(Error::EmptyLayout);
    }
    let dz = 2.0 * half_length / n as f64;
    let z: Vec<f64> = (0..n).map(|i| -half_length + (i as f64 + 0.5) * dz).collect();
    let layout = ArrayLayout::movable(z.iter().map(|&z| [0.0, 0.0, z]).collect())?;
    let weights = ExcitationWeights(
        z.iter()
            .map(|&z| Complex64::new(taper.weight(z, half_length) * dz, 0.0))
            .collect(),
    );
    Ok((layout, weights))
}

/// Relative L∞ deviation between the discretized and continuous AF over
/// the supplied elevation angles.
pub fn aperture_deviation(half_length: f64, taper: Taper, n: usize, k: f64, thetas: &[f64]) -> Result<f64> {
    let (layout, weights) = discretize_aperture(half_length, taper, n)?;
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &t in thetas {
        let c = continuous_aperture_af(half_length, taper, k, t)?;
        let d = array_factor(&layout, &weights, k, t, 0.0)?;
        worst = worst.max((c - d).norm());
        scale = scale.max(c.norm());
    }
    Ok(worst / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    const K: f64 = 2.0 * PI;

    #[test]
    fn single_element_is_unity() {
        let layout = ArrayLayout::movable(vec![[0.0; 3]]).unwrap();
        let w = ExcitationWeights::uniform(1);
        for (t, p) in [(0.0, 0.0), (1.0, 2.0), (PI, 5.0)] {
            assert_eq!(array_factor(&layout, &w, K, t, p).unwrap(), Complex64::new(1.0, 0.0));
        }
    }

    #[test]
    fn two_element_pair() {
        let layout = ArrayLayout::fixed_grid([0.0, 0.0, 0.5], [1, 1, 2]).unwrap();
        assert_eq!(layout.positions()[0], [0.0, 0.0, -0.25]);
        let w = ExcitationWeights::uniform(2);
        let broadside = array_factor(&layout, &w, K, PI / 2.0, 0.0).unwrap();
        assert!((broadside - Complex64::new(2.0, 0.0)).norm() < 1e-15);
        let endfire = array_factor(&layout, &w, K, 0.0, 0.0).unwrap();
        assert!(endfire.norm() < 1e-15);
        assert!(array_factor(&layout, &ExcitationWeights::uniform(3), K, 0.0, 0.0).is_err());
    }

    #[test]
    fn taper_parsing() {
        assert_eq!("Uniform".parse::<Taper>().unwrap(), Taper::Uniform);
        assert_eq!("cosine".parse::<Taper>().unwrap(), Taper::Cosine);
        assert_eq!("hann".parse::<Taper>(), Err(Error::UnknownTaper("hann".into())));
    }

    #[test]
    fn uniform_aperture_matches_sinc() {
        let a = 2.0;
        let broadside = continuous_aperture_af(a, Taper::Uniform, K, PI / 2.0).unwrap();
        assert!((broadside.re - 2.0 * a).abs() < 1e-12 && broadside.im.abs() < 1e-12);
        for t in [0.1, 0.7, 1.2] {
            let q = K * f64::cos(t);
            let sinc = 2.0 * (q * a).sin() / q;
            let af = continuous_aperture_af(a, Taper::Uniform, K, t).unwrap();
            assert!((af.re - sinc).abs() < 1e-10);
        }
        // first null at k (2a) cos θ = 2π
        let theta_null = (PI / (K * a)).acos();
        assert!(continuous_aperture_af(a, Taper::Uniform, K, theta_null).unwrap().norm() < 1e-10);
    }

    #[test]
    fn cosine_taper_broadside() {
        let a = 1.0;
        let af = continuous_aperture_af(a, Taper::Cosine, K, PI / 2.0).unwrap();
        assert!((af.re - 4.0 * a / PI).abs() < 1e-12);
    }

    #[test]
    fn discrete_limit_converges() {
        let thetas: Vec<f64> = (0..=180).map(|i| (i as f64).to_radians()).collect();
        let errs: Vec<f64> = [16, 32, 64, 128, 256]
            .iter()
            .map(|&n| aperture_deviation(2.0, Taper::Uniform, n, K, &thetas).unwrap())
            .collect();
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
        assert!(errs[4] < 0.01);
    }

    #[test]
    fn steering_points_the_beam() {
        let layout = ArrayLayout::fixed_grid([0.0, 0.0, 0.5], [1, 1, 16]).unwrap();
        let theta0 = 60f64.to_radians();
        let w = ExcitationWeights::steered(&layout, K, theta0, 0.0);
        let best = (0..=720)
            .map(|i| (i as f64 * 0.25).to_radians())
            .max_by(|&a, &b| {
                let fa = array_factor(&layout, &w, K, a, 0.0).unwrap().norm();
                let fb = array_factor(&layout, &w, K, b, 0.0).unwrap().norm();
                fa.total_cmp(&fb)
            })
            .unwrap();
        assert!((best - theta0).abs() <= 0.25f64.to_radians());
    }

    #[test]
    fn common_translation_keeps_magnitude() {
        let layout = ArrayLayout::movable(vec![[0.1, 0.0, 0.0], [0.0, 0.3, -0.2], [0.4, 0.4, 0.1]]).unwrap();
        let w = ExcitationWeights::from_amplitude_phase(&[1.0, 0.5, 2.0], &[0.0, 1.0, -0.3]).unwrap();
        let moved = layout.translated([1.3, -0.7, 2.2]);
        for i in 0..20 {
            let t = 0.15 * i as f64;
            let a = array_factor(&layout, &w, K, t, 0.4 * i as f64).unwrap();
            let b = array_factor(&moved, &w, K, t, 0.4 * i as f64).unwrap();
            assert!((a.norm() - b.norm()).abs() < 1e-12);
            assert!(a.norm() <= w.total_magnitude() + 1e-12);
        }
    }
}
