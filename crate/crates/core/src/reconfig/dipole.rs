//! Dipole pattern reshaping by port configuration.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eigenmode::{BoundaryCondition, DomainBox};
use crate::radiation::{total_pattern, AngleGrid, FarFieldPattern};
use crate::spectral::{build_current, FeedScheme, OperatingPoint, PortPhase, SpectralCurrent};
use crate::{Axis, Error, Result};

/// Truncation ceiling used when none is given, in multiples of `k1`.
const DEFAULT_CEILING_HARMONICS: f64 = 16.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum DipoleExcitation {
    /// Single impulse at the center: excites the even modes.
    DifferentialCenter,
    /// Impulses at `±offset` with opposite weights: excites the odd modes.
    CommonDual { offset: f64 },
}

/// A Dirichlet wire of half-length `H` along `axis`, fed by one of two
/// port schemes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipoleScenario {
    pub half_length: f64,
    pub axis: Axis,
    pub excitation: DipoleExcitation,
    pub op: OperatingPoint,
    pub k_ceiling: f64,
}

impl DipoleScenario {
    /// z-directed dipole with the default truncation ceiling.
    pub fn new(half_length: f64, excitation: DipoleExcitation, op: OperatingPoint) -> Result<Self> {
        let k1 = PI / (2.0 * half_length);
        let s = Self {
            half_length,
            axis: Axis::Z,
            excitation,
            op,
            k_ceiling: (DEFAULT_CEILING_HARMONICS * k1).max(2.0 * op.k),
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        DomainBox::line(self.axis, self.half_length)?;
        if let DipoleExcitation::CommonDual { offset } = self.excitation {
            if !(offset > 0.0 && offset < self.half_length) {
                return Err(Error::InvalidScenario(format!(
                    "dual-port offset {offset} must lie in (0, {})",
                    self.half_length
                )));
            }
        }
        Ok(())
    }

    /// Eigen-wavenumber of mode `n`, `n pi / 2H`.
    pub fn resonance(&self, n: u32) -> f64 {
        n as f64 * PI / (2.0 * self.half_length)
    }

    pub fn domain(&self) -> Result<DomainBox> {
        DomainBox::line(self.axis, self.half_length)
    }

    pub fn feed(&self) -> FeedScheme {
        match self.excitation {
            DipoleExcitation::DifferentialCenter => FeedScheme::center_impulse(),
            DipoleExcitation::CommonDual { offset } => {
                FeedScheme::dual_impulse(self.axis, offset, PortPhase::AntiPhase)
            }
        }
    }

    pub fn current(&self) -> Result<SpectralCurrent> {
        self.validate()?;
        build_current(
            &self.domain()?,
            &BoundaryCondition::dirichlet(),
            &self.feed(),
            &self.op,
            self.k_ceiling,
        )
    }
}

/// Radiated pattern of the scenario's spectral current.
pub fn dipole_reshape(scenario: &DipoleScenario, grid: &AngleGrid) -> Result<FarFieldPattern> {
    total_pattern(&scenario.current()?, scenario.axis, grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radiation::{pattern_features, Cut};
    use num_complex::Complex64;

    const H: f64 = 0.25;

    fn grid() -> AngleGrid {
        AngleGrid::new(361, 2).unwrap()
    }

    #[test]
    fn differential_center_gives_doughnut() {
        let k1 = PI / (2.0 * H);
        let s = DipoleScenario::new(H, DipoleExcitation::DifferentialCenter, OperatingPoint::new(0.99 * k1, 100.0).unwrap()).unwrap();
        let f = pattern_features(&dipole_reshape(&s, &grid()).unwrap(), Cut::Elevation { phi: 0.0 }).unwrap();
        assert_eq!(f.peaks.len(), 2);
        assert_eq!(f.nulls, vec![0.0, PI]);
    }

    #[test]
    fn common_dual_gives_four_lobes() {
        let k2 = PI / H;
        let s = DipoleScenario::new(
            H,
            DipoleExcitation::CommonDual { offset: H / 2.0 },
            OperatingPoint::new(0.99 * k2, 100.0).unwrap(),
        )
        .unwrap();
        let p = dipole_reshape(&s, &grid()).unwrap();
        assert_eq!(p.sample(180, 0).0, Complex64::new(0.0, 0.0));
        let f = pattern_features(&p, Cut::Elevation { phi: 0.0 }).unwrap();
        assert_eq!(f.peaks.len(), 4);
    }

    #[test]
    fn parity_null_survives_off_resonance() {
        let k1 = PI / (2.0 * H);
        let s = DipoleScenario::new(
            H,
            DipoleExcitation::CommonDual { offset: H / 2.0 },
            OperatingPoint::new(0.3 * k1, 100.0).unwrap(),
        )
        .unwrap();
        let p = dipole_reshape(&s, &grid()).unwrap();
        assert_eq!(p.sample(180, 0).0, Complex64::new(0.0, 0.0));
        assert_eq!(p.sample(180, 1).0, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn invalid_offset_is_rejected() {
        let op = OperatingPoint::new(1.0, 100.0).unwrap();
        assert!(DipoleScenario::new(H, DipoleExcitation::CommonDual { offset: H }, op).is_err());
        assert!(DipoleScenario::new(H, DipoleExcitation::CommonDual { offset: 0.0 }, op).is_err());
    }
}
