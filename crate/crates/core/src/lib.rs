//! Eigenmode model of reconfigurable ("fluid") antennas.
//!
//! A radiator occupying a rectangular box `[-L, L] x [-W, W] x [-H, H]` carries
//! a scalar current that solves the inhomogeneous Helmholtz equation under
//! per-axis boundary conditions `a I + b dI/dn = 0`. The crate is organized
//! bottom-up:
//!
//! - [`eigenmode`]: harmonic eigenmode families and eigen-wavenumbers for
//!   Dirichlet, Neumann and Robin axes.
//! - [`spectral`]: feed projections, the truncated spectral Green's function
//!   and the excited current it produces.
//! - [`radiation`]: far-field eigenpatterns, their superposition, and pattern
//!   metrics (directivity, nulls, peaks, half-power beamwidth).
//! - [`array_factor`]: discrete and continuous array factors used as the
//!   fixed-layout baseline.
//! - [`reconfig`]: reconfiguration scenarios (dipole reshaping, switched
//!   parasitic ring, null steering by radiator shift, feed-position search).
//! - [`cli`]: configuration files, scenario runner and pattern export behind
//!   the `fluidrad` binary.
//!
//! Runnable walkthroughs of each capability live in `examples/`.

pub mod array_factor;
pub mod cli;
pub mod eigenmode;
mod error;
pub mod numeric;
pub mod radiation;
pub mod reconfig;
pub mod spectral;

use std::fmt;

pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use error::{Error, Result};

/// A point or displacement in meters, ordered `(x, y, z)`.
pub type Point = [f64; 3];

/// Cartesian axis of the radiator box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

pub mod prelude {
    pub use crate::array_factor::{
        array_factor, continuous_aperture_af, pattern_multiply, ArrayLayout, ExcitationWeights,
        Taper,
    };
    pub use crate::eigenmode::{
        axis_harmonics, eigen_wavenumber, enumerate_modes, AxisBc, AxisHarmonic,
        BoundaryCondition, BoundaryKind, DomainBox, Eigenmode, ModeIndex, Parity,
    };
    pub use crate::radiation::{
        cut_features, directivity, mode_pattern, pattern_features, pattern_features_with,
        total_pattern, translate_phase, AngleGrid, Cut, Direction, FarFieldPattern,
        FeatureThresholds,
    };
    pub use crate::spectral::{
        build_current, excited_mode_report, green_eval, modal_coefficient, FeedElement,
        FeedKind, FeedScheme, OperatingPoint, PortPhase, SpectralCurrent,
    };
    pub use crate::{Axis, Complex64, Error, Point, Result};
}
