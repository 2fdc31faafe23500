use thiserror::Error;

use crate::Axis;

/// Errors produced by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("half-extent along {axis} must be finite and > 0, got {value}")]
    InvalidExtent { axis: Axis, value: f64 },

    #[error("boundary coefficients along {axis} are both zero")]
    DegenerateBoundary { axis: Axis },

    #[error("boundary coefficients along {axis} must be finite")]
    NonFiniteBoundary { axis: Axis },

    /// Robin coefficients of opposite sign admit non-oscillatory (cosh/sinh)
    /// eigenfunctions, which the harmonic family does not represent.
    #[error("Robin coefficients a={a}, b={b} have opposite signs; only a*b > 0 is supported")]
    UnsupportedRobin { a: f64, b: f64 },

    #[error("bisection did not converge within {iterations} iterations near kappa={near}")]
    BisectionDiverged { iterations: usize, near: f64 },

    #[error("harmonic count must be >= 1")]
    EmptyRequest,

    #[error("mode index {index} is not valid along {axis}: {reason}")]
    IndexOutOfRange {
        axis: Axis,
        index: u32,
        reason: &'static str,
    },

    #[error("point ({x}, {y}, {z}) lies outside the radiator box")]
    OutsideBox { x: f64, y: f64, z: f64 },

    #[error("wavenumber ceiling must be finite and > 0, got {0}")]
    InvalidCeiling(f64),

    #[error("mode count exceeds the configured cap of {cap}")]
    TooManyModes { cap: usize },

    #[error("operating point requires k > 0 and Q > 0 (k={k}, q={q})")]
    InvalidOperatingPoint { k: f64, q: f64 },

    #[error("lossless drive k={k} coincides with eigen-wavenumber of mode ({n},{m},{p})")]
    Resonance { k: f64, n: u32, m: u32, p: u32 },

    #[error("feed scheme is empty or has only zero weights")]
    EmptyFeed,

    #[error("feed weight must be finite")]
    NonFiniteWeight,

    #[error("doublet derivative axis {0} is not an active axis of the domain")]
    InactiveDoubletAxis(Axis),

    #[error("truncation ceiling {ceiling} is below the drive wavenumber {k}")]
    CeilingBelowDrive { ceiling: f64, k: f64 },

    #[error("mode ({n},{m},{p}) is not part of the enumerated family below the ceiling")]
    UnknownMode { n: u32, m: u32, p: u32 },

    #[error("angle grid invalid: {0}")]
    InvalidGrid(String),

    #[error("grid too coarse: {samples} elevation samples, at least {required} needed")]
    GridTooCoarse { samples: usize, required: usize },

    #[error("pattern has no radiated power")]
    ZeroPattern,

    #[error("requested cut {0} is not on the grid")]
    CutNotOnGrid(String),

    #[error("pattern grids differ")]
    GridMismatch,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("array layout must contain at least one finite element position")]
    EmptyLayout,

    #[error("unknown taper `{0}` (expected `uniform` or `cosine`)")]
    UnknownTaper(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("exhaustive search over {lamps} lamps exceeds the limit of {limit}")]
    SearchTooLarge { lamps: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
