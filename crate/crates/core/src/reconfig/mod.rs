//! Reconfiguration scenarios.
//!
//! - [`dipole`]: reshaping a dipole pattern by switching between a center
//!   port and an anti-phase port pair.
//! - [`plasma`]: a monopole surrounded by switchable parasitic lamps.
//! - [`null_steer`]: moving a pattern null by shifting a radiator against a
//!   fixed reference source.
//! - [`feed_search`]: choosing the feed position that maximizes or nulls the
//!   field in a target direction.

pub mod dipole;
pub mod feed_search;
pub mod null_steer;
pub mod plasma;

pub use dipole::{dipole_reshape, DipoleExcitation, DipoleScenario};
pub use feed_search::{feed_position_optimize, FeedCriterion, FeedOptimum, FeedSearch};
pub use null_steer::{null_steer_sweep, two_source_nulls, NullSteerScenario, SteerRecord, SteerTrace};
pub use plasma::{
    plasma_optimize, plasma_pattern, rotate_state, state_from_mask, ElementPattern, PlasmaCriterion, PlasmaOptimum, PlasmaRing,
    PlasmaRingScenario,
};
