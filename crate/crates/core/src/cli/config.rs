//! Scenario configuration files (TOML).
//!
//! Every table rejects unknown keys. [`ScenarioConfig::resolved`] fills all
//! defaults explicitly so the echoed file reproduces the run.

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::units::{self, Quantity};
use super::CliError;
use crate::eigenmode::{AxisBc, BoundaryCondition, DomainBox};
use crate::radiation::{Cut, FeatureThresholds};
use crate::reconfig::{DipoleExcitation, ElementPattern};
use crate::spectral::{FeedElement, FeedScheme, OperatingPoint, PortPhase, DEFAULT_Q};
use crate::{Axis, Complex64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Modes,
    Pattern,
    Dipole,
    Plasma,
    Nullsteer,
    AfCompare,
    Optimize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: ScenarioKind,
    /// Frequency that gives bare `lambda` lengths their meaning.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_frequency: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<DomainConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feed: Option<FeedConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub features: Option<FeaturesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modes: Option<ModesConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dipole: Option<DipoleConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub plasma: Option<PlasmaConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nullsteer: Option<NullSteerConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub af_compare: Option<AfCompareConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeConfig>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySpec {
    /// `"dirichlet"` or `"neumann"`.
    Named(String),
    /// `a I + b dI/dn = 0` with `b` a length.
    Robin { a: f64, b: Quantity },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainConfig {
    /// Half-extents; omitted axes are inactive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<BoundarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_x: Option<BoundarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_y: Option<BoundarySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_z: Option<BoundarySpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedElementConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Quantity>,
    /// Derivative axis for a doublet; omitted for an impulse.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub doublet: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_re: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight_im: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FeedPreset {
    CenterImpulse,
    CenterDoublet,
    DualInPhase,
    DualAntiPhase,
    Custom,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeedConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<FeedPreset>,
    /// Doublet or port-pair axis.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    /// Port offset for the dual presets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<FeedElementConfig>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    /// Drive wavenumber (`rad/m` or a frequency).
    pub k: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_ceiling: Option<Quantity>,
    /// Direction of the radiating current; defaults to the only active axis
    /// of a 1-D domain, otherwise z.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub current_axis: Option<Axis>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_step: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub phi_step: Option<Quantity>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CutPlane {
    Elevation,
    Azimuth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeaturesConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut: Option<CutPlane>,
    /// `phi` of an elevation cut or `theta` of an azimuth cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cut_angle: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub null_db: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub peak_db: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    DbNormalized,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<OutputFormat>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalization: Option<Normalization>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    pub k_ceiling: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DipoleMode {
    DifferentialCenter,
    CommonDual,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DipoleConfig {
    pub half_length: Quantity,
    pub excitation: DipoleMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
    /// Port offset for `common-dual`; defaults to half the half-length.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Quantity>,
    /// Drive relative to the resonance the excitation targets (mode 1 for
    /// `differential-center`, mode 2 for `common-dual`). Ignored when `k` is set.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive_ratio: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_ceiling: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlasmaConfig {
    pub radius: Quantity,
    pub frequency: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lamps: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_magnitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupling_phase: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub element: Option<ElementPattern>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NullSteerConfig {
    pub frequency: Quantity,
    pub shift_min: Quantity,
    pub shift_max: Quantity,
    pub shift_step: Quantity,
    /// Half-length of the z-directed radiator (Dirichlet, mode 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radiator_half_length: Option<Quantity>,
    /// Radiator offset along y at zero shift.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_offset: Option<Quantity>,
    /// Phase of the unit-magnitude reference source.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_phase: Option<Quantity>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub track_from: Option<Quantity>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AfCompareConfig {
    pub frequency: Quantity,
    pub half_length: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub taper: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elements: Option<Vec<usize>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizeProblem {
    Plasma,
    Feed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptimizeCriterion {
    Max,
    Min,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeConfig {
    pub problem: OptimizeProblem,
    pub target_theta: Quantity,
    pub target_phi: Quantity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub criterion: Option<OptimizeCriterion>,
    /// Feed-search grid spacing.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolution: Option<Quantity>,
    /// Polarization axis of the radiating current (feed problem).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<Axis>,
}

fn missing(key: &str) -> CliError {
    CliError::config(key, format!("`[{key}]` is required for this scenario kind"))
}

fn require<'a, T>(v: &'a Option<T>, key: &str) -> Result<&'a T, CliError> {
    v.as_ref().ok_or_else(|| missing(key))
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| {
            let message = e.message().to_string();
            let key = unknown_key(&message);
            CliError {
                kind: super::ErrorKind::Config,
                key,
                message: e.to_string().trim().to_string(),
            }
        })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn reference_hz(&self) -> Result<Option<f64>, CliError> {
        self.reference_frequency
            .as_ref()
            .map(|q| units::frequency(q, "reference_frequency"))
            .transpose()
    }

    /// Copy with every default written out and every quantity validated.
    pub fn resolved(&self) -> Result<Self, CliError> {
        let mut c = self.clone();
        let kind = c.kind;
        let needs_pattern = matches!(
            kind,
            ScenarioKind::Pattern | ScenarioKind::Dipole | ScenarioKind::Plasma | ScenarioKind::Nullsteer
        );
        if needs_pattern {
            let g = c.grid.get_or_insert(GridConfig {
                theta_step: None,
                phi_step: None,
            });
            g.theta_step.get_or_insert(Quantity::degrees(0.5));
            g.phi_step.get_or_insert(Quantity::degrees(match kind {
                ScenarioKind::Plasma | ScenarioKind::Nullsteer => 0.5,
                _ => 90.0,
            }));
            let o = c.output.get_or_insert(OutputConfig {
                format: None,
                normalization: None,
            });
            o.format.get_or_insert(OutputFormat::Csv);
            o.normalization.get_or_insert(Normalization::DbNormalized);
            let f = c.features.get_or_insert(FeaturesConfig {
                cut: None,
                cut_angle: None,
                null_db: None,
                peak_db: None,
            });
            let defaults = FeatureThresholds::default();
            f.null_db.get_or_insert(defaults.null_db);
            f.peak_db.get_or_insert(defaults.peak_db);
            let azimuthal = matches!(kind, ScenarioKind::Plasma | ScenarioKind::Nullsteer);
            f.cut.get_or_insert(if azimuthal { CutPlane::Azimuth } else { CutPlane::Elevation });
            f.cut_angle.get_or_insert(Quantity::degrees(if azimuthal { 90.0 } else { 0.0 }));
        }
        match kind {
            ScenarioKind::Modes => {
                require(&c.domain, "domain")?;
                let m = c.modes.as_mut().ok_or_else(|| missing("modes"))?;
                m.cap.get_or_insert(crate::eigenmode::DEFAULT_MODE_CAP);
                fill_domain(c.domain.as_mut().expect("checked"));
            }
            ScenarioKind::Pattern => {
                require(&c.domain, "domain")?;
                fill_domain(c.domain.as_mut().expect("checked"));
                let default_axis = {
                    let dom = c.domain.as_ref().expect("checked");
                    let active: Vec<Axis> = Axis::ALL
                        .into_iter()
                        .filter(|&a| match a {
                            Axis::X => dom.x.is_some(),
                            Axis::Y => dom.y.is_some(),
                            Axis::Z => dom.z.is_some(),
                        })
                        .collect();
                    if active.len() == 1 { active[0] } else { Axis::Z }
                };
                let drive = c.drive.as_mut().ok_or_else(|| missing("drive"))?;
                drive.q.get_or_insert(DEFAULT_Q);
                drive.current_axis.get_or_insert(default_axis);
                if drive.k_ceiling.is_none() {
                    let k = units::wavenumber(&drive.k, "drive.k")?;
                    drive.k_ceiling = Some(Quantity::rad_per_m(8.0 * k));
                }
                let feed = c.feed.get_or_insert(FeedConfig {
                    preset: None,
                    axis: None,
                    offset: None,
                    elements: None,
                });
                feed.preset.get_or_insert(FeedPreset::CenterImpulse);
                if matches!(feed.preset, Some(FeedPreset::CenterDoublet | FeedPreset::DualInPhase | FeedPreset::DualAntiPhase)) {
                    let axis = feed.axis.get_or_insert(Axis::Z);
                    let axis = *axis;
                    if feed.preset != Some(FeedPreset::CenterDoublet) && feed.offset.is_none() {
                        let dom = c.domain.as_ref().expect("checked");
                        let l = axis_extent(dom, axis, c.reference_frequency.as_ref())?
                            .ok_or_else(|| CliError::config("feed.axis", format!("axis {axis} is not active in [domain]")))?;
                        feed.offset = Some(Quantity::meters(0.5 * l));
                    }
                }
            }
            ScenarioKind::Dipole => {
                let d = c.dipole.as_mut().ok_or_else(|| missing("dipole"))?;
                d.axis.get_or_insert(Axis::Z);
                d.q.get_or_insert(DEFAULT_Q);
                let reference = self.reference_hz()?;
                let h = units::length(&d.half_length, "dipole.half_length", reference)?;
                if d.excitation == DipoleMode::CommonDual && d.offset.is_none() {
                    d.offset = Some(Quantity::meters(0.5 * h));
                }
                if d.k.is_none() {
                    d.drive_ratio.get_or_insert(0.99);
                }
                if d.k_ceiling.is_none() {
                    let k1 = PI / (2.0 * h);
                    let k = match &d.k {
                        Some(q) => units::wavenumber(q, "dipole.k")?,
                        None => 0.0,
                    };
                    d.k_ceiling = Some(Quantity::rad_per_m((16.0 * k1).max(2.0 * k)));
                }
            }
            ScenarioKind::Plasma => {
                let p = c.plasma.as_mut().ok_or_else(|| missing("plasma"))?;
                let n = *p.lamps.get_or_insert(8);
                p.state.get_or_insert(vec![false; n]);
                p.coupling_magnitude.get_or_insert(0.4);
                p.coupling_phase.get_or_insert(Quantity::degrees(180.0));
                p.element.get_or_insert(ElementPattern::Monopole);
            }
            ScenarioKind::Nullsteer => {
                let s = c.nullsteer.as_mut().ok_or_else(|| missing("nullsteer"))?;
                let f = units::frequency(&s.frequency, "nullsteer.frequency")?;
                let lambda = units::SPEED_OF_LIGHT / f;
                s.radiator_half_length.get_or_insert(Quantity::meters(0.25 * lambda));
                s.base_offset.get_or_insert(Quantity::meters(0.5 * lambda));
                s.reference_phase.get_or_insert(Quantity::degrees(180.0));
                s.track_from.get_or_insert(Quantity::degrees(0.0));
            }
            ScenarioKind::AfCompare => {
                let a = c.af_compare.as_mut().ok_or_else(|| missing("af_compare"))?;
                a.taper.get_or_insert("uniform".into());
                a.elements.get_or_insert(vec![16, 32, 64, 128, 256]);
            }
            ScenarioKind::Optimize => {
                let o = c.optimize.as_mut().ok_or_else(|| missing("optimize"))?;
                o.criterion.get_or_insert(OptimizeCriterion::Max);
                match o.problem {
                    OptimizeProblem::Plasma => {
                        let p = c.plasma.as_mut().ok_or_else(|| missing("plasma"))?;
                        if p.state.is_some() {
                            return Err(CliError::config(
                                "plasma.state",
                                "the state is the search variable and must not be given",
                            ));
                        }
                        p.lamps.get_or_insert(8);
                        p.coupling_magnitude.get_or_insert(0.4);
                        p.coupling_phase.get_or_insert(Quantity::degrees(180.0));
                        p.element.get_or_insert(ElementPattern::Monopole);
                    }
                    OptimizeProblem::Feed => {
                        o.axis.get_or_insert(Axis::Z);
                        let dom = c.domain.as_mut().ok_or_else(|| missing("domain"))?;
                        fill_domain(dom);
                        let drive = c.drive.as_mut().ok_or_else(|| missing("drive"))?;
                        drive.q.get_or_insert(DEFAULT_Q);
                        if drive.k_ceiling.is_none() {
                            let k = units::wavenumber(&drive.k, "drive.k")?;
                            drive.k_ceiling = Some(Quantity::rad_per_m(8.0 * k));
                        }
                        if o.resolution.is_none() {
                            let dom = c.domain.as_ref().expect("checked");
                            let l = Axis::ALL
                                .into_iter()
                                .filter_map(|a| axis_extent(dom, a, c.reference_frequency.as_ref()).transpose())
                                .collect::<Result<Vec<f64>, _>>()?
                                .into_iter()
                                .fold(0.0, f64::max);
                            o.resolution = Some(Quantity::meters(l / 20.0));
                        }
                    }
                }
            }
        }
        // validate every field by building the typed scenario
        Resolved::from_config(&c)?;
        Ok(c)
    }
}

fn unknown_key(message: &str) -> Option<String> {
    let rest = message.strip_prefix("unknown field `")?;
    Some(rest.split('`').next()?.to_string())
}

fn fill_domain(d: &mut DomainConfig) {
    d.boundary.get_or_insert(BoundarySpec::Named("dirichlet".into()));
}

fn axis_extent(d: &DomainConfig, axis: Axis, reference: Option<&Quantity>) -> Result<Option<f64>, CliError> {
    let reference = reference
        .map(|q| units::frequency(q, "reference_frequency"))
        .transpose()?;
    let q = match axis {
        Axis::X => &d.x,
        Axis::Y => &d.y,
        Axis::Z => &d.z,
    };
    q.as_ref()
        .map(|q| units::length(q, &format!("domain.{axis}"), reference))
        .transpose()
}

fn boundary(spec: &BoundarySpec, key: &str, reference: Option<f64>) -> Result<AxisBc, CliError> {
    match spec {
        BoundarySpec::Named(n) => match n.as_str() {
            "dirichlet" => Ok(AxisBc::dirichlet()),
            "neumann" => Ok(AxisBc::neumann()),
            other => Err(CliError::config(
                key,
                format!("unknown boundary `{other}` (dirichlet, neumann or {{ a, b }})"),
            )),
        },
        BoundarySpec::Robin { a, b } => Ok(AxisBc::robin(*a, units::length(b, &format!("{key}.b"), reference)?)),
    }
}

/// Typed, unit-resolved view of a configuration.
pub struct Resolved {
    pub reference: Option<f64>,
}

pub struct DomainSpec {
    pub domain: DomainBox,
    pub bc: BoundaryCondition,
}

impl Resolved {
    pub fn from_config(c: &ScenarioConfig) -> Result<Self, CliError> {
        let r = Resolved {
            reference: c.reference_hz()?,
        };
        if let Some(d) = &c.domain {
            r.domain(d)?;
        }
        if let (Some(f), Some(d)) = (&c.feed, &c.domain) {
            r.feed(f, d)?;
        }
        if let Some(d) = &c.drive {
            r.drive(d)?;
        }
        if let Some(g) = &c.grid {
            r.grid(g)?;
        }
        if let Some(f) = &c.features {
            r.features(f)?;
        }
        if let Some(m) = &c.modes {
            units::wavenumber(&m.k_ceiling, "modes.k_ceiling")?;
        }
        if let Some(d) = &c.dipole {
            r.dipole(d)?;
        }
        if let Some(p) = &c.plasma {
            r.plasma_ring(p)?;
            if let Some(s) = &p.state {
                if s.len() != p.lamps.unwrap_or(8) {
                    return Err(CliError::config(
                        "plasma.state",
                        format!("state has {} entries for {} lamps", s.len(), p.lamps.unwrap_or(8)),
                    ));
                }
            }
        }
        if let Some(s) = &c.nullsteer {
            r.nullsteer(s)?;
        }
        if let Some(a) = &c.af_compare {
            r.af_compare(a)?;
        }
        if let Some(o) = &c.optimize {
            units::angle(&o.target_theta, "optimize.target_theta")?;
            units::angle(&o.target_phi, "optimize.target_phi")?;
            if let Some(q) = &o.resolution {
                let v = r.length(q, "optimize.resolution")?;
                if v <= 0.0 {
                    return Err(CliError::config("optimize.resolution", "must be > 0"));
                }
            }
        }
        Ok(r)
    }

    pub fn length(&self, q: &Quantity, key: &str) -> Result<f64, CliError> {
        units::length(q, key, self.reference)
    }

    pub fn domain(&self, d: &DomainConfig) -> Result<DomainSpec, CliError> {
        let ext = |q: &Option<Quantity>, key: &str| q.as_ref().map(|q| self.length(q, key)).transpose();
        let domain = DomainBox::new(ext(&d.x, "domain.x")?, ext(&d.y, "domain.y")?, ext(&d.z, "domain.z")?)
            .map_err(|e| CliError::config("domain", e.to_string()))?;
        let default = d.boundary.clone().unwrap_or(BoundarySpec::Named("dirichlet".into()));
        let per = |o: &Option<BoundarySpec>, key: &str| -> Result<AxisBc, CliError> {
            match o {
                Some(s) => boundary(s, key, self.reference),
                None => boundary(&default, "domain.boundary", self.reference),
            }
        };
        let bc = BoundaryCondition::new(
            per(&d.boundary_x, "domain.boundary_x")?,
            per(&d.boundary_y, "domain.boundary_y")?,
            per(&d.boundary_z, "domain.boundary_z")?,
        );
        bc.validate_for(&domain)
            .map_err(|e| CliError::config("domain.boundary", e.to_string()))?;
        Ok(DomainSpec { domain, bc })
    }

    pub fn feed(&self, f: &FeedConfig, d: &DomainConfig) -> Result<FeedScheme, CliError> {
        let dom = self.domain(d)?.domain;
        let axis = f.axis.unwrap_or(Axis::Z);
        let offset = || -> Result<f64, CliError> {
            let q = f.offset.as_ref().ok_or_else(|| CliError::config("feed.offset", "required for dual presets"))?;
            self.length(q, "feed.offset")
        };
        let scheme = match f.preset.unwrap_or(FeedPreset::CenterImpulse) {
            FeedPreset::CenterImpulse => FeedScheme::center_impulse(),
            FeedPreset::CenterDoublet => FeedScheme::center_doublet(axis),
            FeedPreset::DualInPhase => FeedScheme::dual_impulse(axis, offset()?, PortPhase::InPhase),
            FeedPreset::DualAntiPhase => FeedScheme::dual_impulse(axis, offset()?, PortPhase::AntiPhase),
            FeedPreset::Custom => {
                let list = f
                    .elements
                    .as_ref()
                    .ok_or_else(|| CliError::config("feed.elements", "required for the custom preset"))?;
                let mut elements = Vec::new();
                for (i, e) in list.iter().enumerate() {
                    let coord = |q: &Option<Quantity>, a: &str| -> Result<f64, CliError> {
                        q.as_ref()
                            .map(|q| self.length(q, &format!("feed.elements[{i}].{a}")))
                            .transpose()
                            .map(|v| v.unwrap_or(0.0))
                    };
                    let position = [coord(&e.x, "x")?, coord(&e.y, "y")?, coord(&e.z, "z")?];
                    let weight = Complex64::new(e.weight_re.unwrap_or(1.0), e.weight_im.unwrap_or(0.0));
                    elements.push(match e.doublet {
                        Some(a) => FeedElement::doublet(position, a, weight),
                        None => FeedElement::impulse(position, weight),
                    });
                }
                FeedScheme::new("custom", elements).map_err(|e| CliError::config("feed.elements", e.to_string()))?
            }
        };
        scheme
            .validate_in(&dom)
            .map_err(|e| CliError::config("feed", e.to_string()))?;
        Ok(scheme)
    }

    pub fn drive(&self, d: &DriveConfig) -> Result<(OperatingPoint, Option<f64>), CliError> {
        let k = units::wavenumber(&d.k, "drive.k")?;
        let op = OperatingPoint::new(k, d.q.unwrap_or(DEFAULT_Q))
            .map_err(|e| CliError::config("drive.q", e.to_string()))?;
        let ceiling = d
            .k_ceiling
            .as_ref()
            .map(|q| units::wavenumber(q, "drive.k_ceiling"))
            .transpose()?;
        if let Some(c) = ceiling {
            if c < k {
                return Err(CliError::config("drive.k_ceiling", "ceiling must be >= drive k"));
            }
        }
        Ok((op, ceiling))
    }

    pub fn grid(&self, g: &GridConfig) -> Result<crate::radiation::AngleGrid, CliError> {
        let t = units::angle(g.theta_step.as_ref().unwrap_or(&Quantity::degrees(0.5)), "grid.theta_step")?;
        let p = units::angle(g.phi_step.as_ref().unwrap_or(&Quantity::degrees(90.0)), "grid.phi_step")?;
        crate::radiation::AngleGrid::with_step_deg(t.to_degrees(), p.to_degrees())
            .map_err(|e| CliError::config("grid", e.to_string()))
    }

    pub fn features(&self, f: &FeaturesConfig) -> Result<(Cut, FeatureThresholds), CliError> {
        let angle = f
            .cut_angle
            .as_ref()
            .map(|q| units::angle(q, "features.cut_angle"))
            .transpose()?
            .unwrap_or(0.0);
        let cut = match f.cut.unwrap_or(CutPlane::Elevation) {
            CutPlane::Elevation => Cut::Elevation { phi: angle },
            CutPlane::Azimuth => Cut::Azimuth { theta: angle },
        };
        let d = FeatureThresholds::default();
        let t = FeatureThresholds {
            null_db: f.null_db.unwrap_or(d.null_db),
            peak_db: f.peak_db.unwrap_or(d.peak_db),
        };
        if !(t.null_db < 0.0 && t.peak_db < 0.0) {
            return Err(CliError::config("features", "thresholds must be negative dB levels"));
        }
        Ok((cut, t))
    }

    pub fn dipole(&self, d: &DipoleConfig) -> Result<crate::reconfig::DipoleScenario, CliError> {
        let h = self.length(&d.half_length, "dipole.half_length")?;
        let excitation = match d.excitation {
            DipoleMode::DifferentialCenter => DipoleExcitation::DifferentialCenter,
            DipoleMode::CommonDual => DipoleExcitation::CommonDual {
                offset: match &d.offset {
                    Some(q) => self.length(q, "dipole.offset")?,
                    None => 0.5 * h,
                },
            },
        };
        let resonant_index = match d.excitation {
            DipoleMode::DifferentialCenter => 1.0,
            DipoleMode::CommonDual => 2.0,
        };
        let k = match &d.k {
            Some(q) => units::wavenumber(q, "dipole.k")?,
            None => d.drive_ratio.unwrap_or(0.99) * resonant_index * PI / (2.0 * h),
        };
        let op = OperatingPoint::new(k, d.q.unwrap_or(DEFAULT_Q))
            .map_err(|e| CliError::config("dipole", e.to_string()))?;
        let mut s = crate::reconfig::DipoleScenario::new(h, excitation, op)
            .map_err(|e| CliError::config("dipole", e.to_string()))?;
        s.axis = d.axis.unwrap_or(Axis::Z);
        if let Some(q) = &d.k_ceiling {
            s.k_ceiling = units::wavenumber(q, "dipole.k_ceiling")?;
            if s.k_ceiling < k {
                return Err(CliError::config("dipole.k_ceiling", "ceiling must be >= drive k"));
            }
        }
        Ok(s)
    }

    pub fn plasma_ring(&self, p: &PlasmaConfig) -> Result<crate::reconfig::PlasmaRing, CliError> {
        let f = units::frequency(&p.frequency, "plasma.frequency")?;
        let reference = Some(self.reference.unwrap_or(f));
        let radius = units::length(&p.radius, "plasma.radius", reference)?;
        let k = 2.0 * PI * f / units::SPEED_OF_LIGHT;
        let phase = p
            .coupling_phase
            .as_ref()
            .map(|q| units::angle(q, "plasma.coupling_phase"))
            .transpose()?
            .unwrap_or(PI);
        let coupling = Complex64::from_polar(p.coupling_magnitude.unwrap_or(0.4), phase);
        let ring = crate::reconfig::PlasmaRing::new(p.lamps.unwrap_or(8), radius, k)
            .and_then(|r| r.with_coupling(coupling))
            .map_err(|e| CliError::config("plasma", e.to_string()))?;
        Ok(ring.with_element(p.element.unwrap_or(ElementPattern::Monopole)))
    }

    /// Frequency (Hz), radiator half-length, base offset, reference weight,
    /// shift range and step, tracking start.
    pub fn nullsteer(&self, s: &NullSteerConfig) -> Result<NullSteerSpec, CliError> {
        let f = units::frequency(&s.frequency, "nullsteer.frequency")?;
        let reference = Some(self.reference.unwrap_or(f));
        let len = |q: &Quantity, key: &str| units::length(q, key, reference);
        let lambda = units::SPEED_OF_LIGHT / f;
        let spec = NullSteerSpec {
            k: 2.0 * PI / lambda,
            half_length: match &s.radiator_half_length {
                Some(q) => len(q, "nullsteer.radiator_half_length")?,
                None => 0.25 * lambda,
            },
            base_offset: match &s.base_offset {
                Some(q) => len(q, "nullsteer.base_offset")?,
                None => 0.5 * lambda,
            },
            reference_weight: Complex64::from_polar(
                1.0,
                s.reference_phase
                    .as_ref()
                    .map(|q| units::angle(q, "nullsteer.reference_phase"))
                    .transpose()?
                    .unwrap_or(PI),
            ),
            shift_min: len(&s.shift_min, "nullsteer.shift_min")?,
            shift_max: len(&s.shift_max, "nullsteer.shift_max")?,
            shift_step: len(&s.shift_step, "nullsteer.shift_step")?,
            track_from: s
                .track_from
                .as_ref()
                .map(|q| units::angle(q, "nullsteer.track_from"))
                .transpose()?
                .unwrap_or(0.0),
        };
        if !(spec.shift_min < spec.shift_max) {
            return Err(CliError::config("nullsteer.shift_max", "shift_max must exceed shift_min"));
        }
        if !(spec.shift_step > 0.0) {
            return Err(CliError::config("nullsteer.shift_step", "step must be > 0"));
        }
        if !(spec.half_length > 0.0) {
            return Err(CliError::config("nullsteer.radiator_half_length", "must be > 0"));
        }
        Ok(spec)
    }

    pub fn af_compare(&self, a: &AfCompareConfig) -> Result<AfCompareSpec, CliError> {
        let f = units::frequency(&a.frequency, "af_compare.frequency")?;
        let reference = Some(self.reference.unwrap_or(f));
        let half_length = units::length(&a.half_length, "af_compare.half_length", reference)?;
        if half_length <= 0.0 {
            return Err(CliError::config("af_compare.half_length", "must be > 0"));
        }
        let taper = a
            .taper
            .as_deref()
            .unwrap_or("uniform")
            .parse()
            .map_err(|e: crate::Error| CliError::config("af_compare.taper", e.to_string()))?;
        let elements = a.elements.clone().unwrap_or_else(|| vec![16, 32, 64, 128, 256]);
        if elements.is_empty() || elements.contains(&0) {
            return Err(CliError::config("af_compare.elements", "element counts must be >= 1"));
        }
        Ok(AfCompareSpec {
            k: 2.0 * PI * f / units::SPEED_OF_LIGHT,
            half_length,
            taper,
            elements,
        })
    }
}

pub struct NullSteerSpec {
    pub k: f64,
    pub half_length: f64,
    pub base_offset: f64,
    pub reference_weight: Complex64,
    pub shift_min: f64,
    pub shift_max: f64,
    pub shift_step: f64,
    pub track_from: f64,
}

pub struct AfCompareSpec {
    pub k: f64,
    pub half_length: f64,
    pub taper: crate::array_factor::Taper,
    pub elements: Vec<usize>,
}
