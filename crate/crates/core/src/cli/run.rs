//! Scenario runner.
//!
//! Every output is computed in memory before anything is written; files are
//! then written one at a time. `resolved.toml` and `report.json` are written
//! whenever the output directory is usable, including after a failure.

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use serde::Serialize;

use super::config::{
    OptimizeCriterion, OptimizeProblem, OutputFormat, Resolved, ScenarioConfig, ScenarioKind,
};
use super::export::{export_cut, export_pattern, num, write_file};
use super::{units, CliError};
use crate::array_factor::aperture_deviation;
use crate::eigenmode::{enumerate_modes_capped, BoundaryCondition, DomainBox, Eigenmode, ModeIndex, DEFAULT_MODE_CAP};
use crate::radiation::{directivity, mode_pattern, total_pattern, Cut, FarFieldPattern, FeatureThresholds};
use crate::reconfig::{
    dipole_reshape, feed_position_optimize, null_steer_sweep, plasma_optimize, plasma_pattern,
    two_source_nulls, FeedCriterion, FeedSearch, NullSteerScenario, PlasmaCriterion, PlasmaRingScenario,
};
use crate::spectral::{build_current, excited_mode_report};
use crate::Axis;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Full,
    ModesOnly,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub version: String,
    pub command: String,
    /// Resolved configuration with every default filled in.
    pub config: Option<ScenarioConfig>,
    pub duration_s: f64,
    pub warnings: Vec<String>,
    /// Every file written to the output directory, in write order.
    pub manifest: Vec<String>,
    pub status: String,
    pub error: Option<CliError>,
}

/// Named output files, in write order.
pub type Outputs = Vec<(String, String)>;

pub fn run_file(path: &Path, out_dir: &Path, mode: Mode, mut warnings: Vec<String>) -> Result<(), CliError> {
    let start = Instant::now();
    let config = ScenarioConfig::load(path).and_then(|c| c.resolved());
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::io(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut manifest = Vec::new();
    let outcome = config.clone().and_then(|c| {
        write_file(&out_dir.join("resolved.toml"), &c.to_toml())?;
        manifest.push("resolved.toml".to_string());
        let outputs = run_scenario(&c, mode, &mut warnings)?;
        for (name, text) in outputs {
            write_file(&out_dir.join(&name), &text)?;
            manifest.push(name);
        }
        Ok(())
    });
    manifest.push("report.json".to_string());
    let report = RunReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: match mode {
            Mode::Full => "run",
            Mode::ModesOnly => "modes",
        }
        .to_string(),
        config: config.ok(),
        duration_s: start.elapsed().as_secs_f64(),
        warnings,
        manifest,
        status: if outcome.is_ok() { "ok" } else { "failed" }.to_string(),
        error: outcome.clone().err(),
    };
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    write_file(&out_dir.join("report.json"), &text)?;
    outcome
}

/// Compute every output of the (already resolved) scenario.
pub fn run_scenario(c: &ScenarioConfig, mode: Mode, warnings: &mut Vec<String>) -> Result<Outputs, CliError> {
    let r = Resolved::from_config(c)?;
    if mode == Mode::ModesOnly {
        return Ok(vec![("modes.csv".into(), modes_only(c, &r)?)]);
    }
    match c.kind {
        ScenarioKind::Modes => Ok(vec![("modes.csv".into(), modes_only(c, &r)?)]),
        ScenarioKind::Pattern => pattern(c, &r, warnings),
        ScenarioKind::Dipole => dipole(c, &r),
        ScenarioKind::Plasma => plasma(c, &r),
        ScenarioKind::Nullsteer => nullsteer(c, &r),
        ScenarioKind::AfCompare => af_compare(c, &r),
        ScenarioKind::Optimize => optimize(c, &r),
    }
}

fn domain_and_ceiling(c: &ScenarioConfig, r: &Resolved) -> Result<(DomainBox, BoundaryCondition, f64, usize), CliError> {
    match c.kind {
        ScenarioKind::Modes => {
            let d = r.domain(c.domain.as_ref().expect("resolved"))?;
            let m = c.modes.as_ref().expect("resolved");
            let ceiling = units::wavenumber(&m.k_ceiling, "modes.k_ceiling")?;
            Ok((d.domain, d.bc, ceiling, m.cap.unwrap_or(DEFAULT_MODE_CAP)))
        }
        ScenarioKind::Pattern | ScenarioKind::Optimize if c.domain.is_some() && c.drive.is_some() => {
            let d = r.domain(c.domain.as_ref().expect("checked"))?;
            let (op, ceiling) = r.drive(c.drive.as_ref().expect("checked"))?;
            Ok((d.domain, d.bc, ceiling.unwrap_or(op.k), DEFAULT_MODE_CAP))
        }
        ScenarioKind::Dipole => {
            let s = r.dipole(c.dipole.as_ref().expect("resolved"))?;
            Ok((s.domain()?, BoundaryCondition::dirichlet(), s.k_ceiling, DEFAULT_MODE_CAP))
        }
        _ => Err(CliError::config("kind", "this scenario kind has no eigenmode domain")),
    }
}

fn modes_only(c: &ScenarioConfig, r: &Resolved) -> Result<String, CliError> {
    let (domain, bc, ceiling, cap) = domain_and_ceiling(c, r)?;
    let modes = enumerate_modes_capped(&domain, &bc, ceiling, cap)?;
    Ok(modes_table(&modes))
}

/// `n, m, p, k, parity_x, parity_y, parity_z`, ascending in `k`.
pub fn modes_table(modes: &[Eigenmode]) -> String {
    let mut out = String::from("n,m,p,k,parity_x,parity_y,parity_z\n");
    for mode in modes {
        let ModeIndex { n, m, p } = mode.index();
        let par = mode.parity();
        writeln!(
            out,
            "{n},{m},{p},{},{},{},{}",
            num(mode.wavenumber()),
            par[0],
            par[1],
            par[2]
        )
        .expect("write to string");
    }
    out
}

#[derive(Serialize)]
struct FeaturesReport {
    cut: Cut,
    thresholds: FeatureThresholds,
    nulls_deg: Vec<f64>,
    null_levels_db: Vec<f64>,
    peaks_deg: Vec<f64>,
    hpbw_deg: Option<f64>,
    peak_ratio_db: Option<f64>,
    directivity: Option<f64>,
}

fn round9(v: f64) -> f64 {
    num(v).parse().expect("formatted float parses")
}

/// Pattern table, cut table and feature summary of one pattern.
fn pattern_outputs(c: &ScenarioConfig, r: &Resolved, p: &FarFieldPattern) -> Result<Outputs, CliError> {
    let out = c.output.as_ref().expect("resolved");
    let format = out.format.expect("resolved");
    let (cut, thresholds) = r.features(c.features.as_ref().expect("resolved"))?;
    let samples = p.cut(cut)?;
    let f = crate::radiation::cut_features(&samples, thresholds);
    let deg = |v: &[f64]| v.iter().map(|a| round9(a.to_degrees())).collect();
    let d = directivity(p).ok().filter(|d| d.is_finite());
    let report = FeaturesReport {
        cut,
        thresholds,
        nulls_deg: deg(&f.nulls),
        null_levels_db: f.null_levels_db.iter().map(|&v| round9(v)).collect(),
        peaks_deg: deg(&f.peaks),
        hpbw_deg: f.hpbw.map(|h| round9(h.to_degrees())),
        peak_ratio_db: f.peak_ratio_db.map(round9),
        directivity: d.map(round9),
    };
    let ext = match format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    Ok(vec![
        (format!("pattern.{ext}"), export_pattern(p, format, out.normalization.expect("resolved"))?),
        ("cut.csv".into(), export_cut(&samples)),
        (
            "features.json".into(),
            serde_json::to_string_pretty(&report).expect("features serialize") + "\n",
        ),
    ])
}

fn pattern(c: &ScenarioConfig, r: &Resolved, warnings: &mut Vec<String>) -> Result<Outputs, CliError> {
    let dom_cfg = c.domain.as_ref().expect("resolved");
    let d = r.domain(dom_cfg)?;
    let feed = r.feed(c.feed.as_ref().expect("resolved"), dom_cfg)?;
    let drive = c.drive.as_ref().expect("resolved");
    let (op, ceiling) = r.drive(drive)?;
    let axis = drive.current_axis.unwrap_or(Axis::Z);
    if !d.domain.is_active(axis) {
        warnings.push(format!("current axis {axis} is not an active axis of the domain"));
    }
    let current = build_current(&d.domain, &d.bc, &feed, &op, ceiling.unwrap_or(8.0 * op.k))?;
    let grid = r.grid(c.grid.as_ref().expect("resolved"))?;
    let p = total_pattern(&current, axis, &grid)?;
    let mut outputs = pattern_outputs(c, r, &p)?;
    let mut table = String::from("n,m,p,k,amplitude_abs,parity_x,parity_y,parity_z\n");
    for row in excited_mode_report(&current, 32) {
        let k = current
            .terms()
            .iter()
            .find(|t| t.mode.index() == row.index)
            .map(|t| t.mode.wavenumber())
            .unwrap_or(f64::NAN);
        writeln!(
            table,
            "{},{},{},{},{},{},{},{}",
            row.index.n,
            row.index.m,
            row.index.p,
            num(k),
            num(row.magnitude),
            row.parity[0],
            row.parity[1],
            row.parity[2]
        )
        .expect("write to string");
    }
    outputs.push(("excited_modes.csv".into(), table));
    Ok(outputs)
}

fn dipole(c: &ScenarioConfig, r: &Resolved) -> Result<Outputs, CliError> {
    let s = r.dipole(c.dipole.as_ref().expect("resolved"))?;
    let grid = r.grid(c.grid.as_ref().expect("resolved"))?;
    let p = dipole_reshape(&s, &grid)?;
    pattern_outputs(c, r, &p)
}

fn plasma(c: &ScenarioConfig, r: &Resolved) -> Result<Outputs, CliError> {
    let cfg = c.plasma.as_ref().expect("resolved");
    let ring = r.plasma_ring(cfg)?;
    let s = PlasmaRingScenario::new(ring, cfg.state.clone().expect("resolved"))?;
    let grid = r.grid(c.grid.as_ref().expect("resolved"))?;
    let p = plasma_pattern(&s, &grid)?;
    pattern_outputs(c, r, &p)
}

fn nullsteer(c: &ScenarioConfig, r: &Resolved) -> Result<Outputs, CliError> {
    let spec = r.nullsteer(c.nullsteer.as_ref().expect("resolved"))?;
    let grid = r.grid(c.grid.as_ref().expect("resolved"))?;
    let (cut, thresholds) = r.features(c.features.as_ref().expect("resolved"))?;
    let Cut::Azimuth { theta } = cut else {
        return Err(CliError::config("features.cut", "null steering observes an azimuth cut"));
    };
    let mode = Eigenmode::new(
        ModeIndex::new(0, 0, 1),
        DomainBox::line(Axis::Z, spec.half_length)?,
        BoundaryCondition::dirichlet(),
    )?;
    let element = mode_pattern(&mode, Axis::Z, spec.k, &grid)?;
    let mut s = NullSteerScenario::new(element, spec.k, spec.shift_min, spec.shift_max, spec.shift_step)?;
    s.base_offset = [0.0, spec.base_offset, 0.0];
    s.reference_weight = spec.reference_weight;
    s.cut_theta = theta;
    s.track_from = spec.track_from;
    s.thresholds = thresholds;
    let trace = null_steer_sweep(&s)?;
    let lambda = 2.0 * PI / spec.k;
    let anti_phase = (spec.reference_weight + 1.0).norm() < 1e-12;
    let mut out = String::from("shift_m,shift_lambda,tracked_null_deg,closed_form_null_deg,peak_deg,null_count,nulls_deg\n");
    for rec in &trace.records {
        // closed-form locus only applies to the anti-phase reference
        let oracle = if anti_phase {
            let nulls = two_source_nulls(spec.k, rec.shift, spec.base_offset);
            rec.tracked_null.and_then(|t| {
                nulls
                    .iter()
                    .copied()
                    .min_by(|a, b| (a - t).abs().total_cmp(&(b - t).abs()))
            })
        } else {
            None
        };
        let opt = |v: Option<f64>| v.map(|a| num(a.to_degrees())).unwrap_or_default();
        let list: Vec<String> = rec.nulls.iter().map(|a| num(a.to_degrees())).collect();
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            num(rec.shift),
            num(rec.shift / lambda),
            opt(rec.tracked_null),
            opt(oracle),
            opt(rec.peak),
            rec.nulls.len(),
            list.join(";")
        )
        .expect("write to string");
    }
    Ok(vec![("trace.csv".into(), out)])
}

fn af_compare(c: &ScenarioConfig, r: &Resolved) -> Result<Outputs, CliError> {
    let spec = r.af_compare(c.af_compare.as_ref().expect("resolved"))?;
    let thetas: Vec<f64> = (0..=360).map(|i| (i as f64 * 0.5).to_radians()).collect();
    let mut out = String::from("elements,relative_deviation\n");
    for &n in &spec.elements {
        let dev = aperture_deviation(spec.half_length, spec.taper, n, spec.k, &thetas)?;
        writeln!(out, "{n},{}", num(dev)).expect("write to string");
    }
    Ok(vec![("convergence.csv".into(), out)])
}

#[derive(Serialize)]
struct OptimumReport {
    problem: OptimizeProblem,
    criterion: OptimizeCriterion,
    target_theta_deg: f64,
    target_phi_deg: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    state: Option<Vec<bool>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    position_m: Option<[f64; 3]>,
    value: f64,
    evaluated: usize,
}

fn optimize(c: &ScenarioConfig, r: &Resolved) -> Result<Outputs, CliError> {
    let o = c.optimize.as_ref().expect("resolved");
    let theta = units::angle(&o.target_theta, "optimize.target_theta")?;
    let phi = units::angle(&o.target_phi, "optimize.target_phi")?;
    let criterion = o.criterion.expect("resolved");
    let mut report = OptimumReport {
        problem: o.problem,
        criterion,
        target_theta_deg: round9(theta.to_degrees()),
        target_phi_deg: round9(phi.to_degrees()),
        state: None,
        position_m: None,
        value: 0.0,
        evaluated: 0,
    };
    match o.problem {
        OptimizeProblem::Plasma => {
            let ring = r.plasma_ring(c.plasma.as_ref().expect("resolved"))?;
            let crit = match criterion {
                OptimizeCriterion::Max => PlasmaCriterion::MaxGain,
                OptimizeCriterion::Min => PlasmaCriterion::MinGain,
            };
            let best = plasma_optimize(&ring, theta, phi, crit)?;
            report.state = Some(best.state);
            report.value = round9(best.value);
            report.evaluated = best.evaluated;
        }
        OptimizeProblem::Feed => {
            let dom_cfg = c.domain.as_ref().expect("resolved");
            let d = r.domain(dom_cfg)?;
            let drive = c.drive.as_ref().expect("resolved");
            let (op, ceiling) = r.drive(drive)?;
            let search = FeedSearch {
                axis: o.axis.unwrap_or(Axis::Z),
                target_theta: theta,
                target_phi: phi,
                criterion: match criterion {
                    OptimizeCriterion::Max => FeedCriterion::Max,
                    OptimizeCriterion::Min => FeedCriterion::Null,
                },
                resolution: r.length(o.resolution.as_ref().expect("resolved"), "optimize.resolution")?,
                k_ceiling: ceiling.unwrap_or(8.0 * op.k),
            };
            let best = feed_position_optimize(&d.domain, &d.bc, &op, &search)?;
            report.position_m = Some(best.position.map(round9));
            report.value = round9(best.value);
            report.evaluated = best.candidates;
        }
    }
    Ok(vec![(
        "optimum.json".into(),
        serde_json::to_string_pretty(&report).expect("optimum serializes") + "\n",
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(text: &str) -> Outputs {
        let c = ScenarioConfig::from_toml(text).unwrap().resolved().unwrap();
        run_scenario(&c, Mode::Full, &mut Vec::new()).unwrap()
    }

    #[test]
    fn modes_table_for_unit_wire() {
        let out = run("kind = \"modes\"\n[domain]\nx = \"0.5 m\"\n[modes]\nk_ceiling = \"10 rad/m\"\n");
        let rows: Vec<&str> = out[0].1.lines().skip(1).collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].starts_with("1,0,0,3.14159265e0,EVEN"));
    }

    #[test]
    fn dipole_cut_matches_features() {
        let out = run("kind = \"dipole\"\n[dipole]\nhalf_length = \"0.25 m\"\nexcitation = \"differential-center\"\n");
        let names: Vec<&str> = out.iter().map(|(n, _)| n.as_str()).collect();
        assert_eq!(names, ["pattern.csv", "cut.csv", "features.json"]);
        let f: serde_json::Value = serde_json::from_str(&out[2].1).unwrap();
        assert_eq!(f["peaks_deg"].as_array().unwrap().len(), 2);
        let cut: Vec<(f64, f64)> = out[1]
            .1
            .lines()
            .skip(1)
            .map(|l| {
                let (a, b) = l.split_once(',').unwrap();
                (a.parse().unwrap(), b.parse().unwrap())
            })
            .collect();
        let max = cut.iter().copied().max_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!(f["peaks_deg"].as_array().unwrap().iter().any(|p| p.as_f64().unwrap() == max.0));
        let min = cut.iter().copied().min_by(|a, b| a.1.total_cmp(&b.1)).unwrap();
        assert!(f["nulls_deg"].as_array().unwrap().iter().any(|p| p.as_f64().unwrap() == min.0));
    }
}
