//! Property tests for the model invariants.

use std::f64::consts::PI;

use fluidrad::array_factor::{array_factor, ArrayLayout, ExcitationWeights};
use fluidrad::cli::config::ScenarioConfig;
use fluidrad::cli::units::{self, Quantity};
use fluidrad::eigenmode::{eigen_wavenumber, enumerate_modes};
use fluidrad::numeric::GaussLegendre;
use fluidrad::prelude::*;
use fluidrad::radiation::radiate_current;
use fluidrad::reconfig::{
    null_steer_sweep, plasma_optimize, plasma_pattern, rotate_state, state_from_mask, NullSteerScenario,
    PlasmaCriterion, PlasmaRing, PlasmaRingScenario,
};
use proptest::prelude::*;

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

fn axis_bc() -> impl Strategy<Value = AxisBc> {
    prop_oneof![
        Just(AxisBc::dirichlet()),
        Just(AxisBc::neumann()),
        (0.2f64..3.0, 0.005f64..0.5).prop_map(|(a, b)| AxisBc::robin(a, b)),
    ]
}

/// A 1-, 2- or 3-D box with per-axis boundary conditions and one mode of it.
fn mode() -> impl Strategy<Value = Eigenmode> {
    (
        prop::array::uniform3(prop::option::of(0.1f64..1.0)),
        prop::array::uniform3(axis_bc()),
        prop::array::uniform3(0u32..5),
    )
        .prop_filter_map("needs an active axis", |(ext, bcs, offs)| {
            let mut ext = ext;
            if ext.iter().all(Option::is_none) {
                ext[2] = Some(0.4);
            }
            let domain = DomainBox::new(ext[0], ext[1], ext[2]).ok()?;
            let bc = BoundaryCondition::new(bcs[0], bcs[1], bcs[2]);
            let mut idx = [0u32; 3];
            for a in Axis::ALL {
                if domain.is_active(a) {
                    idx[a.index()] = bc.axis(a).index_base() + offs[a.index()];
                }
            }
            Eigenmode::new(ModeIndex::new(idx[0], idx[1], idx[2]), domain, bc).ok()
        })
}

fn interior(domain: &DomainBox, u: [f64; 3], shrink: f64) -> Point {
    let mut p = [0.0; 3];
    for a in domain.active_axes() {
        p[a.index()] = (2.0 * u[a.index()] - 1.0) * shrink * domain.half_extent(a).unwrap();
    }
    p
}

fn unit3() -> impl Strategy<Value = [f64; 3]> {
    prop::array::uniform3(0.0f64..1.0)
}

fn product_integral(u: &Eigenmode, v: &Eigenmode) -> f64 {
    let gl = GaussLegendre::new(10);
    let mut prod = u.normalization() * v.normalization();
    for axis in u.domain().active_axes() {
        let l = u.domain().half_extent(axis).unwrap();
        let (hu, hv) = (u.harmonic(axis), v.harmonic(axis));
        let panels = 60;
        let w = 2.0 * l / panels as f64;
        prod *= (0..panels)
            .map(|i| gl.integrate(-l + i as f64 * w, -l + (i + 1) as f64 * w, |x| hu.value(x) * hv.value(x)))
            .sum::<f64>();
    }
    prod
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn helmholtz_residual(m in mode(), pts in prop::collection::vec(unit3(), 10)) {
        let k2 = m.wavenumber().powi(2);
        prop_assume!(k2 > 0.0);
        for u in pts {
            let p = interior(m.domain(), u, 0.98);
            let c = m.value_at(p);
            let mut lap = 0.0;
            for a in m.domain().active_axes() {
                let h = m.domain().half_extent(a).unwrap() / 200.0;
                let (mut x, mut y) = (p, p);
                x[a.index()] += h;
                y[a.index()] -= h;
                lap += (m.value_at(x) - 2.0 * c + m.value_at(y)) / (h * h);
            }
            prop_assert!((lap + k2 * c).abs() / (k2 * m.max_abs()) < 1e-3);
        }
    }

    #[test]
    fn boundary_condition_holds(m in mode(), pts in prop::collection::vec(unit3(), 5)) {
        let d = *m.domain();
        for a in d.active_axes() {
            let bc = m.boundary().axis(a);
            let l = d.half_extent(a).unwrap();
            let kappa = m.harmonic(a).wavenumber;
            for u in &pts {
                for side in [-1.0, 1.0] {
                    let mut p = interior(&d, *u, 1.0);
                    p[a.index()] = side * l;
                    let r = bc.a * m.value_at(p) + bc.b * side * m.derivative_at(a, p);
                    let tol = 1e-6 * bc.a.abs().max(bc.b.abs() * kappa) * m.max_abs();
                    prop_assert!(r.abs() <= tol, "residual {r} tol {tol}");
                }
            }
        }
    }

    #[test]
    fn reflection_follows_parity_tag(m in mode(), u in unit3()) {
        let p = interior(m.domain(), u, 1.0);
        let v = m.value_at(p);
        for a in m.domain().active_axes() {
            let mut q = p;
            q[a.index()] = -q[a.index()];
            let sign = m.parity()[a.index()].sign();
            prop_assert!((m.value_at(q) - sign * v).abs() <= 1e-12 * m.max_abs());
        }
    }

    #[test]
    fn robin_approaches_dirichlet_monotonically(l in 0.05f64..2.0, n in 1u32..8) {
        let wire = DomainBox::line(Axis::Y, l).unwrap();
        let idx = ModeIndex::new(0, n, 0);
        let exact = eigen_wavenumber(idx, &wire, &BoundaryCondition::dirichlet()).unwrap();
        let gaps: Vec<f64> = [1e-2, 1e-4, 1e-6]
            .iter()
            .map(|&b| {
                let bc = BoundaryCondition::uniform(AxisBc::robin(1.0, b));
                (eigen_wavenumber(idx, &wire, &bc).unwrap() - exact).abs()
            })
            .collect();
        prop_assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1], "{gaps:?}");
    }

    #[test]
    fn distinct_modes_are_orthogonal(m in mode()) {
        let family = enumerate_modes(m.domain(), m.boundary(), m.wavenumber() + 15.0).unwrap();
        for other in family.iter().filter(|o| o.index() != m.index()).take(5) {
            prop_assert!(product_integral(&m, other).abs() < 1e-4);
        }
        prop_assert!((product_integral(&m, &m) - 1.0).abs() < 1e-6);
    }
}

fn plate() -> DomainBox {
    DomainBox::plate_xy(0.3, 0.2).unwrap()
}

proptest! {
    #![proptest_config(cfg(32))]

    #[test]
    fn green_is_reciprocal(
        bc in axis_bc(),
        a in unit3(),
        b in unit3(),
        k in 1.0f64..20.0,
    ) {
        let d = plate();
        let bc = BoundaryCondition::uniform(bc);
        let op = OperatingPoint::new(k, 80.0).unwrap();
        let (ra, rb) = (interior(&d, a, 1.0), interior(&d, b, 1.0));
        let g1 = green_eval(ra, rb, &op, &d, &bc, 100.0).unwrap();
        let g2 = green_eval(rb, ra, &op, &d, &bc, 100.0).unwrap();
        prop_assert!((g1 - g2).norm() < 1e-12);
    }

    #[test]
    fn symmetric_feeds_select_parity(
        bc in axis_bc(),
        x in 0.01f64..0.29,
        y in 0.01f64..0.19,
        w in (-2.0f64..2.0, -2.0f64..2.0),
        anti in any::<bool>(),
        k in 1.0f64..20.0,
    ) {
        // a pair mirrored in x, same or opposite weight
        let d = plate();
        let bc = BoundaryCondition::uniform(bc);
        let w = Complex64::new(w.0, w.1);
        prop_assume!(w.norm() > 1e-3);
        let w2 = if anti { -w } else { w };
        let feed = FeedScheme::new(
            "pair",
            vec![FeedElement::impulse([x, y, 0.0], w), FeedElement::impulse([-x, y, 0.0], w2)],
        )
        .unwrap();
        let op = OperatingPoint::new(k, 100.0).unwrap();
        for m in enumerate_modes(&d, &bc, 60.0).unwrap() {
            let forbidden = if anti { Parity::Even } else { Parity::Odd };
            if m.parity()[0] == forbidden {
                let c = modal_coefficient(&m, &feed, &op).unwrap();
                prop_assert!(c.re == 0.0 && c.im == 0.0, "{} {c}", m.index());
            }
        }
    }

    #[test]
    fn truncation_converges_1d(a in -0.9f64..0.9, b in -0.9f64..0.9, k in 1.0f64..5.0) {
        // base ceiling: 400 rad/m for a wire of half-length 1
        let d = DomainBox::line(Axis::X, 1.0).unwrap();
        let bc = BoundaryCondition::dirichlet();
        let op = OperatingPoint::new(k, 100.0).unwrap();
        let g1 = green_eval([a, 0.0, 0.0], [b, 0.0, 0.0], &op, &d, &bc, 400.0).unwrap();
        let g2 = green_eval([a, 0.0, 0.0], [b, 0.0, 0.0], &op, &d, &bc, 800.0).unwrap();
        prop_assert!((g1.norm() - g2.norm()).abs() < 0.01 * g2.norm());
    }

    #[test]
    fn parity_forced_null(offset in 0.01f64..0.24, k in 1.0f64..30.0, q in 5.0f64..500.0, w in 0.1f64..3.0) {
        let d = DomainBox::line(Axis::Z, 0.25).unwrap();
        let feed = FeedScheme::new(
            "odd",
            vec![
                FeedElement::impulse([0.0, 0.0, offset], Complex64::new(w, 0.3)),
                FeedElement::impulse([0.0, 0.0, -offset], Complex64::new(-w, -0.3)),
            ],
        )
        .unwrap();
        let op = OperatingPoint::new(k, q).unwrap();
        let current = build_current(&d, &BoundaryCondition::dirichlet(), &feed, &op, 2.0 * k + 30.0).unwrap();
        let grid = AngleGrid::with_step_deg(0.5, 90.0).unwrap();
        let p = total_pattern(&current, Axis::Z, &grid).unwrap();
        let i = grid.theta_index(PI / 2.0).unwrap();
        for j in 0..grid.phi_count() {
            let (et, ep) = p.sample(i, j);
            prop_assert!(et.norm() == 0.0 && ep.norm() == 0.0);
        }
    }
}

#[test]
fn q_scales_resonant_amplitude_linearly() {
    let d = DomainBox::line(Axis::Z, 0.25).unwrap();
    let bc = BoundaryCondition::dirichlet();
    let k1 = PI / 0.5;
    let amp = |q: f64| {
        let op = OperatingPoint::new(k1, q).unwrap();
        let m = Eigenmode::new(ModeIndex::new(0, 0, 1), d, bc).unwrap();
        modal_coefficient(&m, &FeedScheme::center_impulse(), &op).unwrap().norm()
    };
    let base = amp(50.0) / 50.0;
    for q in [100.0, 200.0] {
        let ratio = amp(q) / q / base;
        assert!((ratio - 1.0).abs() < 0.02, "Q = {q}: {ratio}");
    }
}

proptest! {
    #![proptest_config(cfg(16))]

    #[test]
    fn pattern_is_linear_in_current(
        o1 in 0.02f64..0.2,
        o2 in 0.02f64..0.2,
        al in (-2.0f64..2.0, -2.0f64..2.0),
        be in (-2.0f64..2.0, -2.0f64..2.0),
        k in 2.0f64..12.0,
    ) {
        let d = DomainBox::line(Axis::Z, 0.25).unwrap();
        let bc = BoundaryCondition::dirichlet();
        let op = OperatingPoint::new(k, 100.0).unwrap();
        let c1 = build_current(&d, &bc, &FeedScheme::single("a", FeedElement::impulse([0.0, 0.0, o1], Complex64::new(1.0, 0.0))), &op, 80.0).unwrap();
        let c2 = build_current(&d, &bc, &FeedScheme::single("b", FeedElement::impulse([0.0, 0.0, -o2], Complex64::new(0.5, 0.2))), &op, 80.0).unwrap();
        let (al, be) = (Complex64::new(al.0, al.1), Complex64::new(be.0, be.1));
        let grid = AngleGrid::with_step_deg(1.0, 45.0).unwrap();
        let sum = SpectralCurrent::linear_combination(al, &c1, be, &c2).unwrap();
        let lhs = total_pattern(&sum, Axis::Z, &grid).unwrap();
        let rhs = total_pattern(&c1, Axis::Z, &grid).unwrap().scaled(al)
            .add(&total_pattern(&c2, Axis::Z, &grid).unwrap().scaled(be)).unwrap();
        let scale = lhs.max_power().sqrt().max(1e-300);
        for (a, b) in lhs.e_theta().iter().zip(rhs.e_theta()) {
            prop_assert!((a - b).norm() <= 1e-10 * scale.max(1.0));
        }
    }

    #[test]
    fn even_current_is_symmetric_about_broadside(o in 0.0f64..0.2, k in 2.0f64..20.0) {
        let d = DomainBox::line(Axis::Z, 0.25).unwrap();
        let feed = if o == 0.0 {
            FeedScheme::center_impulse()
        } else {
            FeedScheme::dual_impulse(Axis::Z, o, fluidrad::spectral::PortPhase::InPhase)
        };
        let op = OperatingPoint::new(k, 100.0).unwrap();
        let c = build_current(&d, &BoundaryCondition::dirichlet(), &feed, &op, 4.0 * k + 40.0).unwrap();
        let grid = AngleGrid::with_step_deg(0.5, 90.0).unwrap();
        let p = total_pattern(&c, Axis::Z, &grid).unwrap();
        let s = p.cut(Cut::Elevation { phi: 0.0 }).unwrap();
        let max = s.max();
        let n = grid.theta_count() - 1;
        for i in 0..=n {
            prop_assert!((s.power[i] - s.power[n - i]).abs() <= 1e-9 * max);
        }
    }

    #[test]
    fn hpbw_stable_under_theta_refinement(h in 0.1f64..0.3) {
        let wire = Eigenmode::new(ModeIndex::new(0, 0, 1), DomainBox::line(Axis::Z, h).unwrap(), BoundaryCondition::dirichlet()).unwrap();
        let k = 2.0 * PI;
        let hp = |step: f64| {
            let grid = AngleGrid::with_step_deg(step, 90.0).unwrap();
            let p = mode_pattern(&wire, Axis::Z, k, &grid).unwrap();
            pattern_features(&p, Cut::Elevation { phi: 0.0 }).unwrap().hpbw.unwrap()
        };
        prop_assert!((hp(0.5) - hp(0.25)).abs().to_degrees() < 0.5);
    }
}

proptest! {
    #![proptest_config(cfg(6))]

    #[test]
    fn directivity_is_quadrature_independent(o in 0.0f64..0.2, k in 1.0f64..12.0) {
        // k * extent <= 4 pi: the separable plan and direct tensor quadrature agree
        let d = DomainBox::plate_xy(0.25, 0.15).unwrap();
        let bc = BoundaryCondition::new(AxisBc::neumann(), AxisBc::dirichlet(), AxisBc::dirichlet());
        let feed = FeedScheme::single("f", FeedElement::impulse([o, 0.03, 0.0], Complex64::new(1.0, 0.0)));
        let op = OperatingPoint::new(k, 100.0).unwrap();
        let c = build_current(&d, &bc, &feed, &op, 25.0).unwrap();
        let grid = AngleGrid::with_step_deg(1.0, 30.0).unwrap();
        let a = directivity(&total_pattern(&c, Axis::X, &grid).unwrap()).unwrap();
        let b = directivity(&radiate_current(&c, Axis::X, &grid).unwrap()).unwrap();
        prop_assert!((a - b).abs() < 1e-3 * b, "{a} {b}");
    }
}

fn positions(n: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::array::uniform3(-2.0f64..2.0), 1..=n)
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn af_bounded_by_total_weight(
        pos in positions(12),
        amps in prop::collection::vec((0.0f64..2.0, -PI..PI), 12),
        t in 0.0f64..PI,
        p in 0.0f64..(2.0 * PI),
    ) {
        let layout = ArrayLayout::movable(pos.clone()).unwrap();
        let w = ExcitationWeights(amps[..pos.len()].iter().map(|&(a, ph)| Complex64::from_polar(a, ph)).collect());
        let af = array_factor(&layout, &w, 2.0 * PI, t, p).unwrap();
        prop_assert!(af.norm() <= w.total_magnitude() * (1.0 + 1e-12));
    }

    #[test]
    fn translation_keeps_af_magnitude(
        pos in positions(8),
        shift in prop::array::uniform3(-3.0f64..3.0),
        t in 0.0f64..PI,
        p in 0.0f64..(2.0 * PI),
    ) {
        let layout = ArrayLayout::movable(pos.clone()).unwrap();
        let moved = layout.translated(shift);
        let w = ExcitationWeights::uniform(pos.len());
        let a = array_factor(&layout, &w, 2.0 * PI, t, p).unwrap().norm();
        let b = array_factor(&moved, &w, 2.0 * PI, t, p).unwrap().norm();
        prop_assert!((a - b).abs() < 1e-12 * pos.len() as f64);
    }

    #[test]
    fn steering_lands_within_a_cell(n in 4usize..24, target in 10.0f64..170.0) {
        let layout = ArrayLayout::fixed_grid([0.0, 0.0, 0.5], [1, 1, n]).unwrap();
        let k = 2.0 * PI;
        let theta0 = target.to_radians();
        let w = ExcitationWeights::steered(&layout, k, theta0, 0.0);
        let step = 0.25f64.to_radians();
        let (mut best, mut at) = (-1.0, 0.0);
        for i in 0..=720 {
            let v = array_factor(&layout, &w, k, i as f64 * step, 0.0).unwrap().norm();
            if v > best {
                best = v;
                at = i as f64 * step;
            }
        }
        prop_assert!((at - theta0).abs() <= step);
    }
}

fn ring() -> PlasmaRing {
    PlasmaRing::new(8, 0.25, 2.0 * PI).unwrap()
}

proptest! {
    #![proptest_config(cfg(24))]

    #[test]
    fn ring_rotation_is_exact(mask in 0u64..256, m in -9i64..9) {
        let grid = AngleGrid::new(181, 64).unwrap();
        let s = PlasmaRingScenario::new(ring(), state_from_mask(mask, 8)).unwrap();
        let p0 = plasma_pattern(&s, &grid).unwrap();
        let pm = plasma_pattern(&s.rotated(m), &grid).unwrap();
        let np = grid.phi_count() as i64;
        for i in 0..grid.theta_count() {
            for j in 0..np {
                let src = (j - m * np / 8).rem_euclid(np) as usize;
                prop_assert_eq!(pm.sample(i, j as usize), p0.sample(i, src));
            }
        }
        prop_assert_eq!(rotate_state(&rotate_state(&s.state, m), -m), s.state.clone());
    }

    #[test]
    fn exhaustive_optimum_dominates(
        t in 0.1f64..PI,
        p in 0.0f64..(2.0 * PI),
        mag in 0.05f64..0.95,
        phase in -PI..PI,
        maximize in any::<bool>(),
    ) {
        let ring = ring().with_coupling(Complex64::from_polar(mag, phase)).unwrap();
        let crit = if maximize { PlasmaCriterion::MaxGain } else { PlasmaCriterion::MinGain };
        let best = plasma_optimize(&ring, t, p, crit).unwrap();
        prop_assert_eq!(ring.objective(&best.state, t, p), best.value);
        for mask in 0..256 {
            let v = ring.objective(&state_from_mask(mask, 8), t, p);
            if maximize {
                prop_assert!(v <= best.value);
            } else {
                prop_assert!(v >= best.value);
            }
        }
    }
}

proptest! {
    #![proptest_config(cfg(8))]

    #[test]
    fn null_trace_is_continuous(steps in 10usize..30, span in 0.2f64..0.5) {
        let k = 2.0 * PI;
        let grid = AngleGrid::new(181, 1440).unwrap();
        let wire = Eigenmode::new(ModeIndex::new(0, 0, 1), DomainBox::line(Axis::Z, 0.25).unwrap(), BoundaryCondition::dirichlet()).unwrap();
        let element = mode_pattern(&wire, Axis::Z, k, &grid).unwrap();
        let step = span / steps as f64;
        let s = NullSteerScenario::new(element, k, 0.0, span, step).unwrap();
        let d0 = s.base_offset[1];
        let trace = null_steer_sweep(&s).unwrap();
        let cell = grid.phi_step();
        for w in trace.records.windows(2) {
            let (a, b) = (w[0].tracked_null.unwrap(), w[1].tracked_null.unwrap());
            let mid = 0.5 * (w[0].shift + w[1].shift);
            let predicted = d0 / (d0 * d0 + mid * mid) * (w[1].shift - w[0].shift);
            // the grid quantizes each null to half a cell
            prop_assert!((b - a).abs() < 3.0 * predicted + cell, "{a} {b} {predicted}");
        }
    }
}

proptest! {
    #![proptest_config(cfg(64))]

    #[test]
    fn formatted_lengths_round_trip(v in -1e3f64..1e3) {
        prop_assert_eq!(units::length(&Quantity::meters(v), "x", None).unwrap(), v);
        let a = units::angle(&Quantity::degrees(v), "x").unwrap();
        prop_assert_eq!(a, v.to_radians());
    }

    #[test]
    fn resolved_config_is_a_fixed_point(h in 0.05f64..1.0, ratio in 0.5f64..1.5, dual in any::<bool>()) {
        let text = format!(
            "kind = \"dipole\"\n[dipole]\nhalf_length = \"{h} m\"\nexcitation = \"{}\"\ndrive_ratio = {ratio}\n",
            if dual { "common-dual" } else { "differential-center" }
        );
        let r = ScenarioConfig::from_toml(&text).unwrap().resolved().unwrap();
        let again = ScenarioConfig::from_toml(&r.to_toml()).unwrap().resolved().unwrap();
        prop_assert_eq!(again.to_toml(), r.to_toml());
    }
}
