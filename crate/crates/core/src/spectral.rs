//! Spectral Green's-function expansion of the excited current.
//!
//! A feed is a weighted set of impulse or doublet excitations. Projecting it
//! onto each eigenmode and dividing by the resonance denominator
//! `k_c^2 - k_nmp^2` gives the modal amplitudes of the current; the complex
//! drive wavenumber `k_c = k (1 - j / 2Q)` keeps every amplitude finite.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::eigenmode::{enumerate_modes, outside, BoundaryCondition, DomainBox, Eigenmode, ModeIndex, Parity};
use crate::numeric::pairwise_sum_c;
use crate::{Axis, Error, Point, Result};

pub const DEFAULT_Q: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type", content = "axis")]
pub enum FeedKind {
    /// Dirac impulse; projects onto `I_nmp(r')`.
    Impulse,
    /// Dirac doublet along an axis; projects onto `dI_nmp/d(axis)(r')`.
    Doublet(Axis),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeedElement {
    pub position: Point,
    pub kind: FeedKind,
    pub weight: Complex64,
}

impl FeedElement {
    pub fn impulse(position: Point, weight: Complex64) -> Self {
        Self {
            position,
            kind: FeedKind::Impulse,
            weight,
        }
    }

    pub fn doublet(position: Point, axis: Axis, weight: Complex64) -> Self {
        Self {
            position,
            kind: FeedKind::Doublet(axis),
            weight,
        }
    }

    fn probe(&self, mode: &Eigenmode) -> f64 {
        match self.kind {
            FeedKind::Impulse => mode.value_at(self.position),
            FeedKind::Doublet(axis) => mode.derivative_at(axis, self.position),
        }
    }
}

/// Symmetry of a two-port feed about the origin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PortPhase {
    /// Equal weights: the feed is even under reflection.
    InPhase,
    /// Opposite weights: the feed is odd under reflection.
    AntiPhase,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedScheme {
    label: String,
    elements: Vec<FeedElement>,
}

impl FeedScheme {
    pub fn new(label: impl Into<String>, elements: Vec<FeedElement>) -> Result<Self> {
        if elements.iter().any(|e| {
            !(e.weight.re.is_finite() && e.weight.im.is_finite())
                || e.position.iter().any(|c| !c.is_finite())
        }) {
            return Err(Error::NonFiniteWeight);
        }
        if elements.iter().all(|e| e.weight == Complex64::new(0.0, 0.0)) {
            return Err(Error::EmptyFeed);
        }
        Ok(Self {
            label: label.into(),
            elements,
        })
    }

    pub fn single(label: impl Into<String>, element: FeedElement) -> Self {
        Self::new(label, vec![element]).expect("single element feed")
    }

    /// Unit impulse at the origin (center, differential port).
    pub fn center_impulse() -> Self {
        Self::single(
            "center impulse",
            FeedElement::impulse([0.0; 3], Complex64::new(1.0, 0.0)),
        )
    }

    /// Unit doublet at the origin along `axis`.
    pub fn center_doublet(axis: Axis) -> Self {
        Self::single(
            format!("center {axis}-doublet"),
            FeedElement::doublet([0.0; 3], axis, Complex64::new(1.0, 0.0)),
        )
    }

    /// Two unit impulses at `±offset` along `axis`.
    pub fn dual_impulse(axis: Axis, offset: f64, phase: PortPhase) -> Self {
        let mut plus = [0.0; 3];
        plus[axis.index()] = offset;
        let mut minus = [0.0; 3];
        minus[axis.index()] = -offset;
        let second = match phase {
            PortPhase::InPhase => 1.0,
            PortPhase::AntiPhase => -1.0,
        };
        let label = match phase {
            PortPhase::InPhase => "dual-port in-phase",
            PortPhase::AntiPhase => "dual-port anti-phase",
        };
        Self::new(
            label,
            vec![
                FeedElement::impulse(plus, Complex64::new(1.0, 0.0)),
                FeedElement::impulse(minus, Complex64::new(second, 0.0)),
            ],
        )
        .expect("two unit ports")
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn elements(&self) -> &[FeedElement] {
        &self.elements
    }

    pub fn validate_in(&self, domain: &DomainBox) -> Result<()> {
        for e in &self.elements {
            if !domain.contains_strictly(e.position) {
                return Err(outside(e.position));
            }
            if let FeedKind::Doublet(axis) = e.kind {
                if !domain.is_active(axis) {
                    return Err(Error::InactiveDoubletAxis(axis));
                }
            }
        }
        Ok(())
    }

    /// `sum_e w_e P_e(mode)`.
    ///
    /// Elements are grouped into mirror orbits (same `|x|, |y|, |z|` and
    /// kind) and each orbit is summed by pairing reflections along x, then
    /// y, then z. Mirror partners contribute bitwise-equal or
    /// bitwise-opposite terms, so a feed whose symmetry conflicts with the
    /// mode parity projects to exactly zero.
    pub fn projection(&self, mode: &Eigenmode) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        let mut orbits: BTreeMap<(u64, u64, u64, u8), [Complex64; 8]> = BTreeMap::new();
        for e in &self.elements {
            let p = e.position;
            let key = (
                p[0].abs().to_bits(),
                p[1].abs().to_bits(),
                p[2].abs().to_bits(),
                match e.kind {
                    FeedKind::Impulse => 0,
                    FeedKind::Doublet(axis) => 1 + axis.index() as u8,
                },
            );
            let slot = usize::from(p[0] < 0.0)
                | usize::from(p[1] < 0.0) << 1
                | usize::from(p[2] < 0.0) << 2;
            let orbit = orbits.entry(key).or_insert([zero; 8]);
            orbit[slot] += e.weight * e.probe(mode);
        }
        let sums: Vec<Complex64> = orbits
            .values()
            .map(|t| {
                let x = [t[0] + t[1], t[2] + t[3], t[4] + t[5], t[6] + t[7]];
                let y = [x[0] + x[1], x[2] + x[3]];
                y[0] + y[1]
            })
            .collect();
        pairwise_sum_c(&sums)
    }
}

/// Drive wavenumber and loss regularization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Drive wavenumber in rad/m.
    pub k: f64,
    /// Quality factor; `f64::INFINITY` is the lossless limit.
    pub q: f64,
}

impl OperatingPoint {
    pub fn new(k: f64, q: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0 && q > 0.0 && !q.is_nan()) {
            return Err(Error::InvalidOperatingPoint { k, q });
        }
        Ok(Self { k, q })
    }

    pub fn with_default_q(k: f64) -> Result<Self> {
        Self::new(k, DEFAULT_Q)
    }

    /// `k_c = k (1 - j / 2Q)`.
    pub fn complex_k(&self) -> Complex64 {
        Complex64::new(self.k, -self.k / (2.0 * self.q))
    }

    /// `k_c^2 - k_nmp^2`, refusing an exact lossless resonance.
    pub fn denominator(&self, mode: &Eigenmode) -> Result<Complex64> {
        let kc = self.complex_k();
        let d = kc * kc - mode.wavenumber() * mode.wavenumber();
        if d == Complex64::new(0.0, 0.0) {
            let i = mode.index();
            return Err(Error::Resonance {
                k: self.k,
                n: i.n,
                m: i.m,
                p: i.p,
            });
        }
        Ok(d)
    }
}

/// Modal amplitude `a_nmp` of `feed` under `op`.
pub fn modal_coefficient(mode: &Eigenmode, feed: &FeedScheme, op: &OperatingPoint) -> Result<Complex64> {
    feed.validate_in(mode.domain())?;
    let denominator = op.denominator(mode)?;
    Ok(feed.projection(mode) / denominator)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModalTerm {
    pub mode: Eigenmode,
    pub amplitude: Complex64,
}

/// Truncated spectral current `J(r) = sum a_nmp I_nmp(r)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralCurrent {
    domain: DomainBox,
    bc: BoundaryCondition,
    op: OperatingPoint,
    k_ceiling: f64,
    terms: Vec<ModalTerm>,
}

impl SpectralCurrent {
    /// Current with explicitly chosen amplitudes; every index must belong to
    /// the family enumerated below `k_ceiling`.
    pub fn from_amplitudes(
        domain: DomainBox,
        bc: BoundaryCondition,
        op: OperatingPoint,
        k_ceiling: f64,
        amplitudes: &[(ModeIndex, Complex64)],
    ) -> Result<Self> {
        let modes = enumerate_modes(&domain, &bc, k_ceiling)?;
        let terms = amplitudes
            .iter()
            .map(|&(index, amplitude)| {
                modes
                    .iter()
                    .find(|m| m.index() == index)
                    .map(|mode| ModalTerm {
                        mode: mode.clone(),
                        amplitude,
                    })
                    .ok_or(Error::UnknownMode {
                        n: index.n,
                        m: index.m,
                        p: index.p,
                    })
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            domain,
            bc,
            op,
            k_ceiling,
            terms,
        })
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn operating_point(&self) -> OperatingPoint {
        self.op
    }

    pub fn k_ceiling(&self) -> f64 {
        self.k_ceiling
    }

    pub fn terms(&self) -> &[ModalTerm] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn amplitude(&self, index: ModeIndex) -> Option<Complex64> {
        self.terms
            .iter()
            .find(|t| t.mode.index() == index)
            .map(|t| t.amplitude)
    }

    pub fn eval(&self, p: Point) -> Result<Complex64> {
        self.domain.check_closed(p)?;
        Ok(self.value_at(p))
    }

    pub fn value_at(&self, p: Point) -> Complex64 {
        let v: Vec<Complex64> = self
            .terms
            .iter()
            .map(|t| t.amplitude * t.mode.value_at(p))
            .collect();
        pairwise_sum_c(&v)
    }

    /// Largest per-axis wavenumber among modes with nonzero amplitude.
    pub fn max_axis_wavenumber(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.amplitude != Complex64::new(0.0, 0.0))
            .map(|t| t.mode.max_axis_wavenumber())
            .fold(0.0, f64::max)
    }

    /// `alpha * a + beta * b` for two currents over the same family.
    pub fn linear_combination(
        alpha: Complex64,
        a: &SpectralCurrent,
        beta: Complex64,
        b: &SpectralCurrent,
    ) -> Result<SpectralCurrent> {
        if a.domain != b.domain || a.bc != b.bc || a.op != b.op {
            return Err(Error::InvalidScenario(
                "currents live on different radiators or operating points".into(),
            ));
        }
        let mut terms: Vec<ModalTerm> = a
            .terms
            .iter()
            .map(|t| ModalTerm {
                mode: t.mode.clone(),
                amplitude: alpha * t.amplitude,
            })
            .collect();
        for t in &b.terms {
            match terms.iter_mut().find(|x| x.mode.index() == t.mode.index()) {
                Some(x) => x.amplitude += beta * t.amplitude,
                None => terms.push(ModalTerm {
                    mode: t.mode.clone(),
                    amplitude: beta * t.amplitude,
                }),
            }
        }
        Ok(SpectralCurrent {
            domain: a.domain,
            bc: a.bc,
            op: a.op,
            k_ceiling: a.k_ceiling.max(b.k_ceiling),
            terms,
        })
    }
}

/// Project `feed` onto every mode below `k_ceiling`.
pub fn build_current(
    domain: &DomainBox,
    bc: &BoundaryCondition,
    feed: &FeedScheme,
    op: &OperatingPoint,
    k_ceiling: f64,
) -> Result<SpectralCurrent> {
    if k_ceiling < op.k {
        return Err(Error::CeilingBelowDrive {
            ceiling: k_ceiling,
            k: op.k,
        });
    }
    let modes = enumerate_modes(domain, bc, k_ceiling)?;
    feed.validate_in(domain)?;
    let terms = modes
        .into_par_iter()
        .map(|mode| {
            let amplitude = feed.projection(&mode) / op.denominator(&mode)?;
            Ok(ModalTerm { mode, amplitude })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectralCurrent {
        domain: *domain,
        bc: *bc,
        op: *op,
        k_ceiling,
        terms,
    })
}

/// Truncated Green's function `G(r, r') = sum I(r') I(r) / (k_c^2 - k_nmp^2)`.
pub fn green_eval(
    r: Point,
    r_src: Point,
    op: &OperatingPoint,
    domain: &DomainBox,
    bc: &BoundaryCondition,
    k_ceiling: f64,
) -> Result<Complex64> {
    domain.check_closed(r)?;
    domain.check_closed(r_src)?;
    let modes = enumerate_modes(domain, bc, k_ceiling)?;
    let terms = modes
        .iter()
        .map(|m| Ok(Complex64::new(m.value_at(r_src) * m.value_at(r), 0.0) / op.denominator(m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(pairwise_sum_c(&terms))
}

pub fn current_eval(current: &SpectralCurrent, p: Point) -> Result<Complex64> {
    current.eval(p)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeReport {
    pub index: ModeIndex,
    pub magnitude: f64,
    pub parity: [Parity; 3],
}

/// The `top` strongest modes by `|a|`, ties broken by index.
pub fn excited_mode_report(current: &SpectralCurrent, top: usize) -> Vec<ModeReport> {
    let mut rows: Vec<ModeReport> = current
        .terms()
        .iter()
        .map(|t| ModeReport {
            index: t.mode.index(),
            magnitude: t.amplitude.norm(),
            parity: t.mode.parity(),
        })
        .collect();
    rows.sort_by(|a, b| {
        b.magnitude
            .total_cmp(&a.magnitude)
            .then(a.index.cmp(&b.index))
    });
    rows.truncate(top);
    rows
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn wire() -> (DomainBox, BoundaryCondition) {
        (
            DomainBox::line(Axis::X, 0.5).unwrap(),
            BoundaryCondition::dirichlet(),
        )
    }

    fn mode(n: u32) -> Eigenmode {
        let (d, bc) = wire();
        Eigenmode::new(ModeIndex::new(n, 0, 0), d, bc).unwrap()
    }

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn parity_forbidden_coefficients_are_zero() {
        let op = OperatingPoint::new(2.0, 50.0).unwrap();
        let c = modal_coefficient(&mode(2), &FeedScheme::center_impulse(), &op).unwrap();
        assert_eq!(c, Complex64::new(0.0, 0.0));
        let c = modal_coefficient(&mode(1), &FeedScheme::center_doublet(Axis::X), &op).unwrap();
        assert_eq!(c, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn coefficient_matches_direct_substitution() {
        let op = OperatingPoint::new(0.9 * PI, 100.0).unwrap();
        let c = modal_coefficient(&mode(1), &FeedScheme::center_impulse(), &op).unwrap();
        let kc = Complex64::new(0.9 * PI, -0.9 * PI / 200.0);
        let oracle = Complex64::new(2f64.sqrt(), 0.0) / (kc * kc - PI * PI);
        assert!((c - oracle).norm() < 1e-14);
        // frozen value of the same substitution
        let frozen = Complex64::new(-0.7527087116187635, 0.03208574119922473);
        assert!((c - frozen).norm() < 1e-12);
    }

    #[test]
    fn feed_and_operating_point_errors() {
        let op = OperatingPoint::new(1.0, 100.0).unwrap();
        let feed = FeedScheme::single("edge", FeedElement::impulse([0.5, 0.0, 0.0], one()));
        assert!(matches!(
            modal_coefficient(&mode(1), &feed, &op),
            Err(Error::OutsideBox { .. })
        ));
        let lossless = OperatingPoint::new(PI, f64::INFINITY).unwrap();
        assert!(matches!(
            modal_coefficient(&mode(1), &FeedScheme::center_impulse(), &lossless),
            Err(Error::Resonance { n: 1, .. })
        ));
        assert!(OperatingPoint::new(-1.0, 10.0).is_err());
        assert!(OperatingPoint::new(1.0, 0.0).is_err());
        assert!(matches!(
            FeedScheme::new("z", vec![FeedElement::impulse([0.0; 3], Complex64::new(0.0, 0.0))]),
            Err(Error::EmptyFeed)
        ));
        let y_doublet = FeedScheme::center_doublet(Axis::Y);
        assert!(matches!(
            modal_coefficient(&mode(1), &y_doublet, &op),
            Err(Error::InactiveDoubletAxis(Axis::Y))
        ));
    }

    #[test]
    fn resonant_mode_dominates_at_first_resonance() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(PI, 100.0).unwrap();
        let current = build_current(&d, &bc, &FeedScheme::center_impulse(), &op, 12.0 * PI).unwrap();
        let a1 = current.amplitude(ModeIndex::new(1, 0, 0)).unwrap();
        let a2 = current.amplitude(ModeIndex::new(2, 0, 0)).unwrap();
        let a3 = current.amplitude(ModeIndex::new(3, 0, 0)).unwrap();
        assert_eq!(a2, Complex64::new(0.0, 0.0));
        // |k_c^2 - 9 k1^2| / |k_c^2 - k1^2| with Q = 100 is about 8Q = 800
        let kc = op.complex_k();
        let oracle = (kc * kc - 9.0 * PI * PI).norm() / (kc * kc - PI * PI).norm();
        let ratio = a1.norm() / a3.norm();
        assert!((ratio - oracle).abs() < 1e-9 * oracle);
        assert!((ratio - 800.0).abs() < 2.0);
    }

    #[test]
    fn symmetric_dual_feeds_select_parity() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(3.3, 100.0).unwrap();
        let even = build_current(&d, &bc, &FeedScheme::dual_impulse(Axis::X, 0.17, PortPhase::InPhase), &op, 40.0).unwrap();
        let odd = build_current(&d, &bc, &FeedScheme::dual_impulse(Axis::X, 0.17, PortPhase::AntiPhase), &op, 40.0).unwrap();
        for t in even.terms() {
            if t.mode.parity()[0] == Parity::Odd {
                assert_eq!(t.amplitude, Complex64::new(0.0, 0.0));
            } else {
                assert_ne!(t.amplitude, Complex64::new(0.0, 0.0));
            }
        }
        for t in odd.terms() {
            if t.mode.parity()[0] == Parity::Even {
                assert_eq!(t.amplitude, Complex64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn green_partial_sum_oracle() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(0.5 * PI, 100.0).unwrap();
        let g = green_eval([0.0; 3], [0.0; 3], &op, &d, &bc, 20.0 * PI).unwrap();
        // hand-rolled partial sum over n = 1..20
        let kc = op.complex_k();
        let mut oracle = Complex64::new(0.0, 0.0);
        for n in 1..=20 {
            let kn = n as f64 * PI;
            let v = if n % 2 == 1 { 2f64.sqrt() } else { 0.0 };
            oracle += v * v / (kc * kc - kn * kn);
        }
        assert!((g - oracle).norm() < 1e-13);
        let frozen = Complex64::new(-0.3132417083977183, 0.0009084150318478919);
        assert!((g - frozen).norm() < 1e-12);
    }

    #[test]
    fn green_vanishes_on_dirichlet_boundary() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(2.0, 100.0).unwrap();
        let g = green_eval([0.5, 0.0, 0.0], [0.1, 0.0, 0.0], &op, &d, &bc, 200.0).unwrap();
        assert!(g.norm() < 1e-12);
    }

    #[test]
    fn current_near_resonance_follows_first_mode() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(0.99 * PI, 100.0).unwrap();
        let current = build_current(&d, &bc, &FeedScheme::center_impulse(), &op, 20.0 * PI).unwrap();
        let m1 = mode(1);
        let n = 2001;
        let (mut ip, mut jj, mut ii) = (Complex64::new(0.0, 0.0), 0.0, 0.0);
        for i in 0..n {
            let x = -0.5 + i as f64 / (n - 1) as f64;
            let j = current.eval([x, 0.0, 0.0]).unwrap();
            let v = m1.value_at([x, 0.0, 0.0]);
            ip += j * v;
            jj += j.norm_sqr();
            ii += v * v;
        }
        let corr = ip.norm() / (jj * ii).sqrt();
        assert!(corr > 0.99, "correlation {corr}");
        let edge = current.eval([0.5, 0.0, 0.0]).unwrap();
        assert!(edge.norm() < 1e-12);
        let a = current.eval([0.21, 0.0, 0.0]).unwrap();
        let b = current.eval([-0.21, 0.0, 0.0]).unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn report_ranks_modes() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(PI, 100.0).unwrap();
        let c = build_current(&d, &bc, &FeedScheme::center_impulse(), &op, 20.0).unwrap();
        assert_eq!(excited_mode_report(&c, 1)[0].index, ModeIndex::new(1, 0, 0));
        let op2 = OperatingPoint::new(2.0 * PI, 100.0).unwrap();
        let c2 = build_current(&d, &bc, &FeedScheme::dual_impulse(Axis::X, 0.25, PortPhase::AntiPhase), &op2, 20.0).unwrap();
        let top = excited_mode_report(&c2, 3);
        assert_eq!(top[0].index, ModeIndex::new(2, 0, 0));
        assert_eq!(top[0].parity[0], Parity::Odd);
        let empty = SpectralCurrent::from_amplitudes(d, bc, op, 20.0, &[]).unwrap();
        assert!(excited_mode_report(&empty, 5).is_empty());
    }

    #[test]
    fn ceiling_below_drive_is_rejected() {
        let (d, bc) = wire();
        let op = OperatingPoint::new(10.0, 100.0).unwrap();
        assert!(matches!(
            build_current(&d, &bc, &FeedScheme::center_impulse(), &op, 5.0),
            Err(Error::CeilingBelowDrive { .. })
        ));
    }
}
