//! Harmonic eigenmodes of a rectangular radiator.
//!
//! Each active axis of the box `[-l, l]` carries a one-dimensional harmonic
//! family fixed by its boundary condition `a I + b dI/dn = 0` (outward normal
//! derivative, identical coefficients on both faces). Because both faces
//! share `(a, b)`, every harmonic is either a pure cosine (even) or a pure
//! sine (odd) about the axis origin. A 3-D eigenmode is the normalized
//! product of one harmonic per axis.
//!
//! Mode indices count harmonics in ascending wavenumber. An axis whose
//! family contains the constant harmonic (Neumann) starts counting at 0,
//! every other axis at 1, so Dirichlet and Neumann indices coincide with the
//! integer `n` in `kappa_n = n*pi/(2l)`. Inactive axes pin their index to 0.

use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::numeric::bisect;
use crate::{Axis, Error, Point, Result};

/// Hard cap on enumerated modes; protects against runaway ceilings.
pub const DEFAULT_MODE_CAP: usize = 50_000;

const ROBIN_SCAN_DIVISIONS: f64 = 20.0;
const ROBIN_TOLERANCE: f64 = 1e-12;
const ROBIN_MAX_ITERATIONS: usize = 200;
const INACTIVE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Parity {
    /// Cosine-type, symmetric about the axis origin.
    Even,
    /// Sine-type, antisymmetric about the axis origin.
    Odd,
}

impl Parity {
    pub fn sign(self) -> f64 {
        match self {
            Parity::Even => 1.0,
            Parity::Odd => -1.0,
        }
    }

    pub fn flipped(self) -> Parity {
        match self {
            Parity::Even => Parity::Odd,
            Parity::Odd => Parity::Even,
        }
    }
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::Even => "EVEN",
            Parity::Odd => "ODD",
        })
    }
}

/// Rectangular radiator `[-L, L] x [-W, W] x [-H, H]`; `None` marks an
/// inactive (zero-thickness) axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainBox {
    half_extents: [Option<f64>; 3],
}

impl DomainBox {
    pub fn new(
        half_length: Option<f64>,
        half_width: Option<f64>,
        half_height: Option<f64>,
    ) -> Result<Self> {
        let half_extents = [half_length, half_width, half_height];
        for axis in Axis::ALL {
            if let Some(l) = half_extents[axis.index()] {
                if !(l.is_finite() && l > 0.0) {
                    return Err(Error::InvalidExtent { axis, value: l });
                }
            }
        }
        if half_extents.iter().all(Option::is_none) {
            return Err(Error::InvalidScenario(
                "radiator box needs at least one active axis".into(),
            ));
        }
        Ok(Self { half_extents })
    }

    /// Thin wire along `axis`.
    pub fn line(axis: Axis, half_extent: f64) -> Result<Self> {
        let mut e = [None; 3];
        e[axis.index()] = Some(half_extent);
        Self::new(e[0], e[1], e[2])
    }

    /// Flat plate spanning `x` and `y`.
    pub fn plate_xy(half_length: f64, half_width: f64) -> Result<Self> {
        Self::new(Some(half_length), Some(half_width), None)
    }

    pub fn volume(half_length: f64, half_width: f64, half_height: f64) -> Result<Self> {
        Self::new(Some(half_length), Some(half_width), Some(half_height))
    }

    pub fn half_extent(&self, axis: Axis) -> Option<f64> {
        self.half_extents[axis.index()]
    }

    pub fn is_active(&self, axis: Axis) -> bool {
        self.half_extents[axis.index()].is_some()
    }

    pub fn active_axes(&self) -> impl Iterator<Item = Axis> + '_ {
        Axis::ALL.into_iter().filter(|a| self.is_active(*a))
    }

    pub fn dimension(&self) -> usize {
        self.active_axes().count()
    }

    /// Closed-box membership: `|c| <= l` on active axes, `c == 0` on inactive ones.
    pub fn contains(&self, p: Point) -> bool {
        Axis::ALL.into_iter().all(|axis| {
            let c = p[axis.index()];
            match self.half_extent(axis) {
                Some(l) => c.is_finite() && c.abs() <= l,
                None => c.abs() <= INACTIVE_TOLERANCE,
            }
        })
    }

    /// Open-box membership used for feed positions.
    pub fn contains_strictly(&self, p: Point) -> bool {
        Axis::ALL.into_iter().all(|axis| {
            let c = p[axis.index()];
            match self.half_extent(axis) {
                Some(l) => c.is_finite() && c.abs() < l,
                None => c.abs() <= INACTIVE_TOLERANCE,
            }
        })
    }

    pub(crate) fn check_closed(&self, p: Point) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(outside(p))
        }
    }
}

pub(crate) fn outside(p: Point) -> Error {
    Error::OutsideBox {
        x: p[0],
        y: p[1],
        z: p[2],
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
    Robin,
}

/// Coefficients `(a, b)` of `a I + b dI/dn = 0` on both faces of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisBc {
    pub a: f64,
    pub b: f64,
}

impl AxisBc {
    pub const fn dirichlet() -> Self {
        Self { a: 1.0, b: 0.0 }
    }

    pub const fn neumann() -> Self {
        Self { a: 0.0, b: 1.0 }
    }

    pub const fn robin(a: f64, b: f64) -> Self {
        Self { a, b }
    }

    pub fn kind(&self) -> BoundaryKind {
        if self.b == 0.0 {
            BoundaryKind::Dirichlet
        } else if self.a == 0.0 {
            BoundaryKind::Neumann
        } else {
            BoundaryKind::Robin
        }
    }

    pub fn validate(&self, axis: Axis) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite()) {
            return Err(Error::NonFiniteBoundary { axis });
        }
        if self.a == 0.0 && self.b == 0.0 {
            return Err(Error::DegenerateBoundary { axis });
        }
        if self.a * self.b < 0.0 {
            return Err(Error::UnsupportedRobin {
                a: self.a,
                b: self.b,
            });
        }
        Ok(())
    }

    /// First index of this axis' harmonic family.
    pub fn index_base(&self) -> u32 {
        match self.kind() {
            BoundaryKind::Neumann => 0,
            _ => 1,
        }
    }
}

/// Per-axis boundary conditions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryCondition {
    axes: [AxisBc; 3],
}

impl BoundaryCondition {
    pub fn new(x: AxisBc, y: AxisBc, z: AxisBc) -> Self {
        Self { axes: [x, y, z] }
    }

    pub fn uniform(bc: AxisBc) -> Self {
        Self { axes: [bc; 3] }
    }

    pub fn dirichlet() -> Self {
        Self::uniform(AxisBc::dirichlet())
    }

    pub fn neumann() -> Self {
        Self::uniform(AxisBc::neumann())
    }

    pub fn axis(&self, axis: Axis) -> AxisBc {
        self.axes[axis.index()]
    }

    pub fn validate_for(&self, domain: &DomainBox) -> Result<()> {
        for axis in domain.active_axes() {
            self.axis(axis).validate(axis)?;
        }
        Ok(())
    }
}

/// Triple `(n, m, p)` along `(x, y, z)`.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize,
)]
pub struct ModeIndex {
    pub n: u32,
    pub m: u32,
    pub p: u32,
}

impl ModeIndex {
    pub const fn new(n: u32, m: u32, p: u32) -> Self {
        Self { n, m, p }
    }

    pub fn get(&self, axis: Axis) -> u32 {
        match axis {
            Axis::X => self.n,
            Axis::Y => self.m,
            Axis::Z => self.p,
        }
    }

    fn with(mut self, axis: Axis, value: u32) -> Self {
        match axis {
            Axis::X => self.n = value,
            Axis::Y => self.m = value,
            Axis::Z => self.p = value,
        }
        self
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.n, self.m, self.p)
    }
}

/// One-dimensional harmonic `cos(kappa x)` (even) or `sin(kappa x)` (odd).
///
/// `kappa == 0` with even parity is the constant harmonic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisHarmonic {
    pub wavenumber: f64,
    pub parity: Parity,
}

impl AxisHarmonic {
    pub const CONSTANT: AxisHarmonic = AxisHarmonic {
        wavenumber: 0.0,
        parity: Parity::Even,
    };

    #[inline]
    pub fn value(&self, x: f64) -> f64 {
        let arg = self.wavenumber * x;
        match self.parity {
            Parity::Even => arg.cos(),
            Parity::Odd => arg.sin(),
        }
    }

    #[inline]
    pub fn derivative(&self, x: f64) -> f64 {
        let arg = self.wavenumber * x;
        match self.parity {
            Parity::Even => -self.wavenumber * arg.sin(),
            Parity::Odd => self.wavenumber * arg.cos(),
        }
    }

    #[inline]
    pub fn second_derivative(&self, x: f64) -> f64 {
        -self.wavenumber * self.wavenumber * self.value(x)
    }

    /// `\int_{-l}^{l} f(x)^2 dx`.
    pub fn squared_norm(&self, half_extent: f64) -> f64 {
        let l = half_extent;
        let k = self.wavenumber;
        if k == 0.0 {
            return match self.parity {
                Parity::Even => 2.0 * l,
                Parity::Odd => 0.0,
            };
        }
        let cross = (2.0 * k * l).sin() / (2.0 * k);
        match self.parity {
            Parity::Even => l + cross,
            Parity::Odd => l - cross,
        }
    }

    /// Boundary residual `a f + b df/dn` at the face `x = side * l`.
    pub fn boundary_residual(&self, bc: AxisBc, half_extent: f64, side: f64) -> f64 {
        let x = side * half_extent;
        bc.a * self.value(x) + bc.b * side * self.derivative(x)
    }
}

enum ScanStop {
    Count(usize),
    Ceiling(f64),
}

/// The `count` lowest harmonics of `[-l, l]` under `bc`, ascending in wavenumber.
pub fn axis_harmonics(half_extent: f64, bc: AxisBc, count: usize) -> Result<Vec<AxisHarmonic>> {
    check_axis(half_extent, bc)?;
    if count == 0 {
        return Err(Error::EmptyRequest);
    }
    match bc.kind() {
        BoundaryKind::Robin => robin_harmonics(half_extent, bc, ScanStop::Count(count)),
        _ => {
            let base = bc.index_base();
            Ok((0..count as u32)
                .map(|i| closed_form(half_extent, bc.kind(), base + i))
                .collect())
        }
    }
}

/// Every harmonic with wavenumber `<= ceiling`, paired with its axis index.
pub fn axis_harmonics_below(
    half_extent: f64,
    bc: AxisBc,
    ceiling: f64,
    cap: usize,
) -> Result<Vec<(u32, AxisHarmonic)>> {
    check_axis(half_extent, bc)?;
    let estimate = ceiling * 2.0 * half_extent / PI + 2.0;
    if estimate > cap as f64 {
        return Err(Error::TooManyModes { cap });
    }
    let base = bc.index_base();
    let list = match bc.kind() {
        BoundaryKind::Robin => robin_harmonics(half_extent, bc, ScanStop::Ceiling(ceiling))?,
        kind => (base..)
            .map(|i| closed_form(half_extent, kind, i))
            .take_while(|h| h.wavenumber <= ceiling)
            .collect(),
    };
    Ok(list
        .into_iter()
        .enumerate()
        .map(|(i, h)| (base + i as u32, h))
        .collect())
}

/// The harmonic carrying `index` along an axis.
pub fn axis_harmonic_at(half_extent: f64, bc: AxisBc, index: u32, axis: Axis) -> Result<AxisHarmonic> {
    check_axis(half_extent, bc)?;
    let base = bc.index_base();
    if index < base {
        return Err(Error::IndexOutOfRange {
            axis,
            index,
            reason: "below the first harmonic of this boundary kind",
        });
    }
    match bc.kind() {
        BoundaryKind::Robin => {
            let list = robin_harmonics(
                half_extent,
                bc,
                ScanStop::Count((index - base) as usize + 1),
            )?;
            Ok(list[(index - base) as usize])
        }
        kind => Ok(closed_form(half_extent, kind, index)),
    }
}

fn check_axis(half_extent: f64, bc: AxisBc) -> Result<()> {
    if !(half_extent.is_finite() && half_extent > 0.0) {
        return Err(Error::InvalidExtent {
            axis: Axis::X,
            value: half_extent,
        });
    }
    bc.validate(Axis::X)
}

fn closed_form(half_extent: f64, kind: BoundaryKind, n: u32) -> AxisHarmonic {
    let wavenumber = n as f64 * PI / (2.0 * half_extent);
    let parity = match (kind, n % 2) {
        (BoundaryKind::Dirichlet, 1) | (BoundaryKind::Neumann, 0) => Parity::Even,
        _ => Parity::Odd,
    };
    AxisHarmonic { wavenumber, parity }
}

/// Roots of the even (`a cos - b k sin`) and odd (`a sin + b k cos`)
/// characteristic functions, located by a uniform bracket scan and refined
/// by bisection.
fn robin_harmonics(l: f64, bc: AxisBc, stop: ScanStop) -> Result<Vec<AxisHarmonic>> {
    let (a, b) = (bc.a, bc.b);
    let even = |k: f64| a * (k * l).cos() - b * k * (k * l).sin();
    let odd = |k: f64| a * (k * l).sin() + b * k * (k * l).cos();
    let step = PI / (ROBIN_SCAN_DIVISIONS * l);

    let mut roots: Vec<AxisHarmonic> = Vec::new();
    // the odd function vanishes trivially at k = 0; its sign just above 0 is sign(a)
    let mut prev_sign = [a.signum(), a.signum()];
    let mut prev_k = 0.0;
    let mut i: u64 = 0;
    loop {
        match stop {
            ScanStop::Count(c) if roots.len() >= c => break,
            ScanStop::Ceiling(kmax) if prev_k > kmax => break,
            _ => {}
        }
        i += 1;
        let k = i as f64 * step;
        for (slot, parity) in [(0usize, Parity::Even), (1usize, Parity::Odd)] {
            let g = |x: f64| if slot == 0 { even(x) } else { odd(x) };
            let value = g(k);
            if value == 0.0 {
                roots.push(AxisHarmonic {
                    wavenumber: k,
                    parity,
                });
                prev_sign[slot] = -prev_sign[slot];
                continue;
            }
            let sign = value.signum();
            if sign != prev_sign[slot] {
                let root = bisect(g, prev_k, k, ROBIN_TOLERANCE, ROBIN_MAX_ITERATIONS).map_err(
                    |e| Error::BisectionDiverged {
                        iterations: e.iterations,
                        near: e.last,
                    },
                )?;
                roots.push(AxisHarmonic {
                    wavenumber: root,
                    parity,
                });
            }
            prev_sign[slot] = sign;
        }
        prev_k = k;
    }
    roots.sort_by(|x, y| x.wavenumber.total_cmp(&y.wavenumber));
    match stop {
        ScanStop::Count(c) => roots.truncate(c),
        ScanStop::Ceiling(kmax) => roots.retain(|h| h.wavenumber <= kmax),
    }
    Ok(roots)
}

/// Normalized product eigenfunction `I_nmp` of a box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Eigenmode {
    index: ModeIndex,
    domain: DomainBox,
    bc: BoundaryCondition,
    harmonics: [AxisHarmonic; 3],
    wavenumber: f64,
    normalization: f64,
}

impl Eigenmode {
    pub fn new(index: ModeIndex, domain: DomainBox, bc: BoundaryCondition) -> Result<Self> {
        bc.validate_for(&domain)?;
        let mut harmonics = [AxisHarmonic::CONSTANT; 3];
        for axis in Axis::ALL {
            let idx = index.get(axis);
            match domain.half_extent(axis) {
                None if idx != 0 => {
                    return Err(Error::IndexOutOfRange {
                        axis,
                        index: idx,
                        reason: "inactive axes are pinned to index 0",
                    })
                }
                None => {}
                Some(l) => {
                    harmonics[axis.index()] = axis_harmonic_at(l, bc.axis(axis), idx, axis)?;
                }
            }
        }
        Ok(Self::from_parts(index, domain, bc, harmonics))
    }

    fn from_parts(
        index: ModeIndex,
        domain: DomainBox,
        bc: BoundaryCondition,
        harmonics: [AxisHarmonic; 3],
    ) -> Self {
        let wavenumber = harmonics
            .iter()
            .map(|h| h.wavenumber * h.wavenumber)
            .sum::<f64>()
            .sqrt();
        let normalization = Axis::ALL
            .into_iter()
            .filter_map(|axis| {
                domain
                    .half_extent(axis)
                    .map(|l| 1.0 / harmonics[axis.index()].squared_norm(l).sqrt())
            })
            .product();
        Self {
            index,
            domain,
            bc,
            harmonics,
            wavenumber,
            normalization,
        }
    }

    pub fn index(&self) -> ModeIndex {
        self.index
    }

    /// Eigen-wavenumber `k_nmp` in rad/m.
    pub fn wavenumber(&self) -> f64 {
        self.wavenumber
    }

    pub fn normalization(&self) -> f64 {
        self.normalization
    }

    pub fn domain(&self) -> &DomainBox {
        &self.domain
    }

    pub fn boundary(&self) -> &BoundaryCondition {
        &self.bc
    }

    pub fn harmonic(&self, axis: Axis) -> AxisHarmonic {
        self.harmonics[axis.index()]
    }

    pub fn parity(&self) -> [Parity; 3] {
        [
            self.harmonics[0].parity,
            self.harmonics[1].parity,
            self.harmonics[2].parity,
        ]
    }

    /// Largest per-axis wavenumber.
    pub fn max_axis_wavenumber(&self) -> f64 {
        self.harmonics
            .iter()
            .map(|h| h.wavenumber)
            .fold(0.0, f64::max)
    }

    pub fn eval(&self, p: Point) -> Result<f64> {
        self.domain.check_closed(p)?;
        Ok(self.value_at(p))
    }

    /// Evaluation without the box check; harmonics extend analytically.
    #[inline]
    pub fn value_at(&self, p: Point) -> f64 {
        self.normalization
            * self.harmonics[0].value(p[0])
            * self.harmonics[1].value(p[1])
            * self.harmonics[2].value(p[2])
    }

    /// `dI/d(axis)` at `p`.
    pub fn derivative(&self, axis: Axis, p: Point) -> Result<f64> {
        self.domain.check_closed(p)?;
        Ok(self.derivative_at(axis, p))
    }

    #[inline]
    pub fn derivative_at(&self, axis: Axis, p: Point) -> f64 {
        let mut v = self.normalization;
        for a in Axis::ALL {
            let h = &self.harmonics[a.index()];
            v *= if a == axis {
                h.derivative(p[a.index()])
            } else {
                h.value(p[a.index()])
            };
        }
        v
    }

    /// `|I|` maximum over the box (product of per-axis maxima).
    pub fn max_abs(&self) -> f64 {
        self.normalization
    }
}

/// `k_nmp` for a single index.
pub fn eigen_wavenumber(index: ModeIndex, domain: &DomainBox, bc: &BoundaryCondition) -> Result<f64> {
    Ok(Eigenmode::new(index, *domain, *bc)?.wavenumber())
}

pub fn eigenfunction_eval(mode: &Eigenmode, p: Point) -> Result<f64> {
    mode.eval(p)
}

pub fn parity_of(mode: &Eigenmode) -> [Parity; 3] {
    mode.parity()
}

/// All modes with `k_nmp <= k_ceiling`, ascending in `k`, ties by `(n, m, p)`.
pub fn enumerate_modes(
    domain: &DomainBox,
    bc: &BoundaryCondition,
    k_ceiling: f64,
) -> Result<Vec<Eigenmode>> {
    enumerate_modes_capped(domain, bc, k_ceiling, DEFAULT_MODE_CAP)
}

pub fn enumerate_modes_capped(
    domain: &DomainBox,
    bc: &BoundaryCondition,
    k_ceiling: f64,
    cap: usize,
) -> Result<Vec<Eigenmode>> {
    if !(k_ceiling.is_finite() && k_ceiling > 0.0) {
        return Err(Error::InvalidCeiling(k_ceiling));
    }
    bc.validate_for(domain)?;
    let per_axis: Vec<Vec<(u32, AxisHarmonic)>> = Axis::ALL
        .into_iter()
        .map(|axis| match domain.half_extent(axis) {
            Some(l) => axis_harmonics_below(l, bc.axis(axis), k_ceiling, cap),
            None => Ok(vec![(0, AxisHarmonic::CONSTANT)]),
        })
        .collect::<Result<_>>()?;

    let ceiling_sq = k_ceiling * k_ceiling;
    let mut modes = Vec::new();
    for &(n, hx) in &per_axis[0] {
        let kx2 = hx.wavenumber * hx.wavenumber;
        for &(m, hy) in &per_axis[1] {
            let kxy2 = kx2 + hy.wavenumber * hy.wavenumber;
            if kxy2 > ceiling_sq {
                break;
            }
            for &(p, hz) in &per_axis[2] {
                let index = ModeIndex::default()
                    .with(Axis::X, n)
                    .with(Axis::Y, m)
                    .with(Axis::Z, p);
                let mode = Eigenmode::from_parts(index, *domain, *bc, [hx, hy, hz]);
                if mode.wavenumber() > k_ceiling {
                    break;
                }
                if modes.len() >= cap {
                    return Err(Error::TooManyModes { cap });
                }
                modes.push(mode);
            }
        }
    }
    modes.sort_by(|a, b| {
        a.wavenumber()
            .partial_cmp(&b.wavenumber())
            .unwrap_or(Ordering::Equal)
            .then(a.index().cmp(&b.index()))
    });
    Ok(modes)
}
