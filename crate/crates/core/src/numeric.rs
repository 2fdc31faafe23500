//! Small numerical kernels shared by the physics modules: reproducible
//! summation, symmetric trigonometric tables, Gauss-Legendre rules, and
//! bracketing / golden-section searches.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use num_complex::Complex64;

const PAIRWISE_BLOCK: usize = 8;

/// Pairwise (cascade) summation. The association order depends only on the
/// slice length, so results are reproducible regardless of how the terms
/// were produced.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(0.0, |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Complex counterpart of [`pairwise_sum`].
pub fn pairwise_sum_c(values: &[Complex64]) -> Complex64 {
    if values.len() <= PAIRWISE_BLOCK {
        return values.iter().fold(Complex64::new(0.0, 0.0), |acc, v| acc + v);
    }
    let mid = values.len() / 2;
    pairwise_sum_c(&values[..mid]) + pairwise_sum_c(&values[mid..])
}

/// `(cos, sin)` of the angle `2*pi*step/steps`.
///
/// The angle is folded into the first octant using integer arithmetic, so
/// the table is exactly symmetric: quadrant angles give exact `0`/`±1`, and
/// reflections about either coordinate axis reproduce the same magnitudes
/// bit for bit.
pub fn trig_at(step: i64, steps: i64) -> (f64, f64) {
    assert!(steps > 0, "trig table needs a positive denominator");
    let r = step.rem_euclid(steps);
    let quadrant = (4 * r) / steps;
    let rem = 4 * r - quadrant * steps;
    let folded = 2 * rem > steps;
    let m = if folded { steps - rem } else { rem };
    let (c0, s0) = if 2 * m == steps {
        (FRAC_1_SQRT_2, FRAC_1_SQRT_2)
    } else {
        let alpha = FRAC_PI_2 * m as f64 / steps as f64;
        (alpha.cos(), alpha.sin())
    };
    let (c, s) = if folded { (s0, c0) } else { (c0, s0) };
    match quadrant {
        0 => (c, s),
        1 => (-s, c),
        2 => (-c, -s),
        _ => (s, -c),
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Nodes are generated for the positive half by Newton iteration on the
/// Legendre recurrence and mirrored, so `x[i] == -x[n-1-i]` exactly and the
/// middle node of an odd rule is exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(order: usize) -> Self {
        assert!(order >= 1, "Gauss-Legendre order must be >= 1");
        let n = order;
        let half = n.div_ceil(2);
        let mut pos: Vec<(f64, f64)> = Vec::with_capacity(half);
        for i in 0..half {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            if n % 2 == 1 && i == half - 1 {
                x = 0.0;
            }
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                if x == 0.0 && n % 2 == 1 {
                    break;
                }
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 * x.abs().max(1.0) {
                    dp = legendre(n, x).1;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            pos.push((x, w));
        }
        let mut nodes = Vec::with_capacity(n);
        let mut weights = Vec::with_capacity(n);
        for &(x, w) in &pos {
            if x != 0.0 {
                nodes.push(-x);
                weights.push(w);
            }
        }
        for &(x, w) in pos.iter().rev() {
            nodes.push(x);
            weights.push(w);
        }
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrate a real function over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let terms: Vec<f64> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(mid + half * t))
            .collect();
        half * pairwise_sum(&terms)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Composite Gauss-Legendre rule on a symmetric interval `[-l, l]`, stored as
/// mirrored node pairs.
///
/// Integrands are evaluated as `w * (f(x) + f(-x))`, so an integrand that is
/// odd to the last bit integrates to exactly zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricRule {
    half_extent: f64,
    pairs: Vec<(f64, f64)>,
    center_weight: f64,
}

impl SymmetricRule {
    /// `panels` equal sub-intervals, each carrying an `order`-point rule.
    pub fn composite(half_extent: f64, panels: usize, order: usize) -> Self {
        let panels = panels.max(1);
        let gl = GaussLegendre::new(order);
        let h = half_extent / panels as f64;
        let mut pairs = Vec::new();
        let mut center_weight = 0.0;
        for p in 0..panels {
            let offset = 2 * p as i64 + 1 - panels as i64;
            if offset < 0 {
                continue;
            }
            let c = half_extent * offset as f64 / panels as f64;
            for (&t, &w) in gl.nodes().iter().zip(gl.weights()) {
                if offset == 0 {
                    if t > 0.0 {
                        pairs.push((h * t, h * w));
                    } else if t == 0.0 {
                        center_weight = h * w;
                    }
                } else {
                    pairs.push((c + h * t, h * w));
                }
            }
        }
        Self {
            half_extent,
            pairs,
            center_weight,
        }
    }

    /// Rule with at least `order` nodes per `2*pi/max_wavenumber` of extent.
    pub fn for_oscillation(half_extent: f64, max_wavenumber: f64, order: usize) -> Self {
        let cycles = 2.0 * half_extent * max_wavenumber / (2.0 * PI);
        let panels = cycles.ceil().max(1.0) as usize;
        Self::composite(half_extent, panels, order)
    }

    pub fn half_extent(&self) -> f64 {
        self.half_extent
    }

    pub fn node_count(&self) -> usize {
        2 * self.pairs.len() + usize::from(self.center_weight != 0.0)
    }

    /// Positive nodes and their weights; the mirrored node `-x` shares the weight.
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn center_weight(&self) -> f64 {
        self.center_weight
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        let mut terms: Vec<f64> = self
            .pairs
            .iter()
            .map(|&(x, w)| w * (f(x) + f(-x)))
            .collect();
        if self.center_weight != 0.0 {
            terms.push(self.center_weight * f(0.0));
        }
        pairwise_sum(&terms)
    }

    pub fn integrate_c<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        let mut terms: Vec<Complex64> = self
            .pairs
            .iter()
            .map(|&(x, w)| (f(x) + f(-x)) * w)
            .collect();
        if self.center_weight != 0.0 {
            terms.push(f(0.0) * self.center_weight);
        }
        pairwise_sum_c(&terms)
    }
}

/// Outcome of a failed bracketing search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoConvergence {
    pub iterations: usize,
    pub last: f64,
}

/// Bisection on a sign-changing bracket `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol * max(1, |x|)` or an exact
/// zero is hit.
pub fn bisect<F: Fn(f64) -> f64>(
    f: F,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
    max_iter: usize,
) -> Result<f64, NoConvergence> {
    let mut f_lo = f(lo);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f(hi) == 0.0 {
        return Ok(hi);
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol * mid.abs().max(1.0) {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(NoConvergence {
        iterations: max_iter,
        last: 0.5 * (lo + hi),
    })
}

/// Golden-section minimization on `[a, b]`; returns the best abscissa seen
/// and its value.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    mut a: f64,
    mut b: f64,
    tol: f64,
    max_iter: usize,
) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..max_iter {
        if (b - a).abs() <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
