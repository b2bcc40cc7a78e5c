//! Product quadrature on the sphere, spherical caps and annular bands, plus
//! Gauss–Legendre rules on the real line.
//!
//! Node values may be computed in parallel, but every reduction runs
//! sequentially in node order with compensated summation, so results are
//! bit-identical for any thread count.

use std::f64::consts::PI;
use std::num::NonZeroUsize;

use gauss_quad::legendre::GaussLegendre;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Direction;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(n: usize) -> Result<Vec<(f64, f64)>> {
    let degree = NonZeroUsize::new(n)
        .ok_or_else(|| Error::InvalidParameter("Gauss–Legendre order must be >= 1".into()))?;
    let mut pairs = GaussLegendre::new(degree).as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    Ok(pairs)
}

/// Values that can be integrated: weighted and summed with compensation.
pub trait Quantity: Copy + Send + Sync {
    fn zero() -> Self;
    fn weighted(self, w: f64) -> Self;
    fn magnitude(&self) -> f64;
    /// One Kahan–Babuška step.
    fn compensated_add(sum: &mut Self, carry: &mut Self, x: Self);
}

fn neumaier(sum: &mut f64, carry: &mut f64, x: f64) {
    let t = *sum + x;
    if sum.abs() >= x.abs() {
        *carry += (*sum - t) + x;
    } else {
        *carry += (x - t) + *sum;
    }
    *sum = t;
}

impl Quantity for f64 {
    fn zero() -> Self {
        0.0
    }
    fn weighted(self, w: f64) -> Self {
        self * w
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn compensated_add(sum: &mut Self, carry: &mut Self, x: Self) {
        neumaier(sum, carry, x);
    }
}

impl Quantity for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn weighted(self, w: f64) -> Self {
        self * w
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn compensated_add(sum: &mut Self, carry: &mut Self, x: Self) {
        neumaier(&mut sum.re, &mut carry.re, x.re);
        neumaier(&mut sum.im, &mut carry.im, x.im);
    }
}

/// Compensated sum in iteration order.
pub fn compensated_sum<T: Quantity>(values: impl IntoIterator<Item = T>) -> T {
    let mut sum = T::zero();
    let mut carry = T::zero();
    for v in values {
        T::compensated_add(&mut sum, &mut carry, v);
    }
    let mut total = sum;
    T::compensated_add(&mut total, &mut T::zero(), carry);
    total
}

/// A rule on `[a, b]` (possibly unbounded after a change of variables).
#[derive(Clone, Debug, PartialEq)]
pub struct LineRule {
    pub nodes: Vec<(f64, f64)>,
}

impl LineRule {
    pub fn gauss_legendre(a: f64, b: f64, n: usize) -> Result<Self> {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = gauss_legendre(n)?
            .into_iter()
            .map(|(x, w)| (mid + half * x, half * w))
            .collect();
        Ok(Self { nodes })
    }

    /// `panels` equal Gauss–Legendre panels of order `n` on `[a, b]`.
    pub fn composite(a: f64, b: f64, panels: usize, n: usize) -> Result<Self> {
        if panels == 0 {
            return Err(Error::InvalidParameter("need at least one panel".into()));
        }
        let base = gauss_legendre(n)?;
        let h = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * n);
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            nodes.extend(base.iter().map(|&(x, w)| (mid + 0.5 * h * x, 0.5 * h * w)));
        }
        Ok(Self { nodes })
    }

    /// Semi-infinite tail `[c, ∞)` (or `(-∞, c]` when `width < 0`) under
    /// `t = c + width/v - width`, `v ∈ (0, 1]`. Integrands decaying like
    /// `1/t²` become bounded in `v`.
    pub fn algebraic_tail(c: f64, width: f64, n: usize) -> Result<Self> {
        if width == 0.0 {
            return Err(Error::InvalidParameter("tail width must be nonzero".into()));
        }
        let nodes = gauss_legendre(n)?
            .into_iter()
            .map(|(x, w)| {
                let v = 0.5 * (x + 1.0);
                let t = c + width / v - width;
                (t, 0.5 * w * width.abs() / (v * v))
            })
            .collect();
        Ok(Self { nodes })
    }

    pub fn concat(mut self, other: LineRule) -> Self {
        self.nodes.extend(other.nodes);
        self
    }

    pub fn integrate<T: Quantity>(&self, f: impl Fn(f64) -> T) -> T {
        compensated_sum(self.nodes.iter().map(|&(t, w)| f(t).weighted(w)))
    }
}

/// Nodes `(n̂, weight)` covering the band `inner_angle ≤ θ ≤ cap_angle`
/// around `pole`. A cap has `inner_angle = 0`; the full sphere has
/// `cap_angle = π`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SphereRule {
    pub nodes: Vec<(Direction, f64)>,
    pub pole: Direction,
    pub inner_angle: f64,
    pub cap_angle: f64,
}

impl SphereRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn weight_sum(&self) -> f64 {
        compensated_sum(self.nodes.iter().map(|&(_, w)| w))
    }

    /// `2π(cos θ_inner - cos β)`, the solid angle covered.
    pub fn solid_angle(&self) -> f64 {
        2.0 * PI * (self.inner_angle.cos() - self.cap_angle.cos())
    }
}

/// Gauss–Legendre in `cos θ` on `[cos β, 1]` times uniform `φ`, with `θ`
/// measured from `pole`.
pub fn product_rule(
    pole: Direction,
    cap_angle: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<SphereRule> {
    band_rule(pole, 0.0, cap_angle, n_theta, n_phi)
}

/// Product rule on the annulus `inner ≤ θ ≤ outer`.
pub fn band_rule(
    pole: Direction,
    inner: f64,
    outer: f64,
    n_theta: usize,
    n_phi: usize,
) -> Result<SphereRule> {
    if n_theta == 0 || n_phi == 0 {
        return Err(Error::InvalidParameter(
            "n_theta and n_phi must be >= 1".into(),
        ));
    }
    if !(0.0 <= inner && inner < outer && outer <= PI) {
        return Err(Error::InvalidParameter(format!(
            "band [{inner}, {outer}] must satisfy 0 <= inner < outer <= π"
        )));
    }
    let (c_hi, c_lo) = (inner.cos(), outer.cos());
    let half = 0.5 * (c_hi - c_lo);
    let mid = 0.5 * (c_hi + c_lo);
    let dphi = 2.0 * PI / n_phi as f64;
    let (e1, e2) = pole.frame();
    let p = pole.vector();
    let mut nodes = Vec::with_capacity(n_theta * n_phi);
    for (x, w) in gauss_legendre(n_theta)? {
        let c = mid + half * x;
        let s = (1.0 - c * c).max(0.0).sqrt();
        for j in 0..n_phi {
            let (sp, cp) = (j as f64 * dphi).sin_cos();
            let v = p * c + e1 * (s * cp) + e2 * (s * sp);
            // renormalize away the rounding in the frame rotation
            nodes.push((Direction::new(v)?, half * w * dphi));
        }
    }
    Ok(SphereRule {
        nodes,
        pole,
        inner_angle: inner,
        cap_angle: outer,
    })
}

/// Weighted sum over the rule. `f` may run on several threads; the sum is
/// taken in node order.
pub fn integrate<T, F>(rule: &SphereRule, f: F) -> Result<T>
where
    T: Quantity,
    F: Fn(&Direction) -> Result<T> + Sync,
{
    let values: Vec<T> = rule
        .nodes
        .par_iter()
        .map(|(n, w)| f(n).map(|v| v.weighted(*w)))
        .collect::<Result<_>>()?;
    Ok(compensated_sum(values))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdaptiveOptions {
    pub n_theta: usize,
    pub n_phi: usize,
    /// Relative change between successive refinements that counts as converged.
    pub tol: f64,
    pub max_doublings: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self {
            n_theta: 16,
            n_phi: 16,
            tol: 1e-8,
            max_doublings: 12,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdaptiveResult<T> {
    pub value: T,
    /// Absolute change over the last doubling.
    pub error_estimate: f64,
    pub n_theta: usize,
    pub n_phi: usize,
}

/// Doubles both orders of the rule produced by `builder` until two successive
/// values differ by less than `tol` relative to the latest one.
pub fn integrate_adaptive<T, B, F>(
    builder: B,
    f: F,
    options: &AdaptiveOptions,
) -> Result<AdaptiveResult<T>>
where
    T: Quantity + std::ops::Sub<Output = T>,
    B: Fn(usize, usize) -> Result<SphereRule>,
    F: Fn(&Direction) -> Result<T> + Sync,
{
    let (mut nt, mut np) = (options.n_theta, options.n_phi);
    let mut previous = integrate(&builder(nt, np)?, &f)?;
    let mut change = f64::INFINITY;
    for _ in 0..options.max_doublings {
        nt *= 2;
        np *= 2;
        let value = integrate(&builder(nt, np)?, &f)?;
        change = (value - previous).magnitude();
        if change <= options.tol * value.magnitude() {
            return Ok(AdaptiveResult {
                value,
                error_estimate: change,
                n_theta: nt,
                n_phi: np,
            });
        }
        previous = value;
    }
    Err(Error::NoConvergence {
        iterations: options.max_doublings,
        last_change: change,
    })
}
