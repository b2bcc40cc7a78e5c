//! Pulsed-beam wavelets and the time-domain reproducing relations.
//!
//! The time-domain integrand replaces `e^{iωζ}` by the analytic Gaussian
//! `ĝ_d(t - ζ)` and takes twice the real part. Because `ĝ_d` decays in the
//! lower half plane, rear-zone disks (`η < 0`) contribute little, which is
//! what makes caps around `x̂_r` a compressed representation.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_analytic_domain, complex_distance_alpha, zeta_derivative, ComplexRadius, Direction,
    PathGeometry, Role, Vector3,
};
use crate::quadrature::{compensated_sum, integrate, LineRule, Quantity, SphereRule};
use crate::scaled::{ScaledComplex, ScaledSum};
use crate::signal::{
    analytic_gaussian, analytic_gaussian_derivative, analytic_gaussian_pair, gaussian,
    ComplexTime, GaussianSignal,
};

/// Exponents above this are evaluated in log form.
const PLAIN_EXPONENT_LIMIT: f64 = 600.0;

/// `(x, t)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeEvent {
    pub x: Vector3,
    pub t: f64,
}

impl SpacetimeEvent {
    pub fn new(x: Vector3, t: f64) -> Self {
        Self { x, t }
    }
}

/// `z_α = (αn̂, t + is)`: the disk `D(αn̂)` pulsed around time `t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexSourceEvent {
    pub alpha: ComplexRadius,
    pub n: Direction,
    pub t: f64,
    pub s: f64,
}

impl ComplexSourceEvent {
    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.t, self.s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSource {
    pub position: Vector3,
    pub amplitude: f64,
    pub emission_time: f64,
}

/// Point sources standing in for a charge density supported inside `S_R`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SourceEnsemble {
    pub sources: Vec<EnsembleSource>,
}

impl SourceEnsemble {
    pub fn new(sources: Vec<EnsembleSource>) -> Self {
        Self { sources }
    }

    pub fn check_inside(&self, radius: f64) -> Result<()> {
        for src in &self.sources {
            if src.position.norm() >= radius {
                return Err(Error::OutsideSphere {
                    norm: src.position.norm(),
                    radius,
                });
            }
        }
        Ok(())
    }
}

/// `P_d(x, t) = g_d(t - r)/r`.
pub fn gaussian_propagator(x: SpacetimeEvent, sig: GaussianSignal) -> Result<f64> {
    let r = x.x.norm();
    if r == 0.0 {
        return Err(Error::Singular("propagator at r = 0"));
    }
    Ok(sig.value(x.t - r) / r)
}

/// `P̃_d(x_r - z) = ĝ_d(t_r - τ - ζ_r)/ζ_r`.
pub fn pulsed_beam_propagator(
    x_r: SpacetimeEvent,
    z: ComplexSourceEvent,
    sig: GaussianSignal,
) -> Result<ScaledComplex> {
    let rec = complex_distance_alpha(&x_r.x, z.alpha.alpha(), &z.n, Role::Reception)?;
    if rec.zeta.norm() == 0.0 {
        return Err(Error::Singular("pulsed beam on the focal circle"));
    }
    let tau = Complex64::new(x_r.t, 0.0) - z.tau() - rec.zeta;
    Ok(analytic_gaussian(tau.into(), sig) / ScaledComplex::from_complex(rec.zeta))
}

/// `P̃_d(z - x_e) = ĝ_d(τ - t_e - ζ_e)/ζ_e`, the beam seen by the disk.
pub fn pulsed_beam_emission(
    z: ComplexSourceEvent,
    x_e: SpacetimeEvent,
    sig: GaussianSignal,
) -> Result<ScaledComplex> {
    let em = complex_distance_alpha(&x_e.x, z.alpha.alpha(), &z.n, Role::Emission)?;
    if em.zeta.norm() == 0.0 {
        return Err(Error::Singular("pulsed beam on the focal circle"));
    }
    let tau = z.tau() - x_e.t - em.zeta;
    Ok(analytic_gaussian(tau.into(), sig) / ScaledComplex::from_complex(em.zeta))
}

/// Far-zone peak-time pattern `ĝ_d(i(a cos θ_r - η_e))`, real and
/// decreasing in `θ_r`.
pub fn radiation_pattern_time(theta_r: f64, a: f64, eta_e: f64, sig: GaussianSignal) -> ScaledComplex {
    analytic_gaussian(ComplexTime::new(0.0, a * theta_r.cos() - eta_e), sig)
}

/// Carrier frequency `2η/d²` of a pulsed beam with `Im(t - ζ) = η`.
pub fn compression_frequency(eta: f64, d: f64) -> f64 {
    2.0 * eta / (d * d)
}

/// The `n̂`-dependent part of the time-domain integrand:
/// `I(t) = 2 Re[c0 ĝ_d(t - ζ) + c1 ĝ_d'(t - ζ)]`.
#[derive(Clone, Copy, Debug)]
pub struct TimeKernel {
    pub zeta: Complex64,
    pub c0: Complex64,
    pub c1: Complex64,
}

impl TimeKernel {
    pub fn new(n: &Direction, x_e: &Vector3, x_r: &Vector3, alpha: Complex64) -> Result<Self> {
        let path = PathGeometry::new(n, x_e, x_r, alpha)?;
        let (zr, ze) = (path.zeta_r(), path.zeta_e());
        let (dr, de) = (path.dzeta_r, path.dzeta_e);
        let pre = alpha * alpha / (4.0 * PI * zr * ze);
        Ok(Self {
            zeta: path.zeta(),
            c0: pre * (de / ze - dr / zr),
            c1: pre * (de - dr),
        })
    }

    /// `c0 ĝ + c1 ĝ'` at `t - ζ`, before taking twice the real part.
    pub fn analytic(&self, t: f64, sig: GaussianSignal) -> Result<ScaledComplex> {
        let tau = Complex64::new(t, 0.0) - self.zeta;
        let (g, dg) = analytic_gaussian_pair(tau, sig.d);
        let plain = self.c0 * g + self.c1 * dg;
        if plain.re.is_finite() && plain.im.is_finite() {
            return Ok(ScaledComplex::from_complex(plain));
        }
        let ct = ComplexTime::from(tau);
        let g = analytic_gaussian(ct, sig).mul_complex(self.c0);
        let dg = analytic_gaussian_derivative(ct, sig)?.mul_complex(self.c1);
        Ok(g.add(&dg))
    }

    pub fn eval(&self, t: f64, sig: GaussianSignal) -> Result<f64> {
        let tau = Complex64::new(t, 0.0) - self.zeta;
        let (g, dg) = analytic_gaussian_pair(tau, sig.d);
        let v = 2.0 * (self.c0 * g + self.c1 * dg).re;
        if v.is_finite() {
            return Ok(v);
        }
        self.analytic(t, sig)?
            .try_complex()
            .map(|z| 2.0 * z.re)
            .ok_or(Error::Singular("time-domain integrand overflows"))
    }

    /// The alternative integrand with `g_d` in place of `ĝ_d` and no real part.
    pub fn alternative(&self, t: f64, sig: GaussianSignal) -> ScaledComplex {
        let tau = Complex64::new(t, 0.0) - self.zeta;
        let g = gaussian(tau.into(), sig);
        let factor = self.c0 + self.c1 * (-2.0 * tau / (sig.d * sig.d));
        g.mul_complex(factor)
    }
}

/// `I^α_d(n̂, t)`.
pub fn huygens_integrand_time(
    n: &Direction,
    x_e: &Vector3,
    x_r: &Vector3,
    t: f64,
    alpha: &ComplexRadius,
    sig: GaussianSignal,
) -> Result<f64> {
    check_analytic_domain(x_e, x_r, alpha)?;
    TimeKernel::new(n, x_e, x_r, alpha.alpha())?.eval(t, sig)
}

/// `∫ dn̂ I^α_d(n̂, t)`, which approximates `g_d(t - r)/r`.
pub fn reproduce_propagator_time(
    x_e: &Vector3,
    x_r: &Vector3,
    t: f64,
    alpha: &ComplexRadius,
    sig: GaussianSignal,
    rule: &SphereRule,
) -> Result<f64> {
    check_analytic_domain(x_e, x_r, alpha)?;
    integrate(rule, |n| TimeKernel::new(n, x_e, x_r, alpha.alpha())?.eval(t, sig))
}

/// Nodes per work unit in [`reproduce_propagator_series`]; fixed so the
/// summation order does not depend on the thread count.
const SERIES_CHUNK: usize = 256;

/// The reconstruction at many times. Node kernels are built once and each
/// time sample is accumulated in node order.
pub fn reproduce_propagator_series(
    x_e: &Vector3,
    x_r: &Vector3,
    times: &[f64],
    alpha: &ComplexRadius,
    sig: GaussianSignal,
    rule: &SphereRule,
) -> Result<Vec<f64>> {
    check_analytic_domain(x_e, x_r, alpha)?;
    let nodes: Vec<(TimeKernel, f64)> = rule
        .nodes
        .iter()
        .map(|(n, w)| Ok((TimeKernel::new(n, x_e, x_r, alpha.alpha())?, *w)))
        .collect::<Result<_>>()?;
    series_over_kernels(&nodes, times, sig)
}

/// `Σ_k w_k I_k(t)` for each `t`, chunked and reduced in a fixed order.
pub fn series_over_kernels(
    nodes: &[(TimeKernel, f64)],
    times: &[f64],
    sig: GaussianSignal,
) -> Result<Vec<f64>> {
    let partials: Vec<Vec<f64>> = nodes
        .par_chunks(SERIES_CHUNK)
        .map(|chunk| {
            let mut sum = vec![0.0; times.len()];
            let mut carry = vec![0.0; times.len()];
            for (kernel, w) in chunk {
                for (k, &t) in times.iter().enumerate() {
                    f64::compensated_add(&mut sum[k], &mut carry[k], w * kernel.eval(t, sig)?);
                }
            }
            Ok(sum.iter().zip(&carry).map(|(s, c)| s + c).collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..times.len())
        .map(|k| compensated_sum(partials.iter().map(|p| p[k])))
        .collect())
}

/// `J^α_d(n̂, t)`: the same expansion with `g_d` instead of `ĝ_d`. Its
/// magnitude reaches `e^{η²/d²}` in the rear zone, hence the log form.
pub fn alternative_integrand_time(
    n: &Direction,
    x_e: &Vector3,
    x_r: &Vector3,
    t: f64,
    alpha: &ComplexRadius,
    sig: GaussianSignal,
) -> Result<ScaledComplex> {
    check_analytic_domain(x_e, x_r, alpha)?;
    Ok(TimeKernel::new(n, x_e, x_r, alpha.alpha())?.alternative(t, sig))
}

/// `∫ dn̂ J^α_d(n̂, t)` summed in log form. Mathematically equal to
/// `g_d(t - r)/r`; numerically the result drowns in the rounding error of
/// terms as large as `e^{4a²/d²}`.
pub fn reproduce_propagator_alternative(
    x_e: &Vector3,
    x_r: &Vector3,
    t: f64,
    alpha: &ComplexRadius,
    sig: GaussianSignal,
    rule: &SphereRule,
) -> Result<(ScaledComplex, f64)> {
    check_analytic_domain(x_e, x_r, alpha)?;
    let terms: Vec<ScaledComplex> = rule
        .nodes
        .par_iter()
        .map(|(n, w)| {
            Ok(TimeKernel::new(n, x_e, x_r, alpha.alpha())?
                .alternative(t, sig)
                .scale(*w))
        })
        .collect::<Result<_>>()?;
    let mut sum = ScaledSum::new();
    for term in terms {
        sum.add(term);
    }
    Ok((sum.value(), sum.max_log_magnitude()))
}

/// Choice of the imaginary time `s` of the complex source events.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SPolicy {
    /// `s = (η_e + η_r)/2`.
    Midpoint,
    /// `s = η_e + λ(η_r - η_e)`.
    Lambda(f64),
    /// The same `s` for every disk.
    Fixed(f64),
}

impl SPolicy {
    pub fn s(&self, eta_e: f64, eta_r: f64) -> f64 {
        match *self {
            SPolicy::Midpoint => 0.5 * (eta_e + eta_r),
            SPolicy::Lambda(lambda) => eta_e + lambda * (eta_r - eta_e),
            SPolicy::Fixed(s) => s,
        }
    }
}

/// Time quadrature for the spacetime relation: composite Gauss–Legendre over
/// the window where either pulse is concentrated, and algebraically mapped
/// tails beyond it for the `1/t²` Cauchy-kernel decay.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRule {
    /// Window margin around the pulse centres, in units of `max(d_e, d_r)`.
    pub half_width: f64,
    /// Panel length in units of `max(d_e, d_r)`.
    pub panel_width: f64,
    pub nodes_per_panel: usize,
    pub tail_nodes: usize,
}

impl Default for TimeRule {
    fn default() -> Self {
        Self {
            half_width: 8.0,
            panel_width: 1.0,
            nodes_per_panel: 10,
            tail_nodes: 24,
        }
    }
}

impl TimeRule {
    /// Rule for pulses centred between `lo` and `hi`.
    pub fn build(&self, lo: f64, hi: f64, d: f64) -> Result<LineRule> {
        let a = lo - self.half_width * d;
        let b = hi + self.half_width * d;
        let panels = ((b - a) / (self.panel_width * d)).ceil().max(1.0) as usize;
        let width = b - a;
        Ok(LineRule::algebraic_tail(a, -width, self.tail_nodes)?
            .concat(LineRule::composite(a, b, panels, self.nodes_per_panel)?)
            .concat(LineRule::algebraic_tail(b, width, self.tail_nodes)?))
    }
}

/// Outcome of a spacetime reproduction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeResult {
    /// The reconstructed analytic propagator `P̃_d(x_r - x_e)`.
    pub value: ScaledComplex,
    /// Disks whose `s` left `[η_e, η_r]` by more than the margin.
    pub unstable_nodes: usize,
    /// Largest log-magnitude of any integrand sample.
    pub max_log_magnitude: f64,
}

impl SpacetimeResult {
    pub fn is_unstable(&self) -> bool {
        self.unstable_nodes > 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpacetimeOptions {
    pub policy: SPolicy,
    pub time_rule: TimeRule,
    /// Allowed excursion of `s` outside `[η_e, η_r]`, as a fraction of
    /// `|η_r - η_e|`.
    pub instability_margin: f64,
}

impl Default for SpacetimeOptions {
    fn default() -> Self {
        Self {
            policy: SPolicy::Midpoint,
            time_rule: TimeRule::default(),
            instability_margin: 0.1,
        }
    }
}

/// `(ĝ, ∂ĝ)` at complex time, plain when safe and in log form otherwise.
fn pulse(tau: Complex64, d: f64) -> (ScaledComplex, ScaledComplex) {
    let exponent = if tau.im > 0.0 { (tau.im / d).powi(2) } else { 0.0 };
    if exponent < PLAIN_EXPONENT_LIMIT {
        let (g, dg) = analytic_gaussian_pair(tau, d);
        if g.re.is_finite() && g.im.is_finite() && dg.re.is_finite() && dg.im.is_finite() {
            return (ScaledComplex::from_complex(g), ScaledComplex::from_complex(dg));
        }
    }
    let sig = GaussianSignal { d };
    let ct = ComplexTime::from(tau);
    let dg = if tau.norm() == 0.0 {
        ScaledComplex::from_complex(Complex64::new(0.0, -1.0 / (PI * d * d)))
    } else {
        analytic_gaussian_derivative(ct, sig).expect("τ ≠ 0")
    };
    (analytic_gaussian(ct, sig), dg)
}

/// `(P̃, ∂_α P̃)` for a leg with complex time argument `tau` of `ĝ`.
/// `∂_α τ = -ζ'` on both legs.
fn leg(tau: Complex64, zeta: Complex64, dzeta: Complex64, d: f64) -> (ScaledComplex, ScaledComplex) {
    let (g, dg) = pulse(tau, d);
    let inv = ScaledComplex::from_complex(1.0 / zeta);
    let value = g * inv;
    // ∂(ĝ/ζ) = -ζ'(ĝ'/ζ + ĝ/ζ²)
    let derivative = (dg * inv).add(&(g * inv * inv)).mul_complex(-dzeta);
    (value, derivative)
}

struct NodeTerm {
    value: ScaledComplex,
    max_log: f64,
    unstable: bool,
}

#[allow(clippy::too_many_arguments)]
fn spacetime_node(
    n: &Direction,
    x_e: &SpacetimeEvent,
    x_r: &SpacetimeEvent,
    alpha: Complex64,
    d_e: f64,
    d_r: f64,
    options: &SpacetimeOptions,
    weight: f64,
) -> Result<NodeTerm> {
    let path = PathGeometry::new(n, &x_e.x, &x_r.x, alpha)?;
    let (eta_e, eta_r) = (path.emission.eta, path.reception.eta);
    let s = options.policy.s(eta_e, eta_r);
    let margin = options.instability_margin * (eta_r - eta_e).abs();
    let unstable = s < eta_e.min(eta_r) - margin || s > eta_e.max(eta_r) + margin;
    let center_e = x_e.t + path.emission.xi;
    let center_r = x_r.t - path.reception.xi;
    let d = d_e.max(d_r);
    let rule = options
        .time_rule
        .build(center_e.min(center_r), center_e.max(center_r), d)?;
    let mut sum = ScaledSum::new();
    let mut max_log = f64::NEG_INFINITY;
    for &(t, w) in &rule.nodes {
        let tau = Complex64::new(t, s);
        let tau_e = tau - x_e.t - path.zeta_e();
        let tau_r = Complex64::new(x_r.t, 0.0) - tau - path.zeta_r();
        let (b, db) = leg(tau_e, path.zeta_e(), path.dzeta_e, d_e);
        let (a, da) = leg(tau_r, path.zeta_r(), path.dzeta_r, d_r);
        let term = (da * b).sub(&(a * db));
        max_log = max_log.max(term.log_magnitude);
        sum.add(term.scale(w));
    }
    let value = sum
        .value()
        .mul_complex(alpha * alpha / (4.0 * PI))
        .scale(weight);
    Ok(NodeTerm {
        value,
        max_log,
        unstable,
    })
}

fn reduce_nodes(terms: Vec<NodeTerm>) -> SpacetimeResult {
    let mut sum = ScaledSum::new();
    let mut unstable_nodes = 0;
    let mut max_log_magnitude = f64::NEG_INFINITY;
    for term in terms {
        sum.add(term.value);
        unstable_nodes += term.unstable as usize;
        max_log_magnitude = max_log_magnitude.max(term.max_log);
    }
    SpacetimeResult {
        value: sum.value(),
        unstable_nodes,
        max_log_magnitude,
    }
}

/// `(α²/4π) ∂_{α'α} ∫dn̂ ∫dt P̃_{d_r}(x_r - z_{α'}) P̃_{d_e}(z_α - x_e)`,
/// which equals `P̃_d(x_r - x_e)` with `d² = d_e² + d_r²`.
pub fn spacetime_reproducing(
    x_e: &SpacetimeEvent,
    x_r: &SpacetimeEvent,
    alpha: &ComplexRadius,
    d_e: f64,
    d_r: f64,
    sphere_rule: &SphereRule,
    options: &SpacetimeOptions,
) -> Result<SpacetimeResult> {
    GaussianSignal::new(d_e)?;
    GaussianSignal::new(d_r)?;
    check_analytic_domain(&x_e.x, &x_r.x, alpha)?;
    let terms: Vec<NodeTerm> = sphere_rule
        .nodes
        .par_iter()
        .map(|(n, w)| spacetime_node(n, x_e, x_r, alpha.alpha(), d_e, d_r, options, *w))
        .collect::<Result<_>>()?;
    Ok(reduce_nodes(terms))
}

/// `P̃_d(x_r - x_e) = ĝ_d(t_r - t_e - r)/r`, the target of the spacetime
/// relation.
pub fn analytic_propagator(x_e: &SpacetimeEvent, x_r: &SpacetimeEvent, d: f64) -> Result<ScaledComplex> {
    let r = (x_r.x - x_e.x).norm();
    if r == 0.0 {
        return Err(Error::Singular("propagator at r = 0"));
    }
    let sig = GaussianSignal::new(d)?;
    Ok(analytic_gaussian(ComplexTime::real(x_r.t - x_e.t - r), sig).scale(1.0 / r))
}

/// `Σ_k q_k P_d(x_r - x_k)`.
pub fn field_time(ensemble: &SourceEnsemble, x_r: &SpacetimeEvent, sig: GaussianSignal) -> Result<f64> {
    let terms = ensemble
        .sources
        .iter()
        .map(|src| {
            let rel = SpacetimeEvent::new(x_r.x - src.position, x_r.t - src.emission_time);
            Ok(src.amplitude * gaussian_propagator(rel, sig)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(compensated_sum(terms))
}

/// `F̃_{d_e}(z_α) = Σ_k q_k P̃_{d_e}(z_α - x_k)`.
pub fn reception_amplitude_time(
    ensemble: &SourceEnsemble,
    z: &ComplexSourceEvent,
    d_e: f64,
) -> Result<ScaledComplex> {
    ensemble.check_inside(z.alpha.r)?;
    let sig = GaussianSignal::new(d_e)?;
    let mut sum = ScaledSum::new();
    for src in &ensemble.sources {
        let x_k = SpacetimeEvent::new(src.position, src.emission_time);
        sum.add(pulsed_beam_emission(*z, x_k, sig)?.scale(src.amplitude));
    }
    Ok(sum.value())
}

#[allow(clippy::too_many_arguments)]
fn synthesis_node(
    ensemble: &SourceEnsemble,
    n: &Direction,
    x_r: &SpacetimeEvent,
    alpha: Complex64,
    d_e: f64,
    d_r: f64,
    options: &SpacetimeOptions,
    weight: f64,
) -> Result<NodeTerm> {
    let rec = complex_distance_alpha(&x_r.x, alpha, n, Role::Reception)?;
    let dr = zeta_derivative(&rec, alpha, n, &x_r.x)?;
    let mut legs = Vec::with_capacity(ensemble.sources.len());
    let (mut eta_sum, mut amp_sum) = (0.0, 0.0);
    let (mut lo, mut hi) = (x_r.t - rec.xi, x_r.t - rec.xi);
    for src in &ensemble.sources {
        let em = complex_distance_alpha(&src.position, alpha, n, Role::Emission)?;
        let de = zeta_derivative(&em, alpha, n, &src.position)?;
        eta_sum += src.amplitude.abs() * em.eta;
        amp_sum += src.amplitude.abs();
        let center = src.emission_time + em.xi;
        lo = lo.min(center);
        hi = hi.max(center);
        legs.push((src, em.zeta, de));
    }
    // one s per disk: the amplitude-weighted mean of the emission η
    let eta_e = if amp_sum > 0.0 { eta_sum / amp_sum } else { 0.0 };
    let s = options.policy.s(eta_e, rec.eta);
    let margin = options.instability_margin * (rec.eta - eta_e).abs();
    let unstable = s < eta_e.min(rec.eta) - margin || s > eta_e.max(rec.eta) + margin;
    let rule = options.time_rule.build(lo, hi, d_e.max(d_r))?;
    let mut sum = ScaledSum::new();
    let mut max_log = f64::NEG_INFINITY;
    for &(t, w) in &rule.nodes {
        let tau = Complex64::new(t, s);
        let tau_r = Complex64::new(x_r.t, 0.0) - tau - rec.zeta;
        let (a, da) = leg(tau_r, rec.zeta, dr, d_r);
        let mut f = ScaledSum::new();
        let mut df = ScaledSum::new();
        for &(src, zeta_k, de) in &legs {
            let tau_k = tau - src.emission_time - zeta_k;
            let (b, db) = leg(tau_k, zeta_k, de, d_e);
            f.add(b.scale(src.amplitude));
            df.add(db.scale(src.amplitude));
        }
        let term = (da * f.value()).sub(&(a * df.value()));
        max_log = max_log.max(term.log_magnitude);
        sum.add(term.scale(w));
    }
    let value = sum
        .value()
        .mul_complex(alpha * alpha / (4.0 * PI))
        .scale(weight);
    Ok(NodeTerm {
        value,
        max_log,
        unstable,
    })
}

/// Field of the ensemble at `x_r` rebuilt from pulsed reception amplitudes:
/// `2 Re` of the analytic field, to be compared with [`field_time`] at
/// `d = √(d_e² + d_r²)`.
pub fn beam_synthesis_time(
    ensemble: &SourceEnsemble,
    x_r: &SpacetimeEvent,
    alpha: &ComplexRadius,
    d_e: f64,
    d_r: f64,
    sphere_rule: &SphereRule,
    options: &SpacetimeOptions,
) -> Result<(f64, SpacetimeResult)> {
    GaussianSignal::new(d_e)?;
    GaussianSignal::new(d_r)?;
    ensemble.check_inside(alpha.r)?;
    if alpha.modulus() >= x_r.x.norm() {
        return Err(Error::DomainViolation {
            re: alpha.r,
            im: alpha.a,
            reason: "|α| must be below |x_r|",
        });
    }
    let terms: Vec<NodeTerm> = sphere_rule
        .nodes
        .par_iter()
        .map(|(n, w)| synthesis_node(ensemble, n, x_r, alpha.alpha(), d_e, d_r, options, *w))
        .collect::<Result<_>>()?;
    let result = reduce_nodes(terms);
    let field = result
        .value
        .try_complex()
        .ok_or(Error::Singular("synthesized field overflows"))?;
    Ok((2.0 * field.re, result))
}
