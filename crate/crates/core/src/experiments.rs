//! Scripted numerical studies: reproduction checks, cap compression, integrand
//! maps, peak-time patterns, contour stability and large-`a` asymptotics.
//!
//! Each study returns plain rows (serializable, one struct per output line)
//! plus a list of [`Check`]s against the expected behaviour. Writing files is
//! left to the caller.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freq::{helmholtz_green, reproduce_green_freq_adaptive, Frequency};
use crate::geometry::{
    asymptotic_zeta_large_a, check_analytic_domain, classify_zone, frontal_radius, ComplexRadius,
    Direction, PathGeometry, Vector3, ZoneLabel,
};
use crate::quadrature::{band_rule, compensated_sum, product_rule, AdaptiveOptions, Quantity};
use crate::signal::{analytic_gaussian, gaussian, ComplexTime, GaussianSignal};
use crate::time::{
    analytic_propagator, reproduce_propagator_series, series_over_kernels, spacetime_reproducing,
    SPolicy, SpacetimeEvent, SpacetimeOptions, TimeKernel, TimeRule,
};

/// Parameters shared by all studies. Missing JSON fields take the defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Sphere radius `R`.
    pub radius: f64,
    /// Disk radii `a` for the reproduction, compression and map studies.
    pub a_values: Vec<f64>,
    /// Pulse duration `d`.
    pub d: f64,
    pub x_e: Vector3,
    /// Receiver for the reproduction checks and the stability study.
    pub x_r: Vector3,
    /// Far-zone receiver for the compression sweep and the integrand map.
    pub far_x_r: Vector3,
    /// Cap angles (degrees) reported by the compression sweep.
    pub cap_angles_deg: Vec<f64>,
    /// Error level whose crossing angle is reported.
    pub threshold: f64,
    /// Gauss–Legendre nodes per 1° band in the compression sweep.
    pub band_nodes: usize,
    /// Azimuthal nodes for the compression sweep.
    pub n_phi: usize,
    /// Time step is `d / time_steps_per_d`.
    pub time_steps_per_d: f64,
    /// The time window extends this many `d` beyond the pulse.
    pub time_margin: f64,
    /// Frequencies for `verify-freq`.
    pub omegas: Vec<f64>,
    /// Relative tolerance for the reproduction checks.
    pub tol: f64,
    /// Starting orders and doubling limit for adaptive sphere quadrature.
    pub adaptive: AdaptiveOptions,
    /// Sphere rule order for the full-sphere time-domain check.
    pub time_n_theta: usize,
    pub time_n_phi: usize,
    pub map_n_theta: usize,
    pub map_n_phi: usize,
    /// Product rule for the zone integrals of `|I|`.
    pub zone_n_theta: usize,
    pub zone_n_phi: usize,
    pub pattern_durations: Vec<f64>,
    pub pattern_a: Vec<f64>,
    pub pattern_step_deg: f64,
    pub d_e: f64,
    pub d_r: f64,
    /// Disk radius for the spacetime and stability studies.
    pub spacetime_a: f64,
    pub spacetime_n: usize,
    pub lambdas: Vec<f64>,
    pub instability_margin: f64,
    pub time_rule: TimeRule,
    pub large_a_values: Vec<f64>,
    /// The large-`a` receiver sits at this multiple of `|α|` along `x_r`.
    pub large_a_far_factor: f64,
    pub large_a_azimuths: usize,
    pub large_a_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            radius: 10.0,
            a_values: vec![0.0, 5.0, 50.0],
            d: 0.3 * std::f64::consts::SQRT_2,
            x_e: Vector3::new(0.0, 0.0, 2.5),
            x_r: Vector3::new(200.0, 0.0, 0.0),
            far_x_r: Vector3::new(1.0e4, 0.0, 0.0),
            cap_angles_deg: vec![38.0, 45.0, 89.0, 152.0, 180.0],
            threshold: 0.02,
            band_nodes: 3,
            n_phi: 128,
            time_steps_per_d: 8.0,
            time_margin: 6.0,
            omegas: vec![1.0, 5.0],
            tol: 1e-6,
            adaptive: AdaptiveOptions {
                n_theta: 32,
                n_phi: 32,
                tol: 1e-9,
                max_doublings: 6,
            },
            time_n_theta: 256,
            time_n_phi: 128,
            map_n_theta: 90,
            map_n_phi: 180,
            zone_n_theta: 1600,
            zone_n_phi: 256,
            pattern_durations: vec![1.0, 2.0],
            pattern_a: vec![5.0, 50.0],
            pattern_step_deg: 1.0,
            d_e: 0.3,
            d_r: 0.3,
            spacetime_a: 5.0,
            spacetime_n: 64,
            lambdas: vec![-0.5, 0.0, 0.5, 1.0, 1.5],
            instability_margin: 0.1,
            time_rule: TimeRule::default(),
            large_a_values: vec![50.0, 200.0, 1.0e3, 1.0e4],
            large_a_far_factor: 100.0,
            large_a_azimuths: 8,
            large_a_tol: 1e-4,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("radius", self.radius),
            ("d", self.d),
            ("d_e", self.d_e),
            ("d_r", self.d_r),
            ("tol", self.tol),
            ("time_steps_per_d", self.time_steps_per_d),
            ("large_a_far_factor", self.large_a_far_factor),
            ("pattern_step_deg", self.pattern_step_deg),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if self.a_values.iter().chain(&self.large_a_values).any(|a| a.is_nan() || *a < 0.0) {
            return Err(Error::Config("disk radii must be >= 0".into()));
        }
        if self.x_e.norm() >= self.radius {
            return Err(Error::Config("x_e must lie inside the sphere".into()));
        }
        for a in &self.a_values {
            let alpha = self.alpha(*a)?;
            check_analytic_domain(&self.x_e, &self.x_r, &alpha)
                .and_then(|_| check_analytic_domain(&self.x_e, &self.far_x_r, &alpha))
                .map_err(|e| Error::Config(e.to_string()))?;
        }
        if self.band_nodes == 0 || self.n_phi == 0 || self.map_n_theta == 0 || self.map_n_phi == 0 {
            return Err(Error::Config("node counts must be >= 1".into()));
        }
        if self
            .cap_angles_deg
            .iter()
            .any(|b| !(*b > 0.0 && *b <= 180.0))
        {
            return Err(Error::Config("cap angles must lie in (0, 180]".into()));
        }
        Ok(())
    }

    pub fn alpha(&self, a: f64) -> Result<ComplexRadius> {
        ComplexRadius::new(self.radius, a)
    }

    pub fn signal(&self) -> Result<GaussianSignal> {
        GaussianSignal::new(self.d)
    }
}

/// One pass/fail line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Rows of one study and the checks it ran.
#[derive(Clone, Debug, Serialize)]
pub struct Report<T> {
    pub rows: Vec<T>,
    pub checks: Vec<Check>,
}

impl<T> Report<T> {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

// ---------------------------------------------------------------------------
// frequency domain

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FreqRow {
    pub a: f64,
    pub omega: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub exact_re: f64,
    pub exact_im: f64,
    pub relative_error: f64,
    pub error_estimate: f64,
    pub n_theta: usize,
    pub n_phi: usize,
    pub seconds: f64,
}

/// Adaptive full-sphere reproduction of `e^{iωr}/r` for every `(a, ω)`.
pub fn verify_freq(cfg: &ExperimentConfig) -> Result<Report<FreqRow>> {
    let r = (cfg.x_r - cfg.x_e).norm();
    let mut rows = Vec::new();
    for &omega in &cfg.omegas {
        let w = Frequency::new(omega)?;
        let exact = helmholtz_green(r, w)?;
        for &a in &cfg.a_values {
            let start = Instant::now();
            let res = reproduce_green_freq_adaptive(&cfg.x_e, &cfg.x_r, &cfg.alpha(a)?, w, &cfg.adaptive)?;
            rows.push(FreqRow {
                a,
                omega,
                value_re: res.value.re,
                value_im: res.value.im,
                exact_re: exact.re,
                exact_im: exact.im,
                relative_error: (res.value - exact).norm() / exact.norm(),
                error_estimate: res.error_estimate,
                n_theta: res.n_theta,
                n_phi: res.n_phi,
                seconds: start.elapsed().as_secs_f64(),
            });
        }
    }
    let mut checks: Vec<Check> = rows
        .iter()
        .map(|row| {
            Check::new(
                format!("reproduce e^(iwr)/r a={} w={}", row.a, row.omega),
                row.relative_error < cfg.tol,
                format!("relative error {:.3e} (tol {:.0e}), {:.2}s", row.relative_error, cfg.tol, row.seconds),
            )
        })
        .collect();
    for &omega in &cfg.omegas {
        let at = |a: f64| rows.iter().find(|r| r.omega == omega && r.a == a);
        let (min_a, max_a) = cfg.a_values.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &a| (lo.min(a), hi.max(a)));
        if let (Some(lo), Some(hi)) = (at(min_a), at(max_a)) {
            let v_lo = Complex64::new(lo.value_re, lo.value_im);
            let v_hi = Complex64::new(hi.value_re, hi.value_im);
            let spread = (v_lo - v_hi).norm() / v_lo.norm();
            checks.push(Check::new(
                format!("alpha-constancy a={min_a} vs a={max_a} w={omega}"),
                spread < cfg.tol,
                format!("relative difference {spread:.3e}"),
            ));
        }
    }
    Ok(Report { rows, checks })
}

// ---------------------------------------------------------------------------
// time domain

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeRow {
    pub a: f64,
    pub t: f64,
    pub reconstructed: f64,
    pub exact: f64,
    pub error_over_peak: f64,
}

/// Time grid `r - margin·d, ..., hi` with step `d/steps`.
fn time_grid(start: f64, end: f64, d: f64, steps: f64) -> Vec<f64> {
    let dt = d / steps;
    let n = ((end - start) / dt).floor() as usize + 1;
    (0..n).map(|k| start + k as f64 * dt).collect()
}

/// Full-sphere reconstruction of `g_d(t - r)/r` over the pulse window.
pub fn verify_time(cfg: &ExperimentConfig) -> Result<Report<TimeRow>> {
    let sig = cfg.signal()?;
    let r = (cfg.x_r - cfg.x_e).norm();
    let peak = sig.peak() / r;
    let times = time_grid(r - cfg.time_margin * cfg.d, r + cfg.time_margin * cfg.d, cfg.d, cfg.time_steps_per_d);
    let pole = Direction::new(cfg.x_r)?;
    let rule = product_rule(pole, PI, cfg.time_n_theta, cfg.time_n_phi)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &a in &cfg.a_values {
        let series = reproduce_propagator_series(&cfg.x_e, &cfg.x_r, &times, &cfg.alpha(a)?, sig, &rule)?;
        let mut worst: f64 = 0.0;
        for (&t, v) in times.iter().zip(series) {
            let exact = sig.value(t - r) / r;
            let err = (v - exact).abs() / peak;
            worst = worst.max(err);
            rows.push(TimeRow {
                a,
                t,
                reconstructed: v,
                exact,
                error_over_peak: err,
            });
        }
        checks.push(Check::new(
            format!("time-domain reproduction a={a}"),
            worst < 1e-4,
            format!("max error / peak {worst:.3e} (tol 1e-4)"),
        ));
    }
    Ok(Report { rows, checks })
}

// ---------------------------------------------------------------------------
// compression

/// Maximum error over time against cap angle for one `a`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ErrorCurve {
    pub a: f64,
    /// `(β in degrees, max_t |reconstruction - exact| / (g_d(0)/r))`.
    pub points: Vec<(f64, f64)>,
}

impl ErrorCurve {
    /// Error at `beta_deg`, linearly interpolated between samples.
    pub fn error_at(&self, beta_deg: f64) -> Option<f64> {
        let pts = &self.points;
        let i = pts.iter().position(|p| p.0 >= beta_deg)?;
        if i == 0 || pts[i].0 == beta_deg {
            return Some(pts[i].1);
        }
        let (b0, e0) = pts[i - 1];
        let (b1, e1) = pts[i];
        Some(e0 + (e1 - e0) * (beta_deg - b0) / (b1 - b0))
    }

    /// Smallest `β` beyond which the error stays below `level`, interpolated
    /// linearly across the last sample above it.
    pub fn crossing(&self, level: f64) -> Option<f64> {
        let last_above = self.points.iter().rposition(|p| p.1 >= level);
        match last_above {
            None => self.points.first().map(|p| p.0),
            Some(i) if i + 1 == self.points.len() => None,
            Some(i) => {
                let (b0, e0) = self.points[i];
                let (b1, e1) = self.points[i + 1];
                Some(b0 + (b1 - b0) * (e0 - level) / (e0 - e1))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompressionRow {
    pub a: f64,
    pub cap_angle_deg: f64,
    pub max_relative_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompressionResult {
    pub curves: Vec<ErrorCurve>,
    pub rows: Vec<CompressionRow>,
    pub checks: Vec<Check>,
}

/// Expected values for the `R = 10` configuration: `(a, ε at 45°, 2% angle)`.
pub const REFERENCE_COMPRESSION: [(f64, f64, f64); 3] =
    [(0.0, 0.279, 152.0), (5.0, 0.083, 89.0), (50.0, 0.015, 38.0)];

/// Cap-restricted reconstructions at every whole degree `β = 1°, …, 180°`.
///
/// The sphere is split into 1° bands around `x̂_r`; each band's contribution
/// over the time grid is computed once and the caps are cumulative sums.
pub fn compression_sweep(cfg: &ExperimentConfig) -> Result<CompressionResult> {
    let sig = cfg.signal()?;
    let x_r = cfg.far_x_r;
    let r = (x_r - cfg.x_e).norm();
    let peak = sig.peak() / r;
    let pole = Direction::new(x_r)?;
    let bands: Vec<_> = (0..180)
        .map(|k| {
            band_rule(
                pole,
                (k as f64).to_radians(),
                ((k + 1) as f64).to_radians(),
                cfg.band_nodes,
                cfg.n_phi,
            )
        })
        .collect::<Result<_>>()?;
    let mut curves = Vec::new();
    for &a in &cfg.a_values {
        let alpha = cfg.alpha(a)?.alpha();
        let kernels: Vec<Vec<(TimeKernel, f64)>> = bands
            .iter()
            .map(|band| {
                band.nodes
                    .iter()
                    .map(|(n, w)| Ok((TimeKernel::new(n, &cfg.x_e, &x_r, alpha)?, *w)))
                    .collect::<Result<_>>()
            })
            .collect::<Result<_>>()?;
        let xi_max = kernels
            .iter()
            .flatten()
            .map(|(k, _)| k.zeta.re)
            .fold(f64::NEG_INFINITY, f64::max);
        let times = time_grid(
            r - cfg.time_margin * cfg.d,
            xi_max + cfg.time_margin * cfg.d,
            cfg.d,
            cfg.time_steps_per_d,
        );
        let exact: Vec<f64> = times.iter().map(|&t| sig.value(t - r) / r).collect();
        let band_series: Vec<Vec<f64>> = kernels
            .par_iter()
            .map(|nodes| series_over_kernels(nodes, &times, sig))
            .collect::<Result<_>>()?;
        let mut cumulative = vec![0.0; times.len()];
        let mut carry = vec![0.0; times.len()];
        let mut points = Vec::with_capacity(180);
        for (k, series) in band_series.iter().enumerate() {
            for (i, v) in series.iter().enumerate() {
                f64::compensated_add(&mut cumulative[i], &mut carry[i], *v);
            }
            let err = cumulative
                .iter()
                .zip(&carry)
                .zip(&exact)
                .map(|((s, c), e)| (s + c - e).abs())
                .fold(0.0, f64::max)
                / peak;
            points.push(((k + 1) as f64, err));
        }
        curves.push(ErrorCurve { a, points });
    }
    let mut rows = Vec::new();
    for curve in &curves {
        for &beta in &cfg.cap_angles_deg {
            if let Some(err) = curve.error_at(beta) {
                rows.push(CompressionRow {
                    a: curve.a,
                    cap_angle_deg: beta,
                    max_relative_error: err,
                });
            }
        }
    }
    let checks = compression_checks(cfg, &curves);
    Ok(CompressionResult {
        curves,
        rows,
        checks,
    })
}

fn compression_checks(cfg: &ExperimentConfig, curves: &[ErrorCurve]) -> Vec<Check> {
    let mut checks = Vec::new();
    for curve in curves {
        if let Some((_, full)) = curve.points.last() {
            checks.push(Check::new(
                format!("full-sphere error a={}", curve.a),
                *full < 1e-6,
                format!("{:.3e}", full),
            ));
        }
        if let Some(&(_, e45, b2)) = REFERENCE_COMPRESSION.iter().find(|p| p.0 == curve.a) {
            if let Some(err) = curve.error_at(45.0) {
                checks.push(Check::new(
                    format!("eps(45deg) a={}", curve.a),
                    relative(err, e45) <= 0.10,
                    format!("{:.2}% vs reference {:.1}% (+-10% relative)", 100.0 * err, 100.0 * e45),
                ));
            }
            let crossing = curve.crossing(cfg.threshold);
            checks.push(Check::new(
                format!("{}% cap angle a={}", 100.0 * cfg.threshold, curve.a),
                crossing.is_some_and(|b| (b - b2).abs() <= 5.0),
                format!("{:?} deg vs reference {b2} deg (+-5)", crossing.map(|b| (b * 10.0).round() / 10.0)),
            ));
        }
        let jitter = curve
            .points
            .windows(2)
            .map(|w| w[1].1 - w[0].1)
            .fold(0.0, f64::max);
        checks.push(Check::new(
            format!("monotone error curve a={}", curve.a),
            jitter <= 1e-3,
            format!("largest increase {jitter:.2e}"),
        ));
    }
    checks
}

// ---------------------------------------------------------------------------
// integrand map

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MapRow {
    pub a: f64,
    pub theta_deg: f64,
    pub phi_deg: f64,
    pub nx: f64,
    pub ny: f64,
    pub nz: f64,
    pub integrand: f64,
    pub magnitude: f64,
    pub zone: ZoneLabel,
}

/// `I^α_d(n̂, t = r)` on a latitude–longitude grid about `x̂_r`.
pub fn integrand_map(cfg: &ExperimentConfig) -> Result<Report<MapRow>> {
    let sig = cfg.signal()?;
    let x_r = cfg.far_x_r;
    let r = (x_r - cfg.x_e).norm();
    let pole = Direction::new(x_r)?;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &a in &cfg.a_values {
        let alpha = cfg.alpha(a)?;
        let grid: Vec<(f64, f64)> = (0..cfg.map_n_theta)
            .flat_map(|i| {
                let theta = (i as f64 + 0.5) * PI / cfg.map_n_theta as f64;
                (0..cfg.map_n_phi).map(move |j| (theta, j as f64 * 2.0 * PI / cfg.map_n_phi as f64))
            })
            .collect();
        let block: Vec<MapRow> = grid
            .par_iter()
            .map(|&(theta, phi)| {
                let n = pole.rotated(theta, phi);
                let v = TimeKernel::new(&n, &cfg.x_e, &x_r, alpha.alpha())?.eval(r, sig)?;
                let zone = if a > 0.0 {
                    classify_zone(&n, &cfg.x_e, &x_r, &alpha)?
                } else {
                    ZoneLabel::Rear
                };
                let nv = n.vector();
                Ok(MapRow {
                    a,
                    theta_deg: theta.to_degrees(),
                    phi_deg: phi.to_degrees(),
                    nx: nv.x,
                    ny: nv.y,
                    nz: nv.z,
                    integrand: v,
                    magnitude: v.abs(),
                    zone,
                })
            })
            .collect::<Result<_>>()?;
        let (front, rear) = zone_masses(cfg, &alpha, &x_r, r)?;
        let peak = block
            .iter()
            .max_by(|x, y| x.magnitude.total_cmp(&y.magnitude))
            .map(|r| (r.theta_deg, r.zone));
        if a >= 5.0 {
            checks.push(Check::new(
                format!("frontal zone dominates a={a}"),
                front > rear,
                format!("integral of |I|: frontal {front:.4e}, rear {rear:.4e}"),
            ));
            checks.push(Check::new(
                format!("peak |I| in frontal zone a={a}"),
                peak.is_some_and(|p| p.1 == ZoneLabel::Frontal),
                format!("max |I| at theta = {:.1} deg from x_r", peak.map_or(f64::NAN, |p| p.0)),
            ));
        }
        rows.extend(block);
    }
    Ok(Report { rows, checks })
}

/// `∫|I|` over the frontal and rear zones at `t = r`.
pub fn zone_masses(cfg: &ExperimentConfig, alpha: &ComplexRadius, x_r: &Vector3, t: f64) -> Result<(f64, f64)> {
    let sig = cfg.signal()?;
    let rule = product_rule(Direction::new(*x_r)?, PI, cfg.zone_n_theta, cfg.zone_n_phi)?;
    let parts: Vec<(f64, f64)> = rule
        .nodes
        .par_iter()
        .map(|(n, w)| {
            let v = w * TimeKernel::new(n, &cfg.x_e, x_r, alpha.alpha())?.eval(t, sig)?.abs();
            Ok(match classify_zone(n, &cfg.x_e, x_r, alpha)? {
                ZoneLabel::Frontal => (v, 0.0),
                ZoneLabel::Rear => (0.0, v),
            })
        })
        .collect::<Result<_>>()?;
    Ok((
        compensated_sum(parts.iter().map(|p| p.0)),
        compensated_sum(parts.iter().map(|p| p.1)),
    ))
}

// ---------------------------------------------------------------------------
// peak-time patterns

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PatternRow {
    pub d: f64,
    pub a: f64,
    pub eta_e: f64,
    pub theta_deg: f64,
    pub pattern_re: f64,
    pub pattern_im: f64,
    pub magnitude: f64,
    /// Magnitude relative to the strongest pattern with the same `d`.
    pub normalized: f64,
}

/// Far-zone peak-time pattern `ĝ_d(i(a cos θ_r - η_e))` for `η_e ∈ {γ₀a, a}`.
pub fn pattern_sweep(cfg: &ExperimentConfig) -> Result<Report<PatternRow>> {
    let steps = (180.0 / cfg.pattern_step_deg).round() as usize;
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &d in &cfg.pattern_durations {
        let sig = GaussianSignal::new(d)?;
        let mut block = Vec::new();
        for &a in &cfg.pattern_a {
            let alpha = cfg.alpha(a)?;
            for eta_e in [alpha.gamma0() * a, a] {
                let mut monotone = true;
                let mut real = true;
                let mut previous = f64::INFINITY;
                for k in 0..=steps {
                    let theta = (k as f64 * cfg.pattern_step_deg).min(180.0);
                    let v = analytic_gaussian(
                        ComplexTime::new(0.0, a * theta.to_radians().cos() - eta_e),
                        sig,
                    )
                    .to_complex();
                    real &= v.im.abs() <= 1e-12 * v.re.abs();
                    monotone &= v.re <= previous;
                    previous = v.re;
                    block.push(PatternRow {
                        d,
                        a,
                        eta_e,
                        theta_deg: theta,
                        pattern_re: v.re,
                        pattern_im: v.im,
                        magnitude: v.norm(),
                        normalized: 0.0,
                    });
                }
                checks.push(Check::new(
                    format!("real monotone pattern d={d} a={a} eta_e={eta_e:.3}"),
                    real && monotone,
                    format!("real: {real}, monotone: {monotone}"),
                ));
            }
        }
        let strongest = block.iter().map(|r| r.magnitude).fold(0.0, f64::max);
        for row in &mut block {
            row.normalized = row.magnitude / strongest;
        }
        rows.extend(block);
    }
    Ok(Report { rows, checks })
}

// ---------------------------------------------------------------------------
// spacetime relation and contour stability

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityRow {
    pub lambda: f64,
    /// `s`, `η` and the two compression frequencies on the disk at `x̂_r`.
    pub s_at_pole: f64,
    pub eta_at_pole: f64,
    pub omega_e: f64,
    pub omega_r: f64,
    pub value_re: f64,
    pub value_im: f64,
    pub exact_re: f64,
    pub exact_im: f64,
    pub relative_error: f64,
    pub max_log_magnitude: f64,
    pub unstable_nodes: usize,
    pub seconds: f64,
}

fn spacetime_row(cfg: &ExperimentConfig, policy: SPolicy, lambda: f64) -> Result<StabilityRow> {
    let alpha = cfg.alpha(cfg.spacetime_a)?;
    let r = (cfg.x_r - cfg.x_e).norm();
    let x_e = SpacetimeEvent::new(cfg.x_e, 0.0);
    let x_r = SpacetimeEvent::new(cfg.x_r, r);
    let pole = Direction::new(cfg.x_r)?;
    let rule = product_rule(pole, PI, cfg.spacetime_n, cfg.spacetime_n)?;
    let options = SpacetimeOptions {
        policy,
        time_rule: cfg.time_rule,
        instability_margin: cfg.instability_margin,
    };
    let start = Instant::now();
    let res = spacetime_reproducing(&x_e, &x_r, &alpha, cfg.d_e, cfg.d_r, &rule, &options)?;
    let seconds = start.elapsed().as_secs_f64();
    let d = cfg.d_e.hypot(cfg.d_r);
    let exact = analytic_propagator(&x_e, &x_r, d)?.to_complex();
    let err = res.value.sub(&exact.into()).log_magnitude - exact.norm().ln();
    let value = res.value.try_complex().unwrap_or(Complex64::new(f64::NAN, f64::NAN));
    let path = PathGeometry::new(&pole, &cfg.x_e, &cfg.x_r, alpha.alpha())?;
    let (eta_e, eta_r) = (path.emission.eta, path.reception.eta);
    let s = policy.s(eta_e, eta_r);
    Ok(StabilityRow {
        lambda,
        s_at_pole: s,
        eta_at_pole: eta_r - eta_e,
        omega_e: 2.0 * (s - eta_e) / (cfg.d_e * cfg.d_e),
        omega_r: 2.0 * (eta_r - s) / (cfg.d_r * cfg.d_r),
        value_re: value.re,
        value_im: value.im,
        exact_re: exact.re,
        exact_im: exact.im,
        relative_error: err.exp(),
        max_log_magnitude: res.max_log_magnitude,
        unstable_nodes: res.unstable_nodes,
        seconds,
    })
}

/// The spacetime relation with the midpoint contour and both endpoints.
pub fn verify_spacetime(cfg: &ExperimentConfig) -> Result<Report<StabilityRow>> {
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for (name, policy, lambda) in [
        ("midpoint", SPolicy::Midpoint, 0.5),
        ("s = eta_e", SPolicy::Lambda(0.0), 0.0),
        ("s = eta_r", SPolicy::Lambda(1.0), 1.0),
    ] {
        let row = spacetime_row(cfg, policy, lambda)?;
        checks.push(Check::new(
            format!("spacetime reproduction, {name}"),
            row.relative_error < 1e-3 && row.unstable_nodes == 0,
            format!("relative error {:.3e}, unstable disks {}", row.relative_error, row.unstable_nodes),
        ));
        rows.push(row);
    }
    Ok(Report { rows, checks })
}

/// Error and peak integrand size for `s = η_e + λ(η_r - η_e)`.
pub fn stability_sweep(cfg: &ExperimentConfig) -> Result<Report<StabilityRow>> {
    let rows: Vec<StabilityRow> = cfg
        .lambdas
        .iter()
        .map(|&l| spacetime_row(cfg, SPolicy::Lambda(l), l))
        .collect::<Result<_>>()?;
    let mut checks = Vec::new();
    for row in &rows {
        let inside = (0.0..=1.0).contains(&row.lambda);
        let ok = if inside {
            row.relative_error < 1e-3 && row.unstable_nodes == 0
        } else if (row.lambda - 0.5).abs() > 0.5 + cfg.instability_margin {
            row.unstable_nodes > 0
        } else {
            true
        };
        checks.push(Check::new(
            format!("lambda={}", row.lambda),
            ok,
            format!(
                "relative error {:.3e}, max log|integrand| {:.1}, unstable disks {}",
                row.relative_error, row.max_log_magnitude, row.unstable_nodes
            ),
        ));
    }
    if let Some(mid) = rows.iter().find(|r| r.lambda == 0.5) {
        let expected_e = mid.eta_at_pole / (cfg.d_e * cfg.d_e);
        let expected_r = mid.eta_at_pole / (cfg.d_r * cfg.d_r);
        checks.push(Check::new(
            "midpoint compression frequencies",
            relative(mid.omega_e, expected_e) < 1e-12 && relative(mid.omega_r, expected_r) < 1e-12,
            format!("omega_e = {:.6}, omega_r = {:.6}", mid.omega_e, mid.omega_r),
        ));
    }
    let outer: Vec<&StabilityRow> = rows.iter().filter(|r| r.lambda > 1.0).collect();
    if outer.len() >= 2 {
        let grows = outer.windows(2).all(|w| w[1].max_log_magnitude >= w[0].max_log_magnitude);
        checks.push(Check::new(
            "integrand grows beyond eta_r",
            grows,
            format!("{:?}", outer.iter().map(|r| r.max_log_magnitude).collect::<Vec<_>>()),
        ));
    }
    Ok(Report { rows, checks })
}

// ---------------------------------------------------------------------------
// large a

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LargeARow {
    pub a: f64,
    pub receiver_distance: f64,
    /// Mean over azimuths of the angular radius of the frontal zone.
    pub frontal_radius_exact: f64,
    pub frontal_radius_asymptotic: f64,
    pub frontal_radius_error: f64,
    /// `b/a`, the leading-order radius.
    pub frontal_radius_leading: f64,
    pub eta_center: f64,
    pub eta_center_asymptotic: f64,
    pub eta_center_error: f64,
    pub zeta_asymptotic_error: f64,
    pub required_n_theta: Option<usize>,
}

/// Peak-time full-sphere reproduction error with `n_theta` polar nodes.
fn peak_error(cfg: &ExperimentConfig, alpha: &ComplexRadius, x_r: &Vector3, n_theta: usize) -> Result<f64> {
    let sig = cfg.signal()?;
    let r = (*x_r - cfg.x_e).norm();
    let rule = product_rule(Direction::new(*x_r)?, PI, n_theta, 32)?;
    let v = reproduce_propagator_series(&cfg.x_e, x_r, &[r], alpha, sig, &rule)?[0];
    Ok(relative(v, sig.peak() / r))
}

pub fn large_a_report(cfg: &ExperimentConfig) -> Result<Report<LargeARow>> {
    let x_hat = Direction::new(cfg.x_r)?;
    let cos_psi = x_hat.dot(&cfg.x_e) / cfg.x_e.norm().max(f64::MIN_POSITIVE);
    let b = cfg.x_e.norm() * (1.0 - cos_psi * cos_psi).max(0.0).sqrt();
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &a in &cfg.large_a_values {
        let alpha = cfg.alpha(a)?;
        let dist = cfg.large_a_far_factor * alpha.modulus();
        let x_r = x_hat.vector() * dist;
        let radii = |exact: bool| -> Result<f64> {
            let vals = (0..cfg.large_a_azimuths)
                .map(|k| {
                    let phi = 2.0 * PI * k as f64 / cfg.large_a_azimuths as f64;
                    frontal_radius(&cfg.x_e, &x_r, &alpha, phi, exact)
                })
                .collect::<Result<Vec<f64>>>()?;
            Ok(vals.iter().sum::<f64>() / vals.len() as f64)
        };
        let (exact_radius, asym_radius) = (radii(true)?, radii(false)?);
        let path = PathGeometry::new(&x_hat, &cfg.x_e, &x_r, alpha.alpha())?;
        let eta = path.eta();
        let eta_asym = b * b / (2.0 * a);
        let zeta_asym = asymptotic_zeta_large_a(&cfg.x_e, &x_r, &alpha, &x_hat);
        let zeta_error = (zeta_asym - path.zeta()).norm();
        let mut required = None;
        let mut n = 8;
        while n <= 1 << 16 {
            if peak_error(cfg, &alpha, &x_r, n)? < cfg.large_a_tol {
                required = Some(n);
                break;
            }
            n *= 2;
        }
        let row = LargeARow {
            a,
            receiver_distance: dist,
            frontal_radius_exact: exact_radius,
            frontal_radius_asymptotic: asym_radius,
            frontal_radius_error: relative(asym_radius, exact_radius),
            frontal_radius_leading: b / a,
            eta_center: eta,
            eta_center_asymptotic: eta_asym,
            eta_center_error: relative(eta_asym, eta),
            zeta_asymptotic_error: zeta_error,
            required_n_theta: required,
        };
        if a >= 1e3 {
            checks.push(Check::new(
                format!("frontal radius a={a}"),
                row.frontal_radius_error < 0.05,
                format!(
                    "exact {:.4e} rad, asymptotic {:.4e} rad, rel. diff {:.2e}",
                    exact_radius, asym_radius, row.frontal_radius_error
                ),
            ));
            checks.push(Check::new(
                format!("eta at x_r direction a={a}"),
                row.eta_center_error < 0.02,
                format!("exact {:.5e}, b^2/2a {:.5e}, rel. diff {:.2e}", eta, eta_asym, row.eta_center_error),
            ));
        }
        rows.push(row);
    }
    let counts: Vec<Option<usize>> = rows.iter().map(|r| r.required_n_theta).collect();
    let grows = counts.windows(2).all(|w| match (w[0], w[1]) {
        (Some(x), Some(y)) => y >= x,
        (_, None) => true,
        (None, Some(_)) => false,
    });
    checks.push(Check::new("node count grows with a", grows, format!("{counts:?}")));
    let shrinks = rows.windows(2).all(|w| w[1].frontal_radius_exact < w[0].frontal_radius_exact);
    checks.push(Check::new(
        "frontal zone shrinks with a",
        shrinks,
        format!("{:?}", rows.iter().map(|r| r.frontal_radius_exact).collect::<Vec<_>>()),
    ));
    Ok(Report { rows, checks })
}

// ---------------------------------------------------------------------------
// extreme values at the back point

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremeValues {
    pub zeta_re: f64,
    pub zeta_im: f64,
    /// `ln |g_d(t - ζ)|`.
    pub log_g: f64,
    pub log10_g: f64,
    /// `|ĝ_d(t - ζ)|`.
    pub abs_analytic: f64,
}

/// `g_d` and `ĝ_d` at `t - ζ` for the disk at `-x̂_r` seen at time `t`.
pub fn back_point_values(cfg: &ExperimentConfig, a: f64, t: f64) -> Result<ExtremeValues> {
    let sig = cfg.signal()?;
    let alpha = cfg.alpha(a)?;
    let back = Direction::new(-cfg.x_r)?;
    let path = PathGeometry::new(&back, &cfg.x_e, &cfg.x_r, alpha.alpha())?;
    let tau = ComplexTime::from(Complex64::new(t, 0.0) - path.zeta());
    let g = gaussian(tau, sig);
    Ok(ExtremeValues {
        zeta_re: path.zeta().re,
        zeta_im: path.zeta().im,
        log_g: g.log_magnitude,
        log10_g: g.log_magnitude / std::f64::consts::LN_10,
        abs_analytic: analytic_gaussian(tau, sig).abs(),
    })
}

/// Quick consistency checks for `selftest`: small rules, a few seconds.
pub fn selftest() -> Result<Vec<Check>> {
    let cfg = ExperimentConfig::default();
    let mut checks = Vec::new();
    let sig = cfg.signal()?;
    let g = gaussian(ComplexTime::new(0.0, -99.94), sig);
    checks.push(Check::new(
        "g_d(-99.94i) log-magnitude",
        (g.log_magnitude - 55489.0 - 1.33f64.ln()).abs() < 1.0,
        format!("{:.3}", g.log_magnitude),
    ));
    let gh = analytic_gaussian(ComplexTime::new(0.0, -99.94), sig).abs();
    checks.push(Check::new("|ĝ_d(-99.94i)|", (gh - 0.00159).abs() <= 2e-5, format!("{gh:.5}")));
    let r = (cfg.x_r - cfg.x_e).norm();
    let opts = AdaptiveOptions {
        tol: 1e-8,
        ..cfg.adaptive
    };
    for a in [0.0, 5.0] {
        let res = reproduce_green_freq_adaptive(&cfg.x_e, &cfg.x_r, &cfg.alpha(a)?, Frequency::new(1.0)?, &opts)?;
        let exact = helmholtz_green(r, Frequency::new(1.0)?)?;
        let err = (res.value - exact).norm() / exact.norm();
        checks.push(Check::new(format!("frequency reproduction a={a}"), err < 1e-6, format!("{err:.2e}")));
    }
    let rule = product_rule(Direction::new(cfg.x_r)?, PI, 128, 64)?;
    let v = reproduce_propagator_series(&cfg.x_e, &cfg.x_r, &[r], &cfg.alpha(5.0)?, sig, &rule)?[0];
    let err = relative(v, sig.peak() / r);
    checks.push(Check::new("time-domain peak a=5", err < 1e-4, format!("{err:.2e}")));
    Ok(checks)
}
