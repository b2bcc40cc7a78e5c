//! Time-harmonic fields (`c = 1`, so `k = ω`).
//!
//! The reproducing relation
//!
//! ```text
//! e^{iωr}/r = (α²/4π) ∫ dn̂ ∂_{α'α}[G̃_ω(x_r - α'n̂) G̃_ω(αn̂ - x_e)]
//! ```
//!
//! holds for every `α` in the domain `Re α > |x_e|`, `|α| < |x_r|`. The mixed
//! derivative is `A'B - AB'` and, with `∂ζ = ζ'`, expands to the integrand of
//! [`huygens_integrand_freq`].

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_analytic_domain, complex_distance_alpha, zeta_derivative, ComplexDistance,
    ComplexRadius, Direction, PathGeometry, Role, Vector3,
};
use crate::quadrature::{
    integrate, integrate_adaptive, product_rule, AdaptiveOptions, AdaptiveResult, SphereRule,
};
use crate::scaled::ScaledComplex;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Frequency {
    /// `ω = k`; negative values flip the beam direction to `-n̂`.
    pub omega: f64,
}

impl Frequency {
    pub fn new(omega: f64) -> Result<Self> {
        if !omega.is_finite() {
            return Err(Error::InvalidParameter(format!("ω = {omega} is not finite")));
        }
        Ok(Self { omega })
    }
}

/// A radius `α` together with the emitter and receiver radii it must separate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticDomain {
    pub alpha: ComplexRadius,
    pub x_e_max: f64,
    pub x_r_min: f64,
}

impl AnalyticDomain {
    pub fn new(alpha: ComplexRadius, x_e_max: f64, x_r_min: f64) -> Result<Self> {
        let domain = Self {
            alpha,
            x_e_max,
            x_r_min,
        };
        if !domain.contains() {
            return Err(Error::DomainViolation {
                re: alpha.r,
                im: alpha.a,
                reason: "need Re α > |x_e| and |α| < |x_r|",
            });
        }
        Ok(domain)
    }

    pub fn contains(&self) -> bool {
        self.alpha.r > self.x_e_max && self.alpha.modulus() < self.x_r_min
    }
}

/// A time-harmonic point source.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointSource {
    pub position: Vector3,
    pub amplitude: Complex64,
}

/// `G_ω(r) = e^{iωr}/r`.
pub fn helmholtz_green(r: f64, omega: Frequency) -> Result<Complex64> {
    if r == 0.0 {
        return Err(Error::Singular("Green function at r = 0"));
    }
    Ok(Complex64::new(0.0, omega.omega * r).exp() / r)
}

/// `G̃_ω = e^{iωζ}/ζ`; the modulus carries `e^{ωη}`.
pub fn complex_source_beam(z: &ComplexDistance, omega: Frequency) -> Result<ScaledComplex> {
    if z.zeta.norm() == 0.0 {
        return Err(Error::Singular("beam evaluated on the focal circle"));
    }
    Ok(ScaledComplex::exp(Complex64::new(0.0, omega.omega) * z.zeta)
        / ScaledComplex::from_complex(z.zeta))
}

/// Far-field pattern `e^{ωa cos θ}`.
pub fn radiation_pattern_freq(theta: f64, omega: Frequency, a: f64) -> f64 {
    (omega.omega * a * theta.cos()).exp()
}

/// The reproducing integrand for an arbitrary complex `α`; no domain check.
pub fn huygens_integrand_freq_alpha(
    n: &Direction,
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: Complex64,
    omega: f64,
) -> Result<ScaledComplex> {
    let path = PathGeometry::new(n, x_e, x_r, alpha)?;
    let (zr, ze) = (path.zeta_r(), path.zeta_e());
    let (dr, de) = (path.dzeta_r, path.dzeta_e);
    let iw = Complex64::new(0.0, omega);
    let bracket = iw * (dr - de) - dr / zr + de / ze;
    let prefactor = alpha * alpha / (4.0 * PI * zr * ze);
    Ok(ScaledComplex::exp(iw * path.zeta()).mul_complex(prefactor * bracket))
}

pub fn huygens_integrand_freq(
    n: &Direction,
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
    omega: Frequency,
) -> Result<ScaledComplex> {
    check_analytic_domain(x_e, x_r, alpha)?;
    huygens_integrand_freq_alpha(n, x_e, x_r, alpha.alpha(), omega.omega)
}

fn plain(value: ScaledComplex) -> Result<Complex64> {
    value
        .try_complex()
        .ok_or(Error::Singular("integrand overflows double precision"))
}

/// Quadrature of the reproducing integrand; approximates `e^{iωr}/r`.
pub fn reproduce_green_freq(
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
    omega: Frequency,
    rule: &SphereRule,
) -> Result<Complex64> {
    check_analytic_domain(x_e, x_r, alpha)?;
    integrate(rule, |n| {
        plain(huygens_integrand_freq_alpha(n, x_e, x_r, alpha.alpha(), omega.omega)?)
    })
}

/// Full-sphere reproduction with the pole at `x̂_r`, refined until converged.
pub fn reproduce_green_freq_adaptive(
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
    omega: Frequency,
    options: &AdaptiveOptions,
) -> Result<AdaptiveResult<Complex64>> {
    check_analytic_domain(x_e, x_r, alpha)?;
    let pole = Direction::new(*x_r)?;
    integrate_adaptive(
        |nt, np| product_rule(pole, PI, nt, np),
        |n| plain(huygens_integrand_freq_alpha(n, x_e, x_r, alpha.alpha(), omega.omega)?),
        options,
    )
}

/// Direct field `Σ q_k G_ω(|x_r - x_k|)`.
pub fn field_freq(sources: &[PointSource], x_r: &Vector3, omega: Frequency) -> Result<Complex64> {
    sources.iter().try_fold(Complex64::new(0.0, 0.0), |acc, src| {
        Ok(acc + src.amplitude * helmholtz_green((*x_r - src.position).norm(), omega)?)
    })
}

fn check_sources(sources: &[PointSource], alpha: &ComplexRadius) -> Result<()> {
    for src in sources {
        if src.position.norm() >= alpha.r {
            return Err(Error::OutsideSphere {
                norm: src.position.norm(),
                radius: alpha.r,
            });
        }
    }
    Ok(())
}

/// Reception amplitude `F̃_ω(αn̂) = Σ q_k G̃_ω(αn̂ - x_k)`.
pub fn reception_amplitude_freq(
    sources: &[PointSource],
    alpha: &ComplexRadius,
    n: &Direction,
    omega: Frequency,
) -> Result<ScaledComplex> {
    check_sources(sources, alpha)?;
    let mut sum = crate::scaled::ScaledSum::new();
    for src in sources {
        let z = complex_distance_alpha(&src.position, alpha.alpha(), n, Role::Emission)?;
        sum.add(complex_source_beam(&z, omega)?.mul_complex(src.amplitude));
    }
    Ok(sum.value())
}

/// Integrand of the synthesis: `(α²/4π)[∂_{α'}G̃_r F̃ - G̃_r ∂_α F̃]`.
pub fn beam_synthesis_integrand_freq(
    sources: &[PointSource],
    n: &Direction,
    x_r: &Vector3,
    alpha: Complex64,
    omega: f64,
) -> Result<Complex64> {
    let iw = Complex64::new(0.0, omega);
    let rec = complex_distance_alpha(x_r, alpha, n, Role::Reception)?;
    let dr = zeta_derivative(&rec, alpha, n, x_r)?;
    let zr = rec.zeta;
    let mut f = Complex64::new(0.0, 0.0);
    let mut df = Complex64::new(0.0, 0.0);
    // e^{iωζ_r} is folded into each source term so no factor overflows alone
    for src in sources {
        let em = complex_distance_alpha(&src.position, alpha, n, Role::Emission)?;
        let de = zeta_derivative(&em, alpha, n, &src.position)?;
        let g = plain(ScaledComplex::exp(iw * (em.zeta + zr)).mul_complex(src.amplitude / em.zeta))?;
        f += g;
        df += g * (iw - 1.0 / em.zeta) * de;
    }
    let g_r = 1.0 / zr;
    let dg_r = g_r * (iw - 1.0 / zr) * dr;
    Ok(alpha * alpha / (4.0 * PI) * (dg_r * f - g_r * df))
}

/// Field at `x_r` rebuilt from reception amplitudes on the complex sphere.
pub fn beam_synthesis_freq(
    sources: &[PointSource],
    x_r: &Vector3,
    alpha: &ComplexRadius,
    rule: &SphereRule,
    omega: Frequency,
) -> Result<Complex64> {
    check_sources(sources, alpha)?;
    if alpha.modulus() >= x_r.norm() {
        return Err(Error::DomainViolation {
            re: alpha.r,
            im: alpha.a,
            reason: "|α| must be below |x_r|",
        });
    }
    integrate(rule, |n| {
        beam_synthesis_integrand_freq(sources, n, x_r, alpha.alpha(), omega.omega)
    })
}
