//! The Gaussian pulse `g_d` and its analytic signal `ĝ_d` on complex time.
//!
//! `ĝ_d(τ) = w(-τ/d) / (2√π d)` where `w` is the Faddeeva function. In the
//! upper half plane (`s > 0`) that form multiplies a growing exponential by a
//! tiny erfc, so there the partition identity `ĝ_d(τ) = g_d(τ) - ĝ_d(-τ)` is
//! used instead, with `g_d` kept in log form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::faddeeva::{faddeeva, faddeeva_scaled, faddeeva_with_remainder};
use crate::scaled::ScaledComplex;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Gaussian `g_d(t) = e^{-t²/d²}/(√π d)`, standard deviation `d/√2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianSignal {
    pub d: f64,
}

impl GaussianSignal {
    pub fn new(d: f64) -> Result<Self> {
        if !(d.is_finite() && d > 0.0) {
            return Err(Error::InvalidParameter(format!("duration d = {d} must be > 0")));
        }
        Ok(Self { d })
    }

    pub fn sigma(&self) -> f64 {
        self.d / std::f64::consts::SQRT_2
    }

    /// `g_d(0) = 1/(√π d)`.
    pub fn peak(&self) -> f64 {
        1.0 / (SQRT_PI * self.d)
    }

    /// Real-time Gaussian.
    pub fn value(&self, t: f64) -> f64 {
        (-(t * t) / (self.d * self.d)).exp() * self.peak()
    }

    /// `g_d'(t) = -(2t/d²) g_d(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        -2.0 * t / (self.d * self.d) * self.value(t)
    }
}

/// `τ = t + is`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexTime {
    pub t: f64,
    pub s: f64,
}

impl ComplexTime {
    pub fn new(t: f64, s: f64) -> Self {
        Self { t, s }
    }

    pub fn real(t: f64) -> Self {
        Self { t, s: 0.0 }
    }

    pub fn tau(&self) -> Complex64 {
        Complex64::new(self.t, self.s)
    }
}

impl From<Complex64> for ComplexTime {
    fn from(z: Complex64) -> Self {
        Self { t: z.re, s: z.im }
    }
}

impl std::ops::Neg for ComplexTime {
    type Output = ComplexTime;
    fn neg(self) -> ComplexTime {
        ComplexTime::new(-self.t, -self.s)
    }
}

/// `g_d(τ)`, an entire function; its modulus is `g_d(t) e^{s²/d²}`.
pub fn gaussian(tau: ComplexTime, sig: GaussianSignal) -> ScaledComplex {
    let z = tau.tau() / sig.d;
    ScaledComplex::exp(-z * z).scale(sig.peak())
}

/// `ĝ_d(τ)`.
pub fn analytic_gaussian(tau: ComplexTime, sig: GaussianSignal) -> ScaledComplex {
    if tau.s <= 0.0 {
        let w = faddeeva(-tau.tau() / sig.d);
        ScaledComplex::from_complex(w * (0.5 * sig.peak()))
    } else {
        gaussian(tau, sig).sub(&analytic_gaussian(-tau, sig))
    }
}

/// `∂_τ ĝ_d(τ) = -(2τ/d²){ĝ_d(τ) - 1/(2πiτ)}`.
///
/// The braces are evaluated as a Faddeeva remainder, so the Cauchy kernel
/// cancels analytically and the far tail keeps full relative accuracy.
pub fn analytic_gaussian_derivative(tau: ComplexTime, sig: GaussianSignal) -> Result<ScaledComplex> {
    if tau.t == 0.0 && tau.s == 0.0 {
        return Err(Error::Singular("∂ĝ_d evaluated at τ = 0"));
    }
    Ok(derivative_unchecked(tau, sig))
}

fn derivative_unchecked(tau: ComplexTime, sig: GaussianSignal) -> ScaledComplex {
    let d2 = sig.d * sig.d;
    let t = tau.tau();
    if tau.s <= 0.0 {
        let (_, rem) = faddeeva_with_remainder(-t / sig.d);
        ScaledComplex::from_complex(-2.0 * t / d2 * rem * (0.5 * sig.peak()))
    } else {
        // ∂[g(τ) - ĝ(-τ)] = g'(τ) + ĝ'(-τ)
        let g_prime = gaussian(tau, sig).mul_complex(-2.0 * t / d2);
        g_prime.add(&derivative_unchecked(-tau, sig))
    }
}

/// `(ĝ_d(τ), ∂_τ ĝ_d(τ))` as plain complex numbers from one Faddeeva
/// evaluation. Components are non-finite if the values overflow; callers on
/// hot paths check and fall back to the scaled functions.
///
/// At `τ = 0` the derivative is its limit `-i/(π d²)`.
pub fn analytic_gaussian_pair(tau: Complex64, d: f64) -> (Complex64, Complex64) {
    let d2 = d * d;
    let norm = 0.5 / (SQRT_PI * d);
    if tau.im <= 0.0 {
        if tau.re == 0.0 && tau.im == 0.0 {
            return (Complex64::new(norm, 0.0), Complex64::new(0.0, -1.0 / (PI * d2)));
        }
        let (w, rem) = faddeeva_with_remainder(-tau / d);
        (w * norm, -2.0 * tau / d2 * rem * norm)
    } else {
        let (mirror, mirror_prime) = analytic_gaussian_pair(-tau, d);
        let z = tau / d;
        let g = (-z * z).exp() * (2.0 * norm);
        (g - mirror, -2.0 * tau / d2 * g + mirror_prime)
    }
}

/// `H̃_d(-iτ) = ½ erfc(iτ/d)`.
///
/// Overflows to a non-finite value where erfc itself exceeds `f64`; see
/// [`smoothed_heaviside_scaled`].
pub fn smoothed_heaviside(tau: ComplexTime, sig: GaussianSignal) -> Complex64 {
    smoothed_heaviside_scaled(tau, sig)
        .try_complex()
        .unwrap_or(Complex64::new(f64::INFINITY, f64::INFINITY))
}

pub fn smoothed_heaviside_scaled(tau: ComplexTime, sig: GaussianSignal) -> ScaledComplex {
    // erfc(iτ/d) = e^{τ²/d²} w(-τ/d)
    let z = tau.tau() / sig.d;
    ScaledComplex::exp(z * z) * faddeeva_scaled(-z).scale(0.5)
}

/// Large-`|τ|` form `ĝ_d(τ) ≈ H(s) g_d(τ) + 1/(2πiτ)`, with `H(0) = 0`.
pub fn asymptotic_analytic_gaussian(tau: ComplexTime, sig: GaussianSignal) -> ScaledComplex {
    let cauchy = ScaledComplex::from_complex(1.0 / (Complex64::new(0.0, 2.0 * PI) * tau.tau()));
    if tau.s > 0.0 {
        gaussian(tau, sig).add(&cauchy)
    } else {
        cauchy
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::LineRule;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn sig(d: f64) -> GaussianSignal {
        GaussianSignal::new(d).unwrap()
    }

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * a.norm().max(b.norm())
    }

    #[test]
    fn gaussian_at_origin() {
        let g = gaussian(ComplexTime::real(0.0), sig(1.0)).to_complex();
        assert!((g.re - 0.564_189_583_547_756_3).abs() < 1e-15 && g.im == 0.0);
    }

    #[test]
    fn gaussian_modulus() {
        let s = sig(0.7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1000 {
            let t = rng.gen_range(-5.0..5.0);
            let im = rng.gen_range(-5.0..5.0);
            let g = gaussian(ComplexTime::new(t, im), s);
            let expected = s.value(t).ln() + im * im / (s.d * s.d);
            assert!((g.log_magnitude - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn extreme_back_point_value() {
        let s = sig(0.3 * 2f64.sqrt());
        let g = gaussian(ComplexTime::new(0.0, -99.94), s);
        let expected = 99.94f64.powi(2) / 0.18 - (SQRT_PI * s.d).ln();
        assert!((g.log_magnitude - expected).abs() < 1e-9);
        assert!((g.log_magnitude - (55489.0 + 1.33f64.ln())).abs() < 1.0);
        let gh = analytic_gaussian(ComplexTime::new(0.0, -99.94), s).to_complex();
        assert!((gh.re - 0.00159).abs() < 5e-6, "{gh}");
        assert!(gh.im.abs() < 1e-12);
    }

    #[test]
    fn analytic_signal_at_origin() {
        let s = sig(0.4);
        let gh = analytic_gaussian(ComplexTime::real(0.0), s).to_complex();
        assert!(close(gh, Complex64::new(0.5 * s.peak(), 0.0), 1e-15));
    }

    #[test]
    fn partition_and_reality() {
        let s = sig(0.5);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..2000 {
            let tau = ComplexTime::new(rng.gen_range(-5.0..5.0) * s.d, rng.gen_range(-5.0..5.0) * s.d);
            let plus = analytic_gaussian(tau, s);
            let minus = analytic_gaussian(-tau, s);
            let g = gaussian(tau, s);
            let scale = plus.abs().max(minus.abs()).max(g.abs());
            assert!((plus.add(&minus).sub(&g)).abs() <= 1e-12 * scale);
            // ĝ(-τ*)* = ĝ(τ)
            let mirrored = analytic_gaussian(ComplexTime::new(-tau.t, tau.s), s).conj();
            assert!(mirrored.sub(&plus).abs() <= 1e-12 * plus.abs());
        }
    }

    #[test]
    fn real_part_on_real_axis() {
        let s = sig(0.8);
        for k in -40..=40 {
            let t = 0.1 * k as f64;
            let gh = analytic_gaussian(ComplexTime::real(t), s).to_complex();
            assert!((2.0 * gh.re - s.value(t)).abs() < 1e-14);
            if t != 0.0 {
                let dg = analytic_gaussian_derivative(ComplexTime::real(t), s).unwrap().to_complex();
                assert!((2.0 * dg.re - s.derivative(t)).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let s = sig(0.6);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let tau = Complex64::new(rng.gen_range(-4.0..4.0), rng.gen_range(-2.0..2.0));
            let h = 1e-5;
            let f = |z: Complex64| analytic_gaussian(z.into(), s).to_complex();
            let fd = (f(tau + h) - f(tau - h)) / (2.0 * h);
            let exact = analytic_gaussian_derivative(tau.into(), s).unwrap().to_complex();
            assert!(close(exact, fd, 1e-7), "{tau}: {exact} vs {fd}");
        }
        assert!(analytic_gaussian_derivative(ComplexTime::real(0.0), s).is_err());
    }

    #[test]
    fn pair_matches_scaled_functions() {
        let s = sig(0.45);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..500 {
            let tau = Complex64::new(rng.gen_range(-30.0..30.0), rng.gen_range(-10.0..3.0));
            let (g, dg) = analytic_gaussian_pair(tau, s.d);
            assert!(close(g, analytic_gaussian(tau.into(), s).to_complex(), 1e-13));
            let exact = analytic_gaussian_derivative(tau.into(), s).unwrap().to_complex();
            assert!(close(dg, exact, 1e-13));
        }
        let (_, d0) = analytic_gaussian_pair(Complex64::new(0.0, 0.0), s.d);
        let near = analytic_gaussian_derivative(ComplexTime::real(1e-9), s).unwrap().to_complex();
        assert!(close(d0, near, 1e-6));
    }

    #[test]
    fn derivative_tail_beats_cauchy_kernel() {
        let s = sig(1.0);
        let mut previous = f64::INFINITY;
        for k in 2..=6 {
            let r = 10f64.powi(k);
            let tau = Complex64::from_polar(r, -0.3);
            let dg = analytic_gaussian_derivative(tau.into(), s).unwrap().abs();
            // |τ ĝ'| → 0 since ĝ' = O(τ⁻²)
            let scaled = r * dg;
            assert!(scaled < previous * 0.2);
            previous = scaled;
        }
    }

    #[test]
    fn fourier_integral_matches() {
        let s = sig(0.9);
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let tau = Complex64::new(rng.gen_range(-3.0..3.0) * s.d, rng.gen_range(-3.0..3.0) * s.d);
            let peak = 2.0 * tau.im.max(0.0) / (s.d * s.d);
            let rule = LineRule::composite(0.0, peak + 16.0 / s.d, 40, 20).unwrap();
            let integral = rule.integrate(|w| {
                (Complex64::new(0.0, -w) * tau).exp() * (-(s.d * s.d) * w * w / 4.0).exp()
            }) / (2.0 * PI);
            let gh = analytic_gaussian(tau.into(), s).to_complex();
            assert!(close(integral, gh, 1e-8), "{tau}");
        }
    }

    #[test]
    fn asymptotic_forms() {
        let s = sig(0.5);
        let far = ComplexTime::from(Complex64::from_polar(1e3 * s.d, -1.0));
        let exact = analytic_gaussian(far, s);
        let approx = asymptotic_analytic_gaussian(far, s);
        assert!(exact.sub(&approx).abs() < 1e-3 * exact.abs());
        let up = ComplexTime::new(3.0, 20.0);
        let exact = analytic_gaussian(up, s);
        let approx = asymptotic_analytic_gaussian(up, s);
        // |ĝ| ~ e^{1564} here, so compare in log form
        assert!(exact.sub(&approx).log_magnitude - exact.log_magnitude < 1e-10f64.ln());
        let real = ComplexTime::real(1e4);
        let gh = analytic_gaussian(real, s).to_complex();
        let cauchy = 1.0 / Complex64::new(0.0, 2.0 * PI * 1e4);
        assert!(close(gh, cauchy, 1e-6));
    }

    #[test]
    fn heaviside_values() {
        let s = sig(1.0);
        let h0 = smoothed_heaviside(ComplexTime::real(0.0), s);
        assert!(close(h0, Complex64::new(0.5, 0.0), 1e-15));
        // H̃_d(σ) for real σ sits at τ = iσ
        for sigma in [1.0, 2.0, 4.0] {
            let up = smoothed_heaviside(ComplexTime::new(0.0, sigma), s);
            let down = smoothed_heaviside(ComplexTime::new(0.0, -sigma), s);
            assert!((up - 1.0).norm() < 0.0787);
            assert!(down.norm() < 0.0787);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..200 {
            let tau = ComplexTime::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            let sum = smoothed_heaviside(tau, s) + smoothed_heaviside(-tau, s);
            assert!((sum - 1.0).norm() < 1e-12 * smoothed_heaviside(tau, s).norm().max(1.0));
        }
    }

    #[test]
    fn heaviside_dips_near_diagonals() {
        // the zeros of erfc approach the rays s = |t| from below
        let s = sig(1.0);
        for sign in [1.0, -1.0] {
            let mut min = f64::INFINITY;
            for k in 1..=500 {
                let t = 0.01 * k as f64;
                for j in 0..=75 {
                    let im = t - 0.01 * j as f64;
                    let h = smoothed_heaviside(ComplexTime::new(sign * t, im), s).norm();
                    min = min.min(h);
                }
            }
            assert!(min < 0.05, "min {min}");
        }
    }
}
