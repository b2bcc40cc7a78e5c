//! The Faddeeva function `w(z) = e^{-z²} erfc(-iz)`.
//!
//! Three regions in the upper half plane:
//!
//! * `|z| < SERIES_RADIUS`: Maclaurin series `Σ (iz)^n / Γ(n/2 + 1)`.
//! * `|z| ≥ CF_RADIUS`: Laplace continued fraction, evaluated bottom-up.
//! * otherwise: Weideman's rational expansion in `(L + iz)/(L - iz)`.
//!
//! The lower half plane follows from `w(z) = 2e^{-z²} - w(-z)`. That
//! reflection overflows quickly, so [`faddeeva_scaled`] returns it as a
//! [`ScaledComplex`].

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::scaled::ScaledComplex;

const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

const SERIES_RADIUS: f64 = 0.5;
const CF_RADIUS: f64 = 8.0;
/// Number of terms in the rational expansion.
const WEIDEMAN_TERMS: usize = 48;

struct Weideman {
    scale: f64,
    /// Coefficients in ascending powers of `Z`.
    coefficients: Vec<f64>,
}

fn weideman() -> &'static Weideman {
    static TABLE: OnceLock<Weideman> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n = WEIDEMAN_TERMS;
        let m = 2 * n;
        let scale = (n as f64 / 2f64.sqrt()).sqrt();
        // samples of e^{-t²}(L² + t²) at t = L tan(θ/2), θ = kπ/M, |k| < M
        let samples: Vec<f64> = (1..m)
            .map(|k| {
                let t = scale * (k as f64 * PI / (2 * m) as f64).tan();
                (-t * t).exp() * (scale * scale + t * t)
            })
            .collect();
        let f0 = scale * scale;
        // even sequence, so the DFT reduces to a cosine sum
        let coefficients = (1..=n)
            .map(|j| {
                let mut acc = f0;
                for (idx, f) in samples.iter().enumerate() {
                    let k = (idx + 1) as f64;
                    acc += 2.0 * f * (k * j as f64 * PI / m as f64).cos();
                }
                acc / (2 * m) as f64
            })
            .collect();
        Weideman {
            scale,
            coefficients,
        }
    })
}

fn series(z: Complex64) -> Complex64 {
    // Γ(n/2 + 1) by the recurrence Γ(x + 1) = xΓ(x), split by parity of n
    let iz = Complex64::new(-z.im, z.re);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut power = Complex64::new(1.0, 0.0);
    let mut gamma_even = 1.0; // Γ(k + 1)
    let mut gamma_odd = 0.5 * PI.sqrt(); // Γ(k + 3/2)
    for n in 0..60 {
        let gamma = if n % 2 == 0 {
            let k = n / 2;
            if k > 0 {
                gamma_even *= k as f64;
            }
            gamma_even
        } else {
            let k = (n - 1) / 2;
            if k > 0 {
                gamma_odd *= k as f64 + 0.5;
            }
            gamma_odd
        };
        let term = power / gamma;
        sum += term;
        if term.norm() < 1e-17 * sum.norm() {
            break;
        }
        power *= iz;
    }
    sum
}

fn rational(z: Complex64) -> Complex64 {
    let table = weideman();
    let l = Complex64::new(table.scale, 0.0);
    let iz = Complex64::new(-z.im, z.re);
    let denom = l - iz;
    let big_z = (l + iz) / denom;
    let p = table
        .coefficients
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, c| acc * big_z + c);
    2.0 * p / (denom * denom) + FRAC_1_SQRT_PI / denom
}

fn continued_fraction_terms(z: Complex64) -> usize {
    let r = z.norm();
    // more terms near the real axis where convergence is slowest
    let base = 10.0 + 3000.0 / (r * r);
    base.ceil().min(200.0) as usize
}

/// Tail `q` of the Laplace continued fraction, `w = (i/√π)/(z - q)`.
fn continued_fraction_tail(z: Complex64) -> Complex64 {
    let n = continued_fraction_terms(z);
    let mut q = Complex64::new(0.0, 0.0);
    for k in (1..=n).rev() {
        q = Complex64::new(0.5 * k as f64, 0.0) / (z - q);
    }
    q
}

fn upper_half(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    let r = z.norm();
    if r < SERIES_RADIUS {
        series(z)
    } else if r >= CF_RADIUS {
        let q = continued_fraction_tail(z);
        Complex64::new(0.0, FRAC_1_SQRT_PI) / (z - q)
    } else {
        rational(z)
    }
}

/// `w(z)` as a plain complex number.
///
/// In the lower half plane the value grows like `e^{y² - x²}` and overflows to
/// infinity once that exponent passes ~709; use [`faddeeva_scaled`] there.
pub fn faddeeva(z: Complex64) -> Complex64 {
    if z.im >= 0.0 {
        return upper_half(z);
    }
    if z.norm() < SERIES_RADIUS {
        return series(z);
    }
    2.0 * (-z * z).exp() - upper_half(-z)
}

/// `w(z)` in log-magnitude form, valid over the whole plane.
pub fn faddeeva_scaled(z: Complex64) -> ScaledComplex {
    if z.im >= 0.0 || z.norm() < SERIES_RADIUS {
        return ScaledComplex::from_complex(faddeeva(z));
    }
    let growing = ScaledComplex::exp(-z * z).scale(2.0);
    growing.sub(&ScaledComplex::from_complex(upper_half(-z)))
}

/// `w(z) - i/(√π z)` for `Im z ≥ 0`, computed without cancellation in the
/// far field. This is the part of `w` left after removing its Cauchy-kernel
/// asymptote.
pub fn faddeeva_remainder(z: Complex64) -> Complex64 {
    faddeeva_with_remainder(z).1
}

/// `(w(z), w(z) - i/(√π z))` for `Im z ≥ 0` from a single evaluation.
pub fn faddeeva_with_remainder(z: Complex64) -> (Complex64, Complex64) {
    debug_assert!(z.im >= 0.0);
    let i_sqrt_pi = Complex64::new(0.0, FRAC_1_SQRT_PI);
    if z.norm() >= CF_RADIUS {
        let q = continued_fraction_tail(z);
        let zq = z - q;
        (i_sqrt_pi / zq, i_sqrt_pi * q / (z * zq))
    } else {
        let w = upper_half(z);
        (w, w - i_sqrt_pi / z)
    }
}
