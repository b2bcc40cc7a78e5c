//! Complex numbers stored as `(ln|z|, arg z)`.
//!
//! Pulsed-beam kernels routinely produce factors like `e^{s²/d²}` whose
//! magnitude leaves the range of `f64` (the back-of-sphere contribution in the
//! alternative expansion is about `e^{55489}`). `ScaledComplex` keeps those
//! values exact in log form and only converts to a plain `Complex64` on demand.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Div, Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// Largest log-magnitude that still converts to a finite `f64`.
pub const MAX_LOG_F64: f64 = 709.782_712_893_384;
/// Below this log-magnitude a conversion flushes to zero.
pub const MIN_LOG_F64: f64 = -745.133_219_101_941_1;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    /// Natural log of the modulus; `-inf` encodes zero.
    pub log_magnitude: f64,
    /// Argument in `(-π, π]`.
    pub phase: f64,
}

pub(crate) fn wrap_phase(phase: f64) -> f64 {
    if phase > -PI && phase <= PI {
        return phase;
    }
    let p = phase.rem_euclid(2.0 * PI);
    if p > PI {
        p - 2.0 * PI
    } else {
        p
    }
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex {
        log_magnitude: f64::NEG_INFINITY,
        phase: 0.0,
    };
    pub const ONE: ScaledComplex = ScaledComplex {
        log_magnitude: 0.0,
        phase: 0.0,
    };

    pub fn new(log_magnitude: f64, phase: f64) -> Self {
        if log_magnitude == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        Self {
            log_magnitude,
            phase: wrap_phase(phase),
        }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        // hypot keeps |z| finite for components near f64::MAX
        Self::new(z.re.hypot(z.im).ln(), z.im.atan2(z.re))
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// `e^z` without ever forming the exponential.
    pub fn exp(z: Complex64) -> Self {
        Self::new(z.re, z.im)
    }

    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }

    pub fn is_finite(&self) -> bool {
        !self.log_magnitude.is_nan() && self.log_magnitude != f64::INFINITY && self.phase.is_finite()
    }

    /// Modulus as `f64`; infinite when it overflows.
    pub fn abs(&self) -> f64 {
        self.log_magnitude.exp()
    }

    /// Plain complex value, or `None` when the modulus overflows `f64`.
    /// Values below the subnormal range flush to zero.
    pub fn try_complex(&self) -> Option<Complex64> {
        if self.log_magnitude > MAX_LOG_F64 || self.log_magnitude.is_nan() {
            return None;
        }
        if self.log_magnitude < MIN_LOG_F64 {
            return Some(Complex64::new(0.0, 0.0));
        }
        Some(Complex64::from_polar(self.log_magnitude.exp(), self.phase))
    }

    /// Plain complex value.
    ///
    /// # Panics
    /// If the modulus does not fit in an `f64`.
    pub fn to_complex(&self) -> Complex64 {
        self.try_complex().unwrap_or_else(|| {
            panic!(
                "ScaledComplex with log-magnitude {} overflows f64",
                self.log_magnitude
            )
        })
    }

    pub fn re(&self) -> f64 {
        self.to_complex().re
    }

    pub fn conj(&self) -> Self {
        Self::new(self.log_magnitude, -self.phase)
    }

    pub fn inv(&self) -> Self {
        Self::new(-self.log_magnitude, -self.phase)
    }

    pub fn scale(&self, factor: f64) -> Self {
        *self * Self::from_real(factor)
    }

    pub fn mul_complex(&self, z: Complex64) -> Self {
        *self * Self::from_complex(z)
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let reference = self.log_magnitude.max(other.log_magnitude);
        let sum = self.mantissa(reference) + other.mantissa(reference);
        Self::from_complex(sum).shifted(reference)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&-*other)
    }

    /// `self / e^{reference}` as plain complex; caller guarantees it is in range.
    fn mantissa(&self, reference: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_magnitude - reference).exp(), self.phase)
    }

    fn shifted(self, by: f64) -> Self {
        if self.is_zero() {
            return self;
        }
        Self {
            log_magnitude: self.log_magnitude + by,
            phase: self.phase,
        }
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;

    fn mul(self, rhs: ScaledComplex) -> ScaledComplex {
        if self.is_zero() || rhs.is_zero() {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::new(
            self.log_magnitude + rhs.log_magnitude,
            self.phase + rhs.phase,
        )
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;

    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: ScaledComplex) -> ScaledComplex {
        self * rhs.inv()
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;

    fn neg(self) -> ScaledComplex {
        if self.is_zero() {
            return self;
        }
        ScaledComplex::new(self.log_magnitude, self.phase + PI)
    }
}

impl From<Complex64> for ScaledComplex {
    fn from(z: Complex64) -> Self {
        ScaledComplex::from_complex(z)
    }
}

impl fmt::Display for ScaledComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        // mantissa·e^{k} with integral k
        let k = self.log_magnitude.floor();
        let m = (self.log_magnitude - k).exp();
        write!(f, "{m:.6}·e^{k} ∠{:.6}", self.phase)
    }
}

/// Running sum of `ScaledComplex` terms in a fixed order.
///
/// Terms are accumulated relative to the largest magnitude seen so far, with
/// Kahan compensation on the mantissa.
#[derive(Clone, Copy, Debug)]
pub struct ScaledSum {
    reference: f64,
    sum: Complex64,
    compensation: Complex64,
    max_log_magnitude: f64,
}

impl Default for ScaledSum {
    fn default() -> Self {
        Self::new()
    }
}

impl ScaledSum {
    pub fn new() -> Self {
        Self {
            reference: f64::NEG_INFINITY,
            sum: Complex64::new(0.0, 0.0),
            compensation: Complex64::new(0.0, 0.0),
            max_log_magnitude: f64::NEG_INFINITY,
        }
    }

    pub fn add(&mut self, term: ScaledComplex) {
        if term.is_zero() {
            return;
        }
        if !term.is_finite() {
            self.reference = f64::NAN;
            return;
        }
        self.max_log_magnitude = self.max_log_magnitude.max(term.log_magnitude);
        if term.log_magnitude > self.reference {
            let factor = (self.reference - term.log_magnitude).exp();
            self.sum *= factor;
            self.compensation *= factor;
            self.reference = term.log_magnitude;
        }
        let y = Complex64::from_polar((term.log_magnitude - self.reference).exp(), term.phase)
            - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    /// Largest term magnitude accumulated so far, as a natural log.
    pub fn max_log_magnitude(&self) -> f64 {
        self.max_log_magnitude
    }

    pub fn value(&self) -> ScaledComplex {
        if self.reference.is_nan() {
            return ScaledComplex {
                log_magnitude: f64::NAN,
                phase: f64::NAN,
            };
        }
        if self.reference == f64::NEG_INFINITY {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::from_complex(self.sum).shifted(self.reference)
    }
}

impl std::iter::Sum for ScaledComplex {
    fn sum<I: Iterator<Item = ScaledComplex>>(iter: I) -> ScaledComplex {
        let mut acc = ScaledSum::new();
        for term in iter {
            acc.add(term);
        }
        acc.value()
    }
}
