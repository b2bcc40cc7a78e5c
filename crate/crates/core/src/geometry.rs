//! Complex distances to and from the complex source point `αn̂`.
//!
//! With `α = R + ia`, the point `αn̂` stands for the real disk of radius `a`
//! tangent to the sphere `S_R` at `Rn̂`. The complex distance `ζ = √(z·z)` is
//! taken on the principal branch, which puts its cut exactly on that disk and
//! keeps `Re ζ ≥ 0` for both roles.
//!
//! Sign conventions:
//!
//! * reception (`x_r` seen from the disk): `z = x_r - αn̂`, `ζ_r = ξ_r - iη_r`;
//! * emission (disk seen from `x_e`): `z = αn̂ - x_e`, `ζ_e = ξ_e + iη_e`.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative threshold on `|Im w| / |w|` below which a non-positive `w` is
/// treated as lying on the branch cut.
pub const BRANCH_CUT_TOLERANCE: f64 = 1e-14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vector3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vector3 {
    pub const ZERO: Vector3 = Vector3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(&self, other: &Vector3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(&self, other: &Vector3) -> Vector3 {
        Vector3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

impl From<[f64; 3]> for Vector3 {
    fn from(v: [f64; 3]) -> Self {
        Vector3::new(v[0], v[1], v[2])
    }
}

impl Add for Vector3 {
    type Output = Vector3;
    fn add(self, rhs: Vector3) -> Vector3 {
        Vector3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vector3 {
    type Output = Vector3;
    fn sub(self, rhs: Vector3) -> Vector3 {
        Vector3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vector3 {
    type Output = Vector3;
    fn mul(self, rhs: f64) -> Vector3 {
        Vector3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Vector3 {
    type Output = Vector3;
    fn neg(self) -> Vector3 {
        Vector3::new(-self.x, -self.y, -self.z)
    }
}

/// A unit vector on `S²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vector3", into = "Vector3")]
pub struct Direction(Vector3);

impl Direction {
    pub const X: Direction = Direction(Vector3::new(1.0, 0.0, 0.0));
    pub const Y: Direction = Direction(Vector3::new(0.0, 1.0, 0.0));
    pub const Z: Direction = Direction(Vector3::new(0.0, 0.0, 1.0));

    /// Normalizes `v`; fails for zero or non-finite vectors.
    pub fn new(v: Vector3) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "cannot normalize vector {v:?}"
            )));
        }
        Ok(Direction(v * (1.0 / norm)))
    }

    /// Accepts `v` only if it is already unit length to within 1e-12.
    pub fn from_unit(v: Vector3) -> Result<Self> {
        if (v.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "|n| = {} is not 1",
                v.norm()
            )));
        }
        Ok(Direction(v))
    }

    /// Polar angle `theta` and azimuth `phi` in the global frame.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Direction(Vector3::new(st * cp, st * sp, ct))
    }

    pub fn vector(&self) -> Vector3 {
        self.0
    }

    pub fn dot(&self, v: &Vector3) -> f64 {
        self.0.dot(v)
    }

    pub fn angle_to(&self, other: &Direction) -> f64 {
        // atan2 form stays accurate for nearly parallel vectors
        let cross = self.0.cross(&other.0).norm();
        cross.atan2(self.0.dot(&other.0))
    }

    /// An orthonormal frame `(e1, e2, self)`.
    pub fn frame(&self) -> (Vector3, Vector3) {
        let n = self.0;
        let helper = if n.x.abs() < 0.9 {
            Vector3::new(1.0, 0.0, 0.0)
        } else {
            Vector3::new(0.0, 1.0, 0.0)
        };
        let e1 = helper - n * helper.dot(&n);
        let e1 = e1 * (1.0 / e1.norm());
        let e2 = n.cross(&e1);
        (e1, e2)
    }

    /// The direction at polar angle `theta`, azimuth `phi` measured from
    /// `self` as the pole.
    pub fn rotated(&self, theta: f64, phi: f64) -> Direction {
        let (e1, e2) = self.frame();
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        let v = self.0 * ct + e1 * (st * cp) + e2 * (st * sp);
        Direction(v * (1.0 / v.norm()))
    }
}

impl TryFrom<Vector3> for Direction {
    type Error = Error;
    fn try_from(v: Vector3) -> Result<Self> {
        Direction::new(v)
    }
}

impl From<Direction> for Vector3 {
    fn from(d: Direction) -> Vector3 {
        d.0
    }
}

/// `α = R + ia`, the radius of the complexified sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexRadius {
    pub r: f64,
    pub a: f64,
}

impl ComplexRadius {
    pub fn new(r: f64, a: f64) -> Result<Self> {
        if !(r.is_finite() && r > 0.0) {
            return Err(Error::InvalidParameter(format!("R = {r} must be > 0")));
        }
        if !(a.is_finite() && a >= 0.0) {
            return Err(Error::InvalidParameter(format!("a = {a} must be >= 0")));
        }
        Ok(Self { r, a })
    }

    pub fn alpha(&self) -> Complex64 {
        Complex64::new(self.r, self.a)
    }

    /// `|α| = √(R² + a²)`, the outer radius of the shell swept by the disks.
    pub fn modulus(&self) -> f64 {
        self.r.hypot(self.a)
    }

    /// `γ₀ = a/|α|`, the lower bound of `η_e/a` over all interior sources.
    pub fn gamma0(&self) -> f64 {
        self.a / self.modulus()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    /// The disk receives from an interior point: `z = αn̂ - x_e`.
    Emission,
    /// The disk radiates to an exterior point: `z = x_r - αn̂`.
    Reception,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComplexDistance {
    pub zeta: Complex64,
    pub xi: f64,
    pub eta: f64,
    pub role: Role,
}

impl ComplexDistance {
    fn from_zeta(zeta: Complex64, role: Role) -> Self {
        let eta = match role {
            Role::Reception => -zeta.im,
            Role::Emission => zeta.im,
        };
        Self {
            zeta,
            xi: zeta.re,
            eta,
            role,
        }
    }

    /// Asymptotic cone angle `ϑ = arccos(η/a)` of the hyperboloid through the
    /// point. Only defined for `a > 0`.
    pub fn cone_angle(&self, a: f64) -> Result<f64> {
        if a <= 0.0 {
            return Err(Error::InvalidParameter(
                "cone angle needs a > 0".to_string(),
            ));
        }
        Ok((self.eta / a).clamp(-1.0, 1.0).acos())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum ZoneLabel {
    Frontal,
    Rear,
}

fn displacement(point: &Vector3, alpha: Complex64, n: &Direction, role: Role) -> [Complex64; 3] {
    let p = point.to_array();
    let nv = n.vector().to_array();
    let mut z = [Complex64::new(0.0, 0.0); 3];
    for k in 0..3 {
        let rel = Complex64::new(p[k], 0.0) - alpha * nv[k];
        z[k] = match role {
            Role::Reception => rel,
            Role::Emission => -rel,
        };
    }
    z
}

/// Complex distance for an arbitrary complex `α`.
///
/// Use this form for conjugated radii (`a < 0`); [`complex_distance`] covers
/// the physical case.
pub fn complex_distance_alpha(
    point: &Vector3,
    alpha: Complex64,
    n: &Direction,
    role: Role,
) -> Result<ComplexDistance> {
    let z = displacement(point, alpha, n, role);
    let w = z[0] * z[0] + z[1] * z[1] + z[2] * z[2];
    let scale = point.norm_squared() + alpha.norm_sqr();
    if w.norm() <= 1e-24 * scale {
        // branch point on the focal circle
        return Ok(ComplexDistance::from_zeta(Complex64::new(0.0, 0.0), role));
    }
    if w.re <= 0.0 && w.im.abs() <= BRANCH_CUT_TOLERANCE * w.norm() {
        return Err(Error::OnBranchCut {
            w_re: w.re,
            w_im: w.im,
        });
    }
    Ok(ComplexDistance::from_zeta(w.sqrt(), role))
}

pub fn complex_distance(
    point: &Vector3,
    alpha: &ComplexRadius,
    n: &Direction,
    role: Role,
) -> Result<ComplexDistance> {
    complex_distance_alpha(point, alpha.alpha(), n, role)
}

/// Cylindrical `(ρ, z)` of the point in the disk frame: origin at `Rn̂`,
/// axis along `n̂` for reception and `-n̂` for emission.
pub fn oblate_coordinates(dist: &ComplexDistance, a: f64) -> Result<(f64, f64)> {
    if a <= 0.0 {
        return Err(Error::InvalidParameter(
            "oblate coordinates need a > 0".to_string(),
        ));
    }
    let (xi, eta) = (dist.xi, dist.eta);
    let rho = (a * a + xi * xi).sqrt() * (a * a - eta * eta).max(0.0).sqrt() / a;
    Ok((rho, xi * eta / a))
}

/// `∂_α ζ = (α - n̂·x)/ζ`, the same expression for both roles.
pub fn zeta_derivative(
    dist: &ComplexDistance,
    alpha: Complex64,
    n: &Direction,
    point: &Vector3,
) -> Result<Complex64> {
    if dist.zeta.norm() == 0.0 {
        return Err(Error::Singular("ζ = 0 on the focal circle"));
    }
    Ok((alpha - n.dot(point)) / dist.zeta)
}

/// `(γa, a)` with `γ = √(1 - |x_e|²/|α|²)`: the range of `η_e` over `n̂ ∈ S²`.
pub fn eta_bounds(x_e: &Vector3, alpha: &ComplexRadius) -> Result<(f64, f64)> {
    let norm = x_e.norm();
    if norm >= alpha.r {
        return Err(Error::OutsideSphere {
            norm,
            radius: alpha.r,
        });
    }
    let gamma = (1.0 - x_e.norm_squared() / (alpha.modulus() * alpha.modulus())).sqrt();
    Ok((gamma * alpha.a, alpha.a))
}

/// Both legs of the path `x_e → αn̂ → x_r` with their `α`-derivatives.
#[derive(Clone, Copy, Debug)]
pub struct PathGeometry {
    pub reception: ComplexDistance,
    pub emission: ComplexDistance,
    /// `∂_{α'} ζ_r`.
    pub dzeta_r: Complex64,
    /// `∂_α ζ_e`.
    pub dzeta_e: Complex64,
}

impl PathGeometry {
    pub fn new(n: &Direction, x_e: &Vector3, x_r: &Vector3, alpha: Complex64) -> Result<Self> {
        let reception = complex_distance_alpha(x_r, alpha, n, Role::Reception)?;
        let emission = complex_distance_alpha(x_e, alpha, n, Role::Emission)?;
        let dzeta_r = zeta_derivative(&reception, alpha, n, x_r)?;
        let dzeta_e = zeta_derivative(&emission, alpha, n, x_e)?;
        Ok(Self {
            reception,
            emission,
            dzeta_r,
            dzeta_e,
        })
    }

    pub fn zeta_r(&self) -> Complex64 {
        self.reception.zeta
    }

    pub fn zeta_e(&self) -> Complex64 {
        self.emission.zeta
    }

    /// `ζ = ζ_r + ζ_e = ξ - iη`.
    pub fn zeta(&self) -> Complex64 {
        self.reception.zeta + self.emission.zeta
    }

    /// `η = η_r - η_e`; positive in the frontal zone.
    pub fn eta(&self) -> f64 {
        self.reception.eta - self.emission.eta
    }

    pub fn xi(&self) -> f64 {
        self.reception.xi + self.emission.xi
    }
}

/// Checks `|x_e| < Re α` and `|α| < |x_r|`.
pub fn check_analytic_domain(x_e: &Vector3, x_r: &Vector3, alpha: &ComplexRadius) -> Result<()> {
    let re = alpha.r;
    let im = alpha.a;
    if x_e.norm() >= re {
        return Err(Error::DomainViolation {
            re,
            im,
            reason: "Re α must exceed |x_e|",
        });
    }
    if alpha.modulus() >= x_r.norm() {
        return Err(Error::DomainViolation {
            re,
            im,
            reason: "|α| must be below |x_r|",
        });
    }
    Ok(())
}

pub fn classify_zone(
    n: &Direction,
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
) -> Result<ZoneLabel> {
    if !(x_e.norm() < alpha.r && alpha.r < x_r.norm()) {
        return Err(Error::InvalidParameter(format!(
            "zones need |x_e| < R < |x_r| (got {}, {}, {})",
            x_e.norm(),
            alpha.r,
            x_r.norm()
        )));
    }
    let reception = complex_distance(x_r, alpha, n, Role::Reception)?;
    let emission = complex_distance(x_e, alpha, n, Role::Emission)?;
    Ok(if reception.eta > emission.eta {
        ZoneLabel::Frontal
    } else {
        ZoneLabel::Rear
    })
}

/// Far-zone reception distance `ζ_r ≈ |x_r| - α x̂_r·n̂`.
pub fn far_zone_distance(x_r: &Vector3, alpha: &ComplexRadius, n: &Direction) -> ComplexDistance {
    let dist = x_r.norm();
    let cos_theta = n.dot(x_r) / dist;
    ComplexDistance::from_zeta(
        Complex64::new(dist, 0.0) - alpha.alpha() * cos_theta,
        Role::Reception,
    )
}

/// Large-`a` asymptotic form of the total distance `ζ = ζ_r + ζ_e`.
pub fn asymptotic_zeta_large_a(
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
    n: &Direction,
) -> Complex64 {
    let (r, a) = (alpha.r, alpha.a);
    let r_e_vec = n.vector() * r - *x_e;
    let r_e = r_e_vec.norm();
    let cos_theta = n.dot(x_r) / x_r.norm();
    let proj = n.dot(&r_e_vec); // r_e cos θ_e
    let perp_sq = (r_e * r_e - proj * proj).max(0.0); // r_e² sin² θ_e
    let half = ((1.0 - cos_theta) / 2.0).max(0.0); // sin²(θ/2)
    Complex64::new(
        proj + x_r.norm() - r * cos_theta,
        a * (2.0 * half - perp_sq / (2.0 * a * a)),
    )
}

/// The large-`a` frontal-zone test `sin(θ/2) < r_e sin θ_e / (2a)`.
pub fn frontal_zone_asymptotic(
    n: &Direction,
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
) -> ZoneLabel {
    let r_e_vec = n.vector() * alpha.r - *x_e;
    let perp = r_e_vec.cross(&n.vector()).norm(); // r_e sin θ_e
    let theta = n.angle_to(&Direction::new(*x_r).expect("x_r must be nonzero"));
    if (theta / 2.0).sin() < perp / (2.0 * alpha.a) {
        ZoneLabel::Frontal
    } else {
        ZoneLabel::Rear
    }
}

/// Angular distance from `x̂_r` to the frontal-zone boundary along azimuth
/// `phi` (measured in the frame of [`Direction::frame`] about `x̂_r`).
///
/// `exact` selects the sign of `η_r - η_e`; otherwise the large-`a` criterion
/// is used. Returns `π` when the zone does not close along that azimuth.
pub fn frontal_radius(
    x_e: &Vector3,
    x_r: &Vector3,
    alpha: &ComplexRadius,
    phi: f64,
    exact: bool,
) -> Result<f64> {
    let pole = Direction::new(*x_r)?;
    let frontal = |theta: f64| -> Result<bool> {
        let n = pole.rotated(theta, phi);
        let zone = if exact {
            classify_zone(&n, x_e, x_r, alpha)?
        } else {
            frontal_zone_asymptotic(&n, x_e, x_r, alpha)
        };
        Ok(zone == ZoneLabel::Frontal)
    };
    if !frontal(0.0)? {
        return Ok(0.0);
    }
    // march outwards to bracket the first exit, then bisect
    let steps = 4096;
    let mut lo = 0.0;
    let mut hi = None;
    for k in 1..=steps {
        let theta = PI * (k as f64 / steps as f64).powi(3);
        if !frontal(theta)? {
            hi = Some(theta);
            break;
        }
        lo = theta;
    }
    let Some(mut hi) = hi else {
        return Ok(PI);
    };
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if frontal(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 * hi.max(1e-300) {
            break;
        }
    }
    Ok(0.5 * (lo + hi))
}
