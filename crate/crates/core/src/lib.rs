//! Pulsed-beam wavelets radiated by disks tangent to a sphere.
//!
//! The classical Huygens representation of an exterior wave uses point
//! sources on a sphere `S_R`. Continuing the radius to `α = R + ia` turns each
//! point `R n̂` into a disk of radius `a` tangent to the sphere, and the
//! spherical wavelets into beams and pulsed beams aimed along `n̂`. The
//! reproducing relations stay exact, while the integrand concentrates on the
//! part of the sphere facing the receiver.
//!
//! Module map:
//!
//! * [`geometry`]: complex distances, branch disks, oblate coordinates, zones.
//! * [`scaled`]: log-magnitude/phase complex numbers that never overflow.
//! * [`faddeeva`] and [`signal`]: the Gaussian signal and its analytic signal.
//! * [`freq`]: complex-source beams and the frequency-domain relation.
//! * [`time`]: pulsed-beam propagators and the time-domain relations.
//! * [`quadrature`]: product rules on spheres, caps and annular bands.
//! * [`experiments`]: the compression, stability and large-`a` studies.

pub mod error;
pub mod experiments;
pub mod faddeeva;
pub mod freq;
pub mod geometry;
pub mod quadrature;
pub mod scaled;
pub mod signal;
pub mod time;

pub use error::{Error, Result};
pub use geometry::{ComplexDistance, ComplexRadius, Direction, Role, Vector3, ZoneLabel};
pub use quadrature::SphereRule;
pub use scaled::ScaledComplex;
pub use signal::{ComplexTime, GaussianSignal};

pub use num_complex::Complex64;
