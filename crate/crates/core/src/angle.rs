//! Canonical yaw angles and circular arithmetic.
//!
//! Every angle in the library lives on the half-open interval `[-π, π)`.
//! KITTI writes orientations on the closed interval `[-π, π]`; `π` and `-π`
//! are the same point on the circle, so `π` is folded onto `-π`.

use std::f64::consts::{PI, TAU};
use std::fmt;

use crate::error::{OrientError, Result};

/// Minimum resultant length accepted by [`circular_mean`].
pub const MEAN_RESULTANT_EPS: f64 = 1e-12;

/// A yaw angle in radians, canonicalized to `[-π, π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle(f64);

impl Angle {
    pub const ZERO: Angle = Angle(0.0);

    /// Wraps a finite raw value in radians onto `[-π, π)`.
    pub fn wrap(raw: f64) -> Result<Angle> {
        if !raw.is_finite() {
            return Err(OrientError::invalid(format!("angle {raw} is not finite")));
        }
        Ok(Angle(wrap_radians(raw)))
    }

    #[inline]
    pub fn radians(self) -> f64 {
        self.0
    }

    pub fn degrees(self) -> f64 {
        self.0.to_degrees()
    }

    #[inline]
    pub fn cos(self) -> f64 {
        self.0.cos()
    }

    #[inline]
    pub fn sin(self) -> f64 {
        self.0.sin()
    }

    /// Rotates by `delta` radians and re-wraps.
    pub fn rotate(self, delta: f64) -> Result<Angle> {
        Angle::wrap(self.0 + delta)
    }
}

impl fmt::Display for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl From<Angle> for f64 {
    fn from(a: Angle) -> f64 {
        a.0
    }
}

impl TryFrom<f64> for Angle {
    type Error = OrientError;

    fn try_from(raw: f64) -> Result<Angle> {
        Angle::wrap(raw)
    }
}

/// Wraps a finite value onto `[-π, π)`. Non-finite input propagates as NaN.
#[inline]
pub(crate) fn wrap_radians(raw: f64) -> f64 {
    let mut r = (raw + PI).rem_euclid(TAU) - PI;
    // rem_euclid may round up to exactly TAU for tiny negative arguments
    if r >= PI {
        r -= TAU;
    }
    if r < -PI {
        r = -PI;
    }
    r
}

/// Shorthand for [`Angle::wrap`].
pub fn wrap(raw: f64) -> Result<Angle> {
    Angle::wrap(raw)
}

/// Signed geodesic difference `a - b`, in `(-π, π]`.
///
/// `wrap(b + circular_diff(a, b)) == a` up to rounding.
pub fn circular_diff(a: Angle, b: Angle) -> f64 {
    signed_diff(a.0, b.0)
}

#[inline]
pub(crate) fn signed_diff(a: f64, b: f64) -> f64 {
    let d = wrap_radians(a - b);
    if d == -PI {
        PI
    } else {
        d
    }
}

/// Mean direction of a set of angles via the resultant vector.
pub fn circular_mean(angles: &[Angle]) -> Result<Angle> {
    circular_mean_radians(angles.iter().map(|a| a.0))
}

pub(crate) fn circular_mean_radians<I>(angles: I) -> Result<Angle>
where
    I: IntoIterator<Item = f64>,
{
    let (mut s, mut c, mut n) = (0.0, 0.0, 0usize);
    for a in angles {
        s += a.sin();
        c += a.cos();
        n += 1;
    }
    if n == 0 {
        return Err(OrientError::invalid("circular mean of an empty set"));
    }
    let (s, c) = (s / n as f64, c / n as f64);
    let resultant = s.hypot(c);
    if !(resultant > MEAN_RESULTANT_EPS) {
        return Err(OrientError::DegenerateMean { resultant });
    }
    Angle::wrap(s.atan2(c))
}

/// Lateral position `x` and forward distance `z` of an object in camera
/// coordinates, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ObjectLocation {
    pub x: f64,
    pub z: f64,
}

impl ObjectLocation {
    pub fn new(x: f64, z: f64) -> Self {
        Self { x, z }
    }

    /// Azimuth of the camera ray through the object, `atan(x / z)`.
    pub fn ray_angle(&self) -> Result<f64> {
        if !(self.z > 0.0) || !self.x.is_finite() || !self.z.is_finite() {
            return Err(OrientError::InvalidLocation { z: self.z });
        }
        Ok((self.x / self.z).atan())
    }
}

/// Converts an observation angle (alpha) to global yaw (rotation_y).
pub fn alpha_to_roty(alpha: Angle, loc: ObjectLocation) -> Result<Angle> {
    Angle::wrap(alpha.0 + loc.ray_angle()?)
}

/// Converts global yaw (rotation_y) to an observation angle (alpha).
pub fn roty_to_alpha(roty: Angle, loc: ObjectLocation) -> Result<Angle> {
    Angle::wrap(roty.0 - loc.ray_angle()?)
}

/// Maps an angle linearly onto `[-1, 1)`.
pub fn normalize_scalar(theta: Angle) -> f64 {
    theta.0 / PI
}

/// Inverse of [`normalize_scalar`]; values outside `[-1, 1)` are wrapped
/// around the circle rather than clipped.
pub fn denormalize_scalar(v: f64) -> Result<Angle> {
    Angle::wrap(v * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn a(x: f64) -> Angle {
        Angle::wrap(x).unwrap()
    }

    #[test]
    fn wrap_examples() {
        assert_eq!(a(0.0).radians(), 0.0);
        assert!(circular_diff(a(3.0 * PI), a(-PI)).abs() < 1e-12);
        assert!(a(3.0 * PI).radians() >= -PI && a(3.0 * PI).radians() < PI);
        assert_eq!(a(-PI).radians(), -PI);
        assert_eq!(a(PI).radians(), -PI);
        assert!(matches!(Angle::wrap(f64::NAN), Err(OrientError::InvalidInput(_))));
        assert!(Angle::wrap(f64::INFINITY).is_err());
    }

    #[test]
    fn wrap_tiny_negative_stays_in_range() {
        let r = a(-PI - 1e-17).radians();
        assert!((-PI..PI).contains(&r));
        let r = a(-1e-300).radians();
        assert!((-PI..PI).contains(&r));
    }

    #[test]
    fn circular_diff_examples() {
        assert_eq!(circular_diff(a(0.1), a(0.1)), 0.0);
        assert!((circular_diff(a(PI - 0.1), a(-PI + 0.1)) + 0.2).abs() < 1e-12);
        assert!((circular_diff(a(PI / 2.0), a(0.0)) - PI / 2.0).abs() < 1e-15);
        // antipodes map to +π, never -π
        assert_eq!(circular_diff(a(0.0), a(-PI)), PI);
    }

    #[test]
    fn circular_mean_examples() {
        let m = circular_mean(&[a(0.1), a(0.3)]).unwrap();
        assert!((m.radians() - 0.2).abs() < 1e-12);

        // resultant of (π-0.1, -π+0.1) points along -x
        let m = circular_mean(&[a(PI - 0.1), a(-PI + 0.1)]).unwrap();
        assert!(circular_diff(m, a(-PI)).abs() < 1e-12);

        assert!(matches!(
            circular_mean(&[a(0.0), a(PI)]),
            Err(OrientError::DegenerateMean { .. })
        ));
        assert!(matches!(circular_mean(&[]), Err(OrientError::InvalidInput(_))));
    }

    #[test]
    fn alpha_roty_examples() {
        let on_axis = ObjectLocation::new(0.0, 10.0);
        assert_eq!(alpha_to_roty(a(0.0), on_axis).unwrap().radians(), 0.0);
        assert_eq!(roty_to_alpha(a(0.0), on_axis).unwrap().radians(), 0.0);

        let diag = ObjectLocation::new(5.0, 5.0);
        let r = alpha_to_roty(a(0.5), diag).unwrap();
        assert!((r.radians() - (0.5 + FRAC_PI_4)).abs() < 1e-15);

        // π - 0.1 + π/4 crosses the wrap: expected -π + (π/4 - 0.1)
        let r = alpha_to_roty(a(PI - 0.1), diag).unwrap();
        assert!((r.radians() - (-2.456_194_490_192_344_8)).abs() < 1e-12);

        let back = roty_to_alpha(a(FRAC_PI_4), diag).unwrap();
        assert!(back.radians().abs() < 1e-15);
    }

    #[test]
    fn conversion_rejects_objects_behind_camera() {
        for z in [0.0, -3.0, f64::NAN] {
            let loc = ObjectLocation::new(1.0, z);
            assert!(matches!(alpha_to_roty(a(0.0), loc), Err(OrientError::InvalidLocation { .. })));
            assert!(roty_to_alpha(a(0.0), loc).is_err());
        }
    }

    #[test]
    fn scalar_normalization() {
        assert_eq!(normalize_scalar(a(PI / 2.0)), 0.5);
        assert_eq!(denormalize_scalar(0.0).unwrap().radians(), 0.0);
        assert!(denormalize_scalar(2.0).unwrap().radians().abs() < 1e-15);
        assert!(circular_diff(denormalize_scalar(1.5).unwrap(), a(-PI / 2.0)).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn wrap_is_idempotent_and_canonical(raw in -1e4f64..1e4) {
            let w = a(raw).radians();
            prop_assert!((-PI..PI).contains(&w));
            prop_assert_eq!(a(w).radians(), w);
        }

        #[test]
        fn wrap_is_2pi_periodic(theta in -PI..PI, k in -3i32..=3) {
            let shifted = a(theta + TAU * k as f64);
            prop_assert!(circular_diff(shifted, a(theta)).abs() <= 1e-12);
        }

        #[test]
        fn circular_diff_is_geodesic(x in -PI..PI, y in -PI..PI) {
            let d = circular_diff(a(x), a(y));
            prop_assert!(d.abs() <= PI);
            prop_assert!(circular_diff(a(y + d), a(x)).abs() < 1e-12);
        }

        #[test]
        fn conversions_are_mutual_inverses(r in -PI..PI, x in -40.0f64..40.0, z in 0.5f64..80.0) {
            let loc = ObjectLocation::new(x, z);
            let alpha = roty_to_alpha(a(r), loc).unwrap();
            let back = alpha_to_roty(alpha, loc).unwrap();
            prop_assert!(circular_diff(back, a(r)).abs() < 1e-12);
        }

        #[test]
        fn circular_mean_is_rotation_equivariant(
            xs in proptest::collection::vec(-0.8f64..0.8, 1..8),
            base in -PI..PI,
            delta in -PI..PI,
        ) {
            let angles: Vec<Angle> = xs.iter().map(|x| a(base + x)).collect();
            let rotated: Vec<Angle> = angles.iter().map(|t| t.rotate(delta).unwrap()).collect();
            let m = circular_mean(&angles).unwrap();
            let mr = circular_mean(&rotated).unwrap();
            prop_assert!(circular_diff(mr, m.rotate(delta).unwrap()).abs() < 1e-9);
        }
    }
}
