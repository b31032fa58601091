use super::{AerTriple, StateVector};
use crate::error::{Error, Result};
use crate::math::{lit, Real, Vec3};

/// East-north-up basis attached to an observer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalFrame<T> {
    pub origin: StateVector<T>,
    pub east: Vec3<T>,
    pub north: Vec3<T>,
    pub up: Vec3<T>,
}

impl<T: Real> LocalFrame<T> {
    /// Frame whose up axis is the radial direction away from `body_center`
    /// and whose north axis leans toward `pole`.
    pub fn about_body(origin: StateVector<T>, body_center: Vec3<T>, pole: Vec3<T>) -> Self {
        let up = (origin.position - body_center)
            .normalized()
            .unwrap_or_else(Vec3::unit_z);
        let east = pole.cross(&up).normalized().unwrap_or_else(|| {
            // observer on the pole: any horizontal axis will do
            let helper = if up.x.abs() < lit(0.9) {
                Vec3::unit_x()
            } else {
                Vec3::unit_y()
            };
            helper.cross(&up).normalized().expect("helper not parallel to up")
        });
        let north = up.cross(&east);
        Self {
            origin,
            east,
            north,
            up,
        }
    }

    /// Inverse of [`aer`]: target position from look angles and range.
    pub fn position_from_aer(&self, look: &AerTriple<T>) -> Vec3<T> {
        let (saz, caz) = look.azimuth_deg.to_radians().sin_cos();
        let (sel, cel) = look.elevation_deg.to_radians().sin_cos();
        let dir = self.east * (cel * saz) + self.north * (cel * caz) + self.up * sel;
        self.origin.position + dir * look.range_km
    }
}

/// Topocentric azimuth (from north, clockwise), elevation and range of
/// `target` as seen from `observer`.
pub fn aer<T: Real>(observer: &LocalFrame<T>, target: &StateVector<T>) -> Result<AerTriple<T>> {
    observer.origin.check_compatible(target)?;
    let rho = target.position - observer.origin.position;
    let range = rho.norm();
    if !(range > T::zero()) {
        return Err(Error::UndefinedDirection);
    }
    let e = rho.dot(&observer.east);
    let n = rho.dot(&observer.north);
    let u = rho.dot(&observer.up);
    let mut az = e.atan2(n).to_degrees();
    if az < T::zero() {
        az += lit(360.0);
    }
    if az >= lit(360.0) {
        az -= lit(360.0);
    }
    let el = u.atan2(e.hypot(n)).to_degrees();
    Ok(AerTriple {
        azimuth_deg: az,
        elevation_deg: el,
        range_km: range,
    })
}

/// Spherical body that can block a line of sight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occluder<T> {
    pub center: StateVector<T>,
    pub radius_km: T,
}

// 1 m outward nudge for endpoints sitting on an occluder's surface.
const SURFACE_OFFSET_KM: f64 = 1e-3;

/// True iff the segment `a`–`b` clears every occluding sphere.
pub fn line_of_sight<T: Real>(a: &StateVector<T>, b: &StateVector<T>, occluders: &[Occluder<T>]) -> bool {
    // Canonical endpoint order makes the test exactly symmetric.
    let (p, q) = if key(&a.position) <= key(&b.position) {
        (a.position, b.position)
    } else {
        (b.position, a.position)
    };
    occluders.iter().all(|occ| segment_clears(p, q, occ))
}

fn key<T: Real>(v: &Vec3<T>) -> (f64, f64, f64) {
    (
        crate::math::to_f64(v.x),
        crate::math::to_f64(v.y),
        crate::math::to_f64(v.z),
    )
}

fn lift<T: Real>(p: Vec3<T>, c: Vec3<T>, r: T) -> Vec3<T> {
    let eps = lit::<T>(SURFACE_OFFSET_KM);
    let d = p - c;
    let dist = d.norm();
    if (dist - r).abs() <= eps && dist > T::zero() {
        c + d * ((r + eps) / dist)
    } else {
        p
    }
}

fn segment_clears<T: Real>(p: Vec3<T>, q: Vec3<T>, occ: &Occluder<T>) -> bool {
    let c = occ.center.position;
    let r = occ.radius_km;
    let p = lift(p, c, r);
    let q = lift(q, c, r);
    let seg = q - p;
    let len2 = seg.norm_squared();
    let t = if len2 > T::zero() {
        ((c - p).dot(&seg) / len2).max(T::zero()).min(T::one())
    } else {
        T::zero()
    };
    let closest = p + seg * t;
    (closest - c).norm() >= r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Epoch, Frame, EARTH_RADIUS_KM};
    use proptest::prelude::*;

    fn sv(x: f64, y: f64, z: f64) -> StateVector<f64> {
        StateVector::unchecked(Vec3::new(x, y, z), Vec3::zero(), Frame::EarthCenteredInertial, Epoch::at(0.0))
    }

    fn earth() -> Occluder<f64> {
        Occluder {
            center: sv(0.0, 0.0, 0.0),
            radius_km: EARTH_RADIUS_KM,
        }
    }

    fn equator_frame() -> LocalFrame<f64> {
        LocalFrame::about_body(sv(EARTH_RADIUS_KM, 0.0, 0.0), Vec3::zero(), Vec3::unit_z())
    }

    #[test]
    fn zenith_and_horizon() {
        let f = equator_frame();
        let up = aer(&f, &sv(EARTH_RADIUS_KM + 500.0, 0.0, 0.0)).unwrap();
        assert!((up.elevation_deg - 90.0).abs() < 1e-12);
        assert!((up.range_km - 500.0).abs() < 1e-9);
        let horizon = aer(&f, &sv(EARTH_RADIUS_KM, 0.0, 1000.0)).unwrap();
        assert!(horizon.elevation_deg.abs() < 1e-12);
        assert!(horizon.azimuth_deg.abs() < 1e-12); // due north
        let east = aer(&f, &sv(EARTH_RADIUS_KM, 1000.0, 0.0)).unwrap();
        assert!((east.azimuth_deg - 90.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_target_is_an_error() {
        let f = equator_frame();
        assert!(matches!(
            aer(&f, &sv(EARTH_RADIUS_KM, 0.0, 0.0)),
            Err(Error::UndefinedDirection)
        ));
    }

    #[test]
    fn diameter_blocked() {
        let a = sv(7000.0, 0.0, 0.0);
        let b = sv(-7000.0, 0.0, 0.0);
        assert!(!line_of_sight(&a, &b, &[earth()]));
    }

    #[test]
    fn co_located_points_visible() {
        let a = sv(7000.0, 1.0, 0.0);
        assert!(line_of_sight(&a, &a, &[earth()]));
    }

    #[test]
    fn surface_endpoint_not_self_occluded() {
        let gs = sv(EARTH_RADIUS_KM, 0.0, 0.0);
        let sat = sv(EARTH_RADIUS_KM + 10.0, 0.0, 5000.0);
        assert!(line_of_sight(&gs, &sat, &[earth()]));
        let below = sv(EARTH_RADIUS_KM - 50.0, 0.0, 5000.0);
        assert!(!line_of_sight(&gs, &below, &[earth()]));
    }

    #[test]
    fn grazing_segment_matches_distance_oracle() {
        // point-to-line distance of the chord y = h is simply h
        for (h, want) in [(6000.0, false), (6370.0, false), (6372.0, true), (8000.0, true)] {
            let a = sv(-50_000.0, h, 0.0);
            let b = sv(50_000.0, h, 0.0);
            assert_eq!(line_of_sight(&a, &b, &[earth()]), want, "h = {h}");
        }
    }

    proptest! {
        #[test]
        fn aer_round_trip(x in -5e4f64..5e4, y in -5e4f64..5e4, z in -5e4f64..5e4) {
            let f = LocalFrame::about_body(sv(3000.0, 4000.0, 3500.0), Vec3::zero(), Vec3::unit_z());
            let target = sv(x, y, z);
            prop_assume!((target.position - f.origin.position).norm() > 1.0);
            let look = aer(&f, &target).unwrap();
            prop_assert!((0.0..360.0).contains(&look.azimuth_deg));
            prop_assert!(look.elevation_deg.abs() <= 90.0);
            let back = f.position_from_aer(&look);
            prop_assert!((back - target.position).norm() < 1e-6);
        }

        #[test]
        fn los_symmetric(ax in -2e4f64..2e4, ay in -2e4f64..2e4, az in -2e4f64..2e4,
                         bx in -2e4f64..2e4, by in -2e4f64..2e4, bz in -2e4f64..2e4) {
            let a = sv(ax, ay, az);
            let b = sv(bx, by, bz);
            prop_assert_eq!(line_of_sight(&a, &b, &[earth()]), line_of_sight(&b, &a, &[earth()]));
        }
    }
}
