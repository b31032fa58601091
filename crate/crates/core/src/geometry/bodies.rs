use std::fmt::Debug;
use std::sync::Arc;

use chrono::{DateTime, Utc};

use super::topocentric::LocalFrame;
use super::{
    CentralBody, Epoch, Frame, GroundSite, StateVector, EARTH_ROTATION_RAD_S,
};
use crate::error::{Error, Result};
use crate::math::{lit, Mat3, Real, Vec3};

const J2000_JD: f64 = 2_451_545.0;
const UNIX_EPOCH_JD: f64 = 2_440_587.5;

fn days_since_j2000(instant: &DateTime<Utc>) -> f64 {
    let secs = instant.timestamp() as f64 + instant.timestamp_subsec_nanos() as f64 * 1e-9;
    secs / 86_400.0 + UNIX_EPOCH_JD - J2000_JD
}

/// Greenwich mean sidereal angle (radians, [0, 2π)) at `instant`, treating
/// UTC as UT1.
pub fn gmst_at(instant: &DateTime<Utc>) -> f64 {
    let d = days_since_j2000(instant);
    let deg = (280.460_618_37 + 360.985_647_366_29 * d).rem_euclid(360.0);
    deg.to_radians()
}

/// Mean ecliptic longitude of the Moon (degrees, [0, 360)) at `instant`.
pub fn moon_mean_longitude_at(instant: &DateTime<Utc>) -> f64 {
    let d = days_since_j2000(instant);
    (218.316_447_7 + 13.176_396_48 * d).rem_euclid(360.0)
}

/// Uniform Earth rotation about the inertial z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EarthRotation<T> {
    pub angle_at_start_rad: T,
    pub rate_rad_s: T,
}

impl<T: Real> EarthRotation<T> {
    pub fn new(angle_at_start_rad: T) -> Self {
        Self {
            angle_at_start_rad,
            rate_rad_s: lit(EARTH_ROTATION_RAD_S),
        }
    }

    pub fn angle(&self, epoch: &Epoch<T>) -> T {
        self.angle_at_start_rad + self.rate_rad_s * epoch.seconds_since_start
    }

    pub fn fixed_to_inertial(&self, epoch: &Epoch<T>) -> Mat3<T> {
        Mat3::rot_z(self.angle(epoch))
    }

    pub fn sidereal_day(&self) -> T {
        lit::<T>(2.0) * T::PI() / self.rate_rad_s
    }
}

/// Source of the Moon's position and orientation.
///
/// `MoonCenteredInertial` axes are fixed; `MoonFixed` rotates about the
/// inertial z axis at [`LunarEphemeris::spin_rate`].
pub trait LunarEphemeris<T: Real>: Send + Sync + Debug {
    /// Moon centre in `EarthCenteredInertial`.
    fn moon_state(&self, epoch: &Epoch<T>) -> StateVector<T>;

    /// Rotation taking `MoonCenteredInertial` components to
    /// `EarthCenteredInertial` components.
    fn inertial_axes(&self) -> Mat3<T>;

    /// Rotation taking `MoonFixed` components to `MoonCenteredInertial`.
    fn fixed_to_inertial(&self, epoch: &Epoch<T>) -> Mat3<T>;

    /// Lunar spin rate about the `MoonCenteredInertial` z axis (rad/s).
    fn spin_rate(&self) -> T;
}

/// Low-fidelity lunar ephemeris: circular orbit, tidally locked rotation
/// with the prime meridian facing Earth and the lunar equator lying in the
/// orbit plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircularLunarOrbit<T> {
    pub radius_km: T,
    pub period_s: T,
    pub inclination_deg: T,
    pub raan_deg: T,
    /// Argument of latitude at the scenario start.
    pub phase_deg: T,
}

impl<T: Real> CircularLunarOrbit<T> {
    pub const DEFAULT_RADIUS_KM: f64 = 384_400.0;
    pub const DEFAULT_PERIOD_DAYS: f64 = 27.321_661;
    pub const DEFAULT_INCLINATION_DEG: f64 = 23.44;

    pub fn with_phase(phase_deg: T) -> Self {
        Self {
            radius_km: lit(Self::DEFAULT_RADIUS_KM),
            period_s: lit(Self::DEFAULT_PERIOD_DAYS * 86_400.0),
            inclination_deg: lit(Self::DEFAULT_INCLINATION_DEG),
            raan_deg: T::zero(),
            phase_deg,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.radius_km > T::zero()) || !(self.period_s > T::zero()) {
            return Err(Error::domain("lunar_orbit", "radius and period must be positive"));
        }
        Ok(())
    }

    pub fn mean_motion(&self) -> T {
        lit::<T>(2.0) * T::PI() / self.period_s
    }

    fn argument_of_latitude(&self, epoch: &Epoch<T>) -> T {
        self.phase_deg.to_radians() + self.mean_motion() * epoch.seconds_since_start
    }
}

impl<T: Real> LunarEphemeris<T> for CircularLunarOrbit<T> {
    fn moon_state(&self, epoch: &Epoch<T>) -> StateVector<T> {
        let u = self.argument_of_latitude(epoch);
        let (s, c) = u.sin_cos();
        let r = self.radius_km;
        let v = r * self.mean_motion();
        let axes = self.inertial_axes();
        StateVector::unchecked(
            axes * Vec3::new(r * c, r * s, T::zero()),
            axes * Vec3::new(-v * s, v * c, T::zero()),
            Frame::EarthCenteredInertial,
            *epoch,
        )
    }

    fn inertial_axes(&self) -> Mat3<T> {
        Mat3::rot_z(self.raan_deg.to_radians()) * Mat3::rot_x(self.inclination_deg.to_radians())
    }

    fn fixed_to_inertial(&self, epoch: &Epoch<T>) -> Mat3<T> {
        // body x axis points from the Moon toward Earth
        Mat3::rot_z(self.argument_of_latitude(epoch) + T::PI())
    }

    fn spin_rate(&self) -> T {
        self.mean_motion()
    }
}

/// Earth rotation plus a lunar ephemeris: everything needed to place sites
/// and convert between frames.
#[derive(Debug, Clone)]
pub struct Ephemerides<T: Real> {
    pub earth: EarthRotation<T>,
    pub moon: Arc<dyn LunarEphemeris<T>>,
}

impl<T: Real> Ephemerides<T> {
    pub fn new(earth: EarthRotation<T>, moon: Arc<dyn LunarEphemeris<T>>) -> Self {
        Self { earth, moon }
    }

    /// Default models phased from the calendar start: GMST for Earth and the
    /// Moon's mean longitude for the circular lunar orbit.
    pub fn for_start(start: &DateTime<Utc>) -> Self {
        Self::new(
            EarthRotation::new(lit(gmst_at(start))),
            Arc::new(CircularLunarOrbit::with_phase(lit(moon_mean_longitude_at(start)))),
        )
    }

    pub fn moon_state(&self, epoch: &Epoch<T>) -> StateVector<T> {
        self.moon.moon_state(epoch)
    }

    /// Centre of `body` in `EarthCenteredInertial`.
    pub fn body_center(&self, body: CentralBody, epoch: &Epoch<T>) -> StateVector<T> {
        match body {
            CentralBody::Earth => StateVector::unchecked(
                Vec3::zero(),
                Vec3::zero(),
                Frame::EarthCenteredInertial,
                *epoch,
            ),
            CentralBody::Moon => self.moon_state(epoch),
        }
    }

    /// Rotation axis of `body` in `EarthCenteredInertial` components.
    pub fn body_pole(&self, body: CentralBody) -> Vec3<T> {
        match body {
            CentralBody::Earth => Vec3::unit_z(),
            CentralBody::Moon => self.moon.inertial_axes() * Vec3::unit_z(),
        }
    }

    /// Converts any supported frame into `EarthCenteredInertial`.
    pub fn to_eci(&self, state: &StateVector<T>) -> StateVector<T> {
        let epoch = state.epoch;
        match state.frame {
            Frame::EarthCenteredInertial => *state,
            Frame::EarthFixed => {
                let rot = self.earth.fixed_to_inertial(&epoch);
                let pos = rot * state.position;
                let spin = Vec3::unit_z() * self.earth.rate_rad_s;
                let vel = rot * state.velocity + spin.cross(&pos);
                StateVector::unchecked(pos, vel, Frame::EarthCenteredInertial, epoch)
            }
            Frame::MoonCenteredInertial => {
                let axes = self.moon.inertial_axes();
                let moon = self.moon_state(&epoch);
                StateVector::unchecked(
                    axes * state.position + moon.position,
                    axes * state.velocity + moon.velocity,
                    Frame::EarthCenteredInertial,
                    epoch,
                )
            }
            Frame::MoonFixed => {
                let rot = self.moon.fixed_to_inertial(&epoch);
                let pos = rot * state.position;
                let spin = Vec3::unit_z() * self.moon.spin_rate();
                let vel = rot * state.velocity + spin.cross(&pos);
                let mci = StateVector::unchecked(pos, vel, Frame::MoonCenteredInertial, epoch);
                self.to_eci(&mci)
            }
        }
    }

    /// Inertial (`EarthCenteredInertial`) state of a surface site, including
    /// the velocity due to body rotation.
    pub fn site_state(&self, site: &GroundSite<T>, epoch: &Epoch<T>) -> StateVector<T> {
        let fixed = StateVector::unchecked(
            site.body_fixed_position(),
            Vec3::zero(),
            site.body.fixed_frame(),
            *epoch,
        );
        self.to_eci(&fixed)
    }

    /// East-north-up frame of `site` in `EarthCenteredInertial`.
    pub fn site_frame(&self, site: &GroundSite<T>, epoch: &Epoch<T>) -> LocalFrame<T> {
        let state = self.site_state(site, epoch);
        let center = self.body_center(site.body, epoch);
        LocalFrame::about_body(state, center.position, self.body_pole(site.body))
    }

    /// Local-vertical frame of an orbiting node relative to `body`.
    pub fn orbiter_frame(&self, state: &StateVector<T>, body: CentralBody) -> LocalFrame<T> {
        let center = self.body_center(body, &state.epoch);
        LocalFrame::about_body(*state, center.position, self.body_pole(body))
    }
}
