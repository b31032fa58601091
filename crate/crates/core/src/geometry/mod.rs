//! Node positions and visibility.
//!
//! Everything is expressed in kilometres, seconds and degrees at the public
//! surface. Two spherical bodies are modelled (Earth r = 6371 km, Moon
//! r = 1737 km); orbits are unperturbed two-body conics.

mod bodies;
mod kepler;
mod topocentric;

use chrono::{DateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{lit, to_f64, Real, Vec3};

pub use bodies::{
    gmst_at, moon_mean_longitude_at, CircularLunarOrbit, EarthRotation, Ephemerides,
    LunarEphemeris,
};
pub use kepler::{
    angular_momentum, propagate_kepler, solve_kepler, specific_energy, MAX_KEPLER_ITERATIONS,
};
pub use topocentric::{aer, line_of_sight, LocalFrame, Occluder};

pub const EARTH_MU_KM3_S2: f64 = 398_600.441_8;
pub const MOON_MU_KM3_S2: f64 = 4_902.800;
pub const EARTH_RADIUS_KM: f64 = 6_371.0;
pub const MOON_RADIUS_KM: f64 = 1_737.0;
/// Earth sidereal rotation rate.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Frame {
    EarthCenteredInertial,
    EarthFixed,
    MoonCenteredInertial,
    MoonFixed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CentralBody {
    Earth,
    Moon,
}

impl CentralBody {
    pub fn mu<T: Real>(self) -> T {
        match self {
            CentralBody::Earth => lit(EARTH_MU_KM3_S2),
            CentralBody::Moon => lit(MOON_MU_KM3_S2),
        }
    }

    pub fn radius<T: Real>(self) -> T {
        match self {
            CentralBody::Earth => lit(EARTH_RADIUS_KM),
            CentralBody::Moon => lit(MOON_RADIUS_KM),
        }
    }

    pub fn inertial_frame(self) -> Frame {
        match self {
            CentralBody::Earth => Frame::EarthCenteredInertial,
            CentralBody::Moon => Frame::MoonCenteredInertial,
        }
    }

    pub fn fixed_frame(self) -> Frame {
        match self {
            CentralBody::Earth => Frame::EarthFixed,
            CentralBody::Moon => Frame::MoonFixed,
        }
    }
}

/// 2024-10-01T00:00:00Z, the default scenario start.
pub fn default_scenario_start() -> DateTime<Utc> {
    Utc.with_ymd_and_hms(2024, 10, 1, 0, 0, 0).unwrap()
}

/// A point on the uniform scenario clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Epoch<T> {
    pub seconds_since_start: T,
    pub scenario_start: DateTime<Utc>,
}

impl<T: Real> Epoch<T> {
    pub fn new(seconds_since_start: T, scenario_start: DateTime<Utc>) -> Result<Self> {
        if !(seconds_since_start >= T::zero()) || !seconds_since_start.is_finite() {
            return Err(Error::domain(
                "epoch",
                format!("seconds since start must be finite and >= 0, got {seconds_since_start}"),
            ));
        }
        Ok(Self {
            seconds_since_start,
            scenario_start,
        })
    }

    /// Seconds after the default scenario start.
    pub fn at(seconds_since_start: T) -> Self {
        Self::new(seconds_since_start, default_scenario_start())
            .expect("non-negative finite offset")
    }

    pub fn seconds(&self) -> T {
        self.seconds_since_start
    }

    pub fn offset(&self, dt: T) -> Result<Self> {
        Self::new(self.seconds_since_start + dt, self.scenario_start)
    }

    pub(crate) fn same_instant(&self, other: &Self) -> bool {
        self.scenario_start == other.scenario_start
            && (self.seconds_since_start - other.seconds_since_start).abs() <= lit(1e-6)
    }
}

/// Classical orbital elements at the scenario start.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KeplerElements<T> {
    pub semi_major_axis: T,
    pub eccentricity: T,
    pub inclination_deg: T,
    pub raan_deg: T,
    pub arg_periapsis_deg: T,
    pub true_anomaly_deg: T,
    pub central_body: CentralBody,
}

impl<T: Real> KeplerElements<T> {
    /// Builds validated elements with all angles normalised to [0, 360).
    pub fn new(
        semi_major_axis: T,
        eccentricity: T,
        inclination_deg: T,
        raan_deg: T,
        arg_periapsis_deg: T,
        true_anomaly_deg: T,
        central_body: CentralBody,
    ) -> Result<Self> {
        let el = Self {
            semi_major_axis,
            eccentricity,
            inclination_deg: wrap_deg(inclination_deg),
            raan_deg: wrap_deg(raan_deg),
            arg_periapsis_deg: wrap_deg(arg_periapsis_deg),
            true_anomaly_deg: wrap_deg(true_anomaly_deg),
            central_body,
        };
        el.validate()?;
        Ok(el)
    }

    /// Circular orbit shorthand.
    pub fn circular(
        semi_major_axis: T,
        inclination_deg: T,
        raan_deg: T,
        true_anomaly_deg: T,
        central_body: CentralBody,
    ) -> Result<Self> {
        Self::new(
            semi_major_axis,
            T::zero(),
            inclination_deg,
            raan_deg,
            T::zero(),
            true_anomaly_deg,
            central_body,
        )
    }

    pub fn validate(&self) -> Result<()> {
        let r = self.central_body.radius::<T>();
        if !(self.semi_major_axis > r) {
            return Err(Error::domain(
                "kepler_elements",
                format!(
                    "semi_major_axis {} km must exceed the {:?} radius {} km",
                    self.semi_major_axis, self.central_body, r
                ),
            ));
        }
        if !(self.eccentricity >= T::zero() && self.eccentricity < T::one()) {
            return Err(Error::domain(
                "kepler_elements",
                format!("eccentricity {} outside [0, 1)", self.eccentricity),
            ));
        }
        let angles = [
            self.inclination_deg,
            self.raan_deg,
            self.arg_periapsis_deg,
            self.true_anomaly_deg,
        ];
        if angles.iter().any(|a| !a.is_finite()) {
            return Err(Error::domain("kepler_elements", "non-finite angle"));
        }
        Ok(())
    }

    pub fn mean_motion(&self) -> T {
        let a = self.semi_major_axis;
        (self.central_body.mu::<T>() / (a * a * a)).sqrt()
    }

    pub fn period(&self) -> T {
        lit::<T>(2.0) * T::PI() / self.mean_motion()
    }
}

/// Angle in degrees wrapped to [0, 360).
pub fn wrap_deg<T: Real>(deg: T) -> T {
    let full = lit::<T>(360.0);
    let mut w = deg % full;
    if w < T::zero() {
        w += full;
    }
    if w >= full {
        w -= full;
    }
    w
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateVector<T> {
    pub position: Vec3<T>,
    pub velocity: Vec3<T>,
    pub frame: Frame,
    pub epoch: Epoch<T>,
}

impl<T: Real> StateVector<T> {
    pub fn new(position: Vec3<T>, velocity: Vec3<T>, frame: Frame, epoch: Epoch<T>) -> Result<Self> {
        if !position.is_finite() || !velocity.is_finite() {
            return Err(Error::domain("state_vector", "non-finite component"));
        }
        if !(position.norm() > T::zero()) {
            return Err(Error::domain("state_vector", "position must be non-zero"));
        }
        Ok(Self {
            position,
            velocity,
            frame,
            epoch,
        })
    }

    pub(crate) fn unchecked(position: Vec3<T>, velocity: Vec3<T>, frame: Frame, epoch: Epoch<T>) -> Self {
        Self {
            position,
            velocity,
            frame,
            epoch,
        }
    }

    pub fn speed(&self) -> T {
        self.velocity.norm()
    }

    pub(crate) fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.frame != other.frame {
            return Err(Error::FrameMismatch {
                left: self.frame,
                right: other.frame,
            });
        }
        if !self.epoch.same_instant(&other.epoch) {
            return Err(Error::EpochMismatch {
                left: to_f64(self.epoch.seconds_since_start),
                right: to_f64(other.epoch.seconds_since_start),
            });
        }
        Ok(())
    }
}

/// A fixed point on the surface (or at altitude above) one of the bodies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroundSite<T> {
    pub body: CentralBody,
    pub latitude_deg: T,
    pub longitude_deg: T,
    pub altitude_km: T,
}

impl<T: Real> GroundSite<T> {
    pub fn new(body: CentralBody, latitude_deg: T, longitude_deg: T, altitude_km: T) -> Result<Self> {
        let site = Self {
            body,
            latitude_deg,
            longitude_deg,
            altitude_km,
        };
        site.validate()?;
        Ok(site)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.latitude_deg.abs() <= lit(90.0)) {
            return Err(Error::domain(
                "ground_site",
                format!("latitude {} outside [-90, 90]", self.latitude_deg),
            ));
        }
        if !(self.longitude_deg > lit(-180.0) && self.longitude_deg <= lit(180.0)) {
            return Err(Error::domain(
                "ground_site",
                format!("longitude {} outside (-180, 180]", self.longitude_deg),
            ));
        }
        if !self.altitude_km.is_finite() || self.altitude_km < -self.body.radius::<T>() {
            return Err(Error::domain("ground_site", "altitude out of range"));
        }
        Ok(())
    }

    /// Position in the body-fixed frame (spherical body).
    pub fn body_fixed_position(&self) -> Vec3<T> {
        let r = self.body.radius::<T>() + self.altitude_km;
        let (slat, clat) = self.latitude_deg.to_radians().sin_cos();
        let (slon, clon) = self.longitude_deg.to_radians().sin_cos();
        Vec3::new(r * clat * clon, r * clat * slon, r * slat)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AerTriple<T> {
    pub azimuth_deg: T,
    pub elevation_deg: T,
    pub range_km: T,
}

/// Euclidean distance between two states in the same frame at the same
/// epoch.
pub fn slant_range<T: Real>(a: &StateVector<T>, b: &StateVector<T>) -> Result<T> {
    a.check_compatible(b)?;
    Ok((b.position - a.position).norm())
}
