//! Received signal power: transmit power, aperture antenna gains, free-space
//! path loss, equipment losses and slant-path gaseous attenuation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{bessel_j1, from_db, integrate_panels, lit, to_db, Real};

/// Speed of light in vacuum (m/s).
pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Carrier wavelength in metres for a frequency in GHz.
pub fn wavelength<T: Real>(frequency_ghz: T) -> Result<T> {
    if !(frequency_ghz > T::zero()) {
        return Err(Error::domain("wavelength", format!("frequency {frequency_ghz} GHz must be > 0")));
    }
    Ok(lit::<T>(SPEED_OF_LIGHT_M_S) / (frequency_ghz * lit(1e9)))
}

/// Free-space path loss `(4πd/λ)²` as a linear ratio.
pub fn free_space_path_loss<T: Real>(distance_km: T, wavelength_m: T) -> Result<T> {
    if !(distance_km > T::zero()) || !(wavelength_m > T::zero()) {
        return Err(Error::domain(
            "free_space_path_loss",
            "distance and wavelength must be positive",
        ));
    }
    let ratio = lit::<T>(4.0) * T::PI() * distance_km * lit(1e3) / wavelength_m;
    Ok(ratio * ratio)
}

/// Free-space path loss in dB.
pub fn free_space_path_loss_db<T: Real>(distance_km: T, wavelength_m: T) -> Result<T> {
    if !(distance_km > T::zero()) || !(wavelength_m > T::zero()) {
        return Err(Error::domain(
            "free_space_path_loss",
            "distance and wavelength must be positive",
        ));
    }
    let ratio = lit::<T>(4.0) * T::PI() * distance_km * lit(1e3) / wavelength_m;
    Ok(lit::<T>(20.0) * ratio.log10())
}

/// Normalised (peak = 1) power pattern, azimuthally symmetric.
pub trait RadiationPattern<T: Real> {
    fn normalized_power(&self, theta_rad: T) -> T;

    /// Sorted split points over [0, π] that isolate the pattern's lobes.
    fn breakpoints(&self) -> Vec<T> {
        vec![T::zero(), T::PI()]
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Isotropic;

impl<T: Real> RadiationPattern<T> for Isotropic {
    fn normalized_power(&self, _theta_rad: T) -> T {
        T::one()
    }
}

/// Uniformly illuminated circular aperture: `[2 J1(x) / x]²` with
/// `x = π (D/λ) sin θ` over the forward hemisphere and no radiation behind
/// the aperture plane.
#[derive(Debug, Clone, Copy)]
pub struct AiryPattern<T> {
    pub aperture_ratio: T,
}

impl<T: Real> AiryPattern<T> {
    fn argument(&self, theta_rad: T) -> T {
        T::PI() * self.aperture_ratio * theta_rad.sin()
    }
}

impl<T: Real> RadiationPattern<T> for AiryPattern<T> {
    fn normalized_power(&self, theta_rad: T) -> T {
        if theta_rad > T::FRAC_PI_2() {
            return T::zero();
        }
        let x = self.argument(theta_rad);
        if x.abs() < lit(1e-8) {
            return T::one();
        }
        let v = lit::<T>(2.0) * bessel_j1(x) / x;
        v * v
    }

    fn breakpoints(&self) -> Vec<T> {
        // one panel per half-period of J1 in x = u sin θ
        let u = T::PI() * self.aperture_ratio;
        let lobes = (u / T::PI()).floor().to_usize().unwrap_or(0);
        let mut pts = Vec::with_capacity(lobes + 3);
        pts.push(T::zero());
        for k in 1..=lobes {
            let s = lit::<T>(k as f64) * T::PI() / u;
            if s < T::one() {
                pts.push(s.asin());
            }
        }
        pts.push(T::FRAC_PI_2());
        pts.push(T::PI());
        pts.dedup();
        pts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaSpec<T> {
    pub diameter_m: T,
    pub radiation_efficiency: T,
}

impl<T: Real> AntennaSpec<T> {
    pub fn new(diameter_m: T, radiation_efficiency: T) -> Result<Self> {
        let a = Self {
            diameter_m,
            radiation_efficiency,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.diameter_m > T::zero()) {
            return Err(Error::domain("antenna", "diameter must be > 0"));
        }
        if !(self.radiation_efficiency > T::zero() && self.radiation_efficiency <= T::one()) {
            return Err(Error::domain("antenna", "radiation efficiency must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn pattern(&self, wavelength_m: T) -> AiryPattern<T> {
        AiryPattern {
            aperture_ratio: self.diameter_m / wavelength_m,
        }
    }
}

/// Beam solid angle `∫∫ P̄ dΩ` of an arbitrary symmetric pattern.
pub fn pattern_solid_angle<T: Real, P: RadiationPattern<T>>(pattern: &P) -> Result<T> {
    let pts = pattern.breakpoints();
    let max_segments = pts.len() * 8 + 10_000;
    let q = integrate_panels(
        |theta: T| pattern.normalized_power(theta) * theta.sin(),
        &pts,
        lit(1e-30),
        crate::math::tolerance(1e-9),
        max_segments,
    )?;
    Ok(lit::<T>(2.0) * T::PI() * q.value)
}

/// Beam solid angle of a circular aperture at the given wavelength.
pub fn beam_solid_angle<T: Real>(antenna: &AntennaSpec<T>, wavelength_m: T) -> Result<T> {
    antenna.validate()?;
    if !(antenna.diameter_m / wavelength_m > T::one()) {
        return Err(Error::domain(
            "beam_solid_angle",
            "aperture must be larger than one wavelength",
        ));
    }
    pattern_solid_angle(&antenna.pattern(wavelength_m))
}

/// Antenna with its beam integral evaluated once for a fixed wavelength.
#[derive(Debug, Clone, Copy)]
pub struct ResolvedAntenna<T> {
    pub spec: AntennaSpec<T>,
    pub wavelength_m: T,
    pub beam_solid_angle_sr: T,
}

impl<T: Real> ResolvedAntenna<T> {
    pub fn new(spec: AntennaSpec<T>, wavelength_m: T) -> Result<Self> {
        let omega = beam_solid_angle(&spec, wavelength_m)?;
        Ok(Self {
            spec,
            wavelength_m,
            beam_solid_angle_sr: omega,
        })
    }

    /// Peak directivity `4π / Ω_A`.
    pub fn peak_directivity(&self) -> T {
        lit::<T>(4.0) * T::PI() / self.beam_solid_angle_sr
    }

    /// Power gain `η_o · D₀ · P̄(θ)`.
    pub fn gain(&self, offboresight_deg: T) -> Result<T> {
        check_offboresight(offboresight_deg)?;
        let p = self
            .spec
            .pattern(self.wavelength_m)
            .normalized_power(offboresight_deg.to_radians());
        Ok(self.spec.radiation_efficiency * self.peak_directivity() * p)
    }
}

fn check_offboresight<T: Real>(deg: T) -> Result<()> {
    if !(deg >= T::zero() && deg <= lit(180.0)) {
        return Err(Error::domain(
            "antenna_gain",
            format!("off-boresight angle {deg} outside [0, 180] deg"),
        ));
    }
    Ok(())
}

/// Power gain of `antenna` at `offboresight_deg` from its boresight.
pub fn antenna_gain<T: Real>(antenna: &AntennaSpec<T>, wavelength_m: T, offboresight_deg: T) -> Result<T> {
    check_offboresight(offboresight_deg)?;
    ResolvedAntenna::new(*antenna, wavelength_m)?.gain(offboresight_deg)
}

/// Zenith gaseous attenuation, scaled by the cosecant of the elevation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtmosphereModel<T> {
    /// Oxygen (dry air) zenith attenuation, dB.
    pub zenith_oxygen_db: T,
    /// Water vapour zenith attenuation, dB.
    pub zenith_water_vapour_db: T,
    pub enabled: bool,
}

impl<T: Real> AtmosphereModel<T> {
    pub fn disabled() -> Self {
        Self {
            zenith_oxygen_db: T::zero(),
            zenith_water_vapour_db: T::zero(),
            enabled: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.zenith_oxygen_db >= T::zero()) || !(self.zenith_water_vapour_db >= T::zero()) {
            return Err(Error::domain("atmosphere", "zenith attenuations must be >= 0"));
        }
        Ok(())
    }

    pub fn zenith_total_db(&self) -> T {
        self.zenith_oxygen_db + self.zenith_water_vapour_db
    }
}

/// Slant-path gaseous attenuation in dB at `earth_elevation_deg`.
pub fn gaseous_attenuation<T: Real>(model: &AtmosphereModel<T>, earth_elevation_deg: T) -> Result<T> {
    if !model.enabled {
        return Ok(T::zero());
    }
    model.validate()?;
    if !(earth_elevation_deg > T::zero()) {
        return Err(Error::BelowHorizon {
            elevation_deg: crate::math::to_f64(earth_elevation_deg),
        });
    }
    let el = earth_elevation_deg.min(lit(90.0));
    Ok(model.zenith_total_db() / el.to_radians().sin())
}

/// Transmit or receive RF chain parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RfChain<T> {
    /// Transmit power in watts; zero on receive-only ends.
    pub transmit_power_w: T,
    pub line_loss_db: T,
    pub carrier_frequency_ghz: T,
    pub bandwidth_mhz: T,
}

impl<T: Real> RfChain<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.transmit_power_w >= T::zero()) {
            return Err(Error::domain("rf_chain", "transmit power must be >= 0"));
        }
        if !(self.line_loss_db >= T::zero()) {
            return Err(Error::domain("rf_chain", "line loss must be >= 0 dB"));
        }
        if !(self.carrier_frequency_ghz > T::zero()) || !(self.bandwidth_mhz > T::zero()) {
            return Err(Error::domain("rf_chain", "frequency and bandwidth must be > 0"));
        }
        Ok(())
    }
}

/// One end of a hop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Terminal<T> {
    pub chain: RfChain<T>,
    pub antenna: AntennaSpec<T>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkGeometry<T> {
    pub distance_km: T,
    pub tx_offboresight_deg: T,
    pub rx_offboresight_deg: T,
    /// Elevation of the transmitter seen from an Earth ground receiver;
    /// `None` when the receiver is not under an atmosphere.
    pub earth_elevation_deg: Option<T>,
}

impl<T: Real> LinkGeometry<T> {
    /// Perfectly pointed link at `distance_km`.
    pub fn boresight(distance_km: T, earth_elevation_deg: Option<T>) -> Self {
        Self {
            distance_km,
            tx_offboresight_deg: T::zero(),
            rx_offboresight_deg: T::zero(),
            earth_elevation_deg,
        }
    }
}

/// Every term of a link budget in decibel form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetLedger<T> {
    pub transmit_power_dbw: T,
    pub tx_gain_dbi: T,
    pub rx_gain_dbi: T,
    pub path_loss_db: T,
    pub tx_line_loss_db: T,
    pub atmospheric_loss_db: T,
    pub rx_line_loss_db: T,
    pub received_power_dbw: T,
}

/// A transmitter/receiver pair with both beam integrals precomputed.
#[derive(Debug, Clone, Copy)]
pub struct LinkBudget<T> {
    pub tx_chain: RfChain<T>,
    pub rx_chain: RfChain<T>,
    pub tx_antenna: ResolvedAntenna<T>,
    pub rx_antenna: ResolvedAntenna<T>,
    pub atmosphere: AtmosphereModel<T>,
    pub wavelength_m: T,
}

impl<T: Real> LinkBudget<T> {
    pub fn new(tx: &Terminal<T>, rx: &Terminal<T>, atmosphere: AtmosphereModel<T>) -> Result<Self> {
        tx.chain.validate()?;
        rx.chain.validate()?;
        atmosphere.validate()?;
        let lambda = wavelength(tx.chain.carrier_frequency_ghz)?;
        Ok(Self {
            tx_chain: tx.chain,
            rx_chain: rx.chain,
            tx_antenna: ResolvedAntenna::new(tx.antenna, lambda)?,
            rx_antenna: ResolvedAntenna::new(rx.antenna, lambda)?,
            atmosphere,
            wavelength_m: lambda,
        })
    }

    /// Linear atmospheric loss factor for the given geometry (≥ 1).
    pub fn atmospheric_loss(&self, geom: &LinkGeometry<T>) -> Result<T> {
        match geom.earth_elevation_deg {
            Some(el) => Ok(from_db(gaseous_attenuation(&self.atmosphere, el)?)),
            None => Ok(T::one()),
        }
    }

    /// Received power in watts.
    pub fn received_power(&self, geom: &LinkGeometry<T>) -> Result<T> {
        self.received_power_with_tx(geom, self.tx_chain.transmit_power_w)
    }

    /// Received power for an overridden transmit power.
    pub fn received_power_with_tx(&self, geom: &LinkGeometry<T>, transmit_power_w: T) -> Result<T> {
        let g_t = self.tx_antenna.gain(geom.tx_offboresight_deg)?;
        let g_r = self.rx_antenna.gain(geom.rx_offboresight_deg)?;
        let path = free_space_path_loss(geom.distance_km, self.wavelength_m)?;
        let l_t = from_db(self.tx_chain.line_loss_db);
        let l_r = from_db(self.rx_chain.line_loss_db);
        let l_atm = self.atmospheric_loss(geom)?;
        Ok(transmit_power_w * g_t * g_r / (path * l_t * l_atm * l_r))
    }

    /// The same budget summed in decibels.
    pub fn ledger(&self, geom: &LinkGeometry<T>) -> Result<BudgetLedger<T>> {
        let p_t = to_db(self.tx_chain.transmit_power_w);
        let g_t = to_db(self.tx_antenna.gain(geom.tx_offboresight_deg)?);
        let g_r = to_db(self.rx_antenna.gain(geom.rx_offboresight_deg)?);
        let path = free_space_path_loss_db(geom.distance_km, self.wavelength_m)?;
        let l_atm = match geom.earth_elevation_deg {
            Some(el) => gaseous_attenuation(&self.atmosphere, el)?,
            None => T::zero(),
        };
        let l_t = self.tx_chain.line_loss_db;
        let l_r = self.rx_chain.line_loss_db;
        Ok(BudgetLedger {
            transmit_power_dbw: p_t,
            tx_gain_dbi: g_t,
            rx_gain_dbi: g_r,
            path_loss_db: path,
            tx_line_loss_db: l_t,
            atmospheric_loss_db: l_atm,
            rx_line_loss_db: l_r,
            received_power_dbw: p_t + g_t + g_r - path - l_t - l_atm - l_r,
        })
    }
}

/// One-shot received power; prefer [`LinkBudget`] when evaluating many
/// geometries for the same hardware.
pub fn received_power<T: Real>(
    tx: &Terminal<T>,
    rx: &Terminal<T>,
    geom: &LinkGeometry<T>,
    atmosphere: &AtmosphereModel<T>,
) -> Result<T> {
    LinkBudget::new(tx, rx, *atmosphere)?.received_power(geom)
}
