//! Operational noise temperature and thermal noise power.
//!
//! `T_OP = T_SKY + ΔT_A,ext + T_A,int + T_TL/η_o + T_R/(η_o η_TL)`, all
//! referred to the antenna aperture.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::math::{lit, Real};

/// Boltzmann constant (J/K).
pub const BOLTZMANN_J_K: f64 = 1.380_649e-23;
/// Cosmic microwave background temperature (K).
pub const T_CMB_K: f64 = 2.725;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReceiverThermalSpec<T> {
    pub receiver_noise_temp_k: T,
    pub antenna_physical_temp_k: T,
    pub line_physical_temp_k: T,
    pub line_thermal_efficiency: T,
    pub radiation_efficiency: T,
}

impl<T: Real> ReceiverThermalSpec<T> {
    pub fn validate(&self) -> Result<()> {
        let temps = [
            self.receiver_noise_temp_k,
            self.antenna_physical_temp_k,
            self.line_physical_temp_k,
        ];
        if temps.iter().any(|t| !(*t >= T::zero())) {
            return Err(Error::domain("receiver_thermal", "temperatures must be >= 0 K"));
        }
        check_efficiency("receiver_thermal", self.line_thermal_efficiency)?;
        check_efficiency("receiver_thermal", self.radiation_efficiency)
    }
}

fn check_efficiency<T: Real>(op: &'static str, eta: T) -> Result<()> {
    if eta > T::zero() && eta <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("efficiency {eta} outside (0, 1]")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BrightBodyKind {
    Moon,
    Earth,
    GeoBackground,
}

/// A radiating body in (or filling) the receive beam.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightBody<T> {
    pub kind: BrightBodyKind,
    pub brightness_temp_k: T,
    /// Absent for the GEO background, which always fills the beam.
    pub radius_km: Option<T>,
    pub distance_km: T,
}

/// Sky temperature behind an atmosphere with loss factor `l_atm` (≥ 1).
pub fn sky_noise<T: Real>(t_atmp: T, t_cmb: T, l_atm: T) -> Result<T> {
    if !(l_atm >= T::one()) {
        return Err(Error::domain("sky_noise", format!("atmospheric loss {l_atm} < 1")));
    }
    let inv = T::one() / l_atm;
    Ok(t_atmp * (T::one() - inv) + t_cmb * inv)
}

/// Solid angle subtended by a sphere of radius `radius_km` at
/// `distance_km` from its centre.
pub fn body_solid_angle<T: Real>(distance_km: T, radius_km: T) -> Result<T> {
    if !(radius_km > T::zero()) || !(distance_km >= radius_km) {
        return Err(Error::domain(
            "body_solid_angle",
            format!("need distance >= radius > 0, got d = {distance_km}, r = {radius_km}"),
        ));
    }
    let x = (radius_km / distance_km).powi(2);
    // 1 - sqrt(1 - x) without cancellation
    let frac = x / (T::one() + (T::one() - x).sqrt());
    Ok(lit::<T>(2.0) * T::PI() * frac)
}

/// Fraction of the beam filled by a body: `min(1, Ω_B / Ω_A)`.
pub fn fill_factor<T: Real>(omega_b: T, omega_a: T) -> T {
    (omega_b / omega_a).min(T::one())
}

/// Antenna temperature increase from a bright body in the beam.
///
/// The body fills the beam when `Ω_B ≥ Ω_A`; below that the contribution
/// is scaled by `Ω_B / Ω_A`. Lunar brightness is halved for random
/// polarisation. The GEO background always fills the beam.
pub fn external_brightness_noise<T: Real>(body: &BrightBody<T>, omega_a: T) -> Result<T> {
    if !(omega_a > T::zero()) {
        return Err(Error::domain("external_brightness_noise", "beam solid angle must be > 0"));
    }
    if !(body.brightness_temp_k >= T::zero()) {
        return Err(Error::domain("external_brightness_noise", "brightness temperature must be >= 0"));
    }
    let fill = match body.kind {
        BrightBodyKind::GeoBackground => T::one(),
        BrightBodyKind::Moon | BrightBodyKind::Earth => {
            let r = body.radius_km.ok_or_else(|| {
                Error::domain("external_brightness_noise", "bright body needs a radius")
            })?;
            fill_factor(body_solid_angle(body.distance_km, r)?, omega_a)
        }
    };
    let polarisation = match body.kind {
        BrightBodyKind::Moon => lit(0.5),
        _ => T::one(),
    };
    Ok(polarisation * fill * body.brightness_temp_k)
}

/// `T_AP (1/η_o − 1)`.
pub fn internal_antenna_noise<T: Real>(t_ap: T, eta_o: T) -> Result<T> {
    check_efficiency("internal_antenna_noise", eta_o)?;
    Ok(t_ap * (T::one() / eta_o - T::one()))
}

/// `T_TLP (1/η_TL − 1)`.
pub fn transmission_line_noise<T: Real>(t_tlp: T, eta_tl: T) -> Result<T> {
    check_efficiency("transmission_line_noise", eta_tl)?;
    Ok(t_tlp * (T::one() / eta_tl - T::one()))
}

/// Individual temperatures before aperture referral.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct NoiseContributions<T> {
    pub t_sky: T,
    pub delta_t_ext: T,
    pub t_int: T,
    pub t_tl: T,
    pub t_receiver: T,
}

/// Aperture-referred operational temperature.
pub fn operational_temperature<T: Real>(parts: &NoiseContributions<T>, eta_o: T, eta_tl: T) -> Result<T> {
    check_efficiency("operational_temperature", eta_o)?;
    check_efficiency("operational_temperature", eta_tl)?;
    Ok(parts.t_sky
        + parts.delta_t_ext
        + parts.t_int
        + parts.t_tl / eta_o
        + parts.t_receiver / (eta_o * eta_tl))
}

/// `k T B` in watts for a bandwidth in MHz.
pub fn noise_power<T: Real>(t_op: T, bandwidth_mhz: T) -> Result<T> {
    if !(t_op >= T::zero()) || !(bandwidth_mhz > T::zero()) {
        return Err(Error::domain("noise_power", "need T_OP >= 0 and B > 0"));
    }
    Ok(lit::<T>(BOLTZMANN_J_K) * t_op * bandwidth_mhz * lit(1e6))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseBudget<T> {
    pub t_sky: T,
    pub delta_t_ext: T,
    pub t_int: T,
    pub t_tl: T,
    /// `T_R / (η_o η_TL)`.
    pub t_receiver_referred: T,
    pub t_op: T,
    pub noise_power_w: T,
}

impl<T: Real> NoiseBudget<T> {
    /// Resolves every contribution for a receiver given its sky temperature
    /// and external (bright body) increase.
    pub fn assemble(spec: &ReceiverThermalSpec<T>, t_sky: T, delta_t_ext: T, bandwidth_mhz: T) -> Result<Self> {
        spec.validate()?;
        let eta_o = spec.radiation_efficiency;
        let eta_tl = spec.line_thermal_efficiency;
        let parts = NoiseContributions {
            t_sky,
            delta_t_ext,
            t_int: internal_antenna_noise(spec.antenna_physical_temp_k, eta_o)?,
            t_tl: transmission_line_noise(spec.line_physical_temp_k, eta_tl)?,
            t_receiver: spec.receiver_noise_temp_k,
        };
        let t_op = operational_temperature(&parts, eta_o, eta_tl)?;
        Ok(Self {
            t_sky,
            delta_t_ext,
            t_int: parts.t_int,
            t_tl: parts.t_tl,
            t_receiver_referred: spec.receiver_noise_temp_k / (eta_o * eta_tl),
            t_op,
            noise_power_w: noise_power(t_op, bandwidth_mhz)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sky_noise_examples() {
        assert!((sky_noise(290.0, T_CMB_K, 1.0).unwrap() - 2.725).abs() < 1e-12);
        assert!((sky_noise(290.0, T_CMB_K, 1e300).unwrap() - 290.0).abs() < 1e-9);
        assert!((sky_noise(290.0, T_CMB_K, 2.0).unwrap() - 146.3625).abs() < 1e-12);
        assert!(sky_noise(290.0, T_CMB_K, 0.5).is_err());
    }

    #[test]
    fn body_solid_angle_examples() {
        let hemi = body_solid_angle(1737.0, 1737.0).unwrap();
        assert!((hemi - 2.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!(body_solid_angle(1e30, 1737.0).unwrap() < 1e-20);
        let moon = body_solid_angle(384_400.0_f64, 1737.0).unwrap();
        assert!((moon - 6.413e-5).abs() / 6.413e-5 < 1e-3);
        // direct evaluation of 2π(1 − sqrt((d² − r²)/d²))
        assert!((moon - 6.414_827_296_706_648e-5).abs() < 1e-15);
        assert!(body_solid_angle(1000.0, 1737.0).is_err());
    }

    fn moon(t_b: f64, d: f64) -> BrightBody<f64> {
        BrightBody {
            kind: BrightBodyKind::Moon,
            brightness_temp_k: t_b,
            radius_km: Some(1737.0),
            distance_km: d,
        }
    }

    #[test]
    fn external_noise_examples() {
        // beam far smaller than the Moon from 2000 km
        assert_eq!(external_brightness_noise(&moon(400.0, 2000.0), 1e-6).unwrap(), 200.0);
        let earth = BrightBody {
            kind: BrightBodyKind::Earth,
            brightness_temp_k: 290.0,
            radius_km: Some(6371.0),
            distance_km: 7000.0,
        };
        assert_eq!(external_brightness_noise(&earth, 1e-6).unwrap(), 290.0);
        // Ω_B = 0.1 Ω_A
        let d = 384_400.0;
        let omega_b = body_solid_angle(d, 1737.0).unwrap();
        let got = external_brightness_noise(&moon(300.0, d), omega_b * 10.0).unwrap();
        assert!((got - 15.0).abs() < 1e-9);
        let geo = BrightBody {
            kind: BrightBodyKind::GeoBackground,
            brightness_temp_k: 150.0,
            radius_km: None,
            distance_km: 40_000.0,
        };
        assert_eq!(external_brightness_noise(&geo, 1e-7).unwrap(), 150.0);
    }

    #[test]
    fn zero_brightness_is_clean_baseline() {
        assert_eq!(external_brightness_noise(&moon(0.0, 384_400.0), 1e-7).unwrap(), 0.0);
    }

    #[test]
    fn regime_switch_is_continuous() {
        let d = 384_400.0;
        let omega_b = body_solid_angle(d, 1737.0).unwrap();
        let below = external_brightness_noise(&moon(300.0, d), omega_b * (1.0 + 1e-9)).unwrap();
        let above = external_brightness_noise(&moon(300.0, d), omega_b * (1.0 - 1e-9)).unwrap();
        assert!((below - above).abs() < 1e-6);
    }

    #[test]
    fn internal_and_line_examples() {
        assert_eq!(internal_antenna_noise(290.0, 1.0).unwrap(), 0.0);
        assert!((internal_antenna_noise(290.0_f64, 0.95).unwrap() - 15.26).abs() < 0.005);
        assert!((internal_antenna_noise(250.0_f64, 0.90).unwrap() - 27.78).abs() < 0.005);
        assert_eq!(transmission_line_noise(290.0, 1.0).unwrap(), 0.0);
        assert!((transmission_line_noise(290.0_f64, 0.95).unwrap() - 15.26).abs() < 0.005);
        assert!((transmission_line_noise(270.0_f64, 0.95).unwrap() - 14.21).abs() < 0.005);
        assert!(internal_antenna_noise(290.0, 0.0).is_err());
    }

    #[test]
    fn operational_temperature_examples() {
        let only_rx = NoiseContributions::<f64> {
            t_receiver: 50.0,
            ..Default::default()
        };
        assert_eq!(operational_temperature(&only_rx, 1.0, 1.0).unwrap(), 50.0);
        let referred = operational_temperature(&only_rx, 0.95, 0.95).unwrap();
        assert!((referred - 55.40).abs() < 0.005);
    }

    #[test]
    fn noise_power_examples() {
        let n = noise_power(290.0_f64, 50.0).unwrap();
        assert!((n - 2.002e-13).abs() / 2.002e-13 < 1e-3);
        assert!((10.0 * n.log10() + 126.99).abs() < 0.01);
        assert_eq!(noise_power(0.0, 50.0).unwrap(), 0.0);
        assert!((noise_power(290.0, 100.0).unwrap() / n - 2.0).abs() < 1e-15);
    }

    #[test]
    fn budget_parts_sum_to_top() {
        let spec = ReceiverThermalSpec::<f64> {
            receiver_noise_temp_k: 50.0,
            antenna_physical_temp_k: 290.0,
            line_physical_temp_k: 290.0,
            line_thermal_efficiency: 0.95,
            radiation_efficiency: 0.95,
        };
        let b = NoiseBudget::assemble(&spec, 30.0, 100.0, 50.0).unwrap();
        let sum = b.t_sky + b.delta_t_ext + b.t_int + b.t_tl / 0.95 + b.t_receiver_referred;
        assert!((b.t_op - sum).abs() < 1e-9);
        assert!((b.noise_power_w - BOLTZMANN_J_K * b.t_op * 50e6).abs() < 1e-27);
    }

    proptest! {
        #[test]
        fn top_monotone(ts in 0.0f64..300.0, dt in 0.0f64..400.0, tr in 0.0f64..200.0,
                        eta_o in 0.5f64..1.0, eta_tl in 0.5f64..1.0, bump in 0.0f64..50.0,
                        deta in 0.0f64..0.05) {
            let parts = NoiseContributions { t_sky: ts, delta_t_ext: dt, t_int: 10.0, t_tl: 12.0, t_receiver: tr };
            let base = operational_temperature(&parts, eta_o, eta_tl).unwrap();
            let warmer = NoiseContributions { t_receiver: tr + bump, delta_t_ext: dt + bump, ..parts };
            prop_assert!(operational_temperature(&warmer, eta_o, eta_tl).unwrap() >= base);
            let better = operational_temperature(&parts, (eta_o + deta).min(1.0), (eta_tl + deta).min(1.0)).unwrap();
            prop_assert!(better <= base + 1e-9);
        }

        #[test]
        fn noise_power_linear(t in 0.0f64..1e4, b in 0.1f64..1e3, s in 0.1f64..10.0) {
            let n = noise_power(t, b).unwrap();
            let scaled = noise_power(t * s, b).unwrap();
            prop_assert!((scaled - n * s).abs() <= 1e-12 * scaled.abs().max(1e-30));
            let wide = noise_power(t, b * s).unwrap();
            prop_assert!((wide - n * s).abs() <= 1e-12 * wide.abs().max(1e-30));
        }
    }
}
