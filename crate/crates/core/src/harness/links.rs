//! Hardware models per hop type and their evaluation on hop geometry.

use super::config::{Background, LinkParams, ScenarioConfig};
use super::network::HopGeometry;
use crate::error::{Error, Result};
use crate::geometry::CentralBody;
use crate::link_budget::{AntennaSpec, AtmosphereModel, LinkBudget, LinkGeometry, RfChain, Terminal};
use crate::math::from_db;
use crate::noise_model::{
    body_solid_angle, fill_factor, sky_noise, NoiseBudget, ReceiverThermalSpec, BOLTZMANN_J_K,
};
use crate::outage::HopKind;

/// Everything needed to turn a hop geometry into a mean SNR.
#[derive(Debug, Clone)]
pub struct HopModel {
    pub kind: HopKind,
    pub budget: LinkBudget<f64>,
    pub thermal: ReceiverThermalSpec<f64>,
    pub bandwidth_mhz: f64,
    pub background: Background,
    /// Physical atmosphere temperature for Earth receivers.
    pub atmosphere_temp_k: Option<f64>,
    pub t_cmb_k: f64,
    pub geo_background_k: f64,
    pub earth_brightness_k: f64,
    pub k_factor_db: f64,
    pub transmit_power_w: f64,
    pub gamma_th_db: f64,
    pub tx_pointing_error_deg: f64,
    pub rx_pointing_error_deg: f64,
}

/// Budget terms of one hop that do not depend on lunar brightness.
///
/// The mean SNR at brightness `T_B` is
/// `received_power_w / (k B (t_op_base_k + brightness_coeff · T_B))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopLink {
    pub received_power_w: f64,
    pub t_op_base_k: f64,
    pub brightness_coeff: f64,
    pub bandwidth_hz: f64,
}

impl HopLink {
    pub fn t_op(&self, t_b_k: f64) -> f64 {
        self.t_op_base_k + self.brightness_coeff * t_b_k
    }

    pub fn noise_power_w(&self, t_b_k: f64) -> f64 {
        BOLTZMANN_J_K * self.t_op(t_b_k) * self.bandwidth_hz
    }

    pub fn mean_snr(&self, t_b_k: f64) -> f64 {
        self.received_power_w / self.noise_power_w(t_b_k)
    }
}

impl HopModel {
    pub fn new(kind: HopKind, p: &LinkParams, config: &ScenarioConfig) -> Result<Self> {
        let path = format!("links.{}", kind.label());
        let atm = &config.atmosphere;
        let atmosphere = if atm.enabled {
            AtmosphereModel {
                zenith_oxygen_db: atm.zenith_oxygen_db,
                zenith_water_vapour_db: atm.zenith_water_vapour_db,
                enabled: true,
            }
        } else {
            AtmosphereModel::disabled()
        };
        let chain = |power| RfChain {
            transmit_power_w: power,
            line_loss_db: 0.0,
            carrier_frequency_ghz: p.frequency_ghz,
            bandwidth_mhz: p.bandwidth_mhz,
        };
        let tx = Terminal {
            chain: RfChain {
                line_loss_db: p.tx_line_loss_db,
                ..chain(p.tx_power_w)
            },
            antenna: AntennaSpec::new(p.tx_diameter_m, p.tx_radiation_efficiency)
                .map_err(|e| Error::config(format!("{path}.tx_diameter_m"), e.to_string()))?,
        };
        let rx = Terminal {
            chain: RfChain {
                line_loss_db: p.rx_line_loss_db,
                ..chain(0.0)
            },
            antenna: AntennaSpec::new(p.rx_diameter_m, p.rx_radiation_efficiency)
                .map_err(|e| Error::config(format!("{path}.rx_diameter_m"), e.to_string()))?,
        };
        let budget = LinkBudget::new(&tx, &rx, atmosphere).map_err(|e| Error::config(path.clone(), e.to_string()))?;
        let thermal = ReceiverThermalSpec {
            receiver_noise_temp_k: p.rx_noise_temp_k,
            antenna_physical_temp_k: p.rx_antenna_physical_temp_k,
            line_physical_temp_k: p.rx_line_physical_temp_k,
            line_thermal_efficiency: p.rx_line_thermal_efficiency,
            radiation_efficiency: p.rx_radiation_efficiency,
        };
        thermal.validate().map_err(|e| Error::config(path.clone(), e.to_string()))?;
        Ok(Self {
            kind,
            budget,
            thermal,
            bandwidth_mhz: p.bandwidth_mhz,
            background: p.rx_background.unwrap_or_else(|| Background::default_for(kind)),
            atmosphere_temp_k: p.rx_atmosphere_temp_k,
            t_cmb_k: config.scenario.t_cmb_k,
            geo_background_k: config.scenario.geo_background_k,
            earth_brightness_k: config.scenario.earth_brightness_k,
            k_factor_db: p.k_factor_db,
            transmit_power_w: p.tx_power_w,
            gamma_th_db: p.gamma_th_db.unwrap_or(config.scenario.gamma_th_db),
            tx_pointing_error_deg: p.tx_pointing_error_deg,
            rx_pointing_error_deg: p.rx_pointing_error_deg,
        })
    }

    pub fn gamma_th_linear(&self) -> f64 {
        from_db(self.gamma_th_db)
    }

    pub fn link_geometry(&self, range_km: f64, earth_elevation_deg: Option<f64>) -> LinkGeometry<f64> {
        LinkGeometry {
            distance_km: range_km,
            tx_offboresight_deg: self.tx_pointing_error_deg,
            rx_offboresight_deg: self.rx_pointing_error_deg,
            // atmosphere applies only where a receiving config carries one
            earth_elevation_deg: self.atmosphere_temp_k.and(earth_elevation_deg),
        }
    }

    /// Sky temperature at the receiver: atmospheric emission plus the
    /// attenuated cosmic background under an atmosphere, the cosmic
    /// background alone in space.
    pub fn sky_temperature(&self, geom: &LinkGeometry<f64>) -> Result<f64> {
        match self.atmosphere_temp_k {
            Some(t_atmp) => sky_noise(t_atmp, self.t_cmb_k, self.budget.atmospheric_loss(geom)?),
            None => Ok(self.t_cmb_k),
        }
    }

    /// Constant and brightness-proportional parts of the external noise.
    fn external_terms(&self, hop: &HopGeometry) -> Result<(f64, f64)> {
        let omega_a = self.budget.rx_antenna.beam_solid_angle_sr;
        Ok(match self.background {
            Background::None => (0.0, 0.0),
            Background::GeoBackground => (self.geo_background_k, 0.0),
            Background::Moon => {
                let fill = fill_factor(body_solid_angle(hop.rx_to_moon_km, CentralBody::Moon.radius())?, omega_a);
                (0.0, 0.5 * fill)
            }
            Background::Earth => {
                let fill = fill_factor(body_solid_angle(hop.rx_to_earth_km, CentralBody::Earth.radius())?, omega_a);
                (fill * self.earth_brightness_k, 0.0)
            }
        })
    }

    pub fn evaluate(&self, hop: &HopGeometry) -> Result<HopLink> {
        let geom = self.link_geometry(hop.range_km, hop.earth_elevation_deg);
        let received_power_w = self.budget.received_power(&geom)?;
        let t_sky = self.sky_temperature(&geom)?;
        let (ext_const, coeff) = self.external_terms(hop)?;
        let base = NoiseBudget::assemble(&self.thermal, t_sky, ext_const, self.bandwidth_mhz)?;
        Ok(HopLink {
            received_power_w,
            t_op_base_k: base.t_op,
            brightness_coeff: coeff,
            bandwidth_hz: self.bandwidth_mhz * 1e6,
        })
    }

    /// Full noise budget at brightness `t_b_k`.
    pub fn noise_budget(&self, hop: &HopGeometry, t_b_k: f64) -> Result<NoiseBudget<f64>> {
        let geom = self.link_geometry(hop.range_km, hop.earth_elevation_deg);
        let (ext_const, coeff) = self.external_terms(hop)?;
        NoiseBudget::assemble(&self.thermal, self.sky_temperature(&geom)?, ext_const + coeff * t_b_k, self.bandwidth_mhz)
    }
}

/// One model per hop type, indexed in [`HopKind::ALL`] order.
#[derive(Debug, Clone)]
pub struct LinkModels {
    models: Vec<HopModel>,
}

impl LinkModels {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        let models = HopKind::ALL
            .iter()
            .map(|&k| HopModel::new(k, config.links.get(k), config))
            .collect::<Result<_>>()?;
        Ok(Self { models })
    }

    pub fn get(&self, kind: HopKind) -> &HopModel {
        let i = HopKind::ALL.iter().position(|&k| k == kind).expect("all kinds present");
        &self.models[i]
    }
}
