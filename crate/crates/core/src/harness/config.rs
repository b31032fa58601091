//! Scenario configuration: TOML schema, preset merging, validation and the
//! provenance echo.
//!
//! A config file may name a `preset`; the preset is loaded first and the
//! file's own tables are merged on top (tables merge key by key, arrays and
//! scalars replace). Without a preset every required section must be given.

use std::fmt::Write as _;
use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use toml::Value;

use crate::error::{Error, Result};
use crate::geometry::{CentralBody, GroundSite, KeplerElements};
use crate::orchestrator::{LevelName, ReliabilityLevel, TwinPolicy};
use crate::outage::HopKind;

pub const PAPER_BASELINE: &str = include_str!("../../configs/paper_baseline.toml");

/// Names of the bundled presets.
pub const PRESETS: [&str; 1] = ["paper_baseline"];

pub fn preset_source(name: &str) -> Option<&'static str> {
    match name {
        "paper_baseline" => Some(PAPER_BASELINE),
        _ => None,
    }
}

const REQUIRED_SECTIONS: [&str; 7] = [
    "scenario",
    "links",
    "llo_planes",
    "geo_planes",
    "ground_stations",
    "lct",
    "twin",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioSection,
    #[serde(default)]
    pub atmosphere: AtmosphereSection,
    pub links: LinkTable,
    pub llo_planes: Vec<OrbitPlane>,
    pub geo_planes: Vec<OrbitPlane>,
    pub ground_stations: Vec<SiteConfig>,
    pub lct: SiteConfig,
    pub twin: TwinSection,
    #[serde(default)]
    pub relay: RelaySection,
    #[serde(default)]
    pub telemetry: TelemetrySection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub start: String,
    pub duration_s: f64,
    pub step_s: f64,
    pub gamma_th_db: f64,
    pub t_b_sweep_k: Vec<f64>,
    pub geo_background_k: f64,
    #[serde(default = "default_earth_brightness")]
    pub earth_brightness_k: f64,
    #[serde(default = "default_t_cmb")]
    pub t_cmb_k: f64,
    /// Added to the Moon's mean longitude at the start epoch.
    #[serde(default)]
    pub moon_phase_offset_deg: f64,
}

fn default_earth_brightness() -> f64 {
    254.0
}

fn default_t_cmb() -> f64 {
    2.725
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtmosphereSection {
    pub enabled: bool,
    pub zenith_oxygen_db: f64,
    pub zenith_water_vapour_db: f64,
}

impl Default for AtmosphereSection {
    fn default() -> Self {
        Self {
            enabled: true,
            zenith_oxygen_db: 0.2,
            zenith_water_vapour_db: 0.3,
        }
    }
}

/// What a receive antenna sees behind the transmitter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Background {
    /// Lunar surface at the swept brightness temperature.
    Moon,
    Earth,
    GeoBackground,
    None,
}

impl Background {
    pub fn default_for(kind: HopKind) -> Self {
        match kind {
            HopKind::GeoToEarth => Background::GeoBackground,
            _ => Background::Moon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkParams {
    pub frequency_ghz: f64,
    pub bandwidth_mhz: f64,
    pub tx_power_w: f64,
    pub tx_radiation_efficiency: f64,
    pub tx_diameter_m: f64,
    pub tx_line_loss_db: f64,
    pub rx_radiation_efficiency: f64,
    pub rx_diameter_m: f64,
    pub rx_line_loss_db: f64,
    pub rx_noise_temp_k: f64,
    pub rx_antenna_physical_temp_k: f64,
    pub rx_line_physical_temp_k: f64,
    pub rx_line_thermal_efficiency: f64,
    /// Physical atmosphere temperature; only meaningful for Earth receivers.
    #[serde(default)]
    pub rx_atmosphere_temp_k: Option<f64>,
    pub k_factor_db: f64,
    #[serde(default)]
    pub rx_background: Option<Background>,
    #[serde(default)]
    pub tx_pointing_error_deg: f64,
    #[serde(default)]
    pub rx_pointing_error_deg: f64,
    /// Per-hop override of the global threshold.
    #[serde(default)]
    pub gamma_th_db: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LinkTable {
    pub moon_earth: LinkParams,
    pub moon_llo: LinkParams,
    pub llo_earth: LinkParams,
    pub moon_geo: LinkParams,
    pub geo_earth: LinkParams,
    pub llo_geo: LinkParams,
}

impl LinkTable {
    pub fn get(&self, kind: HopKind) -> &LinkParams {
        match kind {
            HopKind::MoonToEarth => &self.moon_earth,
            HopKind::MoonToLlo => &self.moon_llo,
            HopKind::LloToEarth => &self.llo_earth,
            HopKind::MoonToGeo => &self.moon_geo,
            HopKind::GeoToEarth => &self.geo_earth,
            HopKind::LloToGeo => &self.llo_geo,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OrbitPlane {
    #[serde(default)]
    pub name: Option<String>,
    /// Give either the semi-major axis or the altitude above the mean radius.
    #[serde(default)]
    pub semi_major_axis_km: Option<f64>,
    #[serde(default)]
    pub altitude_km: Option<f64>,
    #[serde(default)]
    pub eccentricity: f64,
    pub inclination_deg: f64,
    pub raan_deg: f64,
    #[serde(default)]
    pub arg_periapsis_deg: f64,
    pub true_anomalies_deg: Vec<f64>,
}

impl OrbitPlane {
    pub fn semi_major_axis(&self, body: CentralBody) -> Option<f64> {
        self.semi_major_axis_km
            .or_else(|| self.altitude_km.map(|h| body.radius::<f64>() + h))
    }

    /// Elements of every satellite in the plane, in anomaly order.
    pub fn elements(&self, body: CentralBody, path: &str) -> Result<Vec<KeplerElements<f64>>> {
        let a = match (self.semi_major_axis_km, self.altitude_km) {
            (Some(_), Some(_)) => {
                return Err(Error::config(path, "give semi_major_axis_km or altitude_km, not both"))
            }
            _ => self
                .semi_major_axis(body)
                .ok_or_else(|| Error::config(path, "missing semi_major_axis_km or altitude_km"))?,
        };
        self.true_anomalies_deg
            .iter()
            .map(|&nu| {
                KeplerElements::new(
                    a,
                    self.eccentricity,
                    self.inclination_deg,
                    self.raan_deg,
                    self.arg_periapsis_deg,
                    nu,
                    body,
                )
                .map_err(|e| Error::config(format!("{path}.{}", offending_field(&e)), e.to_string()))
            })
            .collect()
    }
}

/// Orbit element named by a validation message.
fn offending_field(e: &Error) -> &'static str {
    let msg = e.to_string();
    [
        ("eccentricity", "eccentricity"),
        ("semi_major_axis", "semi_major_axis_km"),
    ]
    .into_iter()
    .find(|(needle, _)| msg.contains(needle))
    .map_or("orbit", |(_, field)| field)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteConfig {
    pub name: String,
    pub latitude_deg: f64,
    pub longitude_deg: f64,
    #[serde(default)]
    pub altitude_km: f64,
    #[serde(default)]
    pub min_elevation_deg: f64,
}

impl SiteConfig {
    pub fn site(&self, body: CentralBody, path: &str) -> Result<GroundSite<f64>> {
        GroundSite::new(body, self.latitude_deg, self.longitude_deg, self.altitude_km)
            .map_err(|e| Error::config(path, e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LevelConfig {
    pub name: String,
    pub max_outage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwinSection {
    pub fallback_scenario: u8,
    pub levels: Vec<LevelConfig>,
}

impl TwinSection {
    pub fn policy(&self) -> Result<TwinPolicy<f64>> {
        let levels = self
            .levels
            .iter()
            .enumerate()
            .map(|(i, l)| {
                let name: LevelName = l
                    .name
                    .parse()
                    .map_err(|_| Error::config(format!("twin.levels[{i}].name"), format!("unknown level `{}`", l.name)))?;
                Ok(ReliabilityLevel::new(name, l.max_outage))
            })
            .collect::<Result<Vec<_>>>()?;
        let policy = TwinPolicy {
            levels,
            fallback_scenario: self.fallback_scenario,
        };
        policy.validate()?;
        Ok(policy)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum RelayCriterion {
    /// Highest mean SNR on the hop into the relay.
    #[default]
    AccessSnr,
    /// Lowest outage over the whole remaining chain.
    ChainOutage,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RelaySection {
    #[serde(default)]
    pub criterion: RelayCriterion,
}

/// Optional perturbation of the SNRs the twin sees. Off when `snr_noise_db`
/// is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct TelemetrySection {
    #[serde(default)]
    pub snr_noise_db: f64,
    #[serde(default)]
    pub seed: u64,
}

/// One resolved leaf value and where it came from.
#[derive(Debug, Clone, PartialEq)]
pub struct EchoEntry {
    pub path: String,
    pub value: String,
    pub origin: Origin,
    pub non_paper: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    File,
    Preset,
    Default,
}

#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: ScenarioConfig,
    pub preset: Option<String>,
    pub echo: Vec<EchoEntry>,
}

impl LoadedConfig {
    /// Text rendering of the echo, one `path = value` line per leaf with
    /// its origin, marking values that are modelling assumptions (`non-paper`).
    pub fn echo_text(&self) -> String {
        let mut out = String::new();
        if let Some(p) = &self.preset {
            let _ = writeln!(out, "# preset: {p}");
        }
        for e in &self.echo {
            let origin = match e.origin {
                Origin::File => "file",
                Origin::Preset => "preset",
                Origin::Default => "default",
            };
            let flag = if e.non_paper { ", non-paper" } else { "" };
            let _ = writeln!(out, "{} = {}  # {origin}{flag}", e.path, e.value);
        }
        out
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::config(path.display().to_string(), e.to_string()))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<LoadedConfig> {
    let user: toml::Table = toml::from_str(text).map_err(|e| Error::config("<file>", format!("TOML parse error: {e}")))?;
    let mut user = user;
    let preset = match user.remove("preset") {
        None => None,
        Some(Value::String(s)) => Some(s),
        Some(_) => return Err(Error::config("preset", "expected a preset name string")),
    };
    let base = match &preset {
        None => toml::Table::new(),
        Some(name) => {
            let src = preset_source(name).ok_or_else(|| {
                Error::config("preset", format!("unknown preset `{name}` (available: {})", PRESETS.join(", ")))
            })?;
            toml::from_str(src).expect("bundled preset parses")
        }
    };
    let mut merged = base.clone();
    merge_tables(&mut merged, &user);

    let missing: Vec<&str> = REQUIRED_SECTIONS
        .iter()
        .copied()
        .filter(|k| !merged.contains_key(*k))
        .collect();
    if !missing.is_empty() {
        return Err(Error::config(
            "<root>",
            format!("missing required sections: {} (or set `preset = \"paper_baseline\"`)", missing.join(", ")),
        ));
    }

    let config: ScenarioConfig = serde_path_to_error::deserialize(Value::Table(merged.clone())).map_err(|e| {
        let path = e.path().to_string();
        Error::config(if path == "." { "<root>".to_string() } else { path }, e.into_inner().to_string())
    })?;
    config.validate()?;

    let resolved = Value::try_from(&config).map_err(|e| Error::config("<root>", e.to_string()))?;
    let mut echo = Vec::new();
    flatten("", &resolved, &mut |path, value| {
        let origin = if lookup(&user, path).is_some() {
            Origin::File
        } else if lookup(&base, path).is_some() {
            Origin::Preset
        } else {
            Origin::Default
        };
        echo.push(EchoEntry {
            path: path.to_string(),
            value: value.to_string(),
            origin,
            non_paper: is_non_paper(path),
        });
    });
    Ok(LoadedConfig { config, preset, echo })
}

fn merge_tables(base: &mut toml::Table, over: &toml::Table) {
    for (k, v) in over {
        match (base.get_mut(k), v) {
            (Some(Value::Table(b)), Value::Table(o)) => merge_tables(b, o),
            _ => {
                base.insert(k.clone(), v.clone());
            }
        }
    }
}

fn flatten(prefix: &str, v: &Value, f: &mut dyn FnMut(&str, &Value)) {
    match v {
        Value::Table(t) => {
            for (k, child) in t {
                let p = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&p, child, f);
            }
        }
        Value::Array(a) if a.iter().all(|x| x.is_table()) && !a.is_empty() => {
            for (i, child) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), child, f);
            }
        }
        leaf => f(prefix, leaf),
    }
}

fn lookup<'a>(t: &'a toml::Table, path: &str) -> Option<&'a Value> {
    let mut cur: Option<&Value> = None;
    let mut table = Some(t);
    for part in path.split('.') {
        let (key, index) = match part.find('[') {
            Some(i) => (&part[..i], part[i + 1..part.len() - 1].parse::<usize>().ok()),
            None => (part, None),
        };
        let v = table?.get(key)?;
        let v = match index {
            Some(i) => v.as_array()?.get(i)?,
            None => v,
        };
        cur = Some(v);
        table = v.as_table();
    }
    cur
}

/// Settings whose values are not given by the source publication.
fn is_non_paper(path: &str) -> bool {
    let generic = strip_indices(path);
    const FLAGGED: [&str; 22] = [
        "atmosphere.enabled",
        "atmosphere.zenith_oxygen_db",
        "atmosphere.zenith_water_vapour_db",
        "scenario.earth_brightness_k",
        "scenario.moon_phase_offset_deg",
        "llo_planes.altitude_km",
        "llo_planes.semi_major_axis_km",
        "llo_planes.raan_deg",
        "llo_planes.eccentricity",
        "llo_planes.arg_periapsis_deg",
        "geo_planes.semi_major_axis_km",
        "geo_planes.inclination_deg",
        "geo_planes.raan_deg",
        "ground_stations.latitude_deg",
        "ground_stations.longitude_deg",
        "ground_stations.altitude_km",
        "ground_stations.min_elevation_deg",
        "lct.altitude_km",
        "lct.min_elevation_deg",
        "relay.criterion",
        "telemetry.snr_noise_db",
        "telemetry.seed",
    ];
    if FLAGGED.contains(&generic.as_str()) {
        return true;
    }
    if generic.starts_with("links.")
        && [".tx_pointing_error_deg", ".rx_pointing_error_deg", ".rx_background", ".gamma_th_db"]
            .iter()
            .any(|s| generic.ends_with(s))
    {
        return true;
    }
    // the Low tier target is not published; High and Moderate are
    path == "twin.levels[2].max_outage"
}

fn strip_indices(path: &str) -> String {
    let mut out = String::with_capacity(path.len());
    let mut depth = 0;
    for c in path.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ if depth == 0 => out.push(c),
            _ => {}
        }
    }
    out
}

impl ScenarioConfig {
    /// The bundled baseline, resolved.
    pub fn paper_baseline() -> Self {
        parse_config("preset = \"paper_baseline\"")
            .expect("bundled preset is valid")
            .config
    }

    pub fn start_instant(&self) -> Result<DateTime<Utc>> {
        DateTime::parse_from_rfc3339(&self.scenario.start)
            .map(|d| d.with_timezone(&Utc))
            .map_err(|e| Error::config("scenario.start", format!("not an RFC 3339 instant: {e}")))
    }

    /// Number of timeline records per brightness value.
    pub fn step_count(&self) -> usize {
        let s = &self.scenario;
        if s.duration_s <= 0.0 {
            return 0;
        }
        (s.duration_s / s.step_s).round() as usize + 1
    }

    pub fn validate(&self) -> Result<()> {
        let s = &self.scenario;
        self.start_instant()?;
        if !(s.step_s > 0.0) || !s.step_s.is_finite() {
            return Err(Error::config("scenario.step_s", "must be > 0"));
        }
        if !(s.duration_s >= 0.0) || !s.duration_s.is_finite() {
            return Err(Error::config("scenario.duration_s", "must be >= 0"));
        }
        let ratio = s.duration_s / s.step_s;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) {
            return Err(Error::config("scenario.duration_s", "must be an integer multiple of step_s"));
        }
        if s.t_b_sweep_k.is_empty() {
            return Err(Error::config("scenario.t_b_sweep_k", "must not be empty"));
        }
        for (i, t) in s.t_b_sweep_k.iter().enumerate() {
            if !(*t >= 0.0) || !t.is_finite() {
                return Err(Error::config(format!("scenario.t_b_sweep_k[{i}]"), "must be >= 0"));
            }
        }
        for (name, v) in [
            ("geo_background_k", s.geo_background_k),
            ("earth_brightness_k", s.earth_brightness_k),
            ("t_cmb_k", s.t_cmb_k),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::config(format!("scenario.{name}"), "must be >= 0"));
            }
        }
        if !s.gamma_th_db.is_finite() {
            return Err(Error::config("scenario.gamma_th_db", "must be finite"));
        }
        let a = &self.atmosphere;
        if !(a.zenith_oxygen_db >= 0.0) || !(a.zenith_water_vapour_db >= 0.0) {
            return Err(Error::config("atmosphere", "zenith attenuations must be >= 0 dB"));
        }
        for kind in HopKind::ALL {
            validate_link(self.links.get(kind), &format!("links.{}", kind.label()), kind)?;
        }
        if self.llo_planes.iter().all(|p| p.true_anomalies_deg.is_empty()) {
            return Err(Error::config("llo_planes", "at least one LLO satellite is required"));
        }
        if self.geo_planes.iter().all(|p| p.true_anomalies_deg.is_empty()) {
            return Err(Error::config("geo_planes", "at least one GEO satellite is required"));
        }
        for (i, p) in self.llo_planes.iter().enumerate() {
            p.elements(CentralBody::Moon, &format!("llo_planes[{i}]"))?;
        }
        for (i, p) in self.geo_planes.iter().enumerate() {
            p.elements(CentralBody::Earth, &format!("geo_planes[{i}]"))?;
        }
        if self.ground_stations.is_empty() {
            return Err(Error::config("ground_stations", "at least one ground station is required"));
        }
        for (i, g) in self.ground_stations.iter().enumerate() {
            g.site(CentralBody::Earth, &format!("ground_stations[{i}]"))?;
        }
        self.lct.site(CentralBody::Moon, "lct")?;
        self.twin.policy()?;
        if !(self.telemetry.snr_noise_db >= 0.0) {
            return Err(Error::config("telemetry.snr_noise_db", "must be >= 0"));
        }
        Ok(())
    }

    /// Applies command-line overrides and revalidates.
    pub fn apply_overrides(&mut self, tb: Option<&[f64]>, gamma_th_db: Option<f64>, steps: Option<usize>) -> Result<()> {
        if let Some(tb) = tb {
            self.scenario.t_b_sweep_k = tb.to_vec();
        }
        if let Some(g) = gamma_th_db {
            self.scenario.gamma_th_db = g;
        }
        if let Some(n) = steps {
            self.scenario.duration_s = if n == 0 { 0.0 } else { (n - 1) as f64 * self.scenario.step_s };
        }
        self.validate()
    }
}

fn validate_link(p: &LinkParams, path: &str, kind: HopKind) -> Result<()> {
    let positive = [
        ("frequency_ghz", p.frequency_ghz),
        ("bandwidth_mhz", p.bandwidth_mhz),
        ("tx_power_w", p.tx_power_w),
        ("tx_diameter_m", p.tx_diameter_m),
        ("rx_diameter_m", p.rx_diameter_m),
    ];
    for (name, v) in positive {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::config(format!("{path}.{name}"), "must be > 0"));
        }
    }
    let efficiencies = [
        ("tx_radiation_efficiency", p.tx_radiation_efficiency),
        ("rx_radiation_efficiency", p.rx_radiation_efficiency),
        ("rx_line_thermal_efficiency", p.rx_line_thermal_efficiency),
    ];
    for (name, v) in efficiencies {
        if !(v > 0.0 && v <= 1.0) {
            return Err(Error::config(format!("{path}.{name}"), "must be in (0, 1]"));
        }
    }
    let nonneg = [
        ("tx_line_loss_db", p.tx_line_loss_db),
        ("rx_line_loss_db", p.rx_line_loss_db),
        ("rx_noise_temp_k", p.rx_noise_temp_k),
        ("rx_antenna_physical_temp_k", p.rx_antenna_physical_temp_k),
        ("rx_line_physical_temp_k", p.rx_line_physical_temp_k),
    ];
    for (name, v) in nonneg {
        if !(v >= 0.0) || !v.is_finite() {
            return Err(Error::config(format!("{path}.{name}"), "must be >= 0"));
        }
    }
    for (name, v) in [("tx_pointing_error_deg", p.tx_pointing_error_deg), ("rx_pointing_error_deg", p.rx_pointing_error_deg)] {
        if !(0.0..=180.0).contains(&v) {
            return Err(Error::config(format!("{path}.{name}"), "must be in [0, 180]"));
        }
    }
    if !p.k_factor_db.is_finite() {
        return Err(Error::config(format!("{path}.k_factor_db"), "must be finite"));
    }
    let earth_rx = matches!(kind, HopKind::MoonToEarth | HopKind::LloToEarth | HopKind::GeoToEarth);
    match (earth_rx, p.rx_atmosphere_temp_k) {
        (true, None) => {
            return Err(Error::config(format!("{path}.rx_atmosphere_temp_k"), "required for Earth receivers"))
        }
        (_, Some(t)) if !(t >= 0.0) => {
            return Err(Error::config(format!("{path}.rx_atmosphere_temp_k"), "must be >= 0"))
        }
        _ => {}
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn baseline_counts() {
        let c = ScenarioConfig::paper_baseline();
        let llo: usize = c.llo_planes.iter().map(|p| p.true_anomalies_deg.len()).sum();
        let geo: usize = c.geo_planes.iter().map(|p| p.true_anomalies_deg.len()).sum();
        assert_eq!((llo, geo, c.ground_stations.len()), (10, 6, 3));
        assert_eq!(c.step_count(), 1441);
        assert_eq!(c.llo_planes[0].inclination_deg, 84.0);
        assert_eq!(c.llo_planes[1].inclination_deg, 88.0);
    }

    #[test]
    fn empty_file_lists_sections() {
        let err = parse_config("").unwrap_err();
        assert!(err.is_config());
        let msg = err.to_string();
        for s in REQUIRED_SECTIONS {
            assert!(msg.contains(s), "{msg}");
        }
    }

    #[test]
    fn eccentricity_violation_is_named() {
        let text = r#"
            preset = "paper_baseline"
            [[llo_planes]]
            altitude_km = 100.0
            eccentricity = 1.2
            inclination_deg = 84.0
            raan_deg = 0.0
            true_anomalies_deg = [0.0]
        "#;
        let err = parse_config(text).unwrap_err();
        assert!(err.is_config());
        assert!(err.to_string().contains("eccentricity"), "{err}");
    }

    #[test]
    fn override_merges_and_echo_marks_origin() {
        let text = r#"
            preset = "paper_baseline"
            [scenario]
            gamma_th_db = 12.0
        "#;
        let loaded = parse_config(text).unwrap();
        assert_eq!(loaded.config.scenario.gamma_th_db, 12.0);
        assert_eq!(loaded.config.scenario.step_s, 60.0);
        let find = |p: &str| loaded.echo.iter().find(|e| e.path == p).unwrap().clone();
        assert_eq!(find("scenario.gamma_th_db").origin, Origin::File);
        assert_eq!(find("scenario.step_s").origin, Origin::Preset);
        assert!(find("atmosphere.zenith_oxygen_db").non_paper);
        assert!(find("twin.levels[2].max_outage").non_paper);
        assert!(!find("twin.levels[0].max_outage").non_paper);
        assert!(!find("links.moon_earth.k_factor_db").non_paper);
        assert!(loaded.echo_text().contains("non-paper"));
    }

    #[test]
    fn unknown_field_reports_path() {
        let text = "preset = \"paper_baseline\"\n[links.moon_llo]\nbogus = 1\n";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("links.moon_llo"), "{err}");
    }

    #[test]
    fn duration_must_be_multiple_of_step() {
        let text = "preset = \"paper_baseline\"\n[scenario]\nduration_s = 100.0\n";
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("duration_s"));
    }

    #[test]
    fn removing_a_plane() {
        let mut c = ScenarioConfig::paper_baseline();
        c.llo_planes.truncate(1);
        c.validate().unwrap();
        assert_eq!(c.llo_planes.iter().map(|p| p.true_anomalies_deg.len()).sum::<usize>(), 5);
    }

    #[test]
    fn unknown_preset() {
        assert!(parse_config("preset = \"nope\"").unwrap_err().is_config());
    }
}
