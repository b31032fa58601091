//! Node set and per-epoch geometry.

use std::sync::Arc;

use chrono::{DateTime, Utc};

use super::config::ScenarioConfig;
use crate::error::Result;
use crate::geometry::{
    aer, gmst_at, line_of_sight, moon_mean_longitude_at, propagate_kepler, AerTriple, CentralBody,
    CircularLunarOrbit, EarthRotation, Ephemerides, Epoch, GroundSite, KeplerElements, LocalFrame, Occluder,
    StateVector,
};
use crate::outage::NodeId;

#[derive(Debug, Clone)]
pub struct Site {
    pub name: String,
    pub site: GroundSite<f64>,
    pub min_elevation_deg: f64,
}

#[derive(Debug, Clone)]
pub struct Satellite {
    pub name: String,
    pub elements: KeplerElements<f64>,
}

/// Every node of the cislunar network plus the ephemerides that place them.
#[derive(Debug, Clone)]
pub struct Network {
    pub start: DateTime<Utc>,
    pub ephemerides: Ephemerides<f64>,
    pub lct: Site,
    pub ground_stations: Vec<Site>,
    pub llo: Vec<Satellite>,
    pub geo: Vec<Satellite>,
}

fn satellites(planes: &[super::config::OrbitPlane], body: CentralBody, key: &str, prefix: &str) -> Result<Vec<Satellite>> {
    let mut out = Vec::new();
    for (i, plane) in planes.iter().enumerate() {
        let plane_name = plane.name.clone().unwrap_or_else(|| format!("{prefix}-{}", i + 1));
        for (j, el) in plane.elements(body, &format!("{key}[{i}]"))?.into_iter().enumerate() {
            out.push(Satellite {
                name: format!("{plane_name}/{j}"),
                elements: el,
            });
        }
    }
    Ok(out)
}

pub fn build_network(config: &ScenarioConfig) -> Result<Network> {
    let start = config.start_instant()?;
    let phase = moon_mean_longitude_at(&start) + config.scenario.moon_phase_offset_deg;
    let ephemerides = Ephemerides::new(
        EarthRotation::new(gmst_at(&start)),
        Arc::new(CircularLunarOrbit::with_phase(phase)),
    );
    let site = |c: &super::config::SiteConfig, body, path: &str| -> Result<Site> {
        Ok(Site {
            name: c.name.clone(),
            site: c.site(body, path)?,
            min_elevation_deg: c.min_elevation_deg,
        })
    };
    let ground_stations = config
        .ground_stations
        .iter()
        .enumerate()
        .map(|(i, g)| site(g, CentralBody::Earth, &format!("ground_stations[{i}]")))
        .collect::<Result<Vec<_>>>()?;
    Ok(Network {
        start,
        lct: site(&config.lct, CentralBody::Moon, "lct")?,
        ground_stations,
        llo: satellites(&config.llo_planes, CentralBody::Moon, "llo_planes", "LLO")?,
        geo: satellites(&config.geo_planes, CentralBody::Earth, "geo_planes", "GEO")?,
        ephemerides,
    })
}

impl Network {
    pub fn node_count(&self) -> usize {
        1 + self.ground_stations.len() + self.llo.len() + self.geo.len()
    }

    pub fn node_name(&self, id: NodeId) -> &str {
        match id {
            NodeId::Lct => &self.lct.name,
            NodeId::GroundStation(i) => &self.ground_stations[i].name,
            NodeId::Llo(i) => &self.llo[i].name,
            NodeId::Geo(i) => &self.geo[i].name,
        }
    }

    /// All node states at `seconds` after the start, in Earth-centred
    /// inertial coordinates.
    pub fn snapshot(&self, seconds: f64) -> Result<Snapshot> {
        let epoch = Epoch::new(seconds, self.start)?;
        let eph = &self.ephemerides;
        let fixed = |s: &Site| {
            let frame = eph.site_frame(&s.site, &epoch);
            SiteState {
                state: frame.origin,
                frame,
                min_elevation_deg: s.min_elevation_deg,
            }
        };
        let orbiter = |sat: &Satellite| -> Result<StateVector<f64>> {
            Ok(eph.to_eci(&propagate_kepler(&sat.elements, &epoch)?))
        };
        let llo: Vec<StateVector<f64>> = self.llo.iter().map(orbiter).collect::<Result<_>>()?;
        let llo_frames = llo.iter().map(|s| eph.orbiter_frame(s, CentralBody::Moon)).collect();
        Ok(Snapshot {
            epoch,
            moon: eph.moon_state(&epoch),
            earth: eph.body_center(CentralBody::Earth, &epoch),
            lct: fixed(&self.lct),
            ground_stations: self.ground_stations.iter().map(fixed).collect(),
            llo,
            llo_frames,
            geo: self.geo.iter().map(orbiter).collect::<Result<_>>()?,
        })
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SiteState {
    pub state: StateVector<f64>,
    pub frame: LocalFrame<f64>,
    pub min_elevation_deg: f64,
}

#[derive(Debug, Clone)]
pub struct Snapshot {
    pub epoch: Epoch<f64>,
    pub moon: StateVector<f64>,
    pub earth: StateVector<f64>,
    pub lct: SiteState,
    pub ground_stations: Vec<SiteState>,
    pub llo: Vec<StateVector<f64>>,
    pub llo_frames: Vec<LocalFrame<f64>>,
    pub geo: Vec<StateVector<f64>>,
}

/// Geometry of one directed hop at one epoch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopGeometry {
    pub visible: bool,
    /// Look angles toward the other end, seen from the lunar terminal for
    /// hops leaving it, from the ground station for relay-to-Earth hops and
    /// from the LLO node for LLO-to-GEO hops.
    pub aer: AerTriple<f64>,
    pub range_km: f64,
    /// Elevation of the transmitter above an Earth receiver's horizon.
    pub earth_elevation_deg: Option<f64>,
    pub rx_to_moon_km: f64,
    pub rx_to_earth_km: f64,
}

impl Snapshot {
    pub fn state(&self, id: NodeId) -> &StateVector<f64> {
        match id {
            NodeId::Lct => &self.lct.state,
            NodeId::GroundStation(i) => &self.ground_stations[i].state,
            NodeId::Llo(i) => &self.llo[i],
            NodeId::Geo(i) => &self.geo[i],
        }
    }

    fn occluders(&self) -> [Occluder<f64>; 2] {
        [
            Occluder {
                center: self.earth,
                radius_km: CentralBody::Earth.radius(),
            },
            Occluder {
                center: self.moon,
                radius_km: CentralBody::Moon.radius(),
            },
        ]
    }

    /// Visibility and look angles for `src` transmitting to `dst`.
    pub fn hop(&self, src: NodeId, dst: NodeId) -> Result<HopGeometry> {
        let a = self.state(src);
        let b = self.state(dst);
        let mut visible = line_of_sight(a, b, &self.occluders());
        let mut check_mask = |site: &SiteState, look: &AerTriple<f64>| {
            if !(look.elevation_deg > site.min_elevation_deg) {
                visible = false;
            }
        };
        let (look, earth_el) = match (src, dst) {
            (_, NodeId::GroundStation(g)) => {
                let gs = &self.ground_stations[g];
                let down = aer(&gs.frame, a)?;
                check_mask(gs, &down);
                let look = if let NodeId::Lct = src {
                    let up = aer(&self.lct.frame, b)?;
                    check_mask(&self.lct, &up);
                    up
                } else {
                    down
                };
                (look, Some(down.elevation_deg))
            }
            (NodeId::Lct, _) => {
                let look = aer(&self.lct.frame, b)?;
                check_mask(&self.lct, &look);
                (look, None)
            }
            (NodeId::Llo(i), _) => (aer(&self.llo_frames[i], b)?, None),
            _ => {
                let frame = LocalFrame::about_body(*a, self.earth.position, crate::math::Vec3::unit_z());
                (aer(&frame, b)?, None)
            }
        };
        Ok(HopGeometry {
            visible,
            aer: look,
            range_km: look.range_km,
            earth_elevation_deg: earth_el,
            rx_to_moon_km: (b.position - self.moon.position).norm(),
            rx_to_earth_km: (b.position - self.earth.position).norm(),
        })
    }
}
