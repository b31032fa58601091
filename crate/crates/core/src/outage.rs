//! Per-hop and per-scenario outage probability.
//!
//! Hops are independent, so a serial chain fails unless every hop
//! succeeds: `P_out = 1 − Π (1 − F_j)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel_stats::rician_cdf_linear;
use crate::error::{Error, Result};
use crate::math::{from_db, Real};

/// Network node identifier. Constellation indices are zero-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeId {
    /// The lunar communication terminal on the surface.
    Lct,
    GroundStation(usize),
    Llo(usize),
    Geo(usize),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Lct => write!(f, "LCT"),
            NodeId::GroundStation(i) => write!(f, "GS{i}"),
            NodeId::Llo(i) => write!(f, "LLO{i}"),
            NodeId::Geo(i) => write!(f, "GEO{i}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopAssessment<T> {
    pub source: NodeId,
    pub destination: NodeId,
    pub mean_snr: T,
    pub k_factor_db: T,
    /// `F(γ_th)`; forced to 1 when the hop is not visible.
    pub cdf_at_threshold: T,
    /// `1 − F(γ_th)`, kept separately for precision near certain outage.
    pub success_probability: T,
    pub visible: bool,
    pub transmit_power_w: T,
}

impl<T: Real> HopAssessment<T> {
    /// Evaluates a visible hop at threshold `gamma_th` (linear).
    pub fn evaluate(
        source: NodeId,
        destination: NodeId,
        mean_snr: T,
        k_factor_db: T,
        gamma_th: T,
        transmit_power_w: T,
    ) -> Result<Self> {
        let pair = rician_cdf_linear(gamma_th, from_db(k_factor_db), mean_snr)?;
        Ok(Self {
            source,
            destination,
            mean_snr,
            k_factor_db,
            cdf_at_threshold: pair.value,
            success_probability: pair.complement,
            visible: true,
            transmit_power_w,
        })
    }

    /// A hop with no line of sight: certain outage.
    pub fn invisible(source: NodeId, destination: NodeId, k_factor_db: T, transmit_power_w: T) -> Self {
        Self {
            source,
            destination,
            mean_snr: T::zero(),
            k_factor_db,
            cdf_at_threshold: T::one(),
            success_probability: T::zero(),
            visible: false,
            transmit_power_w,
        }
    }
}

/// Outage of a single hop at `gamma_th`: its Rician CDF, or 1 if invisible.
pub fn hop_outage<T: Real>(hop: &HopAssessment<T>, gamma_th: T) -> Result<T> {
    if !hop.visible {
        return Ok(T::one());
    }
    Ok(rician_cdf_linear(gamma_th, from_db(hop.k_factor_db), hop.mean_snr)?.value)
}

fn check_probability<T: Real>(op: &'static str, p: T) -> Result<()> {
    if p >= T::zero() && p <= T::one() {
        Ok(())
    } else {
        Err(Error::domain(op, format!("probability {p} outside [0, 1]")))
    }
}

/// `1 − Π (1 − F_j)`, accumulated in log space.
pub fn serial_outage<T: Real>(hop_cdfs: &[T]) -> Result<T> {
    let mut ln_success = T::zero();
    for &f in hop_cdfs {
        check_probability("serial_outage", f)?;
        if f == T::one() {
            return Ok(T::one());
        }
        ln_success += (-f).ln_1p();
    }
    Ok(-ln_success.exp_m1())
}

/// Serial outage from per-hop success probabilities `1 − F_j`. Precise when
/// the outage is close to 1.
pub fn serial_outage_from_success<T: Real>(success: &[T]) -> Result<(T, T)> {
    let mut s = T::one();
    for &p in success {
        check_probability("serial_outage", p)?;
        s *= p;
    }
    Ok((T::one() - s, s))
}

/// Inclusion–exclusion expansion for one, two or three hops.
pub fn expanded_outage<T: Real>(hop_cdfs: &[T]) -> Result<T> {
    for &f in hop_cdfs {
        check_probability("expanded_outage", f)?;
    }
    match *hop_cdfs {
        [f] => Ok(f),
        [f1, f2] => Ok(f1 + f2 - f1 * f2),
        [f1, f2, f3] => Ok(f1 + f2 + f3 - f1 * f2 - f1 * f3 - f2 * f3 + f1 * f2 * f3),
        _ => Err(Error::domain("expanded_outage", "expansion defined for 1 to 3 hops")),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopKind {
    MoonToEarth,
    MoonToLlo,
    LloToEarth,
    MoonToGeo,
    GeoToEarth,
    LloToGeo,
}

impl HopKind {
    pub const ALL: [HopKind; 6] = [
        HopKind::MoonToEarth,
        HopKind::MoonToLlo,
        HopKind::LloToEarth,
        HopKind::MoonToGeo,
        HopKind::GeoToEarth,
        HopKind::LloToGeo,
    ];

    pub fn label(self) -> &'static str {
        match self {
            HopKind::MoonToEarth => "moon_earth",
            HopKind::MoonToLlo => "moon_llo",
            HopKind::LloToEarth => "llo_earth",
            HopKind::MoonToGeo => "moon_geo",
            HopKind::GeoToEarth => "geo_earth",
            HopKind::LloToGeo => "llo_geo",
        }
    }

    fn of(src: NodeId, dst: NodeId) -> Option<HopKind> {
        use NodeId::*;
        match (src, dst) {
            (Lct, GroundStation(_)) => Some(HopKind::MoonToEarth),
            (Lct, Llo(_)) => Some(HopKind::MoonToLlo),
            (Llo(_), GroundStation(_)) => Some(HopKind::LloToEarth),
            (Lct, Geo(_)) => Some(HopKind::MoonToGeo),
            (Geo(_), GroundStation(_)) => Some(HopKind::GeoToEarth),
            (Llo(_), Geo(_)) => Some(HopKind::LloToGeo),
            _ => None,
        }
    }
}

/// Hop sequence of each relay architecture.
pub fn scenario_topology(scenario_id: u8) -> Option<&'static [HopKind]> {
    match scenario_id {
        1 => Some(&[HopKind::MoonToEarth]),
        2 => Some(&[HopKind::MoonToLlo, HopKind::LloToEarth]),
        3 => Some(&[HopKind::MoonToGeo, HopKind::GeoToEarth]),
        4 => Some(&[HopKind::MoonToLlo, HopKind::LloToGeo, HopKind::GeoToEarth]),
        _ => None,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioAssessment<T> {
    pub scenario_id: u8,
    pub hops: Vec<HopAssessment<T>>,
    pub outage_probability: T,
    /// `1 − outage_probability`, computed without cancellation.
    pub success_probability: T,
    pub total_transmit_power_w: T,
}

impl<T: Real> ScenarioAssessment<T> {
    pub fn all_visible(&self) -> bool {
        self.hops.iter().all(|h| h.visible)
    }
}

/// Checks the hop chain against the scenario topology and composes it.
pub fn assess_scenario<T: Real>(scenario_id: u8, hops: Vec<HopAssessment<T>>) -> Result<ScenarioAssessment<T>> {
    let topo = scenario_topology(scenario_id)
        .ok_or_else(|| Error::config("scenario_id", format!("unknown scenario {scenario_id}")))?;
    if hops.len() != topo.len() {
        return Err(Error::config(
            "hops",
            format!("scenario {scenario_id} needs {} hops, got {}", topo.len(), hops.len()),
        ));
    }
    for (i, (hop, kind)) in hops.iter().zip(topo).enumerate() {
        if HopKind::of(hop.source, hop.destination) != Some(*kind) {
            return Err(Error::config(
                "hops",
                format!("scenario {scenario_id} hop {i} is {}->{}, expected {}", hop.source, hop.destination, kind.label()),
            ));
        }
        if i > 0 && hops[i - 1].destination != hop.source {
            return Err(Error::config("hops", format!("scenario {scenario_id} chain broken at hop {i}")));
        }
    }
    let cdfs: Vec<T> = hops.iter().map(|h| h.cdf_at_threshold).collect();
    let success: Vec<T> = hops.iter().map(|h| h.success_probability).collect();
    let p_out = serial_outage(&cdfs)?;
    let (_, p_ok) = serial_outage_from_success(&success)?;
    // each form is exact on its own side of 1/2
    let (outage, ok) = if p_out <= T::from(0.5).unwrap() { (p_out, T::one() - p_out) } else { (T::one() - p_ok, p_ok) };
    let total = hops.iter().map(|h| h.transmit_power_w).fold(T::zero(), |a, b| a + b);
    Ok(ScenarioAssessment {
        scenario_id,
        hops,
        outage_probability: outage,
        success_probability: ok,
        total_transmit_power_w: total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn hop(src: NodeId, dst: NodeId, f: f64, p: f64) -> HopAssessment<f64> {
        HopAssessment {
            source: src,
            destination: dst,
            mean_snr: 100.0,
            k_factor_db: 10.0,
            cdf_at_threshold: f,
            success_probability: 1.0 - f,
            visible: true,
            transmit_power_w: p,
        }
    }

    #[test]
    fn serial_examples() {
        assert_eq!(serial_outage(&[0.0_f64]).unwrap(), 0.0);
        assert_eq!(serial_outage(&[1.0_f64, 0.3]).unwrap(), 1.0);
        assert!((serial_outage(&[0.1_f64, 0.2]).unwrap() - 0.28).abs() < 1e-15);
        assert!((serial_outage(&[0.1_f64, 0.2, 0.3]).unwrap() - 0.496).abs() < 1e-15);
        assert!(serial_outage(&[1.5_f64]).is_err());
        assert!(serial_outage(&[-0.1_f64]).is_err());
        assert_eq!(serial_outage::<f64>(&[]).unwrap(), 0.0);
    }

    #[test]
    fn hop_outage_cases() {
        let inv = HopAssessment::invisible(NodeId::Lct, NodeId::Llo(0), 20.0, 0.5);
        assert_eq!(hop_outage(&inv, 10.0).unwrap(), 1.0);
        let strong = HopAssessment::evaluate(NodeId::Lct, NodeId::Llo(0), 1e12, 20.0, 10.0, 0.5).unwrap();
        // e^-100 chance of no line-of-sight photons times ~1e-9
        assert!(hop_outage(&strong, 10.0).unwrap() < 1e-50);
    }

    #[test]
    fn power_sums() {
        use NodeId::*;
        let s1 = assess_scenario(1, vec![hop(Lct, GroundStation(0), 0.0, 2.0)]).unwrap();
        assert_eq!(s1.total_transmit_power_w, 2.0);
        let s4 = assess_scenario(
            4,
            vec![
                hop(Lct, Llo(0), 0.0, 0.5),
                hop(Llo(0), Geo(1), 0.0, 2.0),
                hop(Geo(1), GroundStation(2), 0.0, 0.01),
            ],
        )
        .unwrap();
        assert_eq!(s4.total_transmit_power_w, 2.51);
    }

    #[test]
    fn invisible_first_hop_forces_outage() {
        use NodeId::*;
        let s = assess_scenario(
            2,
            vec![
                HopAssessment::invisible(Lct, Llo(3), 20.0, 0.5),
                hop(Llo(3), GroundStation(0), 1e-9, 2.0),
            ],
        )
        .unwrap();
        assert_eq!(s.outage_probability, 1.0);
        assert_eq!(s.success_probability, 0.0);
    }

    #[test]
    fn topology_mismatch() {
        use NodeId::*;
        assert!(assess_scenario(1, vec![hop(Lct, Llo(0), 0.0, 0.5)]).unwrap_err().is_config());
        assert!(assess_scenario(2, vec![hop(Lct, Llo(0), 0.0, 0.5)]).unwrap_err().is_config());
        let broken = vec![hop(Lct, Llo(0), 0.0, 0.5), hop(Llo(1), GroundStation(0), 0.0, 2.0)];
        assert!(assess_scenario(2, broken).unwrap_err().is_config());
        assert!(assess_scenario::<f64>(5, vec![]).unwrap_err().is_config());
    }

    proptest! {
        #[test]
        fn matches_expansion(fs in prop::collection::vec(0.0f64..=1.0, 1..=3)) {
            let a = serial_outage(&fs).unwrap();
            let b = expanded_outage(&fs).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn monotone_and_symmetric(f1 in 0.0f64..=1.0, f2 in 0.0f64..=1.0, f3 in 0.0f64..=1.0, d in 0.0f64..0.5) {
            let base = serial_outage(&[f1, f2, f3]).unwrap();
            prop_assert!(serial_outage(&[(f1 + d).min(1.0), f2, f3]).unwrap() >= base - 1e-15);
            prop_assert!((serial_outage(&[f3, f1, f2]).unwrap() - base).abs() < 1e-15);
            prop_assert!(base >= serial_outage(&[f1, f2]).unwrap() - 1e-15);
        }
    }
}
