//! Minute-by-minute evaluation of the four relay architectures.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;

use super::config::{RelayCriterion, ScenarioConfig};
use super::links::{HopLink, LinkModels};
use super::network::{build_network, HopGeometry, Network, Snapshot};
use crate::error::{Error, Result};
use crate::geometry::AerTriple;
use crate::math::{from_db, to_db};
use crate::orchestrator::{decide, TwinDecision, TwinPolicy, SCENARIO_IDS};
use crate::outage::{assess_scenario, HopAssessment, HopKind, NodeId, ScenarioAssessment};

/// A candidate next node and its ranking score (higher is better).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayCandidate {
    pub node: NodeId,
    pub score: f64,
}

/// Best-scoring candidate; ties go to the lowest node id. `None` when the
/// list is empty.
pub fn select_relay(candidates: &[RelayCandidate]) -> Option<NodeId> {
    let mut best: Option<RelayCandidate> = None;
    for c in candidates {
        best = match best {
            None => Some(*c),
            Some(b) if c.score > b.score || (c.score == b.score && c.node < b.node) => Some(*c),
            keep => keep,
        };
    }
    best.map(|b| b.node)
}

/// A hop with its geometry and, when visible, its budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluatedHop {
    pub kind: HopKind,
    pub source: NodeId,
    pub destination: NodeId,
    pub geometry: HopGeometry,
    pub link: Option<HopLink>,
}

impl EvaluatedHop {
    pub fn visible(&self) -> bool {
        self.link.is_some()
    }

    pub fn mean_snr(&self, t_b_k: f64) -> Option<f64> {
        self.link.map(|l| l.mean_snr(t_b_k))
    }
}

/// Every hop that any scenario could use at one epoch. Brightness does not
/// enter here, so one instance serves the whole sweep.
#[derive(Debug, Clone)]
pub struct StepGeometry {
    pub step: usize,
    pub epoch_s: f64,
    pub lct_gs: Vec<EvaluatedHop>,
    pub lct_llo: Vec<EvaluatedHop>,
    pub lct_geo: Vec<EvaluatedHop>,
    pub llo_gs: Vec<Vec<EvaluatedHop>>,
    pub geo_gs: Vec<Vec<EvaluatedHop>>,
    pub llo_geo: Vec<Vec<EvaluatedHop>>,
}

fn evaluate_hop(snap: &Snapshot, models: &LinkModels, kind: HopKind, src: NodeId, dst: NodeId) -> Result<EvaluatedHop> {
    let geometry = snap.hop(src, dst)?;
    let link = if geometry.visible {
        Some(models.get(kind).evaluate(&geometry)?)
    } else {
        None
    };
    Ok(EvaluatedHop {
        kind,
        source: src,
        destination: dst,
        geometry,
        link,
    })
}

impl StepGeometry {
    pub fn compute(network: &Network, models: &LinkModels, step: usize, epoch_s: f64) -> Result<Self> {
        let snap = network.snapshot(epoch_s)?;
        let n_gs = network.ground_stations.len();
        let n_llo = network.llo.len();
        let n_geo = network.geo.len();
        let hop = |kind, s, d| evaluate_hop(&snap, models, kind, s, d);
        let row = |kind, s: NodeId, n: usize, d: fn(usize) -> NodeId| (0..n).map(|j| hop(kind, s, d(j))).collect::<Result<Vec<_>>>();
        Ok(Self {
            step,
            epoch_s,
            lct_gs: row(HopKind::MoonToEarth, NodeId::Lct, n_gs, NodeId::GroundStation)?,
            lct_llo: row(HopKind::MoonToLlo, NodeId::Lct, n_llo, NodeId::Llo)?,
            lct_geo: row(HopKind::MoonToGeo, NodeId::Lct, n_geo, NodeId::Geo)?,
            llo_gs: (0..n_llo)
                .map(|l| row(HopKind::LloToEarth, NodeId::Llo(l), n_gs, NodeId::GroundStation))
                .collect::<Result<_>>()?,
            geo_gs: (0..n_geo)
                .map(|k| row(HopKind::GeoToEarth, NodeId::Geo(k), n_gs, NodeId::GroundStation))
                .collect::<Result<_>>()?,
            llo_geo: (0..n_llo)
                .map(|l| row(HopKind::LloToGeo, NodeId::Llo(l), n_geo, NodeId::Geo))
                .collect::<Result<_>>()?,
        })
    }

    fn hops_from(&self, src: NodeId, kind: HopKind) -> &[EvaluatedHop] {
        match (src, kind) {
            (NodeId::Lct, HopKind::MoonToEarth) => &self.lct_gs,
            (NodeId::Lct, HopKind::MoonToLlo) => &self.lct_llo,
            (NodeId::Lct, HopKind::MoonToGeo) => &self.lct_geo,
            (NodeId::Llo(l), HopKind::LloToEarth) => &self.llo_gs[l],
            (NodeId::Llo(l), HopKind::LloToGeo) => &self.llo_geo[l],
            (NodeId::Geo(k), HopKind::GeoToEarth) => &self.geo_gs[k],
            _ => unreachable!("hop kind {kind:?} cannot start at {src}"),
        }
    }

    /// Greedy next hop from `src`: best access-hop SNR among visible
    /// candidates, or the first candidate (marked invisible) when none is.
    fn best_hop(&self, src: NodeId, kind: HopKind, t_b_k: f64) -> &EvaluatedHop {
        let hops = self.hops_from(src, kind);
        let candidates: Vec<RelayCandidate> = hops
            .iter()
            .filter_map(|h| h.mean_snr(t_b_k).map(|s| RelayCandidate { node: h.destination, score: s }))
            .collect();
        match select_relay(&candidates) {
            Some(node) => hops.iter().find(|h| h.destination == node).expect("candidate from list"),
            None => &hops[0],
        }
    }

    fn greedy_chain(&self, scenario: u8, t_b_k: f64) -> Vec<&EvaluatedHop> {
        let mut chain = Vec::new();
        let mut at = NodeId::Lct;
        for &kind in crate::outage::scenario_topology(scenario).expect("known scenario") {
            let h = self.best_hop(at, kind, t_b_k);
            at = h.destination;
            chain.push(h);
        }
        chain
    }

    /// Chain with the highest end-to-end success probability among fully
    /// visible chains; falls back to the greedy chain when none exists.
    fn best_outage_chain(&self, scenario: u8, t_b_k: f64, assess: &dyn Fn(&EvaluatedHop) -> Result<HopAssessment<f64>>) -> Result<Vec<&EvaluatedHop>> {
        let topo = crate::outage::scenario_topology(scenario).expect("known scenario");
        let mut best: Option<(f64, Vec<&EvaluatedHop>)> = None;
        // scores are ln(success), which keeps tiny outages apart
        let mut stack: Vec<(Vec<&EvaluatedHop>, f64)> = vec![(Vec::new(), 0.0)];
        while let Some((prefix, score)) = stack.pop() {
            if prefix.len() == topo.len() {
                // candidates are expanded in ascending id order and pushed in
                // reverse, so the first chain seen with a given score has the
                // lowest ids
                if best.as_ref().is_none_or(|(s, _)| score > *s) {
                    best = Some((score, prefix));
                }
                continue;
            }
            let at = prefix.last().map_or(NodeId::Lct, |h| h.destination);
            let hops = self.hops_from(at, topo[prefix.len()]);
            for h in hops.iter().rev().filter(|h| h.visible()) {
                let a = assess(h)?;
                let ln_ok = if a.cdf_at_threshold < 0.5 {
                    (-a.cdf_at_threshold).ln_1p()
                } else {
                    a.success_probability.ln()
                };
                let mut next = prefix.clone();
                next.push(h);
                stack.push((next, score + ln_ok));
            }
        }
        Ok(match best {
            Some((_, chain)) => chain,
            None => self.greedy_chain(scenario, t_b_k),
        })
    }
}

/// One hop of a resolved scenario chain, as reported.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopRecord {
    pub kind: HopKind,
    pub source: NodeId,
    pub destination: NodeId,
    pub visible: bool,
    pub aer: AerTriple<f64>,
    pub mean_snr_db: Option<f64>,
    pub cdf_at_threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioRecord {
    pub assessment: ScenarioAssessment<f64>,
    pub hops: Vec<HopRecord>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TimelineRecord {
    pub step: usize,
    pub epoch_s: f64,
    pub tb_k: f64,
    /// Scenarios 1 to 4 in order.
    pub scenarios: Vec<ScenarioRecord>,
    pub decision: TwinDecision<f64>,
}

impl TimelineRecord {
    pub fn scenario(&self, id: u8) -> &ScenarioRecord {
        &self.scenarios[id as usize - 1]
    }

    pub fn outage(&self, id: u8) -> f64 {
        self.scenario(id).assessment.outage_probability
    }
}

#[derive(Debug, Clone)]
pub struct Timeline {
    pub t_b_sweep_k: Vec<f64>,
    pub steps: usize,
    /// Brightness-major, then epoch order.
    pub records: Vec<TimelineRecord>,
}

impl Timeline {
    /// Records of one brightness value, in epoch order.
    pub fn for_tb(&self, index: usize) -> &[TimelineRecord] {
        &self.records[index * self.steps..(index + 1) * self.steps]
    }

    pub fn tb_index(&self, t_b_k: f64) -> Option<usize> {
        self.t_b_sweep_k.iter().position(|&t| t == t_b_k)
    }
}

/// Fixed inputs shared by every step of a run.
pub struct TimelineContext {
    pub config: ScenarioConfig,
    pub network: Network,
    pub models: LinkModels,
    pub policy: TwinPolicy<f64>,
}

impl TimelineContext {
    pub fn new(config: &ScenarioConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            network: build_network(config)?,
            models: LinkModels::new(config)?,
            policy: config.twin.policy()?,
            config: config.clone(),
        })
    }

    pub fn epoch_s(&self, step: usize) -> f64 {
        step as f64 * self.config.scenario.step_s
    }

    pub fn geometry(&self, step: usize) -> Result<StepGeometry> {
        let t = self.epoch_s(step);
        StepGeometry::compute(&self.network, &self.models, step, t).map_err(|e| at_epoch(t, e))
    }

    fn assess_hop(&self, hop: &EvaluatedHop, t_b_k: f64, snr_offset_db: f64) -> Result<HopAssessment<f64>> {
        let m = self.models.get(hop.kind);
        match hop.mean_snr(t_b_k) {
            Some(snr) => {
                let snr = if snr_offset_db == 0.0 { snr } else { snr * from_db(snr_offset_db) };
                HopAssessment::evaluate(hop.source, hop.destination, snr, m.k_factor_db, m.gamma_th_linear(), m.transmit_power_w)
            }
            None => Ok(HopAssessment::invisible(hop.source, hop.destination, m.k_factor_db, m.transmit_power_w)),
        }
    }

    /// All four scenarios and the twin decision at one brightness.
    pub fn record(&self, geo: &StepGeometry, tb_index: usize) -> Result<TimelineRecord> {
        let t_b = self.config.scenario.t_b_sweep_k[tb_index];
        let inner = || -> Result<TimelineRecord> {
            let mut scenarios = Vec::with_capacity(4);
            let mut chains = Vec::with_capacity(4);
            for id in SCENARIO_IDS {
                let chain = match self.config.relay.criterion {
                    RelayCriterion::AccessSnr => geo.greedy_chain(id, t_b),
                    RelayCriterion::ChainOutage => geo.best_outage_chain(id, t_b, &|h| self.assess_hop(h, t_b, 0.0))?,
                };
                let hops = chain.iter().map(|h| self.assess_hop(h, t_b, 0.0)).collect::<Result<Vec<_>>>()?;
                let assessment = assess_scenario(id, hops)?;
                let records = chain
                    .iter()
                    .zip(&assessment.hops)
                    .map(|(h, a)| HopRecord {
                        kind: h.kind,
                        source: h.source,
                        destination: h.destination,
                        visible: a.visible,
                        aer: h.geometry.aer,
                        mean_snr_db: h.mean_snr(t_b).map(to_db),
                        cdf_at_threshold: a.cdf_at_threshold,
                    })
                    .collect();
                scenarios.push(ScenarioRecord { assessment, hops: records });
                chains.push(chain);
            }
            let sigma = self.config.telemetry.snr_noise_db;
            let decision = if sigma > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(telemetry_seed(self.config.telemetry.seed, geo.step, tb_index));
                let normal = Normal::new(0.0, sigma).map_err(|e| Error::numeric("telemetry", e.to_string()))?;
                let mut seen = Vec::with_capacity(4);
                for (id, chain) in SCENARIO_IDS.iter().zip(&chains) {
                    let hops = chain
                        .iter()
                        .map(|h| self.assess_hop(h, t_b, normal.sample(&mut rng)))
                        .collect::<Result<Vec<_>>>()?;
                    seen.push(assess_scenario(*id, hops)?);
                }
                decide(&seen, &self.policy)?
            } else {
                let a: Vec<_> = scenarios.iter().map(|s| s.assessment.clone()).collect();
                decide(&a, &self.policy)?
            };
            Ok(TimelineRecord {
                step: geo.step,
                epoch_s: geo.epoch_s,
                tb_k: t_b,
                scenarios,
                decision,
            })
        };
        inner().map_err(|e| at_epoch(geo.epoch_s, e))
    }

    /// Records for every brightness at one step.
    pub fn step_records(&self, step: usize) -> Result<Vec<TimelineRecord>> {
        let geo = self.geometry(step)?;
        (0..self.config.scenario.t_b_sweep_k.len())
            .map(|i| self.record(&geo, i))
            .collect()
    }
}

fn at_epoch(epoch_s: f64, e: Error) -> Error {
    match e {
        Error::AtEpoch { .. } => e,
        other => Error::AtEpoch {
            epoch_s,
            source: Box::new(other),
        },
    }
}

fn telemetry_seed(seed: u64, step: usize, tb_index: usize) -> u64 {
    // splitmix64 finaliser over the (seed, step, brightness) triple
    let mut z = seed ^ (step as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ ((tb_index as u64) << 56);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Runs the whole sweep. Steps are evaluated in parallel; the result does
/// not depend on the thread count.
pub fn run_timeline(config: &ScenarioConfig, threads: Option<usize>) -> Result<Timeline> {
    let ctx = TimelineContext::new(config)?;
    let steps = config.step_count();
    let n_tb = config.scenario.t_b_sweep_k.len();
    let work = || -> Result<Vec<Vec<TimelineRecord>>> {
        (0..steps).into_par_iter().map(|s| ctx.step_records(s)).collect()
    };
    let per_step = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config("--threads", e.to_string()))?
            .install(work)?,
        None => work()?,
    };
    let mut records = Vec::with_capacity(steps * n_tb);
    for i in 0..n_tb {
        records.extend(per_step.iter().map(|r| r[i].clone()));
    }
    Ok(Timeline {
        t_b_sweep_k: config.scenario.t_b_sweep_k.clone(),
        steps,
        records,
    })
}
