//! Cislunar relay link analysis and reliability-tiered path orchestration.
//!
//! The crate evaluates four lunar-surface-to-Earth relay architectures
//! (direct, low-lunar-orbit relay, geostationary relay, and the combined
//! multi-hop chain) minute by minute:
//!
//! * [`geometry`] propagates the Earth, Moon, relay constellations and
//!   ground sites and answers visibility questions;
//! * [`link_budget`] and [`noise_model`] produce received power and
//!   operational noise temperature for every hop;
//! * [`channel_stats`] turns mean SNR into Rician outage via the Marcum Q
//!   function;
//! * [`outage`] composes hops into per-architecture outage probability;
//! * [`orchestrator`] picks the most reliable, lowest-power architecture;
//! * [`harness`] wires everything into a configurable 24 h timeline run.
//!
//! The physics modules are generic over the scalar type through [`Real`]
//! (any `num_traits::Float`), with `f64` aliases exported at the crate root.
//! The harness itself is `f64`-only.

pub mod channel_stats;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod link_budget;
pub mod math;
pub mod noise_model;
pub mod orchestrator;
pub mod outage;

pub use error::{Error, Result};
pub use math::Real;

/// Double-precision aliases of the generic domain types.
pub type Vec3 = math::Vec3<f64>;
pub type Epoch = geometry::Epoch<f64>;
pub type KeplerElements = geometry::KeplerElements<f64>;
pub type StateVector = geometry::StateVector<f64>;
pub type GroundSite = geometry::GroundSite<f64>;
pub type AerTriple = geometry::AerTriple<f64>;
pub type AntennaSpec = link_budget::AntennaSpec<f64>;
pub type RfChain = link_budget::RfChain<f64>;
pub type AtmosphereModel = link_budget::AtmosphereModel<f64>;
pub type LinkGeometry = link_budget::LinkGeometry<f64>;
pub type LinkBudget = link_budget::LinkBudget<f64>;
pub type ReceiverThermalSpec = noise_model::ReceiverThermalSpec<f64>;
pub type BrightBody = noise_model::BrightBody<f64>;
pub type NoiseBudget = noise_model::NoiseBudget<f64>;
pub type RicianChannel = channel_stats::RicianChannel<f64>;
pub type HopAssessment = outage::HopAssessment<f64>;
pub type ScenarioAssessment = outage::ScenarioAssessment<f64>;
pub type ReliabilityLevel = orchestrator::ReliabilityLevel<f64>;
pub type TwinPolicy = orchestrator::TwinPolicy<f64>;
pub type TwinDecision = orchestrator::TwinDecision<f64>;

/// Single-precision aliases for the lightweight physics types.
pub type Vec3F32 = math::Vec3<f32>;
pub type StateVectorF32 = geometry::StateVector<f32>;
pub type RicianChannelF32 = channel_stats::RicianChannel<f32>;
