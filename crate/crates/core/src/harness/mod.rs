//! End-to-end runs: configuration, network construction, the timeline
//! sweep and result files.

pub mod config;
pub mod links;
pub mod network;
pub mod oracle;
pub mod output;
pub mod timeline;

pub use config::{load_config, parse_config, LoadedConfig, ScenarioConfig};
pub use network::{build_network, Network};
pub use output::{emit_outputs, OutputFormat};
pub use timeline::{run_timeline, select_relay, RelayCandidate, Timeline, TimelineContext, TimelineRecord};
