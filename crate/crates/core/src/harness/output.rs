//! Result files: timeline, decision audit, AER export and JSON summary.
//!
//! Probabilities are written as `{:.5e}` (six significant digits), angles
//! and ranges with four decimals. Column layouts are documented in
//! `docs/timeline_schema.md`.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::timeline::{HopRecord, Timeline, TimelineRecord};
use crate::error::{Error, Result};
use crate::orchestrator::{LevelName, TwinPolicy, SCENARIO_IDS};
use crate::outage::{scenario_topology, HopKind};

pub const TIMELINE_LEADING_COLUMNS: [&str; 12] = [
    "epoch_s",
    "tb_K",
    "s1_outage",
    "s2_outage",
    "s3_outage",
    "s4_outage",
    "s1_power_W",
    "s2_power_W",
    "s3_power_W",
    "s4_power_W",
    "twin_scenario",
    "twin_level",
];

const HOP_FIELDS: [&str; 8] = ["src", "dst", "visible", "az_deg", "el_deg", "range_km", "snr_dB", "cdf"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

pub fn fmt_prob(p: f64) -> String {
    format!("{p:.5e}")
}

pub fn fmt_fixed(x: f64) -> String {
    format!("{x:.4}")
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e.to_string()),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path).map(BufWriter::new).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_writer(path: &Path) -> Result<csv::Writer<BufWriter<File>>> {
    Ok(csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(path)?))
}

pub fn timeline_header() -> Vec<String> {
    let mut cols: Vec<String> = TIMELINE_LEADING_COLUMNS.iter().map(|s| s.to_string()).collect();
    for id in SCENARIO_IDS {
        for j in 1..=scenario_topology(id).expect("known scenario").len() {
            cols.extend(HOP_FIELDS.iter().map(|f| format!("s{id}_h{j}_{f}")));
        }
    }
    cols
}

fn hop_fields(h: &HopRecord) -> [String; 8] {
    [
        h.source.to_string(),
        h.destination.to_string(),
        u8::from(h.visible).to_string(),
        fmt_fixed(h.aer.azimuth_deg),
        fmt_fixed(h.aer.elevation_deg),
        fmt_fixed(h.aer.range_km),
        h.mean_snr_db.map(fmt_fixed).unwrap_or_default(),
        fmt_prob(h.cdf_at_threshold),
    ]
}

pub fn timeline_row(r: &TimelineRecord) -> Vec<String> {
    let mut row = vec![r.epoch_s.to_string(), r.tb_k.to_string()];
    row.extend(r.scenarios.iter().map(|s| fmt_prob(s.assessment.outage_probability)));
    row.extend(r.scenarios.iter().map(|s| s.assessment.total_transmit_power_w.to_string()));
    row.push(r.decision.chosen_scenario.to_string());
    row.push(r.decision.achieved_level.to_string());
    for s in &r.scenarios {
        for h in &s.hops {
            row.extend(hop_fields(h));
        }
    }
    row
}

pub fn write_timeline_csv(records: &[TimelineRecord], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(timeline_header()).map_err(|e| io_err(path, e))?;
    for r in records {
        w.write_record(timeline_row(r)).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Serialize)]
struct JsonHop<'a> {
    kind: &'a str,
    src: String,
    dst: String,
    visible: bool,
    az_deg: f64,
    el_deg: f64,
    range_km: f64,
    snr_db: Option<f64>,
    cdf: f64,
}

#[derive(Serialize)]
struct JsonScenario<'a> {
    id: u8,
    outage: f64,
    power_w: f64,
    hops: Vec<JsonHop<'a>>,
}

#[derive(Serialize)]
struct JsonRecord<'a> {
    epoch_s: f64,
    tb_k: f64,
    twin_scenario: u8,
    twin_level: &'a str,
    scenarios: Vec<JsonScenario<'a>>,
}

/// Same content as the CSV, one object per record.
pub fn write_timeline_json(records: &[TimelineRecord], path: &Path) -> Result<()> {
    let rows: Vec<JsonRecord> = records
        .iter()
        .map(|r| JsonRecord {
            epoch_s: r.epoch_s,
            tb_k: r.tb_k,
            twin_scenario: r.decision.chosen_scenario,
            twin_level: r.decision.achieved_level.as_str(),
            scenarios: r
                .scenarios
                .iter()
                .map(|s| JsonScenario {
                    id: s.assessment.scenario_id,
                    outage: s.assessment.outage_probability,
                    power_w: s.assessment.total_transmit_power_w,
                    hops: s
                        .hops
                        .iter()
                        .map(|h| JsonHop {
                            kind: h.kind.label(),
                            src: h.source.to_string(),
                            dst: h.destination.to_string(),
                            visible: h.visible,
                            az_deg: h.aer.azimuth_deg,
                            el_deg: h.aer.elevation_deg,
                            range_km: h.aer.range_km,
                            snr_db: h.mean_snr_db,
                            cdf: h.cdf_at_threshold,
                        })
                        .collect(),
                })
                .collect(),
        })
        .collect();
    let mut w = create(path)?;
    serde_json::to_writer(&mut w, &rows).map_err(|e| io_err(path, e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

/// One audit row per step: inputs and output of the tiered selection.
pub fn write_decisions_csv(records: &[TimelineRecord], policy: &TwinPolicy<f64>, path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header: Vec<String> = ["epoch_s", "tb_K"].iter().map(|s| s.to_string()).collect();
    header.extend(SCENARIO_IDS.iter().map(|i| format!("s{i}_outage")));
    header.extend(SCENARIO_IDS.iter().map(|i| format!("s{i}_power_W")));
    header.extend(policy.levels.iter().map(|l| format!("eligible_{}", l.name)));
    header.extend(["chosen_scenario", "achieved_level", "chosen_outage", "chosen_power_W"].map(String::from));
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for r in records {
        let mut row = vec![r.epoch_s.to_string(), r.tb_k.to_string()];
        row.extend(r.scenarios.iter().map(|s| fmt_prob(s.assessment.outage_probability)));
        row.extend(r.scenarios.iter().map(|s| s.assessment.total_transmit_power_w.to_string()));
        row.extend(r.decision.eligible_sets.iter().map(|(_, ids)| {
            ids.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(";")
        }));
        row.push(r.decision.chosen_scenario.to_string());
        row.push(r.decision.achieved_level.to_string());
        row.push(fmt_prob(r.decision.chosen_outage));
        row.push(r.decision.chosen_total_power_w.to_string());
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

/// Where each hop type appears in the scenario chains.
fn aer_source(kind: HopKind) -> (u8, usize) {
    match kind {
        HopKind::MoonToEarth => (1, 0),
        HopKind::MoonToLlo => (2, 0),
        HopKind::LloToEarth => (2, 1),
        HopKind::MoonToGeo => (3, 0),
        HopKind::GeoToEarth => (3, 1),
        HopKind::LloToGeo => (4, 1),
    }
}

/// Look angles of the selected hop of each of the six link types, per
/// epoch. `records` should hold one brightness value.
pub fn write_aer_csv(records: &[TimelineRecord], path: &Path) -> Result<()> {
    let mut w = csv_writer(path)?;
    let mut header = vec!["epoch_s".to_string()];
    for kind in HopKind::ALL {
        header.extend(
            ["src", "dst", "visible", "az_deg", "el_deg", "range_km"].map(|f| format!("{}_{f}", kind.label())),
        );
    }
    w.write_record(&header).map_err(|e| io_err(path, e))?;
    for r in records {
        let mut row = vec![r.epoch_s.to_string()];
        for kind in HopKind::ALL {
            let (id, j) = aer_source(kind);
            let h = &r.scenario(id).hops[j];
            debug_assert_eq!(h.kind, kind);
            row.extend(hop_fields(h).into_iter().take(6));
        }
        w.write_record(&row).map_err(|e| io_err(path, e))?;
    }
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ScenarioStats {
    pub scenario_id: u8,
    pub total_power_w: f64,
    pub visible_fraction: f64,
    pub mean_log10_outage: f64,
    pub median_outage: f64,
    pub min_outage: f64,
    pub max_outage: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct BrightnessSummary {
    pub tb_k: f64,
    pub records: usize,
    pub scenarios: Vec<ScenarioStats>,
    /// Fraction of steps at each achieved level, fallback included.
    pub level_occupancy: BTreeMap<String, f64>,
    pub high_fraction: f64,
    /// Steps per chosen scenario id.
    pub chosen_histogram: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct RunSummary {
    pub steps: usize,
    pub t_b_sweep_k: Vec<f64>,
    pub per_brightness: Vec<BrightnessSummary>,
}

// log10 of an outage, floored so that exact zeros stay finite
fn log10_outage(p: f64) -> f64 {
    p.max(f64::MIN_POSITIVE).log10()
}

pub fn summarize_records(tb_k: f64, records: &[TimelineRecord]) -> BrightnessSummary {
    let n = records.len();
    let frac = |count: usize| if n == 0 { f64::NAN } else { count as f64 / n as f64 };
    let scenarios = SCENARIO_IDS
        .iter()
        .map(|&id| {
            let mut v: Vec<f64> = records.iter().map(|r| r.outage(id)).collect();
            v.sort_by(f64::total_cmp);
            let visible = records.iter().filter(|r| r.scenario(id).assessment.all_visible()).count();
            ScenarioStats {
                scenario_id: id,
                total_power_w: records.first().map_or(f64::NAN, |r| r.scenario(id).assessment.total_transmit_power_w),
                visible_fraction: frac(visible),
                mean_log10_outage: if n == 0 { f64::NAN } else { v.iter().map(|&p| log10_outage(p)).sum::<f64>() / n as f64 },
                median_outage: if n == 0 { f64::NAN } else { v[n / 2] },
                min_outage: v.first().copied().unwrap_or(f64::NAN),
                max_outage: v.last().copied().unwrap_or(f64::NAN),
            }
        })
        .collect();
    let levels = [LevelName::High, LevelName::Moderate, LevelName::Low, LevelName::FallbackReserved];
    let level_occupancy: BTreeMap<String, f64> = levels
        .iter()
        .map(|l| (l.to_string(), frac(records.iter().filter(|r| r.decision.achieved_level == *l).count())))
        .collect();
    let chosen_histogram = SCENARIO_IDS
        .iter()
        .map(|&id| (id.to_string(), records.iter().filter(|r| r.decision.chosen_scenario == id).count()))
        .collect();
    BrightnessSummary {
        tb_k,
        records: n,
        scenarios,
        high_fraction: level_occupancy["High"],
        level_occupancy,
        chosen_histogram,
    }
}

pub fn summarize(timeline: &Timeline) -> RunSummary {
    RunSummary {
        steps: timeline.steps,
        t_b_sweep_k: timeline.t_b_sweep_k.clone(),
        per_brightness: timeline
            .t_b_sweep_k
            .iter()
            .enumerate()
            .map(|(i, &tb)| summarize_records(tb, timeline.for_tb(i)))
            .collect(),
    }
}

pub fn write_summary_json(summary: &RunSummary, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, summary).map_err(|e| io_err(path, e))?;
    w.write_all(b"\n").and_then(|_| w.flush()).map_err(|e| io_err(path, e))
}

/// Paths written by [`emit_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub timeline: PathBuf,
    pub decisions: PathBuf,
    pub aer: PathBuf,
    pub summary: PathBuf,
}

/// Writes every result file into `dir`, creating it if needed.
pub fn emit_outputs(timeline: &Timeline, policy: &TwinPolicy<f64>, format: OutputFormat, dir: &Path) -> Result<OutputPaths> {
    std::fs::create_dir_all(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let paths = OutputPaths {
        timeline: dir.join(match format {
            OutputFormat::Csv => "timeline.csv",
            OutputFormat::Json => "timeline.json",
        }),
        decisions: dir.join("decisions.csv"),
        aer: dir.join("aer.csv"),
        summary: dir.join("summary.json"),
    };
    match format {
        OutputFormat::Csv => write_timeline_csv(&timeline.records, &paths.timeline)?,
        OutputFormat::Json => write_timeline_json(&timeline.records, &paths.timeline)?,
    }
    write_decisions_csv(&timeline.records, policy, &paths.decisions)?;
    let first_tb = if timeline.t_b_sweep_k.is_empty() { &[][..] } else { timeline.for_tb(0) };
    write_aer_csv(first_tb, &paths.aer)?;
    write_summary_json(&summarize(timeline), &paths.summary)?;
    Ok(paths)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn number_formats() {
        assert_eq!(fmt_prob(1.234567891e-7), "1.23457e-7");
        assert_eq!(fmt_prob(1.0), "1.00000e0");
        assert_eq!(fmt_prob(0.0), "0.00000e0");
        assert_eq!(fmt_fixed(12.345678), "12.3457");
    }

    #[test]
    fn header_layout() {
        let h = timeline_header();
        assert_eq!(&h[..12], &TIMELINE_LEADING_COLUMNS.map(String::from)[..]);
        // 1 + 2 + 2 + 3 hops, eight fields each
        assert_eq!(h.len(), 12 + 8 * 8);
        assert_eq!(h[12], "s1_h1_src");
        assert_eq!(h.last().unwrap(), "s4_h3_cdf");
    }
}
