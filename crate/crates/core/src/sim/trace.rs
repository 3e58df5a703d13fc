//! CSV export of simulator counters and the per-slot trace sample.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::SimStats;
use crate::error::Result;

pub const STATS_HEADER: &str =
    "device,link,attempts,successes,collisions,dl_to_mld,dl_to_sld,busy_restarts,waits_broken";
pub const TRACE_HEADER: &str = "slot,link,time_ns,event,stations";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceEvent {
    Idle,
    Success,
    Collision,
}

impl TraceEvent {
    pub fn as_str(self) -> &'static str {
        match self {
            TraceEvent::Idle => "idle",
            TraceEvent::Success => "success",
            TraceEvent::Collision => "collision",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRow {
    pub slot: u64,
    pub link: usize,
    pub time_ns: u64,
    pub event: TraceEvent,
    /// Transmitting stations joined by `;`.
    pub stations: String,
}

pub fn write_stats_csv<W: Write>(stats: &SimStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(STATS_HEADER.split(','))?;
    for d in &stats.devices {
        w.write_record([
            d.label(),
            d.link.to_string(),
            d.attempts.to_string(),
            d.successes.to_string(),
            d.collisions.to_string(),
            d.dl_to_mld.to_string(),
            d.dl_to_sld.to_string(),
            d.busy_restarts.to_string(),
            d.waits_broken.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv<W: Write>(stats: &SimStats, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER.split(','))?;
    for r in &stats.trace {
        w.write_record([
            r.slot.to_string(),
            r.link.to_string(),
            r.time_ns.to_string(),
            r.event.as_str().to_string(),
            r.stations.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes device counters to `path` and the trace sample next to it as
/// `<stem>_trace.csv`. Returns the trace path.
pub fn trace_export(stats: &SimStats, path: &Path) -> Result<PathBuf> {
    write_stats_csv(stats, BufWriter::new(File::create(path)?))?;
    let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("sim");
    let trace_path = path.with_file_name(format!("{stem}_trace.csv"));
    write_trace_csv(stats, BufWriter::new(File::create(&trace_path)?))?;
    Ok(trace_path)
}
