//! On-disk artifact formats.
//!
//! A run bundle is a directory of plain-text files: primary trace CSV,
//! secondary trace CSV, interaction log CSV, a human-readable stats report,
//! a machine-readable stats row, and a status file. All floats print with
//! Rust's shortest round-trip formatting, so re-ingesting a file reproduces
//! the values bit for bit and identical runs produce identical bytes.

use std::fs;
use std::io;
use std::path::Path;

use crate::contact::{InteractionLog, InteractionStep};
use crate::coupling::RunStatus;
use crate::error::{SimError, SimResult};
use crate::math::Vec3;
use crate::scenario::RunArtifacts;

pub const INTERACTION_CSV_HEADER: &str = "t,fx,fy,fz,contact_count";
pub const STATS_CSV_HEADER: &str = "primary,primary_mass,secondary,secondary_mass,\
force_min,force_max,force_mean,accel_min,accel_max,accel_mean";

pub const PRIMARY_TRACE_FILE: &str = "primary_trace.csv";
pub const SECONDARY_TRACE_FILE: &str = "secondary_trace.csv";
pub const INTERACTION_LOG_FILE: &str = "interaction_log.csv";
pub const STATS_REPORT_FILE: &str = "stats.txt";
pub const STATS_CSV_FILE: &str = "stats.csv";
pub const STATUS_FILE: &str = "status.txt";

/// Serialize an interaction log: `t,fx,fy,fz,contact_count` per step, where
/// the force is the net interaction force on the primary (or the force that
/// would have acted on it, under one-way coupling).
pub fn interaction_log_to_csv(log: &InteractionLog) -> String {
    let mut out = String::with_capacity(32 * (log.steps.len() + 1));
    out.push_str(INTERACTION_CSV_HEADER);
    out.push('\n');
    for s in &log.steps {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.t, s.primary_force.x, s.primary_force.y, s.primary_force.z, s.contact_count
        ));
    }
    out
}

/// Parse an interaction log CSV. The diagnostic columns that never leave the
/// engine (friction excess, depth) read back as zero.
pub fn interaction_log_from_csv(text: &str) -> SimResult<InteractionLog> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == INTERACTION_CSV_HEADER => {}
        _ => {
            return Err(SimError::Parse(
                "missing interaction log CSV header".to_string(),
            ))
        }
    }
    let mut log = InteractionLog::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 5 {
            return Err(SimError::Parse(format!(
                "interaction log line {}: expected 5 fields, got {}",
                lineno + 2,
                fields.len()
            )));
        }
        let parse = |s: &str| -> SimResult<f64> {
            s.trim()
                .parse::<f64>()
                .map_err(|e| SimError::Parse(format!("interaction log line {}: {e}", lineno + 2)))
        };
        let t = parse(fields[0])?;
        let force = Vec3::new(parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
        let contact_count = fields[4].trim().parse::<u32>().map_err(|e| {
            SimError::Parse(format!("interaction log line {}: {e}", lineno + 2))
        })?;
        log.push(InteractionStep {
            t,
            primary_force: force,
            secondary_force: -force,
            contact_count,
            max_friction_excess: 0.0,
            max_depth: 0.0,
        });
    }
    Ok(log)
}

/// Machine-readable stats row in the standard column order.
pub fn stats_csv(artifacts: &RunArtifacts) -> String {
    let mass = |m: Option<f64>| m.map(|v| v.to_string()).unwrap_or_else(|| "-".to_string());
    let s = &artifacts.stats;
    format!(
        "{}\n{},{},{},{},{},{},{},{},{},{}\n",
        STATS_CSV_HEADER,
        artifacts.primary_label,
        mass(artifacts.primary_mass),
        artifacts.secondary_label,
        mass(artifacts.secondary_mass),
        s.force_min,
        s.force_max,
        s.force_mean,
        s.accel_min,
        s.accel_max,
        s.accel_mean
    )
}

/// Human-readable key: value report.
pub fn stats_report(artifacts: &RunArtifacts) -> String {
    let s = &artifacts.stats;
    let mut out = String::new();
    out.push_str(&format!("scenario: {}\n", artifacts.name));
    out.push_str(&format!("status: {}\n", status_line(&artifacts.output.status)));
    out.push_str(&format!("primary: {}\n", artifacts.primary_label));
    if let Some(m) = artifacts.primary_mass {
        out.push_str(&format!("primary_mass: {m}\n"));
    }
    out.push_str(&format!("secondary: {}\n", artifacts.secondary_label));
    if let Some(m) = artifacts.secondary_mass {
        out.push_str(&format!("secondary_mass: {m}\n"));
    }
    out.push_str(&format!("force_min: {}\n", s.force_min));
    out.push_str(&format!("force_max: {}\n", s.force_max));
    out.push_str(&format!("force_mean: {}\n", s.force_mean));
    out.push_str(&format!("accel_min: {}\n", s.accel_min));
    out.push_str(&format!("accel_max: {}\n", s.accel_max));
    out.push_str(&format!("accel_mean: {}\n", s.accel_mean));
    out.push_str(&format!("window_start: {}\n", s.window.0));
    out.push_str(&format!("window_end: {}\n", s.window.1));
    out.push_str(&format!("contact_fraction: {}\n", s.contact_fraction));
    out.push_str(&format!(
        "max_secondary_displacement: {}\n",
        artifacts.output.max_secondary_displacement
    ));
    out
}

pub fn status_line(status: &RunStatus) -> String {
    match status {
        RunStatus::Completed => "completed".to_string(),
        RunStatus::Aborted { step, t, reason } => {
            format!("aborted step={step} t={t} reason={reason}")
        }
    }
}

/// Render every bundle file as (name, contents), deterministically.
pub fn render_bundle(artifacts: &RunArtifacts) -> Vec<(&'static str, String)> {
    let secondary_csv = artifacts
        .output
        .secondary_trace
        .as_ref()
        .map(|t| t.to_csv())
        .unwrap_or_else(|| "t\n".to_string());
    vec![
        (PRIMARY_TRACE_FILE, artifacts.output.primary_trace.to_csv()),
        (SECONDARY_TRACE_FILE, secondary_csv),
        (
            INTERACTION_LOG_FILE,
            interaction_log_to_csv(&artifacts.output.interaction),
        ),
        (STATS_REPORT_FILE, stats_report(artifacts)),
        (STATS_CSV_FILE, stats_csv(artifacts)),
        (
            STATUS_FILE,
            format!("{}\n", status_line(&artifacts.output.status)),
        ),
    ]
}

/// Write the full bundle into `dir`, creating it if needed. The status file
/// is written even for aborted runs (with whatever partial traces exist).
pub fn write_bundle(dir: &Path, artifacts: &RunArtifacts) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    for (name, contents) in render_bundle(artifacts) {
        fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

/// Dump mesh topology as plain text: particle and spring tables.
pub fn mesh_report(system: &crate::spring::MassSpringSystem) -> String {
    let mut out = String::new();
    out.push_str("# particles: index,mass,x,y,z,pinned\n");
    for (i, p) in system.particles.iter().enumerate() {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            i, p.mass, p.position.x, p.position.y, p.position.z, p.pinned as u8
        ));
    }
    out.push_str("# springs: a,b,rest_length,stiffness,damping,compression_scale\n");
    for s in &system.springs {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            s.a, s.b, s.rest_length, s.stiffness, s.damping, s.compression_scale
        ));
    }
    out.push_str("# triangles: a,b,c\n");
    for t in &system.triangles {
        out.push_str(&format!("{},{},{}\n", t[0], t[1], t[2]));
    }
    out
}
