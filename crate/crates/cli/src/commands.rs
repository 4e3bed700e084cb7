//! Subcommand implementations.

use std::fs;
use std::path::Path;

use anyhow::{Context, Result};

use tandem_core::coupling::RunStatus;
use tandem_core::io;
use tandem_core::metrics::{recommend_coupling, summarize_interaction, AdvisorInput, WindowPolicy};
use tandem_core::scenario::{run_scenario, ModeSpec, RunArtifacts, Scenario};
use tandem_core::SimError;

use crate::{overrides, AdviseArgs, CommonRunArgs, DumpMeshArgs};
use crate::{EXIT_INSTABILITY, EXIT_OK, EXIT_VALIDATION};

fn note_seed(seed: Option<u64>) {
    if let Some(seed) = seed {
        eprintln!("note: --seed {seed} is reserved; the engine is deterministic without randomness");
    }
}

fn print_run_summary(artifacts: &RunArtifacts, out: &Path) {
    println!("scenario: {}", artifacts.name);
    println!("status: {}", io::status_line(&artifacts.output.status));
    println!(
        "wall clock: primary {:.3} s, secondary {:.3} s",
        artifacts.output.timing.primary_seconds, artifacts.output.timing.secondary_seconds
    );
    print!("{}", io::stats_csv(artifacts));
    println!("bundle: {}", out.display());
}

fn status_exit_code(status: &RunStatus) -> u8 {
    match status {
        RunStatus::Completed => EXIT_OK,
        RunStatus::Aborted { .. } => EXIT_INSTABILITY,
    }
}

pub fn run(args: &CommonRunArgs) -> Result<u8> {
    note_seed(args.seed);
    let scenario = overrides::load_scenario(&args.scenario, &args.set, args.dt, args.duration)?;
    let artifacts = run_scenario(&scenario)?;
    io::write_bundle(&args.out, &artifacts)
        .with_context(|| format!("writing bundle to {}", args.out.display()))?;
    print_run_summary(&artifacts, &args.out);
    Ok(status_exit_code(&artifacts.output.status))
}

struct CompareRow {
    mode: &'static str,
    artifacts: RunArtifacts,
}

fn exit_horizontal_speed(artifacts: &RunArtifacts) -> f64 {
    artifacts
        .output
        .primary_trace
        .samples()
        .last()
        .map(|s| s.state.linear_velocity.horizontal().length())
        .unwrap_or(0.0)
}

pub fn compare(args: &CommonRunArgs) -> Result<u8> {
    note_seed(args.seed);
    let base = overrides::load_scenario(&args.scenario, &args.set, args.dt, args.duration)?;
    if base.stand_in.is_none() {
        return Err(SimError::Validation(
            "compare runs all three couplings; the scenario needs a [stand_in] section"
                .to_string(),
        )
        .into());
    }
    if base.primary.is_none() || base.secondary.is_none() {
        return Err(SimError::Validation(
            "compare needs both [primary] and [secondary] sections".to_string(),
        )
        .into());
    }

    let mut rows = Vec::new();
    for (mode, label) in [
        (ModeSpec::TwoWay, "two_way"),
        (ModeSpec::OneWay, "one_way"),
        (ModeSpec::Hybrid, "hybrid"),
    ] {
        let mut scenario = base.clone();
        scenario.mode = mode;
        scenario.name = format!("{}_{label}", base.name);
        let artifacts = run_scenario(&scenario)?;
        io::write_bundle(&args.out.join(label), &artifacts)
            .with_context(|| format!("writing {label} bundle"))?;
        rows.push(CompareRow {
            mode: label,
            artifacts,
        });
    }

    let mut csv = String::from(
        "mode,status,exit_horizontal_speed,max_secondary_displacement,\
         primary_phase_seconds,total_seconds\n",
    );
    let mut text = String::new();
    for row in &rows {
        let a = &row.artifacts;
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.mode,
            if a.output.status.is_completed() {
                "completed"
            } else {
                "aborted"
            },
            exit_horizontal_speed(a),
            a.output.max_secondary_displacement,
            a.output.timing.primary_seconds,
            a.output.timing.total_seconds(),
        ));
        text.push_str(&format!(
            "{:8}  status={}  exit horizontal speed={:.4} m/s  \
             max secondary displacement={:.4} m  wall={:.3}s (primary {:.3}s)\n",
            row.mode,
            io::status_line(&a.output.status),
            exit_horizontal_speed(a),
            a.output.max_secondary_displacement,
            a.output.timing.total_seconds(),
            a.output.timing.primary_seconds,
        ));
    }
    fs::create_dir_all(&args.out)?;
    fs::write(args.out.join("summary.csv"), &csv)?;
    fs::write(args.out.join("summary.txt"), &text)?;
    print!("{text}");
    println!("bundles: {}", args.out.display());

    let any_aborted = rows.iter().any(|r| !r.artifacts.output.status.is_completed());
    Ok(if any_aborted { EXIT_INSTABILITY } else { EXIT_OK })
}

pub fn advise(args: &AdviseArgs) -> Result<u8> {
    if !(args.mass.is_finite() && args.mass > 0.0) {
        return Err(SimError::Validation(format!(
            "primary mass must be positive, got {}",
            args.mass
        ))
        .into());
    }
    let text = fs::read_to_string(&args.log)
        .map_err(|e| SimError::Parse(format!("cannot read log {}: {e}", args.log.display())))?;
    let log = io::interaction_log_from_csv(&text)?;
    let stats = summarize_interaction(&log, args.mass, &WindowPolicy::default());

    println!("{}", io::STATS_CSV_HEADER);
    println!(
        "log,{},-,-,{},{},{},{},{},{}",
        args.mass,
        stats.force_min,
        stats.force_max,
        stats.force_mean,
        stats.accel_min,
        stats.accel_max,
        stats.accel_mean
    );

    if !stats.has_contact() {
        println!("no interaction detected; one-way coupling is trivially sufficient");
        return Ok(EXIT_OK);
    }

    let recommendation = recommend_coupling(
        &AdvisorInput {
            stats,
            contextually_important: !args.contextually_unimportant,
            secondary_stable_under_one_way: !args.one_way_unstable,
            stand_in_available: args.stand_in_available,
            two_way_cost_acceptable: !args.two_way_too_costly,
        },
        args.threshold,
    );
    println!("recommendation: {}", recommendation.mode);
    println!("rationale: {}", recommendation.rationale);
    if let Some(warning) = &recommendation.warning {
        println!("warning: {warning}");
    }
    Ok(EXIT_OK)
}

pub fn dump_mesh(args: &DumpMeshArgs) -> Result<u8> {
    let scenario: Scenario = overrides::load_scenario(&args.scenario, &args.set, None, None)?;
    let (setup, _) = scenario.build_runtime()?;
    let Some(system) = setup.system else {
        eprintln!("scenario has no secondary system to dump");
        return Ok(EXIT_VALIDATION);
    };
    let report = io::mesh_report(&system);
    match &args.out {
        Some(path) => fs::write(path, report)
            .with_context(|| format!("writing mesh to {}", path.display()))?,
        None => print!("{report}"),
    }
    Ok(EXIT_OK)
}
