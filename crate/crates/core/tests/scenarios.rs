//! Behavioral tests for the shipped scenario files.

mod common;

use common::{load_scenario, scenario_path};
use tandem_core::math::Vec3;
use tandem_core::scenario::{run_scenario, Scenario};

#[test]
fn every_shipped_scenario_parses_and_round_trips() {
    for name in [
        "basketball_two_way",
        "basketball_one_way",
        "basketball_hybrid",
        "flag_wind",
        "bungee",
        "mat_landing",
        "water_entry",
    ] {
        let scenario = load_scenario(name);
        let reloaded = Scenario::from_toml_str(&scenario.to_toml_string().unwrap()).unwrap();
        assert_eq!(scenario, reloaded, "{name} does not round-trip");
        assert!(scenario_path(name).exists());
    }
}

#[test]
fn shipped_scenarios_complete_without_instability() {
    // The slow basketball runs are covered by the acceptance suite; this
    // covers the rest at their configured steps.
    for name in ["flag_wind", "bungee", "mat_landing", "water_entry"] {
        let artifacts = run_scenario(&load_scenario(name)).unwrap();
        assert!(
            artifacts.output.status.is_completed(),
            "{name}: {:?}",
            artifacts.output.status
        );
    }
}

#[test]
fn flag_streams_with_the_wind() {
    let scenario = load_scenario("flag_wind");
    let artifacts = run_scenario(&scenario).unwrap();
    let trace = artifacts.output.secondary_trace.as_ref().unwrap();
    let last = trace.samples.last().unwrap();
    assert!(last.t > 4.9);

    let (setup, _) = scenario.build_runtime().unwrap();
    let system = setup.system.unwrap();
    let mut pin_centroid = Vec3::ZERO;
    let mut pins = 0usize;
    for (i, p) in system.particles.iter().enumerate() {
        if p.pinned {
            pin_centroid += last.positions[i];
            pins += 1;
        }
    }
    let pin_centroid = pin_centroid / pins as f64;
    let mut mean_extension = Vec3::ZERO;
    for (i, p) in system.particles.iter().enumerate() {
        if !p.pinned {
            mean_extension += last.positions[i] - pin_centroid;
        }
    }
    let direction = mean_extension.normalized(1e-12).unwrap();
    let wind = Vec3::from_array(scenario.environment.wind.as_ref().unwrap().uniform)
        .normalized(1e-12)
        .unwrap();
    let angle = direction.dot(wind).clamp(-1.0, 1.0).acos().to_degrees();
    assert!(angle < 15.0, "flag points {angle:.1} degrees off the wind");
}

#[test]
fn bungee_jumper_rebounds_and_loads_the_cord() {
    let scenario = load_scenario("bungee");
    let artifacts = run_scenario(&scenario).unwrap();
    let samples = artifacts.output.primary_trace.samples();
    let min_y = samples
        .iter()
        .map(|s| s.state.position.y)
        .fold(f64::INFINITY, f64::min);
    let min_index = samples
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.state.position.y.total_cmp(&b.1.state.position.y))
        .unwrap()
        .0;
    let after = &samples[min_index..];
    let rebound_y = after
        .iter()
        .map(|s| s.state.position.y)
        .fold(f64::NEG_INFINITY, f64::max);
    let start_y = samples[0].state.position.y;
    assert!(min_y < start_y - 1.0, "jumper never fell: min {min_y:.2}");
    assert!(
        rebound_y > min_y + 0.5,
        "no rebound: min {min_y:.2}, later max {rebound_y:.2}"
    );

    // Peak cord tension on the jumper well above body weight.
    let weight = scenario.primary.as_ref().unwrap().mass * 9.81;
    let peak = artifacts
        .output
        .interaction
        .steps
        .iter()
        .map(|s| s.primary_force.length())
        .fold(0.0, f64::max);
    assert!(peak > weight, "peak tension {peak:.0} N vs weight {weight:.0} N");

    // Energy bound: the cord cannot stretch further than dropping the full
    // apex height into spring energy allows. Cord: 8 segments at 4400 N/m
    // in series = 550 N/m overall, anchored at y = 10, slack length 5.
    let apex = samples
        .iter()
        .map(|s| s.state.position.y)
        .fold(f64::NEG_INFINITY, f64::max);
    let overall_stiffness = 4400.0 / 8.0;
    let mass = scenario.primary.as_ref().unwrap().mass;
    // m g (apex - y_min) >= 1/2 k x^2 with x the stretch below the slack point.
    let slack_y = 10.0 - 5.0 - 0.25; // anchor - cord length - attachment offset
    let stretch = (slack_y - min_y).max(0.0);
    let spring_energy = 0.5 * overall_stiffness * stretch * stretch;
    let drop_energy = mass * 9.81 * (apex - min_y);
    assert!(
        spring_energy <= drop_energy * 1.05,
        "stretch {stretch:.2} m stores {spring_energy:.0} J but only {drop_energy:.0} J was available"
    );
}

#[test]
fn mat_landing_softens_and_deforms() {
    let scenario = load_scenario("mat_landing");
    let artifacts = run_scenario(&scenario).unwrap();
    // Phase 1: the spring bed arrests the box above the floor.
    let min_y = artifacts
        .output
        .primary_trace
        .samples()
        .iter()
        .map(|s| s.state.position.y)
        .fold(f64::INFINITY, f64::min);
    let plane = scenario.stand_in.as_ref().unwrap().plane_height.unwrap();
    let half_height = 0.1;
    assert!(min_y - half_height < plane, "box never reached the bed");
    assert!(min_y - half_height > plane - 0.25, "bed failed to arrest the box");
    // Phase 2: the replayed box actually presses into the mat mesh.
    assert!(artifacts.output.interaction.has_contact());
    assert!(artifacts.output.max_secondary_displacement > 0.02);
}

#[test]
fn water_entry_drag_slows_the_drop() {
    let scenario = load_scenario("water_entry");
    let artifacts = run_scenario(&scenario).unwrap();
    let samples = artifacts.output.primary_trace.samples();
    let surface = scenario.stand_in.as_ref().unwrap().surface_height.unwrap();
    let entry_speed = samples
        .iter()
        .find(|s| s.state.position.y < surface)
        .unwrap()
        .state
        .linear_velocity
        .length();
    let final_speed = samples.last().unwrap().state.linear_velocity.length();
    assert!(
        final_speed < 0.5 * entry_speed,
        "drag barely slowed the body: {entry_speed:.2} -> {final_speed:.2}"
    );
    // Terminal speed under pure vertical drag: m g / c.
    let mass = scenario.primary.as_ref().unwrap().mass;
    let drag = scenario.stand_in.as_ref().unwrap().drag.unwrap();
    let terminal = mass * 9.81 / drag;
    assert!((samples.last().unwrap().state.linear_velocity.y.abs() - terminal).abs() < 0.05 * terminal);
    // The drag log is the run's interaction record here (no secondary).
    assert!(artifacts.output.interaction.has_contact());
}

#[test]
fn two_way_reduces_sideways_speed_of_a_spinning_shallow_entry() {
    let scenario = load_scenario("basketball_two_way");
    let artifacts = run_scenario(&scenario).unwrap();
    let entry = Vec3::from_array(scenario.primary.as_ref().unwrap().velocity)
        .horizontal()
        .length();
    let exit = artifacts
        .output
        .primary_trace
        .samples()
        .last()
        .unwrap()
        .state
        .linear_velocity
        .horizontal()
        .length();
    assert!(
        exit < entry,
        "exit horizontal speed {exit:.3} should fall below entry {entry:.3}"
    );
}

#[test]
fn dead_center_drop_stays_centered() {
    let mut scenario = load_scenario("basketball_two_way");
    {
        let primary = scenario.primary.as_mut().unwrap();
        primary.position = [0.0, 0.3, 0.0];
        primary.velocity = [0.0, -1.5, 0.0];
        primary.angular_velocity = [0.0, 0.0, 0.0];
        // Narrow the funnel so the falling ball genuinely wedges into it.
        scenario.secondary.as_mut().unwrap().taper = 0.7;
    }
    scenario.duration = 0.8;
    let artifacts = run_scenario(&scenario).unwrap();
    assert!(artifacts.output.status.is_completed());
    assert!(artifacts.output.interaction.has_contact());
    for s in artifacts.output.primary_trace.samples() {
        assert!(
            s.state.linear_velocity.horizontal().length() <= 1e-9,
            "lateral speed appeared at t={}",
            s.t
        );
    }
}

#[test]
fn one_way_primary_is_independent_of_the_secondary() {
    let base = load_scenario("basketball_one_way");
    let baseline = run_scenario(&base).unwrap();
    let mut changed = base.clone();
    {
        let secondary = changed.secondary.as_mut().unwrap();
        secondary.rings = 4;
        secondary.spokes = 8;
        secondary.mass = 0.5;
        secondary.material = "cloth".to_string();
    }
    let altered = run_scenario(&changed).unwrap();
    assert_eq!(
        baseline.output.primary_trace.to_csv(),
        altered.output.primary_trace.to_csv(),
        "primary trace must not depend on the secondary configuration"
    );
}

#[test]
fn ball_missing_the_net_leaves_all_modes_contact_free() {
    for name in ["basketball_two_way", "basketball_one_way", "basketball_hybrid"] {
        let mut scenario = load_scenario(name);
        {
            let primary = scenario.primary.as_mut().unwrap();
            primary.position = [-3.0, 2.0, 0.0];
            primary.velocity = [0.2, 0.3, 0.0];
        }
        scenario.duration = 0.5;
        let artifacts = run_scenario(&scenario).unwrap();
        assert!(
            !artifacts.output.interaction.has_contact(),
            "{name} unexpectedly made contact"
        );
        assert_eq!(artifacts.stats.contact_fraction, 0.0);
    }
}
