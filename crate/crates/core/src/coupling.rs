//! Coupling pipelines: two-way lockstep, one-way record-then-drive, and
//! hybrid stand-in coupling.
//!
//! Two-way advances both systems on a shared clock, computing interaction
//! forces once per step from the joint state and applying them equal and
//! opposite. One-way simulates the primary alone, records its motion, and
//! replays the recording as a kinematic obstacle driving the secondary.
//! Hybrid is one-way with a cheap stand-in force acting on the primary
//! during the recording pass.

use std::time::Instant;

use crate::aero::{self, AeroModel, WindField};
use crate::contact::{
    self, apply_one_way, apply_two_way, collect_contacts, Contact, ContactForceModel,
    InteractionLog, InteractionStep,
};
use crate::error::{SimError, SimResult};
use crate::math::Vec3;
use crate::metrics::{detect_instability_body, detect_instability_particles, InstabilityKind, Stability};
use crate::rigid::{BodyState, RigidBody, Shape};
use crate::sim::{step_count, step_time};
use crate::spring::MassSpringSystem;
use crate::standin::{StandInForce, StandInModel};
use crate::trace::{MotionTrace, SecondaryTrace};

/// Strategy for communicating interaction forces between the two systems.
#[derive(Debug, Clone, PartialEq)]
pub enum CouplingMode {
    TwoWay,
    OneWay,
    Hybrid(StandInModel),
}

impl CouplingMode {
    pub fn kind(&self) -> crate::metrics::CouplingKind {
        match self {
            CouplingMode::TwoWay => crate::metrics::CouplingKind::TwoWay,
            CouplingMode::OneWay => crate::metrics::CouplingKind::OneWay,
            CouplingMode::Hybrid(_) => crate::metrics::CouplingKind::Hybrid,
        }
    }
}

/// A stiff zero-rest-length spring tying a secondary particle to a
/// body-frame point on the primary; how a cord end grabs a jumper.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attachment {
    pub particle: usize,
    /// Attachment point in the body frame.
    pub body_point: Vec3,
    pub stiffness: f64,
    pub damping: f64,
}

impl Attachment {
    /// Force on the attached particle given the body's current state.
    fn force_on_particle(&self, body: &BodyState, system: &MassSpringSystem) -> (Vec3, Vec3) {
        let anchor = body.position + body.orientation.rotate(self.body_point);
        let anchor_velocity = body.velocity_at_point(anchor);
        let p = &system.particles[self.particle];
        let f = (anchor - p.position) * self.stiffness
            + (anchor_velocity - p.velocity) * self.damping;
        (f, anchor)
    }
}

/// External conditions shared by both systems.
#[derive(Debug, Clone, PartialEq)]
pub struct Environment {
    pub gravity: Vec3,
    pub wind: Option<WindField>,
    pub aero: Option<AeroModel>,
    /// Optional ground plane applying penalty contact to secondary particles.
    pub floor_height: Option<f64>,
}

impl Default for Environment {
    fn default() -> Self {
        Environment {
            gravity: Vec3::new(0.0, -9.81, 0.0),
            wind: None,
            aero: None,
            floor_height: None,
        }
    }
}

/// Fully resolved inputs for a coupled run.
#[derive(Debug, Clone, PartialEq)]
pub struct CoupledSystems {
    pub body: Option<RigidBody>,
    pub system: Option<MassSpringSystem>,
    pub contact_model: ContactForceModel,
    pub attachments: Vec<Attachment>,
    pub environment: Environment,
    pub dt_primary: f64,
    pub dt_secondary: f64,
    pub duration: f64,
    pub output_interval: f64,
    pub velocity_ceiling: f64,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum RunStatus {
    Completed,
    Aborted { step: u64, t: f64, reason: String },
}

impl RunStatus {
    pub fn is_completed(&self) -> bool {
        matches!(self, RunStatus::Completed)
    }
}

/// Wall-clock cost of each pass; diagnostic only, never serialized into
/// run bundles.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunTiming {
    pub primary_seconds: f64,
    pub secondary_seconds: f64,
}

impl RunTiming {
    pub fn total_seconds(&self) -> f64 {
        self.primary_seconds + self.secondary_seconds
    }
}

/// Everything a coupled run produces.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Primary body states at the output interval.
    pub primary_trace: MotionTrace,
    /// Secondary particle positions at the output interval.
    pub secondary_trace: Option<SecondaryTrace>,
    pub interaction: InteractionLog,
    pub status: RunStatus,
    /// Largest particle displacement from rest seen at any step.
    pub max_secondary_displacement: f64,
    /// Integrated reaction absorbed by pinned particles, for momentum audits.
    pub anchor_impulse: Vec3,
    pub timing: RunTiming,
}

fn unstable_reason(which: &str, s: &Stability) -> String {
    match s {
        Stability::Stable => unreachable!(),
        Stability::Unstable { entity, kind } => match kind {
            InstabilityKind::NonFinite => format!("{which} {entity} has a non-finite state"),
            InstabilityKind::SpeedCeiling { speed } => {
                format!("{which} {entity} exceeded the velocity ceiling ({speed:.3e} m/s)")
            }
        },
    }
}

/// Steps per output sample: the output interval rounded to the nearest
/// whole number of steps (at least one). Sample times stay exact step
/// multiples; a requested interval that is not a multiple of dt is realized
/// as the closest one that is.
fn sample_stride(output_interval: f64, dt: f64) -> SimResult<u64> {
    if !(output_interval.is_finite() && output_interval > 0.0) {
        return Err(SimError::InvalidParameter(format!(
            "output interval must be positive, got {output_interval}"
        )));
    }
    Ok((output_interval / dt).round().max(1.0) as u64)
}

fn particle_positions(system: &MassSpringSystem) -> Vec<Vec3> {
    system.particles.iter().map(|p| p.position).collect()
}

fn apply_floor(system: &mut MassSpringSystem, floor_height: f64, model: &ContactForceModel) {
    let plane_point = Vec3::new(0.0, floor_height, 0.0);
    let up = Vec3::new(0.0, 1.0, 0.0);
    for i in 0..system.particles.len() {
        let p = &system.particles[i];
        if let Some(geometry) = contact::detect_point_halfspace(p.position, plane_point, up) {
            let c = Contact::new(i, geometry, p.velocity);
            let f = contact::contact_force(&c, model);
            system.particles[i].force_accum += f;
        }
    }
}

/// Apply attachment spring forces. In two-way mode the body receives the
/// reactions; in one-way mode it only has the would-be force logged.
fn apply_attachments(
    body_state: &BodyState,
    body: Option<&mut RigidBody>,
    system: &mut MassSpringSystem,
    attachments: &[Attachment],
    rec: &mut InteractionStep,
) {
    if attachments.is_empty() {
        return;
    }
    let mut reactions = Vec::with_capacity(attachments.len());
    for att in attachments {
        let (f, anchor) = att.force_on_particle(body_state, system);
        system.particles[att.particle].force_accum += f;
        rec.secondary_force += f;
        rec.primary_force += -f;
        if f != Vec3::ZERO {
            rec.contact_count += 1;
        }
        reactions.push((-f, anchor));
    }
    if let Some(body) = body {
        for (f, anchor) in reactions {
            body.apply_force_at_point(f, anchor);
        }
    }
}

/// Advance the primary alone (optionally against a stand-in), recording a
/// fine-grained motion trace at every step.
///
/// Uses the large-step advance that is exact under constant acceleration, so
/// a free body reproduces the ballistic closed form at any step size. When a
/// stand-in is present its force is held constant over each step.
fn run_primary_phase(
    body: &mut RigidBody,
    gravity: Vec3,
    stand_in: Option<&StandInModel>,
    dt: f64,
    duration: f64,
    velocity_ceiling: f64,
) -> SimResult<(MotionTrace, InteractionLog, RunStatus)> {
    let steps = step_count(duration, dt)?;
    let mut trace = MotionTrace::new(dt);
    trace.push(0.0, body.state());
    let mut stand_in_log = InteractionLog::new();
    for k in 0..steps {
        let t = step_time(k, dt);
        if let Some(model) = stand_in {
            let eff = model.effect(&body.state());
            body.apply_force(eff.force);
            body.apply_torque(eff.torque);
            stand_in_log.push(InteractionStep {
                t,
                primary_force: eff.force,
                secondary_force: -eff.force,
                contact_count: eff.active_sites,
                max_friction_excess: 0.0,
                max_depth: 0.0,
            });
        }
        if let Err(e) = body.step_free_flight(gravity, dt) {
            return Ok((
                trace,
                stand_in_log,
                RunStatus::Aborted {
                    step: k,
                    t,
                    reason: format!("primary phase: {e}"),
                },
            ));
        }
        let stability = detect_instability_body(body, velocity_ceiling);
        if !stability.is_stable() {
            return Ok((
                trace,
                stand_in_log,
                RunStatus::Aborted {
                    step: k,
                    t,
                    reason: format!("primary phase: {}", unstable_reason("body", &stability)),
                },
            ));
        }
        trace.push(step_time(k + 1, dt), body.state());
    }
    Ok((trace, stand_in_log, RunStatus::Completed))
}

struct SecondaryPhaseResult {
    trace: SecondaryTrace,
    log: InteractionLog,
    status: RunStatus,
    max_displacement: f64,
    anchor_impulse: Vec3,
}

/// Advance the secondary system, optionally driven by a replayed body trace
/// acting as a kinematic obstacle.
fn run_secondary_phase(
    system: &mut MassSpringSystem,
    driver: Option<(&MotionTrace, Shape)>,
    setup: &CoupledSystems,
) -> SimResult<SecondaryPhaseResult> {
    let dt = setup.dt_secondary;
    // A truncated driver trace (aborted primary phase) bounds the replay.
    let duration = match &driver {
        Some((trace, _)) => setup.duration.min(trace.t_max()),
        None => setup.duration,
    };
    let steps = if (duration - setup.duration).abs() <= 1e-12 {
        step_count(setup.duration, dt)?
    } else {
        (duration / dt).floor() as u64
    };
    let stride = sample_stride(setup.output_interval, dt)?;

    let attached: Vec<usize> = setup.attachments.iter().map(|a| a.particle).collect();
    let mut out = SecondaryPhaseResult {
        trace: SecondaryTrace::new(dt * stride as f64),
        log: InteractionLog::new(),
        status: RunStatus::Completed,
        max_displacement: 0.0,
        anchor_impulse: Vec3::ZERO,
    };
    out.trace.push(0.0, particle_positions(system));

    for k in 0..steps {
        let t = step_time(k, dt);
        let mut rec = InteractionStep::empty(t);
        if let Some((trace, shape)) = &driver {
            let body_state = match trace.interpolate(t) {
                Ok(s) => s,
                Err(e) => {
                    out.status = RunStatus::Aborted {
                        step: k,
                        t,
                        reason: format!("secondary phase: {e}"),
                    };
                    break;
                }
            };
            let contacts = match collect_contacts(system, &body_state, shape, &attached) {
                Ok(c) => c,
                Err(e) => {
                    out.status = RunStatus::Aborted {
                        step: k,
                        t,
                        reason: format!("secondary phase: {e}"),
                    };
                    break;
                }
            };
            rec = apply_one_way(t, system, &contacts, &setup.contact_model);
            apply_attachments(&body_state, None, system, &setup.attachments, &mut rec);
        }
        if let (Some(wind), Some(model)) = (&setup.environment.wind, &setup.environment.aero) {
            aero::apply_to_system(system, wind, model, t);
        }
        if let Some(floor) = setup.environment.floor_height {
            apply_floor(system, floor, &setup.contact_model);
        }
        out.log.push(rec);
        if let Err(e) = system.step(setup.environment.gravity, &[], dt) {
            out.status = RunStatus::Aborted {
                step: k,
                t,
                reason: format!("secondary phase: {e}"),
            };
            break;
        }
        out.anchor_impulse += system.pinned_force_sum * dt;
        out.max_displacement = out.max_displacement.max(system.max_displacement_from_rest());
        let stability = detect_instability_particles(system, setup.velocity_ceiling);
        if !stability.is_stable() {
            out.status = RunStatus::Aborted {
                step: k,
                t,
                reason: format!(
                    "secondary phase: {}",
                    unstable_reason("particle", &stability)
                ),
            };
            break;
        }
        if (k + 1) % stride == 0 {
            out.trace.push(step_time(k + 1, dt), particle_positions(system));
        }
    }
    Ok(out)
}

/// Two-way coupled run: both systems advance in lockstep on a shared clock,
/// `dt = min(dt_primary, dt_secondary)`, exchanging equal-and-opposite
/// interaction forces computed once per step from the joint state.
pub fn run_two_way(mut setup: CoupledSystems) -> SimResult<RunOutput> {
    let mut body = setup.body.take().ok_or_else(|| {
        SimError::Validation("two-way coupling requires a primary body".to_string())
    })?;
    let mut system = setup.system.take().ok_or_else(|| {
        SimError::Validation("two-way coupling requires a secondary system".to_string())
    })?;
    let dt = setup.dt_primary.min(setup.dt_secondary);
    let steps = step_count(setup.duration, dt)?;
    let stride = sample_stride(setup.output_interval, dt)?;
    let gravity = setup.environment.gravity;

    let started = Instant::now();
    let mut primary_trace = MotionTrace::new(dt * stride as f64);
    let mut secondary_trace = SecondaryTrace::new(dt * stride as f64);
    primary_trace.push(0.0, body.state());
    secondary_trace.push(0.0, particle_positions(&system));
    let mut log = InteractionLog::new();
    let mut status = RunStatus::Completed;
    let mut max_displacement: f64 = 0.0;
    let mut anchor_impulse = Vec3::ZERO;

    let attached: Vec<usize> = setup.attachments.iter().map(|a| a.particle).collect();
    for k in 0..steps {
        let t = step_time(k, dt);
        let contacts = match collect_contacts(&system, &body.state(), &body.shape, &attached) {
            Ok(c) => c,
            Err(e) => {
                status = RunStatus::Aborted {
                    step: k,
                    t,
                    reason: e.to_string(),
                };
                break;
            }
        };
        let mut rec = apply_two_way(t, &mut body, &mut system, &contacts, &setup.contact_model);
        let body_state = body.state();
        apply_attachments(
            &body_state,
            Some(&mut body),
            &mut system,
            &setup.attachments,
            &mut rec,
        );
        if let (Some(wind), Some(model)) = (&setup.environment.wind, &setup.environment.aero) {
            aero::apply_to_system(&mut system, wind, model, t);
        }
        if let Some(floor) = setup.environment.floor_height {
            apply_floor(&mut system, floor, &setup.contact_model);
        }
        log.push(rec);

        if let Err(e) = body.step(gravity, dt) {
            status = RunStatus::Aborted {
                step: k,
                t,
                reason: e.to_string(),
            };
            break;
        }
        if let Err(e) = system.step(gravity, &[], dt) {
            status = RunStatus::Aborted {
                step: k,
                t,
                reason: e.to_string(),
            };
            break;
        }
        anchor_impulse += system.pinned_force_sum * dt;
        max_displacement = max_displacement.max(system.max_displacement_from_rest());

        let body_stability = detect_instability_body(&body, setup.velocity_ceiling);
        if !body_stability.is_stable() {
            status = RunStatus::Aborted {
                step: k,
                t,
                reason: unstable_reason("body", &body_stability),
            };
            break;
        }
        let particle_stability = detect_instability_particles(&system, setup.velocity_ceiling);
        if !particle_stability.is_stable() {
            status = RunStatus::Aborted {
                step: k,
                t,
                reason: unstable_reason("particle", &particle_stability),
            };
            break;
        }

        if (k + 1) % stride == 0 {
            let t_next = step_time(k + 1, dt);
            primary_trace.push(t_next, body.state());
            secondary_trace.push(t_next, particle_positions(&system));
        }
    }

    let elapsed = started.elapsed().as_secs_f64();
    Ok(RunOutput {
        primary_trace,
        secondary_trace: Some(secondary_trace),
        interaction: log,
        status,
        max_secondary_displacement: max_displacement,
        anchor_impulse,
        timing: RunTiming {
            primary_seconds: elapsed,
            secondary_seconds: 0.0,
        },
    })
}

fn run_recorded(mut setup: CoupledSystems, stand_in: Option<&StandInModel>) -> SimResult<RunOutput> {
    let body = setup.body.take();
    let mut system = setup.system.take();

    // Phase 1: primary alone (plus stand-in when hybrid).
    let primary_started = Instant::now();
    let mut fine_trace = None;
    let mut shape = None;
    let mut stand_in_log = InteractionLog::new();
    let mut status = RunStatus::Completed;
    if let Some(mut body) = body {
        let (trace, log, phase_status) = run_primary_phase(
            &mut body,
            setup.environment.gravity,
            stand_in,
            setup.dt_primary,
            setup.duration,
            setup.velocity_ceiling,
        )?;
        shape = Some(body.shape);
        fine_trace = Some(trace);
        stand_in_log = log;
        status = phase_status;
    }
    let primary_seconds = primary_started.elapsed().as_secs_f64();

    // Phase 2: replay drives the secondary.
    let secondary_started = Instant::now();
    let mut secondary_trace = None;
    let interaction;
    let mut max_displacement = 0.0;
    let mut anchor_impulse = Vec3::ZERO;
    if let Some(system) = system.as_mut() {
        let driver = fine_trace
            .as_ref()
            .and_then(|t| shape.map(|s| (t, s)));
        let result = run_secondary_phase(system, driver, &setup)?;
        secondary_trace = Some(result.trace);
        interaction = result.log;
        max_displacement = result.max_displacement;
        anchor_impulse = result.anchor_impulse;
        if status.is_completed() {
            status = result.status;
        }
    } else {
        // No secondary system: the stand-in interactions are the only
        // interaction record the run has (e.g. a body dropping into a drag
        // field with the fluid itself out of scope).
        interaction = stand_in_log;
    }
    let secondary_seconds = secondary_started.elapsed().as_secs_f64();

    let primary_trace = match &fine_trace {
        Some(fine) => {
            let stride = sample_stride(setup.output_interval, setup.dt_primary)?;
            fine.downsample(stride as usize)
        }
        None => MotionTrace::new(setup.output_interval),
    };

    Ok(RunOutput {
        primary_trace,
        secondary_trace,
        interaction,
        status,
        max_secondary_displacement: max_displacement,
        anchor_impulse,
        timing: RunTiming {
            primary_seconds,
            secondary_seconds,
        },
    })
}

/// One-way coupled run: the primary is simulated alone and recorded, then
/// the recording drives the secondary. The primary never feels the
/// interaction, so its trace is identical to a primary-alone run.
pub fn run_one_way(setup: CoupledSystems) -> SimResult<RunOutput> {
    run_recorded(setup, None)
}

/// Hybrid run: one-way, except the stand-in acts on the primary during the
/// recording pass. A stand-in with zero coefficients degenerates to
/// [`run_one_way`] bit for bit.
pub fn run_hybrid(setup: CoupledSystems, stand_in: &StandInModel) -> SimResult<RunOutput> {
    run_recorded(setup, Some(stand_in))
}

/// Dispatch on the coupling mode.
pub fn run_coupled(setup: CoupledSystems, mode: &CouplingMode) -> SimResult<RunOutput> {
    match mode {
        CouplingMode::TwoWay => run_two_way(setup),
        CouplingMode::OneWay => run_one_way(setup),
        CouplingMode::Hybrid(stand_in) => run_hybrid(setup, stand_in),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rigid::ballistic_position;

    fn ball_at() -> RigidBody {
        RigidBody::new(Shape::Sphere { radius: 0.12 }, 0.68).unwrap()
    }

    fn free_ball_setup(duration: f64) -> CoupledSystems {
        let mut body = ball_at();
        body.position = Vec3::new(-1.0, 1.5, 0.0);
        body.linear_velocity = Vec3::new(2.0, 1.0, 0.0);
        CoupledSystems {
            body: Some(body),
            system: None,
            contact_model: ContactForceModel::default(),
            attachments: Vec::new(),
            environment: Environment::default(),
            dt_primary: 1e-4,
            dt_secondary: 1e-4,
            duration,
            output_interval: 0.05,
            velocity_ceiling: 1e4,
        }
    }

    #[test]
    fn zero_duration_yields_initial_state_only() {
        let out = run_one_way(free_ball_setup(0.0)).unwrap();
        assert_eq!(out.primary_trace.len(), 1);
        assert!(out.status.is_completed());
    }

    #[test]
    fn free_flight_matches_ballistic_oracle() {
        let setup = free_ball_setup(1.0);
        let x0 = setup.body.as_ref().unwrap().position;
        let v0 = setup.body.as_ref().unwrap().linear_velocity;
        let g = setup.environment.gravity;
        let out = run_one_way(setup).unwrap();
        for s in out.primary_trace.samples() {
            let exact = ballistic_position(x0, v0, g, s.t);
            let err = (s.state.position - exact).length();
            assert!(err <= 1e-6 * exact.length().max(1.0), "t={} err={}", s.t, err);
        }
    }

    #[test]
    fn sample_times_are_exact_step_multiples() {
        let out = run_one_way(free_ball_setup(1.0)).unwrap();
        let stride = 500u64; // 0.05 s at dt 1e-4
        for (j, s) in out.primary_trace.samples().iter().enumerate() {
            assert_eq!(s.t, (j as u64 * stride) as f64 * 1e-4);
        }
    }
}
