//! Penalty contact between secondary particles and the primary body.
//!
//! The normal force combines a restoring term proportional to penetration
//! depth with a stabilizing damping term proportional to the approach rate,
//! clamped non-adhesive. Friction is a viscous tangential resistance capped
//! by the Coulomb cone, which avoids stick/slip chatter at small steps while
//! keeping |tangential| <= mu * |normal| everywhere.

use crate::error::{SimError, SimResult};
use crate::math::Vec3;
use crate::rigid::{BodyState, RigidBody, Shape};
use crate::spring::MassSpringSystem;

/// Penalty contact parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactForceModel {
    /// Penetration-error correction stiffness (N/m).
    pub restore_stiffness: f64,
    /// Impact damping along the contact normal (N s/m).
    pub impact_damping: f64,
    /// Viscous tangential resistance before the Coulomb cap (N s/m).
    pub tangential_damping: f64,
    /// Coulomb friction coefficient.
    pub friction: f64,
}

impl Default for ContactForceModel {
    fn default() -> Self {
        ContactForceModel {
            restore_stiffness: 5e4,
            impact_damping: 2.0,
            tangential_damping: 20.0,
            friction: 0.4,
        }
    }
}

/// Geometric overlap between a query point and a primary-body surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactGeometry {
    /// Unit normal, outward from the primary body.
    pub normal: Vec3,
    /// Penetration depth (> 0).
    pub depth: f64,
    /// World-space contact point.
    pub point: Vec3,
}

/// A particle-body contact with the bookkeeping the force model needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub particle: usize,
    pub normal: Vec3,
    pub depth: f64,
    pub point: Vec3,
    /// Particle velocity minus body surface-point velocity.
    pub relative_velocity: Vec3,
}

impl Contact {
    pub fn new(particle: usize, geometry: ContactGeometry, relative_velocity: Vec3) -> Contact {
        Contact {
            particle,
            normal: geometry.normal,
            depth: geometry.depth,
            point: geometry.point,
            relative_velocity,
        }
    }
}

/// Point-vs-sphere overlap test. Touching (distance == radius) is
/// contact-free; a point exactly at the centre has no defined normal.
pub fn detect_point_sphere(
    point: Vec3,
    center: Vec3,
    radius: f64,
) -> SimResult<Option<ContactGeometry>> {
    let offset = point - center;
    let dist = offset.length();
    if dist >= radius {
        return Ok(None);
    }
    if dist <= 1e-12 {
        return Err(SimError::DegenerateContact);
    }
    Ok(Some(ContactGeometry {
        normal: offset / dist,
        depth: radius - dist,
        point,
    }))
}

/// Point-vs-halfspace overlap test; the halfspace is everything below the
/// plane through `plane_point` with outward `plane_normal`.
pub fn detect_point_halfspace(
    point: Vec3,
    plane_point: Vec3,
    plane_normal: Vec3,
) -> Option<ContactGeometry> {
    let signed = (point - plane_point).dot(plane_normal);
    if signed < 0.0 {
        Some(ContactGeometry {
            normal: plane_normal,
            depth: -signed,
            point,
        })
    } else {
        None
    }
}

/// Point-vs-oriented-box overlap test. The normal is taken from the face of
/// least penetration, resolved in the box's world orientation.
pub fn detect_point_box(
    point: Vec3,
    center: Vec3,
    orientation: crate::math::Quat,
    half_extents: Vec3,
) -> Option<ContactGeometry> {
    let local = orientation.rotate_inv(point - center);
    let dx = half_extents.x - local.x.abs();
    let dy = half_extents.y - local.y.abs();
    let dz = half_extents.z - local.z.abs();
    if dx <= 0.0 || dy <= 0.0 || dz <= 0.0 {
        return None;
    }
    let (depth, local_normal) = if dx <= dy && dx <= dz {
        (dx, Vec3::new(local.x.signum(), 0.0, 0.0))
    } else if dy <= dz {
        (dy, Vec3::new(0.0, local.y.signum(), 0.0))
    } else {
        (dz, Vec3::new(0.0, 0.0, local.z.signum()))
    };
    Some(ContactGeometry {
        normal: orientation.rotate(local_normal),
        depth,
        point,
    })
}

/// Clamp a tangential force into the Coulomb cone, preserving direction.
pub fn coulomb_clamp(f_tangential: Vec3, f_normal_magnitude: f64, mu: f64) -> Vec3 {
    let limit = mu * f_normal_magnitude;
    let mag = f_tangential.length();
    if mag <= limit || mag == 0.0 {
        f_tangential
    } else {
        f_tangential * (limit / mag)
    }
}

/// Normal and tangential components of the penalty force on the particle.
pub fn contact_force_split(contact: &Contact, model: &ContactForceModel) -> (Vec3, Vec3) {
    let approach = contact.relative_velocity.dot(contact.normal);
    let normal_mag =
        (model.restore_stiffness * contact.depth - model.impact_damping * approach).max(0.0);
    let normal = contact.normal * normal_mag;
    let v_t = contact.relative_velocity - contact.normal * approach;
    let speed_t = v_t.length();
    let tangential = if speed_t > 1e-12 && normal_mag > 0.0 {
        let raw = v_t * (-model.tangential_damping);
        coulomb_clamp(raw, normal_mag, model.friction)
    } else {
        Vec3::ZERO
    };
    (normal, tangential)
}

/// Total penalty force on the secondary particle.
pub fn contact_force(contact: &Contact, model: &ContactForceModel) -> Vec3 {
    let (normal, tangential) = contact_force_split(contact, model);
    normal + tangential
}

/// Per-step interaction record: what acted on the primary, what acted on the
/// secondary, and diagnostics for the friction-cone and penetration audits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionStep {
    pub t: f64,
    /// Net force applied to the primary body this step (the force that WOULD
    /// have applied, under one-way coupling).
    pub primary_force: Vec3,
    /// Sum of interaction forces applied to secondary particles.
    pub secondary_force: Vec3,
    pub contact_count: u32,
    /// Largest |tangential| - mu * |normal| over this step's contacts.
    pub max_friction_excess: f64,
    /// Deepest penetration over this step's contacts.
    pub max_depth: f64,
}

impl InteractionStep {
    pub fn empty(t: f64) -> InteractionStep {
        InteractionStep {
            t,
            primary_force: Vec3::ZERO,
            secondary_force: Vec3::ZERO,
            contact_count: 0,
            max_friction_excess: 0.0,
            max_depth: 0.0,
        }
    }
}

/// Full interaction history of a run.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct InteractionLog {
    pub steps: Vec<InteractionStep>,
}

impl InteractionLog {
    pub fn new() -> InteractionLog {
        InteractionLog { steps: Vec::new() }
    }

    pub fn push(&mut self, step: InteractionStep) {
        self.steps.push(step);
    }

    pub fn has_contact(&self) -> bool {
        self.steps.iter().any(|s| s.contact_count > 0)
    }

    pub fn max_friction_excess(&self) -> f64 {
        self.steps
            .iter()
            .map(|s| s.max_friction_excess)
            .fold(0.0, f64::max)
    }

    pub fn max_depth(&self) -> f64 {
        self.steps.iter().map(|s| s.max_depth).fold(0.0, f64::max)
    }
}

/// Detect contacts between every particle and the body surface, in particle
/// order. Relative velocity uses the body's surface-point velocity so a
/// spinning body drags particles tangentially. Particles listed in `skip`
/// (attachment targets, which legitimately live inside the body) are never
/// contact candidates.
pub fn collect_contacts(
    system: &MassSpringSystem,
    body: &BodyState,
    shape: &Shape,
    skip: &[usize],
) -> SimResult<Vec<Contact>> {
    let mut contacts = Vec::new();
    for (i, p) in system.particles.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        let geometry = match *shape {
            Shape::Sphere { radius } => detect_point_sphere(p.position, body.position, radius)?,
            Shape::Box { half_extents } => {
                detect_point_box(p.position, body.position, body.orientation, half_extents)
            }
        };
        if let Some(g) = geometry {
            let rel = p.velocity - body.velocity_at_point(g.point);
            contacts.push(Contact::new(i, g, rel));
        }
    }
    Ok(contacts)
}

fn record_contact_forces(
    t: f64,
    system: &mut MassSpringSystem,
    contacts: &[Contact],
    model: &ContactForceModel,
) -> (InteractionStep, Vec<(Vec3, Vec3)>) {
    let mut rec = InteractionStep::empty(t);
    let mut applied = Vec::with_capacity(contacts.len());
    for c in contacts {
        let (normal, tangential) = contact_force_split(c, model);
        let f = normal + tangential;
        system.particles[c.particle].force_accum += f;
        rec.secondary_force += f;
        rec.contact_count += 1;
        rec.max_friction_excess = rec
            .max_friction_excess
            .max(tangential.length() - model.friction * normal.length());
        rec.max_depth = rec.max_depth.max(c.depth);
        applied.push((f, c.point));
    }
    (rec, applied)
}

/// Two-way application: each contact force goes to its particle, the exact
/// negation goes to the body at the contact point.
pub fn apply_two_way(
    t: f64,
    body: &mut RigidBody,
    system: &mut MassSpringSystem,
    contacts: &[Contact],
    model: &ContactForceModel,
) -> InteractionStep {
    let (mut rec, applied) = record_contact_forces(t, system, contacts, model);
    for (f, point) in applied {
        body.apply_force_at_point(-f, point);
        rec.primary_force += -f;
    }
    rec
}

/// One-way application: particles receive the same forces as in two-way, the
/// body receives nothing, and the record still logs the force that would
/// have acted on it.
pub fn apply_one_way(
    t: f64,
    system: &mut MassSpringSystem,
    contacts: &[Contact],
    model: &ContactForceModel,
) -> InteractionStep {
    let (mut rec, _) = record_contact_forces(t, system, contacts, model);
    rec.primary_force = -rec.secondary_force;
    rec
}
