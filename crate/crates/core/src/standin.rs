//! Stand-in force models: cheap approximations of a secondary system that
//! act on the primary body during a hybrid run's first pass.
//!
//! The three shipped stand-ins share the [`StandInForce`] interface, so new
//! ones are additive.

use crate::error::{SimError, SimResult};
use crate::math::Vec3;
use crate::rigid::BodyState;

/// Spatial region a stand-in occupies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Region {
    Aabb { min: Vec3, max: Vec3 },
    VerticalCylinder {
        /// A point on the cylinder axis (x and z locate the axis).
        center: Vec3,
        radius: f64,
        y_min: f64,
        y_max: f64,
    },
}

impl Region {
    pub fn contains(&self, p: Vec3) -> bool {
        match *self {
            Region::Aabb { min, max } => {
                p.x >= min.x && p.x <= max.x
                    && p.y >= min.y && p.y <= max.y
                    && p.z >= min.z && p.z <= max.z
            }
            Region::VerticalCylinder { center, radius, y_min, y_max } => {
                let dx = p.x - center.x;
                let dz = p.z - center.z;
                p.y >= y_min && p.y <= y_max && dx * dx + dz * dz <= radius * radius
            }
        }
    }

    pub fn validate(&self) -> SimResult<()> {
        let ok = match *self {
            Region::Aabb { min, max } => min.x < max.x && min.y < max.y && min.z < max.z,
            Region::VerticalCylinder { radius, y_min, y_max, .. } => radius > 0.0 && y_min < y_max,
        };
        if ok {
            Ok(())
        } else {
            Err(SimError::InvalidParameter("degenerate stand-in region".to_string()))
        }
    }
}

/// What a stand-in did to the body this step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StandInEffect {
    pub force: Vec3,
    pub torque: Vec3,
    /// Number of stand-in sites that acted (region hits or submerged points).
    pub active_sites: u32,
}

impl StandInEffect {
    pub const NONE: StandInEffect = StandInEffect {
        force: Vec3::ZERO,
        torque: Vec3::ZERO,
        active_sites: 0,
    };
}

/// Force model that approximates a secondary system's effect on the primary.
pub trait StandInForce {
    fn effect(&self, body: &BodyState) -> StandInEffect;
}

/// Damps translational and rotational momentum while the body's centre is
/// inside the region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingField {
    pub region: Region,
    /// Linear damping coefficient (N s/m).
    pub linear: f64,
    /// Angular damping coefficient (N m s/rad).
    pub angular: f64,
}

impl StandInForce for DampingField {
    fn effect(&self, body: &BodyState) -> StandInEffect {
        if self.region.contains(body.position) {
            StandInEffect {
                force: body.linear_velocity * -self.linear,
                torque: body.angular_velocity * -self.angular,
                active_sites: 1,
            }
        } else {
            StandInEffect::NONE
        }
    }
}

/// A bed of vertical springs below a horizontal plane. Each body-frame
/// contact point that dips below the plane feels an upward spring-damper
/// force, clamped non-negative so the bed never pulls down.
#[derive(Debug, Clone, PartialEq)]
pub struct SpringGrid {
    pub plane_height: f64,
    pub stiffness: f64,
    pub damping: f64,
    /// Body-frame sample points that can touch the bed.
    pub contact_points: Vec<Vec3>,
}

impl StandInForce for SpringGrid {
    fn effect(&self, body: &BodyState) -> StandInEffect {
        let mut out = StandInEffect::NONE;
        for local in &self.contact_points {
            let point = body.position + body.orientation.rotate(*local);
            if point.y < self.plane_height {
                let v = body.velocity_at_point(point);
                let magnitude =
                    (self.stiffness * (self.plane_height - point.y) - self.damping * v.y).max(0.0);
                let f = Vec3::new(0.0, magnitude, 0.0);
                out.force += f;
                out.torque += (point - body.position).cross(f);
                out.active_sites += 1;
            }
        }
        out
    }
}

/// Viscous drag on every body-frame sample point below the surface height.
#[derive(Debug, Clone, PartialEq)]
pub struct ViscousDrag {
    pub surface_height: f64,
    /// Drag coefficient per contact point (N s/m).
    pub drag: f64,
    pub contact_points: Vec<Vec3>,
}

impl StandInForce for ViscousDrag {
    fn effect(&self, body: &BodyState) -> StandInEffect {
        let mut out = StandInEffect::NONE;
        for local in &self.contact_points {
            let point = body.position + body.orientation.rotate(*local);
            if point.y < self.surface_height {
                let v = body.velocity_at_point(point);
                let f = v * -self.drag;
                out.force += f;
                out.torque += (point - body.position).cross(f);
                out.active_sites += 1;
            }
        }
        out
    }
}

/// Closed set of the shipped stand-ins, dispatching through the shared trait.
#[derive(Debug, Clone, PartialEq)]
pub enum StandInModel {
    DampingField(DampingField),
    SpringGrid(SpringGrid),
    ViscousDrag(ViscousDrag),
}

impl StandInForce for StandInModel {
    fn effect(&self, body: &BodyState) -> StandInEffect {
        match self {
            StandInModel::DampingField(m) => m.effect(body),
            StandInModel::SpringGrid(m) => m.effect(body),
            StandInModel::ViscousDrag(m) => m.effect(body),
        }
    }
}

impl StandInModel {
    /// True when every coefficient is zero, i.e. the stand-in can never
    /// exert a force.
    pub fn is_zero(&self) -> bool {
        match self {
            StandInModel::DampingField(m) => m.linear == 0.0 && m.angular == 0.0,
            StandInModel::SpringGrid(m) => m.stiffness == 0.0 && m.damping == 0.0,
            StandInModel::ViscousDrag(m) => m.drag == 0.0,
        }
    }
}
