//! Scenario definitions: a TOML schema binding systems, coupling mode, and
//! parameters, plus the runner that dispatches to the coupling pipelines.
//!
//! The schema is documented in the README. Unknown keys are rejected, all
//! omitted keys take documented defaults, and `load -> serialize -> load`
//! reproduces the scenario exactly.

use serde::{Deserialize, Serialize};

use crate::contact::ContactForceModel;
use crate::coupling::{
    run_coupled, Attachment, CoupledSystems, CouplingMode, Environment, RunOutput,
};
use crate::error::{SimError, SimResult};
use crate::math::{Quat, Vec3};
use crate::mesh::{build_cord, build_grid, build_net, PinnedEdge};
use crate::metrics::{summarize_interaction, InteractionStats, WindowPolicy};
use crate::rigid::{RigidBody, Shape};
use crate::spring::{MassSpringSystem, Material};
use crate::standin::{DampingField, Region, SpringGrid, StandInModel, ViscousDrag};

mod defaults {
    pub fn name() -> String {
        "unnamed".to_string()
    }
    pub fn duration() -> f64 {
        1.0
    }
    pub fn output_interval() -> f64 {
        0.0833
    }
    pub fn velocity_ceiling() -> f64 {
        1e4
    }
    pub fn dt() -> f64 {
        1e-5
    }
    pub fn ball_mass() -> f64 {
        0.68
    }
    pub fn ball_radius() -> f64 {
        0.12
    }
    pub fn orientation() -> [f64; 4] {
        [1.0, 0.0, 0.0, 0.0]
    }
    pub fn net_mass() -> f64 {
        0.03
    }
    pub fn material() -> String {
        "nylon-net".to_string()
    }
    pub fn global_damping() -> f64 {
        0.1
    }
    pub fn rings() -> usize {
        6
    }
    pub fn spokes() -> usize {
        12
    }
    pub fn rim_radius() -> f64 {
        0.23
    }
    pub fn depth() -> f64 {
        0.4
    }
    pub fn taper() -> f64 {
        0.4
    }
    pub fn rows() -> usize {
        10
    }
    pub fn cols() -> usize {
        10
    }
    pub fn grid_size() -> f64 {
        1.0
    }
    pub fn segments() -> usize {
        8
    }
    pub fn cord_length() -> f64 {
        5.0
    }
    pub fn gravity() -> [f64; 3] {
        [0.0, -9.81, 0.0]
    }
    pub fn restore_stiffness() -> f64 {
        5e4
    }
    pub fn impact_damping() -> f64 {
        2.0
    }
    pub fn tangential_damping() -> f64 {
        20.0
    }
    pub fn friction() -> f64 {
        0.4
    }
    pub fn aero_coefficient() -> f64 {
        1.2
    }
    pub fn attachment_stiffness() -> f64 {
        5e4
    }
    pub fn attachment_damping() -> f64 {
        50.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeSpec {
    TwoWay,
    OneWay,
    Hybrid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShapeKind {
    Sphere,
    Box,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShapeSpec {
    pub kind: ShapeKind,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub half_extents: Option<[f64; 3]>,
}

impl Default for ShapeSpec {
    fn default() -> Self {
        ShapeSpec {
            kind: ShapeKind::Sphere,
            radius: None,
            half_extents: None,
        }
    }
}

impl ShapeSpec {
    fn resolve(&self) -> SimResult<Shape> {
        match self.kind {
            ShapeKind::Sphere => {
                if self.half_extents.is_some() {
                    return Err(SimError::Validation(
                        "shape: sphere does not take half_extents".to_string(),
                    ));
                }
                Ok(Shape::Sphere {
                    radius: self.radius.unwrap_or_else(defaults::ball_radius),
                })
            }
            ShapeKind::Box => {
                if self.radius.is_some() {
                    return Err(SimError::Validation(
                        "shape: box does not take radius".to_string(),
                    ));
                }
                let h = self.half_extents.ok_or_else(|| {
                    SimError::Validation("shape: box requires half_extents".to_string())
                })?;
                Ok(Shape::Box {
                    half_extents: Vec3::from_array(h),
                })
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimarySpec {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default)]
    pub shape: ShapeSpec,
    #[serde(default = "defaults::ball_mass")]
    pub mass: f64,
    #[serde(default)]
    pub position: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
    #[serde(default)]
    pub angular_velocity: [f64; 3],
    #[serde(default = "defaults::orientation")]
    pub orientation: [f64; 4],
    #[serde(default)]
    pub inertia: Option<[f64; 3]>,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
}

impl Default for PrimarySpec {
    fn default() -> Self {
        PrimarySpec {
            label: None,
            shape: ShapeSpec::default(),
            mass: defaults::ball_mass(),
            position: [0.0; 3],
            velocity: [0.0; 3],
            angular_velocity: [0.0; 3],
            orientation: defaults::orientation(),
            inertia: None,
            dt: defaults::dt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BuilderKind {
    Net,
    Grid,
    Cord,
}

impl BuilderKind {
    fn label(&self) -> &'static str {
        match self {
            BuilderKind::Net => "net",
            BuilderKind::Grid => "grid",
            BuilderKind::Cord => "cord",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinnedEdgeSpec {
    None,
    Top,
    Left,
    AllCorners,
}

impl From<PinnedEdgeSpec> for PinnedEdge {
    fn from(spec: PinnedEdgeSpec) -> PinnedEdge {
        match spec {
            PinnedEdgeSpec::None => PinnedEdge::None,
            PinnedEdgeSpec::Top => PinnedEdge::Top,
            PinnedEdgeSpec::Left => PinnedEdge::Left,
            PinnedEdgeSpec::AllCorners => PinnedEdge::AllCorners,
        }
    }
}

/// Which plane a grid lies in after building: `xy` is a vertical sheet
/// (flags), `xz` a horizontal one (mats).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridPlane {
    Xy,
    Xz,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SecondarySpec {
    #[serde(default)]
    pub label: Option<String>,
    #[serde(default = "default_builder")]
    pub builder: BuilderKind,
    #[serde(default = "defaults::material")]
    pub material: String,
    /// Override the preset's spring stiffness.
    #[serde(default)]
    pub stiffness: Option<f64>,
    /// Override the preset's spring damping.
    #[serde(default)]
    pub damping: Option<f64>,
    #[serde(default = "defaults::net_mass")]
    pub mass: f64,
    #[serde(default = "defaults::dt")]
    pub dt: f64,
    #[serde(default = "defaults::global_damping")]
    pub global_damping: f64,
    /// Translation applied to the built mesh.
    #[serde(default)]
    pub origin: [f64; 3],
    // Net parameters.
    #[serde(default = "defaults::rings")]
    pub rings: usize,
    #[serde(default = "defaults::spokes")]
    pub spokes: usize,
    #[serde(default = "defaults::rim_radius")]
    pub rim_radius: f64,
    #[serde(default = "defaults::depth")]
    pub depth: f64,
    #[serde(default = "defaults::taper")]
    pub taper: f64,
    // Grid parameters.
    #[serde(default = "defaults::rows")]
    pub rows: usize,
    #[serde(default = "defaults::cols")]
    pub cols: usize,
    #[serde(default = "defaults::grid_size")]
    pub width: f64,
    #[serde(default = "defaults::grid_size")]
    pub height: f64,
    #[serde(default = "default_pinned_edge")]
    pub pinned_edge: PinnedEdgeSpec,
    #[serde(default = "default_grid_plane")]
    pub plane: GridPlane,
    // Cord parameters.
    #[serde(default = "defaults::segments")]
    pub segments: usize,
    #[serde(default = "defaults::cord_length")]
    pub length: f64,
    #[serde(default)]
    pub anchor: [f64; 3],
}

fn default_builder() -> BuilderKind {
    BuilderKind::Net
}

fn default_pinned_edge() -> PinnedEdgeSpec {
    PinnedEdgeSpec::None
}

fn default_grid_plane() -> GridPlane {
    GridPlane::Xy
}

impl Default for SecondarySpec {
    fn default() -> Self {
        toml::from_str("").expect("empty secondary spec uses defaults")
    }
}

impl SecondarySpec {
    fn resolve_material(&self) -> SimResult<Material> {
        let mut material = Material::from_name(&self.material).ok_or_else(|| {
            SimError::Validation(format!(
                "unknown material preset '{}' (expected nylon-net, cloth, bungee, or mat)",
                self.material
            ))
        })?;
        if let Some(k) = self.stiffness {
            material.stiffness = k;
        }
        if let Some(c) = self.damping {
            material.damping = c;
        }
        Ok(material)
    }

    fn build(&self) -> SimResult<MassSpringSystem> {
        let material = self.resolve_material()?;
        let mut system = match self.builder {
            BuilderKind::Net => build_net(
                self.rings,
                self.spokes,
                self.rim_radius,
                self.depth,
                self.taper,
                self.mass,
                &material,
            )?,
            BuilderKind::Grid => build_grid(
                self.rows,
                self.cols,
                self.width,
                self.height,
                self.mass,
                &material,
                self.pinned_edge.into(),
            )?,
            BuilderKind::Cord => build_cord(
                self.segments,
                self.length,
                self.mass,
                &material,
                Vec3::from_array(self.anchor),
            )?,
        };
        let mut transformed = false;
        if self.builder == BuilderKind::Grid && self.plane == GridPlane::Xz {
            system.rotate_about(
                Vec3::ZERO,
                Quat::from_axis_angle(Vec3::new(1.0, 0.0, 0.0), -std::f64::consts::FRAC_PI_2),
            );
            transformed = true;
        }
        let origin = Vec3::from_array(self.origin);
        if origin != Vec3::ZERO && self.builder != BuilderKind::Cord {
            system.translate(origin);
            transformed = true;
        }
        if transformed {
            system.reset_rest_lengths();
        }
        system.global_damping = self.global_damping;
        Ok(system)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContactSpec {
    #[serde(default = "defaults::restore_stiffness")]
    pub restore_stiffness: f64,
    #[serde(default = "defaults::impact_damping")]
    pub impact_damping: f64,
    #[serde(default = "defaults::tangential_damping")]
    pub tangential_damping: f64,
    #[serde(default = "defaults::friction")]
    pub friction: f64,
}

impl Default for ContactSpec {
    fn default() -> Self {
        ContactSpec {
            restore_stiffness: defaults::restore_stiffness(),
            impact_damping: defaults::impact_damping(),
            tangential_damping: defaults::tangential_damping(),
            friction: defaults::friction(),
        }
    }
}

impl ContactSpec {
    fn resolve(&self) -> ContactForceModel {
        ContactForceModel {
            restore_stiffness: self.restore_stiffness,
            impact_damping: self.impact_damping,
            tangential_damping: self.tangential_damping,
            friction: self.friction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindSourceSpec {
    pub start: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
    pub strength: f64,
    pub falloff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WindSpec {
    #[serde(default)]
    pub uniform: [f64; 3],
    #[serde(default)]
    pub source: Option<WindSourceSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FloorSpec {
    pub height: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnvironmentSpec {
    #[serde(default = "defaults::gravity")]
    pub gravity: [f64; 3],
    #[serde(default)]
    pub wind: Option<WindSpec>,
    #[serde(default)]
    pub floor: Option<FloorSpec>,
}

impl Default for EnvironmentSpec {
    fn default() -> Self {
        EnvironmentSpec {
            gravity: defaults::gravity(),
            wind: None,
            floor: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AeroSpec {
    #[serde(default = "defaults::aero_coefficient")]
    pub normal_coefficient: f64,
    #[serde(default)]
    pub quadratic: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Box,
    VerticalCylinder,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub kind: RegionKind,
    #[serde(default)]
    pub min: Option<[f64; 3]>,
    #[serde(default)]
    pub max: Option<[f64; 3]>,
    #[serde(default)]
    pub center: Option<[f64; 3]>,
    #[serde(default)]
    pub radius: Option<f64>,
    #[serde(default)]
    pub y_min: Option<f64>,
    #[serde(default)]
    pub y_max: Option<f64>,
}

impl RegionSpec {
    fn resolve(&self) -> SimResult<Region> {
        let region = match self.kind {
            RegionKind::Box => {
                let min = self.min.ok_or_else(|| {
                    SimError::Validation("stand_in region: box requires min".to_string())
                })?;
                let max = self.max.ok_or_else(|| {
                    SimError::Validation("stand_in region: box requires max".to_string())
                })?;
                Region::Aabb {
                    min: Vec3::from_array(min),
                    max: Vec3::from_array(max),
                }
            }
            RegionKind::VerticalCylinder => Region::VerticalCylinder {
                center: Vec3::from_array(self.center.ok_or_else(|| {
                    SimError::Validation("stand_in region: cylinder requires center".to_string())
                })?),
                radius: self.radius.ok_or_else(|| {
                    SimError::Validation("stand_in region: cylinder requires radius".to_string())
                })?,
                y_min: self.y_min.ok_or_else(|| {
                    SimError::Validation("stand_in region: cylinder requires y_min".to_string())
                })?,
                y_max: self.y_max.ok_or_else(|| {
                    SimError::Validation("stand_in region: cylinder requires y_max".to_string())
                })?,
            },
        };
        region.validate()?;
        Ok(region)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StandInKind {
    DampingField,
    SpringGrid,
    ViscousDrag,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StandInSpec {
    pub kind: StandInKind,
    // Damping field.
    #[serde(default)]
    pub region: Option<RegionSpec>,
    #[serde(default)]
    pub c_linear: Option<f64>,
    #[serde(default)]
    pub c_angular: Option<f64>,
    // Spring grid.
    #[serde(default)]
    pub plane_height: Option<f64>,
    #[serde(default)]
    pub stiffness: Option<f64>,
    #[serde(default)]
    pub damping: Option<f64>,
    // Viscous drag.
    #[serde(default)]
    pub surface_height: Option<f64>,
    #[serde(default)]
    pub drag: Option<f64>,
    // Shared: body-frame sample points for grid/drag stand-ins.
    #[serde(default)]
    pub contact_points: Option<Vec<[f64; 3]>>,
}

impl StandInSpec {
    /// `secondary_rest` supplies the default damping-field region: the
    /// bounding vertical cylinder of the secondary's rest configuration.
    fn resolve(&self, secondary_rest: Option<&[Vec3]>) -> SimResult<StandInModel> {
        let points = |required: &str| -> SimResult<Vec<Vec3>> {
            match &self.contact_points {
                Some(pts) if !pts.is_empty() => {
                    Ok(pts.iter().map(|p| Vec3::from_array(*p)).collect())
                }
                _ => Err(SimError::Validation(format!(
                    "stand_in: {required} requires contact_points"
                ))),
            }
        };
        match self.kind {
            StandInKind::DampingField => {
                let region = match &self.region {
                    Some(spec) => spec.resolve()?,
                    None => default_region(secondary_rest)?,
                };
                Ok(StandInModel::DampingField(DampingField {
                    region,
                    linear: self.c_linear.unwrap_or(0.0),
                    angular: self.c_angular.unwrap_or(0.0),
                }))
            }
            StandInKind::SpringGrid => Ok(StandInModel::SpringGrid(SpringGrid {
                plane_height: self.plane_height.ok_or_else(|| {
                    SimError::Validation("stand_in: spring_grid requires plane_height".to_string())
                })?,
                stiffness: self.stiffness.unwrap_or(0.0),
                damping: self.damping.unwrap_or(0.0),
                contact_points: points("spring_grid")?,
            })),
            StandInKind::ViscousDrag => Ok(StandInModel::ViscousDrag(ViscousDrag {
                surface_height: self.surface_height.ok_or_else(|| {
                    SimError::Validation("stand_in: viscous_drag requires surface_height".to_string())
                })?,
                drag: self.drag.unwrap_or(0.0),
                contact_points: points("viscous_drag")?,
            })),
        }
    }
}

/// Bounding vertical cylinder of the secondary's rest configuration.
fn default_region(secondary_rest: Option<&[Vec3]>) -> SimResult<Region> {
    let rest = secondary_rest.filter(|r| !r.is_empty()).ok_or_else(|| {
        SimError::Validation(
            "stand_in: damping_field needs an explicit region when there is no secondary"
                .to_string(),
        )
    })?;
    let mut center = Vec3::ZERO;
    for p in rest {
        center += *p;
    }
    center = center / rest.len() as f64;
    let mut radius: f64 = 0.0;
    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for p in rest {
        let dx = p.x - center.x;
        let dz = p.z - center.z;
        radius = radius.max((dx * dx + dz * dz).sqrt());
        y_min = y_min.min(p.y);
        y_max = y_max.max(p.y);
    }
    let region = Region::VerticalCylinder {
        center,
        radius,
        y_min,
        y_max,
    };
    region.validate()?;
    Ok(region)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParticleRef {
    Index(usize),
    Name(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttachmentSpec {
    pub particle: ParticleRef,
    #[serde(default)]
    pub body_point: [f64; 3],
    #[serde(default = "defaults::attachment_stiffness")]
    pub stiffness: f64,
    #[serde(default = "defaults::attachment_damping")]
    pub damping: f64,
}

impl AttachmentSpec {
    fn resolve(&self, particle_count: usize) -> SimResult<Attachment> {
        let particle = match &self.particle {
            ParticleRef::Index(i) => {
                if *i >= particle_count {
                    return Err(SimError::Validation(format!(
                        "attachment particle {i} out of range ({particle_count} particles)"
                    )));
                }
                *i
            }
            ParticleRef::Name(name) if name == "last" => particle_count - 1,
            ParticleRef::Name(other) => {
                return Err(SimError::Validation(format!(
                    "attachment particle must be an index or \"last\", got \"{other}\""
                )));
            }
        };
        Ok(Attachment {
            particle,
            body_point: Vec3::from_array(self.body_point),
            stiffness: self.stiffness,
            damping: self.damping,
        })
    }
}

/// A fully described simulation scenario.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "defaults::name")]
    pub name: String,
    pub mode: ModeSpec,
    #[serde(default = "defaults::duration")]
    pub duration: f64,
    #[serde(default = "defaults::output_interval")]
    pub output_interval: f64,
    #[serde(default = "defaults::velocity_ceiling")]
    pub velocity_ceiling: f64,
    #[serde(default)]
    pub primary: Option<PrimarySpec>,
    #[serde(default)]
    pub secondary: Option<SecondarySpec>,
    #[serde(default)]
    pub contact: ContactSpec,
    #[serde(default)]
    pub environment: EnvironmentSpec,
    #[serde(default)]
    pub aero: Option<AeroSpec>,
    #[serde(default)]
    pub stand_in: Option<StandInSpec>,
    #[serde(default)]
    pub attachment: Option<AttachmentSpec>,
}

impl Scenario {
    /// Parse a scenario from TOML text. Syntax errors carry line/column
    /// positions; unknown keys are rejected.
    pub fn from_toml_str(text: &str) -> SimResult<Scenario> {
        let scenario: Scenario =
            toml::from_str(text).map_err(|e| SimError::Parse(e.to_string()))?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> SimResult<String> {
        toml::to_string(self).map_err(|e| SimError::Parse(e.to_string()))
    }

    /// Semantic checks beyond what the schema enforces.
    pub fn validate(&self) -> SimResult<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(SimError::Validation(format!(
                "duration must be positive, got {}",
                self.duration
            )));
        }
        if !(self.output_interval.is_finite() && self.output_interval > 0.0) {
            return Err(SimError::Validation(
                "output_interval must be positive".to_string(),
            ));
        }
        if matches!(self.mode, ModeSpec::Hybrid) && self.stand_in.is_none() {
            return Err(SimError::Validation(
                "mode = \"hybrid\" requires a [stand_in] section".to_string(),
            ));
        }
        if matches!(self.mode, ModeSpec::TwoWay) {
            if self.primary.is_none() {
                return Err(SimError::Validation(
                    "mode = \"two_way\" requires a [primary] section".to_string(),
                ));
            }
            if self.secondary.is_none() && self.attachment.is_none() {
                return Err(SimError::Validation(
                    "mode = \"two_way\" requires a [secondary] section".to_string(),
                ));
            }
        }
        if self.attachment.is_some() && self.secondary.is_none() {
            return Err(SimError::Validation(
                "[attachment] requires a [secondary] section".to_string(),
            ));
        }
        if let Some(primary) = &self.primary {
            if !(primary.mass.is_finite() && primary.mass > 0.0) {
                return Err(SimError::Validation("primary mass must be positive".to_string()));
            }
            if !(primary.dt.is_finite() && primary.dt > 0.0) {
                return Err(SimError::Validation("primary dt must be positive".to_string()));
            }
            primary.shape.resolve()?;
            let q = primary.orientation;
            let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
            if !(norm.is_finite() && norm > 1e-9) {
                return Err(SimError::Validation(
                    "primary orientation quaternion has (near-)zero norm".to_string(),
                ));
            }
        }
        if let Some(secondary) = &self.secondary {
            if !(secondary.dt.is_finite() && secondary.dt > 0.0) {
                return Err(SimError::Validation("secondary dt must be positive".to_string()));
            }
            secondary.resolve_material()?;
        }
        Ok(())
    }

    fn build_body(&self) -> SimResult<Option<RigidBody>> {
        let Some(spec) = &self.primary else {
            return Ok(None);
        };
        let shape = spec.shape.resolve()?;
        let mut body = RigidBody::new(shape, spec.mass)?;
        if let Some(inertia) = spec.inertia {
            let i = Vec3::from_array(inertia);
            if !(i.x > 0.0 && i.y > 0.0 && i.z > 0.0) {
                return Err(SimError::Validation(
                    "primary inertia components must be positive".to_string(),
                ));
            }
            body.inertia_diag = i;
        }
        body.position = Vec3::from_array(spec.position);
        body.linear_velocity = Vec3::from_array(spec.velocity);
        body.angular_velocity = Vec3::from_array(spec.angular_velocity);
        let q = spec.orientation;
        body.orientation = Quat::new(q[0], q[1], q[2], q[3]).normalized();
        Ok(Some(body))
    }

    /// Resolve the scenario into runnable systems plus the coupling mode.
    pub fn build_runtime(&self) -> SimResult<(CoupledSystems, CouplingMode)> {
        self.validate()?;
        let body = self.build_body()?;
        let system = match &self.secondary {
            Some(spec) => Some(spec.build()?),
            None => None,
        };

        let attachments = match (&self.attachment, &system) {
            (Some(spec), Some(system)) => vec![spec.resolve(system.particles.len())?],
            (Some(_), None) => unreachable!("validated above"),
            (None, _) => Vec::new(),
        };

        let wind = self.environment.wind.as_ref().map(|w| crate::aero::WindField {
            uniform: Vec3::from_array(w.uniform),
            source: w.source.as_ref().map(|s| crate::aero::WindSource {
                start: Vec3::from_array(s.start),
                velocity: Vec3::from_array(s.velocity),
                strength: s.strength,
                falloff: s.falloff,
            }),
        });
        let aero = match (&self.aero, &wind) {
            (Some(spec), _) => Some(crate::aero::AeroModel {
                normal_coefficient: spec.normal_coefficient,
                quadratic: spec.quadratic,
            }),
            (None, Some(_)) => Some(crate::aero::AeroModel::default()),
            (None, None) => None,
        };

        let mode = match self.mode {
            ModeSpec::TwoWay => CouplingMode::TwoWay,
            ModeSpec::OneWay => CouplingMode::OneWay,
            ModeSpec::Hybrid => {
                let spec = self.stand_in.as_ref().expect("validated above");
                let rest = system.as_ref().map(|s| s.rest_positions.as_slice());
                CouplingMode::Hybrid(spec.resolve(rest)?)
            }
        };

        let dt_primary = self.primary.as_ref().map(|p| p.dt).unwrap_or(defaults::dt());
        let dt_secondary = self
            .secondary
            .as_ref()
            .map(|s| s.dt)
            .unwrap_or(defaults::dt());

        let setup = CoupledSystems {
            body,
            system,
            contact_model: self.contact.resolve(),
            attachments,
            environment: Environment {
                gravity: Vec3::from_array(self.environment.gravity),
                wind,
                aero,
                floor_height: self.environment.floor.as_ref().map(|f| f.height),
            },
            dt_primary,
            dt_secondary,
            duration: self.duration,
            output_interval: self.output_interval,
            velocity_ceiling: self.velocity_ceiling,
        };
        Ok((setup, mode))
    }

    pub fn primary_label(&self) -> String {
        match &self.primary {
            Some(p) => p.label.clone().unwrap_or_else(|| {
                match p.shape.kind {
                    ShapeKind::Sphere => "sphere",
                    ShapeKind::Box => "box",
                }
                .to_string()
            }),
            None => "-".to_string(),
        }
    }

    pub fn secondary_label(&self) -> String {
        match &self.secondary {
            Some(s) => s
                .label
                .clone()
                .unwrap_or_else(|| s.builder.label().to_string()),
            None => "-".to_string(),
        }
    }
}

/// Everything a scenario run leaves behind.
#[derive(Debug, Clone, PartialEq)]
pub struct RunArtifacts {
    pub name: String,
    pub primary_label: String,
    pub primary_mass: Option<f64>,
    pub secondary_label: String,
    pub secondary_mass: Option<f64>,
    pub output: RunOutput,
    pub stats: InteractionStats,
}

/// Build, dispatch on coupling mode, and summarize.
pub fn run_scenario(scenario: &Scenario) -> SimResult<RunArtifacts> {
    let (setup, mode) = scenario.build_runtime()?;
    let primary_mass = setup.body.as_ref().map(|b| b.mass);
    let secondary_mass = setup.system.as_ref().map(|s| s.total_mass());
    let output = run_coupled(setup, &mode)?;
    let stats = summarize_interaction(
        &output.interaction,
        primary_mass.unwrap_or(1.0),
        &WindowPolicy::default(),
    );
    Ok(RunArtifacts {
        name: scenario.name.clone(),
        primary_label: scenario.primary_label(),
        primary_mass,
        secondary_label: scenario.secondary_label(),
        secondary_mass,
        output,
        stats,
    })
}
