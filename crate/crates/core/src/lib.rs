//! Deterministic coupled simulation of a rigid-body primary system and a
//! mass-spring secondary system.
//!
//! The engine supports three coupling regimes between the two systems:
//!
//! - **two-way**: both systems advance in lockstep, exchanging
//!   equal-and-opposite interaction forces each step;
//! - **one-way**: the primary is simulated alone and recorded, then the
//!   recording drives the secondary as a kinematic obstacle;
//! - **hybrid**: like one-way, but a cheap stand-in (damping field, vertical
//!   spring grid, or viscous drag field) acts on the primary during the
//!   recording pass.
//!
//! On top of the pipelines sit interaction metrics (force and effective
//! acceleration statistics over the contact window), a decision-tree advisor
//! that recommends a coupling regime, and a TOML scenario layer with CSV
//! artifact output. Everything is fixed-step and free of hidden state, so a
//! scenario run twice produces bit-identical artifacts.

pub mod aero;
pub mod contact;
pub mod coupling;
pub mod error;
pub mod io;
pub mod math;
pub mod mesh;
pub mod metrics;
pub mod rigid;
pub mod scenario;
pub mod sim;
pub mod spring;
pub mod standin;
pub mod trace;

pub use contact::{Contact, ContactForceModel, InteractionLog, InteractionStep};
pub use coupling::{
    Attachment, CoupledSystems, CouplingMode, Environment, RunOutput, RunStatus, RunTiming,
};
pub use error::{SimError, SimResult};
pub use math::{Quat, Vec3};
pub use mesh::PinnedEdge;
pub use metrics::{
    AdvisorInput, CouplingKind, InteractionStats, Recommendation, Stability, WindowPolicy,
};
pub use rigid::{BodyState, GravityModel, RigidBody, Shape};
pub use scenario::{RunArtifacts, Scenario};
pub use spring::{MassSpringSystem, Material, Particle, Spring};
pub use standin::{DampingField, Region, SpringGrid, StandInForce, StandInModel, ViscousDrag};
pub use trace::{BodySample, MotionTrace, SecondaryTrace};
