//! Interaction quantification and the coupling advisor.
//!
//! An interaction's significance is measured by the effective acceleration
//! it imposes on the primary system: interaction force magnitude divided by
//! primary mass. The advisor turns those statistics plus four qualitative
//! judgments into a coupling recommendation.

use crate::contact::InteractionLog;
use crate::math::Vec3;
use crate::rigid::RigidBody;
use crate::spring::MassSpringSystem;

pub const DEFAULT_VELOCITY_CEILING: f64 = 1e4;
pub const DEFAULT_ACCEL_THRESHOLD: f64 = 1.0;

/// How the analysis window is chosen.
///
/// When contact persists (present in at least `sustained_min_fraction` of
/// the steps spanning `sustained_window` seconds from first contact), the
/// statistics cover exactly that window; otherwise they cover the union of
/// contact intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowPolicy {
    pub sustained_window: f64,
    pub sustained_min_fraction: f64,
}

impl Default for WindowPolicy {
    fn default() -> Self {
        WindowPolicy {
            sustained_window: 0.5,
            sustained_min_fraction: 0.95,
        }
    }
}

/// Force and effective-acceleration statistics over the analysis window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InteractionStats {
    pub force_min: f64,
    pub force_max: f64,
    pub force_mean: f64,
    pub accel_min: f64,
    pub accel_max: f64,
    pub accel_mean: f64,
    pub window: (f64, f64),
    /// Fraction of steps inside the window that had at least one contact.
    pub contact_fraction: f64,
}

impl InteractionStats {
    pub fn no_contact() -> InteractionStats {
        InteractionStats {
            force_min: 0.0,
            force_max: 0.0,
            force_mean: 0.0,
            accel_min: 0.0,
            accel_max: 0.0,
            accel_mean: 0.0,
            window: (0.0, 0.0),
            contact_fraction: 0.0,
        }
    }

    pub fn has_contact(&self) -> bool {
        self.contact_fraction > 0.0
    }
}

/// Statistics of the net interaction force on the primary over the analysis
/// window. Accelerations are the force statistics divided by `primary_mass`,
/// by identity.
pub fn summarize_interaction(
    log: &InteractionLog,
    primary_mass: f64,
    policy: &WindowPolicy,
) -> InteractionStats {
    assert!(primary_mass > 0.0, "primary mass must be positive");
    let steps = &log.steps;
    let first_contact = steps.iter().position(|s| s.contact_count > 0);
    let Some(first) = first_contact else {
        return InteractionStats::no_contact();
    };
    let last = steps.iter().rposition(|s| s.contact_count > 0).unwrap();
    let t_first = steps[first].t;

    // Sustained-contact check over the candidate window.
    let window_end_t = t_first + policy.sustained_window;
    let candidate: Vec<usize> = (first..steps.len())
        .take_while(|&i| steps[i].t <= window_end_t + 1e-12)
        .collect();
    let candidate_contacts = candidate
        .iter()
        .filter(|&&i| steps[i].contact_count > 0)
        .count();
    let covers_window = steps[*candidate.last().unwrap()].t >= window_end_t - 1e-9
        || *candidate.last().unwrap() == steps.len() - 1 && steps.last().unwrap().t >= window_end_t - 1e-9;
    let sustained = covers_window
        && candidate_contacts as f64 >= policy.sustained_min_fraction * candidate.len() as f64;

    let (window_indices, window): (Vec<usize>, (f64, f64)) = if sustained {
        let end_t = steps[*candidate.last().unwrap()].t;
        (candidate, (t_first, end_t))
    } else {
        ((first..=last).collect(), (t_first, steps[last].t))
    };

    let in_contact: Vec<f64> = window_indices
        .iter()
        .filter(|&&i| steps[i].contact_count > 0)
        .map(|&i| steps[i].primary_force.length())
        .collect();
    let contact_fraction = in_contact.len() as f64 / window_indices.len() as f64;

    let force_min = in_contact.iter().copied().fold(f64::INFINITY, f64::min);
    let force_max = in_contact.iter().copied().fold(0.0, f64::max);
    let force_mean = in_contact.iter().sum::<f64>() / in_contact.len() as f64;

    InteractionStats {
        force_min,
        force_max,
        force_mean,
        accel_min: force_min / primary_mass,
        accel_max: force_max / primary_mass,
        accel_mean: force_mean / primary_mass,
        window,
        contact_fraction,
    }
}

/// Coupling regime without stand-in configuration, for recommendations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingKind {
    TwoWay,
    OneWay,
    Hybrid,
}

impl std::fmt::Display for CouplingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CouplingKind::TwoWay => write!(f, "two-way"),
            CouplingKind::OneWay => write!(f, "one-way"),
            CouplingKind::Hybrid => write!(f, "hybrid"),
        }
    }
}

/// Inputs to the coupling advisor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvisorInput {
    pub stats: InteractionStats,
    /// Does the interaction's effect on the primary matter visually?
    pub contextually_important: bool,
    /// Does the secondary stay stable when driven one-way?
    pub secondary_stable_under_one_way: bool,
    /// Is a cheap stand-in for the secondary available?
    pub stand_in_available: bool,
    /// Is the two-way debug cycle time acceptable?
    pub two_way_cost_acceptable: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Recommendation {
    pub mode: CouplingKind,
    pub rationale: String,
    pub warning: Option<String>,
}

/// Decision tree for coupling selection.
///
/// 1. If the interaction is insignificant for the primary (mean effective
///    acceleration below `accel_threshold`, or contextually unimportant)
///    and the secondary stays stable when driven one-way: one-way.
/// 2. Otherwise, if the two-way cost is acceptable: two-way.
/// 3. Otherwise, if a stand-in is available: hybrid.
/// 4. Otherwise: two-way, flagged as having no reasonable compromise.
pub fn recommend_coupling(input: &AdvisorInput, accel_threshold: f64) -> Recommendation {
    let small_accel = input.stats.accel_mean < accel_threshold;
    let insignificant = small_accel || !input.contextually_important;
    if insignificant && input.secondary_stable_under_one_way {
        let why = if small_accel {
            format!(
                "mean effective acceleration {:.3} m/s^2 is below {:.3} m/s^2",
                input.stats.accel_mean, accel_threshold
            )
        } else {
            "the interaction is contextually unimportant".to_string()
        };
        return Recommendation {
            mode: CouplingKind::OneWay,
            rationale: format!("{why}, and the secondary is stable when driven one-way"),
            warning: None,
        };
    }
    let blocked = if !insignificant {
        format!(
            "mean effective acceleration {:.3} m/s^2 is significant",
            input.stats.accel_mean
        )
    } else {
        "the secondary is unstable when driven one-way".to_string()
    };
    if input.two_way_cost_acceptable {
        return Recommendation {
            mode: CouplingKind::TwoWay,
            rationale: format!("{blocked}; two-way cost is acceptable"),
            warning: None,
        };
    }
    if input.stand_in_available {
        return Recommendation {
            mode: CouplingKind::Hybrid,
            rationale: format!(
                "{blocked}; two-way is too costly but a stand-in is available"
            ),
            warning: None,
        };
    }
    Recommendation {
        mode: CouplingKind::TwoWay,
        rationale: format!(
            "{blocked}; two-way is too costly and no stand-in exists, but nothing cheaper is adequate"
        ),
        warning: Some("no reasonable compromise: expect long debug cycles".to_string()),
    }
}

/// Why a state was flagged unstable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InstabilityKind {
    NonFinite,
    SpeedCeiling { speed: f64 },
}

/// Result of an instability scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Stability {
    Stable,
    Unstable { entity: usize, kind: InstabilityKind },
}

impl Stability {
    pub fn is_stable(&self) -> bool {
        matches!(self, Stability::Stable)
    }
}

fn check_state(index: usize, position: Vec3, velocity: Vec3, ceiling: f64) -> Option<Stability> {
    if !position.is_finite() || !velocity.is_finite() {
        return Some(Stability::Unstable {
            entity: index,
            kind: InstabilityKind::NonFinite,
        });
    }
    let speed = velocity.length();
    if speed > ceiling {
        return Some(Stability::Unstable {
            entity: index,
            kind: InstabilityKind::SpeedCeiling { speed },
        });
    }
    None
}

/// Scan every particle for non-finite state or speed above the ceiling.
pub fn detect_instability_particles(system: &MassSpringSystem, ceiling: f64) -> Stability {
    for (i, p) in system.particles.iter().enumerate() {
        if let Some(unstable) = check_state(i, p.position, p.velocity, ceiling) {
            return unstable;
        }
    }
    Stability::Stable
}

/// Scan a rigid body for non-finite state or speed above the ceiling.
pub fn detect_instability_body(body: &RigidBody, ceiling: f64) -> Stability {
    if !body.orientation.is_finite() || !body.angular_velocity.is_finite() {
        return Stability::Unstable {
            entity: 0,
            kind: InstabilityKind::NonFinite,
        };
    }
    if let Some(unstable) = check_state(0, body.position, body.linear_velocity, ceiling) {
        return unstable;
    }
    Stability::Stable
}
