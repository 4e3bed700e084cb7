//! Simplified aerodynamic forcing: a per-triangle normal-flow panel model
//! plus wind fields with an optional moving source.
//!
//! The force on a panel is proportional to its area and to the normal
//! component of the relative wind, directed along the triangle normal. Being
//! odd in the normal, the result does not depend on winding order. A
//! quadratic-in-speed variant is available behind a flag; the default is
//! linear so superposition holds exactly.

use crate::math::Vec3;
use crate::spring::MassSpringSystem;

/// Minimum distance from a moving source before the field is clamped.
const SOURCE_CORE: f64 = 1e-6;

/// A point source moving along a straight line, pushing air radially
/// outward with exponential falloff.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindSource {
    pub start: Vec3,
    pub velocity: Vec3,
    /// Source strength (m^2/s): radial speed is strength / r at the core.
    pub strength: f64,
    /// Falloff radius (m) of the exponential envelope.
    pub falloff: f64,
}

impl WindSource {
    pub fn position_at(&self, t: f64) -> Vec3 {
        self.start + self.velocity * t
    }
}

/// Uniform wind plus an optional moving source.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct WindField {
    pub uniform: Vec3,
    pub source: Option<WindSource>,
}

/// Air velocity at a point and time.
pub fn wind_velocity(field: &WindField, point: Vec3, t: f64) -> Vec3 {
    let mut v = field.uniform;
    if let Some(src) = &field.source {
        let offset = point - src.position_at(t);
        let r = offset.length().max(SOURCE_CORE);
        let magnitude = src.strength / r * (-r / src.falloff).exp();
        v += offset * (magnitude / r);
    }
    v
}

/// Normal-flow panel coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AeroModel {
    /// Force per unit area per unit normal relative speed (N s / m^3).
    pub normal_coefficient: f64,
    /// Scale the force by |v.n| as well (quadratic in speed).
    pub quadratic: bool,
}

impl Default for AeroModel {
    fn default() -> Self {
        AeroModel {
            normal_coefficient: 1.2,
            quadratic: false,
        }
    }
}

/// Aerodynamic force on one triangle, split equally over its vertices.
/// Degenerate triangles produce no force.
pub fn aero_force_on_triangle(
    positions: [Vec3; 3],
    velocities: [Vec3; 3],
    field: &WindField,
    model: &AeroModel,
    t: f64,
) -> [Vec3; 3] {
    let edge1 = positions[1] - positions[0];
    let edge2 = positions[2] - positions[0];
    let normal_raw = edge1.cross(edge2);
    let doubled_area = normal_raw.length();
    if doubled_area <= 2e-12 {
        return [Vec3::ZERO; 3];
    }
    let area = 0.5 * doubled_area;
    let normal = normal_raw / doubled_area;
    let centroid = (positions[0] + positions[1] + positions[2]) / 3.0;
    let mean_velocity = (velocities[0] + velocities[1] + velocities[2]) / 3.0;
    let v_rel = wind_velocity(field, centroid, t) - mean_velocity;
    let normal_speed = v_rel.dot(normal);
    let scale = if model.quadratic {
        model.normal_coefficient * area * normal_speed * normal_speed.abs()
    } else {
        model.normal_coefficient * area * normal_speed
    };
    let per_vertex = normal * (scale / 3.0);
    [per_vertex, per_vertex, per_vertex]
}

/// Accumulate aerodynamic forces onto every triangle of a system.
pub fn apply_to_system(system: &mut MassSpringSystem, field: &WindField, model: &AeroModel, t: f64) {
    for tri_index in 0..system.triangles.len() {
        let tri = system.triangles[tri_index];
        let positions = [
            system.particles[tri[0]].position,
            system.particles[tri[1]].position,
            system.particles[tri[2]].position,
        ];
        let velocities = [
            system.particles[tri[0]].velocity,
            system.particles[tri[1]].velocity,
            system.particles[tri[2]].velocity,
        ];
        let forces = aero_force_on_triangle(positions, velocities, field, model, t);
        for (corner, f) in tri.iter().zip(forces) {
            system.particles[*corner].force_accum += f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_area_triangle() -> [Vec3; 3] {
        // Right triangle with legs sqrt(2): area exactly 1, normal +z.
        let leg = std::f64::consts::SQRT_2;
        [
            Vec3::ZERO,
            Vec3::new(leg, 0.0, 0.0),
            Vec3::new(0.0, leg, 0.0),
        ]
    }

    #[test]
    fn uniform_field_is_uniform() {
        let field = WindField {
            uniform: Vec3::new(5.0, 0.0, 0.0),
            source: None,
        };
        assert_eq!(wind_velocity(&field, Vec3::ZERO, 0.0), Vec3::new(5.0, 0.0, 0.0));
        assert_eq!(
            wind_velocity(&field, Vec3::new(100.0, -3.0, 7.0), 12.0),
            Vec3::new(5.0, 0.0, 0.0)
        );
    }

    #[test]
    fn source_field_is_radially_symmetric_and_decays() {
        let field = WindField {
            uniform: Vec3::ZERO,
            source: Some(WindSource {
                start: Vec3::new(1.0, 0.0, 0.0),
                velocity: Vec3::ZERO,
                strength: 3.0,
                falloff: 1.5,
            }),
        };
        let va = wind_velocity(&field, Vec3::new(3.0, 0.0, 0.0), 0.0);
        let vb = wind_velocity(&field, Vec3::new(1.0, 2.0, 0.0), 0.0);
        assert!((va.length() - vb.length()).abs() < 1e-12);
        // Pointing away from the source.
        assert!(va.x > 0.0);
        assert!(vb.y > 0.0);
        let far = wind_velocity(&field, Vec3::new(1000.0, 0.0, 0.0), 0.0);
        assert!(far.length() < 1e-12);
    }

    #[test]
    fn moving_source_advects_with_time() {
        let field = WindField {
            uniform: Vec3::ZERO,
            source: Some(WindSource {
                start: Vec3::ZERO,
                velocity: Vec3::new(2.0, 0.0, 0.0),
                strength: 1.0,
                falloff: 1.0,
            }),
        };
        let before = wind_velocity(&field, Vec3::new(4.0, 0.0, 0.0), 0.0).length();
        let after = wind_velocity(&field, Vec3::new(4.0, 0.0, 0.0), 1.5).length();
        assert!(after > before);
    }

    #[test]
    fn in_plane_flow_produces_no_force() {
        let field = WindField {
            uniform: Vec3::new(3.0, -1.0, 0.0),
            source: None,
        };
        let forces = aero_force_on_triangle(
            unit_area_triangle(),
            [Vec3::ZERO; 3],
            &field,
            &AeroModel::default(),
            0.0,
        );
        for f in forces {
            assert!(f.length() < 1e-12);
        }
    }

    #[test]
    fn comoving_triangle_feels_nothing() {
        let wind = Vec3::new(0.0, 0.0, 4.0);
        let field = WindField {
            uniform: wind,
            source: None,
        };
        let forces = aero_force_on_triangle(
            unit_area_triangle(),
            [wind; 3],
            &field,
            &AeroModel::default(),
            0.0,
        );
        for f in forces {
            assert_eq!(f, Vec3::ZERO);
        }
    }

    #[test]
    fn frozen_fixture_normal_flow() {
        // c * A * (v.n) with c = 0.5, A = 1, v.n = 2: total 1 N along +z,
        // one third per vertex.
        let field = WindField {
            uniform: Vec3::new(0.0, 0.0, 2.0),
            source: None,
        };
        let model = AeroModel {
            normal_coefficient: 0.5,
            quadratic: false,
        };
        let forces =
            aero_force_on_triangle(unit_area_triangle(), [Vec3::ZERO; 3], &field, &model, 0.0);
        let total = forces[0] + forces[1] + forces[2];
        assert!((total - Vec3::new(0.0, 0.0, 1.0)).length() < 1e-12);
        for f in forces {
            assert!((f.z - 1.0 / 3.0).abs() < 1e-12);
            assert_eq!(f.x, 0.0);
            assert_eq!(f.y, 0.0);
        }
    }

    #[test]
    fn force_is_purely_normal() {
        let positions = [
            Vec3::new(0.1, 0.2, 0.3),
            Vec3::new(1.3, -0.4, 0.9),
            Vec3::new(-0.5, 1.1, -0.2),
        ];
        let field = WindField {
            uniform: Vec3::new(2.0, 5.0, -3.0),
            source: None,
        };
        let forces = aero_force_on_triangle(
            positions,
            [Vec3::ZERO; 3],
            &field,
            &AeroModel::default(),
            0.0,
        );
        let e1 = positions[1] - positions[0];
        let e2 = positions[2] - positions[0];
        for f in forces {
            assert!(f.dot(e1).abs() < 1e-12 * f.length().max(1.0) * e1.length());
            assert!(f.dot(e2).abs() < 1e-12 * f.length().max(1.0) * e2.length());
        }
    }

    #[test]
    fn winding_order_does_not_matter() {
        let p = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.2),
            Vec3::new(0.0, 1.0, -0.1),
        ];
        let field = WindField {
            uniform: Vec3::new(0.4, -2.0, 3.0),
            source: None,
        };
        let fwd = aero_force_on_triangle(p, [Vec3::ZERO; 3], &field, &AeroModel::default(), 0.0);
        let rev = aero_force_on_triangle(
            [p[0], p[2], p[1]],
            [Vec3::ZERO; 3],
            &field,
            &AeroModel::default(),
            0.0,
        );
        let sum_fwd = fwd[0] + fwd[1] + fwd[2];
        let sum_rev = rev[0] + rev[1] + rev[2];
        assert!((sum_fwd - sum_rev).length() < 1e-12);
    }

    #[test]
    fn doubling_the_coefficient_doubles_the_force() {
        let field = WindField {
            uniform: Vec3::new(1.0, 2.0, 3.0),
            source: None,
        };
        let base = AeroModel {
            normal_coefficient: 0.7,
            quadratic: false,
        };
        let double = AeroModel {
            normal_coefficient: 1.4,
            quadratic: false,
        };
        let p = [
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.1, 0.0),
            Vec3::new(0.0, 1.0, 0.3),
        ];
        let f1 = aero_force_on_triangle(p, [Vec3::ZERO; 3], &field, &base, 0.0);
        let f2 = aero_force_on_triangle(p, [Vec3::ZERO; 3], &field, &double, 0.0);
        for (a, b) in f1.iter().zip(f2) {
            assert!((b - *a * 2.0).length() < 1e-15);
        }
    }

    #[test]
    fn degenerate_triangle_produces_zero() {
        let p = [Vec3::ZERO, Vec3::new(1.0, 0.0, 0.0), Vec3::new(2.0, 0.0, 0.0)];
        let field = WindField {
            uniform: Vec3::new(0.0, 0.0, 5.0),
            source: None,
        };
        let forces =
            aero_force_on_triangle(p, [Vec3::ZERO; 3], &field, &AeroModel::default(), 0.0);
        assert_eq!(forces, [Vec3::ZERO; 3]);
    }
}
