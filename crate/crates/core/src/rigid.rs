//! The primary system: a rigid body (sphere or box) under gravity with
//! force/torque accumulators.

use crate::error::{SimError, SimResult};
use crate::math::{Quat, Vec3};
use crate::sim::step_semi_implicit;

/// Collision shape of the primary body.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Sphere { radius: f64 },
    Box { half_extents: Vec3 },
}

impl Shape {
    /// Body-frame diagonal inertia for a uniform-density body of `mass`.
    /// Spheres use the solid-sphere 2/5 m r^2; boxes the standard cuboid form.
    pub fn default_inertia(&self, mass: f64) -> Vec3 {
        match *self {
            Shape::Sphere { radius } => {
                let i = 0.4 * mass * radius * radius;
                Vec3::new(i, i, i)
            }
            Shape::Box { half_extents: h } => Vec3::new(
                mass / 3.0 * (h.y * h.y + h.z * h.z),
                mass / 3.0 * (h.x * h.x + h.z * h.z),
                mass / 3.0 * (h.x * h.x + h.y * h.y),
            ),
        }
    }
}

/// Constant gravitational acceleration, fixed for the lifetime of a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravityModel {
    pub g: Vec3,
}

impl Default for GravityModel {
    fn default() -> Self {
        GravityModel {
            g: Vec3::new(0.0, -9.81, 0.0),
        }
    }
}

/// Kinematic snapshot of a rigid body, used for trace recording and playback.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyState {
    pub position: Vec3,
    pub orientation: Quat,
    pub linear_velocity: Vec3,
    pub angular_velocity: Vec3,
}

impl BodyState {
    /// Velocity of the material point currently at `world_point`.
    pub fn velocity_at_point(&self, world_point: Vec3) -> Vec3 {
        self.linear_velocity + self.angular_velocity.cross(world_point - self.position)
    }

    pub fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.orientation.is_finite()
            && self.linear_velocity.is_finite()
            && self.angular_velocity.is_finite()
    }
}

/// A rigid body with force and torque accumulators.
///
/// Angular velocity is stored in the world frame; the angular update runs the
/// body-frame Euler equations against the diagonal body-frame inertia.
#[derive(Debug, Clone, PartialEq)]
pub struct RigidBody {
    pub mass: f64,
    pub inertia_diag: Vec3,
    pub position: Vec3,
    pub orientation: Quat,
    pub linear_velocity: Vec3,
    pub angular_velocity: Vec3,
    pub force_accum: Vec3,
    pub torque_accum: Vec3,
    pub shape: Shape,
}

impl RigidBody {
    pub fn new(shape: Shape, mass: f64) -> SimResult<RigidBody> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(SimError::InvalidParameter(format!(
                "rigid body mass must be positive, got {mass}"
            )));
        }
        match shape {
            Shape::Sphere { radius } if radius <= 0.0 => {
                return Err(SimError::InvalidParameter(format!(
                    "sphere radius must be positive, got {radius}"
                )));
            }
            Shape::Box { half_extents: h } if h.x <= 0.0 || h.y <= 0.0 || h.z <= 0.0 => {
                return Err(SimError::InvalidParameter(
                    "box half-extents must be positive".to_string(),
                ));
            }
            _ => {}
        }
        Ok(RigidBody {
            mass,
            inertia_diag: shape.default_inertia(mass),
            position: Vec3::ZERO,
            orientation: Quat::IDENTITY,
            linear_velocity: Vec3::ZERO,
            angular_velocity: Vec3::ZERO,
            force_accum: Vec3::ZERO,
            torque_accum: Vec3::ZERO,
            shape,
        })
    }

    pub fn state(&self) -> BodyState {
        BodyState {
            position: self.position,
            orientation: self.orientation,
            linear_velocity: self.linear_velocity,
            angular_velocity: self.angular_velocity,
        }
    }

    pub fn apply_force(&mut self, force: Vec3) {
        self.force_accum += force;
    }

    pub fn apply_torque(&mut self, torque: Vec3) {
        self.torque_accum += torque;
    }

    /// Accumulate a force acting at a world-space point, together with the
    /// moment it produces about the centre of mass.
    pub fn apply_force_at_point(&mut self, force: Vec3, world_point: Vec3) {
        self.force_accum += force;
        self.torque_accum += (world_point - self.position).cross(force);
    }

    /// Velocity of the body surface point currently at `world_point`.
    pub fn velocity_at_point(&self, world_point: Vec3) -> Vec3 {
        self.state().velocity_at_point(world_point)
    }

    fn is_isotropic(&self) -> bool {
        self.inertia_diag.x == self.inertia_diag.y && self.inertia_diag.y == self.inertia_diag.z
    }

    /// Body-frame Euler equations with diagonal inertia, then orientation
    /// integration with the updated angular velocity.
    fn step_angular(&mut self, dt: f64) {
        if self.torque_accum == Vec3::ZERO && self.is_isotropic() {
            // Torque-free isotropic body: the gyroscopic term vanishes and
            // the world-frame angular velocity is exactly constant. Skipping
            // the frame round-trip keeps it constant bit for bit.
            if self.angular_velocity != Vec3::ZERO {
                self.orientation = self.orientation.integrate(self.angular_velocity, dt);
            }
            return;
        }
        let q = self.orientation;
        let i = self.inertia_diag;
        let omega_b = q.rotate_inv(self.angular_velocity);
        let torque_b = q.rotate_inv(self.torque_accum);
        let gyro = omega_b.cross(omega_b.scale_by(i));
        let alpha_b = Vec3::new(
            (torque_b.x - gyro.x) / i.x,
            (torque_b.y - gyro.y) / i.y,
            (torque_b.z - gyro.z) / i.z,
        );
        let omega_b_next = omega_b + alpha_b * dt;
        self.angular_velocity = q.rotate(omega_b_next);
        self.orientation = q.integrate(self.angular_velocity, dt);
    }

    fn check_finite(&self) -> SimResult<()> {
        if self.position.is_finite()
            && self.linear_velocity.is_finite()
            && self.angular_velocity.is_finite()
            && self.orientation.is_finite()
        {
            Ok(())
        } else {
            Err(SimError::NonFinite {
                context: "rigid body state",
                index: None,
            })
        }
    }

    fn clear_accumulators(&mut self) {
        self.force_accum = Vec3::ZERO;
        self.torque_accum = Vec3::ZERO;
    }

    /// Semi-implicit Euler step consuming the accumulated force and torque.
    /// This is the integrator used when the body runs in lockstep with a
    /// secondary system.
    pub fn step(&mut self, gravity: Vec3, dt: f64) -> SimResult<()> {
        let accel = gravity + self.force_accum / self.mass;
        step_semi_implicit(&mut self.position, &mut self.linear_velocity, accel, dt)?;
        self.step_angular(dt);
        self.clear_accumulators();
        self.check_finite()
    }

    /// Large-step advance, exact when the accumulated force is constant over
    /// the step: x' = x + v dt + a dt^2/2, v' = v + a dt.
    ///
    /// In free flight this reproduces the ballistic closed form to round-off
    /// at any step size, which is what the one-way and hybrid primary passes
    /// rely on.
    pub fn step_free_flight(&mut self, gravity: Vec3, dt: f64) -> SimResult<()> {
        let accel = gravity + self.force_accum / self.mass;
        if !accel.is_finite() {
            return Err(SimError::NonFinite {
                context: "acceleration",
                index: None,
            });
        }
        self.position += self.linear_velocity * dt + accel * (0.5 * dt * dt);
        self.linear_velocity += accel * dt;
        self.step_angular(dt);
        self.clear_accumulators();
        self.check_finite()
    }
}

/// Continuous-time ballistic position: x0 + v0 t + g t^2 / 2.
pub fn ballistic_position(x0: Vec3, v0: Vec3, g: Vec3, t: f64) -> Vec3 {
    x0 + v0 * t + g * (0.5 * t * t)
}

/// Continuous-time ballistic velocity: v0 + g t.
pub fn ballistic_velocity(v0: Vec3, g: Vec3, t: f64) -> Vec3 {
    v0 + g * t
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ball() -> RigidBody {
        RigidBody::new(Shape::Sphere { radius: 0.12 }, 0.68).unwrap()
    }

    #[test]
    fn constructor_validates_parameters() {
        assert!(RigidBody::new(Shape::Sphere { radius: 0.1 }, 0.0).is_err());
        assert!(RigidBody::new(Shape::Sphere { radius: -0.1 }, 1.0).is_err());
        assert!(RigidBody::new(
            Shape::Box {
                half_extents: Vec3::new(0.1, 0.0, 0.1)
            },
            1.0
        )
        .is_err());
    }

    #[test]
    fn sphere_inertia_is_isotropic_solid_sphere() {
        let b = ball();
        let expect = 0.4 * 0.68 * 0.12 * 0.12;
        assert_eq!(b.inertia_diag, Vec3::new(expect, expect, expect));
    }

    #[test]
    fn force_at_center_of_mass_leaves_torque_unchanged() {
        let mut b = ball();
        b.position = Vec3::new(1.0, 2.0, 3.0);
        b.apply_force_at_point(Vec3::new(5.0, -1.0, 2.0), b.position);
        assert_eq!(b.torque_accum, Vec3::ZERO);
        assert_eq!(b.force_accum, Vec3::new(5.0, -1.0, 2.0));
    }

    #[test]
    fn unit_lever_arm_gives_unit_cross_product_torque() {
        let mut b = ball();
        b.apply_force_at_point(Vec3::new(0.0, 0.0, 1.0), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(b.torque_accum, Vec3::new(0.0, -1.0, 0.0));
    }

    #[test]
    fn symmetric_force_pair_cancels_torque() {
        let mut b = ball();
        let f = Vec3::new(0.0, 3.0, 0.0);
        let r = Vec3::new(0.4, 0.0, 0.7);
        b.apply_force_at_point(f, b.position + r);
        b.apply_force_at_point(f, b.position - r);
        assert_eq!(b.force_accum, f * 2.0);
        assert!(b.torque_accum.length() < 1e-15);
    }

    #[test]
    fn force_accumulation_is_order_insensitive() {
        let forces = [
            (Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.1, 0.0, -0.2)),
            (Vec3::new(-0.5, 0.3, 1.1), Vec3::new(-0.3, 0.2, 0.05)),
            (Vec3::new(2.2, -1.7, 0.4), Vec3::new(0.0, -0.1, 0.3)),
        ];
        let mut fwd = ball();
        for (f, p) in forces {
            fwd.apply_force_at_point(f, p);
        }
        let mut rev = ball();
        for (f, p) in forces.iter().rev() {
            rev.apply_force_at_point(*f, *p);
        }
        assert!((fwd.force_accum - rev.force_accum).length() < 1e-12);
        assert!((fwd.torque_accum - rev.torque_accum).length() < 1e-12);
    }

    #[test]
    fn pure_translation_keeps_orientation() {
        let mut b = ball();
        b.linear_velocity = Vec3::new(1.0, 0.0, 0.0);
        for _ in 0..100 {
            b.step(Vec3::ZERO, 0.01).unwrap();
        }
        assert_abs_diff_eq!(b.position.x, 1.0, epsilon = 1e-12);
        assert_eq!(b.orientation, Quat::IDENTITY);
        assert_eq!(b.angular_velocity, Vec3::ZERO);
    }

    #[test]
    fn principal_axis_spin_stays_constant() {
        let mut b = RigidBody::new(
            Shape::Box {
                half_extents: Vec3::new(0.1, 0.2, 0.3),
            },
            2.0,
        )
        .unwrap();
        b.angular_velocity = Vec3::new(7.0, 0.0, 0.0);
        let speed0 = b.angular_velocity.length();
        for _ in 0..100_000 {
            b.step(Vec3::ZERO, 1e-4).unwrap();
        }
        let speed = b.angular_velocity.length();
        assert!((speed - speed0).abs() / speed0 < 1e-9);
    }

    #[test]
    fn sphere_conserves_angular_momentum_without_torque() {
        let mut b = ball();
        b.angular_velocity = Vec3::new(3.0, -11.0, 5.0);
        let l0 = b.angular_velocity * b.inertia_diag.x;
        for _ in 0..100_000 {
            b.step(Vec3::new(0.0, -9.81, 0.0), 1e-5).unwrap();
        }
        let l = b.angular_velocity * b.inertia_diag.x;
        assert!((l - l0).length() / l0.length() < 1e-9);
    }

    #[test]
    fn gravity_only_matches_semi_implicit_closed_form() {
        let g = Vec3::new(0.0, -9.81, 0.0);
        let v0 = Vec3::new(1.5, 2.0, 0.0);
        let dt = 1e-3;
        let n = 1000u64;
        let mut b = ball();
        b.linear_velocity = v0;
        for _ in 0..n {
            b.step(g, dt).unwrap();
        }
        let nf = n as f64;
        let closed = v0 * (nf * dt) + g * (dt * dt * nf * (nf + 1.0) / 2.0);
        assert!((b.position - closed).length() < 1e-10 * closed.length());
        // One-sided O(dt) bias against the continuous parabola: g*t*dt/2.
        let continuous = ballistic_position(Vec3::ZERO, v0, g, nf * dt);
        let bias = (b.position - continuous).length();
        let expect_bias = 0.5 * 9.81 * (nf * dt) * dt;
        assert!((bias - expect_bias).abs() < 0.05 * expect_bias);
    }

    #[test]
    fn trajectory_error_is_first_order_in_dt() {
        let g = Vec3::new(0.0, -9.81, 0.0);
        let v0 = Vec3::new(1.0, 4.0, 0.0);
        let mut errs = Vec::new();
        for &dt in &[1e-2f64, 1e-3, 1e-4] {
            let mut b = ball();
            b.linear_velocity = v0;
            let n = (1.0 / dt).round() as u64;
            for _ in 0..n {
                b.step(g, dt).unwrap();
            }
            let exact = ballistic_position(Vec3::ZERO, v0, g, 1.0);
            errs.push((b.position - exact).length());
        }
        assert!(errs[1] < errs[0]);
        assert!(errs[2] < errs[1]);
        // O(dt): each tenfold dt reduction shrinks the error about tenfold.
        assert!(errs[0] / errs[1] > 5.0 && errs[0] / errs[1] < 20.0);
        assert!(errs[1] / errs[2] > 5.0 && errs[1] / errs[2] < 20.0);
    }

    #[test]
    fn free_flight_step_reproduces_parabola_at_large_dt() {
        let g = Vec3::new(0.0, -9.81, 0.0);
        let v0 = Vec3::new(3.0, 4.0, 0.0);
        let x0 = Vec3::new(-2.0, 1.0, 0.5);
        let mut b = ball();
        b.position = x0;
        b.linear_velocity = v0;
        let dt = 1e-2;
        for _ in 0..100 {
            b.step_free_flight(g, dt).unwrap();
        }
        let exact = ballistic_position(x0, v0, g, 1.0);
        assert!((b.position - exact).length() < 1e-10 * exact.length().max(1.0));
    }

    #[test]
    fn ballistic_position_closed_form() {
        let x0 = Vec3::new(1.0, 2.0, 3.0);
        assert_eq!(ballistic_position(x0, Vec3::ZERO, Vec3::ZERO, 0.0), x0);
        let g = Vec3::new(0.0, -9.81, 0.0);
        let p = ballistic_position(x0, Vec3::ZERO, g, 1.0);
        assert_abs_diff_eq!(p.y, 2.0 - 4.905, epsilon = 1e-12);
        let p2 = ballistic_position(x0, Vec3::new(3.0, 4.0, 0.0), Vec3::ZERO, 2.0);
        assert_eq!(p2, x0 + Vec3::new(6.0, 8.0, 0.0));
    }

    #[test]
    fn non_finite_state_is_reported() {
        let mut b = ball();
        b.apply_force(Vec3::new(f64::INFINITY, 0.0, 0.0));
        assert!(matches!(
            b.step(Vec3::ZERO, 1e-3),
            Err(SimError::NonFinite { .. })
        ));
    }
}
