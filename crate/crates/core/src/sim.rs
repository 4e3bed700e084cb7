//! Fixed-step time keeping and the shared integration primitive.
//!
//! Everything in the engine advances on a fixed time step. The clock never
//! accumulates `t += dt`; it reconstructs `t = step_index * dt` so sample
//! times carry no summation drift and runs are reproducible bit for bit.

use crate::error::{SimError, SimResult};
use crate::math::Vec3;

/// Fixed-step simulation clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimClock {
    dt: f64,
    step_index: u64,
}

impl SimClock {
    pub fn new(dt: f64) -> SimResult<SimClock> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(SimError::InvalidParameter(format!(
                "time step must be positive and finite, got {dt}"
            )));
        }
        Ok(SimClock { dt, step_index: 0 })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn step_index(&self) -> u64 {
        self.step_index
    }

    /// Current time, reconstructed as `step_index * dt`.
    pub fn t(&self) -> f64 {
        self.step_index as f64 * self.dt
    }

    pub fn advance(&mut self) {
        self.step_index += 1;
    }
}

/// Time at a given step index on a fixed-step clock.
pub fn step_time(step_index: u64, dt: f64) -> f64 {
    step_index as f64 * dt
}

/// Number of whole steps covering `duration`.
///
/// `duration` must be a non-negative whole multiple of `dt` (within a
/// relative slop of 1e-6 to absorb decimal round-off in configs).
pub fn step_count(duration: f64, dt: f64) -> SimResult<u64> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::InvalidParameter(format!(
            "time step must be positive and finite, got {dt}"
        )));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(SimError::InvalidParameter(format!(
            "duration must be non-negative and finite, got {duration}"
        )));
    }
    let raw = duration / dt;
    let n = raw.round();
    if (raw - n).abs() > 1e-6 * n.max(1.0) {
        return Err(SimError::InvalidParameter(format!(
            "duration {duration} is not a whole multiple of dt {dt}"
        )));
    }
    Ok(n as u64)
}

/// Semi-implicit (symplectic) Euler step: update the velocity with the
/// current acceleration, then update the position with the *new* velocity.
pub fn step_semi_implicit(
    position: &mut Vec3,
    velocity: &mut Vec3,
    acceleration: Vec3,
    dt: f64,
) -> SimResult<()> {
    if !acceleration.is_finite() {
        return Err(SimError::NonFinite {
            context: "acceleration",
            index: None,
        });
    }
    *velocity += acceleration * dt;
    *position += *velocity * dt;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_dynamics_stays_put() {
        let mut x = Vec3::ZERO;
        let mut v = Vec3::ZERO;
        step_semi_implicit(&mut x, &mut v, Vec3::ZERO, 0.1).unwrap();
        assert_eq!(x, Vec3::ZERO);
        assert_eq!(v, Vec3::ZERO);
    }

    #[test]
    fn uniform_motion_advances_position() {
        let mut x = Vec3::ZERO;
        let mut v = Vec3::new(1.0, 0.0, 0.0);
        step_semi_implicit(&mut x, &mut v, Vec3::ZERO, 0.5).unwrap();
        assert_eq!(x, Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(v, Vec3::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn velocity_updates_before_position() {
        let mut x = Vec3::ZERO;
        let mut v = Vec3::ZERO;
        let a = Vec3::new(0.0, -9.81, 0.0);
        let dt = 0.01;
        step_semi_implicit(&mut x, &mut v, a, dt).unwrap();
        // One-step closed form of the update rule: v' = a*dt, x' = v'*dt.
        assert_eq!(v.y, -9.81 * dt);
        assert_eq!(x.y, (-9.81 * dt) * dt);
        assert!((v.y - -0.0981).abs() < 1e-15);
        assert!((x.y - -0.000981).abs() < 1e-15);
    }

    #[test]
    fn non_finite_acceleration_is_rejected() {
        let mut x = Vec3::ZERO;
        let mut v = Vec3::ZERO;
        let err = step_semi_implicit(&mut x, &mut v, Vec3::new(f64::NAN, 0.0, 0.0), 0.1);
        assert!(matches!(err, Err(SimError::NonFinite { .. })));
    }

    #[test]
    fn clock_time_is_reconstructed_not_accumulated() {
        let mut clock = SimClock::new(0.1).unwrap();
        for _ in 0..1000 {
            clock.advance();
        }
        assert_eq!(clock.t(), 1000.0 * 0.1);
        assert_eq!(clock.step_index(), 1000);
    }

    #[test]
    fn clock_rejects_bad_dt() {
        assert!(SimClock::new(0.0).is_err());
        assert!(SimClock::new(-1.0).is_err());
        assert!(SimClock::new(f64::NAN).is_err());
    }

    #[test]
    fn step_count_accepts_whole_multiples_only() {
        assert_eq!(step_count(1.0, 1e-3).unwrap(), 1000);
        assert_eq!(step_count(0.0, 1e-3).unwrap(), 0);
        assert_eq!(step_count(0.0833, 1e-5).unwrap(), 8330);
        assert!(step_count(1.0005, 1e-3).is_err());
        assert!(step_count(-1.0, 1e-3).is_err());
    }

    #[test]
    fn constant_acceleration_matches_discrete_closed_form() {
        // The semi-implicit update under constant acceleration has the exact
        // discrete solution x_n = x0 + n*dt*v0 + dt^2*g*n(n+1)/2.
        let g = Vec3::new(0.0, -9.81, 0.0);
        let v0 = Vec3::new(2.0, 1.0, 0.0);
        let dt = 1e-3;
        let mut x = Vec3::ZERO;
        let mut v = v0;
        let n = 1000u64;
        for _ in 0..n {
            step_semi_implicit(&mut x, &mut v, g, dt).unwrap();
        }
        let nf = n as f64;
        let closed = v0 * (nf * dt) + g * (dt * dt * nf * (nf + 1.0) / 2.0);
        assert!((x - closed).length() < 1e-10 * closed.length().max(1.0));
        let v_closed = v0 + g * (nf * dt);
        assert!((v - v_closed).length() < 1e-10 * v_closed.length().max(1.0));
    }
}
