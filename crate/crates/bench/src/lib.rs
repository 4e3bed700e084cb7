//! Shared fixtures for the engine benchmarks.

use tandem_core::math::Vec3;
use tandem_core::mesh::{build_grid, build_net, PinnedEdge};
use tandem_core::rigid::{RigidBody, Shape};
use tandem_core::spring::{MassSpringSystem, Material};

/// The shipped basketball net.
pub fn basketball_net() -> MassSpringSystem {
    let mut net = build_net(6, 12, 0.23, 0.4, 0.4, 0.03, &Material::nylon_net()).unwrap();
    net.global_damping = 0.1;
    net
}

/// The shipped basketball, placed mid-net so contact work is non-trivial.
pub fn ball_in_net() -> RigidBody {
    let mut ball = RigidBody::new(Shape::Sphere { radius: 0.12 }, 0.68).unwrap();
    ball.position = Vec3::new(0.0, -0.15, 0.0);
    ball.linear_velocity = Vec3::new(1.0, -2.0, 0.0);
    ball.angular_velocity = Vec3::new(0.0, 0.0, -15.0);
    ball
}

/// A flag-sized cloth sheet with aero triangles.
pub fn cloth_sheet() -> MassSpringSystem {
    build_grid(8, 12, 1.0, 0.6, 0.12, &Material::cloth(), PinnedEdge::Left).unwrap()
}
