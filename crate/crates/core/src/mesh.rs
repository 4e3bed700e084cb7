//! Deterministic mesh builders: hanging net, rectangular grid, and serial
//! cord. All builders emit springs at their as-built lengths so a freshly
//! built system is exactly force-free.

use crate::error::{SimError, SimResult};
use crate::math::Vec3;
use crate::spring::{Material, MassSpringSystem, Particle, Spring};

/// Which edge of a grid is pinned in place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PinnedEdge {
    None,
    Top,
    Left,
    AllCorners,
}

/// Bend springs connect every-other particle; they get a fraction of the
/// structural stiffness so sheets resist folding without going stiffer.
const BEND_STIFFNESS_SCALE: f64 = 0.1;

fn spring_between(
    particles: &[Particle],
    a: usize,
    b: usize,
    material: &Material,
    stiffness_scale: f64,
) -> Spring {
    Spring {
        a,
        b,
        rest_length: (particles[b].position - particles[a].position).length(),
        stiffness: material.stiffness * stiffness_scale,
        damping: material.damping,
        compression_scale: material.compression_scale,
    }
}

/// Build a tapered cylindrical net hanging from a fixed rim.
///
/// The rim is `spokes` pinned anchor particles on a circle of `rim_radius`
/// at y = 0. Below it hang `rings` rings of `spokes` free particles each,
/// connected by ring springs, spoke springs, and both diagonals, with the
/// top ring attached to the anchors by rim springs. `total_mass` is spread
/// uniformly over the free particles; the pinned anchors carry a nominal
/// copy of the per-particle mass that never enters the dynamics.
pub fn build_net(
    rings: usize,
    spokes: usize,
    rim_radius: f64,
    depth: f64,
    taper: f64,
    total_mass: f64,
    material: &Material,
) -> SimResult<MassSpringSystem> {
    if rings < 2 || spokes < 3 {
        return Err(SimError::InvalidParameter(format!(
            "net needs rings >= 2 and spokes >= 3, got {rings} x {spokes}"
        )));
    }
    if !(rim_radius > 0.0 && depth > 0.0 && total_mass > 0.0) || !(0.0..1.0).contains(&taper) {
        return Err(SimError::InvalidParameter(
            "net dimensions must be positive and taper in [0, 1)".to_string(),
        ));
    }

    let free_count = rings * spokes;
    let particle_mass = total_mass / free_count as f64;
    let mut particles = Vec::with_capacity(free_count + spokes);

    // Anchors first: indices 0..spokes, pinned on the rim circle.
    for s in 0..spokes {
        let theta = 2.0 * std::f64::consts::PI * s as f64 / spokes as f64;
        let mut p = Particle::new(
            particle_mass,
            Vec3::new(rim_radius * theta.cos(), 0.0, rim_radius * theta.sin()),
        );
        p.pinned = true;
        particles.push(p);
    }
    // Free rings below, tapering toward the bottom.
    for r in 0..rings {
        let frac = (r + 1) as f64 / rings as f64;
        let radius = rim_radius * (1.0 - taper * frac);
        let y = -depth * frac;
        for s in 0..spokes {
            let theta = 2.0 * std::f64::consts::PI * s as f64 / spokes as f64;
            particles.push(Particle::new(
                particle_mass,
                Vec3::new(radius * theta.cos(), y, radius * theta.sin()),
            ));
        }
    }

    let ring_index = |r: usize, s: usize| spokes + r * spokes + (s % spokes);
    let mut springs = Vec::new();
    // Rim attachments: anchor s to top-ring s.
    for s in 0..spokes {
        springs.push(spring_between(&particles, s, ring_index(0, s), material, 1.0));
    }
    // Circumferential springs on every ring.
    for r in 0..rings {
        for s in 0..spokes {
            springs.push(spring_between(
                &particles,
                ring_index(r, s),
                ring_index(r, s + 1),
                material,
                1.0,
            ));
        }
    }
    // Spoke springs and the two diagonals of each quad.
    for r in 0..rings - 1 {
        for s in 0..spokes {
            springs.push(spring_between(
                &particles,
                ring_index(r, s),
                ring_index(r + 1, s),
                material,
                1.0,
            ));
            springs.push(spring_between(
                &particles,
                ring_index(r, s),
                ring_index(r + 1, s + 1),
                material,
                1.0,
            ));
            springs.push(spring_between(
                &particles,
                ring_index(r, s + 1),
                ring_index(r + 1, s),
                material,
                1.0,
            ));
        }
    }

    let sys = MassSpringSystem::new(particles, springs);
    sys.validate()?;
    Ok(sys)
}

/// Build a rows x cols rectangular sheet in the xy plane with structural,
/// shear, and bend springs, plus triangles for the aerodynamic model.
///
/// Row 0 sits at y = 0 with rows descending; column 0 sits at x = 0 with
/// columns extending along +x. `total_mass` is spread uniformly over all
/// particles.
pub fn build_grid(
    rows: usize,
    cols: usize,
    width: f64,
    height: f64,
    total_mass: f64,
    material: &Material,
    pinned_edge: PinnedEdge,
) -> SimResult<MassSpringSystem> {
    if rows < 2 || cols < 2 {
        return Err(SimError::InvalidParameter(format!(
            "grid needs rows, cols >= 2, got {rows} x {cols}"
        )));
    }
    if !(width > 0.0 && height > 0.0 && total_mass > 0.0) {
        return Err(SimError::InvalidParameter(
            "grid dimensions and mass must be positive".to_string(),
        ));
    }

    let dx = width / (cols - 1) as f64;
    let dy = height / (rows - 1) as f64;
    let particle_mass = total_mass / (rows * cols) as f64;
    let index = |i: usize, j: usize| i * cols + j;

    let mut particles = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        for j in 0..cols {
            let mut p = Particle::new(
                particle_mass,
                Vec3::new(j as f64 * dx, -(i as f64) * dy, 0.0),
            );
            p.pinned = match pinned_edge {
                PinnedEdge::None => false,
                PinnedEdge::Top => i == 0,
                PinnedEdge::Left => j == 0,
                PinnedEdge::AllCorners => {
                    (i == 0 || i == rows - 1) && (j == 0 || j == cols - 1)
                }
            };
            particles.push(p);
        }
    }

    let mut springs = Vec::new();
    // Structural.
    for i in 0..rows {
        for j in 0..cols - 1 {
            springs.push(spring_between(&particles, index(i, j), index(i, j + 1), material, 1.0));
        }
    }
    for i in 0..rows - 1 {
        for j in 0..cols {
            springs.push(spring_between(&particles, index(i, j), index(i + 1, j), material, 1.0));
        }
    }
    // Shear.
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            springs.push(spring_between(
                &particles,
                index(i, j),
                index(i + 1, j + 1),
                material,
                1.0,
            ));
            springs.push(spring_between(
                &particles,
                index(i, j + 1),
                index(i + 1, j),
                material,
                1.0,
            ));
        }
    }
    // Bend: spans two particles.
    for i in 0..rows {
        for j in 0..cols.saturating_sub(2) {
            springs.push(spring_between(
                &particles,
                index(i, j),
                index(i, j + 2),
                material,
                BEND_STIFFNESS_SCALE,
            ));
        }
    }
    for i in 0..rows.saturating_sub(2) {
        for j in 0..cols {
            springs.push(spring_between(
                &particles,
                index(i, j),
                index(i + 2, j),
                material,
                BEND_STIFFNESS_SCALE,
            ));
        }
    }

    let mut triangles = Vec::with_capacity(2 * (rows - 1) * (cols - 1));
    for i in 0..rows - 1 {
        for j in 0..cols - 1 {
            triangles.push([index(i, j), index(i + 1, j), index(i, j + 1)]);
            triangles.push([index(i + 1, j), index(i + 1, j + 1), index(i, j + 1)]);
        }
    }

    let mut sys = MassSpringSystem::new(particles, springs);
    sys.triangles = triangles;
    sys.validate()?;
    Ok(sys)
}

/// Build a serial cord of `segments` springs hanging straight down from
/// `anchor`. The top particle is pinned at the anchor; the bottom particle
/// is the attachment handle for a rigid body. `total_mass` is spread
/// uniformly over all particles.
pub fn build_cord(
    segments: usize,
    length: f64,
    total_mass: f64,
    material: &Material,
    anchor: Vec3,
) -> SimResult<MassSpringSystem> {
    if segments < 1 {
        return Err(SimError::InvalidParameter(
            "cord needs at least one segment".to_string(),
        ));
    }
    if !(length > 0.0 && total_mass > 0.0) {
        return Err(SimError::InvalidParameter(
            "cord length and mass must be positive".to_string(),
        ));
    }
    let seg_len = length / segments as f64;
    let particle_mass = total_mass / (segments + 1) as f64;
    let mut particles = Vec::with_capacity(segments + 1);
    for i in 0..=segments {
        let mut p = Particle::new(particle_mass, anchor - Vec3::new(0.0, seg_len * i as f64, 0.0));
        p.pinned = i == 0;
        particles.push(p);
    }
    let mut springs = Vec::with_capacity(segments);
    for i in 0..segments {
        springs.push(spring_between(&particles, i, i + 1, material, 1.0));
    }
    let sys = MassSpringSystem::new(particles, springs);
    sys.validate()?;
    Ok(sys)
}
