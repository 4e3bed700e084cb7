//! Time-stamped recordings of body and particle states.
//!
//! A [`MotionTrace`] is the handoff between the primary pass and the
//! secondary pass of one-way and hybrid runs. Its CSV form (see
//! [`MotionTrace::to_csv`]) is a stable on-disk format: one row per sample,
//! full-precision decimal, header
//! `t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz`.

use crate::error::{SimError, SimResult};
use crate::math::{Quat, Vec3};
use crate::rigid::BodyState;

pub const TRACE_CSV_HEADER: &str = "t,px,py,pz,qw,qx,qy,qz,vx,vy,vz,wx,wy,wz";

/// One recorded body state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodySample {
    pub t: f64,
    pub state: BodyState,
}

/// Uniformly sampled body states with strictly increasing time stamps.
#[derive(Debug, Clone, PartialEq)]
pub struct MotionTrace {
    samples: Vec<BodySample>,
    interval: f64,
}

impl MotionTrace {
    pub fn new(interval: f64) -> MotionTrace {
        MotionTrace {
            samples: Vec::new(),
            interval,
        }
    }

    pub fn push(&mut self, t: f64, state: BodyState) {
        self.samples.push(BodySample { t, state });
    }

    pub fn samples(&self) -> &[BodySample] {
        &self.samples
    }

    pub fn interval(&self) -> f64 {
        self.interval
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn t_min(&self) -> f64 {
        self.samples.first().map(|s| s.t).unwrap_or(0.0)
    }

    pub fn t_max(&self) -> f64 {
        self.samples.last().map(|s| s.t).unwrap_or(0.0)
    }

    /// Body state at time `t`: linear interpolation for position and
    /// velocities, spherical-linear for orientation. Times within a relative
    /// 1e-9 of a sample return that sample exactly.
    pub fn interpolate(&self, t: f64) -> SimResult<BodyState> {
        if self.samples.is_empty() {
            return Err(SimError::PlaybackOutOfRange {
                t,
                t_min: 0.0,
                t_max: 0.0,
            });
        }
        let t_min = self.t_min();
        let t_max = self.t_max();
        let eps = self.interval * 1e-9;
        if t < t_min - eps || t > t_max + eps {
            return Err(SimError::PlaybackOutOfRange { t, t_min, t_max });
        }
        if self.samples.len() == 1 {
            return Ok(self.samples[0].state);
        }
        let u = ((t - t_min) / self.interval).clamp(0.0, (self.samples.len() - 1) as f64);
        let mut index = u.floor() as usize;
        if index >= self.samples.len() - 1 {
            index = self.samples.len() - 2;
        }
        let frac = u - index as f64;
        if frac <= 1e-9 {
            return Ok(self.samples[index].state);
        }
        if frac >= 1.0 - 1e-9 {
            return Ok(self.samples[index + 1].state);
        }
        let a = &self.samples[index].state;
        let b = &self.samples[index + 1].state;
        Ok(BodyState {
            position: a.position + (b.position - a.position) * frac,
            orientation: a.orientation.slerp(b.orientation, frac),
            linear_velocity: a.linear_velocity
                + (b.linear_velocity - a.linear_velocity) * frac,
            angular_velocity: a.angular_velocity
                + (b.angular_velocity - a.angular_velocity) * frac,
        })
    }

    /// Keep every `every`-th sample (plus the first), preserving exact values.
    pub fn downsample(&self, every: usize) -> MotionTrace {
        let every = every.max(1);
        let mut out = MotionTrace::new(self.interval * every as f64);
        for (i, s) in self.samples.iter().enumerate() {
            if i % every == 0 {
                out.samples.push(*s);
            }
        }
        out
    }

    /// Serialize with full round-trip precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (self.samples.len() + 1));
        out.push_str(TRACE_CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let p = s.state.position;
            let q = s.state.orientation;
            let v = s.state.linear_velocity;
            let w = s.state.angular_velocity;
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                s.t, p.x, p.y, p.z, q.w, q.x, q.y, q.z, v.x, v.y, v.z, w.x, w.y, w.z
            ));
        }
        out
    }

    pub fn from_csv(text: &str) -> SimResult<MotionTrace> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == TRACE_CSV_HEADER => {}
            _ => return Err(SimError::Parse("missing trace CSV header".to_string())),
        }
        let mut samples = Vec::new();
        for (lineno, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 14 {
                return Err(SimError::Parse(format!(
                    "trace CSV line {}: expected 14 fields, got {}",
                    lineno + 2,
                    fields.len()
                )));
            }
            let mut vals = [0.0f64; 14];
            for (slot, field) in vals.iter_mut().zip(&fields) {
                *slot = field.trim().parse::<f64>().map_err(|e| {
                    SimError::Parse(format!("trace CSV line {}: {e}", lineno + 2))
                })?;
            }
            samples.push(BodySample {
                t: vals[0],
                state: BodyState {
                    position: Vec3::new(vals[1], vals[2], vals[3]),
                    orientation: Quat::new(vals[4], vals[5], vals[6], vals[7]),
                    linear_velocity: Vec3::new(vals[8], vals[9], vals[10]),
                    angular_velocity: Vec3::new(vals[11], vals[12], vals[13]),
                },
            });
        }
        let interval = if samples.len() >= 2 {
            samples[1].t - samples[0].t
        } else {
            1.0
        };
        Ok(MotionTrace { samples, interval })
    }
}

/// Particle positions sampled at the output interval.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondarySample {
    pub t: f64,
    pub positions: Vec<Vec3>,
}

/// Secondary-system recording: particle positions per output sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondaryTrace {
    pub interval: f64,
    pub samples: Vec<SecondarySample>,
}

impl SecondaryTrace {
    pub fn new(interval: f64) -> SecondaryTrace {
        SecondaryTrace {
            interval,
            samples: Vec::new(),
        }
    }

    pub fn push(&mut self, t: f64, positions: Vec<Vec3>) {
        self.samples.push(SecondarySample { t, positions });
    }

    /// Header `t,p0x,p0y,p0z,p1x,...`, one row per sample.
    pub fn to_csv(&self) -> String {
        let n = self.samples.first().map(|s| s.positions.len()).unwrap_or(0);
        let mut out = String::new();
        out.push('t');
        for i in 0..n {
            out.push_str(&format!(",p{i}x,p{i}y,p{i}z"));
        }
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{}", s.t));
            for p in &s.positions {
                out.push_str(&format!(",{},{},{}", p.x, p.y, p.z));
            }
            out.push('\n');
        }
        out
    }
}
