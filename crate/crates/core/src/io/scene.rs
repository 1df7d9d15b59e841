//! Deterministic synthetic scenes.
//!
//! Every generator draws from one [`SplitMix64`] stream in a fixed order, so
//! a (kind, parameters, seed) triple always yields the same cloud.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::point::{Point, PointCloud};
use crate::rng::SplitMix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SceneKind {
    /// Uniform points in an axis-aligned cube centered at the origin, random colors.
    RandomCube,
    /// Two parallel square patches facing +Z, `separation` apart, the nearer
    /// one red at `z = -distance`, the farther one blue. Points of both
    /// patches are interleaved in random order.
    ZfightPlanes,
    /// Points on a sphere centered at the origin, colored by normal.
    SphereShell,
}

impl SceneKind {
    pub const ALL: [SceneKind; 3] = [SceneKind::RandomCube, SceneKind::ZfightPlanes, SceneKind::SphereShell];

    pub fn name(self) -> &'static str {
        match self {
            SceneKind::RandomCube => "random-cube",
            SceneKind::ZfightPlanes => "zfight-planes",
            SceneKind::SphereShell => "sphere-shell",
        }
    }
}

impl fmt::Display for SceneKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SceneKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SceneKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown scene kind {s:?} (expected random-cube, zfight-planes or sphere-shell)"))
    }
}

pub const NEAR_PLANE_RGB: [u8; 3] = [255, 0, 0];
pub const FAR_PLANE_RGB: [u8; 3] = [0, 0, 255];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SceneSpec {
    pub kind: SceneKind,
    pub count: u64,
    pub seed: u64,
    /// Cube edge length, sphere diameter, or patch edge length (meters).
    pub extent: f64,
    /// Gap between the zfight patches (meters).
    pub separation: f64,
    /// View distance of the nearer zfight patch (meters).
    pub distance: f64,
}

impl SceneSpec {
    pub fn new(kind: SceneKind) -> Self {
        let extent = match kind {
            SceneKind::RandomCube | SceneKind::SphereShell => 2.0,
            SceneKind::ZfightPlanes => 400.0,
        };
        Self { kind, count: 100_000, seed: 1, extent, separation: 0.001, distance: 1000.0 }
    }

    pub fn with_count(mut self, count: u64) -> Self {
        self.count = count;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_extent(mut self, extent: f64) -> Self {
        self.extent = extent;
        self
    }
}

pub fn generate(spec: &SceneSpec) -> PointCloud {
    let mut rng = SplitMix64::new(spec.seed);
    let n = spec.count as usize;
    let mut points = Vec::with_capacity(n);
    match spec.kind {
        SceneKind::RandomCube => {
            for _ in 0..n {
                let x = (rng.next_f64() - 0.5) * spec.extent;
                let y = (rng.next_f64() - 0.5) * spec.extent;
                let z = (rng.next_f64() - 0.5) * spec.extent;
                let c = rng.next_u64();
                points.push(Point::new(x, y, z, c as u8, (c >> 8) as u8, (c >> 16) as u8));
            }
        }
        SceneKind::ZfightPlanes => {
            for _ in 0..n {
                let x = (rng.next_f64() - 0.5) * spec.extent;
                let y = (rng.next_f64() - 0.5) * spec.extent;
                let (z, [r, g, b]) = if rng.next_u64() & 1 == 0 {
                    (-spec.distance, NEAR_PLANE_RGB)
                } else {
                    (-(spec.distance + spec.separation), FAR_PLANE_RGB)
                };
                points.push(Point::new(x, y, z, r, g, b));
            }
        }
        SceneKind::SphereShell => {
            let radius = spec.extent * 0.5;
            for _ in 0..n {
                let z = rng.next_f64() * 2.0 - 1.0;
                let phi = rng.next_f64() * TAU;
                let ring = (1.0 - z * z).max(0.0).sqrt();
                let (x, y) = (ring * phi.cos(), ring * phi.sin());
                let shade = |v: f64| ((v * 0.5 + 0.5) * 255.0).round() as u8;
                points.push(Point::new(x * radius, y * radius, z * radius, shade(x), shade(y), shade(z)));
            }
        }
    }
    PointCloud::from_points(points).expect("generators emit finite points")
}
