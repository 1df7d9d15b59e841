use glam::DVec3;

use crate::point::Point;

/// Pinhole camera. Right-handed look-at; the view looks down -Z in view space.
///
/// `near`/`far` only matter to the float z-buffer baseline. The integer
/// pipelines cull on depth-index range instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub eye: DVec3,
    pub target: DVec3,
    pub up: DVec3,
    /// Vertical field of view in degrees, in (0, 180).
    pub fov_y: f64,
    pub width: u32,
    pub height: u32,
    pub near: f64,
    pub far: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CameraError {
    #[error("image size must be at least 1x1, got {width}x{height}")]
    EmptyImage { width: u32, height: u32 },
    #[error("vertical field of view must be in (0, 180) degrees, got {0}")]
    FieldOfView(f64),
    #[error("clip planes must satisfy 0 < near < far, got near={near} far={far}")]
    ClipPlanes { near: f64, far: f64 },
    #[error("view direction is degenerate or parallel to the up vector")]
    DegenerateBasis,
    #[error("camera vectors must be finite")]
    NonFinite,
}

impl Camera {
    pub fn look_at(eye: DVec3, target: DVec3, up: DVec3, fov_y: f64, width: u32, height: u32) -> Self {
        Self { eye, target, up, fov_y, width, height, near: 0.1, far: 10_000.0 }
    }

    pub fn with_clip(mut self, near: f64, far: f64) -> Self {
        self.near = near;
        self.far = far;
        self
    }

    pub fn validate(&self) -> Result<(), CameraError> {
        if self.width == 0 || self.height == 0 {
            return Err(CameraError::EmptyImage { width: self.width, height: self.height });
        }
        if !(self.fov_y > 0.0 && self.fov_y < 180.0) {
            return Err(CameraError::FieldOfView(self.fov_y));
        }
        if !(self.near > 0.0 && self.near < self.far) {
            return Err(CameraError::ClipPlanes { near: self.near, far: self.far });
        }
        if !(self.eye.is_finite() && self.target.is_finite() && self.up.is_finite()) {
            return Err(CameraError::NonFinite);
        }
        let forward = self.target - self.eye;
        let side = forward.cross(self.up);
        if forward.length_squared() == 0.0 || side.length_squared() == 0.0 {
            return Err(CameraError::DegenerateBasis);
        }
        Ok(())
    }

    /// Precomputes the view basis and projection scale. The camera must be valid.
    pub fn projector(&self) -> Projector {
        let forward = (self.target - self.eye).normalize();
        let side = forward.cross(self.up).normalize();
        let up = side.cross(forward);
        let tan_half = (self.fov_y.to_radians() * 0.5).tan();
        let aspect = self.width as f64 / self.height as f64;
        Projector {
            eye: self.eye,
            side,
            up,
            forward,
            tan_half,
            aspect,
            width: self.width,
            height: self.height,
        }
    }

    pub fn pixel_count(&self) -> usize {
        self.width as usize * self.height as usize
    }
}

/// A point that survived projection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projected {
    pub x: u32,
    pub y: u32,
    /// Distance along the view axis, meters.
    pub depth: f64,
}

impl Projected {
    #[inline]
    pub fn pixel_index(&self, width: u32) -> usize {
        self.y as usize * width as usize + self.x as usize
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Projector {
    eye: DVec3,
    side: DVec3,
    up: DVec3,
    forward: DVec3,
    tan_half: f64,
    aspect: f64,
    width: u32,
    height: u32,
}

impl Projector {
    #[inline]
    pub fn project(&self, p: &Point) -> Option<Projected> {
        let rel = p.position() - self.eye;
        // z_view = -forward·rel, so linear depth is forward·rel
        let depth = self.forward.dot(rel);
        if !(depth > 0.0) {
            return None;
        }
        let ndc_x = self.side.dot(rel) / (depth * self.tan_half * self.aspect);
        let ndc_y = self.up.dot(rel) / (depth * self.tan_half);
        let px = ((ndc_x * 0.5 + 0.5) * self.width as f64).floor();
        let py = ((0.5 - ndc_y * 0.5) * self.height as f64).floor();
        if px >= 0.0 && px < self.width as f64 && py >= 0.0 && py < self.height as f64 {
            Some(Projected { x: px as u32, y: py as u32, depth })
        } else {
            None
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }
}

/// Projects one point. Prefer [`Camera::projector`] in loops.
pub fn project(camera: &Camera, point: &Point) -> Option<Projected> {
    camera.projector().project(point)
}
