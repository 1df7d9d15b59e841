use glam::DVec3;

/// A single sample: double-precision position in meters plus an 8-bit RGB color.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Point {
    pub const fn new(x: f64, y: f64, z: f64, r: u8, g: u8, b: u8) -> Self {
        Self { x, y, z, r, g, b }
    }

    #[inline]
    pub fn position(&self) -> DVec3 {
        DVec3::new(self.x, self.y, self.z)
    }

    #[inline]
    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }
}

/// Axis-aligned bounding box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bounds {
    pub min: DVec3,
    pub max: DVec3,
}

impl Bounds {
    pub fn center(&self) -> DVec3 {
        (self.min + self.max) * 0.5
    }

    pub fn extent(&self) -> DVec3 {
        self.max - self.min
    }

    fn of(points: &[Point]) -> Option<Self> {
        let first = points.first()?.position();
        let (min, max) = points
            .iter()
            .fold((first, first), |(lo, hi), p| {
                let v = p.position();
                (lo.min(v), hi.max(v))
            });
        Some(Self { min, max })
    }
}

/// Ordered collection of points with cached bounds.
///
/// Point order is part of the observable state: the rasterizers produce the
/// same image for any order, but their timings do not.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PointCloud {
    points: Vec<Point>,
    bounds: Option<Bounds>,
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("point {index} has a non-finite coordinate ({x}, {y}, {z})")]
pub struct NonFinitePoint {
    pub index: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl PointCloud {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a cloud, rejecting NaN and infinite coordinates.
    pub fn from_points(points: Vec<Point>) -> Result<Self, NonFinitePoint> {
        if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| !p.is_finite()) {
            return Err(NonFinitePoint { index, x: p.x, y: p.y, z: p.z });
        }
        let bounds = Bounds::of(&points);
        Ok(Self { points, bounds })
    }

    pub fn push(&mut self, point: Point) -> Result<(), NonFinitePoint> {
        if !point.is_finite() {
            return Err(NonFinitePoint {
                index: self.points.len(),
                x: point.x,
                y: point.y,
                z: point.z,
            });
        }
        let v = point.position();
        self.bounds = Some(match self.bounds {
            Some(b) => Bounds { min: b.min.min(v), max: b.max.max(v) },
            None => Bounds { min: v, max: v },
        });
        self.points.push(point);
        Ok(())
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    /// `None` for an empty cloud.
    pub fn bounds(&self) -> Option<Bounds> {
        self.bounds
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Reorders points by `order` (a permutation of `0..len`). Bounds are unchanged.
    pub(crate) fn permuted(&self, order: &[usize]) -> Self {
        debug_assert_eq!(order.len(), self.points.len());
        Self {
            points: order.iter().map(|&i| self.points[i]).collect(),
            bounds: self.bounds,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds_track_pushes() {
        let mut cloud = PointCloud::new();
        assert!(cloud.bounds().is_none());
        cloud.push(Point::new(1.0, -2.0, 3.0, 0, 0, 0)).unwrap();
        cloud.push(Point::new(-1.0, 5.0, 0.5, 0, 0, 0)).unwrap();
        let b = cloud.bounds().unwrap();
        assert_eq!(b.min, DVec3::new(-1.0, -2.0, 0.5));
        assert_eq!(b.max, DVec3::new(1.0, 5.0, 3.0));
        assert_eq!(PointCloud::from_points(cloud.points().to_vec()).unwrap(), cloud);
    }

    #[test]
    fn rejects_non_finite() {
        let err = PointCloud::from_points(vec![
            Point::new(0.0, 0.0, 0.0, 1, 2, 3),
            Point::new(f64::NAN, 0.0, 0.0, 1, 2, 3),
        ])
        .unwrap_err();
        assert_eq!(err.index, 1);
        let mut cloud = PointCloud::new();
        assert!(cloud.push(Point::new(0.0, f64::INFINITY, 0.0, 0, 0, 0)).is_err());
        assert!(cloud.is_empty());
    }
}
