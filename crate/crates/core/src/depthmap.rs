//! Linear view depth (meters, f64) to 40-bit integer depth index.
//!
//! Bins are left-closed and right-open, and are defined by their lower edges
//! as returned by [`DepthMapper::reconstruct`]. `quantize` returns the largest
//! index whose lower edge does not exceed the depth, so the two functions agree
//! exactly even where a naive `floor(depth / unit)` would be off by one from
//! floating-point rounding.

use crate::fragment::DEPTH_INDEX_LIMIT;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum DepthMapError {
    #[error("depth unit must be positive and finite, got {0}")]
    InvalidUnit(f64),
    #[error("piecewise mapping needs at least one range")]
    NoRanges,
    #[error("range {index}: bounds [{lo}, {hi}) must be finite with 0 <= lo < hi")]
    InvalidRange { index: usize, lo: f64, hi: f64 },
    #[error("range {index} starts at {lo} but the previous range ends at {prev_hi}; ranges must be contiguous")]
    NotContiguous { index: usize, lo: f64, prev_hi: f64 },
    #[error("range {index}: unit {unit} is too fine to be resolved at depth {hi} in double precision")]
    UnitTooFine { index: usize, unit: f64, hi: f64 },
    #[error("mapping needs {needed} depth indices but only 2^40 are available")]
    CapacityExceeded { needed: f64 },
    #[error("depth index {index} is outside the mapping's capacity {capacity} (corrupt buffer?)")]
    IndexOutOfRange { index: u64, capacity: u64 },
}

/// Constant step size over `[0, 2^40 * unit)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UniformMapping {
    unit: f64,
}

impl UniformMapping {
    pub fn new(unit: f64) -> Result<Self, DepthMapError> {
        if !(unit > 0.0 && unit.is_finite()) {
            return Err(DepthMapError::InvalidUnit(unit));
        }
        Ok(Self { unit })
    }

    pub fn unit(&self) -> f64 {
        self.unit
    }

    #[inline]
    fn edge(&self, index: u64) -> f64 {
        index as f64 * self.unit
    }

    #[inline]
    fn quantize(&self, depth: f64) -> Option<u64> {
        if !(depth >= 0.0) {
            return None;
        }
        let approx = (depth / self.unit).floor();
        if approx >= (DEPTH_INDEX_LIMIT + 2) as f64 {
            return None;
        }
        let index = settle(approx as u64, u64::MAX, depth, |k| self.edge(k));
        (index < DEPTH_INDEX_LIMIT).then_some(index)
    }
}

/// One row of a piecewise table: depths in `[lo, hi)` stepped by `unit`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepthRange {
    pub lo: f64,
    pub hi: f64,
    pub unit: f64,
}

impl DepthRange {
    pub const fn new(lo: f64, hi: f64, unit: f64) -> Self {
        Self { lo, hi, unit }
    }

    #[inline]
    fn edge(&self, step: u64) -> f64 {
        self.lo + step as f64 * self.unit
    }
}

/// Contiguous ranges with their own precision, packed back to back in index space.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseMapping {
    ranges: Vec<DepthRange>,
    bases: Vec<u64>,
    counts: Vec<u64>,
    capacity: u64,
}

impl PiecewiseMapping {
    pub fn new(ranges: Vec<DepthRange>) -> Result<Self, DepthMapError> {
        if ranges.is_empty() {
            return Err(DepthMapError::NoRanges);
        }
        let mut bases = Vec::with_capacity(ranges.len());
        let mut counts = Vec::with_capacity(ranges.len());
        let mut total: u64 = 0;
        for (index, r) in ranges.iter().enumerate() {
            if !(r.lo.is_finite() && r.hi.is_finite() && r.lo >= 0.0 && r.lo < r.hi) {
                return Err(DepthMapError::InvalidRange { index, lo: r.lo, hi: r.hi });
            }
            if !(r.unit > 0.0 && r.unit.is_finite()) {
                return Err(DepthMapError::InvalidUnit(r.unit));
            }
            if index > 0 && ranges[index - 1].hi != r.lo {
                return Err(DepthMapError::NotContiguous { index, lo: r.lo, prev_hi: ranges[index - 1].hi });
            }
            if r.unit <= 4.0 * f64::EPSILON * r.hi {
                return Err(DepthMapError::UnitTooFine { index, unit: r.unit, hi: r.hi });
            }
            let approx = ((r.hi - r.lo) / r.unit).ceil();
            if approx + total as f64 > DEPTH_INDEX_LIMIT as f64 {
                return Err(DepthMapError::CapacityExceeded { needed: approx + total as f64 });
            }
            // ceil((hi - lo) / unit) evaluated on the same grid as the bin edges:
            // the smallest count whose next edge reaches hi.
            let mut count = approx as u64;
            while count > 1 && r.edge(count - 1) >= r.hi {
                count -= 1;
            }
            while r.edge(count) < r.hi {
                count += 1;
            }
            bases.push(total);
            counts.push(count);
            total += count;
            if total > DEPTH_INDEX_LIMIT {
                return Err(DepthMapError::CapacityExceeded { needed: total as f64 });
            }
        }
        Ok(Self { ranges, bases, counts, capacity: total })
    }

    pub fn ranges(&self) -> &[DepthRange] {
        &self.ranges
    }

    pub fn bases(&self) -> &[u64] {
        &self.bases
    }

    #[inline]
    fn quantize(&self, depth: f64) -> Option<u64> {
        if !(depth >= self.ranges[0].lo) {
            return None;
        }
        let slot = self.ranges.partition_point(|r| r.lo <= depth) - 1;
        let r = &self.ranges[slot];
        if !(depth < r.hi) {
            return None;
        }
        let last = self.counts[slot] - 1;
        let approx = ((depth - r.lo) / r.unit).floor().clamp(0.0, last as f64) as u64;
        Some(self.bases[slot] + settle(approx, last, depth, |k| r.edge(k)))
    }

    fn reconstruct(&self, index: u64) -> f64 {
        let slot = self.bases.partition_point(|&b| b <= index) - 1;
        self.ranges[slot].edge(index - self.bases[slot])
    }
}

/// Moves `k` to the largest step in `[0, max]` whose lower edge is `<= depth`.
/// `k` starts within a step or two of the answer.
#[inline]
fn settle(mut k: u64, max: u64, depth: f64, edge: impl Fn(u64) -> f64) -> u64 {
    while k > 0 && edge(k) > depth {
        k -= 1;
    }
    while k < max && edge(k + 1) <= depth {
        k += 1;
    }
    k
}

#[derive(Debug, Clone, PartialEq)]
pub enum DepthMapper {
    Uniform(UniformMapping),
    Piecewise(PiecewiseMapping),
}

impl Default for DepthMapper {
    /// One index per millimeter.
    fn default() -> Self {
        DepthMapper::Uniform(UniformMapping { unit: 0.001 })
    }
}

impl DepthMapper {
    pub fn uniform(unit: f64) -> Result<Self, DepthMapError> {
        UniformMapping::new(unit).map(DepthMapper::Uniform)
    }

    pub fn piecewise(ranges: Vec<DepthRange>) -> Result<Self, DepthMapError> {
        PiecewiseMapping::new(ranges).map(DepthMapper::Piecewise)
    }

    pub fn millimeters() -> Self {
        Self::default()
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self, DepthMapper::Uniform(_))
    }

    /// `None` means cull: negative, NaN, or beyond the covered range.
    #[inline]
    pub fn quantize(&self, depth: f64) -> Option<u64> {
        match self {
            DepthMapper::Uniform(u) => u.quantize(depth),
            DepthMapper::Piecewise(p) => p.quantize(depth),
        }
    }

    /// Lower edge of the index's bin, meters.
    pub fn reconstruct(&self, index: u64) -> Result<f64, DepthMapError> {
        let capacity = self.capacity();
        if index >= capacity {
            return Err(DepthMapError::IndexOutOfRange { index, capacity });
        }
        Ok(match self {
            DepthMapper::Uniform(u) => u.edge(index),
            DepthMapper::Piecewise(p) => p.reconstruct(index),
        })
    }

    pub fn capacity(&self) -> u64 {
        match self {
            DepthMapper::Uniform(_) => DEPTH_INDEX_LIMIT,
            DepthMapper::Piecewise(p) => p.capacity,
        }
    }
}
