//! 64-bit fragment packing.
//!
//! A fragment is stored as one `u64`: the 40-bit depth index in bits 63..24
//! and the RGB color in bits 23..0 (R high, B low). Because depth occupies the
//! most significant bits, numeric order on the packed word is closest-first,
//! with the smaller color breaking ties. A single atomic `fetch_min` therefore
//! performs the whole depth test and color write.

use std::fmt;

pub const DEPTH_BITS: u32 = 40;
pub const COLOR_BITS: u32 = 24;

/// Number of representable depth indices, `2^40`.
pub const DEPTH_INDEX_LIMIT: u64 = 1 << DEPTH_BITS;
pub const MAX_DEPTH_INDEX: u64 = DEPTH_INDEX_LIMIT - 1;
pub const COLOR_MASK: u64 = (1 << COLOR_BITS) - 1;

/// Packs 8-bit channels into a 24-bit color, R in the high byte.
#[inline]
pub const fn encode_rgb(r: u8, g: u8, b: u8) -> u32 {
    ((r as u32) << 16) | ((g as u32) << 8) | b as u32
}

#[inline]
pub const fn decode_rgb(rgb: u32) -> [u8; 3] {
    [(rgb >> 16) as u8, (rgb >> 8) as u8, rgb as u8]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("depth index {0} does not fit in 40 bits")]
pub struct DepthIndexOverflow(pub u64);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
#[repr(transparent)]
pub struct PackedFragment(pub u64);

impl PackedFragment {
    /// Maximum depth, black color. Every framebuffer cell starts here.
    pub const CLEAR: PackedFragment = PackedFragment(0xFFFF_FFFF_FF00_0000);

    /// `rgb` is masked to its low 24 bits.
    #[inline]
    pub fn pack(depth_index: u64, rgb: u32) -> Result<Self, DepthIndexOverflow> {
        if depth_index >= DEPTH_INDEX_LIMIT {
            return Err(DepthIndexOverflow(depth_index));
        }
        Ok(Self((depth_index << COLOR_BITS) | (rgb as u64 & COLOR_MASK)))
    }

    #[inline]
    pub const fn unpack(self) -> (u64, u32) {
        (self.depth_index(), self.rgb())
    }

    #[inline]
    pub const fn depth_index(self) -> u64 {
        self.0 >> COLOR_BITS
    }

    #[inline]
    pub const fn rgb(self) -> u32 {
        (self.0 & COLOR_MASK) as u32
    }

    #[inline]
    pub const fn value(self) -> u64 {
        self.0
    }
}

impl fmt::Debug for PackedFragment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PackedFragment({:#018x}: depth={}, rgb={:06x})", self.0, self.depth_index(), self.rgb())
    }
}

impl From<PackedFragment> for u64 {
    fn from(f: PackedFragment) -> u64 {
        f.0
    }
}

pub fn pack_fragment(depth_index: u64, rgb: u32) -> Result<PackedFragment, DepthIndexOverflow> {
    PackedFragment::pack(depth_index, rgb)
}

pub fn unpack_fragment(value: PackedFragment) -> (u64, u32) {
    value.unpack()
}
