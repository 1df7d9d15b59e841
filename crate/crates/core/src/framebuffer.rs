use std::sync::atomic::{AtomicU64, Ordering};

use crate::fragment::PackedFragment;

/// Grid of atomically updatable 64-bit cells holding packed fragments.
pub struct Framebuffer64 {
    width: u32,
    height: u32,
    cells: Vec<AtomicU64>,
}

impl Framebuffer64 {
    pub fn new(width: u32, height: u32) -> Self {
        let n = width as usize * height as usize;
        let cells = (0..n).map(|_| AtomicU64::new(PackedFragment::CLEAR.0)).collect();
        Self { width, height, cells }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Keeps the smaller of the stored and offered fragment.
    #[inline]
    pub fn atomic_min(&self, index: usize, fragment: PackedFragment) {
        self.cells[index].fetch_min(fragment.0, Ordering::Relaxed);
    }

    #[inline]
    pub fn load(&self, index: usize) -> PackedFragment {
        PackedFragment(self.cells[index].load(Ordering::Relaxed))
    }

    pub fn get(&self, x: u32, y: u32) -> PackedFragment {
        self.load(y as usize * self.width as usize + x as usize)
    }

    /// Reads a cell and resets it to [`PackedFragment::CLEAR`] in one step.
    #[inline]
    pub fn take(&self, index: usize) -> PackedFragment {
        PackedFragment(self.cells[index].swap(PackedFragment::CLEAR.0, Ordering::Relaxed))
    }

    pub fn clear(&mut self) {
        for c in &mut self.cells {
            *c.get_mut() = PackedFragment::CLEAR.0;
        }
    }

    pub fn snapshot(&self) -> Vec<u64> {
        self.cells.iter().map(|c| c.load(Ordering::Relaxed)).collect()
    }

    pub fn is_clear(&self) -> bool {
        self.cells.iter().all(|c| c.load(Ordering::Relaxed) == PackedFragment::CLEAR.0)
    }
}

impl std::fmt::Debug for Framebuffer64 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Framebuffer64").field("width", &self.width).field("height", &self.height).finish()
    }
}
