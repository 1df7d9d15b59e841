use crate::fragment::decode_rgb;

/// Row-major, top-left origin, 3 bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRGB8 {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl ImageRGB8 {
    pub fn new(width: u32, height: u32) -> Self {
        Self { width, height, pixels: vec![0; width as usize * height as usize * 3] }
    }

    pub fn filled(width: u32, height: u32, rgb: u32) -> Self {
        let px = decode_rgb(rgb);
        let pixels = std::iter::repeat_n(px, width as usize * height as usize).flatten().collect();
        Self { width, height, pixels }
    }

    /// `None` if `pixels.len() != width * height * 3`.
    pub fn from_raw(width: u32, height: u32, pixels: Vec<u8>) -> Option<Self> {
        (pixels.len() == width as usize * height as usize * 3).then_some(Self { width, height, pixels })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.pixels
    }

    pub fn into_bytes(self) -> Vec<u8> {
        self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    pub fn set_pixel(&mut self, x: u32, y: u32, rgb: [u8; 3]) {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        self.pixels[i..i + 3].copy_from_slice(&rgb);
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// First pixel (x, y) where the images differ, or `None` if identical.
    /// Images of different size differ at (0, 0).
    pub fn first_difference(&self, other: &ImageRGB8) -> Option<(u32, u32)> {
        if self.width != other.width || self.height != other.height {
            return Some((0, 0));
        }
        self.pixels
            .chunks_exact(3)
            .zip(other.pixels.chunks_exact(3))
            .position(|(a, b)| a != b)
            .map(|i| ((i % self.width as usize) as u32, (i / self.width as usize) as u32))
    }
}
