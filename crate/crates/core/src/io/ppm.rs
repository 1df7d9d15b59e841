use std::io::Write;

use crate::image::ImageRGB8;

/// Binary PPM: `P6\n{w} {h}\n255\n` then raw RGB rows, top row first.
pub fn write_ppm(image: &ImageRGB8, out: &mut impl Write) -> std::io::Result<()> {
    write!(out, "P6\n{} {}\n255\n", image.width(), image.height())?;
    out.write_all(image.as_bytes())
}

pub fn ppm_bytes(image: &ImageRGB8) -> Vec<u8> {
    let mut v = Vec::with_capacity(image.as_bytes().len() + 20);
    write_ppm(image, &mut v).expect("writing to a Vec cannot fail");
    v
}
