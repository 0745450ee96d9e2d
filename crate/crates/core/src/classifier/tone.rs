use crate::raster::RasterImage;

/// Contrast about mid-gray followed by brightness scaling.
///
/// Each sample `v` becomes `round(round((v - 128) * contrast + 128) * brightness)`
/// clamped to `[0, 255]`. Lowering either factor is the mitigation for
/// glare on reflective glass and metal.
pub fn adjust_tone(image: &RasterImage, brightness_factor: f64, contrast_factor: f64) -> RasterImage {
    if brightness_factor == 1.0 && contrast_factor == 1.0 {
        return image.clone();
    }
    let mut lut = [0u8; 256];
    for (v, out) in lut.iter_mut().enumerate() {
        let contrasted = ((v as f64 - 128.0) * contrast_factor + 128.0).round();
        *out = (contrasted * brightness_factor).round().clamp(0.0, 255.0) as u8;
    }
    image.map_samples(|v| lut[v as usize])
}
