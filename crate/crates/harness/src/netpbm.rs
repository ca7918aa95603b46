//! Binary PGM (`P5`) and PPM (`P6`) images with 8-bit samples.

use std::path::Path;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageBuffer {
    pub width: usize,
    pub height: usize,
    /// 1 for PGM, 3 for PPM.
    pub channels: usize,
    pub maxval: u8,
    /// Samples in file order (interleaved for RGB).
    pub pixels: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NetpbmError {
    Malformed(String),
    UnsupportedDepth(u32),
}

impl std::fmt::Display for NetpbmError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NetpbmError::Malformed(m) => write!(f, "malformed netpbm image: {m}"),
            NetpbmError::UnsupportedDepth(v) => write!(f, "unsupported bit depth: maxval {v} needs more than 8 bits"),
        }
    }
}

impl ImageBuffer {
    pub fn new(width: usize, height: usize, channels: usize, pixels: Vec<u8>) -> std::result::Result<Self, NetpbmError> {
        if width == 0 || height == 0 {
            return Err(NetpbmError::Malformed("zero-sized image".into()));
        }
        if channels != 1 && channels != 3 {
            return Err(NetpbmError::Malformed(format!("{channels} channels")));
        }
        if pixels.len() != width * height * channels {
            return Err(NetpbmError::Malformed("pixel count does not match dimensions".into()));
        }
        Ok(Self { width, height, channels, maxval: 255, pixels })
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    /// Power-of-two length the vectorized image is padded to.
    pub fn pad_len(&self) -> usize {
        self.len().next_power_of_two()
    }

    /// Channel-major vector (all of channel 0, then channel 1, ...), zero
    /// padded to [`pad_len`](Self::pad_len).
    pub fn to_signal(&self) -> Vec<f64> {
        let plane = self.width * self.height;
        let mut out = vec![0.0; self.pad_len()];
        for c in 0..self.channels {
            for p in 0..plane {
                out[c * plane + p] = self.pixels[p * self.channels + c] as f64;
            }
        }
        out
    }

    /// Inverse of [`to_signal`](Self::to_signal) with rounding and clamping to
    /// `[0, maxval]`; entries past the image are ignored.
    pub fn from_signal(&self, signal: &[f64]) -> ImageBuffer {
        let plane = self.width * self.height;
        let top = self.maxval as f64;
        let mut pixels = vec![0u8; self.len()];
        for c in 0..self.channels {
            for p in 0..plane {
                let v = signal[c * plane + p];
                let v = if v.is_nan() { 0.0 } else { v.round().clamp(0.0, top) };
                pixels[p * self.channels + c] = v as u8;
            }
        }
        ImageBuffer { pixels, ..self.clone() }
    }

    pub fn encode(&self) -> Vec<u8> {
        let magic = if self.channels == 1 { "P5" } else { "P6" };
        let mut out = format!("{magic}\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn decode(bytes: &[u8]) -> std::result::Result<Self, NetpbmError> {
        let mut pos = 0;
        let magic = next_token(bytes, &mut pos)?;
        let channels = match magic.as_slice() {
            b"P5" => 1,
            b"P6" => 3,
            _ => return Err(NetpbmError::Malformed("expected P5 or P6".into())),
        };
        let width = parse_number(&next_token(bytes, &mut pos)?)?;
        let height = parse_number(&next_token(bytes, &mut pos)?)?;
        let maxval = parse_number(&next_token(bytes, &mut pos)?)?;
        if maxval == 0 {
            return Err(NetpbmError::Malformed("maxval must be positive".into()));
        }
        if maxval > 255 {
            return Err(NetpbmError::UnsupportedDepth(maxval as u32));
        }
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(pos) {
            Some(b) if b.is_ascii_whitespace() => pos += 1,
            _ => return Err(NetpbmError::Malformed("missing raster".into())),
        }
        let count = width
            .checked_mul(height)
            .and_then(|n| n.checked_mul(channels))
            .ok_or_else(|| NetpbmError::Malformed("dimensions overflow".into()))?;
        let raster = bytes.get(pos..pos + count).ok_or_else(|| NetpbmError::Malformed("truncated raster".into()))?;
        if raster.iter().any(|&v| v as usize > maxval) {
            return Err(NetpbmError::Malformed("sample exceeds maxval".into()));
        }
        let mut img = ImageBuffer::new(width, height, channels, raster.to_vec())?;
        img.maxval = maxval as u8;
        Ok(img)
    }
}

fn next_token(bytes: &[u8], pos: &mut usize) -> std::result::Result<Vec<u8>, NetpbmError> {
    loop {
        match bytes.get(*pos) {
            Some(b'#') => {
                while bytes.get(*pos).is_some_and(|&b| b != b'\n') {
                    *pos += 1;
                }
            }
            Some(b) if b.is_ascii_whitespace() => *pos += 1,
            Some(_) => break,
            None => return Err(NetpbmError::Malformed("truncated header".into())),
        }
    }
    let start = *pos;
    while bytes.get(*pos).is_some_and(|b| !b.is_ascii_whitespace() && *b != b'#') {
        *pos += 1;
    }
    Ok(bytes[start..*pos].to_vec())
}

fn parse_number(token: &[u8]) -> std::result::Result<usize, NetpbmError> {
    std::str::from_utf8(token)
        .ok()
        .filter(|s| s.bytes().all(|b| b.is_ascii_digit()))
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| NetpbmError::Malformed(format!("bad header field '{}'", String::from_utf8_lossy(token))))
}

pub fn read_image(path: &Path) -> Result<ImageBuffer> {
    let bytes = std::fs::read(path).map_err(|e| HarnessError::io(path, e))?;
    ImageBuffer::decode(&bytes).map_err(|e| HarnessError::format(path, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_with_comments() {
        let mut bytes = b"P5 # gray\n# size next\n2 1\n255\n".to_vec();
        bytes.extend_from_slice(&[7, 200]);
        let img = ImageBuffer::decode(&bytes).unwrap();
        assert_eq!((img.width, img.height, img.channels), (2, 1, 1));
        assert_eq!(img.pixels, vec![7, 200]);
    }

    #[test]
    fn sixteen_bit_is_rejected() {
        let bytes = b"P5\n1 1\n65535\n\x00\x01".to_vec();
        assert_eq!(ImageBuffer::decode(&bytes), Err(NetpbmError::UnsupportedDepth(65535)));
    }

    #[test]
    fn malformed_inputs() {
        assert!(matches!(ImageBuffer::decode(b"P2\n1 1\n255\n0"), Err(NetpbmError::Malformed(_))));
        assert!(matches!(ImageBuffer::decode(b"P5\n2 2\n255\n\x00"), Err(NetpbmError::Malformed(_))));
        assert!(matches!(ImageBuffer::decode(b"P5\n0 2\n255\n"), Err(NetpbmError::Malformed(_))));
        assert!(matches!(ImageBuffer::decode(b"P5\n1 1\n9\n\x0a"), Err(NetpbmError::Malformed(_))));
    }

    #[test]
    fn rgb_signal_is_channel_major_and_padded() {
        let img = ImageBuffer::new(2, 1, 3, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(img.pad_len(), 8);
        assert_eq!(img.to_signal(), vec![1.0, 4.0, 2.0, 5.0, 3.0, 6.0, 0.0, 0.0]);
        let back = img.from_signal(&[1.2, 3.9, 2.0, -4.0, 300.0, 6.0, 9.0, 9.0]);
        assert_eq!(back.pixels, vec![1, 2, 255, 4, 0, 6]);
    }
}
