//! Binary PGM (P5) weight-map emission: zero-dependency, bit-exact,
//! diffable in tests.

use std::io::Write;
use std::path::Path;

use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum PgmError {
    #[error("not a P5 PGM: {reason}")]
    Malformed { reason: &'static str },
    #[error("PGM maxval {maxval} unsupported (expected 255)")]
    BadMaxval { maxval: u32 },
    #[error("PGM payload has {available} bytes, expected {expected}")]
    ShortPayload { expected: usize, available: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A grayscale image with 8-bit samples.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    /// Canonical P5 encoding.
    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.pixels.len() + 32);
        let _ = write!(out, "P5\n{} {}\n255\n", self.width, self.height);
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn write_pgm(&self, path: &Path) -> Result<(), PgmError> {
        std::fs::write(path, self.to_pgm())?;
        Ok(())
    }
}

/// Parse a binary P5 PGM (whitespace/comment tolerant header).
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::Malformed {
            reason: "missing P5 signature",
        });
    }
    let mut pos = 2usize;
    let mut fields = [0u32; 3];
    for field in &mut fields {
        // skip whitespace and comments
        loop {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < bytes.len() && bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                break;
            }
        }
        let start = pos;
        while pos < bytes.len() && bytes[pos].is_ascii_digit() {
            pos += 1;
        }
        if start == pos {
            return Err(PgmError::Malformed {
                reason: "expected a decimal header field",
            });
        }
        let text = std::str::from_utf8(&bytes[start..pos]).expect("digits are ascii");
        *field = text.parse().map_err(|_| PgmError::Malformed {
            reason: "header field out of range",
        })?;
    }
    let [width, height, maxval] = fields;
    if maxval != 255 {
        return Err(PgmError::BadMaxval { maxval });
    }
    // exactly one whitespace byte separates the header from the raster
    if pos >= bytes.len() || !bytes[pos].is_ascii_whitespace() {
        return Err(PgmError::Malformed {
            reason: "missing raster separator",
        });
    }
    pos += 1;
    let expected = width as usize * height as usize;
    let available = bytes.len() - pos;
    if available < expected {
        return Err(PgmError::ShortPayload {
            expected,
            available,
        });
    }
    Ok(GrayImage {
        width: width as usize,
        height: height as usize,
        pixels: bytes[pos..pos + expected].to_vec(),
    })
}

/// Map a weight in [0, 1] to an 8-bit sample, round half up.
#[inline]
pub fn weight_to_pixel<T: Scalar>(w: T) -> u8 {
    let v = (w.as_f64() * 255.0 + 0.5).floor();
    v.clamp(0.0, 255.0) as u8
}

/// One neuron's 784 afferent weights as a 28×28 grayscale map.
///
/// `weights` is the full line-major crossbar; column `neuron` is read
/// with stride `n_exc`.
pub fn weight_map<T: Scalar>(weights: &[T], n_exc: usize, neuron: usize) -> GrayImage {
    let mut img = GrayImage::new(28, 28);
    for line in 0..784 {
        img.pixels[line] = weight_to_pixel(weights[line * n_exc + neuron]);
    }
    img
}

/// Tile all neuron maps into a ⌈√n⌉ × ⌈√n⌉ montage.
pub fn montage<T: Scalar>(weights: &[T], n_exc: usize) -> GrayImage {
    let tiles = (n_exc as f64).sqrt().ceil() as usize;
    let mut img = GrayImage::new(tiles * 28, tiles * 28);
    for neuron in 0..n_exc {
        let map = weight_map(weights, n_exc, neuron);
        let (ty, tx) = (neuron / tiles, neuron % tiles);
        for r in 0..28 {
            let dst = (ty * 28 + r) * img.width + tx * 28;
            img.pixels[dst..dst + 28].copy_from_slice(&map.pixels[r * 28..(r + 1) * 28]);
        }
    }
    img
}

/// Write one PGM per neuron plus the montage into `dir`.
pub fn emit_weight_maps<T: Scalar>(
    weights: &[T],
    n_exc: usize,
    dir: &Path,
) -> Result<(), PgmError> {
    std::fs::create_dir_all(dir)?;
    for neuron in 0..n_exc {
        let map = weight_map(weights, n_exc, neuron);
        map.write_pgm(&dir.join(format!("neuron_{neuron:03}.pgm")))?;
    }
    montage(weights, n_exc).write_pgm(&dir.join("montage.pgm"))?;
    Ok(())
}
