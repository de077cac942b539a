//! IDX binary tensor parsing (the MNIST container format).
//!
//! All multi-byte header integers are big-endian. Parsing is total:
//! every malformed input maps to a typed error carrying the byte
//! offset, and the parser never reads past the declared payload.

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum IdxError {
    #[error("input ends inside the header at offset {offset}")]
    HeaderTruncated { offset: usize },
    #[error("bad magic {found:#010x}: expected 0x000008NN (unsigned-byte tensor)")]
    BadMagic { found: u32 },
    #[error("dimension count {ndims} unsupported (expected 1..=4)")]
    BadDimCount { ndims: u8 },
    #[error("dimension product overflows usize at offset {offset}")]
    DimOverflow { offset: usize },
    #[error("payload truncated at offset {offset}: declared {declared} bytes, found {available}")]
    Truncated {
        offset: usize,
        declared: usize,
        available: usize,
    },
    #[error("{extra} trailing bytes after the declared payload at offset {offset}")]
    TrailingBytes { offset: usize, extra: usize },
    #[error("expected magic {expected:#010x}, found {found:#010x}")]
    WrongKind { expected: u32, found: u32 },
    #[error("image dims {rows}×{cols} unsupported (expected 28×28)")]
    BadImageDims { rows: usize, cols: usize },
    #[error("label {label} out of range 0..=9 at item {index}")]
    BadLabel { label: u8, index: usize },
}

pub const MAGIC_IMAGES: u32 = 0x0000_0803;
pub const MAGIC_LABELS: u32 = 0x0000_0801;

/// A parsed IDX tensor of unsigned bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdxTensor {
    pub magic: u32,
    pub dims: Vec<usize>,
    pub data: Vec<u8>,
}

fn read_u32_be(bytes: &[u8], offset: usize) -> Result<u32, IdxError> {
    let end = offset + 4;
    if bytes.len() < end {
        return Err(IdxError::HeaderTruncated {
            offset: bytes.len(),
        });
    }
    Ok(u32::from_be_bytes([
        bytes[offset],
        bytes[offset + 1],
        bytes[offset + 2],
        bytes[offset + 3],
    ]))
}

/// Parse an unsigned-byte IDX tensor.
pub fn parse_idx(bytes: &[u8]) -> Result<IdxTensor, IdxError> {
    let magic = read_u32_be(bytes, 0)?;
    // 0x00 0x00 0x08 (u8) ndims
    if magic & 0xffff_ff00 != 0x0000_0800 {
        return Err(IdxError::BadMagic { found: magic });
    }
    let ndims = (magic & 0xff) as u8;
    if !(1..=4).contains(&ndims) {
        return Err(IdxError::BadDimCount { ndims });
    }
    let mut dims = Vec::with_capacity(ndims as usize);
    let mut offset = 4usize;
    for _ in 0..ndims {
        dims.push(read_u32_be(bytes, offset)? as usize);
        offset += 4;
    }
    let mut declared = 1usize;
    for &d in &dims {
        declared = declared
            .checked_mul(d)
            .ok_or(IdxError::DimOverflow { offset })?;
    }
    let available = bytes.len() - offset;
    if available < declared {
        return Err(IdxError::Truncated {
            offset: offset + available,
            declared,
            available,
        });
    }
    if available > declared {
        return Err(IdxError::TrailingBytes {
            offset: offset + declared,
            extra: available - declared,
        });
    }
    Ok(IdxTensor {
        magic,
        dims,
        data: bytes[offset..offset + declared].to_vec(),
    })
}

/// Image set exposed as 28×28 intensity grids.
#[derive(Clone, Debug)]
pub struct ImageSet {
    count: usize,
    pixels: Vec<u8>,
}

impl ImageSet {
    pub fn from_tensor(t: IdxTensor) -> Result<Self, IdxError> {
        if t.magic != MAGIC_IMAGES {
            return Err(IdxError::WrongKind {
                expected: MAGIC_IMAGES,
                found: t.magic,
            });
        }
        let (rows, cols) = (t.dims[1], t.dims[2]);
        if rows != 28 || cols != 28 {
            return Err(IdxError::BadImageDims { rows, cols });
        }
        Ok(Self {
            count: t.dims[0],
            pixels: t.data,
        })
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn image(&self, i: usize) -> &[u8] {
        &self.pixels[i * 784..(i + 1) * 784]
    }

    pub fn images(&self) -> impl Iterator<Item = &[u8]> {
        (0..self.count).map(|i| self.image(i))
    }
}

/// Parse an image file (magic 0x00000803, 28×28).
pub fn parse_images(bytes: &[u8]) -> Result<ImageSet, IdxError> {
    ImageSet::from_tensor(parse_idx(bytes)?)
}

/// Parse a label file (magic 0x00000801, labels 0..=9).
pub fn parse_labels(bytes: &[u8]) -> Result<Vec<u8>, IdxError> {
    let t = parse_idx(bytes)?;
    if t.magic != MAGIC_LABELS {
        return Err(IdxError::WrongKind {
            expected: MAGIC_LABELS,
            found: t.magic,
        });
    }
    for (index, &label) in t.data.iter().enumerate() {
        if label > 9 {
            return Err(IdxError::BadLabel { label, index });
        }
    }
    Ok(t.data)
}

/// Serialize an image tensor (used by dataset tooling and tests).
pub fn encode_images(images: &[&[u8]]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + images.len() * 784);
    out.extend_from_slice(&MAGIC_IMAGES.to_be_bytes());
    out.extend_from_slice(&(images.len() as u32).to_be_bytes());
    out.extend_from_slice(&28u32.to_be_bytes());
    out.extend_from_slice(&28u32.to_be_bytes());
    for img in images {
        assert_eq!(img.len(), 784);
        out.extend_from_slice(img);
    }
    out
}

/// Serialize a label tensor.
pub fn encode_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + labels.len());
    out.extend_from_slice(&MAGIC_LABELS.to_be_bytes());
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}
