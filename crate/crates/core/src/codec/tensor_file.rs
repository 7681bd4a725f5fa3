//! Flat binary tensor container.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! "FPNT"                      magic
//! u32 version                 = 1
//! u32 n_entries
//! n_entries x {
//!     u16 name_len, name (UTF-8)
//!     u8  ndim, ndim x u32 dims
//! }
//! n_entries x row-major f32 LE data, in header order
//! ```

use std::path::Path;

use ndarray::{Array, Array2, Array3, ArrayD, Dimension, IxDyn};

use crate::codec::TargetMaps;
use crate::error::{Error, Result};

pub const TENSOR_MAGIC: &[u8; 4] = b"FPNT";
pub const TENSOR_FORMAT_VERSION: u32 = 1;
const MAX_NDIM: usize = 8;
const MAX_ELEMENTS: usize = 1 << 30;

#[derive(Debug, Clone, PartialEq)]
pub struct TensorEntry {
    pub name: String,
    pub shape: Vec<usize>,
    pub data: Vec<f32>,
}

impl TensorEntry {
    pub fn from_array<D: Dimension>(name: &str, arr: &Array<f64, D>) -> Self {
        Self {
            name: name.to_string(),
            shape: arr.shape().to_vec(),
            data: arr.iter().map(|&v| v as f32).collect(),
        }
    }

    pub fn to_array(&self) -> ArrayD<f64> {
        ArrayD::from_shape_vec(IxDyn(&self.shape), self.data.iter().map(|&v| v as f64).collect())
            .expect("entry shape matches data length")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TensorFile {
    pub entries: Vec<TensorEntry>,
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.buf.len())
            .ok_or_else(|| Error::Format("tensor file truncated".into()))?;
        let out = &self.buf[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().expect("2 bytes")))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }
}

impl TensorFile {
    pub fn push(&mut self, entry: TensorEntry) {
        self.entries.push(entry);
    }

    pub fn get(&self, name: &str) -> Result<&TensorEntry> {
        self.entries
            .iter()
            .find(|e| e.name == name)
            .ok_or_else(|| Error::Format(format!("tensor `{name}` missing")))
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(TENSOR_MAGIC);
        out.extend_from_slice(&TENSOR_FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.entries.len() as u32).to_le_bytes());
        for e in &self.entries {
            out.extend_from_slice(&(e.name.len() as u16).to_le_bytes());
            out.extend_from_slice(e.name.as_bytes());
            out.push(e.shape.len() as u8);
            for &d in &e.shape {
                out.extend_from_slice(&(d as u32).to_le_bytes());
            }
        }
        for e in &self.entries {
            for v in &e.data {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(buf: &[u8]) -> Result<Self> {
        let mut rd = Reader { buf, pos: 0 };
        if rd.take(4)? != TENSOR_MAGIC {
            return Err(Error::Format("bad tensor magic".into()));
        }
        let version = rd.u32()?;
        if version != TENSOR_FORMAT_VERSION {
            return Err(Error::Format(format!("unsupported tensor version {version}")));
        }
        let n = rd.u32()? as usize;
        let mut headers: Vec<(String, Vec<usize>, usize)> = Vec::new();
        let mut total = 0usize;
        for _ in 0..n {
            let len = rd.u16()? as usize;
            let name = std::str::from_utf8(rd.take(len)?)
                .map_err(|_| Error::Format("tensor name is not UTF-8".into()))?
                .to_string();
            if headers.iter().any(|(other, ..)| *other == name) {
                return Err(Error::Format(format!("duplicate tensor `{name}`")));
            }
            let ndim = rd.u8()? as usize;
            if ndim > MAX_NDIM {
                return Err(Error::Format(format!("tensor `{name}` has {ndim} dimensions")));
            }
            let mut shape = Vec::with_capacity(ndim);
            let mut count = 1usize;
            for _ in 0..ndim {
                let d = rd.u32()? as usize;
                count = count
                    .checked_mul(d)
                    .filter(|&c| c <= MAX_ELEMENTS)
                    .ok_or_else(|| Error::Format(format!("tensor `{name}` is too large")))?;
                shape.push(d);
            }
            total = total
                .checked_add(count)
                .filter(|&t| t <= MAX_ELEMENTS)
                .ok_or_else(|| Error::Format("tensor file too large".into()))?;
            headers.push((name, shape, count));
        }
        if buf.len() - rd.pos != total * 4 {
            return Err(Error::Format(format!(
                "expected {} data bytes, found {}",
                total * 4,
                buf.len() - rd.pos
            )));
        }
        let entries = headers
            .into_iter()
            .map(|(name, shape, count)| {
                let bytes = rd.take(count * 4)?;
                let data = bytes
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
                    .collect();
                Ok(TensorEntry { name, shape, data })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { entries })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&std::fs::read(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    fn array3(&self, name: &str) -> Result<Array3<f64>> {
        self.get(name)?
            .to_array()
            .into_dimensionality()
            .map_err(|_| Error::Format(format!("tensor `{name}` must be 3-dimensional")))
    }

    fn array2(&self, name: &str) -> Result<Array2<f64>> {
        self.get(name)?
            .to_array()
            .into_dimensionality()
            .map_err(|_| Error::Format(format!("tensor `{name}` must be 2-dimensional")))
    }
}

impl TargetMaps {
    pub fn to_tensor_file(&self) -> TensorFile {
        let mut f = TensorFile::default();
        f.push(TensorEntry::from_array("heatmap", &self.heatmap));
        f.push(TensorEntry::from_array("offset_2d", &self.offset_2d));
        f.push(TensorEntry::from_array("size_2d", &self.size_2d));
        f.push(TensorEntry::from_array("size_3d", &self.size_3d));
        f.push(TensorEntry::from_array("depth", &self.depth));
        f.push(TensorEntry::from_array("log_sigma", &self.log_sigma));
        f.push(TensorEntry::from_array("bin_logits", &self.bin_logits));
        f.push(TensorEntry::from_array("bin_residual", &self.bin_residual));
        f.push(TensorEntry::from_array(
            "valid_mask",
            &self.valid_mask.mapv(|m| if m { 1.0 } else { 0.0 }),
        ));
        f.push(TensorEntry {
            name: "downsample".into(),
            shape: vec![1],
            data: vec![self.downsample as f32],
        });
        f
    }

    pub fn from_tensor_file(f: &TensorFile) -> Result<Self> {
        let ds = f.get("downsample")?;
        let downsample = match ds.data.as_slice() {
            [v] if *v == 4.0 || *v == 8.0 => *v as u32,
            _ => return Err(Error::Format("`downsample` must be a single value 4 or 8".into())),
        };
        let maps = Self {
            downsample,
            heatmap: f.array3("heatmap")?,
            offset_2d: f.array3("offset_2d")?,
            size_2d: f.array3("size_2d")?,
            size_3d: f.array3("size_3d")?,
            depth: f.array2("depth")?,
            log_sigma: f.array2("log_sigma")?,
            bin_logits: f.array3("bin_logits")?,
            bin_residual: f.array3("bin_residual")?,
            valid_mask: f.array2("valid_mask")?.mapv(|v| v != 0.0),
        };
        maps.validate()?;
        Ok(maps)
    }
}

/// Predicted and ground-truth dense depth maps with their validity mask.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthPair {
    pub pred: Array2<f64>,
    pub gt: Array2<f64>,
    pub valid: Array2<bool>,
}

impl DepthPair {
    pub fn to_tensor_file(&self) -> TensorFile {
        let mut f = TensorFile::default();
        f.push(TensorEntry::from_array("pred_depth", &self.pred));
        f.push(TensorEntry::from_array("gt_depth", &self.gt));
        f.push(TensorEntry::from_array(
            "valid_mask",
            &self.valid.mapv(|m| if m { 1.0 } else { 0.0 }),
        ));
        f
    }

    pub fn from_tensor_file(f: &TensorFile) -> Result<Self> {
        let pair = Self {
            pred: f.array2("pred_depth")?,
            gt: f.array2("gt_depth")?,
            valid: f.array2("valid_mask")?.mapv(|v| v != 0.0),
        };
        if pair.pred.dim() != pair.gt.dim() || pair.valid.dim() != pair.gt.dim() {
            return Err(Error::ShapeMismatch {
                expected: pair.gt.shape().to_vec(),
                found: pair.pred.shape().to_vec(),
            });
        }
        Ok(pair)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sample() -> TensorFile {
        TensorFile {
            entries: vec![
                TensorEntry {
                    name: "a".into(),
                    shape: vec![2, 3],
                    data: vec![1.0, -2.5, 3.25, f32::NEG_INFINITY, 0.0, 7.0],
                },
                TensorEntry {
                    name: "scalar".into(),
                    shape: vec![1],
                    data: vec![8.0],
                },
            ],
        }
    }

    #[test]
    fn header_layout() {
        let bytes = sample().to_bytes();
        assert_eq!(&bytes[..4], b"FPNT");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u32::from_le_bytes(bytes[8..12].try_into().unwrap()), 2);
        assert_eq!(TensorFile::from_bytes(&bytes).unwrap(), sample());
    }

    #[test]
    fn rejects_malformed_input() {
        let bytes = sample().to_bytes();
        assert!(TensorFile::from_bytes(&bytes[..bytes.len() - 1]).is_err());
        assert!(TensorFile::from_bytes(b"NOPE").is_err());
        assert!(TensorFile::from_bytes(&[]).is_err());
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(TensorFile::from_bytes(&extra).is_err());
        let mut version = bytes.clone();
        version[4] = 9;
        assert!(TensorFile::from_bytes(&version).is_err());
        // Absurd dimensions must fail cleanly rather than allocate.
        let mut huge = b"FPNT".to_vec();
        huge.extend_from_slice(&1u32.to_le_bytes());
        huge.extend_from_slice(&1u32.to_le_bytes());
        huge.extend_from_slice(&1u16.to_le_bytes());
        huge.push(b'x');
        huge.push(2);
        huge.extend_from_slice(&u32::MAX.to_le_bytes());
        huge.extend_from_slice(&u32::MAX.to_le_bytes());
        assert!(TensorFile::from_bytes(&huge).is_err());
    }

    proptest! {
        #[test]
        fn arbitrary_bytes_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..256)) {
            let _ = TensorFile::from_bytes(&bytes);
            let mut prefixed = b"FPNT\x01\x00\x00\x00".to_vec();
            prefixed.extend_from_slice(&bytes);
            let _ = TensorFile::from_bytes(&prefixed);
        }

        #[test]
        fn write_read_identity(data in proptest::collection::vec(any::<f32>().prop_filter("nan", |v| !v.is_nan()), 1..64)) {
            let f = TensorFile { entries: vec![TensorEntry { name: "t".into(), shape: vec![data.len()], data }] };
            prop_assert_eq!(TensorFile::from_bytes(&f.to_bytes()).unwrap(), f);
        }
    }
}
