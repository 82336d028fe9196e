//! Binary container for thresholded coefficients.
//!
//! ```text
//! magic        8 bytes  "PWAV0001"
//! version      u32
//! d            u32
//! sizes        d x u32
//! order        u32
//! kind         u32      0 interp, 1 cg, 2 dg
//! levels       d x u32
//! ordering     u32      0 mallat, 1 separable
//! weighting    u32      0 raw, 1 l2, 2 s-weighted
//! threshold    f64
//! s            f64
//! bitmap       ceil(N / 8) bytes, bit i (LSB first) set = coefficient i kept
//! values       f64 per kept coefficient, in coefficient order
//! ```
//!
//! All integers and floats are little-endian.

use crate::error::{Error, Result};
use crate::grid;
use crate::tensor::{Ordering, MAX_DIMS};
use crate::update::ProjectorKind;

pub const MAGIC: &[u8; 8] = b"PWAV0001";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Weighting {
    Raw,
    L2,
    /// Detail magnitudes scaled by `2^(s j) ||psi_{j,k}||`.
    Smooth(f64),
}

impl Weighting {
    pub fn code(self) -> u32 {
        match self {
            Weighting::Raw => 0,
            Weighting::L2 => 1,
            Weighting::Smooth(_) => 2,
        }
    }

    pub fn smoothness(self) -> f64 {
        match self {
            Weighting::Smooth(s) => s,
            _ => 0.0,
        }
    }

    pub fn from_code(code: u32, s: f64) -> Result<Self> {
        match code {
            0 => Ok(Weighting::Raw),
            1 => Ok(Weighting::L2),
            2 => Ok(Weighting::Smooth(s)),
            other => Err(Error::Format(format!("unknown weighting code {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Weighting::Raw => "raw",
            Weighting::L2 => "l2",
            Weighting::Smooth(_) => "s",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlobHeader {
    pub shape: Vec<usize>,
    pub order: usize,
    pub kind: ProjectorKind,
    pub levels: Vec<usize>,
    pub ordering: Ordering,
    pub weighting: Weighting,
    pub threshold: f64,
}

impl BlobHeader {
    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompressedBlob {
    pub header: BlobHeader,
    /// One flag per coefficient.
    pub retained: Vec<bool>,
    /// Kept coefficients in order.
    pub values: Vec<f64>,
}

impl CompressedBlob {
    /// Builds a blob keeping the coefficients flagged in `retained`.
    pub fn new(header: BlobHeader, coeffs: &[f64], retained: Vec<bool>) -> Result<Self> {
        if coeffs.len() != header.len() || retained.len() != header.len() {
            return Err(Error::dims("CompressedBlob::new", header.len(), coeffs.len()));
        }
        let values = coeffs.iter().zip(&retained).filter(|(_, &r)| r).map(|(v, _)| *v).collect();
        Ok(Self { header, retained, values })
    }

    pub fn retained_count(&self) -> usize {
        self.values.len()
    }

    /// Coefficients with the dropped ones set to zero.
    pub fn coefficients(&self) -> Vec<f64> {
        let mut it = self.values.iter();
        self.retained
            .iter()
            .map(|&r| if r { *it.next().expect("retained count checked on read") } else { 0.0 })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let h = &self.header;
        let n = h.len();
        let mut out = Vec::with_capacity(64 + n.div_ceil(8) + 8 * self.values.len());
        out.extend_from_slice(MAGIC);
        let mut put = |v: u32| out.extend_from_slice(&v.to_le_bytes());
        put(VERSION);
        put(h.shape.len() as u32);
        h.shape.iter().for_each(|&s| put(s as u32));
        put(h.order as u32);
        put(h.kind.code());
        h.levels.iter().for_each(|&l| put(l as u32));
        put(h.ordering.code());
        put(h.weighting.code());
        out.extend_from_slice(&h.threshold.to_le_bytes());
        out.extend_from_slice(&h.weighting.smoothness().to_le_bytes());
        let mut bitmap = vec![0u8; n.div_ceil(8)];
        for (i, _) in self.retained.iter().enumerate().filter(|(_, &r)| r) {
            bitmap[i / 8] |= 1 << (i % 8);
        }
        out.extend_from_slice(&bitmap);
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, at: 0 };
        if r.take(8)? != MAGIC {
            return Err(Error::Format("bad magic, not a coefficient blob".into()));
        }
        let version = r.u32()?;
        if version != VERSION {
            return Err(Error::Format(format!("unsupported version {version}")));
        }
        let d = r.u32()? as usize;
        if d == 0 || d > MAX_DIMS {
            return Err(Error::Format(format!("bad dimension count {d}")));
        }
        let shape = (0..d).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
        let order = r.u32()? as usize;
        let kind = ProjectorKind::from_code(r.u32()?)?;
        let levels = (0..d).map(|_| r.u32().map(|v| v as usize)).collect::<Result<Vec<_>>>()?;
        for (&n, &l) in shape.iter().zip(&levels) {
            if l == 0 || l > grid::MAX_LEVELS || grid::node_count(order, l) != n {
                return Err(Error::Format(format!("axis size {n} inconsistent with order {order} and {l} levels")));
            }
        }
        let ordering = Ordering::from_code(r.u32()?)?;
        let weighting_code = r.u32()?;
        let threshold = r.f64()?;
        let s = r.f64()?;
        let weighting = Weighting::from_code(weighting_code, s)?;
        let n = shape
            .iter()
            .try_fold(1usize, |acc, &s| acc.checked_mul(s))
            .ok_or_else(|| Error::Format("coefficient count overflows".into()))?;
        let header = BlobHeader { shape, order, kind, levels, ordering, weighting, threshold };
        let bitmap = r.take(n.div_ceil(8))?;
        let retained: Vec<bool> = (0..n).map(|i| bitmap[i / 8] >> (i % 8) & 1 == 1).collect();
        if n % 8 != 0 && bitmap[n / 8] >> (n % 8) != 0 {
            return Err(Error::Format("padding bits set in retention bitmap".into()));
        }
        let kept = retained.iter().filter(|&&b| b).count();
        let values = (0..kept).map(|_| r.f64()).collect::<Result<Vec<_>>>()?;
        if r.at != bytes.len() {
            return Err(Error::Format(format!("{} trailing bytes", bytes.len() - r.at)));
        }
        Ok(Self { header, retained, values })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    at: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.at.checked_add(n).filter(|&e| e <= self.bytes.len());
        match end {
            Some(end) => {
                let s = &self.bytes[self.at..end];
                self.at = end;
                Ok(s)
            }
            None => Err(Error::Format(format!("truncated blob at byte {}", self.at))),
        }
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }
}
