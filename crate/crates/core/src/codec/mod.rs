//! Threshold coding of transform coefficients.
//!
//! A coefficient is dropped when its weighted magnitude is below the
//! threshold; the coarsest scaling block is always kept. Errors are measured
//! on the reconstruction as exact L2 norms over the unit cube, so they are
//! already normalised by the domain measure.

pub mod format;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Ordering, TensorArray, TensorTransform};
use crate::update::ProjectorKind;

pub use format::{BlobHeader, CompressedBlob, Weighting};

/// Iteration cap of the target-error threshold search.
pub const MAX_BISECTION_STEPS: usize = 40;

/// Relative tolerance of the target-error threshold search.
pub const TARGET_TOLERANCE: f64 = 0.05;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CodecConfig {
    pub kind: ProjectorKind,
    pub order: usize,
    pub ordering: Ordering,
    pub weighting: Weighting,
    pub threshold: f64,
}

impl CodecConfig {
    pub fn new(kind: ProjectorKind, order: usize) -> Self {
        Self {
            kind,
            order,
            ordering: Ordering::Mallat,
            weighting: Weighting::L2,
            threshold: 0.0,
        }
    }

    pub fn with_threshold(mut self, threshold: f64) -> Self {
        self.threshold = threshold;
        self
    }

    pub fn with_ordering(mut self, ordering: Ordering) -> Self {
        self.ordering = ordering;
        self
    }

    pub fn with_weighting(mut self, weighting: Weighting) -> Self {
        self.weighting = weighting;
        self
    }

    /// Smoothness weights are equivalent norms only for `s < q + 1/2`;
    /// outside that range thresholding still works but loses the guarantee.
    pub fn smoothness_out_of_range(&self) -> bool {
        matches!(self.weighting, Weighting::Smooth(s) if s >= self.order as f64 + 0.5)
    }

    fn validate(&self) -> Result<()> {
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold must be >= 0, got {}", self.threshold)));
        }
        if !self.weighting.smoothness().is_finite() {
            return Err(Error::InvalidArgument("smoothness s must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateDistortionReport {
    /// Kept coefficients over total coefficients.
    pub cr: f64,
    pub l2_error: f64,
    pub linf_error: f64,
    /// Kept coefficients per level label (0 = coarsest scaling block).
    pub per_level_retained: Vec<usize>,
    pub threshold: f64,
}

/// One entry of the sorted coefficient magnitudes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayEntry {
    pub rank: usize,
    pub magnitude: f64,
    pub level: usize,
}

/// Transformed data and weights, reusable across thresholds.
#[derive(Clone, Debug)]
pub struct Encoder {
    cfg: CodecConfig,
    transform: TensorTransform,
    original: TensorArray,
    coeffs: Vec<f64>,
    labels: Vec<usize>,
    /// Weighted magnitude of each coefficient.
    weighted: Vec<f64>,
}

impl Encoder {
    pub fn new(data: &TensorArray, cfg: CodecConfig) -> Result<Self> {
        cfg.validate()?;
        let transform = TensorTransform::new(cfg.kind, cfg.order, data.shape())?;
        let coeffs = transform.forward(cfg.ordering, data)?;
        let (labels, weights) = match cfg.weighting {
            Weighting::Raw => {
                let labels = transform.coefficient_labels(cfg.ordering)?;
                let w = vec![1.0; labels.len()];
                (labels, w)
            }
            Weighting::L2 | Weighting::Smooth(_) => {
                let s = cfg.weighting.smoothness();
                let info = transform.coefficient_info(cfg.ordering)?;
                let w = info
                    .iter()
                    .map(|i| if i.label == 0 { i.norm } else { i.norm * 2f64.powf(s * (i.label - 1) as f64) })
                    .collect();
                (info.into_iter().map(|i| i.label).collect(), w)
            }
        };
        let weighted = coeffs.iter().zip(&weights).map(|(c, w)| (c * w).abs()).collect();
        Ok(Self { cfg, transform, original: data.clone(), coeffs, labels, weighted })
    }

    pub fn config(&self) -> &CodecConfig {
        &self.cfg
    }

    pub fn transform(&self) -> &TensorTransform {
        &self.transform
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn weighted_magnitudes(&self) -> &[f64] {
        &self.weighted
    }

    /// Largest weighted detail magnitude; every detail is dropped above it.
    pub fn max_detail_magnitude(&self) -> f64 {
        self.weighted
            .iter()
            .zip(&self.labels)
            .filter(|(_, &l)| l > 0)
            .fold(0.0, |m, (w, _)| m.max(*w))
    }

    pub fn retention(&self, threshold: f64) -> Vec<bool> {
        self.weighted
            .iter()
            .zip(&self.labels)
            .map(|(w, &l)| l == 0 || *w >= threshold)
            .collect()
    }

    pub fn header(&self, threshold: f64) -> BlobHeader {
        BlobHeader {
            shape: self.transform.shape().to_vec(),
            order: self.cfg.order,
            kind: self.cfg.kind,
            levels: self.transform.axis_levels(),
            ordering: self.cfg.ordering,
            weighting: self.cfg.weighting,
            threshold,
        }
    }

    /// Thresholds, builds the blob and measures the reconstruction.
    pub fn encode(&self, threshold: f64) -> Result<(CompressedBlob, RateDistortionReport)> {
        if threshold.is_nan() || threshold < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold must be >= 0, got {threshold}")));
        }
        let retained = self.retention(threshold);
        let blob = CompressedBlob::new(self.header(threshold), &self.coeffs, retained)?;
        let report = self.report(&blob)?;
        Ok((blob, report))
    }

    fn report(&self, blob: &CompressedBlob) -> Result<RateDistortionReport> {
        let recon = self.transform.inverse(self.cfg.ordering, &blob.coefficients())?;
        let diff: Vec<f64> = recon.data().iter().zip(self.original.data()).map(|(a, b)| a - b).collect();
        let levels = self.labels.iter().max().map_or(0, |m| m + 1);
        let mut per_level = vec![0; levels];
        for (&l, _) in self.labels.iter().zip(&blob.retained).filter(|(_, &r)| r) {
            per_level[l] += 1;
        }
        Ok(RateDistortionReport {
            cr: blob.retained_count() as f64 / blob.retained.len() as f64,
            l2_error: self.transform.norm_squared(&diff)?.max(0.0).sqrt(),
            linf_error: diff.iter().fold(0.0, |m, v| m.max(v.abs())),
            per_level_retained: per_level,
            threshold: blob.header.threshold,
        })
    }

    /// Weighted magnitudes sorted in descending order.
    pub fn decay(&self) -> Vec<DecayEntry> {
        let mut order: Vec<usize> = (0..self.weighted.len()).collect();
        order.sort_by(|&a, &b| self.weighted[b].total_cmp(&self.weighted[a]).then(a.cmp(&b)));
        order
            .into_iter()
            .enumerate()
            .map(|(rank, i)| DecayEntry { rank, magnitude: self.weighted[i], level: self.labels[i] })
            .collect()
    }

    /// Sum of squared weighted magnitudes per level label.
    pub fn level_energy(&self) -> Vec<f64> {
        let levels = self.labels.iter().max().map_or(0, |m| m + 1);
        let mut energy = vec![0.0; levels];
        for (w, &l) in self.weighted.iter().zip(&self.labels) {
            energy[l] += w * w;
        }
        energy
    }

    /// Smallest-error threshold search for an L2 error target.
    pub fn target_l2(&self, target: f64) -> Result<TargetOutcome> {
        if !(target.is_finite() && target > 0.0) {
            return Err(Error::InvalidArgument(format!("target error must be positive, got {target}")));
        }
        let mut lo = self.encode(0.0)?;
        let top = self.max_detail_magnitude();
        let mut hi = self.encode(next_up(top))?;
        let within = |r: &RateDistortionReport| (r.l2_error - target).abs() <= TARGET_TOLERANCE * target;
        if hi.1.l2_error <= target || within(&hi.1) {
            return Ok(TargetOutcome::finish(hi, None, 0, within));
        }
        if lo.1.l2_error > target {
            return Ok(TargetOutcome::finish(lo, None, 0, within));
        }
        let mut steps = 0;
        while steps < MAX_BISECTION_STEPS && !within(&lo.1) {
            steps += 1;
            let mid = 0.5 * (lo.1.threshold + hi.1.threshold);
            let probe = self.encode(mid)?;
            if within(&probe.1) {
                lo = probe;
                break;
            }
            if probe.1.l2_error > target {
                hi = probe;
            } else {
                lo = probe;
            }
        }
        Ok(TargetOutcome::finish(lo, Some(hi.1), steps, within))
    }
}

fn next_up(x: f64) -> f64 {
    if x == 0.0 {
        f64::MIN_POSITIVE
    } else {
        f64::from_bits(x.to_bits() + 1)
    }
}

/// Result of [`Encoder::target_l2`].
#[derive(Clone, Debug)]
pub struct TargetOutcome {
    pub blob: CompressedBlob,
    pub report: RateDistortionReport,
    /// Whether the error is within the tolerance of the target.
    pub converged: bool,
    pub iterations: usize,
    /// Report of the smallest tried threshold whose error exceeds the
    /// target, when the search stopped without converging.
    pub upper: Option<RateDistortionReport>,
}

impl TargetOutcome {
    fn finish(
        (blob, report): (CompressedBlob, RateDistortionReport),
        upper: Option<RateDistortionReport>,
        iterations: usize,
        within: impl Fn(&RateDistortionReport) -> bool,
    ) -> Self {
        let converged = within(&report);
        Self { blob, report, converged, iterations, upper: if converged { None } else { upper } }
    }
}

pub fn compress(data: &TensorArray, cfg: CodecConfig) -> Result<(CompressedBlob, RateDistortionReport)> {
    Encoder::new(data, cfg)?.encode(cfg.threshold)
}

pub fn decompress(blob: &CompressedBlob) -> Result<TensorArray> {
    let h = &blob.header;
    let transform = TensorTransform::new(h.kind, h.order, &h.shape)?;
    transform.inverse(h.ordering, &blob.coefficients())
}

pub fn decompress_bytes(bytes: &[u8]) -> Result<TensorArray> {
    decompress(&CompressedBlob::from_bytes(bytes)?)
}

pub fn coefficient_decay(data: &TensorArray, cfg: CodecConfig) -> Result<Vec<DecayEntry>> {
    Ok(Encoder::new(data, cfg)?.decay())
}

/// Reports for each threshold in `thresholds`, in the given order.
pub fn rd_sweep(data: &TensorArray, cfg: CodecConfig, thresholds: &[f64]) -> Result<Vec<RateDistortionReport>> {
    let enc = Encoder::new(data, cfg)?;
    thresholds.iter().map(|&t| enc.encode(t).map(|(_, r)| r)).collect()
}
