//! Nested dyadic grids on `[0, 1]`.
//!
//! For order `q >= 1` level `j` has `2^j` elements of `q + 1` nodes each,
//! `q * 2^j + 1` nodes in total and spacing `1 / (q * 2^j)`. For `q = 0` the
//! nodes are the `2^j` element left endpoints of a piecewise-constant basis.
//! In both cases the coarse nodes of level `j` sit at the even indices of
//! level `j + 1` and the surplus nodes at the odd ones.

use crate::blockops::IndexSets;
use crate::error::{Error, Result};

/// Largest supported number of levels (node counts must fit comfortably in memory).
pub const MAX_LEVELS: usize = 30;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GridHierarchy {
    order: usize,
    levels: usize,
}

impl GridHierarchy {
    pub fn new(order: usize, levels: usize) -> Result<Self> {
        if levels == 0 || levels > MAX_LEVELS {
            return Err(Error::InvalidArgument(format!(
                "number of levels must be in 1..={MAX_LEVELS}, got {levels}"
            )));
        }
        Ok(Self { order, levels })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Number of refinements `J`; the finest level is `J`.
    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn node_count(&self, level: usize) -> usize {
        node_count(self.order, level)
    }

    pub fn finest_node_count(&self) -> usize {
        self.node_count(self.levels)
    }

    pub fn element_count(&self, level: usize) -> usize {
        1 << level
    }

    /// Distance between adjacent nodes at `level`.
    pub fn spacing(&self, level: usize) -> f64 {
        spacing(self.order, level)
    }

    /// `|nabla_j|`.
    pub fn surplus_count(&self, level: usize) -> usize {
        self.node_count(level + 1) - self.node_count(level)
    }

    /// Partition of the level `level + 1` nodes into coarse and surplus nodes.
    pub fn index_sets(&self, level: usize) -> IndexSets {
        assert!(level < self.levels, "level {level} out of range");
        IndexSets::even_odd(self.node_count(level + 1))
    }

    /// Coordinate of node `k` at `level`.
    pub fn coordinate(&self, level: usize, k: usize) -> f64 {
        k as f64 * self.spacing(level)
    }
}

/// Node count of level `level` for order `order`.
pub fn node_count(order: usize, level: usize) -> usize {
    if order == 0 {
        1 << level
    } else {
        order * (1 << level) + 1
    }
}

pub fn spacing(order: usize, level: usize) -> f64 {
    let elements = (1u64 << level) as f64;
    if order == 0 {
        1.0 / elements
    } else {
        1.0 / (order as f64 * elements)
    }
}

/// Number of levels `J` for which `n` nodes is admissible, if any.
pub fn levels_for_length(n: usize, order: usize) -> Option<usize> {
    (1..=MAX_LEVELS).find(|&j| node_count(order, j) == n)
}

/// Checks that `n` matches the finest node count of a `(q, J)` hierarchy and
/// otherwise names the nearest admissible sizes for order `q`.
pub fn validate_input_length(n: usize, order: usize, levels: usize) -> Result<()> {
    if (1..=MAX_LEVELS).contains(&levels) && node_count(order, levels) == n {
        return Ok(());
    }
    let (below, above) = nearest_admissible(n, order);
    let mut msg = format!("length {n} is not admissible for order {order}");
    if (1..=MAX_LEVELS).contains(&levels) {
        msg.push_str(&format!(" with {levels} levels (expected {})", node_count(order, levels)));
    }
    msg.push_str("; nearest admissible sizes:");
    if let Some(b) = below {
        msg.push_str(&format!(" {b}"));
    }
    if let Some(a) = above {
        msg.push_str(&format!(" {a}"));
    }
    Err(Error::InadmissibleSize(msg))
}

/// Admissible lengths just below and just above `n` (at least one level).
pub fn nearest_admissible(n: usize, order: usize) -> (Option<usize>, Option<usize>) {
    let sizes: Vec<usize> = (1..=MAX_LEVELS).map(|j| node_count(order, j)).collect();
    let below = sizes.iter().copied().rfind(|&s| s <= n);
    let above = sizes.iter().copied().find(|&s| s >= n && Some(s) != below);
    (below, above)
}

/// Splits `v` (level `j + 1` values) into coarse and surplus parts.
pub fn split(v: &[f64], idx: &IndexSets) -> Result<(Vec<f64>, Vec<f64>)> {
    if v.len() != idx.len() {
        return Err(Error::dims("split", idx.len(), v.len()));
    }
    Ok((
        idx.delta.iter().map(|&k| v[k]).collect(),
        idx.nabla.iter().map(|&k| v[k]).collect(),
    ))
}

/// Exact inverse of [`split`].
pub fn merge(coarse: &[f64], surplus: &[f64], idx: &IndexSets) -> Result<Vec<f64>> {
    if coarse.len() != idx.delta.len() {
        return Err(Error::dims("merge coarse", idx.delta.len(), coarse.len()));
    }
    if surplus.len() != idx.nabla.len() {
        return Err(Error::dims("merge surplus", idx.nabla.len(), surplus.len()));
    }
    let mut out = vec![0.0; idx.len()];
    for (&k, &v) in idx.delta.iter().zip(coarse) {
        out[k] = v;
    }
    for (&k, &v) in idx.nabla.iter().zip(surplus) {
        out[k] = v;
    }
    Ok(out)
}

/// Coefficients of a multilevel decomposition: `alpha0` over the coarsest
/// nodes followed by the detail vectors `betas[j]`, `j = 0..J`. Surplus
/// coefficients are ordered by ascending node index.
#[derive(Clone, Debug, PartialEq)]
pub struct CoefficientPyramid {
    pub order: usize,
    pub alpha0: Vec<f64>,
    pub betas: Vec<Vec<f64>>,
}

impl CoefficientPyramid {
    pub fn zeros(hier: &GridHierarchy) -> Self {
        Self {
            order: hier.order(),
            alpha0: vec![0.0; hier.node_count(0)],
            betas: (0..hier.levels())
                .map(|j| vec![0.0; hier.surplus_count(j)])
                .collect(),
        }
    }

    pub fn levels(&self) -> usize {
        self.betas.len()
    }

    pub fn len(&self) -> usize {
        self.alpha0.len() + self.betas.iter().map(Vec::len).sum::<usize>()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenation `[alpha0, beta_0, ..., beta_{J-1}]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.len());
        out.extend_from_slice(&self.alpha0);
        for b in &self.betas {
            out.extend_from_slice(b);
        }
        out
    }

    /// Inverse of [`to_flat`](Self::to_flat) for the given hierarchy.
    pub fn from_flat(hier: &GridHierarchy, flat: &[f64]) -> Result<Self> {
        if flat.len() != hier.finest_node_count() {
            return Err(Error::dims("CoefficientPyramid::from_flat", hier.finest_node_count(), flat.len()));
        }
        let mut pyr = Self::zeros(hier);
        let mut at = pyr.alpha0.len();
        pyr.alpha0.copy_from_slice(&flat[..at]);
        for b in &mut pyr.betas {
            let n = b.len();
            b.copy_from_slice(&flat[at..at + n]);
            at += n;
        }
        Ok(pyr)
    }

    /// Level label of each flat position: 0 for `alpha0`, `j + 1` for `beta_j`.
    pub fn level_labels(hier: &GridHierarchy) -> Vec<usize> {
        let mut labels = vec![0; hier.node_count(0)];
        for j in 0..hier.levels() {
            labels.extend(std::iter::repeat_n(j + 1, hier.surplus_count(j)));
        }
        labels
    }
}
