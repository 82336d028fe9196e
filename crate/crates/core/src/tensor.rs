//! Tensor-product transforms of 1-, 2- and 3-dimensional arrays.
//!
//! Two orderings are provided. The separable ordering runs the full 1D
//! transform along every axis, so each axis of the coefficient array is a
//! 1D pyramid. The Mallat ordering applies one level along all axes, keeps
//! the detail subbands and recurses on the low block.
//!
//! Mallat coefficient layout (flat): the final low block in row-major
//! order, then for each step from the coarsest to the finest the subbands
//! of that step in increasing axis mask (bit `a` set = high-pass along
//! axis `a`), each block row-major. Axes with fewer levels than the deepest
//! axis take part in the finest steps only and stay low-pass afterwards.
//! For a single axis the layout is exactly `[alpha0, beta_0, ..., beta_{J-1}]`.

use std::fmt;
use std::str::FromStr;

use crate::basis;
use crate::error::{Error, Result};
use crate::gram;
use crate::grid;
use crate::lifting::{forward_level, inverse_level, TransformPlan};
use crate::update::ProjectorKind;

pub const MAX_DIMS: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Ordering {
    #[default]
    Mallat,
    Separable,
}

impl Ordering {
    pub fn code(self) -> u32 {
        match self {
            Ordering::Mallat => 0,
            Ordering::Separable => 1,
        }
    }

    pub fn from_code(code: u32) -> Result<Self> {
        match code {
            0 => Ok(Ordering::Mallat),
            1 => Ok(Ordering::Separable),
            other => Err(Error::Format(format!("unknown ordering code {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Ordering::Mallat => "mallat",
            Ordering::Separable => "separable",
        }
    }
}

impl fmt::Display for Ordering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Ordering {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "mallat" => Ok(Ordering::Mallat),
            "separable" => Ok(Ordering::Separable),
            other => Err(Error::InvalidArgument(format!(
                "unknown ordering '{other}' (expected mallat or separable)"
            ))),
        }
    }
}

/// Row-major array of up to three dimensions.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorArray {
    shape: Vec<usize>,
    data: Vec<f64>,
}

impl TensorArray {
    pub fn new(shape: Vec<usize>, data: Vec<f64>) -> Result<Self> {
        if shape.is_empty() || shape.len() > MAX_DIMS {
            return Err(Error::InvalidArgument(format!(
                "arrays must have 1 to {MAX_DIMS} dimensions, got {}",
                shape.len()
            )));
        }
        let n: usize = shape.iter().product();
        if n != data.len() {
            return Err(Error::dims("TensorArray::new", format!("{n} values for shape {shape:?}"), data.len()));
        }
        Ok(Self { shape, data })
    }

    /// Samples `f` at the nodes of `[0, 1]^d` for the given order and shape.
    pub fn from_fn(shape: Vec<usize>, order: usize, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let spacings = shape
            .iter()
            .map(|&n| {
                grid::levels_for_length(n, order)
                    .map(|j| grid::spacing(order, j))
                    .ok_or_else(|| grid::validate_input_length(n, order, 0).unwrap_err())
            })
            .collect::<Result<Vec<_>>>()?;
        let n: usize = shape.iter().product();
        let mut x = vec![0.0; shape.len()];
        let data = (0..n)
            .map(|flat| {
                let mut rem = flat;
                for a in (0..shape.len()).rev() {
                    x[a] = (rem % shape[a]) as f64 * spacings[a];
                    rem /= shape[a];
                }
                f(&x)
            })
            .collect();
        Self::new(shape, data)
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn ndim(&self) -> usize {
        self.shape.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }
}

/// Runs `f` on every line along `axis` of the row-major array `data`,
/// replacing each line with the result.
fn map_lines(
    shape: &[usize],
    data: &mut [f64],
    axis: usize,
    mut f: impl FnMut(&[f64]) -> Result<Vec<f64>>,
) -> Result<()> {
    let n = shape[axis];
    let stride: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut line = vec![0.0; n];
    for o in 0..outer {
        for i in 0..stride {
            let base = o * n * stride + i;
            for (k, v) in line.iter_mut().enumerate() {
                *v = data[base + k * stride];
            }
            let out = f(&line)?;
            for (k, v) in out.into_iter().enumerate() {
                data[base + k * stride] = v;
            }
        }
    }
    Ok(())
}

/// Visits the multi-indices of a box of extents `dims` in row-major order.
fn for_each_index(dims: &[usize], mut f: impl FnMut(&[usize])) {
    if dims.contains(&0) {
        return;
    }
    let mut idx = vec![0; dims.len()];
    loop {
        f(&idx);
        let mut a = dims.len();
        loop {
            if a == 0 {
                return;
            }
            a -= 1;
            idx[a] += 1;
            if idx[a] < dims[a] {
                break;
            }
            idx[a] = 0;
        }
    }
}

fn flat_index(shape: &[usize], idx: &[usize]) -> usize {
    idx.iter().zip(shape).fold(0, |acc, (i, n)| acc * n + i)
}

/// One subband of a Mallat step: per axis, the offset and extent inside the
/// step's working array.
#[derive(Clone, Debug)]
struct Block {
    offset: Vec<usize>,
    dims: Vec<usize>,
}

/// Per-axis role of a coefficient for norm lookup.
#[derive(Clone, Copy, Debug)]
enum AxisRole {
    Scaling { level: usize, k: usize },
    Wavelet { level: usize, k: usize },
}

/// Metadata of one coefficient in flat layout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoefficientInfo {
    /// 0 for the coarsest scaling block, `j + 1` for details of level `j`.
    pub label: usize,
    /// L2 norm of the basis function the coefficient multiplies.
    pub norm: f64,
}

/// Per-axis transform plans for one array shape.
#[derive(Clone, Debug)]
pub struct TensorTransform {
    shape: Vec<usize>,
    plans: Vec<TransformPlan>,
}

impl TensorTransform {
    pub fn new(kind: ProjectorKind, order: usize, shape: &[usize]) -> Result<Self> {
        if shape.is_empty() || shape.len() > MAX_DIMS {
            return Err(Error::InvalidArgument(format!(
                "arrays must have 1 to {MAX_DIMS} dimensions, got {}",
                shape.len()
            )));
        }
        let mut plans: Vec<TransformPlan> = Vec::with_capacity(shape.len());
        for &n in shape {
            match plans.iter().find(|p| p.len() == n) {
                Some(p) => plans.push(p.clone()),
                None => plans.push(TransformPlan::for_length(kind, order, n)?),
            }
        }
        Ok(Self { shape: shape.to_vec(), plans })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn plans(&self) -> &[TransformPlan] {
        &self.plans
    }

    pub fn order(&self) -> usize {
        self.plans[0].order()
    }

    pub fn kind(&self) -> ProjectorKind {
        self.plans[0].kind()
    }

    /// Per-axis level counts.
    pub fn axis_levels(&self) -> Vec<usize> {
        self.plans.iter().map(TransformPlan::levels).collect()
    }

    /// Largest per-axis level count.
    pub fn levels(&self) -> usize {
        self.axis_levels().into_iter().max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.shape.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check_shape(&self, arr: &TensorArray) -> Result<()> {
        if arr.shape() != self.shape.as_slice() {
            return Err(Error::dims("tensor transform", format!("{:?}", self.shape), format!("{:?}", arr.shape())));
        }
        if let Some(index) = arr.data().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index, value: arr.data()[index] });
        }
        Ok(())
    }

    pub fn forward(&self, ordering: Ordering, arr: &TensorArray) -> Result<Vec<f64>> {
        match ordering {
            Ordering::Mallat => self.forward_mallat(arr),
            Ordering::Separable => self.forward_separable(arr),
        }
    }

    pub fn inverse(&self, ordering: Ordering, coeffs: &[f64]) -> Result<TensorArray> {
        match ordering {
            Ordering::Mallat => self.inverse_mallat(coeffs),
            Ordering::Separable => self.inverse_separable(coeffs),
        }
    }

    /// Full 1D transform along each axis, last axis first.
    pub fn forward_separable(&self, arr: &TensorArray) -> Result<Vec<f64>> {
        self.check_shape(arr)?;
        let mut data = arr.data().to_vec();
        for a in (0..self.shape.len()).rev() {
            map_lines(&self.shape, &mut data, a, |line| self.plans[a].forward_flat(line))?;
        }
        Ok(data)
    }

    pub fn inverse_separable(&self, coeffs: &[f64]) -> Result<TensorArray> {
        if coeffs.len() != self.len() {
            return Err(Error::dims("inverse_separable", self.len(), coeffs.len()));
        }
        let mut data = coeffs.to_vec();
        for a in 0..self.shape.len() {
            map_lines(&self.shape, &mut data, a, |line| self.plans[a].inverse_flat(line))?;
        }
        TensorArray::new(self.shape.clone(), data)
    }

    /// Level of axis `a` transformed at Mallat step `s` (0 = finest step).
    fn step_level(&self, a: usize, s: usize) -> Option<usize> {
        let levels = self.plans[a].levels();
        (s < levels).then(|| levels - 1 - s)
    }

    /// Extents of the working array entering step `s`.
    fn step_dims(&self, s: usize) -> Vec<usize> {
        (0..self.shape.len())
            .map(|a| {
                let levels = self.plans[a].levels();
                grid::node_count(self.order(), levels - s.min(levels))
            })
            .collect()
    }

    /// Subbands of step `s` in layout order (mask 0 excluded).
    fn step_blocks(&self, s: usize) -> Vec<(usize, Block)> {
        let d = self.shape.len();
        let dims = self.step_dims(s);
        let coarse: Vec<usize> = (0..d)
            .map(|a| match self.step_level(a, s) {
                Some(l) => grid::node_count(self.order(), l),
                None => dims[a],
            })
            .collect();
        let mut blocks = Vec::new();
        for mask in 1usize..(1 << d) {
            if (0..d).any(|a| mask >> a & 1 == 1 && self.step_level(a, s).is_none()) {
                continue;
            }
            let mut offset = vec![0; d];
            let mut extent = coarse.clone();
            for a in (0..d).filter(|a| mask >> a & 1 == 1) {
                offset[a] = coarse[a];
                extent[a] = dims[a] - coarse[a];
            }
            blocks.push((mask, Block { offset, dims: extent }));
        }
        blocks
    }

    pub fn forward_mallat(&self, arr: &TensorArray) -> Result<Vec<f64>> {
        self.check_shape(arr)?;
        let d = self.shape.len();
        let steps = self.levels();
        let mut cur = arr.data().to_vec();
        let mut details: Vec<Vec<f64>> = Vec::with_capacity(steps);
        for s in 0..steps {
            let dims = self.step_dims(s);
            for a in (0..d).rev() {
                if let Some(l) = self.step_level(a, s) {
                    let ops = self.plans[a].level(l);
                    map_lines(&dims, &mut cur, a, |line| {
                        let (mut alpha, beta) = forward_level(ops, line)?;
                        alpha.extend_from_slice(&beta);
                        Ok(alpha)
                    })?;
                }
            }
            let mut band = Vec::new();
            for (_, block) in self.step_blocks(s) {
                for_each_index(&block.dims, |idx| {
                    let at: Vec<usize> = idx.iter().zip(&block.offset).map(|(i, o)| i + o).collect();
                    band.push(cur[flat_index(&dims, &at)]);
                });
            }
            details.push(band);
            let low = self.step_dims(s + 1);
            let mut next = Vec::with_capacity(low.iter().product());
            for_each_index(&low, |idx| next.push(cur[flat_index(&dims, idx)]));
            cur = next;
        }
        for band in details.into_iter().rev() {
            cur.extend(band);
        }
        Ok(cur)
    }

    pub fn inverse_mallat(&self, coeffs: &[f64]) -> Result<TensorArray> {
        if coeffs.len() != self.len() {
            return Err(Error::dims("inverse_mallat", self.len(), coeffs.len()));
        }
        let d = self.shape.len();
        let steps = self.levels();
        let low_dims = self.step_dims(steps);
        let mut at: usize = low_dims.iter().product();
        let mut cur = coeffs[..at].to_vec();
        for s in (0..steps).rev() {
            let dims = self.step_dims(s);
            let low = self.step_dims(s + 1);
            let mut work = vec![0.0; dims.iter().product()];
            for_each_index(&low, |idx| work[flat_index(&dims, idx)] = cur[flat_index(&low, idx)]);
            for (_, block) in self.step_blocks(s) {
                for_each_index(&block.dims, |idx| {
                    let pos: Vec<usize> = idx.iter().zip(&block.offset).map(|(i, o)| i + o).collect();
                    work[flat_index(&dims, &pos)] = coeffs[at];
                    at += 1;
                });
            }
            for a in 0..d {
                if let Some(l) = self.step_level(a, s) {
                    let ops = self.plans[a].level(l);
                    let split = ops.coarse_len();
                    map_lines(&dims, &mut work, a, |line| inverse_level(ops, &line[..split], &line[split..]))?;
                }
            }
            cur = work;
        }
        TensorArray::new(self.shape.clone(), cur)
    }

    /// Level label and basis norm of every coefficient in flat layout.
    pub fn coefficient_info(&self, ordering: Ordering) -> Result<Vec<CoefficientInfo>> {
        self.layout(ordering, true)
    }

    /// Level label of every coefficient in flat layout (0 for the coarsest
    /// scaling block, `j + 1` for level-`j` details).
    pub fn coefficient_labels(&self, ordering: Ordering) -> Result<Vec<usize>> {
        Ok(self.layout(ordering, false)?.into_iter().map(|i| i.label).collect())
    }

    fn layout(&self, ordering: Ordering, with_norms: bool) -> Result<Vec<CoefficientInfo>> {
        let d = self.shape.len();
        let mut phi_norms = Vec::with_capacity(d);
        let mut psi_norms = Vec::with_capacity(d);
        for plan in &self.plans {
            let mut phi = Vec::new();
            let mut psi = Vec::new();
            for j in 0..plan.levels() {
                let (f, w) = if with_norms {
                    basis::basis_norms(plan, j)?
                } else {
                    let ops = plan.level(j);
                    (vec![1.0; ops.coarse_len()], vec![1.0; ops.surplus_len()])
                };
                phi.push(f);
                psi.push(w);
            }
            phi_norms.push(phi);
            psi_norms.push(psi);
        }
        let info_of = |roles: &[AxisRole]| {
            let mut norm = 1.0;
            let mut label = 0;
            for (a, role) in roles.iter().enumerate() {
                match *role {
                    AxisRole::Scaling { level, k } => norm *= phi_norms[a][level][k],
                    AxisRole::Wavelet { level, k } => {
                        norm *= psi_norms[a][level][k];
                        label = label.max(level + 1);
                    }
                }
            }
            CoefficientInfo { label, norm }
        };
        let mut out = Vec::with_capacity(self.len());
        match ordering {
            Ordering::Separable => {
                let axis_roles: Vec<Vec<AxisRole>> = self.plans.iter().map(pyramid_roles).collect();
                for_each_index(&self.shape, |idx| {
                    let roles: Vec<AxisRole> = idx.iter().enumerate().map(|(a, &i)| axis_roles[a][i]).collect();
                    out.push(info_of(&roles));
                });
            }
            Ordering::Mallat => {
                let steps = self.levels();
                for_each_index(&self.step_dims(steps), |idx| {
                    let roles: Vec<AxisRole> = idx.iter().map(|&k| AxisRole::Scaling { level: 0, k }).collect();
                    out.push(info_of(&roles));
                });
                for s in (0..steps).rev() {
                    for (mask, block) in self.step_blocks(s) {
                        for_each_index(&block.dims, |idx| {
                            let roles: Vec<AxisRole> = (0..d)
                                .map(|a| {
                                    let level = self.step_level(a, s).unwrap_or(0);
                                    if mask >> a & 1 == 1 {
                                        AxisRole::Wavelet { level, k: idx[a] }
                                    } else {
                                        AxisRole::Scaling { level, k: idx[a] }
                                    }
                                })
                                .collect();
                            let mut info = info_of(&roles);
                            info.label = steps - s;
                            out.push(info);
                        });
                    }
                }
            }
        }
        Ok(out)
    }

    /// Exact `||f||^2` of the tensor nodal function with values `arr`, by
    /// applying the finest-level mass matrix along every axis.
    pub fn norm_squared(&self, values: &[f64]) -> Result<f64> {
        if values.len() != self.len() {
            return Err(Error::dims("norm_squared", self.len(), values.len()));
        }
        let mut g = values.to_vec();
        for (a, plan) in self.plans.iter().enumerate() {
            let mass = gram::assemble_global_gram_dd(plan.order(), plan.levels())?;
            map_lines(&self.shape, &mut g, a, |line| Ok(mass.matvec(line)))?;
        }
        Ok(g.iter().zip(values).map(|(x, y)| x * y).sum())
    }
}

fn pyramid_roles(plan: &TransformPlan) -> Vec<AxisRole> {
    let mut roles: Vec<AxisRole> = (0..plan.hierarchy().node_count(0))
        .map(|k| AxisRole::Scaling { level: 0, k })
        .collect();
    for j in 0..plan.levels() {
        roles.extend((0..plan.level(j).surplus_len()).map(|k| AxisRole::Wavelet { level: j, k }));
    }
    roles
}
