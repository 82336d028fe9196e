//! The multilevel forward and inverse lifting transform.
//!
//! One forward level maps the nodal values of level `j + 1` to
//!
//! ```text
//! beta_j  = v[nabla] - P_j v[delta]
//! alpha_j = v[delta] + U_j beta_j
//! ```
//!
//! and the inverse undoes the two steps in reverse order, so the pair is
//! invertible for any `P_j`, `U_j`. The full transform applies the levels
//! from the finest down to level 0.

use crate::blockops::{merge_cols, merge_rows, DenseMatrix, IndexSets};
use crate::error::{Error, Result};
use crate::grid::{self, CoefficientPyramid, GridHierarchy};
use crate::predictor::{self, Stencil};
use crate::update::{self, ProjectorKind, UpdateMatrix};

/// Operators of one level: the predictor stencil, `U_j` and the index sets.
#[derive(Clone, Debug)]
pub struct LevelOperators {
    pub level: usize,
    pub stencil: Stencil,
    pub update: UpdateMatrix,
    pub index_sets: IndexSets,
}

impl LevelOperators {
    pub fn new(kind: ProjectorKind, order: usize, level: usize) -> Result<Self> {
        Ok(Self {
            level,
            stencil: predictor::stencil_closed_form(order)?,
            update: update::build_update(kind, order, level)?,
            index_sets: IndexSets::even_odd(grid::node_count(order, level + 1)),
        })
    }

    pub fn coarse_len(&self) -> usize {
        self.index_sets.delta.len()
    }

    pub fn surplus_len(&self) -> usize {
        self.index_sets.nabla.len()
    }

    /// Dense `P_j`.
    pub fn predictor_matrix(&self) -> Result<DenseMatrix> {
        predictor::assemble_predictor(self.stencil.order(), self.level)
    }
}

/// Precomputed operators for every level of a `(kind, q, J)` hierarchy.
/// Immutable once built; forward and inverse take `&self`.
#[derive(Clone, Debug)]
pub struct TransformPlan {
    kind: ProjectorKind,
    hierarchy: GridHierarchy,
    /// Indexed by level `j = 0..J`.
    ops: Vec<LevelOperators>,
}

impl TransformPlan {
    pub fn new(kind: ProjectorKind, order: usize, levels: usize) -> Result<Self> {
        let hierarchy = GridHierarchy::new(order, levels)?;
        let ops = (0..levels)
            .map(|j| LevelOperators::new(kind, order, j))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { kind, hierarchy, ops })
    }

    /// Plan whose finest grid has `len` nodes.
    pub fn for_length(kind: ProjectorKind, order: usize, len: usize) -> Result<Self> {
        match grid::levels_for_length(len, order) {
            Some(levels) => Self::new(kind, order, levels),
            None => Err(grid::validate_input_length(len, order, 0).unwrap_err()),
        }
    }

    pub fn kind(&self) -> ProjectorKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.hierarchy.order()
    }

    pub fn levels(&self) -> usize {
        self.hierarchy.levels()
    }

    pub fn hierarchy(&self) -> &GridHierarchy {
        &self.hierarchy
    }

    pub fn len(&self) -> usize {
        self.hierarchy.finest_node_count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn level(&self, j: usize) -> &LevelOperators {
        &self.ops[j]
    }

    pub fn forward(&self, data: &[f64]) -> Result<CoefficientPyramid> {
        grid::validate_input_length(data.len(), self.order(), self.levels())?;
        check_finite(data)?;
        let mut pyr = CoefficientPyramid::zeros(&self.hierarchy);
        let mut v = data.to_vec();
        for ops in self.ops.iter().rev() {
            let (alpha, beta) = forward_level(ops, &v)?;
            pyr.betas[ops.level] = beta;
            v = alpha;
        }
        pyr.alpha0 = v;
        Ok(pyr)
    }

    pub fn inverse(&self, pyr: &CoefficientPyramid) -> Result<Vec<f64>> {
        if pyr.levels() != self.levels() || pyr.alpha0.len() != self.hierarchy.node_count(0) {
            return Err(Error::dims(
                "inverse",
                format!("pyramid with {} levels", self.levels()),
                format!("{} levels, {} coarse values", pyr.levels(), pyr.alpha0.len()),
            ));
        }
        let mut v = pyr.alpha0.clone();
        for ops in &self.ops {
            v = inverse_level(ops, &v, &pyr.betas[ops.level])?;
        }
        Ok(v)
    }

    /// Forward transform returning the flat `[alpha0, beta_0, ...]` vector.
    pub fn forward_flat(&self, data: &[f64]) -> Result<Vec<f64>> {
        Ok(self.forward(data)?.to_flat())
    }

    pub fn inverse_flat(&self, flat: &[f64]) -> Result<Vec<f64>> {
        self.inverse(&CoefficientPyramid::from_flat(&self.hierarchy, flat)?)
    }

    /// Dense transform matrix `M` (fine nodal values to flat pyramid) and
    /// its inverse, composed from the identity-padded level matrices.
    /// Quadratic in memory; meant for verification on small grids.
    pub fn composite_matrix(&self) -> Result<(DenseMatrix, DenseMatrix)> {
        let n = self.len();
        let mut m = DenseMatrix::identity(n);
        let mut minv = DenseMatrix::identity(n);
        for ops in self.ops.iter().rev() {
            let (a, b, c, d) = level_matrices(ops)?;
            let fwd = pad_identity(&vstack(&a, &b), n);
            let inv = pad_identity(&hstack(&c, &d), n);
            m = fwd.matmul(&m)?;
            minv = minv.matmul(&inv)?;
        }
        Ok((m, minv))
    }
}

fn check_finite(data: &[f64]) -> Result<()> {
    match data.iter().position(|v| !v.is_finite()) {
        Some(index) => Err(Error::NonFinite { index, value: data[index] }),
        None => Ok(()),
    }
}

/// One forward level on the level `j + 1` values `alpha_next`.
pub fn forward_level(ops: &LevelOperators, alpha_next: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    let (mut alpha, surplus) = grid::split(alpha_next, &ops.index_sets)?;
    let mut beta = vec![0.0; ops.surplus_len()];
    predictor::apply_predict(&ops.stencil, &alpha, &mut beta)?;
    for (b, s) in beta.iter_mut().zip(&surplus) {
        *b = s - *b;
    }
    ops.update.apply_scaled(&beta, 1.0, &mut alpha);
    Ok((alpha, beta))
}

/// One inverse level: recovers the level `j + 1` values.
pub fn inverse_level(ops: &LevelOperators, alpha: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    if alpha.len() != ops.coarse_len() {
        return Err(Error::dims("inverse_level alpha", ops.coarse_len(), alpha.len()));
    }
    if beta.len() != ops.surplus_len() {
        return Err(Error::dims("inverse_level beta", ops.surplus_len(), beta.len()));
    }
    let mut coarse = alpha.to_vec();
    ops.update.apply_scaled(beta, -1.0, &mut coarse);
    let mut surplus = vec![0.0; beta.len()];
    predictor::apply_predict(&ops.stencil, &coarse, &mut surplus)?;
    for (s, b) in surplus.iter_mut().zip(beta) {
        *s += b;
    }
    grid::merge(&coarse, &surplus, &ops.index_sets)
}

/// Dense `(A_j, B_j, C_j, D_j)` with
/// `A = (I - UP) merged with U`, `B = -P merged with I` (column merges) and
/// `C = I merged with P`, `D = -U merged with (I - PU)` (row merges).
pub fn level_matrices(ops: &LevelOperators) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix, DenseMatrix)> {
    let p = ops.predictor_matrix()?;
    let u = ops.update.to_dense();
    let up = u.matmul(&p)?;
    let pu = p.matmul(&u)?;
    let id_d = DenseMatrix::identity(ops.coarse_len());
    let id_n = DenseMatrix::identity(ops.surplus_len());
    let idx = &ops.index_sets;
    let a = merge_cols(&id_d.sub(&up)?, &u, idx)?;
    let b = merge_cols(&p.scale(-1.0), &id_n, idx)?;
    let c = merge_rows(&id_d, &p, idx)?;
    let d = merge_rows(&u.scale(-1.0), &id_n.sub(&pu)?, idx)?;
    Ok((a, b, c, d))
}

fn vstack(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut out = DenseMatrix::zeros(a.rows() + b.rows(), a.cols());
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            out[(i, j)] = a[(i, j)];
        }
    }
    for i in 0..b.rows() {
        for j in 0..b.cols() {
            out[(a.rows() + i, j)] = b[(i, j)];
        }
    }
    out
}

fn hstack(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    vstack(&a.transpose(), &b.transpose()).transpose()
}

/// `diag(m, I)` of total size `n`.
fn pad_identity(m: &DenseMatrix, n: usize) -> DenseMatrix {
    let mut out = DenseMatrix::identity(n);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    out
}
