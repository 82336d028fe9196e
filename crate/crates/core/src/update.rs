//! Update operators `U_j` mapping detail coefficients on the surplus nodes to
//! corrections of the coarse nodal values.
//!
//! Column `n` of `U_j` holds the nodal values (on the coarse grid) of the
//! projection of the fine nodal function `phi_{j+1,n}`:
//!
//! * interpolation: `U_j = 0`;
//! * order zero (CG or DG): `U_j = I / 2`, the Haar average;
//! * CG: `U_j = G_dd^{-1} G_dn` with the globally assembled Gram matrices;
//! * DG: the element-local solve `U^q = (G^q_dd)^{-1} G^q_dn` stacked over
//!   the elements, with rows of nodes shared by two elements halved.

use std::fmt;
use std::str::FromStr;

use crate::blockops::{
    banded_cholesky_solve, dense_solve, repeat_stack, stack_row_overlap, BandedCholesky,
    BandedSpdMatrix, DenseMatrix,
};
use crate::error::{Error, Result};
use crate::gram::{self, ElementGram};
use crate::grid;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProjectorKind {
    Interpolation,
    Cg,
    Dg,
}

impl ProjectorKind {
    pub const ALL: [ProjectorKind; 3] = [ProjectorKind::Interpolation, ProjectorKind::Cg, ProjectorKind::Dg];

    /// Code stored in the blob header.
    pub fn code(self) -> u32 {
        match self {
            ProjectorKind::Interpolation => 0,
            ProjectorKind::Cg => 1,
            ProjectorKind::Dg => 2,
        }
    }

    pub fn from_code(code: u32) -> Result<Self> {
        match code {
            0 => Ok(ProjectorKind::Interpolation),
            1 => Ok(ProjectorKind::Cg),
            2 => Ok(ProjectorKind::Dg),
            other => Err(Error::Format(format!("unknown projector kind code {other}"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProjectorKind::Interpolation => "interp",
            ProjectorKind::Cg => "cg",
            ProjectorKind::Dg => "dg",
        }
    }
}

impl fmt::Display for ProjectorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProjectorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "interp" | "interpolation" => Ok(ProjectorKind::Interpolation),
            "cg" => Ok(ProjectorKind::Cg),
            "dg" => Ok(ProjectorKind::Dg),
            other => Err(Error::InvalidArgument(format!(
                "unknown projector kind '{other}' (expected interp, cg or dg)"
            ))),
        }
    }
}

/// `U_j` in a representation that can be applied in linear time.
#[derive(Clone, Debug)]
pub enum UpdateMatrix {
    Zero {
        rows: usize,
        cols: usize,
    },
    HalfIdentity {
        n: usize,
    },
    /// Element-local block `local` (`(q+1) x q`) repeated over `elements`.
    Dg {
        order: usize,
        elements: usize,
        local: DenseMatrix,
    },
    /// Factored global Gram system; applied as `G_dd^{-1} (G_dn beta)`.
    Cg {
        order: usize,
        level: usize,
        gram: ElementGram,
        factor: BandedCholesky,
    },
}

impl UpdateMatrix {
    pub fn rows(&self) -> usize {
        match self {
            UpdateMatrix::Zero { rows, .. } => *rows,
            UpdateMatrix::HalfIdentity { n } => *n,
            UpdateMatrix::Dg { order, elements, .. } => order * elements + 1,
            UpdateMatrix::Cg { factor, .. } => factor.dim(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            UpdateMatrix::Zero { cols, .. } => *cols,
            UpdateMatrix::HalfIdentity { n } => *n,
            UpdateMatrix::Dg { order, elements, .. } => order * elements,
            UpdateMatrix::Cg { order, level, .. } => order << level,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, UpdateMatrix::Zero { .. })
    }

    /// `out += sign * U beta`.
    pub fn apply_scaled(&self, beta: &[f64], sign: f64, out: &mut [f64]) {
        debug_assert_eq!(beta.len(), self.cols());
        debug_assert_eq!(out.len(), self.rows());
        match self {
            UpdateMatrix::Zero { .. } => {}
            UpdateMatrix::HalfIdentity { .. } => {
                for (o, b) in out.iter_mut().zip(beta) {
                    *o += sign * 0.5 * b;
                }
            }
            UpdateMatrix::Dg { order, elements, local } => {
                let q = *order;
                let last = elements * q;
                let mut tmp = vec![0.0; q + 1];
                for (e, src) in beta.chunks_exact(q).enumerate() {
                    for (r, t) in tmp.iter_mut().enumerate() {
                        *t = local.row(r).iter().zip(src).map(|(a, b)| a * b).sum();
                    }
                    for (r, t) in tmp.iter().enumerate() {
                        let node = e * q + r;
                        let shared = (r == 0 && node != 0) || (r == q && node != last);
                        let w = if shared { 0.5 } else { 1.0 };
                        out[node] += sign * w * t;
                    }
                }
            }
            UpdateMatrix::Cg { gram, factor, .. } => {
                let mut t = vec![0.0; factor.dim()];
                gram::apply_gdn(gram, beta, &mut t);
                factor.solve_in_place(&mut t);
                for (o, v) in out.iter_mut().zip(&t) {
                    *o += sign * v;
                }
            }
        }
    }

    /// `U beta` as a new vector.
    pub fn apply(&self, beta: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.rows()];
        self.apply_scaled(beta, 1.0, &mut out);
        out
    }

    /// Column `k` of `U`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        let mut e = vec![0.0; self.cols()];
        e[k] = 1.0;
        self.apply(&e)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.rows(), self.cols());
        for k in 0..self.cols() {
            for (i, v) in self.column(k).into_iter().enumerate() {
                m[(i, k)] = v;
            }
        }
        m
    }
}

/// Element-local update `(G^q_dd)^{-1} G^q_dn`, independent of the spacing.
pub fn element_update(order: usize) -> Result<DenseMatrix> {
    let eg = gram::element_gram(order, 1.0)?;
    let gdd = BandedSpdMatrix::from_dense(&eg.gdd, order)?;
    banded_cholesky_solve(&gdd, &eg.gdn)
}

/// Builds `U_j` for projector `kind`, order `order`, level `level`.
pub fn build_update(kind: ProjectorKind, order: usize, level: usize) -> Result<UpdateMatrix> {
    let rows = grid::node_count(order, level);
    let cols = grid::node_count(order, level + 1) - rows;
    match kind {
        ProjectorKind::Interpolation => Ok(UpdateMatrix::Zero { rows, cols }),
        _ if order == 0 => Ok(UpdateMatrix::HalfIdentity { n: rows }),
        ProjectorKind::Dg => Ok(UpdateMatrix::Dg {
            order,
            elements: 1 << level,
            local: element_update(order)?,
        }),
        ProjectorKind::Cg => {
            let gdd = gram::assemble_global_gram_dd(order, level)?;
            let gram = gram::element_gram(order, gram::level_fine_spacing(order, level))?;
            Ok(UpdateMatrix::Cg {
                order,
                level,
                gram,
                factor: gdd.cholesky()?,
            })
        }
    }
}

/// Dense CG update from a general LU solve of the same Gram system. Used to
/// cross-check the banded path.
pub fn cg_update_dense_oracle(order: usize, level: usize) -> Result<DenseMatrix> {
    if order == 0 {
        return Ok(DenseMatrix::identity(1 << level).scale(0.5));
    }
    let gdd = gram::assemble_global_gram_dd(order, level)?.to_dense();
    let gdn = gram::assemble_global_gram_dn(order, level)?;
    dense_solve(&gdd, &gdn)
}

/// Dense DG update by the multiplicity-scaled stacking of the element blocks.
pub fn dg_update_dense(order: usize, level: usize) -> Result<DenseMatrix> {
    if order == 0 {
        return Ok(DenseMatrix::identity(1 << level).scale(0.5));
    }
    let local = element_update(order)?;
    let mut m = repeat_stack(&local, 1 << level, stack_row_overlap);
    let last = m.rows() - 1;
    for e in 1..(1 << level) {
        let r = e * order;
        if r != last {
            for c in 0..m.cols() {
                m[(r, c)] *= 0.5;
            }
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolation_is_zero() {
        for q in 0..4 {
            for j in 0..4 {
                let u = build_update(ProjectorKind::Interpolation, q, j).unwrap();
                assert_eq!(u.to_dense().max_abs(), 0.0);
                assert_eq!(u.rows(), grid::node_count(q, j));
            }
        }
    }

    #[test]
    fn haar_update_is_half_identity() {
        for kind in [ProjectorKind::Cg, ProjectorKind::Dg] {
            for j in 0..5 {
                let u = build_update(kind, 0, j).unwrap().to_dense();
                assert_eq!(u, DenseMatrix::identity(1 << j).scale(0.5));
            }
        }
        assert_eq!(cg_update_dense_oracle(0, 3).unwrap(), DenseMatrix::identity(8).scale(0.5));
    }

    #[test]
    fn dg_linear_two_elements_layout() {
        let u = element_update(1).unwrap();
        // one column for q = 1: the fine hat projected onto the element
        let (u00, u10) = (u[(0, 0)], u[(1, 0)]);
        let dg = build_update(ProjectorKind::Dg, 1, 1).unwrap().to_dense();
        let expected = DenseMatrix::from_rows(&[
            [u00, 0.0],
            [u10 / 2.0, u00 / 2.0],
            [0.0, u10],
        ]);
        assert!(dg.max_abs_diff(&expected) < 1e-15);
        // the hat integrates to h and has equal moments against both element
        // hats, so its L2 projection has nodal values 1/2, 1/2
        assert!((u00 - 0.5).abs() < 1e-14 && (u10 - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dg_matches_dense_stacking_and_sparsity() {
        for q in 1..6 {
            for j in 0..4 {
                let u = build_update(ProjectorKind::Dg, q, j).unwrap().to_dense();
                let dense = dg_update_dense(q, j).unwrap();
                assert!(u.max_abs_diff(&dense) < 1e-14);
                for c in 0..u.cols() {
                    let nnz = u.column(c).iter().filter(|v| **v != 0.0).count();
                    assert!(nnz <= 2 * (q + 1));
                }
            }
        }
    }

    #[test]
    fn cg_banded_matches_dense_oracle() {
        for q in 1..=4 {
            for j in 0..=5 {
                let u = build_update(ProjectorKind::Cg, q, j).unwrap().to_dense();
                let oracle = cg_update_dense_oracle(q, j).unwrap();
                assert!(u.max_abs_diff(&oracle) <= 1e-10, "q={q} j={j}");
            }
        }
    }

    #[test]
    fn cg_columns_solve_gram_system() {
        for q in 1..=4 {
            for j in 0..4 {
                let u = build_update(ProjectorKind::Cg, q, j).unwrap();
                let gdd = gram::assemble_global_gram_dd(q, j).unwrap();
                let gdn = gram::assemble_global_gram_dn(q, j).unwrap();
                for k in 0..u.cols() {
                    let col = u.column(k);
                    let lhs = gdd.matvec(&col);
                    let rhs = gdn.column(k);
                    let res = lhs.iter().zip(&rhs).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    let norm = rhs.iter().map(|v| v * v).sum::<f64>().sqrt();
                    assert!(res <= 1e-11 * norm);
                }
            }
        }
    }

    #[test]
    fn kind_parsing() {
        assert_eq!("CG".parse::<ProjectorKind>().unwrap(), ProjectorKind::Cg);
        assert_eq!("interp".parse::<ProjectorKind>().unwrap(), ProjectorKind::Interpolation);
        assert!("spline".parse::<ProjectorKind>().is_err());
        for k in ProjectorKind::ALL {
            assert_eq!(ProjectorKind::from_code(k.code()).unwrap(), k);
        }
        assert!(ProjectorKind::from_code(9).is_err());
    }
}
