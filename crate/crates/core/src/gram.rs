//! Element and global Gram (mass) matrices, and Newton-Cotes weights.
//!
//! For one coarse element of order `q` with fine spacing `h` (so the element
//! spans `[0, 2qh]`), `gdd[n][m] = <phi_{0,2n}, phi_{0,2m}>` pairs coarse
//! nodal functions and `gdn[n][m] = <phi_{0,2n}, phi_{1,2m+1}>` pairs a
//! coarse nodal function with the fine nodal function of surplus node
//! `2m + 1`. Fine nodal functions live on the two half elements `[0, qh]` and
//! `[qh, 2qh]`; when `q` is odd the middle surplus node is shared by both.

use num::{BigInt, BigRational, One, ToPrimitive, Zero};

use crate::blockops::{block_diag, repeat_stack, stack_row_overlap, BandedSpdMatrix, DenseMatrix};
use crate::error::{Error, Result};
use crate::grid;
use crate::quadrature::{gauss_legendre_on, lagrange};

/// Largest supported Newton-Cotes subinterval count.
pub const MAX_NEWTON_COTES: usize = 24;

#[derive(Clone, Debug, PartialEq)]
pub struct ElementGram {
    pub order: usize,
    /// Fine-grid spacing; the coarse element has length `2 * order * h`
    /// (`2h` for order zero).
    pub h: f64,
    pub gdd: DenseMatrix,
    pub gdn: DenseMatrix,
}

/// Element Gram matrices by Gauss-Legendre quadrature with `q + 1` points per
/// polynomial piece.
pub fn element_gram(order: usize, h: f64) -> Result<ElementGram> {
    if h.is_nan() || h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!("element spacing must be positive, got {h}")));
    }
    if order == 0 {
        return Ok(ElementGram {
            order,
            h,
            gdd: DenseMatrix::from_rows(&[[2.0 * h]]),
            gdn: DenseMatrix::from_rows(&[[h]]),
        });
    }
    let q = order;
    let coarse: Vec<f64> = (0..=q).map(|n| (2 * n) as f64 * h).collect();
    let left: Vec<f64> = (0..=q).map(|k| k as f64 * h).collect();
    let right: Vec<f64> = (0..=q).map(|k| (q + k) as f64 * h).collect();
    let mid = q as f64 * h;
    let rule_left = gauss_legendre_on(q + 1, 0.0, mid);
    let rule_right = gauss_legendre_on(q + 1, mid, 2.0 * mid);

    let mut gdd = DenseMatrix::zeros(q + 1, q + 1);
    for n in 0..=q {
        for m in n..=q {
            let v: f64 = rule_left
                .iter()
                .chain(&rule_right)
                .map(|&(x, w)| w * lagrange(&coarse, n, x) * lagrange(&coarse, m, x))
                .sum();
            gdd[(n, m)] = v;
            gdd[(m, n)] = v;
        }
    }

    let mut gdn = DenseMatrix::zeros(q + 1, q);
    for m in 0..q {
        let node = 2 * m + 1;
        for n in 0..=q {
            let mut v = 0.0;
            if node <= q {
                v += rule_left
                    .iter()
                    .map(|&(x, w)| w * lagrange(&coarse, n, x) * lagrange(&left, node, x))
                    .sum::<f64>();
            }
            if node >= q {
                v += rule_right
                    .iter()
                    .map(|&(x, w)| w * lagrange(&coarse, n, x) * lagrange(&right, node - q, x))
                    .sum::<f64>();
            }
            gdn[(n, m)] = v;
        }
    }
    Ok(ElementGram { order, h, gdd, gdn })
}

/// Fine-grid spacing used for the level-`level` element Gram matrices.
pub fn level_fine_spacing(order: usize, level: usize) -> f64 {
    grid::spacing(order, level + 1)
}

/// Closed Newton-Cotes weights on `n + 1` unit-spaced nodes (summing to `n`),
/// computed in exact rational arithmetic.
pub fn newton_cotes_weights(n: usize) -> Result<Vec<f64>> {
    if n == 0 || n > MAX_NEWTON_COTES {
        return Err(Error::InvalidArgument(format!(
            "Newton-Cotes subinterval count must be in 1..={MAX_NEWTON_COTES}, got {n}"
        )));
    }
    let mut weights = Vec::with_capacity(n + 1);
    for i in 0..=n {
        // coefficients of prod_{k != i} (x - k), lowest degree first
        let mut poly = vec![BigRational::one()];
        let mut denom = BigRational::one();
        for k in (0..=n).filter(|&k| k != i) {
            let kk = BigRational::from_integer(BigInt::from(k));
            let mut next = vec![BigRational::zero(); poly.len() + 1];
            for (d, c) in poly.iter().enumerate() {
                next[d + 1] += c;
                next[d] -= c * &kk;
            }
            poly = next;
            denom *= BigRational::from_integer(BigInt::from(i as i64 - k as i64));
        }
        let upper = BigRational::from_integer(BigInt::from(n));
        let mut power = upper.clone();
        let mut integral = BigRational::zero();
        for (d, c) in poly.iter().enumerate() {
            integral += c * &power / BigRational::from_integer(BigInt::from(d + 1));
            power *= &upper;
        }
        let w = integral / denom;
        weights.push(w.to_f64().unwrap_or(f64::NAN));
    }
    Ok(weights)
}

/// Overlap-sum assembly of the level-`level` element matrices `gdd`, i.e. the
/// Gram matrix of the level-`level` nodal basis. Order zero elements share no
/// nodes, so they are concatenated block-diagonally.
pub fn assemble_global_gram_dd(order: usize, level: usize) -> Result<BandedSpdMatrix> {
    let eg = element_gram(order, level_fine_spacing(order, level))?;
    let elements = 1usize << level;
    let dim = grid::node_count(order, level);
    let mut g = BandedSpdMatrix::zeros(dim, order);
    if order == 0 {
        for e in 0..elements {
            g.set(e, e, eg.gdd[(0, 0)]);
        }
        return Ok(g);
    }
    for e in 0..elements {
        let base = e * order;
        for a in 0..=order {
            for b in 0..=a {
                g.add_to(base + a, base + b, eg.gdd[(a, b)]);
            }
        }
    }
    Ok(g)
}

/// Row-overlap stacking of the element matrices `gdn`; shape
/// `|Delta_j| x |nabla_j|`.
pub fn assemble_global_gram_dn(order: usize, level: usize) -> Result<DenseMatrix> {
    let eg = element_gram(order, level_fine_spacing(order, level))?;
    let op = if order == 0 { block_diag } else { stack_row_overlap };
    Ok(repeat_stack(&eg.gdn, 1 << level, op))
}

/// `out += G_{Delta nabla} surplus` applied element by element.
pub(crate) fn apply_gdn(eg: &ElementGram, surplus: &[f64], out: &mut [f64]) {
    let q = eg.order;
    if q == 0 {
        for (o, s) in out.iter_mut().zip(surplus) {
            *o += eg.gdn[(0, 0)] * s;
        }
        return;
    }
    for (e, src) in surplus.chunks_exact(q).enumerate() {
        let dst = &mut out[e * q..e * q + q + 1];
        for (r, d) in dst.iter_mut().enumerate() {
            *d += eg.gdn.row(r).iter().zip(src).map(|(a, b)| a * b).sum::<f64>();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_zero_blocks() {
        let h = 0.3;
        let eg = element_gram(0, h).unwrap();
        assert_eq!(eg.gdd, DenseMatrix::from_rows(&[[2.0 * h]]));
        assert_eq!(eg.gdn, DenseMatrix::from_rows(&[[h]]));
    }

    #[test]
    fn linear_element() {
        let eg = element_gram(1, 1.0).unwrap();
        let gdd = DenseMatrix::from_rows(&[[2.0 / 3.0, 1.0 / 3.0], [1.0 / 3.0, 2.0 / 3.0]]);
        let gdn = DenseMatrix::from_rows(&[[0.5], [0.5]]);
        assert!(eg.gdd.max_abs_diff(&gdd) < 1e-15);
        assert!(eg.gdn.max_abs_diff(&gdn) < 1e-15);
    }

    #[test]
    fn gram_properties() {
        for q in 1..=8 {
            let h = 0.37;
            let eg = element_gram(q, h).unwrap();
            let total: f64 = eg.gdd.as_slice().iter().sum();
            assert!((total - 2.0 * q as f64 * h).abs() < 1e-12, "q = {q}");
            // gdn column sums integrate the fine nodal functions
            let nc = newton_cotes_weights(q).unwrap();
            for m in 0..q {
                let node = 2 * m + 1;
                let local = if node < q { nc[node] } else if node > q { nc[node - q] } else { 2.0 * nc[0] };
                let col: f64 = eg.gdn.column(m).iter().sum();
                assert!((col - local * h).abs() < 1e-12, "q = {q} m = {m}");
            }
            let scaled = element_gram(q, 2.0 * h).unwrap();
            assert!(scaled.gdd.max_abs_diff(&eg.gdd.scale(2.0)) < 1e-12);
            assert!(BandedSpdMatrix::from_dense(&eg.gdd, q).unwrap().cholesky().is_ok());
        }
        assert!(element_gram(2, 0.0).is_err());
    }

    #[test]
    fn newton_cotes() {
        assert_eq!(newton_cotes_weights(1).unwrap(), vec![0.5, 0.5]);
        let s = newton_cotes_weights(2).unwrap();
        for (a, b) in s.iter().zip([1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0]) {
            assert!((a - b).abs() < 1e-16);
        }
        for n in 1..=MAX_NEWTON_COTES {
            let w = newton_cotes_weights(n).unwrap();
            let total: f64 = w.iter().sum();
            assert!((total - n as f64).abs() < 1e-12 * n as f64, "n = {n}");
        }
        assert!(newton_cotes_weights(0).is_err());
        assert!(newton_cotes_weights(MAX_NEWTON_COTES + 1).is_err());
    }

    #[test]
    fn boole_weights_match_moment_system() {
        // Solve the Vandermonde moment system sum_i w_i i^d = 4^(d+1)/(d+1).
        let n = 4;
        let mut v = DenseMatrix::zeros(n + 1, n + 1);
        let mut rhs = DenseMatrix::zeros(n + 1, 1);
        for d in 0..=n {
            for i in 0..=n {
                v[(d, i)] = (i as f64).powi(d as i32);
            }
            rhs[(d, 0)] = (n as f64).powi(d as i32 + 1) / (d + 1) as f64;
        }
        let oracle = crate::blockops::dense_solve(&v, &rhs).unwrap();
        let w = newton_cotes_weights(n).unwrap();
        let expected = [14.0, 64.0, 24.0, 64.0, 14.0].map(|x| x / 45.0);
        for i in 0..=n {
            assert!((w[i] - expected[i]).abs() < 1e-15);
            assert!((oracle[(i, 0)] - expected[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn global_assembly_examples() {
        let g = assemble_global_gram_dd(0, 1).unwrap();
        let h = level_fine_spacing(0, 1);
        assert_eq!(g.to_dense(), DenseMatrix::from_rows(&[[2.0 * h, 0.0], [0.0, 2.0 * h]]));
        assert_eq!(
            assemble_global_gram_dn(0, 1).unwrap(),
            DenseMatrix::from_rows(&[[h, 0.0], [0.0, h]])
        );

        let g = assemble_global_gram_dd(1, 1).unwrap();
        let h = level_fine_spacing(1, 1);
        let expected = DenseMatrix::from_rows(&[
            [2.0 / 3.0, 1.0 / 3.0, 0.0],
            [1.0 / 3.0, 4.0 / 3.0, 1.0 / 3.0],
            [0.0, 1.0 / 3.0, 2.0 / 3.0],
        ])
        .scale(h);
        assert!(g.to_dense().max_abs_diff(&expected) < 1e-15);
        assert_eq!(g.bandwidth(), 1);

        for q in 1..5 {
            for j in 0..4 {
                let dd = assemble_global_gram_dd(q, j).unwrap();
                assert_eq!(dd.dim(), q * (1 << j) + 1);
                let dn = assemble_global_gram_dn(q, j).unwrap();
                assert_eq!(dn.shape(), (q * (1 << j) + 1, q * (1 << j)));
                let eg = element_gram(q, level_fine_spacing(q, j)).unwrap();
                let dense = repeat_stack(&eg.gdd, 1 << j, crate::blockops::stack_overlap_sum);
                assert!(dd.to_dense().max_abs_diff(&dense) < 1e-15);
                let x: Vec<f64> = (0..dn.cols()).map(|k| (k as f64).sin()).collect();
                let mut y = vec![0.0; dn.rows()];
                apply_gdn(&eg, &x, &mut y);
                let yd = dn.matvec(&x).unwrap();
                for (a, b) in y.iter().zip(&yd) {
                    assert!((a - b).abs() < 1e-15);
                }
            }
        }
    }
}
