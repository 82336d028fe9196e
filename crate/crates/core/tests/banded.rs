//! Banded Cholesky against a dense solve on assembled Gram matrices.

use polylift::blockops::{banded_cholesky_solve, dense_solve};
use polylift::gram::assemble_global_gram_dd;
use polylift::DenseMatrix;

#[test]
fn banded_matches_dense_on_gram_matrices() {
    for q in 1..=4 {
        for level in 0..8 {
            let g = assemble_global_gram_dd(q, level).unwrap();
            if g.dim() > 500 {
                continue;
            }
            let n = g.dim();
            let rhs = DenseMatrix::from_vec(n, 2, (0..2 * n).map(|i| ((i * 37) % 11) as f64 - 5.0).collect()).unwrap();
            let banded = banded_cholesky_solve(&g, &rhs).unwrap();
            let dense = dense_solve(&g.to_dense(), &rhs).unwrap();
            let scale = dense.max_abs();
            assert!(banded.max_abs_diff(&dense) <= 1e-10 * scale, "q={q} level={level}");
        }
    }
}

#[test]
fn factor_reuse_matches_matvec() {
    let g = assemble_global_gram_dd(3, 5).unwrap();
    let x: Vec<f64> = (0..g.dim()).map(|i| (i as f64 * 0.3).sin()).collect();
    let mut b = g.matvec(&x);
    g.cholesky().unwrap().solve_in_place(&mut b);
    let err = b.iter().zip(&x).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err < 1e-9, "{err}");
}
