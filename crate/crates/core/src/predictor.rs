//! Lagrange interpolation stencils on dyadically nested uniform grids.
//!
//! A coarse element of order `q` carries the values `u_0, u_2, ..., u_{2q}`
//! at its coarse nodes; the stencil maps them to the interpolated values at
//! the `q` surplus nodes `u_1, u_3, ..., u_{2q-1}` in between.

use crate::blockops::{block_diag, repeat_stack, stack_col_overlap, DenseMatrix};
use crate::error::{Error, Result};

/// Largest order for which stencil entries are computed.
pub const MAX_ORDER: usize = 12;

/// The `q x (q + 1)` interpolation matrix of one element (`[1]` for `q = 0`).
#[derive(Clone, Debug, PartialEq)]
pub struct Stencil {
    order: usize,
    matrix: DenseMatrix,
}

impl Stencil {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    /// Number of coarse nodes per element.
    pub fn width(&self) -> usize {
        self.matrix.cols()
    }

    /// Number of surplus nodes per element.
    pub fn height(&self) -> usize {
        self.matrix.rows()
    }
}

fn double_factorial(n: i64) -> f64 {
    let mut acc = 1.0;
    let mut k = n;
    while k > 1 {
        acc *= k as f64;
        k -= 2;
    }
    acc
}

fn factorial(n: usize) -> f64 {
    (2..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Stencil from the closed-form double-factorial expression
/// `(-1)^(m+n) / (2^q (1 + 2m - 2n)) * (2m+1)!! (2q-2m-1)!! / (n! (q-n)!)`.
pub fn stencil_closed_form(order: usize) -> Result<Stencil> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge { order, max: MAX_ORDER });
    }
    if order == 0 {
        return Ok(Stencil {
            order,
            matrix: DenseMatrix::identity(1),
        });
    }
    let q = order as i64;
    let mut matrix = DenseMatrix::zeros(order, order + 1);
    let two_q = 2f64.powi(order as i32);
    for m in 0..q {
        for n in 0..=q {
            let sign = if (m + n) % 2 == 0 { 1.0 } else { -1.0 };
            let value = sign / (two_q * (1 + 2 * m - 2 * n) as f64)
                * double_factorial(2 * m + 1)
                * double_factorial(2 * q - 2 * m - 1)
                / (factorial(n as usize) * factorial((q - n) as usize));
            matrix[(m as usize, n as usize)] = value;
        }
    }
    Ok(Stencil { order, matrix })
}

/// Stencil by direct evaluation of the Lagrange cardinal functions on the
/// coarse nodes `0, 2, ..., 2q` at the surplus points `1, 3, ..., 2q - 1`.
pub fn stencil_oracle(order: usize) -> Result<Stencil> {
    if order > MAX_ORDER {
        return Err(Error::OrderTooLarge { order, max: MAX_ORDER });
    }
    if order == 0 {
        return Ok(Stencil {
            order,
            matrix: DenseMatrix::identity(1),
        });
    }
    let mut matrix = DenseMatrix::zeros(order, order + 1);
    for m in 0..order {
        let x = (2 * m + 1) as f64;
        for n in 0..=order {
            let xn = (2 * n) as f64;
            let mut value = 1.0;
            for k in (0..=order).filter(|&k| k != n) {
                let xk = (2 * k) as f64;
                value *= (x - xk) / (xn - xk);
            }
            matrix[(m, n)] = value;
        }
    }
    Ok(Stencil { order, matrix })
}

/// Global predictor `P_j` of shape `|nabla_j| x |Delta_j|`: the element
/// stencils stacked with one shared column per element boundary. For
/// `q = 0` it is the identity.
pub fn assemble_predictor(order: usize, level: usize) -> Result<DenseMatrix> {
    let stencil = stencil_closed_form(order)?;
    let elements = 1usize << level;
    let op = if order == 0 { block_diag } else { stack_col_overlap };
    Ok(repeat_stack(stencil.matrix(), elements, op))
}

/// `out = P_j coarse`, applied element by element.
pub fn apply_predict(stencil: &Stencil, coarse: &[f64], out: &mut [f64]) -> Result<()> {
    let q = stencil.order();
    let (expected_coarse, expected_out) = if q == 0 {
        (out.len(), coarse.len())
    } else {
        if coarse.is_empty() || !(coarse.len() - 1).is_multiple_of(q) {
            return Err(Error::dims("apply_predict", "q * 2^j + 1 coarse values", coarse.len()));
        }
        (coarse.len(), coarse.len() - 1)
    };
    if coarse.len() != expected_coarse || out.len() != expected_out {
        return Err(Error::dims(
            "apply_predict",
            format!("{expected_out} outputs"),
            format!("{} outputs", out.len()),
        ));
    }
    if q == 0 {
        out.copy_from_slice(coarse);
        return Ok(());
    }
    let m = stencil.matrix();
    for (e, dst) in out.chunks_exact_mut(q).enumerate() {
        let src = &coarse[e * q..e * q + q + 1];
        for (r, d) in dst.iter_mut().enumerate() {
            *d = m.row(r).iter().zip(src).map(|(a, b)| a * b).sum();
        }
    }
    Ok(())
}

/// `out += P_j^T surplus`, the transpose action used by dual cascades.
pub fn apply_predict_transpose(stencil: &Stencil, surplus: &[f64], out: &mut [f64]) {
    let q = stencil.order();
    if q == 0 {
        for (o, s) in out.iter_mut().zip(surplus) {
            *o += s;
        }
        return;
    }
    let m = stencil.matrix();
    for (e, src) in surplus.chunks_exact(q).enumerate() {
        let dst = &mut out[e * q..e * q + q + 1];
        for (r, s) in src.iter().enumerate() {
            for (d, a) in dst.iter_mut().zip(m.row(r)) {
                *d += a * s;
            }
        }
    }
}
