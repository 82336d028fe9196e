//! Primal and dual basis functions sampled by the cascade algorithm, and
//! their L2 norms.
//!
//! Primal functions are obtained by running the inverse transform on a unit
//! coefficient and stopping at the requested depth; the result is the vector
//! of nodal values of a continuous piecewise polynomial. Dual functions are
//! rows of the forward transform applied to the approximate deltas
//! `phi_{J,p} / eps_{J,p}` and are returned as their level-`J` nodal
//! coefficients. For the interpolation kind they converge to Dirac measures
//! rather than to functions, so the samples grow with the depth.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::gram;
use crate::grid;
use crate::lifting::{forward_level, inverse_level, TransformPlan};
use crate::predictor;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BasisKind {
    PrimalScaling,
    PrimalWavelet,
    DualScaling,
    DualWavelet,
}

impl BasisKind {
    pub fn name(self) -> &'static str {
        match self {
            BasisKind::PrimalScaling => "phi",
            BasisKind::PrimalWavelet => "psi",
            BasisKind::DualScaling => "dual-phi",
            BasisKind::DualWavelet => "dual-psi",
        }
    }

    pub fn is_wavelet(self) -> bool {
        matches!(self, BasisKind::PrimalWavelet | BasisKind::DualWavelet)
    }
}

impl fmt::Display for BasisKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BasisKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi" => Ok(BasisKind::PrimalScaling),
            "psi" => Ok(BasisKind::PrimalWavelet),
            "dual-phi" => Ok(BasisKind::DualScaling),
            "dual-psi" => Ok(BasisKind::DualWavelet),
            other => Err(Error::InvalidArgument(format!(
                "unknown basis '{other}' (expected phi, psi, dual-phi or dual-psi)"
            ))),
        }
    }
}

/// Scaling function samples and wavelet samples, one row per index.
pub type ScalingWavelet = (Vec<Vec<f64>>, Vec<Vec<f64>>);

/// Nodal samples of one basis function at level `depth`.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSample {
    pub kind: BasisKind,
    pub level: usize,
    pub index: usize,
    pub depth: usize,
    pub values: Vec<f64>,
}

impl BasisSample {
    /// `(x, value)` pairs on the level-`depth` grid of order `order`.
    pub fn points(&self, order: usize) -> Vec<(f64, f64)> {
        let h = grid::spacing(order, self.depth);
        self.values
            .iter()
            .enumerate()
            .map(|(k, &v)| (k as f64 * h, v))
            .collect()
    }
}

fn check_levels(plan: &TransformPlan, level: usize, depth: usize) -> Result<()> {
    if level >= depth || depth > plan.levels() {
        return Err(Error::InvalidArgument(format!(
            "need level < depth <= {}, got level {level} and depth {depth}",
            plan.levels()
        )));
    }
    Ok(())
}

/// Inverse levels `from..depth` starting from level-`from` values `v`.
fn refine(plan: &TransformPlan, from: usize, depth: usize, mut v: Vec<f64>) -> Result<Vec<f64>> {
    for l in from..depth {
        let zeros = vec![0.0; plan.level(l).surplus_len()];
        v = inverse_level(plan.level(l), &v, &zeros)?;
    }
    Ok(v)
}

/// `phi_{level,k}` sampled at `depth`.
pub fn primal_scaling(plan: &TransformPlan, level: usize, k: usize, depth: usize) -> Result<Vec<f64>> {
    check_levels(plan, level, depth)?;
    let mut alpha = vec![0.0; plan.hierarchy().node_count(level)];
    *alpha
        .get_mut(k)
        .ok_or_else(|| Error::InvalidArgument(format!("scaling index {k} out of range")))? = 1.0;
    refine(plan, level, depth, alpha)
}

/// `psi_{level,k}` sampled at `depth`; `k` counts surplus nodes of the level.
pub fn primal_wavelet(plan: &TransformPlan, level: usize, k: usize, depth: usize) -> Result<Vec<f64>> {
    check_levels(plan, level, depth)?;
    let ops = plan.level(level);
    if k >= ops.surplus_len() {
        return Err(Error::InvalidArgument(format!("wavelet index {k} out of range")));
    }
    let mut beta = vec![0.0; ops.surplus_len()];
    beta[k] = 1.0;
    let v = inverse_level(ops, &vec![0.0; ops.coarse_len()], &beta)?;
    refine(plan, level + 1, depth, v)
}

/// All `phi_{level,k}` and `psi_{level,k}` sampled at `depth`.
pub fn cascade_primal(plan: &TransformPlan, level: usize, depth: usize) -> Result<ScalingWavelet> {
    check_levels(plan, level, depth)?;
    let ops = plan.level(level);
    let phi = (0..ops.coarse_len())
        .map(|k| primal_scaling(plan, level, k, depth))
        .collect::<Result<Vec<_>>>()?;
    let psi = (0..ops.surplus_len())
        .map(|k| primal_wavelet(plan, level, k, depth))
        .collect::<Result<Vec<_>>>()?;
    Ok((phi, psi))
}

/// `eps_{J,k}`, the integral of `phi_{J,k}`, by Newton-Cotes with `q`
/// subintervals per element (exact for degree `q`).
pub fn scaling_epsilon(order: usize, depth: usize) -> Result<Vec<f64>> {
    let len = 1.0 / (1u64 << depth) as f64;
    if order == 0 {
        return Ok(vec![len; 1 << depth]);
    }
    let w = gram::newton_cotes_weights(order)?;
    let mut eps = vec![0.0; grid::node_count(order, depth)];
    for e in 0..1usize << depth {
        for (r, wr) in w.iter().enumerate() {
            eps[e * order + r] += wr * len / order as f64;
        }
    }
    Ok(eps)
}

/// Level-`level` coefficients (`alpha`, `beta`) of the fine vector `v` given
/// at level `depth`.
fn analyse(plan: &TransformPlan, level: usize, depth: usize, mut v: Vec<f64>) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut beta = Vec::new();
    for l in (level..depth).rev() {
        let (a, b) = forward_level(plan.level(l), &v)?;
        v = a;
        beta = b;
    }
    Ok((v, beta))
}

/// Dual scaling and wavelet functions of `level`, as level-`depth` nodal
/// coefficients indexed `[k][p]`.
pub fn cascade_dual(plan: &TransformPlan, level: usize, depth: usize) -> Result<ScalingWavelet> {
    check_levels(plan, level, depth)?;
    let eps = scaling_epsilon(plan.order(), depth)?;
    let n = eps.len();
    let ops = plan.level(level);
    let mut phi = vec![vec![0.0; n]; ops.coarse_len()];
    let mut psi = vec![vec![0.0; n]; ops.surplus_len()];
    for (p, e) in eps.iter().enumerate() {
        let mut delta = vec![0.0; n];
        delta[p] = 1.0 / e;
        let (alpha, beta) = analyse(plan, level, depth, delta)?;
        for (row, a) in phi.iter_mut().zip(alpha) {
            row[p] = a;
        }
        for (row, b) in psi.iter_mut().zip(beta) {
            row[p] = b;
        }
    }
    Ok((phi, psi))
}

/// One basis function of any kind.
pub fn sample(plan: &TransformPlan, kind: BasisKind, level: usize, k: usize, depth: usize) -> Result<BasisSample> {
    let values = match kind {
        BasisKind::PrimalScaling => primal_scaling(plan, level, k, depth)?,
        BasisKind::PrimalWavelet => primal_wavelet(plan, level, k, depth)?,
        BasisKind::DualScaling | BasisKind::DualWavelet => {
            let (phi, psi) = cascade_dual(plan, level, depth)?;
            let rows = if kind == BasisKind::DualScaling { phi } else { psi };
            rows.into_iter()
                .nth(k)
                .ok_or_else(|| Error::InvalidArgument(format!("{kind} index {k} out of range")))?
        }
    };
    Ok(BasisSample { kind, level, index: k, depth, values })
}

/// Exact `||f||^2` of the level-`level` nodal function with values `v`.
///
/// Each element is refined once with the interpolation stencil; on the
/// `2q + 1` refined points the square of the degree-`q` element polynomial is
/// integrated exactly by the closed Newton-Cotes rule with `2q` subintervals.
pub fn nodal_norm_squared(order: usize, level: usize, v: &[f64]) -> Result<f64> {
    if v.len() != grid::node_count(order, level) {
        return Err(Error::dims("nodal_norm_squared", grid::node_count(order, level), v.len()));
    }
    let len = 1.0 / (1u64 << level) as f64;
    if order == 0 {
        return Ok(v.iter().map(|x| x * x).sum::<f64>() * len);
    }
    let stencil = predictor::stencil_closed_form(order)?;
    let w = gram::newton_cotes_weights(2 * order)?;
    let scale = len / (2 * order) as f64;
    let mut mid = vec![0.0; order];
    let mut total = 0.0;
    for e in v.windows(order + 1).step_by(order) {
        predictor::apply_predict(&stencil, e, &mut mid)?;
        let mut acc = 0.0;
        for (r, x) in e.iter().enumerate() {
            acc += w[2 * r] * x * x;
        }
        for (r, x) in mid.iter().enumerate() {
            acc += w[2 * r + 1] * x * x;
        }
        total += acc * scale;
    }
    Ok(total)
}

/// `<a, b>` of two level-`level` nodal functions through the mass matrix.
pub fn mass_inner(order: usize, level: usize, a: &[f64], b: &[f64]) -> Result<f64> {
    let g = gram::assemble_global_gram_dd(order, level)?;
    if a.len() != g.dim() || b.len() != g.dim() {
        return Err(Error::dims("mass_inner", g.dim(), a.len().max(b.len())));
    }
    Ok(g.matvec(b).iter().zip(a).map(|(x, y)| x * y).sum())
}

/// Exact `||phi_{level,k}||` for every coarse node and `||psi_{level,k}||`
/// for every surplus node of `level`.
// TODO: CG wavelet norms cost O(N) each through a dense column of U_j; a
// selected inversion of the banded Gram matrix would make the level linear.
pub fn basis_norms(plan: &TransformPlan, level: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if level >= plan.levels() {
        return Err(Error::InvalidArgument(format!("level {level} out of range")));
    }
    let q = plan.order();
    let ops = plan.level(level);
    let n_coarse = ops.coarse_len();
    let mut unit = vec![0.0; n_coarse];
    let mut phi = Vec::with_capacity(n_coarse);
    for k in 0..n_coarse {
        unit[k] = 1.0;
        phi.push(nodal_norm_squared(q, level, &unit)?.sqrt());
        unit[k] = 0.0;
    }
    let zeros = vec![0.0; n_coarse];
    let mut beta = vec![0.0; ops.surplus_len()];
    let mut psi = Vec::with_capacity(beta.len());
    for k in 0..beta.len() {
        beta[k] = 1.0;
        let v = inverse_level(ops, &zeros, &beta)?;
        psi.push(nodal_norm_squared(q, level + 1, &v)?.sqrt());
        beta[k] = 0.0;
    }
    Ok((phi, psi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::update::ProjectorKind;

    fn plan(kind: ProjectorKind, q: usize, levels: usize) -> TransformPlan {
        TransformPlan::new(kind, q, levels).unwrap()
    }

    #[test]
    fn kind_names() {
        for k in [BasisKind::PrimalScaling, BasisKind::PrimalWavelet, BasisKind::DualScaling, BasisKind::DualWavelet] {
            assert_eq!(k.name().parse::<BasisKind>().unwrap(), k);
        }
        assert!("chi".parse::<BasisKind>().is_err());
    }

    #[test]
    fn haar_wavelet_is_half_step() {
        let p = plan(ProjectorKind::Cg, 0, 3);
        let psi = primal_wavelet(&p, 0, 0, 3).unwrap();
        assert_eq!(psi, vec![-0.5, -0.5, -0.5, -0.5, 0.5, 0.5, 0.5, 0.5]);
        let psi = primal_wavelet(&p, 1, 1, 3).unwrap();
        assert_eq!(psi, vec![0.0, 0.0, 0.0, 0.0, -0.5, -0.5, 0.5, 0.5]);
    }

    #[test]
    fn interpolation_wavelet_is_fine_nodal_function() {
        for q in 1..=4 {
            let p = plan(ProjectorKind::Interpolation, q, 5);
            for k in 0..p.level(1).surplus_len() {
                let psi = primal_wavelet(&p, 1, k, 5).unwrap();
                let fine = primal_scaling(&p, 2, 2 * k + 1, 5).unwrap();
                assert_eq!(psi, fine);
            }
        }
    }

    #[test]
    fn cardinal_property_and_refinement_consistency() {
        for kind in ProjectorKind::ALL {
            for q in 0..=4 {
                let p = plan(kind, q, 5);
                let (phi, _) = cascade_primal(&p, 2, 5).unwrap();
                for (k, v) in phi.iter().enumerate() {
                    // level-2 node m is level-5 node 8m
                    for m in 0..p.hierarchy().node_count(2) {
                        let expected = if m == k { 1.0 } else { 0.0 };
                        assert!((v[m * 8] - expected).abs() <= 1e-13);
                    }
                    let coarse = primal_scaling(&p, 2, k, 4).unwrap();
                    for (i, c) in coarse.iter().enumerate() {
                        assert_eq!(*c, v[2 * i]);
                    }
                }
            }
        }
    }

    #[test]
    fn epsilon_values() {
        assert_eq!(scaling_epsilon(0, 3).unwrap(), vec![0.125; 8]);
        let eps = scaling_epsilon(1, 3).unwrap();
        let h = 1.0 / 8.0;
        assert!((eps[0] - h / 2.0).abs() < 1e-16 && (eps[8] - h / 2.0).abs() < 1e-16);
        assert!(eps[1..8].iter().all(|e| (e - h).abs() < 1e-16));
        for q in 1..=8 {
            let total: f64 = scaling_epsilon(q, 4).unwrap().iter().sum();
            assert!((total - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn haar_norms() {
        let p = plan(ProjectorKind::Dg, 0, 6);
        for j in 0..6 {
            let (phi, psi) = basis_norms(&p, j).unwrap();
            for v in phi {
                assert!((v * v - 2f64.powi(-(j as i32))).abs() <= 1e-13);
            }
            for v in psi {
                assert!((v * v - 2f64.powi(-(j as i32 + 2))).abs() <= 1e-13);
            }
        }
    }

    #[test]
    fn linear_interpolation_norms() {
        // hat of half-width h has ||.||^2 = 2h/3; boundary half hat h/3
        let p = plan(ProjectorKind::Interpolation, 1, 4);
        let (phi, psi) = basis_norms(&p, 2).unwrap();
        let h = 0.25;
        assert!((phi[0].powi(2) - h / 3.0).abs() < 1e-15);
        assert!((phi[2].powi(2) - 2.0 * h / 3.0).abs() < 1e-15);
        for v in psi {
            assert!((v * v - h / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn norms_match_mass_matrix() {
        for kind in ProjectorKind::ALL {
            for q in 0..=5 {
                let p = plan(kind, q, 4);
                for j in 0..4 {
                    let (phi, psi) = basis_norms(&p, j).unwrap();
                    for (k, n) in phi.iter().enumerate() {
                        let v = primal_scaling(&p, j, k, 4).unwrap();
                        let exact = mass_inner(q, 4, &v, &v).unwrap();
                        assert!((n * n - exact).abs() <= 1e-12 * exact, "{kind} q={q}");
                    }
                    for (k, n) in psi.iter().enumerate() {
                        let v = primal_wavelet(&p, j, k, 4).unwrap();
                        let exact = mass_inner(q, 4, &v, &v).unwrap();
                        assert!((n * n - exact).abs() <= 1e-11 * exact, "{kind} q={q}");
                    }
                }
            }
        }
    }

    #[test]
    fn cg_wavelets_are_orthogonal_to_coarse_space() {
        for q in 1..=4 {
            let p = plan(ProjectorKind::Cg, q, 4);
            let (phi, psi) = cascade_primal(&p, 1, 4).unwrap();
            for s in &psi {
                let ns = mass_inner(q, 4, s, s).unwrap().sqrt();
                for f in &phi {
                    let nf = mass_inner(q, 4, f, f).unwrap().sqrt();
                    assert!(mass_inner(q, 4, s, f).unwrap().abs() <= 1e-10 * ns * nf);
                }
            }
        }
    }

    #[test]
    fn haar_duals() {
        let p = plan(ProjectorKind::Cg, 0, 4);
        let (phi, psi) = cascade_dual(&p, 1, 4).unwrap();
        assert_eq!(phi[0], [vec![2.0; 8], vec![0.0; 8]].concat());
        assert_eq!(psi[1], [vec![0.0; 8], vec![-4.0; 4], vec![4.0; 4]].concat());
    }

    #[test]
    fn interpolation_dual_wavelet_carries_stencil_weights() {
        let q = 2;
        let p = plan(ProjectorKind::Interpolation, q, 4);
        let eps = scaling_epsilon(q, 4).unwrap();
        let (_, psi) = cascade_dual(&p, 1, 4).unwrap();
        let stencil = predictor::stencil_closed_form(q).unwrap();
        // level-1 surplus node k sits at level-2 index 2k + 1 = level-4 index 8k + 4
        let k = 1;
        let row: Vec<f64> = psi[k].iter().zip(&eps).map(|(w, e)| w * e).collect();
        let mut expected = vec![0.0; row.len()];
        expected[8 * k + 4] = 1.0;
        for n in 0..=q {
            expected[8 * n] -= stencil.matrix()[(k, n)];
        }
        for (a, b) in row.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13);
        }
    }

    #[test]
    fn biorthogonality_in_the_limit() {
        for kind in [ProjectorKind::Cg, ProjectorKind::Dg] {
            for q in 1..=2 {
                let (j, depth) = (1, 9);
                let p = plan(kind, q, depth);
                let (_, dpsi) = cascade_dual(&p, j, depth).unwrap();
                let (phi, psi) = cascade_primal(&p, j, depth).unwrap();
                let g = gram::assemble_global_gram_dd(q, depth).unwrap();
                let dot = |a: &[f64], b: &[f64]| g.matvec(a).iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
                for (k, d) in dpsi.iter().enumerate() {
                    for (m, s) in psi.iter().enumerate() {
                        let ip = dot(s, d);
                        let expected = if k == m { 1.0 } else { 0.0 };
                        assert!((ip - expected).abs() <= 1e-3, "{kind} q={q} <psi_{m}, dual_{k}> = {ip}");
                    }
                    for f in &phi {
                        assert!(dot(f, d).abs() <= 1e-3);
                    }
                }
            }
        }
    }

    #[test]
    fn dg_wavelets_have_local_support_cg_do_not() {
        let (q, j, depth) = (2, 2, 6);
        let per_elem = q << (depth - j);
        for kind in [ProjectorKind::Dg, ProjectorKind::Cg] {
            let p = plan(kind, q, depth);
            for k in 0..p.level(j).surplus_len() {
                let psi = primal_wavelet(&p, j, k, depth).unwrap();
                let elem = k / q;
                let lo = elem.saturating_sub(1) * per_elem;
                let hi = ((elem + 2) * per_elem).min(psi.len() - 1);
                let outside = psi
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i < lo || *i > hi)
                    .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
                match kind {
                    ProjectorKind::Dg => assert_eq!(outside, 0.0),
                    _ => assert!(outside > 1e-8),
                }
            }
        }
    }

    #[test]
    fn sample_rejects_bad_indices() {
        let p = plan(ProjectorKind::Dg, 1, 3);
        assert!(sample(&p, BasisKind::PrimalScaling, 3, 0, 3).is_err());
        assert!(sample(&p, BasisKind::PrimalWavelet, 0, 5, 3).is_err());
        assert!(sample(&p, BasisKind::DualScaling, 0, 9, 3).is_err());
        let s = sample(&p, BasisKind::PrimalScaling, 0, 1, 3).unwrap();
        assert_eq!(s.points(1)[8], (1.0, 1.0));
    }
}
