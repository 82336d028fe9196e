//! Acceptance checks, shared by the `acceptance` test target and the
//! `selftest` subcommand. Each check returns a one-line summary.

use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::basis;
use crate::codec::{self, CodecConfig, CompressedBlob, Encoder};
use crate::error::Result;
use crate::gram;
use crate::grid::{self, CoefficientPyramid};
use crate::lifting::{forward_level, TransformPlan};
use crate::predictor;
use crate::quadrature::gauss_legendre_on;
use crate::tensor::{Ordering, TensorArray, TensorTransform};
use crate::update::{self, ProjectorKind};
use crate::DenseMatrix;

/// Golden blob and its expected decoded values (raw little-endian f64).
pub const GOLDEN_BLOB: &[u8] = include_bytes!("../tests/fixtures/golden.pwav");
pub const GOLDEN_DECODED: &[u8] = include_bytes!("../tests/fixtures/golden_decoded.f64");

#[derive(Clone, Debug)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl CheckResult {
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {} ({:.2} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail,
            self.seconds
        )
    }
}

type Outcome = std::result::Result<String, String>;

type Check = (usize, &'static str, fn() -> Outcome);

pub const CHECKS: [Check; 12] = [
    (1, "perfect reconstruction", perfect_reconstruction),
    (2, "stencil oracle", stencil_oracle),
    (3, "gram oracle", gram_oracle),
    (4, "haar recovery", haar_recovery),
    (5, "vanishing moments", vanishing_moments),
    (6, "coefficient decay 1d", coefficient_decay_1d),
    (7, "order vs compression 2d", order_vs_compression),
    (8, "projection consistency", projection_consistency),
    (9, "compact support", compact_support),
    (10, "update build cost", update_build_cost),
    (11, "haar codec exactness", haar_codec_exactness),
    (12, "blob round trip", blob_round_trip),
];

pub fn run(id: usize) -> Option<CheckResult> {
    let &(id, name, check) = CHECKS.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let outcome = check();
    let seconds = start.elapsed().as_secs_f64();
    let (passed, detail) = match outcome {
        Ok(d) => (true, d),
        Err(d) => (false, d),
    };
    Some(CheckResult { id, name, passed, detail, seconds })
}

pub fn run_all() -> Vec<CheckResult> {
    CHECKS.iter().filter_map(|c| run(c.0)).collect()
}

fn ensure(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn fail<E: std::fmt::Display>(e: E) -> String {
    format!("error: {e}")
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

const RECONSTRUCTION_ORDERS: [usize; 6] = [0, 1, 2, 3, 4, 6];

fn perfect_reconstruction() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for kind in ProjectorKind::ALL {
        for q in RECONSTRUCTION_ORDERS {
            for d in 1..=3 {
                let cap = if d == 3 { 65 } else { 257 };
                for levels in 1..=8 {
                    let n = grid::node_count(q, levels);
                    if n > cap {
                        continue;
                    }
                    let shape = vec![n; d];
                    let t = TensorTransform::new(kind, q, &shape).map_err(fail)?;
                    let data = random_vec(&mut r, t.len());
                    let arr = TensorArray::new(shape, data).map_err(fail)?;
                    for ordering in [Ordering::Mallat, Ordering::Separable] {
                        if d == 1 && ordering == Ordering::Separable {
                            continue;
                        }
                        let c = t.forward(ordering, &arr).map_err(fail)?;
                        let back = t.inverse(ordering, &c).map_err(fail)?;
                        worst = worst.max(max_diff(back.data(), arr.data()) / max_abs(arr.data()));
                        cases += 1;
                    }
                }
            }
        }
    }
    ensure(worst <= 1e-12, format!("{cases} cases, max relative error {worst:.2e} (limit 1e-12)"))
}

fn stencil_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for q in 0..=8 {
        let a = predictor::stencil_closed_form(q).map_err(fail)?;
        let b = predictor::stencil_oracle(q).map_err(fail)?;
        worst = worst.max(a.matrix().max_abs_diff(b.matrix()));
    }
    let p0 = predictor::stencil_closed_form(0).map_err(fail)?;
    let p1 = predictor::stencil_closed_form(1).map_err(fail)?;
    let exact = p0.matrix() == &DenseMatrix::from_rows(&[[1.0]]) && p1.matrix() == &DenseMatrix::from_rows(&[[0.5, 0.5]]);
    ensure(
        worst <= 1e-12 && exact,
        format!("q=0..8 max deviation {worst:.2e}, P^0 and P^1 exact: {exact}"),
    )
}

/// Barycentric Lagrange cardinal function on equispaced-in-general nodes.
fn cardinal(nodes: &[f64], i: usize, x: f64) -> f64 {
    if let Some(k) = nodes.iter().position(|&n| n == x) {
        return if k == i { 1.0 } else { 0.0 };
    }
    let weights: Vec<f64> = (0..nodes.len())
        .map(|k| {
            1.0 / (0..nodes.len())
                .filter(|&m| m != k)
                .map(|m| nodes[k] - nodes[m])
                .product::<f64>()
        })
        .collect();
    let terms: Vec<f64> = weights.iter().zip(nodes).map(|(w, n)| w / (x - n)).collect();
    terms[i] / terms.iter().sum::<f64>()
}

/// Composite Gauss-Legendre rule: `panels` pieces of `points` nodes on `[a, b]`.
fn composite_rule(a: f64, b: f64, panels: usize, points: usize) -> Vec<(f64, f64)> {
    let w = (b - a) / panels as f64;
    (0..panels)
        .flat_map(|p| gauss_legendre_on(points, a + p as f64 * w, a + (p + 1) as f64 * w))
        .collect()
}

fn gram_oracle() -> Outcome {
    let mut worst = 0.0f64;
    for q in 1..=8 {
        for level in 0..3 {
            let h = gram::level_fine_spacing(q, level);
            let eg = gram::element_gram(q, h).map_err(fail)?;
            let coarse: Vec<f64> = (0..=q).map(|n| (2 * n) as f64 * h).collect();
            let left: Vec<f64> = (0..=q).map(|k| k as f64 * h).collect();
            let right: Vec<f64> = (0..=q).map(|k| (q + k) as f64 * h).collect();
            let mid = q as f64 * h;
            let rule_l = composite_rule(0.0, mid, 4, q + 3);
            let rule_r = composite_rule(mid, 2.0 * mid, 4, q + 3);
            let fine = |node: usize, x: f64| {
                if x <= mid {
                    if node <= q { cardinal(&left, node, x) } else { 0.0 }
                } else if node >= q {
                    cardinal(&right, node - q, x)
                } else {
                    0.0
                }
            };
            let scale = eg.gdd.max_abs();
            for n in 0..=q {
                for m in 0..=q {
                    let v: f64 = rule_l
                        .iter()
                        .chain(&rule_r)
                        .map(|&(x, w)| w * cardinal(&coarse, n, x) * cardinal(&coarse, m, x))
                        .sum();
                    worst = worst.max((v - eg.gdd[(n, m)]).abs() / scale);
                }
                for m in 0..q {
                    let v: f64 = rule_l
                        .iter()
                        .chain(&rule_r)
                        .map(|&(x, w)| w * cardinal(&coarse, n, x) * fine(2 * m + 1, x))
                        .sum();
                    worst = worst.max((v - eg.gdn[(n, m)]).abs() / scale);
                }
            }
        }
    }
    let mut exact = true;
    for level in 0..4 {
        let h = gram::level_fine_spacing(0, level);
        let eg = gram::element_gram(0, h).map_err(fail)?;
        exact &= eg.gdd == DenseMatrix::from_rows(&[[2.0 * h]]) && eg.gdn == DenseMatrix::from_rows(&[[h]]);
    }
    ensure(
        worst <= 1e-12 && exact,
        format!("q=1..8 max relative deviation {worst:.2e}, q=0 blocks [2h], [h] exact: {exact}"),
    )
}

fn haar_recovery() -> Outcome {
    let mut ops_ok = true;
    for kind in [ProjectorKind::Cg, ProjectorKind::Dg] {
        for j in 0..6 {
            let p = predictor::assemble_predictor(0, j).map_err(fail)?;
            let u = update::build_update(kind, 0, j).map_err(fail)?.to_dense();
            ops_ok &= p == DenseMatrix::identity(1 << j) && u == DenseMatrix::identity(1 << j).scale(0.5);
        }
    }
    let mut ortho = 0.0f64;
    let mut norm_err = 0.0f64;
    for kind in [ProjectorKind::Cg, ProjectorKind::Dg] {
        for levels in 1..=6 {
            let plan = TransformPlan::new(kind, 0, levels).map_err(fail)?;
            let (m, _) = plan.composite_matrix().map_err(fail)?;
            let mut norms: Vec<f64> = Vec::new();
            for j in 0..levels {
                let (phi, psi) = basis::basis_norms(&plan, j).map_err(fail)?;
                if j == 0 {
                    norms.extend(&phi);
                }
                norms.extend(&psi);
                for v in &phi {
                    norm_err = norm_err.max((v * v - 2f64.powi(-(j as i32))).abs());
                }
                for v in &psi {
                    norm_err = norm_err.max((v * v - 2f64.powi(-(j as i32 + 2))).abs());
                }
            }
            let n = plan.len();
            let root = 2f64.powf(levels as f64 / 2.0);
            let mut qm = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for k in 0..n {
                    qm[(i, k)] = root * norms[i] * m[(i, k)];
                }
            }
            let gramian = qm.matmul(&qm.transpose()).map_err(fail)?;
            ortho = ortho.max(gramian.max_abs_diff(&DenseMatrix::identity(n)));
        }
    }
    ensure(
        ops_ok && ortho <= 1e-12 && norm_err <= 1e-13,
        format!("P = I, U = I/2: {ops_ok}; orthogonality deviation {ortho:.2e}; norm deviation {norm_err:.2e}"),
    )
}

/// Continuous piecewise polynomial of degree `q` on the level-`j` partition,
/// with random values at the level-`j` nodes, sampled at level `levels`.
fn piecewise_polynomial(r: &mut ChaCha8Rng, q: usize, j: usize, levels: usize) -> Vec<f64> {
    let coarse = random_vec(r, grid::node_count(q, j));
    let n = grid::node_count(q, levels);
    let h = grid::spacing(q, levels);
    (0..n)
        .map(|i| {
            let x = i as f64 * h;
            let e = ((x * (1u64 << j) as f64) as usize).min((1 << j) - 1);
            if q == 0 {
                return coarse[e];
            }
            let len = 1.0 / (1u64 << j) as f64;
            let nodes: Vec<f64> = (0..=q).map(|r| e as f64 * len + r as f64 * len / q as f64).collect();
            (0..=q).map(|r| coarse[e * q + r] * cardinal(&nodes, r, x)).sum()
        })
        .collect()
}

fn vanishing_moments() -> Outcome {
    let mut r = rng(5);
    let levels = 6;
    let mut worst_global = 0.0f64;
    let mut worst_piecewise = 0.0f64;
    for kind in ProjectorKind::ALL {
        for q in 0..=6 {
            let plan = TransformPlan::new(kind, q, levels).map_err(fail)?;
            let coef = random_vec(&mut r, q + 1);
            let h = grid::spacing(q, levels);
            let data: Vec<f64> = (0..plan.len())
                .map(|i| coef.iter().rev().fold(0.0, |acc, c| acc * (i as f64 * h) + c))
                .collect();
            let pyr = plan.forward(&data).map_err(fail)?;
            let scale = max_abs(&data);
            for b in &pyr.betas {
                worst_global = worst_global.max(max_abs(b) / scale);
            }
            for j in 0..levels {
                let data = piecewise_polynomial(&mut r, q, j, levels);
                let pyr = plan.forward(&data).map_err(fail)?;
                let scale = max_abs(&data);
                for b in &pyr.betas[j..] {
                    worst_piecewise = worst_piecewise.max(max_abs(b) / scale);
                }
            }
        }
    }
    ensure(
        worst_global <= 1e-11 && worst_piecewise <= 1e-11,
        format!("global {worst_global:.2e}, piecewise {worst_piecewise:.2e} (relative, limit 1e-11)"),
    )
}

fn decay_test_function(x: f64) -> f64 {
    use std::f64::consts::PI;
    (2.0 * PI * x).sin() + (11.0 * PI * x).sin() / 3.0 + (23.0 * PI * x).sin() / 5.0
}

fn coefficient_decay_1d() -> Outcome {
    let levels = 12;
    let n = (1 << levels) + 1;
    let per_element = 4;
    let samples: Vec<f64> = (0..n).map(|i| decay_test_function(i as f64 / (n - 1) as f64)).collect();
    let interpolant: Vec<f64> = (0..n)
        .map(|i| {
            let e = (i / per_element).min((n - 1) / per_element - 1);
            let t = (i - e * per_element) as f64 / per_element as f64;
            (1.0 - t) * samples[e * per_element] + t * samples[(e + 1) * per_element]
        })
        .collect();
    let cg = TransformPlan::new(ProjectorKind::Cg, 1, levels).map_err(fail)?;
    let pyr = cg.forward(&interpolant).map_err(fail)?;
    let scale = max_abs(&interpolant);
    let cg_fine = pyr.betas[levels - 2..].iter().map(|b| max_abs(b)).fold(0.0, f64::max) / scale;

    let interp = TransformPlan::new(ProjectorKind::Interpolation, 1, levels).map_err(fail)?;
    let pyr = interp.forward(&samples).map_err(fail)?;
    let scale = max_abs(&samples);
    let interp_fine = pyr.betas[levels - 2..].iter().map(|b| max_abs(b)).fold(0.0, f64::max) / scale;
    let interp_finest = max_abs(&pyr.betas[levels - 1]) / scale;
    ensure(
        cg_fine <= 1e-10 && interp_fine > 1e-4,
        format!(
            "cg on interpolant, two finest levels {cg_fine:.2e} (<= 1e-10); interp on samples, two finest levels {interp_fine:.2e} (> 1e-4), finest alone {interp_finest:.2e}"
        ),
    )
}

/// Smallest compression ratio whose L2 error stays within `target`, by
/// bisection on the threshold.
fn cr_at_error(enc: &Encoder, target: f64) -> Result<f64> {
    let (mut lo, mut hi) = (0.0, enc.max_detail_magnitude() * (1.0 + 1e-12));
    let (_, top) = enc.encode(hi)?;
    if top.l2_error <= target {
        return Ok(top.cr);
    }
    let mut best = enc.encode(lo)?.1.cr;
    for _ in 0..codec::MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        let (_, rep) = enc.encode(mid)?;
        if rep.l2_error <= target {
            best = rep.cr;
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(best)
}

fn order_vs_compression() -> Outcome {
    let n = 257;
    let smooth = |q: usize| {
        TensorArray::from_fn(vec![n, n], q, |x| (-20.0 * ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2))).exp())
    };
    let kinked = |q: usize| {
        TensorArray::from_fn(vec![n, n], q, |x| (x[0] - 1.0 / 3.0).abs() + 0.5 * (x[1] - 0.6).abs() + 0.25 * (x[0] + x[1]))
    };
    let cr = |data: TensorArray, q: usize, target: f64| -> Result<f64> {
        let enc = Encoder::new(&data, CodecConfig::new(ProjectorKind::Cg, q))?;
        cr_at_error(&enc, target)
    };
    let s1 = cr(smooth(1).map_err(fail)?, 1, 1e-6).map_err(fail)?;
    let s4 = cr(smooth(4).map_err(fail)?, 4, 1e-6).map_err(fail)?;
    let k1 = cr(kinked(1).map_err(fail)?, 1, 1e-3).map_err(fail)?;
    let k4 = cr(kinked(4).map_err(fail)?, 4, 1e-3).map_err(fail)?;
    ensure(
        s4 < s1 && k1 <= k4,
        format!("gaussian at 1e-6: q=4 {s4:.4} < q=1 {s1:.4}; kinked at 1e-3: q=1 {k1:.4} <= q=4 {k4:.4}"),
    )
}

/// Value at `x` of the level-`level` nodal function with values `v`.
fn eval_nodal(q: usize, level: usize, v: &[f64], x: f64) -> f64 {
    let elements = 1usize << level;
    let e = ((x * elements as f64) as usize).min(elements - 1);
    if q == 0 {
        return v[e];
    }
    let len = 1.0 / elements as f64;
    let nodes: Vec<f64> = (0..=q).map(|r| e as f64 * len + r as f64 * len / q as f64).collect();
    (0..=q).map(|r| v[e * q + r] * cardinal(&nodes, r, x)).sum()
}

/// Quadrature points of the level-`level` elements, `points` per element.
fn element_rules(level: usize, points: usize) -> Vec<Vec<(f64, f64)>> {
    let len = 1.0 / (1u64 << level) as f64;
    (0..1usize << level)
        .map(|e| gauss_legendre_on(points, e as f64 * len, (e + 1) as f64 * len))
        .collect()
}

/// Local L2 projection onto degree-`q` polynomials of element `e` of
/// level `level`, as nodal values at the element nodes.
fn local_projection(q: usize, level: usize, e: usize, f: &dyn Fn(f64) -> f64, fine_level: usize) -> Vec<f64> {
    let len = 1.0 / (1u64 << level) as f64;
    let nodes: Vec<f64> = if q == 0 {
        vec![e as f64 * len]
    } else {
        (0..=q).map(|r| e as f64 * len + r as f64 * len / q as f64).collect()
    };
    let basis = |r: usize, x: f64| if q == 0 { 1.0 } else { cardinal(&nodes, r, x) };
    // integrate piece by piece over the fine elements inside e
    let pieces = 1usize << (fine_level - level);
    let rule: Vec<(f64, f64)> = (0..pieces)
        .flat_map(|p| {
            let a = e as f64 * len + p as f64 * len / pieces as f64;
            gauss_legendre_on(q + 2, a, a + len / pieces as f64)
        })
        .collect();
    let m = q + 1;
    let mut mass = DMatrix::<f64>::zeros(m, m);
    let mut rhs = DVector::<f64>::zeros(m);
    for &(x, w) in &rule {
        let fx = f(x);
        for a in 0..m {
            let pa = basis(a, x);
            rhs[a] += w * fx * pa;
            for b in 0..m {
                mass[(a, b)] += w * pa * basis(b, x);
            }
        }
    }
    mass.lu().solve(&rhs).expect("element mass matrix is nonsingular").iter().copied().collect()
}

/// Global L2 projection of a level-`fine` nodal function onto `V_level`.
fn cg_projection(q: usize, level: usize, fine: usize, v: &[f64]) -> Vec<f64> {
    let n = grid::node_count(q, level);
    let mut mass = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    let rules = element_rules(fine, q + 2);
    let coarse_elems = 1usize << level;
    for rule in &rules {
        for &(x, w) in rule {
            let e = ((x * coarse_elems as f64) as usize).min(coarse_elems - 1);
            let len = 1.0 / coarse_elems as f64;
            let fx = eval_nodal(q, fine, v, x);
            let nodes: Vec<f64> = (0..=q).map(|r| e as f64 * len + r as f64 * len / q as f64).collect();
            let idx: Vec<usize> = (0..=q).map(|r| e * q + r).collect();
            let vals: Vec<f64> = (0..=q).map(|r| cardinal(&nodes, r, x)).collect();
            for (a, &ia) in idx.iter().enumerate() {
                rhs[ia] += w * fx * vals[a];
                for (b, &ib) in idx.iter().enumerate() {
                    mass[(ia, ib)] += w * vals[a] * vals[b];
                }
            }
        }
    }
    mass.lu().solve(&rhs).expect("mass matrix is nonsingular").iter().copied().collect()
}

/// One level of element-wise projection followed by nodal averaging.
fn dg_projection_step(q: usize, level: usize, v: &[f64]) -> Vec<f64> {
    let f = |x: f64| eval_nodal(q, level + 1, v, x);
    let elements = 1usize << level;
    if q == 0 {
        return (0..elements).map(|e| local_projection(0, level, e, &f, level + 1)[0]).collect();
    }
    let mut out = vec![0.0; grid::node_count(q, level)];
    let mut count = vec![0.0; out.len()];
    for e in 0..elements {
        for (r, c) in local_projection(q, level, e, &f, level + 1).into_iter().enumerate() {
            out[e * q + r] += c;
            count[e * q + r] += 1.0;
        }
    }
    out.iter().zip(&count).map(|(v, c)| v / c).collect()
}

fn projection_consistency() -> Outcome {
    let mut r = rng(8);
    let levels = 5;
    let mut worst_cg = 0.0f64;
    let mut worst_dg = 0.0f64;
    for q in 1..=3 {
        let cg = TransformPlan::new(ProjectorKind::Cg, q, levels).map_err(fail)?;
        let dg = TransformPlan::new(ProjectorKind::Dg, q, levels).map_err(fail)?;
        let v = random_vec(&mut r, cg.len());
        for j in 0..=3 {
            let mut a_cg = v.clone();
            let mut a_dg = v.clone();
            for l in (j..levels).rev() {
                a_cg = forward_level(cg.level(l), &a_cg).map_err(fail)?.0;
                a_dg = forward_level(dg.level(l), &a_dg).map_err(fail)?.0;
            }
            let oracle = cg_projection(q, j, levels, &v);
            worst_cg = worst_cg.max(max_diff(&a_cg, &oracle) / max_abs(&oracle));
            let mut oracle = v.clone();
            for l in (j..levels).rev() {
                oracle = dg_projection_step(q, l, &oracle);
            }
            worst_dg = worst_dg.max(max_diff(&a_dg, &oracle) / max_abs(&oracle));
        }
    }
    ensure(
        worst_cg <= 1e-8 && worst_dg <= 1e-8,
        format!("cg vs global projection {worst_cg:.2e}, dg vs averaged element projections {worst_dg:.2e} (limit 1e-8)"),
    )
}

fn compact_support() -> Outcome {
    let mut dg_outside = 0.0f64;
    let mut dg_neighbor_min = f64::INFINITY;
    let mut cg_outside_min = f64::INFINITY;
    for q in 1..=3 {
        for j in 1..=2 {
            let depth = j + 4;
            let per_elem = q << (depth - j);
            for kind in [ProjectorKind::Dg, ProjectorKind::Cg] {
                let plan = TransformPlan::new(kind, q, depth).map_err(fail)?;
                for k in 0..plan.level(j).surplus_len() {
                    let psi = basis::primal_wavelet(&plan, j, k, depth).map_err(fail)?;
                    let elem = k / q;
                    let lo = elem.saturating_sub(1) * per_elem;
                    let hi = ((elem + 2) * per_elem).min(psi.len() - 1);
                    let outside = psi
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| *i < lo || *i > hi)
                        .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
                    if kind == ProjectorKind::Dg {
                        dg_outside = dg_outside.max(outside);
                        let own = (elem * per_elem, (elem + 1) * per_elem);
                        let neighbor = psi
                            .iter()
                            .enumerate()
                            .filter(|(i, _)| (*i >= lo && *i < own.0) || (*i > own.1 && *i <= hi))
                            .fold(0.0f64, |m, (_, v)| m.max(v.abs()));
                        dg_neighbor_min = dg_neighbor_min.min(neighbor);
                    } else if lo > 0 || hi < psi.len() - 1 {
                        cg_outside_min = cg_outside_min.min(outside);
                    }
                }
            }
        }
    }
    ensure(
        dg_outside == 0.0 && cg_outside_min > 1e-8,
        format!(
            "dg max outside element and neighbours {dg_outside:.1e}, dg min on neighbours {dg_neighbor_min:.2e}; cg min of max outside {cg_outside_min:.2e} (> 1e-8)"
        ),
    )
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let mx = lx.iter().sum::<f64>() / lx.len() as f64;
    let my = ly.iter().sum::<f64>() / ly.len() as f64;
    let cov: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    cov / var
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

fn update_build_cost() -> Outcome {
    let q = 1;
    let mut sizes = Vec::new();
    let mut cg_times = Vec::new();
    let mut dg_times = Vec::new();
    let mut sink = 0.0;
    for levels in 10..=16 {
        let level = levels - 1;
        sizes.push(grid::node_count(q, levels) as f64);
        // factor the Gram system and form every column of the dense CG update
        let start = Instant::now();
        let u = update::build_update(ProjectorKind::Cg, q, level).map_err(fail)?;
        let mut e = vec![0.0; u.cols()];
        let mut col = vec![0.0; u.rows()];
        for k in 0..u.cols() {
            e[k] = 1.0;
            col.iter_mut().for_each(|c| *c = 0.0);
            u.apply_scaled(&e, 1.0, &mut col);
            sink += col[k / 2];
            e[k] = 0.0;
        }
        cg_times.push(start.elapsed().as_secs_f64());
        let reps: Vec<f64> = (0..301)
            .map(|_| {
                let start = Instant::now();
                let u = update::build_update(ProjectorKind::Dg, q, level).expect("dg update builds");
                sink += u.rows() as f64;
                start.elapsed().as_secs_f64()
            })
            .collect();
        dg_times.push(reps.into_iter().fold(f64::INFINITY, f64::min));
    }
    let cg = slope(&sizes, &cg_times);
    let dg = slope(&sizes, &dg_times);
    std::hint::black_box(sink);
    ensure(
        cg > 1.05 && dg.abs() < 0.25,
        format!("log-log slope over N = 2^10..2^16: dense cg update {cg:.2} (> 1.05), dg update {dg:.2} (|.| < 0.25)"),
    )
}

fn haar_codec_exactness() -> Outcome {
    let mut r = rng(11);
    let n = 1 << 12;
    let data = TensorArray::new(vec![n], random_vec(&mut r, n)).map_err(fail)?;
    let mut worst = 0.0f64;
    for kind in [ProjectorKind::Cg, ProjectorKind::Dg] {
        let enc = Encoder::new(&data, CodecConfig::new(kind, 0)).map_err(fail)?;
        let tau = median(enc.weighted_magnitudes().to_vec());
        let (blob, report) = enc.encode(tau).map_err(fail)?;
        let dropped: f64 = enc
            .weighted_magnitudes()
            .iter()
            .zip(&blob.retained)
            .filter(|(_, &k)| !k)
            .map(|(w, _)| w * w)
            .sum();
        worst = worst.max((report.l2_error.powi(2) - dropped).abs());
    }
    ensure(worst <= 1e-12, format!("|error^2 - dropped energy| = {worst:.2e} (limit 1e-12)"))
}

fn blob_round_trip() -> Outcome {
    let mut r = rng(12);
    let shape = vec![33, 17];
    let data = TensorArray::new(shape, random_vec(&mut r, 33 * 17)).map_err(fail)?;
    let mut ok = true;
    for ordering in [Ordering::Mallat, Ordering::Separable] {
        let cfg = CodecConfig::new(ProjectorKind::Dg, 2).with_ordering(ordering).with_threshold(0.05);
        let (blob, _) = codec::compress(&data, cfg).map_err(fail)?;
        let bytes = blob.to_bytes();
        let back = CompressedBlob::from_bytes(&bytes).map_err(fail)?;
        let same_pyramid = back
            .coefficients()
            .iter()
            .zip(&blob.coefficients())
            .all(|(a, b)| a.to_bits() == b.to_bits());
        ok &= back == blob && back.to_bytes() == bytes && same_pyramid;
    }
    let golden = CompressedBlob::from_bytes(GOLDEN_BLOB).map_err(fail)?;
    let decoded = codec::decompress(&golden).map_err(fail)?;
    let bytes: Vec<u8> = decoded.data().iter().flat_map(|v| v.to_le_bytes()).collect();
    let golden_ok = bytes == GOLDEN_DECODED && golden.to_bytes() == GOLDEN_BLOB;
    ensure(
        ok && golden_ok,
        format!("in-memory round trip bit-exact: {ok}; golden fixture decodes bit-exactly: {golden_ok}"),
    )
}

/// Inputs of the committed golden fixture.
pub fn golden_fixture_input() -> Result<(TensorArray, CodecConfig)> {
    let q = 2;
    let data = TensorArray::from_fn(vec![9, 17], q, |x| {
        (3.0 * x[0]).sin() * (1.0 + x[1] * x[1]) + (x[0] - 0.4).abs() * (x[1] - 0.7).abs()
    })?;
    Ok((data, CodecConfig::new(ProjectorKind::Cg, q).with_threshold(1e-3)))
}

/// Helper for round-trip checks on plain pyramids.
pub fn pyramid_bits(p: &CoefficientPyramid) -> Vec<u64> {
    p.to_flat().iter().map(|v| v.to_bits()).collect()
}
