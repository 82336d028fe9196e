//! Forward and inverse 1D transform with each projector.
//!
//! cargo run --example lifting_1d

use polylift::{ProjectorKind, TransformPlan};

fn main() -> polylift::Result<()> {
    let q = 2;
    let levels = 5;
    for kind in ProjectorKind::ALL {
        let plan = TransformPlan::new(kind, q, levels)?;
        let h = 1.0 / (plan.len() - 1) as f64;
        let data: Vec<f64> = (0..plan.len()).map(|i| (4.0 * i as f64 * h).exp().sin()).collect();
        let pyramid = plan.forward(&data)?;
        let back = plan.inverse(&pyramid)?;
        let err = back.iter().zip(&data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        println!("{kind:>6}: {} samples, coarse block {:?}", plan.len(), pyramid.alpha0);
        for (j, beta) in pyramid.betas.iter().enumerate() {
            let peak = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
            println!("        level {j}: {:>3} details, max |beta| {peak:.3e}", beta.len());
        }
        println!("        reconstruction error {err:.1e}");
    }
    Ok(())
}
