//! Primal and dual basis functions by the cascade algorithm, as CSV.
//!
//! cargo run --example basis_cascade > basis.csv

use polylift::basis::{self, BasisKind};
use polylift::{ProjectorKind, TransformPlan};

fn main() -> polylift::Result<()> {
    let (q, level, depth) = (2, 2, 9);
    println!("kind,projector,x,value");
    for kind in ProjectorKind::ALL {
        let plan = TransformPlan::new(kind, q, depth)?;
        for which in [BasisKind::PrimalScaling, BasisKind::PrimalWavelet, BasisKind::DualScaling, BasisKind::DualWavelet] {
            let k = if which.is_wavelet() { 3 } else { 4 };
            let sample = basis::sample(&plan, which, level, k, depth)?;
            for (x, v) in sample.points(q) {
                println!("{which},{kind},{x},{v}");
            }
        }
        let (phi, psi) = basis::basis_norms(&plan, level)?;
        eprintln!("{kind}: |phi_{level},4| = {:.5}, |psi_{level},3| = {:.5}", phi[4], psi[3]);
    }
    Ok(())
}
