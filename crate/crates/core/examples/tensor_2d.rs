//! Separable and Mallat tensor transforms of a 2D field.
//!
//! cargo run --example tensor_2d

use polylift::{Ordering, ProjectorKind, TensorArray, TensorTransform};

fn main() -> polylift::Result<()> {
    let q = 1;
    let shape = [33, 17];
    let data = TensorArray::from_fn(shape.to_vec(), q, |x| (3.0 * x[0]).cos() * (1.0 + x[1]))?;
    let t = TensorTransform::new(ProjectorKind::Dg, q, &shape)?;
    println!("levels per axis {:?}", t.axis_levels());
    for ordering in [Ordering::Mallat, Ordering::Separable] {
        let coeffs = t.forward(ordering, &data)?;
        let info = t.coefficient_info(ordering)?;
        let top = info.iter().map(|c| c.label).max().unwrap_or(0);
        println!("{ordering}:");
        for label in 0..=top {
            let energy: f64 = coeffs.iter().zip(&info).filter(|(_, c)| c.label == label).map(|(v, c)| (v * c.norm).powi(2)).sum();
            let count = info.iter().filter(|c| c.label == label).count();
            println!("  label {label}: {count:>4} coefficients, weighted energy {energy:.4e}");
        }
        let back = t.inverse(ordering, &coeffs)?;
        let err = back.data().iter().zip(data.data()).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        println!("  reconstruction error {err:.1e}");
    }
    Ok(())
}
