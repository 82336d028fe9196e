//! Prediction stencils, element Gram blocks and update matrices.
//!
//! cargo run --example stencils_and_updates

use polylift::gram;
use polylift::predictor;
use polylift::update::{build_update, ProjectorKind};

fn print_rows(name: &str, m: &polylift::DenseMatrix) {
    println!("{name}:");
    for i in 0..m.rows() {
        let row: Vec<String> = m.row(i).iter().map(|v| format!("{v:9.5}")).collect();
        println!("  [{}]", row.join(" "));
    }
}

fn main() -> polylift::Result<()> {
    for q in 1..=3 {
        println!("== order {q}");
        print_rows("prediction stencil (surplus x coarse)", predictor::stencil_closed_form(q)?.matrix());
        let eg = gram::element_gram(q, gram::level_fine_spacing(q, 0))?;
        print_rows("element Gram G_dd", &eg.gdd);
        for kind in [ProjectorKind::Cg, ProjectorKind::Dg] {
            let u = build_update(kind, q, 1)?.to_dense();
            print_rows(&format!("{kind} update on level 1"), &u);
        }
    }
    Ok(())
}
