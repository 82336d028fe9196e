//! Sorted coefficient magnitudes of a 1D signal, as CSV.
//!
//! cargo run --example coefficient_decay > decay.csv

use std::f64::consts::PI;

use polylift::codec::{self, CodecConfig};
use polylift::{grid, ProjectorKind, TensorArray};

fn main() -> polylift::Result<()> {
    println!("kind,order,rank,magnitude,level");
    for q in [1, 2, 3] {
        let n = grid::node_count(q, 10);
        let data = TensorArray::from_fn(vec![n], q, |x| (2.0 * PI * x[0]).sin() + (11.0 * PI * x[0]).sin() / 3.0)?;
        for kind in ProjectorKind::ALL {
            for e in codec::coefficient_decay(&data, CodecConfig::new(kind, q))? {
                println!("{kind},{q},{},{:e},{}", e.rank, e.magnitude, e.level);
            }
        }
    }
    Ok(())
}
