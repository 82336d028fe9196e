//! Compression ratio against L2 error for several orders and projectors.
//!
//! cargo run --example rate_distortion > rd.csv

use polylift::codec::{self, CodecConfig};
use polylift::{grid, ProjectorKind, TensorArray};

fn main() -> polylift::Result<()> {
    let thresholds: Vec<f64> = (0..12).map(|i| 10f64.powf(-1.0 - 0.5 * i as f64)).collect();
    println!("kind,order,threshold,cr,l2_error");
    for kind in ProjectorKind::ALL {
        for q in [1, 2, 4] {
            let n = grid::node_count(q, 6);
            let data = TensorArray::from_fn(vec![n, n], q, |x| (6.0 * x[0] * x[1]).sin() + x[0].powi(3))?;
            for r in codec::rd_sweep(&data, CodecConfig::new(kind, q), &thresholds)? {
                println!("{kind},{q},{:e},{},{:e}", r.threshold, r.cr, r.l2_error);
            }
        }
    }
    Ok(())
}
