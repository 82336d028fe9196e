//! Threshold compression of a 2D field, by threshold and by error target.
//!
//! cargo run --example compress_field

use polylift::codec::{self, CodecConfig, CompressedBlob, Encoder};
use polylift::{ProjectorKind, TensorArray};

fn main() -> polylift::Result<()> {
    let q = 3;
    let n = 193;
    let data = TensorArray::from_fn(vec![n, n], q, |x| {
        (-30.0 * ((x[0] - 0.3).powi(2) + (x[1] - 0.6).powi(2))).exp() + 0.2 * (x[0] - 0.7).abs()
    })?;
    let cfg = CodecConfig::new(ProjectorKind::Cg, q).with_threshold(1e-5);
    let (blob, report) = codec::compress(&data, cfg)?;
    let bytes = blob.to_bytes();
    println!("threshold 1e-5: cr {:.4}, L2 {:.3e}, Linf {:.3e}, {} bytes", report.cr, report.l2_error, report.linf_error, bytes.len());
    let restored = codec::decompress(&CompressedBlob::from_bytes(&bytes)?)?;
    println!("decoded shape {:?}", restored.shape());

    let encoder = Encoder::new(&data, cfg)?;
    for target in [1e-3, 1e-4, 1e-5] {
        let t = encoder.target_l2(target)?;
        println!(
            "target {target:.0e}: cr {:.4}, L2 {:.3e}, threshold {:.3e}, converged {} after {} steps",
            t.report.cr, t.report.l2_error, t.report.threshold, t.converged, t.iterations
        );
    }
    Ok(())
}
