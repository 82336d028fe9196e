//! Regenerates the golden codec fixture under `tests/fixtures/`.
//!
//! cargo run --example golden_fixture

use std::fs;
use std::path::Path;

use polylift::codec;
use polylift::selftest::golden_fixture_input;

fn main() -> polylift::Result<()> {
    let (data, cfg) = golden_fixture_input()?;
    let (blob, report) = codec::compress(&data, cfg)?;
    let decoded = codec::decompress(&blob)?;
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    fs::write(dir.join("golden.pwav"), blob.to_bytes())?;
    let raw: Vec<u8> = decoded.data().iter().flat_map(|v| v.to_le_bytes()).collect();
    fs::write(dir.join("golden_decoded.f64"), raw)?;
    println!("kept {} of {} coefficients, cr {:.4}, l2 error {:.3e}", blob.retained_count(), data.len(), report.cr, report.l2_error);
    Ok(())
}
