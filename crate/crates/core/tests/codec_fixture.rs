//! Golden blob fixture and format edge cases.

use polylift::codec::{self, CompressedBlob};
use polylift::selftest::{golden_fixture_input, GOLDEN_BLOB, GOLDEN_DECODED};

#[test]
fn golden_blob_is_reproduced() {
    let (data, cfg) = golden_fixture_input().unwrap();
    let (blob, _) = codec::compress(&data, cfg).unwrap();
    assert_eq!(blob.to_bytes(), GOLDEN_BLOB);
}

#[test]
fn golden_blob_decodes_identically() {
    let decoded = codec::decompress_bytes(GOLDEN_BLOB).unwrap();
    assert_eq!(decoded.shape(), &[9, 17]);
    let bytes: Vec<u8> = decoded.data().iter().flat_map(|v| v.to_le_bytes()).collect();
    assert_eq!(bytes, GOLDEN_DECODED);
}

#[test]
fn golden_header_fields() {
    let blob = CompressedBlob::from_bytes(GOLDEN_BLOB).unwrap();
    let h = &blob.header;
    assert_eq!(h.shape, vec![9, 17]);
    assert_eq!(h.order, 2);
    assert_eq!(h.levels, vec![2, 3]);
    assert_eq!(h.threshold, 1e-3);
    assert_eq!(blob.retained.len(), 153);
}

#[test]
fn every_truncation_is_rejected() {
    for cut in 0..GOLDEN_BLOB.len() {
        assert!(CompressedBlob::from_bytes(&GOLDEN_BLOB[..cut]).is_err(), "cut at {cut}");
    }
}
