//! End-to-end runs of the `polylift` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polylift::codec::CompressedBlob;
use polylift::{Ordering, ProjectorKind, TensorArray, TensorTransform};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polylift")).args(args).output().unwrap()
}

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("polylift-cli-{}-{name}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_f64(path: &Path, v: &[f64]) {
    fs::write(path, v.iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>()).unwrap();
}

fn read_f64(path: &Path) -> Vec<f64> {
    fs::read(path).unwrap().chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn field() -> Vec<f64> {
    (0..33 * 17).map(|i| ((i * 7919) % 1013) as f64 / 1013.0 - 0.5).collect()
}

#[test]
fn lossless_round_trip() {
    let dir = workdir("lossless");
    let (input, blob, output) = (dir.join("in.f64"), dir.join("x.pwav"), dir.join("out.f64"));
    let data = field();
    write_f64(&input, &data);
    let out = bin(&["compress", "--input", s(&input), "--shape", "33x17", "--order", "2", "--kind", "dg", "--threshold", "0", "--output", s(&blob)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["cr"], 1.0);
    for key in ["l2_error", "linf_error", "per_level_retained", "threshold"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    // the stored coefficients are the forward transform, bit for bit
    let t = TensorTransform::new(ProjectorKind::Dg, 2, &[33, 17]).unwrap();
    let arr = TensorArray::new(vec![33, 17], data.clone()).unwrap();
    let coeffs = t.forward(Ordering::Mallat, &arr).unwrap();
    let stored = CompressedBlob::from_bytes(&fs::read(&blob).unwrap()).unwrap();
    assert!(stored.coefficients().iter().zip(&coeffs).all(|(a, b)| a.to_bits() == b.to_bits()));

    let out = bin(&["decompress", "--input", s(&blob), "--output", s(&output)]);
    assert!(out.status.success());
    let back = read_f64(&output);
    let err = back.iter().zip(&data).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
    assert!(err <= 1e-12, "{err}");

    let again = dir.join("again.f64");
    bin(&["decompress", "--input", s(&blob), "--output", s(&again)]);
    assert_eq!(fs::read(&output).unwrap(), fs::read(&again).unwrap());
}

#[test]
fn polynomial_field_keeps_only_coarse_block() {
    let dir = workdir("poly");
    let (input, blob, report) = (dir.join("in.f64"), dir.join("x.pwav"), dir.join("r.json"));
    let arr = TensorArray::from_fn(vec![65, 65], 2, |x| 1.0 + x[0] - 2.0 * x[0] * x[1] + x[1] * x[1]).unwrap();
    write_f64(&input, arr.data());
    let out = bin(&[
        "compress", "--input", s(&input), "--shape", "65,65", "--order", "2", "--kind", "cg",
        "--threshold", "1e-9", "--output", s(&blob), "--report", s(&report),
    ]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&fs::read(&report).unwrap()).unwrap();
    let cr = r["cr"].as_f64().unwrap();
    assert!((cr - 9.0 / (65.0 * 65.0)).abs() < 1e-12, "{cr}");
}

#[test]
fn target_l2_reports_search() {
    let dir = workdir("target");
    let (input, blob) = (dir.join("in.f64"), dir.join("x.pwav"));
    let arr = TensorArray::from_fn(vec![129], 1, |x| (9.0 * x[0]).sin()).unwrap();
    write_f64(&input, arr.data());
    let out = bin(&["compress", "--input", s(&input), "--shape", "129", "--target-l2", "1e-3", "--output", s(&blob)]);
    assert!(out.status.success());
    let r: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(r["target"]["iterations"].as_u64().unwrap() <= 40);
    assert!(r["l2_error"].as_f64().unwrap() <= 1.05e-3);
}

#[test]
fn analyze_writes_decay_csv_and_energy_table() {
    let dir = workdir("analyze");
    let (input, csv) = (dir.join("in.f64"), dir.join("d.csv"));
    write_f64(&input, &[2.5; 17]);
    let out = bin(&["analyze", "--input", s(&input), "--shape", "17", "--order", "1", "--csv", s(&csv)]);
    assert!(out.status.success());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rank,magnitude,level"));
    let above: Vec<&str> = lines
        .filter(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap() > 1e-12)
        .collect();
    assert_eq!(above.len(), 2, "constant field keeps the two coarse nodes");
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("level"));
}

#[test]
fn basis_exports_haar_wavelet() {
    let out = bin(&["basis", "--order", "0", "--kind", "dg", "--level", "0", "--depth", "2", "--which", "psi"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, "x,value\n0,-0.5\n0.25,-0.5\n0.5,0.5\n0.75,0.5\n");
}

#[test]
fn errors_map_to_exit_codes() {
    let dir = workdir("errors");
    let input = dir.join("in.f64");
    write_f64(&input, &field());
    let out = bin(&["compress", "--input", s(&input), "--shape", "32x17", "--output", s(&dir.join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("17") && msg.contains("33"), "{msg}");
    assert_eq!(msg.lines().count(), 1);

    let out = bin(&["compress", "--nope"]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(&["compress", "--input", s(&input), "--shape", "33x17", "--threshold", "-1", "--output", s(&dir.join("x"))]);
    assert_eq!(out.status.code(), Some(1));
    let out = bin(&["decompress", "--input", s(&input), "--output", s(&dir.join("y"))]);
    assert_eq!(out.status.code(), Some(2));

    let mut bad = field();
    bad[3] = f64::NAN;
    write_f64(&input, &bad);
    let out = bin(&["compress", "--input", s(&input), "--shape", "33x17", "--output", s(&dir.join("x"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(bin(&["--help"]).status.success());
}

#[test]
fn s_weighting_out_of_range_warns() {
    let dir = workdir("warn");
    let input = dir.join("in.f64");
    write_f64(&input, &field());
    let out = bin(&[
        "compress", "--input", s(&input), "--shape", "33x17", "--order", "1", "--weighting", "s", "--s", "2",
        "--threshold", "0.01", "--output", s(&dir.join("x")),
    ]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("warning:"));
}

#[test]
fn selftest_single_check() {
    let out = bin(&["selftest", "--only", "2"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));
}
