//! Runs the built-in acceptance checks and prints one line per check.
//!
//! cargo run --release --example selftest

fn main() {
    let results = polylift::selftest::run_all();
    for r in &results {
        println!("{}", r.line());
    }
    let passed = results.iter().filter(|r| r.passed).count();
    println!("{passed} of {} checks passed", results.len());
}
