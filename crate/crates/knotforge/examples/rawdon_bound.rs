//! The explicit error bound for the minimum distance energy of inscribed
//! polygons: |E - E_md,n| <= 290 Delta^{-1/4} n^{-1/4}, checked on the
//! circle (E = 4, Delta = 1/(2 pi)).
//!
//!     cargo run --release --example rawdon_bound

use knotforge::curves::Circle;
use knotforge::experiments::rawdon_bound_check;

fn main() {
    let circle = Circle::unit();
    let report = rawdon_bound_check(
        &circle,
        "circle",
        4.0,
        1.0 / (2.0 * std::f64::consts::PI),
        &[32, 64, 128, 256, 512],
    )
    .unwrap();

    println!("{:>6} {:>14} {:>14} {:>10}", "n", "actual error", "bound", "holds");
    for row in &report.rows {
        println!(
            "{:>6} {:>14.6} {:>14.6} {:>10}",
            row.n, row.actual_error, row.bound, row.holds
        );
    }
    match report.holds_from {
        Some(n) => println!("\nbound holds for every tested n >= {n}"),
        None => println!("\nbound fails somewhere in the tested range"),
    }
}
