//! Best annealed energies across segment counts: unknot runs track the
//! regular n-gon closed form 2 n tan(pi/n) and decrease toward 2 pi;
//! trefoil runs report best-of-seeds ropelength with class-preserving
//! move logs. Heuristic evidence, no optimality certificates.
//!
//!     cargo run --release --example minimizer_trend

use knotforge::experiments::{minimizer_trend, TrendKnot};
use knotforge::minimize::Objective;

fn main() {
    let report = minimizer_trend(
        TrendKnot::Unknot,
        Objective::InverseThickness,
        &[8, 16, 32],
        &[1, 2],
        30_000,
    )
    .unwrap();
    println!("unknot, inverse thickness (ropelength = energy at unit length):");
    println!("{:>6} {:>14} {:>14}", "n", "best found", "2 n tan(pi/n)");
    for &(n, best) in &report.best_per_n {
        let closed_form = 2.0 * n as f64 * (std::f64::consts::PI / n as f64).tan();
        println!("{n:>6} {best:>14.6} {closed_form:>14.6}");
    }
    println!("limit for round circles: 2 pi = {:.6}\n", 2.0 * std::f64::consts::PI);

    let trefoil = minimizer_trend(
        TrendKnot::Trefoil,
        Objective::InverseThickness,
        &[24],
        &[1, 2, 3],
        20_000,
    )
    .unwrap();
    println!("trefoil, 24 segments, 3 seeds:");
    for row in &trefoil.rows {
        println!(
            "  seed {}: ropelength {:.4} ({} accepted, {} crossing-rejected)",
            row.seed, row.best_energy, row.accepted, row.crossing_rejected
        );
    }
}
