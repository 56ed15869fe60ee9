//! Anneal a perturbed regular 16-gon under inverse thickness: the polygon
//! returns to the regular shape, the unique thickness maximizer among
//! equilateral 16-gons.
//!
//!     cargo run --release --example anneal_unknot

use knotforge::minimize::{anneal, perturbed_ngon, MinimizeConfig, Objective};

fn main() {
    let n = 16;
    let p0 = perturbed_ngon(n, 5e-3, 42);
    let mut cfg = MinimizeConfig::new(Objective::InverseThickness, 100_000, 12345);
    cfg.initial_step = 0.02;
    cfg.cooling_factor = 0.93;
    cfg.temperature_initial = 0.1;

    let target = 1.0 / (2.0 * n as f64 * (std::f64::consts::PI / n as f64).tan());
    println!("regular {n}-gon thickness: {target:.8}");
    println!("initial thickness:        {:.8}", 1.0 / cfg.objective.value(&p0));

    let run = anneal(&p0, &cfg).unwrap();
    let final_thickness = 1.0 / run.final_energy;
    println!("annealed thickness:       {final_thickness:.8}");
    println!(
        "relative gap {:.3e} after {} iterations ({} accepted, {} rejected, {} crossing-rejected)",
        (final_thickness - target).abs() / target,
        cfg.iterations,
        run.accepted,
        run.rejected,
        run.crossing_rejected
    );
    if let Some(at) = run.stagnated_at {
        println!("acceptance went quiet at iteration {at}");
    }
}
