//! Evaluate all four discrete energies on a regular hexagon and on the
//! committed 24-vertex trefoil.
//!
//!     cargo run --release --example compute_energies

use knotforge::energy::EnergyKind;
use knotforge::geom::regular_ngon;
use knotforge::minimize::standard_trefoil;
use knotforge::thickness::ropelength_discrete;

fn main() {
    let kinds = [
        EnergyKind::Moebius,
        EnergyKind::MinDistance,
        EnergyKind::Menger { s: 2.0 },
        EnergyKind::Thickness,
    ];

    for (name, polygon) in [
        ("regular hexagon".to_string(), regular_ngon(6).unwrap()),
        ("trefoil (24 vertices)".to_string(), standard_trefoil()),
    ] {
        println!("{name}: {} vertices, length {:.6}", polygon.num_vertices(), polygon.total_length());
        for kind in kinds {
            let report = kind.evaluate(&polygon);
            println!(
                "  {:<14} = {:<22.15} witness {:?} ({} terms)",
                kind.label(),
                report.value,
                report.witness,
                report.term_count
            );
        }
        println!("  ropelength     = {:.6}", ropelength_discrete(&polygon));
        println!();
    }
}
