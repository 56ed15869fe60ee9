//! Recovery sequences at desk scale: inscribed polygons converge to the
//! circle in the uniform norm while their energies converge to the smooth
//! reference, for the Möbius energy, Menger curvature and inverse
//! thickness.
//!
//!     cargo run --release --example gamma_recovery

use knotforge::curves::Circle;
use knotforge::energy::EnergyKind;
use knotforge::experiments::gamma_recovery;
use knotforge::reference::ReferenceValue;

fn main() {
    let circle = Circle::unit();
    let ns = [8, 16, 32, 64, 128];
    let cases = [
        (EnergyKind::Moebius, ReferenceValue::circle_moebius()),
        (EnergyKind::Menger { s: 2.0 }, ReferenceValue::circle_menger(2.0)),
        (
            EnergyKind::Thickness,
            ReferenceValue::closed_form(2.0 * std::f64::consts::PI),
        ),
    ];

    for (kind, reference) in cases {
        let report = gamma_recovery(&circle, "circle", kind, &ns, &reference).unwrap();
        println!("{} -> {:.6}", report.energy, report.reference);
        println!("{:>6} {:>16} {:>16}", "n", "uniform dist", "energy");
        for (i, &n) in report.ns.iter().enumerate() {
            println!(
                "{:>6} {:>16.3e} {:>16.8}",
                n, report.uniform_distances[i], report.energies[i]
            );
        }
        println!();
    }
}
