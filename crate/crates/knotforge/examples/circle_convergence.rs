//! Möbius energies of polygons inscribed in the circle converge to 4 at
//! first order in 1/n.
//!
//!     cargo run --release --example circle_convergence

use knotforge::curves::Circle;
use knotforge::energy::EnergyKind;
use knotforge::experiments::convergence_study;
use knotforge::reference::ReferenceValue;

fn main() {
    let circle = Circle::unit();
    let ns = [32, 64, 128, 256, 512];
    let study = convergence_study(
        &circle,
        "circle",
        EnergyKind::Moebius,
        &ns,
        &ReferenceValue::circle_moebius(),
    )
    .unwrap();

    println!("{}", study.to_csv());
    match study.order {
        Some(order) => println!(
            "fitted order of convergence: {order:.4} (rms residual {:.2e})",
            study.fit_residual.unwrap()
        ),
        None => println!("errors at the precision floor; no slope fitted"),
    }
}
