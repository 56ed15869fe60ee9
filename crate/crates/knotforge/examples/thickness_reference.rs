//! Smooth thickness by direct sampling (max curvature vs doubly critical
//! self distance) on three curves, plus the inscribed-polygon thickness
//! ladder on the circle.
//!
//!     cargo run --release --example thickness_reference

use knotforge::curves::{inscribe_equilateral, Circle, CurveProvider, Ellipse, TorusKnot};
use knotforge::reference::thickness_smooth;
use knotforge::thickness::thickness_discrete;

fn main() {
    let circle = Circle::unit();
    let ellipse = Ellipse::new(1.2, 1.0, 1.0);
    let trefoil = TorusKnot::new(2, 3).unwrap();

    let curves: [(&str, &dyn CurveProvider); 3] =
        [("circle", &circle), ("ellipse 1.2:1", &ellipse), ("trefoil (2,3)", &trefoil)];
    for (name, curve) in curves {
        let reference = thickness_smooth(curve, 4096).unwrap();
        println!(
            "{name:<14} thickness {:.8}  ropelength {:.4}",
            reference.value,
            curve.total_length() / reference.value
        );
    }

    println!("\ninscribed circle polygons: 1/thickness -> 2 pi = {:.8}", 2.0 * std::f64::consts::PI);
    for n in [16, 32, 64, 128, 256] {
        let poly = inscribe_equilateral(&circle, n, 1e-10).unwrap();
        let inverse = 1.0 / thickness_discrete(&poly).value;
        println!("  n = {n:<4} 1/thickness = {inverse:.8}");
    }
}
