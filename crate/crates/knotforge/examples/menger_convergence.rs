//! Discrete Menger curvature of inscribed equilateral polygons converges
//! to the smooth value (2 pi)^s on the circle; the extrapolated ladder
//! reference lands well inside the raw ladder error.
//!
//!     cargo run --release --example menger_convergence

use knotforge::curves::{inscribe_equilateral, Circle};
use knotforge::energy::menger_discrete;
use knotforge::reference::menger_smooth;

fn main() {
    let circle = Circle::unit();
    let s = 2.0;
    let want = (2.0 * std::f64::consts::PI).powf(s);

    println!("n,energy,reference,error");
    for n in [16, 32, 64, 128] {
        let poly = inscribe_equilateral(&circle, n, 1e-10).unwrap();
        let value = menger_discrete(&poly, s).value;
        println!("{n},{value:.12},{want:.12},{:.6e}", (value - want).abs());
    }

    let reference = menger_smooth(&circle, s, 128).unwrap();
    println!(
        "\nextrapolated from ladder {:?}: {:.10} (relative error {:.3e}, self-estimate {:.3e})",
        reference.n_used,
        reference.value,
        (reference.value - want).abs() / want,
        reference.estimated_error
    );
}
