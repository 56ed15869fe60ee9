//! For a fixed unit-length polygon the Menger power means
//! M_{s,n}(p)^(1/s) are nondecreasing in s and converge to the largest
//! curvature over vertex triples — the inverse-thickness limit at the
//! discrete level.
//!
//!     cargo run --release --example power_mean_limit

use knotforge::energy::{max_triple_kappa, menger_discrete};
use knotforge::geom::random_equilateral_polygon;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let p = random_equilateral_polygon(4, 1.0, &mut rng);
    let kappa_max = max_triple_kappa(&p);
    println!("random equilateral quadrilateral, max triple curvature {kappa_max:.8}");
    println!("{:>6} {:>18} {:>14}", "s", "M^(1/s)", "gap to max");
    for s in [2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0] {
        let mean = menger_discrete(&p, s).value.powf(1.0 / s);
        println!("{s:>6} {mean:>18.10} {:>14.3e}", (kappa_max - mean) / kappa_max);
    }
}
