//! The regular hexagon uniquely minimizes both the discrete Möbius energy
//! and inverse thickness among closed equilateral hexagons: random samples
//! always land strictly above it.
//!
//!     cargo run --release --example ngon_minimality

use knotforge::energy::moebius_discrete;
use knotforge::geom::{random_equilateral_polygon, regular_ngon};
use knotforge::shape::shape_distance;
use knotforge::thickness::thickness_discrete;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let g6 = regular_ngon(6).unwrap();
    let e_min = moebius_discrete(&g6).value;
    let inv_t_min = 1.0 / thickness_discrete(&g6).value;
    println!("regular hexagon: Möbius {e_min:.6}, 1/thickness {inv_t_min:.6}");

    let mut rng = ChaCha8Rng::seed_from_u64(600);
    let mut smallest_e_margin = f64::INFINITY;
    let mut smallest_t_margin = f64::INFINITY;
    let mut closest_shape = f64::INFINITY;
    for _ in 0..500 {
        let sample = random_equilateral_polygon(6, 1.0, &mut rng);
        let e = moebius_discrete(&sample).value;
        let t = thickness_discrete(&sample).value;
        let inv_t = if t == 0.0 { f64::INFINITY } else { 1.0 / t };
        smallest_e_margin = smallest_e_margin.min(e - e_min);
        smallest_t_margin = smallest_t_margin.min(inv_t - inv_t_min);
        closest_shape = closest_shape.min(shape_distance(&sample, &g6));
    }
    println!("500 random equilateral hexagons:");
    println!("  smallest Möbius margin over the minimum:      {smallest_e_margin:.6}");
    println!("  smallest 1/thickness margin over the minimum: {smallest_t_margin:.6}");
    println!("  closest shape distance to the hexagon:        {closest_shape:.6}");
}
