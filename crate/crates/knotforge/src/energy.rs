//! The discrete energies: Möbius, minimum distance and integral Menger
//! curvature. Discrete thickness lives in [`crate::thickness`].
//!
//! All three sums accumulate their term multiset through
//! [`crate::numeric::canonical_sum`], which together with canonical
//! sub-computations makes the values bitwise invariant under cyclic shifts
//! and orientation reversal of the vertex list.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geom::{menger_kappa, regular_ngon, PolygonalKnot};
use crate::numeric::canonical_sum;
use crate::segment::segment_distance_canonical;

/// Product of two factors in sorted order; multiplication commutes but does
/// not associate, so products of role-swappable factors go through here to
/// stay relabel-exact.
fn product2(a: f64, b: f64) -> f64 {
    if a.total_cmp(&b) == std::cmp::Ordering::Greater {
        b * a
    } else {
        a * b
    }
}

fn product3(a: f64, b: f64, c: f64) -> f64 {
    let mut f = [a, b, c];
    f.sort_unstable_by(f64::total_cmp);
    (f[0] * f[1]) * f[2]
}

/// Energy value with per-term diagnostics.
///
/// `witness` is the index tuple realizing the extreme term: the closest
/// non-adjacent vertex pair (Möbius), the closest non-adjacent segment pair
/// (minimum distance), the triple of minimal circumradius (Menger), or the
/// vertex / segment pair deciding the thickness. Ties break to the lowest
/// index tuple. `degenerate` is set exactly when the value is `+inf`
/// (Möbius, Menger) or `0` by the coincident-vertex rule (thickness).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub value: f64,
    pub witness: Option<Vec<usize>>,
    pub degenerate: bool,
    pub term_count: usize,
}

pub(crate) fn ser_extended<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if *v == f64::INFINITY {
        s.serialize_str("inf")
    } else if *v == f64::NEG_INFINITY {
        s.serialize_str("-inf")
    } else {
        s.serialize_str("nan")
    }
}

pub(crate) fn de_extended<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    struct ExtVisitor;
    impl serde::de::Visitor<'_> for ExtVisitor {
        type Value = f64;
        fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
            f.write_str("a float or one of \"inf\", \"-inf\", \"nan\"")
        }
        fn visit_f64<E>(self, v: f64) -> Result<f64, E> {
            Ok(v)
        }
        fn visit_u64<E>(self, v: u64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_i64<E>(self, v: i64) -> Result<f64, E> {
            Ok(v as f64)
        }
        fn visit_str<E: serde::de::Error>(self, v: &str) -> Result<f64, E> {
            match v {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(E::custom(format!("unknown extended float {other:?}"))),
            }
        }
    }
    d.deserialize_any(ExtVisitor)
}

/// Which energy to evaluate; used by reports, studies and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnergyKind {
    Moebius,
    MinDistance,
    Menger { s: f64 },
    Thickness,
}

impl EnergyKind {
    pub fn evaluate(&self, p: &PolygonalKnot) -> EnergyReport {
        match self {
            EnergyKind::Moebius => moebius_discrete(p),
            EnergyKind::MinDistance => min_distance_energy(p),
            EnergyKind::Menger { s } => menger_discrete(p, *s),
            EnergyKind::Thickness => crate::thickness::thickness_discrete(p),
        }
    }

    pub fn label(&self) -> String {
        match self {
            EnergyKind::Moebius => "moebius".into(),
            EnergyKind::MinDistance => "mindist".into(),
            EnergyKind::Menger { s } => format!("menger(s={s})"),
            EnergyKind::Thickness => "thickness".into(),
        }
    }
}

/// Discrete Möbius energy: over ordered vertex pairs i != j,
/// (1/|x_j - x_i|^2 - 1/d(a_j, a_i)^2) * w_i * w_j, where d is the
/// intrinsic metric on the circle of circumference L and the weights are
/// the intrinsic lengths of the edges following i and j.
///
/// The following-edge weights make the raw double sum orientation-sensitive
/// away from the equilateral class, so the sum is evaluated in a canonical
/// orientation of the vertex list (the two agree on equilateral polygons,
/// where the convergence and minimality statements live). Chord length
/// never exceeds intrinsic distance, so every summand is nonnegative;
/// roundoff-scale negatives on adjacent terms are clamped to zero.
/// Coincident non-consecutive vertices give `+inf` with the degenerate
/// flag set.
pub fn moebius_discrete(p: &PolygonalKnot) -> EnergyReport {
    let n = p.num_vertices();
    if let Some((i, j)) = p.coincident_vertex_pair() {
        return EnergyReport {
            value: f64::INFINITY,
            witness: Some(vec![i, j]),
            degenerate: true,
            term_count: 0,
        };
    }

    // Canonical orientation: start at the lexicographically smallest vertex
    // and run toward its smaller neighbor.
    let start = (0..n)
        .min_by(|&a, &b| p.vertex(a).lex_cmp(p.vertex(b)))
        .unwrap();
    let reversed = p.vertex((start + 1) % n).lex_cmp(p.vertex((start + n - 1) % n))
        == std::cmp::Ordering::Greater;
    let q = p.relabeled(start, reversed);
    // Canonical index -> input index.
    let original = |k: usize| {
        if reversed {
            (start + n - k) % n
        } else {
            (start + k) % n
        }
    };

    let weights: Vec<f64> = (0..n).map(|i| q.intrinsic_distance(i, (i + 1) % n)).collect();

    let mut terms = Vec::with_capacity(n * (n - 1) / 2);
    let mut witness: Option<Vec<usize>> = None;
    let mut closest = f64::INFINITY;
    for i in 0..n {
        for j in (i + 1)..n {
            let chord2 = (q.vertex(j) - q.vertex(i)).norm_squared();
            let intrinsic = q.intrinsic_distance(i, j);
            let mut term = 1.0 / chord2 - 1.0 / (intrinsic * intrinsic);
            if term < 0.0 {
                // chord <= intrinsic distance up to the last ulp of the
                // cumulative arc sums.
                debug_assert!(term > -1e-9 / chord2, "summand {term} at ({i}, {j})");
                term = 0.0;
            }
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if !adjacent && chord2 <= closest {
                let mut pair = [original(i), original(j)];
                pair.sort_unstable();
                let pair = pair.to_vec();
                // Exact ties break to the lowest original index tuple.
                if chord2 < closest || witness.as_ref().is_none_or(|w| pair < *w) {
                    closest = chord2;
                    witness = Some(pair);
                }
            }
            // Ordered pairs (i, j) and (j, i) contribute equally.
            terms.push(2.0 * term * product2(weights[i], weights[j]));
        }
    }
    let term_count = terms.len() * 2;
    EnergyReport { value: canonical_sum(terms), witness, degenerate: false, term_count }
}

/// The unnormalized minimum distance sum: over ordered pairs of
/// non-adjacent segments, |X_i| |X_j| / dist(X_i, X_j)^2. Segments are
/// adjacent when they share a vertex. `+inf` when non-adjacent segments
/// touch.
pub fn min_distance_u(p: &PolygonalKnot) -> f64 {
    min_distance_terms(p).0
}

fn min_distance_terms(p: &PolygonalKnot) -> (f64, Option<Vec<usize>>, usize) {
    let n = p.num_vertices();
    let mut terms = Vec::new();
    let mut witness = None;
    let mut best = f64::INFINITY;
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue; // wraps around: shares vertex 0
            }
            let si = p.edge(i);
            let sj = p.edge(j);
            let dist = segment_distance_canonical(si, sj);
            if dist == 0.0 {
                return (f64::INFINITY, Some(vec![i, j]), 0);
            }
            if dist < best {
                best = dist;
                witness = Some(vec![i, j]);
            }
            terms.push(2.0 * product2(p.edge_length(i), p.edge_length(j)) / (dist * dist));
        }
    }
    let count = terms.len() * 2;
    (canonical_sum(terms), witness, count)
}

/// Minimum distance energy: the minimum distance sum of `p` minus that of
/// the regular n-gon with the same segment count. Scale invariant.
pub fn min_distance_energy(p: &PolygonalKnot) -> EnergyReport {
    let (u, witness, term_count) = min_distance_terms(p);
    if u.is_infinite() {
        return EnergyReport { value: u, witness, degenerate: true, term_count };
    }
    let gn = regular_ngon(p.num_vertices()).expect("polygon has >= 3 vertices");
    let value = u - min_distance_u(&gn);
    EnergyReport { value, witness, degenerate: false, term_count }
}

/// Discrete integral Menger curvature: over ordered triples of distinct
/// indices, kappa^s(x_i, x_j, x_k) times the product of the three vertex
/// weights (half the sum of the two adjacent edge lengths).
///
/// `+inf` when any two vertices of the polygon coincide; collinear triples
/// contribute zero. The sum is evaluated in the normalized form
/// kappa_max^s * sum (kappa/kappa_max)^s * w so large exponents neither
/// overflow nor underflow.
pub fn menger_discrete(p: &PolygonalKnot, s: f64) -> EnergyReport {
    assert!(s > 0.0, "exponent must be positive");
    let n = p.num_vertices();
    if let Some((i, j)) = p.coincident_vertex_pair() {
        return EnergyReport {
            value: f64::INFINITY,
            witness: Some(vec![i, j]),
            degenerate: true,
            term_count: 0,
        };
    }

    let weights: Vec<f64> = (0..n)
        .map(|i| 0.5 * (p.edge_length((i + n - 1) % n) + p.edge_length(i)))
        .collect();

    let (kappa_max, witness) = max_triple_kappa_witnessed(p);
    if kappa_max == 0.0 {
        let count = n * (n - 1) * (n - 2);
        return EnergyReport { value: 0.0, witness, degenerate: false, term_count: count };
    }

    let mut terms = Vec::with_capacity(n * (n - 1) * (n - 2) / 6);
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let kappa = menger_kappa(p.vertex(i), p.vertex(j), p.vertex(k));
                let w = product3(weights[i], weights[j], weights[k]);
                // Each unordered triple stands for its 6 orderings.
                terms.push(6.0 * (kappa / kappa_max).powf(s) * w);
            }
        }
    }
    let term_count = terms.len() * 6;
    let value = kappa_max.powf(s) * canonical_sum(terms);
    EnergyReport { value, witness, degenerate: false, term_count }
}

/// Largest Menger curvature over distinct-vertex triples, with the triple
/// of minimal circumradius as witness (lowest index tuple on ties). This
/// is the s -> infinity limit of `menger_discrete(p, s)^(1/s)` for
/// unit-length polygons.
pub fn max_triple_kappa(p: &PolygonalKnot) -> f64 {
    max_triple_kappa_witnessed(p).0
}

fn max_triple_kappa_witnessed(p: &PolygonalKnot) -> (f64, Option<Vec<usize>>) {
    let n = p.num_vertices();
    let mut best = 0.0;
    let mut witness = None;
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let kappa = menger_kappa(p.vertex(i), p.vertex(j), p.vertex(k));
                if kappa > best {
                    best = kappa;
                    witness = Some(vec![i, j, k]);
                }
            }
        }
    }
    (best, witness)
}

/// Closed form of the discrete Menger curvature of the regular n-gon of
/// total length 1: every vertex triple lies on the circumscribed circle,
/// so M = n(n-1)(n-2)/n^3 * (2 n sin(pi/n))^s.
pub fn menger_regular_ngon_closed_form(n: usize, s: f64) -> f64 {
    let nf = n as f64;
    let kappa = 2.0 * nf * (std::f64::consts::PI / nf).sin();
    nf * (nf - 1.0) * (nf - 2.0) / (nf * nf * nf) * kappa.powf(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{Point3, PolygonalKnot};

    const PI: f64 = std::f64::consts::PI;

    /// Discrete Möbius energy of the regular n-gon by an independent route:
    /// vertices on a circle of radius R = 1/(2 n sin(pi/n)), chords
    /// 2 R sin(pi k / n), arcs min(k, n-k)/n, all weights 1/n:
    /// E_n = n * sum_k [ sin^2(pi/n)/sin^2(pi k/n) - 1/min(k, n-k)^2 ].
    fn moebius_ngon_oracle(n: usize) -> f64 {
        let nf = n as f64;
        let mut sum = 0.0;
        for k in 1..n {
            let kf = k as f64;
            let chord_part = (PI / nf).sin().powi(2) / (PI * kf / nf).sin().powi(2);
            let arc_part = 1.0 / (kf.min(nf - kf)).powi(2);
            sum += chord_part - arc_part;
        }
        nf * sum
    }

    #[test]
    fn moebius_square_is_one() {
        let g4 = regular_ngon(4).unwrap();
        let report = moebius_discrete(&g4);
        assert!((report.value - 1.0).abs() < 1e-12, "E_4 = {}", report.value);
        assert!(!report.degenerate);
        assert_eq!(report.term_count, 12);
    }

    #[test]
    fn moebius_triangle_is_zero() {
        let g3 = regular_ngon(3).unwrap();
        assert_eq!(moebius_discrete(&g3).value, 0.0);
    }

    #[test]
    fn moebius_matches_ngon_oracle() {
        for n in [5, 6, 8, 12, 20, 32] {
            let gn = regular_ngon(n).unwrap();
            let got = moebius_discrete(&gn).value;
            let want = moebius_ngon_oracle(n);
            assert!(
                (got - want).abs() < 1e-12 * want.max(1.0),
                "n = {n}: {got} vs oracle {want}"
            );
        }
    }

    #[test]
    fn moebius_coincident_vertices_is_infinite() {
        let p = PolygonalKnot::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(1.0, 0.0, 0.0), // coincides with vertex 1
            Point3::new(-1.0, 0.5, 0.0),
        ])
        .unwrap();
        let report = moebius_discrete(&p);
        assert!(report.value.is_infinite());
        assert!(report.degenerate);
        assert_eq!(report.witness, Some(vec![1, 4]));
    }

    #[test]
    fn min_distance_square() {
        let g4 = regular_ngon(4).unwrap();
        assert!((min_distance_u(&g4) - 4.0).abs() < 1e-12);
        let report = min_distance_energy(&g4);
        assert_eq!(report.value, 0.0, "same code path on both sides");
    }

    #[test]
    fn min_distance_rectangle() {
        // 1/6 x 1/3 rectangle, perimeter 1: U = 2 (a²/b²) + 2 (b²/a²) = 8.5.
        let (a, b) = (1.0 / 6.0, 1.0 / 3.0);
        let rect = PolygonalKnot::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(a, 0.0, 0.0),
            Point3::new(a, b, 0.0),
            Point3::new(0.0, b, 0.0),
        ])
        .unwrap();
        assert!((min_distance_u(&rect) - 8.5).abs() < 1e-12);
        assert!((min_distance_energy(&rect).value - 4.5).abs() < 1e-12);
    }

    #[test]
    fn min_distance_triangle_is_empty_sum() {
        let g3 = regular_ngon(3).unwrap();
        assert_eq!(min_distance_u(&g3), 0.0);
        assert_eq!(min_distance_energy(&g3).value, 0.0);
    }

    #[test]
    fn min_distance_touching_segments_is_infinite() {
        // Pentagon whose far segments cross in the plane.
        let p = PolygonalKnot::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(1.0, 1.0, 0.0),
            Point3::new(0.5, -0.5, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ])
        .unwrap();
        let report = min_distance_energy(&p);
        assert!(report.value.is_infinite());
        assert!(report.degenerate);
    }

    #[test]
    fn menger_square_closed_form() {
        let g4 = regular_ngon(4).unwrap();
        let report = menger_discrete(&g4, 2.0);
        assert!((report.value - 12.0).abs() < 1e-12 * 12.0, "M = {}", report.value);
        assert_eq!(report.term_count, 24);
    }

    #[test]
    fn menger_matches_closed_form_for_all_small_ngons() {
        for n in 4..=32 {
            let gn = regular_ngon(n).unwrap();
            for s in [1.0, 2.0, 3.0, 6.0] {
                let got = menger_discrete(&gn, s).value;
                let want = menger_regular_ngon_closed_form(n, s);
                assert!(
                    (got - want).abs() <= 1e-12 * want,
                    "n = {n}, s = {s}: {got} vs {want}, rel {}",
                    ((got - want) / want).abs()
                );
            }
        }
    }

    #[test]
    fn menger_collinear_triples_contribute_zero() {
        // Planar zigzag with one exactly collinear triple (0, 1, 2).
        let p = PolygonalKnot::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(2.0, 0.0, 0.0),
            Point3::new(2.0, 1.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
        ])
        .unwrap();
        assert_eq!(menger_kappa(p.vertex(0), p.vertex(1), p.vertex(2)), 0.0);
        let report = menger_discrete(&p, 2.0);
        assert!(report.value.is_finite() && report.value > 0.0);
    }

    #[test]
    fn menger_coincident_vertices_is_infinite() {
        // Vertex 3 coincides with vertex 0; they are not consecutive, so
        // construction succeeds but the energy blows up.
        let p = PolygonalKnot::new(vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.5, 1.0, 0.0),
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(-0.5, -1.0, 0.0),
        ])
        .unwrap();
        let report = menger_discrete(&p, 2.0);
        assert!(report.value.is_infinite());
        assert!(report.degenerate);
    }

    #[test]
    fn menger_large_exponent_does_not_overflow() {
        let g6 = regular_ngon(6).unwrap();
        let m = menger_discrete(&g6, 256.0);
        assert!(m.value.is_finite());
        let kappa = 12.0 * (PI / 6.0).sin();
        let ratio = m.value.powf(1.0 / 256.0) / kappa;
        assert!(ratio <= 1.0 + 1e-12 && ratio > 0.98);
    }

    #[test]
    fn energies_are_relabel_exact() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let p = crate::geom::random_equilateral_polygon(8, 1.0, &mut rng);
        let e0 = moebius_discrete(&p).value;
        let u0 = min_distance_u(&p);
        let m0 = menger_discrete(&p, 2.0).value;
        for shift in 0..8 {
            for rev in [false, true] {
                let q = p.relabeled(shift, rev);
                assert_eq!(moebius_discrete(&q).value.to_bits(), e0.to_bits());
                assert_eq!(min_distance_u(&q).to_bits(), u0.to_bits());
                assert_eq!(menger_discrete(&q, 2.0).value.to_bits(), m0.to_bits());
            }
        }
    }

    #[test]
    fn energy_report_roundtrips_through_json() {
        let report = EnergyReport {
            value: f64::INFINITY,
            witness: Some(vec![1, 4]),
            degenerate: true,
            term_count: 0,
        };
        let text = serde_json::to_string(&report).unwrap();
        let back: EnergyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, report);
        let finite =
            EnergyReport { value: 1.25, witness: None, degenerate: false, term_count: 12 };
        let text = serde_json::to_string(&finite).unwrap();
        let back: EnergyReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, finite);
    }
}
