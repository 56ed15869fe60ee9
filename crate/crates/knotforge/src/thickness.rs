//! Discrete thickness: vertex curvature, minRad, doubly critical self
//! distance and their minimum.
//!
//! Thickness of a polygon p is min(minRad(p), dcsd(p)/2), and 0 when two
//! vertices coincide. minRad is the smallest discrete radius of curvature
//! over the vertices; dcsd is the smallest distance among doubly critical
//! pairs: points on non-adjacent segments that each locally extremize the
//! squared distance to the other along the polygon.

use crate::energy::EnergyReport;
use crate::geom::{Point3, PolygonalKnot};

/// Tolerance (in segment parameter units) separating interior feet from
/// vertex cases, and slack on the one-sided extremality tests at vertices.
const PARAM_TOL: f64 = 1e-9;

/// Discrete curvature localized at vertex `y` with neighbors `x`, `z`:
/// 2 tan(phi/2) / ((|x-y| + |z-y|)/2), phi the exterior angle at `y`.
///
/// Straight vertices give 0; a fold-back (phi = pi) gives `+inf`.
pub fn discrete_kappa(x: Point3, y: Point3, z: Point3) -> f64 {
    let u = y - x;
    let v = z - y;
    let nu = u.norm();
    let nv = v.norm();
    assert!(nu > 0.0 && nv > 0.0, "neighbors must be distinct from the vertex");
    let cross = u.cross(v).norm();
    let denom = nu * nv + u.dot(v);
    if cross == 0.0 {
        return if u.dot(v) < 0.0 { f64::INFINITY } else { 0.0 };
    }
    if denom <= 0.0 {
        return f64::INFINITY;
    }
    // tan(phi/2) = |u x v| / (|u||v| + u.v)
    4.0 * (cross / denom) / (nu + nv)
}

/// Minimal discrete radius of curvature: min over vertices of 1/kappa_d.
/// `+inf` if every vertex is straight, 0 if any vertex folds back.
pub fn minrad(p: &PolygonalKnot) -> f64 {
    minrad_witnessed(p).0
}

fn minrad_witnessed(p: &PolygonalKnot) -> (f64, usize) {
    let n = p.num_vertices();
    let mut max_kappa = 0.0;
    let mut argmax = 0;
    for i in 0..n {
        let kappa = discrete_kappa(
            p.vertex((i + n - 1) % n),
            p.vertex(i),
            p.vertex((i + 1) % n),
        );
        if kappa > max_kappa {
            max_kappa = kappa;
            argmax = i;
        }
    }
    if max_kappa == 0.0 {
        (f64::INFINITY, argmax)
    } else {
        (1.0 / max_kappa, argmax)
    }
}

/// A point on the polygon: segment index and parameter in [0, 1] along it.
/// Vertices are reported on their outgoing segment with parameter 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SegmentPoint {
    pub segment: usize,
    pub param: f64,
    pub point: Point3,
}

/// A doubly critical pair: each point locally extremizes the squared
/// distance to the other along the polygon.
#[derive(Clone, Debug)]
pub struct CriticalPair {
    pub first: SegmentPoint,
    pub second: SegmentPoint,
    pub distance: f64,
}

/// Segment endpoints in lexicographic order plus whether they were flipped;
/// computing on the sorted representation keeps the floats independent of
/// the traversal direction of the vertex list.
fn canonical_segment(p: &PolygonalKnot, i: usize) -> (Point3, Point3, bool) {
    let (a, b) = p.edge(i);
    if a.lex_cmp(b) == std::cmp::Ordering::Greater {
        (b, a, true)
    } else {
        (a, b, false)
    }
}

fn orient_param(t: f64, flipped: bool) -> f64 {
    if flipped {
        1.0 - t
    } else {
        t
    }
}

/// Is vertex `k` a local extremizer of the squared distance to `other`
/// along the polygon? True when both one-sided derivatives share a sign
/// (local minimum or local maximum over both incident segments).
fn vertex_extremizes(p: &PolygonalKnot, k: usize, other: Point3) -> bool {
    let n = p.num_vertices();
    let v = p.vertex(k);
    let to_prev = p.vertex((k + n - 1) % n) - v;
    let to_next = p.vertex((k + 1) % n) - v;
    let d = v - other;
    let s_prev = to_prev.dot(d);
    let s_next = to_next.dot(d);
    let eps_prev = PARAM_TOL * to_prev.norm() * d.norm();
    let eps_next = PARAM_TOL * to_next.norm() * d.norm();
    (s_prev >= -eps_prev && s_next >= -eps_next) || (s_prev <= eps_prev && s_next <= eps_next)
}

/// All doubly critical pairs of `p` on non-adjacent segments.
///
/// Non-adjacency is read strictly: no segment containing one point may
/// share a vertex with a segment containing the other. Interior points
/// belong to one segment; a vertex belongs to both incident segments. A
/// parallel overlap produces a continuum of pairs sharing one distance;
/// the midpoint of the overlap is returned as its representative.
pub fn dcrit(p: &PolygonalKnot) -> Vec<CriticalPair> {
    let n = p.num_vertices();
    let mut pairs = Vec::new();

    // Interior-interior: both points are perpendicular feet of each other,
    // i.e. the unconstrained stationary point of the quadratic distance.
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            interior_interior(p, i, j, &mut pairs);
        }
    }

    // Vertex-interior: foot of the vertex on a far segment, with the
    // one-sided extremality conditions at the vertex.
    for k in 0..n {
        for b in 0..n {
            // b may not touch vertices k-1, k, k+1.
            let near = [(k + n - 2) % n, (k + n - 1) % n, k, (k + 1) % n];
            if near.contains(&b) {
                continue;
            }
            vertex_interior(p, k, b, &mut pairs);
        }
    }

    // Vertex-vertex: cyclic index distance >= 3, extremality at both ends.
    for i in 0..n {
        for j in (i + 1)..n {
            let gap = (j - i).min(n - (j - i));
            if gap < 3 {
                continue;
            }
            let (vi, vj) = (p.vertex(i), p.vertex(j));
            if vi == vj {
                continue;
            }
            if vertex_extremizes(p, i, vj) && vertex_extremizes(p, j, vi) {
                pairs.push(CriticalPair {
                    first: SegmentPoint { segment: i, param: 0.0, point: vi },
                    second: SegmentPoint { segment: j, param: 0.0, point: vj },
                    distance: vi.dist(vj),
                });
            }
        }
    }

    pairs.sort_by(|a, b| {
        (a.first.segment, a.second.segment)
            .cmp(&(b.first.segment, b.second.segment))
            .then(a.first.param.total_cmp(&b.first.param))
            .then(a.second.param.total_cmp(&b.second.param))
    });
    pairs
}

fn interior_interior(p: &PolygonalKnot, i: usize, j: usize, pairs: &mut Vec<CriticalPair>) {
    let (a1, a2, flip_a) = canonical_segment(p, i);
    let (b1, b2, flip_b) = canonical_segment(p, j);
    // Order the pair itself canonically as well.
    let swapped = match a1.lex_cmp(b1) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => a2.lex_cmp(b2) == std::cmp::Ordering::Greater,
        std::cmp::Ordering::Less => false,
    };
    let ((p1, p2), (q1, q2)) = if swapped { ((b1, b2), (a1, a2)) } else { ((a1, a2), (b1, b2)) };

    let da = p2 - p1;
    let db = q2 - q1;
    let r = p1 - q1;
    let a = da.norm_squared();
    let e = db.norm_squared();
    let b = da.dot(db);
    let c = da.dot(r);
    let f = db.dot(r);
    let denom = a * e - b * b;

    if denom > 1e-14 * a * e {
        // d/du = 0, d/dv = 0: the common perpendicular of the two lines.
        let u = (b * f - c * e) / denom;
        let v = (a * f - c * b) / denom;
        if u > PARAM_TOL && u < 1.0 - PARAM_TOL && v > PARAM_TOL && v < 1.0 - PARAM_TOL {
            let x = p1 + da * u;
            let y = q1 + db * v;
            let (ui, vj) = if swapped { (v, u) } else { (u, v) };
            pairs.push(CriticalPair {
                first: SegmentPoint {
                    segment: i,
                    param: orient_param(ui, flip_a),
                    point: if swapped { y } else { x },
                },
                second: SegmentPoint {
                    segment: j,
                    param: orient_param(vj, flip_b),
                    point: if swapped { x } else { y },
                },
                distance: x.dist(y),
            });
        }
        return;
    }

    // Parallel lines: the critical set { a u - b v + c = 0 } meets the unit
    // square in a parameter interval; every pair on it shares one distance.
    if b == 0.0 {
        return;
    }
    let v_at = |u: f64| (a * u + c) / b;
    let u_at = |v: f64| (b * v - c) / a;
    let (v0, v1) = (v_at(0.0), v_at(1.0));
    let mut ulo = 0.0f64;
    let mut uhi = 1.0f64;
    let (vmin, vmax) = (v0.min(v1), v0.max(v1));
    if vmax < 0.0 || vmin > 1.0 {
        return;
    }
    if v0 < 0.0 || v1 < 0.0 {
        let ub = u_at(0.0);
        if v0 < 0.0 {
            ulo = ulo.max(ub);
        } else {
            uhi = uhi.min(ub);
        }
    }
    if v0 > 1.0 || v1 > 1.0 {
        let ub = u_at(1.0);
        if v0 > 1.0 {
            ulo = ulo.max(ub);
        } else {
            uhi = uhi.min(ub);
        }
    }
    if ulo > uhi {
        return;
    }
    let u = 0.5 * (ulo + uhi);
    let v = v_at(u).clamp(0.0, 1.0);
    let x = p1 + da * u;
    let y = q1 + db * v;
    let (ui, vj) = if swapped { (v, u) } else { (u, v) };
    pairs.push(CriticalPair {
        first: SegmentPoint {
            segment: i,
            param: orient_param(ui, flip_a),
            point: if swapped { y } else { x },
        },
        second: SegmentPoint {
            segment: j,
            param: orient_param(vj, flip_b),
            point: if swapped { x } else { y },
        },
        distance: x.dist(y),
    });
}

fn vertex_interior(p: &PolygonalKnot, k: usize, b: usize, pairs: &mut Vec<CriticalPair>) {
    let v = p.vertex(k);
    let (c1, c2, flipped) = canonical_segment(p, b);
    let db = c2 - c1;
    let e = db.norm_squared();
    let t = (v - c1).dot(db) / e;
    if t <= PARAM_TOL || t >= 1.0 - PARAM_TOL {
        return;
    }
    let y = c1 + db * t;
    if v == y {
        return;
    }
    if !vertex_extremizes(p, k, y) {
        return;
    }
    pairs.push(CriticalPair {
        first: SegmentPoint { segment: k, param: 0.0, point: v },
        second: SegmentPoint { segment: b, param: orient_param(t, flipped), point: y },
        distance: v.dist(y),
    });
}

/// Doubly critical self distance: min |y - x| over [`dcrit`]; `+inf` when
/// the critical set is empty (e.g. a triangle).
pub fn dcsd(p: &PolygonalKnot) -> f64 {
    dcsd_witnessed(p).0
}

fn dcsd_witnessed(p: &PolygonalKnot) -> (f64, Option<(usize, usize)>) {
    let mut best = f64::INFINITY;
    let mut witness = None;
    for pair in dcrit(p) {
        if pair.distance < best {
            best = pair.distance;
            witness = Some((pair.first.segment, pair.second.segment));
        }
    }
    (best, witness)
}

/// Discrete thickness: min(minRad, dcsd/2); 0 with the degenerate flag when
/// two vertices coincide. The witness is the deciding vertex index (minRad
/// branch, preferred on ties) or the deciding segment pair (dcsd branch).
pub fn thickness_discrete(p: &PolygonalKnot) -> EnergyReport {
    let n = p.num_vertices();
    if let Some((i, j)) = p.coincident_vertex_pair() {
        return EnergyReport {
            value: 0.0,
            witness: Some(vec![i, j]),
            degenerate: true,
            term_count: 0,
        };
    }
    let (min_rad, vertex) = minrad_witnessed(p);
    let (self_dist, seg_pair) = dcsd_witnessed(p);
    let half_dcsd = 0.5 * self_dist;
    let term_count = n + n * (n - 3) / 2;
    if min_rad <= half_dcsd {
        EnergyReport {
            value: min_rad,
            witness: Some(vec![vertex]),
            degenerate: false,
            term_count,
        }
    } else {
        EnergyReport {
            value: half_dcsd,
            witness: seg_pair.map(|(i, j)| vec![i, j]),
            degenerate: false,
            term_count,
        }
    }
}

/// Discrete ropelength: total length over thickness; `+inf` for thickness
/// zero.
pub fn ropelength_discrete(p: &PolygonalKnot) -> f64 {
    let thickness = thickness_discrete(p).value;
    if thickness == 0.0 {
        f64::INFINITY
    } else {
        p.total_length() / thickness
    }
}
