//! Segment–segment distance, segment–triangle intersection, and the
//! swept-triangle crossing test that guards vertex moves.

use crate::geom::{Point3, PolygonalKnot};

/// Result of a closed-segment distance query: the minimum distance and the
/// parameters (u, v) in [0,1]^2 of a closest pair.
#[derive(Clone, Copy, Debug)]
pub struct SegmentDistance {
    pub distance: f64,
    pub u: f64,
    pub v: f64,
}

impl SegmentDistance {
    pub fn point_on_first(&self, a1: Point3, a2: Point3) -> Point3 {
        a1 + (a2 - a1) * self.u
    }

    pub fn point_on_second(&self, b1: Point3, b2: Point3) -> Point3 {
        b1 + (b2 - b1) * self.v
    }
}

/// Euclidean distance between the closed segments [a1,a2] and [b1,b2],
/// with the achieving parameter pair. Handles parallel, touching and
/// degenerate-length segments.
pub fn segment_min_distance(a1: Point3, a2: Point3, b1: Point3, b2: Point3) -> SegmentDistance {
    let d1 = a2 - a1;
    let d2 = b2 - b1;
    let r = a1 - b1;
    let a = d1.norm_squared();
    let e = d2.norm_squared();
    let f = d2.dot(r);

    let (u, v);
    if a == 0.0 && e == 0.0 {
        (u, v) = (0.0, 0.0);
    } else if a == 0.0 {
        u = 0.0;
        v = (f / e).clamp(0.0, 1.0);
    } else if e == 0.0 {
        v = 0.0;
        u = (-d1.dot(r) / a).clamp(0.0, 1.0);
    } else {
        let c = d1.dot(r);
        let b = d1.dot(d2);
        let denom = a * e - b * b;
        // Parallel segments have denom == 0; any point of the overlap is
        // optimal, so start from u = 0.
        let mut s = if denom > 0.0 { ((b * f - c * e) / denom).clamp(0.0, 1.0) } else { 0.0 };
        let mut t = (b * s + f) / e;
        if t < 0.0 {
            t = 0.0;
            s = (-c / a).clamp(0.0, 1.0);
        } else if t > 1.0 {
            t = 1.0;
            s = ((b - c) / a).clamp(0.0, 1.0);
        }
        (u, v) = (s, t);
    }
    let p = a1 + d1 * u;
    let q = b1 + d2 * v;
    SegmentDistance { distance: p.dist(q), u, v }
}

/// Distance between two segments given as unordered endpoint pairs, computed
/// on a canonical (lexicographically sorted) representation so the value is
/// bitwise independent of endpoint order and of which segment comes first.
pub(crate) fn segment_distance_canonical(
    s: (Point3, Point3),
    t: (Point3, Point3),
) -> f64 {
    let norm = |(a, b): (Point3, Point3)| {
        if a.lex_cmp(b) == std::cmp::Ordering::Greater {
            (b, a)
        } else {
            (a, b)
        }
    };
    let s = norm(s);
    let t = norm(t);
    let swap = match s.0.lex_cmp(t.0) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => s.1.lex_cmp(t.1) == std::cmp::Ordering::Greater,
        std::cmp::Ordering::Less => false,
    };
    let (s, t) = if swap { (t, s) } else { (s, t) };
    segment_min_distance(s.0, s.1, t.0, t.1).distance
}

fn scale_of(points: &[Point3]) -> f64 {
    points
        .iter()
        .flat_map(|p| [p.x.abs(), p.y.abs(), p.z.abs()])
        .fold(1.0, f64::max)
}

/// Does the closed segment [p,q] intersect the closed triangle (a,b,c)?
///
/// Touching within a relative epsilon counts as intersecting; the test is
/// used as a conservative guard, so false positives on near-contact are the
/// safe direction. Degenerate (collinear) triangles degrade to segment
/// distance tests against their sides.
pub fn segment_intersects_triangle(
    p: Point3,
    q: Point3,
    a: Point3,
    b: Point3,
    c: Point3,
) -> bool {
    let scale = scale_of(&[p, q, a, b, c]);
    let eps = 1e-12 * scale;

    let n = (b - a).cross(c - a);
    let n_norm = n.norm();
    if n_norm <= eps * eps {
        // Collapsed triangle: treat the sweep as its boundary segments.
        return [(a, b), (b, c), (c, a)]
            .iter()
            .any(|&(s, t)| segment_min_distance(p, q, s, t).distance <= eps);
    }

    let d1 = n.dot(p - a) / n_norm;
    let d2 = n.dot(q - a) / n_norm;

    if d1 > eps && d2 > eps || d1 < -eps && d2 < -eps {
        return false;
    }

    if d1.abs() <= eps && d2.abs() <= eps {
        // Coplanar: project onto the dominant plane of the normal and test
        // in 2D (endpoint containment or an edge crossing).
        let axis = dominant_axis(n);
        let to2 = |v: Point3| project2(v, axis);
        let (p2, q2) = (to2(p), to2(q));
        let tri = [to2(a), to2(b), to2(c)];
        let eps2 = eps * scale;
        if point_in_triangle2(p2, &tri, eps2) || point_in_triangle2(q2, &tri, eps2) {
            return true;
        }
        for i in 0..3 {
            if segments_intersect2(p2, q2, tri[i], tri[(i + 1) % 3], eps2) {
                return true;
            }
        }
        return false;
    }

    // Proper crossing: intersect with the plane, then a barycentric test.
    let t = d1 / (d1 - d2);
    if !((-eps..=1.0 + eps).contains(&t)) {
        return false;
    }
    let x = p + (q - p) * t.clamp(0.0, 1.0);
    point_in_triangle3(x, a, b, c, eps)
}

fn dominant_axis(n: Point3) -> usize {
    let (ax, ay, az) = (n.x.abs(), n.y.abs(), n.z.abs());
    if ax >= ay && ax >= az {
        0
    } else if ay >= az {
        1
    } else {
        2
    }
}

fn project2(v: Point3, drop_axis: usize) -> (f64, f64) {
    match drop_axis {
        0 => (v.y, v.z),
        1 => (v.z, v.x),
        _ => (v.x, v.y),
    }
}

fn cross2(o: (f64, f64), a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

fn point_in_triangle2(p: (f64, f64), tri: &[(f64, f64); 3], eps: f64) -> bool {
    let d0 = cross2(tri[0], tri[1], p);
    let d1 = cross2(tri[1], tri[2], p);
    let d2 = cross2(tri[2], tri[0], p);
    let has_neg = d0 < -eps || d1 < -eps || d2 < -eps;
    let has_pos = d0 > eps || d1 > eps || d2 > eps;
    !(has_neg && has_pos)
}

fn segments_intersect2(
    p1: (f64, f64),
    p2: (f64, f64),
    q1: (f64, f64),
    q2: (f64, f64),
    eps: f64,
) -> bool {
    let d1 = cross2(q1, q2, p1);
    let d2 = cross2(q1, q2, p2);
    let d3 = cross2(p1, p2, q1);
    let d4 = cross2(p1, p2, q2);
    if ((d1 > eps && d2 < -eps) || (d1 < -eps && d2 > eps))
        && ((d3 > eps && d4 < -eps) || (d3 < -eps && d4 > eps))
    {
        return true;
    }
    let on = |d: f64, a: (f64, f64), b: (f64, f64), p: (f64, f64)| {
        d.abs() <= eps
            && p.0 >= a.0.min(b.0) - eps
            && p.0 <= a.0.max(b.0) + eps
            && p.1 >= a.1.min(b.1) - eps
            && p.1 <= a.1.max(b.1) + eps
    };
    on(d1, q1, q2, p1) || on(d2, q1, q2, p2) || on(d3, p1, p2, q1) || on(d4, p1, p2, q2)
}

fn point_in_triangle3(x: Point3, a: Point3, b: Point3, c: Point3, eps: f64) -> bool {
    let v0 = b - a;
    let v1 = c - a;
    let v2 = x - a;
    let d00 = v0.dot(v0);
    let d01 = v0.dot(v1);
    let d11 = v1.dot(v1);
    let d20 = v2.dot(v0);
    let d21 = v2.dot(v1);
    let denom = d00 * d11 - d01 * d01;
    if denom <= 0.0 {
        return false;
    }
    let v = (d11 * d20 - d01 * d21) / denom;
    let w = (d00 * d21 - d01 * d20) / denom;
    let rel = eps / denom.sqrt();
    v >= -rel && w >= -rel && v + w <= 1.0 + rel
}

/// Would moving vertex `vertex` of `p` to `new_position` sweep an incident
/// edge across a non-incident segment of the polygon?
///
/// The move sweeps two triangles, (prev, old, new) and (next, old, new).
/// Each is tested against every segment that shares no vertex with it;
/// `true` means the move could change the isotopy class and must be
/// rejected. A null move on an embedded polygon always returns `false`.
pub fn sweep_crossing_check(p: &PolygonalKnot, vertex: usize, new_position: Point3) -> bool {
    let n = p.num_vertices();
    let old = p.vertex(vertex);
    let prev = p.vertex((vertex + n - 1) % n);
    let next = p.vertex((vertex + 1) % n);

    // Segment k runs from vertex k to vertex k+1. For the triangle with
    // fixed neighbor `prev` the incident segments are those containing
    // vertex-1 or vertex; symmetrically for `next`.
    let i = vertex;
    let excluded_prev = [(i + n - 2) % n, (i + n - 1) % n, i];
    let excluded_next = [(i + n - 1) % n, i, (i + 1) % n];

    triangle_hits_polygon(p, prev, old, new_position, &excluded_prev)
        || triangle_hits_polygon(p, next, old, new_position, &excluded_next)
}

fn triangle_hits_polygon(
    p: &PolygonalKnot,
    fixed: Point3,
    old: Point3,
    new: Point3,
    excluded: &[usize],
) -> bool {
    let n = p.num_vertices();
    for k in 0..n {
        if excluded.contains(&k) {
            continue;
        }
        let (s1, s2) = p.edge(k);
        if segment_intersects_triangle(s1, s2, fixed, old, new) {
            return true;
        }
    }
    false
}
