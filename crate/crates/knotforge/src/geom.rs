//! Geometric primitives: points, closed polygons, circumradius of point
//! triples and regular n-gons.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::{Distribution, UnitSphere};
use serde::de::{SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::numeric::{canonical_sum, compensated_sum};

/// Relative area threshold for declaring a point triple collinear:
/// triangle area <= COLLINEARITY_THRESHOLD * max_side^2. A relative
/// threshold survives rescaling of the input.
pub const COLLINEARITY_THRESHOLD: f64 = 1e-12;

/// A polygon counts as equilateral when max_edge / min_edge - 1 <= this.
pub const EQUILATERAL_FLAG_TOL: f64 = 1e-10;

/// A point (or free vector) in R^3.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const ORIGIN: Point3 = Point3 { x: 0.0, y: 0.0, z: 0.0 };

    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn dot(self, other: Point3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn cross(self, other: Point3) -> Point3 {
        Point3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dist(self, other: Point3) -> f64 {
        (self - other).norm()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(self) -> Option<Point3> {
        let n = self.norm();
        if n == 0.0 {
            None
        } else {
            Some(self / n)
        }
    }

    /// Total lexicographic order on coordinates, used to canonicalize
    /// traversal directions so that values do not depend on vertex labels.
    pub fn lex_cmp(self, other: Point3) -> Ordering {
        self.x
            .total_cmp(&other.x)
            .then(self.y.total_cmp(&other.y))
            .then(self.z.total_cmp(&other.z))
    }
}

impl Add for Point3 {
    type Output = Point3;
    fn add(self, rhs: Point3) -> Point3 {
        Point3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Point3 {
    type Output = Point3;
    fn sub(self, rhs: Point3) -> Point3 {
        Point3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Point3 {
    type Output = Point3;
    fn mul(self, s: f64) -> Point3 {
        Point3::new(self.x * s, self.y * s, self.z * s)
    }
}

impl Div<f64> for Point3 {
    type Output = Point3;
    fn div(self, s: f64) -> Point3 {
        Point3::new(self.x / s, self.y / s, self.z / s)
    }
}

impl Neg for Point3 {
    type Output = Point3;
    fn neg(self) -> Point3 {
        Point3::new(-self.x, -self.y, -self.z)
    }
}

impl fmt::Display for Point3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x, self.y, self.z)
    }
}

// Points serialize as [x, y, z] to match the polygon file format.
impl Serialize for Point3 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut t = serializer.serialize_tuple(3)?;
        t.serialize_element(&self.x)?;
        t.serialize_element(&self.y)?;
        t.serialize_element(&self.z)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for Point3 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct P3Visitor;
        impl<'de> Visitor<'de> for P3Visitor {
            type Value = Point3;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an array [x, y, z]")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> Result<Point3, A::Error> {
                let x = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(0, &self))?;
                let y = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(1, &self))?;
                let z = seq
                    .next_element()?
                    .ok_or_else(|| serde::de::Error::invalid_length(2, &self))?;
                if seq.next_element::<f64>()?.is_some() {
                    return Err(serde::de::Error::invalid_length(4, &self));
                }
                Ok(Point3::new(x, y, z))
            }
        }
        deserializer.deserialize_tuple(3, P3Visitor)
    }
}

/// Validation failures when constructing a [`PolygonalKnot`].
#[derive(Debug, Error)]
pub enum PolygonError {
    #[error("a closed polygon needs at least 3 vertices, got {got}")]
    TooFewVertices { got: usize },
    #[error("vertex {index} has a non-finite coordinate")]
    NonFiniteVertex { index: usize },
    #[error("consecutive vertices {index} and {next} coincide", next = (index + 1))]
    CoincidentConsecutive { index: usize },
}

/// A closed polygon in R^3: vertex `n-1` connects back to vertex `0`.
///
/// Edge lengths, arc positions (cumulative edge lengths starting at 0) and
/// the total length are derived at construction; the struct is immutable
/// afterwards, so sharing across threads is safe.
#[derive(Clone, Debug, PartialEq)]
pub struct PolygonalKnot {
    vertices: Vec<Point3>,
    edge_lengths: Vec<f64>,
    arc_positions: Vec<f64>,
    total_length: f64,
    equilateral: bool,
}

impl PolygonalKnot {
    pub fn new(vertices: Vec<Point3>) -> Result<Self, PolygonError> {
        let n = vertices.len();
        if n < 3 {
            return Err(PolygonError::TooFewVertices { got: n });
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(PolygonError::NonFiniteVertex { index: i });
            }
        }
        let mut edge_lengths = Vec::with_capacity(n);
        for i in 0..n {
            let len = vertices[i].dist(vertices[(i + 1) % n]);
            if len == 0.0 {
                return Err(PolygonError::CoincidentConsecutive { index: i });
            }
            edge_lengths.push(len);
        }
        // Total length is summed over the sorted edge multiset so it does not
        // depend on where the vertex list starts or which way it runs.
        let total_length = canonical_sum(edge_lengths.clone());
        let mut arc_positions = Vec::with_capacity(n + 1);
        arc_positions.push(0.0);
        let mut acc = 0.0;
        for &len in &edge_lengths[..n - 1] {
            acc += len;
            arc_positions.push(acc);
        }
        arc_positions.push(total_length);
        debug_assert!(arc_positions.windows(2).all(|w| w[0] < w[1]));

        let min = edge_lengths.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = edge_lengths.iter().cloned().fold(0.0, f64::max);
        let equilateral = max / min - 1.0 <= EQUILATERAL_FLAG_TOL;

        Ok(Self { vertices, edge_lengths, arc_positions, total_length, equilateral })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertex(&self, i: usize) -> Point3 {
        self.vertices[i % self.vertices.len()]
    }

    pub fn vertices(&self) -> &[Point3] {
        &self.vertices
    }

    /// Directed edge `i`: from vertex `i` to vertex `i+1` (cyclic).
    pub fn edge(&self, i: usize) -> (Point3, Point3) {
        let n = self.vertices.len();
        (self.vertices[i % n], self.vertices[(i + 1) % n])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        self.edge_lengths[i % self.edge_lengths.len()]
    }

    pub fn edge_lengths(&self) -> &[f64] {
        &self.edge_lengths
    }

    /// Arc positions a_1 = 0 < a_2 < ... < a_{n+1} = L.
    pub fn arc_positions(&self) -> &[f64] {
        &self.arc_positions
    }

    pub fn total_length(&self) -> f64 {
        self.total_length
    }

    pub fn is_equilateral(&self) -> bool {
        self.equilateral
    }

    /// Length of the forward arc from vertex `i` to vertex `j`.
    ///
    /// The edge sequence is folded starting from whichever endpoint is
    /// lexicographically smaller, so relabeling the polygon (cyclic shift or
    /// reversal) reproduces the exact same float.
    pub fn arc_between(&self, i: usize, j: usize) -> f64 {
        let n = self.vertices.len();
        let (i, j) = (i % n, j % n);
        if i == j {
            return 0.0;
        }
        let count = (j + n - i) % n;
        let forward = self.vertex(i).lex_cmp(self.vertex(j)) != Ordering::Greater;
        compensatedfold(count, |k| {
            let idx = if forward { (i + k) % n } else { (j + n - 1 - k) % n };
            self.edge_lengths[idx]
        })
    }

    /// Intrinsic distance between the arc positions of vertices `i` and `j`
    /// on the circle of circumference L: min of the two arcs. Both arcs are
    /// folded canonically (not by subtracting from L), so the value is
    /// bitwise relabel-invariant.
    pub fn intrinsic_distance(&self, i: usize, j: usize) -> f64 {
        self.arc_between(i, j).min(self.arc_between(j, i))
    }

    /// First exact coincidence among all vertex pairs, if any.
    pub fn coincident_vertex_pair(&self) -> Option<(usize, usize)> {
        let n = self.vertices.len();
        for i in 0..n {
            for j in (i + 1)..n {
                if self.vertices[i] == self.vertices[j] {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Copy with vertex `i` replaced; revalidates the polygon.
    pub fn with_vertex(&self, i: usize, p: Point3) -> Result<Self, PolygonError> {
        let mut vertices = self.vertices.clone();
        let n = vertices.len();
        vertices[i % n] = p;
        Self::new(vertices)
    }

    pub fn centroid(&self) -> Point3 {
        let mut c = Point3::ORIGIN;
        for v in &self.vertices {
            c = c + *v;
        }
        c / self.vertices.len() as f64
    }

    /// Uniform scaling about `center` by `factor`.
    pub fn scaled_about(&self, center: Point3, factor: f64) -> Result<Self, PolygonError> {
        Self::new(
            self.vertices
                .iter()
                .map(|&v| center + (v - center) * factor)
                .collect(),
        )
    }

    /// Vertices relabeled to start at `shift`, optionally reversed.
    pub fn relabeled(&self, shift: usize, reversed: bool) -> Self {
        let n = self.vertices.len();
        let vertices: Vec<Point3> = if reversed {
            (0..n).map(|k| self.vertices[(shift + n - k) % n]).collect()
        } else {
            (0..n).map(|k| self.vertices[(shift + k) % n]).collect()
        };
        Self::new(vertices).expect("relabeling preserves validity")
    }
}

fn compensatedfold(count: usize, f: impl Fn(usize) -> f64) -> f64 {
    compensated_sum((0..count).map(f))
}

/// Regular n-gon of total length 1 in the z = 0 plane, centered at the
/// origin, first vertex on the positive x-axis. Circumscribed radius is
/// 1 / (2 n sin(pi/n)).
pub fn regular_ngon(n: usize) -> Result<PolygonalKnot, PolygonError> {
    if n < 3 {
        return Err(PolygonError::TooFewVertices { got: n });
    }
    let radius = 0.5 / (n as f64 * (std::f64::consts::PI / n as f64).sin());
    let vertices = (0..n)
        .map(|i| {
            let theta = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            Point3::new(radius * theta.cos(), radius * theta.sin(), 0.0)
        })
        .collect();
    PolygonalKnot::new(vertices)
}

/// True when at least two of the three points coincide exactly.
pub fn triple_degenerate(x: Point3, y: Point3, z: Point3) -> bool {
    x == y || y == z || z == x
}

/// Circumradius of three points.
///
/// Returns `+inf` for distinct collinear points and `0.0` when two inputs
/// coincide (the degenerate convention matching `menger_kappa = +inf`;
/// callers that need to distinguish use [`triple_degenerate`]).
///
/// The radius is computed from the sorted side lengths with Kahan's stable
/// form of Heron's formula, which makes the result exactly symmetric under
/// all six argument orders and robust for needle triangles.
pub fn circumradius(x: Point3, y: Point3, z: Point3) -> f64 {
    let mut s = [x.dist(y), y.dist(z), z.dist(x)];
    if s.iter().any(|&d| d == 0.0) {
        return 0.0;
    }
    s.sort_unstable_by(f64::total_cmp);
    let (c, b, a) = (s[0], s[1], s[2]); // a >= b >= c > 0
    let t1 = a + (b + c);
    let t2 = (c - (a - b)).max(0.0);
    let t3 = c + (a - b);
    let t4 = (a + (b - c)).max(0.0);
    let quad_area = (t1 * t2 * t3 * t4).sqrt(); // 4 * triangle area
    if quad_area <= 4.0 * COLLINEARITY_THRESHOLD * a * a {
        return f64::INFINITY;
    }
    ((a * b) * c) / quad_area
}

/// Menger curvature of three points: the inverse circumradius.
///
/// Collinear distinct points give 0; a coincident pair (or a fully
/// collapsed triple) gives `+inf`.
pub fn menger_kappa(x: Point3, y: Point3, z: Point3) -> f64 {
    let r = circumradius(x, y, z);
    if r == 0.0 {
        f64::INFINITY
    } else if r.is_infinite() {
        0.0
    } else {
        1.0 / r
    }
}

/// Random closed equilateral polygon of `n` edges and total length
/// `target_length`, drawn from iid uniform edge directions projected onto
/// the closure constraint by alternating mean-subtraction and
/// renormalization.
pub fn random_equilateral_polygon<R: Rng>(
    n: usize,
    target_length: f64,
    rng: &mut R,
) -> PolygonalKnot {
    assert!(n >= 3 && target_length > 0.0);
    'resample: loop {
        let mut dirs: Vec<Point3> = (0..n)
            .map(|_| {
                let v: [f64; 3] = UnitSphere.sample(rng);
                Point3::new(v[0], v[1], v[2])
            })
            .collect();
        for _ in 0..10_000 {
            let mut mean = Point3::ORIGIN;
            for d in &dirs {
                mean = mean + *d;
            }
            mean = mean / n as f64;
            let mut ok = true;
            for d in dirs.iter_mut() {
                match (*d - mean).normalized() {
                    Some(u) => *d = u,
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue 'resample;
            }
            let mut residual = Point3::ORIGIN;
            for d in &dirs {
                residual = residual + *d;
            }
            if residual.norm() < 1e-14 * n as f64 {
                let step = target_length / n as f64;
                let mut vertices = Vec::with_capacity(n);
                let mut p = Point3::ORIGIN;
                for d in &dirs[..n] {
                    vertices.push(p);
                    p = p + *d * step;
                }
                let Ok(poly) = PolygonalKnot::new(vertices) else {
                    continue 'resample;
                };
                // Degenerate shapes (near-coincident vertices) are useless
                // as energy samples; draw again.
                let mut min_pair = f64::INFINITY;
                for i in 0..n {
                    for j in (i + 1)..n {
                        min_pair = min_pair.min(poly.vertex(i).dist(poly.vertex(j)));
                    }
                }
                if min_pair > 1e-6 * target_length {
                    return poly;
                }
                continue 'resample;
            }
        }
    }
}
