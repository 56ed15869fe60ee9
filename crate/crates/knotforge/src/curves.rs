//! Arc-length-parametrized curve providers (circle, torus knots, ellipses)
//! and inscription of polygons in them.
//!
//! Curves with non-unit parameter speed are reparametrized through a
//! cumulative-quadrature table built eagerly at construction (Simpson per
//! interval, 10^4 knots) and inverted by safeguarded Newton iteration, so
//! `point_at` is read-only and contention-free afterwards.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::geom::{Point3, PolygonError, PolygonalKnot};

/// A closed curve parametrized by arc length on [0, L]; positions wrap
/// modulo L. Arc-length parametrization implies the chord bound
/// |point_at(s+h) - point_at(s)| <= h.
pub trait CurveProvider {
    fn total_length(&self) -> f64;
    fn point_at(&self, s: f64) -> Point3;
    /// Curvature at arc position `s`, when the curve can supply it.
    fn curvature_at(&self, _s: f64) -> Option<f64> {
        None
    }
}

#[derive(Debug, Error)]
pub enum InscribeError {
    #[error("need at least 3 segments, got {got}")]
    TooFewSegments { got: usize },
    #[error("consecutive curve samples coincide: {0}")]
    DegenerateSamples(#[from] PolygonError),
    #[error("equilateral inscription did not close: residual {residual:.3e} over budget {budget:.3e}")]
    NoClosure { residual: f64, budget: f64 },
    #[error("chord marching failed: no arc position with chord {chord:.6e} from s = {from:.6e}")]
    ChordUnreachable { chord: f64, from: f64 },
    #[error("invalid torus knot parameters p = {p}, q = {q} (need p, q >= 1 coprime)")]
    BadTorusParameters { p: u32, q: u32 },
}

/// Round circle of the given total length in the z = 0 plane, centered at
/// the origin.
#[derive(Clone, Copy, Debug)]
pub struct Circle {
    length: f64,
}

impl Circle {
    pub fn new(length: f64) -> Self {
        assert!(length > 0.0 && length.is_finite());
        Self { length }
    }

    /// Unit-length circle, radius 1/(2 pi).
    pub fn unit() -> Self {
        Self::new(1.0)
    }

    pub fn radius(&self) -> f64 {
        self.length / TAU
    }
}

impl CurveProvider for Circle {
    fn total_length(&self) -> f64 {
        self.length
    }

    fn point_at(&self, s: f64) -> Point3 {
        let r = self.radius();
        let theta = TAU * (s / self.length);
        Point3::new(r * theta.cos(), r * theta.sin(), 0.0)
    }

    fn curvature_at(&self, _s: f64) -> Option<f64> {
        Some(TAU / self.length)
    }
}

/// A smooth closed curve given by position/velocity/acceleration in a free
/// parameter on [0, period); the arc-length table turns it into a
/// `CurveProvider`.
trait ParamCurve {
    fn period(&self) -> f64;
    fn position(&self, t: f64) -> Point3;
    fn velocity(&self, t: f64) -> Point3;
    fn acceleration(&self, t: f64) -> Point3;

    fn speed(&self, t: f64) -> f64 {
        self.velocity(t).norm()
    }

    /// |v x a| / |v|^3.
    fn curvature(&self, t: f64) -> f64 {
        let v = self.velocity(t);
        let a = self.acceleration(t);
        v.cross(a).norm() / v.norm().powi(3)
    }
}

const ARC_TABLE_KNOTS: usize = 10_000;

/// Cumulative arc length s(t) at uniform parameter knots, with monotone
/// inversion by bisection-safeguarded Newton.
#[derive(Clone, Debug)]
struct ArcLengthTable {
    /// s at t_k = period * k / N, k = 0..=N.
    cumulative: Vec<f64>,
    period: f64,
}

impl ArcLengthTable {
    fn build(curve: &impl ParamCurve) -> Self {
        let n = ARC_TABLE_KNOTS;
        let period = curve.period();
        let h = period / n as f64;
        let mut cumulative = Vec::with_capacity(n + 1);
        cumulative.push(0.0);
        let mut acc = 0.0;
        let mut f_lo = curve.speed(0.0);
        for k in 0..n {
            let t0 = k as f64 * h;
            let f_mid = curve.speed(t0 + 0.5 * h);
            let f_hi = curve.speed(t0 + h);
            acc += h / 6.0 * (f_lo + 4.0 * f_mid + f_hi);
            cumulative.push(acc);
            f_lo = f_hi;
        }
        Self { cumulative, period }
    }

    fn raw_length(&self) -> f64 {
        *self.cumulative.last().unwrap()
    }

    /// Arc length from knot `k` to parameter `t` within one table interval.
    fn partial(&self, curve: &impl ParamCurve, k: usize, t: f64) -> f64 {
        let h = self.period / ARC_TABLE_KNOTS as f64;
        let t0 = k as f64 * h;
        let w = t - t0;
        if w == 0.0 {
            return 0.0;
        }
        w / 6.0 * (curve.speed(t0) + 4.0 * curve.speed(t0 + 0.5 * w) + curve.speed(t))
    }

    /// Parameter t with s(t) = s_raw, for s_raw in [0, raw_length].
    fn invert(&self, curve: &impl ParamCurve, s_raw: f64) -> f64 {
        let n = ARC_TABLE_KNOTS;
        let h = self.period / n as f64;
        let s_raw = s_raw.clamp(0.0, self.raw_length());
        let k = match self
            .cumulative
            .binary_search_by(|probe| probe.total_cmp(&s_raw))
        {
            Ok(idx) => return (idx as f64 * h).min(self.period),
            Err(idx) => idx.saturating_sub(1).min(n - 1),
        };
        let (mut lo, mut hi) = (k as f64 * h, (k + 1) as f64 * h);
        let target = s_raw - self.cumulative[k];
        let mut t = lo + (hi - lo) * 0.5;
        for _ in 0..60 {
            let val = self.partial(curve, k, t) - target;
            if val.abs() <= 1e-16 * self.raw_length() {
                break;
            }
            if val > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let speed = curve.speed(t);
            let newton = t - val / speed;
            t = if newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if hi - lo <= f64::EPSILON * self.period {
                break;
            }
        }
        t
    }
}

/// The (p,q) torus knot on the torus with the given major/minor radii,
/// rescaled to the requested total length:
/// t -> ((R + r cos(q t)) cos(p t), (R + r cos(q t)) sin(p t), r sin(q t)),
/// simple whenever r < R and gcd(p, q) = 1.
#[derive(Clone, Debug)]
pub struct TorusKnot {
    p: f64,
    q: f64,
    major: f64,
    minor: f64,
    table: ArcLengthTable,
    scale: f64,
    length: f64,
}

struct RawTorus {
    p: f64,
    q: f64,
    major: f64,
    minor: f64,
}

impl ParamCurve for RawTorus {
    fn period(&self) -> f64 {
        TAU
    }

    fn position(&self, t: f64) -> Point3 {
        let a = self.major + self.minor * (self.q * t).cos();
        Point3::new(
            a * (self.p * t).cos(),
            a * (self.p * t).sin(),
            self.minor * (self.q * t).sin(),
        )
    }

    fn velocity(&self, t: f64) -> Point3 {
        let a = self.major + self.minor * (self.q * t).cos();
        let da = -self.minor * self.q * (self.q * t).sin();
        let (sp, cp) = (self.p * t).sin_cos();
        Point3::new(
            da * cp - self.p * a * sp,
            da * sp + self.p * a * cp,
            self.minor * self.q * (self.q * t).cos(),
        )
    }

    fn acceleration(&self, t: f64) -> Point3 {
        let a = self.major + self.minor * (self.q * t).cos();
        let da = -self.minor * self.q * (self.q * t).sin();
        let dda = -self.minor * self.q * self.q * (self.q * t).cos();
        let (sp, cp) = (self.p * t).sin_cos();
        let p = self.p;
        Point3::new(
            dda * cp - 2.0 * p * da * sp - p * p * a * cp,
            dda * sp + 2.0 * p * da * cp - p * p * a * sp,
            -self.minor * self.q * self.q * (self.q * t).sin(),
        )
    }
}

impl TorusKnot {
    /// Standard embedding with major radius 2, minor radius 1, scaled to
    /// total length 1.
    pub fn new(p: u32, q: u32) -> Result<Self, InscribeError> {
        Self::with_radii(p, q, 2.0, 1.0, 1.0)
    }

    pub fn with_radii(
        p: u32,
        q: u32,
        major: f64,
        minor: f64,
        target_length: f64,
    ) -> Result<Self, InscribeError> {
        if p == 0 || q == 0 || gcd(p, q) != 1 {
            return Err(InscribeError::BadTorusParameters { p, q });
        }
        assert!(minor > 0.0 && major > minor, "embedding must stay simple");
        let raw = RawTorus { p: p as f64, q: q as f64, major, minor };
        let table = ArcLengthTable::build(&raw);
        let scale = target_length / table.raw_length();
        Ok(Self { p: raw.p, q: raw.q, major, minor, table, scale, length: target_length })
    }

    fn raw(&self) -> RawTorus {
        RawTorus { p: self.p, q: self.q, major: self.major, minor: self.minor }
    }
}

impl CurveProvider for TorusKnot {
    fn total_length(&self) -> f64 {
        self.length
    }

    fn point_at(&self, s: f64) -> Point3 {
        let raw = self.raw();
        let s = wrap(s, self.length);
        let t = self.table.invert(&raw, s / self.scale);
        raw.position(t) * self.scale
    }

    fn curvature_at(&self, s: f64) -> Option<f64> {
        let raw = self.raw();
        let s = wrap(s, self.length);
        let t = self.table.invert(&raw, s / self.scale);
        Some(raw.curvature(t) / self.scale)
    }
}

/// Planar ellipse with semi-axes `a >= b`, rescaled to the requested
/// length. The standard "perturbed circle": its thickness is decided by
/// the curvature branch.
#[derive(Clone, Debug)]
pub struct Ellipse {
    a: f64,
    b: f64,
    table: ArcLengthTable,
    scale: f64,
    length: f64,
}

struct RawEllipse {
    a: f64,
    b: f64,
}

impl ParamCurve for RawEllipse {
    fn period(&self) -> f64 {
        TAU
    }

    fn position(&self, t: f64) -> Point3 {
        Point3::new(self.a * t.cos(), self.b * t.sin(), 0.0)
    }

    fn velocity(&self, t: f64) -> Point3 {
        Point3::new(-self.a * t.sin(), self.b * t.cos(), 0.0)
    }

    fn acceleration(&self, t: f64) -> Point3 {
        Point3::new(-self.a * t.cos(), -self.b * t.sin(), 0.0)
    }
}

impl Ellipse {
    pub fn new(a: f64, b: f64, target_length: f64) -> Self {
        assert!(a >= b && b > 0.0);
        let raw = RawEllipse { a, b };
        let table = ArcLengthTable::build(&raw);
        let scale = target_length / table.raw_length();
        Self { a, b, table, scale, length: target_length }
    }
}

impl CurveProvider for Ellipse {
    fn total_length(&self) -> f64 {
        self.length
    }

    fn point_at(&self, s: f64) -> Point3 {
        let raw = RawEllipse { a: self.a, b: self.b };
        let s = wrap(s, self.length);
        let t = self.table.invert(&raw, s / self.scale);
        raw.position(t) * self.scale
    }

    fn curvature_at(&self, s: f64) -> Option<f64> {
        let raw = RawEllipse { a: self.a, b: self.b };
        let s = wrap(s, self.length);
        let t = self.table.invert(&raw, s / self.scale);
        Some(raw.curvature(t) / self.scale)
    }
}

fn wrap(s: f64, length: f64) -> f64 {
    let r = s.rem_euclid(length);
    if r == length {
        0.0
    } else {
        r
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Polygon through the curve points at arc positions i L / n, i = 0..n-1.
pub fn inscribe_uniform(
    curve: &dyn CurveProvider,
    n: usize,
) -> Result<PolygonalKnot, InscribeError> {
    if n < 3 {
        return Err(InscribeError::TooFewSegments { got: n });
    }
    let length = curve.total_length();
    let vertices = (0..n)
        .map(|i| curve.point_at(i as f64 * length / n as f64))
        .collect();
    Ok(PolygonalKnot::new(vertices)?)
}

/// Equilateral polygon inscribed in the curve: all chords share one length,
/// the first vertex sits at arc position 0, and the n-th chord returns to
/// the start within `tol * L`.
///
/// Chords of a trial length c are marched from arc position 0 (each step
/// solves for the smallest arc position whose chord from the previous
/// vertex equals c); an outer bisection on c drives the closure defect of
/// the n-th chord to zero. The defect is monotone in c for the convex-ish
/// curves this is used on.
pub fn inscribe_equilateral(
    curve: &dyn CurveProvider,
    n: usize,
    tol: f64,
) -> Result<PolygonalKnot, InscribeError> {
    if n < 3 {
        return Err(InscribeError::TooFewSegments { got: n });
    }
    assert!(tol > 0.0);
    let length = curve.total_length();

    // March n chords of length c; the defect is how far the endpoint
    // overshoots the full circumference in arc length.
    let march = |c: f64| -> Result<(f64, Vec<f64>), InscribeError> {
        let mut positions = Vec::with_capacity(n + 1);
        positions.push(0.0);
        let mut s = 0.0;
        for _ in 0..n {
            s = next_chord_position(curve, s, c)?;
            positions.push(s);
        }
        Ok((s - length, positions))
    };

    // Chord <= arc gives defect(L/n) >= 0; shrink the lower end until the
    // defect goes negative.
    let mut hi = length / n as f64;
    let mut lo = hi * 0.95;
    let mut lo_defect = march(lo)?.0;
    let mut guard = 0;
    while lo_defect > 0.0 {
        lo *= 0.95;
        lo_defect = march(lo)?.0;
        guard += 1;
        if guard > 200 {
            return Err(InscribeError::NoClosure { residual: lo_defect, budget: tol * length });
        }
    }

    let mut best_positions = march(hi)?.1;
    let mut best_defect = f64::INFINITY;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (defect, positions) = march(mid)?;
        if defect.abs() < best_defect {
            best_defect = defect.abs();
            best_positions = positions;
        }
        if defect > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }

    let closure = curve
        .point_at(*best_positions.last().unwrap())
        .dist(curve.point_at(0.0));
    if closure > tol * length {
        return Err(InscribeError::NoClosure { residual: closure, budget: tol * length });
    }
    let vertices = best_positions[..n]
        .iter()
        .map(|&s| curve.point_at(s))
        .collect();
    Ok(PolygonalKnot::new(vertices)?)
}

/// Smallest arc position beyond `from` whose chord from `from` equals `c`.
fn next_chord_position(
    curve: &dyn CurveProvider,
    from: f64,
    c: f64,
) -> Result<f64, InscribeError> {
    let length = curve.total_length();
    let base = curve.point_at(from);
    let chord = |s: f64| curve.point_at(s).dist(base);
    // 1-Lipschitz parametrization puts the root at arc >= c.
    let mut lo = from + c * (1.0 - 1e-9);
    if chord(lo) > c {
        lo = from;
    }
    let mut hi = from + c;
    let cap = from + 0.5 * length;
    let mut guard = 0;
    while chord(hi) < c {
        let span = (hi - from) * 1.25;
        hi = from + span;
        if hi > cap {
            hi = cap;
            if chord(hi) < c {
                return Err(InscribeError::ChordUnreachable { chord: c, from });
            }
            break;
        }
        guard += 1;
        if guard > 200 {
            return Err(InscribeError::ChordUnreachable { chord: c, from });
        }
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if chord(mid) < c {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn circle_point_and_curvature() {
        let c = Circle::unit();
        let r = 1.0 / TAU;
        assert!((c.radius() - r).abs() < 1e-15);
        assert!(c.point_at(0.0).dist(Point3::new(r, 0.0, 0.0)) < 1e-15);
        assert!(c.point_at(1.0).dist(c.point_at(0.0)) < 1e-12);
        assert_eq!(c.curvature_at(0.3), Some(TAU));
    }

    #[test]
    fn arc_length_parametrization_is_lipschitz() {
        let knot = TorusKnot::new(2, 3).unwrap();
        assert!((knot.total_length() - 1.0).abs() < 1e-9);
        let mut s = 0.013;
        while s < 1.0 {
            for h in [1e-4, 1e-2, 0.2, 0.49] {
                let chord = knot.point_at(s + h).dist(knot.point_at(s));
                assert!(chord <= h * (1.0 + 1e-9) + 1e-12, "chord {chord} > h {h} at s = {s}");
            }
            s += 0.037;
        }
        assert!(knot.point_at(0.0).dist(knot.point_at(1.0)) < 1e-9);
    }

    #[test]
    fn torus_knot_speed_normalizes() {
        // Equal arc steps must map to nearly equal chords for small steps.
        let knot = TorusKnot::new(2, 3).unwrap();
        let h = 1e-4;
        let mut chords = Vec::new();
        let mut s = 0.0;
        while s < 1.0 {
            chords.push(knot.point_at(s + h).dist(knot.point_at(s)));
            s += 0.05;
        }
        let min = chords.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = chords.iter().cloned().fold(0.0, f64::max);
        assert!(max / min - 1.0 < 1e-6, "speed spread {}", max / min - 1.0);
    }

    #[test]
    fn torus_knot_curvature_matches_finite_differences() {
        let knot = TorusKnot::new(2, 3).unwrap();
        let h = 1e-5;
        for &s in &[0.1, 0.33, 0.71] {
            // Arc-length parametrization: kappa = |second derivative|.
            let dd = (knot.point_at(s + h) + knot.point_at(s - h) - knot.point_at(s) * 2.0)
                / (h * h);
            let kappa = knot.curvature_at(s).unwrap();
            assert!(
                (dd.norm() - kappa).abs() < 1e-3 * kappa,
                "fd {} vs analytic {kappa}",
                dd.norm()
            );
        }
    }

    #[test]
    fn rejects_non_coprime_torus_parameters() {
        assert!(TorusKnot::new(2, 4).is_err());
        assert!(TorusKnot::new(0, 3).is_err());
        assert!(TorusKnot::new(3, 5).is_ok());
    }

    #[test]
    fn inscribe_uniform_square_in_circle() {
        let circle = Circle::unit();
        let p4 = inscribe_uniform(&circle, 4).unwrap();
        let side = 2.0f64.sqrt() / TAU;
        for i in 0..4 {
            assert!((p4.edge_length(i) - side).abs() < 1e-14);
        }
        assert!((p4.total_length() - 2.0 * 2.0f64.sqrt() / PI).abs() < 1e-14);
    }

    #[test]
    fn inscribed_length_converges_to_curve_length() {
        let circle = Circle::unit();
        let mut prev_gap = f64::INFINITY;
        for n in [8, 32, 128, 512] {
            let p = inscribe_uniform(&circle, n).unwrap();
            let gap = 1.0 - p.total_length();
            assert!(gap > 0.0 && gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-4);
    }

    #[test]
    fn inscribe_uniform_triangle_on_any_curve() {
        let knot = TorusKnot::new(2, 3).unwrap();
        let p3 = inscribe_uniform(&knot, 3).unwrap();
        assert_eq!(p3.num_vertices(), 3);
        for (i, v) in p3.vertices().iter().enumerate() {
            assert_eq!(v.dist(knot.point_at(i as f64 / 3.0)), 0.0);
        }
    }

    #[test]
    fn equilateral_inscription_on_circle_matches_uniform() {
        let circle = Circle::unit();
        let uniform = inscribe_uniform(&circle, 4).unwrap();
        let equi = inscribe_equilateral(&circle, 4, 1e-12).unwrap();
        for i in 0..4 {
            assert!(equi.vertex(i).dist(uniform.vertex(i)) < 1e-10);
        }
        assert!((equi.edge_length(0) - 2.0f64.sqrt() / TAU).abs() < 1e-10);
    }

    #[test]
    fn equilateral_inscription_in_trefoil() {
        let knot = TorusKnot::new(2, 3).unwrap();
        let p = inscribe_equilateral(&knot, 64, 1e-10).unwrap();
        assert_eq!(p.num_vertices(), 64);
        assert!(p.is_equilateral(), "edge spread too large");
        assert_eq!(p.vertex(0).dist(knot.point_at(0.0)), 0.0);
    }
}
