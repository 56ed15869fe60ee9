//! Rigid motions and congruence testing via optimal alignment.

use nalgebra::{Matrix3, Vector3};
use rand::Rng;
use rand_distr::StandardNormal;

use crate::geom::{Point3, PolygonalKnot};

/// 3x3 rotation matrix, rows major.
pub type Rotation = [[f64; 3]; 3];

/// Uniformly random rotation (from a random unit quaternion) and a random
/// translation with coordinates in [-1, 1].
pub fn random_rigid_motion<R: Rng>(rng: &mut R) -> (Rotation, Point3) {
    let q: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
    let norm = (q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3]).sqrt();
    let (w, x, y, z) = (q[0] / norm, q[1] / norm, q[2] / norm, q[3] / norm);
    let rot = [
        [
            1.0 - 2.0 * (y * y + z * z),
            2.0 * (x * y - w * z),
            2.0 * (x * z + w * y),
        ],
        [
            2.0 * (x * y + w * z),
            1.0 - 2.0 * (x * x + z * z),
            2.0 * (y * z - w * x),
        ],
        [
            2.0 * (x * z - w * y),
            2.0 * (y * z + w * x),
            1.0 - 2.0 * (x * x + y * y),
        ],
    ];
    let t = Point3::new(
        rng.random::<f64>() * 2.0 - 1.0,
        rng.random::<f64>() * 2.0 - 1.0,
        rng.random::<f64>() * 2.0 - 1.0,
    );
    (rot, t)
}

pub fn apply_rigid(p: Point3, rot: &Rotation, t: Point3) -> Point3 {
    Point3::new(
        rot[0][0] * p.x + rot[0][1] * p.y + rot[0][2] * p.z + t.x,
        rot[1][0] * p.x + rot[1][1] * p.y + rot[1][2] * p.z + t.y,
        rot[2][0] * p.x + rot[2][1] * p.y + rot[2][2] * p.z + t.z,
    )
}

pub fn transform_polygon(p: &PolygonalKnot, rot: &Rotation, t: Point3) -> PolygonalKnot {
    PolygonalKnot::new(p.vertices().iter().map(|&v| apply_rigid(v, rot, t)).collect())
        .expect("rigid motions preserve validity")
}

fn centered(points: &[Point3]) -> Vec<Point3> {
    let mut c = Point3::ORIGIN;
    for p in points {
        c = c + *p;
    }
    c = c / points.len() as f64;
    points.iter().map(|&p| p - c).collect()
}

/// Root-mean-square deviation after the optimal proper rotation aligning
/// `a` onto `b` (both centered at their centroids), by the Kabsch method.
pub fn kabsch_rmsd(a: &[Point3], b: &[Point3]) -> f64 {
    assert_eq!(a.len(), b.len());
    let a = centered(a);
    let b = centered(b);
    let mut h = Matrix3::<f64>::zeros();
    for (p, q) in a.iter().zip(&b) {
        h += Vector3::new(q.x, q.y, q.z) * Vector3::new(p.x, p.y, p.z).transpose();
    }
    let svd = h.svd(true, true);
    let u = svd.u.expect("svd with u");
    let v_t = svd.v_t.expect("svd with v_t");
    let d = (u * v_t).determinant().signum();
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, d));
    let r = u * correction * v_t;
    let mut sum = 0.0;
    for (p, q) in a.iter().zip(&b) {
        let rp = r * Vector3::new(p.x, p.y, p.z);
        let diff = Point3::new(rp.x - q.x, rp.y - q.y, rp.z - q.z);
        sum += diff.norm_squared();
    }
    (sum / a.len() as f64).sqrt()
}

/// Shape distance between two polygons with equal vertex counts: the
/// smallest RMSD after optimal rigid alignment, minimized over all cyclic
/// shifts, both orientations, and reflection. Zero exactly for congruent
/// polygons (up to relabeling).
pub fn shape_distance(p: &PolygonalKnot, q: &PolygonalKnot) -> f64 {
    assert_eq!(p.num_vertices(), q.num_vertices());
    let n = p.num_vertices();
    let target: Vec<Point3> = q.vertices().to_vec();
    let mirrored: Vec<Point3> = q
        .vertices()
        .iter()
        .map(|v| Point3::new(v.x, v.y, -v.z))
        .collect();
    let mut best = f64::INFINITY;
    for shift in 0..n {
        for reversed in [false, true] {
            let source: Vec<Point3> = (0..n)
                .map(|k| {
                    let idx = if reversed { (shift + n - k) % n } else { (shift + k) % n };
                    p.vertex(idx)
                })
                .collect();
            best = best.min(kabsch_rmsd(&source, &target));
            best = best.min(kabsch_rmsd(&source, &mirrored));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::regular_ngon;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn rotation_is_orthogonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let (rot, _) = random_rigid_motion(&mut rng);
            for i in 0..3 {
                for j in 0..3 {
                    let dot: f64 = (0..3).map(|k| rot[i][k] * rot[j][k]).sum();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn congruent_copies_have_zero_shape_distance() {
        let g6 = regular_ngon(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let (rot, t) = random_rigid_motion(&mut rng);
        let moved = transform_polygon(&g6, &rot, t).relabeled(2, true);
        assert!(shape_distance(&g6, &moved) < 1e-12);
    }

    #[test]
    fn mirror_images_are_congruent() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        let p = crate::geom::random_equilateral_polygon(6, 1.0, &mut rng);
        let mirrored =
            PolygonalKnot::new(p.vertices().iter().map(|v| Point3::new(-v.x, v.y, v.z)).collect())
                .unwrap();
        assert!(shape_distance(&p, &mirrored) < 1e-10);
    }

    #[test]
    fn distinct_shapes_are_far() {
        let g6 = regular_ngon(6).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let random = crate::geom::random_equilateral_polygon(6, 1.0, &mut rng);
        assert!(shape_distance(&g6, &random) > 1e-3);
    }
}
