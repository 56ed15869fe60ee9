//! Knot-class-preserving minimization over equilateral polygons.
//!
//! The minimizer is Metropolis annealing with single-vertex Gaussian
//! proposals. Isotopy preservation is constructive: the raw proposal and
//! every vertex displacement of the subsequent equilateral projection are
//! individually guarded by [`sweep_crossing_check`], so the chain of
//! accepted states is connected by crossing-free single-vertex homotopies.
//! The final uniform rescale that pins the total length is an ambient
//! similarity and cannot change the class. A finite-difference descent
//! pass polishes annealer output under the same guards.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::energy::{de_extended, menger_discrete, moebius_discrete, ser_extended};
use crate::geom::{Point3, PolygonalKnot};
use crate::segment::{segment_min_distance, sweep_crossing_check};
use crate::thickness::thickness_discrete;

#[derive(Debug, Error)]
pub enum MinimizeError {
    #[error("initial polygon is not equilateral within tolerance {tol:.1e} (spread {spread:.3e})")]
    NotEquilateral { spread: f64, tol: f64 },
    #[error("initial polygon is not embedded: segments {i} and {j} are {dist:.3e} apart")]
    NotEmbedded { i: usize, j: usize, dist: f64 },
    #[error("initial energy is not finite")]
    DegenerateStart,
    #[error("equilateral projection did not converge in {sweeps} sweeps (residual {residual:.3e})")]
    ProjectionStalled { sweeps: usize, residual: f64 },
    #[error("invalid configuration: {0}")]
    BadConfig(String),
    #[error("replay diverged at move {index}: {reason}")]
    ReplayDiverged { index: usize, reason: String },
}

/// Objective for the minimizer. Inverse thickness treats degenerate
/// states (thickness 0) as `+inf`, which keeps the objective coercive
/// against vertex collapse.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "objective", rename_all = "snake_case")]
pub enum Objective {
    InverseThickness,
    Moebius,
    Menger { s: f64 },
}

impl Objective {
    pub fn value(&self, p: &PolygonalKnot) -> f64 {
        match self {
            Objective::InverseThickness => {
                let t = thickness_discrete(p).value;
                if t == 0.0 {
                    f64::INFINITY
                } else {
                    1.0 / t
                }
            }
            Objective::Moebius => moebius_discrete(p).value,
            Objective::Menger { s } => menger_discrete(p, *s).value,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Objective::InverseThickness => "thickness_inv".into(),
            Objective::Moebius => "moebius".into(),
            Objective::Menger { s } => format!("menger(s={s})"),
        }
    }
}

/// Annealing configuration. The run is split into 100 epochs; both the
/// proposal scale and the temperature decay by `cooling_factor` per epoch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeConfig {
    pub objective: Objective,
    pub iterations: u64,
    /// Initial proposal standard deviation as a fraction of total length.
    pub initial_step: f64,
    pub cooling_factor: f64,
    pub temperature_initial: f64,
    pub seed: u64,
    pub equilateral_tol: f64,
    pub log_every: u64,
}

impl MinimizeConfig {
    pub fn new(objective: Objective, iterations: u64, seed: u64) -> Self {
        Self {
            objective,
            iterations,
            initial_step: 0.02,
            cooling_factor: 0.93,
            temperature_initial: 0.5,
            seed,
            equilateral_tol: 1e-12,
            log_every: 1000,
        }
    }

    fn validate(&self) -> Result<(), MinimizeError> {
        if self.iterations == 0 {
            return Err(MinimizeError::BadConfig("iterations must be positive".into()));
        }
        if !(0.0 < self.cooling_factor && self.cooling_factor < 1.0) {
            return Err(MinimizeError::BadConfig("cooling_factor must lie in (0,1)".into()));
        }
        if !(0.0 < self.initial_step && self.initial_step < 0.5) {
            return Err(MinimizeError::BadConfig("initial_step must lie in (0, 0.5)".into()));
        }
        if self.temperature_initial <= 0.0 || self.equilateral_tol <= 0.0 {
            return Err(MinimizeError::BadConfig("temperature and tolerance must be positive".into()));
        }
        Ok(())
    }
}

/// One accepted state change, sufficient for deterministic replay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "snake_case")]
pub enum MoveRecord {
    /// Annealer proposal: re-running the raw move through the guarded
    /// projection pipeline reproduces the accepted state.
    VertexProposal { iteration: u64, vertex: usize, position: Point3 },
    /// Whole-polygon update (descent step), applied as guarded per-vertex
    /// placements in index order.
    Polygon { iteration: u64, vertices: Vec<Point3> },
}

/// Full record of a minimization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimizeRun {
    pub config: MinimizeConfig,
    pub initial_vertices: Vec<Point3>,
    pub final_vertices: Vec<Point3>,
    /// (iteration, best value so far); nonincreasing in the value.
    pub best_trace: Vec<(u64, f64)>,
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub initial_energy: f64,
    #[serde(serialize_with = "ser_extended", deserialize_with = "de_extended")]
    pub final_energy: f64,
    pub accepted: u64,
    pub rejected: u64,
    pub crossing_rejected: u64,
    /// First iteration at which the trailing-window acceptance rate fell
    /// below 0.1%, if it ever did.
    pub stagnated_at: Option<u64>,
    pub moves: Vec<MoveRecord>,
}

impl MinimizeRun {
    pub fn final_polygon(&self) -> PolygonalKnot {
        PolygonalKnot::new(self.final_vertices.clone()).expect("run ended on a valid polygon")
    }
}

/// Sweeps each vertex toward equalizing its two adjacent edge lengths at
/// L/n, then rescales about the centroid so the total length is exactly
/// the input length. Stops once max |edge - L/n| <= tol * L.
pub fn project_equilateral(
    p: &PolygonalKnot,
    tol: f64,
    max_sweeps: usize,
) -> Result<PolygonalKnot, MinimizeError> {
    let n = p.num_vertices();
    let target_total = p.total_length();
    let target = target_total / n as f64;
    let mut vertices: Vec<Point3> = p.vertices().to_vec();

    let residual = |vertices: &[Point3]| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let len = vertices[i].dist(vertices[(i + 1) % n]);
            worst = worst.max((len - target).abs());
        }
        worst
    };

    let mut res = residual(&vertices);
    let mut sweeps = 0;
    while res > tol * target_total {
        if sweeps >= max_sweeps {
            return Err(MinimizeError::ProjectionStalled { sweeps, residual: res });
        }
        for i in 0..n {
            let prev = vertices[(i + n - 1) % n];
            let next = vertices[(i + 1) % n];
            let v = vertices[i];
            let d_in = (v - prev).normalized();
            let d_out = (next - v).normalized();
            if let (Some(din), Some(dout)) = (d_in, d_out) {
                // Average of the two positions that would fix each edge.
                let fix_in = prev + din * target;
                let fix_out = next - dout * target;
                vertices[i] = (fix_in + fix_out) * 0.5;
            }
        }
        res = residual(&vertices);
        sweeps += 1;
    }

    // Exact length normalization; uniform scaling is an ambient similarity.
    let interim = PolygonalKnot::new(vertices).map_err(|_| MinimizeError::ProjectionStalled {
        sweeps,
        residual: res,
    })?;
    let factor = target_total / interim.total_length();
    interim
        .scaled_about(interim.centroid(), factor)
        .map_err(|_| MinimizeError::ProjectionStalled { sweeps, residual: res })
}

/// Outcome of pushing one raw vertex proposal through the guarded
/// projection pipeline.
enum MoveOutcome {
    Crossing,
    ProjectionFailed,
    Candidate(PolygonalKnot),
}

/// Raw check, projection with the class length pinned, and the guarded
/// per-vertex chain from the pre-move polygon to the projected result.
/// Pinning the length matters: inverse thickness scales like 1/lambda, so
/// without it the chain would simply inflate the polygon.
fn apply_vertex_move(
    p: &PolygonalKnot,
    vertex: usize,
    position: Point3,
    tol: f64,
    class_length: f64,
) -> MoveOutcome {
    let n = p.num_vertices();
    if position == p.vertex((vertex + 1) % n) || position == p.vertex((vertex + n - 1) % n) {
        return MoveOutcome::Crossing;
    }
    if sweep_crossing_check(p, vertex, position) {
        return MoveOutcome::Crossing;
    }
    let Ok(moved) = p.with_vertex(vertex, position) else {
        return MoveOutcome::Crossing;
    };
    let Ok(projected) = project_equilateral(&moved, tol, 500) else {
        return MoveOutcome::ProjectionFailed;
    };
    let factor = class_length / projected.total_length();
    let Ok(rescaled) = projected.scaled_about(projected.centroid(), factor) else {
        return MoveOutcome::ProjectionFailed;
    };
    match guarded_chain(p, vertex, position, &rescaled) {
        Some(final_poly) => MoveOutcome::Candidate(final_poly),
        None => MoveOutcome::Crossing,
    }
}

/// Walk from `p` to `target` one vertex at a time (the raw move first,
/// then each projected placement), checking every displacement. Returns
/// the final polygon when every step is crossing-free.
fn guarded_chain(
    p: &PolygonalKnot,
    raw_vertex: usize,
    raw_position: Point3,
    target: &PolygonalKnot,
) -> Option<PolygonalKnot> {
    let n = p.num_vertices();
    let mut current = p.with_vertex(raw_vertex, raw_position).ok()?;
    for k in 0..n {
        let goal = target.vertex(k);
        if current.vertex(k) == goal {
            continue;
        }
        if sweep_crossing_check(&current, k, goal) {
            return None;
        }
        current = current.with_vertex(k, goal).ok()?;
    }
    Some(current)
}

fn check_start(p0: &PolygonalKnot, cfg: &MinimizeConfig) -> Result<(), MinimizeError> {
    cfg.validate()?;
    let n = p0.num_vertices();
    let target = p0.total_length() / n as f64;
    let mut spread = 0.0f64;
    for i in 0..n {
        spread = spread.max((p0.edge_length(i) - target).abs());
    }
    // Start within 10x the projection tolerance; the annealer re-projects
    // continuously anyway.
    if spread > 10.0 * cfg.equilateral_tol * p0.total_length() {
        return Err(MinimizeError::NotEquilateral { spread, tol: cfg.equilateral_tol });
    }
    for i in 0..n {
        for j in (i + 2)..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a1, a2) = p0.edge(i);
            let (b1, b2) = p0.edge(j);
            let dist = segment_min_distance(a1, a2, b1, b2).distance;
            if dist == 0.0 {
                return Err(MinimizeError::NotEmbedded { i, j, dist });
            }
        }
    }
    Ok(())
}

/// Metropolis annealing over single-vertex Gaussian proposals.
///
/// Every proposal is crossing-checked, re-equilateralized by
/// [`project_equilateral`], and accepted by the Metropolis rule at the
/// current temperature. Deterministic for a given configuration and seed.
pub fn anneal(p0: &PolygonalKnot, cfg: &MinimizeConfig) -> Result<MinimizeRun, MinimizeError> {
    check_start(p0, cfg)?;
    let n = p0.num_vertices();
    let length = p0.total_length();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut current = p0.clone();
    let mut current_energy = cfg.objective.value(&current);
    if !current_energy.is_finite() {
        return Err(MinimizeError::DegenerateStart);
    }
    let initial_energy = current_energy;
    let mut best_energy = current_energy;
    let mut best_trace = vec![(0u64, best_energy)];
    let mut moves = Vec::new();
    let (mut accepted, mut rejected, mut crossing_rejected) = (0u64, 0u64, 0u64);
    let mut stagnated_at = None;
    let window = (cfg.iterations / 20).max(1000);
    let mut window_accepted = 0u64;

    for iteration in 1..=cfg.iterations {
        let epoch = (100 * (iteration - 1)) / cfg.iterations;
        let decay = cfg.cooling_factor.powi(epoch as i32);
        let step = cfg.initial_step * length * decay;
        let temperature = cfg.temperature_initial * decay;

        let vertex = rng.random_range(0..n);
        let offset = Point3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        ) * step;
        let proposal = current.vertex(vertex) + offset;

        match apply_vertex_move(&current, vertex, proposal, cfg.equilateral_tol, length) {
            MoveOutcome::Crossing => crossing_rejected += 1,
            MoveOutcome::ProjectionFailed => rejected += 1,
            MoveOutcome::Candidate(candidate) => {
                let candidate_energy = cfg.objective.value(&candidate);
                let delta = candidate_energy - current_energy;
                let accept = if !candidate_energy.is_finite() {
                    false
                } else if delta <= 0.0 {
                    true
                } else {
                    rng.random::<f64>() < (-delta / temperature).exp()
                };
                if accept {
                    current = candidate;
                    current_energy = candidate_energy;
                    accepted += 1;
                    window_accepted += 1;
                    moves.push(MoveRecord::VertexProposal { iteration, vertex, position: proposal });
                    if current_energy < best_energy {
                        best_energy = current_energy;
                        best_trace.push((iteration, best_energy));
                    }
                } else {
                    rejected += 1;
                }
            }
        }

        if iteration % cfg.log_every == 0 {
            best_trace.push((iteration, best_energy));
        }
        if iteration % window == 0 {
            if stagnated_at.is_none() && (window_accepted as f64) < 0.001 * window as f64 {
                stagnated_at = Some(iteration);
            }
            window_accepted = 0;
        }
    }

    Ok(MinimizeRun {
        config: cfg.clone(),
        initial_vertices: p0.vertices().to_vec(),
        final_vertices: current.vertices().to_vec(),
        best_trace,
        initial_energy,
        final_energy: current_energy,
        accepted,
        rejected,
        crossing_rejected,
        stagnated_at,
        moves,
    })
}

/// Finite-difference gradient descent with backtracking line search, under
/// the same crossing guards and equilateral projection as the annealer.
/// The energy decreases monotonically over accepted steps; a failed line
/// search terminates the run (converged to tolerance).
pub fn descend_fd(p0: &PolygonalKnot, cfg: &MinimizeConfig) -> Result<MinimizeRun, MinimizeError> {
    check_start(p0, cfg)?;
    let n = p0.num_vertices();
    let length = p0.total_length();
    let h = 1e-6 * length;

    let mut current = p0.clone();
    let mut current_energy = cfg.objective.value(&current);
    if !current_energy.is_finite() {
        return Err(MinimizeError::DegenerateStart);
    }
    let initial_energy = current_energy;
    let mut best_trace = vec![(0u64, current_energy)];
    let mut moves = Vec::new();
    let (mut accepted, mut rejected, mut crossing_rejected) = (0u64, 0u64, 0u64);

    'outer: for iteration in 1..=cfg.iterations {
        // Central-difference gradient on raw vertex coordinates.
        let mut gradient = vec![Point3::ORIGIN; n];
        let mut max_norm = 0.0f64;
        for v in 0..n {
            let base = current.vertex(v);
            let mut g = Point3::ORIGIN;
            for axis in 0..3 {
                let mut delta = Point3::ORIGIN;
                match axis {
                    0 => delta.x = h,
                    1 => delta.y = h,
                    _ => delta.z = h,
                }
                let plus = cfg.objective.value(&current.with_vertex(v, base + delta).unwrap());
                let minus = cfg.objective.value(&current.with_vertex(v, base - delta).unwrap());
                let d = if plus.is_finite() && minus.is_finite() {
                    (plus - minus) / (2.0 * h)
                } else {
                    0.0
                };
                match axis {
                    0 => g.x = d,
                    1 => g.y = d,
                    _ => g.z = d,
                }
            }
            max_norm = max_norm.max(g.norm());
            gradient[v] = g;
        }
        if max_norm == 0.0 {
            break;
        }

        // Initial step: largest vertex displacement = initial_step * L.
        let mut alpha = cfg.initial_step * length / max_norm;
        let mut stepped = false;
        for _ in 0..40 {
            let target: Vec<Point3> = (0..n)
                .map(|v| current.vertex(v) - gradient[v] * alpha)
                .collect();
            match descend_step(&current, &target, cfg.equilateral_tol, length) {
                StepOutcome::Crossing => {
                    crossing_rejected += 1;
                    alpha *= 0.5;
                }
                StepOutcome::Invalid => {
                    rejected += 1;
                    alpha *= 0.5;
                }
                StepOutcome::Candidate(candidate) => {
                    let e = cfg.objective.value(&candidate);
                    if e.is_finite() && e < current_energy {
                        moves.push(MoveRecord::Polygon {
                            iteration,
                            vertices: candidate.vertices().to_vec(),
                        });
                        current = candidate;
                        current_energy = e;
                        accepted += 1;
                        best_trace.push((iteration, current_energy));
                        stepped = true;
                        break;
                    }
                    rejected += 1;
                    alpha *= 0.5;
                }
            }
            if alpha * max_norm < 1e-14 * length {
                break 'outer;
            }
        }
        if !stepped {
            break;
        }
    }

    Ok(MinimizeRun {
        config: cfg.clone(),
        initial_vertices: p0.vertices().to_vec(),
        final_vertices: current.vertices().to_vec(),
        best_trace,
        initial_energy,
        final_energy: current_energy,
        accepted,
        rejected,
        crossing_rejected,
        stagnated_at: None,
        moves,
    })
}

enum StepOutcome {
    Crossing,
    Invalid,
    Candidate(PolygonalKnot),
}

/// One whole-polygon descent step: move to `target`, project with the
/// class length pinned, and verify the per-vertex chain from the current
/// state.
fn descend_step(
    current: &PolygonalKnot,
    target: &[Point3],
    tol: f64,
    class_length: f64,
) -> StepOutcome {
    let Ok(moved) = PolygonalKnot::new(target.to_vec()) else {
        return StepOutcome::Invalid;
    };
    let Ok(projected) = project_equilateral(&moved, tol, 500) else {
        return StepOutcome::Invalid;
    };
    let factor = class_length / projected.total_length();
    let Ok(rescaled) = projected.scaled_about(projected.centroid(), factor) else {
        return StepOutcome::Invalid;
    };
    match polygon_chain(current, &rescaled) {
        Some(p) => StepOutcome::Candidate(p),
        None => StepOutcome::Crossing,
    }
}

fn polygon_chain(from: &PolygonalKnot, to: &PolygonalKnot) -> Option<PolygonalKnot> {
    let n = from.num_vertices();
    let mut current = from.clone();
    for k in 0..n {
        let goal = to.vertex(k);
        if current.vertex(k) == goal {
            continue;
        }
        if sweep_crossing_check(&current, k, goal) {
            return None;
        }
        current = current.with_vertex(k, goal).ok()?;
    }
    Some(current)
}

/// Replay statistics: violations must be zero for a valid run.
#[derive(Clone, Copy, Debug, Default)]
pub struct ReplayStats {
    pub moves_applied: usize,
    pub crossing_violations: usize,
}

/// Re-applies a recorded move log from the initial polygon, re-running
/// every crossing check. A move that now trips a guard is counted as a
/// violation and skipped; a run is class-preserving exactly when
/// `crossing_violations == 0` and the reconstruction matches the recorded
/// final state bit for bit.
pub fn replay(
    p0: &PolygonalKnot,
    moves: &[MoveRecord],
    equilateral_tol: f64,
) -> Result<(PolygonalKnot, ReplayStats), MinimizeError> {
    let class_length = p0.total_length();
    let mut current = p0.clone();
    let mut stats = ReplayStats::default();
    for (index, record) in moves.iter().enumerate() {
        match record {
            MoveRecord::VertexProposal { vertex, position, .. } => {
                match apply_vertex_move(&current, *vertex, *position, equilateral_tol, class_length)
                {
                    MoveOutcome::Candidate(next) => {
                        current = next;
                        stats.moves_applied += 1;
                    }
                    MoveOutcome::Crossing => stats.crossing_violations += 1,
                    MoveOutcome::ProjectionFailed => {
                        return Err(MinimizeError::ReplayDiverged {
                            index,
                            reason: "projection failed on replay".into(),
                        });
                    }
                }
            }
            MoveRecord::Polygon { vertices, .. } => {
                let Ok(target) = PolygonalKnot::new(vertices.clone()) else {
                    return Err(MinimizeError::ReplayDiverged {
                        index,
                        reason: "recorded polygon is invalid".into(),
                    });
                };
                match polygon_chain(&current, &target) {
                    Some(next) => {
                        current = next;
                        stats.moves_applied += 1;
                    }
                    None => stats.crossing_violations += 1,
                }
            }
        }
    }
    Ok((current, stats))
}

/// Regular n-gon with every vertex jittered by a Gaussian of the given
/// magnitude (fraction of total length), re-equilateralized. The standard
/// perturbed starting point for unknot runs.
pub fn perturbed_ngon(n: usize, magnitude: f64, seed: u64) -> PolygonalKnot {
    let base = crate::geom::regular_ngon(n).expect("n >= 3");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = magnitude * base.total_length();
    loop {
        let vertices: Vec<Point3> = base
            .vertices()
            .iter()
            .map(|&v| {
                v + Point3::new(
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                    rng.sample::<f64, _>(StandardNormal),
                ) * scale
            })
            .collect();
        let Ok(poly) = PolygonalKnot::new(vertices) else { continue };
        let Ok(projected) = project_equilateral(&poly, 1e-13, 2000) else { continue };
        // Rescale to unit length exactly like the base polygon.
        let factor = base.total_length() / projected.total_length();
        let Ok(out) = projected.scaled_about(projected.centroid(), factor) else { continue };
        if out.is_equilateral() {
            return out;
        }
    }
}

/// The committed 24-vertex equilateral trefoil (equilateral inscription of
/// the standard (2,3) torus knot), the reproducible seed geometry for
/// knotted runs.
pub fn standard_trefoil() -> PolygonalKnot {
    let text = include_str!("../data/trefoil24.txt");
    crate::io::parse_polygon_text(text).expect("committed trefoil data is valid")
}
