//! Scripted studies: convergence rates of inscribed-polygon energies,
//! the explicit minimum-distance error bound, recovery sequences, and
//! minimizer trends across segment counts.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curves::{inscribe_equilateral, inscribe_uniform, CurveProvider, InscribeError};
use crate::energy::EnergyKind;
use crate::geom::PolygonalKnot;
use crate::minimize::{anneal, perturbed_ngon, standard_trefoil, MinimizeConfig, Objective};
use crate::reference::ReferenceValue;
use crate::thickness::thickness_discrete;

#[derive(Debug, Error)]
pub enum StudyError {
    #[error("need at least 3 ladder points, got {got}")]
    LadderTooShort { got: usize },
    #[error("ladder must be strictly increasing")]
    LadderNotIncreasing,
    #[error(transparent)]
    Inscribe(#[from] InscribeError),
    #[error("energy degenerate at n = {n}")]
    Degenerate { n: usize },
    #[error(transparent)]
    Minimize(#[from] crate::minimize::MinimizeError),
}

/// Per-n energies and errors against a reference, with the fitted
/// convergence order (least squares of log error against log n; the order
/// is the negated slope). The fit is refused when any error underflows
/// 10x the machine precision of the reference.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConvergenceStudy {
    pub curve: String,
    pub energy: String,
    pub ns: Vec<usize>,
    pub energies: Vec<f64>,
    pub errors: Vec<f64>,
    pub reference: ReferenceValue,
    /// Fitted order of convergence (positive for shrinking errors).
    pub order: Option<f64>,
    pub fit_residual: Option<f64>,
}

impl ConvergenceStudy {
    /// CSV rendering with the fixed column order n,energy,reference,error.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,energy,reference,error\n");
        for (i, &n) in self.ns.iter().enumerate() {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                n, self.energies[i], self.reference.value, self.errors[i]
            ));
        }
        out
    }
}

/// Least-squares slope of log(err) on log(n), returned as the positive
/// convergence order with the RMS fit residual.
pub fn fit_log_log(ns: &[usize], errors: &[f64]) -> (f64, f64) {
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = errors.iter().map(|&e| e.ln()).collect();
    let n = xs.len() as f64;
    let mean_x = xs.iter().sum::<f64>() / n;
    let mean_y = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let mut residual = 0.0;
    for (x, y) in xs.iter().zip(&ys) {
        let fit = slope * x + intercept;
        residual += (y - fit) * (y - fit);
    }
    (-slope, (residual / n).sqrt())
}

fn inscribe_for(
    kind: EnergyKind,
    curve: &dyn CurveProvider,
    n: usize,
) -> Result<PolygonalKnot, InscribeError> {
    // Möbius convergence is stated for arc-uniform subdivisions; Menger and
    // thickness for inscribed equilateral polygons. On a circle these agree.
    match kind {
        EnergyKind::Moebius | EnergyKind::MinDistance => inscribe_uniform(curve, n),
        EnergyKind::Menger { .. } | EnergyKind::Thickness => {
            inscribe_equilateral(curve, n, 1e-10)
        }
    }
}

/// Evaluates the energy on inscribed polygons for each n and fits the
/// convergence order of the error against the reference. For thickness the
/// study tracks the inverse (the energy-like quantity 1/thickness).
pub fn convergence_study(
    curve: &dyn CurveProvider,
    curve_name: &str,
    kind: EnergyKind,
    ns: &[usize],
    reference: &ReferenceValue,
) -> Result<ConvergenceStudy, StudyError> {
    if ns.len() < 3 {
        return Err(StudyError::LadderTooShort { got: ns.len() });
    }
    if !ns.windows(2).all(|w| w[0] < w[1]) {
        return Err(StudyError::LadderNotIncreasing);
    }
    let mut energies = Vec::with_capacity(ns.len());
    let mut errors = Vec::with_capacity(ns.len());
    for &n in ns {
        let poly = inscribe_for(kind, curve, n)?;
        let value = match kind {
            EnergyKind::Thickness => {
                let t = thickness_discrete(&poly).value;
                if t == 0.0 {
                    return Err(StudyError::Degenerate { n });
                }
                1.0 / t
            }
            other => {
                let report = other.evaluate(&poly);
                if !report.value.is_finite() {
                    return Err(StudyError::Degenerate { n });
                }
                report.value
            }
        };
        energies.push(value);
        errors.push((value - reference.value).abs());
    }
    let floor = 10.0 * f64::EPSILON * reference.value.abs();
    let (order, fit_residual) = if errors.iter().all(|&e| e > floor) {
        let (order, residual) = fit_log_log(ns, &errors);
        (Some(order), Some(residual))
    } else {
        (None, None)
    };
    Ok(ConvergenceStudy {
        curve: curve_name.to_string(),
        energy: kind.label(),
        ns: ns.to_vec(),
        energies,
        errors,
        reference: reference.clone(),
        order,
        fit_residual,
    })
}

/// One row of the explicit bound check: the measured minimum-distance
/// energy error against 290 / (Delta^{1/4} n^{1/4}).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawdonRow {
    pub n: usize,
    pub md_energy: f64,
    pub actual_error: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RawdonReport {
    pub curve: String,
    pub moebius_reference: f64,
    pub thickness: f64,
    pub rows: Vec<RawdonRow>,
    /// Smallest tested n from which the bound holds onward.
    pub holds_from: Option<usize>,
}

/// Checks |E - E_md_n| <= 290 Delta^{-1/4} n^{-1/4} on polygons dividing
/// the curve into n equal arcs, reporting the smallest tested n from which
/// the bound holds.
pub fn rawdon_bound_check(
    curve: &dyn CurveProvider,
    curve_name: &str,
    moebius_reference: f64,
    thickness: f64,
    ns: &[usize],
) -> Result<RawdonReport, StudyError> {
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let poly = inscribe_uniform(curve, n)?;
        let report = EnergyKind::MinDistance.evaluate(&poly);
        if !report.value.is_finite() {
            return Err(StudyError::Degenerate { n });
        }
        let actual_error = (moebius_reference - report.value).abs();
        let bound = 290.0 / thickness.powf(0.25) / (n as f64).powf(0.25);
        rows.push(RawdonRow { n, md_energy: report.value, actual_error, bound, holds: actual_error <= bound });
    }
    let mut holds_from = None;
    for (idx, row) in rows.iter().enumerate() {
        if rows[idx..].iter().all(|r| r.holds) {
            holds_from = Some(row.n);
            break;
        }
    }
    Ok(RawdonReport {
        curve: curve_name.to_string(),
        moebius_reference,
        thickness,
        rows,
        holds_from,
    })
}

/// Recovery-sequence data: inscribed polygons converge to the curve in the
/// uniform norm while their energies converge to the smooth reference.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaRecoveryReport {
    pub curve: String,
    pub energy: String,
    pub ns: Vec<usize>,
    /// Max over matched arc positions of |polygon(t) - curve(t)|.
    pub uniform_distances: Vec<f64>,
    pub energies: Vec<f64>,
    pub reference: f64,
}

/// Uniform distance between the inscribed polygon and the curve under the
/// arc-length matching of the subdivision, sampled 16 times per edge.
fn uniform_distance(curve: &dyn CurveProvider, poly: &PolygonalKnot, arcs: &[f64]) -> f64 {
    let n = poly.num_vertices();
    let mut worst = 0.0f64;
    for i in 0..n {
        let (a, b) = poly.edge(i);
        let (s0, s1) = (arcs[i], arcs[i + 1]);
        for k in 0..=16 {
            let w = k as f64 / 16.0;
            let on_poly = a + (b - a) * w;
            let on_curve = curve.point_at(s0 + (s1 - s0) * w);
            worst = worst.max(on_poly.dist(on_curve));
        }
    }
    worst
}

/// Verifies the recovery direction at desk scale: uniform distances and
/// energy errors both heading to zero along the ladder.
pub fn gamma_recovery(
    curve: &dyn CurveProvider,
    curve_name: &str,
    kind: EnergyKind,
    ns: &[usize],
    reference: &ReferenceValue,
) -> Result<GammaRecoveryReport, StudyError> {
    let length = curve.total_length();
    let mut uniform_distances = Vec::with_capacity(ns.len());
    let mut energies = Vec::with_capacity(ns.len());
    for &n in ns {
        let poly = inscribe_uniform(curve, n)?;
        let arcs: Vec<f64> = (0..=n).map(|i| i as f64 * length / n as f64).collect();
        uniform_distances.push(uniform_distance(curve, &poly, &arcs));
        let value = match kind {
            EnergyKind::Thickness => {
                let t = thickness_discrete(&poly).value;
                if t == 0.0 {
                    return Err(StudyError::Degenerate { n });
                }
                1.0 / t
            }
            other => other.evaluate(&poly).value,
        };
        energies.push(value);
    }
    Ok(GammaRecoveryReport {
        curve: curve_name.to_string(),
        energy: kind.label(),
        ns: ns.to_vec(),
        uniform_distances,
        energies,
        reference: reference.value,
    })
}

/// Which starting family a minimizer trend uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrendKnot {
    Unknot,
    Trefoil,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendRow {
    pub n: usize,
    pub seed: u64,
    pub best_energy: f64,
    pub accepted: u64,
    pub crossing_rejected: u64,
}

/// Best annealed energies per segment count and seed. Heuristic evidence
/// only: no optimality certificate is claimed for any run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrendReport {
    pub knot: TrendKnot,
    pub objective: String,
    pub rows: Vec<TrendRow>,
    /// Best energy per n over seeds, in ladder order.
    pub best_per_n: Vec<(usize, f64)>,
}

pub fn minimizer_trend(
    knot: TrendKnot,
    objective: Objective,
    ns: &[usize],
    seeds: &[u64],
    iterations: u64,
) -> Result<TrendReport, StudyError> {
    let mut rows = Vec::new();
    let mut best_per_n = Vec::new();
    for &n in ns {
        let mut best = f64::INFINITY;
        for &seed in seeds {
            let p0 = match knot {
                TrendKnot::Unknot => perturbed_ngon(n, 5e-3, seed.wrapping_add(n as u64)),
                TrendKnot::Trefoil => standard_trefoil(),
            };
            let mut cfg = MinimizeConfig::new(objective, iterations, seed);
            cfg.initial_step = 0.01;
            cfg.temperature_initial = 0.1;
            let run = anneal(&p0, &cfg)?;
            best = best.min(run.final_energy);
            rows.push(TrendRow {
                n,
                seed,
                best_energy: run.final_energy,
                accepted: run.accepted,
                crossing_rejected: run.crossing_rejected,
            });
        }
        best_per_n.push((n, best));
    }
    Ok(TrendReport { knot, objective: objective.label(), rows, best_per_n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::Circle;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn slope_fit_recovers_known_order() {
        let ns = [32usize, 64, 128, 256];
        let errors: Vec<f64> = ns.iter().map(|&n| 7.3 / n as f64).collect();
        let (order, residual) = fit_log_log(&ns, &errors);
        assert!((order - 1.0).abs() < 1e-12);
        assert!(residual < 1e-12);
        let errors2: Vec<f64> = ns.iter().map(|&n| 2.0 / (n as f64).powi(2)).collect();
        let (order2, _) = fit_log_log(&ns, &errors2);
        assert!((order2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn circle_moebius_study_has_first_order() {
        let circle = Circle::unit();
        let reference = ReferenceValue::circle_moebius();
        let study = convergence_study(
            &circle,
            "circle",
            EnergyKind::Moebius,
            &[32, 64, 128, 256],
            &reference,
        )
        .unwrap();
        for w in study.errors.windows(2) {
            assert!(w[1] < w[0], "errors must decrease: {:?}", study.errors);
        }
        let order = study.order.unwrap();
        assert!((0.8..=1.2).contains(&order), "order {order}");
    }

    #[test]
    fn circle_menger_errors_decrease() {
        let circle = Circle::unit();
        let reference = ReferenceValue::circle_menger(2.0);
        let study = convergence_study(
            &circle,
            "circle",
            EnergyKind::Menger { s: 2.0 },
            &[16, 32, 64],
            &reference,
        )
        .unwrap();
        for w in study.errors.windows(2) {
            assert!(w[1] < w[0]);
        }
    }

    #[test]
    fn circle_thickness_study_converges() {
        let circle = Circle::unit();
        let reference = ReferenceValue::closed_form(2.0 * PI); // inverse thickness
        let study = convergence_study(
            &circle,
            "circle",
            EnergyKind::Thickness,
            &[16, 32, 64, 128],
            &reference,
        )
        .unwrap();
        for w in study.errors.windows(2) {
            assert!(w[1] < w[0]);
        }
        // 1/Delta of the inscribed n-gon is 2 pi / cos(pi/n).
        let want = 2.0 * PI / (PI / 128.0).cos();
        assert!((study.energies[3] - want).abs() < 1e-9);
    }

    #[test]
    fn csv_column_order_is_fixed() {
        let circle = Circle::unit();
        let reference = ReferenceValue::circle_moebius();
        let study = convergence_study(
            &circle,
            "circle",
            EnergyKind::Moebius,
            &[8, 16, 32],
            &reference,
        )
        .unwrap();
        let csv = study.to_csv();
        assert!(csv.starts_with("n,energy,reference,error\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn study_rejects_bad_ladders() {
        let circle = Circle::unit();
        let reference = ReferenceValue::circle_moebius();
        assert!(matches!(
            convergence_study(&circle, "circle", EnergyKind::Moebius, &[8, 16], &reference),
            Err(StudyError::LadderTooShort { got: 2 })
        ));
        assert!(matches!(
            convergence_study(&circle, "circle", EnergyKind::Moebius, &[16, 8, 32], &reference),
            Err(StudyError::LadderNotIncreasing)
        ));
    }

    #[test]
    fn slope_fit_is_refused_at_the_precision_floor() {
        // Make the reference coincide with one rung so its error underflows.
        let circle = Circle::unit();
        let probe = convergence_study(
            &circle,
            "circle",
            EnergyKind::Moebius,
            &[8, 16, 32],
            &ReferenceValue::circle_moebius(),
        )
        .unwrap();
        let pinned = ReferenceValue::closed_form(probe.energies[1]);
        let study = convergence_study(&circle, "circle", EnergyKind::Moebius, &[8, 16, 32], &pinned)
            .unwrap();
        assert!(study.order.is_none());
        assert!(study.fit_residual.is_none());
    }

    #[test]
    fn minimizer_trend_tracks_the_ngon_bound() {
        let report = minimizer_trend(
            TrendKnot::Unknot,
            crate::minimize::Objective::InverseThickness,
            &[8],
            &[1],
            8_000,
        )
        .unwrap();
        let (n, best) = report.best_per_n[0];
        let closed_form = 2.0 * n as f64 * (PI / n as f64).tan();
        // Prop-16-style bound: the regular n-gon value is a hard floor.
        assert!(best >= closed_form * (1.0 - 1e-9));
        assert!(best < closed_form * 1.05, "annealer far off: {best} vs {closed_form}");
    }

    #[test]
    fn rawdon_bound_holds_on_circle() {
        let circle = Circle::unit();
        let report = rawdon_bound_check(
            &circle,
            "circle",
            4.0,
            1.0 / (2.0 * PI),
            &[32, 64, 128, 256],
        )
        .unwrap();
        assert_eq!(report.holds_from, Some(32));
        // Inscribed circle polygons are regular n-gons, so the
        // minimum-distance energy vanishes and the actual error is the
        // Möbius reference itself.
        for row in &report.rows {
            assert!(row.md_energy.abs() < 1e-9);
            assert!((row.actual_error - 4.0).abs() < 1e-9);
            assert!(row.bound > row.actual_error);
        }
        // Plug-in value at n = 256: 290 (2 pi)^{1/4} / 256^{1/4} = 114.78.
        let bound_256 = 290.0 * (2.0 * PI).powf(0.25) / 256.0f64.powf(0.25);
        assert!((report.rows[3].bound - bound_256).abs() < 1e-9);
        assert!((bound_256 - 114.78).abs() < 0.01);
    }

    #[test]
    fn gamma_recovery_on_circle() {
        let circle = Circle::unit();
        let reference = ReferenceValue::circle_moebius();
        let report = gamma_recovery(
            &circle,
            "circle",
            EnergyKind::Moebius,
            &[8, 16, 32, 64],
            &reference,
        )
        .unwrap();
        // Chord-arc sagitta bound: (arc/2)^2 * kappa / 2.
        for (i, &n) in report.ns.iter().enumerate() {
            let arc = 1.0 / n as f64;
            let bound = (arc / 2.0) * (arc / 2.0) * (2.0 * PI) / 2.0;
            assert!(
                report.uniform_distances[i] <= bound * 1.01,
                "n = {n}: {} > {bound}",
                report.uniform_distances[i]
            );
        }
        for w in report.uniform_distances.windows(2) {
            assert!(w[1] < w[0]);
        }
        let last_gap = (report.energies.last().unwrap() - 4.0).abs();
        let first_gap = (report.energies[0] - 4.0).abs();
        assert!(last_gap < first_gap);
    }
}
