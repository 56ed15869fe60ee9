//! Discrete knot energies on polygonal knots.
//!
//! The crate computes four energies of closed polygons — the discrete Möbius
//! energy, Simon's minimum distance energy, discrete integral Menger curvature
//! and discrete thickness (ropelength) — together with the machinery around
//! them: inscription of polygons in analytic curves, reference values of the
//! smooth energies, knot-class-preserving minimization by annealing, and
//! convergence studies.
//!
//! Entry points:
//! - [`geom`]: points, [`geom::PolygonalKnot`], circumradius, regular n-gons.
//! - [`segment`]: segment distances and the swept-triangle crossing guard.
//! - [`curves`]: arc-length curve providers (circle, torus knots) and
//!   inscription of uniform/equilateral polygons.
//! - [`energy`], [`thickness`]: the four discrete energies.
//! - [`reference`]: smooth reference values via inscribed-polygon ladders.
//! - [`minimize`]: equilateral projection, Metropolis annealing, descent.
//! - [`experiments`]: convergence-rate, recovery-sequence and bound studies.
//! - [`io`], [`cli`]: polygon file formats, canonical JSON reports, the
//!   `knotforge` command line.
//!
//! Runnable examples for each capability live under `examples/`.

pub mod cli;
pub mod curves;
pub mod energy;
pub mod experiments;
pub mod geom;
pub mod io;
pub mod minimize;
pub mod numeric;
pub mod reference;
pub mod segment;
pub mod shape;
pub mod thickness;

pub use curves::{inscribe_equilateral, inscribe_uniform, Circle, CurveProvider, TorusKnot};
pub use energy::{
    menger_discrete, min_distance_energy, min_distance_u, moebius_discrete, EnergyKind,
    EnergyReport,
};
pub use geom::{circumradius, menger_kappa, regular_ngon, Point3, PolygonalKnot};
pub use minimize::{anneal, descend_fd, project_equilateral, MinimizeConfig, MinimizeRun};
pub use thickness::{dcrit, dcsd, discrete_kappa, minrad, ropelength_discrete, thickness_discrete};

/// Library version string.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
