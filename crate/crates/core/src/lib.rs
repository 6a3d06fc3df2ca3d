//! Numerical toolkit for Scherk-type minimal graphs over geodesic discs.
//!
//! * [`geometry`]: distances, boundary parametrization, geodesic arcs and
//!   polygons in the conformal disc model, hyperbolic or flat.
//! * [`domains`]: balanced quadrilaterals, regular trapezoids, admissibility,
//!   perturbed attachments, compact cores and the iterated sequence.
//! * [`solver`]: P1 finite elements for `div_g(X_u) = f`, Newton, capped
//!   infinite Dirichlet data.
//! * [`fatou`]: hypothesis checks, compression, total variation and ray
//!   classification.
//!
//! [`example`] runs the whole iterated construction.

pub mod domains;
pub mod error;
pub mod example;
pub mod fatou;
pub mod geometry;
pub mod roots;
pub mod solver;

pub use error::{Error, Result};
pub use geometry::{DiscSpec, GeodesicArc, GeodesicPolygon, MetricModel, Point};
