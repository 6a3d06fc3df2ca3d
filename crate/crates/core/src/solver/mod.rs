//! Finite-element solves of `div_g X_u = f` on meshed disc-model domains.
mod boundary;
mod fem;
mod field;
mod mesh;
mod operator;
mod solve;

pub use boundary::{BoundaryData, SideValue};
pub use fem::{SolveLog, SolveParams, MIN_DAMPING};
pub use field::Field;
pub use mesh::{triangulate, triangulate_scherk, Domain, Mesh, MeshShape, NodeKind, NODE_CAP};
pub use operator::{FluxDensity, OperatorSpec, ScalarFn, Source, Variant};
pub use solve::{check_caps, solve, solve_from, solve_scherk, solve_scherk_on};

pub(crate) use fem::elements;

/// Default continuation caps.
pub const DEFAULT_CAPS: [f64; 4] = [5.0, 10.0, 20.0, 40.0];
