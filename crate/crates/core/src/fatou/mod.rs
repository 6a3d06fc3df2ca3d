//! Radial-limit diagnostics on solved fields: hypothesis checks, the bounded
//! compression `ψ = η ∘ u`, its total variation and ray classification.

pub(crate) mod hypotheses;
mod rays;
mod tv;

pub use hypotheses::{check_hypotheses, Coercivity, FluxBound, GBounds, HypothesisReport, Verdicts, HEISENBERG_DELTA};
pub use rays::{fatou_report, trace_and_classify, FatouReport, Measure, RayClass, RayParams, RayTrace, MIN_RAYS};
pub use tv::{tv_integral, tv_tail_share};

use serde::{Deserialize, Serialize};

use crate::solver::Field;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Compression {
    /// `η(x) = (1 + tanh(x/2)) / 2`, range `(0, 1)`.
    Positive,
    /// `η - 1`, range `(-1, 0)`.
    Negative,
}

impl Compression {
    #[inline]
    pub fn eta(self, x: f64) -> f64 {
        let p = 0.5 * (1.0 + (0.5 * x).tanh());
        match self {
            Compression::Positive => p,
            Compression::Negative => p - 1.0,
        }
    }

    /// `sech²(x/2) / 4` for both kinds.
    #[inline]
    pub fn eta_prime(self, x: f64) -> f64 {
        let c = (0.5 * x).cosh();
        0.25 / (c * c)
    }

    pub fn range(self) -> (f64, f64) {
        match self {
            Compression::Positive => (0.0, 1.0),
            Compression::Negative => (-1.0, 0.0),
        }
    }
}

/// `ψ = η ∘ u` with `|∇ψ| = η'(u) |∇u|` on each triangle, `u` taken at the centroid.
#[derive(Debug, Clone)]
pub struct Compressed {
    pub kind: Compression,
    /// Nodal values `η(u_i)` on the field's mesh.
    pub psi: Field,
    /// Coordinate norm of `∇ψ` per triangle.
    pub grad_norm: Vec<f64>,
}

pub fn compress(field: &Field, c: Compression) -> Compressed {
    let psi = field.with_values(field.values.iter().map(|&u| c.eta(u)).collect());
    let grad_norm = field
        .mesh
        .triangles
        .iter()
        .zip(&field.gradients)
        .map(|(tri, g)| {
            let ubar = tri.iter().map(|&i| field.values[i]).sum::<f64>() / 3.0;
            c.eta_prime(ubar) * (g[0] * g[0] + g[1] * g[1]).sqrt()
        })
        .collect();
    Compressed { kind: c, psi, grad_norm }
}
