use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geometry::{MetricModel, Point};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    MinimalEuclidean,
    MinimalHyperbolic,
    HeisenbergKilling,
    Harmonic,
}

impl Variant {
    pub fn name(self) -> &'static str {
        match self {
            Variant::MinimalEuclidean => "minimal_euclidean",
            Variant::MinimalHyperbolic => "minimal_hyperbolic",
            Variant::HeisenbergKilling => "heisenberg_killing",
            Variant::Harmonic => "harmonic",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        Ok(match name {
            "minimal_euclidean" => Variant::MinimalEuclidean,
            "minimal_hyperbolic" => Variant::MinimalHyperbolic,
            "heisenberg_killing" | "heisenberg" => Variant::HeisenbergKilling,
            "harmonic" => Variant::Harmonic,
            other => return Err(Error::Invalid(format!("unknown operator `{other}`"))),
        })
    }
}

pub type ScalarFn = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

/// Right-hand side `f` of `div_g X_u = f`.
#[derive(Clone, Default)]
pub enum Source {
    #[default]
    Zero,
    Constant(f64),
    Function(ScalarFn),
}

impl Source {
    #[inline]
    pub fn eval(&self, p: Point) -> f64 {
        match self {
            Source::Zero => 0.0,
            Source::Constant(c) => *c,
            Source::Function(f) => f(p),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Source::Zero)
    }
}

impl fmt::Debug for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Zero => write!(f, "Zero"),
            Source::Constant(c) => write!(f, "Constant({c})"),
            Source::Function(_) => write!(f, "Function(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct OperatorSpec {
    pub variant: Variant,
    pub metric: MetricModel,
    pub source: Source,
}

/// Coordinate flux density `q = λ² X` and its derivative `∂q/∂(∇u)`.
///
/// With `dA_g = λ² dx dy` and `g(X, ∇φ) = λ² X·∇φ`, the weak form of
/// `div_g X = f` is `∫ q·∇φ dx dy + ∫ λ² f φ dx dy = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluxDensity {
    pub q: [f64; 2],
    /// Symmetric positive definite.
    pub dq: [[f64; 2]; 2],
}

impl OperatorSpec {
    /// Checks that the variant is defined for the metric.
    pub fn new(variant: Variant, metric: MetricModel) -> Result<Self> {
        let ok = match variant {
            Variant::MinimalEuclidean | Variant::HeisenbergKilling => metric == MetricModel::Euclidean,
            Variant::MinimalHyperbolic => metric == MetricModel::Hyperbolic,
            Variant::Harmonic => true,
        };
        if !ok {
            return Err(Error::Invalid(format!(
                "operator {} is not defined on the {} metric",
                variant.name(),
                metric.name()
            )));
        }
        Ok(OperatorSpec {
            variant,
            metric,
            source: Source::Zero,
        })
    }

    pub fn with_source(mut self, source: Source) -> Self {
        self.source = source;
        self
    }

    /// Heisenberg `(α, β) = (y/2 + u_x, -x/2 + u_y)`.
    #[inline]
    pub fn heisenberg_ab(x: Point, grad: [f64; 2]) -> [f64; 2] {
        [0.5 * x.y + grad[0], -0.5 * x.x + grad[1]]
    }

    /// `W`: the area-element factor of the graph for each variant (1 for harmonic).
    #[inline]
    pub fn w(&self, x: Point, grad: [f64; 2]) -> f64 {
        match self.variant {
            Variant::MinimalEuclidean => (1.0 + grad[0] * grad[0] + grad[1] * grad[1]).sqrt(),
            Variant::MinimalHyperbolic => {
                let mu = self.metric.conformal_factor(x).powi(-2);
                (1.0 + mu * (grad[0] * grad[0] + grad[1] * grad[1])).sqrt()
            }
            Variant::HeisenbergKilling => {
                let [a, b] = Self::heisenberg_ab(x, grad);
                (1.0 + a * a + b * b).sqrt()
            }
            Variant::Harmonic => 1.0,
        }
    }

    /// The vector field `X_u` in coordinate components.
    pub fn flux(&self, x: Point, grad: [f64; 2]) -> [f64; 2] {
        let lam2 = self.metric.conformal_factor(x).powi(2);
        let q = self.density(x, grad).q;
        [q[0] / lam2, q[1] / lam2]
    }

    /// `|X_u|_g`.
    pub fn flux_norm(&self, x: Point, grad: [f64; 2]) -> f64 {
        let lam = self.metric.conformal_factor(x);
        let [a, b] = self.flux(x, grad);
        lam * (a * a + b * b).sqrt()
    }

    #[inline]
    pub fn density(&self, x: Point, grad: [f64; 2]) -> FluxDensity {
        let [px, py] = grad;
        match self.variant {
            Variant::Harmonic => FluxDensity {
                q: [px, py],
                dq: [[1.0, 0.0], [0.0, 1.0]],
            },
            Variant::MinimalEuclidean | Variant::HeisenbergKilling => {
                let v = if self.variant == Variant::HeisenbergKilling {
                    Self::heisenberg_ab(x, grad)
                } else {
                    grad
                };
                let w = (1.0 + v[0] * v[0] + v[1] * v[1]).sqrt();
                let (a, b) = (v[0] / w, v[1] / w);
                FluxDensity {
                    q: [a, b],
                    dq: [
                        [(1.0 - a * a) / w, -a * b / w],
                        [-a * b / w, (1.0 - b * b) / w],
                    ],
                }
            }
            Variant::MinimalHyperbolic => {
                // ∇_g u = λ⁻² ∇u and |∇_g u|_g = λ⁻¹ |∇u|
                let mu = self.metric.conformal_factor(x).powi(-2);
                let w = (1.0 + mu * (px * px + py * py)).sqrt();
                let w3 = w * w * w;
                FluxDensity {
                    q: [px / w, py / w],
                    dq: [
                        [1.0 / w - mu * px * px / w3, -mu * px * py / w3],
                        [-mu * px * py / w3, 1.0 / w - mu * py * py / w3],
                    ],
                }
            }
        }
    }

    /// `λ² f` at `x`.
    #[inline]
    pub fn weighted_source(&self, x: Point) -> f64 {
        if self.source.is_zero() {
            return 0.0;
        }
        self.metric.conformal_factor(x).powi(2) * self.source.eval(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn op(v: Variant) -> OperatorSpec {
        let m = if v == Variant::MinimalHyperbolic {
            MetricModel::Hyperbolic
        } else {
            MetricModel::Euclidean
        };
        OperatorSpec::new(v, m).unwrap()
    }

    #[test]
    fn heisenberg_values() {
        let h = op(Variant::HeisenbergKilling);
        assert_eq!(h.flux(Point::ORIGIN, [0.0, 0.0]), [0.0, 0.0]);
        let x = h.flux(Point::new(0.0, 1.0), [0.0, 0.0]);
        assert_abs_diff_eq!(x[0], 1.0 / 5f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.w(Point::new(0.0, 1.0), [0.0, 0.0]), 5f64.sqrt() / 2.0, epsilon = 1e-15);
    }

    #[test]
    fn minimal_flux_tends_to_unit_direction() {
        let m = op(Variant::MinimalEuclidean);
        let e = [0.6, 0.8];
        let mut prev = 0.0;
        for k in 0..9 {
            let t = 10f64.powi(k - 3);
            let f = m.flux(Point::ORIGIN, [t * e[0], t * e[1]]);
            let n = (f[0] * f[0] + f[1] * f[1]).sqrt();
            assert!(n > prev && n < 1.0);
            prev = n;
        }
        let f = m.flux(Point::ORIGIN, [1e8 * e[0], 1e8 * e[1]]);
        assert_abs_diff_eq!(f[0], e[0], epsilon = 1e-12);
        assert_abs_diff_eq!(f[1], e[1], epsilon = 1e-12);
    }

    #[test]
    fn mismatched_metric_rejected() {
        assert!(OperatorSpec::new(Variant::MinimalHyperbolic, MetricModel::Euclidean).is_err());
        assert!(OperatorSpec::new(Variant::HeisenbergKilling, MetricModel::Hyperbolic).is_err());
        assert!(OperatorSpec::new(Variant::Harmonic, MetricModel::Hyperbolic).is_ok());
    }

    proptest! {
        #[test]
        fn flux_bounded_and_derivative_matches(
            x in -0.45..0.45f64, y in -0.45..0.45f64,
            gx in -50.0..50.0f64, gy in -50.0..50.0f64,
            which in 0usize..4,
        ) {
            let v = [Variant::MinimalEuclidean, Variant::MinimalHyperbolic,
                     Variant::HeisenbergKilling, Variant::Harmonic][which];
            let o = op(v);
            let p = Point::new(x, y);
            if v != Variant::Harmonic {
                prop_assert!(o.flux_norm(p, [gx, gy]) <= 1.0 + 1e-12);
            }
            let d = o.density(p, [gx, gy]);
            // central differences of q
            let eps = 1e-6 * (1.0 + gx.abs().max(gy.abs()));
            for j in 0..2 {
                let mut gp = [gx, gy];
                let mut gm = [gx, gy];
                gp[j] += eps;
                gm[j] -= eps;
                let (qp, qm) = (o.density(p, gp).q, o.density(p, gm).q);
                for i in 0..2 {
                    let fd = (qp[i] - qm[i]) / (2.0 * eps);
                    prop_assert!((fd - d.dq[i][j]).abs() <= 1e-6 * (1.0 + d.dq[i][j].abs()));
                }
            }
            // positive definite
            let det = d.dq[0][0] * d.dq[1][1] - d.dq[0][1] * d.dq[1][0];
            prop_assert!(d.dq[0][0] > 0.0 && det > 0.0);
        }
    }
}
