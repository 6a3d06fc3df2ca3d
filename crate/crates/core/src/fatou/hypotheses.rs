use serde::{Deserialize, Serialize};

use crate::geometry::{MetricModel, Point};
use crate::solver::{elements, Field, MeshShape, OperatorSpec, Variant};
use crate::{Error, Result};

/// `δ` for which `W ≥ δ |∇u|` on the unit disc in the Heisenberg case.
pub const HEISENBERG_DELTA: f64 = 0.3;

/// Pointwise tolerance for the coercivity and identity checks.
const POINTWISE_TOL: f64 = 1e-9;

/// Bounds of the polar density `G` on an annulus of geodesic radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GBounds {
    pub annulus: [f64; 2],
    pub alpha_lo: f64,
    pub beta_hi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluxBound {
    /// `max |X_u|_g` over quadrature points.
    pub m: f64,
    /// `1` for the graph operators, none for the harmonic one.
    pub declared: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Coercivity {
    pub delta: f64,
    /// `min (g(∇u, X_u) - δ|∇u| - h)` over quadrature points.
    pub min_residual: f64,
    /// `∫ |h| dA_g`.
    pub int_abs_h: f64,
    /// `max |h|` over quadrature points.
    pub max_abs_h: f64,
    /// `∫ |f| dA_g`.
    pub int_abs_f: f64,
    /// `∫ dA_g` over the mesh.
    pub area: f64,
    /// Heisenberg only: `max |g(∇u, X_u) - (W + h)|` with `h` in closed form.
    pub identity_error: Option<f64>,
    /// Heisenberg only: `max |g(∇u, X_u) W - |∇u|² - (y u_x - x u_y)/2|`.
    pub product_identity_error: Option<f64>,
    /// Heisenberg only: `min (W - |∇u|)` where `|∇u| ≤ 5/4`.
    pub small_gradient_margin: Option<f64>,
    /// Heisenberg only: `min (W - 3|∇u|/10)` where `|∇u| > 5/4`.
    pub large_gradient_margin: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdicts {
    pub a: bool,
    pub b: bool,
    pub c: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub variant: Variant,
    pub g_bounds: GBounds,
    pub flux_bound: FluxBound,
    pub coercivity: Coercivity,
    pub verdicts: Verdicts,
}

impl HypothesisReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// `h = -(1 + (y u_x - x u_y)/2 + (x² + y²)/4) / W` for the Heisenberg flux.
pub fn heisenberg_h(x: Point, grad: [f64; 2]) -> f64 {
    let twist = x.y * grad[0] - x.x * grad[1];
    let w2 = 1.0 + grad[0] * grad[0] + grad[1] * grad[1] + twist + 0.25 * x.norm_sq();
    -(1.0 + 0.5 * twist + 0.25 * x.norm_sq()) / w2.sqrt()
}

/// The `h` in `g(∇u, X_u) ≥ δ|∇u| + h` for each operator.
///
/// For the graph operators `g(∇u, X_u) = W + h`; the harmonic one uses
/// `|∇u|² ≥ δ|∇u| - δ²/4`.
fn h_term(op: &OperatorSpec, delta: f64, x: Point, grad: [f64; 2]) -> f64 {
    match op.variant {
        Variant::HeisenbergKilling => heisenberg_h(x, grad),
        Variant::MinimalEuclidean | Variant::MinimalHyperbolic => -1.0 / op.w(x, grad),
        Variant::Harmonic => -0.25 * delta * delta,
    }
}

fn g_bounds(model: MetricModel, annulus: [f64; 2]) -> Result<GBounds> {
    let [lo, hi] = annulus;
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Invalid(format!("annulus needs 0 < lo < hi, got {annulus:?}")));
    }
    // G is increasing in ρ for both models
    Ok(GBounds {
        annulus,
        alpha_lo: model.polar_density(lo, 0.0)?,
        beta_hi: model.polar_density(hi, 0.0)?,
    })
}

pub fn check_hypotheses(field: &Field, op: &OperatorSpec, delta: f64, annulus: [f64; 2]) -> Result<HypothesisReport> {
    let MeshShape::Disc(disc) = field.mesh.shape else {
        return Err(Error::UnsupportedDomain("hypotheses are checked on disc meshes only".into()));
    };
    if !(delta > 0.0) {
        return Err(Error::Invalid(format!("delta must be positive, got {delta}")));
    }
    if op.metric != disc.model {
        return Err(Error::Invalid("operator and field use different metrics".into()));
    }
    let g = g_bounds(disc.model, annulus)?;
    let heis = op.variant == Variant::HeisenbergKilling;

    let mut m: f64 = 0.0;
    let mut min_res = f64::INFINITY;
    let (mut int_h, mut int_f, mut area, mut max_h) = (0.0, 0.0, 0.0, 0.0f64);
    let (mut id_err, mut prod_err) = (0.0f64, 0.0f64);
    let (mut small, mut large) = (f64::INFINITY, f64::INFINITY);
    for (e, &grad) in elements(&field.mesh).iter().zip(&field.gradients) {
        for &x in &e.qp {
            let lam = op.metric.conformal_factor(x);
            let wq = e.area / 3.0 * lam * lam;
            let xu = op.flux(x, grad);
            m = m.max(op.flux_norm(x, grad));
            // g(∇_g u, X) = λ² (λ⁻² ∇u)·X
            let pairing = grad[0] * xu[0] + grad[1] * xu[1];
            let gnorm = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt() / lam;
            let h = h_term(op, delta, x, grad);
            min_res = min_res.min(pairing - delta * gnorm - h);
            int_h += wq * h.abs();
            int_f += wq * op.source.eval(x).abs();
            area += wq;
            max_h = max_h.max(h.abs());
            if heis {
                let w = op.w(x, grad);
                id_err = id_err.max((pairing - (w + h)).abs());
                let twist = x.y * grad[0] - x.x * grad[1];
                prod_err = prod_err.max((pairing * w - gnorm * gnorm - 0.5 * twist).abs());
                if gnorm <= 1.25 {
                    small = small.min(w - gnorm);
                } else {
                    large = large.min(w - HEISENBERG_DELTA * gnorm);
                }
            }
        }
    }
    let declared = match op.variant {
        Variant::Harmonic => None,
        _ => Some(1.0),
    };
    let coercivity = Coercivity {
        delta,
        min_residual: min_res,
        int_abs_h: int_h,
        max_abs_h: max_h,
        int_abs_f: int_f,
        area,
        identity_error: heis.then_some(id_err),
        product_identity_error: heis.then_some(prod_err),
        small_gradient_margin: heis.then_some(small),
        large_gradient_margin: heis.then_some(large),
    };
    let verdicts = Verdicts {
        a: g.alpha_lo > 0.0 && g.alpha_lo <= g.beta_hi && g.beta_hi.is_finite(),
        b: m.is_finite() && declared.map_or(true, |d| m <= d + POINTWISE_TOL),
        c: min_res >= -POINTWISE_TOL && int_h.is_finite() && identity_ok(id_err, heis),
    };
    Ok(HypothesisReport {
        variant: op.variant,
        g_bounds: g,
        flux_bound: FluxBound { m, declared },
        coercivity,
        verdicts,
    })
}

fn identity_ok(err: f64, heis: bool) -> bool {
    !heis || err <= POINTWISE_TOL
}
