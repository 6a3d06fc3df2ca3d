use std::f64::consts::TAU;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::geometry::{MetricModel, Point};
use crate::solver::{Field, MeshShape};
use crate::{Error, Result};

pub const MIN_RAYS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayParams {
    /// Samples at `1 - 2^{-k}`, `k = 1..=k_max`.
    pub k_max: usize,
    pub t_high: f64,
    pub eps_tail: f64,
    /// Scale each ray by its exit distance from the mesh instead of the disc radius.
    pub exit_normalized: bool,
    pub measure: Measure,
}

impl RayParams {
    /// `T_high = 0.8 cap`.
    pub fn for_cap(cap: f64) -> Self {
        RayParams {
            t_high: 0.8 * cap,
            ..Self::default()
        }
    }
}

impl Default for RayParams {
    fn default() -> Self {
        RayParams {
            k_max: 8,
            t_high: 16.0,
            eps_tail: 0.05,
            exit_normalized: true,
            measure: Measure::Angular,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Measure {
    /// Total `2π`.
    Angular,
    /// Angular times `sinh 1` (hyperbolic) or `1` (flat).
    ArcLength,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RayClass {
    Finite(f64),
    PlusInf,
    MinusInf,
    Undetermined,
}

impl RayClass {
    pub fn name(self) -> &'static str {
        match self {
            RayClass::Finite(_) => "finite",
            RayClass::PlusInf => "plus_inf",
            RayClass::MinusInf => "minus_inf",
            RayClass::Undetermined => "undetermined",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RayTrace {
    pub theta: f64,
    /// Geodesic radii of the samples.
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    pub class: RayClass,
    /// The ray left the mesh before the last sample.
    pub truncated: bool,
}

impl RayTrace {
    /// The same samples pushed through `η`, then reclassified.
    pub fn compressed(&self, c: super::Compression, params: &RayParams) -> RayTrace {
        let values: Vec<f64> = self.values.iter().map(|&u| c.eta(u)).collect();
        let class = if self.truncated || values.is_empty() {
            RayClass::Undetermined
        } else {
            classify(&values, params)
        };
        RayTrace {
            values,
            class,
            ..self.clone()
        }
    }
}

fn classify(values: &[f64], p: &RayParams) -> RayClass {
    let k = values.len();
    let last = values[k - 1];
    let rising = k >= 4 && (k - 3..k).all(|i| values[i] > values[i - 1]);
    let falling = k >= 4 && (k - 3..k).all(|i| values[i] < values[i - 1]);
    if last > p.t_high && rising {
        RayClass::PlusInf
    } else if last < -p.t_high && falling {
        RayClass::MinusInf
    } else if last.abs() <= p.t_high && k >= 2 && (last - values[k - 2]).abs() <= p.eps_tail {
        RayClass::Finite(last)
    } else {
        RayClass::Undetermined
    }
}

/// Geodesic distance from the origin at which the ray leaves the mesh.
fn exit_radius(field: &Field, theta: f64) -> f64 {
    let model = field.mesh.model;
    let dir = Point::polar(1.0, theta);
    let inside = |t: f64| field.locate(dir * t).is_some();
    let rmax = match model {
        MetricModel::Euclidean => field.mesh.nodes.iter().map(|p| p.norm()).fold(0.0, f64::max),
        MetricModel::Hyperbolic => field.mesh.nodes.iter().map(|p| p.norm()).fold(0.0, f64::max).min(1.0 - 1e-12),
    };
    if !inside(0.0) {
        return 0.0;
    }
    // march, then bisect the first crossing
    let step = 0.25 * field.mesh.h;
    let mut lo = 0.0;
    let mut hi = rmax;
    let mut t = step;
    while t < rmax {
        if !inside(t) {
            hi = t;
            break;
        }
        lo = t;
        t += step;
    }
    if hi == rmax && inside(rmax) {
        return model.geodesic_radius(rmax);
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    model.geodesic_radius(lo)
}

pub fn trace_and_classify(field: &Field, theta: f64, params: &RayParams) -> Result<RayTrace> {
    if params.k_max < 2 {
        return Err(Error::Invalid("at least two samples per ray".into()));
    }
    let model = field.mesh.model;
    let scale = match (params.exit_normalized, field.mesh.shape) {
        (false, MeshShape::Disc(d)) => d.geodesic_radius,
        (false, _) => 1.0,
        (true, _) => exit_radius(field, theta),
    };
    let mut radii = Vec::with_capacity(params.k_max);
    let mut values = Vec::with_capacity(params.k_max);
    let mut truncated = scale <= 0.0;
    for k in 1..=params.k_max {
        let rho = (1.0 - 0.5f64.powi(k as i32)) * scale;
        match field.value_at(model.polar_point(rho, theta)) {
            Some(v) if !truncated => {
                radii.push(rho);
                values.push(v);
            }
            _ => {
                truncated = true;
                break;
            }
        }
    }
    let class = if truncated || values.is_empty() {
        RayClass::Undetermined
    } else {
        classify(&values, params)
    };
    Ok(RayTrace {
        theta,
        radii,
        values,
        class,
        truncated,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FatouReport {
    pub n_rays: usize,
    pub measure: Measure,
    pub mu_finite: f64,
    pub mu_plus: f64,
    pub mu_minus: f64,
    pub mu_und: f64,
    pub rays: Vec<RayTrace>,
}

impl FatouReport {
    pub fn total(&self) -> f64 {
        self.mu_finite + self.mu_plus + self.mu_minus + self.mu_und
    }

    pub fn count(&self, name: &str) -> usize {
        self.rays.iter().filter(|r| r.class.name() == name).count()
    }

    pub fn to_json_value(&self) -> Value {
        let rays: Vec<Value> = self
            .rays
            .iter()
            .map(|r| match r.class {
                RayClass::Finite(v) => json!({"theta": r.theta, "class": r.class.name(), "value": v}),
                _ if r.truncated => json!({"theta": r.theta, "class": r.class.name(), "truncated": true}),
                _ => json!({"theta": r.theta, "class": r.class.name()}),
            })
            .collect();
        json!({
            "n_rays": self.n_rays,
            "measure": self.measure,
            "mu_finite": self.mu_finite,
            "mu_plus": self.mu_plus,
            "mu_minus": self.mu_minus,
            "mu_und": self.mu_und,
            "rays": rays,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }
}

/// Classifies `n_rays` rays at `θ_j = 2π(j + ½)/n` and aggregates their measures.
pub fn fatou_report(field: &Field, n_rays: usize, params: &RayParams) -> Result<FatouReport> {
    if n_rays < MIN_RAYS {
        return Err(Error::Invalid(format!("need at least {MIN_RAYS} rays, got {n_rays}")));
    }
    let rays: Vec<RayTrace> = (0..n_rays)
        .into_par_iter()
        .map(|j| trace_and_classify(field, TAU * (j as f64 + 0.5) / n_rays as f64, params))
        .collect::<Result<_>>()?;
    let total = match (params.measure, field.mesh.model) {
        (Measure::Angular, _) | (Measure::ArcLength, MetricModel::Euclidean) => TAU,
        (Measure::ArcLength, MetricModel::Hyperbolic) => TAU * 1f64.sinh(),
    };
    let unit = total / n_rays as f64;
    let count = |f: fn(&RayClass) -> bool| rays.iter().filter(|r| f(&r.class)).count() as f64;
    let mu_finite = unit * count(|c| matches!(c, RayClass::Finite(_)));
    let mu_plus = unit * count(|c| matches!(c, RayClass::PlusInf));
    let mu_minus = unit * count(|c| matches!(c, RayClass::MinusInf));
    // the remainder, so that the four measures add up to the total
    let mu_und = total - (mu_finite + mu_plus + mu_minus);
    Ok(FatouReport {
        n_rays,
        measure: params.measure,
        mu_finite,
        mu_plus,
        mu_minus,
        mu_und,
        rays,
    })
}
