use num_complex::Complex64;

use super::{DiscSpec, MetricModel, Point};
use crate::{Error, Result};

/// Geodesic segment between two model points, with constant-speed sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeodesicArc {
    pub model: MetricModel,
    pub start: Point,
    pub end: Point,
    pub length: f64,
}

// Möbius isometry of the Poincaré disc sending `p` to the origin, and its inverse.
#[inline]
fn to_origin(p: Complex64, z: Complex64) -> Complex64 {
    (z - p) / (Complex64::new(1.0, 0.0) - p.conj() * z)
}

#[inline]
fn from_origin(p: Complex64, w: Complex64) -> Complex64 {
    (w + p) / (Complex64::new(1.0, 0.0) + p.conj() * w)
}

impl GeodesicArc {
    pub fn between(model: MetricModel, start: Point, end: Point) -> Result<Self> {
        let length = model.distance(start, end)?;
        if length <= 1e-14 {
            return Err(Error::DegenerateArc);
        }
        Ok(GeodesicArc {
            model,
            start,
            end,
            length,
        })
    }

    /// Point at fraction `t ∈ [0, 1]` of the arc length from `start`.
    pub fn sample(&self, t: f64) -> Point {
        if t <= 0.0 {
            return self.start;
        }
        if t >= 1.0 {
            return self.end;
        }
        self.point_at_distance(t * self.length)
    }

    /// Point at geodesic distance `d` from `start` along the arc.
    pub fn point_at_distance(&self, d: f64) -> Point {
        match self.model {
            MetricModel::Euclidean => self.start.lerp(self.end, d / self.length),
            MetricModel::Hyperbolic => {
                let p = self.start.to_complex();
                let w = to_origin(p, self.end.to_complex());
                let dir = w / w.norm();
                let z = from_origin(p, dir * (0.5 * d).tanh());
                Point::from_complex(z)
            }
        }
    }

    /// Unit tangent (in model coordinates) at `start`, pointing into the arc.
    pub fn start_direction(&self) -> Point {
        let v = match self.model {
            MetricModel::Euclidean => self.end - self.start,
            MetricModel::Hyperbolic => {
                // d/dw of the inverse Möbius map at 0 is the positive real 1 - |p|²
                Point::from_complex(to_origin(self.start.to_complex(), self.end.to_complex()))
            }
        };
        v * (1.0 / v.norm())
    }

    pub fn reversed(&self) -> Self {
        GeodesicArc {
            start: self.end,
            end: self.start,
            ..*self
        }
    }

    /// `n + 1` points at uniform arc-length spacing, endpoints included.
    pub fn polyline(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n).map(|k| self.sample(k as f64 / n as f64)).collect()
    }

    pub fn midpoint(&self) -> Point {
        self.sample(0.5)
    }
}

/// Length of the geodesic chord between boundary parameters `s0` and `s1`.
///
/// Law of cosines in geodesic polar coordinates about the disc center, in the
/// cancellation-free form `sinh(d/2) = sinh ρ · |sin(Δθ/2)|`.
pub fn chord_length(disc: &DiscSpec, s0: f64, s1: f64) -> f64 {
    let dtheta = disc.angle_of(s1) - disc.angle_of(s0);
    let half = (0.5 * dtheta).sin().abs();
    match disc.model {
        MetricModel::Euclidean => 2.0 * disc.geodesic_radius * half,
        MetricModel::Hyperbolic => 2.0 * (disc.geodesic_radius.sinh() * half).asinh(),
    }
}

/// Geodesic chord of the disc joining `α(s0)` to `α(s1)`.
pub fn chord(disc: &DiscSpec, s0: f64, s1: f64) -> Result<GeodesicArc> {
    let l = disc.boundary_length();
    let gap = disc.ccw_gap(s0, s1);
    if gap <= 1e-14 * l || l - gap <= 1e-14 * l {
        return Err(Error::DegenerateArc);
    }
    Ok(GeodesicArc {
        model: disc.model,
        start: disc.boundary_point(s0),
        end: disc.boundary_point(s1),
        length: chord_length(disc, s0, s1),
    })
}
