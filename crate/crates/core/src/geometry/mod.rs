//! Conformal disc-model geometry.
//!
//! Hyperbolic points live in the Poincaré unit disc with conformal factor
//! `λ = 2 / (1 - |z|²)`. The geodesic disc of radius one about the origin is
//! the Euclidean disc of radius `tanh(1/2)`. The Euclidean model uses `λ ≡ 1`
//! and the unit disc itself.

mod arc;
mod point;
mod polygon;

pub use arc::{chord, chord_length, GeodesicArc};
pub use point::Point;
pub use polygon::{segments_intersect, GeodesicPolygon, PolygonMetrics, DEFAULT_SIDE_SAMPLES};

use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

use crate::{Error, Result};

/// Slack allowed when deciding whether a point lies in a closed disc.
const CLOSED_DISC_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricModel {
    Euclidean,
    Hyperbolic,
}

impl MetricModel {
    pub fn name(self) -> &'static str {
        match self {
            MetricModel::Euclidean => "euclidean",
            MetricModel::Hyperbolic => "hyperbolic",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "euclidean" => Ok(MetricModel::Euclidean),
            "hyperbolic" => Ok(MetricModel::Hyperbolic),
            other => Err(Error::Invalid(format!("unknown metric model `{other}`"))),
        }
    }

    /// Conformal factor `λ` with `g = λ² (dx² + dy²)`.
    #[inline]
    pub fn conformal_factor(self, p: Point) -> f64 {
        match self {
            MetricModel::Euclidean => 1.0,
            MetricModel::Hyperbolic => 2.0 / (1.0 - p.norm_sq()),
        }
    }

    /// Model (Euclidean) radius of the point at geodesic distance `rho` from the origin.
    #[inline]
    pub fn model_radius(self, rho: f64) -> f64 {
        match self {
            MetricModel::Euclidean => rho,
            MetricModel::Hyperbolic => (0.5 * rho).tanh(),
        }
    }

    /// Inverse of [`MetricModel::model_radius`].
    #[inline]
    pub fn geodesic_radius(self, r: f64) -> f64 {
        match self {
            MetricModel::Euclidean => r,
            MetricModel::Hyperbolic => 2.0 * r.atanh(),
        }
    }

    /// Volume density `G(ρ, θ)` of geodesic polar coordinates about the origin.
    ///
    /// `G` vanishes at the pole, so `ρ <= 0` is rejected.
    pub fn polar_density(self, rho: f64, _theta: f64) -> Result<f64> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::Domain(format!(
                "polar density needs rho > 0, got {rho}"
            )));
        }
        Ok(match self {
            MetricModel::Euclidean => rho,
            MetricModel::Hyperbolic => rho.sinh(),
        })
    }

    fn check_point(self, p: Point) -> Result<()> {
        let r = p.norm();
        let inside = match self {
            MetricModel::Euclidean => r <= 1.0 + CLOSED_DISC_SLACK,
            // the unit circle is at infinite distance
            MetricModel::Hyperbolic => r < 1.0,
        };
        if inside && r.is_finite() {
            Ok(())
        } else {
            Err(Error::OutsideDisc { x: p.x, y: p.y })
        }
    }

    /// Geodesic distance between two model points.
    pub fn distance(self, p: Point, q: Point) -> Result<f64> {
        self.check_point(p)?;
        self.check_point(q)?;
        Ok(self.distance_unchecked(p, q))
    }

    #[inline]
    pub(crate) fn distance_unchecked(self, p: Point, q: Point) -> f64 {
        match self {
            MetricModel::Euclidean => (p - q).norm(),
            MetricModel::Hyperbolic => {
                let denom = ((1.0 - p.norm_sq()) * (1.0 - q.norm_sq())).sqrt();
                2.0 * ((p - q).norm() / denom).asinh()
            }
        }
    }

    /// Point at geodesic polar coordinates `(ρ, θ)` about the origin.
    #[inline]
    pub fn polar_point(self, rho: f64, theta: f64) -> Point {
        Point::polar(self.model_radius(rho), theta)
    }

    /// Point at geodesic distance `rho` from `center` in the model direction `theta`.
    pub fn circle_point(self, center: Point, rho: f64, theta: f64) -> Point {
        match self {
            MetricModel::Euclidean => center + Point::polar(rho, theta),
            MetricModel::Hyperbolic => {
                let p = center.to_complex();
                let w = num_complex::Complex64::from_polar((0.5 * rho).tanh(), theta);
                Point::from_complex((w + p) / (1.0 + p.conj() * w))
            }
        }
    }

    /// Projective (Klein) image of a model point: geodesics become straight lines.
    #[inline]
    pub fn to_klein(self, p: Point) -> Point {
        match self {
            MetricModel::Euclidean => p,
            MetricModel::Hyperbolic => p * (2.0 / (1.0 + p.norm_sq())),
        }
    }

    /// Geodesic polar coordinates `(ρ, θ)` of a model point, `θ ∈ [0, 2π)`.
    #[inline]
    pub fn polar_coords(self, p: Point) -> (f64, f64) {
        (self.geodesic_radius(p.norm()), p.angle().rem_euclid(TAU))
    }
}

/// Geodesic disc of radius `geodesic_radius` about the model origin `p0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscSpec {
    pub model: MetricModel,
    pub geodesic_radius: f64,
}

impl DiscSpec {
    /// The unit geodesic disc.
    pub fn new(model: MetricModel) -> Self {
        DiscSpec {
            model,
            geodesic_radius: 1.0,
        }
    }

    pub fn center(&self) -> Point {
        Point::ORIGIN
    }

    /// Euclidean radius of the disc in model coordinates.
    pub fn model_radius(&self) -> f64 {
        self.model.model_radius(self.geodesic_radius)
    }

    /// `L = length(∂D)`.
    pub fn boundary_length(&self) -> f64 {
        TAU * self.circumference_factor()
    }

    /// `sinh ρ` or `ρ`: boundary length per unit of central angle.
    fn circumference_factor(&self) -> f64 {
        match self.model {
            MetricModel::Euclidean => self.geodesic_radius,
            MetricModel::Hyperbolic => self.geodesic_radius.sinh(),
        }
    }

    /// Central angle of the boundary point with arc-length parameter `s`.
    #[inline]
    pub fn angle_of(&self, s: f64) -> f64 {
        (s / self.circumference_factor()).rem_euclid(TAU)
    }

    /// Arc-length parameter (in `[0, L)`) of central angle `theta`.
    #[inline]
    pub fn param_of_angle(&self, theta: f64) -> f64 {
        theta.rem_euclid(TAU) * self.circumference_factor()
    }

    /// Counter-clockwise arc-length parametrization of `∂D`; `s = 0` is the
    /// basepoint on the positive horizontal axis.
    pub fn boundary_point(&self, s: f64) -> Point {
        Point::polar(self.model_radius(), self.angle_of(s))
    }

    /// Arc length travelled counter-clockwise from `s0` to `s1`, in `[0, L)`.
    #[inline]
    pub fn ccw_gap(&self, s0: f64, s1: f64) -> f64 {
        (s1 - s0).rem_euclid(self.boundary_length())
    }

    pub fn reduce(&self, s: f64) -> f64 {
        s.rem_euclid(self.boundary_length())
    }

    pub fn contains(&self, p: Point) -> bool {
        p.norm() <= self.model_radius() * (1.0 + CLOSED_DISC_SLACK)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    /// Hyperbolic law of cosines with both legs of length one.
    fn law_of_cosines(dtheta: f64) -> f64 {
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        (c * c - s * s * dtheta.cos()).acosh()
    }

    #[test]
    fn radius_of_geodesic_disc_is_one() {
        let d = MetricModel::Hyperbolic
            .distance(Point::ORIGIN, Point::new(0.5f64.tanh(), 0.0))
            .unwrap();
        assert_abs_diff_eq!(d, 1.0, epsilon = 1e-14);
    }

    #[test]
    fn antipodal_and_quarter_distances() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let l = disc.boundary_length();
        let m = MetricModel::Hyperbolic;
        let d = m
            .distance(disc.boundary_point(0.0), disc.boundary_point(l / 2.0))
            .unwrap();
        assert_abs_diff_eq!(d, 2.0, epsilon = 1e-13);
        let q = m
            .distance(disc.boundary_point(0.0), disc.boundary_point(l / 4.0))
            .unwrap();
        assert_abs_diff_eq!(q, law_of_cosines(std::f64::consts::FRAC_PI_2), epsilon = 1e-12);
        assert_abs_diff_eq!(q, 1.513374, epsilon = 1e-6);
    }

    #[test]
    fn outside_points_are_rejected() {
        let m = MetricModel::Hyperbolic;
        assert!(matches!(
            m.distance(Point::new(1.0, 0.0), Point::ORIGIN),
            Err(Error::OutsideDisc { .. })
        ));
        assert!(MetricModel::Euclidean
            .distance(Point::new(1.5, 0.0), Point::ORIGIN)
            .is_err());
        assert!(MetricModel::Euclidean
            .distance(Point::new(1.0, 0.0), Point::ORIGIN)
            .is_ok());
    }

    #[test]
    fn boundary_lengths() {
        assert_abs_diff_eq!(
            DiscSpec::new(MetricModel::Hyperbolic).boundary_length(),
            TAU * 1f64.sinh(),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            DiscSpec::new(MetricModel::Euclidean).boundary_length(),
            TAU,
            epsilon = 1e-12
        );
    }

    #[test]
    fn boundary_point_conventions() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let l = disc.boundary_length();
        let x0 = disc.boundary_point(0.0);
        assert_abs_diff_eq!(x0.x, 0.5f64.tanh(), epsilon = 1e-15);
        assert_abs_diff_eq!(x0.y, 0.0, epsilon = 1e-15);
        let x1 = disc.boundary_point(l / 2.0);
        assert_abs_diff_eq!(x1.x, -0.5f64.tanh(), epsilon = 1e-15);
        for s in [0.0, 0.3, l / 3.0, 5.0] {
            let d = MetricModel::Hyperbolic
                .distance(Point::ORIGIN, disc.boundary_point(s))
                .unwrap();
            assert_abs_diff_eq!(d, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn boundary_has_unit_speed() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        for s in [0.0, 1.0, 2.5, 6.0] {
            for h in [1e-3, 1e-4, 1e-5] {
                let c = MetricModel::Hyperbolic
                    .distance(disc.boundary_point(s), disc.boundary_point(s + h))
                    .unwrap();
                assert!((c / h - 1.0).abs() <= 1e-6 * (1.0 + h), "s={s} h={h}");
            }
        }
    }

    #[test]
    fn polar_density_values() {
        assert_abs_diff_eq!(
            MetricModel::Hyperbolic.polar_density(1.0, 0.0).unwrap(),
            1.1752011936438014,
            epsilon = 1e-15
        );
        assert_eq!(MetricModel::Euclidean.polar_density(0.5, 2.0).unwrap(), 0.5);
        let a = MetricModel::Hyperbolic.polar_density(0.5, 0.0).unwrap();
        let b = MetricModel::Hyperbolic
            .polar_density(0.5, std::f64::consts::FRAC_PI_3)
            .unwrap();
        assert_eq!(a, b);
        assert!(MetricModel::Hyperbolic.polar_density(0.0, 0.0).is_err());
        assert!(MetricModel::Euclidean.polar_density(-1.0, 0.0).is_err());
    }

    /// `K = -Δ log λ / λ²` by central differences.
    fn curvature_fd(model: MetricModel, p: Point) -> f64 {
        let h = 1e-4;
        let f = |q: Point| model.conformal_factor(q).ln();
        let lap = (f(p + Point::new(h, 0.0))
            + f(p - Point::new(h, 0.0))
            + f(p + Point::new(0.0, h))
            + f(p - Point::new(0.0, h))
            - 4.0 * f(p))
            / (h * h);
        -lap / model.conformal_factor(p).powi(2)
    }

    #[test]
    fn hyperbolic_curvature_is_minus_one() {
        for &(x, y) in &[(0.0, 0.0), (0.3, -0.2), (-0.4, 0.1), (0.1, 0.45), (0.6, 0.5)] {
            let k = curvature_fd(MetricModel::Hyperbolic, Point::new(x, y));
            assert!((k + 1.0).abs() <= 1e-4, "K = {k} at ({x}, {y})");
        }
        assert_abs_diff_eq!(
            curvature_fd(MetricModel::Euclidean, Point::new(0.2, 0.1)),
            0.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn polar_density_matches_metric_circumference() {
        // G(ρ) dθ is the length element of the geodesic circle of radius ρ
        for rho in [0.25, 0.5, 0.9, 1.0] {
            let m = MetricModel::Hyperbolic;
            let r = m.model_radius(rho);
            let circ = TAU * r * m.conformal_factor(Point::new(r, 0.0));
            assert_abs_diff_eq!(circ / TAU, m.polar_density(rho, 0.0).unwrap(), epsilon = 1e-12);
        }
    }

    fn point_in_disc() -> impl Strategy<Value = Point> {
        (0.0..0.95f64, 0.0..TAU).prop_map(|(r, t)| Point::polar(r, t))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn triangle_inequality(p in point_in_disc(), q in point_in_disc(), r in point_in_disc()) {
            for m in [MetricModel::Hyperbolic, MetricModel::Euclidean] {
                let pr = m.distance(p, r).unwrap();
                let pq = m.distance(p, q).unwrap();
                let qr = m.distance(q, r).unwrap();
                prop_assert!(pr <= pq + qr + 1e-12);
                prop_assert!((pq - m.distance(q, p).unwrap()).abs() <= 1e-14 * (1.0 + pq));
                prop_assert!(pq >= 0.0);
            }
        }

        #[test]
        fn boundary_periodicity(s in -20.0..20.0f64) {
            let disc = DiscSpec::new(MetricModel::Hyperbolic);
            let a = disc.boundary_point(s);
            let b = disc.boundary_point(s + disc.boundary_length());
            prop_assert!((a - b).norm() <= 1e-12);
        }
    }
}
