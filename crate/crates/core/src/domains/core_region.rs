use std::f64::consts::TAU;

use super::{ScherkPolygon, SideLabel};
use crate::geometry::{DiscSpec, GeodesicArc, GeodesicPolygon, MetricModel, Point};
use crate::{Error, Result};

/// Compact core `K = K' \ ∪ D(p_i, 1 - r)` of a Scherk domain, where `K'` is
/// the geodesic polygon on the points `p_i` at distance `r` from the center
/// along the radial geodesics to the vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct CompactCore {
    pub disc: DiscSpec,
    pub r: f64,
    /// Radius `1 - r` of the discs removed around each `p_i`.
    pub notch_radius: f64,
    pub centers: Vec<Point>,
    /// Label of the domain side each core side faces.
    pub labels: Vec<SideLabel>,
    pub outer: GeodesicPolygon,
    klein: Vec<Point>,
}

pub fn compact_core(d: &ScherkPolygon, r: f64) -> Result<CompactCore> {
    d.validate()?;
    let radius = d.disc.geodesic_radius;
    if !(r >= 0.5 * radius && r < radius) {
        return Err(Error::RadiusOutOfRange(r));
    }
    let model = d.model();
    let centers: Vec<Point> = d
        .vertex_params
        .iter()
        .map(|&s| model.polar_point(r, d.disc.angle_of(s)))
        .collect();
    let outer = GeodesicPolygon::new(model, centers.clone())?;
    let klein = centers.iter().map(|&p| model.to_klein(p)).collect();
    let core = CompactCore {
        disc: d.disc,
        r,
        notch_radius: radius - r,
        centers,
        labels: d.labels.clone(),
        outer,
        klein,
    };
    if !core.contains(Point::ORIGIN) {
        return Err(Error::DegenerateCore(format!(
            "center not in the core for r = {r}"
        )));
    }
    Ok(core)
}

impl CompactCore {
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    pub fn model(&self) -> MetricModel {
        self.disc.model
    }

    /// Signed margin of `p` inside the convex polygon `K'`, measured in the
    /// projective model where its sides are straight.
    fn outer_margin(&self, p: Point) -> f64 {
        let k = self.model().to_klein(p);
        let n = self.klein.len();
        (0..n)
            .map(|i| {
                let (a, b) = (self.klein[i], self.klein[(i + 1) % n]);
                let e = b - a;
                e.cross(k - a) / e.norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    fn notch_margin(&self, p: Point) -> f64 {
        self.centers
            .iter()
            .map(|&c| self.model().distance_unchecked(p, c) - self.notch_radius)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.outer_margin(p) > 0.0 && self.notch_margin(p) > 0.0
    }

    /// Closed containment with slack `tol` on both tests.
    pub fn contains_closed(&self, p: Point, tol: f64) -> bool {
        self.outer_margin(p) >= -tol && self.notch_margin(p) >= -tol
    }

    /// Part of the `K'` side `i` lying outside the notches, if any.
    pub fn trimmed_side(&self, i: usize) -> Option<GeodesicArc> {
        let side = &self.outer.sides[i % self.len()];
        let rho = self.notch_radius;
        if side.length <= 2.0 * rho {
            return None;
        }
        let a = side.point_at_distance(rho);
        let b = side.point_at_distance(side.length - rho);
        GeodesicArc::between(self.model(), a, b).ok()
    }

    /// `n + 1` points along the trimmed side `i`, or none if it is swallowed by notches.
    pub fn side_samples(&self, i: usize, n: usize) -> Vec<Point> {
        self.trimmed_side(i)
            .map(|a| a.polyline(n))
            .unwrap_or_default()
    }

    /// Points on `∂K`: trimmed sides and the visible parts of the notch circles.
    pub fn boundary_samples(&self, per_side: usize) -> Vec<Point> {
        let mut out = Vec::new();
        for i in 0..self.len() {
            out.extend(self.side_samples(i, per_side));
            let c = self.centers[i];
            for k in 0..4 * per_side {
                let q = self.model().circle_point(c, self.notch_radius, TAU * k as f64 / (4 * per_side) as f64);
                if self.outer_margin(q) >= 0.0 && self.notch_margin(q) >= -1e-12 {
                    out.push(q);
                }
            }
        }
        out
    }

    /// `self ⊂ other`, tested on boundary samples of `self`.
    pub fn is_inside(&self, other: &CompactCore) -> bool {
        self.boundary_samples(64)
            .into_iter()
            .all(|p| other.contains_closed(p, 1e-9))
    }

    /// The notch at `p_i` is an exact circular sector of `K'` when every side
    /// is at least twice the notch radius.
    fn notches_are_sectors(&self) -> bool {
        self.outer.sides.iter().all(|s| s.length >= 2.0 * self.notch_radius)
    }

    /// Area in the model metric.
    pub fn area(&self) -> f64 {
        if !self.notches_are_sectors() {
            return self.area_by_quadrature(600, 2400);
        }
        let rho = self.notch_radius;
        let sector = match self.model() {
            MetricModel::Euclidean => 0.5 * rho * rho,
            MetricModel::Hyperbolic => rho.cosh() - 1.0,
        };
        let angles: f64 = self.outer.interior_angles().iter().sum();
        self.outer.area() - angles * sector
    }

    /// Midpoint rule in geodesic polar coordinates about the center.
    pub fn area_by_quadrature(&self, n_rho: usize, n_theta: usize) -> f64 {
        let (dr, dt) = (self.r / n_rho as f64, TAU / n_theta as f64);
        let model = self.model();
        let mut total = 0.0;
        for i in 0..n_rho {
            let rho = (i as f64 + 0.5) * dr;
            let g = model.polar_density(rho, 0.0).expect("rho > 0");
            let hits = (0..n_theta)
                .filter(|&j| self.contains(model.polar_point(rho, (j as f64 + 0.5) * dt)))
                .count();
            total += g * hits as f64;
        }
        total * dr * dt
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::{attach_and_perturb, inscribed_quadrilateral, TauGrid};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d1() -> ScherkPolygon {
        inscribed_quadrilateral(&DiscSpec::new(MetricModel::Hyperbolic), 0.0).unwrap()
    }

    /// Uniform samples in the model disc weighted by the area element `λ²`.
    fn monte_carlo_area(core: &CompactCore, n: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let big = core.disc.model_radius();
        let mut acc = 0.0;
        for _ in 0..n {
            let p = loop {
                let p = Point::new(rng.gen_range(-big..big), rng.gen_range(-big..big));
                if p.norm() < big {
                    break p;
                }
            };
            if core.contains(p) {
                acc += core.model().conformal_factor(p).powi(2);
            }
        }
        std::f64::consts::PI * big * big * acc / n as f64
    }

    #[test]
    fn core_contains_center() {
        let k = compact_core(&d1(), 0.9).unwrap();
        assert!(k.contains(Point::ORIGIN));
        assert_eq!(k.len(), 4);
        assert_eq!(k.outer.sides.len(), 4);
    }

    #[test]
    fn area_matches_monte_carlo_and_grows_towards_domain() {
        let d = d1();
        let full = d.to_geodesic_polygon().area();
        let mut prev = 0.0;
        for (k, r) in [0.9, 0.95, 0.99].into_iter().enumerate() {
            let core = compact_core(&d, r).unwrap();
            let a = core.area();
            let mc = monte_carlo_area(&core, 400_000, k as u64);
            assert!((a - mc).abs() <= 0.01 * a, "r {r}: {a} vs {mc}");
            assert!(a > prev && a < full);
            prev = a;
        }
        assert!(full - prev < 0.05 * full);
    }

    #[test]
    fn quadrature_agrees_with_sector_formula() {
        let core = compact_core(&d1(), 0.8).unwrap();
        let q = core.area_by_quadrature(800, 3200);
        assert!((core.area() - q).abs() <= 2e-3 * q, "{} vs {q}", core.area());
    }

    #[test]
    fn side_counts_follow_the_domain() {
        let d2 = attach_and_perturb(&d1(), 1, 0, &TauGrid::default(), 1e-10)
            .unwrap()
            .domain;
        let k = compact_core(&d2, 0.95).unwrap();
        assert_eq!(k.outer.sides.len(), 8);
        assert_eq!(k.labels, d2.labels);
    }

    #[test]
    fn nested_for_growing_domain_and_radius() {
        let d = d1();
        let d2 = attach_and_perturb(&d, 1, 0, &TauGrid::default(), 1e-10)
            .unwrap()
            .domain;
        let k1 = compact_core(&d, 0.9).unwrap();
        let k2 = compact_core(&d2, 0.99).unwrap();
        assert!(k1.is_inside(&k2));
        assert!(!k2.is_inside(&k1));
    }

    #[test]
    fn rejects_small_radius() {
        assert!(matches!(
            compact_core(&d1(), 0.3),
            Err(Error::RadiusOutOfRange(_))
        ));
        assert!(compact_core(&d1(), 1.0).is_err());
    }
}
