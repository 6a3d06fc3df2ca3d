use std::f64::consts::{PI, TAU};

use super::{GeodesicArc, MetricModel, Point};
use crate::{Error, Result};

/// Polyline samples per side used by the intersection and containment tests.
pub const DEFAULT_SIDE_SAMPLES: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonMetrics {
    pub perimeter: f64,
    pub is_simple: bool,
    pub is_ccw: bool,
}

/// Closed geodesic polygon; side `i` joins vertex `i` to vertex `i + 1 (mod n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicPolygon {
    pub model: MetricModel,
    pub vertices: Vec<Point>,
    pub sides: Vec<GeodesicArc>,
}

impl GeodesicPolygon {
    pub fn new(model: MetricModel, vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::MalformedPolygon(format!(
                "need at least 3 vertices, got {}",
                vertices.len()
            )));
        }
        let n = vertices.len();
        let sides = (0..n)
            .map(|i| GeodesicArc::between(model, vertices[i], vertices[(i + 1) % n]))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeodesicPolygon {
            model,
            vertices,
            sides,
        })
    }

    /// Builds the polygon from sides whose lengths were computed elsewhere.
    pub fn from_sides(model: MetricModel, sides: Vec<GeodesicArc>) -> Result<Self> {
        if sides.len() < 3 {
            return Err(Error::MalformedPolygon(format!(
                "need at least 3 sides, got {}",
                sides.len()
            )));
        }
        let vertices = sides.iter().map(|s| s.start).collect();
        Ok(GeodesicPolygon {
            model,
            vertices,
            sides,
        })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn perimeter(&self) -> f64 {
        self.sides.iter().map(|s| s.length).sum()
    }

    /// Closed polyline (first point not repeated) with `per_side` segments per side.
    pub fn polyline(&self, per_side: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.sides.len() * per_side);
        for side in &self.sides {
            let pts = side.polyline(per_side);
            out.extend_from_slice(&pts[..pts.len() - 1]);
        }
        out
    }

    /// Shoelace area of the sampled outline in model coordinates (signed, ccw positive).
    pub fn signed_model_area(&self) -> f64 {
        let pts = self.polyline(DEFAULT_SIDE_SAMPLES);
        let n = pts.len();
        0.5 * (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>()
    }

    pub fn metrics(&self) -> PolygonMetrics {
        PolygonMetrics {
            perimeter: self.perimeter(),
            is_simple: self.is_simple(DEFAULT_SIDE_SAMPLES),
            is_ccw: self.signed_model_area() > 0.0,
        }
    }

    /// False iff two non-adjacent sides meet, tested on `per_side`-segment polylines.
    pub fn is_simple(&self, per_side: usize) -> bool {
        let n = self.sides.len();
        let lines: Vec<Vec<Point>> = self.sides.iter().map(|s| s.polyline(per_side)).collect();
        for i in 0..n {
            for j in (i + 1)..n {
                let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                if adjacent {
                    continue;
                }
                if polylines_intersect(&lines[i], &lines[j]) {
                    return false;
                }
            }
        }
        true
    }

    /// Interior angle at each vertex, assuming counter-clockwise orientation.
    pub fn interior_angles(&self) -> Vec<f64> {
        let n = self.sides.len();
        (0..n)
            .map(|i| {
                let to_next = self.sides[i].start_direction();
                let to_prev = self.sides[(i + n - 1) % n].reversed().start_direction();
                // sweep counter-clockwise from the outgoing side to the incoming one
                (to_prev.angle() - to_next.angle()).rem_euclid(TAU)
            })
            .collect()
    }

    /// Area in the model's metric: Gauss–Bonnet for `K ≡ -1`, shoelace for the flat model.
    pub fn area(&self) -> f64 {
        match self.model {
            MetricModel::Euclidean => {
                let n = self.vertices.len();
                0.5 * (0..n)
                    .map(|i| self.vertices[i].cross(self.vertices[(i + 1) % n]))
                    .sum::<f64>()
            }
            MetricModel::Hyperbolic => {
                let n = self.vertices.len() as f64;
                (n - 2.0) * PI - self.interior_angles().iter().sum::<f64>()
            }
        }
    }

    /// Even-odd containment on the sampled outline.
    pub fn contains(&self, p: Point) -> bool {
        point_in_polyline(&self.polyline(DEFAULT_SIDE_SAMPLES), p)
    }
}

pub(crate) fn point_in_polyline(poly: &[Point], p: Point) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[inline]
fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Point, b: Point, p: Point) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts as intersecting).
pub fn segments_intersect(a: Point, b: Point, c: Point, d: Point) -> bool {
    let d1 = orient(c, d, a);
    let d2 = orient(c, d, b);
    let d3 = orient(a, b, c);
    let d4 = orient(a, b, d);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

fn polylines_intersect(p: &[Point], q: &[Point]) -> bool {
    p.windows(2)
        .any(|s| q.windows(2).any(|t| segments_intersect(s[0], s[1], t[0], t[1])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{chord, DiscSpec};
    use approx::assert_abs_diff_eq;

    fn quarter_chord() -> f64 {
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        (c * c - s * s * (PI / 2.0).cos()).acosh()
    }

    fn on_disc(params: &[f64]) -> GeodesicPolygon {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let l = disc.boundary_length();
        let pts = params.iter().map(|f| disc.boundary_point(f * l)).collect();
        GeodesicPolygon::new(MetricModel::Hyperbolic, pts).unwrap()
    }

    #[test]
    fn symmetric_quadrilateral_perimeter() {
        let p = on_disc(&[1.0 / 8.0, 3.0 / 8.0, 5.0 / 8.0, 7.0 / 8.0]);
        let m = p.metrics();
        assert_abs_diff_eq!(m.perimeter, 4.0 * quarter_chord(), epsilon = 1e-10);
        assert_abs_diff_eq!(m.perimeter, 6.053496, epsilon = 1e-6);
        assert!(m.is_simple);
        assert!(m.is_ccw);
    }

    #[test]
    fn triangle_on_three_vertices() {
        let p = on_disc(&[1.0 / 8.0, 3.0 / 8.0, 5.0 / 8.0]);
        let m = p.metrics();
        assert!(m.is_simple);
        assert_abs_diff_eq!(m.perimeter, 2.0 * quarter_chord() + 2.0, epsilon = 1e-10);
    }

    #[test]
    fn crossing_order_is_not_simple() {
        let p = on_disc(&[0.0, 0.5, 0.25, 0.75]);
        assert!(!p.metrics().is_simple);
    }

    #[test]
    fn clockwise_order_detected() {
        let p = on_disc(&[7.0 / 8.0, 5.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0]);
        assert!(!p.metrics().is_ccw);
    }

    #[test]
    fn too_few_vertices() {
        assert!(matches!(
            GeodesicPolygon::new(MetricModel::Hyperbolic, vec![Point::ORIGIN, Point::new(0.1, 0.0)]),
            Err(Error::MalformedPolygon(_))
        ));
    }

    #[test]
    fn sides_close_up() {
        let p = on_disc(&[0.05, 0.3, 0.55, 0.9]);
        for i in 0..p.len() {
            assert_eq!(p.sides[i].end, p.sides[(i + 1) % p.len()].start);
        }
    }

    #[test]
    fn gauss_bonnet_area_matches_quadrature() {
        let p = on_disc(&[0.05, 0.3, 0.55, 0.9]);
        // midpoint rule of λ² over a fine grid
        let n = 800;
        let r = 0.5f64.tanh();
        let hstep = 2.0 * r / n as f64;
        let poly = p.polyline(256);
        let mut area = 0.0;
        for i in 0..n {
            for j in 0..n {
                let q = Point::new(-r + (i as f64 + 0.5) * hstep, -r + (j as f64 + 0.5) * hstep);
                if point_in_polyline(&poly, q) {
                    area += MetricModel::Hyperbolic.conformal_factor(q).powi(2) * hstep * hstep;
                }
            }
        }
        assert!((area - p.area()).abs() < 5e-3 * p.area(), "{area} vs {}", p.area());
    }

    #[test]
    fn chords_match_polygon_sides() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let l = disc.boundary_length();
        let p = on_disc(&[0.1, 0.4, 0.8]);
        let c = chord(&disc, 0.1 * l, 0.4 * l).unwrap();
        assert_abs_diff_eq!(c.length, p.sides[0].length, epsilon = 1e-12);
    }
}
