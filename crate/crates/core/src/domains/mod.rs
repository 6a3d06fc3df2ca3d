//! Scherk domains: balanced polygons inscribed in the geodesic disc and the
//! constructions that grow them.

mod admissible;
mod core_region;
mod perturb;
mod quadrilateral;
mod sequence;
mod trapezoid;

pub use admissible::{
    check_admissible, inscribed_slacks, AdmissibilityReport, MAX_ENUMERATION_VERTICES,
};
pub use core_region::{compact_core, CompactCore};
pub use perturb::{attach_and_perturb, attach_trapezoids, Attached, Attachment, TauGrid};
pub use quadrilateral::{inscribed_quadrilateral, quadrilateral_balance, quadrilateral_params};
pub use sequence::{
    iterate_example, ExampleSchedule, ExampleSequence, ExampleStep, GateRecord, GeometryOnly, Slacks,
    StepManifest, StepSolver,
};
pub use trapezoid::{regular_trapezoid, trapezoid_balance, Trapezoid};

use serde::{Deserialize, Serialize};

use crate::geometry::{chord, chord_length, DiscSpec, GeodesicArc, GeodesicPolygon, MetricModel, Point};
use crate::{Error, Result};

/// Label of a polygon side: `A` carries `+∞`, `B` carries `-∞`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SideLabel {
    A,
    B,
}

impl SideLabel {
    pub fn flip(self) -> Self {
        match self {
            SideLabel::A => SideLabel::B,
            SideLabel::B => SideLabel::A,
        }
    }

    /// `+1` for `A`, `-1` for `B`.
    pub fn sign(self) -> f64 {
        match self {
            SideLabel::A => 1.0,
            SideLabel::B => -1.0,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SideLabel::A => "A",
            SideLabel::B => "B",
        }
    }
}

/// Even-sided geodesic polygon with all vertices on `∂D` and alternating labels.
///
/// Side `i` joins vertex `i` to vertex `i + 1 (mod n)`. Vertex parameters are
/// arc-length values on `∂D`; they need not be reduced mod `L` but must be
/// cyclically strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct ScherkPolygon {
    pub disc: DiscSpec,
    pub vertex_params: Vec<f64>,
    pub labels: Vec<SideLabel>,
    /// Index of the side `B₁`.
    pub bottom_index: usize,
}

/// On-disk domain description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainJson {
    pub model: MetricModel,
    pub vertices_s: Vec<f64>,
    pub labels: Vec<SideLabel>,
}

impl ScherkPolygon {
    pub fn new(disc: DiscSpec, vertex_params: Vec<f64>, labels: Vec<SideLabel>) -> Result<Self> {
        let bottom_index = labels.iter().position(|&l| l == SideLabel::B).unwrap_or(0);
        let poly = ScherkPolygon {
            disc,
            vertex_params,
            labels,
            bottom_index,
        };
        poly.validate()?;
        Ok(poly)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.vertex_params.len();
        if n < 4 || n % 2 != 0 {
            return Err(Error::MalformedPolygon(format!(
                "a Scherk polygon needs an even number (>= 4) of sides, got {n}"
            )));
        }
        if self.labels.len() != n {
            return Err(Error::MalformedPolygon(format!(
                "{} labels for {n} sides",
                self.labels.len()
            )));
        }
        if (0..n).any(|i| self.labels[i] == self.labels[(i + 1) % n]) {
            return Err(Error::MalformedPolygon("side labels must alternate".into()));
        }
        if self.vertex_params.iter().any(|s| !s.is_finite()) {
            return Err(Error::MalformedPolygon("non-finite vertex parameter".into()));
        }
        let l = self.disc.boundary_length();
        let gaps: Vec<f64> = (0..n).map(|i| self.side_gap(i)).collect();
        let total: f64 = gaps.iter().sum();
        if gaps.iter().any(|&g| g <= 1e-12 * l) || (total - l).abs() > 1e-9 * l {
            return Err(Error::MalformedPolygon(
                "vertex parameters must be cyclically strictly increasing".into(),
            ));
        }
        if self.bottom_index >= n || self.labels[self.bottom_index] != SideLabel::B {
            return Err(Error::MalformedPolygon("bottom side must be a B side".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertex_params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertex_params.is_empty()
    }

    pub fn model(&self) -> MetricModel {
        self.disc.model
    }

    pub fn vertex(&self, i: usize) -> Point {
        self.disc.boundary_point(self.vertex_params[i % self.len()])
    }

    pub fn vertices(&self) -> Vec<Point> {
        (0..self.len()).map(|i| self.vertex(i)).collect()
    }

    /// Boundary arc length subtended by side `i`.
    pub fn side_gap(&self, i: usize) -> f64 {
        let n = self.len();
        self.disc
            .ccw_gap(self.vertex_params[i % n], self.vertex_params[(i + 1) % n])
    }

    pub fn side_length(&self, i: usize) -> f64 {
        let n = self.len();
        chord_length(
            &self.disc,
            self.vertex_params[i % n],
            self.vertex_params[(i + 1) % n],
        )
    }

    pub fn side_arc(&self, i: usize) -> GeodesicArc {
        let n = self.len();
        chord(
            &self.disc,
            self.vertex_params[i % n],
            self.vertex_params[(i + 1) % n],
        )
        .expect("validated polygon has distinct vertices")
    }

    pub fn to_geodesic_polygon(&self) -> GeodesicPolygon {
        let sides = (0..self.len()).map(|i| self.side_arc(i)).collect();
        GeodesicPolygon::from_sides(self.model(), sides).expect("at least four sides")
    }

    /// `(Σ|A_i|, Σ|B_i|)`.
    pub fn label_sums(&self) -> (f64, f64) {
        (0..self.len()).fold((0.0, 0.0), |(a, b), i| match self.labels[i] {
            SideLabel::A => (a + self.side_length(i), b),
            SideLabel::B => (a, b + self.side_length(i)),
        })
    }

    /// `|Σ|A_i| - Σ|B_i||`.
    pub fn condition1_residual(&self) -> f64 {
        let (a, b) = self.label_sums();
        (a - b).abs()
    }

    pub fn perimeter(&self) -> f64 {
        (0..self.len()).map(|i| self.side_length(i)).sum()
    }

    /// `L - |Γ|`: boundary length not yet matched by the polygon's sides.
    pub fn boundary_deficit(&self) -> f64 {
        self.disc.boundary_length() - self.perimeter()
    }

    /// Same polygon with every vertex advanced by `ds` along `∂D`.
    pub fn rotated(&self, ds: f64) -> Self {
        ScherkPolygon {
            vertex_params: self.vertex_params.iter().map(|s| s + ds).collect(),
            ..self.clone()
        }
    }

    /// Smallest vertex shift `m` (dividing `n`, `m < n`) under which the side
    /// gaps repeat, i.e. the polygon is invariant under rotation by the arc
    /// `Σ_{i<m} gap_i`.
    pub fn rotational_period(&self) -> Option<usize> {
        let n = self.len();
        let gaps: Vec<f64> = (0..n).map(|i| self.side_gap(i)).collect();
        let tol = 1e-12 * self.disc.boundary_length();
        (1..n)
            .filter(|m| n % m == 0)
            .find(|&m| (0..n).all(|i| (gaps[i] - gaps[(i + m) % n]).abs() <= tol))
    }

    /// Central angle at the origin of the ray through the midpoint of side `i`.
    pub fn side_mid_angle(&self, i: usize) -> f64 {
        let s = self.vertex_params[i % self.len()] + 0.5 * self.side_gap(i);
        self.disc.angle_of(s)
    }

    pub fn to_json(&self) -> DomainJson {
        DomainJson {
            model: self.model(),
            vertices_s: self.vertex_params.clone(),
            labels: self.labels.clone(),
        }
    }

    pub fn from_json(json: &DomainJson) -> Result<Self> {
        ScherkPolygon::new(
            DiscSpec::new(json.model),
            json.vertices_s.clone(),
            json.labels.clone(),
        )
    }

    pub fn to_json_string(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json())? + "\n")
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        ScherkPolygon::from_json(&serde_json::from_str(text)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyp() -> DiscSpec {
        DiscSpec::new(MetricModel::Hyperbolic)
    }

    #[test]
    fn rejects_odd_or_non_alternating() {
        let l = hyp().boundary_length();
        let p = vec![0.0, l / 3.0, 2.0 * l / 3.0];
        assert!(ScherkPolygon::new(hyp(), p, vec![SideLabel::A, SideLabel::B, SideLabel::A]).is_err());
        let q = vec![0.0, 0.25 * l, 0.5 * l, 0.75 * l];
        let labels = vec![SideLabel::B, SideLabel::B, SideLabel::A, SideLabel::A];
        assert!(ScherkPolygon::new(hyp(), q, labels).is_err());
    }

    #[test]
    fn rejects_unordered_vertices() {
        let l = hyp().boundary_length();
        let q = vec![0.0, 0.5 * l, 0.25 * l, 0.75 * l];
        let labels = vec![SideLabel::B, SideLabel::A, SideLabel::B, SideLabel::A];
        assert!(matches!(
            ScherkPolygon::new(hyp(), q, labels),
            Err(Error::MalformedPolygon(_))
        ));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let text = "{\n  \"model\": \"hyperbolic\",\n  \"vertices_s\": [\n    0.1,\n    2.0000000000000004,\n    3.7,\n    5.5\n  ],\n  \"labels\": [\n    \"B\",\n    \"A\",\n    \"B\",\n    \"A\"\n  ]\n}\n";
        let poly = ScherkPolygon::from_json_str(text).unwrap();
        assert_eq!(poly.to_json_string().unwrap(), text);
    }

    #[test]
    fn wrapped_parameters_are_accepted() {
        let l = hyp().boundary_length();
        let q = vec![0.9 * l, 1.1 * l, 0.4 * l, 0.6 * l];
        let labels = vec![SideLabel::B, SideLabel::A, SideLabel::B, SideLabel::A];
        let poly = ScherkPolygon::new(hyp(), q, labels).unwrap();
        let total: f64 = (0..4).map(|i| poly.side_gap(i)).sum();
        assert!((total - l).abs() < 1e-12);
    }
}
