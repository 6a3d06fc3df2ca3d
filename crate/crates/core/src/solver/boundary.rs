use std::fmt;

use super::mesh::{Mesh, NodeKind};
use super::operator::ScalarFn;
use crate::domains::{ScherkPolygon, SideLabel};
use crate::geometry::Point;
use crate::{Error, Result};

#[derive(Clone)]
pub enum SideValue {
    Finite(f64),
    Function(ScalarFn),
    PlusInf,
    MinusInf,
}

impl fmt::Debug for SideValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SideValue::Finite(v) => write!(f, "Finite({v})"),
            SideValue::Function(_) => write!(f, "Function(..)"),
            SideValue::PlusInf => write!(f, "PlusInf"),
            SideValue::MinusInf => write!(f, "MinusInf"),
        }
    }
}

/// Dirichlet data per boundary side id. Infinite sides take `±cap`.
#[derive(Debug, Clone)]
pub struct BoundaryData {
    pub sides: Vec<SideValue>,
    pub cap: Option<f64>,
}

impl BoundaryData {
    pub fn new(sides: Vec<SideValue>, cap: Option<f64>) -> Self {
        BoundaryData { sides, cap }
    }

    pub fn constant(n_sides: usize, v: f64) -> Self {
        Self::new(vec![SideValue::Finite(v); n_sides], None)
    }

    pub fn function(n_sides: usize, f: ScalarFn) -> Self {
        Self::new(vec![SideValue::Function(f); n_sides], None)
    }

    /// `+∞` on A sides and `−∞` on B sides, capped at `cap`.
    pub fn scherk(labels: &[SideLabel], cap: f64) -> Self {
        let sides = labels
            .iter()
            .map(|l| match l {
                SideLabel::A => SideValue::PlusInf,
                SideLabel::B => SideValue::MinusInf,
            })
            .collect();
        Self::new(sides, Some(cap))
    }

    pub fn for_domain(d: &ScherkPolygon, cap: f64) -> Self {
        Self::scherk(&d.labels, cap)
    }

    pub fn with_cap(&self, cap: f64) -> Self {
        BoundaryData {
            sides: self.sides.clone(),
            cap: Some(cap),
        }
    }

    fn has_infinite(&self) -> bool {
        self.sides
            .iter()
            .any(|s| matches!(s, SideValue::PlusInf | SideValue::MinusInf))
    }

    pub fn validate(&self, mesh: &Mesh) -> Result<()> {
        if self.sides.len() != mesh.n_sides {
            return Err(Error::BoundaryData(format!(
                "{} side values for a mesh with {} sides",
                self.sides.len(),
                mesh.n_sides
            )));
        }
        if self.has_infinite() {
            match self.cap {
                Some(t) if t > 0.0 && t.is_finite() => {}
                other => {
                    return Err(Error::BoundaryData(format!(
                        "infinite sides need a positive finite cap, got {other:?}"
                    )))
                }
            }
        }
        let mut seen = vec![false; mesh.n_sides];
        for &(_, _, s) in &mesh.boundary_edges {
            seen[s] = true;
        }
        if let Some(s) = seen.iter().position(|&b| !b) {
            return Err(Error::BoundaryData(format!("side {s} has no boundary edge")));
        }
        Ok(())
    }

    pub fn side_value(&self, side: usize, p: Point) -> f64 {
        let t = self.cap.unwrap_or(f64::NAN);
        match &self.sides[side] {
            SideValue::Finite(v) => *v,
            SideValue::Function(f) => f(p),
            SideValue::PlusInf => t,
            SideValue::MinusInf => -t,
        }
    }

    /// Value at a boundary node. Corners take the mean of the two sides.
    pub fn node_value(&self, kind: NodeKind, p: Point) -> Option<f64> {
        match kind {
            NodeKind::Interior => None,
            NodeKind::Side(s) => Some(self.side_value(s, p)),
            NodeKind::Corner(a, b) => Some(0.5 * (self.side_value(a, p) + self.side_value(b, p))),
        }
    }

    /// Nodal Dirichlet values, `NaN` at interior nodes.
    pub fn nodal(&self, mesh: &Mesh) -> Result<Vec<f64>> {
        self.validate(mesh)?;
        Ok(mesh
            .nodes
            .iter()
            .zip(&mesh.node_kind)
            .map(|(&p, &k)| self.node_value(k, p).unwrap_or(f64::NAN))
            .collect())
    }
}
