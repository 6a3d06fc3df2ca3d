use rayon::prelude::*;
use serde::Serialize;

use super::{ScherkPolygon, SideLabel};
use crate::geometry::chord_length;
use crate::{Error, Result};

/// Enumeration walks all `2^n` vertex subsets.
pub const MAX_ENUMERATION_VERTICES: usize = 16;

/// Slacks within this distance of the minimum are treated as ties; ties go
/// to the polygon with fewest vertices, then to the lowest subset mask.
const TIE_WINDOW: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    /// `|Σ|A_i| - Σ|B_i||`
    pub condition1_residual: f64,
    /// Vertex indices of the inscribed polygon with the least slack.
    pub worst_polygon: Vec<usize>,
    /// `min_P (|P| - 2a(P))` over inscribed `P ≠ D`.
    pub slack_a: f64,
    /// `min_P (|P| - 2b(P))` over inscribed `P ≠ D`.
    pub slack_b: f64,
    pub worst_a: Vec<usize>,
    pub worst_b: Vec<usize>,
    pub tol: f64,
    pub passes: bool,
}

impl AdmissibilityReport {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// `(|P| - 2a(P), |P| - 2b(P))` for the inscribed polygon on the vertex subset
/// `mask` (bit `i` selects vertex `i`).
///
/// A side of the Scherk polygon belongs to `P` iff both its endpoints are
/// selected; chords between other selected vertices only add to `|P|`.
pub fn inscribed_slacks(poly: &ScherkPolygon, mask: u32) -> (f64, f64) {
    let table = ChordTable::new(poly);
    table.slacks(mask)
}

struct ChordTable {
    n: usize,
    lengths: Vec<f64>,
    labels: Vec<SideLabel>,
}

impl ChordTable {
    fn new(poly: &ScherkPolygon) -> Self {
        let n = poly.len();
        let mut lengths = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = chord_length(&poly.disc, poly.vertex_params[i], poly.vertex_params[j]);
                lengths[i * n + j] = d;
                lengths[j * n + i] = d;
            }
        }
        ChordTable {
            n,
            lengths,
            labels: poly.labels.clone(),
        }
    }

    #[inline]
    fn chord(&self, i: usize, j: usize) -> f64 {
        self.lengths[i * self.n + j]
    }

    fn slacks(&self, mask: u32) -> (f64, f64) {
        let n = self.n;
        let chosen: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let k = chosen.len();
        let mut perimeter = 0.0;
        let (mut a, mut b) = (0.0, 0.0);
        for idx in 0..k {
            let (i, j) = (chosen[idx], chosen[(idx + 1) % k]);
            let d = self.chord(i, j);
            perimeter += d;
            if (i + 1) % n == j {
                match self.labels[i] {
                    SideLabel::A => a += d,
                    SideLabel::B => b += d,
                }
            }
        }
        (perimeter - 2.0 * a, perimeter - 2.0 * b)
    }
}

fn better(cand: (f64, u32), best: (f64, u32)) -> bool {
    if cand.0 < best.0 - TIE_WINDOW {
        return true;
    }
    if cand.0 > best.0 + TIE_WINDOW {
        return false;
    }
    let (cn, bn) = (cand.1.count_ones(), best.1.count_ones());
    cn < bn || (cn == bn && cand.1 < best.1)
}

fn mask_to_vertices(mask: u32, n: usize) -> Vec<usize> {
    (0..n).filter(|&i| mask & (1 << i) != 0).collect()
}

/// Jenkins–Serrin admissibility: Condition 1 within `tol` and
/// `2a(P) < |P|`, `2b(P) < |P|` (with slack above `tol`) for every inscribed
/// polygon `P ≠ D` on at least three vertices of `Γ`.
pub fn check_admissible(poly: &ScherkPolygon, tol: f64) -> Result<AdmissibilityReport> {
    poly.validate()?;
    let n = poly.len();
    if n > MAX_ENUMERATION_VERTICES {
        return Err(Error::EnumerationCap {
            got: n,
            cap: MAX_ENUMERATION_VERTICES,
        });
    }
    let table = ChordTable::new(poly);
    let full: u32 = (1u32 << n) - 1;
    // parallel map, ordered sequential reduction
    let slacks: Vec<(u32, f64, f64)> = (1..full)
        .into_par_iter()
        .filter(|m| m.count_ones() >= 3)
        .map(|m| {
            let (sa, sb) = table.slacks(m);
            (m, sa, sb)
        })
        .collect();

    let mut best_a = (f64::INFINITY, full);
    let mut best_b = (f64::INFINITY, full);
    for &(m, sa, sb) in &slacks {
        if better((sa, m), best_a) {
            best_a = (sa, m);
        }
        if better((sb, m), best_b) {
            best_b = (sb, m);
        }
    }
    let worst = if better(best_b, best_a) { best_b } else { best_a };
    let residual = poly.condition1_residual();
    let passes = residual <= tol && best_a.0 > tol && best_b.0 > tol;
    Ok(AdmissibilityReport {
        condition1_residual: residual,
        worst_polygon: mask_to_vertices(worst.1, n),
        slack_a: best_a.0,
        slack_b: best_b.0,
        worst_a: mask_to_vertices(best_a.1, n),
        worst_b: mask_to_vertices(best_b.1, n),
        tol,
        passes,
    })
}
