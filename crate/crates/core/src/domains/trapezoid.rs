use super::quadrilateral::BALANCE_TOL;
use crate::geometry::{chord, chord_length, DiscSpec, GeodesicArc};
use crate::roots::bisect;
use crate::{Error, Result};

/// Regular trapezoid over the chord `γ(p1, p2)`, filling part of the cap
/// between the chord and the boundary arc `α([s1, s2])`.
///
/// Parameters are stored unreduced and increasing:
/// `p1_s < minus_s < plus_s < p2_s = p1_s + gap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Trapezoid {
    pub disc: DiscSpec,
    pub p1_s: f64,
    pub minus_s: f64,
    pub plus_s: f64,
    pub p2_s: f64,
    /// Half-width `s0` of the top side about the arc midpoint.
    pub half_width: f64,
    /// `γ(p1, p⁻)`
    pub l1: f64,
    /// `γ(p⁻, p⁺)`
    pub l2: f64,
    /// `γ(p⁺, p2)`
    pub l3: f64,
    /// `γ(p2, p1)`, the base.
    pub l4: f64,
}

fn lengths(disc: &DiscSpec, p1: f64, p2: f64, s: f64) -> [f64; 4] {
    let mid = p1 + 0.5 * disc.ccw_gap(p1, p2);
    let (minus, plus) = (mid - s, mid + s);
    [
        chord_length(disc, p1, minus),
        chord_length(disc, minus, plus),
        chord_length(disc, plus, p2),
        chord_length(disc, p1, p2),
    ]
}

/// `l1(s) + l3(s) - l2(s) - l4` for the trapezoid with top vertices `s̄ ± s`.
pub fn trapezoid_balance(disc: &DiscSpec, p1_s: f64, p2_s: f64, s: f64) -> f64 {
    let [l1, l2, l3, l4] = lengths(disc, p1_s, p2_s, s);
    l1 + l3 - l2 - l4
}

/// Balanced trapezoid `l1 + l3 = l2 + l4` attached to the side `γ(α(p1_s), α(p2_s))`.
///
/// The balance is positive for small `s` (strict triangle inequality) and
/// tends to `-2 l4` as the top vertices reach `p1`, `p2`.
pub fn regular_trapezoid(disc: &DiscSpec, p1_s: f64, p2_s: f64) -> Result<Trapezoid> {
    let l = disc.boundary_length();
    let gap = disc.ccw_gap(p1_s, p2_s);
    if gap <= 1e-12 * l || gap >= l * (1.0 - 1e-12) {
        return Err(Error::DegenerateArc);
    }
    let half = 0.5 * gap;
    let margin = 1e-9 * half;
    let s0 = bisect(
        |s| trapezoid_balance(disc, p1_s, p2_s, s),
        margin,
        half - margin,
        BALANCE_TOL,
    )?;
    let [l1, l2, l3, l4] = lengths(disc, p1_s, p2_s, s0);
    let mid = p1_s + half;
    Ok(Trapezoid {
        disc: *disc,
        p1_s,
        minus_s: mid - s0,
        plus_s: mid + s0,
        p2_s: p1_s + gap,
        half_width: s0,
        l1,
        l2,
        l3,
        l4,
    })
}

impl Trapezoid {
    pub fn balance_residual(&self) -> f64 {
        (self.l1 + self.l3 - self.l2 - self.l4).abs()
    }

    /// `[p1, p⁻, p⁺, p2]` as boundary parameters.
    pub fn vertices_s(&self) -> [f64; 4] {
        [self.p1_s, self.minus_s, self.plus_s, self.p2_s]
    }

    /// The four sides `γ(p1,p⁻), γ(p⁻,p⁺), γ(p⁺,p2), γ(p2,p1)`.
    pub fn arcs(&self) -> [GeodesicArc; 4] {
        let d = &self.disc;
        let c = |a, b| chord(d, a, b).expect("distinct trapezoid vertices");
        [
            c(self.p1_s, self.minus_s),
            c(self.minus_s, self.plus_s),
            c(self.plus_s, self.p2_s),
            c(self.p2_s, self.p1_s),
        ]
    }

    pub fn perimeter(&self) -> f64 {
        self.l1 + self.l2 + self.l3 + self.l4
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeodesicPolygon, MetricModel};
    use approx::assert_abs_diff_eq;

    fn hyp() -> DiscSpec {
        DiscSpec::new(MetricModel::Hyperbolic)
    }

    #[test]
    fn half_disc_trapezoid_is_symmetric() {
        let d = hyp();
        let l = d.boundary_length();
        let t = regular_trapezoid(&d, 0.0, l / 2.0).unwrap();
        assert_abs_diff_eq!(t.l1, t.l3, epsilon = 1e-12);
        assert!(t.balance_residual() <= 1e-10);
        assert!(t.minus_s > t.p1_s && t.plus_s < t.p2_s && t.minus_s < t.plus_s);
    }

    #[test]
    fn bisection_root_matches_dense_scan() {
        let d = hyp();
        let l = d.boundary_length();
        let half = l / 4.0;
        // scan the balance on a 1e-6 grid of the half-width and locate the sign change
        let step = 1e-6;
        let mut prev = trapezoid_balance(&d, 0.0, l / 2.0, step);
        let mut scan_root = None;
        let mut k = 2usize;
        while (k as f64) * step < half {
            let s = k as f64 * step;
            let cur = trapezoid_balance(&d, 0.0, l / 2.0, s);
            if prev > 0.0 && cur <= 0.0 {
                scan_root = Some(s - step * cur / (cur - prev));
                break;
            }
            prev = cur;
            k += 1;
        }
        let scan_root = scan_root.expect("sign change on the scan");
        let t = regular_trapezoid(&d, 0.0, l / 2.0).unwrap();
        assert!((t.half_width - scan_root).abs() <= 1e-5, "{} vs {}", t.half_width, scan_root);
    }

    #[test]
    fn balance_positive_near_zero_negative_near_half() {
        let d = hyp();
        let l = d.boundary_length();
        for (p1, p2) in [(0.0, l / 2.0), (1.0, 2.8), (6.0, 7.0 + l)] {
            let half = 0.5 * d.ccw_gap(p1, p2);
            assert!(trapezoid_balance(&d, p1, p2, 1e-7 * half) > 0.0);
            assert!(trapezoid_balance(&d, p1, p2, half * (1.0 - 1e-7)) < 0.0);
        }
    }

    #[test]
    fn trapezoid_bounds_a_topological_disc() {
        let d = hyp();
        let t = regular_trapezoid(&d, 0.4, 2.5).unwrap();
        let poly = GeodesicPolygon::from_sides(MetricModel::Hyperbolic, t.arcs().to_vec()).unwrap();
        let m = poly.metrics();
        assert!(m.is_simple && m.is_ccw);
        assert_abs_diff_eq!(m.perimeter, t.perimeter(), epsilon = 1e-12);
    }

    #[test]
    fn degenerate_side() {
        assert!(matches!(
            regular_trapezoid(&hyp(), 1.0, 1.0),
            Err(Error::DegenerateArc)
        ));
    }
}
