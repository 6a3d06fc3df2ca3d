use super::{ScherkPolygon, SideLabel};
use crate::geometry::{chord_length, DiscSpec};
use crate::roots::bisect;
use crate::Result;

/// Residual tolerance (length units) of the balancing root-finds.
pub(crate) const BALANCE_TOL: f64 = 1e-10;

/// Vertex parameters `[x0 + s, x0 + L/2 - s, x0 + L/2 + s, x0 - s]`, reduced mod `L`.
pub fn quadrilateral_params(disc: &DiscSpec, x0_s: f64, s: f64) -> [f64; 4] {
    let half = 0.5 * disc.boundary_length();
    [x0_s + s, x0_s + half - s, x0_s + half + s, x0_s - s].map(|v| disc.reduce(v))
}

/// `|A₁(s)| + |A₂(s)| - |B₁(s)| - |B₂(s)|` for the moving quadrilateral.
pub fn quadrilateral_balance(disc: &DiscSpec, x0_s: f64, s: f64) -> f64 {
    let [p1, p2, p3, p4] = quadrilateral_params(disc, x0_s, s);
    let b1 = chord_length(disc, p1, p2);
    let a1 = chord_length(disc, p2, p3);
    let b2 = chord_length(disc, p3, p4);
    let a2 = chord_length(disc, p4, p1);
    a1 + a2 - b1 - b2
}

/// Balanced quadrilateral associated to the basepoint `α(x0_s)`.
///
/// Sides are `B₁, A₁, B₂, A₂` (indices 0..4), `B₁` is the bottom side.
/// The balance function is negative as `s → 0⁺` (the `A` sides collapse) and
/// positive as `s → L/4⁻` (the `B` sides collapse); past `L/4` the vertex
/// order flips, so the root is bracketed on `(0, L/4)`.
pub fn inscribed_quadrilateral(disc: &DiscSpec, x0_s: f64) -> Result<ScherkPolygon> {
    let quarter = 0.25 * disc.boundary_length();
    let margin = 1e-9 * quarter;
    let s0 = bisect(
        |s| quadrilateral_balance(disc, x0_s, s),
        margin,
        quarter - margin,
        BALANCE_TOL,
    )?;
    let params = quadrilateral_params(disc, x0_s, s0).to_vec();
    let labels = vec![SideLabel::B, SideLabel::A, SideLabel::B, SideLabel::A];
    let mut poly = ScherkPolygon::new(*disc, params, labels)?;
    poly.bottom_index = 0;
    Ok(poly)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MetricModel;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn hyp() -> DiscSpec {
        DiscSpec::new(MetricModel::Hyperbolic)
    }

    #[test]
    fn symmetric_at_zero_basepoint() {
        let d = hyp();
        let l = d.boundary_length();
        let q = inscribed_quadrilateral(&d, 0.0).unwrap();
        let expect = [l / 8.0, 3.0 * l / 8.0, 5.0 * l / 8.0, 7.0 * l / 8.0];
        for (got, want) in q.vertex_params.iter().zip(expect) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-9);
        }
        let (c, s) = (1f64.cosh(), 1f64.sinh());
        let side = (c * c - s * s * (std::f64::consts::FRAC_PI_2).cos()).acosh();
        for i in 0..4 {
            assert_abs_diff_eq!(q.side_length(i), side, epsilon = 1e-9);
        }
        assert!(q.condition1_residual() <= 1e-10);
        assert_eq!(q.labels[q.bottom_index], SideLabel::B);
    }

    #[test]
    fn balance_changes_sign_on_bracket() {
        let d = hyp();
        let quarter = 0.25 * d.boundary_length();
        for x0 in [0.0, 1.3, 4.0] {
            assert!(quadrilateral_balance(&d, x0, 1e-6) < 0.0);
            assert!(quadrilateral_balance(&d, x0, quarter - 1e-6) > 0.0);
        }
    }

    #[test]
    fn euclidean_quadrilateral_is_square() {
        let d = DiscSpec::new(MetricModel::Euclidean);
        let q = inscribed_quadrilateral(&d, 0.0).unwrap();
        for i in 0..4 {
            assert_abs_diff_eq!(q.side_length(i), 2f64.sqrt(), epsilon = 1e-9);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn rotation_equivariance(c in 0.0..7.38f64) {
            let d = hyp();
            let base = inscribed_quadrilateral(&d, 0.0).unwrap();
            let moved = inscribed_quadrilateral(&d, c).unwrap();
            let angle = std::f64::consts::TAU * c / d.boundary_length();
            for i in 0..4 {
                let expect = base.vertex(i).rotate(angle);
                prop_assert!((moved.vertex(i) - expect).norm() <= 1e-9);
            }
        }
    }
}
