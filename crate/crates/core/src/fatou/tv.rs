use rayon::prelude::*;

use super::Compressed;
use crate::geometry::{MetricModel, Point};
use crate::solver::Mesh;
use crate::{Error, Result};

/// Subdivision depth for triangles cut by a circle.
const CLIP_DEPTH: u32 = 6;

/// `∫_{B(ρ_j)} |∇ψ|_g dA_g` for each geodesic radius `ρ_j`, clipped to the mesh.
///
/// With `g = λ²(dx² + dy²)`, `|∇ψ|_g dA_g = λ |∇ψ| dx dy`.
pub fn tv_integral(c: &Compressed, radii: &[f64]) -> Result<Vec<f64>> {
    let mesh = &c.psi.mesh;
    let support = support_radius(mesh);
    for (k, &r) in radii.iter().enumerate() {
        if !(r > 0.0) || r > support + 1e-12 {
            return Err(Error::RadiusOutOfRange(r));
        }
        if k > 0 && r <= radii[k - 1] {
            return Err(Error::Invalid(format!("radii must increase, got {radii:?}")));
        }
    }
    let model_r: Vec<f64> = radii.iter().map(|&r| mesh.model.model_radius(r)).collect();
    // per triangle, per radius; summed in triangle order afterwards
    let parts: Vec<Vec<f64>> = (0..mesh.triangles.len())
        .into_par_iter()
        .map(|t| {
            let g = c.grad_norm[t];
            let pts = mesh.triangle_points(t);
            model_r
                .iter()
                .map(|&r| if g == 0.0 { 0.0 } else { g * clipped_lambda_integral(mesh.model, pts, r, CLIP_DEPTH) })
                .collect()
        })
        .collect();
    let mut out = vec![0.0; radii.len()];
    for p in &parts {
        for (o, v) in out.iter_mut().zip(p) {
            *o += v;
        }
    }
    Ok(out)
}

/// `(T(ρ_hi) - T(ρ_lo)) / T(ρ_hi)`, zero when the variation vanishes.
pub fn tv_tail_share(c: &Compressed, lo: f64, hi: f64) -> Result<f64> {
    let v = tv_integral(c, &[lo, hi])?;
    Ok(if v[1] > 0.0 { (v[1] - v[0]) / v[1] } else { 0.0 })
}

/// Largest geodesic radius that may be asked for.
fn support_radius(mesh: &Mesh) -> f64 {
    match mesh.shape {
        crate::solver::MeshShape::Disc(d) => d.geodesic_radius,
        crate::solver::MeshShape::Planar => mesh.nodes.iter().map(|p| p.norm()).fold(0.0, f64::max),
        _ => 1.0,
    }
}

/// `∫_{T ∩ {|x| < r}} λ dx dy` by recursive 4-way subdivision.
fn clipped_lambda_integral(model: MetricModel, [a, b, c]: [Point; 3], r: f64, depth: u32) -> f64 {
    let outer = a.norm().max(b.norm()).max(c.norm());
    if outer <= r {
        return lambda_integral(model, [a, b, c]);
    }
    if segment_distance(a, b).min(segment_distance(b, c)).min(segment_distance(c, a)) >= r
        && !contains_origin([a, b, c])
    {
        return 0.0;
    }
    if depth == 0 {
        let g = Point::new((a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0);
        return if g.norm() < r { lambda_integral(model, [a, b, c]) } else { 0.0 };
    }
    let (ab, bc, ca) = (a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5));
    [[a, ab, ca], [ab, b, bc], [ca, bc, c], [ab, bc, ca]]
        .into_iter()
        .map(|t| clipped_lambda_integral(model, t, r, depth - 1))
        .sum()
}

fn lambda_integral(model: MetricModel, [a, b, c]: [Point; 3]) -> f64 {
    let area = 0.5 * (b - a).cross(c - a).abs();
    let q = [a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5)];
    area / 3.0 * q.iter().map(|&p| model.conformal_factor(p)).sum::<f64>()
}

fn segment_distance(a: Point, b: Point) -> f64 {
    let d = b - a;
    let t = if d.norm_sq() > 0.0 { (-(a.dot(d)) / d.norm_sq()).clamp(0.0, 1.0) } else { 0.0 };
    a.lerp(b, t).norm()
}

fn contains_origin([a, b, c]: [Point; 3]) -> bool {
    let o = Point::ORIGIN;
    let s = [(b - a).cross(o - a), (c - b).cross(o - b), (a - c).cross(o - c)];
    s.iter().all(|&v| v >= 0.0) || s.iter().all(|&v| v <= 0.0)
}
