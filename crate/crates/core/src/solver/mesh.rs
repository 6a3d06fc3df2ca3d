use std::f64::consts::{PI, TAU};

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};

use crate::domains::{CompactCore, ScherkPolygon};
use crate::geometry::{DiscSpec, GeodesicPolygon, MetricModel, Point};
use crate::{Error, Result};

/// Refuses meshes whose estimated node count exceeds this.
pub const NODE_CAP: usize = 1_000_000;

const ANGLE_LIMIT_DEG: f64 = 25.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    /// On the open boundary side with this id.
    Side(usize),
    /// Where side `.0` ends and side `.1` begins.
    Corner(usize, usize),
}

impl NodeKind {
    pub fn is_boundary(self) -> bool {
        !matches!(self, NodeKind::Interior)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeshShape {
    /// The whole geodesic disc.
    Disc(DiscSpec),
    Polygon,
    Core,
    Planar,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub model: MetricModel,
    pub shape: MeshShape,
    pub h: f64,
    pub nodes: Vec<Point>,
    /// Counter-clockwise triangles.
    pub triangles: Vec<[usize; 3]>,
    /// `(a, b, side)` for each boundary edge, walking the boundary counter-clockwise.
    pub boundary_edges: Vec<(usize, usize, usize)>,
    pub node_kind: Vec<NodeKind>,
    pub n_sides: usize,
}

/// What to mesh.
#[derive(Debug, Clone, Copy)]
pub enum Domain<'a> {
    Disc(&'a DiscSpec),
    Polygon(&'a GeodesicPolygon),
    /// Straight-sided polygon in the plane (no disc containment).
    Planar(&'a [Point]),
    Core(&'a CompactCore),
}

/// One closed boundary loop cut into sides, each a polyline whose last point
/// is the first point of the next side.
struct Outline {
    sides: Vec<Vec<Point>>,
}

/// Parameters `t_0 = 0 < … < t_n = 1` equidistributing `∫ |c'(t)| / spacing(c(t)) dt`.
fn graded_params(curve: &dyn Fn(f64) -> Point, spacing: &dyn Fn(Point) -> f64) -> Vec<f64> {
    const FINE: usize = 4000;
    let mut cum = vec![0.0; FINE + 1];
    let mut prev = curve(0.0);
    for k in 1..=FINE {
        let t = k as f64 / FINE as f64;
        let p = curve(t);
        let mid = curve(t - 0.5 / FINE as f64);
        cum[k] = cum[k - 1] + (p - prev).norm() / spacing(mid);
        prev = p;
    }
    let total = cum[FINE];
    let n = (total.ceil() as usize).max(1);
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut k = 0;
    for j in 1..n {
        let level = total * j as f64 / n as f64;
        while cum[k + 1] < level {
            k += 1;
        }
        let frac = (level - cum[k]) / (cum[k + 1] - cum[k]);
        out.push((k as f64 + frac) / FINE as f64);
    }
    out.push(1.0);
    out
}

/// Euclidean radius of the circle through three points (infinite if collinear).
fn circumradius(a: Point, b: Point, c: Point) -> f64 {
    let cross = (b - a).cross(c - a).abs();
    if cross <= 1e-14 * (b - a).norm() * (c - a).norm() {
        return f64::INFINITY;
    }
    (b - a).norm() * (c - b).norm() * (a - c).norm() / (2.0 * cross)
}

/// Boundary spacing: `h/4` at corners growing to `h`, and never more than
/// `h·√R` so that a chord of the polyline stays within `h²/8` of the curve.
fn spacing_fn(h: f64, radius_of_curvature: f64, corners: &[Point]) -> impl Fn(Point) -> f64 + '_ {
    let cap = h.min(h * radius_of_curvature.sqrt());
    move |p: Point| {
        let d = corners
            .iter()
            .map(|&c| (p - c).norm())
            .fold(f64::INFINITY, f64::min);
        (0.25 * h + 0.5 * d).min(cap)
    }
}

fn sample_curve(curve: &dyn Fn(f64) -> Point, h: f64, corners: &[Point]) -> Vec<Point> {
    let r = circumradius(curve(0.0), curve(0.5), curve(1.0));
    let sp = spacing_fn(h, r, corners);
    graded_params(curve, &sp).into_iter().map(curve).collect()
}

fn polygon_outline(poly: &GeodesicPolygon, h: f64) -> Outline {
    let corners = poly.vertices.clone();
    let sides = poly
        .sides
        .iter()
        .map(|arc| sample_curve(&|t| arc.sample(t), h, &corners))
        .collect();
    Outline { sides }
}

fn planar_outline(vertices: &[Point], h: f64) -> Outline {
    let n = vertices.len();
    let sides = (0..n)
        .map(|i| {
            let (a, b) = (vertices[i], vertices[(i + 1) % n]);
            sample_curve(&|t| a.lerp(b, t), h, vertices)
        })
        .collect();
    Outline { sides }
}

fn disc_outline(disc: &DiscSpec, h: f64) -> Outline {
    let r = disc.model_radius();
    let spacing = h.min(h * r.sqrt());
    let n = ((TAU * r / spacing).ceil() as usize).max(8);
    let mut pts: Vec<Point> = (0..n).map(|k| Point::polar(r, TAU * k as f64 / n as f64)).collect();
    pts.push(pts[0]);
    Outline { sides: vec![pts] }
}

/// `∂K`: side `2i` is the notch arc around `p_i`, side `2i + 1` the trimmed side `i`.
fn core_outline(core: &CompactCore, h: f64) -> Result<Outline> {
    let n = core.len();
    let model = core.model();
    let mut sides = Vec::with_capacity(2 * n);
    let mut notches = Vec::with_capacity(n);
    for i in 0..n {
        let Some(side) = core.trimmed_side(i) else {
            return Err(Error::Mesh(format!("core side {i} is swallowed by the notches")));
        };
        sides.push(sample_curve(&|t| side.sample(t), h, &[]));
    }
    for i in 0..n {
        let c = core.centers[i];
        let prev = &core.outer.sides[(i + n - 1) % n];
        let next = &core.outer.sides[i];
        // directions at p_i towards p_{i-1} and p_{i+1}; K lies between them
        let d_prev = prev.reversed().start_direction().angle();
        let d_next = next.start_direction().angle();
        let sweep = (d_prev - d_next).rem_euclid(TAU);
        let rho = core.notch_radius;
        let arc = move |t: f64| model.circle_point(c, rho, d_prev - t * sweep);
        notches.push(sample_curve(&arc, h, &[]));
    }
    // boundary order: notch i, then trimmed side i
    let mut ordered = Vec::with_capacity(2 * n);
    for i in 0..n {
        let mut notch = notches[i].clone();
        let side = &sides[i];
        *notch.last_mut().unwrap() = side[0];
        notch[0] = *sides[(i + n - 1) % n].last().unwrap();
        ordered.push(notch);
        ordered.push(side.clone());
    }
    Ok(Outline { sides: ordered })
}

struct Raw {
    nodes: Vec<Point>,
    triangles: Vec<[usize; 3]>,
}

/// Constrained Delaunay refinement of the region bounded by the closed polyline
/// `boundary`, with extra seed vertices.
fn refine(boundary: &[Point], seeds: &[Point], h: f64) -> Result<Raw> {
    let mut verts: Vec<Point2<f64>> = Vec::new();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    let n = boundary.len();
    for p in boundary {
        verts.push(Point2::new(p.x, p.y));
    }
    for i in 0..n {
        edges.push([i, (i + 1) % n]);
    }
    for p in seeds {
        verts.push(Point2::new(p.x, p.y));
    }
    let mut cdt = ConstrainedDelaunayTriangulation::<Point2<f64>>::bulk_load_cdt(verts, edges)
        .map_err(|e| Error::Mesh(format!("constrained triangulation failed: {e:?}")))?;
    let params = RefinementParameters::<f64>::new()
        .with_angle_limit(AngleLimit::from_deg(ANGLE_LIMIT_DEG))
        .with_max_allowed_area(3f64.sqrt() / 4.0 * h * h)
        .keep_constraint_edges()
        .exclude_outer_faces(true)
        .with_max_additional_vertices(NODE_CAP);
    let result = cdt.refine(params);
    if !result.refinement_complete {
        return Err(Error::Mesh("refinement ran out of vertices".into()));
    }
    let excluded: std::collections::HashSet<_> = result.excluded_faces.into_iter().collect();
    let nodes = cdt
        .vertices()
        .map(|v| {
            let p = v.position();
            Point::new(p.x, p.y)
        })
        .collect();
    let mut triangles = Vec::new();
    for face in cdt.inner_faces() {
        if excluded.contains(&face.fix()) {
            continue;
        }
        let [a, b, c] = face.vertices().map(|v| v.fix().index());
        triangles.push([a, b, c]);
    }
    Ok(Raw { nodes, triangles })
}

fn estimate_nodes(area: f64, h: f64) -> usize {
    (2.0 * area / (3f64.sqrt() / 4.0 * h * h)) as usize
}

fn shoelace(pts: &[Point]) -> f64 {
    let n = pts.len();
    0.5 * (0..n).map(|i| pts[i].cross(pts[(i + 1) % n])).sum::<f64>()
}

/// Flattens an outline into a closed loop and the matching boundary node kinds.
fn flatten(outline: &Outline) -> (Vec<Point>, Vec<NodeKind>, Vec<usize>) {
    let m = outline.sides.len();
    let mut pts = Vec::new();
    let mut kinds = Vec::new();
    // side id of the edge leaving each loop point
    let mut edge_side = Vec::new();
    for (s, side) in outline.sides.iter().enumerate() {
        for (k, p) in side[..side.len() - 1].iter().enumerate() {
            pts.push(*p);
            kinds.push(if k == 0 {
                if m == 1 {
                    NodeKind::Side(0)
                } else {
                    NodeKind::Corner((s + m - 1) % m, s)
                }
            } else {
                NodeKind::Side(s)
            });
            edge_side.push(s);
        }
    }
    (pts, kinds, edge_side)
}

fn assemble(raw: Raw, loop_pts: usize, kinds: Vec<NodeKind>, edge_side: Vec<usize>) -> (Vec<Point>, Vec<[usize; 3]>, Vec<NodeKind>, Vec<(usize, usize, usize)>) {
    let mut node_kind = vec![NodeKind::Interior; raw.nodes.len()];
    node_kind[..loop_pts].copy_from_slice(&kinds);
    let boundary_edges = (0..loop_pts)
        .map(|i| (i, (i + 1) % loop_pts, edge_side[i]))
        .collect();
    let triangles = raw
        .triangles
        .into_iter()
        .map(|[a, b, c]| {
            let (pa, pb, pc) = (raw.nodes[a], raw.nodes[b], raw.nodes[c]);
            if (pb - pa).cross(pc - pa) < 0.0 {
                [a, c, b]
            } else {
                [a, b, c]
            }
        })
        .collect();
    (raw.nodes, triangles, node_kind, boundary_edges)
}

/// Triangulates a domain with target edge length `h` in model coordinates.
pub fn triangulate(domain: Domain<'_>, h: f64) -> Result<Mesh> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::Mesh(format!("mesh size must be positive, got {h}")));
    }
    let (model, shape, outline, seed_origin) = match domain {
        Domain::Disc(d) => (d.model, MeshShape::Disc(*d), disc_outline(d, h), true),
        Domain::Polygon(p) => {
            if p.len() < 3 {
                return Err(Error::MalformedPolygon("need at least 3 vertices".into()));
            }
            if !p.is_simple(crate::geometry::DEFAULT_SIDE_SAMPLES) {
                return Err(Error::MalformedPolygon("polygon is not simple".into()));
            }
            let seed = p.contains(Point::ORIGIN);
            (p.model, MeshShape::Polygon, polygon_outline(p, h), seed)
        }
        Domain::Planar(v) => {
            if v.len() < 3 {
                return Err(Error::MalformedPolygon("need at least 3 vertices".into()));
            }
            (MetricModel::Euclidean, MeshShape::Planar, planar_outline(v, h), false)
        }
        Domain::Core(c) => (c.model(), MeshShape::Core, core_outline(c, h)?, true),
    };
    let (loop_pts, kinds, edge_side) = flatten(&outline);
    if shoelace(&loop_pts) < 0.0 {
        return Err(Error::MalformedPolygon("boundary must be counter-clockwise".into()));
    }
    if estimate_nodes(shoelace(&loop_pts), h) > NODE_CAP {
        return Err(Error::Mesh(format!("h = {h} exceeds the node cap")));
    }
    let seeds = if seed_origin { vec![Point::ORIGIN] } else { vec![] };
    let raw = refine(&loop_pts, &seeds, h)?;
    let (nodes, triangles, node_kind, boundary_edges) =
        assemble(raw, loop_pts.len(), kinds, edge_side);
    Ok(Mesh {
        model,
        shape,
        h,
        nodes,
        triangles,
        boundary_edges,
        node_kind,
        n_sides: outline.sides.len(),
    })
}

/// Meshes a Scherk polygon. Polygons invariant under a rotation are meshed
/// on one sector and replicated, so the mesh carries the same symmetry.
pub fn triangulate_scherk(d: &ScherkPolygon, h: f64) -> Result<Mesh> {
    let poly = d.to_geodesic_polygon();
    let n = d.len();
    match d.rotational_period() {
        Some(m) if m < n => triangulate_symmetric(d, &poly, m, h),
        _ => triangulate(Domain::Polygon(&poly), h),
    }
}

fn triangulate_symmetric(d: &ScherkPolygon, poly: &GeodesicPolygon, m: usize, h: f64) -> Result<Mesh> {
    let n = d.len();
    let copies = n / m;
    let model = d.model();
    let v0 = poly.vertices[0];
    let vm = poly.vertices[m % n];
    let corners = poly.vertices.clone();
    // sector boundary: origin → v0 along the ray, sides 0..m, vm → origin
    let ray_params = {
        let tip = [v0];
        let base = spacing_fn(h, f64::INFINITY, &tip);
        // rays are kept as constraints; a slightly finer spacing avoids slivers against them
        let sp = |p: Point| 0.7 * base(p);
        graded_params(&|t| v0 * t, &sp)
    };
    let sector_sides: Vec<Vec<Point>> = (0..m)
        .map(|i| {
            let arc = &poly.sides[i];
            sample_curve(&|t| arc.sample(t), h, &corners)
        })
        .collect();
    let ray_out: Vec<Point> = ray_params.iter().map(|&t| v0 * t).collect();
    let rot = (vm.angle() - v0.angle()).rem_euclid(TAU);
    if (rot * copies as f64 - TAU).abs() > 1e-9 {
        return Err(Error::Mesh("sector angle does not divide the turn".into()));
    }
    let ray_back: Vec<Point> = ray_params.iter().rev().map(|&t| (v0 * t).rotate(rot)).collect();

    // closed sector loop, first point the origin
    let mut loop_pts: Vec<Point> = Vec::new();
    loop_pts.extend_from_slice(&ray_out[..ray_out.len() - 1]);
    for side in &sector_sides {
        loop_pts.extend_from_slice(&side[..side.len() - 1]);
    }
    loop_pts.extend_from_slice(&ray_back[..ray_back.len() - 1]);
    let n_ray = ray_out.len() - 1; // origin .. point before v0
    let raw = refine(&loop_pts, &[], h)?;

    let n_loc = raw.nodes.len();
    // local loop layout
    let n_sides_pts: usize = sector_sides.iter().map(|s| s.len() - 1).sum();
    let back_start = n_ray + n_sides_pts; // index of vm in the loop
    let on_back = |k: usize| k >= back_start && k < loop_pts.len();
    // ray_back[j] = rotated ray_out[len-1-j]; loop index back_start + j
    let back_to_out = |k: usize| {
        let j = k - back_start;
        ray_out.len() - 1 - j
    };
    let mut global_nodes: Vec<Point> = Vec::new();
    let mut triangles = Vec::new();
    let mut maps: Vec<Vec<usize>> = Vec::with_capacity(copies);
    for c in 0..copies {
        let angle = rot * c as f64;
        let mut map = vec![usize::MAX; n_loc];
        for k in 0..n_loc {
            // the outgoing ray of copy c is the returning ray of copy c-1
            let shared = if k == 0 {
                if c > 0 { Some(maps[0][0]) } else { None }
            } else if k <= n_ray && c > 0 {
                Some(maps[c - 1][back_start + (ray_out.len() - 1 - k)])
            } else if on_back(k) && c + 1 == copies && copies > 1 {
                Some(maps[0][back_to_out(k)])
            } else {
                None
            };
            map[k] = match shared {
                Some(g) => g,
                None => {
                    global_nodes.push(raw.nodes[k].rotate(angle));
                    global_nodes.len() - 1
                }
            };
        }
        for t in &raw.triangles {
            triangles.push(t.map(|k| map[k]));
        }
        maps.push(map);
    }
    // boundary walk: per copy, sides then corners
    let mut node_kind = vec![NodeKind::Interior; global_nodes.len()];
    let mut boundary_edges = Vec::new();
    for c in 0..copies {
        let map = &maps[c];
        let mut k = n_ray;
        for (i, side) in sector_sides.iter().enumerate() {
            let sid = c * m + i;
            let len = side.len() - 1;
            for j in 0..len {
                let a = map[k + j];
                let b = map[k + j + 1];
                node_kind[a] = if j == 0 {
                    NodeKind::Corner((sid + n - 1) % n, sid)
                } else {
                    NodeKind::Side(sid)
                };
                boundary_edges.push((a, b, sid));
            }
            k += len;
        }
    }
    let triangles = triangles
        .into_iter()
        .map(|[a, b, c]: [usize; 3]| {
            let (pa, pb, pc) = (global_nodes[a], global_nodes[b], global_nodes[c]);
            if (pb - pa).cross(pc - pa) < 0.0 { [a, c, b] } else { [a, b, c] }
        })
        .collect();
    Ok(Mesh {
        model,
        shape: MeshShape::Polygon,
        h,
        nodes: global_nodes,
        triangles,
        boundary_edges,
        node_kind,
        n_sides: n,
    })
}

impl Mesh {
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        self.triangles[t].map(|i| self.nodes[i])
    }

    /// Model-coordinate area of triangle `t` (positive).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * (b - a).cross(c - a)
    }

    pub fn max_edge_length(&self) -> f64 {
        let mut m: f64 = 0.0;
        for t in 0..self.triangles.len() {
            let [a, b, c] = self.triangle_points(t);
            m = m.max((b - a).norm()).max((c - b).norm()).max((a - c).norm());
        }
        m
    }

    /// Smallest interior angle (radians) over all triangles.
    pub fn min_angle(&self) -> f64 {
        let mut m = PI;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for k in 0..3 {
                let (a, b, c) = (p[k], p[(k + 1) % 3], p[(k + 2) % 3]);
                let (u, v) = (b - a, c - a);
                m = m.min(u.cross(v).abs().atan2(u.dot(v)));
            }
        }
        m
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.node_kind[i].is_boundary()
    }

    /// Index of the node at `p` (exact match within `tol`), if any.
    pub fn find_node(&self, p: Point, tol: f64) -> Option<usize> {
        self.nodes.iter().position(|q| (*q - p).norm() <= tol)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::inscribed_quadrilateral;

    #[test]
    fn unit_disc_node_count() {
        let d = DiscSpec::new(MetricModel::Euclidean);
        let m = triangulate(Domain::Disc(&d), 0.05).unwrap();
        assert!((1000..=4000).contains(&m.n_nodes()), "{}", m.n_nodes());
        assert!(m.max_edge_length() <= 2.0 * 0.05);
        assert!(m.min_angle() >= 20f64.to_radians(), "{}", m.min_angle().to_degrees());
        assert!(m.find_node(Point::ORIGIN, 0.0).is_some());
    }

    #[test]
    fn positive_areas_and_conforming_boundary() {
        let d = DiscSpec::new(MetricModel::Hyperbolic);
        let m = triangulate(Domain::Disc(&d), 0.03).unwrap();
        assert!((0..m.triangles.len()).all(|t| m.triangle_area(t) > 0.0));
        // each boundary edge is the edge of exactly one triangle
        let mut count = std::collections::HashMap::new();
        for t in &m.triangles {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
            }
        }
        for &(a, b, _) in &m.boundary_edges {
            assert_eq!(count[&(a.min(b), a.max(b))], 1);
        }
        let boundary_total = count.values().filter(|&&c| c == 1).count();
        assert_eq!(boundary_total, m.boundary_edges.len());
    }

    #[test]
    fn symmetric_quadrilateral_mesh_is_inside_disc_and_symmetric() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let q = inscribed_quadrilateral(&disc, 0.0).unwrap();
        for h in [0.05, 0.035, 0.025, 0.015] {
            let m = triangulate_scherk(&q, h).unwrap();
            assert!(m.min_angle() >= 20f64.to_radians(), "h {h}: {}", m.min_angle().to_degrees());
        }
        let m = triangulate_scherk(&q, 0.02).unwrap();
        let r = disc.model_radius() * (1.0 + 1e-12);
        assert!(m.nodes.iter().all(|p| p.norm() <= r));
        assert!((0..m.triangles.len()).all(|t| m.triangle_area(t) > 0.0));
        assert!(m.min_angle() >= 20f64.to_radians(), "{}", m.min_angle().to_degrees());
        // every node rotated by a quarter turn is again a node
        for p in m.nodes.iter().step_by(7) {
            let q = p.rotate(std::f64::consts::FRAC_PI_2);
            assert!(m.find_node(q, 1e-12).is_some());
        }
        assert!(m.find_node(Point::ORIGIN, 0.0).is_some());
        assert_eq!(m.n_sides, 4);
        let sides: std::collections::BTreeSet<_> = m.boundary_edges.iter().map(|e| e.2).collect();
        assert_eq!(sides.len(), 4);
    }

    #[test]
    fn boundary_polyline_close_to_geodesics() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let q = inscribed_quadrilateral(&disc, 0.3).unwrap();
        let h = 0.03;
        let m = triangulate_scherk(&q, h).unwrap();
        for &(a, b, s) in &m.boundary_edges {
            let arc = q.side_arc(s);
            let mid = m.nodes[a].lerp(m.nodes[b], 0.5);
            // distance to the arc's circle through three of its points
            let (p0, p1, p2) = (arc.start, arc.midpoint(), arc.end);
            let r = circumradius(p0, p1, p2);
            let dev = if r.is_infinite() {
                ((p2 - p0).cross(mid - p0) / (p2 - p0).norm()).abs()
            } else {
                let center = circumcenter(p0, p1, p2);
                ((mid - center).norm() - r).abs()
            };
            assert!(dev <= h * h / 8.0, "{dev}");
        }
    }

    fn circumcenter(a: Point, b: Point, c: Point) -> Point {
        let d = 2.0 * (a.x * (b.y - c.y) + b.x * (c.y - a.y) + c.x * (a.y - b.y));
        let (a2, b2, c2) = (a.norm_sq(), b.norm_sq(), c.norm_sq());
        Point::new(
            (a2 * (b.y - c.y) + b2 * (c.y - a.y) + c2 * (a.y - b.y)) / d,
            (a2 * (c.x - b.x) + b2 * (a.x - c.x) + c2 * (b.x - a.x)) / d,
        )
    }

    #[test]
    fn degenerate_input() {
        let pts = [Point::new(0.0, 0.0), Point::new(0.1, 0.0)];
        assert!(matches!(
            triangulate(Domain::Planar(&pts), 0.05),
            Err(Error::MalformedPolygon(_))
        ));
        assert!(GeodesicPolygon::new(MetricModel::Hyperbolic, pts.to_vec()).is_err());
    }

    #[test]
    fn core_mesh() {
        let disc = DiscSpec::new(MetricModel::Hyperbolic);
        let q = inscribed_quadrilateral(&disc, 0.0).unwrap();
        let core = crate::domains::compact_core(&q, 0.9).unwrap();
        let m = triangulate(Domain::Core(&core), 0.02).unwrap();
        assert_eq!(m.n_sides, 8);
        let area: f64 = (0..m.triangles.len())
            .map(|t| {
                let [a, b, c] = m.triangle_points(t);
                let g = (a + b + c) * (1.0 / 3.0);
                m.triangle_area(t) * MetricModel::Hyperbolic.conformal_factor(g).powi(2)
            })
            .sum();
        assert!((area - core.area()).abs() <= 0.01 * core.area(), "{area} vs {}", core.area());
    }
}
