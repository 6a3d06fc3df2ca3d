use std::io::Write;
use std::sync::Arc;

use super::fem::{elements, SolveLog};
use super::mesh::Mesh;
use crate::geometry::Point;
use crate::Result;

/// Uniform grid of buckets listing the triangles whose bounding boxes overlap them.
#[derive(Debug, Clone)]
struct Locator {
    min: Point,
    cell: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<u32>>,
}

impl Locator {
    fn new(mesh: &Mesh) -> Self {
        let (mut lo, mut hi) = (Point::new(f64::INFINITY, f64::INFINITY), Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
        for p in &mesh.nodes {
            lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
            hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
        }
        let n_cells = (mesh.triangles.len().max(1) as f64).sqrt().ceil() as usize;
        let span = (hi.x - lo.x).max(hi.y - lo.y).max(1e-300);
        let cell = span / n_cells as f64 * (1.0 + 1e-9);
        let nx = ((hi.x - lo.x) / cell).floor() as usize + 1;
        let ny = ((hi.y - lo.y) / cell).floor() as usize + 1;
        let mut buckets = vec![Vec::new(); nx * ny];
        for (t, tri) in mesh.triangles.iter().enumerate() {
            let pts = tri.map(|i| mesh.nodes[i]);
            let (x0, x1) = (pts.iter().map(|p| p.x).fold(f64::INFINITY, f64::min), pts.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max));
            let (y0, y1) = (pts.iter().map(|p| p.y).fold(f64::INFINITY, f64::min), pts.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max));
            let (i0, i1) = (((x0 - lo.x) / cell) as usize, (((x1 - lo.x) / cell) as usize).min(nx - 1));
            let (j0, j1) = (((y0 - lo.y) / cell) as usize, (((y1 - lo.y) / cell) as usize).min(ny - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    buckets[j * nx + i].push(t as u32);
                }
            }
        }
        Locator { min: lo, cell, nx, ny, buckets }
    }

    fn candidates(&self, p: Point) -> &[u32] {
        let fx = (p.x - self.min.x) / self.cell;
        let fy = (p.y - self.min.y) / self.cell;
        if !(fx >= 0.0 && fy >= 0.0) || fx as usize >= self.nx || fy as usize >= self.ny {
            return &[];
        }
        &self.buckets[fy as usize * self.nx + fx as usize]
    }
}

pub(crate) fn barycentric(pts: [Point; 3], p: Point) -> [f64; 3] {
    let [a, b, c] = pts;
    let det = (b - a).cross(c - a);
    let l1 = (p - a).cross(c - a) / det;
    let l2 = (b - a).cross(p - a) / det;
    [1.0 - l1 - l2, l1, l2]
}

/// A P1 solution on a mesh.
#[derive(Debug, Clone)]
pub struct Field {
    pub mesh: Arc<Mesh>,
    pub values: Vec<f64>,
    /// Constant gradient on each triangle.
    pub gradients: Vec<[f64; 2]>,
    pub log: SolveLog,
    locator: Arc<Locator>,
}

/// Barycentric coordinates within this tolerance still count as inside.
const LOCATE_TOL: f64 = 1e-10;

impl Field {
    pub fn new(mesh: Arc<Mesh>, values: Vec<f64>, log: SolveLog) -> Self {
        let elems = elements(&mesh);
        let gradients = elems.iter().map(|e| e.gradient(&values)).collect();
        let locator = Arc::new(Locator::new(&mesh));
        Field {
            mesh,
            values,
            gradients,
            log,
            locator,
        }
    }

    /// Same mesh, new nodal values (gradients recomputed).
    pub fn with_values(&self, values: Vec<f64>) -> Self {
        let elems = elements(&self.mesh);
        Field {
            mesh: self.mesh.clone(),
            gradients: elems.iter().map(|e| e.gradient(&values)).collect(),
            values,
            log: self.log.clone(),
            locator: self.locator.clone(),
        }
    }

    /// Triangle containing `p` and the barycentric coordinates of `p` in it.
    pub fn locate(&self, p: Point) -> Option<(usize, [f64; 3])> {
        let mut best: Option<(usize, [f64; 3], f64)> = None;
        for &t in self.locator.candidates(p) {
            let t = t as usize;
            let b = barycentric(self.mesh.triangle_points(t), p);
            let m = b[0].min(b[1]).min(b[2]);
            if m >= -LOCATE_TOL && best.map_or(true, |(_, _, bm)| m > bm) {
                best = Some((t, b, m));
            }
        }
        best.map(|(t, b, _)| (t, b))
    }

    /// Linear interpolation, `None` outside the mesh.
    pub fn value_at(&self, p: Point) -> Option<f64> {
        self.locate(p).map(|(t, b)| {
            let tri = self.mesh.triangles[t];
            (0..3).map(|k| b[k] * self.values[tri[k]]).sum()
        })
    }

    pub fn gradient_at(&self, p: Point) -> Option<[f64; 2]> {
        self.locate(p).map(|(t, _)| self.gradients[t])
    }

    /// Area-weighted average of the adjacent triangle gradients at each node.
    pub fn nodal_gradients(&self) -> Vec<[f64; 2]> {
        let n = self.mesh.n_nodes();
        let mut acc = vec![[0.0; 2]; n];
        let mut wsum = vec![0.0; n];
        for (t, tri) in self.mesh.triangles.iter().enumerate() {
            let a = self.mesh.triangle_area(t);
            for &i in tri {
                acc[i][0] += a * self.gradients[t][0];
                acc[i][1] += a * self.gradients[t][1];
                wsum[i] += a;
            }
        }
        acc.iter()
            .zip(&wsum)
            .map(|(g, &w)| if w > 0.0 { [g[0] / w, g[1] / w] } else { [0.0; 2] })
            .collect()
    }

    /// Maximum of `|self - other|` over the nodes (same mesh).
    pub fn max_difference(&self, other: &Field) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Columns `x,y,u,ux,uy`, one row per node.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "x,y,u,ux,uy")?;
        for ((p, u), g) in self.mesh.nodes.iter().zip(&self.values).zip(self.nodal_gradients()) {
            writeln!(w, "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.y, u, g[0], g[1])?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii")
    }

    pub fn log_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.log)?)
    }
}
