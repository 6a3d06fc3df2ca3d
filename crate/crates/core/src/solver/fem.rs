use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, Triplet};
use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mesh::Mesh;
use super::operator::OperatorSpec;
use crate::geometry::Point;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveParams {
    /// Relative to `max(‖R(u₀)‖, 1)`.
    pub tol: f64,
    pub max_newton: usize,
    /// Backtracking line search on the residual norm.
    pub damping: bool,
}

impl Default for SolveParams {
    fn default() -> Self {
        SolveParams {
            tol: 1e-10,
            max_newton: 200,
            damping: true,
        }
    }
}

/// Smallest step fraction tried by the line search.
pub const MIN_DAMPING: f64 = 1.0 / (1u64 << 20) as f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveLog {
    pub newton_iters: usize,
    /// Residual norm before the first step and after each accepted step.
    pub residuals: Vec<f64>,
    /// Step fraction accepted at each iteration.
    pub damping: Vec<f64>,
    pub converged: bool,
}

impl SolveLog {
    pub fn final_residual(&self) -> f64 {
        *self.residuals.last().unwrap_or(&0.0)
    }
}

/// Per-triangle data that does not depend on `u`.
#[derive(Debug, Clone)]
pub(crate) struct Element {
    pub nodes: [usize; 3],
    pub area: f64,
    /// Gradients of the three hat functions.
    pub dphi: [[f64; 2]; 3],
    /// Edge midpoints, opposite to node 2, 0, 1.
    pub qp: [Point; 3],
}

/// Nodes carried by each edge-midpoint quadrature point.
const QP_NODES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

pub(crate) fn elements(mesh: &Mesh) -> Vec<Element> {
    mesh.triangles
        .iter()
        .map(|&tri| {
            let [a, b, c] = tri.map(|i| mesh.nodes[i]);
            let det = (b - a).cross(c - a);
            // ∇φ_k = rot(opposite edge) / det
            let edge = |p: Point, q: Point| [(p.y - q.y) / det, (q.x - p.x) / det];
            Element {
                nodes: tri,
                area: 0.5 * det,
                dphi: [edge(b, c), edge(c, a), edge(a, b)],
                qp: [a.lerp(b, 0.5), b.lerp(c, 0.5), c.lerp(a, 0.5)],
            }
        })
        .collect()
}

impl Element {
    #[inline]
    pub fn gradient(&self, u: &[f64]) -> [f64; 2] {
        let mut g = [0.0; 2];
        for k in 0..3 {
            let v = u[self.nodes[k]];
            g[0] += v * self.dphi[k][0];
            g[1] += v * self.dphi[k][1];
        }
        g
    }
}

struct Local {
    r: [f64; 3],
    k: [[f64; 3]; 3],
}

/// The discrete nonlinear system on the unknown (non-Dirichlet) nodes.
pub(crate) struct System<'a> {
    pub op: &'a OperatorSpec,
    pub elems: Vec<Element>,
    /// Unknown index of each node.
    pub dof: Vec<Option<usize>>,
    pub n_dof: usize,
    /// `∫ λ² f φ_i` per node.
    load: Vec<f64>,
}

impl<'a> System<'a> {
    pub fn new(mesh: &'a Mesh, op: &'a OperatorSpec) -> Self {
        let elems = elements(mesh);
        let mut dof = vec![None; mesh.n_nodes()];
        let mut n_dof = 0;
        for (i, k) in mesh.node_kind.iter().enumerate() {
            if !k.is_boundary() {
                dof[i] = Some(n_dof);
                n_dof += 1;
            }
        }
        let mut load = vec![0.0; mesh.n_nodes()];
        if !op.source.is_zero() {
            for e in &elems {
                for (q, pair) in QP_NODES.iter().enumerate() {
                    let s = op.weighted_source(e.qp[q]) * e.area / 3.0 * 0.5;
                    for &k in pair {
                        load[e.nodes[k]] += s;
                    }
                }
            }
        }
        System {
            op,
            elems,
            dof,
            n_dof,
            load,
        }
    }

    fn local(&self, e: &Element, u: &[f64], with_jacobian: bool) -> Local {
        let g = e.gradient(u);
        let w = e.area / 3.0;
        let mut r = [0.0; 3];
        let mut k = [[0.0; 3]; 3];
        for &x in &e.qp {
            let d = self.op.density(x, g);
            for i in 0..3 {
                r[i] += w * (d.q[0] * e.dphi[i][0] + d.q[1] * e.dphi[i][1]);
                if with_jacobian {
                    let a = [
                        d.dq[0][0] * e.dphi[i][0] + d.dq[1][0] * e.dphi[i][1],
                        d.dq[0][1] * e.dphi[i][0] + d.dq[1][1] * e.dphi[i][1],
                    ];
                    for j in 0..3 {
                        k[i][j] += w * (a[0] * e.dphi[j][0] + a[1] * e.dphi[j][1]);
                    }
                }
            }
        }
        Local { r, k }
    }

    fn locals(&self, u: &[f64], with_jacobian: bool) -> Vec<Local> {
        self.elems
            .par_iter()
            .map(|e| self.local(e, u, with_jacobian))
            .collect()
    }

    /// Residual on the unknowns, summed in triangle order.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        let locals = self.locals(u, false);
        self.scatter_residual(&locals)
    }

    fn scatter_residual(&self, locals: &[Local]) -> Vec<f64> {
        let mut r = vec![0.0; self.n_dof];
        for (e, l) in self.elems.iter().zip(locals) {
            for i in 0..3 {
                if let Some(a) = self.dof[e.nodes[i]] {
                    r[a] += l.r[i];
                }
            }
        }
        for (i, d) in self.dof.iter().enumerate() {
            if let Some(a) = d {
                r[*a] += self.load[i];
            }
        }
        r
    }

    pub fn residual_and_jacobian(&self, u: &[f64]) -> Result<(Vec<f64>, SparseColMat<usize, f64>)> {
        let locals = self.locals(u, true);
        let r = self.scatter_residual(&locals);
        let mut trip = Vec::with_capacity(9 * self.elems.len());
        for (e, l) in self.elems.iter().zip(&locals) {
            for i in 0..3 {
                let Some(a) = self.dof[e.nodes[i]] else { continue };
                for j in 0..3 {
                    if let Some(b) = self.dof[e.nodes[j]] {
                        trip.push(Triplet::new(a, b, l.k[i][j]));
                    }
                }
            }
        }
        let jac = SparseColMat::try_new_from_triplets(self.n_dof, self.n_dof, &trip)
            .map_err(|e| Error::Singular(format!("jacobian assembly: {e:?}")))?;
        Ok((r, jac))
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Cholesky solves sharing one symbolic factorization.
pub(crate) struct LinearSolver {
    symbolic: Option<SymbolicLlt<usize>>,
}

impl LinearSolver {
    pub fn new() -> Self {
        LinearSolver { symbolic: None }
    }

    pub fn solve(&mut self, a: &SparseColMat<usize, f64>, b: &[f64]) -> Result<Vec<f64>> {
        if b.is_empty() {
            return Ok(Vec::new());
        }
        let symbolic = match &self.symbolic {
            Some(s) => s.clone(),
            None => {
                let s = SymbolicLlt::try_new(a.symbolic(), Side::Lower)
                    .map_err(|e| Error::Singular(format!("symbolic factorization: {e:?}")))?;
                self.symbolic = Some(s.clone());
                s
            }
        };
        let llt = Llt::try_new_with_symbolic(symbolic, a.as_ref(), Side::Lower)
            .map_err(|e| Error::Singular(format!("stiffness matrix is not positive definite: {e:?}")))?;
        let mut x = Mat::from_fn(b.len(), 1, |i, _| b[i]);
        llt.solve_in_place(&mut x);
        let out: Vec<f64> = (0..b.len()).map(|i| x[(i, 0)]).collect();
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::Singular("non-finite solution".into()));
        }
        Ok(out)
    }
}

/// Damped Newton from `u0`, whose Dirichlet entries stay fixed.
/// Stagnation returns the best iterate with `converged = false`.
pub(crate) fn newton(sys: &System<'_>, mut u: Vec<f64>, params: &SolveParams) -> Result<(Vec<f64>, SolveLog)> {
    let mut lin = LinearSolver::new();
    let (mut r, mut jac) = sys.residual_and_jacobian(&u)?;
    let mut rn = norm(&r);
    let target = params.tol * rn.max(1.0);
    let mut log = SolveLog {
        newton_iters: 0,
        residuals: vec![rn],
        damping: Vec::new(),
        converged: rn <= target,
    };
    while !log.converged && log.newton_iters < params.max_newton {
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let delta = lin.solve(&jac, &rhs)?;
        let mut alpha = 1.0;
        let accepted = loop {
            let trial = step(sys, &u, &delta, alpha);
            let tr = sys.residual(&trial);
            let tn = norm(&tr);
            if !params.damping || tn < rn {
                break Some((trial, tn));
            }
            alpha *= 0.5;
            if alpha < MIN_DAMPING {
                break None;
            }
        };
        let Some((trial, tn)) = accepted else { break };
        u = trial;
        rn = tn;
        log.newton_iters += 1;
        log.residuals.push(rn);
        log.damping.push(alpha);
        log.converged = rn <= target;
        if !log.converged {
            (r, jac) = sys.residual_and_jacobian(&u)?;
        }
    }
    Ok((u, log))
}

fn step(sys: &System<'_>, u: &[f64], delta: &[f64], alpha: f64) -> Vec<f64> {
    let mut out = u.to_vec();
    for (i, d) in sys.dof.iter().enumerate() {
        if let Some(a) = d {
            out[i] += alpha * delta[*a];
        }
    }
    out
}

/// Discrete harmonic function with boundary values `boundary` (interior entries ignored).
pub(crate) fn harmonic_extension(mesh: &Mesh, boundary: &[f64]) -> Result<Vec<f64>> {
    let op = OperatorSpec::new(super::Variant::Harmonic, mesh.model)?;
    let sys = System::new(mesh, &op);
    let mut u: Vec<f64> = boundary
        .iter()
        .zip(&sys.dof)
        .map(|(&b, d)| if d.is_some() { 0.0 } else { b })
        .collect();
    let (r, jac) = sys.residual_and_jacobian(&u)?;
    let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
    let delta = LinearSolver::new().solve(&jac, &rhs)?;
    for (i, d) in sys.dof.iter().enumerate() {
        if let Some(a) = d {
            u[i] = delta[*a];
        }
    }
    Ok(u)
}
