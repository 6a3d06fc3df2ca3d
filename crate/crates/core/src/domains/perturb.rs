use super::admissible::{check_admissible, inscribed_slacks, AdmissibilityReport};
use super::quadrilateral::BALANCE_TOL;
use super::trapezoid::{regular_trapezoid, Trapezoid};
use super::{ScherkPolygon, SideLabel};
use crate::roots::bisect;
use crate::{Error, Result};

/// Geometric grid `τ_max · 2^{-j}`, `j = 0..levels`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauGrid {
    pub tau_max: f64,
    pub levels: usize,
}

impl Default for TauGrid {
    fn default() -> Self {
        TauGrid {
            tau_max: 0.1,
            levels: 21,
        }
    }
}

impl TauGrid {
    pub fn new(tau_max: f64) -> Self {
        TauGrid {
            tau_max,
            ..Default::default()
        }
    }

    /// Grid values, largest first.
    pub fn values(&self) -> Vec<f64> {
        (0..self.levels)
            .map(|j| self.tau_max * 0.5f64.powi(j as i32))
            .collect()
    }
}

/// A domain with regular trapezoids attached to an adjacent `A`/`B` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Attached {
    pub domain: ScherkPolygon,
    /// Trapezoid over the `A` side.
    pub e: Trapezoid,
    /// Trapezoid over the `B` side.
    pub e_prime: Trapezoid,
    /// Index of the shared vertex `p` in `domain`.
    pub p_index: usize,
    /// Index of `a₁`, the vertex of `E` next to `p`.
    pub a1_index: usize,
    /// Index of `b₁`, the vertex of `E'` next to `p`.
    pub b1_index: usize,
    /// Vertex subsets of `E` and `E'` in `domain`.
    pub e_vertices: [usize; 4],
    pub e_prime_vertices: [usize; 4],
}

impl Attached {
    fn mask(vs: &[usize; 4]) -> u32 {
        vs.iter().fold(0, |m, &i| m | (1 << i))
    }

    /// `|E| - 2a(E)` on the current domain.
    pub fn e_slack(&self) -> f64 {
        inscribed_slacks(&self.domain, Self::mask(&self.e_vertices)).0
    }

    /// `|E'| - 2b(E')` on the current domain.
    pub fn e_prime_slack(&self) -> f64 {
        inscribed_slacks(&self.domain, Self::mask(&self.e_prime_vertices)).1
    }

    /// Sign of the direction from `a₁` (resp. `b₁`) towards `p`.
    fn directions(&self) -> (f64, f64) {
        let n = self.domain.len();
        let toward = |i: usize| if (i + 1) % n == self.p_index { 1.0 } else { -1.0 };
        (toward(self.a1_index), toward(self.b1_index))
    }

    /// Moves `a₁` by `tau` and `b₁` by `sigma` towards `p`.
    pub fn perturbed(&self, tau: f64, sigma: f64) -> Result<ScherkPolygon> {
        let (da, db) = self.directions();
        let mut d = self.domain.clone();
        let disc = d.disc;
        d.vertex_params[self.a1_index] = disc.reduce(d.vertex_params[self.a1_index] + da * tau);
        d.vertex_params[self.b1_index] = disc.reduce(d.vertex_params[self.b1_index] + db * sigma);
        d.validate()?;
        Ok(d)
    }

    fn signed_balance(poly: &ScherkPolygon) -> f64 {
        let (a, b) = poly.label_sums();
        a - b
    }

    /// Boundary arc between `b₁` and `p`: the room available to `σ`.
    fn b_room(&self) -> f64 {
        let d = &self.domain;
        let (i, p) = (self.b1_index, self.p_index);
        if (i + 1) % d.len() == p {
            d.side_gap(i)
        } else {
            d.side_gap(p)
        }
    }

    fn a_room(&self) -> f64 {
        let d = &self.domain;
        let (i, p) = (self.a1_index, self.p_index);
        if (i + 1) % d.len() == p {
            d.side_gap(i)
        } else {
            d.side_gap(p)
        }
    }

    /// Displacement of `b₁` restoring `Σ|A| = Σ|B|` after `a₁` moved by `tau`.
    pub fn restoring_sigma(&self, tau: f64) -> Result<f64> {
        let room = self.b_room();
        let f = |sigma: f64| {
            self.perturbed(tau, sigma)
                .map(|p| Self::signed_balance(&p))
                .unwrap_or(f64::NAN)
        };
        if f(0.0).abs() <= BALANCE_TOL {
            return Ok(0.0);
        }
        bisect(f, 0.0, room * (1.0 - 1e-9), BALANCE_TOL)
    }
}

/// A perturbed attachment together with its admissibility certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct Attachment {
    pub domain: ScherkPolygon,
    pub tau: f64,
    pub sigma: f64,
    pub report: AdmissibilityReport,
    /// `|E(τ)| - 2a(E(τ))`
    pub e_slack: f64,
    /// `|E'(τ)| - 2b(E'(τ))`
    pub e_prime_slack: f64,
    pub unperturbed: Attached,
}

/// Attaches the regular trapezoid `E` to side `a_side` and `E'` to side
/// `b_side`. The two sides must be adjacent; each is replaced by three sides
/// labelled `X, X̄, X`, which keeps Condition 1 by the trapezoid balance.
pub fn attach_trapezoids(d: &ScherkPolygon, a_side: usize, b_side: usize) -> Result<Attached> {
    d.validate()?;
    let n = d.len();
    if a_side >= n || b_side >= n {
        return Err(Error::Invalid(format!("side index out of range for {n} sides")));
    }
    if d.labels[a_side] != SideLabel::A || d.labels[b_side] != SideLabel::B {
        return Err(Error::Invalid(format!(
            "side {a_side} must be labelled A and side {b_side} labelled B"
        )));
    }
    let shared = if (a_side + 1) % n == b_side {
        b_side
    } else if (b_side + 1) % n == a_side {
        a_side
    } else {
        return Err(Error::Invalid(format!(
            "sides {a_side} and {b_side} do not share a vertex"
        )));
    };

    let disc = d.disc;
    let trap = |i: usize| {
        regular_trapezoid(&disc, d.vertex_params[i], d.vertex_params[(i + 1) % n])
    };
    let (e, e_prime) = (trap(a_side)?, trap(b_side)?);

    let mut params = Vec::with_capacity(n + 4);
    let mut labels = Vec::with_capacity(n + 4);
    let mut new_index = vec![0; n];
    let mut bottom_index = 0;
    for i in 0..n {
        new_index[i] = params.len();
        if i == d.bottom_index {
            bottom_index = params.len();
        }
        params.push(d.vertex_params[i]);
        labels.push(d.labels[i]);
        let t = if i == a_side {
            Some(&e)
        } else if i == b_side {
            Some(&e_prime)
        } else {
            None
        };
        if let Some(t) = t {
            params.push(disc.reduce(t.minus_s));
            params.push(disc.reduce(t.plus_s));
            labels.push(d.labels[i].flip());
            labels.push(d.labels[i]);
        }
    }
    let m = params.len();
    let domain = ScherkPolygon {
        disc,
        vertex_params: params,
        labels,
        bottom_index,
    };
    domain.validate()?;

    let quad = |i: usize| {
        let s = new_index[i];
        [s, (s + 1) % m, (s + 2) % m, (s + 3) % m]
    };
    let p_index = new_index[shared];
    // a₁, b₁: the trapezoid top vertices adjacent to p
    let (a1_index, b1_index) = if shared == b_side {
        ((p_index + m - 1) % m, (p_index + 1) % m)
    } else {
        ((p_index + 1) % m, (p_index + m - 1) % m)
    };
    Ok(Attached {
        domain,
        e,
        e_prime,
        p_index,
        a1_index,
        b1_index,
        e_vertices: quad(a_side),
        e_prime_vertices: quad(b_side),
    })
}

/// Attaches trapezoids to the adjacent pair `(a_side, b_side)`, then moves
/// `a₁` towards `p` by `τ` and solves for the displacement of `b₁` that
/// restores Condition 1. Returns the smallest grid `τ` below `tau_below`
/// for which the domain is admissible and both trapezoid inequalities hold.
pub fn attach_and_perturb(
    d: &ScherkPolygon,
    a_side: usize,
    b_side: usize,
    grid: &TauGrid,
    tol: f64,
) -> Result<Attachment> {
    attach_and_perturb_below(d, a_side, b_side, grid, tol, f64::INFINITY)
}

pub(crate) fn attach_and_perturb_below(
    d: &ScherkPolygon,
    a_side: usize,
    b_side: usize,
    grid: &TauGrid,
    tol: f64,
    tau_below: f64,
) -> Result<Attachment> {
    let attached = attach_trapezoids(d, a_side, b_side)?;
    let room = attached.a_room();
    let mut taus: Vec<f64> = grid
        .values()
        .into_iter()
        .filter(|&t| t > 0.0 && t < tau_below && t < room)
        .collect();
    taus.reverse();
    for tau in taus {
        let Some(att) = try_tau(&attached, tau, tol)? else {
            continue;
        };
        return Ok(att);
    }
    Err(Error::NoAdmissibleTau {
        tau_max: grid.tau_max,
    })
}

fn try_tau(attached: &Attached, tau: f64, tol: f64) -> Result<Option<Attachment>> {
    let sigma = match attached.restoring_sigma(tau) {
        Ok(s) => s,
        Err(Error::Bracket(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let domain = match attached.perturbed(tau, sigma) {
        Ok(p) => p,
        Err(Error::MalformedPolygon(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let report = check_admissible(&domain, tol)?;
    let view = Attached {
        domain: domain.clone(),
        ..attached.clone()
    };
    let (e_slack, e_prime_slack) = (view.e_slack(), view.e_prime_slack());
    if !(report.passes && e_slack > tol && e_prime_slack > tol) {
        return Ok(None);
    }
    Ok(Some(Attachment {
        domain,
        tau,
        sigma,
        report,
        e_slack,
        e_prime_slack,
        unperturbed: attached.clone(),
    }))
}
