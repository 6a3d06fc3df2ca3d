use serde::{Deserialize, Serialize};

use super::admissible::{check_admissible, AdmissibilityReport};
use super::core_region::{compact_core, CompactCore};
use super::perturb::{attach_and_perturb_below, TauGrid};
use super::quadrilateral::inscribed_quadrilateral;
use super::{ScherkPolygon, SideLabel};
use crate::geometry::{DiscSpec, Point};
use crate::{Error, Result};

/// Solves the Scherk problem on each domain of the sequence.
pub trait StepSolver {
    type Solution;

    fn solve(&mut self, step: usize, domain: &ScherkPolygon) -> Result<Self::Solution>;

    /// Value of a solution at `p`, or `None` if the solver carries no values.
    fn value(&self, solution: &Self::Solution, p: Point) -> Option<f64>;

    /// Adds the constant `c` to a solution.
    fn shift(&self, solution: &mut Self::Solution, c: f64);
}

/// Builds the domains only.
#[derive(Debug, Clone, Copy, Default)]
pub struct GeometryOnly;

impl StepSolver for GeometryOnly {
    type Solution = ();

    fn solve(&mut self, _step: usize, _domain: &ScherkPolygon) -> Result<()> {
        Ok(())
    }

    fn value(&self, _solution: &(), _p: Point) -> Option<f64> {
        None
    }

    fn shift(&self, _solution: &mut (), _c: f64) {}
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleSchedule {
    /// Basepoint of the first quadrilateral.
    pub x0_s: f64,
    pub tau_max: f64,
    pub tau_levels: usize,
    /// Core radius for the first step; later steps start from the previous one.
    pub r0: f64,
    /// The core radius is never pushed beyond this.
    pub r_limit: f64,
    /// `ε_n = eps0 · 2^{-(n-1)}`
    pub eps0: f64,
    pub tol: f64,
}

impl Default for ExampleSchedule {
    fn default() -> Self {
        ExampleSchedule {
            x0_s: 0.0,
            tau_max: 0.1,
            tau_levels: 21,
            r0: 0.9,
            r_limit: 0.999,
            eps0: 1.0,
            tol: 1e-10,
        }
    }
}

impl ExampleSchedule {
    pub fn eps(&self, step: usize) -> f64 {
        self.eps0 * 0.5f64.powi(step as i32 - 1)
    }
}

/// `u_n > n` on core sides facing `A`, `u_n < -n` on those facing `B`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GateRecord {
    pub threshold: f64,
    pub min_on_a: f64,
    pub max_on_b: f64,
    pub passed: bool,
}

#[derive(Debug, Clone)]
pub struct ExampleStep<S> {
    pub step: usize,
    pub domain: ScherkPolygon,
    /// Sides `(A, B)` of the previous domain that received trapezoids.
    pub attached_sides: Option<(usize, usize)>,
    pub tau: Option<f64>,
    pub sigma: Option<f64>,
    pub eps: f64,
    pub r: f64,
    pub core: CompactCore,
    pub report: AdmissibilityReport,
    pub boundary_deficit: f64,
    pub gate: Option<GateRecord>,
    /// Constant added to the solution so that `u_n(p0) = u_1(p0)`.
    pub shift: f64,
    /// `max |u_n - u_{n-1}|` on the boundary of the previous core.
    pub core_change: Option<f64>,
    pub solution: S,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slacks {
    pub condition1_residual: f64,
    pub slack_a: f64,
    pub slack_b: f64,
    pub passes: bool,
}

/// Per-step manifest written alongside each domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepManifest {
    pub step: usize,
    pub vertices_s: Vec<f64>,
    pub labels: Vec<SideLabel>,
    pub tau: Option<f64>,
    pub eps: f64,
    pub r_n: f64,
    pub boundary_deficit: f64,
    pub slacks: Slacks,
    pub gate: Option<GateRecord>,
    pub core_change: Option<f64>,
}

impl<S> ExampleStep<S> {
    pub fn manifest(&self) -> StepManifest {
        StepManifest {
            step: self.step,
            vertices_s: self.domain.vertex_params.clone(),
            labels: self.domain.labels.clone(),
            tau: self.tau,
            eps: self.eps,
            r_n: self.r,
            boundary_deficit: self.boundary_deficit,
            slacks: Slacks {
                condition1_residual: self.report.condition1_residual,
                slack_a: self.report.slack_a,
                slack_b: self.report.slack_b,
                passes: self.report.passes,
            },
            gate: self.gate,
            core_change: self.core_change,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExampleSequence<S> {
    pub schedule: ExampleSchedule,
    pub steps: Vec<ExampleStep<S>>,
    /// `u_1(p0)`, shared by every normalized step.
    pub center_value: Option<f64>,
}

/// Sides `(A, B)` receiving trapezoids at step `step >= 2`.
///
/// Steps 2 and 3 use `A₁, B₁` and then `A₂, B₂` of the first quadrilateral;
/// afterwards the adjacent opposite pair subtending the longest boundary arc.
fn choose_pair(step: usize, d1: &ScherkPolygon, current: &ScherkPolygon) -> Result<(usize, usize)> {
    let n = current.len();
    let find_side = |from: usize| -> Result<usize> {
        let (s0, s1) = (d1.vertex_params[from], d1.vertex_params[(from + 1) % 4]);
        (0..n)
            .find(|&i| current.vertex_params[i] == s0 && current.vertex_params[(i + 1) % n] == s1)
            .ok_or_else(|| Error::Invalid(format!("side {from} of the first domain is gone")))
    };
    match step {
        2 => Ok((find_side(1)?, find_side(0)?)),
        3 => Ok((find_side(3)?, find_side(2)?)),
        _ => {
            let mut best = (f64::NEG_INFINITY, 0);
            for i in 0..n {
                let g = current.side_gap(i) + current.side_gap(i + 1);
                if g > best.0 + 1e-12 {
                    best = (g, i);
                }
            }
            let (i, j) = (best.1, (best.1 + 1) % n);
            Ok(if current.labels[i] == SideLabel::A { (i, j) } else { (j, i) })
        }
    }
}

fn gate<S: StepSolver>(
    solver: &S,
    solution: &S::Solution,
    core: &CompactCore,
    threshold: f64,
) -> Option<GateRecord> {
    let (mut min_a, mut max_b) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..core.len() {
        for p in core.side_samples(i, 16) {
            let u = solver.value(solution, p)?;
            match core.labels[i] {
                SideLabel::A => min_a = min_a.min(u),
                SideLabel::B => max_b = max_b.max(u),
            }
        }
    }
    Some(GateRecord {
        threshold,
        min_on_a: min_a,
        max_on_b: max_b,
        passed: min_a > threshold && max_b < -threshold,
    })
}

fn core_change<S: StepSolver>(
    solver: &S,
    now: &S::Solution,
    before: &S::Solution,
    core: &CompactCore,
) -> Option<f64> {
    let mut worst: f64 = 0.0;
    for p in core.boundary_samples(16) {
        let d = solver.value(now, p)? - solver.value(before, p)?;
        worst = worst.max(d.abs());
    }
    Some(worst)
}

/// Builds `D_1, …, D_{n_steps}` with their cores, solving on each domain.
///
/// The core radius of step `n` starts at that of step `n - 1` and moves half
/// way to the rim until `K_{n-1} ⊂ K_n` and the gate `±u_n > n` on the core
/// sides hold, or until it reaches `r_limit`.
pub fn iterate_example<S: StepSolver>(
    disc: &DiscSpec,
    n_steps: usize,
    schedule: &ExampleSchedule,
    solver: &mut S,
) -> Result<ExampleSequence<S::Solution>> {
    if n_steps == 0 {
        return Err(Error::Invalid("at least one step is required".into()));
    }
    let at = |step: usize| move |e: Error| Error::AtStep {
        step,
        source: Box::new(e),
    };
    let d1 = inscribed_quadrilateral(disc, schedule.x0_s).map_err(at(1))?;
    let mut steps: Vec<ExampleStep<S::Solution>> = Vec::with_capacity(n_steps);
    let mut center_value = None;

    for step in 1..=n_steps {
        let prev = steps.last();
        let (domain, attached_sides, tau, sigma, report) = match prev {
            None => {
                let report = check_admissible(&d1, schedule.tol).map_err(at(step))?;
                (d1.clone(), None, None, None, report)
            }
            Some(prev) => {
                let (a, b) = choose_pair(step, &d1, &prev.domain).map_err(at(step))?;
                // halving the grid per step keeps τ_n strictly decreasing
                let grid = TauGrid {
                    tau_max: schedule.tau_max * 0.5f64.powi(step as i32 - 2),
                    levels: schedule.tau_levels,
                };
                let below = prev.tau.unwrap_or(f64::INFINITY);
                let att = attach_and_perturb_below(&prev.domain, a, b, &grid, schedule.tol, below)
                    .map_err(at(step))?;
                (att.domain, Some((a, b)), Some(att.tau), Some(att.sigma), att.report)
            }
        };

        let mut solution = solver.solve(step, &domain).map_err(at(step))?;
        let mut shift = 0.0;
        if let Some(u0) = solver.value(&solution, Point::ORIGIN) {
            match center_value {
                None => center_value = Some(u0),
                Some(c) => {
                    shift = c - u0;
                    solver.shift(&mut solution, shift);
                }
            }
        }

        let radius = disc.geodesic_radius;
        let mut r = prev.map_or(schedule.r0, |p| p.r.max(schedule.r0));
        let threshold = step as f64;
        let (core, gate_record) = loop {
            let core = compact_core(&domain, r).map_err(at(step))?;
            let nested = prev.map_or(true, |p| p.core.is_inside(&core));
            let g = gate(solver, &solution, &core, threshold);
            let ok = nested && g.map_or(true, |g| g.passed);
            if ok || r >= schedule.r_limit {
                break (core, g);
            }
            r = (0.5 * (radius + r)).min(schedule.r_limit);
        };
        let change = prev.and_then(|p| core_change(solver, &solution, &p.solution, &p.core));

        steps.push(ExampleStep {
            step,
            boundary_deficit: domain.boundary_deficit(),
            domain,
            attached_sides,
            tau,
            sigma,
            eps: schedule.eps(step),
            r,
            core,
            report,
            gate: gate_record,
            shift,
            core_change: change,
            solution,
        });
    }
    Ok(ExampleSequence {
        schedule: *schedule,
        steps,
        center_value,
    })
}
