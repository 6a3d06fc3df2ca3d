//! The iterated construction with capped solves and radial-limit reports at each step.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::domains::{iterate_example, ExampleSchedule, ExampleSequence, ScherkPolygon, StepManifest, StepSolver};
use crate::fatou::{compress, fatou_report, tv_tail_share, Compression, FatouReport, RayParams};
use crate::geometry::{DiscSpec, MetricModel, Point};
use crate::solver::{solve_scherk_on, triangulate_scherk, Field, OperatorSpec, SolveParams, Variant};
use crate::{Error, Result};

/// Capped Scherk solves, one field per cap on a shared mesh.
#[derive(Debug, Clone)]
pub struct ScherkSolver {
    pub op: OperatorSpec,
    pub caps: Vec<f64>,
    pub h: f64,
    pub params: SolveParams,
}

impl ScherkSolver {
    pub fn new(model: MetricModel, caps: Vec<f64>, h: f64) -> Result<Self> {
        let variant = match model {
            MetricModel::Hyperbolic => Variant::MinimalHyperbolic,
            MetricModel::Euclidean => Variant::MinimalEuclidean,
        };
        crate::solver::check_caps(&caps)?;
        Ok(ScherkSolver {
            op: OperatorSpec::new(variant, model)?,
            caps,
            h,
            params: SolveParams::default(),
        })
    }
}

impl StepSolver for ScherkSolver {
    type Solution = Vec<Field>;

    fn solve(&mut self, _step: usize, domain: &ScherkPolygon) -> Result<Vec<Field>> {
        let mesh = Arc::new(triangulate_scherk(domain, self.h)?);
        let fields = solve_scherk_on(&mesh, domain, &self.op, &self.caps, &self.params)?;
        if let Some((cap, f)) = self.caps.iter().zip(&fields).find(|(_, f)| !f.log.converged) {
            return Err(Error::AtCap {
                cap: *cap,
                source: Box::new(Error::NonConvergence {
                    iterations: f.log.newton_iters,
                    residual: f.log.final_residual(),
                }),
            });
        }
        Ok(fields)
    }

    fn value(&self, solution: &Vec<Field>, p: Point) -> Option<f64> {
        solution.last().and_then(|f| f.value_at(p))
    }

    fn shift(&self, solution: &mut Vec<Field>, c: f64) {
        for f in solution.iter_mut() {
            *f = f.with_values(f.values.iter().map(|v| v + c).collect());
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExampleConfig {
    pub steps: usize,
    pub h: f64,
    pub n_rays: usize,
    pub schedule: ExampleSchedule,
    pub solve: SolveParams,
}

impl Default for ExampleConfig {
    fn default() -> Self {
        ExampleConfig {
            steps: 3,
            h: 0.02,
            n_rays: 256,
            schedule: ExampleSchedule::default(),
            solve: SolveParams::default(),
        }
    }
}

/// Diagnostics for one step of the run.
#[derive(Debug, Clone, Serialize)]
pub struct StepReport {
    pub manifest: StepManifest,
    pub caps: Vec<f64>,
    /// `u(p0)` per cap, before normalization.
    pub center_values: Vec<f64>,
    /// `|u(p0; T_{k+1}) - u(p0; T_k)|`.
    pub cap_gaps: Vec<f64>,
    /// Max nodal change between consecutive caps.
    pub cap_changes: Vec<f64>,
    pub newton_iters: Vec<usize>,
    pub tv_tail_share: f64,
    #[serde(skip)]
    pub fatou: FatouReport,
}

#[derive(Debug, Clone)]
pub struct ExampleRun {
    pub config: ExampleConfig,
    pub sequence: ExampleSequence<Vec<Field>>,
    pub reports: Vec<StepReport>,
}

impl ExampleRun {
    pub fn mu_finite(&self) -> Vec<f64> {
        self.reports.iter().map(|r| r.fatou.mu_finite).collect()
    }
}

pub fn run_example(disc: &DiscSpec, config: &ExampleConfig, caps: &[f64]) -> Result<ExampleRun> {
    let mut solver = ScherkSolver::new(disc.model, caps.to_vec(), config.h)?;
    solver.params = config.solve;
    let sequence = iterate_example(disc, config.steps, &config.schedule, &mut solver)?;
    let top = *caps.last().expect("caps checked");
    let rays = RayParams::for_cap(top);
    let mut reports = Vec::with_capacity(sequence.steps.len());
    for st in &sequence.steps {
        let fields = &st.solution;
        let last = fields.last().expect("one field per cap");
        // the shift is common to all caps, so undo it for the raw center values
        let center_values: Vec<f64> = fields
            .iter()
            .map(|f| f.value_at(Point::ORIGIN).unwrap_or(f64::NAN) - st.shift)
            .collect();
        let cap_gaps = center_values.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
        let cap_changes = fields.windows(2).map(|w| w[1].max_difference(&w[0])).collect();
        let unshifted = last.with_values(last.values.iter().map(|v| v - st.shift).collect());
        let fatou = fatou_report(&unshifted, config.n_rays, &rays).map_err(|e| Error::AtStep {
            step: st.step,
            source: Box::new(e),
        })?;
        let tail = tv_tail_share(&compress(&unshifted, Compression::Positive), 0.95, 0.99)?;
        reports.push(StepReport {
            manifest: st.manifest(),
            caps: caps.to_vec(),
            center_values,
            cap_gaps,
            cap_changes,
            newton_iters: fields.iter().map(|f| f.log.newton_iters).collect(),
            tv_tail_share: tail,
            fatou,
        });
    }
    Ok(ExampleRun {
        config: *config,
        sequence,
        reports,
    })
}
