use std::sync::Arc;

use super::boundary::BoundaryData;
use super::fem::{harmonic_extension, newton, SolveParams, System};
use super::field::Field;
use super::mesh::{triangulate_scherk, Mesh};
use super::operator::OperatorSpec;
use crate::domains::{check_admissible, ScherkPolygon};
use crate::{Error, Result};

/// Solves `div_g X_u = f` with Dirichlet data `bc`, starting from the harmonic
/// extension of the data. Newton stagnation is reported through
/// `field.log.converged`, not as an error.
pub fn solve(mesh: &Arc<Mesh>, op: &OperatorSpec, bc: &BoundaryData, params: &SolveParams) -> Result<Field> {
    solve_from(mesh, op, bc, params, None)
}

/// As [`solve`], warm-started from `initial` on the same mesh. The initial
/// guess is `initial` plus the harmonic lift of the change in boundary data.
pub fn solve_from(
    mesh: &Arc<Mesh>,
    op: &OperatorSpec,
    bc: &BoundaryData,
    params: &SolveParams,
    initial: Option<&Field>,
) -> Result<Field> {
    if op.metric != mesh.model {
        return Err(Error::Invalid(format!(
            "operator metric {} does not match the mesh metric {}",
            op.metric.name(),
            mesh.model.name()
        )));
    }
    let target = bc.nodal(mesh)?;
    let u0 = match initial {
        None => harmonic_extension(mesh, &target)?,
        Some(f) => {
            if !Arc::ptr_eq(&f.mesh, mesh) && *f.mesh != **mesh {
                return Err(Error::Invalid("warm start lives on a different mesh".into()));
            }
            let jump: Vec<f64> = target
                .iter()
                .zip(&f.values)
                .map(|(t, v)| if t.is_nan() { 0.0 } else { t - v })
                .collect();
            let lift = harmonic_extension(mesh, &jump)?;
            f.values.iter().zip(&lift).map(|(v, l)| v + l).collect()
        }
    };
    let sys = System::new(mesh, op);
    let (mut u, log) = newton(&sys, u0, params)?;
    // boundary nodes carry their data exactly
    for (v, t) in u.iter_mut().zip(&target) {
        if !t.is_nan() {
            *v = *t;
        }
    }
    Ok(Field::new(mesh.clone(), u, log))
}

pub fn check_caps(caps: &[f64]) -> Result<()> {
    if caps.is_empty() {
        return Err(Error::Invalid("at least one cap is needed".into()));
    }
    if caps.iter().any(|&t| !(t > 0.0) || !t.is_finite()) {
        return Err(Error::Invalid(format!("caps must be positive, got {caps:?}")));
    }
    if caps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Invalid(format!("caps must increase, got {caps:?}")));
    }
    Ok(())
}

/// Capped continuation for `+∞` on A sides and `−∞` on B sides: one field per
/// cap, each warm-started from the previous one.
pub fn solve_scherk(d: &ScherkPolygon, op: &OperatorSpec, caps: &[f64], h: f64, params: &SolveParams) -> Result<Vec<Field>> {
    check_caps(caps)?;
    let report = check_admissible(d, 1e-10)?;
    if !report.passes {
        return Err(Error::Domain(format!(
            "domain is not admissible (residual {:e}, slacks {:e} / {:e})",
            report.condition1_residual, report.slack_a, report.slack_b
        )));
    }
    let mesh = Arc::new(triangulate_scherk(d, h)?);
    solve_scherk_on(&mesh, d, op, caps, params)
}

/// [`solve_scherk`] on a prebuilt mesh of `d`, without the admissibility check.
pub fn solve_scherk_on(
    mesh: &Arc<Mesh>,
    d: &ScherkPolygon,
    op: &OperatorSpec,
    caps: &[f64],
    params: &SolveParams,
) -> Result<Vec<Field>> {
    check_caps(caps)?;
    let mut out: Vec<Field> = Vec::with_capacity(caps.len());
    for &cap in caps {
        let bc = BoundaryData::for_domain(d, cap);
        let f = solve_from(mesh, op, &bc, params, out.last())
            .map_err(|e| Error::AtCap { cap, source: Box::new(e) })?;
        out.push(f);
    }
    Ok(out)
}
