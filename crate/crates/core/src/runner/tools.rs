//! Standalone checks on artifacts of a finished run.

use super::artifacts::{read_field, read_partition, FieldHeader};
use super::RunError;
use crate::ac::residual;
use crate::dirichlet::{connected_components_audit, quasi_minimality_audit};
use crate::group::{CayleyBall, GroupSpec, SubsetHandle};
use crate::phases::PhasePartition;
use crate::plateau::{certify_all, Certificate, CertifyConfig, WindowSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Free-site residual threshold for a stored field.
pub const FIELD_RESIDUAL_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldAudit {
    pub header: FieldHeader,
    pub ball_matches: bool,
    pub middle_band: usize,
    pub components_pass: bool,
    pub quasi_min_slack: i64,
    pub max_residual: f64,
    pub pass: bool,
}

/// Re-reads a field binary (checksum included) and re-runs the structural
/// audits on it.
pub fn audit_field(path: &Path) -> Result<FieldAudit, RunError> {
    let (header, x) = read_field(path)?;
    let group = GroupSpec::new(header.group.clone())?;
    let ball = CayleyBall::build(&group, header.radius)?;
    let ball_matches = ball.hash() == header.ball_hash && ball.len() == header.sites;
    if !ball_matches {
        return Err(RunError::Format(format!(
            "{}: ball of radius {} does not match the header",
            path.display(),
            header.radius
        )));
    }
    let pot = header.potential;
    let n = header.n;
    let s0 = header.sigma0;
    let middle_band = PhasePartition::classify(&x, pot.c0, pot.c1, s0).middle_band.len();
    let comp = connected_components_audit(&ball, &x, n, &pot, s0);
    let d = SubsetHandle::from_indices(ball.len(), 0..ball.ball_size(n));
    let q = quasi_minimality_audit(&ball, &x, n, &pot, s0, &d);
    let free = if n == 0 { 0 } else { ball.ball_size(n - 1) };
    let mut max_residual = 0.0f64;
    for g in 0..free {
        max_residual = max_residual.max(residual(&ball, &pot, &x, header.rho, g)?.abs());
    }
    let pass = middle_band == 0 && comp.pass && q.holds() && max_residual < FIELD_RESIDUAL_TOL;
    Ok(FieldAudit {
        header,
        ball_matches,
        middle_band,
        components_pass: comp.pass,
        quasi_min_slack: q.slack,
        max_residual,
        pass,
    })
}

/// Loads a stored partition and certifies it on the windows of `spec`.
pub fn certify_partition(
    header: &Path,
    spec: &WindowSpec,
    cfg: &CertifyConfig,
) -> Result<Vec<Certificate>, RunError> {
    let (_, p) = read_partition(header)?;
    let windows = spec.windows(&p.ball)?;
    Ok(certify_all(&p, &windows, cfg)?)
}
