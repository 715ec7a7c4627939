//! Configuration-driven runs: a TOML experiment is resolved, executed stage
//! by stage, and every output is written as a checksummed artifact listed in
//! `manifest.json`.

mod artifacts;
mod config;
mod pipeline;
mod report;
mod tools;

pub use artifacts::{
    field_bytes, header_path, read_field, read_partition, ArtifactRecord, ArtifactWriter, FieldHeader,
    PartitionHeader, FIELD_FORMAT,
};
pub use config::{
    AuditToggles, BoundaryConfig, ExperimentConfig, GrowthSection, PlateauSection, PotentialConfig, PotentialKind, Resolved,
    RhoConfig, RhoRule, Seeds, SolveSection, Tolerances,
};
pub use pipeline::{
    run, AuditRecord, ConstantRow, GrowthRow, PlateauSummary, RunManifest, RunSummary, SolutionRow, StageRecord,
    StageStatus,
};
pub use report::{report, Report};
pub use tools::{audit_field, certify_partition, FieldAudit};

use crate::ac::AcError;
use crate::boundary::BoundaryError;
use crate::dirichlet::DirichletError;
use crate::group::GroupError;
use crate::plateau::PlateauError;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("config: {0}")]
    Config(String),
    #[error("format: {0}")]
    Format(String),
    #[error("checksum mismatch for {path}: expected {expected}, got {got}")]
    ChecksumMismatch { path: String, expected: String, got: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("stage {stage} failed: {message}")]
    Stage { stage: String, message: String },
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Ac(#[from] AcError),
    #[error(transparent)]
    Dirichlet(#[from] DirichletError),
    #[error(transparent)]
    Plateau(#[from] PlateauError),
}

impl RunError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        RunError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }
}
