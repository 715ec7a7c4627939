//! The experiment configuration: one TOML document holding everything a run
//! depends on.

use super::RunError;
use crate::ac::{ContinuationConfig, DoubleWell, SolverConfig, SweepMode};
use crate::boundary::{BoundarySpec, CalibrationConfig, ConstantsReport, VisualMetricParams};
use crate::digest::sha256_hex;
use crate::dirichlet::DirichletProblem;
use crate::exec::Execution;
use crate::group::{Backend, GroupSpec};
use crate::plateau::{default_ladder, ladder_admissible, Condition1, CertifyConfig, LadderConfig, WindowSpec};
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    /// Cylinder words whose union is `D0`.
    pub d0: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    DoubleWell,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthSection {
    /// Radius of the ball whose spheres and entropy fit are audited.
    pub radius: usize,
}

impl Default for GrowthSection {
    fn default() -> Self {
        Self { radius: 12 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub kind: PotentialKind,
    pub c0: f64,
    pub c1: f64,
    pub scale: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        let v = DoubleWell::default();
        Self {
            kind: PotentialKind::DoubleWell,
            c0: v.c0,
            c1: v.c1,
            scale: v.scale,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RhoRule {
    /// A single coupling `scale · ρ0` for every stage.
    Fixed,
    /// `ρ1 · factor^{-n}`, `n = 1..=depth`, for the plateau stage.
    Ladder,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RhoConfig {
    pub rule: RhoRule,
    /// Dirichlet-stage coupling as a multiple of `ρ0`.
    pub scale: f64,
    pub factor: f64,
    pub depth: usize,
}

impl Default for RhoConfig {
    fn default() -> Self {
        Self {
            rule: RhoRule::Ladder,
            scale: 0.1,
            factor: 4.0,
            depth: 4,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub radii: Vec<usize>,
    /// Contraction target of the continuation.
    pub k: f64,
    pub sweep: SweepMode,
    pub max_sweeps: usize,
}

impl Default for SolveSection {
    fn default() -> Self {
        Self {
            radii: vec![3, 4, 5, 6],
            k: 0.5,
            sweep: SweepMode::GaussSeidel,
            max_sweeps: 200_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub solver: f64,
    pub continuation: f64,
    /// Last consecutive-solution difference on every `B_m`.
    pub stabilization: f64,
    /// Relative error of the fitted entropy.
    pub entropy_rel: f64,
    /// Relative error of the action bridge.
    pub action_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            solver: 1e-10,
            continuation: 1e-13,
            stabilization: 1e-6,
            entropy_rel: 0.01,
            action_rel: 1e-12,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Seeds {
    pub calibration: u64,
    pub windows: u64,
    pub quasi: u64,
    pub separation: u64,
}

impl Default for Seeds {
    fn default() -> Self {
        Self {
            calibration: 7,
            windows: 11,
            quasi: 13,
            separation: 17,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditToggles {
    pub growth: bool,
    pub constants: bool,
    pub stabilization: bool,
    pub range: bool,
    pub components: bool,
    pub quasi_minimality: bool,
    pub decay: bool,
    pub cascade: bool,
    pub plateau: bool,
}

impl Default for AuditToggles {
    fn default() -> Self {
        Self {
            growth: true,
            constants: true,
            stabilization: true,
            range: true,
            components: true,
            quasi_minimality: true,
            decay: true,
            cascade: true,
            plateau: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlateauSection {
    pub max_ball: usize,
    pub random_windows: usize,
    pub random_radius: usize,
    pub min_size: usize,
    pub max_size: usize,
    pub cap: usize,
    pub stabilize_radius: usize,
    pub separation_samples: usize,
    /// Random sets `D` for the quasi-minimality audit.
    pub quasi_windows: usize,
}

impl Default for PlateauSection {
    fn default() -> Self {
        Self {
            max_ball: 5,
            random_windows: 100,
            random_radius: 3,
            min_size: 8,
            max_size: 40,
            cap: 20,
            stabilize_radius: 4,
            separation_samples: 20_000,
            quasi_windows: 10_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub group: Backend,
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub growth: GrowthSection,
    #[serde(default)]
    pub potential: PotentialConfig,
    /// `ε` of the visual metric; `h/2` when absent.
    #[serde(default)]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub rho: RhoConfig,
    #[serde(default)]
    pub solve: SolveSection,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seeds: Seeds,
    #[serde(default)]
    pub audits: AuditToggles,
    #[serde(default)]
    pub plateau: PlateauSection,
    #[serde(default)]
    pub execution: Execution,
    #[serde(default = "default_output")]
    pub output_dir: String,
}

fn default_output() -> String {
    "out".to_string()
}

/// A validated configuration with every derived object the pipeline needs.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: ExperimentConfig,
    pub group: GroupSpec,
    pub boundary: BoundarySpec,
    pub potential: DoubleWell,
    pub metric: VisualMetricParams,
    pub continuation: ContinuationConfig,
    pub geometry: ConstantsReport,
    pub problem: DirichletProblem,
    pub ladder: Vec<f64>,
    pub ladder_check: Vec<Condition1>,
    /// `#S · C̃`.
    pub c_hat: f64,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, RunError> {
        toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        sha256_hex(self.to_toml().as_bytes())
    }

    /// Checks every invariant and builds the derived objects. The returned
    /// config has `ε` filled in.
    pub fn resolve(&self) -> Result<Resolved, RunError> {
        let group = GroupSpec::new(self.group.clone())?;
        let boundary = BoundarySpec::parse(&group, &self.boundary.d0)?;
        let p = &self.potential;
        let potential = DoubleWell::new(p.c0, p.c1, p.scale)
            .ok_or_else(|| RunError::Config(format!("bad double well c0={} c1={} scale={}", p.c0, p.c1, p.scale)))?;
        let h = group.entropy_closed_form();
        let epsilon = self.epsilon.unwrap_or(h / 2.0);
        let metric = VisualMetricParams::new(h, epsilon)?;
        let mut continuation = ContinuationConfig::new(&potential, group.num_generators(), self.solve.k)?;
        continuation.tol = self.tolerances.continuation;
        continuation.exec = self.execution;
        if !(self.rho.scale > 0.0 && self.rho.scale.is_finite()) {
            return Err(RunError::Config(format!("rho.scale = {} must be positive", self.rho.scale)));
        }
        let solver = SolverConfig {
            tol: self.tolerances.solver,
            max_sweeps: self.solve.max_sweeps,
            mode: self.solve.sweep,
            exec: self.execution,
            ..SolverConfig::default()
        };
        let problem = DirichletProblem::new(
            group.clone(),
            boundary.clone(),
            potential,
            self.rho.scale * continuation.rho0,
            self.solve.radii.clone(),
            continuation,
            solver,
        )?;
        let cal = CalibrationConfig {
            seed: self.seeds.calibration,
            ..Default::default()
        };
        let geometry = ConstantsReport::build(&group, &metric, &cal)?;
        let c_hat = group.num_generators() as f64 * geometry.c_tilde.value;
        let ladder = match self.rho.rule {
            RhoRule::Fixed => vec![problem.rho],
            RhoRule::Ladder => {
                if !(self.rho.factor > 1.0) || self.rho.depth == 0 {
                    return Err(RunError::Config("ladder needs factor > 1 and depth >= 1".into()));
                }
                default_ladder(
                    continuation.rho1,
                    &LadderConfig {
                        factor: self.rho.factor,
                        depth: self.rho.depth,
                    },
                )
            }
        };
        let ladder_check = ladder_admissible(
            &ladder,
            &continuation,
            group.num_generators(),
            &potential,
            c_hat,
            geometry.entropy,
        )?;
        let top = problem.max_radius() + 1;
        let pl = &self.plateau;
        if pl.max_ball > top || pl.random_radius > top || pl.min_size == 0 || pl.min_size > pl.max_size {
            return Err(RunError::Config(format!(
                "plateau windows must lie in B_{top} with 1 <= min_size <= max_size"
            )));
        }
        let mut config = self.clone();
        config.epsilon = Some(epsilon);
        Ok(Resolved {
            config,
            group,
            boundary,
            potential,
            metric,
            continuation,
            geometry,
            problem,
            ladder,
            ladder_check,
            c_hat,
        })
    }
}

impl Resolved {
    pub fn windows(&self) -> WindowSpec {
        let p = &self.config.plateau;
        WindowSpec {
            max_ball: p.max_ball,
            random: p.random_windows,
            random_radius: p.random_radius,
            min_size: p.min_size,
            max_size: p.max_size,
            seed: self.config.seeds.windows,
        }
    }

    pub fn certify_config(&self) -> CertifyConfig {
        CertifyConfig {
            cap: self.config.plateau.cap,
            exec: self.config.execution,
            ..Default::default()
        }
    }
}
