//! The end-to-end run: ball, geometry, solve, audits, plateau.

use super::artifacts::{field_bytes, ArtifactRecord, ArtifactWriter, FieldHeader, PartitionHeader, FIELD_FORMAT};
use super::config::{ExperimentConfig, Resolved};
use super::RunError;
use crate::boundary::Constant;
use crate::digest::sha256_hex;
use crate::dirichlet::{
    asymptotic_value_audit, cascade_audit, compute_constants, connected_components_audit, default_probe,
    extract_transition_set, precision_check, quasi_minimality_audit, solve_sequence, ConstantsInput, DecayRow,
    DirichletSolution, SolveMethod,
};
use crate::group::{sphere_sizes_exact, CayleyBall, SubsetHandle};
use crate::phases::PhasePartition;
use crate::plateau::{
    action_bridge, certify_all, infinite_components_audit, rho_sweep, separation_audit,
    Certificate, ComponentsReport, Rung, SeparationReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::Path;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageStatus {
    Completed,
    Skipped,
    Failed,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: StageStatus,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub name: String,
    pub version: String,
    pub config_hash: String,
    pub config_file: String,
    pub stages: Vec<StageRecord>,
    pub artifacts: Vec<ArtifactRecord>,
    pub audits: Vec<AuditRecord>,
    pub all_pass: bool,
    pub error: Option<String>,
}

impl RunManifest {
    pub fn load(path: &Path) -> Result<Self, RunError> {
        let text = std::fs::read_to_string(path).map_err(|e| RunError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| RunError::Format(format!("{}: {e}", path.display())))
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn failed_audits(&self) -> Vec<&AuditRecord> {
        self.audits.iter().filter(|a| !a.pass).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRow {
    pub m: usize,
    pub sphere: usize,
    pub exact: u128,
    pub ball: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantRow {
    pub name: String,
    pub value: f64,
    pub provenance: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub n: usize,
    pub method: SolveMethod,
    pub residual: f64,
    pub distance_to_seed: f64,
    pub relabelled: usize,
    pub middle_band: usize,
    pub transition_edges: usize,
    pub distance_to_id: Option<usize>,
    pub components_pass: bool,
    pub quasi_min_slack: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlateauSummary {
    pub rungs: Vec<Rung>,
    pub stable_from: Vec<(usize, usize)>,
    pub cut_edges: Vec<(String, String)>,
    pub certifications: Vec<Certificate>,
    pub separation: SeparationReport,
    pub components: ComponentsReport,
    pub bridge_max_rel: f64,
}

/// Everything the report needs, written as `summary.json`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub entropy: f64,
    pub entropy_fit: f64,
    pub growth: Vec<GrowthRow>,
    pub constants: Vec<ConstantRow>,
    pub solutions: Vec<SolutionRow>,
    pub decay: Vec<DecayRow>,
    pub decay_k: f64,
    pub cascade_note: Option<String>,
    pub plateau: Option<PlateauSummary>,
}

struct Run<'a> {
    r: &'a Resolved,
    w: ArtifactWriter,
    manifest: RunManifest,
    summary: RunSummary,
}

impl Run<'_> {
    fn audit(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.manifest.audits.push(AuditRecord {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    fn stage<T>(&mut self, name: &str, f: impl FnOnce(&mut Self) -> Result<T, RunError>) -> Result<T, RunError> {
        let t = Instant::now();
        let out = f(self);
        self.manifest.stages.push(StageRecord {
            name: name.to_string(),
            status: if out.is_ok() {
                StageStatus::Completed
            } else {
                StageStatus::Failed
            },
            seconds: t.elapsed().as_secs_f64(),
        });
        out.map_err(|e| RunError::Stage {
            stage: name.to_string(),
            message: e.to_string(),
        })
    }

    fn skip(&mut self, name: &str) {
        self.manifest.stages.push(StageRecord {
            name: name.to_string(),
            status: StageStatus::Skipped,
            seconds: 0.0,
        });
    }

    fn write_field(&mut self, rel: &str, sol: &DirichletSolution) -> Result<(), RunError> {
        let bytes = field_bytes(&sol.field.values);
        let header = FieldHeader {
            format: FIELD_FORMAT.to_string(),
            group: self.r.group.backend().clone(),
            d0: self.r.config.boundary.d0.clone(),
            potential: self.r.potential,
            rho: sol.field.rho,
            sigma0: self.r.continuation.sigma0,
            n: sol.n,
            radius: sol.ball.radius(),
            sites: sol.ball.len(),
            ball_hash: sol.ball.hash(),
            sha256: sha256_hex(&bytes),
        };
        self.w.write(&format!("{rel}.bin"), "field", &bytes)?;
        self.w.write_json(&format!("{rel}.json"), "field_header", &header)?;
        Ok(())
    }

    fn ball_stage(&mut self) -> Result<(), RunError> {
        let r = self.r;
        let radius = r.config.growth.radius.max(r.problem.max_radius() + 1);
        let ball = CayleyBall::build(&r.group, radius)?;
        let exact = sphere_sizes_exact(&r.group, radius);
        self.summary.growth = (0..=radius)
            .map(|m| GrowthRow {
                m,
                sphere: ball.sphere_size(m),
                exact: exact[m],
                ball: ball.ball_size(m),
            })
            .collect();
        self.summary.entropy = r.group.entropy_closed_form();
        self.summary.entropy_fit = ball.entropy_estimate(radius);
        let mut csv = String::from("m,sphere,exact,ball\n");
        for g in &self.summary.growth {
            csv.push_str(&format!("{},{},{},{}\n", g.m, g.sphere, g.exact, g.ball));
        }
        self.w.write("growth.csv", "csv", csv.as_bytes())?;
        if r.config.audits.growth {
            let exact_ok = self.summary.growth.iter().all(|g| g.sphere as u128 == g.exact);
            let rel = (self.summary.entropy_fit - self.summary.entropy).abs() / self.summary.entropy;
            self.audit(
                "growth",
                exact_ok && rel < r.config.tolerances.entropy_rel,
                format!("spheres exact: {exact_ok}; entropy fit {:.6} vs {:.6}", self.summary.entropy_fit, self.summary.entropy),
            );
        }
        Ok(())
    }

    fn geometry_stage(&mut self) -> Result<Option<crate::dirichlet::MainLemmaConstants>, RunError> {
        let r = self.r;
        let g = &r.geometry;
        let named: [(&str, Constant); 9] = [
            ("lambda", g.lambda),
            ("C1", g.c1),
            ("C2", g.c2),
            ("C3", g.c3),
            ("C4", g.c4),
            ("C5", g.c5),
            ("C_tilde", g.c_tilde),
            ("k0", g.k0),
            ("k1", g.k1),
        ];
        let mut rows: Vec<ConstantRow> = named
            .iter()
            .map(|(n, c)| ConstantRow {
                name: n.to_string(),
                value: c.value,
                provenance: serde_json::to_value(c.provenance).expect("serializes").as_str().unwrap_or_default().to_string(),
            })
            .collect();
        let derived = |name: &str, value: f64| ConstantRow {
            name: name.to_string(),
            value,
            provenance: "derived".to_string(),
        };
        rows.push(derived("epsilon", g.epsilon));
        rows.push(derived("D", g.dimension));
        rows.push(derived("rho0", r.continuation.rho0));
        rows.push(derived("rho1", r.continuation.rho1));
        rows.push(derived("sigma0", r.continuation.sigma0));
        rows.push(derived("C_hat", r.c_hat));
        let probe = default_probe(&r.group, &r.boundary, &r.metric);
        let lemma = match &probe {
            Some((_, radius)) => {
                let c = compute_constants(&ConstantsInput::from_report(g, *radius))?;
                rows.push(derived("probe_r", *radius));
                rows.push(derived("k", c.k));
                rows.push(derived("L0", c.l0));
                rows.push(derived("n1_lower", c.n1_lower));
                rows.push(derived("n1", c.n1));
                rows.push(derived("ratio", c.ratio));
                self.w.write_json("main_lemma.json", "json", &c)?;
                if r.config.audits.constants {
                    let p = precision_check(&c);
                    self.w.write_json("precision.json", "json", &p)?;
                    self.audit(
                        "constants.precision",
                        p.passes(),
                        format!("k rel {:.1e}, L0 rel {:.1e} against 320-bit route", p.k_rel_hp, p.l0_rel_hp),
                    );
                }
                Some(c)
            }
            None => None,
        };
        let mut csv = String::from("name,value,provenance\n");
        for c in &rows {
            csv.push_str(&format!("{},{:e},{}\n", c.name, c.value, c.provenance));
        }
        self.w.write("constants.csv", "csv", csv.as_bytes())?;
        self.w.write_json("geometry.json", "json", g)?;
        self.summary.constants = rows;
        Ok(lemma)
    }

    fn solve_stage(&mut self) -> Result<Vec<DirichletSolution>, RunError> {
        let seq = solve_sequence(&self.r.problem)?;
        for sol in &seq.solutions {
            self.write_field(&format!("fields/field_n{}", sol.n), sol)?;
        }
        let mut csv = String::from("m,n_a,n_b,diff\n");
        for row in &seq.monitor {
            for &(a, b, d) in &row.diffs {
                csv.push_str(&format!("{},{a},{b},{d:e}\n", row.m));
            }
        }
        self.w.write("monitor.csv", "csv", csv.as_bytes())?;
        if self.r.config.audits.stabilization && seq.solutions.len() >= 2 {
            let tol = self.r.config.tolerances.stabilization;
            let bad: Vec<usize> = seq.monitor.iter().filter(|m| m.stabilized(tol).is_none()).map(|m| m.m).collect();
            self.audit(
                "dirichlet.stabilization",
                bad.is_empty(),
                format!("consecutive differences below {tol:e} on every B_m; failing m: {bad:?}"),
            );
        }
        Ok(seq.solutions)
    }

    fn audit_stage(&mut self, sols: &[DirichletSolution], lemma: Option<&crate::dirichlet::MainLemmaConstants>) -> Result<(), RunError> {
        let r = self.r;
        let pot = &r.potential;
        let sigma0 = r.continuation.sigma0;
        let toggles = r.config.audits.clone();
        let (c0, c1) = (pot.c0, pot.c1);
        let mut rows = Vec::new();
        for sol in sols {
            let x = &sol.field.values;
            let phases = PhasePartition::classify(x, c0, c1, sigma0);
            let t = extract_transition_set(&sol.ball, x, sol.n, sigma0);
            let comp = connected_components_audit(&sol.ball, x, sol.n, pot, sigma0);
            let whole = SubsetHandle::from_indices(sol.ball.len(), 0..sol.ball.ball_size(sol.n));
            let q = quasi_minimality_audit(&sol.ball, x, sol.n, pot, sigma0, &whole);
            rows.push(SolutionRow {
                n: sol.n,
                method: sol.method.clone(),
                residual: sol.residual,
                distance_to_seed: sol.distance_to_seed,
                relabelled: sol.relabelled,
                middle_band: phases.middle_band.len(),
                transition_edges: t.edges.len(),
                distance_to_id: t.distance_to_id,
                components_pass: comp.pass,
                quasi_min_slack: q.slack,
            });
        }
        if toggles.range {
            let bad: Vec<usize> = rows.iter().filter(|s| s.middle_band > 0).map(|s| s.n).collect();
            let below = r.problem.rho <= r.continuation.rho1;
            self.audit(
                "dirichlet.range",
                bad.is_empty(),
                format!("rho {} (rho1 {}, at or below: {below}); N with middle-band sites: {bad:?}", r.problem.rho, r.continuation.rho1),
            );
        }
        if toggles.components {
            let bad: Vec<usize> = rows.iter().filter(|s| !s.components_pass).map(|s| s.n).collect();
            self.audit("dirichlet.components", bad.is_empty(), format!("N with rim-avoiding components: {bad:?}"));
        }
        let last = sols.last().unwrap();
        if toggles.quasi_minimality {
            let mut rng = ChaCha8Rng::seed_from_u64(r.config.seeds.quasi);
            let mut worst = rows.iter().map(|s| s.quasi_min_slack).min().unwrap();
            let n = r.config.plateau.quasi_windows;
            let k = last.ball.ball_size(last.n);
            for _ in 0..n {
                let p: f64 = rng.gen_range(0.05..0.95);
                let picks: Vec<bool> = (0..k).map(|_| rng.gen_bool(p)).collect();
                let d = SubsetHandle::from_predicate(last.ball.len(), |g| g < k && picks[g]);
                let q = quasi_minimality_audit(&last.ball, &last.field.values, last.n, pot, sigma0, &d);
                worst = worst.min(q.slack);
            }
            self.audit(
                "dirichlet.quasi_minimality",
                worst >= 0,
                format!("smallest slack {worst} over B_N for every N and {n} random subsets of B_N at N = {}", last.n),
            );
        }
        let mut csv = String::from("n,method,residual,distance_to_seed,relabelled,middle_band,transition_edges,components_pass,quasi_min_slack\n");
        for s in &rows {
            let m = match s.method {
                SolveMethod::Continuation { .. } => "continuation",
                SolveMethod::CoordinateDescent { .. } => "coordinate_descent",
            };
            csv.push_str(&format!(
                "{},{m},{:e},{:e},{},{},{},{},{}\n",
                s.n, s.residual, s.distance_to_seed, s.relabelled, s.middle_band, s.transition_edges, s.components_pass, s.quasi_min_slack
            ));
        }
        self.w.write("solutions.csv", "csv", csv.as_bytes())?;
        self.summary.solutions = rows;
        if toggles.decay {
            let k = r.config.solve.k;
            let d = asymptotic_value_audit(last, &r.boundary, pot, k);
            let mut csv = String::from("phase,cylinder,n,deviation\n");
            for row in &d.rows {
                for &(n, v) in &row.deviations {
                    csv.push_str(&format!("{},{},{n},{v:e}\n", row.phase, row.cylinder));
                }
            }
            self.w.write("decay.csv", "csv", csv.as_bytes())?;
            let worst = d.rows.iter().map(|r| r.rate).fold(0.0, f64::max);
            self.audit(
                "dirichlet.decay",
                d.passes(),
                format!("{} cones, largest fitted rate {worst:.4} against k = {k}", d.rows.len()),
            );
            self.summary.decay = d.rows;
            self.summary.decay_k = k;
        }
        if toggles.cascade {
            if let (Some(c), Some((xi0, _))) = (lemma, default_probe(&r.group, &r.boundary, &r.metric)) {
                let rep = cascade_audit(last, &xi0, c, &r.metric, pot, sigma0);
                self.w.write_json("cascade.json", "json", &rep)?;
                self.audit("dirichlet.cascade", rep.passes(), rep.note.clone());
                self.summary.cascade_note = Some(rep.note);
            }
        }
        Ok(())
    }

    fn plateau_stage(&mut self) -> Result<(), RunError> {
        let r = self.r;
        let pl = &r.config.plateau;
        let sweep = rho_sweep(&r.problem, &r.ladder, r.c_hat, r.geometry.entropy, pl.stabilize_radius, r.config.execution)?;
        for (i, sol) in sweep.solutions.iter().enumerate() {
            self.write_field(&format!("plateau/field_rung{}", i + 1), sol)?;
        }
        let limit = sweep.limit();
        let mut csv = String::from("rung,rho,sigma_measured,sigma_bound,lhs,rhs,d0_count,cut_edges\n");
        for (i, g) in sweep.rungs.iter().enumerate() {
            csv.push_str(&format!(
                "{},{:e},{:e},{:e},{:.17},{:.17},{},{}\n",
                i + 1,
                g.rho,
                g.sigma_measured,
                g.sigma_bound,
                g.condition.lhs,
                g.condition.rhs,
                g.d0_count,
                g.cut_edges
            ));
        }
        self.w.write("plateau/sweep.csv", "csv", csv.as_bytes())?;
        let labels = limit.label_csv();
        self.w.write("plateau/partition_labels.csv", "csv", labels.as_bytes())?;
        self.w.write("plateau/cut_edges.csv", "csv", limit.cut_csv().as_bytes())?;
        let header = PartitionHeader {
            group: r.group.backend().clone(),
            d0: r.config.boundary.d0.clone(),
            radius: limit.ball.radius(),
            ladder: r.ladder.clone(),
            labels: "partition_labels.csv".to_string(),
            labels_sha256: sha256_hex(labels.as_bytes()),
        };
        self.w.write_json("plateau/partition.json", "partition_header", &header)?;
        self.audit(
            "plateau.stabilization",
            sweep.monotone(),
            format!("labels on B_{} agree across the last two rungs; stable_from {:?}", sweep.stabilize_radius, sweep.stable_from),
        );
        let windows = r.windows().windows(&limit.ball)?;
        let certs = certify_all(limit, &windows, &r.certify_config())?;
        self.w.write_json("plateau/certification.json", "json", &certs)?;
        let minimal = certs.iter().filter(|c| c.is_minimal()).count();
        let both = certs.iter().filter(|c| c.exhaustive.is_some() && c.oracle.is_some()).count();
        self.audit(
            "plateau.certification",
            minimal == certs.len(),
            format!("{minimal}/{} windows minimal, {both} by both exhaustive search and max-flow", certs.len()),
        );
        let sym = certs.iter().all(|c| c.b_omega == c.b_omega_d1 && c.oracle == c.oracle_d1);
        self.audit("plateau.symmetry", sym, "b(D0) = b(D1) and equal oracle values on every window");
        let rho = *r.ladder.last().unwrap();
        let bridge_max_rel = windows
            .iter()
            .map(|w| {
                let (got, want) = action_bridge(limit, w, &r.potential, rho);
                if want == 0.0 {
                    got.abs()
                } else {
                    (got - want).abs() / want.abs()
                }
            })
            .fold(0.0, f64::max);
        self.audit(
            "plateau.action_bridge",
            bridge_max_rel <= r.config.tolerances.action_rel,
            format!("largest relative error {bridge_max_rel:.2e}"),
        );
        let separation = separation_audit(limit, &r.boundary, pl.separation_samples, r.config.seeds.separation);
        self.audit(
            "plateau.separation",
            separation.pass,
            format!(
                "{} geodesics, {} to {} transition sites each{}",
                separation.pairs,
                separation.crossings.0,
                separation.crossings.1,
                if separation.vacuous { " (vacuous)" } else { "" }
            ),
        );
        let components = infinite_components_audit(limit);
        self.audit(
            "plateau.infinite_components",
            components.pass,
            format!("components {:?}, islands {}", components.components, components.islands.len()),
        );
        self.summary.plateau = Some(PlateauSummary {
            rungs: sweep.rungs.clone(),
            stable_from: sweep.stable_from.clone(),
            cut_edges: limit
                .cut_edges()
                .into_iter()
                .map(|(g, h)| (limit.ball.word_string(g), limit.ball.word_string(h)))
                .collect(),
            certifications: certs,
            separation,
            components,
            bridge_max_rel,
        });
        Ok(())
    }

    fn finish(&mut self) -> Result<(), RunError> {
        self.manifest.all_pass = self.manifest.error.is_none() && self.manifest.audits.iter().all(|a| a.pass);
        self.w.write_json("summary.json", "summary", &self.summary)?;
        self.w.write_json("audits.json", "audits", &self.manifest.audits)?;
        self.manifest.artifacts = self.w.records.clone();
        let path = self.w.dir.join("manifest.json");
        let text = serde_json::to_string_pretty(&self.manifest).expect("manifest serializes");
        std::fs::write(&path, text).map_err(|e| RunError::io(&path, e))
    }
}

/// Runs every enabled stage and writes artifacts under `out`. On a stage
/// error the partial manifest is still written and the error returned.
pub fn run(config: &ExperimentConfig, out: &Path) -> Result<RunManifest, RunError> {
    let resolved = config.resolve()?;
    let r = &resolved;
    let mut w = ArtifactWriter::new(out)?;
    let toml = r.config.to_toml();
    w.write("config.toml", "config", toml.as_bytes())?;
    let mut run = Run {
        r,
        w,
        manifest: RunManifest {
            name: r.config.name.clone(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            config_hash: r.config.hash(),
            config_file: "config.toml".to_string(),
            stages: Vec::new(),
            artifacts: Vec::new(),
            audits: Vec::new(),
            all_pass: false,
            error: None,
        },
        summary: RunSummary {
            name: r.config.name.clone(),
            ..Default::default()
        },
    };
    let result = (|| {
        run.stage("ball", |s| s.ball_stage())?;
        let lemma = run.stage("geometry", |s| s.geometry_stage())?;
        let sols = run.stage("solve", |s| s.solve_stage())?;
        run.stage("audits", |s| s.audit_stage(&sols, lemma.as_ref()))?;
        if r.config.audits.plateau {
            run.stage("plateau", |s| s.plateau_stage())?;
        } else {
            run.skip("plateau");
        }
        Ok::<(), RunError>(())
    })();
    if let Err(e) = &result {
        run.manifest.error = Some(e.to_string());
    }
    run.finish()?;
    result.map(|_| run.manifest)
}
