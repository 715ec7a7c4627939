//! Human-readable report and CSV bundle of a finished run.

use super::pipeline::{RunManifest, RunSummary, StageStatus};
use super::RunError;
use crate::digest::sha256_hex;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

#[derive(Clone, Debug)]
pub struct Report {
    pub text: String,
    /// Artifacts listed in the manifest but absent on disk.
    pub missing: Vec<String>,
    /// Files written below `report/`.
    pub bundle: Vec<PathBuf>,
    pub all_pass: bool,
}

fn csv_line(fields: &[String]) -> String {
    let quoted: Vec<String> = fields
        .iter()
        .map(|f| {
            if f.contains([',', '"', '\n']) {
                format!("\"{}\"", f.replace('"', "\"\""))
            } else {
                f.clone()
            }
        })
        .collect();
    quoted.join(",") + "\n"
}

/// Verifies every artifact checksum, renders the report and writes the CSV
/// bundle next to the manifest. A checksum mismatch is an error; a missing
/// file is listed and fails the report.
pub fn report(manifest_path: &Path) -> Result<Report, RunError> {
    let manifest = RunManifest::load(manifest_path)?;
    let dir = manifest_path.parent().unwrap_or(Path::new("."));
    let mut missing = Vec::new();
    for a in &manifest.artifacts {
        let p = dir.join(&a.path);
        match std::fs::read(&p) {
            Ok(bytes) => {
                let got = sha256_hex(&bytes);
                if got != a.sha256 {
                    return Err(RunError::ChecksumMismatch {
                        path: a.path.clone(),
                        expected: a.sha256.clone(),
                        got,
                    });
                }
            }
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => missing.push(a.path.clone()),
            Err(e) => return Err(RunError::io(&p, e)),
        }
    }
    let summary: Option<RunSummary> = if missing.iter().any(|m| m == "summary.json") {
        None
    } else {
        let p = dir.join("summary.json");
        match std::fs::read_to_string(&p) {
            Ok(t) => Some(serde_json::from_str(&t).map_err(|e| RunError::Format(format!("summary.json: {e}")))?),
            Err(_) => None,
        }
    };

    let mut t = String::new();
    let _ = writeln!(t, "run {} (hyperac {})", manifest.name, manifest.version);
    let _ = writeln!(t, "config sha256 {}", manifest.config_hash);
    if let Some(e) = &manifest.error {
        let _ = writeln!(t, "error: {e}");
    }
    let _ = writeln!(t, "\n[stages]");
    for s in &manifest.stages {
        let _ = writeln!(t, "  {:<10} {:?} {:.2}s", s.name, s.status, s.seconds);
    }
    if let Some(s) = &summary {
        let _ = writeln!(t, "\n[growth]");
        let _ = writeln!(t, "  entropy h = {:.12}, fitted {:.12}", s.entropy, s.entropy_fit);
        for g in &s.growth {
            let _ = writeln!(t, "  m={:<2} #S_m={:<8} exact={:<8} #B_m={}", g.m, g.sphere, g.exact, g.ball);
        }
        let _ = writeln!(t, "\n[constants]");
        for c in &s.constants {
            let _ = writeln!(t, "  {:<10} {:<24e} {}", c.name, c.value, c.provenance);
        }
        let _ = writeln!(t, "\n[solutions]");
        for r in &s.solutions {
            let _ = writeln!(
                t,
                "  N={} residual={:.2e} sigma={:.3e} relabelled={} middle={} transition_edges={} components={} quasi_slack={}",
                r.n, r.residual, r.distance_to_seed, r.relabelled, r.middle_band, r.transition_edges, r.components_pass, r.quasi_min_slack
            );
        }
        if !s.decay.is_empty() {
            let _ = writeln!(t, "\n[decay] k = {}", s.decay_k);
            for d in &s.decay {
                let _ = writeln!(t, "  phase {} cone {:<6} rate {:.4} monotone {}", d.phase, d.cylinder, d.rate, d.monotone);
            }
        }
        if let Some(n) = &s.cascade_note {
            let _ = writeln!(t, "\n[cascade]\n  {n}");
        }
    }
    let _ = writeln!(t, "\n[plateau]");
    match (manifest.stage("plateau").map(|s| s.status), summary.as_ref().and_then(|s| s.plateau.as_ref())) {
        (Some(StageStatus::Skipped), _) => {
            let _ = writeln!(t, "  skipped");
        }
        (_, Some(p)) => {
            for (i, r) in p.rungs.iter().enumerate() {
                let _ = writeln!(
                    t,
                    "  rung {} rho={:.4e} sigma={:.3e} (bound {:.3e}) lhs={:.6} rhs={:.6} cut={}",
                    i + 1,
                    r.rho,
                    r.sigma_measured,
                    r.sigma_bound,
                    r.condition.lhs,
                    r.condition.rhs,
                    r.cut_edges
                );
            }
            let cut: Vec<String> = p.cut_edges.iter().map(|(g, h)| format!("{g}-{h}")).collect();
            let _ = writeln!(t, "  cut edges: {}", cut.join(" "));
            let minimal = p.certifications.iter().filter(|c| c.is_minimal()).count();
            let _ = writeln!(t, "  windows minimal: {minimal}/{}", p.certifications.len());
        }
        _ => {
            let _ = writeln!(t, "  not available");
        }
    }
    let _ = writeln!(t, "\n[audits]");
    for a in &manifest.audits {
        let _ = writeln!(t, "  {} {}: {}", if a.pass { "PASS" } else { "FAIL" }, a.name, a.detail);
    }
    if !missing.is_empty() {
        let _ = writeln!(t, "\n[missing]");
        for m in &missing {
            let _ = writeln!(t, "  {m}");
        }
    }
    let all_pass = manifest.all_pass && missing.is_empty();
    let _ = writeln!(t, "\n{}", if all_pass { "ALL PASS" } else { "NOT ALL PASS" });

    let out = dir.join("report");
    std::fs::create_dir_all(&out).map_err(|e| RunError::io(&out, e))?;
    let mut files: Vec<(&str, String)> = vec![("report.txt", t.clone())];
    let mut stages = csv_line(&["stage".into(), "status".into(), "seconds".into()]);
    for s in &manifest.stages {
        stages += &csv_line(&[s.name.clone(), format!("{:?}", s.status).to_lowercase(), format!("{:.3}", s.seconds)]);
    }
    files.push(("stages.csv", stages));
    let mut audits = csv_line(&["audit".into(), "pass".into(), "detail".into()]);
    for a in &manifest.audits {
        audits += &csv_line(&[a.name.clone(), a.pass.to_string(), a.detail.clone()]);
    }
    files.push(("audits.csv", audits));
    if let Some(s) = &summary {
        let mut c = csv_line(&["name".into(), "value".into(), "provenance".into()]);
        for r in &s.constants {
            c += &csv_line(&[r.name.clone(), format!("{:e}", r.value), r.provenance.clone()]);
        }
        files.push(("constants.csv", c));
        let mut d = csv_line(&["phase".into(), "cylinder".into(), "rate".into(), "monotone".into()]);
        for r in &s.decay {
            d += &csv_line(&[r.phase.to_string(), r.cylinder.clone(), format!("{:e}", r.rate), r.monotone.to_string()]);
        }
        files.push(("decay_rates.csv", d));
        if let Some(p) = &s.plateau {
            let mut c = csv_line(&[
                "window".into(),
                "free_sites".into(),
                "b_omega".into(),
                "min".into(),
                "exhaustive".into(),
                "oracle".into(),
                "minimal".into(),
            ]);
            let opt = |v: Option<usize>| v.map(|v| v.to_string()).unwrap_or_default();
            for r in &p.certifications {
                c += &csv_line(&[
                    r.window.clone(),
                    r.free_sites.to_string(),
                    r.b_omega.to_string(),
                    r.min.to_string(),
                    opt(r.exhaustive),
                    opt(r.oracle),
                    r.is_minimal().to_string(),
                ]);
            }
            files.push(("certificates.csv", c));
        }
    }
    let mut bundle = Vec::new();
    for (name, body) in files {
        let p = out.join(name);
        std::fs::write(&p, body).map_err(|e| RunError::io(&p, e))?;
        bundle.push(p);
    }
    Ok(Report {
        text: t,
        missing,
        bundle,
        all_pass,
    })
}
