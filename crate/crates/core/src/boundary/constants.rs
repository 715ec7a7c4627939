//! Geometric constants for the main-lemma formulas.
//!
//! On tree backends every constant has a closed form. On trees of cliques the
//! constants are calibrated: the defining inequality is evaluated exactly on
//! random instances and the worst ratio is multiplied by a safety factor.

use super::{ball_at_infinity, BoundaryPoint, VisualMetricParams};
use crate::group::{sphere_sizes_exact, CayleyBall, Gen, GroupError, GroupSpec, IsoperimetricAudit};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ClosedForm,
    Calibrated,
    Assumed,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Constant {
    pub value: f64,
    pub provenance: Provenance,
}

impl Constant {
    fn closed(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::ClosedForm,
        }
    }

    fn calibrated(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Calibrated,
        }
    }

    fn assumed(value: f64) -> Self {
        Self {
            value,
            provenance: Provenance::Assumed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationConfig {
    pub samples: usize,
    pub safety: f64,
    pub seed: u64,
    /// Longest sampled word.
    pub max_len: usize,
    /// Radius of the ball used for the empirical isoperimetric constant.
    pub iso_radius: usize,
}

impl Default for CalibrationConfig {
    fn default() -> Self {
        Self {
            samples: 10_000,
            safety: 2.0,
            seed: 7,
            max_len: 12,
            iso_radius: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsReport {
    pub group: String,
    pub num_generators: usize,
    pub shadow_radius: usize,
    pub delta: f64,
    pub delta_tilde: f64,
    pub entropy: f64,
    pub epsilon: f64,
    pub dimension: f64,
    pub lambda: Constant,
    pub c1: Constant,
    pub c2: Constant,
    pub c3: Constant,
    pub c4: Constant,
    pub c5: Constant,
    pub c_tilde: Constant,
    pub k0: Constant,
    pub k1: Constant,
}

/// `meas[j][s]`: limiting measure of a cylinder of length `j` ending in `s`.
fn measure_table(group: &GroupSpec, max_len: usize) -> Vec<Vec<f64>> {
    super::measure::measure_by_length(group, max_len)
}

fn random_word(group: &GroupSpec, rng: &mut ChaCha8Rng, len: usize) -> Vec<Gen> {
    let ns = group.num_generators() as Gen;
    let mut w: Vec<Gen> = Vec::with_capacity(len);
    while w.len() < len {
        let s = rng.gen_range(0..ns);
        if group.can_follow(w.last().copied(), s) {
            w.push(s);
        }
    }
    w
}

fn random_ray(group: &GroupSpec, rng: &mut ChaCha8Rng, len: usize) -> BoundaryPoint {
    loop {
        let plen = rng.gen_range(0..=len);
        let pre = random_word(group, rng, plen);
        let plen = rng.gen_range(1..=4);
        let per = random_word(group, rng, plen);
        if let Ok(p) = BoundaryPoint::new(group, pre, per) {
            return p;
        }
    }
}

/// Largest `ℓ(ξ, η)` over rays `ξ ≠ η` through the common prefix `w`; this
/// is the depth that controls the diameter of `Cyl(w)`.
fn min_depth_in_cylinder(group: &GroupSpec, w: &[Gen], next: Gen) -> usize {
    // Two rays through w parting right after w: the depth is |w| plus one if
    // no pair of continuations from different cliques exists.
    let ns = group.num_generators() as Gen;
    let prev = w.last().copied();
    let options: Vec<Gen> = (0..ns).filter(|&v| group.can_follow(prev, v)).collect();
    let split = options
        .iter()
        .any(|&v| v != next && !group.same_clique(v, next));
    w.len() + usize::from(!split)
}

impl ConstantsReport {
    pub fn build(
        group: &GroupSpec,
        metric: &VisualMetricParams,
        cal: &CalibrationConfig,
    ) -> Result<Self, GroupError> {
        let q = group.num_generators() as f64;
        let h = group.entropy_closed_form();
        let eps = metric.epsilon;
        let rs = group.shadow_radius();
        let dt = group.delta_tilde();
        let mut rep = if group.is_tree() {
            Self {
                group: group.backend().to_string(),
                num_generators: group.num_generators(),
                shadow_radius: rs,
                delta: group.delta(),
                delta_tilde: dt,
                entropy: h,
                epsilon: eps,
                dimension: metric.dimension,
                lambda: Constant::closed(1.0),
                c1: Constant::closed(q / (q - 1.0)),
                c2: Constant::closed(1.0),
                c3: Constant::closed(h.exp() * q / (q - 1.0)),
                c4: Constant::closed(1.0),
                c5: Constant::closed(h.exp()),
                c_tilde: Constant::closed(q / (q - 2.0)),
                k0: Constant::closed(1.0 / ((q - 2.0) * 2f64.ln())),
                k1: Constant::closed(0.0),
            }
        } else {
            Self::calibrate(group, metric, cal)?
        };
        let t0 = (eps.exp() * rep.c4.value)
            .min((eps * (2.0 * rs as f64 + dt)).exp() * rep.c2.value);
        rep.k1 = Constant {
            value: 1.0 / (4.0 * t0),
            provenance: if group.is_tree() {
                Provenance::ClosedForm
            } else {
                Provenance::Calibrated
            },
        };
        Ok(rep)
    }

    /// Coefficient `t_0` with `t_n = t_0 e^{-εn} = e^{-εn} / (4 k1)`.
    pub fn t0(&self) -> f64 {
        1.0 / (4.0 * self.k1.value)
    }

    pub fn t_n(&self, n: f64) -> f64 {
        self.t0() * (-self.epsilon * n).exp()
    }

    fn calibrate(
        group: &GroupSpec,
        metric: &VisualMetricParams,
        cal: &CalibrationConfig,
    ) -> Result<Self, GroupError> {
        let h = group.entropy_closed_form();
        let eps = metric.epsilon;
        let dim = metric.dimension;
        let rs = group.shadow_radius();
        let safety = cal.safety;
        let max_len = cal.max_len + rs + 2;
        let meas = measure_table(group, max_len + 2);
        let nu = |w: &[Gen]| -> f64 {
            match w.last() {
                None => 1.0,
                Some(&s) => meas[w.len()][s as usize],
            }
        };
        let mut rng = ChaCha8Rng::seed_from_u64(cal.seed);

        let mut c1 = 1.0f64;
        let mut c2 = 1.0f64;
        let mut c3 = 1.0f64;
        let mut c5 = 1.0f64;
        for _ in 0..cal.samples {
            // Shadow measure against e^{-h|g|}.
            let len = rng.gen_range(0..=cal.max_len);
            let g = random_word(group, &mut rng, len + 1);
            let (g, next) = (g[..len].to_vec(), g[len]);
            let stem = &g[..g.len().saturating_sub(rs)];
            let ratio = nu(stem) / (-h * g.len() as f64).exp();
            c1 = c1.max(ratio).max(1.0 / ratio);
            // Diameter of the shadow against e^{-ε|g|}.
            let stem_next = if rs > 0 && g.len() >= rs { g[g.len() - rs] } else { next };
            let depth = min_depth_in_cylinder(group, stem, stem_next);
            let diam = (-eps * depth as f64).exp();
            c2 = c2.max(diam / (-eps * g.len() as f64).exp());

            // Measure of visual balls against r^D.
            let xi = random_ray(group, &mut rng, cal.max_len);
            let l = rng.gen_range(1..=cal.max_len);
            let r = (-eps * (l as f64 - rng.gen::<f64>())).exp();
            let ball = ball_at_infinity(group, &xi, r, metric);
            let m: f64 = ball.prefixes().iter().map(|p| nu(p)).sum();
            let ratio = m / r.powf(dim);
            c3 = c3.max(ratio).max(1.0 / ratio);

            // Cone sphere counts against r^D e^{εnD}, for n with e^{εn} >= C4/r.
            let n0 = (((c2 / r).ln() / eps).ceil().max(0.0)) as usize;
            let n = n0 + rng.gen_range(0..=cal.max_len);
            let count = cone_sphere_count(group, ball.prefixes(), rs, n);
            if count > 0.0 {
                let ratio = count / (r.powf(dim) * (eps * n as f64 * dim).exp());
                c5 = c5.max(ratio).max(1.0 / ratio);
            }
        }
        let mut ln_ball = f64::NEG_INFINITY;
        let mut c_tilde = 1.0f64;
        for (n, ln_s) in ln_sphere_sizes(group, 400).into_iter().enumerate() {
            let m = ln_ball.max(ln_s);
            ln_ball = m + ((ln_ball - m).exp() + (ln_s - m).exp()).ln();
            let ratio = (ln_ball - h * n as f64).exp();
            c_tilde = c_tilde.max(ratio).max(1.0 / ratio);
        }
        let ball = CayleyBall::build(group, cal.iso_radius)?;
        let iso = IsoperimetricAudit::run(&ball, cal.samples.min(2000), cal.seed)?;
        Ok(Self {
            group: group.backend().to_string(),
            num_generators: group.num_generators(),
            shadow_radius: rs,
            delta: group.delta(),
            delta_tilde: group.delta_tilde(),
            entropy: h,
            epsilon: eps,
            dimension: dim,
            lambda: Constant::assumed(1.0),
            c1: Constant::calibrated(safety * c1),
            c2: Constant::calibrated(safety * c2),
            c3: Constant::calibrated(safety * c3),
            // C4 bounds the same shadow diameter as C2.
            c4: Constant::calibrated(safety * c2),
            c5: Constant::calibrated(safety * c5),
            c_tilde: Constant::calibrated(safety * c_tilde),
            k0: Constant::calibrated(safety * iso.max_ratio),
            k1: Constant::calibrated(0.0),
        })
    }
}

/// `ln #S_n` for `n = 0..=max`, without overflow.
fn ln_sphere_sizes(group: &GroupSpec, max: usize) -> Vec<f64> {
    let ns = group.num_generators();
    let mut cont = vec![1.0f64; ns];
    let mut scale = 0.0f64;
    let mut out = vec![0.0];
    for _ in 0..max {
        out.push(cont.iter().sum::<f64>().ln() + scale);
        let next: Vec<f64> = (0..ns)
            .map(|s| {
                (0..ns)
                    .filter(|&t| group.can_follow(Some(s as Gen), t as Gen))
                    .map(|t| cont[t])
                    .sum()
            })
            .collect();
        let m = next.iter().cloned().fold(0.0, f64::max);
        scale += m.ln();
        cont = next.into_iter().map(|x| x / m).collect();
    }
    out
}

/// `#(cone(U) ∩ S_n)` in the infinite group, from continuation counts.
fn cone_sphere_count(group: &GroupSpec, prefixes: &[Vec<Gen>], rs: usize, n: usize) -> f64 {
    let ns = group.num_generators();
    let mut cont = vec![vec![1.0f64; ns]];
    for j in 0..n {
        let next: Vec<f64> = (0..ns)
            .map(|s| {
                (0..ns)
                    .filter(|&t| group.can_follow(Some(s as Gen), t as Gen))
                    .map(|t| cont[j][t])
                    .sum()
            })
            .collect();
        cont.push(next);
    }
    prefixes
        .iter()
        .filter(|p| n >= p.len() + rs)
        .map(|p| match p.last() {
            None => sphere_sizes_exact(group, n)[n] as f64,
            Some(&s) => cont[n - p.len()][s as usize],
        })
        .sum()
}
