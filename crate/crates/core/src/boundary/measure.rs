//! Patterson–Sullivan weights and the limiting measure of cylinders.

use super::{BoundaryError, BoundaryPoint};
use crate::group::{CayleyBall, Gen, GroupSpec, SubsetHandle};

/// `out[j][s]` = number of normal forms of length `j` that may follow the
/// letter `s`, for `j = 0..=n`, as floats.
pub fn continuation_counts(group: &GroupSpec, n: usize) -> Vec<Vec<f64>> {
    let ns = group.num_generators();
    let mut out = vec![vec![1.0; ns]];
    for j in 0..n {
        let prev = &out[j];
        let next = (0..ns)
            .map(|s| {
                (0..ns)
                    .filter(|&t| group.can_follow(Some(s as Gen), t as Gen))
                    .map(|t| prev[t])
                    .sum()
            })
            .collect();
        out.push(next);
    }
    out
}

/// `ln(e^x + e^y)`.
fn log_add(x: f64, y: f64) -> f64 {
    let m = x.max(y);
    m + ((x - m).exp() + (y - m).exp()).ln()
}

/// `out[j][s]` = Patterson–Sullivan measure of a cylinder of length `j >= 1`
/// ending in the letter `s`; `out[0]` is all ones.
///
/// Sphere shares oscillate with the parity of the radius on two-factor free
/// products, so numerator and denominator are summed over two consecutive
/// radii, which is the `s -> h` limit of the weighted sums.
pub(crate) fn measure_by_length(group: &GroupSpec, max_len: usize) -> Vec<Vec<f64>> {
    let ns = group.num_generators();
    let steps = 400 + max_len;
    let mut cur = vec![1.0f64; ns];
    let mut log_scale = 0.0f64;
    // Logs of continuation counts, one row per length.
    let mut hist: Vec<Vec<f64>> = vec![vec![0.0; ns]];
    for _ in 0..steps {
        let next: Vec<f64> = (0..ns)
            .map(|s| {
                (0..ns)
                    .filter(|&t| group.can_follow(Some(s as Gen), t as Gen))
                    .map(|t| cur[t])
                    .sum()
            })
            .collect();
        let m = next.iter().cloned().fold(0.0, f64::max);
        log_scale += m.ln();
        cur = next.into_iter().map(|x| x / m).collect();
        hist.push(cur.iter().map(|x| x.ln() + log_scale).collect());
    }
    let sphere = |n: usize| -> f64 {
        // #S_n = Σ_t cont_t(n - 1)
        let row = &hist[n - 1];
        let m = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        m + row.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
    };
    let n = steps;
    let den = log_add(sphere(n), sphere(n - 1));
    (0..=max_len)
        .map(|j| {
            (0..ns)
                .map(|s| {
                    if j == 0 {
                        return 1.0;
                    }
                    (log_add(hist[n - j][s], hist[n - 1 - j][s]) - den).exp()
                })
                .collect()
        })
        .collect()
}

/// Patterson–Sullivan measure of `Cyl(w)`.
pub fn cylinder_measure(group: &GroupSpec, w: &[Gen]) -> f64 {
    match w.last() {
        None => 1.0,
        Some(&s) => measure_by_length(group, w.len())[w.len()][s as usize],
    }
}

/// Finite-truncation Patterson–Sullivan weight
/// `Σ_{g∈A} e^{-s|g|} / Σ_{g∈ball} e^{-s|g|}`.
pub fn ps_weight(
    ball: &CayleyBall,
    a: &SubsetHandle,
    s: f64,
    entropy: f64,
) -> Result<f64, BoundaryError> {
    if s <= entropy {
        return Err(BoundaryError::ExponentTooSmall { s, h: entropy });
    }
    let w: Vec<f64> = (0..=ball.radius())
        .map(|m| (-s * m as f64).exp())
        .collect();
    let total: f64 = (0..=ball.radius())
        .map(|m| ball.sphere_size(m) as f64 * w[m])
        .sum();
    let part: f64 = a.iter().map(|g| w[ball.length(g)]).sum();
    Ok(part / total)
}

/// Weight of the far part `{g' : g' passes through g, |g'| >= far}` of the
/// cone over the shadow of `g` (with `R = 0`).
pub fn shadow_tail_weight(
    ball: &CayleyBall,
    g: usize,
    far: usize,
    s: f64,
    entropy: f64,
) -> Result<f64, BoundaryError> {
    let d = ball.length(g);
    let start = ball.sphere(far.max(d)).start;
    let tail = SubsetHandle::from_indices(
        ball.len(),
        (start..ball.len()).filter(|&x| ball.ancestor(x, d) == g),
    );
    ps_weight(ball, &tail, s, entropy)
}

/// Regression slope of `ln` [`shadow_tail_weight`] against `|g|` for the
/// prefixes `g` of `xi` of lengths `1..=max_depth`.
pub fn shadow_tail_slope(
    ball: &CayleyBall,
    xi: &BoundaryPoint,
    max_depth: usize,
    far: usize,
    s: f64,
    entropy: f64,
) -> Result<f64, BoundaryError> {
    let mut pts = Vec::new();
    for d in 1..=max_depth {
        let g = ball
            .index_of(&xi.prefix(d))
            .ok_or(BoundaryError::EmptyCone)?;
        let w = shadow_tail_weight(ball, g, far, s, entropy)?;
        pts.push((d as f64, w.ln()));
    }
    Ok(crate::group::least_squares_slope(&pts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_cylinder_measure() {
        let g = GroupSpec::free(2).unwrap();
        let ab = g.parse_word("ab").unwrap();
        assert!((cylinder_measure(&g, &ab) - 1.0 / 12.0).abs() < 1e-14);
        let a = g.parse_word("a").unwrap();
        assert!((cylinder_measure(&g, &a) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn cylinder_measure_is_additive() {
        let g = GroupSpec::free_product(&[2, 3, 4]).unwrap();
        let total: f64 = (0..g.num_generators() as Gen)
            .map(|s| cylinder_measure(&g, &[s]))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let two = GroupSpec::free_product(&[3, 4]).unwrap();
        let total: f64 = (0..two.num_generators() as Gen)
            .map(|s| cylinder_measure(&two, &[s]))
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
        let w = g.parse_word("ab").unwrap();
        let kids: f64 = (0..g.num_generators() as Gen)
            .filter(|&s| g.can_follow(w.last().copied(), s))
            .map(|s| cylinder_measure(&g, &[w.clone(), vec![s]].concat()))
            .sum();
        assert!((kids - cylinder_measure(&g, &w)).abs() < 1e-12);
    }

    #[test]
    fn ps_normalisation_and_guard() {
        let g = GroupSpec::free(2).unwrap();
        let ball = CayleyBall::build(&g, 6).unwrap();
        let h = g.entropy_closed_form();
        let full = SubsetHandle::full(ball.len());
        assert!((ps_weight(&ball, &full, 1.05 * h, h).unwrap() - 1.0).abs() < 1e-12);
        assert!(ps_weight(&ball, &full, h, h).is_err());
    }
}
