//! Double-well potentials.

use serde::{Deserialize, Serialize};

/// A smooth potential with two nondegenerate wells `c0 < c1` at level 0 and
/// finitely many nondegenerate critical points, all inside `[c0, c1]`.
pub trait Potential: Send + Sync {
    fn value(&self, y: f64) -> f64;
    fn first(&self, y: f64) -> f64;
    fn second(&self, y: f64) -> f64;
    fn wells(&self) -> (f64, f64);
    /// Sorted critical points, wells included.
    fn critical_points(&self) -> Vec<f64>;
    /// Lipschitz constant of `V''` on `[c0 - 1, c1 + 1]`.
    fn lipschitz_second(&self) -> f64;
    /// Global minimiser of `V(y) + a y²/2 - b y` for `a >= 0`.
    fn site_minimizer(&self, a: f64, b: f64) -> f64;

    /// `min |V''(c)|` over all critical points.
    fn hat_c(&self) -> f64 {
        self.critical_points()
            .iter()
            .map(|&c| self.second(c).abs())
            .fold(f64::INFINITY, f64::min)
    }

    /// Height of the lowest interior critical value above the wells.
    fn barrier(&self) -> f64 {
        let (c0, c1) = self.wells();
        self.critical_points()
            .into_iter()
            .filter(|&c| c > c0 && c < c1)
            .map(|c| self.value(c))
            .fold(f64::INFINITY, f64::min)
    }
}

/// `V(y) = α (y - c0)² (y - c1)²`; the default is `¼(1 - y²)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DoubleWell {
    pub c0: f64,
    pub c1: f64,
    pub scale: f64,
}

impl Default for DoubleWell {
    fn default() -> Self {
        Self {
            c0: -1.0,
            c1: 1.0,
            scale: 0.25,
        }
    }
}

impl DoubleWell {
    pub fn new(c0: f64, c1: f64, scale: f64) -> Option<Self> {
        (c0 < c1 && scale > 0.0 && c0.is_finite() && c1.is_finite() && scale.is_finite())
            .then_some(Self { c0, c1, scale })
    }

    #[inline]
    fn mid(&self) -> f64 {
        0.5 * (self.c0 + self.c1)
    }

    #[inline]
    fn half_width(&self) -> f64 {
        0.5 * (self.c1 - self.c0)
    }

    fn energy(&self, y: f64, a: f64, b: f64) -> f64 {
        self.value(y) + 0.5 * a * y * y - b * y
    }
}

/// Real roots of `u³ + p u + q = 0`.
fn depressed_cubic_roots(p: f64, q: f64) -> Vec<f64> {
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc > 0.0 && p < 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).clamp(-1.0, 1.0).acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    } else {
        let d = (q * q / 4.0 + p * p * p / 27.0).max(0.0).sqrt();
        vec![(-q / 2.0 + d).cbrt() + (-q / 2.0 - d).cbrt()]
    }
}

impl Potential for DoubleWell {
    #[inline]
    fn value(&self, y: f64) -> f64 {
        let d = (y - self.c0) * (y - self.c1);
        self.scale * d * d
    }

    #[inline]
    fn first(&self, y: f64) -> f64 {
        // Factored so that V' vanishes exactly at c0, c1 and the midpoint.
        2.0 * self.scale * (y - self.c0) * (y - self.c1) * (2.0 * y - self.c0 - self.c1)
    }

    #[inline]
    fn second(&self, y: f64) -> f64 {
        let u = y - self.mid();
        let w = self.half_width();
        4.0 * self.scale * (3.0 * u * u - w * w)
    }

    fn wells(&self) -> (f64, f64) {
        (self.c0, self.c1)
    }

    fn critical_points(&self) -> Vec<f64> {
        vec![self.c0, self.mid(), self.c1]
    }

    fn lipschitz_second(&self) -> f64 {
        24.0 * self.scale * (self.half_width() + 1.0)
    }

    fn site_minimizer(&self, a: f64, b: f64) -> f64 {
        // Stationarity in u = y - m: 4α(u³ - w²u) + a(u + m) - b = 0.
        let m = self.mid();
        let w = self.half_width();
        let s = 4.0 * self.scale;
        let p = (a - s * w * w) / s;
        let q = (a * m - b) / s;
        let mut best = f64::NAN;
        let mut best_e = f64::INFINITY;
        for u in depressed_cubic_roots(p, q) {
            let mut y = u + m;
            for _ in 0..3 {
                let g = self.first(y) + a * y - b;
                let h = self.second(y) + a;
                if h.abs() > 1e-300 {
                    let step = g / h;
                    if step.is_finite() {
                        y -= step;
                    }
                }
            }
            let e = self.energy(y, a, b);
            if e < best_e || (e == best_e && y < best) {
                best_e = e;
                best = y;
            }
        }
        best
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_quartic() {
        let v = DoubleWell::default();
        for y in [-1.5, -0.3, 0.0, 0.7, 2.0f64] {
            assert!((v.value(y) - 0.25 * (1.0 - y * y).powi(2)).abs() < 1e-15);
            assert!((v.first(y) - (y * y * y - y)).abs() < 1e-14);
            assert!((v.second(y) - (3.0 * y * y - 1.0)).abs() < 1e-14);
        }
        assert_eq!(v.hat_c(), 1.0);
        assert_eq!(v.lipschitz_second(), 12.0);
        assert_eq!(v.barrier(), 0.25);
        assert_eq!(v.critical_points(), vec![-1.0, 0.0, 1.0]);
        let w = DoubleWell::new(-0.3, 1.7, 0.9).unwrap();
        for c in w.critical_points() {
            assert_eq!(w.first(c), 0.0);
        }
    }

    #[test]
    fn site_minimizer_is_global() {
        let v = DoubleWell::new(-0.5, 2.0, 0.7).unwrap();
        for &a in &[0.0, 0.1, 1.0, 5.0] {
            for &b in &[-3.0, -0.2, 0.0, 0.4, 2.5] {
                let y = v.site_minimizer(a, b);
                let e = v.energy(y, a, b);
                let grid_min = (0..=20000)
                    .map(|i| -4.0 + 8.0 * i as f64 / 20000.0)
                    .map(|t| v.energy(t, a, b))
                    .fold(f64::INFINITY, f64::min);
                assert!(e <= grid_min + 1e-9, "a={a} b={b} y={y}");
                assert!((v.first(y) + a * y - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DoubleWell::new(1.0, -1.0, 0.25).is_none());
        assert!(DoubleWell::new(-1.0, 1.0, 0.0).is_none());
    }
}
