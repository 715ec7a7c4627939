//! The main-lemma constants `k`, `L0`, `n_1`, `r_i`, `n_i`, `t_n` and `M_i`.

use super::real::{Hp, Real};
use super::DirichletError;
use crate::boundary::ConstantsReport;
use astro_float::{BigFloat, Consts, RoundingMode};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;

/// Everything the constants depend on.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantsInput {
    /// Radius of the ball at infinity `B_r(ξ0)`.
    pub r: f64,
    pub epsilon: f64,
    pub entropy: f64,
    pub num_generators: usize,
    pub k0: f64,
    pub c_tilde: f64,
    pub k1: f64,
    pub c4: f64,
    pub c5: f64,
}

impl ConstantsInput {
    pub fn from_report(rep: &ConstantsReport, r: f64) -> Self {
        Self {
            r,
            epsilon: rep.epsilon,
            entropy: rep.entropy,
            num_generators: rep.num_generators,
            k0: rep.k0.value,
            c_tilde: rep.c_tilde.value,
            k1: rep.k1.value,
            c4: rep.c4.value,
            c5: rep.c5.value,
        }
    }

    fn validate(&self) -> Result<f64, DirichletError> {
        let pos = [
            ("r", self.r),
            ("epsilon", self.epsilon),
            ("entropy", self.entropy),
            ("k0", self.k0),
            ("c_tilde", self.c_tilde),
            ("k1", self.k1),
        ];
        for (name, v) in pos {
            if !(v > 0.0 && v.is_finite()) {
                return Err(DirichletError::BadInput(format!("{name} = {v} must be positive")));
            }
        }
        let d = self.entropy / self.epsilon;
        if d <= 0.25 {
            return Err(DirichletError::DimensionTooSmall(d));
        }
        Ok(d)
    }
}

/// The constants in one arithmetic.
#[derive(Clone, Debug)]
pub(crate) struct Derived<T> {
    pub exponent: T,
    pub k: T,
    pub l0: T,
    pub n1_terms: [T; 3],
}

fn lit<T: Real>(x: f64) -> T {
    T::from_f64(x)
}

/// Largest root of `u = 4D ln u`, or `None` when `u > 4D ln u` everywhere.
fn largest_root<T: Real>(four_d: &T) -> Option<T> {
    let f = |u: &T| u.sub(&four_d.mul(&u.ln()));
    if f(four_d).cmp(&lit(0.0)) == Ordering::Greater {
        return None;
    }
    let mut lo = four_d.clone();
    let mut hi = four_d.mul(&lit(2.0));
    while f(&hi).cmp(&lit(0.0)) != Ordering::Greater {
        lo = hi.clone();
        hi = hi.mul(&lit(2.0));
    }
    for _ in 0..400 {
        let mid = lo.add(&hi).mul(&lit(0.5));
        if f(&mid).cmp(&lit(0.0)) == Ordering::Greater {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(hi)
}

pub(crate) fn derive<T: Real>(inp: &ConstantsInput) -> Derived<T> {
    let h: T = lit(inp.entropy);
    let eps: T = lit(inp.epsilon);
    let ct: T = lit(inp.c_tilde);
    let one: T = lit(1.0);
    let d = h.div(&eps);
    let four_d = d.mul(&lit(4.0));
    let exponent = four_d.div(&four_d.sub(&one));
    let base = lit::<T>(48.0)
        .mul(&T::from_u64(inp.num_generators as u64))
        .mul(&lit(inp.k0))
        .mul(&ct);
    let k = base.pow(&exponent);
    // (ln L)^{4D} < L for every L >= L0.
    let l0 = match largest_root(&four_d) {
        None => one.clone(),
        Some(u) => u.exp().floor().add(&one),
    };
    let t1 = lit::<T>(4.0)
        .div(&eps.mul(&four_d.add(&one)))
        .mul(&l0.ln().sub(&k.ln()));
    let t2 = lit::<T>(32.0).mul(&h);
    let pi = T::pi();
    let num = k.add(&ct.mul(&lit(2.0))).mul(&lit(4.0)).mul(&pi).mul(&pi);
    let den = lit::<T>(3.0)
        .mul(&lit(inp.r))
        .mul(&ct)
        .mul(&lit(inp.k1))
        .mul(&lit::<T>(0.0).sub(&eps).exp());
    let t3 = lit::<T>(2.0).div(&eps).mul(&num.div(&den).ln());
    Derived {
        exponent,
        k,
        l0,
        n1_terms: [t1, t2, t3],
    }
}

/// `(6r/π²) Σ_{j<=i} j^{-2}` in any arithmetic.
pub(crate) fn r_partial<T: Real>(r: f64, i: usize) -> T {
    let mut s: T = lit(0.0);
    // Smallest terms first.
    for j in (1..=i).rev() {
        let jj = T::from_u64(j as u64);
        s = s.add(&lit::<T>(1.0).div(&jj.mul(&jj)));
    }
    let pi = T::pi();
    lit::<T>(6.0 * r).div(&pi.mul(&pi)).mul(&s)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MainLemmaConstants {
    pub input: ConstantsInput,
    /// `D = h/ε`.
    pub dimension: f64,
    /// `4D/(4D-1)`.
    pub exponent: f64,
    pub k: f64,
    pub l0: f64,
    /// The three lower bounds for `n_1`.
    pub n1_terms: [f64; 3],
    pub n1_lower: f64,
    /// Smallest integer at or above `n1_lower`, the first term of `n_i`.
    pub n1: f64,
    /// `(D+½)/(D+¼)`.
    pub ratio: f64,
    pub r_seq: Vec<f64>,
    pub n_seq: Vec<f64>,
    pub m_seq: Vec<f64>,
}

/// Number of tabulated terms of `r_i`, `n_i` and `M_i`.
pub const TABULATED: usize = 16;

pub fn compute_constants(inp: &ConstantsInput) -> Result<MainLemmaConstants, DirichletError> {
    let d = inp.validate()?;
    let der = derive::<f64>(inp);
    let n1_lower = der.n1_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut c = MainLemmaConstants {
        input: *inp,
        dimension: d,
        exponent: der.exponent,
        k: der.k,
        l0: der.l0,
        n1_terms: der.n1_terms,
        n1_lower,
        n1: n1_lower.ceil(),
        ratio: (d + 0.5) / (d + 0.25),
        r_seq: Vec::new(),
        n_seq: Vec::new(),
        m_seq: Vec::new(),
    };
    c.fill_tables();
    Ok(c)
}

impl MainLemmaConstants {
    fn fill_tables(&mut self) {
        self.r_seq = (1..=TABULATED).map(|i| self.r_i(i)).collect();
        self.n_seq = (1..=TABULATED).map(|i| self.n_i(i)).collect();
        self.m_seq = (1..=TABULATED).map(|i| self.m_i(i)).collect();
    }

    /// The same constants with `n_1` replaced, for synthetic audits.
    pub fn with_n1(&self, n1: f64) -> Self {
        let mut c = self.clone();
        c.n1 = n1;
        c.fill_tables();
        c
    }

    pub fn r_i(&self, i: usize) -> f64 {
        r_partial::<f64>(self.input.r, i)
    }

    /// `r_{i+1} - r_i = 6r / (π² (i+1)²)`.
    pub fn d_i(&self, i: usize) -> f64 {
        let j = (i + 1) as f64;
        6.0 * self.input.r / (std::f64::consts::PI.powi(2) * j * j)
    }

    /// `n_i = ratio^{i-1} n_1` for `i >= 1`.
    pub fn n_i(&self, i: usize) -> f64 {
        self.n1 * self.ratio.powi(i as i32 - 1)
    }

    pub fn t_n(&self, n: f64) -> f64 {
        (-self.input.epsilon * n).exp() / (4.0 * self.input.k1)
    }

    /// `k e^{ε(D+¼) n}`, the cascade threshold at depth `n`.
    pub fn threshold(&self, n: f64) -> f64 {
        self.k * (self.input.epsilon * (self.dimension + 0.25) * n).exp()
    }

    /// Smallest integer `M_i >= n_{i+1} + k·ratio·e^{ε(D+¼)n_{i+1}} + 1`.
    pub fn m_i(&self, i: usize) -> f64 {
        let n = self.n_i(i + 1);
        (n + self.ratio * self.threshold(n) + 1.0).ceil()
    }
}

/// Agreement of the three arithmetic routes.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrecisionCheck {
    /// 128-bit route against the independent 320-bit route.
    pub k_rel_hp: f64,
    pub l0_rel_hp: f64,
    /// `f64` route against the 128-bit route.
    pub k_rel_f64: f64,
    pub l0_rel_f64: f64,
    pub n1_rel_f64: f64,
    pub exponent_rel_f64: f64,
}

impl PrecisionCheck {
    pub fn passes(&self) -> bool {
        self.k_rel_hp < 1e-20
            && self.l0_rel_hp < 1e-20
            && self.k_rel_f64 < 1e-12
            && self.l0_rel_f64 < 1e-12
            && self.n1_rel_f64 < 1e-12
            && self.exponent_rel_f64 < 1e-12
    }
}

const BITS_IND: usize = 320;
const RM: RoundingMode = RoundingMode::ToEven;

/// `k = exp(e ln b)` and `L0` by Newton's method from the right, at 320 bits.
fn independent_k_l0(inp: &ConstantsInput) -> (BigFloat, BigFloat) {
    let mut cc = Consts::new().expect("constant cache");
    let p = BITS_IND;
    let f = |x: f64| BigFloat::from_f64(x, p);
    let one = f(1.0);
    let d = f(inp.entropy).div(&f(inp.epsilon), p, RM);
    let four_d = d.mul(&f(4.0), p, RM);
    let e = four_d.div(&four_d.sub(&one, p, RM), p, RM);
    let b = f(48.0)
        .mul(&BigFloat::from_u64(inp.num_generators as u64, p), p, RM)
        .mul(&f(inp.k0), p, RM)
        .mul(&f(inp.c_tilde), p, RM);
    let k = e.mul(&b.ln(p, RM, &mut cc), p, RM).exp(p, RM, &mut cc);
    let g = |u: &BigFloat, cc: &mut Consts| u.sub(&four_d.mul(&u.ln(p, RM, cc), p, RM), p, RM);
    let zero = f(0.0);
    if g(&four_d, &mut cc).cmp(&zero).unwrap_or(0) > 0 {
        return (k, one);
    }
    let mut u = four_d.clone();
    while g(&u, &mut cc).cmp(&zero).unwrap_or(0) <= 0 {
        u = u.mul(&f(2.0), p, RM);
    }
    // g is convex, so Newton from the right decreases monotonically to the
    // largest root.
    for _ in 0..200 {
        let slope = one.sub(&four_d.div(&u, p, RM), p, RM);
        let next = u.sub(&g(&u, &mut cc).div(&slope, p, RM), p, RM);
        if next.cmp(&u).unwrap_or(0) >= 0 {
            break;
        }
        u = next;
    }
    let l0 = u.exp(p, RM, &mut cc).floor().add(&one, p, RM);
    (k, l0)
}

/// Recomputes the constants in 128-bit arithmetic and independently at 320
/// bits, and compares with the `f64` values.
pub fn precision_check(c: &MainLemmaConstants) -> PrecisionCheck {
    let hp = derive::<Hp>(&c.input);
    let (k_ind, l0_ind) = independent_k_l0(&c.input);
    let rel = |a: &Hp, b: &BigFloat| a.rel_diff(&Hp(b.clone()));
    let n1_hp = hp.n1_terms[0]
        .max(&hp.n1_terms[1])
        .max(&hp.n1_terms[2]);
    let f = |x: f64| Hp::from_f64(x);
    PrecisionCheck {
        k_rel_hp: rel(&hp.k, &k_ind),
        l0_rel_hp: rel(&hp.l0, &l0_ind),
        k_rel_f64: f(c.k).rel_diff(&hp.k),
        l0_rel_f64: f(c.l0).rel_diff(&hp.l0),
        n1_rel_f64: f(c.n1_lower).rel_diff(&n1_hp),
        exponent_rel_f64: f(c.exponent).rel_diff(&hp.exponent),
    }
}

/// `r_i` in 128-bit arithmetic.
pub fn r_i_hp(r: f64, i: usize) -> Hp {
    r_partial::<Hp>(r, i)
}
