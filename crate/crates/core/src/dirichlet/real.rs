//! Scalar arithmetic for the main-lemma constants: `f64` and a 128-bit
//! binary float.

use astro_float::{BigFloat, Consts, Radix, RoundingMode};
use std::cell::RefCell;
use std::cmp::Ordering;

pub trait Real: Clone + std::fmt::Debug {
    fn from_f64(x: f64) -> Self;
    fn to_f64(&self) -> f64;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn ln(&self) -> Self;
    fn exp(&self) -> Self;
    fn pow(&self, e: &Self) -> Self;
    fn floor(&self) -> Self;
    fn pi() -> Self;
    fn cmp(&self, o: &Self) -> Ordering;

    fn from_u64(n: u64) -> Self {
        Self::from_f64(n as f64)
    }

    fn max(&self, o: &Self) -> Self {
        if self.cmp(o) == Ordering::Less {
            o.clone()
        } else {
            self.clone()
        }
    }

    fn ceil(&self) -> Self {
        let f = self.floor();
        if f.cmp(self) == Ordering::Equal {
            f
        } else {
            f.add(&Self::from_f64(1.0))
        }
    }

    /// `|self - o| / |o|`.
    fn rel_diff(&self, o: &Self) -> f64 {
        let d = self.sub(o).abs_f();
        let s = o.abs_f();
        d.div(&s).to_f64()
    }

    fn abs_f(&self) -> Self {
        if self.cmp(&Self::from_f64(0.0)) == Ordering::Less {
            Self::from_f64(0.0).sub(self)
        } else {
            self.clone()
        }
    }
}

impl Real for f64 {
    fn from_f64(x: f64) -> Self {
        x
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn pow(&self, e: &Self) -> Self {
        self.powf(*e)
    }
    fn floor(&self) -> Self {
        f64::floor(*self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn cmp(&self, o: &Self) -> Ordering {
        self.partial_cmp(o).unwrap_or(Ordering::Equal)
    }
    fn from_u64(n: u64) -> Self {
        n as f64
    }
}

/// Working precision of [`Hp`] in bits.
pub const HP_BITS: usize = 128;
const RM: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constant cache"));
}

fn with_cc<T>(f: impl FnOnce(&mut Consts) -> T) -> T {
    CONSTS.with(|c| f(&mut c.borrow_mut()))
}

/// 128-bit binary floating point.
#[derive(Clone, Debug)]
pub struct Hp(pub BigFloat);

impl Hp {
    /// Decimal expansion with the given number of significant digits.
    pub fn to_decimal(&self) -> String {
        with_cc(|cc| self.0.format(Radix::Dec, RM, cc)).unwrap_or_else(|_| "NaN".into())
    }

    pub fn parse(s: &str) -> Self {
        Hp(with_cc(|cc| BigFloat::parse(s, Radix::Dec, HP_BITS, RM, cc)))
    }
}

impl Real for Hp {
    fn from_f64(x: f64) -> Self {
        Hp(BigFloat::from_f64(x, HP_BITS))
    }
    fn to_f64(&self) -> f64 {
        self.to_decimal().parse().unwrap_or(f64::NAN)
    }
    fn from_u64(n: u64) -> Self {
        Hp(BigFloat::from_u64(n, HP_BITS))
    }
    fn add(&self, o: &Self) -> Self {
        Hp(self.0.add(&o.0, HP_BITS, RM))
    }
    fn sub(&self, o: &Self) -> Self {
        Hp(self.0.sub(&o.0, HP_BITS, RM))
    }
    fn mul(&self, o: &Self) -> Self {
        Hp(self.0.mul(&o.0, HP_BITS, RM))
    }
    fn div(&self, o: &Self) -> Self {
        Hp(self.0.div(&o.0, HP_BITS, RM))
    }
    fn ln(&self) -> Self {
        Hp(with_cc(|cc| self.0.ln(HP_BITS, RM, cc)))
    }
    fn exp(&self) -> Self {
        Hp(with_cc(|cc| self.0.exp(HP_BITS, RM, cc)))
    }
    fn pow(&self, e: &Self) -> Self {
        Hp(with_cc(|cc| self.0.pow(&e.0, HP_BITS, RM, cc)))
    }
    fn floor(&self) -> Self {
        Hp(self.0.floor())
    }
    fn pi() -> Self {
        Hp(with_cc(|cc| cc.pi(HP_BITS, RM)))
    }
    fn cmp(&self, o: &Self) -> Ordering {
        match self.0.cmp(&o.0) {
            Some(c) if c < 0 => Ordering::Less,
            Some(c) if c > 0 => Ordering::Greater,
            _ => Ordering::Equal,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hp_matches_f64_and_beats_it() {
        let x = Hp::from_f64(2.0);
        assert_eq!(x.ln().to_f64(), 2f64.ln());
        assert!((Hp::pi().to_f64() - std::f64::consts::PI).abs() < 1e-16);
        // ln 2 to 35 digits.
        let ln2 = Hp::parse("0.69314718055994530941723212145817656807");
        assert!(x.ln().rel_diff(&ln2) < 1e-36);
        let e = Hp::from_f64(1.0).exp();
        let oracle = Hp::parse("2.7182818284590452353602874713526624978");
        assert!(e.rel_diff(&oracle) < 1e-36);
        assert_eq!(Hp::from_f64(2.5).ceil().to_f64(), 3.0);
        assert_eq!(Hp::from_u64(214_910_065_296).to_f64(), 214_910_065_296.0);
    }
}
