//! Real-valued functions on `{-1,1}^n` stored as dense truth tables.
//!
//! Entry `b` of the table is `f(x)` where bit `i` of `b` is `0` exactly when
//! `x_i = +1`. Restrictions keep the ambient arity: a restricted function is
//! still a function of all `n` variables, constant along the fixed ones.

mod families;
mod fourier;
mod table;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fourier::{inverse_wht, wht, wht_in_place, FourierExpansion};
pub use table::{read_truth_table, write_truth_table};

/// Largest supported variable count (a table of 16M reals).
pub const MAX_VARS: usize = 24;

/// The intended codomain of a function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RangeTag {
    PmOne,
    ZeroOne,
    Real,
}

impl RangeTag {
    pub fn name(self) -> &'static str {
        match self {
            RangeTag::PmOne => "pm_one",
            RangeTag::ZeroOne => "zero_one",
            RangeTag::Real => "real",
        }
    }

    fn admits(self, v: f64) -> bool {
        match self {
            RangeTag::PmOne => v == 1.0 || v == -1.0,
            RangeTag::ZeroOne => (0.0..=1.0).contains(&v),
            RangeTag::Real => v.is_finite(),
        }
    }
}

/// A value of a single input coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    #[inline]
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    /// The table bit encoding this sign.
    #[inline]
    pub fn bit(self) -> usize {
        match self {
            Sign::Plus => 0,
            Sign::Minus => 1,
        }
    }

    /// Coordinate `i` of the input encoded by table index `b`.
    #[inline]
    pub fn of_input(b: usize, i: usize) -> Sign {
        if (b >> i) & 1 == 0 {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Character `chi_S(x) = prod_{i in S} x_i` evaluated at table index `b`.
#[inline]
pub fn chi(mask: usize, b: usize) -> f64 {
    if (mask & b).count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Sets bit `i` of `b` to encode `v`.
#[inline]
pub(crate) fn with_coord(b: usize, i: usize, v: Sign) -> usize {
    (b & !(1 << i)) | (v.bit() << i)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BooleanFunction {
    n: usize,
    values: Arc<[f64]>,
    range: RangeTag,
}

impl BooleanFunction {
    /// Builds a function from its table, validating length and range.
    pub fn new(n: usize, values: Vec<f64>, range: RangeTag) -> Result<Self> {
        check_arity(n)?;
        if values.len() != 1 << n {
            return Err(Error::TableLength {
                expected: 1 << n,
                got: values.len(),
            });
        }
        for (index, &value) in values.iter().enumerate() {
            if !range.admits(value) {
                return Err(Error::RangeViolation {
                    index,
                    value,
                    range: range.name(),
                });
            }
        }
        Ok(Self {
            n,
            values: values.into(),
            range,
        })
    }

    /// Builds a function tagged with the narrowest range its values fit:
    /// `pm_one`, then `zero_one`, then `real`.
    pub fn infer(n: usize, values: Vec<f64>) -> Result<Self> {
        let range = if values.iter().all(|&v| RangeTag::PmOne.admits(v)) {
            RangeTag::PmOne
        } else if values.iter().all(|&v| RangeTag::ZeroOne.admits(v)) {
            RangeTag::ZeroOne
        } else {
            RangeTag::Real
        };
        Self::new(n, values, range)
    }

    /// Tabulates `f` over all `2^n` indices.
    pub fn from_fn(n: usize, range: RangeTag, f: impl Fn(usize) -> f64) -> Result<Self> {
        check_arity(n)?;
        Self::new(n, (0..1usize << n).map(f).collect(), range)
    }

    /// Internal constructor for tables already known to be well formed.
    pub(crate) fn from_parts(n: usize, values: Vec<f64>, range: RangeTag) -> Self {
        debug_assert_eq!(values.len(), 1 << n);
        Self {
            n,
            values: values.into(),
            range,
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn range(&self) -> RangeTag {
        self.range
    }

    #[inline]
    pub fn value(&self, b: usize) -> f64 {
        self.values[b]
    }

    /// Number of table entries, `2^n`.
    #[inline]
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn check_index(&self, i: usize) -> Result<()> {
        if i < self.n {
            Ok(())
        } else {
            Err(Error::IndexOutOfRange { index: i, n: self.n })
        }
    }

    /// `E[f] = 2^{-n} sum_b f(b)`.
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// `E[f^2]`.
    pub fn norm2(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>() / self.len() as f64
    }

    /// `g(x) = f(x^{(i -> v)})`, on the same `n`.
    pub fn restrict(&self, i: usize, v: Sign) -> Result<Self> {
        self.check_index(i)?;
        let values = (0..self.len()).map(|b| self.values[with_coord(b, i, v)]).collect();
        Ok(Self::from_parts(self.n, values, self.range))
    }

    /// Directional derivative `(D_i f)(x) = (f(x^{(i -> 1)}) - f(x^{(i -> -1)})) / 2`.
    pub fn derivative(&self, i: usize) -> Result<Self> {
        self.check_index(i)?;
        let values = (0..self.len())
            .map(|b| {
                let plus = self.values[with_coord(b, i, Sign::Plus)];
                let minus = self.values[with_coord(b, i, Sign::Minus)];
                (plus - minus) / 2.0
            })
            .collect();
        Ok(Self::from_parts(self.n, values, RangeTag::Real))
    }

    /// True when flipping coordinate `i` never changes the value.
    pub fn is_irrelevant(&self, i: usize) -> bool {
        (0..self.len())
            .filter(|b| b & (1 << i) == 0)
            .all(|b| self.values[b] == self.values[b | (1 << i)])
    }

    /// Table of `f` on the subcube spanned by `free`, with every other
    /// coordinate taken from `anchor`. Compact index bit `k` drives
    /// coordinate `free[k]`.
    pub fn subcube(&self, free: &[usize], anchor: usize) -> Vec<f64> {
        let base = free.iter().fold(anchor, |acc, &i| acc & !(1 << i));
        (0..1usize << free.len())
            .map(|c| {
                let b = free
                    .iter()
                    .enumerate()
                    .fold(base, |acc, (k, &i)| acc | (((c >> k) & 1) << i));
                self.values[b]
            })
            .collect()
    }

    /// Pointwise affine map `a + s f`, retagged.
    pub fn affine(&self, a: f64, s: f64, range: RangeTag) -> Result<Self> {
        Self::new(self.n, self.values.iter().map(|v| a + s * v).collect(), range)
    }
}

pub(crate) fn check_arity(n: usize) -> Result<()> {
    if (1..=MAX_VARS).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidArity(n))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn maj3() -> BooleanFunction {
        BooleanFunction::majority(3).unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            BooleanFunction::new(2, vec![1.0; 3], RangeTag::Real),
            Err(Error::TableLength { expected: 4, got: 3 })
        ));
        assert!(matches!(
            BooleanFunction::new(1, vec![1.0, 0.5], RangeTag::PmOne),
            Err(Error::RangeViolation { index: 1, .. })
        ));
        assert!(matches!(
            BooleanFunction::new(1, vec![1.0, 1.5], RangeTag::ZeroOne),
            Err(Error::RangeViolation { .. })
        ));
        assert!(matches!(
            BooleanFunction::new(0, vec![1.0], RangeTag::Real),
            Err(Error::InvalidArity(0))
        ));
        assert!(matches!(
            BooleanFunction::new(25, vec![], RangeTag::Real),
            Err(Error::InvalidArity(25))
        ));
        assert!(BooleanFunction::new(1, vec![f64::NAN, 0.0], RangeTag::Real).is_err());
    }

    #[test]
    fn infer_picks_narrowest_range() {
        assert_eq!(
            BooleanFunction::infer(1, vec![1.0, -1.0]).unwrap().range(),
            RangeTag::PmOne
        );
        assert_eq!(
            BooleanFunction::infer(1, vec![0.0, 0.5]).unwrap().range(),
            RangeTag::ZeroOne
        );
        assert_eq!(
            BooleanFunction::infer(1, vec![-0.5, 0.5]).unwrap().range(),
            RangeTag::Real
        );
    }

    #[test]
    fn mean_and_norm2() {
        let parity = BooleanFunction::parity(2, &[0, 1]).unwrap();
        assert_eq!(parity.mean(), 0.0);
        assert_eq!(parity.norm2(), 1.0);

        let half = BooleanFunction::constant(3, 0.5).unwrap();
        assert_eq!(half.mean(), 0.5);
        assert_eq!(half.norm2(), 0.25);

        // direct sum over the 8 points
        let f = maj3();
        let mut sum = 0.0;
        let mut sq = 0.0;
        for b in 0..8usize {
            let s: f64 = (0..3).map(|i| Sign::of_input(b, i).value()).sum();
            let v = s.signum();
            sum += v;
            sq += v * v;
        }
        assert_eq!(f.mean(), sum / 8.0);
        assert_eq!(f.norm2(), sq / 8.0);
        assert_eq!(f.norm2(), 1.0);
    }

    #[test]
    fn restrict_substitutes() {
        // x1 x2 restricted at x1 = +1 is x2
        let f = BooleanFunction::parity(2, &[0, 1]).unwrap();
        let g = f.restrict(0, Sign::Plus).unwrap();
        assert_eq!(g, BooleanFunction::dictator(2, 1).unwrap());
        assert!(g.is_irrelevant(0));

        // Maj3 at x1 = +1: +1 unless x2 = x3 = -1
        let g = maj3().restrict(0, Sign::Plus).unwrap();
        for b in 0..8usize {
            let expect = if Sign::of_input(b, 1) == Sign::Minus && Sign::of_input(b, 2) == Sign::Minus {
                -1.0
            } else {
                1.0
            };
            assert_eq!(g.value(b), expect, "b = {b}");
        }

        // second restriction on the same coordinate is a no-op
        let again = g.restrict(0, Sign::Minus).unwrap();
        assert_eq!(again, g);

        assert!(matches!(
            f.restrict(2, Sign::Plus),
            Err(Error::IndexOutOfRange { index: 2, n: 2 })
        ));
    }

    #[test]
    fn derivative_examples() {
        let d = BooleanFunction::dictator(2, 0).unwrap().derivative(0).unwrap();
        assert!(d.values().iter().all(|&v| v == 1.0));
        assert_eq!(d.range(), RangeTag::Real);

        let d = BooleanFunction::parity(2, &[0, 1]).unwrap().derivative(0).unwrap();
        assert_eq!(d.values(), BooleanFunction::dictator(2, 1).unwrap().values());

        // D_1 Maj3 = 1/2 - x2 x3 / 2
        let d = maj3().derivative(0).unwrap();
        for b in 0..8usize {
            let x2 = Sign::of_input(b, 1).value();
            let x3 = Sign::of_input(b, 2).value();
            assert_eq!(d.value(b), 0.5 - 0.5 * x2 * x3);
        }
        assert!(d.is_irrelevant(0));
        assert!(maj3().derivative(3).is_err());
    }

    #[test]
    fn subcube_reads_free_coordinates() {
        let f = BooleanFunction::from_fn(3, RangeTag::Real, |b| b as f64).unwrap();
        // free = [2, 0], anchor fixes coordinate 1 to Minus
        let t = f.subcube(&[2, 0], 0b010);
        assert_eq!(t, vec![2.0, 6.0, 3.0, 7.0]);
    }
}
