//! Standard test functions.

use rand::Rng;

use super::{check_arity, BooleanFunction, RangeTag};
use crate::error::{Error, Result};

impl BooleanFunction {
    /// `f ≡ c`, tagged with the narrowest range containing `c`.
    pub fn constant(n: usize, c: f64) -> Result<Self> {
        check_arity(n)?;
        Self::infer(n, vec![c; 1 << n])
    }

    /// `f(x) = x_i`.
    pub fn dictator(n: usize, i: usize) -> Result<Self> {
        Self::parity(n, &[i])
    }

    /// `χ_S(x) = Π_{i ∈ S} x_i`. Repeated indices are rejected.
    pub fn parity(n: usize, vars: &[usize]) -> Result<Self> {
        check_arity(n)?;
        let mut mask = 0usize;
        for &i in vars {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, n });
            }
            if mask & (1 << i) != 0 {
                return Err(Error::param("parity index", i as f64, "distinct indices"));
            }
            mask |= 1 << i;
        }
        Self::from_fn(n, RangeTag::PmOne, |b| super::chi(mask, b))
    }

    /// `Maj_n(x) = sgn(Σ x_i)` for odd `n`.
    pub fn majority(n: usize) -> Result<Self> {
        check_arity(n)?;
        if n.is_multiple_of(2) {
            return Err(Error::param("majority arity", n as f64, "odd"));
        }
        Self::from_fn(n, RangeTag::PmOne, |b| {
            if 2 * (b.count_ones() as usize) < n {
                1.0
            } else {
                -1.0
            }
        })
    }

    /// `s` disjoint tribes of width `w` on `n = w s` variables, with `-1`
    /// read as true: the value is `-1` iff some tribe is all `-1`.
    pub fn tribes(width: usize, count: usize) -> Result<Self> {
        if width == 0 || count == 0 {
            return Err(Error::param("tribes shape", 0.0, "positive width and count"));
        }
        let n = width.checked_mul(count).ok_or(Error::InvalidArity(usize::MAX))?;
        check_arity(n)?;
        let tribe = (1usize << width) - 1;
        Self::from_fn(n, RangeTag::PmOne, |b| {
            let hit = (0..count).any(|t| (b >> (t * width)) & tribe == tribe);
            if hit {
                -1.0
            } else {
                1.0
            }
        })
    }

    /// Uniformly random `±1` table.
    pub fn random_pm_one<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Self> {
        check_arity(n)?;
        let values = (0..1usize << n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Ok(Self::from_parts(n, values, RangeTag::PmOne))
    }

    /// Random `±1` function depending only on `vars`.
    pub fn random_junta<R: Rng + ?Sized>(n: usize, vars: &[usize], rng: &mut R) -> Result<Self> {
        check_arity(n)?;
        if let Some(&i) = vars.iter().find(|&&i| i >= n) {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        let core: Vec<f64> = (0..1usize << vars.len())
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect();
        Self::from_fn(n, RangeTag::PmOne, |b| {
            let c = vars
                .iter()
                .enumerate()
                .fold(0usize, |acc, (k, &i)| acc | (((b >> i) & 1) << k));
            core[c]
        })
    }
}
