//! Quasirandomness: small low-degree Fourier coefficients.
//!
//! `f` is `(eps, delta)`-quasirandom when `|f̂(S)| <= eps` for every
//! `0 < |S| <= ⌊1/delta⌋`. Restricting at most `k` coordinates of such an `f`
//! moves its mean by at most `2^k eps`; conversely a function whose
//! restrictions to at most `⌊1/delta⌋` coordinates never move the mean by more
//! than `eps` is quasirandom.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::boolfn::{wht, BooleanFunction, FourierExpansion, Sign};
use crate::error::{Error, Result};
use crate::noise::{check_delta, noisy_influence};
use crate::THRESHOLD_SLACK;

/// Largest number of restriction cases [`max_mean_shift`] will enumerate.
pub const ENUMERATION_BUDGET: u128 = 1_000_000;

/// `⌊1/delta⌋`, robust to `1/delta` landing a rounding error below an integer.
pub fn degree_cap(delta: f64) -> usize {
    let inv = 1.0 / delta;
    let near = inv.round();
    if (inv - near).abs() <= 1e-9 * near.max(1.0) {
        near as usize
    } else {
        inv.floor() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuasirandomnessVerdict {
    pub ok: bool,
    /// Largest violating coefficient as `(mask, value)`; present iff `!ok`.
    pub witness: Option<(usize, f64)>,
}

/// Scans masks with `1 <= |S| <= ⌊1/delta⌋` in order of increasing degree,
/// then increasing mask; the witness is the first mask of largest magnitude.
pub fn is_quasirandom(g: &FourierExpansion, eps: f64, delta: f64) -> Result<QuasirandomnessVerdict> {
    if !(eps >= 0.0) {
        return Err(Error::param("eps", eps, "eps >= 0"));
    }
    if !(delta > 0.0) {
        return Err(Error::param("delta", delta, "delta > 0"));
    }
    let cap = degree_cap(delta).min(g.n());
    let mut masks: Vec<usize> = (1..g.coeffs().len())
        .filter(|s| s.count_ones() as usize <= cap)
        .collect();
    masks.sort_by_key(|&s| (s.count_ones(), s));

    let mut witness: Option<(usize, f64)> = None;
    for s in masks {
        let c = g.coeff(s);
        if c.abs() > eps && witness.is_none_or(|(_, w)| c.abs() > w.abs()) {
            witness = Some((s, c));
        }
    }
    Ok(QuasirandomnessVerdict {
        ok: witness.is_none(),
        witness,
    })
}

/// Certified lower bound on the influences of the coordinates in `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct InfluenceBound {
    /// `(1-δ)^{|S|-1} f̂(S)^2`.
    pub bound: f64,
    /// `(i, Inf_i^{(1-δ)}[f])` for each `i ∈ S`.
    pub influences: Vec<(usize, f64)>,
}

/// `Inf_i^{(1-δ)}[f] >= (1-δ)^{|S|-1} f̂(S)^2` for every `i ∈ S`: the
/// influence sum over sets containing `i` includes the term for `S` itself.
/// The inequality is checked on every coordinate of `S`.
pub fn influence_quasirandom_bound(f: &BooleanFunction, mask: usize, delta: f64) -> Result<InfluenceBound> {
    check_delta(delta)?;
    if mask == 0 || mask >= f.len() {
        return Err(Error::param("mask", mask as f64, "nonempty subset of the variables"));
    }
    let degree = mask.count_ones() as usize;
    if delta > 0.0 && degree > degree_cap(delta) {
        return Err(Error::DegreeTooLarge {
            degree,
            cap: degree_cap(delta),
        });
    }
    let c = wht(f).coeff(mask);
    let bound = (1.0 - delta).powi(degree as i32 - 1) * c * c;
    let mut influences = Vec::with_capacity(degree);
    for i in (0..f.n()).filter(|i| mask & (1 << i) != 0) {
        let inf = noisy_influence(f, i, delta)?;
        if inf < bound - THRESHOLD_SLACK {
            return Err(Error::Internal(format!(
                "influence {inf} of x{} below certified bound {bound}",
                i + 1
            )));
        }
        influences.push((i, inf));
    }
    Ok(InfluenceBound { bound, influences })
}

/// A restriction of at most `k` coordinates and the mean shift it causes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanShift {
    pub restriction: BTreeMap<usize, Sign>,
    pub shift: f64,
}

/// Number of restrictions of at most `k` of `n` coordinates: `Σ_{j<=k} C(n,j) 2^j`.
pub fn restriction_count(n: usize, k: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for j in 0..=k.min(n) {
        if j > 0 {
            binom = binom * (n - j + 1) as u128 / j as u128;
        }
        total += binom << j;
    }
    total
}

/// Exhaustively finds the restriction of at most `k` coordinates maximizing
/// `|E[f_restricted] - E[f]|`. Coordinate sets are visited by size, then
/// lexicographically; assignments with `+1` before `-1` in the lowest slot.
/// The first maximizer wins.
pub fn max_mean_shift(f: &BooleanFunction, k: usize) -> Result<MeanShift> {
    let n = f.n();
    if k > n {
        return Err(Error::param("k", k as f64, "k <= n"));
    }
    let cases = restriction_count(n, k);
    if cases > ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            cases,
            budget: ENUMERATION_BUDGET,
        });
    }
    let mean = f.mean();
    let mut best = MeanShift {
        restriction: BTreeMap::new(),
        shift: 0.0,
    };
    for size in 1..=k {
        for vars in combinations(n, size) {
            // Sum f over each cell of the partition induced by `vars`.
            let mut sums = vec![0.0; 1 << size];
            for b in 0..f.len() {
                let cell = vars
                    .iter()
                    .enumerate()
                    .fold(0usize, |acc, (pos, &i)| acc | (((b >> i) & 1) << pos));
                sums[cell] += f.value(b);
            }
            let cell_size = (f.len() >> size) as f64;
            for (cell, s) in sums.iter().enumerate() {
                let shift = (s / cell_size - mean).abs();
                if shift > best.shift {
                    best = MeanShift {
                        restriction: vars
                            .iter()
                            .enumerate()
                            .map(|(pos, &i)| {
                                (
                                    i,
                                    if (cell >> pos) & 1 == 0 {
                                        Sign::Plus
                                    } else {
                                        Sign::Minus
                                    },
                                )
                            })
                            .collect(),
                        shift,
                    };
                }
            }
        }
    }
    Ok(best)
}

/// All `size`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..=n - left {
            cur.push(i);
            go(i + 1, n, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if size <= n {
        go(0, n, size, &mut Vec::with_capacity(size), &mut out);
    }
    out
}

/// Renders a mask as a sorted list of one-based variable indices.
pub fn mask_to_vars(mask: usize) -> Vec<usize> {
    (0..usize::BITS as usize)
        .filter(|i| mask & (1 << i) != 0)
        .map(|i| i + 1)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::RangeTag;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent scan: every mask, checking degree and threshold directly.
    fn scan_oracle(f: &BooleanFunction, eps: f64, delta: f64) -> Option<(usize, f64)> {
        let cap = (1.0 / delta).floor() as u32;
        let len = f.len();
        let mut found: Option<(usize, f64)> = None;
        for degree in 1..=cap {
            for s in 0..len {
                if s.count_ones() != degree {
                    continue;
                }
                let c: f64 = (0..len).map(|b| f.value(b) * crate::boolfn::chi(s, b)).sum::<f64>() / len as f64;
                if c.abs() > eps && found.is_none_or(|(_, w): (usize, f64)| c.abs() > w.abs() + 1e-12) {
                    found = Some((s, c));
                }
            }
        }
        found
    }

    #[test]
    fn degree_cap_is_floor() {
        assert_eq!(degree_cap(0.5), 2);
        assert_eq!(degree_cap(0.1), 10);
        assert_eq!(degree_cap(0.3), 3);
        assert_eq!(degree_cap(1.0 / 3.0), 3);
        assert_eq!(degree_cap(0.26), 3);
        assert_eq!(degree_cap(2.0), 0);
    }

    #[test]
    fn parity_witness() {
        let g = wht(&BooleanFunction::parity(2, &[0, 1]).unwrap());
        let v = is_quasirandom(&g, 0.9, 0.5).unwrap();
        assert!(!v.ok);
        assert_eq!(v.witness, Some((0b11, 1.0)));
        assert_eq!(mask_to_vars(0b11), vec![1, 2]);
    }

    #[test]
    fn wide_parity_is_quasirandom() {
        let all: Vec<usize> = (0..11).collect();
        let g = wht(&BooleanFunction::parity(11, &all).unwrap());
        for eps in [0.0, 0.1, 0.9] {
            let v = is_quasirandom(&g, eps, 0.1).unwrap();
            assert!(v.ok);
            assert_eq!(v.witness, None);
        }
    }

    #[test]
    fn verdict_matches_brute_force_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..20 {
            let f = BooleanFunction::random_pm_one(10, &mut rng).unwrap();
            let eps = rng.random_range(0.0..0.08);
            let delta = rng.random_range(0.25..1.0);
            let v = is_quasirandom(&wht(&f), eps, delta).unwrap();
            let oracle = scan_oracle(&f, eps, delta);
            assert_eq!(v.ok, oracle.is_none());
            if let (Some((s, c)), Some((_, oc))) = (v.witness, oracle) {
                assert!((c.abs() - oc.abs()).abs() < 1e-12);
                assert!(c.abs() > eps);
                assert!((c - wht(&f).coeff(s)).abs() == 0.0);
            }
        }
    }

    #[test]
    fn influence_bound_examples() {
        let f = BooleanFunction::parity(2, &[0, 1]).unwrap();
        let b = influence_quasirandom_bound(&f, 0b11, 0.5).unwrap();
        assert!((b.bound - 0.5).abs() < 1e-15);
        assert!(b.influences.iter().all(|&(_, inf)| (inf - 0.5).abs() < 1e-15));

        let d = BooleanFunction::dictator(3, 0).unwrap();
        for delta in [0.1, 0.5, 0.9] {
            let b = influence_quasirandom_bound(&d, 0b1, delta).unwrap();
            assert_eq!(b.bound, 1.0);
            assert_eq!(b.influences, vec![(0, 1.0)]);
        }
        assert!(matches!(
            influence_quasirandom_bound(&BooleanFunction::majority(3).unwrap(), 0b111, 0.5),
            Err(Error::DegreeTooLarge { degree: 3, cap: 2 })
        ));
        assert!(influence_quasirandom_bound(&d, 0, 0.5).is_err());
    }

    #[test]
    fn influence_bound_holds_on_random_functions() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let v: Vec<f64> = (0..1 << n).map(|_| rng.random_range(-1.0..1.0)).collect();
            let f = BooleanFunction::new(n, v, RangeTag::Real).unwrap();
            let delta = rng.random_range(0.05..1.0);
            let cap = degree_cap(delta).min(n).max(1);
            let mut mask: usize = 0;
            while mask == 0 || mask.count_ones() as usize > cap {
                mask = rng.random_range(1..1usize << n);
            }
            if mask.count_ones() as usize > degree_cap(delta) {
                continue;
            }
            let b = influence_quasirandom_bound(&f, mask, delta).unwrap();
            assert!(b.influences.iter().all(|&(_, inf)| inf >= b.bound - 1e-12));
        }
    }

    #[test]
    fn mean_shift_examples() {
        let c = BooleanFunction::constant(4, 0.3).unwrap();
        assert!(max_mean_shift(&c, 2).unwrap().shift.abs() < 1e-15);

        let p = BooleanFunction::parity(2, &[0, 1]).unwrap();
        let m = max_mean_shift(&p, 2).unwrap();
        assert_eq!(m.shift, 1.0);
        assert_eq!(m.restriction, BTreeMap::from([(0, Sign::Plus), (1, Sign::Plus)]));
        assert_eq!(max_mean_shift(&p, 1).unwrap().shift, 0.0);

        let maj = BooleanFunction::majority(3).unwrap();
        let m = max_mean_shift(&maj, 1).unwrap();
        assert_eq!(m.shift, 0.5);
        assert_eq!(m.restriction, BTreeMap::from([(0, Sign::Plus)]));
    }

    #[test]
    fn mean_shift_budget() {
        assert_eq!(restriction_count(3, 1), 1 + 6);
        assert_eq!(restriction_count(2, 2), 1 + 4 + 4);
        let f = BooleanFunction::constant(24, 1.0).unwrap();
        assert!(matches!(max_mean_shift(&f, 6), Err(Error::EnumerationBudget { .. })));
        assert!(max_mean_shift(&BooleanFunction::constant(2, 1.0).unwrap(), 3).is_err());
    }

    #[test]
    fn combinations_are_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
    }
}
