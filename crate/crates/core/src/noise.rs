//! Noise stability, noisy influence and the small-influence predicate.
//!
//! All correlations are nonnegative: `ρ ∈ [0,1]` and `δ = 1 - ρ ∈ [0,1]`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolfn::{wht, BooleanFunction, FourierExpansion};
use crate::error::{check_closed, Result};
use crate::THRESHOLD_SLACK;

/// A correlation `rho` and its noise rate `delta = 1 - rho`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    pub rho: f64,
    pub delta: f64,
}

impl NoiseParams {
    pub fn from_rho(rho: f64) -> Result<Self> {
        check_rho(rho)?;
        Ok(Self { rho, delta: 1.0 - rho })
    }

    pub fn from_delta(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self {
            rho: 1.0 - delta,
            delta,
        })
    }
}

pub(crate) fn check_rho(rho: f64) -> Result<()> {
    check_closed("rho", rho, 0.0, 1.0, "0 <= rho <= 1")
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    check_closed("delta", delta, 0.0, 1.0, "0 <= delta <= 1")
}

/// `ρ^k` for `k = 0..=n`.
fn powers(rho: f64, n: usize) -> Vec<f64> {
    std::iter::successors(Some(1.0), |p| Some(p * rho))
        .take(n + 1)
        .collect()
}

/// `Σ_S ρ^{|S|} c_S^2` over a raw coefficient table on `n` variables.
pub(crate) fn stability_of_coeffs(coeffs: &[f64], n: usize, rho: f64) -> f64 {
    let pw = powers(rho, n);
    coeffs
        .iter()
        .enumerate()
        .map(|(s, c)| pw[s.count_ones() as usize] * c * c)
        .sum()
}

/// `Σ_{S ∋ i} ρ^{|S|-1} c_S^2` for every `i`, in one pass over the table.
pub(crate) fn influences_of_coeffs(coeffs: &[f64], n: usize, rho: f64) -> Vec<f64> {
    let pw = powers(rho, n);
    let mut inf = vec![0.0; n];
    for (s, c) in coeffs.iter().enumerate().skip(1) {
        let w = pw[s.count_ones() as usize - 1] * c * c;
        let mut rest = s;
        while rest != 0 {
            inf[rest.trailing_zeros() as usize] += w;
            rest &= rest - 1;
        }
    }
    inf
}

/// `Stab_ρ[f] = Σ_S ρ^{|S|} f̂(S)^2`.
pub fn stability(g: &FourierExpansion, rho: f64) -> Result<f64> {
    check_rho(rho)?;
    Ok(stability_of_coeffs(g.coeffs(), g.n(), rho))
}

/// A Monte-Carlo estimate with its sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub value: f64,
    /// Standard deviation of a single sample `f(x) f(y)`.
    pub sample_std: f64,
    pub samples: u64,
}

impl McEstimate {
    /// Standard error of the mean.
    pub fn std_error(&self) -> f64 {
        self.sample_std / (self.samples as f64).sqrt()
    }
}

/// Estimates `E[f(x) f(y)]` over `ρ`-correlated pairs: `x` uniform, and each
/// `y_i` equal to `x_i` with probability `(1+ρ)/2`, independently.
pub fn stability_mc(f: &BooleanFunction, rho: f64, samples: u64, seed: u64) -> Result<f64> {
    Ok(stability_mc_estimate(f, rho, samples, seed)?.value)
}

pub fn stability_mc_estimate(f: &BooleanFunction, rho: f64, samples: u64, seed: u64) -> Result<McEstimate> {
    check_rho(rho)?;
    let samples = samples.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = f.n();
    let full = f.len() - 1;
    let flip = (1.0 - rho) / 2.0;

    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let x = rng.random::<u32>() as usize & full;
        let mut noise = 0usize;
        if flip > 0.0 {
            for i in 0..n {
                if rng.random::<f64>() < flip {
                    noise |= 1 << i;
                }
            }
        }
        let p = f.value(x) * f.value(x ^ noise);
        sum += p;
        sum_sq += p * p;
    }
    let m = samples as f64;
    let value = sum / m;
    let var = if samples > 1 {
        ((sum_sq - m * value * value) / (m - 1.0)).max(0.0)
    } else {
        0.0
    };
    Ok(McEstimate {
        value,
        sample_std: var.sqrt(),
        samples,
    })
}

/// `Inf_i^{(1-δ)}[f] = Σ_{S ∋ i} (1-δ)^{|S|-1} f̂(S)^2`.
pub fn noisy_influence(f: &BooleanFunction, i: usize, delta: f64) -> Result<f64> {
    f.check_index(i)?;
    check_delta(delta)?;
    Ok(influences_of_coeffs(wht(f).coeffs(), f.n(), 1.0 - delta)[i])
}

/// All `n` noisy influences at once.
pub fn noisy_influences(g: &FourierExpansion, delta: f64) -> Result<Vec<f64>> {
    check_delta(delta)?;
    Ok(influences_of_coeffs(g.coeffs(), g.n(), 1.0 - delta))
}

/// Outcome of the `(ε, δ)`-small noisy influence test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum InfluenceVerdict {
    Ok,
    /// The coordinate of largest influence (lowest index on ties).
    Violator {
        index: usize,
        value: f64,
    },
}

impl InfluenceVerdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, InfluenceVerdict::Ok)
    }
}

/// Index of the largest entry, lowest index on ties.
pub(crate) fn argmax(values: &[f64]) -> Option<(usize, f64)> {
    values
        .iter()
        .copied()
        .enumerate()
        .fold(None, |best, (i, v)| match best {
            Some((_, b)) if v <= b => best,
            _ => Some((i, v)),
        })
}

/// Judges a precomputed influence vector against `eps`.
pub(crate) fn judge(influences: &[f64], eps: f64) -> InfluenceVerdict {
    match argmax(influences) {
        Some((index, value)) if value > eps + THRESHOLD_SLACK => InfluenceVerdict::Violator { index, value },
        _ => InfluenceVerdict::Ok,
    }
}

/// Whether every `Inf_i^{(1-δ)}[f] <= eps` (up to [`THRESHOLD_SLACK`]).
pub fn has_small_noisy_influences(f: &BooleanFunction, eps: f64, delta: f64) -> Result<InfluenceVerdict> {
    if !(eps > 0.0) {
        return Err(crate::Error::param("eps", eps, "eps > 0"));
    }
    let inf = noisy_influences(&wht(f), delta)?;
    Ok(judge(&inf, eps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::RangeTag;
    use proptest::prelude::*;

    fn maj3() -> BooleanFunction {
        BooleanFunction::majority(3).unwrap()
    }

    /// Brute-force `E[f(x) f(y)]` over all pairs with the product weights
    /// `Π_i (1 + ρ x_i y_i) / 4`.
    fn stability_by_pairs(f: &BooleanFunction, rho: f64) -> f64 {
        let n = f.n();
        let mut total = 0.0;
        for x in 0..f.len() {
            for y in 0..f.len() {
                let agree = n - (x ^ y).count_ones() as usize;
                let w = ((1.0 + rho) / 2.0).powi(agree as i32) * ((1.0 - rho) / 2.0).powi((n - agree) as i32);
                total += f.value(x) * f.value(y) * w;
            }
        }
        total / f.len() as f64
    }

    #[test]
    fn stability_examples() {
        let dict = wht(&BooleanFunction::dictator(3, 0).unwrap());
        for rho in [0.0, 0.3, 1.0] {
            assert!((stability(&dict, rho).unwrap() - rho).abs() < 1e-15);
        }
        let m = wht(&maj3());
        assert!((stability(&m, 0.5).unwrap() - 0.40625).abs() < 1e-15);
        for rho in [0.1f64, 0.7, 0.95] {
            let closed = 0.75 * rho + 0.25 * rho.powi(3);
            assert!((stability(&m, rho).unwrap() - closed).abs() < 1e-12);
            assert!((stability_by_pairs(&maj3(), rho) - closed).abs() < 1e-12);
        }
        let c = wht(&BooleanFunction::constant(2, 0.3).unwrap());
        assert!((stability(&c, 0.4).unwrap() - 0.09).abs() < 1e-15);
        assert!(stability(&m, 1.5).is_err());
        assert!(stability(&m, -0.1).is_err());
    }

    #[test]
    fn monte_carlo_examples() {
        let dict = BooleanFunction::dictator(2, 0).unwrap();
        assert_eq!(stability_mc(&dict, 1.0, 1000, 3).unwrap(), 1.0);
        let est = stability_mc(&dict, 0.6, 1_000_000, 11).unwrap();
        assert!((est - 0.6).abs() < 0.005, "{est}");
        let est = stability_mc(&maj3(), 0.5, 1_000_000, 12).unwrap();
        assert!((est - 0.40625).abs() < 0.005, "{est}");
        assert_eq!(
            stability_mc(&maj3(), 0.5, 1000, 5).unwrap(),
            stability_mc(&maj3(), 0.5, 1000, 5).unwrap()
        );
    }

    #[test]
    fn influence_examples() {
        let dict = BooleanFunction::dictator(2, 0).unwrap();
        let par = BooleanFunction::parity(2, &[0, 1]).unwrap();
        for delta in [0.0, 0.25, 1.0] {
            assert_eq!(noisy_influence(&dict, 0, delta).unwrap(), 1.0);
            assert!((noisy_influence(&par, 0, delta).unwrap() - (1.0 - delta)).abs() < 1e-15);
            let closed = 0.25 + 0.25 * (1.0 - delta) * (1.0 - delta);
            assert!((noisy_influence(&maj3(), 0, delta).unwrap() - closed).abs() < 1e-15);
        }
        assert_eq!(noisy_influence(&maj3(), 0, 0.0).unwrap(), 0.5);
        assert!(noisy_influence(&maj3(), 3, 0.1).is_err());
        assert!(noisy_influence(&maj3(), 0, 1.1).is_err());
    }

    #[test]
    fn small_influence_examples() {
        let c = BooleanFunction::constant(4, 1.0).unwrap();
        assert_eq!(has_small_noisy_influences(&c, 0.01, 0.1).unwrap(), InfluenceVerdict::Ok);

        let dict = BooleanFunction::dictator(3, 0).unwrap();
        assert_eq!(
            has_small_noisy_influences(&dict, 0.5, 0.5).unwrap(),
            InfluenceVerdict::Violator { index: 0, value: 1.0 }
        );

        // every influence of the 10-bit parity is 0.7^9 ≈ 0.0404
        let all: Vec<usize> = (0..10).collect();
        let par = BooleanFunction::parity(10, &all).unwrap();
        let inf = noisy_influence(&par, 0, 0.3).unwrap();
        assert!((inf - 0.7f64.powi(9)).abs() < 1e-15);
        assert_eq!(
            has_small_noisy_influences(&par, 0.1, 0.3).unwrap(),
            InfluenceVerdict::Ok
        );
        assert!(has_small_noisy_influences(&par, 0.0, 0.3).is_err());
    }

    #[test]
    fn violator_ties_go_to_lowest_index() {
        // Maj3 influences are all equal
        assert_eq!(
            has_small_noisy_influences(&maj3(), 0.1, 0.0).unwrap(),
            InfluenceVerdict::Violator { index: 0, value: 0.5 }
        );
    }

    #[test]
    fn boundary_within_slack_counts_as_small() {
        let par = BooleanFunction::parity(2, &[0, 1]).unwrap();
        // influence is exactly 1 - delta = 0.7 (up to rounding)
        assert!(has_small_noisy_influences(&par, 0.7, 0.3).unwrap().is_ok());
    }

    fn real_fn() -> impl Strategy<Value = BooleanFunction> {
        (1usize..=8).prop_flat_map(|n| {
            prop::collection::vec(-1.0f64..1.0, 1 << n)
                .prop_map(move |v| BooleanFunction::new(n, v, RangeTag::Real).unwrap())
        })
    }

    proptest! {
        #[test]
        fn influence_two_routes_agree(f in real_fn(), i in 0usize..8, delta in 0.0f64..=1.0) {
            let i = i % f.n();
            let via_derivative = stability(&wht(&f.derivative(i).unwrap()), 1.0 - delta).unwrap();
            let via_formula = noisy_influence(&f, i, delta).unwrap();
            prop_assert!((via_derivative - via_formula).abs() <= 1e-12);
            prop_assert!(via_formula >= 0.0);
        }

        #[test]
        fn stability_bounded_and_monotone(f in real_fn(), a in 0.0f64..=1.0, b in 0.0f64..=1.0) {
            let g = wht(&f);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let s_lo = stability(&g, lo).unwrap();
            let s_hi = stability(&g, hi).unwrap();
            prop_assert!(s_lo >= 0.0);
            prop_assert!(s_hi <= f.norm2() + 1e-12);
            prop_assert!(s_lo <= s_hi + 1e-15);
        }

        #[test]
        fn fourier_matches_pair_enumeration(f in (1usize..=5).prop_flat_map(|n| prop::collection::vec(-1.0f64..1.0, 1 << n).prop_map(move |v| BooleanFunction::new(n, v, RangeTag::Real).unwrap())), rho in 0.0f64..=1.0) {
            let a = stability(&wht(&f), rho).unwrap();
            prop_assert!((a - stability_by_pairs(&f, rho)).abs() <= 1e-12);
        }
    }
}
