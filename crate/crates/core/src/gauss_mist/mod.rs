//! Gaussian quadrant probability and Majority-is-Stablest checks.
//!
//! `Λ_ρ(μ) = Pr[z_1 <= t, z_2 <= t]` for standard Gaussians with correlation
//! `ρ` and `t = Φ^{-1}(μ)`. Conditioning on `z_1 = z` gives the one-dimensional
//! form `∫_{-∞}^{t} Φ((t - ρz)/√(1-ρ²)) φ(z) dz`, evaluated here by adaptive
//! Gauss–Kronrod quadrature.
//!
//! Majority is Stablest bounds `Stab_ρ[f]` by `Λ_ρ(E[f])` plus an error term
//! for `[0,1]`-valued `f` with small noisy influences. The error term carries
//! an unspecified constant, so [`mist_slack`] only reports the slack; the
//! pipeline in [`check_quasi_mist`] assembles an explicit upper bound from a
//! regularity decomposition and reports each additive term separately.

pub mod normal;
pub mod quadrature;

use serde::{Deserialize, Serialize};

use crate::boolfn::{wht, BooleanFunction, RangeTag};
use crate::error::{check_closed, Error, Result};
use crate::noise::{check_rho, stability};
use crate::quasirandom::{degree_cap, is_quasirandom, QuasirandomnessVerdict};
use crate::regularity::{decompose, RegularityParams};
use crate::THRESHOLD_SLACK;

/// Quadrature settings for `Λ_ρ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    /// Target absolute error.
    pub tol: f64,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self { tol: 1e-9 }
    }
}

/// `Φ^{-1}(mu)`.
pub fn gaussian_quantile(mu: f64) -> Result<f64> {
    normal::quantile(mu)
}

/// `Λ_ρ(μ)` with the default tolerance.
pub fn quadrant_prob(rho: f64, mu: f64) -> Result<f64> {
    quadrant_prob_with(rho, mu, &QuadratureConfig::default())
}

pub fn quadrant_prob_with(rho: f64, mu: f64, cfg: &QuadratureConfig) -> Result<f64> {
    check_rho(rho)?;
    check_closed("mu", mu, 0.0, 1.0, "0 <= mu <= 1")?;
    if mu == 0.0 || mu == 1.0 {
        return Ok(mu);
    }
    if rho == 1.0 {
        return Ok(mu);
    }
    let t = normal::quantile(mu)?;
    let s = (1.0 - rho * rho).sqrt();
    let integrand = |z: f64| normal::cdf((t - rho * z) / s) * normal::pdf(z);

    // Below `lower` the integrand is at most φ(z), whose tail mass is < 1e-23.
    let lower = t.min(0.0) - 10.0;
    // The conditional probability drops from 1 to 0 around z = t/ρ over a
    // width of order s/ρ; breakpoints keep that layer visible to the rule.
    let mut cuts = vec![lower, t];
    if rho > 0.0 {
        let (centre, width) = (t / rho, s / rho);
        for j in [-64.0, -16.0, -4.0, -1.0, 0.0, 1.0, 4.0, 16.0, 64.0] {
            let c = centre + j * width;
            if c > lower && c < t {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    let tol = cfg.tol / (10.0 * cuts.len() as f64);
    let value: f64 = cuts
        .windows(2)
        .map(|w| quadrature::integrate(integrand, w[0], w[1], tol))
        .sum();
    Ok(value.clamp(0.0, mu))
}

/// `(1 - f)/2`: maps `+1 ↦ 0` and `-1 ↦ 1`.
pub fn to_zero_one(f: &BooleanFunction) -> Result<BooleanFunction> {
    if f.range() != RangeTag::PmOne {
        return Err(Error::WrongRange {
            expected: RangeTag::PmOne.name(),
            got: f.range().name(),
        });
    }
    f.affine(0.5, -0.5, RangeTag::ZeroOne)
}

fn require_zero_one(g: &BooleanFunction) -> Result<()> {
    if g.range() != RangeTag::ZeroOne {
        return Err(Error::WrongRange {
            expected: RangeTag::ZeroOne.name(),
            got: g.range().name(),
        });
    }
    Ok(())
}

fn check_open_rho(rho: f64) -> Result<()> {
    if (0.0..1.0).contains(&rho) {
        Ok(())
    } else {
        Err(Error::param("rho", rho, "0 <= rho < 1"))
    }
}

/// Parameters a pipeline run was given.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineParams {
    pub regularity: RegularityParams,
    pub q_eps: f64,
    pub q_delta: f64,
}

/// The leaf-wise bound assembly of [`check_quasi_mist`].
///
/// `certified_bound = bad_mass_term + lambda_term + lipschitz_term + mist_error_term`
/// bounds `Stab_ρ[f]` from above:
/// - `Stab_ρ[f] <= E_L Stab_ρ[f_L]` (splitting never lowers stability);
/// - bad leaves contribute at most their mass;
/// - a good leaf contributes `Λ_ρ(E f_L) + slack_L <= Λ_ρ(E f) + 2|E f - E f_L| + max(slack_L, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineTerms {
    pub hypothesis: QuasirandomnessVerdict,
    pub iterations: usize,
    pub depth: usize,
    pub leaf_count: usize,
    /// `Σ_{bad L} mass(L)`.
    pub bad_mass_term: f64,
    /// `(1 - bad mass) Λ_ρ(E f)`.
    pub lambda_term: f64,
    /// `Σ_{good L} mass(L) · 2 |E f - E f_L|`.
    pub lipschitz_term: f64,
    /// `Σ_{good L} mass(L) · max(0, Stab_ρ[f_L] - Λ_ρ(E f_L))`: the measured
    /// stand-in for the inequality's unquantified error term.
    pub mist_error_term: f64,
    pub certified_bound: f64,
    /// `E_L Stab_ρ[f_L]`.
    pub leaf_stability_average: f64,
    pub max_drift: f64,
    /// Leaves whose mean drift exceeds `2^{depth} q_eps`.
    pub drift_violations: usize,
    /// Whether the restriction-mean lemma covers every leaf: the hypothesis
    /// holds and no leaf is deeper than `⌊1/q_delta⌋`.
    pub drift_lemma_applies: bool,
    /// `certified_bound >= Stab_ρ[f]`.
    pub sound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MistReport {
    pub rho: f64,
    pub mean: f64,
    pub stab: f64,
    pub lambda: f64,
    /// `stab - lambda`.
    pub slack: f64,
    pub bad_mass: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params_used: Option<PipelineParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pipeline: Option<PipelineTerms>,
}

/// Exact `Stab_ρ[g]` against `Λ_ρ(E[g])` for `[0,1]`-valued `g`.
pub fn mist_slack(g: &BooleanFunction, rho: f64) -> Result<MistReport> {
    mist_slack_with(g, rho, &QuadratureConfig::default())
}

pub fn mist_slack_with(g: &BooleanFunction, rho: f64, cfg: &QuadratureConfig) -> Result<MistReport> {
    require_zero_one(g)?;
    check_open_rho(rho)?;
    let spectrum = wht(g);
    let mean = spectrum.mean().clamp(0.0, 1.0);
    let stab = stability(&spectrum, rho)?;
    let lambda = quadrant_prob_with(rho, mean, cfg)?;
    Ok(MistReport {
        rho,
        mean,
        stab,
        lambda,
        slack: stab - lambda,
        bad_mass: 0.0,
        params_used: None,
        pipeline: None,
    })
}

/// Runs the regularity decomposition on `f` and assembles the leaf-wise
/// upper bound on `Stab_ρ[f]`. A failed quasirandomness hypothesis is
/// reported in `pipeline.hypothesis`, not raised.
pub fn check_quasi_mist(
    f: &BooleanFunction,
    rho: f64,
    p: &RegularityParams,
    q_eps: f64,
    q_delta: f64,
) -> Result<MistReport> {
    check_quasi_mist_with(f, rho, p, q_eps, q_delta, &QuadratureConfig::default())
}

pub fn check_quasi_mist_with(
    f: &BooleanFunction,
    rho: f64,
    p: &RegularityParams,
    q_eps: f64,
    q_delta: f64,
    cfg: &QuadratureConfig,
) -> Result<MistReport> {
    let mut report = mist_slack_with(f, rho, cfg)?;
    let hypothesis = is_quasirandom(&wht(f), q_eps, q_delta)?;
    let result = decompose(f, p)?;
    let mean = report.mean;

    let (mut bad_mass_term, mut lipschitz_term, mut mist_error_term, mut leaf_avg) = (0.0, 0.0, 0.0, 0.0);
    let (mut max_drift, mut drift_violations) = (0.0f64, 0usize);
    let leaves = result.tree.leaves();
    for leaf in &leaves {
        let mass = leaf.mass();
        let leaf_mean = leaf.mean().clamp(0.0, 1.0);
        let leaf_stab = leaf.stability(rho);
        leaf_avg += mass * leaf_stab;

        let drift = (leaf_mean - mean).abs();
        max_drift = max_drift.max(drift);
        if drift > 2f64.powi(leaf.depth() as i32) * q_eps + THRESHOLD_SLACK {
            drift_violations += 1;
        }

        if leaf.verdict(p.eps, p.delta).is_ok() {
            let leaf_lambda = quadrant_prob_with(rho, leaf_mean, cfg)?;
            lipschitz_term += mass * 2.0 * drift;
            mist_error_term += mass * (leaf_stab - leaf_lambda).max(0.0);
        } else {
            bad_mass_term += mass;
        }
    }
    let lambda_term = (1.0 - bad_mass_term) * report.lambda;
    let certified_bound = bad_mass_term + lambda_term + lipschitz_term + mist_error_term;
    let depth = result.depth();

    report.bad_mass = result.bad_mass;
    report.params_used = Some(PipelineParams {
        regularity: *p,
        q_eps,
        q_delta,
    });
    report.pipeline = Some(PipelineTerms {
        drift_lemma_applies: hypothesis.ok && depth <= degree_cap(q_delta),
        hypothesis,
        iterations: result.iterations,
        depth,
        leaf_count: leaves.len(),
        bad_mass_term,
        lambda_term,
        lipschitz_term,
        mist_error_term,
        certified_bound,
        leaf_stability_average: leaf_avg,
        max_drift,
        drift_violations,
        sound: certified_bound >= report.stab - THRESHOLD_SLACK,
    });
    Ok(report)
}

/// The asymptotic parameter schedule for a target `eps`, with natural logs
/// `L = ln(1/eps)` and `LL = ln L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticParams {
    pub eps: f64,
    /// `L^2 / (eps · LL)`: the tree-height budget, equal to `1/(eps·delta·gamma)`.
    pub height_budget: f64,
    /// `(eps, 1/L, LL/L)`.
    pub regularity: RegularityParams,
    /// `eps · 2^{-height_budget}`; `0` when it underflows.
    pub q_eps: f64,
    /// `log2(q_eps)`, finite even when `q_eps` underflows.
    pub log2_q_eps: f64,
    /// `eps · LL / L^2 = 1/height_budget`.
    pub q_delta: f64,
    pub q_eps_underflow: bool,
    pub budget_overflow: bool,
}

pub fn paper_exact_params(eps: f64) -> Result<AsymptoticParams> {
    let upper = (-2.0f64).exp();
    if !(eps > 0.0 && eps < upper) {
        return Err(Error::param("eps", eps, "0 < eps < e^-2"));
    }
    let l = (1.0 / eps).ln();
    let ll = l.ln();
    let height_budget = l * l / (eps * ll);
    let log2_q_eps = eps.log2() - height_budget;
    let q_eps_underflow = log2_q_eps < f64::MIN_EXP as f64 - f64::MANTISSA_DIGITS as f64;
    let q_eps = if q_eps_underflow { 0.0 } else { log2_q_eps.exp2() };
    Ok(AsymptoticParams {
        eps,
        height_budget,
        regularity: RegularityParams {
            eps,
            delta: 1.0 / l,
            gamma: ll / l,
        },
        q_eps,
        log2_q_eps,
        q_delta: eps * ll / (l * l),
        q_eps_underflow,
        budget_overflow: !height_budget.is_finite(),
    })
}
