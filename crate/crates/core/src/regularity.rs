//! Energy-increment decompositions.
//!
//! Starting from the single-leaf tree, every leaf whose subfunction has a
//! coordinate of noisy influence above `eps` is split on its most influential
//! coordinate. Splitting leaf `L` on `x_j` raises the energy by exactly
//! `mass(L) · δ · Inf_j^{(1-δ)}[f_L]`, so while the bad leaves carry more than
//! `gamma` of the mass each round gains more than `eps·delta·gamma`. The energy
//! never exceeds `E[f^2] <= 1`, which bounds the number of rounds by
//! `1/(eps·delta·gamma)`.
//!
//! The homogeneous variant splits every leaf on the same variables, so the
//! leaves are exactly the restrictions of `f` on the queried set `J`.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::BooleanFunction;
use crate::dtree::{DecisionTree, EnergyLedger, LeafId, LeafSummary, LedgerEntry};
use crate::error::{Error, Result};
use crate::noise::InfluenceVerdict;
use crate::NORM_TOLERANCE;

/// The `(eps, delta, gamma)` triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegularityParams {
    pub eps: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl RegularityParams {
    pub fn new(eps: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::param("eps", eps, "eps > 0"));
        }
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::param("delta", delta, "0 < delta <= 1"));
        }
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::param("gamma", gamma, "0 < gamma <= 1"));
        }
        let p = Self { eps, delta, gamma };
        if !p.budget().is_finite() {
            return Err(Error::param(
                "eps*delta*gamma",
                eps * delta * gamma,
                "1/(eps*delta*gamma) finite",
            ));
        }
        Ok(p)
    }

    /// `1/(eps·delta·gamma)`: the bound on iterations and on tree depth.
    pub fn budget(&self) -> f64 {
        1.0 / (self.eps * self.delta * self.gamma)
    }

    /// Guaranteed energy gain per iteration.
    pub fn gain_floor(&self) -> f64 {
        self.eps * self.delta * self.gamma
    }
}

#[derive(Debug, Clone)]
pub struct DecompositionResult {
    pub params: RegularityParams,
    pub tree: DecisionTree,
    pub iterations: usize,
    pub ledger: EnergyLedger,
    pub bad_mass: f64,
    /// Queried variables in level order; empty for the plain decomposition.
    pub homogeneous_vars: Vec<usize>,
}

/// Per-leaf analysis of one round.
struct LeafState {
    id: LeafId,
    mass: f64,
    verdict: InfluenceVerdict,
}

fn analyze(tree: &DecisionTree, p: &RegularityParams) -> Vec<LeafState> {
    tree.leaves()
        .par_iter()
        .map(|l| LeafState {
            id: l.id(),
            mass: l.mass(),
            verdict: l.verdict(p.eps, p.delta),
        })
        .collect()
}

fn bad_mass_of(states: &[LeafState]) -> f64 {
    states
        .iter()
        .filter(|s| !s.verdict.is_ok())
        .fold(0.0, |acc, s| acc + s.mass)
}

fn check_input(f: &BooleanFunction) -> Result<()> {
    let norm = f.norm2();
    if norm > 1.0 + NORM_TOLERANCE {
        return Err(Error::NormTooLarge(norm));
    }
    Ok(())
}

/// Splits bad leaves on their most influential coordinate until the bad mass
/// is at most `gamma`.
pub fn decompose(f: &BooleanFunction, p: &RegularityParams) -> Result<DecompositionResult> {
    check_input(f)?;
    let mut tree = DecisionTree::singleton(f.clone());
    let mut ledger = EnergyLedger::default();
    let mut states = analyze(&tree, p);
    let mut bad_mass = bad_mass_of(&states);
    ledger.record(LedgerEntry {
        iteration: 0,
        phi: tree.energy(p.delta)?,
        depth: 0,
        bad_mass,
    });

    let depth_cap = p.budget().min(f.n() as f64);
    let mut iterations = 0;
    while bad_mass > p.gamma {
        let splits: BTreeMap<LeafId, usize> = states
            .iter()
            .filter_map(|s| match s.verdict {
                InfluenceVerdict::Violator { index, .. } => Some((s.id, index)),
                InfluenceVerdict::Ok => None,
            })
            .collect();
        tree = tree.split_leaves(&splits)?;
        iterations += 1;

        let depth = tree.depth();
        if depth as f64 > depth_cap || iterations as f64 > p.budget() {
            return Err(Error::Internal(format!(
                "depth {depth} after {iterations} iterations exceeds min(budget, n) = {depth_cap}"
            )));
        }
        states = analyze(&tree, p);
        bad_mass = bad_mass_of(&states);
        ledger.record(LedgerEntry {
            iteration: iterations,
            phi: tree.energy(p.delta)?,
            depth,
            bad_mass,
        });
    }

    Ok(DecompositionResult {
        params: *p,
        tree,
        iterations,
        ledger,
        bad_mass,
        homogeneous_vars: Vec::new(),
    })
}

/// Homogeneous decomposition: each round collects the most influential
/// coordinate of every bad leaf and splits every leaf on all of them, in
/// increasing index order. Fails with [`Error::BudgetExceeded`] (carrying the
/// last complete tree) when `J` would grow beyond `var_cap`.
pub fn decompose_homogeneous(f: &BooleanFunction, p: &RegularityParams, var_cap: usize) -> Result<DecompositionResult> {
    check_input(f)?;
    let mut tree = DecisionTree::singleton(f.clone());
    let mut ledger = EnergyLedger::default();
    let mut queried: Vec<usize> = Vec::new();
    let mut states = analyze(&tree, p);
    let mut bad_mass = bad_mass_of(&states);
    ledger.record(LedgerEntry {
        iteration: 0,
        phi: tree.energy(p.delta)?,
        depth: 0,
        bad_mass,
    });

    let mut iterations = 0;
    while bad_mass > p.gamma {
        let wanted: BTreeSet<usize> = states
            .iter()
            .filter_map(|s| match s.verdict {
                InfluenceVerdict::Violator { index, .. } => Some(index),
                InfluenceVerdict::Ok => None,
            })
            .filter(|i| !queried.contains(i))
            .collect();
        if wanted.is_empty() {
            return Err(Error::Internal(
                "bad leaf whose top coordinate is already queried".into(),
            ));
        }
        if queried.len() + wanted.len() > var_cap {
            return Err(Error::BudgetExceeded(Box::new(DecompositionResult {
                params: *p,
                tree,
                iterations,
                ledger,
                bad_mass,
                homogeneous_vars: queried,
            })));
        }
        for &var in &wanted {
            tree = tree.split_all_on(var)?;
            queried.push(var);
        }
        iterations += 1;
        states = analyze(&tree, p);
        bad_mass = bad_mass_of(&states);
        ledger.record(LedgerEntry {
            iteration: iterations,
            phi: tree.energy(p.delta)?,
            depth: queried.len(),
            bad_mass,
        });
    }

    Ok(DecompositionResult {
        params: *p,
        tree,
        iterations,
        ledger,
        bad_mass,
        homogeneous_vars: queried,
    })
}

/// Value of the tower `2↑↑k`, saturating once it leaves `u64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tower {
    Finite(u64),
    Huge,
}

impl Tower {
    /// `n <= 2↑↑k`.
    pub fn bounds(&self, n: u64) -> bool {
        match *self {
            Tower::Finite(t) => n <= t,
            Tower::Huge => true,
        }
    }
}

/// `2↑↑0 = 1`, `2↑↑(k+1) = 2^(2↑↑k)`.
pub fn tower(k: u32) -> Tower {
    let mut t: u64 = 1;
    for _ in 0..k {
        if t >= 64 {
            return Tower::Huge;
        }
        t = 1u64 << t;
    }
    Tower::Finite(t)
}

/// Serializable summary of a decomposition. Variables are one-based.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub params: RegularityParams,
    pub budget: f64,
    pub homogeneous: bool,
    pub iterations: usize,
    pub phi: Vec<f64>,
    pub depth: usize,
    pub leaf_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub queried_vars: Option<Vec<usize>>,
    pub bad_mass: f64,
    pub leaves: Vec<LeafSummary>,
}

impl DecompositionResult {
    pub fn depth(&self) -> usize {
        self.tree.depth()
    }

    pub fn report(&self, homogeneous: bool) -> DecompositionReport {
        let leaves = self
            .tree
            .summaries(self.params.delta)
            .into_iter()
            .map(|mut s| {
                s.max_influence_var += 1;
                s
            })
            .collect();
        DecompositionReport {
            params: self.params,
            budget: self.params.budget(),
            homogeneous,
            iterations: self.iterations,
            phi: self.ledger.history.iter().map(|e| e.phi).collect(),
            depth: self.depth(),
            leaf_count: self.tree.leaf_count(),
            queried_vars: homogeneous.then(|| self.homogeneous_vars.iter().map(|v| v + 1).collect()),
            bad_mass: self.bad_mass,
            leaves,
        }
    }
}
