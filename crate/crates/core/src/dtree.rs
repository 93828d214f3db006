//! Decision trees that query one coordinate per internal node and hold a
//! subfunction at each leaf.
//!
//! Trees are persistent: splitting returns a new tree that shares every
//! untouched branch with the old one. A leaf reached by `d` random decisions
//! from the root carries mass `2^{-d}`, the probability that a uniform input
//! lands on it.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boolfn::{wht_in_place, BooleanFunction, Sign};
use crate::error::{Error, Result};
use crate::noise::{self, argmax, check_delta, InfluenceVerdict};

pub type LeafId = usize;

/// Fourier spectrum of a leaf on its free coordinates only.
#[derive(Debug)]
struct FreeSpectrum {
    free: Vec<usize>,
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Leaf {
    id: LeafId,
    func: BooleanFunction,
    fixed: BTreeMap<usize, Sign>,
    spectrum: Arc<OnceLock<FreeSpectrum>>,
}

impl Leaf {
    fn new(id: LeafId, func: BooleanFunction, fixed: BTreeMap<usize, Sign>) -> Self {
        Self {
            id,
            func,
            fixed,
            spectrum: Arc::default(),
        }
    }

    pub fn id(&self) -> LeafId {
        self.id
    }

    /// The subfunction, on the full ambient arity.
    pub fn func(&self) -> &BooleanFunction {
        &self.func
    }

    /// Root-to-leaf assignments.
    pub fn fixed(&self) -> &BTreeMap<usize, Sign> {
        &self.fixed
    }

    pub fn depth(&self) -> usize {
        self.fixed.len()
    }

    pub fn mass(&self) -> f64 {
        0.5f64.powi(self.depth() as i32)
    }

    // Coordinates in `fixed` are irrelevant to `func`, so its spectrum is
    // supported on subsets of the free coordinates and can be computed on
    // the 2^{n-depth} subcube.
    fn spectrum(&self) -> &FreeSpectrum {
        self.spectrum.get_or_init(|| {
            let n = self.func.n();
            let free: Vec<usize> = (0..n).filter(|i| !self.fixed.contains_key(i)).collect();
            let anchor = self.fixed.iter().fold(0usize, |acc, (&i, s)| acc | (s.bit() << i));
            let mut coeffs = self.func.subcube(&free, anchor);
            wht_in_place(&mut coeffs);
            let scale = 1.0 / coeffs.len() as f64;
            coeffs.iter_mut().for_each(|c| *c *= scale);
            FreeSpectrum { free, coeffs }
        })
    }

    pub fn mean(&self) -> f64 {
        self.spectrum().coeffs[0]
    }

    /// `Stab_ρ` of the subfunction.
    pub fn stability(&self, rho: f64) -> f64 {
        let sp = self.spectrum();
        noise::stability_of_coeffs(&sp.coeffs, sp.free.len(), rho)
    }

    /// All `n` noisy influences; fixed coordinates get exactly zero.
    pub fn influences(&self, delta: f64) -> Vec<f64> {
        let sp = self.spectrum();
        let compact = noise::influences_of_coeffs(&sp.coeffs, sp.free.len(), 1.0 - delta);
        let mut inf = vec![0.0; self.func.n()];
        for (k, &i) in sp.free.iter().enumerate() {
            inf[i] = compact[k];
        }
        inf
    }

    pub fn max_influence(&self, delta: f64) -> (usize, f64) {
        argmax(&self.influences(delta)).expect("n >= 1")
    }

    pub fn verdict(&self, eps: f64, delta: f64) -> InfluenceVerdict {
        noise::judge(&self.influences(delta), eps)
    }

    pub fn summary(&self, delta: f64) -> LeafSummary {
        let (var, value) = self.max_influence(delta);
        LeafSummary {
            id: self.id,
            depth: self.depth(),
            mass: self.mass(),
            mean: self.mean(),
            max_influence: value,
            max_influence_var: var,
        }
    }
}

/// Per-leaf numbers for reports.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeafSummary {
    pub id: LeafId,
    pub depth: usize,
    pub mass: f64,
    pub mean: f64,
    pub max_influence: f64,
    pub max_influence_var: usize,
}

#[derive(Debug, Clone)]
pub enum Node {
    Internal {
        var: usize,
        /// Taken when `x_var = +1`.
        plus: Arc<Node>,
        minus: Arc<Node>,
    },
    Leaf(Leaf),
}

#[derive(Debug, Clone)]
pub struct DecisionTree {
    n: usize,
    root: Arc<Node>,
    next_id: LeafId,
}

impl DecisionTree {
    /// One leaf holding `f`.
    pub fn singleton(f: BooleanFunction) -> Self {
        Self {
            n: f.n(),
            root: Arc::new(Node::Leaf(Leaf::new(0, f, BTreeMap::new()))),
            next_id: 1,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// The leaf `D(x)` reached by input index `b`.
    pub fn leaf_at(&self, b: usize) -> &Leaf {
        assert!(b < 1 << self.n, "input index {b} out of range");
        let mut node = self.root.as_ref();
        loop {
            match node {
                Node::Internal { var, plus, minus } => {
                    node = match Sign::of_input(b, *var) {
                        Sign::Plus => plus,
                        Sign::Minus => minus,
                    }
                }
                Node::Leaf(leaf) => return leaf,
            }
        }
    }

    /// `f_{D(x)}(x)`.
    pub fn evaluate(&self, b: usize) -> f64 {
        self.leaf_at(b).func.value(b)
    }

    /// Leaves in depth-first order, `+1` branch first.
    pub fn leaves(&self) -> Vec<&Leaf> {
        fn walk<'a>(node: &'a Node, out: &mut Vec<&'a Leaf>) {
            match node {
                Node::Internal { plus, minus, .. } => {
                    walk(plus, out);
                    walk(minus, out);
                }
                Node::Leaf(leaf) => out.push(leaf),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out
    }

    pub fn leaf(&self, id: LeafId) -> Option<&Leaf> {
        self.leaves().into_iter().find(|l| l.id == id)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves().len()
    }

    pub fn depth(&self) -> usize {
        self.leaves().iter().map(|l| l.depth()).max().unwrap_or(0)
    }

    /// Replaces leaf `id` by a query to `var` with the two restrictions as children.
    pub fn split_leaf(&self, id: LeafId, var: usize) -> Result<Self> {
        self.split_leaves(&BTreeMap::from([(id, var)]))
    }

    /// Splits several leaves in one rebuild. New ids are handed out in
    /// depth-first order, `+1` child first.
    pub fn split_leaves(&self, splits: &BTreeMap<LeafId, usize>) -> Result<Self> {
        if let Some(&var) = splits.values().find(|&&v| v >= self.n) {
            return Err(Error::IndexOutOfRange { index: var, n: self.n });
        }
        let mut next_id = self.next_id;
        let mut done = 0;
        let root = rebuild(&self.root, &mut |leaf| {
            let Some(&var) = splits.get(&leaf.id) else {
                return Ok(None);
            };
            done += 1;
            split_one(leaf, var, &mut next_id).map(Some)
        })?;
        if done != splits.len() {
            let missing = splits
                .keys()
                .find(|id| self.leaf(**id).is_none())
                .copied()
                .unwrap_or(usize::MAX);
            return Err(Error::UnknownLeaf(missing));
        }
        Ok(Self {
            n: self.n,
            root,
            next_id,
        })
    }

    /// Splits every leaf on `var`, adding one homogeneous level.
    pub fn split_all_on(&self, var: usize) -> Result<Self> {
        let splits = self.leaves().iter().map(|l| (l.id, var)).collect();
        self.split_leaves(&splits)
    }

    /// `φ(D) = Σ_L 2^{-depth(L)} Stab_{1-δ}[f_L]`.
    pub fn energy(&self, delta: f64) -> Result<f64> {
        check_delta(delta)?;
        let terms: Vec<f64> = self
            .leaves()
            .par_iter()
            .map(|l| l.mass() * l.stability(1.0 - delta))
            .collect();
        Ok(terms.iter().sum())
    }

    /// Mass of the leaves whose subfunction fails the `(ε, δ)`-small noisy
    /// influence test.
    pub fn bad_leaf_mass(&self, eps: f64, delta: f64) -> Result<f64> {
        check_delta(delta)?;
        if !(eps > 0.0) {
            return Err(Error::param("eps", eps, "eps > 0"));
        }
        let terms: Vec<f64> = self
            .leaves()
            .par_iter()
            .map(|l| if l.verdict(eps, delta).is_ok() { 0.0 } else { l.mass() })
            .collect();
        Ok(terms.iter().sum())
    }

    /// The variable queried at each level when every internal node on a level
    /// queries the same variable; `None` otherwise.
    pub fn level_vars(&self) -> Option<Vec<usize>> {
        let mut levels: Vec<usize> = Vec::new();
        let mut frontier = vec![self.root.as_ref()];
        while !frontier.is_empty() {
            let mut var_here = None;
            let mut next = Vec::new();
            for node in frontier {
                if let Node::Internal { var, plus, minus } = node {
                    match var_here {
                        None => var_here = Some(*var),
                        Some(v) if v != *var => return None,
                        _ => {}
                    }
                    next.push(plus.as_ref());
                    next.push(minus.as_ref());
                }
            }
            if let Some(v) = var_here {
                levels.push(v);
            }
            frontier = next;
        }
        Some(levels)
    }

    pub fn is_homogeneous(&self) -> bool {
        self.level_vars().is_some()
    }

    pub fn summaries(&self, delta: f64) -> Vec<LeafSummary> {
        self.leaves().par_iter().map(|l| l.summary(delta)).collect()
    }

    /// Graphviz rendering. Variables are shown one-based (`x1` is index 0).
    pub fn to_dot(&self, delta: f64) -> String {
        fn emit(node: &Node, delta: f64, counter: &mut usize, out: &mut String) -> String {
            let name = format!("n{}", *counter);
            *counter += 1;
            match node {
                Node::Internal { var, plus, minus } => {
                    let _ = writeln!(out, "  {name} [label=\"x{}\", shape=circle];", var + 1);
                    for (child, label) in [(plus, "+1"), (minus, "-1")] {
                        let c = emit(child, delta, counter, out);
                        let _ = writeln!(out, "  {name} -> {c} [label=\"{label}\"];");
                    }
                }
                Node::Leaf(leaf) => {
                    let s = leaf.summary(delta);
                    let _ = writeln!(
                        out,
                        "  {name} [label=\"leaf {}\\ndepth {}\\nmean {:.6}\\nmax inf {:.6} (x{})\", shape=box];",
                        s.id,
                        s.depth,
                        s.mean,
                        s.max_influence,
                        s.max_influence_var + 1
                    );
                }
            }
            name
        }
        let mut out = String::from("digraph decision_tree {\n");
        let mut counter = 0;
        emit(&self.root, delta, &mut counter, &mut out);
        out.push_str("}\n");
        out
    }
}

fn split_one(leaf: &Leaf, var: usize, next_id: &mut LeafId) -> Result<Node> {
    if leaf.fixed.contains_key(&var) {
        return Err(Error::VariableAlreadyFixed { leaf: leaf.id, var });
    }
    let mut child = |sign: Sign| -> Result<Arc<Node>> {
        let mut fixed = leaf.fixed.clone();
        fixed.insert(var, sign);
        let id = *next_id;
        *next_id += 1;
        Ok(Arc::new(Node::Leaf(Leaf::new(
            id,
            leaf.func.restrict(var, sign)?,
            fixed,
        ))))
    };
    let plus = child(Sign::Plus)?;
    let minus = child(Sign::Minus)?;
    Ok(Node::Internal { var, plus, minus })
}

/// Copies the path to every replaced leaf; untouched subtrees are shared.
fn rebuild(node: &Arc<Node>, replace: &mut impl FnMut(&Leaf) -> Result<Option<Node>>) -> Result<Arc<Node>> {
    match node.as_ref() {
        Node::Leaf(leaf) => Ok(match replace(leaf)? {
            Some(new) => Arc::new(new),
            None => Arc::clone(node),
        }),
        Node::Internal { var, plus, minus } => {
            let p = rebuild(plus, replace)?;
            let m = rebuild(minus, replace)?;
            if Arc::ptr_eq(&p, plus) && Arc::ptr_eq(&m, minus) {
                Ok(Arc::clone(node))
            } else {
                Ok(Arc::new(Node::Internal {
                    var: *var,
                    plus: p,
                    minus: m,
                }))
            }
        }
    }
}

/// One recorded point of the energy trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LedgerEntry {
    pub iteration: usize,
    pub phi: f64,
    pub depth: usize,
    pub bad_mass: f64,
}

/// Energy `φ` after each regularity iteration; entry 0 is the starting tree.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub phi: f64,
    pub history: Vec<LedgerEntry>,
}

impl EnergyLedger {
    pub fn record(&mut self, entry: LedgerEntry) {
        self.phi = entry.phi;
        self.history.push(entry);
    }

    /// `φ(k+1) - φ(k)` for each iteration.
    pub fn gains(&self) -> Vec<f64> {
        self.history.windows(2).map(|w| w[1].phi - w[0].phi).collect()
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.gains().iter().all(|&g| g > 0.0)
    }
}
