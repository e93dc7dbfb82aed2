//! Exact oracles: optimal bin counts by branch-and-bound over configuration counts,
//! the optimal egalitarian connection time `r_max`, and the minimal `k` reaching it.

use std::collections::HashMap;

use num::{BigInt, BigRational, One, Signed, ToPrimitive, Zero};

use crate::configlp::{
    ceil_usize, class_demands, enumerate_configurations_capped, int, realize_solution, round_lp,
    solve_fractional, ConfigurationSystem, DEFAULT_CONFIG_CAP,
};
use crate::error::{Error, Result};
use crate::greedy::FirstFit;
use crate::instance::{Instance, Packing};
use crate::lp::{self, Lp, LpStatus, Q};

#[derive(Clone, Copy, Debug)]
pub struct ExactOptions {
    pub node_budget: usize,
    pub config_cap: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions { node_budget: 20_000, config_cap: DEFAULT_CONFIG_CAP }
    }
}

#[derive(Clone, Debug)]
pub struct ExactResult {
    pub packing: Packing,
    pub bins: usize,
    /// Proven minimal.
    pub optimal: bool,
    /// Bin count equals the volume bound `ceil(k V / S)`.
    pub volume_certified: bool,
    /// `ceil` of the fractional optimum.
    pub lower_bound: usize,
    pub nodes: usize,
}

#[derive(Clone, Debug)]
pub struct IlpResult {
    pub counts: Vec<usize>,
    pub bins: usize,
    pub optimal: bool,
    pub lower_bound: usize,
    pub nodes: usize,
}

/// Configuration counts of a packing whose bins are all configurations of `system`.
pub fn packing_counts(system: &ConfigurationSystem, bins: &[Vec<usize>]) -> Option<Vec<usize>> {
    let mut class_of = vec![usize::MAX; system.n_agents];
    for (i, m) in system.members.iter().enumerate() {
        for &a in m {
            class_of[a] = i;
        }
    }
    let index: HashMap<&[usize], usize> =
        system.columns.iter().enumerate().map(|(j, c)| (c.as_slice(), j)).collect();
    let mut counts = vec![0; system.t()];
    for b in bins {
        if b.is_empty() {
            continue;
        }
        let mut v = vec![0; system.m()];
        for &a in b {
            v[*class_of.get(a)?] += 1;
        }
        counts[*index.get(v.as_slice())?] += 1;
    }
    Some(counts)
}

/// Greedy incumbents: first fit on agent order and on decreasing size order.
fn greedy_incumbents(system: &ConfigurationSystem, k: usize) -> Vec<Vec<Vec<usize>>> {
    let demands = class_demands(system);
    let mut by_id: Vec<usize> = system.members.iter().flatten().copied().collect();
    by_id.sort();
    let mut by_size = by_id.clone();
    by_size.sort_by(|&a, &b| demands[b].cmp(&demands[a]));
    [by_id, by_size]
        .iter()
        .map(|order| {
            let mut ff = FirstFit::new(system.capacity, system.n_agents);
            for _ in 0..k {
                for &a in order {
                    ff.place(a, demands[a]);
                }
            }
            ff.into_bins()
        })
        .collect()
}

struct Node {
    lower: Vec<usize>,
    upper: Vec<Option<usize>>,
}

/// Fractional optimum under per-column bounds. Returns `None` when infeasible.
fn bounded_lp(system: &ConfigurationSystem, rhs: &[usize], node: &Node) -> Option<(Vec<Q>, Q)> {
    let m = system.m();
    let mut b: Vec<Q> = rhs.iter().map(|&v| int(v)).collect();
    let mut base = Q::zero();
    for (j, &l) in node.lower.iter().enumerate() {
        if l > 0 {
            for i in 0..m {
                b[i] -= int(system.columns[j][i] * l);
            }
            base += int(l);
        }
    }
    if b.iter().any(|v| v.is_negative()) {
        return None;
    }
    // free columns: not fixed at their lower bound
    let free: Vec<usize> = (0..system.t()).filter(|&j| node.upper[j] != Some(node.lower[j])).collect();
    let bounded: Vec<(usize, usize)> = free
        .iter()
        .enumerate()
        .filter_map(|(p, &j)| node.upper[j].map(|u| (p, u - node.lower[j])))
        .collect();
    let ncols = free.len() + bounded.len();
    let mut rows: Vec<Vec<Q>> = Vec::with_capacity(m + bounded.len());
    for i in 0..m {
        let mut r = vec![Q::zero(); ncols];
        for (p, &j) in free.iter().enumerate() {
            r[p] = int(system.columns[j][i]);
        }
        rows.push(r);
    }
    let mut rhs_all = b;
    for (s, &(p, u)) in bounded.iter().enumerate() {
        let mut r = vec![Q::zero(); ncols];
        r[p] = Q::one();
        r[free.len() + s] = Q::one();
        rows.push(r);
        rhs_all.push(int(u));
    }
    let mut cost = vec![Q::one(); free.len()];
    cost.extend(vec![Q::zero(); bounded.len()]);
    match lp::solve(&Lp { rows, rhs: rhs_all, cost }) {
        LpStatus::Optimal { x, objective } => {
            let mut full: Vec<Q> = node.lower.iter().map(|&l| int(l)).collect();
            for (p, &j) in free.iter().enumerate() {
                full[j] += &x[p];
            }
            Some((full, objective + base))
        }
        LpStatus::Infeasible => None,
        LpStatus::Unbounded => unreachable!("objective is bounded below by zero"),
    }
}

/// Minimizes `1·x` subject to `A x = rhs`, `x` integral, by depth-first branch-and-bound.
///
/// Branches on the most fractional count (ties: larger configuration, then lower index),
/// exploring the rounded-up child first.
pub fn solve_ilp(
    system: &ConfigurationSystem,
    rhs: &[usize],
    incumbents: &[Vec<usize>],
    node_budget: usize,
) -> Result<IlpResult> {
    let t = system.t();
    let mut best: Option<Vec<usize>> = None;
    let mut best_val = usize::MAX;
    for c in incumbents {
        let v: usize = c.iter().sum();
        if v < best_val {
            best_val = v;
            best = Some(c.clone());
        }
    }
    let root = Node { lower: vec![0; t], upper: vec![None; t] };
    let Some((x0, obj0)) = bounded_lp(system, rhs, &root) else {
        return Err(Error::Compute("configuration LP infeasible".into()));
    };
    let lower_bound = ceil_usize(&obj0);
    if x0.iter().all(|v| v.is_integer()) {
        let counts: Vec<usize> = x0.iter().map(|v| v.to_integer().to_usize().unwrap()).collect();
        let bins = counts.iter().sum();
        return Ok(IlpResult { counts, bins, optimal: true, lower_bound, nodes: 1 });
    }
    let half = Q::new(BigInt::from(1), BigInt::from(2));
    let sizes: Vec<u64> = (0..t).map(|j| system.config_size(j).micros()).collect();

    let mut nodes = 0usize;
    let mut stack: Vec<(Node, Option<(Vec<Q>, Q)>)> = vec![(root, Some((x0, obj0)))];
    let mut exhausted = true;
    while let Some((node, solved)) = stack.pop() {
        if best_val == lower_bound {
            break;
        }
        if nodes >= node_budget {
            exhausted = false;
            break;
        }
        nodes += 1;
        let Some((x, obj)) = solved.or_else(|| bounded_lp(system, rhs, &node)) else { continue };
        if ceil_usize(&obj) >= best_val {
            continue;
        }
        let mut pick: Option<(usize, Q)> = None;
        for j in 0..t {
            if x[j].is_integer() {
                continue;
            }
            let dist = (x[j].fract() - &half).abs();
            let better = match &pick {
                None => true,
                Some((pj, pd)) => dist < *pd || (dist == *pd && sizes[j] > sizes[*pj]),
            };
            if better {
                pick = Some((j, dist));
            }
        }
        let Some((j, _)) = pick else {
            let counts: Vec<usize> = x.iter().map(|v| v.to_integer().to_usize().unwrap()).collect();
            let v = counts.iter().sum();
            if v < best_val {
                best_val = v;
                best = Some(counts);
            }
            continue;
        };
        let fl = x[j].floor().to_integer().to_usize().unwrap();
        let mut down = Node { lower: node.lower.clone(), upper: node.upper.clone() };
        down.upper[j] = Some(fl);
        let mut up = node;
        up.lower[j] = fl + 1;
        // pushed last, explored first
        stack.push((down, None));
        stack.push((up, None));
    }
    let Some(counts) = best else {
        return Err(Error::Budget("no integral solution found within the node budget".into()));
    };
    let optimal = best_val == lower_bound || exhausted;
    Ok(IlpResult { counts, bins: best_val, optimal, lower_bound, nodes })
}

/// Integral optimum for a configuration system with uniform multiplicity `k`.
pub fn solve_system(system: &ConfigurationSystem, k: usize, node_budget: usize) -> Result<IlpResult> {
    let rhs: Vec<usize> = system.counts.iter().map(|&c| c * k).collect();
    let mut seeds: Vec<Vec<usize>> = greedy_incumbents(system, k)
        .iter()
        .filter_map(|bins| packing_counts(system, bins))
        .collect();
    if k > 1 {
        // OPT(D_k) <= k OPT(D_1)
        let one = solve_system(system, 1, node_budget)?;
        seeds.push(one.counts.iter().map(|&c| c * k).collect());
    }
    let sol = solve_fractional(system, k);
    let rounded = round_lp(&sol, system, k);
    if let Some(c) = packing_counts(system, &rounded.packing.bins) {
        seeds.push(c);
    }
    solve_ilp(system, &rhs, &seeds, node_budget)
}

/// Minimum number of bins for `D_k`, with a realized packing.
pub fn exact_kbp(instance: &Instance, k: usize, opts: ExactOptions) -> Result<ExactResult> {
    if k == 0 {
        return Err(Error::Invalid("k must be positive".into()));
    }
    let system = enumerate_configurations_capped(instance, opts.config_cap)?;
    let r = solve_system(&system, k, opts.node_budget)?;
    let packing = realize_solution(&r.counts, &system, k)?;
    Ok(ExactResult {
        bins: packing.num_bins(),
        volume_certified: packing.num_bins() == instance.volume_bound(k),
        optimal: r.optimal,
        lower_bound: r.lower_bound,
        nodes: r.nodes,
        packing,
    })
}

#[derive(Clone, Debug)]
pub struct RmaxResult {
    pub r_max: BigRational,
    /// Configurations (count per size class) with their weights.
    pub support: Vec<(Vec<usize>, BigRational)>,
    pub system: ConfigurationSystem,
}

impl RmaxResult {
    /// Checks that the weighted configurations give every agent exactly `r_max`.
    pub fn reconstructs(&self) -> bool {
        let total: Q = self.support.iter().map(|(_, w)| w.clone()).sum();
        if !total.is_one() || self.support.iter().any(|(_, w)| !w.is_positive()) {
            return false;
        }
        (0..self.system.m()).all(|i| {
            let s: Q = self.support.iter().map(|(c, w)| w * int(c[i])).sum();
            s == &self.r_max * int(self.system.counts[i])
        })
    }
}

/// Optimal egalitarian connection time: `1 / LIN(D)` for the fractional configuration LP.
pub fn rmax(instance: &Instance) -> Result<RmaxResult> {
    rmax_capped(instance, DEFAULT_CONFIG_CAP)
}

pub fn rmax_capped(instance: &Instance, cap: usize) -> Result<RmaxResult> {
    let system = enumerate_configurations_capped(instance, cap)?;
    let sol = solve_fractional(&system, 1);
    let r_max = sol.objective.recip();
    let support = sol
        .x
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_zero())
        .map(|(j, v)| (system.columns[j].clone(), v / &sol.objective))
        .collect();
    Ok(RmaxResult { r_max, support, system })
}

#[derive(Clone, Debug)]
pub struct MinimalK {
    pub k: usize,
    pub bins: usize,
    pub r_max: BigRational,
}

/// Smallest `k <= k_max` with `k / OPT(D_k) = r_max`.
///
/// `OPT(D_k) = k / r_max` needs `k / r_max` integral, so other values of `k` are skipped
/// without solving.
pub fn minimal_k(instance: &Instance, k_max: usize, opts: ExactOptions) -> Result<Option<MinimalK>> {
    let r = rmax_capped(instance, opts.config_cap)?;
    let lin = r.r_max.recip();
    for k in 1..=k_max {
        let target = &lin * int(k);
        if !target.is_integer() {
            continue;
        }
        let res = exact_kbp(instance, k, opts)?;
        if !res.optimal {
            return Err(Error::Budget(format!("k={k} not solved to optimality")));
        }
        if int(res.bins) == target {
            return Ok(Some(MinimalK { k, bins: res.bins, r_max: r.r_max }));
        }
    }
    Ok(None)
}

/// Maximal determinant of an n×n binary matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MaxDet {
    Exact(u64),
    /// Hadamard upper bound, used beyond the tabulated range.
    Bound(f64),
}

const A_N: [u64; 21] = [
    1, 1, 2, 3, 5, 9, 32, 56, 144, 320, 1458, 3645, 9477, 25515, 131072, 327680, 1114112, 3411968,
    19531250, 56640625, 195312500,
];

pub fn a_n(n: i64) -> Result<MaxDet> {
    if n <= 0 {
        return Err(Error::Invalid("n must be positive".into()));
    }
    if n <= 21 {
        return Ok(MaxDet::Exact(A_N[n as usize - 1]));
    }
    let nf = n as f64;
    Ok(MaxDet::Bound((-nf * 2f64.ln() + (nf + 1.0) / 2.0 * (nf + 1.0).ln()).exp()))
}
