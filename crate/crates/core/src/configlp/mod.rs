//! Configuration systems, the configuration LP, rounding and realization.
//!
//! A configuration is a vector of per-size-class counts that fits in one bin.
//! An integral solution of `A x = k n` is turned into bins by draining one queue
//! per size class, which never puts two copies of one agent in the same bin.

mod grouping;
mod schemes;

pub use grouping::{alt_geometric_grouping, linear_grouping, GeometricGrouping, Item};
pub use schemes::{add_small_items, dlvl_pack, kk1_pack, kk2_pack, kk2_pack_traced, Kk2Trace};

use std::collections::VecDeque;

use num::{BigInt, BigRational, Integer, ToPrimitive, Zero};
use serde_json::json;

use crate::error::{Error, Result};
use crate::greedy::FirstFit;
use crate::instance::{Instance, Packing};
use crate::lp::{self, Lp, LpStatus, Q};
use crate::size::Size;

/// Default limit on the number of enumerated configurations.
pub const DEFAULT_CONFIG_CAP: usize = 200_000;

/// Size classes (ascending), their agents and all feasible configurations.
#[derive(Clone, Debug)]
pub struct ConfigurationSystem {
    pub sizes: Vec<Size>,
    pub counts: Vec<usize>,
    /// Agent ids of each class, ascending.
    pub members: Vec<Vec<usize>>,
    /// Columns of `A`; each has one entry per class.
    pub columns: Vec<Vec<usize>>,
    pub capacity: Size,
    /// Size of the agent id space (largest id + 1).
    pub n_agents: usize,
}

impl ConfigurationSystem {
    pub fn m(&self) -> usize {
        self.sizes.len()
    }

    pub fn t(&self) -> usize {
        self.columns.len()
    }

    /// Total size of configuration `j`.
    pub fn config_size(&self, j: usize) -> Size {
        self.columns[j].iter().zip(&self.sizes).map(|(&a, &c)| Size(a as u64 * c.micros())).sum()
    }

    /// Builds the system for arbitrary classes. Classes with equal size are merged.
    pub fn from_classes(classes: Vec<(Size, Vec<usize>)>, capacity: Size, n_agents: usize, cap: usize) -> Result<Self> {
        let mut classes = classes;
        classes.retain(|(_, m)| !m.is_empty());
        classes.sort_by_key(|(s, _)| *s);
        let mut merged: Vec<(Size, Vec<usize>)> = Vec::new();
        for (s, m) in classes {
            match merged.last_mut() {
                Some((ls, lm)) if *ls == s => lm.extend(m),
                _ => merged.push((s, m)),
            }
        }
        for (s, m) in merged.iter_mut() {
            if *s > capacity {
                return Err(Error::Invalid(format!("size {s} exceeds capacity {capacity}")));
            }
            m.sort();
        }
        let sizes: Vec<Size> = merged.iter().map(|(s, _)| *s).collect();
        let counts: Vec<usize> = merged.iter().map(|(_, m)| m.len()).collect();
        let members = merged.into_iter().map(|(_, m)| m).collect();
        let columns = enumerate_columns(&sizes, &counts, capacity, cap)?;
        Ok(ConfigurationSystem { sizes, counts, members, columns, capacity, n_agents })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "capacity": self.capacity.to_string(),
            "sizes": self.sizes.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
            "counts": self.counts,
            "columns": self.columns,
        })
    }
}

pub(crate) fn enumerate_columns(sizes: &[Size], counts: &[usize], capacity: Size, cap: usize) -> Result<Vec<Vec<usize>>> {
    let m = sizes.len();
    let mut out = Vec::new();
    let mut cur = vec![0usize; m];
    fn rec(
        i: usize,
        rem: u64,
        sizes: &[Size],
        counts: &[usize],
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
        cap: usize,
    ) -> Result<()> {
        if i == sizes.len() {
            if cur.iter().any(|&a| a > 0) {
                if out.len() >= cap {
                    return Err(Error::Budget(format!("more than {cap} configurations")));
                }
                out.push(cur.clone());
            }
            return Ok(());
        }
        let c = sizes[i].micros();
        let most = counts[i].min((rem / c) as usize);
        for a in 0..=most {
            cur[i] = a;
            rec(i + 1, rem - a as u64 * c, sizes, counts, cur, out, cap)?;
        }
        cur[i] = 0;
        Ok(())
    }
    rec(0, capacity.micros(), sizes, counts, &mut cur, &mut out, cap)?;
    Ok(out)
}

/// All feasible configurations of an instance, default cap.
pub fn enumerate_configurations(instance: &Instance) -> Result<ConfigurationSystem> {
    enumerate_configurations_capped(instance, DEFAULT_CONFIG_CAP)
}

pub fn enumerate_configurations_capped(instance: &Instance, cap: usize) -> Result<ConfigurationSystem> {
    let mut classes: Vec<(Size, Vec<usize>)> = Vec::new();
    for (s, _) in instance.size_classes() {
        let m = (0..instance.n()).filter(|&a| instance.demands[a] == s).collect();
        classes.push((s, m));
    }
    ConfigurationSystem::from_classes(classes, instance.capacity, instance.n(), cap)
}

/// Solution of the fractional configuration LP.
#[derive(Clone, Debug, PartialEq)]
pub struct LpSolution {
    pub x: Vec<Q>,
    pub objective: Q,
    pub basic: bool,
}

impl LpSolution {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "objective": self.objective.to_string(),
            "x": self.x.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
            "basic": self.basic,
        })
    }
}

pub(crate) fn int(v: usize) -> Q {
    Q::from_integer(BigInt::from(v))
}

/// Solves `min 1·x  s.t.  A x = rhs, x >= 0`.
pub fn solve_with_rhs(system: &ConfigurationSystem, rhs: &[usize]) -> LpSolution {
    let m = system.m();
    let t = system.t();
    let rows: Vec<Vec<Q>> = (0..m).map(|i| (0..t).map(|j| int(system.columns[j][i])).collect()).collect();
    let lp = Lp { rows, rhs: rhs.iter().map(|&b| int(b)).collect(), cost: vec![int(1); t] };
    match lp::solve(&lp) {
        LpStatus::Optimal { x, objective } => {
            let nz = x.iter().filter(|v| !v.is_zero()).count();
            LpSolution { x, objective, basic: nz <= m }
        }
        s => panic!("configuration LP must be feasible and bounded, got {s:?}"),
    }
}

/// Solves the fractional problem `min 1·x  s.t.  A x = k n, x >= 0`.
pub fn solve_fractional(system: &ConfigurationSystem, k: usize) -> LpSolution {
    let rhs: Vec<usize> = system.counts.iter().map(|&c| c * k).collect();
    solve_with_rhs(system, &rhs)
}

/// Per-class queues of agent copies: all first copies, then all second copies, and so on.
pub(crate) struct Queues {
    q: Vec<VecDeque<usize>>,
}

impl Queues {
    pub(crate) fn new(system: &ConfigurationSystem, k: usize) -> Self {
        let q = system
            .members
            .iter()
            .map(|m| (0..k).flat_map(|_| m.iter().copied()).collect())
            .collect();
        Queues { q }
    }

    /// Draws one bin for configuration `col`; empty queues are skipped.
    pub(crate) fn draw(&mut self, col: &[usize]) -> Vec<usize> {
        let mut bin = Vec::new();
        for (i, &a) in col.iter().enumerate() {
            for _ in 0..a {
                match self.q[i].pop_front() {
                    Some(agent) => bin.push(agent),
                    None => break,
                }
            }
        }
        bin
    }

    pub(crate) fn remaining(&self) -> Vec<(usize, usize)> {
        self.q.iter().enumerate().flat_map(|(i, q)| q.iter().map(move |&a| (i, a))).collect()
    }

    pub(crate) fn is_empty(&self) -> bool {
        self.q.iter().all(|q| q.is_empty())
    }
}

/// Turns integral configuration counts into bins. Counts may cover `k n` with room to
/// spare; surplus slots stay empty and empty bins are dropped.
pub fn realize_covering(counts: &[usize], system: &ConfigurationSystem, k: usize) -> Result<Packing> {
    for i in 0..system.m() {
        let got: usize = counts.iter().zip(&system.columns).map(|(&c, col)| c * col[i]).sum();
        if got < k * system.counts[i] {
            return Err(Error::Invalid(format!("class {i} covered {got} times, needs {}", k * system.counts[i])));
        }
    }
    let mut queues = Queues::new(system, k);
    let mut bins = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            let b = queues.draw(&system.columns[j]);
            if !b.is_empty() {
                bins.push(b);
            }
        }
    }
    Ok(Packing::new(k, bins))
}

/// Realizes an integral solution of `A x = k n` exactly.
pub fn realize_solution(counts: &[usize], system: &ConfigurationSystem, k: usize) -> Result<Packing> {
    if counts.len() != system.t() {
        return Err(Error::Invalid("counts length differs from the number of configurations".into()));
    }
    for i in 0..system.m() {
        let got: usize = counts.iter().zip(&system.columns).map(|(&c, col)| c * col[i]).sum();
        if got != k * system.counts[i] {
            return Err(Error::Invalid(format!("class {i} covered {got} times, expected {}", k * system.counts[i])));
        }
    }
    realize_covering(counts, system, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Residual {
    /// One bin per fractional configuration.
    PerConfiguration,
    /// Duplicate-free first fit of the leftover copies.
    FirstFit,
}

/// Outcome of rounding a fractional solution.
#[derive(Clone, Debug)]
pub struct Rounded {
    pub counts: Vec<usize>,
    pub packing: Packing,
    pub floor_bins: usize,
    pub residual_bins: usize,
    pub residual: Residual,
}

pub fn floor_counts(x: &[Q]) -> Vec<usize> {
    x.iter().map(|v| v.floor().to_integer().to_usize().unwrap()).collect()
}

/// Rounds down, realizes the integral part and packs the leftovers with the cheaper of
/// one bin per fractional configuration or first fit.
pub fn round_lp(solution: &LpSolution, system: &ConfigurationSystem, k: usize) -> Rounded {
    let counts = floor_counts(&solution.x);
    let mut queues = Queues::new(system, k);
    let mut bins = Vec::new();
    for (j, &c) in counts.iter().enumerate() {
        for _ in 0..c {
            let b = queues.draw(&system.columns[j]);
            if !b.is_empty() {
                bins.push(b);
            }
        }
    }
    let floor_bins = bins.len();

    let leftovers = queues.remaining();
    let mut per_config: Vec<Vec<usize>> = Vec::new();
    for (j, v) in solution.x.iter().enumerate() {
        if !v.is_integer() {
            let b = queues.draw(&system.columns[j]);
            if !b.is_empty() {
                per_config.push(b);
            }
        }
    }
    debug_assert!(queues.is_empty());

    let demands = class_demands(system);
    let mut ff = FirstFit::new(system.capacity, system.n_agents);
    for (_, a) in &leftovers {
        ff.place(*a, demands[*a]);
    }
    let by_ff = ff.into_bins();

    let (residual, extra) = if per_config.len() <= by_ff.len() {
        (Residual::PerConfiguration, per_config)
    } else {
        (Residual::FirstFit, by_ff)
    };
    let residual_bins = extra.len();
    bins.extend(extra);
    Rounded { counts, packing: Packing::new(k, bins), floor_bins, residual_bins, residual }
}

/// Demand of every agent as seen by the system (its class size); agents outside the system get zero.
pub(crate) fn class_demands(system: &ConfigurationSystem) -> Vec<Size> {
    let mut d = vec![Size::ZERO; system.n_agents];
    for (i, m) in system.members.iter().enumerate() {
        for &a in m {
            d[a] = system.sizes[i];
        }
    }
    d
}

/// `ceil` of a non-negative rational.
pub fn ceil_usize(v: &BigRational) -> usize {
    let (q, r) = v.numer().div_rem(v.denom());
    q.to_usize().unwrap() + usize::from(!r.is_zero())
}
