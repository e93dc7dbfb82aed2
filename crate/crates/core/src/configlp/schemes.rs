//! Asymptotic approximation schemes built on the configuration LP.

use std::collections::BTreeMap;

use super::grouping::{alt_geometric_grouping, linear_grouping, Item};
use super::{enumerate_columns, floor_counts, realize_covering, round_lp, solve_fractional, solve_with_rhs};
use super::{ConfigurationSystem, DEFAULT_CONFIG_CAP};
use crate::error::{Error, Result};
use crate::exact::solve_system;
use crate::greedy::{interleave, FirstFit};
use crate::instance::{Instance, Packing};
use crate::size::Size;

fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(Error::Invalid(format!("epsilon {eps} outside (0, 1/2]")));
    }
    Ok(())
}

fn is_small(d: Size, threshold: f64, capacity: Size) -> bool {
    d.micros() as f64 <= threshold * capacity.micros() as f64 * (1.0 + 1e-12)
}

fn group_size(n: usize, eps: f64) -> usize {
    ((n as f64 * eps * eps) - 1e-9).ceil().max(1.0) as usize
}

/// First fit of `k` copies of every small agent into the existing bins, opening new ones when needed.
pub fn add_small_items(instance: &Instance, packing: Packing, small: &[usize], k: usize) -> Packing {
    if small.is_empty() {
        return packing;
    }
    let mut ff = FirstFit::with_bins(instance.capacity, &instance.demands, packing.bins);
    for _ in 0..k {
        for &a in small {
            ff.place(a, instance.demands[a]);
        }
    }
    Packing::new(k, ff.into_bins())
}

fn split(instance: &Instance, threshold: f64) -> (Vec<usize>, Vec<usize>) {
    (0..instance.n()).partition(|&a| !is_small(instance.demands[a], threshold, instance.capacity))
}

fn classes_of(items: &[Item]) -> Vec<(Size, Vec<usize>)> {
    let mut m: BTreeMap<Size, Vec<usize>> = BTreeMap::new();
    for &(a, s) in items {
        m.entry(s).or_default().push(a);
    }
    m.into_iter().collect()
}

/// Linear-grouping scheme with an exact integral solve on the rounded large items.
pub fn dlvl_pack(instance: &Instance, k: usize, eps: f64, node_budget: usize) -> Result<Packing> {
    check_eps(eps)?;
    let (mut large, small) = split(instance, eps);
    let mut packing = Packing::new(k, Vec::new());
    if !large.is_empty() {
        large.sort_by_key(|&a| instance.demands[a]);
        let g = group_size(large.len(), eps);
        let mut rounded: Vec<Item> = Vec::new();
        for chunk in large.chunks(g) {
            let max = chunk.iter().map(|&a| instance.demands[a]).max().unwrap();
            rounded.extend(chunk.iter().map(|&a| (a, max)));
        }
        let system =
            ConfigurationSystem::from_classes(classes_of(&rounded), instance.capacity, instance.n(), DEFAULT_CONFIG_CAP)?;
        let r = solve_system(&system, k, node_budget)?;
        packing = realize_covering(&r.counts, &system, k)?;
    }
    Ok(add_small_items(instance, packing, &small, k))
}

/// Linear grouping, one bin per copy of the top group, rounded fractional solution for the rest.
pub fn kk1_pack(instance: &Instance, k: usize, eps: f64) -> Result<Packing> {
    check_eps(eps)?;
    let threshold = eps.max(1.0 / instance.n() as f64);
    let (mut large, small) = split(instance, threshold);
    let mut bins: Vec<Vec<usize>> = Vec::new();
    if !large.is_empty() {
        large.sort_by(|&a, &b| instance.demands[b].cmp(&instance.demands[a]));
        let items: Vec<Item> = large.iter().map(|&a| (a, instance.demands[a])).collect();
        let (top, rest) = linear_grouping(&items, group_size(large.len(), eps))?;
        for _ in 0..k {
            bins.extend(top.iter().map(|&(a, _)| vec![a]));
        }
        if !rest.is_empty() {
            let system =
                ConfigurationSystem::from_classes(classes_of(&rest), instance.capacity, instance.n(), DEFAULT_CONFIG_CAP)?;
            let sol = solve_fractional(&system, k);
            bins.extend(round_lp(&sol, &system, k).packing.bins);
        }
    }
    Ok(add_small_items(instance, Packing::new(k, bins), &small, k))
}

/// Packing plus the large-item volume (in copies) at the start of every grouping round.
#[derive(Clone, Debug)]
pub struct Kk2Trace {
    pub packing: Packing,
    pub volumes: Vec<Size>,
}

pub fn kk2_pack(instance: &Instance, k: usize, eps: Option<f64>, g: usize) -> Result<Packing> {
    Ok(kk2_pack_traced(instance, k, eps, g)?.packing)
}

/// Geometric-grouping scheme. Works on agent copies: each round groups the remaining
/// copies, keeps the integral part of the fractional solution, packs the removed group
/// items by first fit, and repeats while the remaining volume is large.
pub fn kk2_pack_traced(instance: &Instance, k: usize, eps: Option<f64>, g: usize) -> Result<Kk2Trace> {
    if g < 2 {
        return Err(Error::Invalid("group factor must exceed 1".into()));
    }
    let s = instance.capacity;
    let eps = eps.unwrap_or_else(|| (s.as_f64() / instance.volume().as_f64()).min(0.5));
    check_eps(eps)?;
    let (large, small) = split(instance, eps);
    let d = &instance.demands;

    // remaining copies per large agent
    let mut left: Vec<usize> = vec![0; instance.n()];
    for &a in &large {
        left[a] = k;
    }
    let limit = 1.0 + g as f64 / (g as f64 - 1.0) * (1.0 / eps).ln();
    let mut bins: Vec<Vec<usize>> = Vec::new();
    let mut volumes = Vec::new();
    loop {
        let vol: Size = large.iter().map(|&a| Size(d[a].micros() * left[a] as u64)).sum();
        if vol == Size::ZERO || vol.as_f64() / (k as f64 * s.as_f64()) <= limit {
            break;
        }
        volumes.push(vol);
        let mut copies: Vec<Item> = Vec::new();
        for &a in &large {
            copies.extend(std::iter::repeat((a, d[a])).take(left[a]));
        }
        copies.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
        let gg = alt_geometric_grouping(&copies, g * k, s)?;

        if !gg.u_double.is_empty() {
            // class -> agent -> copies
            let mut classes: BTreeMap<Size, BTreeMap<usize, usize>> = BTreeMap::new();
            for &(a, sz) in &gg.u_double {
                *classes.entry(sz).or_default().entry(a).or_default() += 1;
            }
            let sizes: Vec<Size> = classes.keys().copied().collect();
            let counts: Vec<usize> = classes.values().map(|m| m.len()).collect();
            let rhs: Vec<usize> = classes.values().map(|m| m.values().sum()).collect();
            let members: Vec<Vec<usize>> = classes.values().map(|m| m.keys().copied().collect()).collect();
            let columns = enumerate_columns(&sizes, &counts, s, DEFAULT_CONFIG_CAP)?;
            let system = ConfigurationSystem { sizes, counts, members, columns, capacity: s, n_agents: instance.n() };
            let sol = solve_with_rhs(&system, &rhs);
            let mut pool: Vec<BTreeMap<usize, usize>> = classes.into_values().collect();
            for (j, c) in floor_counts(&sol.x).into_iter().enumerate() {
                for _ in 0..c {
                    let mut bin = Vec::new();
                    for (i, &want) in system.columns[j].iter().enumerate() {
                        let mut avail: Vec<(usize, usize)> =
                            pool[i].iter().filter(|(_, &c)| c > 0).map(|(&a, &c)| (a, c)).collect();
                        avail.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
                        for &(a, _) in avail.iter().take(want) {
                            *pool[i].get_mut(&a).unwrap() -= 1;
                            left[a] -= 1;
                            bin.push(a);
                        }
                    }
                    if !bin.is_empty() {
                        bins.push(bin);
                    }
                }
            }
        }
        let mut ff = FirstFit::new(s, instance.n());
        for &(a, _) in &gg.u_prime {
            ff.place(a, d[a]);
            left[a] -= 1;
        }
        bins.extend(ff.into_bins());
    }

    // tail: first fit over the remaining copies, round robin in decreasing size order
    let mut order = large.clone();
    order.sort_by(|&a, &b| d[b].cmp(&d[a]));
    let mut ff = FirstFit::new(s, instance.n());
    for a in interleave(&order, &left) {
        ff.place(a, d[a]);
    }
    bins.extend(ff.into_bins());
    let packing = add_small_items(instance, Packing::new(k, bins), &small, k);
    Ok(Kk2Trace { packing, volumes })
}
