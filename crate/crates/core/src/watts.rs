//! Egalitarian power allocation heuristics.
//!
//! Each heuristic connects a set `G` of small agents all the time and shares the
//! remaining capacity `S - V(G)` among the others by packing them into bins that are
//! connected in turn.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::Zero;
use serde_json::json;

use crate::allocation::{to_f64, TimeAllocation};
use crate::configlp::int;
use crate::error::{Error, Result};
use crate::greedy::{ascending_order, descending_order, interleave, FirstFit};
use crate::instance::{validate_bins, Instance, Violation};
use crate::lp::Q;
use crate::size::Size;

const TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Ffk,
    Ffdk,
}

#[derive(Clone, Debug)]
pub struct WattsSolution {
    pub g: usize,
    pub always_on: Vec<usize>,
    /// Bins over the agents outside `always_on`.
    pub bins: Vec<Vec<usize>>,
    pub durations: Vec<Q>,
    pub watts: Vec<f64>,
}

impl WattsSolution {
    fn build(instance: &Instance, g: usize, always_on: Vec<usize>, bins: Vec<Vec<usize>>, durations: Vec<Q>) -> Self {
        let n = instance.n();
        let mut time = vec![Q::zero(); n];
        for (b, d) in bins.iter().zip(&durations) {
            for &a in b {
                time[a] += d;
            }
        }
        let mut watts: Vec<f64> = (0..n).map(|a| instance.demands[a].as_f64() * to_f64(&time[a])).collect();
        for &a in &always_on {
            watts[a] = instance.demands[a].as_f64();
        }
        WattsSolution { g, always_on, bins, durations, watts }
    }

    pub fn key(&self) -> LeximinKey {
        LeximinKey::new(&self.watts)
    }

    /// Smallest watts value among agents that are not always connected.
    pub fn egalitarian(&self) -> f64 {
        let on: std::collections::HashSet<usize> = self.always_on.iter().copied().collect();
        let rest = (0..self.watts.len()).filter(|a| !on.contains(a)).map(|a| self.watts[a]);
        let min = rest.fold(f64::INFINITY, f64::min);
        if min.is_finite() {
            min
        } else {
            self.watts.iter().cloned().fold(f64::INFINITY, f64::min)
        }
    }

    /// Bins with the always-on agents added to each.
    pub fn completed(&self) -> TimeAllocation {
        let bins = self
            .bins
            .iter()
            .map(|b| {
                let mut v = b.clone();
                v.extend(&self.always_on);
                v
            })
            .collect();
        TimeAllocation { bins, durations: self.durations.clone() }
    }

    /// Checks capacity, duplicates and per-agent multiplicities of the completed bins.
    pub fn validate(&self, instance: &Instance) -> std::result::Result<(), Violation> {
        let alloc = self.completed();
        let expected = alloc.bins.iter().flatten().fold(vec![0; instance.n()], |mut c, &a| {
            c[a] += 1;
            c
        });
        validate_bins(instance, instance.capacity, &alloc.bins, &expected)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "g": self.g,
            "always_on": self.always_on,
            "bins": self.bins,
            "durations": self.durations.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
            "watts": self.watts,
        })
    }
}

/// Watts vector sorted ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct LeximinKey(pub Vec<f64>);

impl LeximinKey {
    pub fn new(watts: &[f64]) -> Self {
        let mut v = watts.to_vec();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        LeximinKey(v)
    }
}

/// `Greater` means `a` is leximin-preferred.
pub fn leximin_compare(a: &LeximinKey, b: &LeximinKey) -> Result<Ordering> {
    if a.0.len() != b.0.len() {
        return Err(Error::Invalid("leximin keys of different lengths".into()));
    }
    for (x, y) in a.0.iter().zip(&b.0) {
        if (x - y).abs() > TOL {
            return Ok(if x < y { Ordering::Less } else { Ordering::Greater });
        }
    }
    Ok(Ordering::Equal)
}

fn prefers(a: &WattsSolution, b: &WattsSolution) -> bool {
    match leximin_compare(&a.key(), &b.key()).unwrap() {
        Ordering::Greater => true,
        Ordering::Equal => a.g < b.g,
        Ordering::Less => false,
    }
}

fn need_overload(instance: &Instance) -> Result<()> {
    if instance.volume() <= instance.capacity {
        return Err(Error::Infeasible("total demand fits the supply; connect everyone".into()));
    }
    Ok(())
}

/// Longest ascending prefix of demands whose sum is at most `S - d_max`.
/// Returns the last demand in that prefix (if any) and its length.
pub fn cutoff(instance: &Instance) -> Result<(Option<Size>, usize)> {
    need_overload(instance)?;
    Ok(prefix_cutoff(&instance.demands, instance.capacity))
}

fn prefix_cutoff(sizes: &[Size], capacity: Size) -> (Option<Size>, usize) {
    let dmax = *sizes.iter().max().unwrap();
    let room = capacity - dmax;
    let mut sum = Size::ZERO;
    let mut last = None;
    let mut g = 0;
    for a in ascending_order(sizes) {
        if sum + sizes[a] > room {
            break;
        }
        sum += sizes[a];
        last = Some(sizes[a]);
        g += 1;
    }
    (last, g)
}

/// Copy counts `round(k d_max / d)` (halves round up) and the round-robin stream.
#[derive(Clone, Debug)]
pub struct DerivedInstance {
    pub copies: Vec<(usize, usize)>,
    pub stream: Vec<usize>,
}

pub fn derive_copies(remaining: &[(usize, Size)], k: usize, d_max: Size) -> DerivedInstance {
    let copies: Vec<(usize, usize)> = remaining
        .iter()
        .map(|&(a, d)| {
            let num = 2 * k as u128 * d_max.micros() as u128 + d.micros() as u128;
            (a, (num / (2 * d.micros() as u128)) as usize)
        })
        .collect();
    let ids = copies.iter().map(|&(a, _)| a).max().map_or(0, |m| m + 1);
    let mut count = vec![0; ids];
    for &(a, c) in &copies {
        count[a] = c;
    }
    let order: Vec<usize> = copies.iter().filter(|&&(_, c)| c > 0).map(|&(a, _)| a).collect();
    let stream = interleave(&order, &count);
    DerivedInstance { copies, stream }
}

/// Narrows `[g_begin, g_end]` from both ends while the gap exceeds 3, then scans the rest.
/// Every evaluated `g` competes for the result.
pub fn ternary_search(mut evaluate: impl FnMut(usize) -> WattsSolution, g_begin: usize, g_end: usize) -> WattsSolution {
    let mut seen: BTreeMap<usize, WattsSolution> = BTreeMap::new();
    let mut best: Option<WattsSolution> = None;
    let mut visit = |g: usize, seen: &mut BTreeMap<usize, WattsSolution>, best: &mut Option<WattsSolution>| {
        if seen.contains_key(&g) {
            return;
        }
        let s = evaluate(g);
        if best.as_ref().map_or(true, |b| prefers(&s, b)) {
            *best = Some(s.clone());
        }
        seen.insert(g, s);
    };
    let (mut gb, mut ge) = (g_begin, g_end.max(g_begin));
    while ge - gb > 3 {
        visit(gb, &mut seen, &mut best);
        visit(ge, &mut seen, &mut best);
        gb = ((2 * gb + ge) as f64 / 3.0).round() as usize;
        ge = ((gb + 2 * ge) as f64 / 3.0).round() as usize;
    }
    for g in gb..=ge {
        visit(g, &mut seen, &mut best);
    }
    best.unwrap()
}

fn pack(demands: &[Size], capacity: Size, order: &[usize], copies: &[usize]) -> Vec<Vec<usize>> {
    let mut ff = FirstFit::new(capacity, demands.len());
    for a in interleave(order, copies) {
        ff.place(a, demands[a]);
    }
    ff.into_bins()
}

fn backend_order(demands: &[Size], agents: &[usize], backend: Backend) -> Vec<usize> {
    let mut order = agents.to_vec();
    if backend == Backend::Ffdk {
        order.sort_by(|&a, &b| demands[b].cmp(&demands[a]).then(a.cmp(&b)));
    }
    order
}

fn uniform(q: usize) -> Vec<Q> {
    vec![int(1) / int(q.max(1)); q]
}

fn split_g(instance: &Instance, g: usize) -> (Vec<usize>, Vec<usize>) {
    let asc = ascending_order(&instance.demands);
    let on: Vec<usize> = asc[..g].to_vec();
    let mut rest: Vec<usize> = asc[g..].to_vec();
    rest.sort();
    (on, rest)
}

fn ha1_at(instance: &Instance, k: usize, backend: Backend, g: usize) -> WattsSolution {
    let (on, rest) = split_g(instance, g);
    let d = &instance.demands;
    let cap = instance.capacity - on.iter().map(|&a| d[a]).sum();
    let dmax = rest.iter().map(|&a| d[a]).max().unwrap();
    let items: Vec<(usize, Size)> = rest.iter().map(|&a| (a, d[a])).collect();
    let derived = derive_copies(&items, k, dmax);
    let mut copies = vec![0; instance.n()];
    for &(a, c) in &derived.copies {
        copies[a] = c;
    }
    let order = backend_order(d, &rest, backend);
    let bins = pack(d, cap, &order, &copies);
    let q = bins.len();
    WattsSolution::build(instance, g, on, bins, uniform(q))
}

/// HA1: agents get copy counts inversely proportional to their demand.
pub fn ha1(instance: &Instance, k: usize, backend: Backend) -> Result<WattsSolution> {
    let (_, gmax) = cutoff(instance)?;
    Ok(ternary_search(|g| ha1_at(instance, k, backend, g), 0, gmax))
}

/// HA1 for a fixed number of always-on agents.
pub fn ha1_fixed(instance: &Instance, k: usize, backend: Backend, g: usize) -> Result<WattsSolution> {
    let (_, gmax) = cutoff(instance)?;
    if g > gmax {
        return Err(Error::Invalid(format!("g={g} exceeds the cutoff {gmax}")));
    }
    Ok(ha1_at(instance, k, backend, g))
}

/// Dyadic buckets: `d` is in bucket `i` when `d 2^i <= d_max < d 2^(i+1)`.
/// Returns the non-empty buckets in increasing `i`, members ascending by id.
pub fn geometric_grouping(items: &[(usize, Size)]) -> Vec<(u32, Vec<usize>)> {
    let dmax = items.iter().map(|x| x.1.micros() as u128).max().unwrap_or(0);
    let mut buckets: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
    for &(a, d) in items {
        let d = d.micros() as u128;
        let mut i = 0u32;
        while d << (i + 1) <= dmax {
            i += 1;
        }
        buckets.entry(i).or_default().push(a);
    }
    buckets
        .into_iter()
        .map(|(i, mut v)| {
            v.sort();
            (i, v)
        })
        .collect()
}

/// HA2 with options: per-group copy counts `k_i` and whether always-on groups are tried.
pub fn ha2_with(instance: &Instance, k: usize, group_k: Option<&[usize]>, always_on: bool) -> Result<WattsSolution> {
    need_overload(instance)?;
    let d = &instance.demands;
    let items: Vec<(usize, Size)> = (0..instance.n()).map(|a| (a, d[a])).collect();
    let groups = geometric_grouping(&items);
    let dmax = instance.max_demand();
    let room = instance.capacity - dmax;

    // largest number of trailing (smallest) groups that fit next to d_max
    let mut s_max = 0;
    if always_on {
        let mut sum = Size::ZERO;
        for (_, m) in groups.iter().rev() {
            let v: Size = m.iter().map(|&a| d[a]).sum();
            if sum + v > room {
                break;
            }
            sum += v;
            s_max += 1;
        }
    }
    let mut best: Option<WattsSolution> = None;
    for s in 0..=s_max {
        let keep = groups.len() - s;
        let on: Vec<usize> = groups[keep..].iter().flat_map(|(_, m)| m.iter().copied()).collect();
        let cap = instance.capacity - on.iter().map(|&a| d[a]).sum();
        let ks: Vec<usize> = (0..keep).map(|i| group_k.and_then(|v| v.get(i).copied()).unwrap_or(k)).collect();
        let mut packed: Vec<Vec<Vec<usize>>> = Vec::new();
        for (gi, (_, m)) in groups[..keep].iter().enumerate() {
            let mut copies = vec![0; instance.n()];
            for &a in m {
                copies[a] = ks[gi];
            }
            packed.push(pack(d, cap, m, &copies));
        }
        // T_i = T_0 2^i k_0 / k_i with sum_i T_i B_i = 1
        let weights: Vec<Q> = (0..keep)
            .map(|gi| {
                let i = groups[gi].0;
                Q::from_integer(num::BigInt::from(1u8) << i) * int(ks[0]) / int(ks[gi])
            })
            .collect();
        let total: Q = weights.iter().zip(&packed).map(|(w, b)| w * int(b.len())).sum();
        let mut bins = Vec::new();
        let mut durations = Vec::new();
        for (w, b) in weights.iter().zip(packed) {
            let t = w / &total;
            durations.extend(std::iter::repeat(t).take(b.len()));
            bins.extend(b);
        }
        let g = on.len();
        let sol = WattsSolution::build(instance, g, on, bins, durations);
        if best.as_ref().map_or(true, |b| prefers(&sol, b)) {
            best = Some(sol);
        }
    }
    Ok(best.unwrap())
}

/// HA2: dyadic groups, each packed separately, with group-dependent bin durations.
pub fn ha2(instance: &Instance, k: usize) -> Result<WattsSolution> {
    ha2_with(instance, k, None, true)
}

/// How the capacity left for packing is computed once some groups are always on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum GroupVolume {
    Actual,
    Pseudo,
}

struct SuperAgents {
    members: Vec<Vec<usize>>,
    actual: Vec<Size>,
    pseudo: Vec<Size>,
}

fn super_agents(instance: &Instance, u: f64) -> SuperAgents {
    let d = &instance.demands;
    let target = u * instance.max_demand().micros() as f64;
    let mut members: Vec<Vec<usize>> = vec![Vec::new()];
    let mut sum = 0u64;
    for a in descending_order(d) {
        if members.last().unwrap().len() > 0 && sum as f64 >= target * (1.0 - 1e-12) {
            members.push(Vec::new());
            sum = 0;
        }
        members.last_mut().unwrap().push(a);
        sum += d[a].micros();
    }
    let actual: Vec<Size> = members.iter().map(|m| m.iter().map(|&a| d[a]).sum()).collect();
    let pseudo = actual
        .iter()
        .map(|&v| if (v.micros() as f64) < target * (1.0 - 1e-12) { Size(target.round() as u64) } else { v })
        .collect();
    SuperAgents { members, actual, pseudo }
}

/// Groups formed by HA3 (members of each group, descending demand).
pub fn ha3_groups(instance: &Instance, u: f64) -> Vec<Vec<usize>> {
    super_agents(instance, u).members
}

fn ha3_at(instance: &Instance, sa: &SuperAgents, k: usize, backend: Backend, g: usize, vol: GroupVolume) -> WattsSolution {
    let m = sa.members.len();
    let asc = ascending_order(&sa.pseudo);
    let on_groups: Vec<usize> = asc[..g].to_vec();
    let mut rest: Vec<usize> = asc[g..].to_vec();
    rest.sort();
    let taken: Size = on_groups
        .iter()
        .map(|&i| if vol == GroupVolume::Actual { sa.actual[i] } else { sa.pseudo[i] })
        .sum();
    let cap = instance.capacity - taken;
    let vmax = rest.iter().map(|&i| sa.pseudo[i]).max().unwrap();
    let items: Vec<(usize, Size)> = rest.iter().map(|&i| (i, sa.pseudo[i])).collect();
    let derived = derive_copies(&items, k, vmax);
    let mut copies = vec![0; m];
    for &(i, c) in &derived.copies {
        copies[i] = c;
    }
    let order = backend_order(&sa.pseudo, &rest, backend);
    let group_bins = pack(&sa.pseudo, cap, &order, &copies);
    let bins: Vec<Vec<usize>> = group_bins
        .iter()
        .map(|b| b.iter().flat_map(|&i| sa.members[i].iter().copied()).collect())
        .collect();
    let on: Vec<usize> = on_groups.iter().flat_map(|&i| sa.members[i].iter().copied()).collect();
    let q = bins.len();
    WattsSolution::build(instance, g, on, bins, uniform(q))
}

/// HA3: agents are merged into groups of total demand at least `u d_max`, then handled as in HA1.
pub fn ha3(instance: &Instance, k: usize, u: f64, backend: Backend) -> Result<WattsSolution> {
    ha3_with(instance, k, u, backend, GroupVolume::Actual, None)
}

/// HA3 with an explicit capacity rule and optionally a fixed number of always-on groups.
pub fn ha3_with(
    instance: &Instance,
    k: usize,
    u: f64,
    backend: Backend,
    vol: GroupVolume,
    fixed_g: Option<usize>,
) -> Result<WattsSolution> {
    need_overload(instance)?;
    if !(u > 0.0) {
        return Err(Error::Invalid("u must be positive".into()));
    }
    let sa = super_agents(instance, u);
    let (_, gmax) = prefix_cutoff(&sa.pseudo, instance.capacity);
    if let Some(g) = fixed_g {
        if g > gmax {
            return Err(Error::Invalid(format!("g={g} exceeds the cutoff {gmax}")));
        }
        return Ok(ha3_at(instance, &sa, k, backend, g, vol));
    }
    Ok(ternary_search(|g| ha3_at(instance, &sa, k, backend, g, vol), 0, gmax))
}

fn ha4_at(instance: &Instance, k: usize, backend: Backend, g: usize) -> WattsSolution {
    let (on, rest) = split_g(instance, g);
    let d = &instance.demands;
    let cap = instance.capacity - on.iter().map(|&a| d[a]).sum();
    let mut copies = vec![0; instance.n()];
    for &a in &rest {
        copies[a] = k;
    }
    let order = backend_order(d, &rest, backend);
    let bins = pack(d, cap, &order, &copies);
    let q = bins.len();
    WattsSolution::build(instance, g, on, bins, uniform(q))
}

/// HA4: ordinary k-times packing of the agents outside `G`.
pub fn ha4(instance: &Instance, k: usize, backend: Backend) -> Result<WattsSolution> {
    let (_, gmax) = cutoff(instance)?;
    Ok(ternary_search(|g| ha4_at(instance, k, backend, g), 0, gmax))
}

pub fn ha4_fixed(instance: &Instance, k: usize, backend: Backend, g: usize) -> Result<WattsSolution> {
    let (_, gmax) = cutoff(instance)?;
    if g > gmax {
        return Err(Error::Invalid(format!("g={g} exceeds the cutoff {gmax}")));
    }
    Ok(ha4_at(instance, k, backend, g))
}
