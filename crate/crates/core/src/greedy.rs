//! First Fit, First Fit Decreasing and Next Fit for k-times packing.

use crate::instance::{Instance, Packing};
use crate::size::Size;

/// Duplicate-free first fit over a stream of agent copies.
///
/// Each copy goes to the lowest-index bin with room that holds no copy of the same
/// agent. A max-segment-tree over remaining capacities finds candidate bins; the
/// result is identical to a linear scan.
pub struct FirstFit {
    cap: u64,
    leaves: usize,
    tree: Vec<u64>,
    bins: Vec<Vec<usize>>,
    agent_bins: Vec<Vec<u32>>,
}

impl FirstFit {
    pub fn new(capacity: Size, n_agents: usize) -> Self {
        FirstFit {
            cap: capacity.micros(),
            leaves: 16,
            tree: vec![0; 32],
            bins: Vec::new(),
            agent_bins: vec![Vec::new(); n_agents],
        }
    }

    /// Starts from existing bins (with loads computed from `demands`).
    pub fn with_bins(capacity: Size, demands: &[Size], bins: Vec<Vec<usize>>) -> Self {
        let mut ff = FirstFit::new(capacity, demands.len());
        for bin in bins {
            let load: u64 = bin.iter().map(|&a| demands[a].micros()).sum();
            let j = ff.open(ff.cap.saturating_sub(load));
            for &a in &bin {
                ff.note(a, j);
            }
            ff.bins[j] = bin;
        }
        ff
    }

    fn open(&mut self, rem: u64) -> usize {
        let j = self.bins.len();
        if j == self.leaves {
            let old = self.leaves;
            self.leaves *= 2;
            let mut t = vec![0; 2 * self.leaves];
            t[self.leaves..self.leaves + old].copy_from_slice(&self.tree[old..2 * old]);
            for i in (1..self.leaves).rev() {
                t[i] = t[2 * i].max(t[2 * i + 1]);
            }
            self.tree = t;
        }
        self.bins.push(Vec::new());
        self.set(j, rem);
        j
    }

    fn set(&mut self, j: usize, rem: u64) {
        let mut i = j + self.leaves;
        self.tree[i] = rem;
        while i > 1 {
            i /= 2;
            self.tree[i] = self.tree[2 * i].max(self.tree[2 * i + 1]);
        }
    }

    fn find(&self, node: usize, l: usize, r: usize, lo: usize, need: u64) -> Option<usize> {
        if r <= lo || self.tree[node] < need {
            return None;
        }
        if r - l == 1 {
            return Some(l);
        }
        let m = (l + r) / 2;
        self.find(2 * node, l, m, lo, need).or_else(|| self.find(2 * node + 1, m, r, lo, need))
    }

    fn note(&mut self, agent: usize, j: usize) {
        let v = &mut self.agent_bins[agent];
        let pos = v.binary_search(&(j as u32)).unwrap_or_else(|p| p);
        v.insert(pos, j as u32);
    }

    fn holds(&self, agent: usize, j: usize) -> bool {
        self.agent_bins[agent].binary_search(&(j as u32)).is_ok()
    }

    /// Places one copy of `agent` with size `d`; returns the bin index.
    pub fn place(&mut self, agent: usize, d: Size) -> usize {
        let need = d.micros();
        let mut lo = 0;
        let j = loop {
            match self.find(1, 0, self.leaves, lo, need) {
                Some(j) if self.holds(agent, j) => lo = j + 1,
                Some(j) => break j,
                None => break self.open(self.cap),
            }
        };
        let rem = self.tree[j + self.leaves] - need;
        self.set(j, rem);
        self.bins[j].push(agent);
        self.note(agent, j);
        j
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn into_bins(self) -> Vec<Vec<usize>> {
        self.bins
    }
}

/// First fit over an explicit stream of agent ids.
pub fn first_fit_stream(demands: &[Size], capacity: Size, stream: impl IntoIterator<Item = usize>) -> Vec<Vec<usize>> {
    let mut ff = FirstFit::new(capacity, demands.len());
    for a in stream {
        ff.place(a, demands[a]);
    }
    ff.into_bins()
}

/// Round-robin copy stream: one copy of every agent (in `order`) that still has copies left, repeated.
pub fn interleave(order: &[usize], copies: &[usize]) -> Vec<usize> {
    let rounds = order.iter().map(|&a| copies[a]).max().unwrap_or(0);
    let mut out = Vec::with_capacity(order.iter().map(|&a| copies[a]).sum());
    for r in 0..rounds {
        out.extend(order.iter().copied().filter(|&a| copies[a] > r));
    }
    out
}

/// Agent ids sorted by non-increasing demand, ties by id.
pub fn descending_order(demands: &[Size]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&a, &b| demands[b].cmp(&demands[a]));
    order
}

/// Agent ids sorted by non-decreasing demand, ties by id.
pub fn ascending_order(demands: &[Size]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..demands.len()).collect();
    order.sort_by(|&a, &b| demands[a].cmp(&demands[b]));
    order
}

/// First Fit on `D` repeated `k` times.
pub fn ffk(instance: &Instance, k: usize) -> Packing {
    let n = instance.n();
    let stream = (0..k).flat_map(|_| 0..n);
    Packing::new(k, first_fit_stream(&instance.demands, instance.capacity, stream))
}

/// First Fit Decreasing: stable descending sort, then `k` consecutive copies of the sorted list.
pub fn ffdk(instance: &Instance, k: usize) -> Packing {
    let order = descending_order(&instance.demands);
    let stream = (0..k).flat_map(|_| order.iter().copied());
    Packing::new(k, first_fit_stream(&instance.demands, instance.capacity, stream))
}

/// Next Fit: a single open bin over `D` repeated `k` times.
pub fn nfk(instance: &Instance, k: usize) -> Packing {
    let n = instance.n();
    if instance.volume() <= instance.capacity {
        return Packing::new(k, vec![(0..n).collect(); k]);
    }
    let mut bins: Vec<Vec<usize>> = vec![Vec::new()];
    let mut load = Size::ZERO;
    for _ in 0..k {
        for a in 0..n {
            let d = instance.demands[a];
            let cur = bins.last().unwrap();
            if load + d > instance.capacity || cur.contains(&a) {
                bins.push(Vec::new());
                load = Size::ZERO;
            }
            bins.last_mut().unwrap().push(a);
            load += d;
        }
    }
    Packing::new(k, bins)
}
