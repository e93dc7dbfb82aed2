//! Instances, packings and validity checking.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::size::Size;

/// A multiset of agent demands and a bin capacity. Agent ids are indices into `demands`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    pub capacity: Size,
    pub demands: Vec<Size>,
}

impl Instance {
    pub fn new(demands: Vec<Size>, capacity: Size) -> Result<Self> {
        let inst = Instance { capacity, demands };
        inst.check()?;
        Ok(inst)
    }

    /// Builds an instance from whole-unit integers.
    pub fn from_units(demands: &[u64], capacity: u64) -> Result<Self> {
        Self::new(demands.iter().map(|&d| Size::from_units(d)).collect(), Size::from_units(capacity))
    }

    /// Builds an instance from decimal strings.
    pub fn parse(demands: &[&str], capacity: &str) -> Result<Self> {
        let d = demands.iter().map(|s| s.parse()).collect::<Result<Vec<Size>>>()?;
        Self::new(d, capacity.parse()?)
    }

    pub fn from_f64(demands: &[f64], capacity: f64) -> Result<Self> {
        let d = demands.iter().map(|&x| Size::from_f64(x)).collect::<Result<Vec<_>>>()?;
        Self::new(d, Size::from_f64(capacity)?)
    }

    fn check(&self) -> Result<()> {
        if self.demands.is_empty() {
            return Err(Error::Invalid("instance has no agents".into()));
        }
        if self.capacity == Size::ZERO {
            return Err(Error::Invalid("capacity must be positive".into()));
        }
        for (i, &d) in self.demands.iter().enumerate() {
            if d == Size::ZERO {
                return Err(Error::Invalid(format!("agent {i} has zero demand")));
            }
            if d > self.capacity {
                return Err(Error::Invalid(format!(
                    "agent {i} demand {d} exceeds capacity {}",
                    self.capacity
                )));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.demands.len()
    }

    pub fn volume(&self) -> Size {
        self.demands.iter().sum()
    }

    pub fn max_demand(&self) -> Size {
        *self.demands.iter().max().unwrap()
    }

    pub fn min_demand(&self) -> Size {
        *self.demands.iter().min().unwrap()
    }

    /// Distinct sizes in ascending order with their multiplicities.
    pub fn size_classes(&self) -> Vec<(Size, usize)> {
        let mut v = self.demands.clone();
        v.sort();
        let mut out: Vec<(Size, usize)> = Vec::new();
        for d in v {
            match out.last_mut() {
                Some((s, c)) if *s == d => *c += 1,
                _ => out.push((d, 1)),
            }
        }
        out
    }

    /// Volume lower bound `ceil(k * V(D) / S)`.
    pub fn volume_bound(&self, k: usize) -> usize {
        let v = self.volume().micros() as u128 * k as u128;
        let s = self.capacity.micros() as u128;
        v.div_ceil(s) as usize
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let inst: Instance = serde_json::from_str(s)?;
        inst.check()?;
        Ok(inst)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// A k-times packing: every agent should appear in exactly `k` distinct bins.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Packing {
    pub k: usize,
    pub bins: Vec<Vec<usize>>,
}

impl Packing {
    pub fn new(k: usize, bins: Vec<Vec<usize>>) -> Self {
        Packing { k, bins }
    }

    pub fn num_bins(&self) -> usize {
        self.bins.len()
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).unwrap()
    }

    /// Number of bins each agent appears in.
    pub fn multiplicities(&self, n: usize) -> Vec<usize> {
        let mut m = vec![0; n];
        for b in &self.bins {
            for &a in b {
                if a < n {
                    m[a] += 1;
                }
            }
        }
        m
    }
}

/// First violated packing constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    UnknownAgent { bin: usize, agent: usize },
    DuplicateInBin { bin: usize, agent: usize },
    CapacityOverflow { bin: usize, load: Size, capacity: Size },
    WrongMultiplicity { agent: usize, count: usize, expected: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnknownAgent { bin, agent } => write!(f, "unknown agent {agent} in bin {bin}"),
            Violation::DuplicateInBin { bin, agent } => write!(f, "duplicate agent {agent} in bin {bin}"),
            Violation::CapacityOverflow { bin, load, capacity } => {
                write!(f, "bin {bin} load {load} exceeds capacity {capacity}")
            }
            Violation::WrongMultiplicity { agent, count, expected } => {
                write!(f, "agent {agent} appears in {count} bins, expected {expected}")
            }
        }
    }
}

pub fn bin_load(instance: &Instance, bin: &[usize]) -> Size {
    bin.iter().map(|&a| instance.demands[a]).sum()
}

/// Checks a packing. Bins are scanned in order (unknown id, duplicate, overflow),
/// multiplicities are checked afterwards.
pub fn validate_packing(instance: &Instance, packing: &Packing) -> std::result::Result<(), Violation> {
    let expected = vec![packing.k; instance.n()];
    validate_bins(instance, instance.capacity, &packing.bins, &expected)
}

/// Like [`validate_packing`] with a per-agent multiplicity and an explicit capacity.
pub fn validate_bins(
    instance: &Instance,
    capacity: Size,
    bins: &[Vec<usize>],
    expected: &[usize],
) -> std::result::Result<(), Violation> {
    let n = instance.n();
    let mut seen = vec![usize::MAX; n];
    let mut count = vec![0usize; n];
    for (j, bin) in bins.iter().enumerate() {
        let mut load = Size::ZERO;
        for &a in bin {
            if a >= n {
                return Err(Violation::UnknownAgent { bin: j, agent: a });
            }
            if seen[a] == j {
                return Err(Violation::DuplicateInBin { bin: j, agent: a });
            }
            seen[a] = j;
            count[a] += 1;
            load += instance.demands[a];
        }
        if load > capacity {
            return Err(Violation::CapacityOverflow { bin: j, load, capacity });
        }
    }
    for a in 0..n {
        if count[a] != expected[a] {
            return Err(Violation::WrongMultiplicity { agent: a, count: count[a], expected: expected[a] });
        }
    }
    Ok(())
}

/// Summary statistics of a utility vector.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WelfareReport {
    pub utilitarian: f64,
    pub egalitarian: f64,
    pub max_utility_difference: f64,
}

pub fn welfare(utilities: &[f64]) -> Result<WelfareReport> {
    if utilities.is_empty() {
        return Err(Error::Invalid("welfare of an empty utility vector".into()));
    }
    let sum: f64 = utilities.iter().sum();
    let min = utilities.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = utilities.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(WelfareReport { utilitarian: sum, egalitarian: min, max_utility_difference: max - min })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_examples() {
        let inst = Instance::from_units(&[2, 1, 1], 3).unwrap();
        let ok = Packing::new(2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]);
        assert_eq!(validate_packing(&inst, &ok), Ok(()));
        let bad = Packing::new(2, vec![vec![0, 1], vec![1, 2, 2], vec![0]]);
        assert_eq!(validate_packing(&inst, &bad), Err(Violation::DuplicateInBin { bin: 1, agent: 2 }));
        let single = Instance::from_units(&[5], 5).unwrap();
        assert!(validate_packing(&single, &Packing::new(1, vec![vec![0]])).is_ok());
    }

    #[test]
    fn overflow_and_multiplicity() {
        let inst = Instance::from_units(&[2, 2], 3).unwrap();
        let p = Packing::new(1, vec![vec![0, 1]]);
        assert!(matches!(validate_packing(&inst, &p), Err(Violation::CapacityOverflow { bin: 0, .. })));
        let p = Packing::new(1, vec![vec![0]]);
        assert!(matches!(validate_packing(&inst, &p), Err(Violation::WrongMultiplicity { agent: 1, .. })));
    }

    #[test]
    fn loads() {
        let inst = Instance::from_units(&[10, 20, 11], 31).unwrap();
        assert_eq!(bin_load(&inst, &[0, 1]), Size::from_units(30));
        assert_eq!(bin_load(&inst, &[]), Size::ZERO);
    }

    #[test]
    fn welfare_examples() {
        let w = welfare(&[1.0, 2.2, 2.2]).unwrap();
        assert!((w.utilitarian - 5.4).abs() < 1e-9);
        assert!((w.egalitarian - 1.0).abs() < 1e-9);
        assert!((w.max_utility_difference - 1.2).abs() < 1e-9);
        assert!(welfare(&[]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let inst = Instance::from_json(r#"{"capacity":"12.5","demands":["3.0","4.25"]}"#).unwrap();
        assert_eq!(inst.demands[1], Size(4_250_000));
        assert_eq!(Instance::from_json(&inst.to_json()).unwrap(), inst);
        assert!(Instance::from_json(r#"{"capacity":"1","demands":["2"]}"#).is_err());
    }
}
