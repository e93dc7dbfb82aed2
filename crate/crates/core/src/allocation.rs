//! Time allocations over bins and the three utility models.

use num::{ToPrimitive, Zero};

use crate::configlp::int;
use crate::error::{Error, Result};
use crate::instance::{welfare, Instance, Packing, WelfareReport};
use crate::lp::Q;

/// Bins with the fraction of the hour each one is connected.
#[derive(Clone, Debug, PartialEq)]
pub struct TimeAllocation {
    pub bins: Vec<Vec<usize>>,
    pub durations: Vec<Q>,
}

pub fn to_f64(q: &Q) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// Every bin gets `1/q` of the hour.
pub fn uniform_allocation(packing: &Packing) -> Result<TimeAllocation> {
    let q = packing.num_bins();
    if q == 0 {
        return Err(Error::Invalid("empty packing".into()));
    }
    let d = int(1) / int(q);
    Ok(TimeAllocation { bins: packing.bins.clone(), durations: vec![d; q] })
}

impl TimeAllocation {
    /// Connected time of every agent `0..n`.
    pub fn agent_times(&self, n: usize) -> Vec<Q> {
        let uniform = self.durations.windows(2).all(|w| w[0] == w[1]);
        if uniform && !self.durations.is_empty() {
            let mut count = vec![0usize; n];
            for b in &self.bins {
                for &a in b {
                    count[a] += 1;
                }
            }
            return count.into_iter().map(|c| int(c) * &self.durations[0]).collect();
        }
        let mut t = vec![Q::zero(); n];
        for (b, d) in self.bins.iter().zip(&self.durations) {
            for &a in b {
                t[a] += d;
            }
        }
        t
    }
}

/// Total time `agent` is connected.
pub fn utility_time(alloc: &TimeAllocation, agent: usize) -> Q {
    alloc
        .bins
        .iter()
        .zip(&alloc.durations)
        .filter(|(b, _)| b.contains(&agent))
        .fold(Q::zero(), |acc, (_, d)| acc + d)
}

/// Energy delivered to `agent` over the hour: demand times connected time.
pub fn utility_watts(alloc: &TimeAllocation, instance: &Instance, agent: usize) -> f64 {
    instance.demands[agent].as_f64() * to_f64(&utility_time(alloc, agent))
}

/// Comfort of `agent` at `hour` from an hours × agents demand history.
///
/// The mean demand at the same hour of the week over up to four previous weeks, divided by
/// the agent's largest such mean. Without previous weeks the current demand is used.
pub fn comfort(history: &[Vec<f64>], agent: usize, hour: usize) -> Result<f64> {
    if history.is_empty() {
        return Err(Error::Invalid("empty history".into()));
    }
    if hour >= history.len() {
        return Err(Error::Invalid(format!("hour {hour} out of range")));
    }
    let max = (0..history.len()).map(|h| weekly_mean(history, agent, h)).fold(0.0, f64::max);
    Ok(if max > 0.0 { weekly_mean(history, agent, hour) / max } else { 0.0 })
}

const WEEK: usize = 168;

fn weekly_mean(history: &[Vec<f64>], agent: usize, hour: usize) -> f64 {
    let prior: Vec<f64> = (1..=4).filter(|w| w * WEEK <= hour).map(|w| history[hour - w * WEEK][agent]).collect();
    if prior.is_empty() {
        history[hour][agent]
    } else {
        prior.iter().sum::<f64>() / prior.len() as f64
    }
}

/// Comfort values for every hour and agent, hours × agents.
pub fn comfort_table(history: &[Vec<f64>]) -> Vec<Vec<f64>> {
    if history.is_empty() {
        return Vec::new();
    }
    let n = history[0].len();
    let means: Vec<Vec<f64>> =
        (0..history.len()).map(|h| (0..n).map(|a| weekly_mean(history, a, h)).collect()).collect();
    let max: Vec<f64> = (0..n).map(|a| means.iter().map(|r| r[a]).fold(0.0, f64::max)).collect();
    means
        .into_iter()
        .map(|r| r.iter().zip(&max).map(|(v, m)| if *m > 0.0 { v / m } else { 0.0 }).collect())
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HourReport {
    pub time: WelfareReport,
    pub watts: WelfareReport,
    pub comfort: WelfareReport,
}

/// Welfare of one hour under the time, watts and comfort-weighted models.
pub fn hour_report(alloc: &TimeAllocation, instance: &Instance, comfort: &[f64]) -> Result<HourReport> {
    let times: Vec<f64> = alloc.agent_times(instance.n()).iter().map(to_f64).collect();
    let watts: Vec<f64> = times.iter().zip(&instance.demands).map(|(t, d)| t * d.as_f64()).collect();
    let comf: Vec<f64> = times.iter().zip(comfort).map(|(t, c)| t * c).collect();
    Ok(HourReport { time: welfare(&times)?, watts: welfare(&watts)?, comfort: welfare(&comf)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num::BigInt;

    fn q(n: i64, d: i64) -> Q {
        Q::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn uniform_times() {
        let p = Packing::new(2, vec![vec![0, 1], vec![1, 2], vec![2, 0]]);
        let a = uniform_allocation(&p).unwrap();
        for i in 0..3 {
            assert_eq!(utility_time(&a, i), q(2, 3));
        }
        assert_eq!(utility_time(&a, 7), q(0, 1));
        assert!(uniform_allocation(&Packing::new(1, vec![])).is_err());
    }

    #[test]
    fn watts_example() {
        let inst = Instance::from_units(&[3, 5], 5).unwrap();
        let a = TimeAllocation { bins: vec![vec![0], vec![1]], durations: vec![q(5, 8), q(3, 8)] };
        assert!((utility_watts(&a, &inst, 0) - 15.0 / 8.0).abs() < 1e-12);
        assert!((utility_watts(&a, &inst, 1) - 15.0 / 8.0).abs() < 1e-12);
        let r = hour_report(&a, &inst, &[1.0, 1.0]).unwrap();
        assert!((r.watts.utilitarian - 3.75).abs() < 1e-9);
        assert!((r.watts.egalitarian - 1.875).abs() < 1e-9);
        assert!(r.watts.max_utility_difference.abs() < 1e-9);
    }

    #[test]
    fn comfort_constant_and_spike() {
        let h: Vec<Vec<f64>> = (0..3 * WEEK).map(|_| vec![2.0]).collect();
        assert!((comfort(&h, 0, 400).unwrap() - 1.0).abs() < 1e-12);
        let h: Vec<Vec<f64>> = (0..3 * WEEK).map(|t| vec![if t % WEEK == 5 { 1.0 } else { 0.0 }]).collect();
        assert!((comfort(&h, 0, 2 * WEEK + 5).unwrap() - 1.0).abs() < 1e-12);
        assert!(comfort(&h, 0, 2 * WEEK + 6).unwrap().abs() < 1e-12);
        let t = comfort_table(&h);
        assert_eq!(t[2 * WEEK + 5][0], comfort(&h, 0, 2 * WEEK + 5).unwrap());
        assert!(comfort(&[], 0, 0).is_err());
    }
}
