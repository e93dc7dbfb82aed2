//! Batch experiments: worst-case ratios on known-optimum instances, hourly load-shedding
//! simulation, and watts heuristics over a demand series.

use rayon::prelude::*;

use crate::allocation::{comfort_table, to_f64, uniform_allocation};
use crate::configlp::{dlvl_pack, kk1_pack, kk2_pack};
use crate::datagen::{generate_instance_on_grid, perturb_demands, rng, DemandSeries};
use crate::error::{Error, Result};
use crate::exact::{exact_kbp, ExactOptions};
use crate::greedy::{ffdk, ffk, nfk};
use crate::instance::{validate_packing, welfare, Instance, Packing, WelfareReport};
use crate::size::Size;
use crate::watts::{ha1, ha2, ha3, ha4, Backend, WattsSolution};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Algorithm {
    Ffk,
    Ffdk,
    Nfk,
    Dlvl,
    Kk1,
    Kk2,
    Exact,
}

impl std::str::FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ffk" => Algorithm::Ffk,
            "ffdk" => Algorithm::Ffdk,
            "nfk" => Algorithm::Nfk,
            "dlvl" => Algorithm::Dlvl,
            "kk1" => Algorithm::Kk1,
            "kk2" => Algorithm::Kk2,
            "exact" => Algorithm::Exact,
            _ => return Err(Error::Parse(format!("unknown algorithm '{s}'"))),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RunParams {
    pub eps: f64,
    pub g: usize,
    pub exact: ExactOptions,
}

impl Default for RunParams {
    fn default() -> Self {
        RunParams { eps: 0.3, g: 2, exact: ExactOptions::default() }
    }
}

/// Runs one packing algorithm.
pub fn run_algorithm(alg: Algorithm, instance: &Instance, k: usize, p: RunParams) -> Result<Packing> {
    Ok(match alg {
        Algorithm::Ffk => ffk(instance, k),
        Algorithm::Ffdk => ffdk(instance, k),
        Algorithm::Nfk => nfk(instance, k),
        Algorithm::Dlvl => dlvl_pack(instance, k, p.eps, p.exact.node_budget)?,
        Algorithm::Kk1 => kk1_pack(instance, k, p.eps)?,
        Algorithm::Kk2 => kk2_pack(instance, k, None, p.g)?,
        Algorithm::Exact => exact_kbp(instance, k, p.exact)?.packing,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct RatioRow {
    pub k: usize,
    pub opt: usize,
    pub instances: usize,
    pub max_bins: usize,
    pub max_ratio: f64,
    /// `1.375 k OPT`
    pub bound_1375: f64,
    /// `(11 k OPT + 6) / 9`
    pub bound_11_9: f64,
}

/// Worst case of `alg` over generated instances with known optimum, per `(k, OPT)` cell.
pub fn ratio_table(
    alg: Algorithm,
    k_list: &[usize],
    opt_list: &[usize],
    per_cell: usize,
    seed: u64,
    capacity: Size,
    step: Size,
    p: RunParams,
) -> Result<Vec<RatioRow>> {
    let cells: Vec<(usize, usize)> = k_list.iter().flat_map(|&k| opt_list.iter().map(move |&o| (k, o))).collect();
    cells
        .par_iter()
        .enumerate()
        .map(|(ci, &(k, opt))| {
            let mut max_bins = 0;
            for i in 0..per_cell {
                let mut r = rng(seed, (ci * per_cell + i) as u64);
                let inst = generate_instance_on_grid(capacity, step, opt, &mut r);
                let packing = run_algorithm(alg, &inst, k, p)?;
                if let Err(v) = validate_packing(&inst, &packing) {
                    return Err(Error::Compute(format!("invalid packing: {v}")));
                }
                max_bins = max_bins.max(packing.num_bins());
            }
            let ko = (k * opt) as f64;
            Ok(RatioRow {
                k,
                opt,
                instances: per_cell,
                max_bins,
                max_ratio: max_bins as f64 / ko,
                bound_1375: 1.375 * ko,
                bound_11_9: (11.0 * ko + 6.0) / 9.0,
            })
        })
        .collect()
}

/// Utility totals of one simulation run under the three models.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunMetrics {
    pub time: WelfareReport,
    pub watts: WelfareReport,
    pub comfort: WelfareReport,
}

#[derive(Clone, Copy, Debug)]
pub struct SimParams {
    pub k: usize,
    pub backend: Backend,
    pub sigma: f64,
    pub runs: usize,
    pub seed: u64,
    /// Weeks at the start excluded from the comfort model.
    pub warmup_weeks: usize,
}

impl Default for SimParams {
    fn default() -> Self {
        SimParams { k: 1, backend: Backend::Ffk, sigma: 0.05, runs: 9, seed: 0, warmup_weeks: 4 }
    }
}

/// Builds the packing instance of one hour. Agents whose demand exceeds the supply are left out.
fn hour_instance(demand: &[f64], supply: f64) -> Result<(Instance, Vec<usize>)> {
    let cap = Size::from_f64(supply)?;
    let mut ids = Vec::new();
    let mut d = Vec::new();
    for (a, &x) in demand.iter().enumerate() {
        let s = Size::from_f64(x)?.max(Size(1));
        if s <= cap {
            ids.push(a);
            d.push(s);
        }
    }
    if d.is_empty() {
        return Err(Error::Compute("no agent fits the supply".into()));
    }
    Ok((Instance::new(d, cap)?, ids))
}

/// Connected time of every agent in one hour (fraction of the hour).
pub fn hour_times(demand: &[f64], supply: f64, k: usize, backend: Backend) -> Result<Vec<f64>> {
    let n = demand.len();
    if demand.iter().sum::<f64>() <= supply {
        return Ok(vec![1.0; n]);
    }
    let (inst, ids) = hour_instance(demand, supply)?;
    let packing = match backend {
        Backend::Ffk => ffk(&inst, k),
        Backend::Ffdk => ffdk(&inst, k),
    };
    let alloc = uniform_allocation(&packing)?;
    let mut t = vec![0.0; n];
    for (i, v) in alloc.agent_times(inst.n()).iter().enumerate() {
        t[ids[i]] = to_f64(v);
    }
    Ok(t)
}

/// One run: perturb demands, pack every hour, accumulate per-agent totals.
pub fn simulate_run(series: &DemandSeries, comfort: &[Vec<f64>], p: &SimParams, run: usize) -> Result<RunMetrics> {
    let actual = perturb_demands(series, p.sigma, &mut rng(p.seed, run as u64))?;
    let times: Vec<Vec<f64>> = (0..actual.hours())
        .into_par_iter()
        .map(|h| hour_times(&actual.demand[h], actual.supply_at(h), p.k, p.backend))
        .collect::<Result<_>>()?;
    let n = series.agents();
    let (mut ut, mut uw, mut uc) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
    let skip = p.warmup_weeks * 168;
    for (h, t) in times.iter().enumerate() {
        for a in 0..n {
            ut[a] += t[a];
            uw[a] += t[a] * actual.demand[h][a];
            if h >= skip {
                uc[a] += t[a] * comfort[h][a];
            }
        }
    }
    Ok(RunMetrics { time: welfare(&ut)?, watts: welfare(&uw)?, comfort: welfare(&uc)? })
}

#[derive(Clone, Debug)]
pub struct SimResult {
    pub runs: Vec<RunMetrics>,
}

fn mean_sd(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    let var = if v.len() > 1 { v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0) } else { 0.0 };
    (m, var.sqrt())
}

impl SimResult {
    /// Mean and standard deviation of a metric over runs.
    pub fn stat(&self, f: impl Fn(&RunMetrics) -> f64) -> (f64, f64) {
        mean_sd(&self.runs.iter().map(f).collect::<Vec<_>>())
    }
}

pub fn simulate(series: &DemandSeries, p: &SimParams) -> Result<SimResult> {
    if p.runs == 0 {
        return Err(Error::Invalid("runs must be positive".into()));
    }
    let comfort = comfort_table(&series.demand);
    let runs = (0..p.runs).map(|r| simulate_run(series, &comfort, p, r)).collect::<Result<_>>()?;
    Ok(SimResult { runs })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heuristic {
    Ha1,
    Ha2,
    Ha3,
    Ha4,
}

impl Heuristic {
    pub fn from_index(i: u8) -> Result<Self> {
        Ok(match i {
            1 => Heuristic::Ha1,
            2 => Heuristic::Ha2,
            3 => Heuristic::Ha3,
            4 => Heuristic::Ha4,
            _ => return Err(Error::Parse(format!("unknown heuristic {i}"))),
        })
    }
}

pub fn run_heuristic(h: Heuristic, instance: &Instance, k: usize, backend: Backend, u: f64) -> Result<WattsSolution> {
    match h {
        Heuristic::Ha1 => ha1(instance, k, backend),
        Heuristic::Ha2 => ha2(instance, k),
        Heuristic::Ha3 => ha3(instance, k, u, backend),
        Heuristic::Ha4 => ha4(instance, k, backend),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WattsSummary {
    pub utilitarian: f64,
    pub egalitarian: f64,
    pub max_difference: f64,
    pub shedding_hours: usize,
}

/// Per-hour egalitarian value and spread among agents that are not always on.
fn spread(s: &WattsSolution) -> f64 {
    let on: std::collections::HashSet<usize> = s.always_on.iter().copied().collect();
    let rest: Vec<f64> = (0..s.watts.len()).filter(|a| !on.contains(a)).map(|a| s.watts[a]).collect();
    let max = rest.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = rest.iter().cloned().fold(f64::INFINITY, f64::min);
    if rest.is_empty() {
        0.0
    } else {
        max - min
    }
}

/// Runs a heuristic in every hour where demand exceeds supply. Hours without shedding add
/// their full demand to the utilitarian total only; egalitarian and spread are summed over
/// shedding hours.
pub fn watts_over_series(series: &DemandSeries, h: Heuristic, k: usize, backend: Backend, u: f64) -> Result<WattsSummary> {
    let per_hour: Vec<Option<(f64, f64, f64)>> = (0..series.hours())
        .into_par_iter()
        .map(|t| {
            let demand = &series.demand[t];
            let supply = series.supply_at(t);
            if demand.iter().sum::<f64>() <= supply {
                return Ok(None);
            }
            let (inst, _) = hour_instance(demand, supply)?;
            let s = run_heuristic(h, &inst, k, backend, u)?;
            Ok(Some((s.watts.iter().sum(), s.egalitarian(), spread(&s))))
        })
        .collect::<Result<_>>()?;
    let mut out = WattsSummary { utilitarian: 0.0, egalitarian: 0.0, max_difference: 0.0, shedding_hours: 0 };
    for (t, r) in per_hour.iter().enumerate() {
        match r {
            None => out.utilitarian += series.demand[t].iter().sum::<f64>(),
            Some((u, e, d)) => {
                out.utilitarian += u;
                out.egalitarian += e;
                out.max_difference += d;
                out.shedding_hours += 1;
            }
        }
    }
    Ok(out)
}

/// Summary of a single instance treated as one shedding hour.
pub fn watts_single(instance: &Instance, h: Heuristic, k: usize, backend: Backend, u: f64) -> Result<(WattsSolution, WattsSummary)> {
    let s = run_heuristic(h, instance, k, backend, u)?;
    let sum = WattsSummary {
        utilitarian: s.watts.iter().sum(),
        egalitarian: s.egalitarian(),
        max_difference: spread(&s),
        shedding_hours: 1,
    };
    Ok((s, sum))
}
