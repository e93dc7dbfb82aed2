//! Seeded generators: instances with a known optimum and synthetic household demand series.
//!
//! All randomness comes from `ChaCha8Rng` seeded with a 64-bit seed; independent streams
//! (one per run or per instance) are selected with `set_stream`.

use std::io::{Read, Write};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::size::Size;

/// Smallest demand kept after perturbation, in kW.
pub const DEMAND_FLOOR: f64 = 1e-3;

pub fn rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Items summing exactly to `capacity`: draw uniformly from `(1, S)` in micro-units until
/// the next draw would overflow, then close with the remainder.
pub fn generate_items(capacity: Size, rng: &mut impl Rng) -> Vec<Size> {
    generate_items_on_grid(capacity, Size(1), rng)
}

/// Like [`generate_items`] but draws are multiples of `step` (`capacity` must be one too).
pub fn generate_items_on_grid(capacity: Size, step: Size, rng: &mut impl Rng) -> Vec<Size> {
    let units = capacity.micros() / step.micros();
    let mut out = Vec::new();
    let mut sum = 0u64;
    loop {
        let r = if units > 2 { rng.gen_range(2..units) } else { units };
        if sum + r >= units {
            out.push(Size((units - sum) * step.micros()));
            return out;
        }
        out.push(Size(r * step.micros()));
        sum += r;
    }
}

/// Instance made of `opt` batches that each fill one bin exactly, shuffled.
pub fn generate_instance(capacity: Size, opt: usize, rng: &mut impl Rng) -> Instance {
    generate_instance_on_grid(capacity, Size(1), opt, rng)
}

pub fn generate_instance_on_grid(capacity: Size, step: Size, opt: usize, rng: &mut impl Rng) -> Instance {
    let mut d: Vec<Size> = (0..opt).flat_map(|_| generate_items_on_grid(capacity, step, rng)).collect();
    d.shuffle(rng);
    Instance::new(d, capacity).expect("generated items fit the capacity")
}

/// Writes instances as JSON lines.
pub fn write_instances_jsonl(instances: &[Instance], mut w: impl Write) -> Result<()> {
    for i in instances {
        writeln!(w, "{}", i.to_json())?;
    }
    Ok(())
}

/// Hourly demand (hours × agents, kW) and the supply for every day.
#[derive(Clone, Debug, PartialEq)]
pub struct DemandSeries {
    pub demand: Vec<Vec<f64>>,
    pub supply: Vec<f64>,
}

impl DemandSeries {
    pub fn hours(&self) -> usize {
        self.demand.len()
    }

    pub fn agents(&self) -> usize {
        self.demand.first().map_or(0, |r| r.len())
    }

    pub fn supply_at(&self, hour: usize) -> f64 {
        self.supply[hour / 24]
    }

    /// Supply of each day set to that day's mean aggregate demand.
    pub fn with_daily_mean_supply(demand: Vec<Vec<f64>>) -> Self {
        let supply = demand
            .chunks(24)
            .map(|day| day.iter().map(|r| r.iter().sum::<f64>()).sum::<f64>() / day.len() as f64)
            .map(quantize)
            .collect();
        DemandSeries { demand, supply }
    }

    pub fn write_csv(&self, w: impl Write) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        let mut header = vec!["hour".to_string()];
        header.extend((0..self.agents()).map(|a| format!("agent_{a}")));
        header.push("supply".into());
        wr.write_record(&header)?;
        for (h, row) in self.demand.iter().enumerate() {
            let mut rec = vec![h.to_string()];
            rec.extend(row.iter().map(|v| format!("{v:.6}")));
            rec.push(format!("{:.6}", self.supply_at(h)));
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }

    pub fn read_csv(r: impl Read) -> Result<Self> {
        let mut rd = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(r);
        let header = rd.headers()?.clone();
        let n = header.len();
        if n < 3 || &header[0] != "hour" || &header[n - 1] != "supply" {
            return Err(Error::Parse("series header must be hour,agent_0,...,supply".into()));
        }
        let mut demand = Vec::new();
        let mut hourly_supply = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let vals: Vec<f64> = rec
                .iter()
                .skip(1)
                .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad number '{s}'"))))
                .collect::<Result<_>>()?;
            hourly_supply.push(vals[n - 2]);
            demand.push(vals[..n - 2].to_vec());
        }
        if demand.is_empty() {
            return Err(Error::Parse("empty series".into()));
        }
        let supply = hourly_supply.chunks(24).map(|c| c[0]).collect();
        Ok(DemandSeries { demand, supply })
    }
}

/// Shape of the synthetic demand profile.
#[derive(Clone, Copy, Debug)]
pub struct Profile {
    /// Median base demand per household, kW.
    pub base_median: f64,
    /// Log-scale spread of base demands across households.
    pub base_spread: f64,
    /// Relative amplitude of the evening peak.
    pub diurnal: f64,
    /// Relative weekend increase.
    pub weekend: f64,
    /// Log-scale hourly noise.
    pub noise: f64,
}

impl Default for Profile {
    fn default() -> Self {
        Profile { base_median: 0.6, base_spread: 0.5, diurnal: 0.6, weekend: 0.15, noise: 0.15 }
    }
}

fn quantize(x: f64) -> f64 {
    (x * 1e6).round() / 1e6
}

/// Synthetic household demand with an evening peak and weekend uplift.
pub fn generate_timeseries(n_agents: usize, hours: usize, rng: &mut impl Rng, profile: Profile) -> Result<DemandSeries> {
    if hours == 0 || hours % 24 != 0 {
        return Err(Error::Invalid("hours must be a positive multiple of 24".into()));
    }
    if n_agents == 0 {
        return Err(Error::Invalid("need at least one agent".into()));
    }
    let base = LogNormal::new(profile.base_median.ln(), profile.base_spread).map_err(|e| Error::Invalid(e.to_string()))?;
    let noise = LogNormal::new(0.0, profile.noise).map_err(|e| Error::Invalid(e.to_string()))?;
    let agents: Vec<(f64, f64)> = (0..n_agents).map(|_| (base.sample(rng), rng.gen_range(-2.0..2.0))).collect();
    let mut demand = Vec::with_capacity(hours);
    for h in 0..hours {
        let hod = (h % 24) as f64;
        let weekend = if (h / 24) % 7 >= 5 { 1.0 + profile.weekend } else { 1.0 };
        let row = agents
            .iter()
            .map(|&(b, shift)| {
                let phase = 2.0 * std::f64::consts::PI * (hod - 19.0 - shift) / 24.0;
                let shape = 1.0 + profile.diurnal * phase.cos();
                quantize((b * shape * weekend * noise.sample(rng)).max(DEMAND_FLOOR))
            })
            .collect();
        demand.push(row);
    }
    Ok(DemandSeries::with_daily_mean_supply(demand))
}

/// Redraws every hourly demand from a normal around the recorded value; supply is kept.
pub fn perturb_demands(series: &DemandSeries, sigma: f64, rng: &mut impl Rng) -> Result<DemandSeries> {
    if !(sigma >= 0.0) {
        return Err(Error::Invalid("sigma must be non-negative".into()));
    }
    if sigma == 0.0 {
        return Ok(series.clone());
    }
    let demand = series
        .demand
        .iter()
        .map(|row| {
            row.iter()
                .map(|&d| {
                    let x = Normal::new(d, sigma).unwrap().sample(rng);
                    quantize(x.max(DEMAND_FLOOR))
                })
                .collect()
        })
        .collect();
    Ok(DemandSeries { demand, supply: series.supply.clone() })
}
