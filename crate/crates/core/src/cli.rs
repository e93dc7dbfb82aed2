//! Command-line front end. Exit codes: 2 parse error, 3 invalid flag combination or
//! infeasible request, 4 solver budget exceeded, 5 io or compute failure.

use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::datagen::{generate_instance_on_grid, generate_timeseries, rng, write_instances_jsonl, DemandSeries, Profile};
use crate::error::{Error, Result};
use crate::exact::{exact_kbp, minimal_k, rmax, ExactOptions};
use crate::experiments::{
    ratio_table, run_algorithm, simulate, watts_over_series, watts_single, Algorithm, Heuristic, RunParams, SimParams,
};
use crate::instance::{validate_packing, Instance};
use crate::size::Size;
use crate::watts::Backend;

#[derive(Parser, Debug)]
#[command(name = "kbp", version, about = "k-times bin packing and load-shedding experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Pack an instance file and write the packing as JSON.
    Pack(PackArgs),
    /// Worst-case bins on generated instances with a known optimum.
    Ratio(RatioArgs),
    /// Hourly load-shedding simulation over a demand series.
    Simulate(SimulateArgs),
    /// Watts heuristics over a demand series or a single instance.
    Watts(WattsArgs),
    /// Optimal egalitarian connection time and the smallest k reaching it.
    Rmax(RmaxArgs),
    /// Generate instances or a demand series.
    Generate(GenerateArgs),
}

#[derive(Args, Debug)]
pub struct PackArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value = "ffk")]
    pub alg: String,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long)]
    pub g: Option<usize>,
    #[arg(long, default_value_t = ExactOptions::default().node_budget)]
    pub node_budget: usize,
    /// Output packing file (stdout summary only when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write the configuration system and fractional solution as JSON.
    #[arg(long)]
    pub dump_lp: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RatioArgs {
    #[arg(long, default_value = "ffk")]
    pub alg: String,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5")]
    pub k_list: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6,7,8,9")]
    pub opt_list: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub instances_per_cell: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value = "100")]
    pub capacity: String,
    /// Granularity of generated item sizes.
    #[arg(long, default_value = "1")]
    pub step: String,
    #[arg(long, default_value_t = 0.3)]
    pub eps: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    pub series: PathBuf,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value = "ffk")]
    pub alg: String,
    #[arg(long, default_value_t = 0.05)]
    pub sigma: f64,
    #[arg(long, default_value_t = 9)]
    pub runs: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Leading weeks excluded from the comfort model.
    #[arg(long, default_value_t = 4)]
    pub warmup_weeks: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct WattsArgs {
    /// Demand series CSV.
    pub series: Option<PathBuf>,
    /// Single instance JSON instead of a series.
    #[arg(long)]
    pub instance: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub ha: u8,
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value = "ffk")]
    pub alg: String,
    #[arg(long, default_value_t = 0.25)]
    pub u: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RmaxArgs {
    pub instance: PathBuf,
    #[arg(long, default_value_t = 10)]
    pub k_max: usize,
    #[arg(long, default_value_t = ExactOptions::default().node_budget)]
    pub node_budget: usize,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[command(subcommand)]
    pub what: GenerateWhat,
}

#[derive(Subcommand, Debug)]
pub enum GenerateWhat {
    /// Known-optimum instances as JSON lines.
    Instances {
        #[arg(long, default_value_t = 10)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        opt: usize,
        #[arg(long, default_value = "100")]
        capacity: String,
        #[arg(long, default_value = "1")]
        step: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthetic hourly demand series as CSV.
    Series {
        #[arg(long, default_value_t = 367)]
        agents: usize,
        #[arg(long, default_value_t = 13)]
        weeks: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::Invalid(_) | Error::Infeasible(_) => 3,
        Error::Budget(_) => 4,
        Error::Io(_) | Error::Compute(_) => 5,
    }
}

fn output(path: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(File::create(p)?),
        None => Box::new(io::stdout()),
    })
}

fn backend(alg: &str) -> Result<Backend> {
    match alg {
        "ffk" => Ok(Backend::Ffk),
        "ffdk" => Ok(Backend::Ffdk),
        _ => Err(Error::Invalid(format!("backend must be ffk or ffdk, got '{alg}'"))),
    }
}

fn load_instance(p: &PathBuf) -> Result<Instance> {
    let text = std::fs::read_to_string(p)?;
    Instance::from_json(&text).map_err(|e| match e {
        Error::Invalid(m) => Error::Parse(m),
        e => e,
    })
}

fn meta(flags: &str) -> String {
    format!("# kbp {} {flags}", env!("CARGO_PKG_VERSION"))
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Pack(a) => cmd_pack(a),
        Command::Ratio(a) => cmd_ratio(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Watts(a) => cmd_watts(a),
        Command::Rmax(a) => cmd_rmax(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

pub fn cmd_pack(a: PackArgs) -> Result<()> {
    let alg: Algorithm = a.alg.parse()?;
    if a.k == 0 {
        return Err(Error::Invalid("--k must be positive".into()));
    }
    if a.eps.is_some() && !matches!(alg, Algorithm::Dlvl | Algorithm::Kk1 | Algorithm::Kk2) {
        return Err(Error::Invalid("--eps only applies to dlvl, kk1 and kk2".into()));
    }
    if a.g.is_some() && alg != Algorithm::Kk2 {
        return Err(Error::Invalid("--g only applies to kk2".into()));
    }
    let inst = load_instance(&a.instance)?;
    if let Some(p) = &a.dump_lp {
        let sys = crate::configlp::enumerate_configurations(&inst)?;
        let sol = crate::configlp::solve_fractional(&sys, a.k);
        let v = serde_json::json!({ "system": sys.to_json(), "solution": sol.to_json() });
        std::fs::write(p, serde_json::to_string_pretty(&v).unwrap())?;
    }
    let opts = ExactOptions { node_budget: a.node_budget, ..ExactOptions::default() };
    let mut status = String::new();
    let mut budget_hit = false;
    let packing = if alg == Algorithm::Exact {
        let r = exact_kbp(&inst, a.k, opts)?;
        status = if r.volume_certified {
            " optimal=volume-certified".into()
        } else if r.optimal {
            " optimal=proven".into()
        } else {
            budget_hit = true;
            format!(" optimal=unknown lower_bound={}", r.lower_bound)
        };
        r.packing
    } else {
        let p = RunParams { eps: a.eps.unwrap_or(0.3), g: a.g.unwrap_or(2), exact: opts };
        run_algorithm(alg, &inst, a.k, p)?
    };
    if let Some(p) = &a.out {
        std::fs::write(p, packing.to_json())?;
    }
    let verdict = match validate_packing(&inst, &packing) {
        Ok(()) => "ok".to_string(),
        Err(v) => v.to_string(),
    };
    println!(
        "bins={}{status} volume_bound={} valid={verdict}",
        packing.num_bins(),
        inst.volume_bound(a.k)
    );
    if budget_hit {
        return Err(Error::Budget("node budget exhausted before optimality was proven".into()));
    }
    Ok(())
}

pub fn cmd_ratio(a: RatioArgs) -> Result<()> {
    let alg: Algorithm = a.alg.parse()?;
    let capacity: Size = a.capacity.parse()?;
    let step: Size = a.step.parse()?;
    if step == Size::ZERO || capacity.micros() % step.micros() != 0 {
        return Err(Error::Invalid("--capacity must be a positive multiple of --step".into()));
    }
    let p = RunParams { eps: a.eps, ..RunParams::default() };
    let rows = ratio_table(alg, &a.k_list, &a.opt_list, a.instances_per_cell, a.seed, capacity, step, p)?;
    let mut w = output(&a.out)?;
    writeln!(w, "{}", meta(&format!("ratio alg={} seed={} capacity={capacity} step={step}", a.alg, a.seed)))?;
    writeln!(w, "k,opt,instances,max_bins,max_ratio,bound_1375,bound_11_9")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{:.5},{:.5},{:.5}",
            r.k, r.opt, r.instances, r.max_bins, r.max_ratio, r.bound_1375, r.bound_11_9
        )?;
    }
    Ok(())
}

pub fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let series = DemandSeries::read_csv(File::open(&a.series)?)?;
    let p = SimParams {
        k: a.k,
        backend: backend(&a.alg)?,
        sigma: a.sigma,
        runs: a.runs,
        seed: a.seed,
        warmup_weeks: a.warmup_weeks,
    };
    if p.k == 0 {
        return Err(Error::Invalid("--k must be positive".into()));
    }
    let res = simulate(&series, &p)?;
    let mut w = output(&a.out)?;
    writeln!(
        w,
        "{}",
        meta(&format!("simulate k={} alg={} sigma={} runs={} seed={} warmup_weeks={}", a.k, a.alg, a.sigma, a.runs, a.seed, a.warmup_weeks))
    )?;
    writeln!(w, "run,model,utilitarian,egalitarian,max_difference")?;
    type Pick = fn(&crate::experiments::RunMetrics) -> crate::instance::WelfareReport;
    let models: [(&str, Pick); 3] = [("time", |m| m.time), ("watts", |m| m.watts), ("comfort", |m| m.comfort)];
    for (i, r) in res.runs.iter().enumerate() {
        for (name, f) in &models {
            let x = f(r);
            writeln!(w, "{i},{name},{:.5},{:.5},{:.5}", x.utilitarian, x.egalitarian, x.max_utility_difference)?;
        }
    }
    for (name, f) in &models {
        let (um, us) = res.stat(|m| f(m).utilitarian);
        let (em, es) = res.stat(|m| f(m).egalitarian);
        let (dm, ds) = res.stat(|m| f(m).max_utility_difference);
        writeln!(w, "mean,{name},{um:.5},{em:.5},{dm:.5}")?;
        writeln!(w, "sd,{name},{us:.5},{es:.5},{ds:.5}")?;
    }
    Ok(())
}

pub fn cmd_watts(a: WattsArgs) -> Result<()> {
    let h = Heuristic::from_index(a.ha)?;
    let b = backend(&a.alg)?;
    let mut w = output(&a.out)?;
    writeln!(w, "{}", meta(&format!("watts ha={} k={} alg={} u={}", a.ha, a.k, a.alg, a.u)))?;
    match (&a.series, &a.instance) {
        (Some(_), Some(_)) | (None, None) => {
            return Err(Error::Invalid("give either a series file or --instance".into()));
        }
        (None, Some(p)) => {
            let inst = load_instance(p)?;
            let (sol, s) = watts_single(&inst, h, a.k, b, a.u)?;
            writeln!(w, "g,bins,utilitarian,egalitarian,max_difference")?;
            writeln!(w, "{},{},{:.5},{:.5},{:.5}", sol.g, sol.bins.len(), s.utilitarian, s.egalitarian, s.max_difference)?;
        }
        (Some(p), None) => {
            let series = DemandSeries::read_csv(File::open(p)?)?;
            let s = watts_over_series(&series, h, a.k, b, a.u)?;
            writeln!(w, "shedding_hours,utilitarian,egalitarian,max_difference")?;
            writeln!(w, "{},{:.5},{:.5},{:.5}", s.shedding_hours, s.utilitarian, s.egalitarian, s.max_difference)?;
        }
    }
    Ok(())
}

pub fn cmd_rmax(a: RmaxArgs) -> Result<()> {
    let inst = load_instance(&a.instance)?;
    let opts = ExactOptions { node_budget: a.node_budget, ..ExactOptions::default() };
    let r = rmax(&inst)?;
    println!("r_max={}", r.r_max);
    for (cfg, wgt) in &r.support {
        println!("support {cfg:?} weight={wgt}");
    }
    match minimal_k(&inst, a.k_max, opts)? {
        Some(m) => println!("minimal_k={} bins={}", m.k, m.bins),
        None => println!("minimal_k=none (k_max={})", a.k_max),
    }
    println!("k,opt");
    for k in 1..=a.k_max.min(10) {
        let e = exact_kbp(&inst, k, opts)?;
        println!("{k},{}{}", e.bins, if e.optimal { "" } else { " (not proven)" });
    }
    Ok(())
}

pub fn cmd_generate(a: GenerateArgs) -> Result<()> {
    match a.what {
        GenerateWhat::Instances { count, opt, capacity, step, seed, out } => {
            let cap: Size = capacity.parse()?;
            let step: Size = step.parse()?;
            if step == Size::ZERO || cap.micros() % step.micros() != 0 {
                return Err(Error::Invalid("--capacity must be a positive multiple of --step".into()));
            }
            let v: Vec<Instance> =
                (0..count).map(|i| generate_instance_on_grid(cap, step, opt, &mut rng(seed, i as u64))).collect();
            write_instances_jsonl(&v, output(&out)?)
        }
        GenerateWhat::Series { agents, weeks, seed, out } => {
            let s = generate_timeseries(agents, weeks * 168, &mut rng(seed, 0), Profile::default())?;
            s.write_csv(output(&out)?)
        }
    }
}
