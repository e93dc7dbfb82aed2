//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero on any failure.

use std::cmp::Ordering;
use std::fmt::Write as _;
use std::time::{Duration, Instant};

use kbp::configlp::{dlvl_pack, kk1_pack};
use kbp::datagen::{generate_instance_on_grid, generate_timeseries, rng, DemandSeries, Profile};
use kbp::exact::{a_n, exact_kbp, minimal_k, rmax, ExactOptions, MaxDet};
use kbp::experiments::{run_algorithm, simulate, Algorithm, RunParams, SimParams};
use kbp::greedy::{ffdk, ffk, nfk};
use kbp::watts::{ha1, ha1_fixed, ha2, ha3, ha3_with, ha4, ha4_fixed, leximin_compare, Backend, GroupVolume, LeximinKey, WattsSolution};
use kbp::{validate_packing, Instance, Size};
use num::BigRational;
use rand::Rng;

const WATTS_TOL: f64 = 0.01;

struct Criterion {
    name: &'static str,
    budget: Duration,
    failures: Vec<String>,
    checks: usize,
}

impl Criterion {
    fn new(name: &'static str, budget_secs: u64) -> Self {
        Criterion { name, budget: Duration::from_secs(budget_secs), failures: Vec::new(), checks: 0 }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn close(mut self, start: Instant, note: &str) -> bool {
        let took = start.elapsed();
        if took > self.budget {
            self.failures.push(format!("took {took:.2?}, budget {:?}", self.budget));
        }
        let ok = self.failures.is_empty();
        let tag = if ok { "PASS" } else { "FAIL" };
        println!("{tag} {}: {} checks in {took:.2?}{note}", self.name, self.checks);
        for f in &self.failures {
            println!("     - {f}");
        }
        ok
    }
}

fn inst(d: &[u64], s: u64) -> Instance {
    Instance::from_units(d, s).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn delta_instance() -> Instance {
    let (half, quarter, delta) = (500_000u64, 250_000u64, 1_000u64);
    let mut d = Vec::new();
    d.extend([half + delta; 4]);
    d.extend([quarter + 2 * delta; 4]);
    d.extend([quarter + delta; 4]);
    d.extend([quarter - 2 * delta; 8]);
    Instance::new(d.into_iter().map(Size).collect(), Size::from_units(1)).unwrap()
}

fn ff_family_instance() -> Instance {
    let mut d = Vec::new();
    for (size, count) in [(6, 7), (10, 7), (16, 3), (34, 10), (51, 10)] {
        d.extend(std::iter::repeat(size).take(count));
    }
    inst(&d, 101)
}

fn worked_examples() -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("worked examples", 1);

    let d = inst(&[371, 659, 113, 47, 485, 3, 228, 419, 468, 581, 626], 1000);
    let f = ffk(&d, 2).num_bins();
    c.check(f == 11, || format!("FFk k=2 gave {f}, want 11"));
    let e = exact_kbp(&d, 2, ExactOptions::default()).unwrap();
    c.check(e.bins == 8 && e.optimal, || format!("exact k=2 gave {} (optimal={}), want 8", e.bins, e.optimal));

    let p = ffk(&inst(&[10, 20, 11], 31), 2);
    c.check(p.bins == vec![vec![0, 1], vec![2, 0], vec![1, 2]], || format!("FFk trace {:?}", p.bins));

    let d = inst(&[103, 102, 101], 205);
    for (k, want) in [(1, 2), (2, 3)] {
        let got = ffdk(&d, k).num_bins();
        c.check(got == want, || format!("FFDk [103,102,101] k={k} gave {got}, want {want}"));
    }

    let d = delta_instance();
    let j = ff_family_instance();
    for k in 1..=3 {
        let got = ffdk(&d, k).num_bins();
        c.check(got == 8 + 7 * (k - 1), || format!("FFDk delta k={k} gave {got}"));
        let e = exact_kbp(&d, k, ExactOptions::default()).unwrap();
        c.check(e.bins == 6 * k && e.optimal, || format!("exact delta k={k} gave {}", e.bins));
        let got = ffk(&j, k).num_bins();
        c.check(got == 17 + 10 * (k - 1), || format!("FFk S=101 family k={k} gave {got}"));
    }
    c.close(start, "")
}

fn egalitarian_time() -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("egalitarian connection time", 5);
    let cases = [
        (inst(&[2, 1, 1], 3), rat(2, 3), 2),
        (inst(&[11, 12, 13], 25), rat(2, 3), 2),
        (inst(&[4, 2, 5, 3, 2, 1], 9), rat(9, 17), 9),
        (inst(&[1; 5], 4), rat(4, 5), 4),
    ];
    for (d, r, k) in &cases {
        let got = rmax(d).unwrap();
        c.check(&got.r_max == r && got.reconstructs(), || format!("r_max {} gave {}", d.to_json(), got.r_max));
        let m = minimal_k(d, 20, ExactOptions::default()).unwrap();
        let mk = m.as_ref().map(|m| m.k);
        c.check(mk == Some(*k), || format!("minimal k {} gave {mk:?}, want {k}", d.to_json()));
    }

    let mut r = rng(2024, 7);
    for i in 0..50 {
        let n = r.gen_range(1..=6);
        let s = r.gen_range(4..=12u64);
        let d: Vec<u64> = (0..n).map(|_| r.gen_range(1..=s)).collect();
        let d = inst(&d, s);
        let bound = match a_n(n as i64).unwrap() {
            MaxDet::Exact(v) => v as usize,
            MaxDet::Bound(b) => b.floor() as usize,
        };
        let m = minimal_k(&d, bound, ExactOptions::default()).unwrap();
        c.check(m.is_some(), || format!("instance {i} {}: no k <= a(n)={bound}", d.to_json()));
    }
    c.close(start, "")
}

fn bound_sweeps(findings_path: &std::path::Path) -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("approximation bounds on known-optimum instances", 120);
    let capacity = Size::from_units(20);
    let step = Size::from_units(1);
    let mut findings = String::new();
    let mut ffdk_violations = 0;
    for i in 0..200u64 {
        let mut r = rng(1001, i);
        let opt = r.gen_range(1..=6usize);
        let k = r.gen_range(1..=4usize);
        let d = generate_instance_on_grid(capacity, step, opt, &mut r);
        let o = (k * opt) as f64;
        let kf = k as f64;
        let tag = |alg: &str, got: usize| format!("instance {i} (OPT={opt}, k={k}): {alg} used {got} bins");

        let f = ffk(&d, k);
        c.check(validate_packing(&d, &f).is_ok() && f.num_bins() as f64 <= (1.5 + 1.0 / (5.0 * kf)) * o + 3.0 * kf, || {
            tag("FFk", f.num_bins())
        });
        let f = nfk(&d, k);
        c.check(validate_packing(&d, &f).is_ok() && f.num_bins() as f64 <= 2.0 * o + 1.0, || tag("NFk", f.num_bins()));
        for eps in [0.1, 0.3] {
            let f = dlvl_pack(&d, k, eps, ExactOptions::default().node_budget).unwrap();
            c.check(validate_packing(&d, &f).is_ok() && f.num_bins() as f64 <= (1.0 + 2.0 * eps) * o + kf, || {
                tag(&format!("DLVL eps={eps}"), f.num_bins())
            });
            let f = kk1_pack(&d, k, eps).unwrap();
            let b = (1.0 + 2.0 * kf * eps) * o + 1.0 / (2.0 * eps * eps) + (2.0 * kf + 1.0);
            c.check(validate_packing(&d, &f).is_ok() && f.num_bins() as f64 <= b, || tag(&format!("KK1 eps={eps}"), f.num_bins()));
        }
        let f = ffdk(&d, k);
        c.check(validate_packing(&d, &f).is_ok(), || tag("FFDk invalid", f.num_bins()));
        if f.num_bins() as f64 > 11.0 / 9.0 * o + 6.0 / 9.0 + 1e-9 {
            ffdk_violations += 1;
            let _ = writeln!(findings, "{} {}", tag("FFDk", f.num_bins()), d.to_json());
        }
    }
    let _ = writeln!(findings, "FFDk above 11/9 OPT + 6/9: {ffdk_violations} of 200 instances");
    std::fs::write(findings_path, &findings).unwrap();
    c.close(start, &format!("; FFDk findings: {ffdk_violations} -> {}", findings_path.display()))
}

/// Best leximin watts vector over every choice of always-on prefix and every multiset of
/// at most `max_bins` feasible bins, each switched on for an equal share of the hour.
fn brute_force_leximin(d: &Instance, max_bins: usize) -> LeximinKey {
    let n = d.n();
    let order = kbp::greedy::ascending_order(&d.demands);
    let mut best: Option<LeximinKey> = None;
    for g in 0..n {
        let on = &order[..g];
        let used: Size = on.iter().map(|&a| d.demands[a]).sum();
        if used > d.capacity {
            break;
        }
        let rest_cap = d.capacity - used;
        let rest: Vec<usize> = order[g..].to_vec();
        let configs: Vec<Vec<usize>> = (1u32..1 << rest.len())
            .map(|m| (0..rest.len()).filter(|b| m >> b & 1 == 1).map(|b| rest[b]).collect::<Vec<_>>())
            .filter(|c| c.iter().map(|&a| d.demands[a]).sum::<Size>() <= rest_cap)
            .collect();
        let mut counts = vec![0usize; configs.len()];
        fn visit(
            idx: usize,
            left: usize,
            counts: &mut Vec<usize>,
            configs: &[Vec<usize>],
            d: &Instance,
            on: &[usize],
            best: &mut Option<LeximinKey>,
        ) {
            if idx == configs.len() {
                let q: usize = counts.iter().sum();
                if q == 0 {
                    return;
                }
                let mut w = vec![0.0; d.n()];
                for (c, &x) in configs.iter().zip(counts.iter()) {
                    for &a in c {
                        w[a] += x as f64 / q as f64 * d.demands[a].as_f64();
                    }
                }
                for &a in on {
                    w[a] = d.demands[a].as_f64();
                }
                let key = LeximinKey::new(&w);
                if best.as_ref().map_or(true, |b| leximin_compare(&key, b).unwrap() == Ordering::Greater) {
                    *best = Some(key);
                }
                return;
            }
            for x in 0..=left {
                counts[idx] = x;
                visit(idx + 1, left - x, counts, configs, d, on, best);
            }
            counts[idx] = 0;
        }
        visit(0, max_bins, &mut counts, &configs, d, on, &mut best);
    }
    best.unwrap()
}

fn watts_heuristics() -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("power-sharing heuristics", 10);
    let d = Instance::parse(
        &["0.2", "0.22", "0.4", "0.42", "0.8", "0.82", "1.7", "1.7", "3", "3.2", "6.5", "6.7", "14", "14.2"],
        "21",
    )
    .unwrap();
    let k = 3;
    let near = |a: f64, b: f64| (a - b).abs() <= WATTS_TOL;
    let mut expect = |label: &str, s: &WattsSolution, want: f64| {
        let got = s.egalitarian();
        c.check(near(got, want) && s.validate(&d).is_ok(), || format!("{label}: egalitarian {got:.5}, want {want}"));
    };
    expect("HA1 g=8", &ha1_fixed(&d, k, Backend::Ffk, 8).unwrap(), 1.74783);
    expect("HA1 g=0", &ha1_fixed(&d, k, Backend::Ffk, 0).unwrap(), 0.18613);
    expect("HA4 g=8", &ha4_fixed(&d, k, Backend::Ffk, 8).unwrap(), 0.81819);
    expect("HA4 g=0", &ha4_fixed(&d, k, Backend::Ffk, 0).unwrap(), 0.06667);
    let h2 = ha2(&d, k).unwrap();
    expect("HA2", &h2, 1.5);
    expect("HA3 g=1", &ha3_with(&d, k, 0.25, Backend::Ffk, GroupVolume::Actual, Some(1)).unwrap(), 0.5125);
    expect("HA3 g=0", &ha3_with(&d, k, 0.25, Backend::Ffk, GroupVolume::Actual, Some(0)).unwrap(), 0.12632);
    let mut durs: Vec<f64> = (0..d.n())
        .filter(|a| !h2.always_on.contains(a))
        .map(|a| h2.watts[a] / d.demands[a].as_f64())
        .collect();
    durs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    durs.dedup_by(|a, b| (*a - *b).abs() < 1e-9);
    c.check(durs.len() == 3 && durs.iter().zip([0.125, 0.25, 0.5]).all(|(a, b)| (a - b).abs() < 1e-9), || {
        format!("HA2 connection times {durs:?}")
    });
    let h4 = (0..=8).map(|g| ha4_fixed(&d, k, Backend::Ffk, g).unwrap().egalitarian()).fold(f64::INFINITY, f64::min);
    c.check(near(h4, 0.06667), || format!("HA4 minimum over g {h4:.5}"));

    let m = inst(&[5, 4, 1], 6);
    let s = ha1(&m, 4, Backend::Ffk).unwrap();
    let listed = LeximinKey(vec![1.0, 2.2, 2.2]);
    let oracle = brute_force_leximin(&m, 12);
    c.check(s.validate(&m).is_ok(), || "M=5 HA1 packing invalid".into());
    c.check(leximin_compare(&s.key(), &listed).unwrap() != Ordering::Less, || format!("M=5 HA1 key {:?}", s.key().0));
    c.check(leximin_compare(&s.key(), &oracle).unwrap() == Ordering::Equal, || {
        format!("M=5 HA1 key {:?}, brute force {:?}", s.key().0, oracle.0)
    });
    let note = format!("; M=5 key {:?} vs listed (1, 2.2, 2.2)", s.key().0.iter().map(|v| format!("{v:.4}")).collect::<Vec<_>>());
    c.close(start, &note)
}

fn validity_fuzz() -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("validity fuzzing", 60);
    let algs = [Algorithm::Ffk, Algorithm::Ffdk, Algorithm::Nfk, Algorithm::Dlvl, Algorithm::Kk1, Algorithm::Kk2, Algorithm::Exact];
    let params = RunParams { exact: ExactOptions { node_budget: 500, ..ExactOptions::default() }, ..RunParams::default() };
    for i in 0..1000u64 {
        let mut r = rng(77, i);
        let n = r.gen_range(1..=9);
        let s = r.gen_range(5..=60u64);
        let d = inst(&(0..n).map(|_| r.gen_range(1..=s)).collect::<Vec<_>>(), s);
        let k = r.gen_range(1..=3);
        for alg in algs {
            let res = run_algorithm(alg, &d, k, params);
            c.check(matches!(&res, Ok(p) if validate_packing(&d, p).is_ok() && p.k == k), || {
                format!("instance {i} {} k={k}: {alg:?} gave {res:?}", d.to_json())
            });
        }
        for (name, sol) in [
            ("HA1", ha1(&d, k, Backend::Ffk)),
            ("HA2", ha2(&d, k)),
            ("HA3", ha3(&d, k, 0.25, Backend::Ffdk)),
            ("HA4", ha4(&d, k, Backend::Ffk)),
        ] {
            let ok = match &sol {
                Err(kbp::Error::Infeasible(_)) => d.volume() <= d.capacity,
                Ok(sol) => {
                    let total: f64 = sol.watts.iter().sum();
                    sol.validate(&d).is_ok() && total <= s as f64 + 1e-9
                }
                Err(_) => false,
            };
            c.check(ok, || format!("instance {i} {} k={k}: {name} invalid or over supply", d.to_json()));
        }
    }
    c.close(start, "")
}

fn simulation_trend() -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("simulation trend on synthetic series", 600);
    let series: DemandSeries = generate_timeseries(367, 13 * 168, &mut rng(5, 0), Profile::default()).unwrap();
    let mut prev: Option<(f64, f64)> = None;
    let mut note = String::new();
    for k in [1, 5, 25, 100] {
        let p = SimParams { k, runs: 9, seed: 11, ..SimParams::default() };
        let res = simulate(&series, &p).unwrap();
        let (egal, sd) = res.stat(|m| m.time.egalitarian);
        let _ = write!(note, " k={k}:{egal:.2}±{sd:.2}");
        if k == 100 {
            let worst = res.runs.iter().map(|m| m.time.max_utility_difference).fold(0.0, f64::max);
            c.check(worst == 0.0, || format!("k=100 time max difference {worst}"));
        }
        if let Some((pe, psd)) = prev {
            c.check(egal + sd.max(psd) >= pe, || format!("egalitarian hours fell to {egal:.3} at k={k} from {pe:.3}"));
        }
        prev = Some((egal, sd));
    }
    c.close(start, &format!(";{note}"))
}

fn datagen_certified() -> bool {
    let start = Instant::now();
    let mut c = Criterion::new("generated optimum certified by the exact solver", 600);
    for i in 0..100u64 {
        let mut r = rng(31337, i);
        let opt = r.gen_range(1..=5usize);
        let d = generate_instance_on_grid(Size::from_units(20), Size::from_units(1), opt, &mut r);
        for k in 1..=3 {
            let e = exact_kbp(&d, k, ExactOptions::default()).unwrap();
            c.check(e.optimal && e.bins == k * opt, || {
                format!("instance {i} (OPT={opt}) k={k}: exact {} optimal={}", e.bins, e.optimal)
            });
        }
    }
    c.close(start, "")
}

fn main() {
    let findings = std::path::Path::new(env!("CARGO_TARGET_TMPDIR")).join("ffdk_findings.txt");
    let results = [
        worked_examples(),
        egalitarian_time(),
        bound_sweeps(&findings),
        watts_heuristics(),
        validity_fuzz(),
        simulation_trend(),
        datagen_certified(),
    ];
    let failed = results.iter().filter(|r| !**r).count();
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
