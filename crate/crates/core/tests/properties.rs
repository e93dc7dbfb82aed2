use std::cmp::Ordering;

use kbp::configlp::{enumerate_configurations, round_lp, solve_fractional};
use kbp::exact::{exact_kbp, ExactOptions};
use kbp::greedy::{ffdk, ffk, first_fit_stream, interleave, nfk};
use kbp::lp::Q;
use kbp::watts::{ha1, ha2, ha3, ha4, leximin_compare, Backend, LeximinKey};
use kbp::{validate_packing, Instance, Packing, Size};
use num::Zero;
use proptest::prelude::*;

/// Plain first fit: scan bins from the left for the first one with room and no copy of the agent.
fn naive_first_fit(demands: &[Size], capacity: Size, stream: &[usize]) -> Vec<Vec<usize>> {
    let mut bins: Vec<(Size, Vec<usize>)> = Vec::new();
    for &a in stream {
        let d = demands[a];
        match bins.iter_mut().find(|(load, b)| *load + d <= capacity && !b.contains(&a)) {
            Some((load, b)) => {
                *load = *load + d;
                b.push(a);
            }
            None => bins.push((d, vec![a])),
        }
    }
    bins.into_iter().map(|(_, b)| b).collect()
}

fn instance() -> impl Strategy<Value = Instance> {
    (2u64..40).prop_flat_map(|s| {
        prop::collection::vec(1..=s, 1..9).prop_map(move |d| Instance::from_units(&d, s).unwrap())
    })
}

fn shedding_instance() -> impl Strategy<Value = Instance> {
    instance().prop_filter("demand must exceed supply", |d| d.volume() > d.capacity)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn first_fit_matches_linear_scan(d in instance(), k in 1usize..6, seed in any::<u64>()) {
        let mut order: Vec<usize> = (0..d.n()).collect();
        let rot = (seed as usize) % d.n();
        order.rotate_left(rot);
        let stream = interleave(&order, &vec![k; d.n()]);
        prop_assert_eq!(first_fit_stream(&d.demands, d.capacity, stream.iter().copied()), naive_first_fit(&d.demands, d.capacity, &stream));
    }

    #[test]
    fn greedy_packings_are_valid(d in instance(), k in 1usize..5) {
        for p in [ffk(&d, k), ffdk(&d, k), nfk(&d, k)] {
            prop_assert!(validate_packing(&d, &p).is_ok());
            prop_assert!(p.num_bins() >= d.volume_bound(k));
        }
    }

    #[test]
    fn exact_sits_between_bounds(d in instance(), k in 1usize..4) {
        let e = exact_kbp(&d, k, ExactOptions { node_budget: 2_000, ..ExactOptions::default() }).unwrap();
        prop_assert!(validate_packing(&d, &e.packing).is_ok());
        prop_assert!(e.bins >= e.lower_bound);
        prop_assert!(e.lower_bound >= d.volume_bound(k));
        prop_assert!(e.bins <= ffk(&d, k).num_bins());
        prop_assert!(e.bins <= ffdk(&d, k).num_bins());
    }

    #[test]
    fn lp_rounding_realizes_valid_packings(d in instance(), k in 1usize..4) {
        let sys = enumerate_configurations(&d).unwrap();
        let lp = solve_fractional(&sys, k);
        let total: Q = lp.x.iter().cloned().sum();
        prop_assert_eq!(&total, &lp.objective);
        prop_assert!(lp.objective >= Q::from_integer((d.volume().micros() * k as u64).into()) / Q::from_integer(d.capacity.micros().into()));
        let r = round_lp(&lp, &sys, k);
        prop_assert!(validate_packing(&d, &r.packing).is_ok());
    }

    #[test]
    fn json_round_trip(d in instance(), k in 1usize..4) {
        prop_assert_eq!(Instance::from_json(&d.to_json()).unwrap(), d.clone());
        let p = ffk(&d, k);
        prop_assert_eq!(Packing::from_json(&p.to_json()).unwrap(), p);
    }

    #[test]
    fn size_text_round_trip(m in 0u64..10_000_000_000) {
        let s = Size(m);
        prop_assert_eq!(s.to_string().parse::<Size>().unwrap(), s);
    }

    #[test]
    fn heuristics_respect_demand_and_supply(d in shedding_instance(), k in 1usize..5) {
        for sol in [ha1(&d, k, Backend::Ffk), ha2(&d, k), ha3(&d, k, 0.5, Backend::Ffk), ha4(&d, k, Backend::Ffdk)] {
            let sol = sol.unwrap();
            prop_assert!(sol.validate(&d).is_ok());
            let total: Q = sol.durations.iter().cloned().sum();
            prop_assert!(sol.bins.is_empty() || total == num::One::one());
            prop_assert!(sol.durations.iter().all(|t| *t >= Q::zero()));
            for (a, w) in sol.watts.iter().enumerate() {
                prop_assert!(*w <= d.demands[a].as_f64() + 1e-9);
            }
            prop_assert!(sol.watts.iter().sum::<f64>() <= d.capacity.as_f64() + 1e-9);
        }
    }

    #[test]
    fn leximin_is_a_total_preorder(
        a in prop::collection::vec(0u8..4, 3),
        b in prop::collection::vec(0u8..4, 3),
        c in prop::collection::vec(0u8..4, 3),
    ) {
        let key = |v: &Vec<u8>| LeximinKey::new(&v.iter().map(|&x| x as f64).collect::<Vec<_>>());
        let (a, b, c) = (key(&a), key(&b), key(&c));
        let cmp = |x: &LeximinKey, y: &LeximinKey| leximin_compare(x, y).unwrap();
        prop_assert_eq!(cmp(&a, &b), cmp(&b, &a).reverse());
        prop_assert_eq!(cmp(&a, &a), Ordering::Equal);
        if cmp(&a, &b) != Ordering::Less && cmp(&b, &c) != Ordering::Less {
            prop_assert!(cmp(&a, &c) != Ordering::Less);
        }
    }
}
