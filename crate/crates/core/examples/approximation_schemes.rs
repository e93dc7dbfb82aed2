//! Grouping-based schemes against first fit and the exact optimum on a known-optimum instance.

use kbp::configlp::{dlvl_pack, kk1_pack, kk2_pack_traced};
use kbp::datagen::{generate_instance_on_grid, rng};
use kbp::exact::{exact_kbp, ExactOptions};
use kbp::greedy::ffk;
use kbp::{validate_packing, Size};

fn main() -> kbp::Result<()> {
    let opt = 5;
    let d = generate_instance_on_grid(Size::from_units(20), Size::from_units(1), opt, &mut rng(3, 0));
    println!("{} items, OPT = {opt} by construction", d.n());
    println!(" k  exact  FFk  DLVL(.3)  KK1(.3)  KK2");
    for k in 1..=3 {
        let e = exact_kbp(&d, k, ExactOptions::default())?;
        let f = ffk(&d, k);
        let a = dlvl_pack(&d, k, 0.3, 20_000)?;
        let b = kk1_pack(&d, k, 0.3)?;
        let c = kk2_pack_traced(&d, k, None, 2)?;
        for p in [&e.packing, &f, &a, &b, &c.packing] {
            validate_packing(&d, p).expect("valid");
        }
        println!(
            "{k:>2}  {:>5}  {:>3}  {:>8}  {:>7}  {:>3}   KK2 volumes {:?}",
            e.bins,
            f.num_bins(),
            a.num_bins(),
            b.num_bins(),
            c.packing.num_bins(),
            c.volumes.iter().map(|v| v.to_string()).collect::<Vec<_>>()
        );
    }
    Ok(())
}
