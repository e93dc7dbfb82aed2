//! Worst observed bins / OPT(D_k) for first fit variants on generated instances.

use kbp::experiments::{ratio_table, Algorithm, RunParams};
use kbp::Size;

fn main() -> kbp::Result<()> {
    for alg in [Algorithm::Ffk, Algorithm::Ffdk, Algorithm::Nfk] {
        let rows = ratio_table(alg, &[1, 2, 3], &[2, 4, 6], 10, 0, Size::from_units(20), Size::from_units(1), RunParams::default())?;
        println!("{alg:?}");
        for r in rows {
            println!("  k={} OPT={} worst {} bins, ratio {:.3}", r.k, r.opt, r.max_bins, r.max_ratio);
        }
    }
    Ok(())
}
