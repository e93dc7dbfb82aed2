//! Configurations, the fractional configuration LP, rounding and realization into bins.

use kbp::configlp::{enumerate_configurations, realize_covering, round_lp, solve_fractional};
use kbp::{validate_packing, Instance};

fn main() -> kbp::Result<()> {
    let d = Instance::from_units(&[4, 2, 5, 3, 2, 1], 9)?;
    let sys = enumerate_configurations(&d)?;
    let sizes: Vec<String> = sys.sizes.iter().map(|s| s.to_string()).collect();
    println!("classes {:?} counts {:?}, {} configurations", sizes, sys.counts, sys.t());
    for (j, c) in sys.columns.iter().enumerate().take(8) {
        println!("  {c:?} size {}", sys.config_size(j));
    }

    for k in [1, 2, 3] {
        let lp = solve_fractional(&sys, k);
        let r = round_lp(&lp, &sys, k);
        validate_packing(&d, &r.packing).expect("valid");
        println!(
            "k={k}: LP {} -> {} bins ({} from the integral part, {} via {:?})",
            lp.objective,
            r.packing.num_bins(),
            r.floor_bins,
            r.residual_bins,
            r.residual
        );
    }

    // every configuration once covers each class at least as often as it occurs
    let once = vec![1; sys.t()];
    let p = realize_covering(&once, &sys, 1)?;
    println!("one bin per configuration, realized for k=1: {} bins", p.num_bins());
    Ok(())
}
