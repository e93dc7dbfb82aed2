//! Optimal bin counts, r_max and the smallest k that reaches it.

use kbp::exact::{exact_kbp, minimal_k, rmax, ExactOptions};
use kbp::greedy::ffk;
use kbp::Instance;

fn main() -> kbp::Result<()> {
    let opts = ExactOptions::default();

    let d = Instance::from_units(&[371, 659, 113, 47, 485, 3, 228, 419, 468, 581, 626], 1000)?;
    let r = exact_kbp(&d, 2, opts)?;
    println!("k=2: first fit {} bins, optimum {} bins (proven: {}, nodes: {})", ffk(&d, 2).num_bins(), r.bins, r.optimal, r.nodes);

    let d = Instance::from_units(&[11, 12, 13], 25)?;
    for k in 1..=3 {
        println!("[11,12,13] k={k}: OPT = {}", exact_kbp(&d, k, opts)?.bins);
    }

    let d = Instance::from_units(&[4, 2, 5, 3, 2, 1], 9)?;
    let r = rmax(&d)?;
    println!("r_max = {} with {} configurations in the support", r.r_max, r.support.len());
    for (cfg, w) in &r.support {
        println!("  {cfg:?} weight {w}");
    }
    if let Some(m) = minimal_k(&d, 12, opts)? {
        println!("smallest k = {} using {} bins", m.k, m.bins);
    }

    let d = Instance::from_units(&[1; 6], 5)?;
    println!("six unit items, S=5: k = {:?}", minimal_k(&d, 8, opts)?.map(|m| m.k));
    Ok(())
}
