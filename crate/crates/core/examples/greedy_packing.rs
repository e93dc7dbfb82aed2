//! First fit, first fit decreasing and next fit on k copies of each item.

use kbp::greedy::{ffdk, ffk, nfk};
use kbp::{validate_packing, Instance, Size};

fn main() -> kbp::Result<()> {
    let d = Instance::from_units(&[10, 20, 11], 31)?;
    println!("FFk k=2 on [10, 20, 11], S=31: {:?}", ffk(&d, 2).bins);

    let d = Instance::from_units(&[103, 102, 101], 205)?;
    for k in [1, 2] {
        println!("FFDk k={k} on [103, 102, 101], S=205: {:?}", ffdk(&d, k).bins);
    }

    // sizes 6, 10, 16, 34, 51 with multiplicities 7, 7, 3, 10, 10
    let mut family = Vec::new();
    for (s, c) in [(6, 7), (10, 7), (16, 3), (34, 10), (51, 10)] {
        family.extend(std::iter::repeat(s).take(c));
    }
    let family = Instance::from_units(&family, 101)?;

    // four of 1/2+δ, four of 1/4+2δ, four of 1/4+δ, eight of 1/4-2δ; δ = 0.001
    let mut tight = vec![Size(501_000); 4];
    tight.extend([Size(252_000); 4]);
    tight.extend([Size(251_000); 4]);
    tight.extend([Size(248_000); 8]);
    let tight = Instance::new(tight, Size::from_units(1))?;

    println!("\n k  FFk(family)  FFDk(tight)  NFk(tight)  volume bound(tight)");
    for k in 1..=5 {
        let a = ffk(&family, k);
        let b = ffdk(&tight, k);
        let c = nfk(&tight, k);
        assert!(validate_packing(&family, &a).is_ok() && validate_packing(&tight, &b).is_ok() && validate_packing(&tight, &c).is_ok());
        println!("{k:>2}  {:>12}  {:>11}  {:>10}  {:>19}", a.num_bins(), b.num_bins(), c.num_bins(), tight.volume_bound(k));
    }
    Ok(())
}
