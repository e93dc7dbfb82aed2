//! Seeded instance and demand-series generation.

use kbp::datagen::{generate_instance, generate_timeseries, rng, write_instances_jsonl, Profile};
use kbp::Size;

fn main() -> kbp::Result<()> {
    let instances: Vec<_> = (0..3).map(|i| generate_instance(Size::from_units(10), 2, &mut rng(1, i))).collect();
    write_instances_jsonl(&instances, std::io::stdout())?;

    let series = generate_timeseries(4, 2 * 24, &mut rng(1, 0), Profile::default())?;
    let mut csv = Vec::new();
    series.write_csv(&mut csv)?;
    for line in String::from_utf8_lossy(&csv).lines().take(6) {
        println!("{line}");
    }
    println!("daily supply {:?}", series.supply);
    Ok(())
}
