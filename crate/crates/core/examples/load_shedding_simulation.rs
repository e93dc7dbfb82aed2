//! Hourly simulation on a synthetic series: connected hours per agent as k grows.

use kbp::datagen::{generate_timeseries, rng, Profile};
use kbp::experiments::{simulate, SimParams};

fn main() -> kbp::Result<()> {
    let series = generate_timeseries(60, 6 * 168, &mut rng(5, 0), Profile::default())?;
    println!(" k   egalitarian hours   utilitarian kWh   watts spread");
    for k in [1, 2, 5, 20] {
        let res = simulate(&series, &SimParams { k, runs: 3, seed: 1, ..SimParams::default() })?;
        let (e, sd) = res.stat(|m| m.time.egalitarian);
        let (u, _) = res.stat(|m| m.watts.utilitarian);
        let (w, _) = res.stat(|m| m.watts.max_utility_difference);
        println!("{k:>2}   {e:>10.2} ± {sd:<5.2}   {u:>15.1}   {w:>12.2}");
    }
    Ok(())
}
