//! Turning a packing into connection times, and the three utility models for one hour.

use kbp::allocation::{comfort_table, hour_report, to_f64, uniform_allocation, utility_time, utility_watts};
use kbp::greedy::ffk;
use kbp::Instance;

fn main() -> kbp::Result<()> {
    let d = Instance::parse(&["1.5", "0.8", "2.1", "0.4", "1.2"], "3")?;
    let p = ffk(&d, 2);
    let alloc = uniform_allocation(&p)?;
    println!("bins {:?}, each on for {} of the hour", alloc.bins, alloc.durations[0]);
    for a in 0..d.n() {
        println!("  agent {a}: time {} ({:.3} kWh)", utility_time(&alloc, a), utility_watts(&alloc, &d, a));
    }

    // five weeks of a flat profile with one agent doubling its evening use
    let mut history = vec![vec![1.0; 5]; 5 * 168];
    for week in 0..5 {
        for h in 18..22 {
            history[week * 168 + h][2] = 2.0;
        }
    }
    let comfort = comfort_table(&history);
    for hour in [4 * 168 + 10, 4 * 168 + 19] {
        println!("comfort at hour {hour}: {:?}", comfort[hour]);
    }
    let hour = 4 * 168 + 10;
    let r = hour_report(&alloc, &d, &comfort[hour])?;
    println!("time    {:?}", r.time);
    println!("watts   {:?}", r.watts);
    println!("comfort {:?}", r.comfort);
    println!("agent 0 connected {:.4} of the hour", to_f64(&alloc.agent_times(d.n())[0]));
    Ok(())
}
