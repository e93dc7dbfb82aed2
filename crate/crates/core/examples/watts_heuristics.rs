//! The four power-sharing heuristics on a 14-household instance with supply 21 kW.

use kbp::watts::{ha1, ha1_fixed, ha2, ha2_with, ha3_with, ha4, ha4_fixed, Backend, GroupVolume};
use kbp::Instance;

fn show(name: &str, s: &kbp::watts::WattsSolution) {
    let w: Vec<String> = s.watts.iter().map(|v| format!("{v:.5}")).collect();
    println!("{name}: g={} bins={} egalitarian={:.5}\n  watts [{}]", s.g, s.bins.len(), s.egalitarian(), w.join(", "));
}

fn main() -> kbp::Result<()> {
    let d = Instance::parse(
        &["0.2", "0.22", "0.4", "0.42", "0.8", "0.82", "1.7", "1.7", "3", "3.2", "6.5", "6.7", "14", "14.2"],
        "21",
    )?;
    let k = 3;
    show("HA1 g=0", &ha1_fixed(&d, k, Backend::Ffk, 0)?);
    show("HA1 g=8", &ha1_fixed(&d, k, Backend::Ffk, 8)?);
    show("HA1", &ha1(&d, k, Backend::Ffk)?);
    show("HA2", &ha2(&d, k)?);
    show("HA2 without always-on groups", &ha2_with(&d, k, None, false)?);
    for vol in [GroupVolume::Actual, GroupVolume::Pseudo] {
        for g in [0, 1] {
            show(&format!("HA3 {vol:?} g={g}"), &ha3_with(&d, k, 0.25, Backend::Ffk, vol, Some(g))?);
        }
    }
    show("HA4 g=0", &ha4_fixed(&d, k, Backend::Ffk, 0)?);
    show("HA4 g=8", &ha4_fixed(&d, k, Backend::Ffk, 8)?);
    show("HA4", &ha4(&d, k, Backend::Ffk)?);

    let m = Instance::from_units(&[5, 4, 1], 6)?;
    show("M=5 HA1 k=4", &ha1(&m, 4, Backend::Ffk)?);
    show("M=5 HA2", &ha2(&m, 4)?);
    show("M=5 HA3 u=1", &ha3_with(&m, 4, 1.0, Backend::Ffk, GroupVolume::Actual, None)?);
    show("M=5 HA4", &ha4(&m, 4, Backend::Ffk)?);
    Ok(())
}
