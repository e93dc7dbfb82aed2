use std::path::PathBuf;
use std::process::{Command, Output};

fn kbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kbp")).args(args).output().unwrap()
}

fn scratch(name: &str, body: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const EXAMPLE: &str = r#"{"capacity":"1000","demands":["371","659","113","47","485","3","228","419","468","581","626"]}"#;

#[test]
fn pack_reports_bins_and_writes_a_valid_packing() {
    let i = scratch("ex.json", EXAMPLE);
    let o = kbp(&["pack", i.to_str().unwrap(), "--k", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("bins=11 "));

    let out = i.with_file_name("ex_exact.json");
    let o = kbp(&["pack", i.to_str().unwrap(), "--k", "2", "--alg", "exact", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bins=8 optimal="));
    let p = kbp::Packing::from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let inst = kbp::Instance::from_json(EXAMPLE).unwrap();
    assert_eq!(p.num_bins(), 8);
    assert!(kbp::validate_packing(&inst, &p).is_ok());
}

#[test]
fn exit_codes() {
    let bad = scratch("bad.json", r#"{"capacity":"1","demands":["2"]}"#);
    assert_eq!(kbp(&["pack", bad.to_str().unwrap()]).status.code(), Some(2));
    let fine = scratch("fine.json", r#"{"capacity":"1.0000001","demands":["1"]}"#);
    assert_eq!(kbp(&["pack", fine.to_str().unwrap()]).status.code(), Some(2));
    let ok = scratch("ok.json", EXAMPLE);
    assert_eq!(kbp(&["pack", ok.to_str().unwrap(), "--eps", "0.3"]).status.code(), Some(3));
    assert_eq!(kbp(&["pack", "/nonexistent/instance.json"]).status.code(), Some(5));
}

#[test]
fn rmax_prints_exact_fraction() {
    let i = scratch("r.json", r#"{"capacity":"9","demands":["4","2","5","3","2","1"]}"#);
    let o = kbp(&["rmax", i.to_str().unwrap(), "--k-max", "9"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.contains("r_max=9/17"));
    assert!(s.contains("minimal_k=9 bins=17"));
}

#[test]
fn series_pipeline() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    let series = dir.join("series.csv");
    let o = kbp(&["generate", "series", "--agents", "5", "--weeks", "1", "--seed", "3", "--out", series.to_str().unwrap()]);
    assert!(o.status.success());

    let o = kbp(&["simulate", series.to_str().unwrap(), "--k", "2", "--runs", "2"]);
    assert!(o.status.success());
    let s = stdout(&o);
    assert!(s.starts_with("# kbp "));
    assert!(s.contains("run,model,utilitarian,egalitarian,max_difference"));

    let o = kbp(&["watts", series.to_str().unwrap(), "--ha", "3", "--k", "2"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("shedding_hours,utilitarian,egalitarian,max_difference"));
    assert_eq!(kbp(&["watts", series.to_str().unwrap(), "--ha", "7"]).status.code(), Some(2));
}

#[test]
fn ratio_table_header() {
    let o = kbp(&["ratio", "--k-list", "2", "--opt-list", "2", "--instances-per-cell", "2", "--capacity", "20"]);
    assert!(o.status.success());
    let s = stdout(&o);
    let rows: Vec<&str> = s.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "k,opt,instances,max_bins,max_ratio,bound_1375,bound_11_9");
    assert!(rows[1].starts_with("2,2,2,"));
}
