use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn conical(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conical")).args(args).output().expect("run conical")
}

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("conical-cli-test-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&d);
    fs::create_dir_all(&d).unwrap();
    d
}

#[test]
fn verify_is_deterministic() {
    let d = scratch("det");
    let (a, b) = (d.join("a"), d.join("b"));
    for dir in [&a, &b] {
        let o = conical(&["verify", "E1", "--seed", "7", "--out", dir.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (x, y) = (fs::read(a.join("E1.csv")).unwrap(), fs::read(b.join("E1.csv")).unwrap());
    assert!(!x.is_empty());
    assert_eq!(x, y);
    let index = fs::read_to_string(a.join("index.csv")).unwrap();
    assert_eq!(index.lines().count(), 2);
}

#[test]
fn ratios_row_count() {
    let o = conical(&["ratios", "--system", "cantor13", "--count", "3", "--scales", "3^-1..3^-5", "--region", "right"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = String::from_utf8(o.stdout).unwrap();
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "point_id,scale,lower,upper,ratio_lo,ratio_hi,slope_lo,slope_hi,flags");
    assert_eq!(lines.count(), 15);
}

#[test]
fn exit_codes() {
    assert_eq!(conical(&["verify", "E12"]).status.code(), Some(2));
    assert_eq!(conical(&["ratios", "--system", "nosuch", "--count", "1"]).status.code(), Some(2));
    assert_eq!(conical(&["ratios", "--system", "cantor13", "--scales", "3^1..3^4"]).status.code(), Some(2));
    assert_eq!(conical(&["bogus-command"]).status.code(), Some(2));
    let o = conical(&["cone-search", "--system", "prop43:0.28,0.1", "--alpha", "auto", "--lmax", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("no cone-inclusion word"));
    let o = conical(&["cone-search", "--system", "cantor13", "--alpha", "1", "--m", "0", "--lmax", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn config_runs_and_validates() {
    let d = scratch("cfg");
    let good = d.join("good.conf");
    fs::write(&good, format!("# moran check\nexperiment = E2\nseed = 3\noutput = {}\n", d.join("out").display()))
        .unwrap();
    let o = conical(&["run", "--config", good.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.join("out").join("E2.csv").exists());
    let bad = d.join("bad.conf");
    fs::write(&bad, "experiment = E2\ncohort = many\n").unwrap();
    assert_eq!(conical(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn packing_demo_and_system_file() {
    let d = scratch("pack");
    let pts = d.join("pts.csv");
    fs::write(&pts, "0,0,1\n0.3,0.1,0.5\n2,2,0.25\n-1,0.5,1\n").unwrap();
    let o = conical(&["packing-demo", "--points", pts.to_str().unwrap(), "--theta", "1,0", "--radius", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = conical(&["packing-demo", "--points", pts.to_str().unwrap(), "--theta", "1,0", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));

    let sys = d.join("halves.sys");
    fs::write(&sys, "name halves\nosc true\nmap 1/2 0\nmap 1/2 1/2\n").unwrap();
    let o = conical(&["dims", "--system", sys.to_str().unwrap(), "--count", "2", "--scales", "0.5:6"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 13);
}
