use std::fs;
use std::process::Command;

use gibbs_experiments::output::Table;

fn col(t: &Table, name: &str) -> Vec<f64> {
    t.floats(name).unwrap().into_iter().map(Option::unwrap).collect()
}

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gibbs-experiments"))
}

#[test]
fn pd_compare_writes_named_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin().args(["pd-compare", "--nmax", "80", "--no-plot", "--out"]).arg(dir.path()).output().unwrap();
    assert!(out.status.success());
    let t = Table::read(&dir.path().join("pd_0.25_10.csv")).unwrap();
    assert_eq!(t.rows.len(), 80);
    let k = col(&t, "k_n");
    assert!(k.windows(2).all(|w| w[1] >= w[0]));
    for name in ["exact", "first", "second_rational"] {
        assert!(col(&t, name).iter().all(|v| (0.0..=1.0).contains(v)));
    }
    assert!(fs::read_to_string(dir.path().join("pd_0.5_3.csv")).unwrap().lines().nth(1).unwrap().contains("e-1"));
    assert!(!dir.path().join("pd_0.25_10.svg").exists());
}

#[test]
fn ngg_compare_respects_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "alphas = [0.5]\ntaus = [0.0, 1.0]\nn_max = 300\nplot_from = 10\n").unwrap();
    let out = bin()
        .args(["ngg-compare", "--quick", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    let t = Table::read(&dir.path().join("ngg_0.5_0.csv")).unwrap();
    assert_eq!(t.rows.len(), 50);
    let (n, k, mc) = (col(&t, "n"), col(&t, "k_n"), col(&t, "mc_estimate"));
    for i in 0..n.len() {
        assert_eq!(mc[i], k[i] * 0.5 / n[i]);
    }
    let t = Table::read(&dir.path().join("ngg_0.5_1.csv")).unwrap();
    let flags = col(&t, "range_flag");
    for (v, f) in col(&t, "mc_estimate").iter().zip(flags) {
        assert!(f == 1.0 || (0.0..=1.0).contains(v));
    }
    assert!(dir.path().join("ngg_0.5_1.svg").exists());
    assert!(dir.path().join("ngg_0.5_1.runtime.csv").exists());
}

#[test]
fn bad_configuration_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "alphas = [1.5]\n").unwrap();
    for cmd in ["pd-compare", "validate"] {
        let out = bin().args([cmd, "--config"]).arg(&cfg).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{cmd}");
    }
    let out = bin().args(["timing", "--nmax", "0"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
