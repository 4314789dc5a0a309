use std::path::Path;
use std::process::{Command, Output};

use netdesign::criteria::{evaluate, Design};
use netdesign::netgraph::{load_edge_list, read_edge_list};
use netdesign::optimizer::Balance;

fn netdesign(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_netdesign"))
        .args(args)
        .env_remove("NETDESIGN_TIME_BUDGET")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn gen_network_is_deterministic() {
    let a = stdout(&netdesign(&[
        "gen-network",
        "--nodes",
        "50",
        "--density",
        "0.1",
        "--seed",
        "7",
    ]));
    let b = stdout(&netdesign(&[
        "gen-network",
        "--nodes",
        "50",
        "--density",
        "0.1",
        "--seed",
        "7",
    ]));
    assert_eq!(a, b);
    let net = load_edge_list(&a).unwrap();
    assert!((net.edge_count() as f64 - 122.5).abs() <= 40.0);
    assert_eq!(
        stdout(&netdesign(&[
            "gen-network",
            "--nodes",
            "2",
            "--density",
            "0.9",
            "--seed",
            "1"
        ]))
        .trim(),
        "0 1"
    );
}

#[test]
fn modified_design_respects_balance() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("net.txt");
    let design = dir.path().join("design.csv");
    let report = dir.path().join("report.json");
    stdout(&netdesign(&[
        "gen-network",
        "--nodes",
        "50",
        "--density",
        "0.1",
        "--seed",
        "7",
        "-o",
        path_str(&edges),
    ]));
    stdout(&netdesign(&[
        "design",
        "--network",
        path_str(&edges),
        "--method",
        "modified",
        "--alpha",
        "0.6",
        "-o",
        path_str(&design),
        "--report",
        path_str(&report),
    ]));
    let net = read_edge_list(&edges).unwrap();
    let text = std::fs::read_to_string(&design).unwrap();
    assert!(text.starts_with("node_id,assignment\n"));
    let x = Design::from_csv(&text, &net).unwrap();
    assert!(Balance::calibrated(&net, 0.6).unwrap().is_satisfied(&x));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["method"], "modified");
    assert_eq!(doc["solve"]["status"], "optimal");
}

#[test]
fn original_design_on_path() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("p2.txt");
    std::fs::write(&edges, "0 1\n").unwrap();
    let csv = stdout(&netdesign(&[
        "design",
        "--network",
        path_str(&edges),
        "--method",
        "original",
        "--rho",
        "0.2",
    ]));
    assert_eq!(csv, "node_id,assignment\n0,1\n1,-1\n");
}

#[test]
fn random_design_is_reproducible() {
    let run = || {
        stdout(&netdesign(&[
            "design",
            "--nodes",
            "30",
            "--density",
            "0.2",
            "--method",
            "random",
            "--seed",
            "4",
        ]))
    };
    assert_eq!(run(), run());
}

#[test]
fn evaluate_round_trips_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("net.txt");
    let design = dir.path().join("d.csv");
    stdout(&netdesign(&[
        "gen-network",
        "--nodes",
        "20",
        "--density",
        "0.3",
        "--seed",
        "2",
        "-o",
        path_str(&edges),
    ]));
    stdout(&netdesign(&[
        "design",
        "--network",
        path_str(&edges),
        "--method",
        "original",
        "--rho",
        "0.3",
        "-o",
        path_str(&design),
    ]));
    let table = stdout(&netdesign(&[
        "evaluate",
        "--network",
        path_str(&edges),
        "--design",
        path_str(&design),
        "--rhos",
        "0,0.15,0.3",
    ]));
    let net = read_edge_list(&edges).unwrap();
    let x = Design::from_csv(&std::fs::read_to_string(&design).unwrap(), &net).unwrap();
    let mut lines = table.lines();
    assert_eq!(
        lines.next(),
        Some("rho,d_value,upper_bound,efficiency,var_beta_over_sigma2")
    );
    for (line, rho) in lines.zip([0.0, 0.15, 0.3]) {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let r = evaluate(&net, &x, rho).unwrap();
        assert_eq!(
            cols,
            vec![rho, r.d_value, r.upper_bound, r.efficiency, r.beta_variance_over_sigma2]
        );
    }
}

#[test]
fn evaluate_examples() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("p2.txt");
    let design = dir.path().join("d.csv");
    std::fs::write(&edges, "0 1\n").unwrap();
    std::fs::write(&design, "node_id,assignment\n0,1\n1,-1\n").unwrap();
    let table = stdout(&netdesign(&[
        "evaluate",
        "--network",
        path_str(&edges),
        "--design",
        path_str(&design),
        "--rhos",
        "0,0.1,0.2,0.3",
    ]));
    for line in table.lines().skip(1) {
        let eff: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
        assert!((eff - 1.0).abs() < 1e-12, "{line}");
    }

    std::fs::write(&design, "node_id,assignment\n0,1\n1,1\n").unwrap();
    let table = stdout(&netdesign(&[
        "evaluate",
        "--network",
        path_str(&edges),
        "--design",
        path_str(&design),
    ]));
    assert!(table.lines().skip(1).all(|l| l.split(',').nth(3) == Some("0")));

    let table = stdout(&netdesign(&[
        "evaluate",
        "--nodes",
        "50",
        "--density",
        "0.1",
        "--seed",
        "7",
        "--method",
        "random",
        "--expected",
        "--rhos",
        "0",
    ]));
    let eff: f64 = table
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(3)
        .unwrap()
        .parse()
        .unwrap();
    assert!((eff - 0.98).abs() <= 0.01, "{eff}");
}

#[test]
fn simulate_noiseless_has_zero_variance() {
    let dir = tempfile::tempdir().unwrap();
    let est = dir.path().join("est.csv");
    let out = stdout(&netdesign(&[
        "simulate",
        "--nodes",
        "20",
        "--density",
        "0.2",
        "--method",
        "modified",
        "--reps",
        "5",
        "--noiseless",
        "--estimates",
        path_str(&est),
    ]));
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[0], "modified");
    assert_eq!(row[6].parse::<f64>().unwrap(), 0.0);
    assert_eq!(std::fs::read_to_string(&est).unwrap().lines().count(), 6);
}

#[test]
fn simulate_random_averages_designs() {
    let out = stdout(&netdesign(&[
        "simulate",
        "--nodes",
        "20",
        "--density",
        "0.2",
        "--method",
        "random",
        "--fit",
        "lm",
        "--reps",
        "20",
        "--random-designs",
        "4",
        "--seed",
        "1",
    ]));
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..6], &["random", "lm", "0.2", "20", "4", "0"]);
    assert!(row[6].parse::<f64>().unwrap() > 0.0);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "method = \"original\"\nrho = 0.2\n[network.generate]\nn = 12\np = 0.4\nseed = 3\n",
    )
    .unwrap();
    let from_file = stdout(&netdesign(&["design", "--config", path_str(&cfg)]));
    let overridden = stdout(&netdesign(&[
        "design",
        "--config",
        path_str(&cfg),
        "--method",
        "random",
        "--seed",
        "5",
    ]));
    assert_eq!(from_file.lines().count(), 13);
    assert_ne!(from_file, overridden);
}

#[test]
fn combine_mirror_clusters() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("c.txt");
    let d1 = dir.path().join("d1.csv");
    let d2 = dir.path().join("d2.csv");
    std::fs::write(&edges, "a b\nb c\n").unwrap();
    std::fs::write(&d1, "node_id,assignment\na,1\nb,1\nc,-1\n").unwrap();
    std::fs::write(&d2, "node_id,assignment\na,-1\nb,-1\nc,1\n").unwrap();
    let report = dir.path().join("r.json");
    let e = path_str(&edges);
    let out = netdesign(&[
        "combine",
        "--clusters",
        e,
        e,
        "--designs",
        path_str(&d1),
        path_str(&d2),
        "--report",
        path_str(&report),
    ]);
    let csv = stdout(&out);
    assert_eq!(csv.lines().count(), 7);
    assert!(csv.contains("0:a,1") && csv.contains("1:a,-1"));
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["value"], 0);

    let single = stdout(&netdesign(&["combine", "--clusters", e, "--designs", path_str(&d2)]));
    assert_eq!(single, std::fs::read_to_string(&d2).unwrap());

    let mismatch = netdesign(&["combine", "--clusters", e, e, "--designs", path_str(&d1)]);
    assert_eq!(mismatch.status.code(), Some(1));
}

#[test]
fn render_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("t.txt");
    let design = dir.path().join("d.csv");
    std::fs::write(&edges, "0 1\n1 2\n0 2\n").unwrap();
    std::fs::write(&design, "node_id,assignment\n0,1\n1,1\n2,-1\n").unwrap();
    let args = [
        "render",
        "--network",
        path_str(&edges),
        "--design",
        path_str(&design),
        "--seed",
        "3",
    ];
    let a = stdout(&netdesign(&args));
    assert_eq!(a, stdout(&netdesign(&args)));
    assert!(a.starts_with("<?xml"));
    assert_eq!(a.matches("#d62728").count(), 2);
    assert_eq!(a.matches("#1f77b4").count(), 1);
}

#[test]
fn bench_modified_n20() {
    let out = stdout(&netdesign(&[
        "bench",
        "--nodes",
        "20",
        "--methods",
        "modified",
        "--time-budget",
        "60",
    ]));
    let row: Vec<&str> = out.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(&row[..4], &["modified", "20", "0.1", "0.6"]);
    assert!(row[4].parse::<f64>().unwrap() < 60.0);
    assert_eq!(row[5], "0");
}

#[test]
fn exit_codes() {
    assert_eq!(netdesign(&["design", "--nodes", "5"]).status.code(), Some(1));
    assert_eq!(netdesign(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(
        netdesign(&["design", "--nodes", "30", "--density", "0.2", "--solver", "brute"])
            .status
            .code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("k.txt");
    std::fs::write(&edges, "0 1\n").unwrap();
    let single_level = dir.path().join("d.csv");
    std::fs::write(&single_level, "node_id,assignment\n0,1\n1,1\n").unwrap();
    let out = netdesign(&[
        "simulate",
        "--network",
        path_str(&edges),
        "--design",
        path_str(&single_level),
        "--reps",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(2));

    let big = dir.path().join("big.txt");
    std::fs::write(
        &big,
        netdesign(&["gen-network", "--nodes", "80", "--density", "0.1", "--seed", "1"]).stdout,
    )
    .unwrap();
    let out = netdesign(&[
        "design",
        "--network",
        path_str(&big),
        "--method",
        "modified",
        "--node-limit",
        "100",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("node_id,assignment\n"));
}

#[test]
fn env_sets_default_budget() {
    let out = Command::new(env!("CARGO_BIN_EXE_netdesign"))
        .args(["design", "--nodes", "10", "--density", "0.4"])
        .env("NETDESIGN_TIME_BUDGET", "soon")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn lp_export() {
    let dir = tempfile::tempdir().unwrap();
    let lp = dir.path().join("m.lp");
    stdout(&netdesign(&[
        "design",
        "--nodes",
        "10",
        "--density",
        "0.4",
        "--method",
        "modified",
        "--lp",
        path_str(&lp),
    ]));
    let text = std::fs::read_to_string(&lp).unwrap();
    assert!(text.contains("Minimize") && text.contains("balance_hi:") && text.ends_with("End\n"));
}
