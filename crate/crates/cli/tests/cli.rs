use std::path::Path;
use std::process::{Command, Output};

fn rgs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rgs"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

const SMALL_SWEEP: &[&str] = &["sweep", "--n", "20,40,80", "--k", "1,5,10", "--l-over-latt", "10,100"];

#[test]
fn sweep_is_byte_identical_across_runs_and_thread_counts() {
    let a = rgs(SMALL_SWEEP);
    let mut two_threads = SMALL_SWEEP.to_vec();
    two_threads.extend(["--threads", "2", "--seed", "99"]);
    let b = rgs(&two_threads);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("n,k,L_over_Latt,p_f,eps,p_s,expected_ebits,rate_per_photon,scheme\n"));
    let rows = csv_rows(&text);
    // (n, k <= n) pairs per distance, plus one complete-graph row per n
    assert_eq!(rows.len(), 2 * (3 * 3 + 3));
    assert!(rows.iter().any(|r| r[8] == "crgs" && r[1] == "1"));
}

#[test]
fn sweep_json_mirrors_csv() {
    let csv = stdout(&rgs(SMALL_SWEEP));
    let mut args = SMALL_SWEEP.to_vec();
    args.extend(["--format", "json"]);
    let json: serde_json::Value = serde_json::from_str(&stdout(&rgs(&args))).unwrap();
    let rows = csv_rows(&csv);
    let objs = json.as_array().unwrap();
    assert_eq!(objs.len(), rows.len());
    for (obj, row) in objs.iter().zip(&rows) {
        assert_eq!(obj["n"].as_u64().unwrap().to_string(), row[0]);
        assert_eq!(obj["p_s"].as_f64().unwrap(), row[5].parse::<f64>().unwrap());
        assert_eq!(obj["scheme"].as_str().unwrap(), row[8]);
    }
}

#[test]
fn empty_or_bad_grids_are_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("empty.toml");
    std::fs::write(&cfg, "[sweep]\nn = []\n").unwrap();
    let o = rgs(&["--config", cfg.to_str().unwrap(), "sweep"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("empty"));
    assert_eq!(rgs(&["sweep", "--l-over-latt", "0.55"]).status.code(), Some(1));
    assert_eq!(rgs(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(rgs(&["--format", "xml", "sweep"]).status.code(), Some(1));
    assert_eq!(rgs(&["--threads", "0", "verify"]).status.code(), Some(1));
    assert_eq!(rgs(&["--help"]).status.code(), Some(0));
}

#[test]
fn config_file_and_flag_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        "format = \"json\"\n[treecode]\nbranch = [[2, 3, 2]]\neps = [0.1, 0.2]\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let from_file: serde_json::Value = serde_json::from_str(&stdout(&rgs(&["--config", c, "treecode"]))).unwrap();
    assert_eq!(from_file.as_array().unwrap().len(), 2);
    assert_eq!(from_file[0]["branch"], "2,3,2");
    let flagged = stdout(&rgs(&["--config", c, "--format", "csv", "treecode", "--eps", "0.3"]));
    assert_eq!(flagged.lines().count(), 2);
    assert!(flagged.lines().nth(1).unwrap().starts_with("\"2,3,2\",0.3,"));
    std::fs::write(&cfg, "[treecode]\nunknown = 1\n").unwrap();
    assert_eq!(rgs(&["--config", c, "treecode"]).status.code(), Some(1));
    assert_eq!(rgs(&["--config", "/nonexistent/run.toml", "treecode"]).status.code(), Some(1));
}

#[test]
fn simulate_verifies_every_decoded_trial() {
    let o = rgs(&["simulate", "--k", "2", "--n", "4", "--n-r", "2", "--trials", "500", "--seed", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 500);
    let decoded: Vec<_> = rows.iter().filter(|r| r[4] == "true").collect();
    assert!(!decoded.is_empty());
    assert!(decoded.iter().all(|r| r[5] == "true"));
    let err = stderr(&o);
    assert!(err.contains("verified_rate=1"), "{err}");
    assert!(err.contains("full_rank_rate="));
}

#[test]
fn simulate_without_stations() {
    let o = rgs(&["simulate", "--k", "2", "--n", "3", "--n-r", "0", "--trials", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert!(rows.iter().all(|r| r[4] == "true" && r[5] == "true"));
}

#[test]
fn oversize_simulation_is_refused() {
    for args in [
        ["simulate", "--k", "5", "--n", "8", "--n-r", "1"],
        ["simulate", "--k", "2", "--n", "9", "--n-r", "1"],
        ["simulate", "--k", "2", "--n", "4", "--n-r", "5"],
    ] {
        let o = rgs(&args);
        assert_eq!(o.status.code(), Some(3), "{args:?}");
        assert!(o.stdout.is_empty());
    }
}

#[test]
fn verify_passes_and_detects_bad_q() {
    let o = rgs(&["verify"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r[3] == "true"));
    assert_eq!(rgs(&["verify", "--inject-bad-q"]).status.code(), Some(2));
    let long = rgs(&["verify", "--trials", "1000"]);
    assert_eq!(long.status.code(), Some(0));
    assert!(stdout(&long).contains("random_fusion,1000,0,true"));
}

#[test]
fn treecode_default_curves() {
    let o = rgs(&["treecode", "--branch", "5,11,4", "--branch", "2,3,2", "--eps", "0,0.1,0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("branch,eps,p_x,p_z"));
    assert_eq!(text.lines().count(), 1 + 6);
    assert!(text.contains("\"5,11,4\",0.0,1.0,1.0"));
    assert_eq!(rgs(&["treecode", "--eps", "1.5"]).status.code(), Some(1));
    assert_eq!(rgs(&["treecode", "--branch", "2,0"]).status.code(), Some(1));
}

#[test]
fn ldpc_table_schema() {
    let args = [
        "ldpc", "--n", "40", "--k", "10", "--p-bsc", "0,0.05", "--p-bec", "0.1,0.3", "--trials", "20",
    ];
    let o = rgs(&args);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("p_bsc,p_bec,failure_rate,ci_low,ci_high,n,k,trials"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4);
    for r in &rows {
        let (rate, lo, hi): (f64, f64, f64) = (r[2].parse().unwrap(), r[3].parse().unwrap(), r[4].parse().unwrap());
        assert!(lo <= rate && rate <= hi);
        assert_eq!(&r[5..], ["40", "10", "20"]);
    }
    assert_eq!(rgs(&args).stdout, o.stdout);
    assert_eq!(rgs(&["ldpc", "--n", "10", "--k", "3"]).status.code(), Some(1));
}

#[test]
fn emitters_table() {
    let o = rgs(&["emitters", "--k", "1,2,3,4", "--n", "4,6", "--instances", "5", "--ordering", "a,b"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("k,n,ordering,h_max"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 4 * 2 * 2);
    for r in &rows {
        let k: usize = r[0].parse().unwrap();
        let h: usize = r[3].parse().unwrap();
        match r[2].as_str() {
            "a" => assert!(h == k || h == k + 1),
            "b" => assert!(h <= 2 * k + 1),
            other => panic!("unexpected ordering {other}"),
        }
    }
    assert_eq!(rgs(&["emitters", "--ordering", "c"]).status.code(), Some(1));
}

#[test]
fn writes_to_out_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("curves.csv");
    let o = rgs(&["--out", out.to_str().unwrap(), "treecode", "--eps", "0.2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let written = std::fs::read_to_string(Path::new(&out)).unwrap();
    assert_eq!(written, stdout(&rgs(&["treecode", "--eps", "0.2"])));
}
