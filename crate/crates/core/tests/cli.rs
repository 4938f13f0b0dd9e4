use std::path::Path;
use std::process::{Command, Output};

use polya_order::parse_csv;

fn polya(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polya"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(out: &str, key: &str) -> f64 {
    out.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
        .trim()
        .parse()
        .unwrap()
}

fn csv_column(out: &str, col: usize) -> Vec<f64> {
    out.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn pmf_table_and_formats() {
    let out = polya(&["pmf", "--n", "2", "--x", "0.5", "--c", "0.5", "--csv"]);
    assert!(out.status.success());
    let probs = csv_column(&stdout(&out), 1);
    assert_eq!(probs.len(), 3);
    assert!(probs.iter().all(|p| (p - 1.0 / 3.0).abs() < 1e-15));

    let out = polya(&["pmf", "--n", "3", "--x", "0", "--c", "0.1", "--csv"]);
    assert_eq!(csv_column(&stdout(&out), 1), vec![1.0, 0.0, 0.0, 0.0]);

    let out = polya(&[
        "pmf", "--n", "2", "--a", "1", "--b", "2", "--c", "1", "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let probs: Vec<f64> = serde_json::from_value(v["probs"].clone()).unwrap();
    // k=0: (2/3)(3/4), k=1: 2 (1/3)(2/4), k=2: (1/3)(2/4)
    let want = [0.5, 1.0 / 3.0, 1.0 / 6.0];
    assert!(probs.iter().zip(want).all(|(p, w)| (p - w).abs() < 1e-15));

    let out = polya(&["pmf", "--n", "2", "--x", "0.5", "--c", "0.5"]);
    assert!(stdout(&out).lines().count() == 4);
}

#[test]
fn pmf_rejects_incompatible_c() {
    let out = polya(&["pmf", "--n", "2", "--x", "0.5", "--c", "-0.6"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("compatibility"), "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn eval_examples() {
    let out = polya(&[
        "eval",
        "--f",
        "sq",
        "--op",
        "bernstein",
        "--n",
        "2",
        "--x",
        "0.5",
    ]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert_eq!(field(&s, "value"), 0.375);
    assert_eq!(field(&s, "error"), 0.125);
    assert_eq!(field(&s, "f(x)"), 0.25);

    let s = stdout(&polya(&[
        "eval", "--f", "sq", "--op", "rn", "--n", "2", "--x", "0.5",
    ]));
    assert_eq!(field(&s, "value"), 0.25);
    assert_eq!(field(&s, "error"), 0.0);

    let s = stdout(&polya(&[
        "eval", "--f", "id", "--op", "stancu", "--n", "5", "--x", "0.3", "--c", "1.0",
    ]));
    assert!((field(&s, "value") - 0.3).abs() < 1e-15);
    assert_eq!(field(&s, "error"), 0.0);

    let s = stdout(&polya(&[
        "eval", "--f", "sq", "--op", "general", "--n", "2", "--x", "0.5", "--c", "0.5",
    ]));
    assert!((field(&s, "value") - 5.0 / 12.0).abs() < 1e-15);
}

#[test]
fn eval_rejects_bad_combinations() {
    for args in [
        &[
            "eval", "--f", "sq", "--op", "stancu", "--n", "2", "--x", "0.5",
        ][..],
        &[
            "eval", "--f", "sq", "--op", "general", "--n", "2", "--x", "0.5",
        ],
        &[
            "eval",
            "--f",
            "sq",
            "--op",
            "bernstein",
            "--n",
            "2",
            "--x",
            "0.5",
            "--c",
            "0",
        ],
        &[
            "eval", "--f", "sq", "--op", "rn", "--n", "2", "--x", "0.5", "--c", "0",
        ],
        &[
            "eval",
            "--f",
            "nope",
            "--op",
            "bernstein",
            "--n",
            "2",
            "--x",
            "0.5",
        ],
        &[
            "eval", "--f", "sq", "--op", "lagrange", "--n", "2", "--x", "0.5",
        ],
        &["eval", "--f", "sq", "--op", "rn", "--n", "1", "--x", "0.5"],
        &[
            "eval",
            "--f",
            "sq",
            "--op",
            "bernstein",
            "--n",
            "2",
            "--x",
            "1.5",
        ],
    ] {
        assert_eq!(polya(args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn curve_examples() {
    let out = polya(&[
        "curve",
        "--f",
        "sq",
        "--n",
        "2",
        "--x",
        "0.5",
        "--c-grid",
        "-0.5,0,0.5",
    ]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert_eq!(s.lines().next(), Some("c,value,error"));
    let errors = csv_column(&s, 2);
    assert_eq!(errors[0], 0.0);
    assert_eq!(errors[1], 0.125);
    assert!((errors[2] - 1.0 / 6.0).abs() < 1e-15);

    let out = polya(&[
        "curve", "--f", "id", "--n", "7", "--x", "0.35", "--c-grid", "auto:6",
    ]);
    assert!(out.status.success());
    assert!(csv_column(&stdout(&out), 2).iter().all(|e| *e == 0.0));

    let out = polya(&[
        "curve", "--f", "abshalf", "--n", "10", "--x", "0.5", "--c-grid", "auto:8",
    ]);
    assert!(out.status.success());
    let s = stdout(&out);
    let errors = csv_column(&s, 2);
    assert_eq!(errors.len(), 8);
    assert!(errors.windows(2).all(|w| w[1] >= w[0] - 1e-12));
    assert_eq!(csv_column(&s, 0)[0], -0.5 / 9.0);
}

#[test]
fn curve_rejects_bad_grids() {
    for grid in ["0.5,0", "-0.6,0", "", "auto:0", "a,b"] {
        let out = polya(&[
            "curve", "--f", "sq", "--n", "2", "--x", "0.5", "--c-grid", grid,
        ]);
        assert_eq!(out.status.code(), Some(2), "{grid:?}");
    }
}

#[test]
fn curve_skips_assertion_for_nonconvex() {
    let out = polya(&[
        "curve", "--f", "sin", "--n", "6", "--x", "0.2", "--c-grid", "auto:5",
    ]);
    assert!(out.status.success());
}

#[test]
fn partition_prints_sequences() {
    let out = polya(&["partition", "--n", "5", "--k", "2", "--x", "1/3"]);
    assert!(out.status.success());
    let s = stdout(&out);
    assert!(s.contains("n_seq  2 4"), "{s}");
    assert!(s.contains("m_seq  1 3"), "{s}");
    assert!(s.contains("remap  5->4"), "{s}");

    let out = polya(&["partition", "--n", "5", "--k", "2", "--x", "1/3", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["raw_n"], serde_json::json!([2, 5]));

    for x in ["0.3", "3/2", "0/4"] {
        let out = polya(&["partition", "--n", "5", "--k", "2", "--x", x]);
        assert_eq!(out.status.code(), Some(2), "{x}");
    }
    let out = polya(&["partition", "--n", "5", "--k", "4", "--x", "1/3"]);
    assert_eq!(out.status.code(), Some(2));
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn verify_single_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "one.toml",
        "schema_version = 1\nn_list = [2]\nx_list = [0.5]\nc = [-0.5, 0.5]\nchecks = [\"convex-order\"]\n",
    );
    let out_csv = dir.path().join("report.csv");
    let out = polya(&["verify", &cfg, "--out", out_csv.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&out_csv).unwrap();
    let rows = parse_csv(&text).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].margin, 0.0);
    assert!(rows[0].pass);
    assert!(stdout(&out).contains("convex-order"));
}

#[test]
fn verify_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_csv = dir.path().join("r.csv");
    let out_csv = out_csv.to_str().unwrap();

    let bad = write(dir.path(), "bad.toml", "schema_version = 1\nn_list = [2\n");
    assert_eq!(
        polya(&["verify", &bad, "--out", out_csv]).status.code(),
        Some(2)
    );

    let version = write(
        dir.path(),
        "v.toml",
        "schema_version = 7\nn_list = [2]\nx_list = [0.5]\n",
    );
    assert_eq!(
        polya(&["verify", &version, "--out", out_csv]).status.code(),
        Some(2)
    );

    let nonconvex = write(
        dir.path(),
        "nc.toml",
        "schema_version = 1\nn_list = [3]\nx_list = [0.5]\nfunction_ids = [\"sin\"]\n\
         checks = [\"error-monotone\"]\nc = { count = 4, max = 5.0 }\n",
    );
    let out = polya(&["verify", &nonconvex, "--out", out_csv]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sin"));

    let missing = dir.path().join("missing.toml");
    assert_eq!(
        polya(&["verify", missing.to_str().unwrap(), "--out", out_csv])
            .status
            .code(),
        Some(2)
    );

    // A tolerance no margin can meet makes every residual cell fail.
    let strict = write(
        dir.path(),
        "strict.toml",
        "schema_version = 1\nn_list = [40]\nx_list = [0.35]\nc = [0.0, 3.0]\n\
         checks = [\"kozniewska\"]\n[tolerances]\nresidual = -1.0\n",
    );
    let out = polya(&["verify", &strict, "--out", out_csv]);
    assert_eq!(out.status.code(), Some(1));
    let rows = parse_csv(&std::fs::read_to_string(out_csv).unwrap()).unwrap();
    assert_eq!(rows.iter().filter(|r| !r.pass).count(), 2);
}

#[test]
fn verify_default_config_passes_with_any_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    let config = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/default.toml");
    let mut reports = Vec::new();
    for threads in ["1", "3", "0"] {
        let out_csv = dir.path().join(format!("t{threads}.csv"));
        let out = Command::new(env!("CARGO_BIN_EXE_polya"))
            .args(["verify", config, "--out", out_csv.to_str().unwrap()])
            .env("POLYA_THREADS", threads)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        reports.push(std::fs::read(&out_csv).unwrap());
    }
    assert!(reports.windows(2).all(|w| w[0] == w[1]));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(polya(&[]).status.code(), Some(2));
    assert_eq!(polya(&["pmf", "--n", "2"]).status.code(), Some(2));
    assert_eq!(
        polya(&["pmf", "--n", "2", "--x", "0.5", "--a", "0.5", "--b", "0.5", "--c", "0"])
            .status
            .code(),
        Some(2)
    );
}
