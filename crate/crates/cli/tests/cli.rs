use std::path::Path;
use std::process::{Command, Output};

use septensor_cli::tensors::redundant;

fn septensor(args: &[&str], config: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_septensor"));
    cmd.args(args).arg("--threads").arg("1");
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("binary runs")
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn reduce_reads_json_and_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("u.json");
    std::fs::write(&input, redundant(3, 6, 8, 5, 1).unwrap().to_json()).unwrap();
    let config = dir.path().join("reduce.cfg");
    std::fs::write(
        &config,
        format!("input = {}\nmethod = gram\neps = 1e-6\n", input.display()),
    )
    .unwrap();
    let out = dir.path().join("reduce.csv");

    let res = septensor(&["reduce", "--out", out.to_str().unwrap()], Some(&config));
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let csv = std::fs::read_to_string(&out).unwrap();
    assert!(csv.starts_with("# experiment: reduce"));
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "8");
    assert_eq!(rows[0][1], "5");
    assert!(rows[0][2].parse::<f64>().unwrap() < 1e-5);
}

#[test]
fn schulz_prints_trace_to_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("schulz.cfg");
    std::fs::write(&config, "m = 6\norder = 2\nd = 2\n").unwrap();
    let res = septensor(&["schulz-poisson"], Some(&config));
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    let rows = data_rows(&String::from_utf8(res.stdout).unwrap());
    assert!(rows.len() >= 2);
    let last: f64 = rows.last().unwrap()[1].parse().unwrap();
    assert!(last <= 1e-8);
}

#[test]
fn exit_codes_distinguish_failures() {
    let dir = tempfile::tempdir().unwrap();

    let bad_value = dir.path().join("bad.cfg");
    std::fs::write(&bad_value, "m = six\n").unwrap();
    assert_eq!(
        septensor(&["schulz-poisson"], Some(&bad_value))
            .status
            .code(),
        Some(2)
    );

    let unknown = dir.path().join("unknown.cfg");
    std::fs::write(&unknown, "m = 6\nbogus = 1\n").unwrap();
    assert_eq!(
        septensor(&["schulz-poisson"], Some(&unknown)).status.code(),
        Some(2)
    );

    let divergent = dir.path().join("divergent.cfg");
    std::fs::write(&divergent, "m = 6\norder = 2\nd = 2\nalpha = 10\n").unwrap();
    let res = septensor(&["schulz-poisson"], Some(&divergent));
    assert_eq!(
        res.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );

    let missing = dir.path().join("missing.cfg");
    assert_eq!(
        septensor(&["schulz-poisson"], Some(&missing)).status.code(),
        Some(2)
    );

    let small = dir.path().join("small.cfg");
    std::fs::write(&small, "m = 6\norder = 2\nd = 2\nmax_iters = 1\n").unwrap();
    let res = septensor(
        &["schulz-poisson", "--out", dir.path().to_str().unwrap()],
        Some(&small),
    );
    assert_eq!(res.status.code(), Some(1));
}
