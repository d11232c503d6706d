//! End-to-end tests of the command-line interface.

use std::process::Command;

fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_urysohn"))
}

#[test]
fn lists_presets_and_problems() {
    let out = binary().arg("list-presets").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["table-4.4", "table-4.5-analog", "table-4.6", "inverse-sum", "linear-half"] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn runs_preset_to_csv() {
    let out = binary()
        .args(["run", "--preset", "table-4.4"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "n,m,err_mod,delta_mod,err_iter,delta_iter,err_extrap,delta_extrap"
    );
    assert_eq!(lines.clone().count(), 5);
    // first row has no order or extrapolation cells
    let first = lines.next().unwrap();
    assert!(first.starts_with("2,256,"));
    assert!(first.ends_with(",,"));
}

#[test]
fn writes_markdown_report_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    let report_path = dir.path().join("report.md");
    std::fs::write(
        &config_path,
        r#"{
            "problem": "linear-half",
            "r": 1,
            "n_values": [2, 4],
            "quad_rho": 2,
            "m_rule": {"multiple": 2},
            "eval_grid_points": 51
        }"#,
    )
    .unwrap();
    let out = binary()
        .args(["run", "--config"])
        .arg(&config_path)
        .args(["--format", "markdown", "--output"])
        .arg(&report_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = std::fs::read_to_string(&report_path).unwrap();
    assert!(report.contains("| n | m |"));
    assert!(report.contains("problem=linear-half"));
}

#[test]
fn full_precision_flag_changes_cells() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("config.json");
    std::fs::write(
        &config_path,
        r#"{"problem": "inverse-sum", "r": 1, "n_values": [2], "quad_rho": 2,
            "m_rule": {"fixed": 8}, "eval_grid_points": 51}"#,
    )
    .unwrap();
    let run = |precision: &str| {
        let out = binary()
            .args(["run", "--config"])
            .arg(&config_path)
            .args(["--precision", precision])
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    let table = run("table");
    let full = run("full");
    assert_ne!(table, full);
    // table precision uses three significant digits
    let cell = table.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    assert!(
        cell.len() <= 8,
        "expected a 3-significant-digit cell, got {cell}"
    );
    let full_cell = full.lines().nth(1).unwrap().split(',').nth(2).unwrap();
    assert!(full_cell.len() > cell.len());
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();

    // unknown preset
    let out = binary()
        .args(["run", "--preset", "table-0.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // missing file
    let out = binary()
        .args(["run", "--config", "/no/such/file.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown key
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"problem": "linear-half", "r": 1, "n_values": [2],
        "quad_rho": 2, "m_rule": "square", "bogus": true}"#).unwrap();
    let out = binary().args(["run", "--config"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("config"));

    // unknown problem name
    let unknown = dir.path().join("unknown.json");
    std::fs::write(&unknown, r#"{"problem": "nope", "r": 1, "n_values": [2],
        "quad_rho": 2, "m_rule": "square"}"#).unwrap();
    let out = binary().args(["run", "--config"]).arg(&unknown).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solver_failure_exits_with_code_three() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("starved.json");
    // one Newton iteration cannot solve the nonlinear problem
    std::fs::write(
        &config_path,
        r#"{"problem": "inverse-sum", "r": 1, "n_values": [2], "quad_rho": 2,
            "m_rule": {"fixed": 8}, "newton": {"tol": 1e-15, "max_iters": 1},
            "eval_grid_points": 51}"#,
    )
    .unwrap();
    let out = binary()
        .args(["run", "--config"])
        .arg(&config_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("n = 2"));
}
