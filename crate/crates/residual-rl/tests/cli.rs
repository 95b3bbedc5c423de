//! Exit-code and output contract of the `resrl` binary:
//! 0 on success, 1 on usage errors, 2 on runtime failures.

use std::process::Command;

fn resrl() -> Command {
    Command::new(env!("CARGO_BIN_EXE_resrl"))
}

#[test]
fn missing_subcommand_is_usage_error() {
    let out = resrl().output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("usage"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let out = resrl().args(["train", "--frobnicate", "3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_config_value_is_usage_error() {
    let out = resrl()
        .args(["train", "--env", "not_an_env", "--steps", "10"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("env"));
}

#[test]
fn summarize_missing_dir_is_runtime_error() {
    let out = resrl()
        .args(["summarize", "--out", "/nonexistent/definitely/missing"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn eval_linear_roundtrip_through_cli() {
    let dir = std::env::temp_dir().join("residual_rl_cli_test");
    let _ = std::fs::remove_dir_all(&dir);
    let out = resrl()
        .args([
            "eval-linear",
            "--env",
            "star",
            "--variant",
            "semi_gradient",
            "--steps",
            "20000",
            "--seeds",
            "0,1",
            "--out",
            dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("seed_0.csv").exists());
    assert!(dir.join("seed_1.csv").exists());
    assert!(dir.join("summary.json").exists());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("diverged"), "expected divergence report, got: {stdout}");

    // The summarize subcommand rebuilds the summary from the CSVs.
    let out = resrl()
        .args(["summarize", "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let _ = std::fs::remove_dir_all(&dir);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = std::env::temp_dir().join("residual_rl_cli_cfg_test");
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    let cfg_path = dir.join("run.cfg");
    std::fs::write(
        &cfg_path,
        "[experiment]\nkind = model_free\nenv = pendulum\nsteps = 600\n\
         eval_interval = 300\neval_episodes = 2\nseeds = 5\n\
         [agent]\nhidden = 8,8\nwarmup = 100\n",
    )
    .unwrap();
    let out = resrl()
        .args([
            "train",
            "--config",
            cfg_path.to_str().unwrap(),
            "--variant",
            "bi_res",
            "--eta",
            "0.05",
            "--out",
            dir.join("results").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.join("results/seed_5.csv").exists());
    let summary = std::fs::read_to_string(dir.join("results/summary.json")).unwrap();
    assert!(summary.contains("\"variant\": \"bi_res\""), "{summary}");
    let _ = std::fs::remove_dir_all(&dir);
}
