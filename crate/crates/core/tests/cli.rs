use std::process::Command;

fn dynbatch() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_dynbatch"));
    c.env_remove("DYNBATCH_OUT_DIR");
    c
}

const CONFIG: &str = "
experiment.name = cli_smoke
run.algorithm = prox_gradient
run.horizon = 30
run.reps = 3
problem.dim = 4
problem.c = 0.2
oracle.kind = additive
oracle.sigma = 0.5
policy.n0 = 2
";

#[test]
fn run_sweep_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let configs = dir.path().join("configs");
    std::fs::create_dir(&configs).unwrap();
    std::fs::write(configs.join("a.conf"), CONFIG).unwrap();
    std::fs::write(configs.join("b.conf"), CONFIG.replace("cli_smoke", "cli_other")).unwrap();
    let out = dir.path().join("out");

    let status = dynbatch().arg("run").arg(configs.join("a.conf")).arg("--out").arg(&out).args(["--seed", "5", "--reps", "2"]).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let json = std::fs::read_to_string(out.join("cli_smoke.json")).unwrap();
    assert!(json.contains("\"run.seed\": \"5\"") && json.contains("\"replications\": 2"));

    let env_out = dir.path().join("env");
    let status = dynbatch().arg("sweep").arg(&configs).env("DYNBATCH_OUT_DIR", &env_out).status().unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(env_out.join("cli_smoke.csv").exists() && env_out.join("cli_other.csv").exists());

    let report = dynbatch().arg("report").arg(&env_out).output().unwrap();
    assert_eq!(report.status.code(), Some(0));
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.contains("cli_other: 30 iterations") && text.contains("dist^2 geometric ratio"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "policy.mu = 2\n").unwrap();
    assert_eq!(dynbatch().arg("run").arg(&bad).arg("--out").arg(dir.path()).status().unwrap().code(), Some(2));
    assert_eq!(dynbatch().args(["run", "/nonexistent/x.conf"]).status().unwrap().code(), Some(4));
    assert_eq!(dynbatch().args(["verify", "nope"]).status().unwrap().code(), Some(2));
    let ok = dynbatch().args(["verify", "theorem2", "--seed", "2"]).output().unwrap();
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8(ok.stdout).unwrap().contains("[PASS]"));
}
