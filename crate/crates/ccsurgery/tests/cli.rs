use std::process::{Command, Output};

fn ccsurgery(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccsurgery")).args(args).output().expect("binary runs")
}

#[test]
fn params_passes() {
    let out = ccsurgery(&["params", "24_8_3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS"));
}

#[test]
fn trinomial_seed_is_an_input_error() {
    let dir = std::env::temp_dir().join(format!("ccsurgery-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("trinomial.toml");
    std::fs::write(
        &path,
        "label = \"bad\"\np = 3\nH_a = [[\"1+x+x^2\", \"x\"], [\"1\", \"x\"]]\nH_b = [[\"1\", \"x\"], [\"1\", \"x^2\"]]\n",
    )
    .unwrap();
    let out = ccsurgery(&["build", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn unknown_code_and_bad_flags_exit_2() {
    assert_eq!(ccsurgery(&["params", "no_such_code"]).status.code(), Some(2));
    assert_eq!(ccsurgery(&["params"]).status.code(), Some(2));
    assert_eq!(ccsurgery(&["merges", "24_8_3", "--a", "10;2"]).status.code(), Some(2));
    assert_eq!(ccsurgery(&["merges", "24_8_3", "--a", "101;010;111"]).status.code(), Some(2));
}

#[test]
fn unreached_schedule_label_fails_verification() {
    let out = ccsurgery(&["gadget", "cnot", "--schedule", "86x24"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(ccsurgery(&["gadget", "cnot", "--schedule", "62x84"]).status.code(), Some(0));
}

#[test]
fn json_reports_are_deterministic() {
    let args = ["distance", "24_8_3", "--trials", "200", "--seed", "5", "--json"];
    let a = ccsurgery(&args);
    let b = ccsurgery(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "ccsurgery-report/1");
    assert_eq!(v["rng_seed"], 5);
    assert_eq!(v["inputs_digest"].as_str().map(str::len), Some(64));
}

#[test]
fn out_file_matches_stdout_json() {
    let path = std::env::temp_dir().join(format!("ccsurgery-out-{}.json", std::process::id()));
    let out = ccsurgery(&["overhead", "136_8_14", "--json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), out.stdout);
    std::fs::remove_file(&path).ok();
}
