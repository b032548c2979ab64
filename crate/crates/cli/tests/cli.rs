use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn adams(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adams")).current_dir(root()).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn ext_json_has_w1() {
    let o = adams(&["ext", "--algebra", "A(1)", "--module", "fixtures/F2.mod", "--smax", "8", "--tmax", "20", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let dots = v["dots"].as_array().unwrap();
    assert!(dots.iter().any(|d| d["stem"] == 8 && d["s"] == 4));
    assert!(v["edges"].as_array().unwrap().iter().any(|e| e["kind"] == "h1"));
}

#[test]
fn ext_text_grid() {
    let o = adams(&["ext", "--module", "fixtures/F2.mod", "--smax", "3", "--tmax", "8"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "  2|  1     1"), "{text}");
}

#[test]
fn odd_module_resolves() {
    let o = adams(&["resolve", "--module", "fixtures/F3.mod", "--smax", "3", "--tmax", "12"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("s=1: 2 generators [1 5]"), "{}", stdout(&o));
}

#[test]
fn delta_of_the_cofiber_of_two() {
    let o = adams(&["delta", "--ses", "fixtures/h0.ses", "--smax", "4", "--tmax", "14"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "0 1 1"), "{text}");
    assert!(text.contains("long exact sequence exact"));
    let y = adams(&["delta", "--ses", "fixtures/h0.ses", "--smax", "4", "--tmax", "14", "--route", "yoneda"]);
    assert_eq!(stdout(&y), text);
}

#[test]
fn d2compose_shares_the_middle_term() {
    let o = adams(&["d2compose", "--inner", "fixtures/h0_shifted.ses", "--outer", "fixtures/h0.ses", "--smax", "4", "--tmax", "14"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).lines().any(|l| l == "0 2 1"), "{}", stdout(&o));
    let bad = adams(&["d2compose", "--inner", "fixtures/h0.ses", "--outer", "fixtures/h0.ses", "--smax", "2", "--tmax", "8"]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn jay_check_passes() {
    let o = adams(&["jay", "--prime", "2", "--variant", "j2", "--nmax", "40", "--check"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("# check passed"));
}

#[test]
fn jay_check_flags_the_split_extension() {
    let o = adams(&["jay", "--prime", "2", "--variant", "j2", "--nmax", "10", "--smax", "12", "--split", "--check"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("abutment fails in stem 7"));
}

#[test]
fn jay_writes_charts() {
    let dir = std::env::temp_dir().join(format!("adams-cli-{}", std::process::id()));
    let svg = dir.join("jp.svg");
    let o = adams(&[
        "jay", "--prime", "3", "--variant", "jp", "--nmax", "20", "--json", dir.to_str().unwrap(), "--svg", svg.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let einf = dir.join("jp-Einf.json");
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let t = adams(&["chart", "--in", einf.to_str().unwrap(), "--text"]);
    assert_eq!(t.status.code(), Some(0));
    assert!(stdout(&t).starts_with("# p=3"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn oracle_check_agrees() {
    let o = adams(&["oracle-check", "--algebra", "A(1)", "--module", "fixtures/F2.mod", "--smax", "4", "--tmax", "14"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn config_window_applies() {
    let o = adams(&["--config", "fixtures/config.toml", "ext", "--module", "fixtures/F2.mod", "--smax", "4", "--tmax", "60", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(v["dots"].as_array().unwrap().iter().all(|d| d["stem"].as_i64().unwrap() <= 40));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    assert_eq!(adams(&["ext", "--module", "fixtures/F2.mod"]).status.code(), Some(2));
    assert_eq!(adams(&["jay", "--prime", "5", "--variant", "j2", "--nmax", "4"]).status.code(), Some(2));
    assert_eq!(adams(&["ext", "--module", "fixtures/h0.ses", "--smax", "1", "--tmax", "4"]).status.code(), Some(2));
    assert_eq!(adams(&["chart", "--in", "fixtures/config.toml", "--text"]).status.code(), Some(2));
}
