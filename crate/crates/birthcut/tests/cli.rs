use std::path::Path;
use std::process::Command;

fn run(args: &[&str], out: &Path) -> std::process::ExitStatus {
    Command::new(env!("CARGO_BIN_EXE_birthcut"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
        .status
}

fn csvs(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    v.sort();
    v
}

fn twice(args: &[&str]) {
    let base = std::env::temp_dir().join(format!("birthcut-cli-{}-{}", std::process::id(), args[0]));
    let (a, b) = (base.join("a"), base.join("b"));
    assert!(run(args, &a).success());
    assert!(run(args, &b).success());
    let (x, y) = (csvs(&a), csvs(&b));
    assert!(!x.is_empty());
    assert_eq!(x, y, "{args:?}");
    std::fs::remove_dir_all(&base).ok();
}

#[test]
fn equilibrium_is_deterministic() {
    twice(&["equilibrium", "--t", "1,0.8"]);
}

#[test]
fn universality_is_deterministic() {
    twice(&["universality", "--u", "1.3", "--n", "8,12", "--grid", "5"]);
}

#[test]
fn injected_fault_sets_the_exit_code() {
    let dir = std::env::temp_dir().join(format!("birthcut-cli-{}-fault", std::process::id()));
    let status = run(&["identities", "--inject-fault"], &dir);
    assert_eq!(status.code(), Some(1));
    let text = std::fs::read_to_string(dir.join("identities.csv")).unwrap();
    assert!(text.lines().any(|l| l.contains("corrupted") && l.ends_with("false")));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn half_integer_filling_is_refused() {
    let dir = std::env::temp_dir().join(format!("birthcut-cli-{}-half", std::process::id()));
    assert_eq!(run(&["universality", "--u", "1.5"], &dir).code(), Some(2));
}
