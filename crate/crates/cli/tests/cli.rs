use std::path::PathBuf;
use std::process::{Command, Output};

fn goldie(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_goldie")).args(args).output().expect("binary runs")
}

fn instance(name: &str) -> String {
    let mut p = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    p.push("../../instances");
    p.push(name);
    p.to_string_lossy().into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn radical_of_z4() {
    let out = goldie(&["radical", &instance("z4.txt")]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(&lines[..3], &["L = <2>", "prime_radical = <2>", "nilpotency_index = 2"]);
}

#[test]
fn product_with_zero_is_zero() {
    let out = goldie(&["product", &instance("z4.txt"), "--left", "<0>", "--right", "<1>"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "<0>");
    let out = goldie(&["product", &instance("z4.txt"), "--left", "<2>", "--right", "<0>"]);
    assert_eq!(stdout(&out).trim(), "<0>");
}

#[test]
fn products_and_powers_on_z4() {
    let out = goldie(&["product", &instance("z4.txt"), "--left", "<2>", "--right", "<1>"]);
    assert_eq!(stdout(&out).trim(), "<2>");
    let out = goldie(&["power", &instance("z4.txt"), "--sub", "<2>"]);
    let text = stdout(&out);
    assert!(text.contains("N^2 = <0>") && text.contains("nilpotency_index = 2"), "{text}");
}

#[test]
fn oracle_agrees_with_the_main_path() {
    for (left, right) in [("<2>", "<2>"), ("<2>", "<1>"), ("<1>", "<2>")] {
        let fast = goldie(&["product", &instance("z4.txt"), "--left", left, "--right", right]);
        let slow = goldie(&["oracle", &instance("z4.txt"), "--op", "product", "--left", left, "--right", right]);
        assert_eq!(stdout(&fast), stdout(&slow));
    }
}

#[test]
fn every_shipped_instance_validates() {
    for name in ["z4.txt", "z6.txt", "t2f2.txt", "z2_z4.txt", "m2f2.txt"] {
        let out = goldie(&["validate", &instance(name)]);
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let text = stdout(&goldie(&["validate", &instance("z2_z4.txt")]));
    assert!(text.contains("quasi_projective = false"), "{text}");
}

#[test]
fn exit_codes() {
    assert_eq!(goldie(&["product", &instance("z4.txt"), "--left", "<zz>", "--right", "<1>"]).status.code(), Some(2));
    assert_eq!(goldie(&["verify", "--budget", "0"]).status.code(), Some(2));
    assert_eq!(goldie(&["no-such-command"]).status.code(), Some(2));

    let dir = std::env::temp_dir().join(format!("goldie-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, "garbage\n").unwrap();
    assert_eq!(goldie(&["validate", bad.to_str().unwrap()]).status.code(), Some(3));
    let missing_unit = std::fs::read_to_string(instance("z4.txt")).unwrap().replace("unit = 1", "");
    std::fs::write(&bad, missing_unit).unwrap();
    assert_eq!(goldie(&["validate", bad.to_str().unwrap()]).status.code(), Some(3));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_with_budget_fifty_succeeds() {
    let out = goldie(&["verify", "--corpus-seed", "0", "--budget", "50", "--jobs", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains("fail_total=0"));
}

#[test]
fn verify_output_is_reproducible() {
    let a = goldie(&["verify", "--corpus-seed", "0", "--budget", "40", "--jobs", "4"]);
    let b = goldie(&["verify", "--corpus-seed", "0", "--budget", "40", "--jobs", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn search_reports_counterexamples_as_findings() {
    let out = goldie(&["search", "--statement", "COR-NESL", "--drop", "quasi-projective", "--budget", "20"]);
    let text = stdout(&out);
    assert!(text.contains("#3 Z4/Z2+Z4\tPASS"), "{text}");
    assert!(text.contains("#16 Z8/Z2+Z8\tFAIL"), "{text}");
    assert_eq!(out.status.code(), Some(1));
    let out = goldie(&["search", "--statement", "LEM-DCCANNR", "--drop", "quasi-projective"]);
    assert_eq!(out.status.code(), Some(2));
}
