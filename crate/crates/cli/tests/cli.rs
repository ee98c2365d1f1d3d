use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_logthh")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = run(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{args:?}: {e}: {}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap())
}

fn rows(v: &Value, table: &str) -> Vec<Vec<String>> {
    let t = v["tables"].as_array().unwrap().iter().find(|t| t["name"] == table).unwrap_or_else(|| panic!("no {table}"));
    t["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r.as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect())
        .collect()
}

#[test]
fn hom_counts() {
    let (v, code) = json(&["jcat", "hom-count", "--from", "0,0", "--to", "2,2"]);
    assert_eq!((rows(&v, "hom_count")[0][2].as_str(), code), ("2", 0));
    let (v, _) = json(&["jcat", "hom-count", "--from", "2,1", "--to", "1,2"]);
    assert_eq!(rows(&v, "hom_count")[0][2], "0");
}

#[test]
fn components_at_truncation_three() {
    let (v, _) = json(&["jcat", "components", "--trunc", "3"]);
    assert_eq!(rows(&v, "components").len(), 7);
}

#[test]
fn bar_homology_of_free_monoid() {
    let (v, code) = json(&["bar", "homology", "--monoid", "free1", "--p", "3", "--weights", "0..6", "--degmax", "4"]);
    assert_eq!(code, 0);
    for r in rows(&v, "homology") {
        let want = if r[0] == "0" { ["1", "0", "0", "0", "0"] } else { ["1", "1", "0", "0", "0"] };
        assert_eq!(&r[2..], &want, "weight {}", r[0]);
    }
}

#[test]
fn bar_homology_of_trivial_monoid_is_a_point() {
    let (v, code) = json(&["bar", "homology", "--monoid", "trivial"]);
    assert_eq!(code, 0);
    assert_eq!(rows(&v, "homology"), vec![vec!["0", "true", "1", "0", "0", "0", "0"]]);
}

#[test]
fn repletion_ranks_are_full() {
    let (v, code) = json(&["bar", "repletion", "--monoid", "free1", "--weights", "1..6", "--degmax", "2"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("PASS")));
    assert!(rows(&v, "repletion").iter().all(|r| r[5] == "true"));
}

#[test]
fn specseq_runs_pass() {
    for args in [["--scenario", "thh-z-mod-p", "--p", "3", "--degmax", "30"], ["--scenario", "thh-z-log-p", "--p", "2", "--degmax", "20"]] {
        let mut a = vec!["specseq", "run"];
        a.extend(args);
        let (v, code) = json(&a);
        assert_eq!((code, v["verdict"].as_str()), (0, Some("PASS")), "{args:?}");
        let names: Vec<&str> = v["tables"].as_array().unwrap().iter().map(|t| t["name"].as_str().unwrap()).collect();
        assert!(names.contains(&"E2") && names.contains(&"Einf"), "{names:?}");
        assert!(v["data"]["pages"].as_array().unwrap().len() >= 2);
    }
}

#[test]
fn solver_finds_one_assignment() {
    let (v, code) = json(&["specseq", "solve", "--scenario", "thh-z-mod-p", "--p", "3", "--degmax", "17"]);
    assert_eq!(code, 0);
    assert_eq!(rows(&v, "survivors"), vec![vec!["1,1"]]);
}

#[test]
fn outputs_are_byte_identical() {
    for fmt in ["json", "csv", "md"] {
        let args = ["specseq", "run", "--p", "2", "--degmax", "12", "--format", fmt];
        assert_eq!(run(&args).stdout, run(&args).stdout, "{fmt}");
    }
}

#[test]
fn config_file_sits_beneath_flags() {
    let dir = std::env::temp_dir().join(format!("logthh-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    std::fs::write(&cfg, "# defaults\nformat = csv\np = 5\ntrunc = 2\n").unwrap();
    let out = run(&["jcat", "components", "--config", cfg.to_str().unwrap()]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("components,")).count(), 5);
    let out = run(&["jcat", "components", "--config", cfg.to_str().unwrap(), "--trunc", "3"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().filter(|l| l.starts_with("components,")).count(), 7);
    let outfile = dir.join("out.md");
    let out = run(&["jcat", "components", "--format", "md", "--out", outfile.to_str().unwrap()]);
    assert!(out.status.success() && out.stdout.is_empty());
    assert!(std::fs::read_to_string(&outfile).unwrap().starts_with("# jcat components"));
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["jcat", "components", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn exit_codes() {
    let code = |a: &[&str]| run(a).status.code().unwrap();
    assert_eq!(code(&["jcat", "hom-count", "--from", "x", "--to", "1,1"]), 2);
    assert_eq!(code(&["specseq", "run", "--p", "4"]), 2);
    assert_eq!(code(&["nonsense"]), 2);
    assert_eq!(code(&["bar", "homology", "--weights", "0..3", "--bound", "1"]), 3);
    assert_eq!(code(&["hocolim", "sigma-free", "--space", "terminal", "--trunc", "2"]), 1);
    assert_eq!(code(&["hocolim", "sigma-free", "--space", "unit", "--trunc", "3"]), 0);

    let dir = std::env::temp_dir().join(format!("logthh-rules-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let rules = dir.join("rules.json");
    // `d(γ9) = μ1·[p]·γ5[dp]` has a nonzero square.
    std::fs::write(
        &rules,
        r#"[{"page":3,"generator":"[dp]","level":1,"image":[[1,[["λ1",1]]]]},
            {"page":3,"generator":"[dp]","level":2,"image":[[1,[["μ1",1],["[p]",1],["[dp]",5]]]]}]"#,
    )
    .unwrap();
    assert_eq!(code(&["specseq", "run", "--p", "3", "--degmax", "20", "--rules", rules.to_str().unwrap()]), 4);
    // Without the family the sequence stalls against the abutment.
    std::fs::write(&rules, "[]").unwrap();
    assert_eq!(code(&["specseq", "run", "--p", "3", "--degmax", "20", "--rules", rules.to_str().unwrap()]), 1);
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_logthh"))
        .args(["jcat", "components"])
        .env(logthh_cli::THREADS_ENV, "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let ok = Command::new(env!("CARGO_BIN_EXE_logthh"))
        .args(["jcat", "components"])
        .env(logthh_cli::THREADS_ENV, "1")
        .output()
        .unwrap();
    assert!(ok.status.success());
}

#[test]
fn pushout_and_nerve() {
    let (v, code) = json(&["homology", "pushout", "--d", "8", "--degmax", "6"]);
    assert_eq!((code, v["verdict"].as_str()), (0, Some("PASS")));
    let (v, _) = json(&["hocolim", "nerve", "--space", "free:1,1", "--trunc", "4"]);
    let h: Vec<String> = rows(&v, "homology").iter().map(|r| r[2].clone()).collect();
    assert_eq!(h, vec!["1", "0"]);
}
