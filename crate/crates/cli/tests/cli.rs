use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use crjet_core::input;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn crjet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crjet")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut all = args.to_vec();
    all.push("--json");
    let out = crjet(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&out.stdout));
    });
    (out.status.code().unwrap(), v)
}

fn path(name: &str) -> String {
    data(name).display().to_string()
}

#[test]
fn report_on_base_hypersurface() {
    let (code, v) = run_json(&["report", &path("m0.toml")]);
    assert_eq!(code, 0);
    let inv = &v["invariants"];
    assert_eq!(inv["m"], 1);
    assert_eq!(inv["r"], 2);
    assert_eq!(inv["ell"], 1);
    assert_eq!(inv["essential"], "certified-essential(1)");
    assert_eq!(inv["filtration_ranks"], serde_json::json!([0, 1]));
    assert_eq!(v["schema_version"], 1);
}

#[test]
fn report_on_generated_targets() {
    for f in ["arctan.toml", "power_target_2.toml", "power_target_3.toml", "power_target_4.toml"] {
        let (code, _) = run_json(&["report", &path(f)]);
        assert_eq!(code, 0, "{f}");
    }
    let (_, v) = run_json(&["report", &path("arctan.toml")]);
    assert_eq!(v["invariants"]["m"], 2);
    assert_eq!(v["invariants"]["r"], 2);
}

#[test]
fn exit_codes_for_negative_inputs() {
    assert_eq!(crjet(&["report", &path("not_normal.toml")]).status.code(), Some(1));
    assert_eq!(crjet(&["report", &path("wrong_m.toml")]).status.code(), Some(2));
    assert_eq!(crjet(&["report", &path("bad_syntax.toml")]).status.code(), Some(3));
    assert_eq!(crjet(&["report", &path("unknown_key.toml")]).status.code(), Some(3));
    assert_eq!(crjet(&["report", &path("does_not_exist.toml")]).status.code(), Some(3));
    assert_eq!(crjet(&["check-map", &path("collapse_map.toml")]).status.code(), Some(2));
    assert_eq!(crjet(&["check-map", &path("off_target_map.toml")]).status.code(), Some(1));
    assert_eq!(crjet(&["no-such-command"]).status.code(), Some(3));
}

#[test]
fn parse_errors_carry_position() {
    let out = crjet(&["report", &path("unknown_key.toml")]);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4, column 1"), "{err}");
    let (code, v) = run_json(&["report", &path("bad_syntax.toml")]);
    assert_eq!(code, 3);
    assert!(v["error"]["message"].as_str().unwrap().contains("line 3"), "{v}");
}

#[test]
fn levi_flat_is_reported_not_failed() {
    let (code, v) = run_json(&["report", &path("levi_flat.toml")]);
    assert_eq!(code, 0);
    assert_eq!(v["invariants"]["levi_flat"], true);
}

#[test]
fn map_checks() {
    for (f, xi) in [("identity_map.toml", "1"), ("squaring_map.toml", "2"), ("cube_map.toml", "3")] {
        let (code, v) = run_json(&["check-map", &path(f)]);
        assert_eq!(code, 0, "{f}: {v}");
        assert_eq!(v["xi_smooth"], true);
        assert_eq!(v["all_zero"], true);
        assert_eq!(v["xi"], xi, "{f}");
    }
}

#[test]
fn bb_solve_with_oracle() {
    let (code, v) = run_json(&["bb-solve", &path("bb_half.toml"), "--oracle", "0.01"]);
    assert_eq!(code, 0, "{v}");
    let oracle = &v["bb"]["oracle"];
    assert_eq!(oracle["pass"], true);
    assert!(oracle["max_deviation_negative"].as_f64().unwrap() < 1e-8);
    let (code, v) = run_json(&["bb-solve", &path("bb_log.toml")]);
    assert_eq!(code, 0);
    assert_eq!(v["bb"]["family_dim"], 1);
    let (code, _) = run_json(&["bb-solve", &path("bb_three_halves.toml"), "--order", "4"]);
    assert_eq!(code, 0);
}

#[test]
fn prolong_toy() {
    let (code, v) = run_json(&["prolong", &path("toy_prolong.toml")]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["prolong"]["samples"][0]["residual_zero"], true);
}

#[test]
fn out_flag_writes_same_json() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("r.json");
    let out = crjet(&["report", &path("m0.toml"), "--out", target.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&target).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn trunc_override_applies() {
    let (code, v) = run_json(&["report", &path("m0.toml"), "--trunc", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["invariants"]["trunc"], 6);
}

#[test]
fn data_files_round_trip() {
    let dir = data("");
    for entry in std::fs::read_dir(&dir).unwrap() {
        let p = entry.unwrap().path();
        let text = std::fs::read_to_string(&p).unwrap();
        let name = p.file_name().unwrap().to_string_lossy().to_string();
        if text.starts_with("n = ") {
            let Ok(hs) = input::parse_hypersurface(&text, None) else { continue };
            let again = input::parse_hypersurface(&input::hypersurface_to_toml(&hs), None).unwrap();
            assert_eq!(again, hs, "{name}");
        } else if text.starts_with("source") {
            let mf = input::parse_map(&text, None, |rel| input::read_relative(&p, rel)).unwrap();
            let again = input::parse_map(&input::map_to_toml(&mf), None, |rel| input::read_relative(&p, rel)).unwrap();
            assert_eq!(again.map.components, mf.map.components, "{name}");
        } else if text.starts_with("N = ") {
            let sys = input::parse_bb(&text, None).unwrap();
            let again = input::parse_bb(&input::bb_to_toml(&sys), None).unwrap();
            assert_eq!(again.f, sys.f, "{name}");
        } else if text.starts_with("base_dim") {
            let ps = input::parse_prolong(&text, None).unwrap();
            let again = input::parse_prolong(&input::prolong_to_toml(&ps), None).unwrap();
            assert_eq!(again.closure, ps.closure, "{name}");
            assert_eq!(again.samples, ps.samples, "{name}");
        }
    }
}
