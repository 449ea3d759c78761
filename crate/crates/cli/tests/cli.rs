use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use roadside_eval::io::{parse_depth_map, parse_report};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_roadside-eval")).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn synth(dir: &Path, frames: usize, seed: u64) {
    let out = bin(&["synth", "--out", s(dir), "--frames", &frames.to_string(), "--seed", &seed.to_string()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(bin(&[]).status.code(), Some(1));
    assert_eq!(bin(&["evaluate", "--bogus"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(bin(&["--threads", "0", "stats", "--gt", "."]).status.code(), Some(1));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
    assert_eq!(bin(&["--version"]).status.code(), Some(0));
}

#[test]
fn ground_truth_as_predictions_scores_100() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), 20, 3);
    let report = t.path().join("report.toml");
    let gt = t.path().join("gt");
    let pred = t.path().join("as_pred");
    fs::create_dir(&pred).unwrap();
    for (id, p) in roadside_cli::dataset::frame_files(&gt).unwrap() {
        let lines: String = fs::read_to_string(p).unwrap().lines()
            .filter(|l| !l.contains(" -1000 -1000 -1000 "))
            .map(|l| format!("{l} 1\n"))
            .collect();
        fs::write(pred.join(format!("{id}.txt")), lines).unwrap();
    }
    let out = bin(&["evaluate", "--gt", s(&gt), "--pred", s(&pred), "--calib", s(&t.path().join("calib")), "--out", s(&report)]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("car") && stdout.contains("100.000"));
    let r = parse_report(&fs::read_to_string(&report).unwrap()).unwrap();
    let populated: Vec<_> = r.cells.iter().filter(|c| c.is_populated()).collect();
    assert!(!populated.is_empty());
    assert!(populated.iter().all(|c| c.ap == 100.0 && c.rope_score == 100.0));
}

#[test]
fn empty_prediction_dir_scores_0() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), 5, 4);
    let empty = t.path().join("empty");
    fs::create_dir(&empty).unwrap();
    let report = t.path().join("report.toml");
    let out = bin(&["evaluate", "--gt", s(&t.path().join("gt")), "--pred", s(&empty), "--calib", s(&t.path().join("calib")), "--out", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let r = parse_report(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(r.cells.iter().all(|c| c.ap == 0.0 && c.similarity_undefined));
}

#[test]
fn malformed_input_exits_2_with_location() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), 3, 5);
    let bad = t.path().join("pred/000001.txt");
    fs::write(&bad, "car 0 0 0 1 2 3 4 1.5 1.7 4.2 0 1.5 x 0 0.9\n").unwrap();
    let out = bin(&[
        "evaluate",
        "--gt",
        s(&t.path().join("gt")),
        "--pred",
        s(&t.path().join("pred")),
        "--calib",
        s(&t.path().join("calib")),
        "--out",
        s(&t.path().join("r.toml")),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("000001.txt:1:"), "{err}");

    let out = bin(&["ground-depth", "--calib", s(&bad), "--out", s(&t.path().join("d.txt"))]);
    assert_eq!(out.status.code(), Some(2));
    let out = bin(&["evaluate", "--gt", "/nonexistent", "--pred", "/nonexistent", "--calib", "/nonexistent", "--out", "/tmp/x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ground_depth_flat_plane() {
    let t = tempfile::tempdir().unwrap();
    let calib = t.path().join("c.txt");
    fs::write(&calib, "P2: 1000 0 320 0 0 1000 240 0 0 0 1 0\nimage_size: 640 480\ng: 0 1 0 -5\n").unwrap();
    let out_path = t.path().join("d.txt");
    let out = bin(&["ground-depth", "--calib", s(&calib), "--out", s(&out_path), "--zmax", "120"]);
    assert!(out.status.success());
    let text = fs::read_to_string(&out_path).unwrap();
    assert!(text.starts_with("640 480 120\n"));
    let map = parse_depth_map(&text).unwrap();
    for (u, v) in [(320u32, 300u32), (0, 479), (639, 400), (100, 290), (500, 330)] {
        let want = 5.0 * 1000.0 / (f64::from(v) - 240.0);
        assert!((map.get(u, v).unwrap() - want).abs() < 1e-9, "({u}, {v})");
    }
    for line in text.lines().skip(1).take(241) {
        assert!(line.split(' ').all(|t| t == "inf"));
    }

    let grid = t.path().join("g.txt");
    fs::write(&grid, "gg_meta: 10 0 0\ngg: 0 2 0 1 0 -6\ngg: -1 2 0 1 0 -6\n").unwrap();
    let gridded_path = t.path().join("dg.txt");
    let out = bin(&["ground-depth", "--calib", s(&calib), "--gridded", s(&grid), "--out", s(&gridded_path)]);
    assert!(out.status.success());
    let gridded = parse_depth_map(&fs::read_to_string(&gridded_path).unwrap()).unwrap();
    // Row 290 only meets the fallback plane. Row 465 passes over the
    // fallback crossing at 22.2 m (inside the 6 m cell) and lands at 26.7 m.
    assert!((gridded.get(320, 290).unwrap() - 100.0).abs() < 1e-9);
    assert!((gridded.get(320, 465).unwrap() - 6.0 * 1000.0 / 225.0).abs() < 1e-9);
}

#[test]
fn synth_is_deterministic_and_stats_match_config() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    synth(a.path(), 1000, 9);
    synth(b.path(), 1000, 9);
    for sub in ["gt", "pred", "calib"] {
        let names = roadside_cli::dataset::frame_files(&a.path().join(sub)).unwrap();
        assert_eq!(names.len(), 1000);
        for (id, p) in names {
            assert!(fs::read(p).unwrap() == fs::read(b.path().join(sub).join(format!("{id}.txt"))).unwrap());
        }
    }
    let out = bin(&["stats", "--gt", s(&a.path().join("gt"))]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let line = text.lines().find(|l| l.starts_with("objects per frame")).unwrap();
    let three_d: f64 = line.rsplit(' ').next().unwrap().parse().unwrap();
    assert!((three_d - 24.0).abs() <= 0.5, "{line}");
    assert!(text.contains("60-70"));
}

#[test]
fn self_test_passes() {
    let out = bin(&["self-test"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("[PASS]")).count(), 9);
}

#[test]
fn thread_count_does_not_change_reports() {
    let t = tempfile::tempdir().unwrap();
    synth(t.path(), 40, 10);
    let mut outputs = Vec::new();
    for n in ["1", "3"] {
        let r = t.path().join(format!("r{n}.toml"));
        let out = bin(&[
            "--threads",
            n,
            "evaluate",
            "--gt",
            s(&t.path().join("gt")),
            "--pred",
            s(&t.path().join("pred")),
            "--calib",
            s(&t.path().join("calib")),
            "--out",
            s(&r),
        ]);
        assert!(out.status.success());
        outputs.push(fs::read(r).unwrap());
    }
    assert!(outputs[0] == outputs[1]);
}
