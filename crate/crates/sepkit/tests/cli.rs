//! Binary-level checks: exit codes, file formats, determinism, config
//! precedence.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::sync::atomic::{AtomicU32, Ordering};

fn sepkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sepkit"))
        .args(args)
        .output()
        .expect("binary runs")
}

static DIR_SEQ: AtomicU32 = AtomicU32::new(0);

fn scratch_dir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!(
        "sepkit-cli-{}-{}",
        std::process::id(),
        DIR_SEQ.fetch_add(1, Ordering::Relaxed)
    ));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn usage_error_exits_2() {
    let out = sepkit(&["equilibria", "--f", "2z", "--domain", "-1,1,-1,1"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    let out = sepkit(&["equilibria", "--f", "z"]);
    assert_eq!(out.status.code(), Some(2), "missing domain: {out:?}");
}

#[test]
fn no_result_exits_3() {
    // Interior segment: no orientation change to bracket.
    let out = sepkit(&[
        "separatrix",
        "--f",
        "cosh(z-0.5)",
        "--method",
        "index",
        "--segment",
        "0.5,1.2,0.5,1.9",
        "--domain",
        "-3,4,-3,3",
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn io_error_exits_4() {
    let out = sepkit(&[
        "equilibria",
        "--f",
        "z",
        "--domain",
        "-1,1,-1,1",
        "--out",
        "/nonexistent-dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn equilibria_json_round_trips_and_repeats_byte_identically() {
    let dir = scratch_dir();
    let a = dir.join("a.json");
    let b = dir.join("b.json");
    for path in [&a, &b] {
        let out = sepkit(&[
            "equilibria",
            "--f",
            "cosh(z-0.5)",
            "--domain",
            "-10,10,-1.5pi,1.5pi",
            "--out",
            path.to_str().unwrap(),
            "--quiet",
        ]);
        assert_eq!(out.status.code(), Some(0), "{out:?}");
    }
    assert_eq!(read(&a), read(&b), "identical config must give identical bytes");

    let doc: serde_json::Value = serde_json::from_str(&read(&a)).unwrap();
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    let orientations: Vec<i64> = results
        .iter()
        .map(|r| r["orientation"].as_i64().unwrap())
        .collect();
    assert_eq!(orientations, vec![-1, 1]);
    assert!(results
        .iter()
        .all(|r| r["kind"].as_str() == Some("center")));
    assert_eq!(doc["config"]["function"].as_str(), Some("cosh(z-0.5)"));
}

#[test]
fn field_csv_has_one_row_per_grid_node() {
    let dir = scratch_dir();
    let svg = dir.join("field.svg");
    let out = sepkit(&[
        "field",
        "--f",
        "z^2",
        "--domain",
        "-1,1,-1,1",
        "--grid",
        "10",
        "--out",
        svg.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = read(&dir.join("field.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "x,y,fx,fy");
    assert_eq!(lines.len(), 1 + 100);
    assert!(csv.ends_with('\n'));
}

#[test]
fn portrait_svg_counts_match_the_grid() {
    let dir = scratch_dir();
    let svg_path = dir.join("portrait.svg");
    let out = sepkit(&[
        "portrait",
        "--f",
        "z",
        "--domain",
        "-1,1,-1,1",
        "--grid",
        "5",
        "--out",
        svg_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let svg = read(&svg_path);
    assert_eq!(svg.matches("class=\"trajectory\"").count(), 25);
    // Radial straight trajectories from the identity field.
    assert!(svg.matches("class=\"equilibrium\"").count() >= 1);
}

#[test]
fn portrait_csv_format_writes_per_trajectory_files() {
    let dir = scratch_dir();
    let svg_path = dir.join("p.svg");
    let out = sepkit(&[
        "portrait",
        "--f",
        "z",
        "--domain",
        "-1,1,-1,1",
        "--grid",
        "3",
        "--format",
        "csv",
        "--out",
        svg_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    for idx in 0..9 {
        let csv = read(&dir.join(format!("p_traj{idx:04}.csv")));
        assert!(csv.starts_with("t,re,im\n"), "trajectory {idx}");
    }
}

#[test]
fn constant_field_draws_uniform_upward_arrows() {
    let dir = scratch_dir();
    let svg_path = dir.join("updraft.svg");
    let out = sepkit(&[
        "field",
        "--f",
        "i",
        "--domain",
        "-1,1,-1,1",
        "--grid",
        "6",
        "--out",
        svg_path.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let csv = read(&dir.join("updraft.csv"));
    for line in csv.lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        assert_eq!(cols[2], "0.0", "fx must vanish: {line}");
        assert_eq!(cols[3], "1.0", "fy must be one: {line}");
    }
    // Every arrow shaft points straight up (x1 == x2, y decreasing).
    let svg = read(&svg_path);
    assert_eq!(svg.matches("class=\"arrow\"").count(), 36);
    for shaft in svg.split("<line ").skip(1) {
        let attr = |key: &str| -> f64 {
            let rest = &shaft[shaft.find(key).unwrap() + key.len()..];
            rest[..rest.find('"').unwrap()].parse().unwrap()
        };
        assert_eq!(attr("x1=\""), attr("x2=\""));
        assert!(attr("y1=\"") > attr("y2=\""), "arrow must point up");
    }
}

#[test]
fn portrait_rejects_implicit_multiplication() {
    let out = sepkit(&["portrait", "--f", "2z", "--domain", "-1,1,-1,1"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn escape_reports_the_quadratic_blow_up() {
    let out = sepkit(&["escape", "--f", "z^2", "--z0", "1,0", "--quiet"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let r = &doc["results"][0];
    assert_eq!(r["forward"]["verdict"].as_str(), Some("blow_up"));
    let t = r["forward"]["escape_time"].as_f64().unwrap();
    assert!((t - 1.0).abs() < 1e-3, "escape time {t}");
    assert_eq!(r["positive_separatrix"].as_bool(), Some(true));
    assert_eq!(r["negative_separatrix"].as_bool(), Some(false));
}

#[test]
fn config_file_merges_under_flags() {
    let dir = scratch_dir();
    let conf = dir.join("conf.toml");
    std::fs::write(&conf, "rtol = 1e-6\ngrid = 12\ndomain = \"-2,2,-2,2\"\n").unwrap();

    // File values apply when no flag overrides them.
    let out = sepkit(&[
        "equilibria",
        "--f",
        "z",
        "--config",
        conf.to_str().unwrap(),
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["rtol"].as_f64(), Some(1e-6));
    assert_eq!(doc["config"]["grid_n"].as_u64(), Some(12));

    // A flag wins over the file.
    let out = sepkit(&[
        "equilibria",
        "--f",
        "z",
        "--config",
        conf.to_str().unwrap(),
        "--rtol",
        "1e-9",
        "--grid",
        "9",
        "--quiet",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["config"]["rtol"].as_f64(), Some(1e-9));
    assert_eq!(doc["config"]["grid_n"].as_u64(), Some(9));
}

#[test]
fn zdp_json_lists_the_fixture_lines() {
    let out = sepkit(&[
        "separatrix",
        "--f",
        "cosh(z-0.5)",
        "--method",
        "zdp",
        "--domain",
        "-3,4,-4,4",
        "--grid",
        "96",
        "--quiet",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let polylines = doc["results"].as_array().unwrap();
    assert!(!polylines.is_empty());
    // Every vertex sits on {Re z = 0.5} ∪ {Im z = kπ}, and all four line
    // pieces of the window are represented. Chains may switch lines at the
    // saddle points where the two families intersect.
    let pi = std::f64::consts::PI;
    let mut on_vertical = 0usize;
    let mut on_k = [0usize; 3];
    for pl in polylines {
        for p in pl["points"].as_array().unwrap() {
            let re = p["re"].as_f64().unwrap();
            let im = p["im"].as_f64().unwrap();
            let dv = (re - 0.5).abs();
            let k = (im / pi).round();
            let dh = (im - k * pi).abs();
            assert!(dv.min(dh) < 1e-6, "vertex ({re}, {im}) off the union");
            if dv < 1e-6 && dh > 0.3 {
                on_vertical += 1;
            } else if dh < 1e-6 && dv > 0.3 && (-1.0..=1.0).contains(&k) {
                on_k[(k as i64 + 1) as usize] += 1;
            }
        }
    }
    assert!(on_vertical > 10, "vertical line underrepresented");
    for (idx, count) in on_k.iter().enumerate() {
        assert!(*count > 10, "line k = {} underrepresented", idx as i64 - 1);
    }
}
