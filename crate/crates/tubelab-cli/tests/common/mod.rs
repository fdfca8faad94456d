#![allow(dead_code)]

use std::path::Path;
use std::process::{Command, Output};

use tubelab::mmdist::FiniteMMSpace;

pub fn binary() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tubelab"))
}

pub fn run(args: &[&str]) -> Output {
    binary().args(args).output().expect("binary runs")
}

pub fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("output is UTF-8")
}

pub fn exit_code(out: &Output) -> i32 {
    out.status.code().expect("terminated by signal")
}

pub fn write_space(path: &Path, d: Vec<f64>, w: Vec<f64>) {
    let space = FiniteMMSpace::new(d, w).expect("fixture space is valid");
    std::fs::write(path, space.to_json().expect("fixture serializes")).expect("fixture written");
}

/// Two-point spaces at unit distance with the given weight on the first
/// point, written next to each other; returns the two paths as strings.
pub fn two_point_fixture(dir: &Path) -> (String, String) {
    let a = dir.join("space_a.json");
    let b = dir.join("space_b.json");
    write_space(&a, vec![0.0, 1.0, 1.0, 0.0], vec![0.25, 0.75]);
    write_space(&b, vec![0.0, 1.0, 1.0, 0.0], vec![0.75, 0.25]);
    (a.to_string_lossy().into_owned(), b.to_string_lossy().into_owned())
}

/// A small audit fixture: three line spaces concentrating on their first
/// point, with shrinking supports.
pub fn audit_fixture(dir: &Path) -> String {
    let mut instances = Vec::new();
    for j in 0..3 {
        let scale = 0.4 * 0.5f64.powi(j);
        let positions = [0.0, scale, 2.0 * scale, 4.0 * scale];
        let m = positions.len();
        let mut d = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                d[a * m + b] = (positions[a] - positions[b]).abs();
            }
        }
        let space = FiniteMMSpace::new(d, vec![0.25; 4]).expect("fixture space is valid");
        let space_value: serde_json::Value =
            serde_json::from_str(&space.to_json().expect("fixture serializes")).unwrap();
        instances.push(serde_json::json!({
            "label": format!("line{j}"),
            "space": space_value,
            "locus": [0],
            "eps": scale,
        }));
    }
    let path = dir.join("instances.json");
    std::fs::write(&path, serde_json::to_string_pretty(&instances).unwrap()).unwrap();
    path.to_string_lossy().into_owned()
}
