#![allow(dead_code)]

use qfid::{Complex64, ComplexMatrix, KrausChannel};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::Output;

pub fn test_dir(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).expect("create test dir");
    dir
}

fn matrix_value(m: &ComplexMatrix) -> Value {
    let data: Vec<[f64; 2]> = (0..m.rows())
        .flat_map(|i| (0..m.cols()).map(move |j| (i, j)))
        .map(|(i, j)| {
            let z = m.get(i, j);
            [z.re, z.im]
        })
        .collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "data": data })
}

pub fn write_matrix(dir: &Path, name: &str, m: &ComplexMatrix) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, matrix_value(m).to_string()).expect("write matrix file");
    path
}

pub fn write_channel(dir: &Path, name: &str, channel: &KrausChannel) -> PathBuf {
    let kraus: Vec<Value> = channel.operators().iter().map(matrix_value).collect();
    let path = dir.join(name);
    let doc = json!({ "dim": channel.dim(), "kraus": kraus });
    std::fs::write(&path, doc.to_string()).expect("write channel file");
    path
}

pub fn run_qfid(args: &[&str]) -> Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_qfid"))
        .args(args)
        .output()
        .expect("run qfid binary")
}

pub fn report(output: &Output) -> Value {
    assert!(
        output.status.success(),
        "qfid failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    serde_json::from_slice(&output.stdout).expect("stdout is one JSON report")
}

pub fn field(report: &Value, name: &str) -> f64 {
    report["report"][name]
        .as_f64()
        .unwrap_or_else(|| panic!("report field {name} missing or not a number"))
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Rotation mixing levels 1 and 2 of a 3-level register; level 0 untouched.
pub fn leakage_rotation(theta: f64) -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    ComplexMatrix::new(
        3,
        3,
        vec![
            one, z, z,
            z, c(theta.cos(), 0.0), c(-theta.sin(), 0.0),
            z, c(theta.sin(), 0.0), c(theta.cos(), 0.0),
        ],
    )
    .unwrap()
}

pub fn phase_diag(phases: &[f64]) -> ComplexMatrix {
    let diag: Vec<Complex64> = phases.iter().map(|&p| Complex64::from_polar(1.0, p)).collect();
    ComplexMatrix::from_diagonal(&diag).unwrap()
}

pub fn minus_i_sigma_x() -> ComplexMatrix {
    let z = c(0.0, 0.0);
    let mi = c(0.0, -1.0);
    ComplexMatrix::new(2, 2, vec![z, mi, mi, z]).unwrap()
}
