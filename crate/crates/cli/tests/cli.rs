mod common;

use common::*;
use qfid::{
    avg_kraus, avg_unitary, composite_bruteforce_check, composite_fidelity, conditional_fidelity,
    depolarizing_channel, mc_quadratic_form_average, worst_case_unitary, ComplexMatrix,
    SubspaceSelector,
};
use std::f64::consts::PI;

#[test]
fn unitary_identity_reports_mean_one() {
    let dir = test_dir("unitary_identity");
    let target = write_matrix(&dir, "target.json", &ComplexMatrix::identity(2));
    let actual = write_matrix(&dir, "actual.json", &ComplexMatrix::identity(2));
    let out = run_qfid(&["unitary", target.to_str().unwrap(), actual.to_str().unwrap()]);
    let doc = report(&out);
    assert_eq!(doc["report"]["kind"], "unitary");
    assert_eq!(field(&doc, "mean_fidelity").to_bits(), 1.0f64.to_bits());
    let digest = doc["inputs"]["target"].as_str().unwrap();
    assert_eq!(digest.len(), 64);
    assert_eq!(doc["command"][0], "unitary");
}

#[test]
fn unitary_subspace_and_conditional_match_the_library() {
    let dir = test_dir("unitary_subspace");
    let target_m = ComplexMatrix::identity(3);
    let actual_m = leakage_rotation(PI / 2.0);
    let target = write_matrix(&dir, "target.json", &target_m);
    let actual = write_matrix(&dir, "actual.json", &actual_m);
    let out = run_qfid(&[
        "unitary",
        target.to_str().unwrap(),
        actual.to_str().unwrap(),
        "--subspace",
        "0,1",
        "--conditional",
    ]);
    let doc = report(&out);
    let sel = SubspaceSelector::new(3, vec![0, 1]).unwrap();
    let lib = conditional_fidelity(&target_m, &actual_m, &sel).unwrap();
    assert_eq!(
        field(&doc, "subspace_fidelity").to_bits(),
        lib.mean_fidelity.to_bits()
    );
    assert_eq!(
        field(&doc, "acceptance_q").to_bits(),
        lib.acceptance_q.unwrap().to_bits()
    );
    assert_eq!(
        field(&doc, "conditional").to_bits(),
        lib.conditional.unwrap().to_bits()
    );
    let full = avg_unitary(&target_m, &actual_m).unwrap();
    assert_eq!(field(&doc, "mean_fidelity").to_bits(), full.mean_fidelity.to_bits());
}

#[test]
fn unitary_worst_case_flag_reports_the_hull_distance() {
    let dir = test_dir("unitary_worst");
    let target_m = ComplexMatrix::identity(2);
    let actual_m = phase_diag(&[0.0, PI / 2.0]);
    let target = write_matrix(&dir, "target.json", &target_m);
    let actual = write_matrix(&dir, "actual.json", &actual_m);
    let out = run_qfid(&[
        "unitary",
        target.to_str().unwrap(),
        actual.to_str().unwrap(),
        "--worst-case",
    ]);
    let doc = report(&out);
    let lib = worst_case_unitary(&target_m, &actual_m).unwrap();
    assert_eq!(field(&doc, "worst_case").to_bits(), lib.to_bits());
    assert!((lib - (PI / 4.0).cos().powi(2)).abs() < 1e-12);
}

#[test]
fn unitary_mc_runs_are_byte_identical_and_match_the_library() {
    let dir = test_dir("unitary_mc");
    let target_m = ComplexMatrix::identity(2);
    let actual_m = phase_diag(&[0.0, 1.1]);
    let target = write_matrix(&dir, "target.json", &target_m);
    let actual = write_matrix(&dir, "actual.json", &actual_m);
    let args = [
        "unitary",
        target.to_str().unwrap(),
        actual.to_str().unwrap(),
        "--mc",
        "5000",
        "--seed",
        "7",
    ];
    let first = run_qfid(&args);
    let second = run_qfid(&args);
    assert_eq!(first.stdout, second.stdout);
    let doc = report(&first);
    let m = target_m.adjoint().multiply(&actual_m).unwrap();
    let est = mc_quadratic_form_average(&m, 5000, 7).unwrap();
    assert_eq!(doc["report"]["mc"]["mean"].as_f64().unwrap().to_bits(), est.mean.to_bits());
    assert_eq!(
        doc["report"]["mc"]["stderr"].as_f64().unwrap().to_bits(),
        est.stderr.to_bits()
    );
    assert_eq!(doc["report"]["mc"]["samples"].as_u64().unwrap(), 5000);
    assert_eq!(doc["report"]["mc"]["seed"].as_u64().unwrap(), 7);
}

#[test]
fn reports_round_trip_byte_for_byte() {
    let dir = test_dir("round_trip");
    let target = write_matrix(&dir, "target.json", &ComplexMatrix::identity(2));
    let actual = write_matrix(&dir, "actual.json", &phase_diag(&[0.0, 0.4]));
    let out = run_qfid(&[
        "unitary",
        target.to_str().unwrap(),
        actual.to_str().unwrap(),
        "--worst-case",
    ]);
    let line = String::from_utf8(out.stdout).unwrap();
    let value: serde_json::Value = serde_json::from_str(line.trim_end()).unwrap();
    assert_eq!(serde_json::to_string(&value).unwrap(), line.trim_end());
}

#[test]
fn kraus_depolarizing_and_decay_fixtures() {
    let dir = test_dir("kraus_fixtures");
    let target_m = ComplexMatrix::identity(2);
    let target = write_matrix(&dir, "target.json", &target_m);
    let dep = depolarizing_channel(0.4).unwrap();
    let dep_path = write_channel(&dir, "dep.json", &dep);
    let out = run_qfid(&["kraus", target.to_str().unwrap(), dep_path.to_str().unwrap()]);
    let doc = report(&out);
    assert!((field(&doc, "mean_fidelity") - 0.7).abs() <= 1e-12);
    assert_eq!(
        field(&doc, "mean_fidelity").to_bits(),
        avg_kraus(&target_m, &dep).unwrap().mean_fidelity.to_bits()
    );

    let decay = qfid::amplitude_damping_channel(2.0).unwrap();
    let decay_path = write_channel(&dir, "decay.json", &decay);
    let out = run_qfid(&["kraus", target.to_str().unwrap(), decay_path.to_str().unwrap()]);
    let doc = report(&out);
    let expected = (3.0 + (-2.0f64).exp() + 2.0 * (-1.0f64).exp()) / 6.0;
    assert!((field(&doc, "mean_fidelity") - expected).abs() <= 1e-12);
}

#[test]
fn kraus_remix_check_reports_a_negligible_difference() {
    let dir = test_dir("kraus_remix");
    let target = write_matrix(&dir, "target.json", &ComplexMatrix::identity(2));
    let channel = write_channel(&dir, "dep.json", &depolarizing_channel(0.4).unwrap());
    let out = run_qfid(&[
        "kraus",
        target.to_str().unwrap(),
        channel.to_str().unwrap(),
        "--remix-check",
    ]);
    let doc = report(&out);
    assert!(field(&doc, "remix_difference") <= 1e-12);
}

#[test]
fn incomplete_channel_exits_2_and_names_the_deviation() {
    let dir = test_dir("kraus_incomplete");
    let target = write_matrix(&dir, "target.json", &ComplexMatrix::identity(2));
    let path = dir.join("half.json");
    std::fs::write(
        &path,
        r#"{"dim":2,"kraus":[{"rows":2,"cols":2,"data":[[0.5,0],[0,0],[0,0],[0.5,0]]}]}"#,
    )
    .unwrap();
    let out = run_qfid(&["kraus", target.to_str().unwrap(), path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("trace-preserving"), "stderr: {stderr}");
    assert!(stderr.contains("7.500e-1"), "stderr: {stderr}");
}

#[test]
fn scale_known_value_and_range_error() {
    let out = run_qfid(&["scale", "--n", "2", "--K", "2", "--f1", "0.9"]);
    let doc = report(&out);
    assert!((field(&doc, "mean_fidelity") - 0.778).abs() <= 1e-12);
    assert_eq!(
        field(&doc, "mean_fidelity").to_bits(),
        composite_fidelity(2, 2, 0.9).unwrap().to_bits()
    );
    assert_eq!(doc["report"]["kind"], "composite");

    let bad = run_qfid(&["scale", "--n", "2", "--K", "2", "--f1", "0.2"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("outside"));
}

#[test]
fn scale_channel_check_agrees_with_brute_force() {
    let dir = test_dir("scale_check");
    let dep = depolarizing_channel(0.7).unwrap();
    let path = write_channel(&dir, "dep.json", &dep);
    let out = run_qfid(&["scale", "--channel", path.to_str().unwrap(), "--K", "2", "--check"]);
    let doc = report(&out);
    let (brute, law) = composite_bruteforce_check(&dep, 2).unwrap();
    assert_eq!(field(&doc, "brute_force").to_bits(), brute.to_bits());
    assert_eq!(field(&doc, "law").to_bits(), law.to_bits());
    assert!((brute - law).abs() <= 1e-10);
    assert!(doc["report"]["f_single"].is_f64());
}

#[test]
fn scale_sweep_emits_a_csv_with_the_asymptotic_column() {
    let out = run_qfid(&["scale", "--n", "2", "--K", "100", "--f1", "0.999", "--sweep"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    let lines: Vec<&str> = text.trim_end().split('\n').collect();
    assert_eq!(lines[0], "K,fidelity,asymptotic");
    assert_eq!(lines.len(), 101);
    let last: Vec<&str> = lines[100].split(',').collect();
    assert_eq!(last[0], "100");
    let fidelity: f64 = last[1].parse().unwrap();
    let asymptotic: f64 = last[2].parse().unwrap();
    assert_eq!(
        fidelity.to_bits(),
        composite_fidelity(2, 100, 0.999).unwrap().to_bits()
    );
    assert!((fidelity - asymptotic).abs() / fidelity <= 2e-3);
    assert!((asymptotic - 0.999f64.powf(150.0)).abs() < 1e-15);
}

#[test]
fn optimize_recovers_the_pi_pulse_and_matches_the_library() {
    let dir = test_dir("optimize_pi");
    let target_m = minus_i_sigma_x();
    let target = write_matrix(&dir, "target.json", &target_m);
    let out = run_qfid(&["optimize", target.to_str().unwrap(), "--pulses", "1"]);
    let doc = report(&out);
    assert!(field(&doc, "best_objective") >= 1.0 - 1e-9);
    assert_eq!(doc["report"]["converged"], true);
    let lib = qfid::optimize(
        &qfid::PulseSequence::new(vec![qfid::Pulse {
            theta: PI / 2.0,
            phi: 0.0,
        }])
        .unwrap(),
        &target_m,
        &qfid::ErrorGrid::nominal(),
        qfid::OptOptions::default(),
    )
    .unwrap();
    assert_eq!(field(&doc, "best_objective").to_bits(), lib.best_objective.to_bits());
    assert_eq!(
        doc["report"]["evaluations"].as_u64().unwrap(),
        lib.evaluations
    );
    let theta = doc["report"]["pulses"][0]["theta"].as_f64().unwrap();
    assert_eq!(theta.to_bits(), lib.best.pulses()[0].theta.to_bits());
}

#[test]
fn malformed_inputs_exit_2() {
    let dir = test_dir("bad_inputs");
    let target = write_matrix(&dir, "target.json", &minus_i_sigma_x());
    let out = run_qfid(&["optimize", target.to_str().unwrap(), "--pulses", "1", "--grid", "1;0"]);
    assert_eq!(out.status.code(), Some(2));

    let missing = run_qfid(&["unitary", "no-such-file.json", "also-missing.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let stretched = ComplexMatrix::identity(2).scale(c(2.0, 0.0));
    let bad = write_matrix(&dir, "stretched.json", &stretched);
    let out = run_qfid(&["unitary", bad.to_str().unwrap(), bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not unitary"));

    let usage = run_qfid(&["unitary", "--bogus-flag"]);
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn degenerate_acceptance_exits_3() {
    let dir = test_dir("degenerate");
    let target = write_matrix(&dir, "target.json", &ComplexMatrix::identity(2));
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let sigma_x = ComplexMatrix::new(2, 2, vec![z, one, one, z]).unwrap();
    let actual = write_matrix(&dir, "actual.json", &sigma_x);
    let out = run_qfid(&[
        "unitary",
        target.to_str().unwrap(),
        actual.to_str().unwrap(),
        "--subspace",
        "0",
        "--conditional",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("degenerate"));
}
