use std::process::{Command, Output};

use serde_json::Value;

fn ltdr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltdr")).args(args).env_remove("PADIC_PRECISION").output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn models_report_slopes_and_passes() {
    let out = ltdr(&["models", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["slopes"]["D_H"], serde_json::json!([[1, 2], [1, 2]]));
    assert_eq!(r["slopes"]["D_G"].as_array().unwrap().len(), 4);
    assert_eq!(r["delta"]["computed_height"], 1);
    assert_eq!(r["unit_root_fixed_dim"], 2);
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(ltdr(&["models"]).status.code(), Some(2));
    assert_eq!(ltdr(&["models", "--n", "0"]).status.code(), Some(2));
    assert_eq!(ltdr(&["ledger", "--p", "4", "--h", "2", "--i0", "0"]).status.code(), Some(2));
    assert_eq!(ltdr(&["ledger", "--p", "3", "--h", "2", "--i0", "2"]).status.code(), Some(2));
    assert_eq!(ltdr(&["ledger", "--heights", "2,1,1"]).status.code(), Some(2));
    assert_eq!(ltdr(&["formal-group", "--p", "3", "--h", "2", "--D", "5"]).status.code(), Some(2));
    assert_eq!(ltdr(&["correspond", "--n", "2", "--seed", "1"]).status.code(), Some(2));
}

#[test]
fn field_too_small_is_reported() {
    let out = ltdr(&["correspond", "--n", "3", "--m", "2", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
    assert!(json(&out)["error"].is_string());
}

#[test]
fn seeded_point_round_trips_through_a_file() {
    let out = ltdr(&["correspond", "--n", "2", "--m", "2", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert_eq!(r["omega"]["fil_G"]["verdict"], "in_Omega");

    let path = std::env::temp_dir().join(format!("ltdr-cli-point-{}.json", std::process::id()));
    std::fs::write(&path, r["point"]["X"].to_string()).unwrap();
    let again = ltdr(&["correspond", "--matrix", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(json(&again)["transpose"]["X"], r["transpose"]["X"]);
}

#[test]
fn full_rank_matrix_is_rejected_with_3() {
    let path = std::env::temp_dir().join(format!("ltdr-cli-identity-{}.json", std::process::id()));
    let one = serde_json::json!({ "valuation": 0, "precision": 16, "digits": ["1"] });
    let zero = serde_json::json!({ "valuation": 16, "precision": 16, "digits": ["0"] });
    let x = serde_json::json!({
        "p": "3", "m": 1, "modulus": ["0", "1"], "precision": 16, "rows": 2, "cols": 2,
        "coeffs": [[one, zero], [zero, one]],
    });
    std::fs::write(&path, x.to_string()).unwrap();
    let out = ltdr(&["correspond", "--matrix", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn ledger_modes() {
    let cm = ltdr(&["ledger", "--p", "2", "--h", "3", "--i0", "1"]);
    assert_eq!(cm.status.code(), Some(0));
    let r = json(&cm);
    assert_eq!(r["y_valuations"], serde_json::json!(["4/7", "1/7", "2/7"]));
    assert_eq!(r["t_valuation"], "1/1");

    let consistent = json(&ltdr(&["ledger", "--heights", "3,-1,-3,3"]));
    assert_eq!(consistent["transfer"]["consistent"], true);
    assert_eq!(consistent["transfer"]["transferred_height"], -1);

    // an inconsistent ledger is a verdict, not a failure
    let out = ltdr(&["ledger", "--heights", "3,0,1,3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["transfer"]["consistent"], false);

    assert_eq!(ltdr(&["ledger", "--heights", "3,0,0,2"]).status.code(), Some(2));
}

#[test]
fn formal_group_report() {
    let out = ltdr(&["formal-group", "--p", "2", "--h", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["D"], 4);
    assert_eq!(r["height"]["height"], 1);
    assert_eq!(r["height"]["lowest_unit_degree"], 2);
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn pretty_output_is_a_table() {
    let out = ltdr(&["--pretty", "ledger", "--p", "3", "--h", "1", "--i0", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("y_valuations") && l.contains("1/2")));
    assert!(text.lines().any(|l| l.starts_with("command") && l.ends_with("ledger")));
}

#[test]
fn quadratic_term_of_the_height_one_law() {
    let r = json(&ltdr(&["formal-group", "--p", "2", "--h", "1", "--D", "4"]));
    let series = r["law"]["series"].as_array().unwrap();
    let coeff = |e: [u64; 2]| {
        series.iter().find(|t| t[0] == serde_json::json!(e)).map(|t| t[1].as_str().unwrap().to_string())
    };
    assert_eq!(coeff([1, 0]).as_deref(), Some("1/1"));
    assert_eq!(coeff([0, 1]).as_deref(), Some("1/1"));
    assert_eq!(coeff([1, 1]).as_deref(), Some("-1/1"));
    assert_eq!(coeff([2, 0]), None);

    let r = json(&ltdr(&["formal-group", "--p", "3", "--h", "1", "--D", "3"]));
    let series = r["law"]["series"].as_array().unwrap();
    let quadratic = series.iter().filter(|t| t[0][0].as_u64().unwrap() + t[0][1].as_u64().unwrap() == 2).count();
    assert_eq!(quadratic, 0);
}

#[test]
fn rational_column_space_has_a_witness() {
    let path = std::env::temp_dir().join(format!("ltdr-cli-rational-{}.json", std::process::id()));
    let one = serde_json::json!({ "valuation": 0, "precision": 16, "digits": ["1", "0"] });
    let zero = serde_json::json!({ "valuation": 16, "precision": 16, "digits": ["0", "0"] });
    let x = serde_json::json!({
        "p": "2", "m": 2, "modulus": ["1", "1", "1"], "precision": 16, "rows": 2, "cols": 2,
        "coeffs": [[one, one], [zero, zero]],
    });
    std::fs::write(&path, x.to_string()).unwrap();
    let out = ltdr(&["correspond", "--matrix", path.to_str().unwrap()]);
    std::fs::remove_file(&path).unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(r["omega"]["fil_G"]["verdict"], "not_in_Omega");
    assert_eq!(r["omega"]["fil_G"]["witness"].as_array().unwrap().len(), 2);
}

#[test]
fn degree_one_field_is_too_small() {
    let out = ltdr(&["correspond", "--n", "2", "--m", "1", "--seed", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("[K:Q_p] = 1"));
}

#[test]
fn height_ledger_examples() {
    let ok = json(&ltdr(&["ledger", "--heights", "2,3,6,1"]));
    assert_eq!(ok["transfer"]["consistent"], true);
    let off = json(&ltdr(&["ledger", "--heights", "2,3,5,1"]));
    assert_eq!(off["transfer"]["consistent"], false);
    let cm = json(&ltdr(&["ledger", "--p", "2", "--h", "3", "--i0", "0"]));
    assert_eq!(cm["y_valuations"], serde_json::json!(["1/7", "2/7", "4/7"]));
}
