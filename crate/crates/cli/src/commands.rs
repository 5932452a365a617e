use std::path::Path;

use ltdr::dieudonne::{build_dg, build_dh, delta_matrix, phi_matrix, random_unit};
use ltdr::formal_group::{group_law, series_json, FormalGroupError};
use ltdr::ledger::{
    cm_period_valuations, cm_reports, height_transfer, t_valuation, CheckReport, CmDatum, HeightLedger,
};
use ltdr::padic::{make_field, max_precision, MatrixJson};
use ltdr::periods::{act, omega_membership, random_point, OmegaVerdict, PeriodError, PeriodMatrix};
use ltdr::semilinear::slopes_json;
use ltdr::{PadicElement, PadicMatrix};
use serde_json::{json, Value};

use crate::Command;

pub struct Outcome {
    pub report: Value,
    pub code: u8,
    pub diagnostic: Option<String>,
}

const SCHEMA: u32 = 1;

fn failure(command: &str, code: u8, msg: impl ToString) -> Outcome {
    let msg = msg.to_string();
    Outcome {
        report: json!({ "schema": SCHEMA, "command": command, "error": msg }),
        code,
        diagnostic: Some(msg),
    }
}

fn check(name: &str, pass: bool) -> Value {
    json!({ "check": name, "pass": pass })
}

fn all_pass(checks: &[Value]) -> bool {
    checks.iter().all(|c| c["pass"] == json!(true))
}

pub fn run(cmd: &Command) -> Outcome {
    match cmd {
        Command::Models { n, precision, p } => models(*n, *precision, *p),
        Command::Correspond { n, m, seed, matrix, precision, p } => match matrix {
            Some(path) => correspond_file(path),
            None => correspond_seeded(n.unwrap_or(0), m.unwrap_or(0), seed.unwrap_or(0), *precision, *p),
        },
        Command::Ledger { p, h, i0, heights } => match heights {
            Some(hs) => ledger_heights(hs),
            None => ledger_cm(p.unwrap_or(0), h.unwrap_or(0), i0.unwrap_or(0)),
        },
        Command::FormalGroup { p, h, d } => formal_group(*p, *h, *d),
    }
}

fn models(n: usize, precision: u32, p: u64) -> Outcome {
    const CMD: &str = "models";
    if n == 0 {
        return failure(CMD, 2, "--n must be at least 1");
    }
    let field = match make_field(p, 1, precision) {
        Ok(f) => f,
        Err(e) => return failure(CMD, 2, e),
    };
    let dh = build_dh(&field, n).expect("n ≥ 1");
    let dg = build_dg(&field, n).expect("n ≥ 1");
    let phi = phi_matrix(&field, n);
    let delta = delta_matrix(&field, n).expect("n ≥ 1");

    let slopes = (|| {
        let dh_dual = dh.newton_slopes()?;
        let dg_dual = dg.newton_slopes()?;
        let dh_frob = dh.frobenius_isocrystal()?.newton_slopes()?;
        let unit = dg.unit_root_operator()?.newton_slopes()?;
        let fixed = dg.unit_root_fixed_space()?.dim();
        Ok::<_, ltdr::dieudonne::DieudonneError>((dh_dual, dg_dual, dh_frob, unit, fixed))
    })();
    let (dh_dual, dg_dual, dh_frob, unit, fixed) = match slopes {
        Ok(s) => s,
        Err(e) => return failure(CMD, 4, e),
    };
    let one_over_n = num_rational::Rational64::new(1, n as i64);
    let zero = num_rational::Rational64::from_integer(0);
    let pi = PadicMatrix::identity(&field, n).scale(&PadicElement::from_i64(&field, p as i64));
    let checks = vec![
        check("D_H_slopes_1_over_n", dh_dual.len() == n && dh_dual.iter().all(|s| *s == one_over_n)),
        check("D_G_slopes_1_over_n", dg_dual.len() == n * n && dg_dual.iter().all(|s| *s == one_over_n)),
        check("V_to_the_n_is_p", dh.v_matrix().pow(n as u32).approx_eq(&pi)),
        check("phi_is_p_times_V_inverse", dh.frobenius_matrix().approx_eq(&phi)),
        check("delta_height", delta.computed_height() == Some(delta.declared_height())),
        check("unit_root_slopes_zero", unit.iter().all(|s| *s == zero)),
        check("unit_root_fixed_dim_n", fixed == n),
    ];
    let code = if all_pass(&checks) { 0 } else { 1 };
    Outcome {
        report: json!({
            "schema": SCHEMA,
            "command": CMD,
            "n": n,
            "p": p,
            "precision": precision,
            "D_H": dh.to_json(),
            "D_G": dg.to_json(),
            "phi_matrix": phi.to_json(),
            "delta": {
                "matrix": delta.matrix().to_json(),
                "declared_height": delta.declared_height(),
                "computed_height": delta.computed_height(),
            },
            "slopes": {
                "D_H": slopes_json(&dh_dual),
                "D_G": slopes_json(&dg_dual),
                "D_H_frobenius": slopes_json(&dh_frob),
                "unit_root": slopes_json(&unit),
            },
            "unit_root_fixed_dim": fixed,
            "checks": checks,
        }),
        code,
        diagnostic: None,
    }
}

fn period_failure(cmd: &str, e: PeriodError) -> Outcome {
    let code = match e {
        PeriodError::FullRank(_) | PeriodError::RankTooLow { .. } | PeriodError::NotSquare => 3,
        PeriodError::Indeterminate(_) => 4,
        PeriodError::FieldTooSmall { .. } => 2,
        _ => 1,
    };
    failure(cmd, code, e)
}

fn correspondence_report(pm: &PeriodMatrix, source: Value, extra_checks: Vec<Value>) -> Outcome {
    let x = pm.matrix();
    let t = pm.correspond();
    let (fil_h, fil_g) = (pm.fil_h(), pm.fil_g());
    let mut checks = vec![
        check("involution", t.correspond().matrix() == x),
        check("duality_fil_H", t.fil_h().same_subspace(&fil_g)),
        check("duality_fil_G", t.fil_g().same_subspace(&fil_h)),
        check("orthogonality_G", (fil_g.normal() * x).is_zero()),
        check("orthogonality_H", (x * &fil_h.normal().transpose()).is_zero()),
        check("det_vanishes", x.det().is_zero()),
    ];
    checks.extend(extra_checks);
    let omega_x = omega_membership(&fil_g);
    let omega_t = omega_membership(&t.fil_g());
    let indeterminate = matches!(omega_x, OmegaVerdict::Indeterminate) || matches!(omega_t, OmegaVerdict::Indeterminate);
    let code = if !all_pass(&checks) {
        1
    } else if indeterminate {
        4
    } else {
        0
    };
    Outcome {
        report: json!({
            "schema": SCHEMA,
            "command": "correspond",
            "source": source,
            "point": pm.to_json(),
            "transpose": t.to_json(),
            "omega": { "fil_G": omega_x.to_json(), "fil_H": omega_t.to_json() },
            "checks": checks,
        }),
        code,
        diagnostic: indeterminate.then(|| "indeterminate Ω verdict at this precision".to_string()),
    }
}

fn correspond_seeded(n: usize, m: usize, seed: u64, precision: u32, p: u64) -> Outcome {
    const CMD: &str = "correspond";
    if n == 0 || m == 0 {
        return failure(CMD, 2, "--n and --m must be at least 1");
    }
    let field = match make_field(p, m, precision) {
        Ok(f) => f,
        Err(e) => return failure(CMD, 2, e),
    };
    let pm = match random_point(n, &field, seed) {
        Ok(pm) => pm,
        Err(e) => return period_failure(CMD, e),
    };
    let mut extra = vec![check("fil_G_in_Omega", omega_membership(&pm.fil_g()).is_in())];
    let mut action = Value::Null;
    if m.is_multiple_of(n) {
        // one seeded (g, d) pair from an independent stream
        let mut rng = ltdr::rng::stream(seed, 1);
        let base = field.prime_subfield();
        let g = ltdr::rng::unimodular_matrix(&base, n, &mut rng);
        let d = random_unit(&field, n, &mut rng);
        match act(&g, &d, &pm) {
            Ok(moved) => {
                let gt = PadicMatrix::embed(&field, &g).transpose();
                let iota_inv = ltdr::dieudonne::iota_matrix(&d).inverse().expect("unit of O_D");
                let fil_g_law = pm.fil_g().image_under(&gt).map(|h| h.same_subspace(&moved.fil_g())).unwrap_or(false);
                let fil_h_law =
                    pm.fil_h().right_translate(&iota_inv).map(|h| h.same_subspace(&moved.fil_h())).unwrap_or(false);
                let omega_kept = omega_membership(&moved.fil_g()).is_in();
                extra.push(check("action_fil_G_transforms_by_tg", fil_g_law));
                extra.push(check("action_fil_H_right_translates", fil_h_law));
                extra.push(check("action_preserves_Omega", omega_kept));
                action = json!({ "g": g.to_json(), "X": moved.matrix().to_json() });
            }
            Err(e) => {
                extra.push(check("action_preserves_rank", false));
                action = json!({ "error": e.to_string() });
            }
        }
    }
    let mut out = correspondence_report(&pm, json!({ "n": n, "m": m, "seed": seed, "p": p, "precision": precision }), extra);
    out.report["action"] = action;
    out
}

fn correspond_file(path: &Path) -> Outcome {
    const CMD: &str = "correspond";
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return failure(CMD, 2, format!("{}: {e}", path.display())),
    };
    let parsed: MatrixJson = match serde_json::from_str(&text) {
        Ok(j) => j,
        Err(e) => return failure(CMD, 2, format!("{}: {e}", path.display())),
    };
    let x = match parsed.to_matrix() {
        Ok(x) => x,
        Err(e) => return failure(CMD, 2, e),
    };
    match PeriodMatrix::from_matrix(x) {
        Ok(pm) => correspondence_report(&pm, json!({ "matrix": path.display().to_string() }), vec![]),
        Err(e) => period_failure(CMD, e),
    }
}

fn ledger_cm(p: u64, h: u32, i0: usize) -> Outcome {
    const CMD: &str = "ledger";
    let cm = match CmDatum::dimension_one(p, h, i0) {
        Ok(cm) => cm,
        Err(e) => return failure(CMD, 2, e),
    };
    let table = cm_period_valuations(p, h, i0).expect("validated");
    let checks: Vec<CheckReport> = cm_reports(&cm).expect("validated");
    let code = if checks.iter().all(|c| c.pass) { 0 } else { 1 };
    Outcome {
        report: json!({
            "schema": SCHEMA,
            "command": CMD,
            "inputs": { "p": p, "h": h, "i0": i0 },
            "t_valuation": t_valuation(p).expect("validated"),
            "y_valuations": table,
            "checks": checks,
        }),
        code,
        diagnostic: None,
    }
}

fn ledger_heights(hs: &[i64]) -> Outcome {
    const CMD: &str = "ledger";
    let [n, ht_h, ht_g, ht_delta] = hs else {
        return failure(CMD, 2, "--heights takes n,htH,htG,htDelta");
    };
    let Ok(n) = u32::try_from(*n) else {
        return failure(CMD, 2, "n must be positive");
    };
    let ledger = match HeightLedger::new(n, *ht_h, *ht_g, *ht_delta) {
        Ok(l) => l,
        Err(e) => return failure(CMD, 2, e),
    };
    let transfer = match height_transfer(&ledger) {
        Ok(t) => t,
        Err(e) => return failure(CMD, 2, e),
    };
    let corollary = CheckReport {
        check: "height_transfer_corollary".into(),
        inputs: json!({ "n": n, "ht_rho_H": ht_h, "ht_rho_G": ht_g, "ht_Delta": ht_delta }),
        expected: transfer.heights_match.to_string(),
        computed: transfer.consistent.to_string(),
        pass: transfer.corollary_holds,
    };
    let code = if corollary.pass { 0 } else { 1 };
    Outcome {
        report: json!({
            "schema": SCHEMA,
            "command": CMD,
            "ledger": ledger,
            "transfer": transfer,
            "checks": [corollary],
        }),
        code,
        diagnostic: None,
    }
}

fn formal_group(p: u64, h: u32, d: Option<u32>) -> Outcome {
    const CMD: &str = "formal-group";
    if h == 0 || h > 6 {
        return failure(CMD, 2, "--h must be between 1 and 6");
    }
    let Some(q) = p.checked_pow(h).filter(|q| *q <= 255) else {
        return failure(CMD, 2, "p^h must be at most 255");
    };
    let d = d.unwrap_or(q as u32 + p as u32);
    if u64::from(d) < q {
        return failure(CMD, 2, format!("--D {d} is below p^h = {q}, so the height cannot be certified"));
    }
    let law = match group_law(p, h, d) {
        Ok(l) => l,
        Err(e @ FormalGroupError::NotIntegral { .. }) => return failure(CMD, 5, e),
        Err(e) => return failure(CMD, 2, e),
    };
    let p_series = match law.p_series() {
        Ok(s) => s,
        Err(e @ FormalGroupError::NotIntegral { .. }) => return failure(CMD, 5, e),
        Err(e) => return failure(CMD, 1, e),
    };
    let height = law.height_certificate().expect("D ≥ p^h and [p] integral");
    let axioms = law.check_axioms();
    let precision = max_precision(p).min(32);
    let zeta = match law.default_zeta(precision) {
        Ok(z) => z,
        Err(e) => return failure(CMD, 1, e),
    };
    let zeta_report = match law.zeta_action(&zeta) {
        Ok(r) => r,
        Err(e) => return failure(CMD, 1, e),
    };
    let checks = vec![
        check("left_unit", axioms.left_unit),
        check("right_unit", axioms.right_unit),
        check("commutative", axioms.commutative),
        check("associative", axioms.associative),
        check("log_additive", axioms.log_additive),
        check("integral", true),
        check("height", height.certified && height.height == Some(h)),
        check("zeta_endomorphism", zeta_report.all()),
    ];
    let code = if all_pass(&checks) { 0 } else { 1 };
    Outcome {
        report: json!({
            "schema": SCHEMA,
            "command": CMD,
            "p": p,
            "h": h,
            "D": d,
            "log": series_json(p, h, law.log(), 1),
            "law": series_json(p, h, law.law(), 2),
            "p_series": series_json(p, h, &p_series, 1),
            "height": height,
            "axioms": axioms,
            "zeta": { "value": zeta.to_json(), "report": zeta_report },
            "checks": checks,
        }),
        code,
        diagnostic: None,
    }
}
