//! Acceptance runner: one line per criterion, nonzero exit on failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{all, Check};
use lpme_core::reference::{
    q1_dephasing, q2_congruent, q2_driven_qubit, q2_periodic, q3_qutrit, q3_static, QUTRIT_BETA,
};
use lpme_core::{model::ReducedModel, Result};

fn periodic_congruent() -> Result<ReducedModel> {
    // Ω = (1) with Bohr gap 1
    let m = q2_periodic()?;
    ReducedModel::new(
        lpme_core::fourier::FrequencyVector::new(vec![1.0])?,
        m.p_series().clone(),
        m.h_bar().clone(),
        m.couplings().to_vec(),
        m.bath().clone(),
    )
}

fn criterion_1(models: &[(&str, ReducedModel)]) -> Result<Check> {
    let start = Instant::now();
    let mut parts = Vec::new();
    for (name, m) in models {
        parts.push((name.to_string(), common::reduction_oracle(m)?));
    }
    let secs = start.elapsed().as_secs_f64();
    parts.push(("runtime".into(), Check::new(secs < 5.0, format!("{secs:.2}s"))));
    Ok(all(parts))
}

fn criterion_2(models: &[(&str, ReducedModel)]) -> Result<Check> {
    let mut parts = Vec::new();
    for (name, m) in models {
        parts.push((name.to_string(), common::product_form(m)?.0));
    }
    Ok(all(parts))
}

fn per_model(
    models: &[(&str, ReducedModel)],
    f: impl Fn(&ReducedModel) -> Result<Check>,
) -> Result<Check> {
    let mut parts = Vec::new();
    for (name, m) in models {
        parts.push((name.to_string(), f(m)?));
    }
    Ok(all(parts))
}

fn criterion_6(models: &[(&str, ReducedModel)], congruent: &ReducedModel) -> Result<Check> {
    let mut parts = Vec::new();
    for (name, m) in models {
        parts.push((name.to_string(), common::selection_rule(&common::with_lamb_shift(m.clone()))?));
    }
    parts.push((
        "congruent".into(),
        common::selection_rule_violated(&common::ohmic(congruent.clone()))?,
    ));
    Ok(all(parts))
}

fn criterion_10() -> Result<Check> {
    let m = q2_periodic()?;
    let one = [("Q2 r=1", m.clone())];
    let lamb = [("Q2 r=1", common::with_lamb_shift(m.clone()))];
    Ok(all(vec![
        ("1".into(), criterion_1(&one)?),
        ("2".into(), criterion_2(&one)?),
        ("3".into(), per_model(&one, common::cptp)?),
        ("4".into(), per_model(&one, common::structural)?),
        ("5".into(), per_model(&lamb, common::covariance)?),
        ("6".into(), criterion_6(&one, &periodic_congruent()?)?),
        ("7".into(), per_model(&one, common::spectral)?),
        ("8".into(), per_model(&one, common::limit_cycle_check)?),
    ]))
}

fn run() -> Result<Vec<(u32, &'static str, Check)>> {
    let q1 = q1_dephasing();
    let q2 = q2_driven_qubit()?;
    let q3 = q3_qutrit()?;
    let q23 = [("Q2", q2.clone()), ("Q3", q3.clone())];
    let q123 = [("Q1", q1), ("Q2", q2.clone()), ("Q3", q3.clone())];
    let q23_lamb = [
        ("Q2", common::with_lamb_shift(q2)),
        ("Q3", common::with_lamb_shift(q3.clone())),
    ];

    let mut out = Vec::new();
    let mut record = |id, name, check: Result<Check>| {
        let check = check.unwrap_or_else(|e| Check::new(false, format!("error: {e}")));
        println!(
            "criterion {id:>2} {name:<28} ... {} ({})",
            if check.pass { "PASS" } else { "FAIL" },
            check.detail
        );
        out.push((id, name, check));
    };
    record(1, "reduction oracle", criterion_1(&q23));
    record(2, "product-form dynamics", criterion_2(&q123));
    record(3, "CPTP certification", per_model(&q123, common::cptp));
    record(
        4,
        "structural identities",
        per_model(&q23, common::structural).and_then(|c| {
            Ok(all(vec![
                ("jumps".into(), c),
                ("bohr splitting".into(), common::bohr_splitting_identity(11)?),
            ]))
        }),
    );
    record(5, "covariance", per_model(&q23_lamb, common::covariance));
    record(6, "selection rule", q2_congruent().and_then(|c| criterion_6(&q23, &c)));
    record(7, "spectral proposition", per_model(&q123, common::spectral));
    record(8, "limit cycle", common::limit_cycle_check(&q3));
    record(9, "Gibbs fixed point", common::gibbs(&q3_static(), QUTRIT_BETA));
    record(10, "periodic special case", criterion_10());
    Ok(out)
}

fn main() -> ExitCode {
    let start = Instant::now();
    match run() {
        Ok(results) => {
            let failed = results.iter().filter(|r| !r.2.pass).count();
            println!(
                "acceptance: {} passed, {failed} failed ({:.1}s)",
                results.len() - failed,
                start.elapsed().as_secs_f64()
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Err(e) => {
            println!("acceptance: setup failed: {e}");
            ExitCode::FAILURE
        }
    }
}
