//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Run with `cargo test -p qclab --test acceptance -- --nocapture` to see the
//! lines.

use qclab::{run_all, CheckReport, Status, SuiteConfig};

const CRITERIA: &[(u32, &str, &[&str])] = &[
    (1, "integral bound for the Example-1 profile", &["example1_integral_bound"]),
    (2, "Example-1 ball means <= 3/2", &["example1_ball_mean"]),
    (3, "planar ball means <= 6/π", &["example2_planar_mean"]),
    (4, "cap identity", &["cap_identity"]),
    (5, "β³ integrability", &["beta_cube_integrability"]),
    (6, "Calderon classification", &["calderon_classification"]),
    (7, "Hölder exponent formula", &["holder_exponent_formula"]),
    (8, "K_I field identity", &["ki_field_identity"]),
    (9, "conformal invariance of K_I", &["conformal_invariance"]),
    (10, "geometric inclusions", &["geometric_inclusions"]),
    (11, "limsup verdicts", &["limsup_verdicts"]),
    (12, "empirical Hölder exponents", &["empirical_holder"]),
    (13, "Poisson suite", &["poisson_normalization", "poisson_reproduction"]),
    (14, "I_α growth law", &["i_alpha_law"]),
    (15, "Privalov check", &["privalov_gradient", "planar_log_growth"]),
    (16, "Beltrami identities", &["beltrami_identities"]),
];

fn describe(r: &CheckReport) -> String {
    let failed = r.failures();
    let mut parts = Vec::new();
    for m in &r.measured {
        if failed.contains(&m.name.as_str()) {
            let e = r.expected.iter().find(|e| e.name == m.name).unwrap();
            parts.push(format!(
                "{} = {:.6} ({:?} {} ± {:e})",
                m.name, m.value, e.relation, e.value, e.tolerance
            ));
        }
    }
    parts.extend(r.diagnostics.iter().cloned());
    parts.join("; ")
}

#[test]
fn acceptance() {
    let cfg = SuiteConfig::default();
    let (_, reports) = run_all(&cfg).expect("suite runs");
    let mut failing = Vec::new();
    for (n, title, ids) in CRITERIA {
        let rs: Vec<&CheckReport> = ids
            .iter()
            .map(|id| reports.iter().find(|r| r.check_id == *id).expect("registered"))
            .collect();
        let pass = rs.iter().all(|r| r.status == Status::Pass);
        let ms: u64 = rs.iter().map(|r| r.runtime_ms).sum();
        let detail: Vec<String> = rs
            .iter()
            .filter(|r| r.status != Status::Pass)
            .map(|r| format!("{} [{}]: {}", r.check_id, r.status, describe(r)))
            .collect();
        println!(
            "criterion {n:>2} {:<4} {title} ({ms} ms){}",
            if pass { "PASS" } else { "FAIL" },
            if detail.is_empty() {
                String::new()
            } else {
                format!(" -- {}", detail.join(" | "))
            }
        );
        if !pass {
            failing.push(*n);
        }
    }
    assert!(failing.is_empty(), "failing criteria: {failing:?}");
}
