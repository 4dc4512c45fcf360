use koopman_core::gauss::{density_rate, DEFAULT_EXPANSION_CAP as CAP};
use koopman_core::{BinarySeq, Result, Scalar};
use serde_json::json;

use crate::report::SuiteReport;
use crate::RunConfig;

pub fn run<S: Scalar>(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("verify-density", "decay of centered averages over refinements");
    let mut rows = Vec::new();
    let mut flagged = Vec::new();
    for total in 1..=cfg.degree_max.min(4) {
        for k in 0..=total {
            let m = total - k;
            for l in 1..=cfg.depth_max.min(3) {
                let d = density_rate::<S>(BinarySeq::EMPTY, k, m, l, CAP)?;
                r.check(d.matches_closed_form(super::TOL), || format!("rate k={k} m={m} l={l}"), || {
                    json!({
                        "k": k, "m": m, "l": l,
                        "residual": d.residual_norm_sqr.to_json(),
                        "closed_form": d.closed_form.to_string(),
                    })
                });
                if k != m {
                    r.check(d.centering.is_zero() || d.centering.approx_eq(&S::zero(), super::TOL), || {
                        format!("mean of r_l vanishes at k={k} m={m} l={l}")
                    }, || json!({ "k": k, "m": m, "l": l, "centering": d.centering.to_json() }));
                }
                let sqrt_fact = d.sqrt_factorial_centering_agrees(super::TOL);
                if sqrt_fact == Some(false) {
                    flagged.push(format!("m={m} l={l}"));
                }
                rows.push(json!({
                    "k": k, "m": m, "l": l,
                    "centering": d.centering.to_json(),
                    "residual": d.residual_norm_sqr.to_json(),
                    "closed_form": d.closed_form.to_string(),
                    "sqrt_factorial_centering_agrees": sqrt_fact,
                }));
            }
        }
    }
    if !flagged.is_empty() {
        r.note(format!(
            "centering r_l at √(m!) instead of its mean gives a different residual at {}; the mean is 2^(l(1−m))·m!",
            flagged.join(", ")
        ));
    }
    r.data = json!({ "rates": rows });
    Ok(r)
}
