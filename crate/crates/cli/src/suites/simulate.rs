use koopman_core::gauss::{GaussPoly, DEFAULT_EXPANSION_CAP as CAP};
use koopman_core::montecarlo::{act_boolean, estimate_batch, reference_monomials, sample};
use koopman_core::{Result, Scalar, TorusStep};
use num_complex::Complex64;
use serde_json::json;

use super::{random_step, rng, step_json};
use crate::report::SuiteReport;
use crate::RunConfig;

const BAND: f64 = 3.0;
const RESIDUAL: f64 = 1e-12;
const RESIDUAL_SAMPLES: u64 = 200;

pub fn run<S: Scalar>(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("simulate", "Monte Carlo moments and Koopman inner products on sampled trees");
    let depth = cfg.depth_max;
    let mut g_rng = rng(cfg, 0x51a0_0000);
    let gs: Vec<TorusStep<S>> = (0..4)
        .map(|i| random_step::<S>((1 + i % 2).min(depth), cfg.phase_order, &mut g_rng))
        .collect::<Result<_>>()?;

    for i in 0..RESIDUAL_SAMPLES.min(cfg.samples) {
        let t = sample(depth, cfg.seed, i)?;
        let acted = act_boolean(&gs[(i % 4) as usize], &t)?;
        let worst = t.max_residual().max(acted.max_residual());
        r.check(worst <= RESIDUAL, || format!("tree constraint at sample {i}"), || {
            json!({ "seed": cfg.seed, "index": i, "residual": worst })
        });
    }
    let a = sample(depth, cfg.seed, 0)?;
    let b = sample(depth, cfg.seed, 0)?;
    let same = a.leaves().iter().zip(b.leaves()).all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits());
    r.check(same, || "identical seeds give identical samples".into(), || json!({ "seed": cfg.seed }));

    let polys: Vec<GaussPoly<S>> = reference_monomials()
        .into_iter()
        .filter(|m| m.exps().keys().all(|s| s.len() <= depth))
        .map(|m| GaussPoly::monomial(m, S::one()))
        .collect();
    let count = polys.len();
    let g_of = |i: usize| i % gs.len();
    let mut exact = Vec::with_capacity(2 * count);
    for p in &polys {
        exact.push(p.expectation(CAP)?.to_complex());
    }
    for (i, p) in polys.iter().enumerate() {
        exact.push(p.koopman(&gs[g_of(i)], CAP)?.inner_b(p, CAP)?.to_complex());
    }
    let est = estimate_batch(cfg.samples, depth, cfg.seed, 2 * count, |t, out| {
        let acted: Vec<_> = gs.iter().map(|g| act_boolean(g, t).expect("level checked")).collect();
        for (i, p) in polys.iter().enumerate() {
            let here = p.evaluate(&|s| t.at(s));
            out[i] = here;
            out[count + i] = p.evaluate(&|s| acted[g_of(i)].at(s)) * here.conj();
        }
    })?;
    let mut rows = Vec::new();
    let mut inside = [0usize; 2];
    for (i, e) in est.iter().enumerate() {
        let half = i / count;
        let z = e.z_score(exact[i]);
        if z <= BAND {
            inside[half] += 1;
        } else {
            r.note(format!(
                "{} estimate {} outside {BAND} SE (z = {z:.2})",
                if half == 0 { "moment" } else { "Koopman" },
                polys[i % count].terms().keys().next().map(|m| m.to_string()).unwrap_or_default()
            ));
        }
        rows.push(json!({
            "kind": if half == 0 { "moment" } else { "koopman" },
            "monomial": polys[i % count].terms().keys().next().map(|m| m.to_string()),
            "g": (half == 1).then(|| step_json(&gs[g_of(i % count)])),
            "exact": complex(exact[i]),
            "estimate": complex(e.mean),
            "std_error": e.std_error,
            "z": if z.is_finite() { json!(z) } else { json!(null) },
        }));
    }
    // one outlier in twenty is expected at three standard errors
    let needed = count.saturating_sub(count / 20);
    for (half, name) in ["moments", "Koopman inner products"].iter().enumerate() {
        r.check(inside[half] >= needed, || format!("{name}: {} of {count} within {BAND} SE", inside[half]), || {
            json!({ "inside": inside[half], "needed": needed })
        });
    }
    r.data = json!({ "seed": cfg.seed, "samples": cfg.samples, "depth": depth, "estimates": rows });
    Ok(r)
}

fn complex(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}
