use koopman_core::alpha::f_alpha;
use koopman_core::fock::FockVector;
use koopman_core::gauss::{f_beta, independent_product, q_dense_expansion, GaussMonomial, GaussPoly, DEFAULT_EXPANSION_CAP as CAP};
use koopman_core::{BinarySeq, Result, Scalar};
use serde_json::json;

use super::{close, words};
use crate::report::SuiteReport;
use crate::RunConfig;

pub fn run<S: Scalar>(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("verify-coherence", "both realizations commute with the level embedding");
    for n in 1..=cfg.level_max {
        for w in words(n, cfg.degree_max)? {
            let v = FockVector::<S>::basis(w.clone());
            let e = v.embed()?;
            r.check(close(&e.norm_sqr(), &v.norm_sqr()), || format!("‖E {w}‖ = ‖{w}‖"), || json!(w.to_string()));
            let lhs = f_alpha(&v)?.refine()?;
            let rhs = f_alpha(&e)?;
            r.check(lhs.approx_eq(&rhs, super::TOL), || format!("refine F^α {w} = F^α E {w}"), || {
                json!({ "word": w.to_string(), "refined": lhs.to_json(), "embedded": rhs.to_json() })
            });
            let lhs = f_beta(&v).refine(n + 1, CAP)?;
            let rhs = f_beta(&e);
            r.check(lhs.approx_eq(&rhs, super::TOL), || format!("refine F^β {w} = F^β E {w}"), || {
                json!({ "word": w.to_string(), "refined": lhs.to_json(), "embedded": rhs.to_json() })
            });
        }
    }
    let roots: [BinarySeq; 2] = [BinarySeq::EMPTY, "0".parse()?];
    for s in roots {
        for deg in 1..=cfg.degree_max.min(3) {
            for k in 0..=deg {
                for l in 1..=2 {
                    let q = q_dense_expansion::<S>(s, k, deg - k, l, CAP)?;
                    r.check(q.identity_holds(super::TOL) && q.lower_degree_factors, || {
                        format!("expansion of z_{s}^{k} z̄_{s}^{} over 2^{l}", deg - k)
                    }, || json!({ "s": s.to_string(), "k": k, "m": deg - k, "l": l }));
                }
            }
        }
    }
    let mono = |v: &[(&str, u32, u32)]| -> Result<GaussPoly<S>> {
        let m = v.iter().map(|(s, a, b)| Ok((s.parse()?, (*a, *b)))).collect::<Result<Vec<_>>>()?;
        Ok(GaussPoly::monomial(GaussMonomial::new(m), S::one()))
    };
    let pairs = [
        (mono(&[("0", 1, 1)])?, mono(&[("1", 2, 2)])?),
        (mono(&[("00", 2, 1), ("01", 0, 1)])?, mono(&[("1", 1, 1)])?),
        (mono(&[("0", 1, 1)])?.add(&mono(&[("00", 1, 0)])?), mono(&[("10", 1, 1), ("11", 1, 1)])?),
    ];
    for (p, q) in &pairs {
        let (joint, separate) = independent_product(p, q, CAP)?;
        r.check(close(&joint, &separate), || "disjoint subtrees are independent".into(), || {
            json!({ "p": p.to_json(), "q": q.to_json(), "joint": joint.to_json(), "product": separate.to_json() })
        });
    }
    Ok(r)
}
