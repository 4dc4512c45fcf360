use std::collections::BTreeMap;

use koopman_core::fock::{split_sum, FockVector};
use koopman_core::scalar::factorial;
use koopman_core::{BinarySeq, Exact, QSqrt2, Result, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde_json::json;

use super::{close, random_step, rng, step_json, word_json, words};
use crate::report::SuiteReport;
use crate::RunConfig;

const GROUP_SAMPLES: usize = 8;

pub fn run<S: Scalar>(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("verify-fock", "basic vector norms, the level embedding and the torus action");
    scalar_norms(cfg, &mut r);
    for n in 1..=cfg.level_max {
        let ws = words(n, cfg.degree_max)?;
        let basis: Vec<FockVector<S>> = ws.iter().map(|w| FockVector::basis(w.clone())).collect();
        for (w, v) in ws.iter().zip(&basis) {
            let st = w.stats();
            let admissible = w.entries().iter().all(|s| !w.entries().contains(&s.conj()));
            let total: u32 = st.multiplicities.values().sum();
            r.check(admissible && total == st.p + st.q && total == w.degree(), || format!("stats of {w}"), || {
                json!({ "word": w.to_string(), "p": st.p, "q": st.q, "sum_m": total })
            });
            r.check(w.conj().conj() == *w, || format!("conj∘conj at {w}"), || word_json(w));
            r.check(BigInt::from(w.variants().len()) == w.variant_count(), || format!("variant count of {w}"), || {
                json!({ "word": w.to_string(), "enumerated": w.variants().len(), "formula": w.variant_count().to_string() })
            });
            let expected = S::from_ratio(&BigRational::from_integer(st.factorial_product()));
            r.check(close(&v.norm_sqr(), &expected), || format!("‖{w}‖² = ∏ m_s!"), || {
                json!({ "word": w.to_string(), "norm_sqr": v.norm_sqr().to_json() })
            });
            split_checks(w, v, &mut r)?;
        }
        for i in 0..basis.len() {
            let ei = basis[i].embed()?;
            for j in i + 1..basis.len() {
                let ip = basis[i].inner(&basis[j])?;
                r.check(ip.is_zero(), || format!("⟨{}, {}⟩ = 0", ws[i], ws[j]), || {
                    json!({ "u": ws[i].to_string(), "v": ws[j].to_string(), "inner": ip.to_json() })
                });
                let ej = basis[j].embed()?;
                let ip = ei.inner(&ej)?;
                r.check(close(&ip, &S::zero()), || format!("⟨E {}, E {}⟩ = 0", ws[i], ws[j]), || {
                    json!({ "u": ws[i].to_string(), "v": ws[j].to_string(), "inner": ip.to_json() })
                });
            }
        }
        action_checks(cfg, n, &ws, &basis, &mut r)?;
    }
    Ok(r)
}

fn split_checks<S: Scalar>(w: &koopman_core::AdmissibleWord, v: &FockVector<S>, r: &mut SuiteReport) -> Result<()> {
    let l = w.degree();
    for eps in BinarySeq::all(l) {
        let digits: Vec<u8> = (0..l).map(|i| eps.digit(i)).collect();
        let moved = w.append_digits(&digits)?;
        // k_s counts the entries over s that receive the digit 0
        let mut k: BTreeMap<BinarySeq, (u32, u32)> = BTreeMap::new();
        for (s, d) in w.entries().iter().zip(&digits) {
            let e = k.entry(s.word).or_default();
            e.1 += 1;
            if *d == 0 {
                e.0 += 1;
            }
        }
        let expected: BigInt = k.values().map(|&(ks, ms)| factorial(ks) * factorial(ms - ks)).product();
        let got = FockVector::<S>::basis(moved.clone()).norm_sqr();
        r.check(close(&got, &S::from_ratio(&BigRational::from_integer(expected.clone()))), || {
            format!("‖{w}·{eps}‖² = ∏ k_s!(m_s−k_s)!")
        }, || json!({ "word": w.to_string(), "eps": eps.to_string(), "got": got.to_json(), "expected": expected.to_string() }));
        for (sym, &d) in w.entries().iter().zip(&digits) {
            let commutes = sym.push(d)?.conj() == sym.conj().push(d)?;
            r.check(commutes, || format!("append/conj commute at {sym}·{d}"), || word_json(w));
        }
    }
    let raw = split_sum::<S>(w)?;
    let lhs = v.norm_sqr() * S::sqrt2_pow(2 * l as i64);
    r.check(close(&raw.norm_sqr(), &lhs), || format!("2^l‖{w}‖² = ‖Σ_ε {w}ε‖²"), || {
        json!({ "word": w.to_string(), "sum_norm": raw.norm_sqr().to_json() })
    });
    let e = v.embed()?;
    r.check(close(&e.norm_sqr(), &v.norm_sqr()), || format!("‖E {w}‖ = ‖{w}‖"), || word_json(w));
    r.check(e.approx_eq(&raw.scale(&S::sqrt2_pow(-(l as i64))), super::TOL), || format!("E {w} = 2^(−l/2) Σ_ε"), || {
        word_json(w)
    });
    Ok(())
}

fn action_checks<S: Scalar>(
    cfg: &RunConfig,
    n: u32,
    ws: &[koopman_core::AdmissibleWord],
    basis: &[FockVector<S>],
    r: &mut SuiteReport,
) -> Result<()> {
    let mut g_rng = rng(cfg, 0x0f0c_0000 + n as u64);
    let mut combo = FockVector::<S>::zero(n);
    for w in ws {
        let c = g_rng.gen_range(-2i64..=2);
        if c != 0 {
            combo.add_term(w.clone(), S::from_int(c))?;
        }
    }
    for _ in 0..GROUP_SAMPLES {
        let g = random_step::<S>(n, cfg.phase_order, &mut g_rng)?;
        let h = random_step::<S>(n, cfg.phase_order, &mut g_rng)?;
        let gh = g.mul(&h);
        for (w, v) in ws.iter().zip(basis) {
            let lhs = v.act(&h)?.act(&g)?;
            r.check(lhs.approx_eq(&v.act(&gh)?, super::TOL), || format!("ψ(g)ψ(h) = ψ(gh) at {w}"), || {
                json!({ "word": w.to_string(), "g": step_json(&g), "h": step_json(&h) })
            });
        }
        let moved = combo.act(&g)?;
        r.check(close(&moved.norm_sqr(), &combo.norm_sqr()), || "ψ(g) preserves norms".into(), || {
            json!({ "g": step_json(&g), "terms": combo.terms().len() })
        });
        let ip = moved.inner(&basis[0].act(&g)?)?;
        r.check(close(&ip, &combo.inner(&basis[0])?), || "ψ(g) preserves inner products".into(), || {
            json!({ "g": step_json(&g) })
        });
    }
    Ok(())
}

/// `|xy|² = |x|²|y|²` on random elements of the exact field.
fn scalar_norms(cfg: &RunConfig, r: &mut SuiteReport) {
    let mut g = rng(cfg, 0x5ca1a);
    let q = |g: &mut rand_chacha::ChaCha8Rng| {
        let mut rr = || BigRational::new(g.gen_range(-20i64..=20).into(), g.gen_range(1i64..=9).into());
        QSqrt2::new(rr(), rr())
    };
    for _ in 0..100 {
        let x = Exact::new(q(&mut g), q(&mut g));
        let y = Exact::new(q(&mut g), q(&mut g));
        let xy = x.clone() * y.clone();
        r.check(xy.norm_sqr() == x.norm_sqr() * y.norm_sqr(), || "norm multiplicativity".into(), || {
            json!({ "x": x.to_json(), "y": y.to_json() })
        });
    }
}
