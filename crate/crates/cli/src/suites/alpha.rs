use koopman_core::alpha::{f_alpha, separating_word, support_contains, support_measure, GridCell, in_separation_domain};
use koopman_core::fock::FockVector;
use koopman_core::scalar::{binomial, factorial};
use koopman_core::{BinarySeq, Result, Scalar};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde_json::json;

use super::{close, random_step, rng, step_json, word_json, words};
use crate::report::SuiteReport;
use crate::RunConfig;

const GROUP_SAMPLES: usize = 10;

pub fn run<S: Scalar>(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("verify-alpha", "step-function realization: isometry, support measure, symmetry, separation");
    for n in 1..=cfg.level_max {
        let ws = words(n, cfg.degree_max)?;
        let basis: Vec<FockVector<S>> = ws.iter().map(|w| FockVector::basis(w.clone())).collect();
        let images = basis.iter().map(f_alpha).collect::<Result<Vec<_>>>()?;
        for (i, w) in ws.iter().enumerate() {
            let st = w.stats();
            let expected = BigRational::new(
                factorial(st.p) * factorial(st.q),
                BigInt::from(2).pow(n * w.degree()) * st.factorial_product(),
            );
            let got = support_measure(w);
            r.check(got == expected, || format!("measure of supp {w}"), || {
                json!({ "word": w.to_string(), "got": got.to_string(), "expected": expected.to_string() })
            });
            for &m in st.multiplicities.values() {
                for k in 0..=m {
                    r.check(factorial(m) == binomial(m, k) * factorial(k) * factorial(m - k), || {
                        format!("m! = C(m,k)k!(m−k)! at m={m}, k={k}")
                    }, || json!({ "m": m, "k": k }));
                }
            }
            r.check(images[i].is_symmetric(), || format!("F^α {w} is block symmetric"), || word_json(w));
            for j in 0..ws.len() {
                let a = images[i].inner(&images[j])?;
                let g = basis[i].inner(&basis[j])?;
                r.check(close(&a, &g), || format!("⟨F^α {w}, F^α {}⟩ = ⟨{w}, {}⟩", ws[j], ws[j]), || {
                    json!({ "u": w.to_string(), "v": ws[j].to_string(), "alpha": a.to_json(), "gamma": g.to_json() })
                });
            }
        }
        let mut g_rng = rng(cfg, 0xa1fa_0000 + n as u64);
        let mut combo = FockVector::<S>::zero(n);
        for w in &ws {
            let c = g_rng.gen_range(-2i64..=2);
            if c != 0 {
                combo.add_term(w.clone(), S::from_int(c))?;
            }
        }
        let fa = f_alpha(&combo)?;
        r.check(close(&fa.norm_sqr()?, &combo.norm_sqr()), || format!("‖F^α v‖ = ‖v‖ for a random v at level {n}"), || {
            json!({ "terms": combo.terms().len() })
        });
        for _ in 0..GROUP_SAMPLES {
            let g = random_step::<S>(n, cfg.phase_order, &mut g_rng)?;
            for (w, v) in ws.iter().zip(&basis) {
                let lhs = f_alpha(&v.act(&g)?)?;
                let rhs = f_alpha(v)?.apply_rho(&g)?;
                r.check(lhs.approx_eq(&rhs, super::TOL), || format!("F^α ψ(g) {w} = ρ(g) F^α {w}"), || {
                    json!({ "word": w.to_string(), "g": step_json(&g) })
                });
            }
        }
    }
    separation(cfg, &mut r);
    Ok(r)
}

fn separation(cfg: &RunConfig, r: &mut SuiteReport) {
    let max_deg = cfg.degree_max.min(3);
    for depth in 1..=cfg.level_max {
        for d in 1..=max_deg {
            for p in 0..=d {
                let cells: Vec<GridCell> = cells(d as usize, depth)
                    .into_iter()
                    .filter(|c| in_separation_domain(c, p as usize))
                    .collect();
                for a in &cells {
                    for b in &cells {
                        if a == b {
                            continue;
                        }
                        let w = separating_word(a, b, p as usize);
                        let ok = w
                            .as_ref()
                            .is_some_and(|w| support_contains(w, p as usize, a) && !support_contains(w, p as usize, b));
                        r.check(ok, || format!("a word separates {a:?} from {b:?}"), || {
                            json!({ "a": format!("{a:?}"), "b": format!("{b:?}"), "p": p })
                        });
                    }
                }
            }
        }
    }
}

fn cells(coords: usize, depth: u32) -> Vec<GridCell> {
    let mut out: Vec<Vec<BinarySeq>> = vec![vec![]];
    for _ in 0..coords {
        out = out
            .into_iter()
            .flat_map(|c| {
                BinarySeq::all(depth).map(move |s| {
                    let mut v = c.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(|c| GridCell::new(c).expect("uniform depth")).collect()
}
