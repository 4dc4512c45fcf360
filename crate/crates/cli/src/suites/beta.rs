use koopman_core::alpha::f_alpha;
use koopman_core::fock::FockVector;
use koopman_core::gauss::{f_beta, wick_moment, GaussMonomial, GaussPoly, DEFAULT_EXPANSION_CAP as CAP};
use koopman_core::{BinarySeq, Result, Scalar};
use serde_json::json;

use super::{close, random_step, rng, step_json, words};
use crate::report::SuiteReport;
use crate::RunConfig;

const GROUP_SAMPLES: usize = 6;
const WICK_DEGREE: u32 = 6;

pub fn run<S: Scalar>(cfg: &RunConfig) -> Result<SuiteReport> {
    let mut r = SuiteReport::new("verify-beta", "Gaussian realization: Gram transport, Koopman operator, Wick pairings");
    for n in 1..=cfg.level_max {
        let ws = words(n, cfg.degree_max)?;
        let basis: Vec<FockVector<S>> = ws.iter().map(|w| FockVector::basis(w.clone())).collect();
        let betas: Vec<GaussPoly<S>> = basis.iter().map(f_beta).collect();
        let alphas = basis.iter().map(f_alpha).collect::<Result<Vec<_>>>()?;
        for i in 0..ws.len() {
            for j in 0..ws.len() {
                let b = betas[i].inner_b(&betas[j], CAP)?;
                let g = basis[i].inner(&basis[j])?;
                let a = alphas[i].inner(&alphas[j])?;
                r.check(close(&b, &g) && close(&a, &b), || format!("Gram at ({}, {})", ws[i], ws[j]), || {
                    json!({
                        "u": ws[i].to_string(), "v": ws[j].to_string(),
                        "gamma": g.to_json(), "alpha": a.to_json(), "beta": b.to_json(),
                    })
                });
            }
            // refinement keeps moments and inner products
            let p = &betas[i];
            let q = &betas[(i + 1) % ws.len()];
            let pr = p.refine(n + 1, CAP)?;
            let qr = q.refine(n + 1, CAP)?;
            let pq = p.mul(&q.conj());
            r.check(close(&pq.refine(n + 1, CAP)?.moment()?, &pq.moment()?), || format!("refine keeps ∫ at {}", ws[i]), || {
                json!({ "p": p.to_json(), "q": q.to_json() })
            });
            r.check(close(&pr.inner_b(&qr, CAP)?, &p.inner_b(q, CAP)?), || format!("refine keeps ⟨·,·⟩ at {}", ws[i]), || {
                json!({ "p": p.to_json(), "q": q.to_json() })
            });
        }
        let mut g_rng = rng(cfg, 0xbe7a_0000 + n as u64);
        for _ in 0..GROUP_SAMPLES {
            let g = random_step::<S>(n, cfg.phase_order, &mut g_rng)?;
            let h = random_step::<S>(n, cfg.phase_order, &mut g_rng)?;
            let gh = g.mul(&h);
            for (i, (w, v)) in ws.iter().zip(&basis).enumerate() {
                let p = &betas[i];
                let q = &betas[(i + 1) % ws.len()];
                let lhs = f_beta(&v.act(&g)?);
                let rhs = p.koopman(&g, CAP)?;
                r.check(lhs.approx_eq(&rhs, super::TOL), || format!("F^β ψ(g) {w} = U(g) F^β {w}"), || {
                    json!({ "word": w.to_string(), "g": step_json(&g) })
                });
                let two = p.koopman(&h, CAP)?.koopman(&g, CAP)?;
                r.check(two.approx_eq(&p.koopman(&gh, CAP)?, super::TOL), || format!("U(g)U(h) = U(gh) at {w}"), || {
                    json!({ "word": w.to_string(), "g": step_json(&g), "h": step_json(&h) })
                });
                let moved = rhs.inner_b(&q.koopman(&g, CAP)?, CAP)?;
                r.check(close(&moved, &p.inner_b(q, CAP)?), || format!("U(g) unitary at {w}"), || {
                    json!({ "word": w.to_string(), "g": step_json(&g) })
                });
            }
        }
    }
    wick::<S>(cfg, &mut r)?;
    Ok(r)
}

/// Closed-form moments against brute-force pairings, all monomials of
/// degree ≤ 6 in at most three variables from a small pool of words.
fn wick<S: Scalar>(cfg: &RunConfig, r: &mut SuiteReport) -> Result<()> {
    let mut pool: Vec<BinarySeq> = vec![BinarySeq::EMPTY, "0".parse()?, "1".parse()?];
    if cfg.level_max >= 2 {
        pool.push("01".parse()?);
    }
    for size in 1..=3usize.min(pool.len()) {
        for vars in subsets(pool.len(), size) {
            for exps in exponents(size, WICK_DEGREE) {
                let m = GaussMonomial::new(vars.iter().zip(exps.chunks(2)).map(|(&v, e)| (pool[v], (e[0], e[1]))));
                let closed = GaussPoly::monomial(m.clone(), S::one()).expectation(CAP)?;
                let brute = wick_moment::<S>(&m)?;
                r.check(close(&closed, &brute), || format!("Wick moment of {m}"), || {
                    json!({ "monomial": m.to_json(), "closed": closed.to_json(), "pairings": brute.to_json() })
                });
            }
        }
    }
    Ok(())
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in 0..n {
        for rest in subsets(n, k - 1) {
            if rest.iter().all(|&x| x > first) {
                let mut v = vec![first];
                v.extend(rest);
                out.push(v);
            }
        }
    }
    out
}

/// `(a_i, b_i)` per variable, every variable present, total at most `max`.
fn exponents(vars: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out: Vec<Vec<u32>> = vec![vec![]];
    for _ in 0..2 * vars {
        let mut next = Vec::new();
        for v in out {
            let used: u32 = v.iter().sum();
            for e in 0..=max - used {
                let mut w = v.clone();
                w.push(e);
                next.push(w);
            }
        }
        out = next;
    }
    out.retain(|v| v.chunks(2).all(|c| c[0] + c[1] > 0));
    out
}
