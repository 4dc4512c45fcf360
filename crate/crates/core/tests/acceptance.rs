use std::process::ExitCode;
use std::time::Instant;

use koopman_core::alpha::{f_alpha, support_measure};
use koopman_core::fock::{split_sum, FockVector};
use koopman_core::gauss::{density_rate, f_beta, wick_moment, GaussMonomial, GaussPoly, DEFAULT_EXPANSION_CAP};
use koopman_core::montecarlo::{act_boolean, estimate_batch, reference_monomials};
use koopman_core::scalar::factorial;
use koopman_core::spectral::{check_constraint, IndexFunction, DEFAULT_CAP};
use koopman_core::{AdmissibleWord, BinarySeq, Exact, Limits, Scalar, TorusStep};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CAP: usize = DEFAULT_EXPANSION_CAP;

type Outcome = Result<String, String>;

fn words(n: u32) -> Vec<AdmissibleWord> {
    Limits::default().words_up_to(n, 4).unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn seq(s: &str) -> BinarySeq {
    s.parse().unwrap()
}

fn fock_norms() -> Outcome {
    let mut cases = 0;
    for n in 1..=2 {
        for w in words(n) {
            let v = FockVector::<Exact>::basis(w.clone());
            let expected = Exact::rational(BigRational::from_integer(w.stats().factorial_product()));
            ensure(v.norm_sqr() == expected, || format!("‖{w}‖² = {}", v.norm_sqr()))?;
            let raw = split_sum::<Exact>(&w).map_err(|e| e.to_string())?;
            let l = w.degree() as i64;
            ensure(raw.norm_sqr() == expected.clone() * Exact::sqrt2_pow(2 * l), || {
                format!("2^l-sum norm fails at {w}")
            })?;
            let e = v.embed().map_err(|e| e.to_string())?;
            ensure(e == raw.scale(&Exact::sqrt2_pow(-l)), || format!("split formula fails at {w}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} words"))
}

fn isometry_coherence() -> Outcome {
    let mut cases = 0;
    for n in 1..=2 {
        for w in words(n) {
            let v = FockVector::<Exact>::basis(w.clone());
            let norm = v.norm_sqr();
            let e = v.embed().map_err(|e| e.to_string())?;
            ensure(e.norm_sqr() == norm, || format!("E_n not isometric at {w}"))?;
            let fa = f_alpha(&v).map_err(|e| e.to_string())?;
            ensure(fa.norm_sqr().map_err(|e| e.to_string())? == norm, || format!("‖F^α {w}‖ ≠ ‖{w}‖"))?;
            let fb = f_beta(&v);
            ensure(fb.inner_b(&fb, CAP).map_err(|e| e.to_string())? == norm, || format!("‖F^β {w}‖ ≠ ‖{w}‖"))?;
            let fa_next = f_alpha(&e).map_err(|e| e.to_string())?;
            ensure(fa.refine().map_err(|e| e.to_string())? == fa_next, || format!("F^α coherence fails at {w}"))?;
            let fb_refined = fb.refine(n + 1, CAP).map_err(|e| e.to_string())?;
            ensure(fb_refined == f_beta(&e), || format!("F^β coherence fails at {w}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} words"))
}

fn gram_equality() -> Outcome {
    let mut pairs = 0u64;
    for n in 1..=2 {
        let ws = words(n);
        let vs: Vec<_> = ws.iter().map(|w| FockVector::<Exact>::basis(w.clone())).collect();
        let alphas = vs.iter().map(f_alpha).collect::<Result<Vec<_>, _>>().map_err(|e| e.to_string())?;
        let betas: Vec<_> = vs.iter().map(f_beta).collect();
        for i in 0..vs.len() {
            for j in 0..vs.len() {
                let gamma = vs[i].inner(&vs[j]).map_err(|e| e.to_string())?;
                let a = alphas[i].inner(&alphas[j]).map_err(|e| e.to_string())?;
                let b = betas[i].inner_b(&betas[j], CAP).map_err(|e| e.to_string())?;
                ensure(a == gamma && b == gamma, || {
                    format!("Gram mismatch at ({}, {}): Γ={gamma} α={a} β={b}", ws[i], ws[j])
                })?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs"))
}

fn equivariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let mut checks = 0u64;
    let levels: Vec<(u32, Vec<AdmissibleWord>)> = (1..=2).map(|n| (n, words(n))).collect();
    for round in 0..200 {
        let (n, ws) = &levels[round % 2];
        let g = TorusStep::<Exact>::random_roots(*n, 8, &mut rng).map_err(|e| e.to_string())?;
        for w in ws {
            let v = FockVector::<Exact>::basis(w.clone());
            let moved = v.act(&g).map_err(|e| e.to_string())?;
            let lhs = f_alpha(&moved).map_err(|e| e.to_string())?;
            let rhs = f_alpha(&v).and_then(|a| a.apply_rho(&g)).map_err(|e| e.to_string())?;
            ensure(lhs == rhs, || format!("F^α∘ψ ≠ ρ∘F^α at {w}, g={:?}", g.values()))?;
            let rhs = f_beta(&v).koopman(&g, CAP).map_err(|e| e.to_string())?;
            ensure(f_beta(&moved) == rhs, || format!("F^β∘ψ ≠ U∘F^β at {w}, g={:?}", g.values()))?;
            checks += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for round in 0..50 {
        let (n, ws) = &levels[round % 2];
        let g = TorusStep::<Complex64>::random_angles(*n, &mut rng).map_err(|e| e.to_string())?;
        for w in ws {
            let v = FockVector::<Complex64>::basis(w.clone());
            let moved = v.act(&g).map_err(|e| e.to_string())?;
            let lhs = f_alpha(&moved).map_err(|e| e.to_string())?;
            let rhs = f_alpha(&v).and_then(|a| a.apply_rho(&g)).map_err(|e| e.to_string())?;
            ensure(lhs.approx_eq(&rhs, 1e-9), || format!("float F^α equivariance fails at {w}"))?;
            let rhs = f_beta(&v).koopman(&g, CAP).map_err(|e| e.to_string())?;
            ensure(f_beta(&moved).approx_eq(&rhs, 1e-9), || format!("float F^β equivariance fails at {w}"))?;
            checks += 1;
        }
    }
    Ok(format!("{checks} word/element checks, 200 exact + 50 float group elements"))
}

fn measure_formula() -> Outcome {
    let mut cases = 0;
    for n in 1..=2 {
        for w in words(n) {
            let st = w.stats();
            let expected = BigRational::new(
                factorial(st.p) * factorial(st.q),
                BigInt::from(2).pow(n * w.degree()) * st.factorial_product(),
            );
            let got = support_measure(&w);
            ensure(got == expected, || format!("measure of supp {w} is {got}, expected {expected}"))?;
            cases += 1;
        }
    }
    Ok(format!("{cases} words"))
}

fn density_rates() -> Outcome {
    let mut cases = 0;
    let mut flagged = Vec::new();
    for total in 1..=4u32 {
        for k in 0..=total {
            let m = total - k;
            for l in 1..=3 {
                let r = density_rate::<Exact>(BinarySeq::EMPTY, k, m, l, CAP).map_err(|e| e.to_string())?;
                ensure(r.matches_closed_form(0.0), || {
                    format!("k={k} m={m} l={l}: ‖·‖² = {} vs {}", r.residual_norm_sqr, r.closed_form)
                })?;
                if k != m {
                    ensure(r.centering.is_zero(), || format!("k={k} m={m} l={l}: nonzero centering"))?;
                }
                if r.sqrt_factorial_centering_agrees(0.0) == Some(false) {
                    flagged.push(format!("k=m={m},l={l}"));
                }
                cases += 1;
            }
        }
    }
    ensure(flagged.iter().all(|f| !f.starts_with("k=m=1,")), || "√(1!) centering flagged".into())?;
    ensure(flagged.len() == 3, || format!("expected the m=2 rows flagged, got {flagged:?}"))?;
    Ok(format!("{cases} (k,m,l) cases; √(m!) centering differs from the mean at {}", flagged.join(" ")))
}

fn spectral_constraint() -> Outcome {
    let x10 = IndexFunction::x_pq(1, 0).unwrap();
    let mut cases = 0;
    for m in [-4i64, -3, -2, -1, 1, 2, 3, 4] {
        let r = check_constraint(&[m], &[x10.clone()], 1..=3, DEFAULT_CAP).map_err(|e| e.to_string())?;
        ensure(r.abs_cont == (m.abs() == 1), || format!("m={m}: abs_cont = {}", r.abs_cont))?;
        cases += 1;
    }
    let unit = [
        IndexFunction::x_pq(1, 0).unwrap(),
        IndexFunction::x_pq(0, 1).unwrap(),
        IndexFunction::x_pq(1, 1).unwrap(),
        IndexFunction::x_pq(2, 0).unwrap(),
    ];
    for a in &unit {
        for b in &unit {
            let slots = a.slot_count() + b.slot_count();
            let depths = if slots <= 3 { 1..=2 } else { 1..=1 };
            for c in [[1i64, 1], [1, -1], [-1, 1], [-1, -1]] {
                let r = check_constraint(&c, &[a.clone(), b.clone()], depths.clone(), DEFAULT_CAP)
                    .map_err(|e| e.to_string())?;
                ensure(r.abs_cont, || format!("{c:?}·({a}, {b}) fails"))?;
                cases += 1;
            }
        }
        for c in [1i64, -1] {
            ensure(check_constraint(&[c], &[a.clone()], 1..=2, DEFAULT_CAP).map_err(|e| e.to_string())?.abs_cont, || {
                format!("{c}·{a} fails")
            })?;
            cases += 1;
        }
    }
    Ok(format!("{cases} constraints"))
}

fn monte_carlo() -> Outcome {
    const SAMPLES: u64 = 1_000_000;
    const DEPTH: u32 = 2;
    const SEED: u64 = 0x5eed;
    let polys: Vec<GaussPoly<Exact>> =
        reference_monomials().into_iter().map(|m| GaussPoly::monomial(m, Exact::one())).collect();
    ensure(polys.len() == 20 && polys.iter().all(|p| p.terms().keys().all(|m| m.degree() <= 6)), || {
        "suite shape".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let gs: Vec<TorusStep<Exact>> = (0..4)
        .map(|i| TorusStep::random_roots(1 + (i % 2), 8, &mut rng).unwrap())
        .collect();
    let g_of = |i: usize| i % gs.len();
    let mut exact = Vec::new();
    for p in &polys {
        exact.push(p.expectation(CAP).map_err(|e| e.to_string())?.to_complex());
    }
    for (i, p) in polys.iter().enumerate() {
        let moved = p.koopman(&gs[g_of(i)], CAP).map_err(|e| e.to_string())?;
        exact.push(moved.inner_b(p, CAP).map_err(|e| e.to_string())?.to_complex());
    }
    let est = estimate_batch(SAMPLES, DEPTH, SEED, 40, |t, out| {
        let acted: Vec<_> = gs.iter().map(|g| act_boolean(g, t).unwrap()).collect();
        for (i, p) in polys.iter().enumerate() {
            let here = p.evaluate(&|s| t.at(s));
            out[i] = here;
            out[20 + i] = p.evaluate(&|s| acted[g_of(i)].at(s)) * here.conj();
        }
    })
    .map_err(|e| e.to_string())?;
    let within = |range: std::ops::Range<usize>| range.filter(|&i| est[i].within(exact[i], 3.0)).count();
    let plain = within(0..20);
    let acted = within(20..40);
    let worst = (0..40).map(|i| est[i].z_score(exact[i])).fold(0.0, f64::max);
    let summary = format!("seed {SEED:#x}, {SAMPLES} samples: plain {plain}/20, Koopman {acted}/20 within 3 SE, max z {worst:.2}");
    ensure(plain >= 19 && acted >= 19, || summary.clone())?;
    Ok(summary)
}

fn wick_oracle() -> Outcome {
    let pool = [seq(""), seq("0"), seq("1"), seq("01")];
    let mut cases = 0u64;
    let mut nonzero = 0u64;
    for size in 1..=3usize {
        for vars in combinations(pool.len(), size) {
            for exps in exponent_vectors(size, 6) {
                let m = GaussMonomial::new(vars.iter().zip(exps.chunks(2)).map(|(&v, e)| (pool[v], (e[0], e[1]))));
                let closed = GaussPoly::monomial(m.clone(), Exact::one()).expectation(CAP).map_err(|e| e.to_string())?;
                let brute = wick_moment::<Exact>(&m).map_err(|e| e.to_string())?;
                ensure(closed == brute, || format!("{m}: closed form {closed}, pairings {brute}"))?;
                cases += 1;
                nonzero += u64::from(!brute.is_zero());
            }
        }
    }
    ensure(nonzero > 0, || "no nonzero moments exercised".into())?;
    Ok(format!("{cases} monomials ({nonzero} nonzero)"))
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    (0..n)
        .flat_map(|first| {
            combinations(n, k - 1).into_iter().filter(move |rest| rest.iter().all(|&r| r > first)).map(move |rest| {
                let mut v = vec![first];
                v.extend(rest);
                v
            })
        })
        .collect()
}

/// Exponent pairs `(a_i, b_i)` per variable, each variable present, total
/// degree at most `max`.
fn exponent_vectors(vars: usize, max: u32) -> Vec<Vec<u32>> {
    let mut out = vec![vec![]];
    for _ in 0..2 * vars {
        out = out
            .into_iter()
            .flat_map(|v: Vec<u32>| {
                let used: u32 = v.iter().sum();
                (0..=max - used).map(move |e| {
                    let mut w = v.clone();
                    w.push(e);
                    w
                })
            })
            .collect();
    }
    out.retain(|v| v.chunks(2).all(|c| c[0] + c[1] > 0));
    out
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("fock norms and split identities", fock_norms),
        ("isometry and coherence", isometry_coherence),
        ("cross-realization Gram equality", gram_equality),
        ("equivariance", equivariance),
        ("support measure formula", measure_formula),
        ("density rates", density_rates),
        ("spectral constraint", spectral_constraint),
        ("monte carlo cross-check", monte_carlo),
        ("wick pairing oracle", wick_oracle),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({detail}; {secs:.1}s)", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} {name}: FAIL ({detail}; {secs:.1}s)", i + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
