use koopman_core::gauss::{GaussMonomial, GaussPoly, DEFAULT_EXPANSION_CAP};
use koopman_core::montecarlo::{act_boolean, estimate, estimate_koopman_inner, estimate_many, estimate_with, sample};
use koopman_core::{BinarySeq, Exact, Scalar, TorusStep};
use num_complex::Complex64;

const N: u64 = 200_000;

fn seq(s: &str) -> BinarySeq {
    s.parse().unwrap()
}

fn mono(v: &[(&str, u32, u32)]) -> GaussPoly<Exact> {
    GaussPoly::monomial(GaussMonomial::new(v.iter().map(|(s, a, b)| (seq(s), (*a, *b)))), Exact::one())
}

#[test]
fn second_moments_at_every_node() {
    let words: Vec<BinarySeq> = (0..=3).flat_map(BinarySeq::all).collect();
    let polys: Vec<_> = words.iter().map(|s| GaussPoly::<Exact>::z(*s).mul(&GaussPoly::z_bar(*s))).collect();
    let means: Vec<_> = words.iter().map(|s| GaussPoly::<Exact>::z(*s)).collect();
    for e in estimate_many(&polys, N, 3, 1).unwrap() {
        assert!(e.within(Complex64::new(1.0, 0.0), 3.5), "{e:?}");
    }
    for e in estimate_many(&means, N, 3, 2).unwrap() {
        assert!(e.within(Complex64::new(0.0, 0.0), 3.5), "{e:?}");
    }
}

#[test]
fn listed_moments() {
    let cases = [
        (mono(&[("", 2, 2)]), 2.0),
        (mono(&[("0", 1, 1), ("1", 1, 1)]), 1.0),
        (mono(&[("0", 2, 0), ("1", 0, 1)]), 0.0),
    ];
    for (p, exact) in cases {
        let e = estimate(&p, N, 2, 3).unwrap();
        assert!(e.within(Complex64::new(exact, 0.0), 3.5), "{p:?}: {e:?}");
        assert!(e.std_error > 0.0);
    }
}

#[test]
fn action_preserves_distribution() {
    let g = TorusStep::<Exact>::from_roots(2, &[1, 2, 3, 6], 8).unwrap();
    let p = mono(&[("", 2, 1), ("01", 0, 1)]).add(&mono(&[("1", 1, 1)]));
    let before = estimate(&p, N, 2, 4).unwrap();
    let after = estimate_with(N, 2, 4, |t| p.evaluate(&|s| act_boolean(&g, t).unwrap().at(s))).unwrap();
    let se = (before.std_error.powi(2) + after.std_error.powi(2)).sqrt();
    assert!((before.mean - after.mean).norm() <= 4.0 * se);
}

#[test]
fn koopman_inner_products() {
    let g = TorusStep::<Exact>::from_roots(1, &[3, 5], 8).unwrap();
    let p = mono(&[("0", 1, 0), ("1", 1, 0)]);
    let q = mono(&[("", 2, 0)]);
    let exact = p.koopman(&g, DEFAULT_EXPANSION_CAP).unwrap().inner_b(&q, DEFAULT_EXPANSION_CAP).unwrap();
    let e = estimate_koopman_inner(&g, &p, &q, N, 1, 6).unwrap();
    assert!(e.within(exact.to_complex(), 3.5), "{e:?} vs {exact}");
    assert!(exact.to_complex().norm() > 0.1);
}

#[test]
fn seed_determinism_bitwise() {
    for i in [0u64, 17, 1 << 40] {
        let a = sample(6, 99, i).unwrap();
        let b = sample(6, 99, i).unwrap();
        assert!(a.leaves().iter().zip(b.leaves()).all(|(x, y)| x.re.to_bits() == y.re.to_bits()
            && x.im.to_bits() == y.im.to_bits()));
    }
}

#[test]
fn constant_polynomial() {
    let e = estimate(&GaussPoly::<Exact>::constant(Exact::one()), 1000, 0, 0).unwrap();
    assert_eq!(e.mean, Complex64::new(1.0, 0.0));
    assert_eq!(e.std_error, 0.0);
}
