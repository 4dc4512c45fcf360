//! The modified symmetric Fock space Γ(n) over `2ⁿ ∪ conj(2ⁿ)`.
//!
//! Vectors are sparse combinations of basic product vectors, keyed by the
//! canonical [`AdmissibleWord`]. Distinct keys are orthogonal and the norm
//! of a basic vector is `∏ m_s!`.

use std::collections::BTreeMap;

use num_rational::BigRational;

use crate::combinatorics::{AdmissibleWord, BinarySeq, Symbol, TorusStep, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::scalar::{binomial, Scalar};

/// Largest degree a [`FockVector`] may carry.
pub const DEFAULT_MAX_DEGREE: u32 = 5;

#[derive(Clone, Debug, PartialEq)]
pub struct FockVector<S> {
    level: u32,
    terms: BTreeMap<AdmissibleWord, S>,
}

impl<S: Scalar> FockVector<S> {
    pub fn zero(level: u32) -> Self {
        FockVector { level, terms: BTreeMap::new() }
    }

    /// The basic product vector indexed by `word`.
    pub fn basis(word: AdmissibleWord) -> Self {
        let level = word.level();
        let mut terms = BTreeMap::new();
        terms.insert(word, S::one());
        FockVector { level, terms }
    }

    pub fn from_terms<I>(level: u32, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (AdmissibleWord, S)>,
    {
        let mut v = FockVector::zero(level);
        for (w, c) in terms {
            v.add_term(w, c)?;
        }
        Ok(v)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn terms(&self) -> &BTreeMap<AdmissibleWord, S> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, w: &AdmissibleWord) -> S {
        self.terms.get(w).cloned().unwrap_or_else(S::zero)
    }

    pub fn add_term(&mut self, w: AdmissibleWord, c: S) -> Result<()> {
        if w.level() != self.level {
            return Err(Error::LevelMismatch { left: self.level, right: w.level() });
        }
        if w.degree() > DEFAULT_MAX_DEGREE {
            return Err(Error::CapExceeded {
                what: "Fock degree",
                size: w.degree() as u128,
                cap: DEFAULT_MAX_DEGREE as u128,
            });
        }
        accumulate(&mut self.terms, w, c);
        Ok(())
    }

    pub fn add(&self, other: &FockVector<S>) -> Result<FockVector<S>> {
        check_level(self.level, other.level)?;
        let mut out = self.clone();
        for (w, c) in &other.terms {
            accumulate(&mut out.terms, w.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn scale(&self, c: &S) -> FockVector<S> {
        let mut out = FockVector::zero(self.level);
        for (w, v) in &self.terms {
            accumulate(&mut out.terms, w.clone(), v.clone() * c.clone());
        }
        out
    }

    /// The component of degree `l`.
    pub fn degree_component(&self, l: u32) -> FockVector<S> {
        FockVector {
            level: self.level,
            terms: self.terms.iter().filter(|(w, _)| w.degree() == l).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    /// `⟨u, v⟩ = Σ_w u_w·conj(v_w)·∏ m_s!`; linear in the first argument.
    pub fn inner(&self, other: &FockVector<S>) -> Result<S> {
        check_level(self.level, other.level)?;
        let mut acc = S::zero();
        for (w, c) in &self.terms {
            if let Some(d) = other.terms.get(w) {
                acc = acc + c.clone() * d.conj() * basis_norm_sqr::<S>(w);
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> S {
        self.inner(self).expect("same level")
    }

    /// `E_n`: substitutes `v_σ ↦ (v_{σ0} + v_{σ1})/√2` in every basic
    /// product. Each distinct symbol of multiplicity `c` sends `k` copies to
    /// `σ0` in `C(c, k)` ways.
    pub fn embed(&self) -> Result<FockVector<S>> {
        if self.level + 1 > MAX_DEPTH {
            return Err(Error::DepthExceeded { requested: self.level + 1, max: MAX_DEPTH });
        }
        let mut out = FockVector::zero(self.level + 1);
        for (w, c) in &self.terms {
            let scale = c.clone() * S::sqrt2_pow(-(w.degree() as i64));
            let mut partial: Vec<(Vec<Symbol>, BigRational)> = vec![(Vec::new(), BigRational::from_integer(1.into()))];
            for (sym, count) in w.symbol_counts() {
                let zero = sym.push(0)?;
                let one = sym.push(1)?;
                let mut next = Vec::with_capacity(partial.len() * (count as usize + 1));
                for (syms, coeff) in &partial {
                    for k in 0..=count {
                        let mut s = syms.clone();
                        s.extend(std::iter::repeat(zero).take(k as usize));
                        s.extend(std::iter::repeat(one).take((count - k) as usize));
                        next.push((s, coeff * BigRational::from_integer(binomial(count, k))));
                    }
                }
                partial = next;
            }
            for (syms, coeff) in partial {
                let word = AdmissibleWord::new(self.level + 1, syms)?;
                accumulate(&mut out.terms, word, scale.clone() * S::from_ratio(&coeff));
            }
        }
        Ok(out)
    }

    /// `ψ_n(g)`: scales each basic vector by `g_{r₁}⋯g_{r_p}·g⁻¹_{t₁}⋯g⁻¹_{t_q}`.
    pub fn act(&self, g: &TorusStep<S>) -> Result<FockVector<S>> {
        check_level(g.level(), self.level)?;
        let mut out = FockVector::zero(self.level);
        for (w, c) in &self.terms {
            accumulate(&mut out.terms, w.clone(), word_phase(g, w) * c.clone());
        }
        Ok(out)
    }

    /// Coefficientwise comparison with tolerance `tol` on the float backend.
    pub fn approx_eq(&self, other: &FockVector<S>, tol: f64) -> bool {
        if self.level != other.level {
            return false;
        }
        let zero = S::zero();
        self.terms
            .keys()
            .chain(other.terms.keys())
            .all(|w| self.terms.get(w).unwrap_or(&zero).approx_eq(other.terms.get(w).unwrap_or(&zero), tol))
    }
}

/// The phase `ψ(g)` assigns to a basic vector; independent of the variant.
pub fn word_phase<S: Scalar>(g: &TorusStep<S>, w: &AdmissibleWord) -> S {
    w.entries().iter().fold(S::one(), |acc, s| {
        let v = g.at(&s.word);
        if s.barred {
            acc * v.conj()
        } else {
            acc * v.clone()
        }
    })
}

/// `‖v_w‖² = ∏ m_s!`
pub fn basis_norm_sqr<S: Scalar>(w: &AdmissibleWord) -> S {
    S::from_ratio(&BigRational::from_integer(w.stats().factorial_product()))
}

/// `Σ_{ε∈2^l} v_{σ₁ε₁}⋯v_{σ_lε_l}` by direct summation over all `2^l`
/// digit strings, with no normalization.
pub fn split_sum<S: Scalar>(w: &AdmissibleWord) -> Result<FockVector<S>> {
    let l = w.degree();
    let mut out = FockVector::zero(w.level() + 1);
    for eps in BinarySeq::all(l) {
        let digits: Vec<u8> = (0..l).map(|i| eps.digit(i)).collect();
        accumulate(&mut out.terms, w.append_digits(&digits)?, S::one());
    }
    Ok(out)
}

fn accumulate<S: Scalar>(terms: &mut BTreeMap<AdmissibleWord, S>, w: AdmissibleWord, c: S) {
    if c.is_zero() {
        return;
    }
    match terms.remove(&w) {
        Some(old) => {
            let sum = old + c;
            if !sum.is_zero() {
                terms.insert(w, sum);
            }
        }
        None => {
            terms.insert(w, c);
        }
    }
}

fn check_level(a: u32, b: u32) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::LevelMismatch { left: a, right: b })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::combinatorics::Limits;
    use crate::scalar::{rat, Exact};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn w(s: &str) -> AdmissibleWord {
        s.parse().unwrap()
    }

    fn basis(s: &str) -> FockVector<Exact> {
        FockVector::basis(w(s))
    }

    #[test]
    fn inner_examples() {
        assert_eq!(basis("0 0 ~1").norm_sqr(), Exact::from_int(2));
        assert_eq!(basis("01").norm_sqr(), Exact::one());
        assert_eq!(basis("0 1").inner(&basis("0 ~1")).unwrap(), Exact::zero());
        assert!(matches!(basis("0").inner(&basis("00")), Err(Error::LevelMismatch { .. })));
    }

    #[test]
    fn embed_examples() {
        let e = basis("0").embed().unwrap();
        let h = Exact::sqrt2_pow(-1);
        let expected = FockVector::from_terms(2, [(w("00"), h.clone()), (w("01"), h)]).unwrap();
        assert_eq!(e, expected);

        let e = basis("0 0").embed().unwrap();
        let expected = FockVector::from_terms(
            2,
            [
                (w("00 00"), Exact::rational(rat(1, 2))),
                (w("00 01"), Exact::one()),
                (w("01 01"), Exact::rational(rat(1, 2))),
            ],
        )
        .unwrap();
        assert_eq!(e, expected);
        assert_eq!(e.norm_sqr(), Exact::from_int(2));

        let e = basis("~1").embed().unwrap();
        assert!(e.terms().contains_key(&w("~10")) && e.terms().contains_key(&w("~11")));
    }

    #[test]
    fn embed_agrees_with_raw_split_sum() {
        for n in 1..=2 {
            for word in Limits::default().words_up_to(n, 4).unwrap() {
                let raw = split_sum::<Exact>(&word).unwrap().scale(&Exact::sqrt2_pow(-(word.degree() as i64)));
                assert_eq!(FockVector::basis(word.clone()).embed().unwrap(), raw, "{word}");
            }
        }
    }

    #[test]
    fn act_examples() {
        let g = TorusStep::<Exact>::from_roots(1, &[1, 3], 8).unwrap();
        let v = basis("0 0 ~1");
        let (g0, g1) = (g.values()[0].clone(), g.values()[1].clone());
        let expected = v.scale(&(g0.clone() * g0 * g1.inv().unwrap()));
        assert_eq!(v.act(&g).unwrap(), expected);
        assert_eq!(v.act(&TorusStep::identity(1)).unwrap(), v);
        assert!(v.act(&TorusStep::identity(2)).is_err());
    }

    #[test]
    fn act_is_a_unitary_homomorphism_and_commutes_with_embed() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let words = Limits::default().words_up_to(1, 3).unwrap();
        let v = FockVector::from_terms(
            1,
            words.iter().enumerate().map(|(i, w)| (w.clone(), Exact::root_of_unity(i as i64, 8).unwrap())),
        )
        .unwrap();
        for _ in 0..5 {
            let g = TorusStep::<Exact>::random_roots(1, 8, &mut rng).unwrap();
            let h = TorusStep::<Exact>::random_roots(1, 8, &mut rng).unwrap();
            let gv = v.act(&g).unwrap();
            assert_eq!(gv.norm_sqr(), v.norm_sqr());
            assert_eq!(gv.act(&h).unwrap(), v.act(&g.mul(&h)).unwrap());
            let lifted = g.lift(2).unwrap();
            assert_eq!(gv.embed().unwrap(), v.embed().unwrap().act(&lifted).unwrap());
        }
    }

    #[test]
    fn float_backend_agrees_within_tolerance() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let g = TorusStep::<Complex64>::random_angles(2, &mut rng).unwrap();
        for word in Limits::default().words_up_to(2, 3).unwrap() {
            let v = FockVector::<Complex64>::basis(word);
            let gv = v.act(&g).unwrap();
            assert!((gv.norm_sqr() - v.norm_sqr()).norm() < 1e-9);
            assert!(gv.embed().unwrap().approx_eq(&v.embed().unwrap().act(&g.lift(3).unwrap()).unwrap(), 1e-9));
        }
    }

    #[test]
    fn degree_cap_enforced() {
        let mut v = FockVector::<Exact>::zero(1);
        assert!(v.add_term(w("0 0 0 0 0 0"), Exact::one()).is_err());
    }
}
