//! Polynomials in `z_s, z̄_s` over the Gaussian inverse-limit space, their
//! `γ_∞` moments, the Koopman action of step elements, and the map `F^β_n`.
//!
//! Variables of different lengths are correlated through
//! `z_s = (z_{s0} + z_{s1})/√2`, so [`GaussPoly::moment`] insists on a single
//! level; [`GaussPoly::refine`] rewrites everything in terms of one level.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::combinatorics::{BinarySeq, TorusStep, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::scalar::{binomial, factorial, split_sqrt, Scalar};

/// Default bound on the number of monomials an expansion may produce.
pub const DEFAULT_EXPANSION_CAP: usize = 200_000;

/// `∏_s z_s^{a_s} z̄_s^{b_s}`; `(0, 0)` exponents are never stored.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GaussMonomial {
    exps: BTreeMap<BinarySeq, (u32, u32)>,
}

impl GaussMonomial {
    pub fn one() -> Self {
        GaussMonomial::default()
    }

    pub fn new<I: IntoIterator<Item = (BinarySeq, (u32, u32))>>(exps: I) -> Self {
        let mut m = GaussMonomial::one();
        for (s, (a, b)) in exps {
            m.bump(s, a, b);
        }
        m
    }

    fn bump(&mut self, s: BinarySeq, a: u32, b: u32) {
        if a == 0 && b == 0 {
            return;
        }
        let e = self.exps.entry(s).or_insert((0, 0));
        e.0 += a;
        e.1 += b;
    }

    pub fn exps(&self) -> &BTreeMap<BinarySeq, (u32, u32)> {
        &self.exps
    }

    pub fn degree(&self) -> u32 {
        self.exps.values().map(|(a, b)| a + b).sum()
    }

    pub fn is_constant(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn mul(&self, other: &GaussMonomial) -> GaussMonomial {
        let mut out = self.clone();
        for (s, (a, b)) in &other.exps {
            out.bump(*s, *a, *b);
        }
        out
    }

    pub fn conj(&self) -> GaussMonomial {
        GaussMonomial { exps: self.exps.iter().map(|(s, (a, b))| (*s, (*b, *a))).collect() }
    }

    /// Closed-form moment for single-level monomials: `∏_s a_s!` when every
    /// `a_s = b_s`, else zero.
    pub fn moment(&self) -> Result<BigInt> {
        check_single_level(self.exps.keys())?;
        let mut acc = BigInt::one();
        for (a, b) in self.exps.values() {
            if a != b {
                return Ok(BigInt::zero());
            }
            acc *= factorial(*a);
        }
        Ok(acc)
    }

    pub fn evaluate(&self, z: &impl Fn(&BinarySeq) -> Complex64) -> Complex64 {
        self.exps.iter().fold(Complex64::new(1.0, 0.0), |acc, (s, (a, b))| {
            let v = z(s);
            acc * v.powu(*a) * v.conj().powu(*b)
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .exps
            .iter()
            .map(|(s, (a, b))| json!({ "word": s.to_string(), "a": a, "b": b }))
            .collect::<Vec<_>>())
    }
}

impl fmt::Display for GaussMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (s, (a, b)) in &self.exps {
            for (e, name) in [(a, "z"), (b, "z̄")] {
                if *e == 0 {
                    continue;
                }
                if !first {
                    f.write_str("·")?;
                }
                first = false;
                write!(f, "{name}_{s}")?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for GaussMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

fn check_single_level<'a>(words: impl Iterator<Item = &'a BinarySeq>) -> Result<()> {
    let levels: BTreeSet<u32> = words.map(|s| s.len()).collect();
    if levels.len() > 1 {
        Err(Error::MixedLevels)
    } else {
        Ok(())
    }
}

/// A polynomial in the variables `z_s, z̄_s`.
#[derive(Clone, PartialEq)]
pub struct GaussPoly<S> {
    terms: BTreeMap<GaussMonomial, S>,
}

impl<S: Scalar> fmt::Debug for GaussPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})·{m}")?;
        }
        Ok(())
    }
}

impl<S: Scalar> Default for GaussPoly<S> {
    fn default() -> Self {
        GaussPoly { terms: BTreeMap::new() }
    }
}

impl<S: Scalar> GaussPoly<S> {
    pub fn zero() -> Self {
        GaussPoly::default()
    }

    pub fn constant(c: S) -> Self {
        GaussPoly::monomial(GaussMonomial::one(), c)
    }

    pub fn monomial(m: GaussMonomial, c: S) -> Self {
        let mut p = GaussPoly::zero();
        p.accumulate(m, c);
        p
    }

    /// `z_s`
    pub fn z(s: BinarySeq) -> Self {
        GaussPoly::monomial(GaussMonomial::new([(s, (1, 0))]), S::one())
    }

    /// `z̄_s`
    pub fn z_bar(s: BinarySeq) -> Self {
        GaussPoly::monomial(GaussMonomial::new([(s, (0, 1))]), S::one())
    }

    pub fn terms(&self) -> &BTreeMap<GaussMonomial, S> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn accumulate(&mut self, m: GaussMonomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.remove(&m) {
            Some(old) => {
                let sum = old + c;
                if !sum.is_zero() {
                    self.terms.insert(m, sum);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &GaussPoly<S>) -> GaussPoly<S> {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.accumulate(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &GaussPoly<S>) -> GaussPoly<S> {
        self.add(&other.scale(&-S::one()))
    }

    pub fn scale(&self, k: &S) -> GaussPoly<S> {
        let mut out = GaussPoly::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.clone(), c.clone() * k.clone());
        }
        out
    }

    pub fn mul(&self, other: &GaussPoly<S>) -> GaussPoly<S> {
        let mut out = GaussPoly::zero();
        for (m, c) in &self.terms {
            for (n, d) in &other.terms {
                out.accumulate(m.mul(n), c.clone() * d.clone());
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> GaussPoly<S> {
        (0..e).fold(GaussPoly::constant(S::one()), |acc, _| acc.mul(self))
    }

    pub fn conj(&self) -> GaussPoly<S> {
        let mut out = GaussPoly::zero();
        for (m, c) in &self.terms {
            out.accumulate(m.conj(), c.conj());
        }
        out
    }

    /// All variable words that occur.
    pub fn variables(&self) -> BTreeSet<BinarySeq> {
        self.terms.keys().flat_map(|m| m.exps.keys().copied()).collect()
    }

    /// Length of the longest variable word, 0 for constants.
    pub fn max_level(&self) -> u32 {
        self.variables().iter().map(BinarySeq::len).max().unwrap_or(0)
    }

    /// Rewrites every variable in terms of level-`depth` variables through
    /// `z_s ↦ 2^{−(K−|s|)/2} Σ_{t∈2^{K−|s|}} z_{st}`, one level at a time.
    pub fn refine(&self, depth: u32, cap: usize) -> Result<GaussPoly<S>> {
        if depth > MAX_DEPTH {
            return Err(Error::DepthExceeded { requested: depth, max: MAX_DEPTH });
        }
        if let Some(s) = self.variables().iter().find(|s| s.len() > depth) {
            return Err(Error::Invalid(format!("variable z_{s} is deeper than target level {depth}")));
        }
        let mut cur = self.clone();
        while cur.variables().iter().any(|s| s.len() < depth) {
            let mut next = GaussPoly::zero();
            for (m, c) in &cur.terms {
                let mut expanded = GaussPoly::constant(c.clone());
                for (s, (a, b)) in &m.exps {
                    let factor = if s.len() < depth {
                        split_once::<S>(*s, *a, *b)?
                    } else {
                        GaussPoly::monomial(GaussMonomial::new([(*s, (*a, *b))]), S::one())
                    };
                    expanded = expanded.mul(&factor);
                    check_cap(expanded.len(), cap)?;
                }
                next = next.add(&expanded);
                check_cap(next.len(), cap)?;
            }
            cur = next;
        }
        Ok(cur)
    }

    /// `∫ P dγ_∞`; requires all variables on one level.
    pub fn moment(&self) -> Result<S> {
        check_single_level(self.variables().iter())?;
        let mut acc = S::zero();
        for (m, c) in &self.terms {
            let mm = m.moment()?;
            if !mm.is_zero() {
                acc = acc + c.clone() * S::from_ratio(&BigRational::from_integer(mm));
            }
        }
        Ok(acc)
    }

    /// `∫ P dγ_∞` after refining to the deepest variable level.
    pub fn expectation(&self, cap: usize) -> Result<S> {
        self.refine(self.max_level(), cap)?.moment()
    }

    /// `∫ P·conj(Q) dγ_∞`, refining both to a common level first.
    pub fn inner_b(&self, other: &GaussPoly<S>, cap: usize) -> Result<S> {
        let depth = self.max_level().max(other.max_level());
        let p = self.refine(depth, cap)?;
        let q = other.refine(depth, cap)?;
        // m·conj(m') has nonzero moment only if a_s − b_s agree for every s
        let mut by_charge: BTreeMap<Vec<(BinarySeq, i64)>, Vec<(&GaussMonomial, &S)>> = BTreeMap::new();
        for (m, c) in &q.terms {
            by_charge.entry(charge(m)).or_default().push((m, c));
        }
        let mut acc = S::zero();
        for (m, c) in &p.terms {
            if let Some(bucket) = by_charge.get(&charge(m)) {
                for (n, d) in bucket {
                    let mm = m.mul(&n.conj()).moment()?;
                    acc = acc + c.clone() * d.conj() * S::from_ratio(&BigRational::from_integer(mm));
                }
            }
        }
        Ok(acc)
    }

    /// The Koopman operator of `g ∈ 𝕊ₙ`: `z_s ↦ g(s)·z_s` for `|s| ≥ n`.
    pub fn koopman(&self, g: &TorusStep<S>, cap: usize) -> Result<GaussPoly<S>> {
        let depth = g.level().max(self.max_level());
        let p = self.refine(depth, cap)?;
        let mut out = GaussPoly::zero();
        for (m, c) in &p.terms {
            let phase = m.exps.iter().fold(S::one(), |acc, (s, (a, b))| {
                acc * g.at(s).unit_pow(*a as i64 - *b as i64)
            });
            out.accumulate(m.clone(), phase * c.clone());
        }
        Ok(out)
    }

    pub fn approx_eq(&self, other: &GaussPoly<S>, tol: f64) -> bool {
        let zero = S::zero();
        self.terms
            .keys()
            .chain(other.terms.keys())
            .all(|m| self.terms.get(m).unwrap_or(&zero).approx_eq(other.terms.get(m).unwrap_or(&zero), tol))
    }

    pub fn evaluate(&self, z: &impl Fn(&BinarySeq) -> Complex64) -> Complex64 {
        self.terms.iter().map(|(m, c)| c.to_complex() * m.evaluate(z)).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!(self
            .terms
            .iter()
            .map(|(m, c)| json!({ "monomial": m.to_json(), "coeff": c.to_json() }))
            .collect::<Vec<_>>())
    }
}

fn charge(m: &GaussMonomial) -> Vec<(BinarySeq, i64)> {
    m.exps
        .iter()
        .filter(|(_, (a, b))| a != b)
        .map(|(s, (a, b))| (*s, *a as i64 - *b as i64))
        .collect()
}

fn check_cap(size: usize, cap: usize) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what: "polynomial expansion", size: size as u128, cap: cap as u128 })
    } else {
        Ok(())
    }
}

/// `z_s^a z̄_s^b` written in the children `s0, s1`.
fn split_once<S: Scalar>(s: BinarySeq, a: u32, b: u32) -> Result<GaussPoly<S>> {
    let [s0, s1] = s.children()?;
    let scale = S::sqrt2_pow(-((a + b) as i64));
    let mut out = GaussPoly::zero();
    for i in 0..=a {
        for j in 0..=b {
            let coeff = binomial(a, i) * binomial(b, j);
            let m = GaussMonomial::new([(s0, (i, j)), (s1, (a - i, b - j))]);
            out.accumulate(m, scale.clone() * S::from_ratio(&BigRational::from_integer(coeff)));
        }
    }
    Ok(out)
}

/// `F^β_n`: the basic vector `v_{σ₁}⋯v_{σ_l}` goes to `∏ z_{σ_i}`, with
/// `z_{s̄} = z̄_s`.
pub fn f_beta<S: Scalar>(v: &FockVector<S>) -> GaussPoly<S> {
    let mut out = GaussPoly::zero();
    for (w, c) in v.terms() {
        let m = GaussMonomial::new(
            w.entries().iter().map(|s| (s.word, if s.barred { (0, 1) } else { (1, 0) })),
        );
        out.accumulate(m, c.clone());
    }
    out
}

/// Brute-force Wick expansion: sums over all perfect pairings of the factors
/// of the monomial, each pair contributing `E[z_s z̄_t]`, which is
/// `2^{−||s|−|t||/2}` when one word extends the other and zero otherwise;
/// `z z` and `z̄ z̄` pairs vanish. Handles mixed levels directly.
pub fn wick_moment<S: Scalar>(m: &GaussMonomial) -> Result<S> {
    if m.degree() > 12 {
        return Err(Error::CapExceeded { what: "Wick pairing degree", size: m.degree() as u128, cap: 12 });
    }
    let factors: Vec<(BinarySeq, bool)> = m
        .exps
        .iter()
        .flat_map(|(s, (a, b))| {
            std::iter::repeat((*s, false)).take(*a as usize).chain(std::iter::repeat((*s, true)).take(*b as usize))
        })
        .collect();
    let mut used = vec![false; factors.len()];
    Ok(pairings(&factors, &mut used))
}

fn pairings<S: Scalar>(factors: &[(BinarySeq, bool)], used: &mut [bool]) -> S {
    let Some(first) = used.iter().position(|u| !u) else { return S::one() };
    used[first] = true;
    let mut acc = S::zero();
    for j in first + 1..factors.len() {
        if used[j] {
            continue;
        }
        let (s, sb) = factors[first];
        let (t, tb) = factors[j];
        if sb == tb {
            continue;
        }
        let cov = if s.is_prefix_of(&t) || t.is_prefix_of(&s) {
            S::sqrt2_pow(-((s.len() as i64 - t.len() as i64).abs()))
        } else {
            continue;
        };
        used[j] = true;
        acc = acc + cov * pairings::<S>(factors, used);
        used[j] = false;
    }
    used[first] = false;
    acc
}

/// `r_l = 2^{−l(k+m)/2} Σ_{t∈2^l} z_{st}^k z̄_{st}^m`.
pub fn r_l<S: Scalar>(s: BinarySeq, k: u32, m: u32, l: u32) -> Result<GaussPoly<S>> {
    if k + m == 0 || l == 0 {
        return Err(Error::Invalid("r_l needs k + m ≥ 1 and l ≥ 1".into()));
    }
    if s.len() + l > MAX_DEPTH || l > 16 {
        return Err(Error::DepthExceeded { requested: s.len() + l, max: MAX_DEPTH.min(s.len() + 16) });
    }
    let scale = S::sqrt2_pow(-((l * (k + m)) as i64));
    let mut out = GaussPoly::zero();
    for t in BinarySeq::all(l) {
        out.accumulate(GaussMonomial::new([(s.concat(&t)?, (k, m))]), scale.clone());
    }
    Ok(out)
}

/// How fast `r_l` approaches its mean.
#[derive(Clone, Debug)]
pub struct DensityRate<S> {
    pub k: u32,
    pub m: u32,
    pub l: u32,
    /// `∫ r_l dγ_∞`, computed from the polynomial.
    pub centering: S,
    /// `‖r_l − centering‖²`, computed from the polynomial.
    pub residual_norm_sqr: S,
    /// The closed form `(k+m)!·2^{−l(k+m−1)}` (k ≠ m) or
    /// `2^{−l(2m−1)}((2m)! − (m!)²)` (k = m).
    pub closed_form: BigRational,
    /// For `k = m`: `‖r_l − √(m!)‖²`, when `√(m!)` lies in the scalar tower.
    pub sqrt_factorial_residual: Option<S>,
}

impl<S: Scalar> DensityRate<S> {
    pub fn matches_closed_form(&self, tol: f64) -> bool {
        self.residual_norm_sqr.approx_eq(&S::from_ratio(&self.closed_form), tol)
    }

    /// Whether centering at `√(m!)` gives the same residual as the computed
    /// mean. `None` when not applicable.
    pub fn sqrt_factorial_centering_agrees(&self, tol: f64) -> Option<bool> {
        self.sqrt_factorial_residual.as_ref().map(|r| r.approx_eq(&self.residual_norm_sqr, tol))
    }
}

pub fn density_rate<S: Scalar>(s: BinarySeq, k: u32, m: u32, l: u32, cap: usize) -> Result<DensityRate<S>> {
    let r = r_l::<S>(s, k, m, l)?;
    let centering = r.moment()?;
    let centered = r.sub(&GaussPoly::constant(centering.clone()));
    let residual_norm_sqr = centered.inner_b(&centered, cap)?;
    let two_pow = |e: i64| {
        if e >= 0 {
            BigRational::from_integer(BigInt::from(2).pow(e as u32))
        } else {
            BigRational::new(BigInt::one(), BigInt::from(2).pow((-e) as u32))
        }
    };
    let closed_form = if k != m {
        BigRational::from_integer(factorial(k + m)) * two_pow(-((l * (k + m - 1)) as i64))
    } else {
        let fm = factorial(m);
        BigRational::from_integer(factorial(2 * m) - &fm * &fm) * two_pow(-((l * (2 * m - 1)) as i64))
    };
    let sqrt_factorial_residual = if k == m {
        let (c, kernel) = split_sqrt::<S>(&BigRational::from_integer(factorial(m)))?;
        if kernel == 1 {
            let d = r.sub(&GaussPoly::constant(c));
            Some(d.inner_b(&d, cap)?)
        } else {
            None
        }
    } else {
        None
    };
    Ok(DensityRate { k, m, l, centering, residual_norm_sqr, closed_form, sqrt_factorial_residual })
}

/// The expansion of `z_s^k z̄_s^m` over `t⃗ ∈ (2^l)^{k+m}`, split into the
/// constant-`t⃗` part and the rest.
#[derive(Clone, Debug)]
pub struct QDenseExpansion<S: Scalar> {
    /// `2^{−l(k+m)/2} Σ_{t⃗} ∏ z_{st_i} ∏ z̄_{st_{k+i}}`, summed term by term.
    pub direct_sum: GaussPoly<S>,
    /// `z_s^k z̄_s^m` refined to level `|s| + l`.
    pub refined: GaussPoly<S>,
    pub constant_part: GaussPoly<S>,
    pub non_constant_part: GaussPoly<S>,
    pub tuple_count: u128,
    pub constant_tuple_count: u128,
    /// Every non-constant tuple splits into ≥ 2 distinct variables, each
    /// carrying total exponent below `k + m`.
    pub lower_degree_factors: bool,
}

impl<S: Scalar> QDenseExpansion<S> {
    pub fn identity_holds(&self, tol: f64) -> bool {
        self.direct_sum.approx_eq(&self.refined, tol)
            && self.constant_part.add(&self.non_constant_part).approx_eq(&self.direct_sum, tol)
    }
}

pub fn q_dense_expansion<S: Scalar>(
    s: BinarySeq,
    k: u32,
    m: u32,
    l: u32,
    cap: usize,
) -> Result<QDenseExpansion<S>> {
    let deg = k + m;
    if deg == 0 || l == 0 {
        return Err(Error::Invalid("expansion needs k + m ≥ 1 and l ≥ 1".into()));
    }
    let tuple_count: u128 = 1u128
        .checked_shl(l * deg)
        .filter(|&c| c <= cap as u128)
        .ok_or(Error::CapExceeded { what: "tuple enumeration", size: u128::MAX, cap: cap as u128 })?;
    let scale = S::sqrt2_pow(-((l * deg) as i64));
    let children: Vec<BinarySeq> = BinarySeq::all(l).map(|t| s.concat(&t)).collect::<Result<_>>()?;
    let mut direct_sum = GaussPoly::zero();
    let mut constant_part = GaussPoly::zero();
    let mut non_constant_part = GaussPoly::zero();
    let mut lower_degree_factors = true;
    let base = 1u128 << l;
    for idx in 0..tuple_count {
        let mut rest = idx;
        let mut mono = GaussMonomial::one();
        let mut first = None;
        let mut constant = true;
        for i in 0..deg {
            let t = (rest % base) as usize;
            rest /= base;
            first.get_or_insert(t);
            constant &= first == Some(t);
            if i < k {
                mono.bump(children[t], 1, 0);
            } else {
                mono.bump(children[t], 0, 1);
            }
        }
        if !constant {
            lower_degree_factors &= mono.exps.len() > 1 && mono.exps.values().all(|(a, b)| a + b < deg);
        }
        let target = if constant { &mut constant_part } else { &mut non_constant_part };
        target.accumulate(mono.clone(), scale.clone());
        direct_sum.accumulate(mono, scale.clone());
    }
    let lhs = GaussPoly::monomial(GaussMonomial::new([(s, (k, m))]), S::one());
    let refined = lhs.refine(s.len() + l, cap)?;
    Ok(QDenseExpansion {
        direct_sum,
        refined,
        constant_part,
        non_constant_part,
        tuple_count,
        constant_tuple_count: base,
        lower_degree_factors,
    })
}

/// Whether no variable of one polynomial lies on the same branch of the
/// binary tree as a variable of the other.
pub fn disjoint_subtrees<S: Scalar>(p: &GaussPoly<S>, q: &GaussPoly<S>) -> bool {
    let qv = q.variables();
    p.variables().iter().all(|s| qv.iter().all(|t| !s.is_prefix_of(t) && !t.is_prefix_of(s)))
}

/// `(∫ PQ, ∫ P · ∫ Q)` for polynomials on disjoint subtrees.
pub fn independent_product<S: Scalar>(p: &GaussPoly<S>, q: &GaussPoly<S>, cap: usize) -> Result<(S, S)> {
    if !disjoint_subtrees(p, q) {
        return Err(Error::Invalid("polynomials share a branch of the tree".into()));
    }
    let joint = p.mul(q).expectation(cap)?;
    let separate = p.expectation(cap)? * q.expectation(cap)?;
    Ok((joint, separate))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Exact};

    fn seq(s: &str) -> BinarySeq {
        s.parse().unwrap()
    }

    fn z(s: &str) -> GaussPoly<Exact> {
        GaussPoly::z(seq(s))
    }

    fn zb(s: &str) -> GaussPoly<Exact> {
        GaussPoly::z_bar(seq(s))
    }

    const CAP: usize = DEFAULT_EXPANSION_CAP;

    #[test]
    fn refine_examples() {
        let h = Exact::sqrt2_pow(-1);
        assert_eq!(z("").refine(1, CAP).unwrap(), z("0").add(&z("1")).scale(&h));

        let expected = z("00")
            .pow(2)
            .add(&z("00").mul(&z("01")).scale(&Exact::from_int(2)))
            .add(&z("01").pow(2))
            .scale(&Exact::rational(rat(1, 2)));
        assert_eq!(z("0").pow(2).refine(2, CAP).unwrap(), expected);
        assert!(z("000").refine(2, CAP).is_err());
    }

    #[test]
    fn moment_examples() {
        assert_eq!(z("01").pow(2).mul(&zb("01").pow(2)).moment().unwrap(), Exact::from_int(2));
        assert_eq!(z("0").mul(&zb("1")).moment().unwrap(), Exact::zero());
        assert_eq!(GaussPoly::constant(Exact::one()).moment().unwrap(), Exact::one());
        assert_eq!(z("0").mul(&zb("00")).moment(), Err(Error::MixedLevels));
    }

    #[test]
    fn inner_b_examples() {
        let p = z("0").pow(2).mul(&zb("1"));
        assert_eq!(p.inner_b(&p, CAP).unwrap(), Exact::from_int(2));
        assert_eq!(z("0").inner_b(&z("1"), CAP).unwrap(), Exact::zero());
        let r = z("0").refine(2, CAP).unwrap();
        assert_eq!(r.inner_b(&z("00"), CAP).unwrap(), Exact::sqrt2_pow(-1));
    }

    #[test]
    fn refine_preserves_moments() {
        let polys = [
            z("").mul(&zb("")),
            z("").pow(2).mul(&zb("").pow(2)),
            z("0").mul(&zb("1")).add(&z("1").mul(&zb("1")).scale(&Exact::from_int(3))),
            z("").pow(2).mul(&zb("0")).mul(&zb("1")),
        ];
        for p in &polys {
            let base = p.expectation(CAP).unwrap();
            for k in p.max_level()..=3 {
                assert_eq!(p.refine(k, CAP).unwrap().moment().unwrap(), base, "{p:?} at {k}");
            }
        }
    }

    #[test]
    fn closed_form_matches_pairing_oracle_on_mixed_levels() {
        // E[|z_∅|² · z_0 z̄_0] with z_∅ = (z_0 + z_1)/√2
        let m = GaussMonomial::new([(seq(""), (1, 1)), (seq("0"), (1, 1))]);
        let p = GaussPoly::<Exact>::monomial(m.clone(), Exact::one());
        assert_eq!(p.expectation(CAP).unwrap(), wick_moment::<Exact>(&m).unwrap());
        assert_eq!(wick_moment::<Exact>(&m).unwrap(), Exact::rational(rat(3, 2)));
    }

    #[test]
    fn koopman_examples() {
        let g = TorusStep::<Exact>::from_roots(1, &[1, 2], 8).unwrap();
        let p = z("0").pow(2).mul(&zb("1"));
        let expected = p.scale(&(g.values()[0].pow(2) * g.values()[1].conj()));
        assert_eq!(p.koopman(&g, CAP).unwrap(), expected);
        assert_eq!(p.koopman(&TorusStep::identity(1), CAP).unwrap(), p);
        // a coarse variable is refined before the phase applies
        let coarse = z("").koopman(&g, CAP).unwrap();
        let h = Exact::sqrt2_pow(-1);
        let expected = z("0").scale(&(g.values()[0].clone() * h.clone())).add(&z("1").scale(&(g.values()[1].clone() * h)));
        assert_eq!(coarse, expected);
    }

    #[test]
    fn r_l_rate_examples() {
        let r = density_rate::<Exact>(seq("0"), 2, 0, 1, CAP).unwrap();
        assert_eq!(r.centering, Exact::zero());
        assert_eq!(r.residual_norm_sqr, Exact::one());

        for l in 1..=3 {
            let r = density_rate::<Exact>(seq(""), 1, 1, l, CAP).unwrap();
            assert_eq!(r.centering, Exact::one());
            assert_eq!(r.residual_norm_sqr, Exact::rational(rat(1, 1 << l)));
            assert_eq!(r.sqrt_factorial_centering_agrees(0.0), Some(true));
        }

        for l in 1..=3 {
            let r = density_rate::<Exact>(seq(""), 2, 2, l, CAP).unwrap();
            // 2^{-2l} · 2^l · 2! = 2^{1-l}
            assert_eq!(r.centering, Exact::rational(rat(2, 1 << l)));
            assert!(r.matches_closed_form(0.0));
            assert_eq!(r.sqrt_factorial_centering_agrees(0.0), Some(false));
        }
    }

    #[test]
    fn q_dense_small_case() {
        let e = q_dense_expansion::<Exact>(seq("1"), 1, 1, 1, CAP).unwrap();
        assert_eq!(e.tuple_count, 4);
        assert_eq!(e.direct_sum.len(), 4);
        assert!(e.identity_holds(0.0));
        assert_eq!(e.constant_part, r_l::<Exact>(seq("1"), 1, 1, 1).unwrap());
        assert!(e.lower_degree_factors);
    }

    #[test]
    fn independence_on_disjoint_subtrees() {
        let p = z("0").mul(&zb("0")).add(&z("00").pow(2).mul(&zb("01").pow(2)));
        let q = z("1").pow(2).mul(&zb("1").pow(2)).add(&zb("10"));
        let (joint, sep) = independent_product(&p, &q, CAP).unwrap();
        assert_eq!(joint, sep);
        assert!(independent_product(&p, &z(""), CAP).is_err());
    }

    #[test]
    fn expansion_cap_is_enforced() {
        let p = z("").pow(3).mul(&zb("").pow(3));
        assert!(matches!(p.refine(6, 50), Err(Error::CapExceeded { .. })));
    }
}
