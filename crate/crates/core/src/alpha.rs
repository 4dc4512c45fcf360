//! Symmetrized step functions on `(2^ℕ)^p × (2^ℕ)^q` at finite grid depth,
//! the multiplication representations `ρ_{p,q}`, and the map `F^α_n`.
//!
//! A function is stored as `√radical · Σ values[c]·χ_c` over depth-`n`
//! cylinder cells `c`, where `radical` is an odd squarefree integer shared by
//! the whole component. With √2 already in the scalar tower, every image of
//! `F^α_n` fits this shape exactly.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use serde_json::json;

use crate::combinatorics::{AdmissibleWord, BinarySeq, Symbol, TorusStep, MAX_DEPTH};
use crate::error::{Error, Result};
use crate::fock::FockVector;
use crate::scalar::{factorial, split_sqrt, Scalar};

/// The cylinder `[c₁] × ⋯ × [c_{p+q}]`; all coordinates share one length.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridCell {
    pub coords: Vec<BinarySeq>,
}

impl GridCell {
    pub fn new(coords: Vec<BinarySeq>) -> Result<Self> {
        if let Some(first) = coords.first() {
            if let Some(bad) = coords.iter().find(|c| c.len() != first.len()) {
                return Err(Error::LevelMismatch { left: first.len(), right: bad.len() });
            }
        }
        Ok(GridCell { coords })
    }

    pub fn depth(&self) -> u32 {
        self.coords.first().map(|c| c.len()).unwrap_or(0)
    }

    /// `λ^{p+q}` of the cell: `2^{−depth·(p+q)}`.
    pub fn measure(&self) -> BigRational {
        BigRational::new(BigInt::one(), BigInt::from(2).pow(self.depth() * self.coords.len() as u32))
    }

    /// The `2^{p+q}` cells one level finer.
    pub fn children(&self) -> Result<Vec<GridCell>> {
        let mut out = vec![Vec::with_capacity(self.coords.len())];
        for c in &self.coords {
            let kids = c.children()?;
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    kids.iter().map(move |k| {
                        let mut v = prefix.clone();
                        v.push(*k);
                        v
                    })
                })
                .collect();
        }
        Ok(out.into_iter().map(|coords| GridCell { coords }).collect())
    }

    /// The cell coarsened to depth `n`.
    pub fn truncate(&self, n: u32) -> GridCell {
        GridCell { coords: self.coords.iter().map(|c| c.prefix(n)).collect() }
    }

    /// Sorts the first `p` and the remaining coordinates separately.
    pub fn canonical(&self, p: usize) -> GridCell {
        let mut coords = self.coords.clone();
        coords[..p].sort();
        coords[p..].sort();
        GridCell { coords }
    }
}

impl fmt::Debug for GridCell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// The set `supp⟨σ⟩`: one cell per variant of the word.
pub fn support(w: &AdmissibleWord) -> BTreeSet<GridCell> {
    w.variants()
        .into_iter()
        .map(|v| GridCell { coords: v.unbarred.into_iter().chain(v.barred).collect() })
        .collect()
}

/// `λ^l(supp⟨σ⟩)` as cell count times cell measure.
pub fn support_measure(w: &AdmissibleWord) -> BigRational {
    let cells = support(w);
    let n = cells.len() as i64;
    cells.iter().next().map(|c| c.measure() * BigRational::from_integer(n.into())).unwrap_or_default()
}

/// Whether a cell of depth at least the word's level lies in `supp⟨σ⟩`.
pub fn support_contains(w: &AdmissibleWord, p: usize, cell: &GridCell) -> bool {
    let st = w.stats();
    if cell.coords.len() != w.degree() as usize || p != st.p as usize || cell.depth() < w.level() {
        return false;
    }
    let coarse = cell.truncate(w.level()).canonical(p);
    let syms: Vec<Symbol> = coarse.coords[..p]
        .iter()
        .map(|c| Symbol::plain(*c))
        .chain(coarse.coords[p..].iter().map(|c| Symbol::bar(*c)))
        .collect();
    let mut expected = w.entries().to_vec();
    let mut got = syms;
    expected.sort();
    got.sort();
    expected == got
}

/// An element of the symmetrized `L²(λ^{p+q})` at a fixed grid depth.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaElement<S> {
    pub p: u32,
    pub q: u32,
    pub depth: u32,
    /// Odd squarefree integer; the element is `√radical · Σ values·χ`.
    pub radical: u64,
    pub values: BTreeMap<GridCell, S>,
}

impl<S: Scalar> AlphaElement<S> {
    pub fn zero(p: u32, q: u32, depth: u32) -> Self {
        AlphaElement { p, q, depth, radical: 1, values: BTreeMap::new() }
    }

    /// `Σ values·χ` with rational scaling; the radical is 1.
    pub fn from_values(p: u32, q: u32, depth: u32, values: BTreeMap<GridCell, S>) -> Result<Self> {
        if p + q == 0 {
            return Err(Error::Invalid("p + q must be positive".into()));
        }
        for c in values.keys() {
            if c.coords.len() != (p + q) as usize || c.depth() != depth {
                return Err(Error::Invalid(format!("cell {c:?} does not fit ({p},{q}) at depth {depth}")));
            }
        }
        let values = values.into_iter().filter(|(_, v)| !v.is_zero()).collect();
        Ok(AlphaElement { p, q, depth, radical: 1, values })
    }

    pub fn is_zero(&self) -> bool {
        self.values.is_empty()
    }

    /// Every cell's value is unchanged by permuting the first `p` and the
    /// last `q` coordinates.
    pub fn is_symmetric(&self) -> bool {
        let p = self.p as usize;
        let mut classes: BTreeMap<GridCell, (usize, &S)> = BTreeMap::new();
        for (c, v) in &self.values {
            let key = c.canonical(p);
            match classes.get_mut(&key) {
                Some((count, first)) => {
                    if *first != v {
                        return false;
                    }
                    *count += 1;
                }
                None => {
                    classes.insert(key, (1, v));
                }
            }
        }
        // every orbit must be fully populated
        classes.iter().all(|(key, (count, _))| *count == orbit_size(key, p))
    }

    /// Copies each cell value to its `2^{p+q}` children.
    pub fn refine(&self) -> Result<AlphaElement<S>> {
        if self.depth + 1 > MAX_DEPTH {
            return Err(Error::DepthExceeded { requested: self.depth + 1, max: MAX_DEPTH });
        }
        let mut values = BTreeMap::new();
        for (c, v) in &self.values {
            for child in c.children()? {
                values.insert(child, v.clone());
            }
        }
        Ok(AlphaElement { depth: self.depth + 1, values, ..self.clone() })
    }

    pub fn refine_to(&self, depth: u32) -> Result<AlphaElement<S>> {
        if depth < self.depth {
            return Err(Error::Invalid(format!("cannot coarsen depth {} to {depth}", self.depth)));
        }
        let mut out = self.clone();
        while out.depth < depth {
            out = out.refine()?;
        }
        Ok(out)
    }

    fn aligned(&self, other: &AlphaElement<S>) -> Result<(AlphaElement<S>, AlphaElement<S>)> {
        if (self.p, self.q) != (other.p, other.q) {
            return Err(Error::Invalid(format!(
                "degree mismatch ({},{}) vs ({},{})",
                self.p, self.q, other.p, other.q
            )));
        }
        let d = self.depth.max(other.depth);
        Ok((self.refine_to(d)?, other.refine_to(d)?))
    }

    fn common_radical(&self, other: &AlphaElement<S>) -> Result<u64> {
        if self.is_zero() {
            Ok(other.radical)
        } else if other.is_zero() || self.radical == other.radical {
            Ok(self.radical)
        } else {
            Err(Error::Radical(format!(
                "√{}·√{} is irrational",
                self.radical, other.radical
            )))
        }
    }

    pub fn add(&self, other: &AlphaElement<S>) -> Result<AlphaElement<S>> {
        let (a, b) = self.aligned(other)?;
        let radical = a.common_radical(&b)?;
        let mut values = a.values;
        for (c, v) in b.values {
            let sum = values.remove(&c).map(|old| old + v.clone()).unwrap_or(v);
            if !sum.is_zero() {
                values.insert(c, sum);
            }
        }
        Ok(AlphaElement { p: a.p, q: a.q, depth: a.depth, radical, values })
    }

    pub fn scale(&self, k: &S) -> AlphaElement<S> {
        let values = self
            .values
            .iter()
            .map(|(c, v)| (c.clone(), v.clone() * k.clone()))
            .filter(|(_, v)| !v.is_zero())
            .collect();
        AlphaElement { values, ..self.clone() }
    }

    /// `∫ f·conj(h) dλ^{p+q}`. Elements with distinct degrees are orthogonal.
    pub fn inner(&self, other: &AlphaElement<S>) -> Result<S> {
        if (self.p, self.q) != (other.p, other.q) || self.is_zero() || other.is_zero() {
            return Ok(S::zero());
        }
        let (a, b) = self.aligned(other)?;
        let radical = a.common_radical(&b)?;
        let mut acc = S::zero();
        for (c, v) in &a.values {
            if let Some(w) = b.values.get(c) {
                acc = acc + v.clone() * w.conj();
            }
        }
        let cell = a.values.keys().next().map(GridCell::measure).unwrap_or_default();
        Ok(acc * S::from_ratio(&(cell * BigRational::from_integer(radical.into()))))
    }

    /// `ρ_{p,q}(g)`: multiplies each cell by `g(a₁)⋯g(a_p)·g(b₁)⁻¹⋯g(b_q)⁻¹`.
    pub fn apply_rho(&self, g: &TorusStep<S>) -> Result<AlphaElement<S>> {
        if self.depth < g.level() {
            return Err(Error::LevelMismatch { left: g.level(), right: self.depth });
        }
        let p = self.p as usize;
        let values = self
            .values
            .iter()
            .map(|(c, v)| (c.clone(), cell_phase(g, c, p) * v.clone()))
            .collect();
        Ok(AlphaElement { values, ..self.clone() })
    }

    pub fn approx_eq(&self, other: &AlphaElement<S>, tol: f64) -> bool {
        let Ok((a, b)) = self.aligned(other) else { return false };
        if a.is_zero() && b.is_zero() {
            return true;
        }
        if a.radical != b.radical && !a.is_zero() && !b.is_zero() {
            return false;
        }
        let zero = S::zero();
        a.values
            .keys()
            .chain(b.values.keys())
            .all(|c| a.values.get(c).unwrap_or(&zero).approx_eq(b.values.get(c).unwrap_or(&zero), tol))
    }

    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<_> = self
            .values
            .iter()
            .map(|(c, v)| {
                json!({
                    "coords": c.coords.iter().map(|s| s.to_string()).collect::<Vec<_>>(),
                    "value": v.to_json(),
                })
            })
            .collect();
        json!({
            "p": self.p,
            "q": self.q,
            "depth": self.depth,
            "radical": self.radical,
            "cells": cells,
        })
    }
}

fn orbit_size(canonical: &GridCell, p: usize) -> usize {
    let count = |block: &[BinarySeq]| -> usize {
        let mut mult: BTreeMap<&BinarySeq, u32> = BTreeMap::new();
        for b in block {
            *mult.entry(b).or_default() += 1;
        }
        let denom: BigInt = mult.values().map(|&m| factorial(m)).product();
        let n = factorial(block.len() as u32) / denom;
        n.try_into().unwrap_or(usize::MAX)
    };
    count(&canonical.coords[..p]) * count(&canonical.coords[p..])
}

/// `g(a₁)⋯g(a_p)·g(b₁)⁻¹⋯g(b_q)⁻¹` on a cell of depth at least the level of `g`.
pub fn cell_phase<S: Scalar>(g: &TorusStep<S>, cell: &GridCell, p: usize) -> S {
    cell.coords.iter().enumerate().fold(S::one(), |acc, (i, c)| {
        let v = g.at(c);
        if i < p {
            acc * v.clone()
        } else {
            acc * v.conj()
        }
    })
}

/// An element of the ℓ²-sum `A` over degree pairs `(p, q)`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaSum<S> {
    pub components: BTreeMap<(u32, u32), AlphaElement<S>>,
}

impl<S: Scalar> Default for AlphaSum<S> {
    fn default() -> Self {
        AlphaSum { components: BTreeMap::new() }
    }
}

impl<S: Scalar> AlphaSum<S> {
    pub fn single(e: AlphaElement<S>) -> Self {
        let mut s = AlphaSum::default();
        if !e.is_zero() {
            s.components.insert((e.p, e.q), e);
        }
        s
    }

    pub fn add(&self, other: &AlphaSum<S>) -> Result<AlphaSum<S>> {
        let mut out = self.clone();
        for (k, e) in &other.components {
            let merged = match out.components.remove(k) {
                Some(old) => old.add(e)?,
                None => e.clone(),
            };
            if !merged.is_zero() {
                out.components.insert(*k, merged);
            }
        }
        Ok(out)
    }

    pub fn scale(&self, k: &S) -> AlphaSum<S> {
        AlphaSum {
            components: self
                .components
                .iter()
                .map(|(key, e)| (*key, e.scale(k)))
                .filter(|(_, e)| !e.is_zero())
                .collect(),
        }
    }

    pub fn inner(&self, other: &AlphaSum<S>) -> Result<S> {
        let mut acc = S::zero();
        for (k, e) in &self.components {
            if let Some(f) = other.components.get(k) {
                acc = acc + e.inner(f)?;
            }
        }
        Ok(acc)
    }

    pub fn norm_sqr(&self) -> Result<S> {
        self.inner(self)
    }

    pub fn refine(&self) -> Result<AlphaSum<S>> {
        let components =
            self.components.iter().map(|(k, e)| Ok((*k, e.refine()?))).collect::<Result<_>>()?;
        Ok(AlphaSum { components })
    }

    pub fn apply_rho(&self, g: &TorusStep<S>) -> Result<AlphaSum<S>> {
        let components =
            self.components.iter().map(|(k, e)| Ok((*k, e.apply_rho(g)?))).collect::<Result<_>>()?;
        Ok(AlphaSum { components })
    }

    pub fn is_symmetric(&self) -> bool {
        self.components.values().all(AlphaElement::is_symmetric)
    }

    pub fn approx_eq(&self, other: &AlphaSum<S>, tol: f64) -> bool {
        let keys: BTreeSet<_> = self.components.keys().chain(other.components.keys()).collect();
        keys.into_iter().all(|k| match (self.components.get(k), other.components.get(k)) {
            (Some(a), Some(b)) => a.approx_eq(b, tol),
            (Some(a), None) | (None, Some(a)) => a.is_zero(),
            (None, None) => true,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "components": self.components.values().map(AlphaElement::to_json).collect::<Vec<_>>() })
    }
}

/// `F^α_n` on a basic vector: `√(2^{nl}/(p!q!)) · ∏ m_s! · χ_{supp⟨σ⟩}`.
pub fn f_alpha_word<S: Scalar>(w: &AdmissibleWord) -> Result<AlphaElement<S>> {
    let st = w.stats();
    let n = w.level();
    let l = w.degree();
    let radicand = BigRational::new(BigInt::from(2).pow(n * l), factorial(st.p) * factorial(st.q));
    let (coeff, radical) = split_sqrt::<S>(&radicand)?;
    let value = coeff * S::from_ratio(&BigRational::from_integer(st.factorial_product()));
    let values = support(w).into_iter().map(|c| (c, value.clone())).collect();
    Ok(AlphaElement { p: st.p, q: st.q, depth: n, radical, values })
}

/// `F^α_n`, extended linearly.
pub fn f_alpha<S: Scalar>(v: &FockVector<S>) -> Result<AlphaSum<S>> {
    let mut out = AlphaSum::default();
    for (w, c) in v.terms() {
        out = out.add(&AlphaSum::single(f_alpha_word::<S>(w)?.scale(c)))?;
    }
    Ok(out)
}

/// For two distinct points of the set `K` (sorted blocks, no coordinate of
/// the first block equal to one of the second), given as depth-`N` cells,
/// finds the coarsest word whose support contains the first point but not
/// the second.
pub fn separating_word(a: &GridCell, b: &GridCell, p: usize) -> Option<AdmissibleWord> {
    if a.coords.len() != b.coords.len() || a.depth() != b.depth() {
        return None;
    }
    for n in 1..=a.depth() {
        let coarse = a.truncate(n);
        let syms: Vec<Symbol> = coarse.coords[..p]
            .iter()
            .map(|c| Symbol::plain(*c))
            .chain(coarse.coords[p..].iter().map(|c| Symbol::bar(*c)))
            .collect();
        let Ok(w) = AdmissibleWord::new(n, syms) else { continue };
        if support_contains(&w, p, a) && !support_contains(&w, p, b) {
            return Some(w);
        }
    }
    None
}

/// Whether a depth-`N` cell represents a point of `K`: both blocks sorted
/// and no coordinate shared between the blocks.
pub fn in_separation_domain(cell: &GridCell, p: usize) -> bool {
    let (a, b) = cell.coords.split_at(p);
    a.windows(2).all(|w| w[0] <= w[1]) && b.windows(2).all(|w| w[0] <= w[1]) && a.iter().all(|x| !b.contains(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Exact};

    fn w(s: &str) -> AdmissibleWord {
        s.parse().unwrap()
    }

    fn cell(s: &[&str]) -> GridCell {
        GridCell::new(s.iter().map(|x| x.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn support_examples() {
        let s = support(&w("0 0 ~1"));
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![cell(&["0", "0", "1"])]);
        assert_eq!(support_measure(&w("0 0 ~1")), rat(1, 8));

        let s = support(&w("0 1"));
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![cell(&["0", "1"]), cell(&["1", "0"])]);
        assert_eq!(support_measure(&w("0 1")), rat(1, 2));
    }

    #[test]
    fn f_alpha_examples() {
        let f = f_alpha_word::<Exact>(&w("0 0 ~1")).unwrap();
        assert_eq!(AlphaSum::single(f.clone()).norm_sqr().unwrap(), Exact::from_int(2));
        assert!(f.is_symmetric());

        let f = f_alpha_word::<Exact>(&w("01")).unwrap();
        // √4·χ_[01]
        assert_eq!(f.radical, 1);
        assert_eq!(f.values.values().next().unwrap(), &Exact::from_int(2));
        assert_eq!(AlphaSum::single(f).norm_sqr().unwrap(), Exact::one());

        // p = 3: 2^{3}/3! = 4/3 so the radical is 3
        let f = f_alpha_word::<Exact>(&w("0 0 1")).unwrap();
        assert_eq!(f.radical, 3);
        assert_eq!(AlphaSum::single(f).norm_sqr().unwrap(), Exact::from_int(2));
    }

    #[test]
    fn refine_examples() {
        let mut values = BTreeMap::new();
        values.insert(cell(&["0"]), Exact::one());
        let f = AlphaElement::from_values(1, 0, 1, values).unwrap();
        let r = f.refine().unwrap();
        let keys: Vec<_> = r.values.keys().cloned().collect();
        assert_eq!(keys, vec![cell(&["00"]), cell(&["01"])]);
        assert_eq!(r.inner(&r).unwrap(), f.inner(&f).unwrap());
    }

    #[test]
    fn rho_phase_is_constant_on_support() {
        let g = TorusStep::<Exact>::from_roots(1, &[1, 2], 8).unwrap();
        let f = f_alpha_word::<Exact>(&w("0 ~1")).unwrap();
        let c = g.values()[0].clone() * g.values()[1].conj();
        assert_eq!(f.apply_rho(&g).unwrap(), f.scale(&c));
        assert_eq!(f.apply_rho(&TorusStep::identity(1)).unwrap(), f);
        assert!(f.apply_rho(&TorusStep::identity(2)).is_err());
    }

    #[test]
    fn asymmetric_function_detected() {
        let mut values = BTreeMap::new();
        values.insert(cell(&["0", "1"]), Exact::one());
        let f = AlphaElement::from_values(2, 0, 1, values).unwrap();
        assert!(!f.is_symmetric());
        let g = f.add(&AlphaElement::from_values(2, 0, 1, [(cell(&["1", "0"]), Exact::one())].into()).unwrap());
        assert!(g.unwrap().is_symmetric());
    }

    #[test]
    fn mismatched_radicals_are_rejected() {
        let a = f_alpha_word::<Exact>(&w("0 0 1")).unwrap(); // radical 3
        let b = f_alpha_word::<Exact>(&w("0 1 1")).unwrap(); // radical 3 as well
        assert!(a.add(&b).is_ok());
        let c = AlphaElement::<Exact> { radical: 5, ..b };
        assert!(matches!(a.add(&c), Err(Error::Radical(_))));
    }

    #[test]
    fn separation_examples() {
        let a = cell(&["00", "11"]);
        let b = cell(&["01", "11"]);
        let sep = separating_word(&a, &b, 1).unwrap();
        assert_eq!(sep, w("00 ~11"));
        assert!(separating_word(&a, &a, 1).is_none());
    }
}
