//! Index functions `x ∈ ℕ[ℤ^×]`, cylinder measures on `C_x` at finite depth,
//! the multiplication representations `ρ_{μ_x}`, and the semigroup
//! operations `⊕`, `m·x`, `μ⊗ν`, `mμ`.
//!
//! `C_x = (2^ℕ)^{D(x)}` is realized at depth `n` as the grid `(2ⁿ)^{D(x)}`;
//! a measure is a nonnegative rational weight per grid cell. Cells store one
//! coordinate per slot of `D(x)`, slots in increasing `(k, i)` order.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::RangeInclusive;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::json;

use crate::combinatorics::{BinarySeq, TorusStep};
use crate::error::{Error, Result};
use crate::scalar::{factorial, Scalar};

/// Default bound on grid sizes, permutation and pairing enumerations.
pub const DEFAULT_CAP: u128 = 1 << 20;

/// A finitely supported `ℤ^× → ℕ` with nonempty domain.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IndexFunction {
    values: BTreeMap<i64, u32>,
}

impl IndexFunction {
    pub fn new<I: IntoIterator<Item = (i64, u32)>>(pairs: I) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (k, v) in pairs {
            if k == 0 {
                return Err(Error::Invalid("0 is not in the domain of an index function".into()));
            }
            if v == 0 {
                return Err(Error::Invalid(format!("value at {k} must be positive")));
            }
            if values.insert(k, v).is_some() {
                return Err(Error::Invalid(format!("duplicate key {k}")));
            }
        }
        if values.is_empty() {
            return Err(Error::Invalid("index function needs a nonempty domain".into()));
        }
        Ok(IndexFunction { values })
    }

    /// `x_{p,q}`: `1 ↦ p`, `−1 ↦ q`.
    pub fn x_pq(p: u32, q: u32) -> Result<Self> {
        IndexFunction::new([(1, p), (-1, q)].into_iter().filter(|&(_, v)| v > 0))
    }

    pub fn get(&self, k: i64) -> u32 {
        self.values.get(&k).copied().unwrap_or(0)
    }

    pub fn domain(&self) -> impl Iterator<Item = i64> + '_ {
        self.values.keys().copied()
    }

    pub fn values(&self) -> &BTreeMap<i64, u32> {
        &self.values
    }

    /// `dom(x) ⊆ {−1, 1}`, i.e. `x = x_{p,q}` for some `p, q`.
    pub fn is_unit_supported(&self) -> bool {
        self.values.keys().all(|k| k.abs() == 1)
    }

    /// `D(x)` in canonical order.
    pub fn slots(&self) -> Vec<Slot> {
        self.values.iter().flat_map(|(&k, &n)| (0..n).map(move |i| Slot { level: k, index: i })).collect()
    }

    pub fn slot_count(&self) -> usize {
        self.values.values().sum::<u32>() as usize
    }

    /// Coordinatewise addition.
    pub fn oplus(&self, other: &IndexFunction) -> IndexFunction {
        let mut values = self.values.clone();
        for (k, v) in &other.values {
            *values.entry(*k).or_insert(0) += v;
        }
        IndexFunction { values }
    }

    /// `(m·x)(mk) = x(k)`.
    pub fn scale(&self, m: i64) -> Result<IndexFunction> {
        if m == 0 {
            return Err(Error::ZeroMultiplier);
        }
        let values = self
            .values
            .iter()
            .map(|(k, v)| k.checked_mul(m).map(|mk| (mk, *v)).ok_or(Error::Invalid("level overflow".into())))
            .collect::<Result<_>>()?;
        Ok(IndexFunction { values })
    }

    /// Number of good permutations, `∏_k x(k)!`.
    pub fn good_permutation_count(&self) -> BigInt {
        self.values.values().map(|&v| factorial(v)).product()
    }
}

impl fmt::Display for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.values.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}↦{v}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for IndexFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// An element `(k, i)` of `D(x)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub level: i64,
    pub index: u32,
}

/// Every permutation of `D(x)` preserving levels, as `perm[slot] = image`
/// over slot positions in canonical order.
pub fn good_permutations(x: &IndexFunction, cap: u128) -> Result<Vec<Vec<usize>>> {
    let count = x.good_permutation_count();
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            what: "good permutations",
            size: u128::try_from(count).unwrap_or(u128::MAX),
            cap,
        });
    }
    let mut out = vec![Vec::new()];
    let mut offset = 0usize;
    for &n in x.values.values() {
        let block: Vec<usize> = (offset..offset + n as usize).collect();
        let perms = permutations(&block);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                perms.iter().map(move |p| {
                    let mut v = prefix.clone();
                    v.extend_from_slice(p);
                    v
                })
            })
            .collect();
        offset += n as usize;
    }
    Ok(out)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let head = rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            out.push(tail);
        }
    }
    out
}

fn grid_cells(slots: usize, depth: u32, cap: u128) -> Result<Vec<Vec<BinarySeq>>> {
    let size = 1u128.checked_shl(depth * slots as u32).unwrap_or(u128::MAX);
    if size > cap {
        return Err(Error::CapExceeded { what: "cylinder grid", size, cap });
    }
    let mut out = vec![Vec::with_capacity(slots)];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                BinarySeq::all(depth).map(move |s| {
                    let mut v = prefix.clone();
                    v.push(s);
                    v
                })
            })
            .collect();
    }
    Ok(out)
}

/// A finite measure on `C_x` seen through depth-`n` cylinders.
#[derive(Clone, Debug, PartialEq)]
pub struct DepthMeasure {
    pub index: IndexFunction,
    pub depth: u32,
    /// Zero weights are never stored.
    pub weights: BTreeMap<Vec<BinarySeq>, BigRational>,
}

impl DepthMeasure {
    pub fn new(index: IndexFunction, depth: u32, weights: BTreeMap<Vec<BinarySeq>, BigRational>) -> Result<Self> {
        let slots = index.slot_count();
        for (cell, w) in &weights {
            if cell.len() != slots || cell.iter().any(|c| c.len() != depth) {
                return Err(Error::Invalid(format!("cell {cell:?} does not fit {index} at depth {depth}")));
            }
            if w < &BigRational::zero() {
                return Err(Error::Invalid("negative weight".into()));
            }
        }
        let weights = weights.into_iter().filter(|(_, w)| !w.is_zero()).collect();
        Ok(DepthMeasure { index, depth, weights })
    }

    /// `λ^{D(x)}`: mass `2^{−n|D(x)|}` on every cell.
    pub fn uniform(index: &IndexFunction, depth: u32, cap: u128) -> Result<Self> {
        let slots = index.slot_count();
        let w = BigRational::new(BigInt::one(), BigInt::from(2).pow(depth * slots as u32));
        let weights = grid_cells(slots, depth, cap)?.into_iter().map(|c| (c, w.clone())).collect();
        Ok(DepthMeasure { index: index.clone(), depth, weights })
    }

    pub fn zero(index: &IndexFunction, depth: u32) -> Self {
        DepthMeasure { index: index.clone(), depth, weights: BTreeMap::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn mass(&self) -> BigRational {
        self.weights.values().sum()
    }

    pub fn weight(&self, cell: &[BinarySeq]) -> BigRational {
        self.weights.get(cell).cloned().unwrap_or_default()
    }

    pub fn scale_weights(&self, k: &BigRational) -> DepthMeasure {
        let weights = self.weights.iter().map(|(c, w)| (c.clone(), w * k)).filter(|(_, w)| !w.is_zero()).collect();
        DepthMeasure { weights, ..self.clone() }
    }

    /// Pushforward to depth `n ≤ depth` along cylinder truncation.
    pub fn coarsen(&self, n: u32) -> Result<DepthMeasure> {
        if n > self.depth {
            return Err(Error::Invalid(format!("cannot coarsen depth {} to {n}", self.depth)));
        }
        let mut weights: BTreeMap<Vec<BinarySeq>, BigRational> = BTreeMap::new();
        for (cell, w) in &self.weights {
            let coarse: Vec<BinarySeq> = cell.iter().map(|c| c.prefix(n)).collect();
            *weights.entry(coarse).or_default() += w;
        }
        Ok(DepthMeasure { index: self.index.clone(), depth: n, weights })
    }

    /// Pushforward under the good homeomorphism induced by `perm`:
    /// coordinate `perm[j]` of the image is coordinate `j` of the source.
    pub fn permuted(&self, perm: &[usize]) -> DepthMeasure {
        let weights = self
            .weights
            .iter()
            .map(|(cell, w)| {
                let mut out = cell.clone();
                for (j, &target) in perm.iter().enumerate() {
                    out[target] = cell[j];
                }
                (out, w.clone())
            })
            .collect();
        DepthMeasure { weights, ..self.clone() }
    }

    /// Whether every cell weight is below the other measure's weight support,
    /// i.e. `self` is supported inside `other` at this depth.
    pub fn support_within(&self, other: &DepthMeasure) -> bool {
        self.index == other.index
            && self.depth == other.depth
            && self.weights.keys().all(|c| other.weights.contains_key(c))
    }

    /// Mass of `{π_a = π_b}` at this depth for slot positions `a ≠ b`.
    pub fn diagonal_mass(&self, a: usize, b: usize) -> BigRational {
        self.weights.iter().filter(|(c, _)| c[a] == c[b]).map(|(_, w)| w.clone()).sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "index": self.index.values.iter().map(|(k, v)| json!([k, v])).collect::<Vec<_>>(),
            "depth": self.depth,
            "mass": self.mass().to_string(),
            "cells": self.weights.len(),
        })
    }
}

/// How the diagonal masses behave as depth grows.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagonalTrend {
    /// All zero, or nonincreasing with the last strictly below the first.
    Vanishing,
    /// Increasing somewhere, or constant and positive.
    Persistent,
    /// A single positive depth gives no trend.
    Undetermined,
}

#[derive(Clone, Debug)]
pub struct CompatibilityReport {
    pub depths: Vec<u32>,
    /// Good-homeomorphism invariance, checked exactly per depth.
    pub invariance_by_depth: Vec<bool>,
    pub invariance: bool,
    /// Total over unordered slot pairs of the diagonal mass, per depth.
    pub diagonal_masses: Vec<BigRational>,
    pub diagonal_trend: DiagonalTrend,
    /// Marginal absolute continuity cannot fail on a finite grid; reported,
    /// never asserted.
    pub marginals: &'static str,
}

impl CompatibilityReport {
    pub fn compatible(&self) -> bool {
        self.invariance && self.diagonal_trend == DiagonalTrend::Vanishing
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "depths": self.depths,
            "invariance_by_depth": self.invariance_by_depth,
            "invariance": self.invariance,
            "diagonal_masses": self.diagonal_masses.iter().map(|m| m.to_string()).collect::<Vec<_>>(),
            "diagonal_trend": format!("{:?}", self.diagonal_trend),
            "marginals": self.marginals,
        })
    }
}

/// Checks invariance under good homeomorphisms and tracks diagonal masses
/// over a coherent family of depths (consecutive, each the coarsening of the
/// next).
pub fn is_compatible(family: &[DepthMeasure], cap: u128) -> Result<CompatibilityReport> {
    let first = family.first().ok_or_else(|| Error::Incoherent("empty family".into()))?;
    for pair in family.windows(2) {
        if pair[1].index != pair[0].index || pair[1].depth != pair[0].depth + 1 {
            return Err(Error::Incoherent("depths must be consecutive over one index function".into()));
        }
        if pair[1].coarsen(pair[0].depth)? != pair[0] {
            return Err(Error::Incoherent(format!(
                "depth {} does not coarsen to depth {}",
                pair[1].depth, pair[0].depth
            )));
        }
    }
    let perms = good_permutations(&first.index, cap)?;
    let invariance_by_depth: Vec<bool> =
        family.iter().map(|mu| perms.iter().all(|p| mu.permuted(p) == *mu)).collect();
    let slots = first.index.slot_count();
    let diagonal_masses: Vec<BigRational> = family
        .iter()
        .map(|mu| {
            let mut total = BigRational::zero();
            for a in 0..slots {
                for b in a + 1..slots {
                    total += mu.diagonal_mass(a, b);
                }
            }
            total
        })
        .collect();
    let diagonal_trend = trend(&diagonal_masses);
    Ok(CompatibilityReport {
        depths: family.iter().map(|m| m.depth).collect(),
        invariance: invariance_by_depth.iter().all(|&b| b),
        invariance_by_depth,
        diagonal_masses,
        diagonal_trend,
        marginals: "not falsifiable at finite depth",
    })
}

fn trend(masses: &[BigRational]) -> DiagonalTrend {
    if masses.iter().all(Zero::is_zero) {
        return DiagonalTrend::Vanishing;
    }
    if masses.len() < 2 {
        return DiagonalTrend::Undetermined;
    }
    let nonincreasing = masses.windows(2).all(|w| w[1] <= w[0]);
    if nonincreasing && masses.last() < masses.first() {
        DiagonalTrend::Vanishing
    } else {
        DiagonalTrend::Persistent
    }
}

/// The coherent family `μ` at depths `range`, from a depth-generating closure.
pub fn family<F>(range: RangeInclusive<u32>, mut at: F) -> Result<Vec<DepthMeasure>>
where
    F: FnMut(u32) -> Result<DepthMeasure>,
{
    range.map(&mut at).collect()
}

/// `R_x(φ)` on a grid cell: `∏_{(k,i)} φ(cell_{(k,i)})^k`.
pub fn apply_r<S: Scalar>(x: &IndexFunction, phi: &TorusStep<S>, cell: &[BinarySeq]) -> Result<S> {
    let slots = x.slots();
    if cell.len() != slots.len() {
        return Err(Error::Invalid(format!("cell has {} coordinates, {x} has {} slots", cell.len(), slots.len())));
    }
    let mut acc = S::one();
    for (slot, c) in slots.iter().zip(cell) {
        if c.len() < phi.level() {
            return Err(Error::LevelMismatch { left: phi.level(), right: c.len() });
        }
        acc = acc * phi.at(c).unit_pow(slot.level);
    }
    Ok(acc)
}

/// A function on the depth-`n` grid of `C_x`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridFunction<S> {
    pub index: IndexFunction,
    pub depth: u32,
    pub values: BTreeMap<Vec<BinarySeq>, S>,
}

impl<S: Scalar> GridFunction<S> {
    /// `∫ |f|² dμ`
    pub fn norm_sqr(&self, mu: &DepthMeasure) -> Result<S> {
        if mu.index != self.index || mu.depth != self.depth {
            return Err(Error::Invalid("function and measure live on different grids".into()));
        }
        let mut acc = S::zero();
        for (c, v) in &self.values {
            let w = mu.weight(c);
            if !w.is_zero() {
                acc = acc + v.norm_sqr() * S::from_ratio(&w);
            }
        }
        Ok(acc)
    }

    pub fn approx_eq(&self, other: &GridFunction<S>, tol: f64) -> bool {
        let zero = S::zero();
        self.index == other.index
            && self.depth == other.depth
            && self
                .values
                .keys()
                .chain(other.values.keys())
                .all(|c| self.values.get(c).unwrap_or(&zero).approx_eq(other.values.get(c).unwrap_or(&zero), tol))
    }
}

/// `ρ_{μ_x}(φ) f = R_x(φ)·f`.
pub fn apply_rho_general<S: Scalar>(
    x: &IndexFunction,
    phi: &TorusStep<S>,
    f: &GridFunction<S>,
) -> Result<GridFunction<S>> {
    if &f.index != x {
        return Err(Error::Invalid(format!("function lives on C_{} not C_{x}", f.index)));
    }
    if f.depth < phi.level() {
        return Err(Error::LevelMismatch { left: phi.level(), right: f.depth });
    }
    let values = f
        .values
        .iter()
        .map(|(c, v)| Ok((c.clone(), apply_r(x, phi, c)? * v.clone())))
        .collect::<Result<_>>()?;
    Ok(GridFunction { index: x.clone(), depth: f.depth, values })
}

/// A pair of level-preserving injections `D(x) → D(x⊕y)`, `D(y) → D(x⊕y)`
/// with complementary ranges, written as the images of the slots of `x`
/// followed by those of `y`, as positions in `D(x⊕y)`.
pub type Pairing = Vec<usize>;

/// All pairings; `∏_k (x(k)+y(k))!` of them.
pub fn pairings(x: &IndexFunction, y: &IndexFunction, cap: u128) -> Result<Vec<Pairing>> {
    let sum = x.oplus(y);
    let count: BigInt = sum.values.values().map(|&v| factorial(v)).product();
    if count > BigInt::from(cap) {
        return Err(Error::CapExceeded {
            what: "pairing enumeration",
            size: u128::try_from(count).unwrap_or(u128::MAX),
            cap,
        });
    }
    let target = sum.slots();
    let pos = |s: Slot| target.iter().position(|t| *t == s).expect("slot in D(x⊕y)");
    // per level: a permutation of the target block, first x(k) entries go to x
    let mut per_level: Vec<(i64, Vec<Vec<usize>>)> = Vec::new();
    for (&k, &n) in &sum.values {
        let block: Vec<usize> = (0..n).map(|i| pos(Slot { level: k, index: i })).collect();
        per_level.push((k, permutations(&block)));
    }
    let mut out: Vec<(BTreeMap<Slot, usize>, BTreeMap<Slot, usize>)> = vec![(BTreeMap::new(), BTreeMap::new())];
    for (k, perms) in &per_level {
        let nx = x.get(*k) as usize;
        let mut next = Vec::with_capacity(out.len() * perms.len());
        for (mx, my) in &out {
            for p in perms {
                let (mut mx, mut my) = (mx.clone(), my.clone());
                for (i, &t) in p.iter().enumerate() {
                    if i < nx {
                        mx.insert(Slot { level: *k, index: i as u32 }, t);
                    } else {
                        my.insert(Slot { level: *k, index: (i - nx) as u32 }, t);
                    }
                }
                next.push((mx, my));
            }
        }
        out = next;
    }
    Ok(out
        .into_iter()
        .map(|(mx, my)| {
            x.slots().iter().map(|s| mx[s]).chain(y.slots().iter().map(|s| my[s])).collect()
        })
        .collect())
}

/// `μ⊗ν = Σ_{ι∈I} (h_ι)_*(μ×ν)` over `x⊕y`, with the number of pairings.
pub fn tensor(mu: &DepthMeasure, nu: &DepthMeasure, cap: u128) -> Result<(DepthMeasure, usize)> {
    if mu.depth != nu.depth {
        return Err(Error::LevelMismatch { left: mu.depth, right: nu.depth });
    }
    let sum = mu.index.oplus(&nu.index);
    let pairs = pairings(&mu.index, &nu.index, cap)?;
    let work = (pairs.len() as u128) * (mu.weights.len() as u128) * (nu.weights.len() as u128);
    if work > cap * 16 {
        return Err(Error::CapExceeded { what: "tensor pushforward", size: work, cap: cap * 16 });
    }
    let slots = sum.slot_count();
    let mut weights: BTreeMap<Vec<BinarySeq>, BigRational> = BTreeMap::new();
    for pairing in &pairs {
        for (a, wa) in &mu.weights {
            for (b, wb) in &nu.weights {
                let mut cell = vec![BinarySeq::EMPTY; slots];
                for (j, c) in a.iter().chain(b.iter()).enumerate() {
                    cell[pairing[j]] = *c;
                }
                *weights.entry(cell).or_default() += wa * wb;
            }
        }
    }
    Ok((DepthMeasure::new(sum, mu.depth, weights)?, pairs.len()))
}

/// `mμ = (e_{x,m})_*μ`: relabels slot `(k, i)` as `(mk, i)`.
pub fn scale_measure(m: i64, mu: &DepthMeasure) -> Result<DepthMeasure> {
    let index = mu.index.scale(m)?;
    let old = mu.index.slots();
    let new = index.slots();
    let perm: Vec<usize> = old
        .iter()
        .map(|s| new.iter().position(|t| *t == Slot { level: s.level * m, index: s.index }).expect("relabelled slot"))
        .collect();
    let weights = mu
        .weights
        .iter()
        .map(|(cell, w)| {
            let mut out = cell.clone();
            for (j, &t) in perm.iter().enumerate() {
                out[t] = cell[j];
            }
            (out, w.clone())
        })
        .collect();
    Ok(DepthMeasure { index, depth: mu.depth, weights })
}

/// The measure `μ^j_x` of the Koopman representation of the Gaussian
/// boolean action: `λ^{D(x)}` when `j = 1` and `dom(x) ⊆ {−1, 1}`, else zero
/// (`None`).
pub fn spectral_form(x: &IndexFunction, j: u32, depth: u32, cap: u128) -> Result<Option<DepthMeasure>> {
    if j == 1 && x.is_unit_supported() {
        Ok(Some(DepthMeasure::uniform(x, depth, cap)?))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Debug)]
pub struct ConstraintReport {
    pub coefficients: Vec<i64>,
    pub indices: Vec<IndexFunction>,
    /// `m₁x₁ ⊕ ⋯ ⊕ m_nx_n`
    pub combined: IndexFunction,
    /// `m₁μ¹_{x₁} ⊗ ⋯ ⊗ m_nμ¹_{x_n}` at the deepest checked depth.
    pub lhs: Option<DepthMeasure>,
    /// `μ¹_x` at the deepest checked depth.
    pub rhs: Option<DepthMeasure>,
    pub abs_cont: bool,
    pub depths: Vec<u32>,
}

impl ConstraintReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "coefficients": self.coefficients,
            "indices": self.indices.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            "combined": self.combined.to_string(),
            "lhs": self.lhs.as_ref().map(DepthMeasure::to_json),
            "rhs": self.rhs.as_ref().map(DepthMeasure::to_json),
            "abs_cont": self.abs_cont,
            "depths": self.depths,
        })
    }
}

/// Builds both sides of `m₁μ¹_{x₁} ⊗ ⋯ ⊗ m_nμ¹_{x_n} ⪯ μ¹_x` and tests
/// absolute continuity as cylinder-support containment at every depth in
/// `depths`.
pub fn check_constraint(
    coefficients: &[i64],
    indices: &[IndexFunction],
    depths: RangeInclusive<u32>,
    cap: u128,
) -> Result<ConstraintReport> {
    if coefficients.is_empty() || coefficients.len() != indices.len() {
        return Err(Error::Invalid("need one coefficient per index function".into()));
    }
    if coefficients.contains(&0) {
        return Err(Error::ZeroMultiplier);
    }
    let mut combined = indices[0].scale(coefficients[0])?;
    for (m, x) in coefficients.iter().zip(indices).skip(1) {
        combined = combined.oplus(&x.scale(*m)?);
    }
    let mut abs_cont = true;
    let mut lhs_last = None;
    let mut rhs_last = None;
    let depth_list: Vec<u32> = depths.collect();
    for &n in &depth_list {
        let mut lhs: Option<DepthMeasure> = None;
        let mut zero = false;
        for (m, x) in coefficients.iter().zip(indices) {
            match spectral_form(x, 1, n, cap)? {
                None => {
                    zero = true;
                    break;
                }
                Some(mu) => {
                    let scaled = scale_measure(*m, &mu)?;
                    lhs = Some(match lhs {
                        None => scaled,
                        Some(acc) => tensor(&acc, &scaled, cap)?.0,
                    });
                }
            }
        }
        let lhs = if zero { None } else { lhs.filter(|m| !m.is_zero()) };
        let rhs = spectral_form(&combined, 1, n, cap)?;
        let ok = match (&lhs, &rhs) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(l), Some(r)) => l.support_within(r),
        };
        abs_cont &= ok;
        lhs_last = lhs;
        rhs_last = rhs;
    }
    Ok(ConstraintReport {
        coefficients: coefficients.to_vec(),
        indices: indices.to_vec(),
        combined,
        lhs: lhs_last,
        rhs: rhs_last,
        abs_cont,
        depths: depth_list,
    })
}
