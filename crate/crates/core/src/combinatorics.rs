//! Binary words, symbols with conjugation, admissible words and torus
//! step elements.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::{binomial, factorial, Scalar};

/// Longest binary sequence the crate will represent.
pub const MAX_DEPTH: u32 = 32;

/// A finite binary sequence. Ordered first by length, then
/// lexicographically; the derived order gives exactly that because the
/// first digit is stored as the most significant bit.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BinarySeq {
    len: u8,
    bits: u64,
}

impl BinarySeq {
    pub const EMPTY: BinarySeq = BinarySeq { len: 0, bits: 0 };

    pub fn new(len: u32, bits: u64) -> Result<Self> {
        if len > MAX_DEPTH {
            return Err(Error::DepthExceeded { requested: len, max: MAX_DEPTH });
        }
        if len < 64 && bits >> len != 0 {
            return Err(Error::Invalid(format!("bits {bits:#b} do not fit in length {len}")));
        }
        Ok(BinarySeq { len: len as u8, bits })
    }

    pub fn len(&self) -> u32 {
        self.len as u32
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The digits read as a binary number, first digit most significant.
    pub fn bits(&self) -> u64 {
        self.bits
    }

    /// Digit at 0-based position `i`.
    pub fn digit(&self, i: u32) -> u8 {
        assert!(i < self.len());
        ((self.bits >> (self.len() - 1 - i)) & 1) as u8
    }

    pub fn push(&self, digit: u8) -> Result<Self> {
        BinarySeq::new(self.len() + 1, (self.bits << 1) | (digit & 1) as u64)
    }

    /// Concatenation `self · tail`.
    pub fn concat(&self, tail: &BinarySeq) -> Result<Self> {
        BinarySeq::new(self.len() + tail.len(), (self.bits << tail.len()) | tail.bits)
    }

    /// Restriction to the first `n` digits.
    pub fn prefix(&self, n: u32) -> BinarySeq {
        assert!(n <= self.len());
        BinarySeq { len: n as u8, bits: self.bits >> (self.len() - n) }
    }

    pub fn is_prefix_of(&self, other: &BinarySeq) -> bool {
        self.len() <= other.len() && other.prefix(self.len()) == *self
    }

    /// All sequences of length `n` in canonical order.
    pub fn all(n: u32) -> impl Iterator<Item = BinarySeq> {
        assert!(n <= MAX_DEPTH && n < 63);
        (0..1u64 << n).map(move |b| BinarySeq { len: n as u8, bits: b })
    }

    /// The two one-digit extensions.
    pub fn children(&self) -> Result<[BinarySeq; 2]> {
        Ok([self.push(0)?, self.push(1)?])
    }
}

impl fmt::Display for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.len == 0 {
            return f.write_str("∅");
        }
        for i in 0..self.len() {
            write!(f, "{}", self.digit(i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for BinarySeq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for BinarySeq {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() || s == "∅" || s == "e" {
            return Ok(BinarySeq::EMPTY);
        }
        let mut out = BinarySeq::EMPTY;
        for c in s.chars() {
            out = match c {
                '0' => out.push(0)?,
                '1' => out.push(1)?,
                other => return Err(Error::Parse(format!("unexpected character {other:?} in {s:?}"))),
            };
        }
        Ok(out)
    }
}

/// An element of `2ⁿ ∪ conj(2ⁿ)`. Unbarred symbols sort before barred ones.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    pub barred: bool,
    pub word: BinarySeq,
}

impl Symbol {
    pub fn plain(word: BinarySeq) -> Self {
        Symbol { barred: false, word }
    }

    pub fn bar(word: BinarySeq) -> Self {
        Symbol { barred: true, word }
    }

    pub fn conj(&self) -> Self {
        Symbol { barred: !self.barred, word: self.word }
    }

    /// Appending to a barred symbol appends to the underlying word.
    pub fn push(&self, digit: u8) -> Result<Self> {
        Ok(Symbol { barred: self.barred, word: self.word.push(digit)? })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.barred {
            write!(f, "~{}", self.word)
        } else {
            write!(f, "{}", self.word)
        }
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Symbol {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s.strip_prefix('~') {
            Some(rest) => Ok(Symbol::bar(rest.parse()?)),
            None => Ok(Symbol::plain(s.parse()?)),
        }
    }
}

/// Multiplicities `m_s` and the degree pair `(p, q)` of a word.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WordStats {
    /// Only nonzero multiplicities are stored.
    pub multiplicities: BTreeMap<BinarySeq, u32>,
    pub p: u32,
    pub q: u32,
}

impl WordStats {
    pub fn multiplicity(&self, s: &BinarySeq) -> u32 {
        self.multiplicities.get(s).copied().unwrap_or(0)
    }

    /// `∏ m_s!`
    pub fn factorial_product(&self) -> BigInt {
        self.multiplicities.values().map(|&m| factorial(m)).product()
    }
}

/// An ordered arrangement of the unbarred entries and of the de-barred
/// barred entries of a word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Variant {
    pub unbarred: Vec<BinarySeq>,
    pub barred: Vec<BinarySeq>,
}

/// A nonempty sorted multiset of same-level symbols in which no word
/// appears both barred and unbarred. Indexes a basic product vector.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdmissibleWord {
    level: u32,
    entries: Vec<Symbol>,
}

impl AdmissibleWord {
    pub fn new(level: u32, mut entries: Vec<Symbol>) -> Result<Self> {
        if level == 0 || level > MAX_DEPTH {
            return Err(Error::Invalid(format!("word level must lie in 1..={MAX_DEPTH}, got {level}")));
        }
        if entries.is_empty() {
            return Err(Error::Inadmissible("empty word".into()));
        }
        if let Some(bad) = entries.iter().find(|s| s.word.len() != level) {
            return Err(Error::LevelMismatch { left: level, right: bad.word.len() });
        }
        entries.sort();
        if let Some(bad) = entries.iter().find(|s| entries.binary_search(&s.conj()).is_ok()) {
            return Err(Error::Inadmissible(format!("{bad} occurs together with its conjugate")));
        }
        Ok(AdmissibleWord { level, entries })
    }

    /// Infers the level from the entries.
    pub fn from_symbols(entries: Vec<Symbol>) -> Result<Self> {
        let level = entries.first().map(|s| s.word.len()).unwrap_or(0);
        AdmissibleWord::new(level, entries)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn degree(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn entries(&self) -> &[Symbol] {
        &self.entries
    }

    pub fn stats(&self) -> WordStats {
        let mut multiplicities = BTreeMap::new();
        let mut p = 0;
        for s in &self.entries {
            *multiplicities.entry(s.word).or_insert(0) += 1;
            if !s.barred {
                p += 1;
            }
        }
        WordStats { multiplicities, p, q: self.degree() - p }
    }

    /// Distinct symbols with their multiplicities, in canonical order.
    pub fn symbol_counts(&self) -> Vec<(Symbol, u32)> {
        let mut out: Vec<(Symbol, u32)> = Vec::new();
        for s in &self.entries {
            match out.last_mut() {
                Some((last, c)) if last == s => *c += 1,
                _ => out.push((*s, 1)),
            }
        }
        out
    }

    fn blocks(&self) -> (Vec<BinarySeq>, Vec<BinarySeq>) {
        let unbarred = self.entries.iter().filter(|s| !s.barred).map(|s| s.word).collect();
        let barred = self.entries.iter().filter(|s| s.barred).map(|s| s.word).collect();
        (unbarred, barred)
    }

    /// Every variant exactly once, in lexicographic order.
    pub fn variants(&self) -> Vec<Variant> {
        let (u, b) = self.blocks();
        let us = distinct_permutations(&u);
        let bs = distinct_permutations(&b);
        let mut out = Vec::with_capacity(us.len() * bs.len());
        for r in &us {
            for t in &bs {
                out.push(Variant { unbarred: r.clone(), barred: t.clone() });
            }
        }
        out
    }

    /// `p!·q! / ∏_s (μ_s!·ν_s!)`, with μ, ν the unbarred and barred counts.
    pub fn variant_count(&self) -> BigInt {
        let st = self.stats();
        let denom: BigInt = self.symbol_counts().iter().map(|&(_, c)| factorial(c)).product();
        factorial(st.p) * factorial(st.q) / denom
    }

    /// The word `σ₁ε₁ ⋯ σ_lε_l`, with `eps[i]` appended to the i-th entry in
    /// canonical order.
    pub fn append_digits(&self, eps: &[u8]) -> Result<AdmissibleWord> {
        if eps.len() != self.entries.len() {
            return Err(Error::Invalid(format!(
                "need {} digits, got {}",
                self.entries.len(),
                eps.len()
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(eps)
            .map(|(s, &d)| s.push(d))
            .collect::<Result<Vec<_>>>()?;
        AdmissibleWord::new(self.level + 1, entries)
    }

    /// The word obtained by conjugating every entry.
    pub fn conj(&self) -> AdmissibleWord {
        let entries = self.entries.iter().map(Symbol::conj).collect();
        AdmissibleWord::new(self.level, entries).expect("conjugation preserves admissibility")
    }
}

impl fmt::Display for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, s) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        f.write_str("}")
    }
}

impl fmt::Debug for AdmissibleWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Parses whitespace- or comma-separated symbols, `~` marking a bar:
/// `"0 0 ~1"`, optionally wrapped in braces.
impl FromStr for AdmissibleWord {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('{').trim_end_matches('}');
        let syms = inner
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Symbol>>>()?;
        AdmissibleWord::from_symbols(syms)
    }
}

fn distinct_permutations(items: &[BinarySeq]) -> Vec<Vec<BinarySeq>> {
    let mut cur = items.to_vec();
    cur.sort();
    let mut out = vec![cur.clone()];
    while next_permutation(&mut cur) {
        out.push(cur.clone());
    }
    out
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Bounds on exhaustive enumeration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Limits {
    pub max_level: u32,
    pub max_degree: u32,
    pub max_words: u128,
}

impl Default for Limits {
    fn default() -> Self {
        Limits { max_level: 3, max_degree: 5, max_words: 100_000 }
    }
}

impl Limits {
    /// Number of admissible words of level `n` and degree `l`:
    /// `Σ_j C(2ⁿ, j)·2^j·C(l−1, j−1)` (choose `j` distinct words, a bar
    /// state for each, and a composition of `l` into `j` parts).
    pub fn count_words(n: u32, l: u32) -> BigInt {
        if l == 0 {
            return BigInt::from(0);
        }
        let base = 1u32 << n;
        (1..=l.min(base))
            .map(|j| binomial(base, j) * BigInt::from(2).pow(j) * binomial(l - 1, j - 1))
            .sum()
    }

    /// Every admissible word of the given level and degree, once each, in
    /// canonical order.
    pub fn admissible_words(&self, n: u32, l: u32) -> Result<Vec<AdmissibleWord>> {
        if n == 0 || n > self.max_level {
            return Err(Error::CapExceeded { what: "word level", size: n as u128, cap: self.max_level as u128 });
        }
        if l > self.max_degree {
            return Err(Error::CapExceeded { what: "word degree", size: l as u128, cap: self.max_degree as u128 });
        }
        if l == 0 {
            return Ok(Vec::new());
        }
        let count = Limits::count_words(n, l);
        let cap = BigInt::from(self.max_words);
        if count > cap {
            return Err(Error::CapExceeded {
                what: "admissible word enumeration",
                size: u128::try_from(count).unwrap_or(u128::MAX),
                cap: self.max_words,
            });
        }
        let alphabet: Vec<Symbol> = BinarySeq::all(n)
            .map(Symbol::plain)
            .chain(BinarySeq::all(n).map(Symbol::bar))
            .collect();
        let mut out = Vec::new();
        let mut stack = Vec::with_capacity(l as usize);
        enumerate_multisets(&alphabet, 0, l as usize, &mut stack, &mut out);
        Ok(out
            .into_iter()
            .map(|entries| AdmissibleWord { level: n, entries })
            .collect())
    }

    /// All admissible words of level `n` with degree `1..=l`.
    pub fn words_up_to(&self, n: u32, l: u32) -> Result<Vec<AdmissibleWord>> {
        let mut out = Vec::new();
        for d in 1..=l {
            out.extend(self.admissible_words(n, d)?);
        }
        Ok(out)
    }
}

fn enumerate_multisets(
    alphabet: &[Symbol],
    start: usize,
    remaining: usize,
    stack: &mut Vec<Symbol>,
    out: &mut Vec<Vec<Symbol>>,
) {
    if remaining == 0 {
        out.push(stack.clone());
        return;
    }
    for i in start..alphabet.len() {
        let s = alphabet[i];
        if stack.iter().any(|t| *t == s.conj()) {
            continue;
        }
        stack.push(s);
        enumerate_multisets(alphabet, i, remaining - 1, stack, out);
        stack.pop();
    }
}

/// `admissible_words` with default limits.
pub fn admissible_words(n: u32, l: u32) -> Result<Vec<AdmissibleWord>> {
    Limits::default().admissible_words(n, l)
}

/// An element of the step group `𝕊ₙ ≅ 𝕋^{2ⁿ}`: one unit scalar per word of
/// length `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusStep<S> {
    level: u32,
    values: Vec<S>,
}

const UNIT_TOL: f64 = 1e-12;

impl<S: Scalar> TorusStep<S> {
    /// `values[b]` is the value on the word with bits `b`.
    pub fn new(level: u32, values: Vec<S>) -> Result<Self> {
        if level > 20 {
            return Err(Error::DepthExceeded { requested: level, max: 20 });
        }
        if values.len() != 1usize << level {
            return Err(Error::Invalid(format!(
                "level {level} needs {} values, got {}",
                1usize << level,
                values.len()
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.norm_sqr().approx_eq(&S::one(), UNIT_TOL)) {
            return Err(Error::Invalid(format!("{v} is not of modulus one")));
        }
        Ok(TorusStep { level, values })
    }

    pub fn identity(level: u32) -> Self {
        TorusStep { level, values: vec![S::one(); 1 << level] }
    }

    /// Each value `exp(2πi·k_s/order)` for the given exponents.
    pub fn from_roots(level: u32, exponents: &[i64], order: u32) -> Result<Self> {
        let values = exponents
            .iter()
            .map(|&k| S::root_of_unity(k, order))
            .collect::<Result<Vec<_>>>()?;
        TorusStep::new(level, values)
    }

    /// Uniformly random roots of unity of the given order.
    pub fn random_roots<R: Rng + ?Sized>(level: u32, order: u32, rng: &mut R) -> Result<Self> {
        let exps: Vec<i64> = (0..1usize << level).map(|_| rng.gen_range(0..order as i64)).collect();
        TorusStep::from_roots(level, &exps, order)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `g(s)` for any word of length at least the level, i.e. the value of
    /// the step function on the cylinder `[s]`.
    pub fn at(&self, s: &BinarySeq) -> &S {
        assert!(s.len() >= self.level, "word {s} shorter than step level {}", self.level);
        &self.values[s.prefix(self.level).bits() as usize]
    }

    /// The same function viewed as an element of `𝕊_m`, `m ≥ level`.
    pub fn lift(&self, m: u32) -> Result<Self> {
        if m < self.level {
            return Err(Error::LevelMismatch { left: self.level, right: m });
        }
        let values = BinarySeq::all(m).map(|s| self.at(&s).clone()).collect();
        Ok(TorusStep { level: m, values })
    }

    /// Pointwise product, lifting to the finer level.
    pub fn mul(&self, other: &TorusStep<S>) -> TorusStep<S> {
        let m = self.level.max(other.level);
        let values = BinarySeq::all(m)
            .map(|s| self.at(&s).clone() * other.at(&s).clone())
            .collect();
        TorusStep { level: m, values }
    }

    pub fn inverse(&self) -> TorusStep<S> {
        TorusStep { level: self.level, values: self.values.iter().map(S::conj).collect() }
    }
}

impl TorusStep<num_complex::Complex64> {
    /// Arbitrary phases `exp(iθ_s)`; float backend only.
    pub fn from_angles(level: u32, angles: &[f64]) -> Result<Self> {
        let values = angles.iter().map(|&t| num_complex::Complex64::from_polar(1.0, t)).collect();
        TorusStep::new(level, values)
    }

    pub fn random_angles<R: Rng + ?Sized>(level: u32, rng: &mut R) -> Result<Self> {
        let angles: Vec<f64> = (0..1usize << level)
            .map(|_| rng.gen_range(0.0..std::f64::consts::TAU))
            .collect();
        TorusStep::from_angles(level, &angles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Exact;
    use itertools::Itertools;
    use proptest::prelude::*;
    use std::collections::BTreeSet;

    fn w(s: &str) -> AdmissibleWord {
        s.parse().unwrap()
    }

    fn seq(s: &str) -> BinarySeq {
        s.parse().unwrap()
    }

    #[test]
    fn binary_seq_order_is_length_then_lex() {
        let mut v = vec![seq("10"), seq("1"), seq(""), seq("01"), seq("0"), seq("000")];
        v.sort();
        let shown: Vec<String> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(shown, ["∅", "0", "1", "01", "10", "000"]);
        assert_eq!(seq("0110").prefix(2), seq("01"));
        assert!(seq("01").is_prefix_of(&seq("011")));
        assert_eq!(seq("01").concat(&seq("10")).unwrap(), seq("0110"));
        assert!(BinarySeq::new(33, 0).is_err());
    }

    #[test]
    fn stats_examples() {
        let st = w("0 0 ~1").stats();
        assert_eq!((st.multiplicity(&seq("0")), st.multiplicity(&seq("1"))), (2, 1));
        assert_eq!((st.p, st.q), (2, 1));

        let st = w("0").stats();
        assert_eq!((st.multiplicity(&seq("0")), st.multiplicity(&seq("1"))), (1, 0));
        assert_eq!((st.p, st.q), (1, 0));

        let st = w("00 01 ~11 ~11").stats();
        assert_eq!((st.p, st.q), (2, 2));
        assert_eq!(st.multiplicity(&seq("00")), 1);
        assert_eq!(st.multiplicity(&seq("01")), 1);
        assert_eq!(st.multiplicity(&seq("11")), 2);
    }

    #[test]
    fn variants_examples() {
        let v = w("0 0 ~1").variants();
        assert_eq!(v, vec![Variant { unbarred: vec![seq("0"), seq("0")], barred: vec![seq("1")] }]);

        let v = w("0 1").variants();
        assert_eq!(
            v,
            vec![
                Variant { unbarred: vec![seq("0"), seq("1")], barred: vec![] },
                Variant { unbarred: vec![seq("1"), seq("0")], barred: vec![] },
            ]
        );
        assert_eq!(w("~10").variants().len(), 1);
    }

    #[test]
    fn enumeration_examples() {
        let one = admissible_words(1, 1).unwrap();
        let shown: Vec<String> = one.iter().map(|w| w.to_string()).collect();
        assert_eq!(shown, ["{0}", "{1}", "{~0}", "{~1}"]);

        let two: Vec<String> = admissible_words(1, 2).unwrap().iter().map(|w| w.to_string()).collect();
        assert_eq!(two, ["{0 0}", "{0 1}", "{0 ~1}", "{1 1}", "{1 ~0}", "{~0 ~0}", "{~0 ~1}", "{~1 ~1}"]);

        assert!(admissible_words(2, 0).unwrap().is_empty());
    }

    #[test]
    fn enumeration_respects_caps() {
        let tiny = Limits { max_level: 3, max_degree: 5, max_words: 10 };
        assert!(matches!(tiny.admissible_words(2, 3), Err(Error::CapExceeded { .. })));
        assert!(matches!(Limits::default().admissible_words(4, 1), Err(Error::CapExceeded { .. })));
        assert!(matches!(Limits::default().admissible_words(1, 6), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn enumeration_matches_count_and_brute_force() {
        for n in 1..=2 {
            for l in 1..=4 {
                let words = admissible_words(n, l).unwrap();
                assert_eq!(BigInt::from(words.len()), Limits::count_words(n, l));
                // brute force: every sorted l-tuple over the alphabet, filtered
                let alphabet: Vec<Symbol> =
                    BinarySeq::all(n).map(Symbol::plain).chain(BinarySeq::all(n).map(Symbol::bar)).collect();
                let brute: BTreeSet<AdmissibleWord> = (0..l)
                    .map(|_| alphabet.iter().copied())
                    .multi_cartesian_product()
                    .filter_map(|v| AdmissibleWord::new(n, v).ok())
                    .collect();
                assert_eq!(brute.into_iter().collect::<Vec<_>>(), words);
            }
        }
    }

    #[test]
    fn admissibility_and_stats_hold_for_every_enumerated_word() {
        for n in 1..=2 {
            for word in Limits::default().words_up_to(n, 4).unwrap() {
                for s in word.entries() {
                    assert!(!word.entries().contains(&s.conj()));
                }
                let st = word.stats();
                let total: u32 = st.multiplicities.values().sum();
                assert_eq!(total, st.p + st.q);
                assert_eq!(total, word.degree());
            }
        }
    }

    #[test]
    fn variant_count_matches_brute_force() {
        for n in 1..=2 {
            for word in Limits::default().words_up_to(n, 5).unwrap() {
                let (u, b) = word.blocks();
                let us: BTreeSet<Vec<BinarySeq>> = u.iter().copied().permutations(u.len()).collect();
                let bs: BTreeSet<Vec<BinarySeq>> = b.iter().copied().permutations(b.len()).collect();
                let brute = us.len() * bs.len();
                assert_eq!(word.variants().len(), brute, "{word}");
                assert_eq!(word.variant_count(), BigInt::from(brute), "{word}");
            }
        }
    }

    #[test]
    fn rejects_inadmissible_and_mixed_level() {
        assert!(matches!("0 ~0".parse::<AdmissibleWord>(), Err(Error::Inadmissible(_))));
        assert!(matches!("0 01".parse::<AdmissibleWord>(), Err(Error::LevelMismatch { .. })));
        assert!("".parse::<AdmissibleWord>().is_err());
    }

    #[test]
    fn torus_step_lookup_and_lift() {
        let g = TorusStep::<Exact>::from_roots(1, &[1, 3], 8).unwrap();
        assert_eq!(g.at(&seq("0110")), &Exact::root_of_unity(1, 8).unwrap());
        let lifted = g.lift(3).unwrap();
        assert_eq!(lifted.at(&seq("101")), &Exact::root_of_unity(3, 8).unwrap());
        assert_eq!(g.mul(&g.inverse()), TorusStep::identity(1));
        assert!(TorusStep::<Exact>::new(1, vec![Exact::from_int(2), Exact::one()]).is_err());
        assert!(TorusStep::<Exact>::from_roots(1, &[1, 1], 3).is_err());
    }

    proptest! {
        #[test]
        fn conj_is_involution_and_commutes_with_append(bits in 0u64..16, len in 0u32..5, barred: bool, d in 0u8..2) {
            let word = BinarySeq::new(len, bits & ((1 << len) - 1)).unwrap();
            let s = Symbol { barred, word };
            prop_assert_eq!(s.conj().conj(), s);
            prop_assert_eq!(s.push(d).unwrap().conj(), s.conj().push(d).unwrap());
        }
    }
}
