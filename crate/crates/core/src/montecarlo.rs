//! Sampling of the Gaussian inverse-limit space at a finite leaf depth, the
//! boolean torus action on samples, and Monte Carlo estimators.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde_json::json;

use crate::combinatorics::{BinarySeq, TorusStep};
use crate::error::{Error, Result};
use crate::gauss::{GaussMonomial, GaussPoly};
use crate::scalar::Scalar;

/// Leaf count `2^K` stays below this.
pub const MAX_SAMPLE_DEPTH: u32 = 16;
pub const MAX_SAMPLES: u64 = 1 << 32;
const CHUNK: u64 = 1 << 12;

/// Values at every word of length `≤ K`, with `f(s) = (f(s0)+f(s1))/√2`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreeSample {
    /// `levels[k][bits]` is the value at the length-`k` word with those bits.
    levels: Vec<Vec<Complex64>>,
}

impl TreeSample {
    /// Builds the tree above the given leaves.
    pub fn from_leaves(depth: u32, leaves: Vec<Complex64>) -> Result<Self> {
        check_depth(depth)?;
        if leaves.len() != 1 << depth {
            return Err(Error::Invalid(format!("need {} leaves, got {}", 1u64 << depth, leaves.len())));
        }
        let mut levels = vec![leaves];
        for _ in 0..depth {
            let below = levels.last().expect("nonempty");
            let up = below.chunks(2).map(|c| (c[0] + c[1]) * std::f64::consts::FRAC_1_SQRT_2).collect();
            levels.push(up);
        }
        levels.reverse();
        Ok(TreeSample { levels })
    }

    pub fn depth(&self) -> u32 {
        (self.levels.len() - 1) as u32
    }

    pub fn leaves(&self) -> &[Complex64] {
        &self.levels[self.levels.len() - 1]
    }

    /// `z_s` for `|s| ≤ K`.
    pub fn at(&self, s: &BinarySeq) -> Complex64 {
        self.levels[s.len() as usize][s.bits() as usize]
    }

    pub fn get(&self, s: &BinarySeq) -> Option<Complex64> {
        self.levels.get(s.len() as usize).map(|l| l[s.bits() as usize])
    }

    /// Largest `|f(s) − (f(s0)+f(s1))/√2|` over interior nodes.
    pub fn max_residual(&self) -> f64 {
        self.levels
            .windows(2)
            .flat_map(|w| {
                w[0].iter()
                    .enumerate()
                    .map(move |(i, v)| (v - (w[1][2 * i] + w[1][2 * i + 1]) * std::f64::consts::FRAC_1_SQRT_2).norm())
            })
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "depth": self.depth(),
            "leaves": self.leaves().iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        })
    }
}

fn check_depth(depth: u32) -> Result<()> {
    if depth > MAX_SAMPLE_DEPTH {
        return Err(Error::DepthExceeded { requested: depth, max: MAX_SAMPLE_DEPTH });
    }
    Ok(())
}

/// Sample number `index` of the stream for `seed`. Each index owns a
/// separate ChaCha stream, so samples are reproducible in any order.
pub fn sample(depth: u32, seed: u64, index: u64) -> Result<TreeSample> {
    check_depth(depth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let leaves = (0..1usize << depth)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    TreeSample::from_leaves(depth, leaves)
}

/// `g·f`: leaves times `g(s↾n)`, interior recomputed.
pub fn act_boolean<S: Scalar>(g: &TorusStep<S>, t: &TreeSample) -> Result<TreeSample> {
    let k = t.depth();
    if g.level() > k {
        return Err(Error::LevelMismatch { left: g.level(), right: k });
    }
    let leaves = BinarySeq::all(k).zip(t.leaves()).map(|(s, z)| g.at(&s).to_complex() * z).collect();
    TreeSample::from_leaves(k, leaves)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub mean: Complex64,
    pub std_error: f64,
    pub samples: u64,
}

impl Estimate {
    /// `|mean − exact| / SE`; infinite when SE is zero and the values differ.
    pub fn z_score(&self, exact: Complex64) -> f64 {
        let d = (self.mean - exact).norm();
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d <= 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    }

    pub fn within(&self, exact: Complex64, k: f64) -> bool {
        self.z_score(exact) <= k
    }
}

#[derive(Clone, Copy, Default)]
struct Neumaier {
    sum: f64,
    c: f64,
}

impl Neumaier {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn merge(&mut self, other: Neumaier) {
        self.add(other.sum);
        self.add(other.c);
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

#[derive(Clone, Copy, Default)]
struct Moments {
    re: Neumaier,
    im: Neumaier,
    sq: Neumaier,
}

/// Sample mean and standard error of `f` over `samples` trees of depth `K`.
pub fn estimate_with<F>(samples: u64, depth: u32, seed: u64, f: F) -> Result<Estimate>
where
    F: Fn(&TreeSample) -> Complex64 + Sync,
{
    let mut out = estimate_batch(samples, depth, seed, 1, |t, v| v[0] = f(t))?;
    Ok(out.remove(0))
}

/// `width` estimators on one shared stream of samples; `f` fills one value
/// per estimator.
pub fn estimate_batch<F>(samples: u64, depth: u32, seed: u64, width: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(&TreeSample, &mut [Complex64]) + Sync,
{
    if samples == 0 {
        return Err(Error::Invalid("sample count must be positive".into()));
    }
    if samples > MAX_SAMPLES {
        return Err(Error::CapExceeded { what: "samples", size: samples as u128, cap: MAX_SAMPLES as u128 });
    }
    check_depth(depth)?;
    let chunks = samples.div_ceil(CHUNK);
    let partials: Vec<Result<Vec<Moments>>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut m = vec![Moments::default(); width];
            let mut buf = vec![Complex64::new(0.0, 0.0); width];
            for i in c * CHUNK..((c + 1) * CHUNK).min(samples) {
                f(&sample(depth, seed, i)?, &mut buf);
                for (acc, v) in m.iter_mut().zip(&buf) {
                    acc.re.add(v.re);
                    acc.im.add(v.im);
                    acc.sq.add(v.norm_sqr());
                }
            }
            Ok(m)
        })
        .collect();
    let mut total = vec![Moments::default(); width];
    for p in partials {
        for (t, p) in total.iter_mut().zip(p?) {
            t.re.merge(p.re);
            t.im.merge(p.im);
            t.sq.merge(p.sq);
        }
    }
    let n = samples as f64;
    Ok(total
        .into_iter()
        .map(|t| {
            let mean = Complex64::new(t.re.value() / n, t.im.value() / n);
            let std_error = if samples > 1 {
                let var = ((t.sq.value() - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
                (var / n).sqrt()
            } else {
                0.0
            };
            Estimate { mean, std_error, samples }
        })
        .collect())
}

fn check_variables<S: Scalar>(p: &GaussPoly<S>, depth: u32) -> Result<()> {
    match p.variables().iter().map(BinarySeq::len).max() {
        Some(l) if l > depth => Err(Error::LevelMismatch { left: l, right: depth }),
        _ => Ok(()),
    }
}

/// Monte Carlo estimate of `∫ P dγ_∞`.
pub fn estimate<S: Scalar>(p: &GaussPoly<S>, samples: u64, depth: u32, seed: u64) -> Result<Estimate> {
    check_variables(p, depth)?;
    estimate_with(samples, depth, seed, |t| p.evaluate(&|s| t.at(s)))
}

/// Several expectations from the same samples.
pub fn estimate_many<S: Scalar>(polys: &[GaussPoly<S>], samples: u64, depth: u32, seed: u64) -> Result<Vec<Estimate>> {
    for p in polys {
        check_variables(p, depth)?;
    }
    estimate_batch(samples, depth, seed, polys.len(), |t, out| {
        for (o, p) in out.iter_mut().zip(polys) {
            *o = p.evaluate(&|s| t.at(s));
        }
    })
}

/// Monte Carlo estimate of `⟨P∘g, Q⟩ = ∫ P(g·f)·conj(Q(f)) dγ_∞`, the
/// Koopman inner product.
pub fn estimate_koopman_inner<S: Scalar>(
    g: &TorusStep<S>,
    p: &GaussPoly<S>,
    q: &GaussPoly<S>,
    samples: u64,
    depth: u32,
    seed: u64,
) -> Result<Estimate> {
    check_variables(p, depth)?;
    check_variables(q, depth)?;
    if g.level() > depth {
        return Err(Error::LevelMismatch { left: g.level(), right: depth });
    }
    estimate_with(samples, depth, seed, |t| {
        let moved = act_boolean(g, t).expect("level checked");
        p.evaluate(&|s| moved.at(s)) * q.evaluate(&|s| t.at(s)).conj()
    })
}

/// A fixed set of 20 monomials of degree at most 6 over words of length at
/// most 2, mixing levels and zero and nonzero moments.
pub fn reference_monomials() -> Vec<GaussMonomial> {
    let table: [&[(&str, u32, u32)]; 20] = [
        &[("", 1, 1)],
        &[("0", 1, 1)],
        &[("01", 1, 1)],
        &[("", 2, 2)],
        &[("1", 3, 3)],
        &[("0", 1, 1), ("1", 1, 1)],
        &[("0", 2, 1)],
        &[("", 1, 0)],
        &[("00", 2, 0)],
        &[("", 1, 0), ("0", 0, 1)],
        &[("", 1, 0), ("00", 0, 1)],
        &[("0", 1, 1), ("00", 1, 1)],
        &[("", 2, 0), ("0", 0, 1), ("1", 0, 1)],
        &[("00", 1, 1), ("01", 1, 1), ("10", 1, 1)],
        &[("0", 2, 2), ("1", 1, 1)],
        &[("", 1, 1), ("0", 1, 1), ("1", 1, 1)],
        &[("11", 2, 1), ("1", 0, 1)],
        &[("", 0, 2), ("01", 1, 0), ("10", 1, 0)],
        &[("0", 1, 2), ("1", 1, 0)],
        &[("", 3, 1)],
    ];
    table
        .iter()
        .map(|row| GaussMonomial::new(row.iter().map(|(s, a, b)| (s.parse().expect("literal word"), (*a, *b)))))
        .collect()
}
