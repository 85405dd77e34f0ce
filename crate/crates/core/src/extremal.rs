//! Exact maximal level-1 weight at small dimension, the threshold
//! self-consistency test for maximizers, LTF-restricted lower bounds, and a
//! Monte-Carlo estimate of the Euclidean average squared distance of balls.

use std::collections::{BTreeMap, BTreeSet};

use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Serialize, Serializer};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use crate::boolfn::BoolFn;
use crate::bounds::{chang_bound, chi, chi_tilde, fkn_bound, khintchine_bound, lp_bound};
use crate::error::{check_domain, Error, Result};
use crate::specfun::ProfileParams;

/// Largest dimension the bitmask enumerator can represent.
pub const HARD_MAX_DIM: usize = 6;

/// Knobs for the exhaustive searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// Dimension cap; raising it past 4 is an explicit override.
    pub max_n: usize,
    /// Maximizers kept before the list is marked truncated.
    pub max_maximizers: usize,
    /// Enumerate only supports containing point 0. XOR translation preserves
    /// `|f^_i|`, so every support has a translate of this form.
    pub prune: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            max_n: 4,
            max_maximizers: 10_000,
            prune: true,
        }
    }
}

fn display<T: std::fmt::Display, S: Serializer>(
    v: &T,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// Exact maximum of `W_1` over supports of a given size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtremalResult {
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "display")]
    pub max_w1: Rational64,
    pub max_w1_f64: f64,
    /// Sorted point-index lists in lexicographic order.
    pub maximizers: Vec<Vec<usize>>,
    pub self_consistent: Vec<bool>,
    pub truncated: bool,
}

impl ExtremalResult {
    pub fn density(&self) -> f64 {
        self.m as f64 / (1u64 << self.n) as f64
    }

    pub fn all_self_consistent(&self) -> bool {
        self.self_consistent.iter().all(|&b| b)
    }
}

fn check_search(n: usize, m: usize, opts: &SearchOptions) -> Result<()> {
    let cap = opts.max_n.min(HARD_MAX_DIM);
    if n > cap {
        return Err(Error::SearchCapExceeded { n, cap });
    }
    if m > 1 << n {
        return Err(Error::SupportSizeOutOfRange { m, max: 1 << n });
    }
    Ok(())
}

/// Walks every admissible `m`-subset of `{0, .., 2^n - 1}` as a bitmask
/// together with its coordinate sums. Work is split by the first free
/// element; the returned accumulators are in that fixed order.
fn enumerate<A, I, V>(n: usize, m: usize, prune: bool, init: I, visit: V) -> Vec<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, u64, &[i64]) + Sync,
{
    let len = 1usize << n;
    let fixed: u64 = if prune && m > 0 { 1 } else { 0 };
    let free = m - fixed.count_ones() as usize;
    let first = fixed.count_ones() as usize;

    struct Walk<'a, A> {
        m: usize,
        len: usize,
        visit: &'a (dyn Fn(&mut A, u64, &[i64]) + Sync),
    }

    impl<A> Walk<'_, A> {
        fn rec(&self, start: usize, left: usize, mask: u64, minus: &mut [i64], acc: &mut A) {
            if left == 0 {
                let sums: Vec<i64> = minus.iter().map(|&c| self.m as i64 - 2 * c).collect();
                (self.visit)(acc, mask, &sums);
                return;
            }
            for p in start..=(self.len - left) {
                for (j, c) in minus.iter_mut().enumerate() {
                    *c += ((p >> j) & 1) as i64;
                }
                self.rec(p + 1, left - 1, mask | (1 << p), minus, acc);
                for (j, c) in minus.iter_mut().enumerate() {
                    *c -= ((p >> j) & 1) as i64;
                }
            }
        }
    }

    let walk = Walk {
        m,
        len,
        visit: &visit,
    };
    if free == 0 {
        let mut acc = init();
        let mut minus = vec![0i64; n];
        walk.rec(first, 0, fixed, &mut minus, &mut acc);
        return vec![acc];
    }
    (first..=(len - free))
        .into_par_iter()
        .map(|p| {
            let mut acc = init();
            let mut minus: Vec<i64> = (0..n).map(|j| ((p >> j) & 1) as i64).collect();
            walk.rec(p + 1, free - 1, fixed | (1 << p), &mut minus, &mut acc);
            acc
        })
        .collect()
}

#[derive(Debug, Clone)]
struct Best {
    score: i64,
    masks: Vec<u64>,
    truncated: bool,
}

impl Best {
    fn new() -> Self {
        Self {
            score: -1,
            masks: Vec::new(),
            truncated: false,
        }
    }

    fn offer(&mut self, score: i64, mask: u64, cap: usize) {
        if score > self.score {
            self.score = score;
            self.masks.clear();
            self.truncated = false;
        }
        if score == self.score {
            if self.masks.len() < cap {
                self.masks.push(mask);
            } else {
                self.truncated = true;
            }
        }
    }

    fn merge(mut self, other: Best, cap: usize) -> Best {
        if other.score > self.score {
            return other;
        }
        if other.score == self.score {
            for mk in other.masks {
                if self.masks.len() < cap {
                    self.masks.push(mk);
                } else {
                    self.truncated = true;
                }
            }
            self.truncated |= other.truncated;
        }
        self
    }
}

fn mask_points(mask: u64) -> Vec<usize> {
    (0..64).filter(|&i| (mask >> i) & 1 == 1).collect()
}

fn finish(n: usize, m: usize, best: Best, opts: &SearchOptions) -> Result<ExtremalResult> {
    let len = 1usize << n;
    let mut sets: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut truncated = best.truncated;
    'outer: for &mask in &best.masks {
        let shifts = if opts.prune { len } else { 1 };
        for t in 0..shifts {
            let mut pts: Vec<usize> = mask_points(mask).into_iter().map(|x| x ^ t).collect();
            pts.sort_unstable();
            sets.insert(pts);
            if sets.len() > opts.max_maximizers {
                truncated = true;
                break 'outer;
            }
        }
    }
    let mut maximizers: Vec<Vec<usize>> = sets.into_iter().collect();
    maximizers.truncate(opts.max_maximizers);
    let self_consistent = maximizers
        .iter()
        .map(|pts| BoolFn::from_support(n, pts).map(|f| self_consistency_check(&f)))
        .collect::<Result<Vec<_>>>()?;
    let max_w1 = Rational64::new(best.score, 1i64 << (2 * n));
    Ok(ExtremalResult {
        n,
        m,
        max_w1,
        max_w1_f64: best.score as f64 / (1u64 << (2 * n)) as f64,
        maximizers,
        self_consistent,
        truncated,
    })
}

/// Exact `W^(n)(m / 2^n)` by exhaustive search with the default options.
pub fn exact_max_w1(n: usize, m: usize) -> Result<ExtremalResult> {
    exact_max_w1_with(n, m, &SearchOptions::default())
}

pub fn exact_max_w1_with(n: usize, m: usize, opts: &SearchOptions) -> Result<ExtremalResult> {
    check_search(n, m, opts)?;
    let cap = opts.max_maximizers;
    let parts = enumerate(n, m, opts.prune, Best::new, |acc: &mut Best, mask, sums| {
        acc.offer(sums.iter().map(|s| s * s).sum(), mask, cap)
    });
    let best = parts.into_iter().fold(Best::new(), |a, b| a.merge(b, cap));
    finish(n, m, best, opts)
}

/// Level-1 functional `L(i) = sum_j s_j x_j(i)` (a positive multiple of
/// `sum_j f^_j x_j`) at every point.
fn level1_functional(f: &BoolFn) -> Vec<i64> {
    let sums = f.coordinate_sums();
    (0..f.len())
        .map(|i| {
            sums.iter()
                .enumerate()
                .map(|(j, &s)| if (i >> j) & 1 == 0 { s } else { -s })
                .sum()
        })
        .collect()
}

/// True when the support is sandwiched by its own level-1 functional:
/// `min_{supp} L >= max_{complement} L`. A vanishing functional passes.
pub fn self_consistency_check(f: &BoolFn) -> bool {
    let l = level1_functional(f);
    let inside = (0..f.len()).filter(|&i| f.get(i)).map(|i| l[i]).min();
    let outside = (0..f.len()).filter(|&i| !f.get(i)).map(|i| l[i]).max();
    match (inside, outside) {
        (Some(lo), Some(hi)) => lo >= hi,
        _ => true,
    }
}

/// Whether every maximizer found for `(n, m)` is self-consistent.
pub fn verify_maximizer_structure(n: usize, m: usize) -> Result<bool> {
    Ok(exact_max_w1(n, m)?.all_self_consistent())
}

fn choose_subsets(
    items: &[usize],
    k: usize,
    out: &mut Vec<Vec<usize>>,
    cur: &mut Vec<usize>,
    start: usize,
) {
    if cur.len() == k {
        out.push(cur.clone());
        return;
    }
    for i in start..items.len() {
        if items.len() - i < k - cur.len() {
            break;
        }
        cur.push(items[i]);
        choose_subsets(items, k, out, cur, i + 1);
        cur.pop();
    }
}

/// Converse direction at small `n`: with `b = min_{supp} L` for a maximizer,
/// every set `{L > b} <= l <= {L >= b}` of the same size is again a maximizer.
pub fn sandwich_sweep(n: usize, m: usize) -> Result<bool> {
    if n > 3 {
        return Err(Error::SearchCapExceeded { n, cap: 3 });
    }
    let res = exact_max_w1(n, m)?;
    if m == 0 || m == 1 << n {
        return Ok(true);
    }
    let target = *res.max_w1.numer() * ((1i64 << (2 * n)) / *res.max_w1.denom());
    for pts in &res.maximizers {
        let f = BoolFn::from_support(n, pts)?;
        let l = level1_functional(&f);
        let b = pts.iter().map(|&i| l[i]).min().expect("nonempty support");
        let strict: Vec<usize> = (0..f.len()).filter(|&i| l[i] > b).collect();
        let level: Vec<usize> = (0..f.len()).filter(|&i| l[i] == b).collect();
        let mut fills = Vec::new();
        choose_subsets(&level, m - strict.len(), &mut fills, &mut Vec::new(), 0);
        for fill in fills {
            let mut cand = strict.clone();
            cand.extend(fill);
            let g = BoolFn::from_support(n, &cand)?;
            let score: i64 = g.coordinate_sums().iter().map(|s| s * s).sum();
            if score != target {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `(m, W^(n)(m / 2^n))` for `m = 1, .., 2^{n-1}`.
pub fn monotonicity_table(n: usize) -> Result<Vec<(usize, Rational64)>> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    (1..=(1usize << (n - 1)))
        .map(|m| exact_max_w1(n, m).map(|r| (m, r.max_w1)))
        .collect()
}

pub fn is_strictly_increasing(table: &[(usize, Rational64)]) -> bool {
    table.windows(2).all(|w| w[0].1 < w[1].1)
}

/// Best linear-threshold candidate found by [`ltf_search`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LtfResult {
    #[serde(serialize_with = "display")]
    pub w1: Rational64,
    pub w1_f64: f64,
    pub weights: Vec<u32>,
    pub support: Vec<usize>,
}

fn nondecreasing_vectors(n: usize, cap: u32) -> Vec<Vec<u32>> {
    fn rec(n: usize, cap: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        let lo = cur.last().copied().unwrap_or(0);
        for v in lo..=cap {
            cur.push(v);
            rec(n, cap, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, cap, &mut Vec::new(), &mut out);
    out.retain(|w| w.iter().fold(0u32, |g, &x| g.gcd(&x)) == 1);
    out
}

/// `4^n W1` and support of the threshold set for one weight vector.
fn ltf_score(n: usize, m: usize, w: &[u32]) -> (i64, Vec<usize>) {
    let len = 1usize << n;
    let mut keyed: Vec<(i64, usize)> = (0..len)
        .map(|i| {
            let l: i64 = (0..n)
                .map(|j| {
                    if (i >> j) & 1 == 0 {
                        w[j] as i64
                    } else {
                        -(w[j] as i64)
                    }
                })
                .sum();
            (-l, i)
        })
        .collect();
    keyed.sort_unstable();
    let mut support: Vec<usize> = keyed[..m].iter().map(|&(_, i)| i).collect();
    support.sort_unstable();
    let mut minus = vec![0i64; n];
    for &p in &support {
        for (j, c) in minus.iter_mut().enumerate() {
            *c += ((p >> j) & 1) as i64;
        }
    }
    let score = minus.iter().map(|&c| (m as i64 - 2 * c).pow(2)).sum();
    (score, support)
}

/// Level-1 weight of the size-`m` threshold set for fixed weights, built the
/// same way as in [`ltf_search`].
pub fn ltf_w1(n: usize, m: usize, weights: &[u32]) -> Result<Rational64> {
    if n == 0 || n > 16 {
        return Err(Error::DimensionTooLarge { n, max: 16 });
    }
    if weights.len() != n {
        return Err(Error::Invariant(format!(
            "expected {n} weights, got {}",
            weights.len()
        )));
    }
    if m > 1usize << n {
        return Err(Error::SupportSizeOutOfRange { m, max: 1 << n });
    }
    Ok(Rational64::new(ltf_score(n, m, weights).0, 1i64 << (2 * n)))
}

/// Lower bound on `W^(n)(m / 2^n)` over supports
/// `{sum w_i x_i > b}` plus part of the level set `{sum w_i x_i = b}`, for
/// nondecreasing integer weights `0 <= w_i <= weight_cap` with gcd 1. The
/// level set is completed with its smallest point indices. Ties between
/// weight vectors keep the first in lexicographic order.
pub fn ltf_search(n: usize, m: usize, weight_cap: u32) -> Result<LtfResult> {
    if n == 0 || n > 16 {
        return Err(Error::DimensionTooLarge { n, max: 16 });
    }
    check_domain("weight_cap", weight_cap as f64, weight_cap >= 1, "[1, inf)")?;
    let len = 1usize << n;
    if m > len {
        return Err(Error::SupportSizeOutOfRange { m, max: len });
    }
    let candidates = nondecreasing_vectors(n, weight_cap);
    let scored: Vec<(i64, usize, Vec<usize>)> = candidates
        .par_iter()
        .enumerate()
        .map(|(idx, w)| {
            let (score, support) = ltf_score(n, m, w);
            (score, idx, support)
        })
        .collect();
    let (score, idx, support) = scored
        .into_iter()
        .fold(None::<(i64, usize, Vec<usize>)>, |best, cur| match best {
            Some(b) if b.0 >= cur.0 => Some(b),
            _ => Some(cur),
        })
        .expect("at least one weight vector");
    let denom = 1i64 << (2 * n);
    Ok(LtfResult {
        w1: Rational64::new(score, denom),
        w1_f64: score as f64 / denom as f64,
        weights: candidates[idx].clone(),
        support,
    })
}

/// `beta 2^n` as an integer, if `beta` is a nonnegative multiple of `2^{-n}`.
fn beta_units(n: usize, beta: &BigRational) -> Result<i64> {
    let scaled = beta * BigRational::from_integer((1i64 << n).into());
    if !scaled.is_integer() || scaled < BigRational::zero() {
        return Err(Error::Domain {
            name: "beta",
            value: beta.to_f64().unwrap_or(f64::NAN),
            domain: "nonnegative multiples of 2^-n",
        });
    }
    scaled
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Parse("beta too large".into()))
}

fn beta_buckets(n: usize, m: usize, opts: &SearchOptions) -> Result<BTreeMap<i64, Best>> {
    check_search(n, m, opts)?;
    let cap = opts.max_maximizers;
    let parts = enumerate(
        n,
        m,
        opts.prune,
        BTreeMap::<i64, Best>::new,
        |acc, mask, sums| {
            let top = sums.iter().map(|s| s.abs()).max().unwrap_or(0);
            acc.entry(top).or_insert_with(Best::new).offer(
                sums.iter().map(|s| s * s).sum(),
                mask,
                cap,
            );
        },
    );
    let mut merged: BTreeMap<i64, Best> = BTreeMap::new();
    for part in parts {
        for (k, b) in part {
            let cur = merged.remove(&k).unwrap_or_else(Best::new);
            merged.insert(k, cur.merge(b, cap));
        }
    }
    Ok(merged)
}

/// `W^(n)(a, beta)`: the maximum over supports of size `m` whose largest
/// `|f^_i|` equals `beta` exactly.
pub fn exact_max_w1_given_beta(n: usize, m: usize, beta: &BigRational) -> Result<ExtremalResult> {
    let opts = SearchOptions::default();
    let units = beta_units(n, beta)?;
    let mut buckets = beta_buckets(n, m, &opts)?;
    match buckets.remove(&units) {
        Some(best) => finish(n, m, best, &opts),
        None => Err(Error::Infeasible {
            n,
            m,
            beta: beta.to_string(),
        }),
    }
}

/// Every achievable `beta` for `(n, m)` with its exact restricted maximum.
pub fn beta_profile(n: usize, m: usize) -> Result<Vec<(Rational64, Rational64)>> {
    let buckets = beta_buckets(n, m, &SearchOptions::default())?;
    let (bd, wd) = (1i64 << n, 1i64 << (2 * n));
    Ok(buckets
        .into_iter()
        .map(|(k, b)| (Rational64::new(k, bd), Rational64::new(b.score, wd)))
        .collect())
}

/// One row of the balanced-density comparison against the two `beta` bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FknRow {
    pub n: usize,
    #[serde(serialize_with = "display")]
    pub beta: Rational64,
    #[serde(serialize_with = "display")]
    pub exact: Rational64,
    pub fkn: f64,
    pub khintchine: f64,
    pub ok: bool,
}

fn r64(x: Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

/// Compares `W^(n)(1/2, beta)` with `min(fkn_bound, khintchine_bound)`.
pub fn fkn_cross_check(n: usize, params: &ProfileParams) -> Result<Vec<FknRow>> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    beta_profile(n, 1 << (n - 1))?
        .into_iter()
        .map(|(beta, exact)| {
            let b = r64(beta);
            let fkn = fkn_bound(b, params)?;
            let khintchine = khintchine_bound(b)?;
            Ok(FknRow {
                n,
                beta,
                exact,
                fkn,
                khintchine,
                ok: r64(exact) <= fkn.min(khintchine) + 1e-9,
            })
        })
        .collect()
}

/// `min(chang, lp, chi, chi~)` at `min(a, 1 - a)`; zero at the endpoints.
pub fn min_upper_bound(a: f64, params: &ProfileParams) -> Result<f64> {
    check_domain("a", a, (0.0..=1.0).contains(&a), "[0, 1]")?;
    let t = a.min(1.0 - a);
    if t == 0.0 {
        return Ok(0.0);
    }
    Ok(chang_bound(t)?
        .min(lp_bound(t)?)
        .min(chi(t, params)?)
        .min(chi_tilde(t, params)?.value))
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MCEstimate {
    pub mean: f64,
    pub std_error: f64,
    /// Accepted draws.
    pub samples: u64,
    pub seed: u64,
    pub radius: f64,
}

/// Standard Gaussian measure of the ball of radius `r` around a center at
/// squared distance `lambda` from the origin: the noncentral chi-square CDF
/// at `r^2`, summed as a Poisson mixture of central ones.
pub fn ball_measure(dim: usize, lambda: f64, r: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let half = 0.5 * lambda;
    let x = 0.5 * r * r;
    let k_dim = 0.5 * dim as f64;
    if half == 0.0 {
        return gamma_lr(k_dim, x);
    }
    let mut total = 0.0;
    let mut mass = 0.0;
    let peak = half.floor() as u64;
    for k in 0..(peak + 200 + (20.0 * half.sqrt()) as u64) {
        let kf = k as f64;
        let w = (-half + kf * half.ln() - ln_gamma(kf + 1.0)).exp();
        total += w * gamma_lr(k_dim + kf, x);
        mass += w;
        if k > peak && 1.0 - mass < 1e-17 {
            break;
        }
    }
    total.min(1.0)
}

/// Radius whose centered ball has the requested Gaussian measure.
pub fn radius_for_measure(dim: usize, lambda: f64, measure: f64) -> Result<f64> {
    check_domain("measure", measure, measure > 0.0 && measure < 1.0, "(0, 1)")?;
    let mut hi = 1.0;
    while ball_measure(dim, lambda, hi) < measure {
        hi *= 2.0;
        if hi > 1e4 {
            return Err(Error::NoBracket {
                what: "ball measure - target",
                lo: 0.0,
                hi,
            });
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if ball_measure(dim, lambda, mid) < measure {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

fn chi_square_radial_moment(dim: usize, r: f64, power: i32, nodes: usize) -> f64 {
    // Integrates v^power f(v^2) 2v over [0, r] with f the chi-square density,
    // the substitution u = v^2 removing the singularity at 0 for dim = 1.
    let k = dim as f64;
    let log_norm = -(0.5 * k) * std::f64::consts::LN_2 - ln_gamma(0.5 * k);
    let f = |v: f64| {
        if v == 0.0 {
            return if dim == 1 && power == 0 {
                2.0 * log_norm.exp()
            } else {
                0.0
            };
        }
        2.0 * (log_norm + (k - 1.0 + power as f64) * v.ln() - 0.5 * v * v).exp()
    };
    let n = nodes + nodes % 2;
    let h = r / n as f64;
    let mut s = f(0.0) + f(r);
    for i in 1..n {
        s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
    }
    s * h / 3.0
}

/// `D^2` of the origin-centered ball of the given measure,
/// `2 E[|X|^2 | |X| <= r]`, by Simpson quadrature of the chi-square density.
pub fn origin_ball_d2_quadrature(dim: usize, measure: f64) -> Result<f64> {
    check_domain("dim", dim as f64, dim >= 1, "[1, inf)")?;
    let r = radius_for_measure(dim, 0.0, measure)?;
    let nodes = 100_000;
    let mass = chi_square_radial_moment(dim, r, 0, nodes);
    let second = chi_square_radial_moment(dim, r, 2, nodes);
    Ok(2.0 * second / mass)
}

const MC_CHUNK: u64 = 1 << 16;

fn chunk_rng(seed: u64, chunk: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk);
    rng
}

/// Monte-Carlo `D^2(B) = 2 sum_i Var(X_i | X in B)` for the Euclidean ball
/// `B` around `center` with standard Gaussian measure `target_measure`.
/// `samples` Gaussian draws are made; each fixed-size chunk uses its own
/// ChaCha stream, so the result does not depend on the worker count.
pub fn euclid_mc(
    dim: usize,
    center: &[f64],
    target_measure: f64,
    samples: u64,
    seed: u64,
) -> Result<MCEstimate> {
    check_domain("dim", dim as f64, dim >= 1, "[1, inf)")?;
    if center.len() != dim {
        return Err(Error::Invariant(format!(
            "center has {} coordinates, expected {dim}",
            center.len()
        )));
    }
    check_domain("samples", samples as f64, samples >= 1000, "[1000, inf)")?;
    let lambda: f64 = center.iter().map(|c| c * c).sum();
    let radius = radius_for_measure(dim, lambda, target_measure)?;
    let r2 = radius * radius;
    let chunks = samples.div_ceil(MC_CHUNK);

    let for_each_accepted = |chunk: u64, f: &mut dyn FnMut(&[f64])| {
        let mut rng = chunk_rng(seed, chunk);
        let count = MC_CHUNK.min(samples - chunk * MC_CHUNK);
        let mut x = vec![0.0; dim];
        for _ in 0..count {
            let mut d2 = 0.0;
            for (xi, ci) in x.iter_mut().zip(center) {
                *xi = rng.sample(StandardNormal);
                d2 += (*xi - ci).powi(2);
            }
            if d2 <= r2 {
                f(&x);
            }
        }
    };

    let firsts: Vec<(u64, Vec<f64>)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut n = 0u64;
            let mut sum = vec![0.0; dim];
            for_each_accepted(c, &mut |x| {
                n += 1;
                sum.iter_mut().zip(x).for_each(|(s, v)| *s += v);
            });
            (n, sum)
        })
        .collect();
    let mut accepted = 0u64;
    let mut mean = vec![0.0; dim];
    for (n, s) in &firsts {
        accepted += n;
        mean.iter_mut().zip(s).for_each(|(m, v)| *m += v);
    }
    if accepted < 2 {
        return Err(Error::Invariant("fewer than two accepted samples".into()));
    }
    mean.iter_mut().for_each(|m| *m /= accepted as f64);

    let seconds: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (mut s1, mut s2) = (0.0, 0.0);
            for_each_accepted(c, &mut |x| {
                let q: f64 = x.iter().zip(&mean).map(|(v, m)| (v - m).powi(2)).sum();
                s1 += q;
                s2 += q * q;
            });
            (s1, s2)
        })
        .collect();
    let (s1, s2) = seconds
        .iter()
        .fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let n = accepted as f64;
    let q_mean = s1 / n;
    let q_var = (s2 / n - q_mean * q_mean).max(0.0) * n / (n - 1.0);
    Ok(MCEstimate {
        mean: 2.0 * s1 / (n - 1.0),
        std_error: 2.0 * (q_var / n).sqrt(),
        samples: accepted,
        seed,
        radius,
    })
}

/// `m / 2^n` as an exact rational.
pub fn dyadic(m: usize, n: usize) -> BigRational {
    BigRational::new(m.into(), (num_bigint::BigInt::one()) << n)
}
