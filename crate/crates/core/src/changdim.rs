//! Large Fourier coefficients and the GF(2) dimension they span: spectrum
//! extraction, elimination, the classical and level-1-weight dimension
//! bounds, and the exact soft Hamming-ball bound on `epsilon`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::boolfn::{fwht_in_place, BoolFn};
use crate::bounds::{chi, chi_tilde};
use crate::error::{check_domain, Error, Result};
use crate::specfun::ProfileParams;

/// Nonzero frequencies with `|f^(y)| > epsilon E f`, and their span.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpecSet {
    pub n: usize,
    pub epsilon: f64,
    pub members: Vec<usize>,
    pub dimension: usize,
    pub basis: Vec<usize>,
}

/// Large-spectrum set of `f`. The zero frequency carries the mean itself and
/// is left out; it never changes the span.
pub fn spec_set(f: &BoolFn, epsilon: f64) -> Result<SpecSet> {
    check_domain(
        "epsilon",
        epsilon,
        epsilon > 0.0 && epsilon <= 1.0,
        "(0, 1]",
    )?;
    let m = f.count();
    if m == 0 {
        return Err(Error::EmptySupport);
    }
    // Compare integer Walsh sums: |2^n f^(y)| > epsilon |A|.
    let mut sums: Vec<i64> = (0..f.len()).map(|i| f.get(i) as i64).collect();
    fwht_in_place(&mut sums);
    let threshold = epsilon * m as f64;
    let members: Vec<usize> = (1..f.len())
        .filter(|&y| sums[y].abs() as f64 > threshold)
        .collect();
    let (dimension, basis) = gf2_rank(&members, f.n());
    Ok(SpecSet {
        n: f.n(),
        epsilon,
        members,
        dimension,
        basis,
    })
}

/// GF(2) rank of a set of masks together with a maximal independent subset
/// (taken from the input, in input order).
pub fn gf2_rank(vectors: &[usize], n: usize) -> (usize, Vec<usize>) {
    let mut pivots: Vec<usize> = vec![0; n.max(usize::BITS as usize)];
    let mut basis = Vec::new();
    for &v in vectors {
        let mut x = v;
        while x != 0 {
            let top = usize::BITS as usize - 1 - x.leading_zeros() as usize;
            if pivots[top] == 0 {
                pivots[top] = x;
                basis.push(v);
                break;
            }
            x ^= pivots[top];
        }
    }
    (basis.len(), basis)
}

/// Mask rendered as a binary string, most significant character = coordinate n.
pub fn mask_string(mask: usize, n: usize) -> String {
    (0..n)
        .rev()
        .map(|j| if (mask >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// `2 epsilon^{-2} ln(1/a)`.
pub fn chang_dim_bound(a: f64, epsilon: f64) -> Result<f64> {
    check_domain("a", a, a > 0.0 && a < 1.0, "(0, 1)")?;
    check_domain(
        "epsilon",
        epsilon,
        epsilon > 0.0 && epsilon <= 1.0,
        "(0, 1]",
    )?;
    Ok(2.0 * (1.0 / a).ln() / (epsilon * epsilon))
}

/// `min(chi(a), chi~(a)) / (a^2 epsilon^2)`, with both bounds read at
/// `min(a, 1 - a)`.
pub fn lemma6_bound(a: f64, epsilon: f64, params: &ProfileParams) -> Result<f64> {
    check_domain("a", a, a > 0.0 && a < 1.0, "(0, 1)")?;
    check_domain(
        "epsilon",
        epsilon,
        epsilon > 0.0 && epsilon <= 1.0,
        "(0, 1]",
    )?;
    let t = a.min(1.0 - a);
    let w = chi(t, params)?.min(chi_tilde(t, params)?.value);
    Ok(w / (a * a * epsilon * epsilon))
}

/// `h(x) = 1{sum x_i > b} + lambda 1{sum x_i = b}` on `{-1,+1}^k` with mean `a`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoftBall {
    pub k: u32,
    pub b: i64,
    pub lambda: BigRational,
    pub a: BigRational,
}

impl SoftBall {
    /// Exact `E h`.
    pub fn mean(&self) -> BigRational {
        let scale = BigRational::new(BigInt::one(), BigInt::one() << self.k);
        let mut total = BigRational::zero();
        for j in 0..=self.k {
            let s = self.k as i64 - 2 * j as i64;
            let c = BigRational::from_integer(binomial(BigInt::from(self.k), BigInt::from(j)));
            if s > self.b {
                total += c;
            } else if s == self.b {
                total += c * &self.lambda;
            }
        }
        total * scale
    }
}

fn level_prob(k: u32, j: u32) -> BigRational {
    BigRational::new(
        binomial(BigInt::from(k), BigInt::from(j)),
        BigInt::one() << k,
    )
}

/// The unique soft ball with `k` coordinates and mean `a`.
pub fn soft_ball(k: u32, a: &BigRational) -> Result<SoftBall> {
    check_domain("k", k as f64, (1..=64).contains(&k), "[1, 64]")?;
    if !a.is_positive() || *a > BigRational::one() {
        return Err(Error::Domain {
            name: "a",
            value: a.to_f64().unwrap_or(f64::NAN),
            domain: "(0, 1]",
        });
    }
    let mut above = BigRational::zero();
    for j in 0..=k {
        let p = level_prob(k, j);
        let through = &above + &p;
        if *a <= through {
            let lambda = (a - &above) / p;
            return Ok(SoftBall {
                k,
                b: k as i64 - 2 * j as i64,
                lambda,
                a: a.clone(),
            });
        }
        above = through;
    }
    unreachable!("levels exhaust total mass 1")
}

/// The common coordinate coefficient
/// `h^_1 = (1/k) 2^{-k} [sum_{s > b} s C(k, (k-s)/2) + lambda b C(k, (k-b)/2)]`.
pub fn soft_ball_coeff(sb: &SoftBall) -> BigRational {
    let k = sb.k;
    let mut total = BigRational::zero();
    for j in 0..=k {
        let s = k as i64 - 2 * j as i64;
        let weighted =
            BigRational::from_integer(BigInt::from(s) * binomial(BigInt::from(k), BigInt::from(j)));
        if s > sb.b {
            total += weighted;
        } else if s == sb.b {
            total += weighted * &sb.lambda;
        }
    }
    total / BigRational::from_integer(BigInt::from(k) << k)
}

/// Largest `epsilon` compatible with `k` independent large coefficients at
/// mean `a`: `h^_1 / a` for the soft ball.
pub fn sharp_eps(k: u32, a: &BigRational) -> Result<BigRational> {
    let sb = soft_ball(k, a)?;
    Ok(soft_ball_coeff(&sb) / a)
}

/// `C(k, <= r) = sum_{j = 0}^{r} C(k, j)`.
pub fn binomial_prefix(k: u32, r: u32) -> BigInt {
    (0..=r.min(k))
        .map(|j| binomial(BigInt::from(k), BigInt::from(j)))
        .sum()
}

/// `C(k - 1, r) / C(k, <= r)`, the value of [`sharp_eps`] at the Hamming-ball
/// density `2^{-k} C(k, <= r)`.
pub fn ball_eps(k: u32, r: u32) -> Result<BigRational> {
    if r >= k {
        return Err(Error::Domain {
            name: "r",
            value: r as f64,
            domain: "0 <= r < k",
        });
    }
    Ok(BigRational::new(
        binomial(BigInt::from(k - 1), BigInt::from(r)),
        binomial_prefix(k, r),
    ))
}

/// `2^{-k} C(k, <= r)`.
pub fn ball_density(k: u32, r: u32) -> BigRational {
    BigRational::new(binomial_prefix(k, r), BigInt::one() << k)
}

/// Tally of a dimension sweep.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DimCheckReport {
    pub functions: usize,
    pub pairs: usize,
    pub chang_violations: usize,
    pub lemma6_violations: usize,
    pub sharp_violations: usize,
    pub max_dimension: usize,
}

impl DimCheckReport {
    pub fn pass(&self) -> bool {
        self.chang_violations == 0 && self.lemma6_violations == 0 && self.sharp_violations == 0
    }

    fn merge(mut self, o: DimCheckReport) -> Self {
        self.functions += o.functions;
        self.pairs += o.pairs;
        self.chang_violations += o.chang_violations;
        self.lemma6_violations += o.lemma6_violations;
        self.sharp_violations += o.sharp_violations;
        self.max_dimension = self.max_dimension.max(o.max_dimension);
        self
    }
}

/// Checks one function against all three dimension bounds for every epsilon.
fn check_one(f: &BoolFn, eps_grid: &[f64], params: &ProfileParams) -> Result<DimCheckReport> {
    let mut rep = DimCheckReport {
        functions: 1,
        ..Default::default()
    };
    let m = f.count();
    if m == 0 {
        return Ok(rep);
    }
    let n = f.n();
    let a = m as f64 / f.len() as f64;
    let a_exact = BigRational::new(m.into(), BigInt::one() << n);
    for &eps in eps_grid {
        let s = spec_set(f, eps)?;
        rep.pairs += 1;
        rep.max_dimension = rep.max_dimension.max(s.dimension);
        let d = s.dimension as f64;
        if m < f.len() {
            if d > chang_dim_bound(a, eps)? {
                rep.chang_violations += 1;
            }
            if d > lemma6_bound(a, eps, params)? {
                rep.lemma6_violations += 1;
            }
        } else if s.dimension > 0 {
            rep.chang_violations += 1;
        }
        if s.dimension >= 1 {
            let cap = sharp_eps(s.dimension as u32, &a_exact)?;
            if eps > cap.to_f64().unwrap_or(f64::INFINITY) {
                rep.sharp_violations += 1;
            }
        }
    }
    Ok(rep)
}

/// Every function on `n <= 3` coordinates against the natural-log dimension
/// bound, the level-1-weight bound, and the sharp soft-ball bound on epsilon.
pub fn exhaustive_dim_check(
    n: usize,
    eps_grid: &[f64],
    params: &ProfileParams,
) -> Result<DimCheckReport> {
    if n > 3 {
        return Err(Error::SearchCapExceeded { n, cap: 3 });
    }
    let len = 1usize << n;
    let reports = (0u64..(1u64 << len))
        .into_par_iter()
        .map(|bits| {
            let f = BoolFn::from_fn(n, |i| (bits >> i) & 1 == 1)?;
            check_one(&f, eps_grid, params)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .fold(DimCheckReport::default(), DimCheckReport::merge))
}

/// The same checks on `samples` uniformly random functions (each table bit
/// a fair coin), reproducible for a fixed seed.
pub fn sampled_dim_check(
    n: usize,
    eps_grid: &[f64],
    samples: usize,
    seed: u64,
    params: &ProfileParams,
) -> Result<DimCheckReport> {
    if n > 8 {
        return Err(Error::DimensionTooLarge { n, max: 8 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fns = Vec::with_capacity(samples);
    for _ in 0..samples {
        let mut f = BoolFn::zero(n)?;
        for i in 0..f.len() {
            f.set(i, rng.random::<bool>());
        }
        fns.push(f);
    }
    let reports = fns
        .par_iter()
        .map(|f| check_one(f, eps_grid, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .fold(DimCheckReport::default(), DimCheckReport::merge))
}

/// `0.1, 0.2, .., 0.9`.
pub fn default_eps_grid() -> Vec<f64> {
    (1..=9).map(|k| k as f64 / 10.0).collect()
}
