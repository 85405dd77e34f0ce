//! Scalar special functions: the Gaussian density, CDF and quantile, the
//! Gaussian isoperimetric profile and its scaled variant, binary entropy and
//! its inverse on `[0, 1/2]`, and the Bernoulli relative entropy.
//!
//! Binary entropy is measured in bits; relative entropy in nats.

use serde::Serialize;
use std::f64::consts::{LN_2, SQRT_2};

use crate::error::{check_domain, Error, Result};

/// `1 / sqrt(2 pi)`.
pub const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Density threshold used by the default profile.
pub const DEFAULT_THRESHOLD: f64 = 0.21;

/// Standard Gaussian density.
pub fn normal_pdf(x: f64) -> f64 {
    FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard Gaussian CDF, accurate in relative terms far into the lower tail
/// (`normal_cdf(-38)` is a positive subnormal).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

// Rational starting approximation for the lower half of the quantile
// (relative error about 1e-9), polished by Newton steps below.
const CENTRAL_NUM: [f64; 6] = [
    -3.969_683_028_665_376e1,
    2.209_460_984_245_205e2,
    -2.759_285_104_469_687e2,
    1.383_577_518_672_69e2,
    -3.066_479_806_614_716e1,
    2.506_628_277_459_239,
];
const CENTRAL_DEN: [f64; 5] = [
    -5.447_609_879_822_406e1,
    1.615_858_368_580_409e2,
    -1.556_989_798_598_866e2,
    6.680_131_188_771_972e1,
    -1.328_068_155_288_572e1,
];
const TAIL_NUM: [f64; 6] = [
    -7.784_894_002_430_293e-3,
    -3.223_964_580_411_365e-1,
    -2.400_758_277_161_838,
    -2.549_732_539_343_734,
    4.374_664_141_464_968,
    2.938_163_982_698_783,
];
const TAIL_DEN: [f64; 4] = [
    7.784_695_709_041_462e-3,
    3.224_671_290_700_398e-1,
    2.445_134_137_142_996,
    3.754_408_661_907_416,
];
const TAIL_SPLIT: f64 = 0.024_25;

fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * x + c)
}

fn quantile_start(p: f64) -> f64 {
    if p < TAIL_SPLIT {
        let q = (-2.0 * p.ln()).sqrt();
        horner(&TAIL_NUM, q) / (horner(&TAIL_DEN, q) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        q * horner(&CENTRAL_NUM, r) / (horner(&CENTRAL_DEN, r) * r + 1.0)
    }
}

/// Quantile for `p <= 1/2`.
fn lower_quantile(p: f64) -> f64 {
    let mut x = quantile_start(p);
    for _ in 0..2 {
        let density = normal_pdf(x);
        if density == 0.0 {
            break;
        }
        x -= (normal_cdf(x) - p) / density;
    }
    x
}

/// Inverse of [`normal_cdf`] on the open interval `(0, 1)`.
///
/// The upper half is reflected through `1 - p`, which is exact for
/// `p >= 1/2`, so both tails keep full relative accuracy.
pub fn normal_quantile(p: f64) -> Result<f64> {
    check_domain("p", p, p > 0.0 && p < 1.0, "(0, 1)")?;
    if p == 0.5 {
        Ok(0.0)
    } else if p < 0.5 {
        Ok(lower_quantile(p))
    } else {
        Ok(-lower_quantile(1.0 - p))
    }
}

/// Gaussian isoperimetric profile `I(a) = phi(Phi^{-1}(a))`, with
/// `I(0) = I(1) = 0`.
pub fn gauss_iso(a: f64) -> Result<f64> {
    check_domain("a", a, (0.0..=1.0).contains(&a), "[0, 1]")?;
    if a == 0.0 || a == 1.0 {
        return Ok(0.0);
    }
    let tail = a.min(1.0 - a);
    Ok(normal_pdf(normal_quantile(tail)?))
}

/// Scaled profile `I_w(a) = w I(a / w)` on `[0, w]`.
pub fn gauss_iso_scaled(a: f64, w: f64) -> Result<f64> {
    check_domain("w", w, w > 0.0 && w.is_finite(), "(0, inf)")?;
    check_domain("a", a, (0.0..=w).contains(&a), "[0, w]")?;
    Ok(w * gauss_iso((a / w).min(1.0))?)
}

/// Derivative `I_w'(a) = -Phi^{-1}(a / w)`; `+inf` at `a = 0`, `-inf` at `a = w`.
pub fn gauss_iso_scaled_slope(a: f64, w: f64) -> Result<f64> {
    check_domain("w", w, w > 0.0 && w.is_finite(), "(0, inf)")?;
    check_domain("a", a, (0.0..=w).contains(&a), "[0, w]")?;
    if a == 0.0 {
        return Ok(f64::INFINITY);
    }
    if a == w {
        return Ok(f64::NEG_INFINITY);
    }
    Ok(-normal_quantile(a / w)?)
}

/// Bracket searched by [`solve_w`].
pub const W_BRACKET: (f64, f64) = (1.0, 2.0);

/// Solves `I_w(threshold) = sqrt(target)` for the scale `w` by bisection on
/// [`W_BRACKET`].
pub fn solve_w_for(threshold: f64, target: f64) -> Result<f64> {
    check_domain(
        "T",
        threshold,
        threshold > 0.0 && threshold <= 0.25,
        "(0, 1/4]",
    )?;
    let rhs = target.sqrt();
    let residual = |w: f64| w * gauss_iso(threshold / w).unwrap_or(f64::NAN) - rhs;
    let (mut lo, mut hi) = W_BRACKET;
    let (r_lo, r_hi) = (residual(lo), residual(hi));
    if r_lo.is_nan() || r_hi.is_nan() || r_lo.signum() == r_hi.signum() {
        return Err(Error::NoBracket {
            what: "I_w(T) - sqrt(target)",
            lo,
            hi,
        });
    }
    let lo_sign = r_lo.signum();
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if residual(mid).signum() == lo_sign {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let w = if residual(lo).abs() <= residual(hi).abs() {
        lo
    } else {
        hi
    };
    let r = residual(w).abs();
    if r > 1e-12 {
        return Err(Error::Invariant(format!(
            "w-solve residual {r:e} exceeds 1e-12"
        )));
    }
    Ok(w)
}

/// The scale `w` with `I_w(T) = sqrt(T / 2)`.
pub fn solve_w(threshold: f64) -> Result<f64> {
    solve_w_for(threshold, threshold / 2.0)
}

/// Known upper bound `phi` on the maximal level-1 weight used above the
/// threshold. Both variants are evaluated at `min(t, 1 - t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Envelope {
    /// `t / 2`.
    Half,
    /// The linear-programming bound: `2 t^2 (1/sqrt(t) - 1)` below `1/4`, `t / 2` above.
    Lp,
}

impl Envelope {
    pub fn eval(self, t: f64) -> f64 {
        let t = t.min(1.0 - t).max(0.0);
        match self {
            Envelope::Half => t / 2.0,
            Envelope::Lp if t <= 0.25 && t > 0.0 => 2.0 * t * t * (1.0 / t.sqrt() - 1.0),
            Envelope::Lp if t == 0.0 => 0.0,
            Envelope::Lp => t / 2.0,
        }
    }
}

/// Threshold `T` and scale `w` defining the piecewise bound: the squared
/// scaled profile on `[0, T]`, the envelope above.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileParams {
    threshold: f64,
    w: f64,
    envelope: Envelope,
}

impl ProfileParams {
    pub fn new(threshold: f64) -> Result<Self> {
        Self::with_envelope(threshold, Envelope::Half)
    }

    pub fn with_envelope(threshold: f64, envelope: Envelope) -> Result<Self> {
        let w = solve_w_for(threshold, envelope.eval(threshold))?;
        Ok(Self {
            threshold,
            w,
            envelope,
        })
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn envelope(&self) -> Envelope {
        self.envelope
    }

    /// `I_w(a)`.
    pub fn iso(&self, a: f64) -> Result<f64> {
        gauss_iso_scaled(a, self.w)
    }

    /// `g(a) = I_w'(a) = -Phi^{-1}(a / w)`.
    pub fn slope(&self, a: f64) -> Result<f64> {
        gauss_iso_scaled_slope(a, self.w)
    }
}

impl Default for ProfileParams {
    fn default() -> Self {
        Self::new(DEFAULT_THRESHOLD).expect("default threshold brackets w")
    }
}

/// Binary entropy in bits, with `H(0) = H(1) = 0`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_domain("p", p, (0.0..=1.0).contains(&p), "[0, 1]")?;
    if p == 0.0 || p == 1.0 {
        return Ok(0.0);
    }
    let q = 1.0 - p;
    Ok(-(p * p.log2() + q * q.log2()))
}

/// The unique `p` in `[0, 1/2]` with `H(p) = y`, by bisection to adjacent
/// floats.
pub fn binary_entropy_inv(y: f64) -> Result<f64> {
    check_domain("y", y, (0.0..=1.0).contains(&y), "[0, 1]")?;
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == 1.0 {
        return Ok(0.5);
    }
    let (mut lo, mut hi) = (0.0_f64, 0.5_f64);
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if binary_entropy(mid)? < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (e_lo, e_hi) = (
        (binary_entropy(lo)? - y).abs(),
        (binary_entropy(hi)? - y).abs(),
    );
    Ok(if e_lo <= e_hi { lo } else { hi })
}

/// Relative entropy `D(Bern(p) || Bern(q))` in nats.
pub fn kl_bernoulli(p: f64, q: f64) -> Result<f64> {
    check_domain("p", p, (0.0..=1.0).contains(&p), "[0, 1]")?;
    check_domain("q", q, (0.0..=1.0).contains(&q), "[0, 1]")?;
    if q == 0.0 || q == 1.0 {
        return if p == q {
            Ok(0.0)
        } else {
            Err(Error::Domain {
                name: "q",
                value: q,
                domain: "(0, 1) unless p = q",
            })
        };
    }
    let term = |x: f64, y: f64| if x == 0.0 { 0.0 } else { x * (x / y).ln() };
    Ok((term(p, q) + term(1.0 - p, 1.0 - q)).max(0.0))
}

/// Smallest relative entropy to the fair coin at total-variation offset `b`:
/// `D((1 - b)/2 || 1/2)`.
pub fn upsilon(b: f64) -> Result<f64> {
    check_domain("b", b, (0.0..=1.0).contains(&b), "[0, 1]")?;
    if b == 1.0 {
        return Ok(LN_2);
    }
    kl_bernoulli((1.0 - b) / 2.0, 0.5)
}
