//! Closed-form and one-dimensionally optimized bounds on the maximal level-1
//! weight `W(a)` over Boolean functions of density `a`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_domain, Error, Result};
use crate::numfmt::fmt_sig17;
use crate::specfun::{binary_entropy_inv, gauss_iso, ProfileParams, FRAC_1_SQRT_2PI};

/// Chang's bound `2 a^2 ln(1/a)`.
pub fn chang_bound(a: f64) -> Result<f64> {
    check_domain("a", a, a > 0.0 && a <= 0.5, "(0, 1/2]")?;
    Ok(2.0 * a * a * (1.0 / a).ln())
}

/// The linear-programming bound: `2 a^2 (1/sqrt(a) - 1)` up to `1/4`, `a/2` above.
pub fn lp_bound(a: f64) -> Result<f64> {
    check_domain("a", a, a > 0.0 && a <= 0.5, "(0, 1/2]")?;
    Ok(crate::specfun::Envelope::Lp.eval(a))
}

/// `chi(a)`: `I_w(a)^2` up to the threshold, the envelope above, extended to
/// `(1/2, 1]` by `chi(a) = chi(1 - a)`.
pub fn chi(a: f64, params: &ProfileParams) -> Result<f64> {
    check_domain("a", a, (0.0..=1.0).contains(&a), "[0, 1]")?;
    let t = a.min(1.0 - a);
    if t <= params.threshold() {
        Ok(params.iso(t)?.powi(2))
    } else {
        Ok(params.envelope().eval(t))
    }
}

/// `sqrt(chi(a))`, which is `I_w(a)` exactly on the lower branch.
pub(crate) fn sqrt_chi(a: f64, params: &ProfileParams) -> Result<f64> {
    let t = a.min(1.0 - a);
    if t <= params.threshold() {
        params.iso(t)
    } else {
        Ok(params.envelope().eval(t).sqrt())
    }
}

/// Khintchine-type bound on `W(1/2, beta)`:
/// `(1/4) (sqrt(4 (1/2 - c) beta + c^2) + c)^2` with `c = 1/sqrt(2 pi)`.
pub fn khintchine_bound(beta: f64) -> Result<f64> {
    check_domain("beta", beta, (0.0..=0.5).contains(&beta), "[0, 1/2]")?;
    let c = FRAC_1_SQRT_2PI;
    let root = (4.0 * (0.5 - c) * beta + c * c).sqrt();
    Ok(0.25 * (root + c).powi(2))
}

/// Value and maximizing `beta` of the refined bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChiTilde {
    pub value: f64,
    pub beta_star: f64,
}

const CHI_TILDE_GRID: usize = 2048;

fn chi_tilde_objective(a: f64, beta: f64, params: &ProfileParams) -> Result<f64> {
    let hi = (a + beta).min(1.0);
    let lo = (a - beta).max(0.0);
    let first = 0.25 * (sqrt_chi(hi, params)? + sqrt_chi(lo, params)?).powi(2) + beta * beta;
    Ok(first.min(khintchine_bound(beta.min(0.5))?))
}

/// Golden-section maximization on `[lo, hi]`, returning `(x, f(x))`.
pub(crate) fn golden_max(
    mut lo: f64,
    mut hi: f64,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > 1e-13 {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

/// `chi~(a) = max_{beta in [0, a]} min(first(beta), khintchine(beta))` with
/// `first(beta) = (1/4)(sqrt chi(a + beta) + sqrt chi(a - beta))^2 + beta^2`.
///
/// A uniform grid locates the best cell, golden-section search refines it.
/// Ties go to the smaller `beta`.
pub fn chi_tilde(a: f64, params: &ProfileParams) -> Result<ChiTilde> {
    check_domain("a", a, (0.0..=0.5).contains(&a), "[0, 1/2]")?;
    if a == 0.0 {
        return Ok(ChiTilde {
            value: 0.0,
            beta_star: 0.0,
        });
    }
    let step = a / CHI_TILDE_GRID as f64;
    let mut best = (0usize, f64::NEG_INFINITY);
    for i in 0..=CHI_TILDE_GRID {
        let v = chi_tilde_objective(a, i as f64 * step, params)?;
        if v > best.1 {
            best = (i, v);
        }
    }
    let (i, grid_value) = best;
    let lo = i.saturating_sub(1) as f64 * step;
    let hi = ((i + 1).min(CHI_TILDE_GRID) as f64 * step).min(a);
    let (beta, value) = golden_max(lo, hi, |b| chi_tilde_objective(a, b, params))?;
    Ok(if value > grid_value {
        ChiTilde {
            value,
            beta_star: beta,
        }
    } else {
        ChiTilde {
            value: grid_value,
            beta_star: if i == CHI_TILDE_GRID {
                a
            } else {
                i as f64 * step
            },
        }
    })
}

/// `n a^2 (1 - 2 H^{-1}(1 - log2(1/a) / n))^2`.
pub fn strong_bound(n: u64, a: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Domain {
            name: "n",
            value: 0.0,
            domain: "n >= 1",
        });
    }
    let nf = n as f64;
    check_domain("a", a, a > 0.0 && a <= 0.5, "(0, 1/2]")?;
    let rate = (1.0 / a).log2() / nf;
    check_domain("log2(1/a)/n", rate, rate <= 1.0, "[0, 1]")?;
    let p = binary_entropy_inv(1.0 - rate)?;
    Ok(nf * a * a * (1.0 - 2.0 * p).powi(2))
}

/// `beta^2 + chi(1/2 - beta)`.
pub fn fkn_bound(beta: f64, params: &ProfileParams) -> Result<f64> {
    check_domain("beta", beta, (0.0..=0.5).contains(&beta), "[0, 1/2]")?;
    Ok(beta * beta + chi(0.5 - beta, params)?)
}

/// `W_1` of a codimension-`k` subcube, `k 4^{-k}`.
pub fn subcube_w1(k: u32) -> f64 {
    k as f64 * 0.25f64.powi(k as i32)
}

/// Limit `J(a) = I(a)^2` of the level-1 weight of Hamming balls.
pub fn ball_w1_limit(a: f64) -> Result<f64> {
    Ok(gauss_iso(a)?.powi(2))
}

/// Exact `W_1` of the Hamming ball `{sum x_i >= k - 2r}` in dimension `k`:
/// `k (C(k-1, r) / 2^k)^2`.
pub fn ball_w1_exact(k: u32, r: u32) -> Result<BigRational> {
    if r >= k {
        return Err(Error::Domain {
            name: "r",
            value: r as f64,
            domain: "0 <= r < k",
        });
    }
    let coeff = BigRational::new(
        binomial(BigInt::from(k - 1), BigInt::from(r)),
        BigInt::from(1) << k,
    );
    Ok(&coeff * &coeff * BigInt::from(k))
}

/// Natural logs of Chang's bound, `J` and `chi` at `a = e^{-t}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LogAsymptotics {
    pub t: f64,
    pub ln_chang: f64,
    pub ln_j: f64,
    pub ln_chi: f64,
}

impl LogAsymptotics {
    /// Two-term expansion `-2t + ln 2t - ln(2 pi) / (2t)` for `ln J`.
    pub fn expansion_j(&self) -> f64 {
        let t = self.t;
        -2.0 * t + (2.0 * t).ln() - (2.0 * std::f64::consts::PI).ln() / (2.0 * t)
    }

    /// The same expansion with `2 pi` replaced by `2 pi / w^2`, for `ln chi`.
    pub fn expansion_chi(&self, w: f64) -> f64 {
        let t = self.t;
        -2.0 * t + (2.0 * t).ln() - (2.0 * std::f64::consts::PI / (w * w)).ln() / (2.0 * t)
    }
}

pub fn log_asymptotics(t: f64, params: &ProfileParams) -> Result<LogAsymptotics> {
    let a = (-t).exp();
    check_domain(
        "exp(-t)",
        a,
        t.is_finite() && a > 0.0 && a < params.threshold(),
        "(0, T)",
    )?;
    Ok(LogAsymptotics {
        t,
        ln_chang: -2.0 * t + (2.0 * t).ln(),
        ln_j: 2.0 * gauss_iso(a)?.ln(),
        ln_chi: 2.0 * params.iso(a)?.ln(),
    })
}

/// If `a = 2^{-k}` exactly, returns `k`.
pub fn dyadic_codim(a: f64) -> Option<u32> {
    if a <= 0.0 || a > 1.0 {
        return None;
    }
    let k = -a.log2().round();
    (a == 0.5f64.powi(k as i32)).then_some(k as u32)
}

/// Options for [`bound_table`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TableOptions {
    /// Dimension for the strong-bound column; omitted when `None`.
    pub strong_n: Option<u64>,
}

/// One grid row. Optional columns are blank where undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundRow {
    pub a: f64,
    pub chang: f64,
    pub lp: f64,
    pub chi: f64,
    pub chi_tilde: f64,
    pub beta_star: f64,
    pub ball_j: f64,
    pub strong: Option<f64>,
    pub subcube: Option<f64>,
}

/// Bounds tabulated on a grid of densities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport {
    pub strong_n: Option<u64>,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn grid(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.a).collect()
    }

    /// Header `a,chang,lp,chi,chi_tilde,ball_J,strong_n{N},subcube`, the
    /// strong column only when requested.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("a,chang,lp,chi,chi_tilde,ball_J");
        if let Some(n) = self.strong_n {
            out.push_str(&format!(",strong_n{n}"));
        }
        out.push_str(",subcube\n");
        let opt = |v: Option<f64>| v.map(fmt_sig17).unwrap_or_default();
        for r in &self.rows {
            let mut cells = vec![
                fmt_sig17(r.a),
                fmt_sig17(r.chang),
                fmt_sig17(r.lp),
                fmt_sig17(r.chi),
                fmt_sig17(r.chi_tilde),
                fmt_sig17(r.ball_j),
            ];
            if self.strong_n.is_some() {
                cells.push(opt(r.strong));
            }
            cells.push(opt(r.subcube));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn bound_row(a: f64, params: &ProfileParams, options: TableOptions) -> Result<BoundRow> {
    let ct = chi_tilde(a, params)?;
    let row = BoundRow {
        a,
        chang: chang_bound(a)?,
        lp: lp_bound(a)?,
        chi: chi(a, params)?,
        chi_tilde: ct.value,
        beta_star: ct.beta_star,
        ball_j: ball_w1_limit(a)?,
        strong: options.strong_n.and_then(|n| strong_bound(n, a).ok()),
        subcube: dyadic_codim(a).map(subcube_w1),
    };
    let witness = row.ball_j.max(row.subcube.unwrap_or(0.0));
    if witness > row.chi.min(row.chi_tilde) + 1e-9 {
        return Err(Error::Invariant(format!(
            "lower bound {witness} exceeds min(chi, chi~) at a = {a}"
        )));
    }
    Ok(row)
}

/// Evaluates every bound on `grid` (in parallel, output in grid order) and
/// verifies that the Hamming-ball and subcube witnesses stay below
/// `min(chi, chi~)`.
pub fn bound_table(
    grid: &[f64],
    params: &ProfileParams,
    options: TableOptions,
) -> Result<BoundReport> {
    let rows = grid
        .par_iter()
        .map(|&a| bound_row(a, params, options))
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundReport {
        strong_n: options.strong_n,
        rows,
    })
}

/// `k step` for `k = 1, 2, ...` up to and including `1/2`.
pub fn uniform_grid(step: f64) -> Result<Vec<f64>> {
    check_domain("step", step, step > 0.0 && step <= 0.5, "(0, 1/2]")?;
    let count = (0.5 / step + 1e-9).floor() as usize;
    Ok((1..=count).map(|k| (k as f64 * step).min(0.5)).collect())
}
