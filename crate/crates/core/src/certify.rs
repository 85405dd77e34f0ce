//! Grid certificate for the two-point induction inequality `Gamma <= 0`,
//! its closed-form derivatives, the endpoint sweeps that control the region
//! above the threshold, and the numeric constants used along the way.

use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{chi, sqrt_chi};
use crate::error::{check_domain, Error, Result};
use crate::specfun::{Envelope, ProfileParams};

/// Upper edge of the certified square.
pub const REGION_EDGE: f64 = 0.4;

/// Tolerance used for every "<= 0" claim.
pub const ZERO_TOL: f64 = 1e-9;

fn check_unit(name: &'static str, x: f64) -> Result<()> {
    check_domain(name, x, (0.0..=1.0).contains(&x), "[0, 1]")
}

/// `(1/4)(sqrt chi(a0) + sqrt chi(a1))^2 + (1/4)(a1 - a0)^2`.
fn gamma_first(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    let s = sqrt_chi(a0, params)? + sqrt_chi(a1, params)?;
    Ok(0.25 * s * s + 0.25 * (a1 - a0).powi(2))
}

/// `Gamma(a0, a1) = min(first, phi(m)) - chi(m)` with `m` the midpoint and
/// `phi` the profile's envelope.
pub fn gamma(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    check_unit("a0", a0)?;
    check_unit("a1", a1)?;
    let m = 0.5 * (a0 + a1);
    let cap = params.envelope().eval(m);
    Ok(gamma_first(a0, a1, params)?.min(cap) - chi(m, params)?)
}

fn require_half(params: &ProfileParams) -> Result<()> {
    if params.envelope() == Envelope::Half {
        Ok(())
    } else {
        Err(Error::Invariant(
            "closed-form derivatives assume the t/2 envelope".to_string(),
        ))
    }
}

fn check_lower_mid(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    require_half(params)?;
    check_unit("a0", a0)?;
    check_domain("a1", a1, a1 > 0.0 && a1 <= 0.5, "(0, 1/2]")?;
    let m = 0.5 * (a0 + a1);
    check_domain("(a0+a1)/2", m, m <= mid_limit(params), "[0, T]")?;
    Ok(m.min(params.threshold()))
}

/// Derivative of `sqrt chi` at `a in (0, 1/2]`: `g(a)` below the threshold,
/// `1 / (2 sqrt(2a))` above.
fn sqrt_chi_slope(a: f64, params: &ProfileParams) -> Result<f64> {
    if a <= params.threshold() {
        params.slope(a)
    } else {
        Ok(1.0 / (2.0 * (2.0 * a).sqrt()))
    }
}

/// `Gamma_2' = d Gamma / d a1` on the branch where the first term of the
/// minimum is active:
/// `(1/2)(sqrt chi(a0) + sqrt chi(a1)) (sqrt chi)'(a1) + (1/2)(a1 - a0) - I_w(m) g(m)`.
pub fn gamma2_prime(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    let m = check_lower_mid(a0, a1, params)?;
    let s = sqrt_chi(a0, params)? + sqrt_chi(a1, params)?;
    Ok(0.5 * s * sqrt_chi_slope(a1, params)? + 0.5 * (a1 - a0) - mid_term(m, params)?)
}

/// `I_w(m) g(m)`, which tends to 0 as `m -> 0`.
fn mid_term(m: f64, params: &ProfileParams) -> Result<f64> {
    if m == 0.0 {
        return Ok(0.0);
    }
    Ok(params.iso(m)? * params.slope(m)?)
}

/// The `a1 > T` closed form of `Gamma_2'` evaluated at an arbitrary `a1`,
/// which gives the one-sided limit at `a1 = T` by substitution.
fn gamma2_prime_upper_form(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    let m = 0.5 * (a0 + a1);
    let s = params.iso(a0)? + (a1 / 2.0).sqrt();
    Ok(0.5 * s / (2.0 * (2.0 * a1).sqrt()) + 0.5 * (a1 - a0) - mid_term(m, params)?)
}

/// `Gamma_{1,2}'' = (1/2) g(a0) g(a1) - (1/2) g(m)^2` for `a0, a1 in (0, T]`.
pub fn gamma12_second(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    require_half(params)?;
    let t = params.threshold();
    check_domain("a0", a0, a0 > 0.0 && a0 <= t, "(0, T]")?;
    check_domain("a1", a1, a1 > 0.0 && a1 <= t, "(0, T]")?;
    let g = |a| params.slope(a);
    Ok(0.5 * g(a0)? * g(a1)? - 0.5 * g(0.5 * (a0 + a1))?.powi(2))
}

/// `Gamma_{2,2}'' = 1 - I_w(a0) / (8 sqrt(2 a1^3)) - (1/2) g(m)^2` for `a1 > T`.
pub fn gamma22_second(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    check_upper(a0, a1, params)?;
    let m = 0.5 * (a0 + a1);
    Ok(1.0 - params.iso(a0)? / (8.0 * (2.0 * a1.powi(3)).sqrt()) - 0.5 * params.slope(m)?.powi(2))
}

/// `Gamma_{2,2,2}''' = 3 I_w(a0) / (16 sqrt(2 a1^5)) + g(m) / (2 I_w(m))` for `a1 > T`.
pub fn gamma222_third(a0: f64, a1: f64, params: &ProfileParams) -> Result<f64> {
    check_upper(a0, a1, params)?;
    let m = 0.5 * (a0 + a1);
    Ok(3.0 * params.iso(a0)? / (16.0 * (2.0 * a1.powi(5)).sqrt())
        + params.slope(m)? / (2.0 * params.iso(m)?))
}

fn check_upper(a0: f64, a1: f64, params: &ProfileParams) -> Result<()> {
    require_half(params)?;
    let t = params.threshold();
    check_domain("a0", a0, (0.0..=t).contains(&a0), "[0, T]")?;
    check_domain("a1", a1, a1 > 0.0 && a1 <= 0.5, "(0, 1/2]")?;
    let m = 0.5 * (a0 + a1);
    check_domain("(a0+a1)/2", m, m > 0.0 && m <= mid_limit(params), "(0, T]")
}

/// `T` plus rounding slack, so that `a1 = 2T - a0` is accepted.
fn mid_limit(params: &ProfileParams) -> f64 {
    params.threshold() * (1.0 + 1e-12)
}

/// A named numeric check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantCheck {
    pub name: String,
    pub value: f64,
    #[serde(flatten)]
    pub target: Target,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Target {
    /// `|value - expected| <= tol`.
    Near { expected: f64, tol: f64 },
    /// `value <= bound`.
    AtMost { bound: f64 },
    /// `value >= bound`.
    AtLeast { bound: f64 },
    /// Reported only.
    Info,
}

impl ConstantCheck {
    fn new(name: &str, value: f64, target: Target) -> Self {
        let pass = match target {
            Target::Near { expected, tol } => (value - expected).abs() <= tol,
            Target::AtMost { bound } => value <= bound,
            Target::AtLeast { bound } => value >= bound,
            Target::Info => true,
        };
        Self {
            name: name.to_string(),
            value,
            target,
            pass,
        }
    }
}

/// Maximum of `f` over `[lo, hi]` sampled at `points` evenly spaced nodes,
/// with its argument.
fn sweep_max(
    lo: f64,
    hi: f64,
    points: usize,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<(f64, f64)> {
    let mut best = (lo, f64::NEG_INFINITY);
    for k in 0..=points {
        let x = if k == points {
            hi
        } else {
            lo + (hi - lo) * k as f64 / points as f64
        };
        let v = f(x)?;
        if v > best.1 {
            best = (x, v);
        }
    }
    Ok(best)
}

const SWEEP_POINTS: usize = 20_000;

/// Maxima of the three endpoint expressions that reduce the `a1 > T` part
/// of the region to one-dimensional sweeps:
/// the `a1 -> T+` limit of `Gamma_2'` over `a0 in [0, T]`,
/// `Gamma_2'(a0, 2T - a0)` over `a0 in [0.02, T]`, and
/// `Gamma_2'(a0, 0.4)` over `a0 in [0, 0.02]`.
pub fn lemma5_checks(params: &ProfileParams) -> Result<Vec<ConstantCheck>> {
    require_half(params)?;
    let t = params.threshold();
    let limit = sweep_max(0.0, t, SWEEP_POINTS, |a0| {
        gamma2_prime_upper_form(a0, t, params)
    })?;
    let anti = sweep_max(0.02, t, SWEEP_POINTS, |a0| {
        gamma2_prime_upper_form(a0, 2.0 * t - a0, params)
    })?;
    let edge = sweep_max(0.0, 0.02, SWEEP_POINTS, |a0| {
        gamma2_prime_upper_form(a0, REGION_EDGE, params)
    })?;
    let bound = Target::AtMost { bound: ZERO_TOL };
    Ok(vec![
        ConstantCheck::new("limit_at_threshold_max", limit.1, bound),
        ConstantCheck::new("antidiagonal_max", anti.1, bound),
        ConstantCheck::new("edge_0.4_max", edge.1, bound),
    ])
}

/// `g(a0) - 4 sqrt(2 (2T - a0))`, bounded above via convexity by its
/// values at `0.02` and `T`.
fn slope_gap(a0: f64, params: &ProfileParams) -> Result<f64> {
    let t = params.threshold();
    Ok(params.slope(a0)? - 4.0 * (2.0 * (2.0 * t - a0)).sqrt())
}

/// `eta(a0) = 2 g(a0)(2T - a0) + I_w(a0) - 8 sqrt(2) (2T - a0)^{3/2}`.
fn eta(a0: f64, params: &ProfileParams) -> Result<f64> {
    let u = 2.0 * params.threshold() - a0;
    Ok(
        2.0 * params.slope(a0)? * u + params.iso(a0)?
            - 8.0 * std::f64::consts::SQRT_2 * u.powf(1.5),
    )
}

/// Derivative in `a0` of `Gamma_2'(a0, 0.4)`:
/// `g(a0) / (4 sqrt 0.8) - (1/2) g((a0 + 0.4)/2)^2`.
fn edge_slope(a0: f64, params: &ProfileParams) -> Result<f64> {
    Ok(params.slope(a0)? / (4.0 * 0.8f64.sqrt())
        - 0.5 * params.slope(0.5 * (a0 + REGION_EDGE))?.powi(2))
}

/// Recomputes the numeric constants of the endpoint analysis from their
/// defining expressions. Every profile here is the scaled `I_w`.
pub fn appendix_constants(params: &ProfileParams) -> Result<Vec<ConstantCheck>> {
    require_half(params)?;
    let t = params.threshold();
    let g_t = params.slope(t)?;
    let iso_t = params.iso(t)?;

    let gamma22_floor = 1.0 - iso_t / (8.0 * (2.0 * t.powi(3)).sqrt()) - 0.5 * g_t * g_t;
    let gap = slope_gap(0.02, params)?.max(slope_gap(t, params)?);
    let eta_chain = 2.0 * t * gap + iso_t;
    let eta_sweep = sweep_max(0.02, t, SWEEP_POINTS, |a0| eta(a0, params))?.1;
    let h_002 = gamma2_prime_upper_form(0.02, 2.0 * t - 0.02, params)?;
    let h_edge_0 = gamma2_prime_upper_form(0.0, REGION_EDGE, params)?;
    let h_edge_002 = gamma2_prime_upper_form(0.02, REGION_EDGE, params)?;
    // Lower bound for the edge slope on [0, 0.02]: each term at its worst end.
    let h_prime = params.slope(0.02)? / (4.0 * 0.8f64.sqrt())
        - 0.5 * params.slope(0.5 * REGION_EDGE)?.powi(2);
    let h_prime_min = {
        let f = |a0: f64| edge_slope(a0, params).map(|v| -v);
        -sweep_max(1e-9, 0.02, SWEEP_POINTS, f)?.1
    };
    let gamma22_anti_min = {
        let f = |a0: f64| gamma22_second(a0, 2.0 * t - a0, params).map(|v| -v);
        -sweep_max(0.0, t, SWEEP_POINTS, f)?.1
    };

    Ok(vec![
        ConstantCheck::new(
            "g_T",
            g_t,
            Target::Near {
                expected: 1.02231,
                tol: 1e-4,
            },
        ),
        ConstantCheck::new(
            "gamma22_floor",
            gamma22_floor,
            Target::Near {
                expected: 0.179822,
                tol: 1e-5,
            },
        ),
        ConstantCheck::new(
            "gamma22_antidiagonal_min",
            gamma22_anti_min,
            Target::AtLeast { bound: 0.0 },
        ),
        ConstantCheck::new(
            "slope_gap_max",
            gap,
            Target::Near {
                expected: -1.39698,
                tol: 1e-4,
            },
        ),
        ConstantCheck::new(
            "eta_chain_bound",
            eta_chain,
            Target::Near {
                expected: -0.262693,
                tol: 1e-5,
            },
        ),
        ConstantCheck::new("eta_sweep_max", eta_sweep, Target::AtMost { bound: -0.26 }),
        ConstantCheck::new(
            "h_0.02",
            h_002,
            Target::Near {
                expected: -0.00549341,
                tol: 1e-6,
            },
        ),
        ConstantCheck::new("edge_h_0", h_edge_0, Target::Info),
        ConstantCheck::new("edge_h_0.02", h_edge_002, Target::Info),
        ConstantCheck::new(
            "edge_h_prime_0.02",
            h_prime,
            Target::Near {
                expected: 0.0544183,
                tol: 1e-5,
            },
        ),
        ConstantCheck::new(
            "edge_h_prime_min",
            h_prime_min,
            Target::AtLeast { bound: 0.0544 },
        ),
        ConstantCheck::new(
            "half_inv_sqrt_2T",
            1.0 / (2.0 * (2.0 * t).sqrt()),
            Target::Near {
                expected: 0.771517,
                tol: 1e-5,
            },
        ),
    ])
}

/// Outcome of the region verification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertReport {
    pub region: String,
    pub grid_step: f64,
    pub max_gamma: f64,
    pub argmax: (f64, f64),
    pub diagonal_max: f64,
    pub lemma5: Vec<ConstantCheck>,
    pub appendix_constants: Vec<ConstantCheck>,
    pub pass: bool,
    #[serde(skip)]
    pub off_diagonal_max: f64,
    #[serde(skip)]
    pub points: usize,
}

impl CertReport {
    /// Failed checks by name.
    pub fn failures(&self) -> Vec<&str> {
        let mut out = Vec::new();
        if self.max_gamma > ZERO_TOL {
            out.push("max_gamma");
        }
        out.extend(
            self.lemma5
                .iter()
                .chain(&self.appendix_constants)
                .filter(|c| !c.pass)
                .map(|c| c.name.as_str()),
        );
        out
    }

    /// `key: value` lines.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!("region: {}\n", self.region));
        s.push_str(&format!("grid_step: {}\n", self.grid_step));
        s.push_str(&format!("points: {}\n", self.points));
        s.push_str(&format!("max_gamma: {:e}\n", self.max_gamma));
        s.push_str(&format!("argmax: ({}, {})\n", self.argmax.0, self.argmax.1));
        s.push_str(&format!("diagonal_max: {:e}\n", self.diagonal_max));
        s.push_str(&format!("off_diagonal_max: {:e}\n", self.off_diagonal_max));
        for (group, checks) in [
            ("lemma5", &self.lemma5),
            ("constant", &self.appendix_constants),
        ] {
            for c in checks {
                let target = match c.target {
                    Target::Near { expected, tol } => format!("expected {expected} +/- {tol:e}"),
                    Target::AtMost { bound } => format!("expected <= {bound}"),
                    Target::AtLeast { bound } => format!("expected >= {bound}"),
                    Target::Info => "info".to_string(),
                };
                let verdict = if c.pass { "ok" } else { "FAIL" };
                s.push_str(&format!(
                    "{group}.{}: {:.9e} ({target}) {verdict}\n",
                    c.name, c.value
                ));
            }
        }
        s.push_str(&format!("pass: {}\n", self.pass));
        s
    }
}

/// Evaluates `Gamma` on every grid point of
/// `{a0, a1 in [0, 0.4], (a0 + a1)/2 <= T}` and attaches the endpoint
/// sweeps and constants. Evidence on a grid, not a proof.
pub fn verify_region(grid_step: f64, params: &ProfileParams) -> Result<CertReport> {
    check_domain(
        "grid_step",
        grid_step,
        grid_step > 0.0 && grid_step <= 1e-3,
        "(0, 1e-3]",
    )?;
    require_half(params)?;
    let t = params.threshold();
    let steps = (REGION_EDGE / grid_step + 1e-9).floor() as usize;
    let at = |i: usize| (i as f64 * grid_step).min(REGION_EDGE);
    // Midpoints fall on the half-step grid; tabulate chi and phi there once.
    let half: Vec<(f64, f64)> = (0..=2 * steps)
        .into_par_iter()
        .map(|k| {
            let m = 0.5 * (at(k / 2) + at(k - k / 2));
            Ok((chi(m, params)?, params.envelope().eval(m)))
        })
        .collect::<Result<_>>()?;
    let roots: Vec<f64> = (0..=steps)
        .map(|i| sqrt_chi(at(i), params))
        .collect::<Result<_>>()?;
    let limit = t * (1.0 + 1e-12);

    struct RowStat {
        best: (f64, usize, usize),
        off: f64,
        diag: f64,
        points: usize,
    }
    let rows: Vec<RowStat> = (0..=steps)
        .into_par_iter()
        .map(|i| {
            let mut st = RowStat {
                best: (f64::NEG_INFINITY, i, 0),
                off: f64::NEG_INFINITY,
                diag: 0.0,
                points: 0,
            };
            for j in 0..=steps {
                if 0.5 * (at(i) + at(j)) > limit {
                    break;
                }
                let (chi_m, cap) = half[i + j];
                let s = roots[i] + roots[j];
                let first = 0.25 * s * s + 0.25 * (at(j) - at(i)).powi(2);
                let v = first.min(cap) - chi_m;
                st.points += 1;
                if v > st.best.0 {
                    st.best = (v, i, j);
                }
                if i == j {
                    st.diag = v.abs();
                } else {
                    st.off = st.off.max(v);
                }
            }
            st
        })
        .collect();

    let mut best = (f64::NEG_INFINITY, 0, 0);
    let (mut off, mut diag, mut points) = (f64::NEG_INFINITY, 0.0f64, 0);
    for r in &rows {
        if r.best.0 > best.0 {
            best = r.best;
        }
        off = off.max(r.off);
        diag = diag.max(r.diag);
        points += r.points;
    }

    let lemma5 = lemma5_checks(params)?;
    let appendix = appendix_constants(params)?;
    let pass = best.0 <= ZERO_TOL && lemma5.iter().chain(&appendix).all(|c| c.pass);
    Ok(CertReport {
        region: format!(
            "a0, a1 in [0, {REGION_EDGE}], (a0 + a1)/2 <= T = {t}, T + sqrt(T/6) = {:.6}",
            t + (t / 6.0).sqrt()
        ),
        grid_step,
        max_gamma: best.0,
        argmax: (at(best.1), at(best.2)),
        diagonal_max: diag,
        lemma5,
        appendix_constants: appendix,
        pass,
        off_diagonal_max: off,
        points,
    })
}
