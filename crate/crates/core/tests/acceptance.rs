//! Acceptance criteria, one PASS/FAIL line each. Runs without the libtest
//! harness so every criterion is reported even when an earlier one fails;
//! the process exits nonzero if any criterion fails.

use std::time::{Duration, Instant};

use l1weight::boolfn::{check_wd_identity, random_fn};
use l1weight::bounds::{
    chang_bound, chi, chi_tilde, log_asymptotics, lp_bound, strong_bound, subcube_w1,
};
use l1weight::certify::{
    appendix_constants, lemma5_checks, verify_region, ConstantCheck, ZERO_TOL,
};
use l1weight::changdim::{ball_density, ball_eps, exhaustive_dim_check, sharp_eps};
use l1weight::extremal::{
    euclid_mc, exact_max_w1, fkn_cross_check, is_strictly_increasing, min_upper_bound,
    monotonicity_table, origin_ball_d2_quadrature,
};
use l1weight::specfun::{solve_w, DEFAULT_THRESHOLD};
use l1weight::{ProfileParams, Result};
use num_bigint::BigInt;
use num_rational::BigRational;

struct Outcome {
    ok: bool,
    notes: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            ok: true,
            notes: Vec::new(),
        }
    }

    /// Records a failed condition; passing conditions are silent.
    fn require(&mut self, cond: bool, what: impl Into<String>) {
        if !cond {
            self.ok = false;
            self.notes.push(what.into());
        }
    }

    fn info(&mut self, what: impl Into<String>) {
        self.notes.push(what.into());
    }
}

fn near(x: f64, expected: f64, tol: f64) -> bool {
    (x - expected).abs() <= tol
}

fn find<'a>(checks: &'a [ConstantCheck], name: &str) -> &'a ConstantCheck {
    checks
        .iter()
        .find(|c| c.name == name)
        .expect("named constant")
}

fn c1_constants(o: &mut Outcome) -> Result<()> {
    let p = ProfileParams::default();
    let lp = lp_bound(0.125)?;
    let x = chi(0.125, &p)?;
    let cube = subcube_w1(3);
    let excess = 100.0 * (x / cube - 1.0);
    o.require(near(lp, 0.0571383, 1e-6), format!("lp_bound(1/8) = {lp}"));
    o.require(near(x, 0.0505062, 1e-6), format!("chi(1/8) = {x}"));
    o.require(cube == 3.0 / 64.0, format!("subcube_w1(3) = {cube}"));
    o.require(
        near(excess, 7.74652, 0.01),
        format!("chi/subcube - 1 = {excess}%"),
    );
    Ok(())
}

fn c2_profile(o: &mut Outcome) -> Result<()> {
    let w = solve_w(DEFAULT_THRESHOLD)?;
    let p = ProfileParams::default();
    let g = p.slope(0.21)?;
    let iso = p.iso(0.21)?;
    o.require(near(w, 1.36971, 1e-4), format!("w = {w}"));
    o.require(near(g, 1.02231, 1e-4), format!("g(0.21) = {g}"));
    o.require(
        near(iso, 0.105f64.sqrt(), 1e-12),
        format!("I_w(0.21) = {iso}"),
    );
    Ok(())
}

fn c3_certificate(o: &mut Outcome) -> Result<()> {
    let p = ProfileParams::default();
    let r = verify_region(1e-3, &p)?;
    o.require(
        r.max_gamma <= ZERO_TOL,
        format!("max Gamma = {}", r.max_gamma),
    );
    o.require(
        r.diagonal_max.abs() <= 1e-12,
        format!("diagonal max = {}", r.diagonal_max),
    );
    for c in lemma5_checks(&p)? {
        o.require(c.value <= ZERO_TOL, format!("{} = {}", c.name, c.value));
    }
    Ok(())
}

fn c4_appendix(o: &mut Outcome) -> Result<()> {
    let c = appendix_constants(&ProfileParams::default())?;
    let v = |name| find(&c, name).value;
    o.require(
        near(v("gamma22_floor"), 0.179822, 1e-5),
        format!("gamma22 floor = {}", v("gamma22_floor")),
    );
    o.require(
        near(v("slope_gap_max"), -1.39698, 1e-4),
        format!("slope gap = {}", v("slope_gap_max")),
    );
    o.require(
        v("eta_sweep_max") <= -0.26,
        format!("eta sweep max = {}", v("eta_sweep_max")),
    );
    o.require(
        near(v("h_0.02"), -0.00549341, 1e-6),
        format!("h(0.02) = {} (expected -0.00549341)", v("h_0.02")),
    );
    o.require(
        near(v("edge_h_prime_0.02"), 0.0544183, 1e-5),
        format!("h' = {}", v("edge_h_prime_0.02")),
    );
    o.require(
        near(v("half_inv_sqrt_2T"), 0.771517, 1e-5),
        format!("1/(2 sqrt(2T)) = {}", v("half_inv_sqrt_2T")),
    );
    Ok(())
}

fn c5_extremal(o: &mut Outcome) -> Result<()> {
    let p = ProfileParams::default();
    for n in 1..=4usize {
        for m in 0..=(1usize << n) {
            let r = exact_max_w1(n, m)?;
            let bound = min_upper_bound(r.density(), &p)?;
            o.require(
                r.max_w1_f64 <= bound + 1e-9,
                format!("n={n} m={m}: W = {} > bound {bound}", r.max_w1),
            );
            o.require(
                r.all_self_consistent(),
                format!("n={n} m={m}: maximizer not self-consistent"),
            );
        }
        let table = monotonicity_table(n)?;
        o.require(
            is_strictly_increasing(&table),
            format!("n={n}: not strictly increasing"),
        );
    }
    Ok(())
}

fn c6_identities(o: &mut Outcome) -> Result<()> {
    let mut worst_wd = 0.0f64;
    let mut worst_parseval = 0.0f64;
    for k in 0..200u64 {
        let n = 1 + (k % 10) as usize;
        let len = 1usize << n;
        let m = 1 + (k as usize * 7919) % len;
        let f = random_fn(n, m, 1000 + k)?;
        worst_wd = worst_wd.max(check_wd_identity(&f)?);
        worst_parseval = worst_parseval.max((f.wht().total_weight() - f.mean()).abs());
        for i in 1..=n {
            let (g, h) = f.decompose(i)?;
            let j = i - 1;
            let low = (1usize << j) - 1;
            let rebuilt = (0..len).all(|x| {
                let k = ((x >> 1) & !low) | (x & low);
                let part = if (x >> j) & 1 == 0 { &g } else { &h };
                part.get(k) == f.get(x)
            });
            o.require(
                rebuilt,
                format!("decompose({i}) of function {k} does not rebuild"),
            );
        }
    }
    o.require(
        worst_wd <= 1e-12,
        format!("distance identity residual {worst_wd:e}"),
    );
    o.require(
        worst_parseval <= 1e-12,
        format!("Parseval residual {worst_parseval:e}"),
    );
    Ok(())
}

fn c7_sharp_chang(o: &mut Outcome) -> Result<()> {
    let half = BigRational::new(BigInt::from(1), BigInt::from(2));
    let e = sharp_eps(3, &half)?;
    o.require(e == half, format!("sharp_eps(3, 1/2) = {e}"));
    for k in 1..=12u32 {
        for r in 0..k {
            let lhs = ball_eps(k, r)?;
            let rhs = sharp_eps(k, &ball_density(k, r))?;
            o.require(lhs == rhs, format!("k={k} r={r}: {lhs} != {rhs}"));
        }
    }
    let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let rep = exhaustive_dim_check(3, &grid, &ProfileParams::default())?;
    o.require(
        rep.functions == 256,
        format!("{} functions checked", rep.functions),
    );
    o.require(rep.pass(), format!("dimension check: {rep:?}"));
    Ok(())
}

fn c8_chi_tilde(o: &mut Outcome) -> Result<()> {
    let p = ProfileParams::default();
    let mid = chi_tilde(0.5, &p)?;
    o.require(
        near(mid.value, 0.25, 1e-8),
        format!("chi~(1/2) = {}", mid.value),
    );
    for a in [0.42, 0.45, 0.48, 0.5] {
        let b = chi_tilde(a, &p)?.beta_star;
        o.require((0.4..=a).contains(&b), format!("beta*({a}) = {b}"));
    }
    for a in [0.3, 0.35, 0.4] {
        let v = chi_tilde(a, &p)?.value;
        o.info(format!("chi~({a}) - a/2 = {:e}", v - a / 2.0));
        o.require(v <= a / 2.0 + 1e-8, format!("chi~({a}) = {v} exceeds a/2"));
    }
    Ok(())
}

fn c9_fkn(o: &mut Outcome) -> Result<()> {
    let p = ProfileParams::default();
    for n in 1..=4 {
        for row in fkn_cross_check(n, &p)? {
            o.require(
                row.ok,
                format!("n={n} beta={}: {} above bounds", row.beta, row.exact),
            );
        }
    }
    Ok(())
}

fn c10_asymptotics(o: &mut Outcome) -> Result<()> {
    let p = ProfileParams::default();
    let s = log_asymptotics(20.0, &p)?;
    let res_chi = s.ln_chi - s.expansion_chi(p.w());
    let res_j = s.ln_j - s.expansion_j();
    o.require(
        res_chi.abs() <= 0.01,
        format!("ln chi residual at t=20: {res_chi}"),
    );
    o.require(
        res_j.abs() <= 0.01,
        format!("ln J residual at t=20: {res_j}"),
    );
    let ratio = strong_bound(1_000_000, 0.125)? / chang_bound(0.125)?;
    o.require(
        (0.99..=1.0).contains(&ratio),
        format!("strong/chang = {ratio}"),
    );
    Ok(())
}

fn c11_euclid(o: &mut Outcome) -> Result<()> {
    let origin = euclid_mc(2, &[0.0, 0.0], 0.5, 1_000_000, 2024)?;
    let shifted = euclid_mc(2, &[1.0, 0.0], 0.5, 1_000_000, 2025)?;
    let se = (origin.std_error.powi(2) + shifted.std_error.powi(2)).sqrt();
    let margin = shifted.mean - origin.mean;
    o.require(
        margin > 3.0 * se,
        format!("margin {margin} vs 3 se {}", 3.0 * se),
    );
    let q = origin_ball_d2_quadrature(2, 0.5)?;
    let dev = (origin.mean - q).abs();
    o.require(
        dev <= 3.0 * origin.std_error,
        format!("MC {} vs quadrature {q}", origin.mean),
    );
    Ok(())
}

type Criterion = fn(&mut Outcome) -> Result<()>;

fn main() {
    let criteria: [(&str, Duration, Criterion); 11] = [
        (
            "1 constants at a = 1/8",
            Duration::from_secs(1),
            c1_constants,
        ),
        ("2 profile construction", Duration::from_secs(1), c2_profile),
        (
            "3 Gamma certificate",
            Duration::from_secs(30),
            c3_certificate,
        ),
        ("4 endpoint constants", Duration::from_secs(5), c4_appendix),
        (
            "5 exact extremal ground truth",
            Duration::from_secs(120),
            c5_extremal,
        ),
        ("6 identity suite", Duration::from_secs(10), c6_identities),
        (
            "7 sharp Chang suite",
            Duration::from_secs(30),
            c7_sharp_chang,
        ),
        (
            "8 chi-tilde behavior",
            Duration::from_secs(10),
            c8_chi_tilde,
        ),
        ("9 beta cross-check", Duration::from_secs(120), c9_fkn),
        ("10 asymptotics", Duration::from_secs(1), c10_asymptotics),
        (
            "11 Euclidean Monte-Carlo",
            Duration::from_secs(30),
            c11_euclid,
        ),
    ];
    let mut failed = 0;
    for (name, budget, run) in criteria {
        let mut o = Outcome::new();
        let start = Instant::now();
        if let Err(e) = run(&mut o) {
            o.require(false, format!("error: {e}"));
        }
        let took = start.elapsed();
        o.require(took <= budget, format!("took {took:?}, budget {budget:?}"));
        let tag = if o.ok { "PASS" } else { "FAIL" };
        println!("{tag} criterion {name} ({:.3}s)", took.as_secs_f64());
        for note in &o.notes {
            println!("     {note}");
        }
        if !o.ok {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", 11 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
