//! `l1weight`: batch front end for the bounds, certificate, extremal search
//! and Chang-dimension tools.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage or domain errors.

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use l1weight::bounds::{self, TableOptions};
use l1weight::certify;
use l1weight::changdim;
use l1weight::extremal::{self, SearchOptions};
use l1weight::{fmt_sig17, parse_rational, Envelope, ProfileParams};

#[derive(Parser, Debug)]
#[command(
    name = "l1weight",
    version,
    about = "Level-1 Fourier weight bounds and checks"
)]
struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Density threshold of the piecewise profile bound.
    #[arg(long, global = true, default_value_t = 0.21)]
    threshold: f64,

    /// Envelope used above the threshold.
    #[arg(long, global = true, value_enum, default_value_t = EnvelopeArg::Half)]
    envelope: EnvelopeArg,

    /// Write the artifact here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum EnvelopeArg {
    Half,
    Lp,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Report,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// CSV table of every bound on a uniform density grid.
    Bounds {
        /// Grid step; densities step, 2 step, .., 1/2.
        #[arg(long, default_value_t = 0.001)]
        grid: f64,
        /// Add a strong-bound column for this dimension.
        #[arg(long)]
        strong_n: Option<u64>,
    },
    /// Grid verification of the induction inequality.
    Certify {
        #[arg(long, default_value_t = 0.001)]
        grid_step: f64,
        #[arg(long, value_enum, default_value_t = Format::Report)]
        format: Format,
    },
    /// Exact maximal level-1 weight by exhaustive search.
    Extremal {
        #[arg(long)]
        n: usize,
        /// Support size.
        #[arg(long, conflicts_with = "a")]
        m: Option<usize>,
        /// Dyadic density p/q.
        #[arg(long)]
        a: Option<String>,
        /// Restrict to max |coordinate coefficient| = beta (p/q).
        #[arg(long)]
        beta: Option<String>,
        /// Best linear threshold function with weights up to this cap instead.
        #[arg(long)]
        ltf_cap: Option<u32>,
        /// Permit n > 4 (cost grows like C(2^n, m)).
        #[arg(long)]
        allow_large: bool,
        #[arg(long, default_value_t = 10_000)]
        max_maximizers: usize,
        #[arg(long, value_enum, default_value_t = Format::Report)]
        format: Format,
    },
    /// Balanced-density maxima per beta against the two beta bounds.
    Fkn {
        #[arg(long, default_value_t = 4)]
        max_n: usize,
    },
    /// Sharp epsilon values and dimension sweeps.
    Chang {
        /// Sharp epsilon for k coordinates at density a (p/q).
        #[arg(long, num_args = 2, value_names = ["K", "A"])]
        sharp_eps: Option<Vec<String>>,
        /// Hamming-ball epsilon C(k-1, r) / C(k, <= r).
        #[arg(long, num_args = 2, value_names = ["K", "R"])]
        ball_eps: Option<Vec<String>>,
        /// Dimension sweep: exhaustive for n <= 3, sampled above.
        #[arg(long)]
        dim_check: Option<usize>,
        /// Comma-separated epsilons for the sweep.
        #[arg(
            long,
            value_delimiter = ',',
            default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9"
        )]
        eps: Vec<f64>,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Monte-Carlo average squared distance of a Gaussian-measure ball.
    EuclidMc {
        #[arg(long, default_value_t = 2)]
        dim: usize,
        /// Comma-separated center; defaults to the origin.
        #[arg(long, value_delimiter = ',')]
        center: Option<Vec<f64>>,
        #[arg(long, default_value_t = 0.5)]
        measure: f64,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Log-scale comparison of Chang's bound, J and chi at a = e^{-t}.
    Asymptotics {
        #[arg(long, value_delimiter = ',', default_value = "20")]
        t: Vec<f64>,
    },
}

/// Command outcome: the artifact text and whether its checks passed.
struct Outcome {
    text: String,
    ok: bool,
}

type CmdResult = Result<Outcome, String>;

fn params(cli: &Cli) -> Result<ProfileParams, String> {
    let env = match cli.envelope {
        EnvelopeArg::Half => Envelope::Half,
        EnvelopeArg::Lp => Envelope::Lp,
    };
    ProfileParams::with_envelope(cli.threshold, env).map_err(|e| e.to_string())
}

fn err<E: ToString>(e: E) -> String {
    e.to_string()
}

fn run_bounds(p: &ProfileParams, grid: f64, strong_n: Option<u64>) -> CmdResult {
    let g = bounds::uniform_grid(grid).map_err(err)?;
    let rep = bounds::bound_table(&g, p, TableOptions { strong_n }).map_err(err)?;
    Ok(Outcome {
        text: rep.to_csv(),
        ok: true,
    })
}

fn run_certify(p: &ProfileParams, step: f64, format: Format) -> CmdResult {
    let rep = certify::verify_region(step, p).map_err(err)?;
    let text = match format {
        Format::Report => rep.to_text(),
        Format::Json => serde_json::to_string_pretty(&rep).map_err(err)? + "\n",
    };
    Ok(Outcome { text, ok: rep.pass })
}

#[allow(clippy::too_many_arguments)]
fn run_extremal(
    p: &ProfileParams,
    n: usize,
    m: Option<usize>,
    a: Option<&str>,
    beta: Option<&str>,
    ltf_cap: Option<u32>,
    allow_large: bool,
    max_maximizers: usize,
    format: Format,
) -> CmdResult {
    let m = match (m, a) {
        (Some(m), _) => m,
        (None, Some(a)) => {
            let r = parse_rational(a).map_err(err)?;
            let scaled = r * num_rational::BigRational::from_integer((1u64 << n.min(63)).into());
            if !scaled.is_integer() {
                return Err(format!("density {a} is not a multiple of 2^-{n}"));
            }
            scaled
                .to_integer()
                .to_string()
                .parse::<usize>()
                .map_err(err)?
        }
        (None, None) => return Err("one of --m or --a is required".into()),
    };

    if let Some(cap) = ltf_cap {
        let r = extremal::ltf_search(n, m, cap).map_err(err)?;
        let text = match format {
            Format::Json => serde_json::to_string_pretty(&r).map_err(err)? + "\n",
            Format::Report => format!(
                "n: {n}\nm: {m}\nw1: {}\nw1_f64: {}\nweights: {}\nsupport: {}\n",
                r.w1,
                fmt_sig17(r.w1_f64),
                join(&r.weights),
                join(&r.support)
            ),
        };
        return Ok(Outcome { text, ok: true });
    }

    if n > 4 {
        if !allow_large {
            return Err(format!(
                "exhaustive search at n = {n} needs --allow-large (cost grows like C(2^n, m))"
            ));
        }
        eprintln!("warning: exhaustive search at n = {n} may take a long time");
    }
    let opts = SearchOptions {
        max_n: if allow_large {
            extremal::HARD_MAX_DIM
        } else {
            4
        },
        max_maximizers,
        prune: true,
    };
    let res = match beta {
        Some(b) => {
            let b = parse_rational(b).map_err(err)?;
            extremal::exact_max_w1_given_beta(n, m, &b).map_err(err)?
        }
        None => extremal::exact_max_w1_with(n, m, &opts).map_err(err)?,
    };
    let bound = extremal::min_upper_bound(res.density(), p).map_err(err)?;
    let within = res.max_w1_f64 <= bound + 1e-9;
    let ok = within && res.all_self_consistent();
    let text = match format {
        Format::Json => serde_json::to_string_pretty(&res).map_err(err)? + "\n",
        Format::Report => {
            let mut s = format!(
                "n: {}\nm: {}\na: {}\nmax_w1: {}\nmax_w1_f64: {}\nmin_upper_bound: {}\nwithin_bounds: {within}\nmaximizers: {}\ntruncated: {}\n",
                res.n,
                res.m,
                fmt_sig17(res.density()),
                res.max_w1,
                fmt_sig17(res.max_w1_f64),
                fmt_sig17(bound),
                res.maximizers.len(),
                res.truncated,
            );
            for (pts, sc) in res.maximizers.iter().zip(&res.self_consistent) {
                s.push_str(&format!("maximizer: {} self_consistent={sc}\n", join(pts)));
            }
            s
        }
    };
    Ok(Outcome { text, ok })
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn run_fkn(p: &ProfileParams, max_n: usize) -> CmdResult {
    let mut text = String::from("n,beta,exact,fkn,khintchine,ok\n");
    let mut ok = true;
    for n in 1..=max_n {
        for r in extremal::fkn_cross_check(n, p).map_err(err)? {
            ok &= r.ok;
            text.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.n,
                r.beta,
                r.exact,
                fmt_sig17(r.fkn),
                fmt_sig17(r.khintchine),
                r.ok
            ));
        }
    }
    Ok(Outcome { text, ok })
}

fn parse_u32(s: &str, what: &str) -> Result<u32, String> {
    s.parse()
        .map_err(|_| format!("{what} must be a nonnegative integer, got {s:?}"))
}

#[allow(clippy::too_many_arguments)]
fn run_chang(
    p: &ProfileParams,
    sharp: Option<&[String]>,
    ball: Option<&[String]>,
    dim_check: Option<usize>,
    eps: &[f64],
    samples: usize,
    seed: u64,
) -> CmdResult {
    if let Some([k, a]) = sharp {
        let k = parse_u32(k, "K")?;
        let a = parse_rational(a).map_err(err)?;
        let v = changdim::sharp_eps(k, &a).map_err(err)?;
        return Ok(Outcome {
            text: format!("{v}\n"),
            ok: true,
        });
    }
    if let Some([k, r]) = ball {
        let v = changdim::ball_eps(parse_u32(k, "K")?, parse_u32(r, "R")?).map_err(err)?;
        return Ok(Outcome {
            text: format!("{v}\n"),
            ok: true,
        });
    }
    if let Some(n) = dim_check {
        let rep = if n <= 3 {
            changdim::exhaustive_dim_check(n, eps, p)
        } else {
            changdim::sampled_dim_check(n, eps, samples, seed, p)
        }
        .map_err(err)?;
        let text = format!(
            "n: {n}\nfunctions: {}\npairs: {}\nmax_dimension: {}\nchang_violations: {}\nlemma6_violations: {}\nsharp_violations: {}\npass: {}\n",
            rep.functions,
            rep.pairs,
            rep.max_dimension,
            rep.chang_violations,
            rep.lemma6_violations,
            rep.sharp_violations,
            rep.pass()
        );
        return Ok(Outcome {
            text,
            ok: rep.pass(),
        });
    }
    Err("chang needs one of --sharp-eps, --ball-eps, --dim-check".into())
}

fn run_euclid(
    dim: usize,
    center: Option<Vec<f64>>,
    measure: f64,
    samples: u64,
    seed: u64,
) -> CmdResult {
    let center = center.unwrap_or_else(|| vec![0.0; dim]);
    let est = extremal::euclid_mc(dim, &center, measure, samples, seed).map_err(err)?;
    let mut text = format!(
        "dim: {dim}\ncenter: {}\nmeasure: {}\nradius: {}\nmean: {}\nstd_error: {}\nsamples: {}\nseed: {}\n",
        join(&center),
        measure,
        fmt_sig17(est.radius),
        fmt_sig17(est.mean),
        fmt_sig17(est.std_error),
        est.samples,
        est.seed
    );
    if center.iter().all(|&c| c == 0.0) {
        let q = extremal::origin_ball_d2_quadrature(dim, measure).map_err(err)?;
        text.push_str(&format!("quadrature: {}\n", fmt_sig17(q)));
    }
    Ok(Outcome { text, ok: true })
}

fn run_asymptotics(p: &ProfileParams, ts: &[f64]) -> CmdResult {
    let mut text = String::from("t,ln_chang,ln_J,ln_chi,expansion_J,expansion_chi\n");
    for &t in ts {
        let la = bounds::log_asymptotics(t, p).map_err(err)?;
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            t,
            fmt_sig17(la.ln_chang),
            fmt_sig17(la.ln_j),
            fmt_sig17(la.ln_chi),
            fmt_sig17(la.expansion_j()),
            fmt_sig17(la.expansion_chi(p.w()))
        ));
    }
    Ok(Outcome { text, ok: true })
}

fn dispatch(cli: &Cli) -> CmdResult {
    let p = params(cli)?;
    match &cli.command {
        Command::Bounds { grid, strong_n } => run_bounds(&p, *grid, *strong_n),
        Command::Certify { grid_step, format } => run_certify(&p, *grid_step, *format),
        Command::Extremal {
            n,
            m,
            a,
            beta,
            ltf_cap,
            allow_large,
            max_maximizers,
            format,
        } => run_extremal(
            &p,
            *n,
            *m,
            a.as_deref(),
            beta.as_deref(),
            *ltf_cap,
            *allow_large,
            *max_maximizers,
            *format,
        ),
        Command::Fkn { max_n } => run_fkn(&p, *max_n),
        Command::Chang {
            sharp_eps,
            ball_eps,
            dim_check,
            eps,
            samples,
            seed,
        } => run_chang(
            &p,
            sharp_eps.as_deref(),
            ball_eps.as_deref(),
            *dim_check,
            eps,
            *samples,
            *seed,
        ),
        Command::EuclidMc {
            dim,
            center,
            measure,
            samples,
            seed,
        } => run_euclid(*dim, center.clone(), *measure, *samples, *seed),
        Command::Asymptotics { t } => run_asymptotics(&p, t),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if t == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match dispatch(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let written = match &cli.output {
        Some(path) => fs::write(path, &outcome.text),
        None => std::io::stdout().write_all(outcome.text.as_bytes()),
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
