//! `geometry --check ...`: each check emits flat rows with its inputs,
//! seed and standard errors.

use std::io::{self, Write};

use clap::{Args, ValueEnum};
use serde_json::{json, Value};

use entanglab_core::geometry::{
    comparison_ratio, gamma_m, log_z, mc_volume_symmetrization_check, s0_estimate, s0_ppt_estimate, sep_volume_bound,
    vrad_states, width_d0, width_duality_check,
};
use entanglab_core::linalg::ProductDims;
use entanglab_core::rng::SeededStream;
use entanglab_core::Result;

use crate::report::{write_rows, Format};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Check {
    Zvol,
    Vrad,
    Comparison,
    Duality,
    Urysohn,
    RogersShephard,
    SepBounds,
    S0,
    S0Ppt,
}

#[derive(Args)]
pub struct GeometryArgs {
    #[arg(long, value_enum)]
    check: Check,
    /// Matrix sizes (zvol, vrad, comparison, urysohn).
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Environment dimensions (zvol) or multiples of n (comparison).
    #[arg(long, value_delimiter = ',')]
    s: Vec<f64>,
    #[arg(long, default_value_t = 2000)]
    trials: usize,
    /// Local dimension (s0-ppt) or dimensions (sep-bounds).
    #[arg(long, value_delimiter = ',')]
    d: Vec<usize>,
    /// Party counts (sep-bounds) or simplex dimensions (rogers-shephard).
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long, default_value_t = 100_000)]
    points: usize,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

fn or_default<T: Clone>(v: &[T], default: &[T]) -> Vec<T> {
    if v.is_empty() {
        default.to_vec()
    } else {
        v.to_vec()
    }
}

fn rows(args: &GeometryArgs, seed: u64) -> Result<Vec<Value>> {
    let stream = SeededStream::new(seed, 0);
    let mut out = Vec::new();
    match args.check {
        Check::Zvol => {
            for n in or_default(&args.n, &[2, 3, 4]) {
                let ss = if args.s.is_empty() { vec![n as f64, 2.0 * n as f64] } else { args.s.clone() };
                for s in ss {
                    let lz = log_z(n, s)?;
                    out.push(json!({ "n": n, "s": s, "log_z": lz, "z": lz.exp() }));
                }
            }
        }
        Check::Vrad => {
            for n in or_default(&args.n, &[2, 3, 4, 8, 16, 32, 64]) {
                let v = vrad_states(n)?;
                out.push(json!({
                    "n": n, "vrad": v,
                    "vrad_sqrt_n_e_quarter": v * (n as f64).sqrt() * 0.25f64.exp(),
                }));
            }
        }
        Check::Comparison => {
            let mults = or_default(&args.s, &[1.0, 2.0, 4.0, 8.0]);
            for n in or_default(&args.n, &[4, 9, 16, 36, 64]) {
                for &k in &mults {
                    let s = k * n as f64;
                    out.push(json!({ "n": n, "s": s, "ratio": comparison_ratio(n, s)? }));
                }
            }
        }
        Check::Duality => {
            let dims = ProductDims::bipartite(2, 2)?;
            let c = width_duality_check(&dims, args.trials, stream)?;
            out.push(json!({
                "dims": "2x2", "trials": args.trials, "seed": seed,
                "width_body_lower": c.width_body.mean, "width_body_se": c.width_body.stderr,
                "width_polar": c.width_polar.mean, "width_polar_se": c.width_polar.stderr,
                "product": c.product, "gamma_m_sq": c.gamma_m_sq,
                "relative_se": c.relative_se, "holds": c.holds(),
            }));
        }
        Check::Urysohn => {
            for (i, n) in or_default(&args.n, &[2, 3, 4]).into_iter().enumerate() {
                let w = width_d0(n, args.trials, stream.child(i as u64))?;
                let (mw, se) = w.mean_width();
                let v = vrad_states(n)?;
                out.push(json!({
                    "n": n, "trials": args.trials, "seed": seed, "vrad": v,
                    "mean_width": mw, "mean_width_se": se, "holds": v <= mw + 3.0 * se,
                }));
            }
        }
        Check::RogersShephard => {
            for (i, m) in or_default(&args.k, &[2, 3]).into_iter().enumerate() {
                let r = mc_volume_symmetrization_check(m, args.points, stream.child(i as u64))?;
                out.push(json!({
                    "m": m, "points": r.points, "seed": seed, "ratio": r.ratio, "se": r.stderr,
                    "lower_bound": r.lower_bound, "holds": r.holds(),
                }));
            }
        }
        Check::SepBounds => {
            for k in or_default(&args.k, &[2, 3, 4]) {
                for d in or_default(&args.d, &[2, 3, 4, 10]) {
                    let b = sep_volume_bound(k, d)?;
                    out.push(json!({
                        "k": k, "d": d, "bound_i": b.bound_i, "bound_ii": b.bound_ii, "beta_d": b.beta_d,
                    }));
                }
            }
        }
        Check::S0 => {
            let e = s0_estimate(2, args.trials, stream)?;
            out.push(json!({ "d": 2, "trials": e.trials, "seed": seed, "s0": e.mean, "se": e.stderr }));
        }
        Check::S0Ppt => {
            for (i, d) in or_default(&args.d, &[2, 3, 4]).into_iter().enumerate() {
                let e = s0_ppt_estimate(d, args.trials, stream.child(i as u64))?;
                out.push(json!({
                    "d": d, "trials": args.trials, "seed": seed,
                    "s0": e.s0.mean, "s0_se": e.s0.stderr,
                    "polar_width": e.polar_width.mean, "polar_width_se": e.polar_width.stderr,
                    "polar_width_over_2d": e.polar_width.mean / (2.0 * d as f64),
                    "gamma_m": gamma_m(d.pow(4) - 1),
                }));
            }
        }
    }
    Ok(out)
}

pub fn run(args: &GeometryArgs, seed: u64) -> Result<()> {
    let rows = rows(args, seed)?;
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    write_rows(&mut lock, &rows, args.format)?;
    lock.flush()?;
    Ok(())
}
