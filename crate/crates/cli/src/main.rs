//! `hurwitz`: command-line front end for the Hurwitz trace laboratory.
//!
//! Matrix inputs are JSON files in the shared schema
//! `{"n": int, "re": [[...]], "im": [[...]]}`. Reports go to standard
//! output or, with `--out`, to a file; CSV reports begin with a comment
//! line recording version, arguments and tolerances, JSON reports embed
//! the same provenance as a `"meta"` member. Exit codes: 0 success,
//! 2 usage/validation, 3 I/O, 4 enumeration cap, 5 numerical failure.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use hurwitz_core::asymptotics::{
    conjecture_sweep, m0_estimate, resolvent_trace, series_partial_sum, series_tail_bound,
};
use hurwitz_core::extremal::{extremal_search, Mode, SearchConfig};
use hurwitz_core::hurwitz::{
    hurwitz_trace, hurwitz_trace_enumerate, trace_table, KPolicy, TraceCell,
};
use hurwitz_core::linalg::{normalize_phone, operator_norm};
use hurwitz_core::matio::{
    format_sig17, json_real, read_matrix, write_matrix, write_text, RunMeta,
};
use hurwitz_core::sampling::{sample_phone, SampleKind};
use hurwitz_core::words::{binomial, count_c};
use hurwitz_core::{Error, HermitianMatrix, Result, Tolerances};

#[derive(Parser)]
#[command(
    name = "hurwitz",
    version,
    about = "Hurwitz product traces of positive Hermitian pairs: sweeps, asymptotics, word counts, extremality searches"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Trace of a single cell tr S_{m,k}(A, B)
    Trace {
        /// Matrix file for A
        #[arg(long)]
        a: PathBuf,
        /// Matrix file for B
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        /// "recurrence" (normalized DP) or "enumerate" (word-sum oracle)
        #[arg(long, default_value = "recurrence")]
        method: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// CSV sweep of all cells m <= max-m (optionally banded in k)
    Table {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long = "max-m")]
        max_m: u32,
        #[arg(long = "k-min", default_value_t = 0)]
        k_min: u32,
        /// Defaults to max-m
        #[arg(long = "k-max")]
        k_max: Option<u32>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monotonicity sweep of q_{m+k,k} for m = 0..max-m
    Conjecture {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long = "max-m")]
        max_m: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Explicit positivity threshold m0 with closed-form and generic bounds
    M0 {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        k: u32,
        /// Verify positivity at ceil(m0)..ceil(m0)+VERIFY (0 to skip)
        #[arg(long, default_value_t = 10)]
        verify: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Word-class counts |C_{m,k,s}| for s = 0..k
    Counts {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Resolvent trace vs truncated Hurwitz series at one tau
    Series {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        tau: f64,
        /// Series truncation order M
        #[arg(long, default_value_t = 60)]
        truncate: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Hill-climbing search for extremal pairs plus EL residuals
    El {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2000)]
        steps: u32,
        #[arg(long = "step-size", default_value_t = 0.2)]
        step_size: f64,
        #[arg(long, default_value_t = 0.5)]
        shrink: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// "maximize" or "minimize"
        #[arg(long, default_value = "maximize")]
        mode: String,
        /// Optional CSV of accepted steps (step,objective,combined)
        #[arg(long)]
        trajectory: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a deterministic random phone matrix to a file
    Sample {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        seed: u64,
        /// "wishart", "diag-gap" or "shared-top"
        #[arg(long)]
        kind: String,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    if let Err(e) = run(cli.cmd, &argv) {
        eprintln!("error: {e}");
        std::process::exit(exit_code(&e));
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io(_) => 3,
        Error::CapExceeded { .. } => 4,
        Error::NonConvergence { .. }
        | Error::PoleProximity(_)
        | Error::SplitInconsistent { .. }
        | Error::MaxDepthExceeded(_)
        | Error::NonRealTrace { .. }
        | Error::Numerical(_) => 5,
        _ => 2,
    }
}

fn run(cmd: Cmd, argv: &[String]) -> Result<()> {
    let tol = Tolerances::default();
    let meta = RunMeta {
        version: env!("CARGO_PKG_VERSION"),
        argv,
        tolerances: &tol,
    };
    match cmd {
        Cmd::Trace { a, b, m, k, method, out } => cmd_trace(&a, &b, m, k, &method, out.as_deref(), &meta, &tol),
        Cmd::Table { a, b, max_m, k_min, k_max, out } => {
            cmd_table(&a, &b, max_m, k_min, k_max, out.as_deref(), &meta, &tol)
        }
        Cmd::Conjecture { a, b, k, max_m, out } => cmd_conjecture(&a, &b, k, max_m, out.as_deref(), &meta, &tol),
        Cmd::M0 { a, b, k, verify, out } => cmd_m0(&a, &b, k, verify, out.as_deref(), &meta, &tol),
        Cmd::Counts { m, k, out } => cmd_counts(m, k, out.as_deref(), &meta),
        Cmd::Series { a, b, k, tau, truncate, out } => {
            cmd_series(&a, &b, k, tau, truncate, out.as_deref(), &meta, &tol)
        }
        Cmd::El { n, m, k, p, steps, step_size, shrink, seed, mode, trajectory, out } => cmd_el(
            n, m, k, p, steps, step_size, shrink, seed, &mode,
            trajectory.as_deref(), out.as_deref(), &meta, &tol,
        ),
        Cmd::Sample { n, seed, kind, out } => cmd_sample(n, seed, &kind, &out, &tol),
    }
}

/// Send a report to the file (with provenance) or standard output.
fn emit(out: Option<&Path>, stdout_text: &str, file_text: &str) -> Result<()> {
    match out {
        Some(path) => write_text(path, file_text),
        None => {
            print!("{stdout_text}");
            Ok(())
        }
    }
}

fn load_pair(a: &Path, b: &Path, tol: &Tolerances) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let ma = read_matrix(a, tol)?;
    let mb = read_matrix(b, tol)?;
    Ok((ma, mb))
}

/// JSON body of a trace cell; `log10_abs` is quoted when infinite.
fn trace_json(cell: &TraceCell, method: &str, meta: Option<&RunMeta>) -> String {
    let meta_line = meta
        .map(|m| format!("  \"meta\": {},\n", m.json_object()))
        .unwrap_or_default();
    format!(
        "{{\n{meta_line}  \"sign\": {},\n  \"log10_abs\": {},\n  \"q\": {},\n  \"method\": \"{method}\"\n}}\n",
        cell.sign,
        json_real(cell.log10_abs),
        format_sig17(cell.q),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_trace(
    a: &Path,
    b: &Path,
    m: u32,
    k: u32,
    method: &str,
    out: Option<&Path>,
    meta: &RunMeta,
    tol: &Tolerances,
) -> Result<()> {
    let (ma, mb) = load_pair(a, b, tol)?;
    let cell = match method {
        "recurrence" => hurwitz_trace(&ma, &mb, m, k, tol)?,
        "enumerate" => {
            // same PSD validation path as the recurrence, then the oracle
            let a_norm = operator_norm(ma.mat())?;
            let b_norm = operator_norm(mb.mat())?;
            let v = hurwitz_trace_enumerate(&ma, &mb, m, k, tol)?;
            if v == 0.0 {
                TraceCell::zero()
            } else {
                let denom = ma.n() as f64
                    * binomial(m as u64, k as u64).to_f64()
                    * a_norm.powi((m - k) as i32)
                    * b_norm.powi(k as i32);
                TraceCell {
                    sign: if v > 0.0 { 1 } else { -1 },
                    log10_abs: v.abs().log10(),
                    q: v / denom,
                }
            }
        }
        other => {
            return Err(Error::Parse(format!(
                "unknown method {other:?} (expected recurrence or enumerate)"
            )))
        }
    };
    emit(
        out,
        &trace_json(&cell, method, None),
        &trace_json(&cell, method, Some(meta)),
    )
}

#[allow(clippy::too_many_arguments)]
fn cmd_table(
    a: &Path,
    b: &Path,
    max_m: u32,
    k_min: u32,
    k_max: Option<u32>,
    out: Option<&Path>,
    meta: &RunMeta,
    tol: &Tolerances,
) -> Result<()> {
    let (ma, mb) = load_pair(a, b, tol)?;
    let policy = KPolicy::Band {
        k_min,
        k_max: k_max.unwrap_or(max_m),
    };
    let table = trace_table(&ma, &mb, max_m, policy, tol)?;
    let mut text = meta.comment_line();
    text.push_str("m,k,sign,log10_abs_trace,q\n");
    for ((m, k), cell) in &table.cells {
        text.push_str(&format!(
            "{m},{k},{},{},{}\n",
            cell.sign,
            format_sig17(cell.log10_abs),
            format_sig17(cell.q)
        ));
    }
    emit(out, &text, &text)
}

fn cmd_conjecture(
    a: &Path,
    b: &Path,
    k: u32,
    max_m: u32,
    out: Option<&Path>,
    meta: &RunMeta,
    tol: &Tolerances,
) -> Result<()> {
    let (ma, mb) = load_pair(a, b, tol)?;
    let pa = normalize_phone(&ma, tol)?;
    let pb = normalize_phone(&mb, tol)?;
    let sweep = conjecture_sweep(&pa, &pb, k, max_m, tol)?;
    let mut text = meta.comment_line();
    text.push_str("m,q,delta_q\n");
    for (m, &q) in sweep.q.iter().enumerate() {
        if m == 0 {
            text.push_str(&format!("0,{},\n", format_sig17(q)));
        } else {
            text.push_str(&format!(
                "{m},{},{}\n",
                format_sig17(q),
                format_sig17(q - sweep.q[m - 1])
            ));
        }
    }
    match sweep.first_increase {
        None => text.push_str(&format!(
            "# status: no increase above mono_tol={:e} across {} values\n",
            tol.mono_tol,
            sweep.q.len()
        )),
        Some((m, delta)) => text.push_str(&format!(
            "# status: first increase at m={m} with delta_q={}\n",
            format_sig17(delta)
        )),
    }
    emit(out, &text, &text)
}

fn cmd_m0(
    a: &Path,
    b: &Path,
    k: u32,
    verify: u32,
    out: Option<&Path>,
    meta: &RunMeta,
    tol: &Tolerances,
) -> Result<()> {
    let (ma, mb) = load_pair(a, b, tol)?;
    let pa = normalize_phone(&ma, tol)?;
    let pb = normalize_phone(&mb, tol)?;
    let est = m0_estimate(&pa, &pb, k, tol)?;

    let verified_range = if est.branch_label() == "product-zero" || verify == 0 {
        "null".to_string()
    } else {
        let m0 = est.m0().ceil();
        if m0 > 100_000.0 {
            eprintln!("note: ceil(m0) = {m0} is too large to verify by sweep; skipping");
            "null".to_string()
        } else {
            let lo = (m0 as u32).max(k.max(1));
            let hi = lo + verify;
            for m in lo..=hi {
                let cell = hurwitz_trace(pa.matrix(), pb.matrix(), m, k, tol)?;
                if cell.sign <= 0 {
                    return Err(Error::Numerical(format!(
                        "positivity check failed at m={m}: sign={}",
                        cell.sign
                    )));
                }
            }
            format!("[{lo}, {hi}]")
        }
    };

    let body = |with_meta: bool| {
        let meta_line = if with_meta {
            format!("  \"meta\": {},\n", meta.json_object())
        } else {
            String::new()
        };
        format!(
            "{{\n{meta_line}  \"branch\": \"{}\",\n  \"L\": {},\n  \"epsilon\": {},\n  \"norm_gap\": {},\n  \"leading\": {},\n  \"m0_closed_form\": {},\n  \"m0_generic\": {},\n  \"verified_range\": {}\n}}\n",
            est.branch_label(),
            est.l,
            format_sig17(est.epsilon),
            format_sig17(est.norm_gap),
            format_sig17(est.leading),
            format_sig17(est.m0_closed_form),
            format_sig17(est.m0_generic),
            verified_range,
        )
    };
    emit(out, &body(false), &body(true))
}

fn cmd_counts(m: u32, k: u32, out: Option<&Path>, meta: &RunMeta) -> Result<()> {
    let mut text = meta.comment_line();
    text.push_str("m,k,s,count\n");
    for s in 0..=k {
        let c = count_c(m as u64, k as u64, s as u64)?;
        text.push_str(&format!("{m},{k},{s},{}\n", c.to_decimal()));
    }
    emit(out, &text, &text)
}

#[allow(clippy::too_many_arguments)]
fn cmd_series(
    a: &Path,
    b: &Path,
    k: u32,
    tau: f64,
    truncate: u32,
    out: Option<&Path>,
    meta: &RunMeta,
    tol: &Tolerances,
) -> Result<()> {
    let (ma, mb) = load_pair(a, b, tol)?;
    let pa = normalize_phone(&ma, tol)?;
    let resolvent = resolvent_trace(&pa, &mb, k, tau, tol)?.value;
    let partial = series_partial_sum(&pa, &mb, k, tau, truncate, tol)?;
    let b_norm = operator_norm(mb.mat())?;
    let tail = series_tail_bound(pa.n(), b_norm, k, tau, truncate)?;
    let diff = (resolvent - partial).abs();
    let within = diff <= tail + 1e-12 * (1.0 + resolvent.abs());
    let body = |with_meta: bool| {
        let meta_line = if with_meta {
            format!("  \"meta\": {},\n", meta.json_object())
        } else {
            String::new()
        };
        format!(
            "{{\n{meta_line}  \"tau\": {},\n  \"k\": {k},\n  \"truncate\": {truncate},\n  \"resolvent\": {},\n  \"partial_sum\": {},\n  \"tail_bound\": {},\n  \"abs_diff\": {},\n  \"within_bound\": {within}\n}}\n",
            format_sig17(tau),
            format_sig17(resolvent),
            format_sig17(partial),
            format_sig17(tail),
            format_sig17(diff),
        )
    };
    emit(out, &body(false), &body(true))
}

#[allow(clippy::too_many_arguments)]
fn cmd_el(
    n: usize,
    m: u32,
    k: u32,
    p: f64,
    steps: u32,
    step_size: f64,
    shrink: f64,
    seed: u64,
    mode: &str,
    trajectory: Option<&Path>,
    out: Option<&Path>,
    meta: &RunMeta,
    tol: &Tolerances,
) -> Result<()> {
    let config = SearchConfig {
        p,
        steps,
        step_size,
        shrink,
        seed,
        mode: Mode::parse(mode)?,
    };
    let result = extremal_search(n, m, k, &config, tol)?;
    if let Some(path) = trajectory {
        let mut text = meta.comment_line();
        text.push_str("step,objective,combined\n");
        for pt in &result.trajectory {
            text.push_str(&format!(
                "{},{},{}\n",
                pt.step,
                format_sig17(pt.objective),
                format_sig17(pt.combined)
            ));
        }
        write_text(path, &text)?;
    }
    let r = &result.residuals;
    let body = |with_meta: bool| {
        let meta_line = if with_meta {
            format!("  \"meta\": {},\n", meta.json_object())
        } else {
            String::new()
        };
        format!(
            "{{\n{meta_line}  \"objective\": {},\n  \"commutator\": {},\n  \"pnormA\": {},\n  \"pnormB\": {},\n  \"combined\": {},\n  \"steps_accepted\": {},\n  \"final_step_size\": {}\n}}\n",
            format_sig17(result.objective),
            format_sig17(r.commutator),
            format_sig17(r.pnorm_a),
            format_sig17(r.pnorm_b),
            format_sig17(r.combined),
            result.steps_accepted,
            format_sig17(result.final_step_size),
        )
    };
    emit(out, &body(false), &body(true))
}

fn cmd_sample(n: usize, seed: u64, kind: &str, out: &Path, tol: &Tolerances) -> Result<()> {
    let kind = SampleKind::parse(kind)?;
    let p = sample_phone(n, seed, kind, tol)?;
    write_matrix(out, p.mat())
}
