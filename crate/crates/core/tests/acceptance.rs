//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits with
//! a nonzero status if any criterion fails.
//!
//! Run a subset with `cargo test -p kdv-utm --test acceptance -- 4 8`.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use kdv_utm::closed_forms::{airy_ai, lkdv_step, stationary, StationaryCoeffs};
use kdv_utm::oracles::{error_curves, mol_interface_solve, GridSpec};
use kdv_utm::utm::h_fn;
use kdv_utm::{evaluate, frame_map, ContourSpec, EvalOptions, Frame, Params, Request};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rayon::prelude::*;

// Tolerances and budgets, one block per criterion.
const C1_TOL: f64 = 1e-7;
const C1_BUDGET: Duration = Duration::from_secs(60);
const C2_TOL: f64 = 1e-4;
const C2_STEP: f64 = 1e-2;
const C2_BUDGET: Duration = Duration::from_secs(60);
const C3_TOL: f64 = 1e-2;
const C3_T: f64 = 1e-3;
const C4_TOL: f64 = 1e-3;
const C4_BUDGET: Duration = Duration::from_secs(300);
const C5_TOL: f64 = 1e-7;
/// Recorded from the convergence study in `long_time_limit`: D(20) is
/// 0.1376 with 201 and 401 sample points alike.
const C6_D20_THRESHOLD: f64 = 0.15;
const C8_BUDGET: Duration = Duration::from_secs(600);
const C9_TOL: f64 = 0.1;
const C10_AI0: f64 = 0.355_028_05;
const C10_AI_TOL: f64 = 1e-8;
const C10_IDENTITY_TOL: f64 = 1e-12;
const C11_TOL: f64 = 1e-7;

const EVAL_TOL: f64 = 1e-10;

struct Outcome {
    pass: bool,
    detail: String,
}

fn params(a: f64, c: f64) -> Params {
    Params::new(a, c).expect("valid parameters")
}

fn q_with(x: f64, t: f64, p: Params, options: EvalOptions<f64>, rel_tol: f64) -> f64 {
    evaluate(&Request::new(x, t, p).with_rel_tol(rel_tol).with_options(options))
        .unwrap_or_else(|e| panic!("evaluate({x}, {t}) failed: {e}"))
        .value
}

fn q(x: f64, t: f64, p: Params) -> f64 {
    q_with(x, t, p, EvalOptions::default(), EVAL_TOL)
}

/// `U(X, T)` for the parameters `p`, in the shifted canonical frame.
fn u_shifted(x: f64, t: f64, p: Params) -> f64 {
    let (xq, tq) = frame_map(x, t, Frame::Shifted, Frame::Traveling, &p);
    q(xq, tq, p) / p.a()
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..40 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 > f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Local maxima of `f` on `[lo, hi]`, located on `n` samples and refined.
fn local_maxima(f: impl Fn(f64) -> f64 + Sync, lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let h = (hi - lo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n).map(|i| lo + i as f64 * h).collect();
    let ys: Vec<f64> = xs.par_iter().map(|&x| f(x)).collect();
    let brackets: Vec<usize> = (1..n - 1).filter(|&i| ys[i] > ys[i - 1] && ys[i] >= ys[i + 1]).collect();
    brackets
        .par_iter()
        .map(|&i| golden_max(&f, xs[i - 1], xs[i + 1]))
        .collect()
}

/// Fornberg weights for derivatives `0..=2` at `z` from nodes `xs`.
fn fd_weights(z: f64, xs: &[f64]) -> [Vec<f64>; 3] {
    let n = xs.len();
    let mut c = vec![[0.0f64; 3]; n];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(2);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - z;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    [0, 1, 2].map(|k| c.iter().map(|row| row[k]).collect())
}

fn tau_invariance() -> Outcome {
    let p = params(1.0, 4.0);
    let mut rng = StdRng::seed_from_u64(1);
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.gen_range(-10.0..10.0), rng.gen_range(0.1..5.0)))
        .collect();
    let worst = pts
        .par_iter()
        .map(|&(x, t)| {
            let a = q(x, t, p);
            let b = evaluate(&Request::new(x, t, p).with_tau(1.5 * t + 0.1)).unwrap().value;
            (a - b).abs() / (1.0 + a.abs())
        })
        .reduce(|| 0.0, f64::max);
    Outcome {
        pass: worst <= C1_TOL,
        detail: format!("max |Δq|/(1+|q|) = {worst:.2e} (tol {C1_TOL:.0e})"),
    }
}

fn interface_continuity() -> Outcome {
    let p = params(1.0, 4.0);
    let nodes: Vec<f64> = (1..=6).map(|k| k as f64 * C2_STEP).collect();
    let left: Vec<f64> = nodes.iter().map(|x| -x).collect();
    let sample = |xs: &[f64]| -> Vec<f64> {
        xs.par_iter()
            .map(|&x| q_with(x, 1.0, p, EvalOptions::default(), 1e-12))
            .collect()
    };
    let (fr, fl) = (sample(&nodes), sample(&left));
    let (wr, wl) = (fd_weights(0.0, &nodes), fd_weights(0.0, &left));
    let mut worst: f64 = 0.0;
    let mut parts = Vec::new();
    for j in 0..3 {
        let r: f64 = wr[j].iter().zip(&fr).map(|(w, f)| w * f).sum();
        let l: f64 = wl[j].iter().zip(&fl).map(|(w, f)| w * f).sum();
        let rel = (r - l).abs() / r.abs().max(l.abs());
        worst = worst.max(rel);
        parts.push(format!("∂^{j}: {l:.6} | {r:.6}"));
    }
    Outcome {
        pass: worst <= C2_TOL,
        detail: format!("{}; max relative jump {worst:.2e} (tol {C2_TOL:.0e})", parts.join(", ")),
    }
}

fn datum_recovery() -> Outcome {
    let p = params(1.0, 4.0);
    let xs: Vec<f64> = (0..20)
        .map(|i| -5.0 + 4.5 * i as f64 / 19.0)
        .chain((0..20).map(|i| 0.5 + 4.5 * i as f64 / 19.0))
        .collect();
    let dev: Vec<(f64, f64, f64)> = xs
        .par_iter()
        .map(|&x| {
            let datum = if x < 0.0 { 1.0 } else { 0.0 };
            (x, (q(x, C3_T, p) - datum).abs(), (lkdv_step(x, C3_T, 1.0) - datum).abs())
        })
        .collect();
    let failing: Vec<&(f64, f64, f64)> = dev.iter().filter(|d| d.1 > C3_TOL).collect();
    let worst = dev.iter().fold((0.0, 0.0, 0.0), |m, d| if d.1 > m.1 { *d } else { m });
    let worst_right = dev.iter().filter(|d| d.0 > 0.0).map(|d| d.1).fold(0.0, f64::max);
    Outcome {
        pass: failing.is_empty(),
        detail: format!(
            "{}/40 points exceed {C3_TOL:.0e}; worst |q − u0| = {:.3e} at x = {:.3} (linear KdV similarity \
             solution deviates by {:.3e} there); worst for x > 0: {worst_right:.2e}",
            failing.len(),
            worst.1,
            worst.0,
            worst.2
        ),
    }
}

fn oracle_equivalence() -> Outcome {
    let p = params(1.0, 4.0);
    let xs: Vec<f64> = (0..=80).map(|i| -10.0 + 0.25 * i as f64).collect();
    let grid = GridSpec::mol_reference(&p);
    let mut pass = true;
    let mut parts = Vec::new();
    for t in [0.5, 1.0] {
        match mol_interface_solve(&p, &grid, t, &xs) {
            Ok(mol) => {
                let sup = xs
                    .par_iter()
                    .zip(&mol.values)
                    .map(|(&x, m)| (q(x, t, p) - m).abs())
                    .reduce(|| 0.0, f64::max);
                pass &= sup <= C4_TOL;
                parts.push(format!(
                    "t={t}: sup {sup:.2e} (oracle estimate {:.1e}, cells {:?})",
                    mol.error_estimate, mol.cells
                ));
            }
            Err(e) => {
                pass = false;
                parts.push(format!("t={t}: oracle failed: {e}"));
            }
        }
    }
    Outcome {
        pass,
        detail: format!("{} (tol {C4_TOL:.0e})", parts.join("; ")),
    }
}

fn rescaling_identity() -> Outcome {
    let direct = EvalOptions {
        canonicalize: false,
        ..EvalOptions::default()
    };
    let big = params(2.0, 8.0);
    let canon = params(0.25, 1.0);
    let unit = params(1.0, 4.0);
    let mut rng = StdRng::seed_from_u64(5);
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.gen_range(-5.0..5.0), rng.gen_range(0.05..1.0)))
        .collect();
    let (worst_c, worst_a) = pts
        .par_iter()
        .map(|&(x, t)| {
            let v = q_with(x, t, big, direct, EVAL_TOL);
            // q(x,t;a,c) = a Q(x√c, t c^{3/2}) with Q = q(·;γ,1)/γ
            let sc = 8f64.sqrt();
            let via_c = 2.0 * q_with(x * sc, t * 8.0 * sc, canon, direct, EVAL_TOL) / 0.25;
            // q(x,t;a,c) = a q(x√a, t a^{3/2}; 1, c/a)
            let sa = 2f64.sqrt();
            let via_a = 2.0 * q_with(x * sa, t * 2.0 * sa, unit, direct, EVAL_TOL);
            ((v - via_c).abs(), (v - via_a).abs())
        })
        .reduce(|| (0.0, 0.0), |m, d| (m.0.max(d.0), m.1.max(d.1)));
    Outcome {
        pass: worst_c <= C5_TOL && worst_a <= C5_TOL,
        detail: format!(
            "max |q(2,8) − 2Q| = {worst_c:.2e}, max |q(2,8) − 2q(1,4)| = {worst_a:.2e} (tol {C5_TOL:.0e})"
        ),
    }
}

fn long_time_limit() -> Outcome {
    let p = params(0.25, 1.0);
    let dist = |t: f64, n: usize| {
        (0..n)
            .into_par_iter()
            .map(|i| {
                let x = -10.0 + 20.0 * i as f64 / (n - 1) as f64;
                (q(x, t, p) - stationary(x, &p).unwrap()).abs() / p.a()
            })
            .reduce(|| 0.0, f64::max)
    };
    let d5 = dist(5.0, 201);
    let d10 = dist(10.0, 201);
    let d20 = dist(20.0, 201);
    let d20_fine = dist(20.0, 401);
    Outcome {
        pass: d20 < d10 && d10 < d5 && d20.max(d20_fine) < C6_D20_THRESHOLD,
        detail: format!(
            "D(5) = {d5:.4}, D(10) = {d10:.4}, D(20) = {d20:.4} (401 samples: {d20_fine:.4}), \
             threshold {C6_D20_THRESHOLD}"
        ),
    }
}

fn amplitude_growth() -> Outcome {
    let p = params(1.0, 4.0);
    let maxima: Vec<f64> = [0.1, 0.5, 1.5, 2.75]
        .iter()
        .map(|&t| {
            local_maxima(|x| u_shifted(x, t, p), -15.0, 10.0, 512)
                .into_iter()
                .map(|m| m.1)
                .fold(f64::MIN, f64::max)
        })
        .collect();
    let increasing = maxima.windows(2).all(|w| w[1] > w[0]);
    Outcome {
        pass: increasing,
        detail: format!("max U at t = 0.1, 0.5, 1.5, 2.75: {maxima:.4?}"),
    }
}

fn error_domination() -> Outcome {
    let grid = GridSpec::kdv_reference();
    let results: Vec<(f64, kdv_utm::Result<kdv_utm::oracles::ErrorCurves>)> = [1.0, 0.5, 0.25]
        .par_iter()
        .map(|&a| (a, error_curves(a, 0.1, &grid)))
        .collect();
    let mut pass = true;
    let mut parts = Vec::new();
    for (a, r) in results {
        match r {
            Ok(e) => {
                let slack = e.refinement_difference / a;
                let ok = e.max_model() + slack < e.max_lkdv() - slack;
                pass &= ok;
                parts.push(format!(
                    "a={a}: max e_model {:.4} < max e_lkdv {:.4} (refinement {:.1e})",
                    e.max_model(),
                    e.max_lkdv(),
                    e.refinement_difference
                ));
            }
            Err(err) => {
                pass = false;
                parts.push(format!("a={a}: {err}"));
            }
        }
    }
    Outcome {
        pass,
        detail: parts.join("; "),
    }
}

fn peak_collinearity() -> Outcome {
    let p = params(1.0, 4.0);
    let mut peaks = local_maxima(|x| u_shifted(x, 2.75, p), -15.0, 10.0, 1024);
    peaks.sort_by(|a, b| b.1.total_cmp(&a.1));
    peaks.truncate(3);
    if peaks.len() < 3 {
        return Outcome {
            pass: false,
            detail: format!("only {} local maxima found", peaks.len()),
        };
    }
    peaks.sort_by(|a, b| a.0.total_cmp(&b.0));
    let (l, m, r) = (peaks[0], peaks[1], peaks[2]);
    let (dx, dy) = (r.0 - l.0, r.1 - l.1);
    let cross = dx * (m.1 - l.1) - dy * (m.0 - l.0);
    let height = peaks.iter().map(|p| p.1).fold(f64::MIN, f64::max);
    let residual = cross.abs() / (dx * dx + dy * dy).sqrt() / height;
    let vertical = (m.1 - (l.1 + dy * (m.0 - l.0) / dx)).abs() / height;
    Outcome {
        pass: residual <= C9_TOL,
        detail: format!(
            "peaks (x, U) = ({:.3}, {:.4}), ({:.3}, {:.4}), ({:.3}, {:.4}); residual {residual:.2e} \
             (vertical {vertical:.2e}, tol {C9_TOL})",
            l.0, l.1, m.0, m.1, r.0, r.1
        ),
    }
}

fn closed_form_checks() -> Outcome {
    let zero = kdv_utm::Complex64::new(0.0, 0.0);
    let h_exact = [0.0, 1e-9, 0.3, 1.0, 7.5].iter().all(|&tau| h_fn(zero, tau) == kdv_utm::Complex64::new(tau, 0.0));
    let mut rng = StdRng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let a: f64 = rng.gen_range(0.01..5.0);
        let c = 6.0 * a * rng.gen_range(0.01..0.99);
        let s = StationaryCoeffs::new(&params(a, c)).unwrap();
        let k = (6.0 * a - c).sqrt();
        let rc = c.sqrt();
        let scale = 1.0 + a + c;
        let checks = [
            s.c1,
            s.c2,
            s.b1 - a,
            s.c3 - (a - c / 6.0),
            s.b2 + (c / (6.0 * a - c)).sqrt() * (a - c / 6.0),
            s.b3 + c / 6.0,
            // value, slope and curvature match at the interface
            (s.b1 + s.b3) - (s.c1 + s.c2 + s.c3),
            k * s.b2 - rc * (s.c2 - s.c3),
            -k * k * s.b3 - c * (s.c2 + s.c3),
        ];
        worst = checks.iter().fold(worst, |m, v| m.max(v.abs() / (scale * scale)));
    }
    let ai0 = airy_ai(0.0_f64);
    let ai_ok = (ai0 - C10_AI0).abs() <= C10_AI_TOL;
    Outcome {
        pass: h_exact && worst <= C10_IDENTITY_TOL && ai_ok,
        detail: format!(
            "h(0;τ) = τ exactly: {h_exact}; stationary identities max residual {worst:.1e} (tol {C10_IDENTITY_TOL:.0e}); \
             Ai(0) = {ai0:.10}"
        ),
    }
}

fn deformation_invariance() -> Outcome {
    let p = params(1.0, 4.0);
    let opts = |delta: f64| EvalOptions {
        contour: ContourSpec::default().with_delta(delta),
        ..EvalOptions::default()
    };
    let mut rng = StdRng::seed_from_u64(11);
    let pts: Vec<(f64, f64)> = (0..20)
        .map(|_| (rng.gen_range(-10.0..10.0), rng.gen_range(0.1..5.0)))
        .collect();
    let worst = pts
        .par_iter()
        .map(|&(x, t)| (q_with(x, t, p, opts(PI / 18.0), EVAL_TOL) - q_with(x, t, p, opts(PI / 9.0), EVAL_TOL)).abs())
        .reduce(|| 0.0, f64::max);
    Outcome {
        pass: worst <= C11_TOL,
        detail: format!("max |q(π/18) − q(π/9)| = {worst:.2e} (tol {C11_TOL:.0e})"),
    }
}

type Criterion = (u32, &'static str, fn() -> Outcome, Option<Duration>);

fn main() {
    let criteria: [Criterion; 11] = [
        (1, "tau invariance", tau_invariance, Some(C1_BUDGET)),
        (2, "interface continuity", interface_continuity, Some(C2_BUDGET)),
        (3, "datum recovery", datum_recovery, None),
        (4, "oracle equivalence", oracle_equivalence, Some(C4_BUDGET)),
        (5, "rescaling identity", rescaling_identity, None),
        (6, "long-time limit", long_time_limit, None),
        (7, "amplitude growth", amplitude_growth, None),
        (8, "error domination", error_domination, Some(C8_BUDGET)),
        (9, "peak collinearity", peak_collinearity, None),
        (10, "closed-form checks", closed_form_checks, None),
        (11, "deformation invariance", deformation_invariance, None),
    ];
    let selected: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let mut failed = Vec::new();
    for (id, name, run, budget) in criteria {
        if !selected.is_empty() && !selected.contains(&id) {
            continue;
        }
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_budget = budget.is_none_or(|b| elapsed <= b);
        let pass = outcome.pass && in_budget;
        let budget_note = match budget {
            Some(b) if !in_budget => format!(", over budget {b:?}"),
            _ => String::new(),
        };
        println!(
            "criterion {id:>2} [{}] {name}: {} ({:.1?}{budget_note})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all selected criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
