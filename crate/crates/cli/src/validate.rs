use std::f64::consts::PI;

use kdv_utm::oracles::{mol_interface_solve, GridSpec};
use kdv_utm::{evaluate, stationary, ContourSpec, EvalOptions, Params, Request};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::fmt_num;

const KEYS: &[&str] = &["only", "a", "c", "threshold"];

const EVAL_TOL: f64 = 1e-10;
const SAMPLE_POINTS: usize = 12;
const TAU_TOL: f64 = 1e-7;
const INTERFACE_TOL: f64 = 1e-4;
/// Half-distance between the one-sided evaluation points at the interface.
const INTERFACE_OFFSET: f64 = 1e-7;
const RESCALING_TOL: f64 = 1e-7;
const DEFORMATION_TOL: f64 = 1e-7;
const MOL_TOL: f64 = 1e-3;
const MOL_TIME: f64 = 1.0;
/// Default bound on the distance to the stationary profile at t = 20,
/// matching the acceptance threshold.
const STATIONARY_THRESHOLD: f64 = 0.15;

pub const SUITES: &[&str] = &[
    "tau_invariance",
    "interface_continuity",
    "rescaling_identity",
    "deformation_invariance",
    "mol_agreement",
    "stationary_limit",
];

struct Check {
    name: String,
    measured: f64,
    tolerance: f64,
}

impl Check {
    fn new(name: impl Into<String>, measured: f64, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            measured,
            tolerance,
        }
    }

    fn passed(&self) -> bool {
        self.measured <= self.tolerance
    }
}

/// Evaluation failures count as an infinite deviation.
fn q(x: f64, t: f64, p: Params, options: EvalOptions<f64>, tau: Option<f64>) -> f64 {
    let mut req = Request::new(x, t, p).with_rel_tol(EVAL_TOL).with_options(options);
    req.tau = tau;
    evaluate(&req).map(|e| e.value).unwrap_or(f64::INFINITY)
}

/// Deterministic low-discrepancy points in `[−10, 10] × [0.1, 5]`.
fn sample_points() -> Vec<(f64, f64)> {
    let (g1, g2) = (0.754_877_666_246_692_8, 0.569_840_290_998_053_3);
    (1..=SAMPLE_POINTS)
        .map(|k| {
            let k = k as f64;
            (-10.0 + 20.0 * (0.5 + g1 * k).fract(), 0.1 + 4.9 * (0.5 + g2 * k).fract())
        })
        .collect()
}

fn max_over(points: &[(f64, f64)], f: impl Fn(f64, f64) -> f64 + Sync) -> f64 {
    points
        .par_iter()
        .map(|&(x, t)| f(x, t))
        .reduce(|| 0.0, |a, b| if a.is_nan() || b.is_nan() { f64::NAN } else { a.max(b) })
}

fn tau_invariance(p: Params) -> Vec<Check> {
    let opts = EvalOptions::default();
    let worst = max_over(&sample_points(), |x, t| {
        let a = q(x, t, p, opts, None);
        let b = q(x, t, p, opts, Some(1.5 * t + 0.1));
        (a - b).abs() / (1.0 + a.abs())
    });
    vec![Check::new("tau_invariance", worst, TAU_TOL)]
}

fn interface_continuity(p: Params) -> Vec<Check> {
    (0..3)
        .map(|m| {
            let opts = EvalOptions {
                derivative: m,
                ..EvalOptions::default()
            };
            let l = q(-INTERFACE_OFFSET, 1.0, p, opts, None);
            let r = q(INTERFACE_OFFSET, 1.0, p, opts, None);
            let jump = (l - r).abs() / l.abs().max(r.abs());
            Check::new(format!("interface_continuity_d{m}"), jump, INTERFACE_TOL)
        })
        .collect()
}

fn rescaling_identity(p: Params) -> Vec<Check> {
    let direct = EvalOptions {
        canonicalize: false,
        ..EvalOptions::default()
    };
    // q(x, t; 2a, 2c) = 2 q(x√2, 2√2 t; a, c)
    let doubled = Params::new(2.0 * p.a(), 2.0 * p.c()).expect("positive parameters");
    let s2 = 2f64.sqrt();
    let worst = max_over(&sample_points(), |x, t| {
        let t = t / 5.0;
        let v = q(x, t, doubled, direct, None);
        (v - 2.0 * q(x * s2, t * 2.0 * s2, p, direct, None)).abs()
    });
    vec![Check::new("rescaling_identity", worst, RESCALING_TOL)]
}

fn deformation_invariance(p: Params) -> Vec<Check> {
    let opts = |delta: f64| EvalOptions {
        contour: ContourSpec::default().with_delta(delta),
        ..EvalOptions::default()
    };
    let worst = max_over(&sample_points(), |x, t| {
        (q(x, t, p, opts(PI / 18.0), None) - q(x, t, p, opts(PI / 9.0), None)).abs()
    });
    vec![Check::new("deformation_invariance", worst, DEFORMATION_TOL)]
}

fn mol_agreement(p: Params) -> Vec<Check> {
    let xs: Vec<f64> = (0..=40).map(|i| -10.0 + 0.5 * i as f64).collect();
    let measured = match mol_interface_solve(&p, &GridSpec::mol_reference(&p), MOL_TIME, &xs) {
        Ok(mol) => xs
            .par_iter()
            .zip(&mol.values)
            .map(|(&x, m)| (q(x, MOL_TIME, p, EvalOptions::default(), None) - m).abs())
            .reduce(|| 0.0, f64::max),
        Err(e) => {
            eprintln!("kdv-utm: mol_agreement: {e}");
            f64::INFINITY
        }
    };
    vec![Check::new("mol_agreement", measured, MOL_TOL)]
}

fn stationary_limit(p: Params, threshold: f64) -> Vec<Check> {
    let canonical = Params::new(p.gamma(), 1.0).expect("positive ratio");
    let distance = (0..=200)
        .into_par_iter()
        .map(|i| {
            let x = -10.0 + 0.1 * i as f64;
            let s = stationary(x, &canonical).expect("oscillatory left state checked");
            (q(x, 20.0, canonical, EvalOptions::default(), None) - s).abs() / canonical.a()
        })
        .reduce(|| 0.0, f64::max);
    vec![Check::new("stationary_limit", distance, threshold)]
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.check_keys("validate", KEYS)?;
    let p = Params::new(cfg.f64_or("a", 1.0)?, cfg.f64_or("c", 4.0)?).map_err(|e| CliError::Config(e.to_string()))?;
    let threshold = cfg.f64_or("threshold", STATIONARY_THRESHOLD)?;
    let selected: Vec<&str> = match cfg.raw("only") {
        None => SUITES.to_vec(),
        Some(list) => {
            let names: Vec<&str> = list.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
            if let Some(bad) = names.iter().find(|n| !SUITES.contains(n)) {
                return Err(CliError::Config(format!(
                    "unknown suite `{bad}`; available: {}",
                    SUITES.join(", ")
                )));
            }
            names
        }
    };
    if selected.contains(&"stationary_limit") {
        p.require_oscillatory_left()
            .map_err(|e| CliError::Config(format!("stationary_limit: {e}")))?;
    }

    println!("name,status,measured,tolerance");
    let mut failed = 0;
    for suite in selected {
        let checks = match suite {
            "tau_invariance" => tau_invariance(p),
            "interface_continuity" => interface_continuity(p),
            "rescaling_identity" => rescaling_identity(p),
            "deformation_invariance" => deformation_invariance(p),
            "mol_agreement" => mol_agreement(p),
            "stationary_limit" => stationary_limit(p, threshold),
            _ => unreachable!("suite names are checked above"),
        };
        for c in checks {
            let ok = c.passed();
            failed += usize::from(!ok);
            println!(
                "{},{},{},{}",
                c.name,
                if ok { "pass" } else { "fail" },
                fmt_num(c.measured),
                fmt_num(c.tolerance)
            );
        }
    }
    if failed == 0 {
        Ok(())
    } else {
        Err(CliError::Check(format!("{failed} check(s) failed")))
    }
}
