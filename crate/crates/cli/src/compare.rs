use std::path::PathBuf;

use kdv_utm::oracles::{error_curves_in, ErrorCurves, GridSpec, ERROR_WINDOW};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt_num, write_csv, Plot, Series};

const KEYS: &[&str] = &["a", "t", "window_min", "window_max", "kdv_x_max", "kdv_n", "kdv_dt", "out_dir"];

pub fn file_stem(a: f64, t: f64) -> String {
    format!("compare_a{}_t{}", fmt_num(a), fmt_num(t))
}

fn write_curves(out_dir: &std::path::Path, e: &ErrorCurves) -> Result<(), CliError> {
    let stem = file_stem(e.a, e.t);
    let rows: Vec<Vec<String>> = e
        .x
        .iter()
        .zip(e.e_model.iter().zip(&e.e_lkdv))
        .map(|(x, (m, l))| vec![fmt_num(*x), fmt_num(*m), fmt_num(*l)])
        .collect();
    write_csv(&out_dir.join(format!("{stem}.csv")), &["x", "e_model", "e_lkdv"], &rows)?;
    let curve = |ys: &[f64]| e.x.iter().copied().zip(ys.iter().copied()).collect();
    Plot {
        title: format!("relative errors, a={} t={}", fmt_num(e.a), fmt_num(e.t)),
        x_label: "x".into(),
        y_label: "error".into(),
        series: vec![
            Series {
                label: "e_model".into(),
                points: curve(&e.e_model),
                dashed: false,
            },
            Series {
                label: "e_lkdv".into(),
                points: curve(&e.e_lkdv),
                dashed: true,
            },
        ],
    }
    .write(&out_dir.join(format!("{stem}.svg")))?;
    Ok(())
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    cfg.check_keys("compare", KEYS)?;
    let amplitudes = cfg.f64_list("a")?.unwrap_or_default();
    if amplitudes.is_empty() {
        return Err(CliError::Usage("compare needs a nonempty amplitude list, e.g. a=1,0.5,0.25".into()));
    }
    if let Some(a) = amplitudes.iter().find(|a| **a <= 0.0) {
        return Err(CliError::Config(format!("amplitudes must be positive, got {a}")));
    }
    let t = cfg.f64_or("t", 0.1)?;
    if t <= 0.0 {
        return Err(CliError::Config(format!("t must be positive, got {t}")));
    }
    let window = (
        cfg.f64_or("window_min", ERROR_WINDOW.0)?,
        cfg.f64_or("window_max", ERROR_WINDOW.1)?,
    );
    let reference = GridSpec::kdv_reference();
    let half = cfg.f64_or("kdv_x_max", reference.x_max)?;
    let grid = GridSpec::new(
        -half,
        half,
        cfg.usize_or("kdv_n", reference.n)?,
        cfg.f64_or("kdv_dt", reference.dt)?,
    )
    .map_err(|e| CliError::Config(e.to_string()))?;
    if !(grid.x_min < window.0 && window.0 < window.1 && window.1 < grid.x_max) {
        return Err(CliError::Config(format!(
            "window [{}, {}] must be nonempty and inside the KdV domain [{}, {}]",
            window.0, window.1, grid.x_min, grid.x_max
        )));
    }
    let out_dir = PathBuf::from(cfg.string_or("out_dir", "."));
    std::fs::create_dir_all(&out_dir)?;

    let results: Vec<_> = amplitudes
        .par_iter()
        .map(|&a| (a, error_curves_in(a, t, &grid, window)))
        .collect();

    println!("a,t,max_e_model,max_e_lkdv,refinement_difference,model_dominated");
    let mut failures = Vec::new();
    for (a, r) in results {
        match r {
            Ok(e) => {
                write_curves(&out_dir, &e)?;
                println!(
                    "{},{},{},{},{},{}",
                    fmt_num(a),
                    fmt_num(t),
                    fmt_num(e.max_model()),
                    fmt_num(e.max_lkdv()),
                    fmt_num(e.refinement_difference),
                    e.max_model() < e.max_lkdv()
                );
            }
            Err(err) => {
                eprintln!("kdv-utm: compare a={}: {err}", fmt_num(a));
                failures.push(fmt_num(a));
            }
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(CliError::Check(format!("no result for a = {}", failures.join(", "))))
    }
}
