use std::path::{Path, PathBuf};

use kdv_utm::{evaluate_profile, frame_map, stationary, EvalOptions, Frame, Params, ProfileGrid};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{csv_text, fmt_num, write_csv, Plot, Series};

const KEYS: &[&str] = &[
    "a", "c", "t", "x_min", "x_max", "n", "frame", "tau_factor", "rel_tol", "overlay", "out_dir",
];

/// Largest fraction of failed points tolerated before the run fails.
const MAX_FAILED_FRACTION: f64 = 0.01;

struct Settings {
    params: Params,
    times: Vec<f64>,
    grid: ProfileGrid<f64>,
    frame: Frame,
    tau_factor: f64,
    rel_tol: f64,
    overlay: bool,
    out_dir: PathBuf,
}

fn parse_frame(s: &str) -> Result<Frame, CliError> {
    match s {
        "shifted" => Ok(Frame::Shifted),
        "traveling" => Ok(Frame::Traveling),
        "lab" => Ok(Frame::Lab),
        other => Err(CliError::Config(format!("frame must be shifted, traveling or lab, got `{other}`"))),
    }
}

fn settings(cfg: &RunConfig) -> Result<Settings, CliError> {
    cfg.check_keys("profile", KEYS)?;
    let params = Params::new(cfg.f64_or("a", 1.0)?, cfg.f64_or("c", 4.0)?)
        .map_err(|e| CliError::Config(e.to_string()))?;
    let times = cfg.f64_list("t")?.unwrap_or_default();
    if times.is_empty() {
        return Err(CliError::Usage("profile needs a nonempty time list, e.g. t=0.1,0.5".into()));
    }
    if let Some(t) = times.iter().find(|t| **t < 0.0) {
        return Err(CliError::Config(format!("times must be nonnegative, got {t}")));
    }
    let grid = ProfileGrid {
        x_min: cfg.f64_or("x_min", -15.0)?,
        x_max: cfg.f64_or("x_max", 10.0)?,
        n: cfg.usize_or("n", 512)?,
    };
    if grid.n < 2 || grid.x_min >= grid.x_max {
        return Err(CliError::Config("need n ≥ 2 and x_min < x_max".into()));
    }
    let tau_factor = cfg.f64_or("tau_factor", 1.0)?;
    if tau_factor < 1.0 {
        return Err(CliError::Config(format!("tau_factor must be at least 1, got {tau_factor}")));
    }
    let rel_tol = cfg.f64_or("rel_tol", 1e-10)?;
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        return Err(CliError::Config(format!("rel_tol must lie in (0, 1), got {rel_tol}")));
    }
    let overlay = match cfg.string_or("overlay", "none") {
        "none" => false,
        "stationary" => {
            params
                .require_oscillatory_left()
                .map_err(|e| CliError::Config(format!("overlay=stationary: {e}")))?;
            true
        }
        other => return Err(CliError::Config(format!("overlay must be none or stationary, got `{other}`"))),
    };
    Ok(Settings {
        params,
        times,
        grid,
        frame: parse_frame(cfg.string_or("frame", "shifted"))?,
        tau_factor,
        rel_tol,
        overlay,
        out_dir: PathBuf::from(cfg.string_or("out_dir", ".")),
    })
}

fn frame_name(frame: Frame) -> &'static str {
    match frame {
        Frame::Shifted => "shifted",
        Frame::Traveling => "traveling",
        Frame::Lab => "lab",
    }
}

pub fn file_stem(a: f64, c: f64, t: f64) -> String {
    format!("profile_a{}_c{}_t{}", fmt_num(a), fmt_num(c), fmt_num(t))
}

/// Writes the files for one time and returns the number of failed points.
fn one_time(s: &Settings, t: f64) -> Result<usize, CliError> {
    let p = &s.params;
    let xs = s.grid.points();
    // every point of a profile shares the traveling-frame time
    let (_, tq) = frame_map(xs[0], t, s.frame, Frame::Traveling, p);
    let xq: Vec<f64> = xs.iter().map(|&x| frame_map(x, t, s.frame, Frame::Traveling, p).0).collect();
    let scale = if s.frame == Frame::Shifted { 1.0 / p.a() } else { 1.0 };
    let samples = evaluate_profile(&xq, tq, p, Some(s.tau_factor * tq), s.rel_tol, &EvalOptions::default());

    let mut rows = Vec::with_capacity(xs.len());
    let mut curve = Vec::with_capacity(xs.len());
    let mut failed = 0;
    for (x, sample) in xs.iter().zip(&samples) {
        match &sample.outcome {
            Ok(ev) => {
                let v = ev.value * scale;
                rows.push(vec![fmt_num(*x), fmt_num(v), fmt_num(ev.error_estimate * scale), String::new()]);
                curve.push((*x, v));
            }
            Err(e) => {
                failed += 1;
                rows.push(vec![fmt_num(*x), String::new(), String::new(), csv_text(&e.to_string())]);
                curve.push((*x, f64::NAN));
            }
        }
    }

    let stem = file_stem(p.a(), p.c(), t);
    let csv = s.out_dir.join(format!("{stem}.csv"));
    write_csv(&csv, &["x", "value", "error_estimate", "error"], &rows)?;

    let label = if s.frame == Frame::Shifted { "U" } else { "q" };
    let mut series = vec![Series {
        label: format!("{label}(x, {})", fmt_num(t)),
        points: curve,
        dashed: false,
    }];
    if s.overlay {
        let points = xq
            .iter()
            .zip(&xs)
            .map(|(&xqi, &x)| (x, stationary(xqi, p).map(|v| v * scale).unwrap_or(f64::NAN)))
            .collect();
        series.push(Series {
            label: "stationary".into(),
            points,
            dashed: true,
        });
    }
    let plot = Plot {
        title: format!("t={} a={} c={} ({} frame)", fmt_num(t), fmt_num(p.a()), fmt_num(p.c()), frame_name(s.frame)),
        x_label: "x".into(),
        y_label: label.into(),
        series,
    };
    let svg = s.out_dir.join(format!("{stem}.svg"));
    plot.write(&svg)?;
    report(&csv, &svg, failed, xs.len());
    Ok(failed)
}

fn report(csv: &Path, svg: &Path, failed: usize, total: usize) {
    println!("wrote {} and {} ({failed}/{total} points failed)", csv.display(), svg.display());
}

pub fn run(cfg: &RunConfig) -> Result<(), CliError> {
    let s = settings(cfg)?;
    std::fs::create_dir_all(&s.out_dir)?;
    let mut failed = 0;
    for &t in &s.times {
        failed += one_time(&s, t)?;
    }
    let total = s.times.len() * s.grid.n;
    if failed as f64 > MAX_FAILED_FRACTION * total as f64 {
        return Err(CliError::Check(format!("{failed} of {total} points failed to evaluate")));
    }
    Ok(())
}
