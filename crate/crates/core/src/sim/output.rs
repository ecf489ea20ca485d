//! Simulation artifacts: full-precision CSV, SVG plots, and a JSON summary.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::Result;
use crate::sim::{ScenarioConfig, TrajectoryRecord};

/// Files written by [`emit_outputs`].
#[derive(Debug, Clone)]
pub struct OutputPaths {
    pub trajectory_csv: PathBuf,
    pub trajectory_svg: PathBuf,
    pub lyapunov_svg: PathBuf,
    pub summary_json: PathBuf,
}

/// Scalar digest of a run, serialized to `summary.json`.
#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub group: String,
    pub integrator: String,
    pub dt: f64,
    pub duration: f64,
    pub steps: usize,
    pub records: usize,
    pub k1: f64,
    pub k2: f64,
    pub lyapunov_initial: f64,
    pub lyapunov_final: f64,
    /// final / initial cost (1.0 if the initial cost is zero).
    pub lyapunov_ratio: f64,
    /// Least-squares slope of log₁₀ ℒ over the whole run, in decades/s.
    pub log10_lyapunov_slope: f64,
    pub err_pose_final: f64,
    pub err_offset_final: f64,
    pub max_constraint_residual: f64,
}

/// Full-precision float formatting. Scientific notation with 17
/// significant digits round-trips f64 exactly, which is what makes
/// repeated runs byte-identical.
fn fmt_full(x: f64) -> String {
    format!("{x:.17e}")
}

/// Ordinary least-squares slope of y against x.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let m = points.len() as f64;
    if points.len() < 2 {
        return 0.0;
    }
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / m;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// log₁₀ with a floor so exact zeros stay plottable.
fn log10_floor(x: f64) -> f64 {
    x.max(1e-300).log10()
}

/// Computes the scalar digest of a run.
pub fn summarize(cfg: &ScenarioConfig, records: &[TrajectoryRecord]) -> Summary {
    let first = records.first();
    let last = records.last();
    let l0 = first.map_or(0.0, |r| r.lyapunov);
    let lf = last.map_or(0.0, |r| r.lyapunov);
    let slope = least_squares_slope(
        &records
            .iter()
            .map(|r| (r.t, log10_floor(r.lyapunov)))
            .collect::<Vec<_>>(),
    );
    let max_res = records
        .iter()
        .map(|r| r.res_true_pose.max(r.res_observer).max(r.res_lifted))
        .fold(0.0, f64::max);
    Summary {
        group: cfg.group.clone(),
        integrator: format!("{:?}", cfg.integrator).to_lowercase(),
        dt: cfg.dt,
        duration: cfg.duration,
        steps: records.last().map_or(0, |r| r.step),
        records: records.len(),
        k1: cfg.gains.k1,
        k2: cfg.gains.k2,
        lyapunov_initial: l0,
        lyapunov_final: lf,
        lyapunov_ratio: if l0 > 0.0 { lf / l0 } else { 1.0 },
        log10_lyapunov_slope: slope,
        err_pose_final: last.map_or(0.0, |r| r.err_pose_norm),
        err_offset_final: last.map_or(0.0, |r| r.err_offset_norm),
        max_constraint_residual: max_res,
    }
}

/// Writes trajectory.csv, trajectory.svg, lyapunov.svg, and summary.json
/// into `out_dir` (created if missing).
pub fn emit_outputs(
    cfg: &ScenarioConfig,
    records: &[TrajectoryRecord],
    out_dir: impl AsRef<Path>,
) -> Result<OutputPaths> {
    let out_dir = out_dir.as_ref();
    std::fs::create_dir_all(out_dir)?;
    let sc = cfg.build()?;
    let n = sc.desc.embedding_dim();
    let d = sc.desc.algebra_dim();

    let paths = OutputPaths {
        trajectory_csv: out_dir.join("trajectory.csv"),
        trajectory_svg: out_dir.join("trajectory.svg"),
        lyapunov_svg: out_dir.join("lyapunov.svg"),
        summary_json: out_dir.join("summary.json"),
    };

    write_trajectory_csv(&paths.trajectory_csv, records, n, d)?;
    std::fs::write(&paths.trajectory_svg, trajectory_svg(records, n))?;
    std::fs::write(&paths.lyapunov_svg, lyapunov_svg(records))?;
    let summary = summarize(cfg, records);
    std::fs::write(&paths.summary_json, serde_json::to_string_pretty(&summary)?)?;
    Ok(paths)
}

fn write_trajectory_csv(
    path: &Path,
    records: &[TrajectoryRecord],
    n: usize,
    d: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;

    let mut header: Vec<String> = vec!["t".into()];
    let mat_cols = |prefix: &str, header: &mut Vec<String>| {
        for i in 0..n {
            for j in 0..n {
                header.push(format!("{prefix}_{i}_{j}"));
            }
        }
    };
    let vec_cols = |prefix: &str, header: &mut Vec<String>| {
        for k in 0..d {
            header.push(format!("{prefix}_{k}"));
        }
    };
    mat_cols("P_true", &mut header);
    vec_cols("V_true", &mut header);
    mat_cols("P_est", &mut header);
    vec_cols("V_est", &mut header);
    header.extend(
        [
            "lyapunov",
            "lyapunov_rate",
            "err_pose",
            "err_offset",
            "res_P_true",
            "res_A_hat",
            "res_A_lift",
        ]
        .map(String::from),
    );
    w.write_record(&header)?;

    for r in records {
        let mut row: Vec<String> = Vec::with_capacity(header.len());
        row.push(fmt_full(r.t));
        for v in r
            .true_pose
            .iter()
            .chain(&r.true_vel)
            .chain(&r.est_pose)
            .chain(&r.est_vel)
        {
            row.push(fmt_full(*v));
        }
        for v in [
            r.lyapunov,
            r.lyapunov_rate,
            r.err_pose_norm,
            r.err_offset_norm,
            r.res_true_pose,
            r.res_observer,
            r.res_lifted,
        ] {
            row.push(fmt_full(v));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

// ---- minimal SVG plotting -------------------------------------------------

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 52.0;

struct Frame {
    x_min: f64,
    x_max: f64,
    y_min: f64,
    y_max: f64,
}

impl Frame {
    fn from_points<'a>(points: impl Iterator<Item = &'a (f64, f64)>) -> Frame {
        let mut f = Frame {
            x_min: f64::INFINITY,
            x_max: f64::NEG_INFINITY,
            y_min: f64::INFINITY,
            y_max: f64::NEG_INFINITY,
        };
        for &(x, y) in points {
            f.x_min = f.x_min.min(x);
            f.x_max = f.x_max.max(x);
            f.y_min = f.y_min.min(y);
            f.y_max = f.y_max.max(y);
        }
        if !f.x_min.is_finite() {
            f = Frame {
                x_min: 0.0,
                x_max: 1.0,
                y_min: 0.0,
                y_max: 1.0,
            };
        }
        // Pad by 5% (and avoid degenerate spans).
        let pad = |lo: &mut f64, hi: &mut f64| {
            let span = (*hi - *lo).max(1e-12);
            *lo -= 0.05 * span;
            *hi += 0.05 * span;
        };
        pad(&mut f.x_min, &mut f.x_max);
        pad(&mut f.y_min, &mut f.y_max);
        f
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let px = MARGIN + (x - self.x_min) / (self.x_max - self.x_min) * (W - 2.0 * MARGIN);
        // SVG y grows downward.
        let py = H - MARGIN - (y - self.y_min) / (self.y_max - self.y_min) * (H - 2.0 * MARGIN);
        (px, py)
    }
}

fn svg_open(title: &str) -> String {
    format!(
        concat!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" ",
            "viewBox=\"0 0 {w} {h}\">\n",
            "<rect width=\"{w}\" height=\"{h}\" fill=\"white\"/>\n",
            "<text x=\"{cx}\" y=\"24\" text-anchor=\"middle\" ",
            "font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n"
        ),
        w = W,
        h = H,
        cx = W / 2.0,
        title = title
    )
}

fn svg_frame(out: &mut String, f: &Frame, x_label: &str, y_label: &str) {
    let _ = write!(
        out,
        concat!(
            "<rect x=\"{m}\" y=\"{m}\" width=\"{iw}\" height=\"{ih}\" fill=\"none\" ",
            "stroke=\"#999\"/>\n",
            "<text x=\"{cx}\" y=\"{bx}\" text-anchor=\"middle\" font-family=\"sans-serif\" ",
            "font-size=\"12\">{xl}</text>\n",
            "<text x=\"14\" y=\"{cy}\" text-anchor=\"middle\" font-family=\"sans-serif\" ",
            "font-size=\"12\" transform=\"rotate(-90 14 {cy})\">{yl}</text>\n",
            "<text x=\"{m}\" y=\"{bx}\" text-anchor=\"start\" font-family=\"sans-serif\" ",
            "font-size=\"10\" fill=\"#555\">{x0:.3}</text>\n",
            "<text x=\"{xr}\" y=\"{bx}\" text-anchor=\"end\" font-family=\"sans-serif\" ",
            "font-size=\"10\" fill=\"#555\">{x1:.3}</text>\n",
            "<text x=\"{yt}\" y=\"{yb}\" text-anchor=\"end\" font-family=\"sans-serif\" ",
            "font-size=\"10\" fill=\"#555\">{y0:.3}</text>\n",
            "<text x=\"{yt}\" y=\"{m}\" text-anchor=\"end\" font-family=\"sans-serif\" ",
            "font-size=\"10\" fill=\"#555\" dy=\"0.6em\">{y1:.3}</text>\n"
        ),
        m = MARGIN,
        iw = W - 2.0 * MARGIN,
        ih = H - 2.0 * MARGIN,
        cx = W / 2.0,
        bx = H - 14.0,
        cy = H / 2.0,
        xl = x_label,
        yl = y_label,
        x0 = f.x_min,
        x1 = f.x_max,
        xr = W - MARGIN,
        y0 = f.y_min,
        y1 = f.y_max,
        yt = MARGIN - 6.0,
        yb = H - MARGIN,
    );
}

fn svg_polyline(out: &mut String, f: &Frame, pts: &[(f64, f64)], style: &str) {
    if pts.is_empty() {
        return;
    }
    let mut coords = String::new();
    for &(x, y) in pts {
        let (px, py) = f.map(x, y);
        let _ = write!(coords, "{px:.2},{py:.2} ");
    }
    let _ = writeln!(
        out,
        "<polyline fill=\"none\" {style} points=\"{}\"/>",
        coords.trim_end()
    );
}

/// Star marker for trajectory starts.
fn svg_star(out: &mut String, cx: f64, cy: f64, color: &str) {
    let mut pts = String::new();
    for k in 0..10 {
        let r = if k % 2 == 0 { 7.0 } else { 3.0 };
        let ang = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / 5.0;
        let _ = write!(pts, "{:.2},{:.2} ", cx + r * ang.cos(), cy + r * ang.sin());
    }
    let _ = writeln!(
        out,
        "<polygon points=\"{}\" fill=\"{color}\" stroke=\"none\"/>",
        pts.trim_end()
    );
}

fn svg_circle(out: &mut String, cx: f64, cy: f64, color: &str) {
    let _ = writeln!(
        out,
        "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"5\" fill=\"none\" stroke=\"{color}\" \
         stroke-width=\"1.5\"/>"
    );
}

/// Planar trace of the true and estimated poses.
///
/// Plots the (0, n−1) and (1, n−1) entries of each pose matrix: the
/// translation for homogeneous rigid groups, and the trace of the last
/// column of a rotation otherwise.
fn trajectory_svg(records: &[TrajectoryRecord], n: usize) -> String {
    let pick = |pose: &[f64]| (pose[n - 1], pose[2 * n - 1]);
    let true_pts: Vec<(f64, f64)> = records.iter().map(|r| pick(&r.true_pose)).collect();
    let est_pts: Vec<(f64, f64)> = records.iter().map(|r| pick(&r.est_pose)).collect();
    let frame = Frame::from_points(true_pts.iter().chain(est_pts.iter()));

    let mut out = svg_open("trajectory: true (blue) vs estimate (red)");
    svg_frame(&mut out, &frame, "x", "y");
    svg_polyline(
        &mut out,
        &frame,
        &true_pts,
        "stroke=\"#1f77b4\" stroke-width=\"1.5\"",
    );
    svg_polyline(
        &mut out,
        &frame,
        &est_pts,
        "stroke=\"#d62728\" stroke-width=\"1.2\" stroke-dasharray=\"6 3\"",
    );
    if let (Some(first), Some(last)) = (true_pts.first(), true_pts.last()) {
        let (sx, sy) = frame.map(first.0, first.1);
        svg_star(&mut out, sx, sy, "#1f77b4");
        let (ex, ey) = frame.map(last.0, last.1);
        svg_circle(&mut out, ex, ey, "#1f77b4");
    }
    if let (Some(first), Some(last)) = (est_pts.first(), est_pts.last()) {
        let (sx, sy) = frame.map(first.0, first.1);
        svg_star(&mut out, sx, sy, "#d62728");
        let (ex, ey) = frame.map(last.0, last.1);
        svg_circle(&mut out, ex, ey, "#d62728");
    }
    out.push_str("</svg>\n");
    out
}

/// log₁₀ of the Lyapunov cost against time.
fn lyapunov_svg(records: &[TrajectoryRecord]) -> String {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .map(|r| (r.t, log10_floor(r.lyapunov)))
        .collect();
    let frame = Frame::from_points(pts.iter());
    let mut out = svg_open("Lyapunov cost decay");
    svg_frame(&mut out, &frame, "t [s]", "log10 L");
    svg_polyline(
        &mut out,
        &frame,
        &pts,
        "stroke=\"#2ca02c\" stroke-width=\"1.5\"",
    );
    out.push_str("</svg>\n");
    out
}
