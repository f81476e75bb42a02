//! Static SVG line plots with a log-scaled y axis.
//!
//! Two layouts: the residual-ratio comparison across solvers, and a
//! per-solver overlay of `||A^T r||/||A^T b||`, `sigma_k/sigma_1` and
//! `h_{k+1,k}/||H_{k,k}||_F`.

use std::path::Path;

use krylov_pinv::ConvergenceHistory;
use plotters::prelude::*;

use crate::Failure;

const SIZE: (u32, u32) = (800, 560);
const COLORS: [RGBColor; 6] = [
    RGBColor(31, 119, 180),
    RGBColor(214, 39, 40),
    RGBColor(44, 160, 44),
    RGBColor(148, 103, 189),
    RGBColor(255, 127, 14),
    RGBColor(0, 0, 0),
];

pub struct Series {
    pub name: String,
    pub points: Vec<(usize, f64)>,
}

impl Series {
    /// Keeps only points a log axis can show.
    pub fn new(
        name: impl Into<String>,
        points: impl IntoIterator<Item = (usize, Option<f64>)>,
    ) -> Self {
        Series {
            name: name.into(),
            points: points
                .into_iter()
                .filter_map(|(k, v)| v.filter(|v| v.is_finite() && *v > 0.0).map(|v| (k, v)))
                .collect(),
        }
    }
}

pub fn comparison(
    path: &Path,
    tag: &str,
    runs: &[(&str, &ConvergenceHistory)],
) -> Result<(), Failure> {
    let series: Vec<Series> = runs
        .iter()
        .map(|(label, h)| Series::new(*label, h.records.iter().map(|r| (r.k, Some(r.atr_ratio)))))
        .collect();
    draw(path, &format!("{tag}: ||A^T r_k|| / ||A^T b||"), &series)
}

pub fn diagnostics(
    path: &Path,
    tag: &str,
    label: &str,
    h: &ConvergenceHistory,
) -> Result<(), Failure> {
    let series = [
        Series::new(
            "||A^T r_k|| / ||A^T b||",
            h.records.iter().map(|r| (r.k, Some(r.atr_ratio))),
        ),
        Series::new(
            "sigma_k / sigma_1",
            h.records.iter().map(|r| (r.k, r.sig_ratios[0])),
        ),
        Series::new(
            "h_{k+1,k} / ||H_{k,k}||_F",
            h.records.iter().map(|r| (r.k, r.h_ratio)),
        ),
    ];
    draw(path, &format!("{tag}: {label}"), &series)
}

pub fn draw(path: &Path, title: &str, series: &[Series]) -> Result<(), Failure> {
    let fail = |e: &dyn std::fmt::Display| Failure::usage(format!("{}: {e}", path.display()));
    let k_max = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .max()
        .unwrap_or(1)
        .max(2);
    let (lo, hi) = series
        .iter()
        .flat_map(|s| s.points.iter().map(|p| p.1))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        });
    let (lo, hi) = if lo.is_finite() {
        // Pad to whole decades.
        (
            10f64.powf(lo.log10().floor()),
            10f64.powf(hi.log10().ceil().max(lo.log10().floor() + 1.0)),
        )
    } else {
        (1e-16, 1.0)
    };

    let root = SVGBackend::new(path, SIZE).into_drawing_area();
    root.fill(&WHITE).map_err(|e| fail(&e))?;
    let mut chart = ChartBuilder::on(&root)
        .caption(title, ("sans-serif", 18))
        .margin(16)
        .x_label_area_size(40)
        .y_label_area_size(70)
        .build_cartesian_2d(1usize..k_max, (lo..hi).log_scale())
        .map_err(|e| fail(&e))?;
    chart
        .configure_mesh()
        .x_desc("iteration k")
        .y_label_formatter(&|v| format!("{v:.0e}"))
        .draw()
        .map_err(|e| fail(&e))?;
    for (i, s) in series.iter().enumerate() {
        if s.points.is_empty() {
            continue;
        }
        let color = COLORS[i % COLORS.len()];
        chart
            .draw_series(LineSeries::new(
                s.points.iter().copied(),
                color.stroke_width(2),
            ))
            .map_err(|e| fail(&e))?
            .label(s.name.clone())
            .legend(move |(x, y)| {
                PathElement::new(vec![(x, y), (x + 20, y)], color.stroke_width(2))
            });
    }
    chart
        .configure_series_labels()
        .position(SeriesLabelPosition::UpperRight)
        .background_style(WHITE.mix(0.8))
        .border_style(BLACK)
        .draw()
        .map_err(|e| fail(&e))?;
    root.present().map_err(|e| fail(&e))
}
