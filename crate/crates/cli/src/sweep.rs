//! x-sweeps and the two d = 12 figure data sets.

use std::fs;
use std::path::{Path, PathBuf};

use decohere::capacity::OptimizerOptions;
use decohere::channels::{ChannelSpec, Family};
use rayon::prelude::*;

use crate::row::{rows_to_csv, CurveRow};
use crate::svg::{render_line_plot, Series};
use crate::CliError;

/// `x_steps` evenly spaced points `i / (x_steps - 1)`, including both endpoints.
pub fn x_grid(x_steps: usize) -> Result<Vec<f64>, CliError> {
    if x_steps < 2 {
        return Err(CliError::Usage(format!(
            "--x-steps must be at least 2, got {x_steps}"
        )));
    }
    let last = (x_steps - 1) as f64;
    Ok((0..x_steps).map(|i| i as f64 / last).collect())
}

/// Rows for one curve, ordered by x ascending. Points are evaluated in parallel;
/// `numeric_every = Some(n)` runs the optimizer on every `n`-th point only.
pub fn curve(
    family: Family,
    d: usize,
    k: usize,
    x_steps: usize,
    numeric_every: Option<usize>,
    opts: &OptimizerOptions,
) -> Result<Vec<CurveRow>, CliError> {
    let base = ChannelSpec::new(family, d, k, 0.0)?;
    let xs = x_grid(x_steps)?;
    let rows: decohere::Result<Vec<CurveRow>> = xs
        .par_iter()
        .enumerate()
        .map(|(i, &x)| {
            let spec = base.with_x(x)?;
            let numeric = numeric_every.filter(|&n| n > 0 && i % n == 0).map(|_| opts);
            CurveRow::compute(&spec, numeric)
        })
        .collect();
    Ok(rows?)
}

/// One figure: a family at fixed `d`, one curve per `k`.
#[derive(Debug, Clone)]
pub struct FigureSpec {
    pub name: &'static str,
    pub title: &'static str,
    pub family: Family,
    pub d: usize,
    pub ks: Vec<usize>,
    pub x_steps: usize,
}

/// Block-decohering capacities for d = 12 and every divisor k of 12.
pub fn fig1() -> FigureSpec {
    FigureSpec {
        name: "fig1",
        title: "Block-decohering channel, d = 12",
        family: Family::Block,
        d: 12,
        ks: vec![1, 2, 3, 4, 6, 12],
        x_steps: 101,
    }
}

/// Weakly-decohering capacities for d = 12.
pub fn fig2() -> FigureSpec {
    FigureSpec {
        name: "fig2",
        title: "Weakly-decohering channel, d = 12",
        family: Family::Weak,
        d: 12,
        ks: vec![1, 2, 3, 4, 6],
        x_steps: 101,
    }
}

/// Rows of a figure, grouped by k and ordered by x within each group.
pub fn figure_rows(
    fig: &FigureSpec,
    numeric_every: Option<usize>,
    opts: &OptimizerOptions,
) -> Result<Vec<CurveRow>, CliError> {
    let mut rows = Vec::new();
    for &k in &fig.ks {
        rows.extend(curve(fig.family, fig.d, k, fig.x_steps, numeric_every, opts)?);
    }
    Ok(rows)
}

pub fn figure_svg(fig: &FigureSpec, rows: &[CurveRow]) -> String {
    let series: Vec<Series> = fig
        .ks
        .iter()
        .map(|&k| Series {
            label: format!("k = {k}"),
            key: k,
            points: rows
                .iter()
                .filter(|r| r.k == k)
                .map(|r| (r.x, r.q_closed))
                .collect(),
        })
        .collect();
    let y_max = (fig.d as f64).log2().ceil();
    render_line_plot(fig.title, "x", "Q (bits)", y_max, &series)
}

fn write_file(path: PathBuf, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(&path, contents).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

/// Writes `<name>.csv` and `<name>.svg` for both figures into `out_dir`.
pub fn write_figures(
    out_dir: &Path,
    numeric_every: Option<usize>,
    opts: &OptimizerOptions,
) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(out_dir).map_err(|source| CliError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();
    for fig in [fig1(), fig2()] {
        let rows = figure_rows(&fig, numeric_every, opts)?;
        written.push(write_file(
            out_dir.join(format!("{}.csv", fig.name)),
            &rows_to_csv(&rows),
        )?);
        written.push(write_file(
            out_dir.join(format!("{}.svg", fig.name)),
            &figure_svg(&fig, &rows),
        )?);
    }
    Ok(written)
}
