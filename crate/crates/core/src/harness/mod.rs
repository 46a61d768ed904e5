//! Experiment drivers: convergence sweeps with dt = h^theta, long-time runs,
//! rate computation, and the CSV/SVG emitters behind the CLI.

mod config;
mod csv;
mod plot;

pub use config::{parse_fraction, write_run_meta, RunConfig, SchemeKind};
pub use csv::{emit_report_csv, emit_series_csv, format_float};
pub use plot::{emit_plot, PlotSeries};

use crate::error::{Error, Result};
use crate::mms::Problem;
use crate::timestepper::{
    run_transient, Discretization, MonitorRow, SchemeConfig, TransientResult,
};

/// Errors of one refinement level at the final time.
#[derive(Clone, Copy, Debug)]
pub struct ConvergenceLevel {
    pub h: f64,
    pub dt: f64,
    pub e_phi: f64,
    pub e_u: f64,
    pub e_p: f64,
}

/// Observed rates between one pair of adjacent levels, keyed by the finer h.
#[derive(Clone, Copy, Debug)]
pub struct RateRow {
    pub h: f64,
    pub dt: f64,
    /// log2(e_{2h} / e_h) for (phi, u, p).
    pub rates: [f64; 3],
}

/// Per-refinement errors and observed convergence rates.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub levels: Vec<ConvergenceLevel>,
    pub rates: Vec<RateRow>,
    /// Mean of the pairwise rates per field (phi, u, p).
    pub r_avg: [f64; 3],
}

/// Pairwise rates log2(e_coarse / e_fine) and their means, from
/// coarse-to-fine error triples.
pub fn compute_rates(errors: &[[f64; 3]]) -> (Vec<[f64; 3]>, [f64; 3]) {
    let mut rates = Vec::new();
    for pair in errors.windows(2) {
        let mut r = [0.0; 3];
        for k in 0..3 {
            r[k] = (pair[0][k] / pair[1][k]).log2();
        }
        rates.push(r);
    }
    let mut avg = [0.0; 3];
    if !rates.is_empty() {
        for r in &rates {
            for k in 0..3 {
                avg[k] += r[k];
            }
        }
        for a in &mut avg {
            *a /= rates.len() as f64;
        }
    }
    (rates, avg)
}

/// Snap dt to an integer divider of the final time: dt = T / round(T / dt_raw).
pub fn snap_dt(t_final: f64, dt_raw: f64) -> f64 {
    let steps = (t_final / dt_raw).round().max(1.0);
    t_final / steps
}

/// Run one transient per refinement level with dt = h^theta (snapped so the
/// final time is hit exactly) and report errors and rates, coarse to fine.
///
/// The h list must halve at every level; the rate definition presumes it.
pub fn run_convergence(
    problem: &impl Problem,
    config: &RunConfig,
    h_list: &[f64],
) -> Result<ConvergenceReport> {
    if h_list.is_empty() {
        return Err(Error::Config("empty refinement list".into()));
    }
    for pair in h_list.windows(2) {
        if (pair[0] / pair[1] - 2.0).abs() > 1e-9 {
            return Err(Error::Config(format!(
                "refinement levels must halve: got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let mut levels = Vec::with_capacity(h_list.len());
    for &h in h_list {
        let n = (1.0 / h).round() as usize;
        if n == 0 || (1.0 / h - n as f64).abs() > 1e-9 {
            return Err(Error::Config(format!("h = {h} is not 1/n")));
        }
        let dt = snap_dt(config.t_final, h.powf(config.theta));
        let disc = Discretization::new(n, config.params(), config.quadrature())?;
        let scheme_config = SchemeConfig::new(config.scheme(), dt, config.params());
        let result = run_transient(problem, &disc, &scheme_config, config.t_final, usize::MAX)?;
        let [e_phi, e_u, e_p] = disc.nodal_errors(problem, &result.final_level);
        levels.push(ConvergenceLevel {
            h,
            dt,
            e_phi,
            e_u,
            e_p,
        });
    }
    let errors: Vec<[f64; 3]> = levels.iter().map(|l| [l.e_phi, l.e_u, l.e_p]).collect();
    let (rate_values, r_avg) = compute_rates(&errors);
    let rates = rate_values
        .into_iter()
        .zip(levels.iter().skip(1))
        .map(|(rates, level)| RateRow {
            h: level.h,
            dt: level.dt,
            rates,
        })
        .collect();
    Ok(ConvergenceReport {
        levels,
        rates,
        r_avg,
    })
}

/// One long-horizon run with full monitor sampling.
pub fn run_longtime(
    problem: &impl Problem,
    config: &RunConfig,
    h: f64,
    dt: f64,
    sample_every: usize,
) -> Result<TransientResult> {
    let n = (1.0 / h).round() as usize;
    if n == 0 || (1.0 / h - n as f64).abs() > 1e-9 {
        return Err(Error::Config(format!("h = {h} is not 1/n")));
    }
    let disc = Discretization::new(n, config.params(), config.quadrature())?;
    let scheme_config = SchemeConfig::new(config.scheme(), dt, config.params());
    run_transient(problem, &disc, &scheme_config, config.t_final, sample_every)
}

/// Error-vs-time plot series from a monitor series.
pub fn error_series(series: &[MonitorRow]) -> Vec<PlotSeries> {
    let take = |f: fn(&MonitorRow) -> f64, label: &str| PlotSeries {
        label: label.to_string(),
        points: series.iter().map(|r| (r.t, f(r))).collect(),
    };
    vec![
        take(|r| r.e_phi, "e_phi"),
        take(|r| r.e_u, "e_u"),
        take(|r| r.e_p, "e_p"),
    ]
}
