//! CSV emitters. Plain RFC-4180-style output: header row, '.' decimal
//! separator, scientific notation with enough digits that parsing the file
//! back reproduces every f64 bit-exactly. Identical inputs give identical
//! bytes.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::timestepper::MonitorRow;

use super::ConvergenceReport;

/// 17 significant digits: round-trips f64 exactly.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Write a convergence report: one `level` row per refinement and one `rate`
/// row per adjacent pair, keyed by the finer level.
pub fn emit_report_csv(report: &ConvergenceReport, path: &Path) -> Result<()> {
    let mut out = String::from("kind,h,dt,phi,u,p\n");
    for l in &report.levels {
        out.push_str(&format!(
            "level,{},{},{},{},{}\n",
            format_float(l.h),
            format_float(l.dt),
            format_float(l.e_phi),
            format_float(l.e_u),
            format_float(l.e_p)
        ));
    }
    for r in &report.rates {
        out.push_str(&format!(
            "rate,{},{},{},{},{}\n",
            format_float(r.h),
            format_float(r.dt),
            format_float(r.rates[0]),
            format_float(r.rates[1]),
            format_float(r.rates[2])
        ));
    }
    write_file(path, out.as_bytes())
}

/// Write a monitor series; the AMB2-only column is left empty for BDF2 runs.
pub fn emit_series_csv(series: &[MonitorRow], path: &Path) -> Result<()> {
    let mut out =
        String::from("step,t,e_phi,e_u,e_p,g_energy,h1_u,h1_phi,s_norm,div_inf,div_dalpha_inf\n");
    for row in series {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{}\n",
            row.step,
            format_float(row.t),
            format_float(row.e_phi),
            format_float(row.e_u),
            format_float(row.e_p),
            format_float(row.g_energy),
            format_float(row.h1_u),
            format_float(row.h1_phi),
            format_float(row.s_norm),
            format_float(row.div_inf),
            row.div_dalpha_inf.map(format_float).unwrap_or_default()
        ));
    }
    write_file(path, out.as_bytes())
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(bytes).map_err(|e| Error::io(path, e))
}
