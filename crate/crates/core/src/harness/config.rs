//! Run configuration: defaults, flat `key = value` config files, and the
//! `run.meta` echo of the resolved settings.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::assembly::{PhysicalParams, QuadratureConfig, Tensor2};
use crate::error::{Error, Result};
use crate::mms::ManufacturedCase;
use crate::timestepper::Scheme;

/// Scheme selector as configured (alpha kept separately so a config file can
/// set `scheme = amb2` and `alpha = 0.8` independently).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeKind {
    Bdf2,
    Amb2,
}

impl std::str::FromStr for SchemeKind {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "bdf2" => Ok(SchemeKind::Bdf2),
            "amb2" => Ok(SchemeKind::Amb2),
            other => Err(format!("unknown scheme '{other}' (expected bdf2|amb2)")),
        }
    }
}

/// Parse a positive number written as a decimal or a fraction like `1/16`.
pub fn parse_fraction(s: &str) -> std::result::Result<f64, String> {
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let num: f64 = num
            .trim()
            .parse()
            .map_err(|_| format!("bad number '{s}'"))?;
        let den: f64 = den
            .trim()
            .parse()
            .map_err(|_| format!("bad number '{s}'"))?;
        if den == 0.0 {
            return Err(format!("zero denominator in '{s}'"));
        }
        Ok(num / den)
    } else {
        s.parse().map_err(|_| format!("bad number '{s}'"))
    }
}

/// Resolved settings of one experiment run.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub case: ManufacturedCase,
    pub scheme_kind: SchemeKind,
    pub alpha: f64,
    /// Refinement levels, coarse to fine.
    pub h_list: Vec<f64>,
    /// Explicit time step; when absent, dt = h^theta per level.
    pub dt: Option<f64>,
    pub theta: f64,
    pub t_final: f64,
    pub gamma_f: f64,
    pub gamma_p: f64,
    pub nu: f64,
    pub g: f64,
    pub storage: f64,
    /// Isotropic conductivity K (the tensor K = k I).
    pub conductivity: f64,
    pub alpha_bj: f64,
    pub output_dir: PathBuf,
    pub sample_every: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: ManufacturedCase::Example1,
            scheme_kind: SchemeKind::Bdf2,
            alpha: 0.8,
            h_list: vec![1.0 / 16.0],
            dt: None,
            theta: 1.0,
            t_final: 1.0,
            gamma_f: 1.0,
            gamma_p: 1.0,
            nu: 1.0,
            g: 1.0,
            storage: 1.0,
            conductivity: 1.0,
            alpha_bj: 1.0,
            output_dir: PathBuf::from("out"),
            sample_every: 1,
        }
    }
}

impl RunConfig {
    pub fn scheme(&self) -> Scheme {
        match self.scheme_kind {
            SchemeKind::Bdf2 => Scheme::Bdf2,
            SchemeKind::Amb2 => Scheme::Amb2 { alpha: self.alpha },
        }
    }

    pub fn params(&self) -> PhysicalParams {
        PhysicalParams {
            nu: self.nu,
            g: self.g,
            storage: self.storage,
            conductivity: Tensor2::isotropic(self.conductivity),
            alpha_bj: self.alpha_bj,
            gamma_f: self.gamma_f,
            gamma_p: self.gamma_p,
        }
    }

    pub fn quadrature(&self) -> QuadratureConfig {
        QuadratureConfig::default()
    }

    /// Coarsest-level h (single-run experiments use only this level).
    pub fn h(&self) -> f64 {
        self.h_list[0]
    }

    /// Effective time step for grid size `h`.
    pub fn effective_dt(&self, h: f64) -> f64 {
        match self.dt {
            Some(dt) => dt,
            None => super::snap_dt(self.t_final, h.powf(self.theta)),
        }
    }

    /// Apply one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let num = |v: &str| parse_fraction(v);
        match key {
            "case" => self.case = value.parse()?,
            "scheme" => self.scheme_kind = value.parse()?,
            "alpha" => self.alpha = num(value)?,
            "h" => {
                let mut list = Vec::new();
                for part in value.split([',', ' ']).filter(|p| !p.trim().is_empty()) {
                    list.push(num(part)?);
                }
                if list.is_empty() {
                    return Err("empty h list".into());
                }
                self.h_list = list;
            }
            "dt" => self.dt = Some(num(value)?),
            "theta" => self.theta = num(value)?,
            "T" => self.t_final = num(value)?,
            "gamma_f" => self.gamma_f = num(value)?,
            "gamma_p" => self.gamma_p = num(value)?,
            "nu" => self.nu = num(value)?,
            "g" => self.g = num(value)?,
            "S" => self.storage = num(value)?,
            "K" => self.conductivity = num(value)?,
            "alpha_bj" => self.alpha_bj = num(value)?,
            "output_dir" => self.output_dir = PathBuf::from(value),
            "sample_every" => {
                self.sample_every = value
                    .trim()
                    .parse()
                    .map_err(|_| format!("bad sample_every '{value}'"))?
            }
            other => return Err(format!("unknown config key '{other}'")),
        }
        Ok(())
    }

    /// Apply a flat `key = value` config file ('#' starts a comment).
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::ConfigFile {
                path: path.to_path_buf(),
                line: lineno + 1,
                msg: "expected 'key = value'".into(),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|msg| Error::ConfigFile {
                    path: path.to_path_buf(),
                    line: lineno + 1,
                    msg,
                })?;
        }
        Ok(())
    }
}

/// Echo the resolved configuration (plus any extra resolved values such as
/// snapped time steps) as `key = value` text.
pub fn write_run_meta(
    config: &RunConfig,
    extra: &[(String, String)],
    path: &Path,
) -> Result<()> {
    let mut out = String::new();
    let h_list = config
        .h_list
        .iter()
        .map(|h| super::format_float(*h))
        .collect::<Vec<_>>()
        .join(", ");
    out.push_str(&format!("case = {}\n", config.case.name()));
    out.push_str(&format!(
        "scheme = {}\n",
        match config.scheme_kind {
            SchemeKind::Bdf2 => "bdf2",
            SchemeKind::Amb2 => "amb2",
        }
    ));
    out.push_str(&format!("alpha = {}\n", config.alpha));
    out.push_str(&format!("h = {h_list}\n"));
    match config.dt {
        Some(dt) => out.push_str(&format!("dt = {}\n", super::format_float(dt))),
        None => out.push_str(&format!("theta = {}\n", config.theta)),
    }
    out.push_str(&format!("T = {}\n", config.t_final));
    out.push_str(&format!("gamma_f = {}\n", config.gamma_f));
    out.push_str(&format!("gamma_p = {}\n", config.gamma_p));
    out.push_str(&format!("nu = {}\n", config.nu));
    out.push_str(&format!("g = {}\n", config.g));
    out.push_str(&format!("S = {}\n", config.storage));
    out.push_str(&format!("K = {}\n", config.conductivity));
    out.push_str(&format!("alpha_bj = {}\n", config.alpha_bj));
    out.push_str(&format!("output_dir = {}\n", config.output_dir.display()));
    out.push_str(&format!("sample_every = {}\n", config.sample_every));
    for (k, v) in extra {
        out.push_str(&format!("{k} = {v}\n"));
    }
    let mut file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    file.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}
