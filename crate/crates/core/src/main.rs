//! Command-line driver around the library's experiment harness.
//!
//! Each run writes its outputs (`report.csv`, `series.csv`, `errors.svg`,
//! `run.meta`) under the chosen output directory. Settings come from an
//! optional flat `key = value` config file, overridden by CLI flags.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use stokes_darcy::assembly::QuadratureConfig;
use stokes_darcy::harness::{
    emit_plot, emit_report_csv, emit_series_csv, error_series, format_float, run_convergence,
    run_longtime, write_run_meta, RunConfig,
};
use stokes_darcy::mms::ManufacturedCase;
use stokes_darcy::steady::solve_steady;
use stokes_darcy::timestepper::Discretization;

#[derive(Parser)]
#[command(
    name = "stokes-darcy",
    version,
    about = "Coupled Stokes-Darcy IMEX solver experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat key = value config file applied before the flags.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Test case: example1 | example2 | example3.
    #[arg(long)]
    case: Option<String>,
    /// Scheme: bdf2 | amb2.
    #[arg(long)]
    scheme: Option<String>,
    /// Grid size, decimal or fraction like 1/32 (repeat for refinements).
    #[arg(long = "h")]
    h: Vec<String>,
    /// Time step; overrides theta-based selection.
    #[arg(long)]
    dt: Option<String>,
    /// Exponent in dt = h^theta.
    #[arg(long)]
    theta: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<String>,
    /// Output directory.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Refinement sweep with dt = h^theta; writes report.csv.
    Converge(CommonArgs),
    /// Single long-horizon run; writes series.csv and errors.svg.
    Longtime(CommonArgs),
    /// Monolithic steady solve; reports errors against the exact solution.
    Steady(CommonArgs),
    /// Quick structural self-checks of the discretization.
    Selftest,
}

fn resolve(args: &CommonArgs) -> Result<RunConfig, String> {
    let mut config = RunConfig::default();
    if let Some(path) = &args.config {
        config.apply_file(path).map_err(|e| e.to_string())?;
    }
    if let Some(v) = &args.case {
        config.set("case", v)?;
    }
    if let Some(v) = &args.scheme {
        config.set("scheme", v)?;
    }
    if !args.h.is_empty() {
        config.set("h", &args.h.join(","))?;
    }
    if let Some(v) = &args.dt {
        config.set("dt", v)?;
    }
    if let Some(v) = &args.theta {
        config.set("theta", v)?;
    }
    if let Some(v) = &args.t_final {
        config.set("T", v)?;
    }
    if let Some(v) = &args.out {
        config.output_dir = v.clone();
    }
    Ok(config)
}

fn ensure_out(config: &RunConfig) -> Result<(), String> {
    std::fs::create_dir_all(&config.output_dir)
        .map_err(|e| format!("cannot create {}: {e}", config.output_dir.display()))
}

fn cmd_converge(args: &CommonArgs) -> Result<(), String> {
    let config = resolve(args)?;
    ensure_out(&config)?;
    let case = config.case;
    let report = run_convergence(&case, &config, &config.h_list).map_err(|e| e.to_string())?;

    println!(
        "case {} scheme {} theta {} T {}",
        case.name(),
        config.scheme().name(),
        config.theta,
        config.t_final
    );
    println!(
        "{:>10} {:>12} {:>12} {:>12} {:>12}",
        "h", "dt", "e_phi", "e_u", "e_p"
    );
    for l in &report.levels {
        println!(
            "{:>10.6} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}",
            l.h, l.dt, l.e_phi, l.e_u, l.e_p
        );
    }
    for r in &report.rates {
        println!(
            "rate at h = {:.6}: phi {:.2}, u {:.2}, p {:.2}",
            r.h, r.rates[0], r.rates[1], r.rates[2]
        );
    }
    println!(
        "r_avg: phi {:.2}, u {:.2}, p {:.2}",
        report.r_avg[0], report.r_avg[1], report.r_avg[2]
    );

    emit_report_csv(&report, &config.output_dir.join("report.csv")).map_err(|e| e.to_string())?;
    let extra = vec![
        ("r_avg_phi".to_string(), format_float(report.r_avg[0])),
        ("r_avg_u".to_string(), format_float(report.r_avg[1])),
        ("r_avg_p".to_string(), format_float(report.r_avg[2])),
    ];
    write_run_meta(&config, &extra, &config.output_dir.join("run.meta"))
        .map_err(|e| e.to_string())?;
    println!("wrote {}", config.output_dir.join("report.csv").display());
    Ok(())
}

fn cmd_longtime(args: &CommonArgs) -> Result<(), String> {
    let config = resolve(args)?;
    ensure_out(&config)?;
    let case = config.case;
    let h = config.h();
    let dt = config.effective_dt(h);
    let result =
        run_longtime(&case, &config, h, dt, config.sample_every).map_err(|e| e.to_string())?;

    let last = result.series.last().unwrap();
    println!(
        "case {} scheme {} h {} dt {} T {}: {} steps, final e_phi {:.3e}, e_u {:.3e}, e_p {:.3e}",
        case.name(),
        config.scheme().name(),
        h,
        dt,
        config.t_final,
        result.steps,
        last.e_phi,
        last.e_u,
        last.e_p
    );

    emit_series_csv(&result.series, &config.output_dir.join("series.csv"))
        .map_err(|e| e.to_string())?;
    let title = format!("{} {} h={h} dt={dt}", case.name(), config.scheme().name());
    emit_plot(
        &error_series(&result.series),
        &title,
        &config.output_dir.join("errors.svg"),
    )
    .map_err(|e| e.to_string())?;
    let extra = vec![
        ("dt_effective".to_string(), format_float(dt)),
        ("steps".to_string(), result.steps.to_string()),
        (
            "factorizations".to_string(),
            result.factorizations.to_string(),
        ),
    ];
    write_run_meta(&config, &extra, &config.output_dir.join("run.meta"))
        .map_err(|e| e.to_string())?;
    println!(
        "wrote {} and {}",
        config.output_dir.join("series.csv").display(),
        config.output_dir.join("errors.svg").display()
    );
    Ok(())
}

fn cmd_steady(args: &CommonArgs) -> Result<(), String> {
    let config = resolve(args)?;
    ensure_out(&config)?;
    let case = config.case;
    let h = config.h();
    let n = (1.0 / h).round() as usize;
    let disc = Discretization::new(n, config.params(), config.quadrature())
        .map_err(|e| e.to_string())?;
    let sol = solve_steady(&case, &disc, 0.0).map_err(|e| e.to_string())?;
    let [e_phi, e_u, e_p] = disc.nodal_errors(&case, &sol);
    println!(
        "steady solve, case {} h {}: e_phi {:.4e}, e_u {:.4e}, e_p {:.4e}",
        case.name(),
        h,
        e_phi,
        e_u,
        e_p
    );
    let extra = vec![
        ("steady_e_phi".to_string(), format_float(e_phi)),
        ("steady_e_u".to_string(), format_float(e_u)),
        ("steady_e_p".to_string(), format_float(e_p)),
    ];
    write_run_meta(&config, &extra, &config.output_dir.join("run.meta"))
        .map_err(|e| e.to_string())?;
    Ok(())
}

fn cmd_selftest() -> Result<(), String> {
    use stokes_darcy::timestepper::{
        g_energy, run_transient, Scheme, SchemeConfig, TimeLevel,
    };

    let mut failures = 0;
    let mut check = |name: &str, ok: bool| {
        println!("{}: {}", name, if ok { "PASS" } else { "FAIL" });
        if !ok {
            failures += 1;
        }
    };

    // quadrature exactness against the closed-form monomial integral
    let rule = stokes_darcy::basis::triangle_quadrature(5).map_err(|e| e.to_string())?;
    let integral_x2y2: f64 = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(p, w)| w * p[0] * p[0] * p[1] * p[1])
        .sum();
    check(
        "triangle quadrature (x^2 y^2 -> 1/180)",
        (integral_x2y2 - 1.0 / 180.0).abs() < 1e-15,
    );

    let case = ManufacturedCase::Example1;
    let disc = Discretization::new(4, case.default_params(), QuadratureConfig::default())
        .map_err(|e| e.to_string())?;

    // G-norm identity on pseudo-random states
    let mut seed = 0x2545F4914F6CDD1Du64;
    let mut rand = move || {
        seed ^= seed << 13;
        seed ^= seed >> 7;
        seed ^= seed << 17;
        (seed >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let nv = disc.spaces.velocity.n_dofs;
    let nh = disc.spaces.head.n_dofs;
    let mut identity_ok = true;
    for _ in 0..20 {
        let mut level = |t: f64| TimeLevel {
            velocity: (0..nv).map(|_| rand()).collect(),
            pressure: vec![],
            head: (0..nh).map(|_| rand()).collect(),
            t,
        };
        let (v0, v1, v2) = (level(0.0), level(1.0), level(2.0));
        let mix = |ca: f64, cb: f64, cc: f64| TimeLevel {
            velocity: v2
                .velocity
                .iter()
                .zip(v1.velocity.iter().zip(&v0.velocity))
                .map(|(a, (b, c))| ca * a + cb * b + cc * c)
                .collect(),
            pressure: vec![],
            head: v2
                .head
                .iter()
                .zip(v1.head.iter().zip(&v0.head))
                .map(|(a, (b, c))| ca * a + cb * b + cc * c)
                .collect(),
            t: 0.0,
        };
        let combo = mix(1.5, -2.0, 0.5);
        let delta = mix(1.0, -2.0, 1.0);
        let lhs = disc.s_inner(&combo, &v2);
        let rhs = 0.5 * (g_energy(&disc, &v1, &v2) - g_energy(&disc, &v0, &v1))
            + 0.25 * disc.s_norm_sq(&delta);
        identity_ok &= (lhs - rhs).abs() <= 1e-11 * lhs.abs().max(1.0);
    }
    check("G-norm identity", identity_ok);

    // interface coupling transposes exactly
    let ct = disc.ops.c_fp.transpose();
    let mut skew_ok = true;
    for r in 0..disc.ops.c_fp.nrows() {
        let (cols, vals) = disc.ops.c_fp.row(r);
        for (c, v) in cols.iter().zip(vals) {
            skew_ok &= ct.get(*c, r) == *v;
        }
    }
    check("interface coupling skew structure", skew_ok);

    // short runs: divergence at solver tolerance, finite states
    let cfg = SchemeConfig::new(Scheme::Bdf2, 0.125, case.default_params());
    let run = run_transient(&case, &disc, &cfg, 1.0, 1).map_err(|e| e.to_string())?;
    let max_div = run
        .series
        .iter()
        .skip(2)
        .fold(0.0f64, |m, row| m.max(row.div_inf));
    check("discrete divergence after implicit solves", max_div <= 1e-9);

    let amb_cfg = SchemeConfig::new(Scheme::Amb2 { alpha: 0.8 }, 0.125, case.default_params());
    let amb_run = run_transient(&case, &disc, &amb_cfg, 1.0, 1).map_err(|e| e.to_string())?;
    check(
        "amb2 transient finishes finite",
        amb_run.final_level.is_finite(),
    );

    if failures > 0 {
        Err(format!("{failures} self-test(s) failed"))
    } else {
        println!("all self-tests passed");
        Ok(())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Converge(args) => cmd_converge(args),
        Command::Longtime(args) => cmd_longtime(args),
        Command::Steady(args) => cmd_steady(args),
        Command::Selftest => cmd_selftest(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
