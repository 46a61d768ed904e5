//! Energy monitors over a short transient run.
//!
//! Prints the sampled G-norm energy of consecutive state pairs, the H1
//! seminorms, the weighted S-norm, and the discrete divergence, and verifies
//! the three-level identity that underpins the BDF2 stability argument:
//!
//! ```text
//! <<(3/2)v2 - 2v1 + (1/2)v0, v2>> =
//!     (|[v1,v2]|_G^2 - |[v0,v1]|_G^2) / 2 + ||v2 - 2v1 + v0||_S^2 / 4
//! ```
//!
//! ```bash
//! cargo run --release --example energy_diagnostics
//! ```

use stokes_darcy::assembly::QuadratureConfig;
use stokes_darcy::mms::ManufacturedCase;
use stokes_darcy::timestepper::{
    g_energy, run_transient, Discretization, Scheme, SchemeConfig, TimeLevel,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = ManufacturedCase::Example1;
    let disc = Discretization::new(16, case.default_params(), QuadratureConfig::default())?;
    let config = SchemeConfig::new(Scheme::Bdf2, 1.0 / 16.0, case.default_params());

    let result = run_transient(&case, &disc, &config, 1.0, 2)?;
    println!(
        "{:>5} {:>8} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "step", "t", "G-energy", "|u|_H1", "|phi|_H1", "||.||_S", "div_inf"
    );
    for row in &result.series {
        println!(
            "{:>5} {:>8.4} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.5e} {:>12.3e}",
            row.step, row.t, row.g_energy, row.h1_u, row.h1_phi, row.s_norm, row.div_inf
        );
    }

    // the identity, on interpolants of the exact solution at three times
    let v0 = disc.interpolate(&case, 0.0);
    let v1 = disc.interpolate(&case, 0.1);
    let v2 = disc.interpolate(&case, 0.2);
    let mix = |ca: f64, cb: f64, cc: f64| TimeLevel {
        velocity: (0..v0.velocity.len())
            .map(|i| ca * v2.velocity[i] + cb * v1.velocity[i] + cc * v0.velocity[i])
            .collect(),
        pressure: vec![],
        head: (0..v0.head.len())
            .map(|i| ca * v2.head[i] + cb * v1.head[i] + cc * v0.head[i])
            .collect(),
        t: 0.0,
    };
    let lhs = disc.s_inner(&mix(1.5, -2.0, 0.5), &v2);
    let rhs = 0.5 * (g_energy(&disc, &v1, &v2) - g_energy(&disc, &v0, &v1))
        + 0.25 * disc.s_norm_sq(&mix(1.0, -2.0, 1.0));
    println!("\nthree-level energy identity: lhs = {lhs:.12e}");
    println!("                             rhs = {rhs:.12e}");
    println!("                             gap = {:.2e}", (lhs - rhs).abs());
    Ok(())
}
