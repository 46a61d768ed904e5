//! Exponential convergence to the steady solution.
//!
//! With time-independent data the decoupled stepper is a stationary
//! iteration whose fixed point equals the monolithic steady solve. Starting
//! from zero interior values, the distance to that fixed point contracts
//! geometrically: each step roughly halves it, so machine precision is
//! reached within a few dozen steps.
//!
//! ```bash
//! cargo run --release --example steady_fixed_point
//! ```

use stokes_darcy::assembly::QuadratureConfig;
use stokes_darcy::mms::ManufacturedCase;
use stokes_darcy::sparse::vec_ops;
use stokes_darcy::steady::solve_steady;
use stokes_darcy::timestepper::{
    initialize, step, Discretization, InitMode, Scheme, SchemeConfig, StepOperators,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let case = ManufacturedCase::Example2;
    let disc = Discretization::new(32, case.default_params(), QuadratureConfig::default())?;

    let steady = solve_steady(&case, &disc, 0.0)?;
    let [e_phi, e_u, e_p] = disc.nodal_errors(&case, &steady);
    println!("monolithic steady solve vs exact: phi {e_phi:.3e}, u {e_u:.3e}, p {e_p:.3e}");

    let mut config = SchemeConfig::new(Scheme::Bdf2, 0.1, case.default_params());
    config.init = InitMode::ZeroInterior;
    let ops = StepOperators::new(&disc, &config)?;
    let (mut prev2, mut prev) = initialize(&case, &disc, &config)?;
    let steady_norm = vec_ops::norm2(&steady.head);

    println!("distance of the iterates to the steady solve:");
    for k in 2..=60usize {
        let next = step(&ops, &disc, &case, &prev2, &prev)?;
        let diff = vec_ops::lin_comb(1.0, &next.head, -1.0, &steady.head);
        let err = vec_ops::norm2(&diff) / steady_norm;
        if k % 4 == 0 || k == 2 {
            println!("  step {k:3}: {err:.3e}");
        }
        prev2 = prev;
        prev = next;
    }
    Ok(())
}
