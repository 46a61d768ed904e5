//! Finite-element solver for the time-dependent coupled Stokes-Darcy system
//! with decoupled second-order IMEX time stepping.
//!
//! Free flow in a conduit (Stokes) couples to porous-media flow in the
//! surrounding matrix (Darcy) through Beavers-Joseph-Saffman-Jones interface
//! conditions. Two time integrators are provided, both treating the interface
//! coupling explicitly so that each step splits into one Stokes solve and one
//! Darcy solve:
//!
//! - `Bdf2`: second-order backward differentiation with Gear extrapolation of
//!   the interface terms,
//! - `Amb2`: Adams-Moulton(2) for the symmetric terms, Adams-Bashforth(2) for
//!   the interface terms.
//!
//! Space is discretized with Taylor-Hood elements (P2 velocity, P1 pressure)
//! in the conduit and P2 for the hydraulic head in the matrix, on twin
//! structured triangulations that conform along the interface.
//!
//! The `mms` module ships three manufactured solutions with closed-form
//! forcing, and `harness` reproduces the convergence tables and long-time
//! error experiments around them; see the `examples/` directory for runnable
//! entry points, or the `stokes-darcy` binary for a config-file driven CLI.

pub mod assembly;
pub mod basis;
pub mod error;
pub mod harness;
pub mod linsolve;
pub mod mesh;
pub mod mms;
pub mod sparse;
pub mod steady;
pub mod timestepper;

pub use error::{Error, Result};
