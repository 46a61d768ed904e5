//! Monolithic steady solver.
//!
//! Solves the fully coupled steady weak form in one linear solve: no time
//! terms, no stabilization, both subdomains and the skew interface coupling
//! together. The decoupled time steppers have exactly this solution as their
//! fixed point when the data are time-independent, so this path doubles as
//! the independent oracle for the steady-convergence experiments.

use crate::assembly::assemble_load;
use crate::error::Result;
use crate::linsolve::factorize;
use crate::mms::Problem;
use crate::sparse::CooBuilder;
use crate::timestepper::{Discretization, TimeLevel};

/// Solve the steady coupled system with data frozen at time `t`.
pub fn solve_steady(
    problem: &impl Problem,
    disc: &Discretization,
    t: f64,
) -> Result<TimeLevel> {
    let ops = &disc.ops;
    let vel = &disc.vel_part;
    let head = &disc.head_part;
    let n_vel = disc.spaces.velocity.n_dofs;
    let n_head = disc.spaces.head.n_dofs;
    let n_pressure = disc.spaces.pressure.n_dofs;
    let (nf_u, nf_phi) = (vel.free.len(), head.free.len());

    let vel_dir_pos = {
        let mut pos = vec![usize::MAX; n_vel];
        for (k, &d) in vel.dirichlet.iter().enumerate() {
            pos[d] = k;
        }
        pos
    };
    let head_dir_pos = {
        let mut pos = vec![usize::MAX; n_head];
        for (k, &d) in head.dirichlet.iter().enumerate() {
            pos[d] = k;
        }
        pos
    };

    // velocity block A_f + A_bjsj (plain weak form: no stabilization masses)
    let k_s = ops.a_f.add_scaled(&ops.a_bjsj, 1.0);
    let k_ff = k_s.restrict(&vel.free, &vel.free_pos, nf_u);
    let k_fd = k_s.restrict(&vel.free, &vel_dir_pos, vel.dirichlet.len());
    let all_pressure: Vec<usize> = (0..n_pressure).collect();
    let b_f = ops.b.restrict(&all_pressure, &vel.free_pos, nf_u);
    let b_d = ops
        .b
        .restrict(&all_pressure, &vel_dir_pos, vel.dirichlet.len());
    let c_ff = ops.c_fp.restrict(&vel.free, &head.free_pos, nf_phi);
    let c_fd = ops
        .c_fp
        .restrict(&vel.free, &head_dir_pos, head.dirichlet.len());
    let ct = ops.c_fp.transpose();
    let ct_ff = ct.restrict(&head.free, &vel.free_pos, nf_u);
    let ct_fd = ct.restrict(&head.free, &vel_dir_pos, vel.dirichlet.len());
    let a_ff = ops.a_p.restrict(&head.free, &head.free_pos, nf_phi);
    let a_fd = ops
        .a_p
        .restrict(&head.free, &head_dir_pos, head.dirichlet.len());

    // unknown layout [u_free, p, phi_free]
    let dim = nf_u + n_pressure + nf_phi;
    let off_p = nf_u;
    let off_phi = nf_u + n_pressure;
    let mut coo = CooBuilder::with_capacity(dim, dim, k_ff.nnz() + 2 * b_f.nnz() + 2 * c_ff.nnz());
    for r in 0..nf_u {
        let (cols, vals) = k_ff.row(r);
        for (c, v) in cols.iter().zip(vals) {
            coo.add(r, *c, *v);
        }
        let (cols, vals) = c_ff.row(r);
        for (c, v) in cols.iter().zip(vals) {
            coo.add(r, off_phi + *c, *v);
        }
    }
    for r in 0..n_pressure {
        let (cols, vals) = b_f.row(r);
        for (c, v) in cols.iter().zip(vals) {
            coo.add(off_p + r, *c, *v);
            coo.add(*c, off_p + r, *v);
        }
    }
    for r in 0..nf_phi {
        let (cols, vals) = a_ff.row(r);
        for (c, v) in cols.iter().zip(vals) {
            coo.add(off_phi + r, off_phi + *c, *v);
        }
        let (cols, vals) = ct_ff.row(r);
        for (c, v) in cols.iter().zip(vals) {
            coo.add(off_phi + r, *c, -*v);
        }
    }
    let system = factorize(&coo.build())?;

    // data and Dirichlet lifts at the frozen time
    let (f_f, f_p) = assemble_load(
        &disc.mesh,
        &disc.spaces,
        problem,
        t,
        &disc.params,
        &disc.quad,
    )?;
    let u_dir: Vec<f64> = vel
        .dirichlet
        .iter()
        .map(|&d| {
            let c = disc.spaces.velocity.node_coords[d / 2];
            problem.velocity(c[0], c[1], t)[d % 2]
        })
        .collect();
    let phi_dir: Vec<f64> = head
        .dirichlet
        .iter()
        .map(|&d| {
            let c = disc.spaces.head.node_coords[d];
            problem.head(c[0], c[1], t)
        })
        .collect();

    let mut rhs = vec![0.0; dim];
    let ku = k_fd.mul_vec(&u_dir);
    let cu = c_fd.mul_vec(&phi_dir);
    for (i, &d) in vel.free.iter().enumerate() {
        rhs[i] = f_f[d] - ku[i] - cu[i];
    }
    let bu = b_d.mul_vec(&u_dir);
    for r in 0..n_pressure {
        rhs[off_p + r] = -bu[r];
    }
    let au = a_fd.mul_vec(&phi_dir);
    let ctu = ct_fd.mul_vec(&u_dir);
    for (i, &d) in head.free.iter().enumerate() {
        rhs[off_phi + i] = f_p[d] - au[i] + ctu[i];
    }

    let sol = system.solve(&rhs)?;
    let mut velocity = vec![0.0; n_vel];
    for (i, &d) in vel.free.iter().enumerate() {
        velocity[d] = sol[i];
    }
    for (k, &d) in vel.dirichlet.iter().enumerate() {
        velocity[d] = u_dir[k];
    }
    let pressure = sol[off_p..off_phi].to_vec();
    let mut head_vals = vec![0.0; n_head];
    for (i, &d) in head.free.iter().enumerate() {
        head_vals[d] = sol[off_phi + i];
    }
    for (k, &d) in head.dirichlet.iter().enumerate() {
        head_vals[d] = phi_dir[k];
    }

    Ok(TimeLevel {
        velocity,
        pressure,
        head: head_vals,
        t,
    })
}
