//! The two decoupled IMEX time integrators and their diagnostics.
//!
//! Both schemes treat the symmetric terms implicitly and the skew interface
//! coupling explicitly, so each step solves one Stokes saddle system and one
//! Darcy system, independently of each other:
//!
//! - BDF2: (3u^{n+1} - 4u^n + u^{n-1}) / (2 dt) time discretization with the
//!   interface terms extrapolated as 2u^n - u^{n-1} (Gear extrapolation);
//! - AMB2: (u^{n+1} - u^n) / dt with the implicit terms averaged by
//!   D_a u^{n+1} = a u^{n+1} + (3/2 - 2a) u^n + (a - 1/2) u^{n-1} for
//!   1/2 < a < 1, forcing at the half step, and interface terms extrapolated
//!   as (3/2) u^n - (1/2) u^{n-1}.
//!
//! An artificial stabilization (the `gamma_f`, `gamma_p` interface masses) is
//! added implicitly and subtracted explicitly, so it cancels at steady state
//! while damping the explicit coupling.
//!
//! Both system matrices are factorized once per (mesh, dt, scheme) and reused
//! for every step. Dirichlet data (nodal interpolation of the exact solution
//! on the outer boundaries) is imposed by symmetric row/column elimination
//! with lift terms on the right-hand side, which keeps the Darcy block
//! positive definite and the factorizations valid across steps.

use crate::assembly::{
    assemble_load, assemble_stiffnesses, FemSpaces, OperatorSet, PhysicalParams, QuadratureConfig,
    Tensor2,
};
use crate::basis::DofMap;
use crate::error::{Error, Result};
use crate::linsolve::{factorize, factorize_spd, Factorization};
use crate::mesh::{build_coupled_mesh, CoupledMesh};
use crate::mms::Problem;
use crate::sparse::{vec_ops, CooBuilder, SparseMatrix};

/// Time integrator selector.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Scheme {
    Bdf2,
    Amb2 { alpha: f64 },
}

impl Scheme {
    pub fn name(&self) -> &'static str {
        match self {
            Scheme::Bdf2 => "bdf2",
            Scheme::Amb2 { .. } => "amb2",
        }
    }
}

/// D_a difference-operator coefficients (new, current, previous); they sum
/// to one for every a.
pub fn d_alpha_coefficients(alpha: f64) -> [f64; 3] {
    [alpha, 1.5 - 2.0 * alpha, alpha - 0.5]
}

/// How the two starting levels are produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum InitMode {
    /// Nodal interpolation of the exact solution at t = 0 and t = dt.
    #[default]
    Interpolate,
    /// Backward-Euler bootstrap from the interpolated level 0, for runs where
    /// only initial data is trusted.
    Bdf1Bootstrap,
    /// Zero interior values with exact Dirichlet data at both levels.
    ZeroInterior,
}

/// Full configuration of a time-stepping run.
#[derive(Clone, Copy, Debug)]
pub struct SchemeConfig {
    pub scheme: Scheme,
    pub dt: f64,
    pub params: PhysicalParams,
    pub quad: QuadratureConfig,
    pub init: InitMode,
}

impl SchemeConfig {
    pub fn new(scheme: Scheme, dt: f64, params: PhysicalParams) -> Self {
        Self {
            scheme,
            dt,
            params,
            quad: QuadratureConfig::default(),
            init: InitMode::Interpolate,
        }
    }

    fn validate(&self) -> Result<()> {
        if let Scheme::Amb2 { alpha } = self.scheme {
            if !(alpha > 0.5 && alpha < 1.0) {
                return Err(Error::AlphaOutOfRange { alpha });
            }
        }
        if !(self.dt > 0.0) {
            return Err(Error::Config(format!(
                "dt must be positive, got {}",
                self.dt
            )));
        }
        if self.params.gamma_f < 0.0 || self.params.gamma_p < 0.0 {
            return Err(Error::Config(format!(
                "stabilization weights must be nonnegative, got gamma_f = {}, gamma_p = {}",
                self.params.gamma_f, self.params.gamma_p
            )));
        }
        Ok(())
    }
}

/// One time slice of the discrete state.
#[derive(Clone, Debug)]
pub struct TimeLevel {
    /// Interleaved fluid velocity DOFs on the conduit mesh.
    pub velocity: Vec<f64>,
    /// Pressure DOFs (P1 nodes).
    pub pressure: Vec<f64>,
    /// Hydraulic head DOFs on the matrix mesh.
    pub head: Vec<f64>,
    pub t: f64,
}

impl TimeLevel {
    pub fn is_finite(&self) -> bool {
        self.velocity.iter().all(|v| v.is_finite())
            && self.pressure.iter().all(|v| v.is_finite())
            && self.head.iter().all(|v| v.is_finite())
    }
}

/// Free/Dirichlet split of one DOF set.
#[derive(Clone, Debug)]
pub struct Partition {
    pub free: Vec<usize>,
    pub dirichlet: Vec<usize>,
    /// dof -> position among free dofs, usize::MAX for Dirichlet dofs.
    pub free_pos: Vec<usize>,
}

impl Partition {
    fn new(map: &DofMap) -> Self {
        let dirichlet = map.dirichlet.clone();
        let mut free_pos = vec![usize::MAX; map.n_dofs];
        let mut free = Vec::with_capacity(map.n_dofs - dirichlet.len());
        let mut dir_iter = dirichlet.iter().peekable();
        for d in 0..map.n_dofs {
            if dir_iter.peek() == Some(&&d) {
                dir_iter.next();
            } else {
                free_pos[d] = free.len();
                free.push(d);
            }
        }
        Self {
            free,
            dirichlet,
            free_pos,
        }
    }

    /// dof -> position among Dirichlet dofs (MAX for free).
    fn dir_pos(&self, n_dofs: usize) -> Vec<usize> {
        let mut pos = vec![usize::MAX; n_dofs];
        for (k, &d) in self.dirichlet.iter().enumerate() {
            pos[d] = k;
        }
        pos
    }
}

/// Mesh, spaces, operators, and DOF partitions shared by every scheme and
/// time step on one mesh.
pub struct Discretization {
    pub mesh: CoupledMesh,
    pub spaces: FemSpaces,
    pub params: PhysicalParams,
    pub quad: QuadratureConfig,
    pub ops: OperatorSet,
    pub vel_part: Partition,
    pub head_part: Partition,
    /// Unit-coefficient gradient stiffnesses for the H1 seminorm monitors.
    pub l_f: SparseMatrix,
    pub l_p: SparseMatrix,
}

impl Discretization {
    pub fn new(n: usize, params: PhysicalParams, quad: QuadratureConfig) -> Result<Self> {
        Self::from_mesh(build_coupled_mesh(n)?, params, quad)
    }

    pub fn from_mesh(
        mesh: CoupledMesh,
        params: PhysicalParams,
        quad: QuadratureConfig,
    ) -> Result<Self> {
        let spaces = FemSpaces::new(&mesh);
        let ops = OperatorSet::assemble(&mesh, &spaces, &params, &quad)?;
        let unit = PhysicalParams {
            nu: 1.0,
            g: 1.0,
            conductivity: Tensor2::isotropic(1.0),
            ..params
        };
        let (l_f, _, l_p) = assemble_stiffnesses(&mesh, &spaces, &unit, &quad)?;
        let vel_part = Partition::new(&spaces.velocity);
        let head_part = Partition::new(&spaces.head);
        Ok(Self {
            mesh,
            spaces,
            params,
            quad,
            ops,
            vel_part,
            head_part,
            l_f,
            l_p,
        })
    }

    /// Nodal interpolant of the exact solution at time `t`.
    pub fn interpolate(&self, problem: &impl Problem, t: f64) -> TimeLevel {
        let mut velocity = vec![0.0; self.spaces.velocity.n_dofs];
        for (k, c) in self.spaces.velocity.node_coords.iter().enumerate() {
            let u = problem.velocity(c[0], c[1], t);
            velocity[2 * k] = u[0];
            velocity[2 * k + 1] = u[1];
        }
        let pressure = self
            .spaces
            .pressure
            .node_coords
            .iter()
            .map(|c| problem.pressure(c[0], c[1], t))
            .collect();
        let head = self
            .spaces
            .head
            .node_coords
            .iter()
            .map(|c| problem.head(c[0], c[1], t))
            .collect();
        TimeLevel {
            velocity,
            pressure,
            head,
            t,
        }
    }

    /// Exact velocity values on the Dirichlet DOFs, in partition order.
    fn dirichlet_velocity(&self, problem: &impl Problem, t: f64) -> Vec<f64> {
        self.vel_part
            .dirichlet
            .iter()
            .map(|&d| {
                let c = self.spaces.velocity.node_coords[d / 2];
                problem.velocity(c[0], c[1], t)[d % 2]
            })
            .collect()
    }

    fn dirichlet_head(&self, problem: &impl Problem, t: f64) -> Vec<f64> {
        self.head_part
            .dirichlet
            .iter()
            .map(|&d| {
                let c = self.spaces.head.node_coords[d];
                problem.head(c[0], c[1], t)
            })
            .collect()
    }

    /// Weighted inner product <<(u0,phi0),(u1,phi1)>> = (u0,u1) + gS (phi0,phi1).
    pub fn s_inner(&self, a: &TimeLevel, b: &TimeLevel) -> f64 {
        self.ops.m_f.quadratic_form(&a.velocity, &b.velocity)
            + self.ops.m_p.quadratic_form(&a.head, &b.head)
    }

    pub fn s_norm_sq(&self, a: &TimeLevel) -> f64 {
        self.s_inner(a, a)
    }

    /// Relative nodal-l2 errors (e_phi, e_u, e_p) against the exact solution;
    /// pressure is measured on the P1 nodes.
    pub fn nodal_errors(&self, problem: &impl Problem, level: &TimeLevel) -> [f64; 3] {
        let exact = self.interpolate(problem, level.t);
        let rel = |num: &[f64], den: &[f64]| {
            let mut d2 = 0.0;
            let mut n2 = 0.0;
            for (a, b) in num.iter().zip(den) {
                d2 += (a - b) * (a - b);
                n2 += b * b;
            }
            if n2 > 0.0 {
                (d2 / n2).sqrt()
            } else {
                d2.sqrt()
            }
        };
        [
            rel(&level.head, &exact.head),
            rel(&level.velocity, &exact.velocity),
            rel(&level.pressure, &exact.pressure),
        ]
    }

    /// H1 seminorms (|u|_1, |phi|_1) from the unit-coefficient stiffnesses.
    pub fn h1_seminorms(&self, level: &TimeLevel) -> [f64; 2] {
        [
            self.l_f
                .quadratic_form(&level.velocity, &level.velocity)
                .max(0.0)
                .sqrt(),
            self.l_p
                .quadratic_form(&level.head, &level.head)
                .max(0.0)
                .sqrt(),
        ]
    }
}

/// G-norm of a consecutive state pair under the S-inner product:
/// (1/2)||v0||_S^2 - 2<<v0, v1>> + (5/2)||v1||_S^2.
pub fn g_energy(disc: &Discretization, v0: &TimeLevel, v1: &TimeLevel) -> f64 {
    0.5 * disc.s_norm_sq(v0) - 2.0 * disc.s_inner(v0, v1) + 2.5 * disc.s_norm_sq(v1)
}

/// Same quadratic form for raw vector pairs and explicit S-mass matrices;
/// used by tests and scalar surrogates.
pub fn g_energy_raw(
    m_f: &SparseMatrix,
    m_p: &SparseMatrix,
    u0: &[f64],
    phi0: &[f64],
    u1: &[f64],
    phi1: &[f64],
) -> f64 {
    let ip = |ua: &[f64], pa: &[f64], ub: &[f64], pb: &[f64]| {
        m_f.quadratic_form(ua, ub) + m_p.quadratic_form(pa, pb)
    };
    0.5 * ip(u0, phi0, u0, phi0) - 2.0 * ip(u0, phi0, u1, phi1) + 2.5 * ip(u1, phi1, u1, phi1)
}

/// Implicit-side coefficients: mass scale c_m/dt, symmetric-term scale c_a,
/// pressure/divergence scale c_b.
#[derive(Clone, Copy, Debug)]
struct StepCoeffs {
    c_m: f64,
    c_a: f64,
    c_b: f64,
}

impl StepCoeffs {
    fn of(scheme: Scheme) -> Self {
        match scheme {
            Scheme::Bdf2 => StepCoeffs {
                c_m: 1.5,
                c_a: 1.0,
                c_b: 1.0,
            },
            Scheme::Amb2 { alpha } => StepCoeffs {
                c_m: 1.0,
                c_a: alpha,
                c_b: alpha,
            },
        }
    }

    fn bdf1() -> Self {
        StepCoeffs {
            c_m: 1.0,
            c_a: 1.0,
            c_b: 1.0,
        }
    }
}

/// Factorized per-step systems for one (mesh, dt, scheme) triple, plus the
/// lift blocks for Dirichlet elimination.
pub struct StepOperators {
    scheme: Scheme,
    dt: f64,
    coeffs: StepCoeffs,
    stokes: Factorization,
    /// Velocity-block columns hitting Dirichlet DOFs: S[F, D].
    stokes_lift: SparseMatrix,
    /// Divergence columns hitting Dirichlet DOFs: B[:, D].
    b_dirichlet: SparseMatrix,
    darcy: Factorization,
    darcy_lift: SparseMatrix,
    /// A_f + A_bjsj + N_f, kept for the AMB2 history terms.
    sum_f: SparseMatrix,
    /// A_p + N_p, kept for the AMB2 history terms.
    sum_p: SparseMatrix,
    n_vel_free: usize,
    n_pressure: usize,
    /// Number of `factorize` calls made while building (always 2).
    pub factorizations: usize,
}

impl StepOperators {
    pub fn new(disc: &Discretization, config: &SchemeConfig) -> Result<Self> {
        config.validate()?;
        Self::with_coeffs(
            disc,
            config.scheme,
            config.dt,
            StepCoeffs::of(config.scheme),
        )
    }

    fn with_coeffs(
        disc: &Discretization,
        scheme: Scheme,
        dt: f64,
        coeffs: StepCoeffs,
    ) -> Result<Self> {
        let ops = &disc.ops;
        let sum_f = ops
            .a_f
            .add_scaled(&ops.a_bjsj, 1.0)
            .add_scaled(&ops.n_f, 1.0);
        let sum_p = ops.a_p.add_scaled(&ops.n_p, 1.0);

        let s_full = sum_f
            .scaled(coeffs.c_a)
            .add_scaled(&ops.m_f, coeffs.c_m / dt);
        let d_full = sum_p
            .scaled(coeffs.c_a)
            .add_scaled(&ops.m_p, coeffs.c_m / dt);

        let vel = &disc.vel_part;
        let head = &disc.head_part;
        let n_vel = disc.spaces.velocity.n_dofs;
        let n_head = disc.spaces.head.n_dofs;
        let n_pressure = disc.spaces.pressure.n_dofs;
        let vel_dir_pos = vel.dir_pos(n_vel);
        let head_dir_pos = head.dir_pos(n_head);

        let s_ff = s_full.restrict(&vel.free, &vel.free_pos, vel.free.len());
        let stokes_lift = s_full.restrict(&vel.free, &vel_dir_pos, vel.dirichlet.len());
        let all_pressure: Vec<usize> = (0..n_pressure).collect();
        let b_free = ops.b.restrict(&all_pressure, &vel.free_pos, vel.free.len());
        let b_dirichlet = ops
            .b
            .restrict(&all_pressure, &vel_dir_pos, vel.dirichlet.len());

        // saddle matrix [[S_ff, c_b B^T], [c_b B, 0]]
        let nf = vel.free.len();
        let dim = nf + n_pressure;
        let mut coo = CooBuilder::with_capacity(dim, dim, s_ff.nnz() + 2 * b_free.nnz());
        for r in 0..nf {
            let (cols, vals) = s_ff.row(r);
            for (c, v) in cols.iter().zip(vals) {
                coo.add(r, *c, *v);
            }
        }
        for r in 0..n_pressure {
            let (cols, vals) = b_free.row(r);
            for (c, v) in cols.iter().zip(vals) {
                coo.add(nf + r, *c, coeffs.c_b * *v);
                coo.add(*c, nf + r, coeffs.c_b * *v);
            }
        }
        let stokes = factorize(&coo.build())?;

        let d_ff = d_full.restrict(&head.free, &head.free_pos, head.free.len());
        let darcy_lift = d_full.restrict(&head.free, &head_dir_pos, head.dirichlet.len());
        let darcy = factorize_spd(&d_ff)?;

        Ok(Self {
            scheme,
            dt,
            coeffs,
            stokes,
            stokes_lift,
            b_dirichlet,
            darcy,
            darcy_lift,
            sum_f,
            sum_p,
            n_vel_free: nf,
            n_pressure,
            factorizations: 2,
        })
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Solve the Stokes saddle system for the full rhs `r_u` (all velocity
    /// DOFs) with Dirichlet values `u_dir`; returns the scattered full
    /// velocity vector and the pressure-block unknown.
    fn stokes_solve(
        &self,
        disc: &Discretization,
        r_u: &[f64],
        u_dir: &[f64],
    ) -> Result<(Vec<f64>, Vec<f64>)> {
        let vel = &disc.vel_part;
        let mut rhs = vec![0.0; self.n_vel_free + self.n_pressure];
        let lift = self.stokes_lift.mul_vec(u_dir);
        for (i, &d) in vel.free.iter().enumerate() {
            rhs[i] = r_u[d] - lift[i];
        }
        let b_lift = self.b_dirichlet.mul_vec(u_dir);
        for r in 0..self.n_pressure {
            rhs[self.n_vel_free + r] = -self.coeffs.c_b * b_lift[r];
        }
        let sol = self.stokes.solve(&rhs)?;
        let mut u = vec![0.0; disc.spaces.velocity.n_dofs];
        for (i, &d) in vel.free.iter().enumerate() {
            u[d] = sol[i];
        }
        for (k, &d) in vel.dirichlet.iter().enumerate() {
            u[d] = u_dir[k];
        }
        Ok((u, sol[self.n_vel_free..].to_vec()))
    }

    fn darcy_solve(
        &self,
        disc: &Discretization,
        r_phi: &[f64],
        phi_dir: &[f64],
    ) -> Result<Vec<f64>> {
        let head = &disc.head_part;
        let lift = self.darcy_lift.mul_vec(phi_dir);
        let rhs: Vec<f64> = head
            .free
            .iter()
            .enumerate()
            .map(|(i, &d)| r_phi[d] - lift[i])
            .collect();
        let sol = self.darcy.solve(&rhs)?;
        let mut phi = vec![0.0; disc.spaces.head.n_dofs];
        for (i, &d) in head.free.iter().enumerate() {
            phi[d] = sol[i];
        }
        for (k, &d) in head.dirichlet.iter().enumerate() {
            phi[d] = phi_dir[k];
        }
        Ok(phi)
    }
}

fn check_consecutive(prev2: &TimeLevel, prev: &TimeLevel, dt: f64) -> Result<()> {
    let got = prev.t - prev2.t;
    if (got - dt).abs() > 1e-12 * dt.max(1.0) {
        return Err(Error::NonConsecutiveLevels { dt, got });
    }
    Ok(())
}

/// Starting levels at t = 0 and t = dt.
pub fn initialize(
    problem: &impl Problem,
    disc: &Discretization,
    config: &SchemeConfig,
) -> Result<(TimeLevel, TimeLevel)> {
    config.validate()?;
    match config.init {
        InitMode::Interpolate => Ok((
            disc.interpolate(problem, 0.0),
            disc.interpolate(problem, config.dt),
        )),
        InitMode::ZeroInterior => Ok((
            zero_interior_level(problem, disc, 0.0),
            zero_interior_level(problem, disc, config.dt),
        )),
        InitMode::Bdf1Bootstrap => {
            let level0 = disc.interpolate(problem, 0.0);
            let level1 = bdf1_step(problem, disc, config, &level0)?;
            Ok((level0, level1))
        }
    }
}

fn zero_interior_level(problem: &impl Problem, disc: &Discretization, t: f64) -> TimeLevel {
    let mut level = TimeLevel {
        velocity: vec![0.0; disc.spaces.velocity.n_dofs],
        pressure: vec![0.0; disc.spaces.pressure.n_dofs],
        head: vec![0.0; disc.spaces.head.n_dofs],
        t,
    };
    for &d in &disc.vel_part.dirichlet {
        let c = disc.spaces.velocity.node_coords[d / 2];
        level.velocity[d] = problem.velocity(c[0], c[1], t)[d % 2];
    }
    for &d in &disc.head_part.dirichlet {
        let c = disc.spaces.head.node_coords[d];
        level.head[d] = problem.head(c[0], c[1], t);
    }
    level
}

/// One backward-Euler step with the same explicit interface treatment; used
/// only to bootstrap level 1 from level 0.
fn bdf1_step(
    problem: &impl Problem,
    disc: &Discretization,
    config: &SchemeConfig,
    level0: &TimeLevel,
) -> Result<TimeLevel> {
    let ops = StepOperators::with_coeffs(disc, config.scheme, config.dt, StepCoeffs::bdf1())?;
    let dt = config.dt;
    let t_new = level0.t + dt;
    let (f_f, f_p) = assemble_load(
        &disc.mesh,
        &disc.spaces,
        problem,
        t_new,
        &disc.params,
        &disc.quad,
    )?;

    let mut r_u = disc.ops.m_f.mul_vec(&level0.velocity);
    for v in &mut r_u {
        *v /= dt;
    }
    vec_ops::axpy(1.0, &f_f, &mut r_u);
    vec_ops::axpy(-1.0, &disc.ops.c_fp.mul_vec(&level0.head), &mut r_u);
    vec_ops::axpy(1.0, &disc.ops.n_f.mul_vec(&level0.velocity), &mut r_u);
    let u_dir = disc.dirichlet_velocity(problem, t_new);
    let (velocity, pressure) = ops.stokes_solve(disc, &r_u, &u_dir)?;

    let mut r_phi = disc.ops.m_p.mul_vec(&level0.head);
    for v in &mut r_phi {
        *v /= dt;
    }
    vec_ops::axpy(1.0, &f_p, &mut r_phi);
    vec_ops::axpy(
        1.0,
        &disc.ops.c_fp.mul_transpose_vec(&level0.velocity),
        &mut r_phi,
    );
    vec_ops::axpy(1.0, &disc.ops.n_p.mul_vec(&level0.head), &mut r_phi);
    let phi_dir = disc.dirichlet_head(problem, t_new);
    let head = ops.darcy_solve(disc, &r_phi, &phi_dir)?;

    Ok(TimeLevel {
        velocity,
        pressure,
        head,
        t: t_new,
    })
}

/// One BDF2/Gear step from levels (n-1, n) to n+1. The Stokes and Darcy
/// solves are independent; they share only the extrapolated history.
pub fn bdf2_step(
    ops: &StepOperators,
    disc: &Discretization,
    problem: &impl Problem,
    prev2: &TimeLevel,
    prev: &TimeLevel,
) -> Result<TimeLevel> {
    debug_assert!(matches!(ops.scheme, Scheme::Bdf2));
    check_consecutive(prev2, prev, ops.dt)?;
    let dt = ops.dt;
    let t_new = prev.t + dt;
    let (f_f, f_p) = assemble_load(
        &disc.mesh,
        &disc.spaces,
        problem,
        t_new,
        &disc.params,
        &disc.quad,
    )?;

    // Gear extrapolants
    let u_star = vec_ops::lin_comb(2.0, &prev.velocity, -1.0, &prev2.velocity);
    let phi_star = vec_ops::lin_comb(2.0, &prev.head, -1.0, &prev2.head);

    // Stokes: (3/(2dt)) M u + (A + N) u + B^T p = M (4u^n - u^{n-1})/(2dt)
    //         + F - C phi* + N u*
    let hist = vec_ops::lin_comb(4.0, &prev.velocity, -1.0, &prev2.velocity);
    let mut r_u = disc.ops.m_f.mul_vec(&hist);
    for v in &mut r_u {
        *v /= 2.0 * dt;
    }
    vec_ops::axpy(1.0, &f_f, &mut r_u);
    vec_ops::axpy(-1.0, &disc.ops.c_fp.mul_vec(&phi_star), &mut r_u);
    vec_ops::axpy(1.0, &disc.ops.n_f.mul_vec(&u_star), &mut r_u);
    let u_dir = disc.dirichlet_velocity(problem, t_new);
    let (velocity, pressure) = ops.stokes_solve(disc, &r_u, &u_dir)?;

    // Darcy: (3/(2dt)) M phi + (A_p + N_p) phi = M (4phi^n - phi^{n-1})/(2dt)
    //        + F_p + C^T u* + N_p phi*
    let hist = vec_ops::lin_comb(4.0, &prev.head, -1.0, &prev2.head);
    let mut r_phi = disc.ops.m_p.mul_vec(&hist);
    for v in &mut r_phi {
        *v /= 2.0 * dt;
    }
    vec_ops::axpy(1.0, &f_p, &mut r_phi);
    vec_ops::axpy(1.0, &disc.ops.c_fp.mul_transpose_vec(&u_star), &mut r_phi);
    vec_ops::axpy(1.0, &disc.ops.n_p.mul_vec(&phi_star), &mut r_phi);
    let phi_dir = disc.dirichlet_head(problem, t_new);
    let head = ops.darcy_solve(disc, &r_phi, &phi_dir)?;

    Ok(TimeLevel {
        velocity,
        pressure,
        head,
        t: t_new,
    })
}

/// One AMB2 step. The saddle solve's pressure unknown is D_a p^{n+1} / a;
/// the pressure level is recovered by inverting the three-term recurrence.
pub fn amb2_step(
    ops: &StepOperators,
    disc: &Discretization,
    problem: &impl Problem,
    prev2: &TimeLevel,
    prev: &TimeLevel,
) -> Result<TimeLevel> {
    let alpha = match ops.scheme {
        Scheme::Amb2 { alpha } => alpha,
        Scheme::Bdf2 => return Err(Error::Config("amb2_step on BDF2 operators".into())),
    };
    check_consecutive(prev2, prev, ops.dt)?;
    let dt = ops.dt;
    let t_new = prev.t + dt;
    let t_mid = prev.t + 0.5 * dt;
    let [_, c_cur, c_old] = d_alpha_coefficients(alpha);
    let (f_f, f_p) = assemble_load(
        &disc.mesh,
        &disc.spaces,
        problem,
        t_mid,
        &disc.params,
        &disc.quad,
    )?;

    // Adams-Bashforth extrapolants
    let u_star = vec_ops::lin_comb(1.5, &prev.velocity, -0.5, &prev2.velocity);
    let phi_star = vec_ops::lin_comb(1.5, &prev.head, -0.5, &prev2.head);

    // Stokes: (1/dt) M u + a (A + N) u + a B^T lambda =
    //   (1/dt) M u^n - c_cur (A+N) u^n - c_old (A+N) u^{n-1}
    //   + F(t+dt/2) - C phi* + N u*
    let mut r_u = disc.ops.m_f.mul_vec(&prev.velocity);
    for v in &mut r_u {
        *v /= dt;
    }
    vec_ops::axpy(-c_cur, &ops.sum_f.mul_vec(&prev.velocity), &mut r_u);
    vec_ops::axpy(-c_old, &ops.sum_f.mul_vec(&prev2.velocity), &mut r_u);
    vec_ops::axpy(1.0, &f_f, &mut r_u);
    vec_ops::axpy(-1.0, &disc.ops.c_fp.mul_vec(&phi_star), &mut r_u);
    vec_ops::axpy(1.0, &disc.ops.n_f.mul_vec(&u_star), &mut r_u);
    let u_dir = disc.dirichlet_velocity(problem, t_new);
    let (velocity, lambda) = ops.stokes_solve(disc, &r_u, &u_dir)?;

    // recover p^{n+1} from a*lambda = D_a p^{n+1}
    let pressure: Vec<f64> = lambda
        .iter()
        .zip(prev.pressure.iter().zip(&prev2.pressure))
        .map(|(l, (pn, pn1))| l - (c_cur * pn + c_old * pn1) / alpha)
        .collect();

    // Darcy
    let mut r_phi = disc.ops.m_p.mul_vec(&prev.head);
    for v in &mut r_phi {
        *v /= dt;
    }
    vec_ops::axpy(-c_cur, &ops.sum_p.mul_vec(&prev.head), &mut r_phi);
    vec_ops::axpy(-c_old, &ops.sum_p.mul_vec(&prev2.head), &mut r_phi);
    vec_ops::axpy(1.0, &f_p, &mut r_phi);
    vec_ops::axpy(1.0, &disc.ops.c_fp.mul_transpose_vec(&u_star), &mut r_phi);
    vec_ops::axpy(1.0, &disc.ops.n_p.mul_vec(&phi_star), &mut r_phi);
    let phi_dir = disc.dirichlet_head(problem, t_new);
    let head = ops.darcy_solve(disc, &r_phi, &phi_dir)?;

    Ok(TimeLevel {
        velocity,
        pressure,
        head,
        t: t_new,
    })
}

/// Advance one step with the configured scheme.
pub fn step(
    ops: &StepOperators,
    disc: &Discretization,
    problem: &impl Problem,
    prev2: &TimeLevel,
    prev: &TimeLevel,
) -> Result<TimeLevel> {
    match ops.scheme {
        Scheme::Bdf2 => bdf2_step(ops, disc, problem, prev2, prev),
        Scheme::Amb2 { .. } => amb2_step(ops, disc, problem, prev2, prev),
    }
}

/// One sampled row of run diagnostics.
#[derive(Clone, Copy, Debug)]
pub struct MonitorRow {
    /// Time-level index (0 is the initial level).
    pub step: usize,
    pub t: f64,
    pub e_phi: f64,
    pub e_u: f64,
    pub e_p: f64,
    /// G-norm energy of the (previous, current) pair.
    pub g_energy: f64,
    pub h1_u: f64,
    pub h1_phi: f64,
    /// S-norm of the current state.
    pub s_norm: f64,
    /// Max-norm of the discrete divergence B u.
    pub div_inf: f64,
    /// AMB2 only: max-norm of B (D_a u), the constraint the scheme states.
    pub div_dalpha_inf: Option<f64>,
}

/// Outcome of a transient run.
pub struct TransientResult {
    pub final_level: TimeLevel,
    pub series: Vec<MonitorRow>,
    /// Matrix factorizations performed over the whole run.
    pub factorizations: usize,
    pub dt: f64,
    /// Number of time levels beyond level 0.
    pub steps: usize,
}

/// Run from t = 0 to t = t_final (an integer multiple of dt within 1e-9).
///
/// Level 1 comes from initialization; scheme solves produce levels 2..=N.
/// Monitors are sampled at level 0 and every `sample_every`-th level. Any
/// non-finite state aborts with the offending step index.
pub fn run_transient(
    problem: &impl Problem,
    disc: &Discretization,
    config: &SchemeConfig,
    t_final: f64,
    sample_every: usize,
) -> Result<TransientResult> {
    config.validate()?;
    let dt = config.dt;
    let n_steps_f = t_final / dt;
    let n_steps = n_steps_f.round() as usize;
    if n_steps == 0 || (n_steps_f - n_steps as f64).abs() > 1e-9 * n_steps_f.max(1.0) {
        return Err(Error::NonIntegralStepCount { t_final, dt });
    }
    let sample_every = sample_every.max(1);

    let ops = StepOperators::new(disc, config)?;
    let mut factorizations = ops.factorizations;
    if config.init == InitMode::Bdf1Bootstrap {
        factorizations += 2; // the bootstrap builds its own pair
    }
    let (level0, level1) = initialize(problem, disc, config)?;

    let mut series = Vec::new();
    series.push(monitor_row(disc, problem, config, 0, &level0, &level0, None));
    if 1 % sample_every == 0 || n_steps == 1 {
        series.push(monitor_row(disc, problem, config, 1, &level1, &level0, None));
    }

    let mut prev2 = level0;
    let mut prev = level1;
    for k in 2..=n_steps {
        let next = step(&ops, disc, problem, &prev2, &prev).map_err(|e| Error::StepFailed {
            step: k,
            source: Box::new(e),
        })?;
        if !next.is_finite() {
            return Err(Error::NonFinite { step: k });
        }
        if k % sample_every == 0 || k == n_steps {
            series.push(monitor_row(
                disc,
                problem,
                config,
                k,
                &next,
                &prev,
                Some(&prev2),
            ));
        }
        prev2 = prev;
        prev = next;
    }

    Ok(TransientResult {
        final_level: prev,
        series,
        factorizations,
        dt,
        steps: n_steps,
    })
}

fn monitor_row(
    disc: &Discretization,
    problem: &impl Problem,
    config: &SchemeConfig,
    step: usize,
    current: &TimeLevel,
    previous: &TimeLevel,
    previous2: Option<&TimeLevel>,
) -> MonitorRow {
    let [e_phi, e_u, e_p] = disc.nodal_errors(problem, current);
    let [h1_u, h1_phi] = disc.h1_seminorms(current);
    let div = disc.ops.b.mul_vec(&current.velocity);
    let div_dalpha_inf = match (config.scheme, previous2) {
        (Scheme::Amb2 { alpha }, Some(p2)) => {
            let [c_new, c_cur, c_old] = d_alpha_coefficients(alpha);
            let d: Vec<f64> = current
                .velocity
                .iter()
                .zip(previous.velocity.iter().zip(&p2.velocity))
                .map(|(a, (b, c))| c_new * a + c_cur * b + c_old * c)
                .collect();
            Some(SparseMatrix::infinity_norm_vec(&disc.ops.b.mul_vec(&d)))
        }
        _ => None,
    };
    MonitorRow {
        step,
        t: current.t,
        e_phi,
        e_u,
        e_p,
        g_energy: g_energy(disc, previous, current),
        h1_u,
        h1_phi,
        s_norm: disc.s_norm_sq(current).max(0.0).sqrt(),
        div_inf: SparseMatrix::infinity_norm_vec(&div),
        div_dalpha_inf,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mms::ManufacturedCase;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Identically-zero exact solution: zero forcing, zero boundary data.
    pub(crate) struct ZeroProblem;

    impl Problem for ZeroProblem {
        fn velocity(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn velocity_time_deriv(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn velocity_gradient(&self, _: f64, _: f64, _: f64) -> [[f64; 2]; 2] {
            [[0.0, 0.0], [0.0, 0.0]]
        }
        fn velocity_laplacian(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn pressure(&self, _: f64, _: f64, _: f64) -> f64 {
            0.0
        }
        fn pressure_gradient(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn head(&self, _: f64, _: f64, _: f64) -> f64 {
            0.0
        }
        fn head_time_deriv(&self, _: f64, _: f64, _: f64) -> f64 {
            0.0
        }
        fn head_gradient(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn head_hessian(&self, _: f64, _: f64, _: f64) -> [f64; 3] {
            [0.0, 0.0, 0.0]
        }
    }

    /// Zero problem whose fluid forcing turns NaN after `t0`.
    struct NanForcingAfter(f64);

    impl Problem for NanForcingAfter {
        fn velocity(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn velocity_time_deriv(&self, _: f64, _: f64, t: f64) -> [f64; 2] {
            if t > self.0 {
                [f64::NAN, f64::NAN]
            } else {
                [0.0, 0.0]
            }
        }
        fn velocity_gradient(&self, _: f64, _: f64, _: f64) -> [[f64; 2]; 2] {
            [[0.0, 0.0], [0.0, 0.0]]
        }
        fn velocity_laplacian(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn pressure(&self, _: f64, _: f64, _: f64) -> f64 {
            0.0
        }
        fn pressure_gradient(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn head(&self, _: f64, _: f64, _: f64) -> f64 {
            0.0
        }
        fn head_time_deriv(&self, _: f64, _: f64, _: f64) -> f64 {
            0.0
        }
        fn head_gradient(&self, _: f64, _: f64, _: f64) -> [f64; 2] {
            [0.0, 0.0]
        }
        fn head_hessian(&self, _: f64, _: f64, _: f64) -> [f64; 3] {
            [0.0, 0.0, 0.0]
        }
    }

    fn config(scheme: Scheme, dt: f64) -> SchemeConfig {
        SchemeConfig::new(scheme, dt, ManufacturedCase::Example1.default_params())
    }

    fn disc(n: usize) -> Discretization {
        Discretization::new(
            n,
            ManufacturedCase::Example1.default_params(),
            QuadratureConfig::default(),
        )
        .unwrap()
    }

    #[test]
    fn d_alpha_coefficients_sum_to_one() {
        let [a, b, c] = d_alpha_coefficients(0.8);
        assert!((a - 0.8).abs() < 1e-15);
        assert!((b + 0.1).abs() < 1e-15);
        assert!((c - 0.3).abs() < 1e-15);
        assert!((a + b + c - 1.0).abs() < 1e-15);
    }

    #[test]
    fn amb2_rejects_alpha_out_of_range() {
        let d = disc(2);
        for alpha in [0.5, 1.0, 0.2, 1.3] {
            let cfg = config(Scheme::Amb2 { alpha }, 0.1);
            assert!(matches!(
                StepOperators::new(&d, &cfg),
                Err(Error::AlphaOutOfRange { .. })
            ));
        }
    }

    #[test]
    fn g_energy_basics() {
        // scalar surrogate with a single unit-mass fluid DOF
        let m_f = SparseMatrix::identity(1);
        let m_p = SparseMatrix::zeros(0, 0);
        let e = g_energy_raw(&m_f, &m_p, &[0.0], &[], &[0.0], &[]);
        assert_eq!(e, 0.0);
        let e = g_energy_raw(&m_f, &m_p, &[0.0], &[], &[1.0], &[]);
        assert!((e - 2.5).abs() < 1e-15);

        // identity: <(3/2)v2 - 2v1 + (1/2)v0, v2> =
        //   (1/2)(|w1|_G^2 - |w0|_G^2) + (1/4)||v2 - 2v1 + v0||^2
        let (v0, v1, v2) = (0.0f64, 0.0f64, 1.0f64);
        let lhs = (1.5 * v2 - 2.0 * v1 + 0.5 * v0) * v2;
        let w1 = g_energy_raw(&m_f, &m_p, &[v1], &[], &[v2], &[]);
        let w0 = g_energy_raw(&m_f, &m_p, &[v0], &[], &[v1], &[]);
        let rhs = 0.5 * (w1 - w0) + 0.25 * (v2 - 2.0 * v1 + v0).powi(2);
        assert!((lhs - 1.5).abs() < 1e-15);
        assert!((lhs - rhs).abs() < 1e-15);
    }

    #[test]
    fn g_norm_identity_random_states() {
        let d = disc(4);
        let mut rng = StdRng::seed_from_u64(5);
        let nv = d.spaces.velocity.n_dofs;
        let nh = d.spaces.head.n_dofs;
        let rand_level = |rng: &mut StdRng, t: f64| TimeLevel {
            velocity: (0..nv).map(|_| rng.random::<f64>() - 0.5).collect(),
            pressure: vec![],
            head: (0..nh).map(|_| rng.random::<f64>() - 0.5).collect(),
            t,
        };
        let combine = |a: &TimeLevel, b: &TimeLevel, c: &TimeLevel, ca: f64, cb: f64, cc: f64| {
            TimeLevel {
                velocity: a
                    .velocity
                    .iter()
                    .zip(b.velocity.iter().zip(&c.velocity))
                    .map(|(x, (y, z))| ca * x + cb * y + cc * z)
                    .collect(),
                pressure: vec![],
                head: a
                    .head
                    .iter()
                    .zip(b.head.iter().zip(&c.head))
                    .map(|(x, (y, z))| ca * x + cb * y + cc * z)
                    .collect(),
                t: 0.0,
            }
        };
        for _ in 0..100 {
            let v0 = rand_level(&mut rng, 0.0);
            let v1 = rand_level(&mut rng, 1.0);
            let v2 = rand_level(&mut rng, 2.0);
            let combo = combine(&v2, &v1, &v0, 1.5, -2.0, 0.5);
            let delta = combine(&v2, &v1, &v0, 1.0, -2.0, 1.0);
            let lhs = d.s_inner(&combo, &v2);
            let rhs = 0.5 * (g_energy(&d, &v1, &v2) - g_energy(&d, &v0, &v1))
                + 0.25 * d.s_norm_sq(&delta);
            assert!(
                (lhs - rhs).abs() <= 1e-11 * lhs.abs().max(rhs.abs()).max(1.0),
                "{lhs} vs {rhs}"
            );
        }
    }

    #[test]
    fn initialize_matches_exact_values() {
        let d = disc(4);
        let case = ManufacturedCase::Example1;
        let cfg = config(Scheme::Bdf2, 0.25);
        let (l0, l1) = initialize(&case, &d, &cfg).unwrap();
        assert_eq!(l0.t, 0.0);
        assert_eq!(l1.t, 0.25);
        // u(0,1) = (1,2) at t = 0; (0,1) is a fluid corner node
        let k = d
            .spaces
            .velocity
            .node_coords
            .iter()
            .position(|c| c == &[0.0, 1.0])
            .unwrap();
        assert!((l0.velocity[2 * k] - 1.0).abs() < 1e-15);
        assert!((l0.velocity[2 * k + 1] - 2.0).abs() < 1e-15);
        // phi(0,0) = 0 at t = 0
        let k = d
            .spaces
            .head
            .node_coords
            .iter()
            .position(|c| c == &[0.0, 0.0])
            .unwrap();
        assert!(l0.head[k].abs() < 1e-15);

        // steady case: both levels identical in u and phi
        let case = ManufacturedCase::Example2;
        let (l0, l1) = initialize(&case, &d, &cfg).unwrap();
        assert_eq!(l0.velocity, l1.velocity);
        assert_eq!(l0.head, l1.head);
    }

    #[test]
    fn zero_problem_steps_stay_zero() {
        let d = disc(3);
        for scheme in [Scheme::Bdf2, Scheme::Amb2 { alpha: 0.8 }] {
            let cfg = config(scheme, 0.125);
            let ops = StepOperators::new(&d, &cfg).unwrap();
            let (l0, l1) = initialize(&ZeroProblem, &d, &cfg).unwrap();
            let l2 = step(&ops, &d, &ZeroProblem, &l0, &l1).unwrap();
            assert!(SparseMatrix::infinity_norm_vec(&l2.velocity) < 1e-14);
            assert!(SparseMatrix::infinity_norm_vec(&l2.head) < 1e-14);
            assert!(SparseMatrix::infinity_norm_vec(&l2.pressure) < 1e-12);
        }
    }

    #[test]
    fn steps_reject_non_consecutive_levels() {
        let d = disc(2);
        let cfg = config(Scheme::Bdf2, 0.1);
        let ops = StepOperators::new(&d, &cfg).unwrap();
        let (l0, _) = initialize(&ZeroProblem, &d, &cfg).unwrap();
        let mut bad = l0.clone();
        bad.t = 0.3;
        assert!(matches!(
            bdf2_step(&ops, &d, &ZeroProblem, &l0, &bad),
            Err(Error::NonConsecutiveLevels { .. })
        ));
    }

    #[test]
    fn bdf2_step_holds_steady_fixed_point() {
        // exact steady starting levels stay near the steady solution
        let d = disc(16);
        let case = ManufacturedCase::Example2;
        let cfg = config(Scheme::Bdf2, 1.0 / 16.0);
        let ops = StepOperators::new(&d, &cfg).unwrap();
        let (l0, l1) = initialize(&case, &d, &cfg).unwrap();
        let l2 = bdf2_step(&ops, &d, &case, &l0, &l1).unwrap();
        let [e_phi, _, _] = d.nodal_errors(&case, &l2);
        assert!(e_phi <= 1e-3, "phi error after one step: {e_phi}");
        // discrete divergence of the solve
        let div = d.ops.b.mul_vec(&l2.velocity);
        assert!(SparseMatrix::infinity_norm_vec(&div) <= 1e-9);
    }

    #[test]
    fn bdf2_matches_short_time_reference_errors() {
        // transient case, coarsest level of the temporal refinement table
        let d = disc(16);
        let case = ManufacturedCase::Example1;
        let cfg = config(Scheme::Bdf2, 1.0 / 16.0);
        let r = run_transient(&case, &d, &cfg, 1.0, 16).unwrap();
        let [e_phi, e_u, e_p] = d.nodal_errors(&case, &r.final_level);
        // reference relative errors (5.76e-5, 8.26e-5, 1.15e-2) within x3
        assert!(e_phi < 3.0 * 5.76e-5 && e_phi > 5.76e-5 / 3.0, "{e_phi}");
        assert!(e_u < 3.0 * 8.26e-5 && e_u > 8.26e-5 / 3.0, "{e_u}");
        assert!(e_p < 3.0 * 1.15e-2 && e_p > 1.15e-2 / 3.0, "{e_p}");
    }

    #[test]
    fn amb2_matches_short_time_reference_errors() {
        let d = disc(16);
        let case = ManufacturedCase::Example1;
        let cfg = config(Scheme::Amb2 { alpha: 0.8 }, 1.0 / 16.0);
        let r = run_transient(&case, &d, &cfg, 1.0, 16).unwrap();
        let [e_phi, e_u, e_p] = d.nodal_errors(&case, &r.final_level);
        // reference relative errors (3.43e-3, 1.11e-4, 4.11e-2) within x3
        assert!(e_phi < 3.0 * 3.43e-3 && e_phi > 3.43e-3 / 3.0, "{e_phi}");
        assert!(e_u < 3.0 * 1.11e-4 && e_u > 1.11e-4 / 3.0, "{e_u}");
        assert!(e_p < 3.0 * 4.11e-2 && e_p > 4.11e-2 / 3.0, "{e_p}");
    }

    #[test]
    fn transient_step_counting() {
        let d = disc(2);
        let case = ManufacturedCase::Example1;
        let cfg = config(Scheme::Bdf2, 0.25);
        // T = dt: the initialized level 1 is the final state
        let r = run_transient(&case, &d, &cfg, 0.25, 1).unwrap();
        assert_eq!(r.steps, 1);
        assert!((r.final_level.t - 0.25).abs() < 1e-15);

        // 40 steps sampled every 10: initial row + 4 rows
        let r = run_transient(&case, &d, &cfg, 0.25 * 40.0, 10).unwrap();
        assert_eq!(r.steps, 40);
        assert_eq!(r.series.len(), 1 + 4);

        // non-integral T/dt rejected
        assert!(matches!(
            run_transient(&case, &d, &cfg, 0.3, 1),
            Err(Error::NonIntegralStepCount { .. })
        ));
    }

    #[test]
    fn transient_factorizes_once_per_scheme() {
        let d = disc(4);
        let case = ManufacturedCase::Example1;
        let cfg = config(Scheme::Bdf2, 0.125);
        let r = run_transient(&case, &d, &cfg, 1.0, 1).unwrap();
        assert_eq!(r.factorizations, 2); // one Stokes + one Darcy
    }

    #[test]
    fn nan_forcing_aborts_with_step_index() {
        let d = disc(2);
        let cfg = config(Scheme::Bdf2, 0.25);
        let r = run_transient(&NanForcingAfter(0.3), &d, &cfg, 2.0, 1);
        match r {
            Err(Error::NonFinite { step }) => assert_eq!(step, 2),
            other => panic!("expected NonFinite, got {:?}", other.err()),
        }
    }

    #[test]
    fn bdf1_bootstrap_approximates_level_one() {
        let d = disc(8);
        let case = ManufacturedCase::Example1;
        let mut cfg = config(Scheme::Bdf2, 1.0 / 32.0);
        cfg.init = InitMode::Bdf1Bootstrap;
        let (_, l1) = initialize(&case, &d, &cfg).unwrap();
        let [e_phi, e_u, _] = d.nodal_errors(&case, &l1);
        // one backward-Euler step commits an O(dt^2) local error
        assert!(e_phi < 5e-3, "{e_phi}");
        assert!(e_u < 5e-3, "{e_u}");
    }

    #[test]
    fn divergence_constraint_after_steps() {
        let d = disc(8);
        let case = ManufacturedCase::Example1;
        for scheme in [Scheme::Bdf2, Scheme::Amb2 { alpha: 0.8 }] {
            let cfg = config(scheme, 1.0 / 8.0);
            let r = run_transient(&case, &d, &cfg, 1.0, 1).unwrap();
            for row in &r.series[2..] {
                assert!(row.div_inf <= 1e-9, "{scheme:?}: {}", row.div_inf);
            }
        }
    }

    /// Scalar surrogate of both schemes on y' = -y; second order means the
    /// error ratio under dt halving approaches 4.
    fn scalar_ode_error(scheme: Scheme, dt: f64) -> f64 {
        let n = (1.0 / dt).round() as usize;
        let mut y_prev2 = 1.0f64;
        let mut y_prev = (-dt).exp();
        for _ in 2..=n {
            let y_next = match scheme {
                Scheme::Bdf2 => (4.0 * y_prev - y_prev2) / (3.0 + 2.0 * dt),
                Scheme::Amb2 { alpha } => {
                    let [_, c_cur, c_old] = d_alpha_coefficients(alpha);
                    (y_prev / dt - c_cur * y_prev - c_old * y_prev2) / (1.0 / dt + alpha)
                }
            };
            y_prev2 = y_prev;
            y_prev = y_next;
        }
        (y_prev - (-1.0f64).exp()).abs()
    }

    #[test]
    fn scalar_surrogate_is_second_order() {
        for scheme in [Scheme::Bdf2, Scheme::Amb2 { alpha: 0.8 }] {
            let e40 = scalar_ode_error(scheme, 1.0 / 40.0);
            let e80 = scalar_ode_error(scheme, 1.0 / 80.0);
            assert!(e40 / e80 >= 3.7, "{scheme:?}: ratio {}", e40 / e80);
        }
    }
}
