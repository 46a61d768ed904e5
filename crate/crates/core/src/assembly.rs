//! Assembly of every matrix and vector in the weak form.
//!
//! Unknowns and spaces: fluid velocity u in vector P2 on the conduit mesh,
//! pressure p in P1 on the conduit mesh, hydraulic head phi in P2 on the
//! matrix mesh. The assembled operators are
//!
//! ```text
//! M_f  fluid vector mass            (u_t, v)
//! M_p  head mass scaled by g S      g S (phi_t, psi)
//! A_f  nu-gradient stiffness        nu (grad u, grad v)
//! A_p  conductivity stiffness       g (K grad phi, grad psi)
//! A_bjsj  tangential interface mass alpha_BJ (u.tau, v.tau)_Gamma
//! B    divergence, pressure rows    b(v, q) = -(q, div v)
//! C_fp interface coupling           g (phi, v.n_f)_Gamma
//! N_f  gamma_f (u.n_f, v.n_f)_Gamma
//! N_p  gamma_p (phi, psi)_Gamma
//! ```
//!
//! The porous side of the skew coupling is never assembled: it is the
//! negative transpose of `C_fp` by definition, so skew-symmetry of the
//! coupled block is exact rather than a quadrature accident. The gradient
//! form (not the symmetric-gradient form) is used for `A_f`, matching the
//! weak formulation; manufactured forcing is derived with the same
//! convention.
//!
//! Dirichlet conditions are not applied here; mass and stiffness matrices
//! are the raw unconstrained operators. Row/column elimination happens when
//! the per-step systems are formed.

use crate::basis::{
    build_dof_map, edge_quadrature, p1_eval, p2_edge_eval, p2_eval, triangle_quadrature, DofMap,
    EdgeRule, Space, TriangleRule,
};
use crate::error::{Error, Result};
use crate::mesh::{CoupledMesh, SubMesh, GEOM_TOL};
use crate::mms::{forcing_fluid, forcing_porous, interface_residuals, Problem};
use crate::sparse::{CooBuilder, SparseMatrix};

/// Constant symmetric 2x2 tensor, the hydraulic conductivity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tensor2 {
    pub xx: f64,
    pub xy: f64,
    pub yy: f64,
}

impl Tensor2 {
    pub fn isotropic(k: f64) -> Self {
        Self {
            xx: k,
            xy: 0.0,
            yy: k,
        }
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let tr = self.xx + self.yy;
        let det = self.xx * self.yy - self.xy * self.xy;
        let disc = (tr * tr / 4.0 - det).max(0.0).sqrt();
        tr / 2.0 - disc
    }

    pub fn is_spd(&self) -> bool {
        self.min_eigenvalue() > 0.0
    }

    #[inline]
    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [
            self.xx * v[0] + self.xy * v[1],
            self.xy * v[0] + self.yy * v[1],
        ]
    }
}

/// Physical parameters of the coupled system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhysicalParams {
    /// Kinematic viscosity.
    pub nu: f64,
    /// Gravitational constant.
    pub g: f64,
    /// Water storage coefficient S.
    pub storage: f64,
    /// Hydraulic conductivity tensor K.
    pub conductivity: Tensor2,
    /// Beavers-Joseph-Saffman-Jones slip coefficient.
    pub alpha_bj: f64,
    /// Interface stabilization weight on the fluid normal trace.
    pub gamma_f: f64,
    /// Interface stabilization weight on the head trace.
    pub gamma_p: f64,
}

/// Quadrature degrees used during assembly.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureConfig {
    pub triangle_degree: usize,
    pub edge_degree: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        // minimal degrees that keep quadrature error below the k=2
        // discretization error
        Self {
            triangle_degree: 5,
            edge_degree: 5,
        }
    }
}

/// DOF maps of the three unknown fields.
#[derive(Clone, Debug)]
pub struct FemSpaces {
    /// Vector P2 on the conduit mesh.
    pub velocity: DofMap,
    /// P1 on the conduit mesh.
    pub pressure: DofMap,
    /// P2 on the matrix mesh.
    pub head: DofMap,
}

impl FemSpaces {
    pub fn new(mesh: &CoupledMesh) -> Self {
        Self {
            velocity: build_dof_map(&mesh.fluid, Space::VectorP2),
            pressure: build_dof_map(&mesh.fluid, Space::ScalarP1),
            head: build_dof_map(&mesh.porous, Space::ScalarP2),
        }
    }
}

/// The complete set of assembled (unconstrained) operators.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    pub m_f: SparseMatrix,
    pub m_p: SparseMatrix,
    pub a_f: SparseMatrix,
    pub a_bjsj: SparseMatrix,
    pub a_p: SparseMatrix,
    pub b: SparseMatrix,
    pub c_fp: SparseMatrix,
    pub n_f: SparseMatrix,
    pub n_p: SparseMatrix,
}

impl OperatorSet {
    pub fn assemble(
        mesh: &CoupledMesh,
        spaces: &FemSpaces,
        params: &PhysicalParams,
        quad: &QuadratureConfig,
    ) -> Result<Self> {
        let (m_f, m_p) = assemble_masses(mesh, spaces, params, quad)?;
        let (a_f, a_bjsj, a_p) = assemble_stiffnesses(mesh, spaces, params, quad)?;
        let b = assemble_divergence(mesh, spaces, quad)?;
        let (c_fp, n_f, n_p) = assemble_interface(mesh, spaces, params, quad)?;
        Ok(Self {
            m_f,
            m_p,
            a_f,
            a_bjsj,
            a_p,
            b,
            c_fp,
            n_f,
            n_p,
        })
    }
}

/// Affine map data for one triangle.
struct TriGeom {
    origin: [f64; 2],
    jac: [[f64; 2]; 2],
    det: f64,
}

impl TriGeom {
    fn new(mesh: &SubMesh, t: usize) -> Self {
        let [a, b, c] = mesh.triangles[t];
        let pa = mesh.vertices[a];
        let pb = mesh.vertices[b];
        let pc = mesh.vertices[c];
        let jac = [
            [pb[0] - pa[0], pc[0] - pa[0]],
            [pb[1] - pa[1], pc[1] - pa[1]],
        ];
        let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
        Self {
            origin: pa,
            jac,
            det,
        }
    }

    #[inline]
    fn point(&self, p: [f64; 2]) -> [f64; 2] {
        [
            self.origin[0] + self.jac[0][0] * p[0] + self.jac[0][1] * p[1],
            self.origin[1] + self.jac[1][0] * p[0] + self.jac[1][1] * p[1],
        ]
    }

    /// Physical gradient from a reference gradient: J^{-T} g.
    #[inline]
    fn grad(&self, g: [f64; 2]) -> [f64; 2] {
        let inv_det = 1.0 / self.det;
        [
            inv_det * (self.jac[1][1] * g[0] - self.jac[1][0] * g[1]),
            inv_det * (-self.jac[0][1] * g[0] + self.jac[0][0] * g[1]),
        ]
    }
}

/// Precomputed basis data at the quadrature points of one rule.
struct P2AtQuad {
    values: Vec<[f64; 6]>,
    ref_grads: Vec<[[f64; 2]; 6]>,
}

fn p2_at_quad(rule: &TriangleRule) -> P2AtQuad {
    let mut values = Vec::with_capacity(rule.points.len());
    let mut ref_grads = Vec::with_capacity(rule.points.len());
    for p in &rule.points {
        let (v, g) = p2_eval(p[0], p[1]);
        values.push(v);
        ref_grads.push(g);
    }
    P2AtQuad { values, ref_grads }
}

/// Scalar P2 mass on one submesh, scaled by `weight`.
fn p2_mass(mesh: &SubMesh, map: &DofMap, rule: &TriangleRule, weight: f64) -> SparseMatrix {
    let basis = p2_at_quad(rule);
    let nscalar = map.n_nodes;
    let mut coo = CooBuilder::with_capacity(nscalar, nscalar, mesh.triangles.len() * 36);
    for t in 0..mesh.triangles.len() {
        let geom = TriGeom::new(mesh, t);
        let nodes = map.cell_nodes(t);
        let mut local = [[0.0; 6]; 6];
        for (q, w) in rule.weights.iter().enumerate() {
            let v = &basis.values[q];
            let scale = w * geom.det.abs() * weight;
            for i in 0..6 {
                for j in 0..6 {
                    local[i][j] += scale * v[i] * v[j];
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                coo.add(nodes[i], nodes[j], local[i][j]);
            }
        }
    }
    coo.build()
}

/// Scalar P2 stiffness with constant coefficient tensor `k`, scaled by `weight`.
fn p2_stiffness(
    mesh: &SubMesh,
    map: &DofMap,
    rule: &TriangleRule,
    k: &Tensor2,
    weight: f64,
) -> SparseMatrix {
    let basis = p2_at_quad(rule);
    let nscalar = map.n_nodes;
    let mut coo = CooBuilder::with_capacity(nscalar, nscalar, mesh.triangles.len() * 36);
    for t in 0..mesh.triangles.len() {
        let geom = TriGeom::new(mesh, t);
        let nodes = map.cell_nodes(t);
        let mut local = [[0.0; 6]; 6];
        for (q, w) in rule.weights.iter().enumerate() {
            let scale = w * geom.det.abs() * weight;
            let grads: Vec<[f64; 2]> = basis.ref_grads[q].iter().map(|g| geom.grad(*g)).collect();
            for i in 0..6 {
                let kg = k.apply(grads[i]);
                for j in 0..6 {
                    local[i][j] += scale * (kg[0] * grads[j][0] + kg[1] * grads[j][1]);
                }
            }
        }
        for i in 0..6 {
            for j in 0..6 {
                coo.add(nodes[i], nodes[j], local[i][j]);
            }
        }
    }
    coo.build()
}

/// Expand a scalar node-by-node matrix to the interleaved vector space: the
/// same block acts on each velocity component.
fn expand_to_vector(scalar: &SparseMatrix) -> SparseMatrix {
    let n = scalar.nrows();
    let mut coo = CooBuilder::with_capacity(2 * n, 2 * n, 2 * scalar.nnz());
    for r in 0..n {
        let (cols, vals) = scalar.row(r);
        for (c, v) in cols.iter().zip(vals) {
            coo.add(2 * r, 2 * c, *v);
            coo.add(2 * r + 1, 2 * c + 1, *v);
        }
    }
    coo.build()
}

/// Fluid vector mass `M_f` (unscaled) and head mass `M_p` (carries g S).
pub fn assemble_masses(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    params: &PhysicalParams,
    quad: &QuadratureConfig,
) -> Result<(SparseMatrix, SparseMatrix)> {
    let rule = triangle_quadrature(quad.triangle_degree)?;
    let scalar_f = p2_mass(&mesh.fluid, &spaces.velocity, &rule, 1.0);
    let m_f = expand_to_vector(&scalar_f);
    let m_p = p2_mass(
        &mesh.porous,
        &spaces.head,
        &rule,
        params.g * params.storage,
    );
    Ok((m_f, m_p))
}

/// Gradient-form stiffnesses `A_f`, `A_bjsj`, `A_p`.
pub fn assemble_stiffnesses(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    params: &PhysicalParams,
    quad: &QuadratureConfig,
) -> Result<(SparseMatrix, SparseMatrix, SparseMatrix)> {
    if !params.conductivity.is_spd() {
        return Err(Error::NonSpdConductivity);
    }
    let rule = triangle_quadrature(quad.triangle_degree)?;
    let scalar_f = p2_stiffness(
        &mesh.fluid,
        &spaces.velocity,
        &rule,
        &Tensor2::isotropic(1.0),
        params.nu,
    );
    let a_f = expand_to_vector(&scalar_f);
    let a_p = p2_stiffness(
        &mesh.porous,
        &spaces.head,
        &rule,
        &params.conductivity,
        params.g,
    );

    // tangential interface mass on the fluid trace
    let edge_rule = edge_quadrature(quad.edge_degree)?;
    let n_dofs = spaces.velocity.n_dofs;
    let mut coo = CooBuilder::new(n_dofs, n_dofs);
    for &(ef, _) in &mesh.interface_pairs {
        let geom = EdgeGeom::on_interface(&mesh.fluid, ef)?;
        let nodes = spaces.velocity.edge_nodes(&mesh.fluid, ef);
        let local = trace_mass(&edge_rule, geom.length);
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = params.alpha_bj * geom.tangent[a] * geom.tangent[b] * local[i][j];
                        if v != 0.0 {
                            coo.add(2 * nodes[i] + a, 2 * nodes[j] + b, v);
                        }
                    }
                }
            }
        }
    }
    let a_bjsj = coo.build();
    Ok((a_f, a_bjsj, a_p))
}

/// Divergence matrix `B` with pressure rows and velocity columns;
/// b(v, q) = q^T B v = -(q, div v).
pub fn assemble_divergence(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    quad: &QuadratureConfig,
) -> Result<SparseMatrix> {
    let rule = triangle_quadrature(quad.triangle_degree)?;
    let basis = p2_at_quad(&rule);
    let np = spaces.pressure.n_dofs;
    let nv = spaces.velocity.n_dofs;
    let mut coo = CooBuilder::with_capacity(np, nv, mesh.fluid.triangles.len() * 36);
    for t in 0..mesh.fluid.triangles.len() {
        let geom = TriGeom::new(&mesh.fluid, t);
        let vel_nodes = spaces.velocity.cell_nodes(t);
        let p_nodes = spaces.pressure.cell_nodes(t);
        for (q, w) in rule.weights.iter().enumerate() {
            let scale = w * geom.det.abs();
            let (pv, _) = p1_eval(rule.points[q][0], rule.points[q][1]);
            for (iq, &pn) in p_nodes.iter().enumerate() {
                for (jv, &vn) in vel_nodes.iter().enumerate() {
                    let grad = geom.grad(basis.ref_grads[q][jv]);
                    for c in 0..2 {
                        coo.add(pn, 2 * vn + c, -scale * pv[iq] * grad[c]);
                    }
                }
            }
        }
    }
    Ok(coo.build())
}

/// Interface edge geometry with the fixed frame of the flat interface y = 1:
/// fluid outward normal (0,-1), tangent (1,0).
struct EdgeGeom {
    start: [f64; 2],
    end: [f64; 2],
    length: f64,
    tangent: [f64; 2],
    normal: [f64; 2],
}

impl EdgeGeom {
    fn on_interface(mesh: &SubMesh, e: usize) -> Result<Self> {
        let [a, b] = mesh.edges[e].vertices;
        let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
        if (pa[1] - 1.0).abs() > GEOM_TOL || (pb[1] - 1.0).abs() > GEOM_TOL {
            return Err(Error::InterfaceMismatch { pair: e });
        }
        let length = (pb[0] - pa[0]).abs();
        Ok(Self {
            start: pa,
            end: pb,
            length,
            tangent: [1.0, 0.0],
            normal: [0.0, -1.0],
        })
    }

    #[inline]
    fn point(&self, t: f64) -> [f64; 2] {
        [
            (1.0 - t) * self.start[0] + t * self.end[0],
            (1.0 - t) * self.start[1] + t * self.end[1],
        ]
    }
}

/// P2 trace mass on an edge of length `len`.
fn trace_mass(rule: &EdgeRule, len: f64) -> [[f64; 3]; 3] {
    let mut local = [[0.0; 3]; 3];
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        let v = p2_edge_eval(*t);
        for i in 0..3 {
            for j in 0..3 {
                local[i][j] += w * len * v[i] * v[j];
            }
        }
    }
    local
}

/// Interface matrices: the coupling `C_fp` (fluid velocity rows, head
/// columns) for g (phi, v.n_f)_Gamma, and the stabilization masses `N_f`,
/// `N_p`. The porous-side coupling block is -C_fp^T and is never assembled.
pub fn assemble_interface(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    params: &PhysicalParams,
    quad: &QuadratureConfig,
) -> Result<(SparseMatrix, SparseMatrix, SparseMatrix)> {
    if params.gamma_f < 0.0 || params.gamma_p < 0.0 {
        return Err(Error::Config(format!(
            "stabilization weights must be nonnegative, got gamma_f = {}, gamma_p = {}",
            params.gamma_f, params.gamma_p
        )));
    }
    let rule = edge_quadrature(quad.edge_degree)?;
    let nv = spaces.velocity.n_dofs;
    let nh = spaces.head.n_dofs;
    let mut c_coo = CooBuilder::new(nv, nh);
    let mut nf_coo = CooBuilder::new(nv, nv);
    let mut np_coo = CooBuilder::new(nh, nh);

    for (pair, &(ef, ep)) in mesh.interface_pairs.iter().enumerate() {
        let fg = EdgeGeom::on_interface(&mesh.fluid, ef)?;
        let pg = EdgeGeom::on_interface(&mesh.porous, ep)?;
        // orient the porous parameterization to follow the fluid one
        let aligned = (fg.start[0] - pg.start[0]).abs() <= GEOM_TOL
            && (fg.end[0] - pg.end[0]).abs() <= GEOM_TOL;
        let reversed = (fg.start[0] - pg.end[0]).abs() <= GEOM_TOL
            && (fg.end[0] - pg.start[0]).abs() <= GEOM_TOL;
        if !(aligned || reversed) {
            return Err(Error::InterfaceMismatch { pair });
        }

        let f_nodes = spaces.velocity.edge_nodes(&mesh.fluid, ef);
        let p_nodes = spaces.head.edge_nodes(&mesh.porous, ep);

        for (t, w) in rule.points.iter().zip(&rule.weights) {
            let s = if aligned { *t } else { 1.0 - *t };
            let fv = p2_edge_eval(*t);
            let pv = p2_edge_eval(s);
            let scale = w * fg.length;
            for i in 0..3 {
                for j in 0..3 {
                    // g (phi_j, v_i . n_f)
                    for a in 0..2 {
                        let v = params.g * fg.normal[a] * fv[i] * pv[j] * scale;
                        if v != 0.0 {
                            c_coo.add(2 * f_nodes[i] + a, p_nodes[j], v);
                        }
                    }
                }
            }
        }

        let f_local = trace_mass(&rule, fg.length);
        let p_local = trace_mass(&rule, pg.length);
        for i in 0..3 {
            for j in 0..3 {
                for a in 0..2 {
                    for b in 0..2 {
                        let v = params.gamma_f * fg.normal[a] * fg.normal[b] * f_local[i][j];
                        if v != 0.0 {
                            nf_coo.add(2 * f_nodes[i] + a, 2 * f_nodes[j] + b, v);
                        }
                    }
                }
                np_coo.add(p_nodes[i], p_nodes[j], params.gamma_p * p_local[i][j]);
            }
        }
    }
    Ok((c_coo.build(), nf_coo.build(), np_coo.build()))
}

/// Load vectors (F_f, F_p) at time `t`: element quadrature of the closed-form
/// forcing, the porous load carrying the g factor, plus the natural boundary
/// terms on the interface that absorb the exact solution's interface defects.
pub fn assemble_load(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    problem: &impl Problem,
    t: f64,
    params: &PhysicalParams,
    quad: &QuadratureConfig,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut f_f = assemble_fluid_volume_load(mesh, spaces, quad, |x, y| {
        forcing_fluid(problem, params, x, y, t)
    })?;
    let mut f_p = assemble_porous_volume_load(mesh, spaces, quad, |x, y| {
        params.g * forcing_porous(problem, params, x, y, t)
    })?;
    add_interface_corrections(mesh, spaces, problem, t, params, quad, &mut f_f, &mut f_p)?;
    Ok((f_f, f_p))
}

/// Quadrature of an arbitrary fluid body force against the velocity basis.
pub fn assemble_fluid_volume_load(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    quad: &QuadratureConfig,
    force: impl Fn(f64, f64) -> [f64; 2],
) -> Result<Vec<f64>> {
    let rule = triangle_quadrature(quad.triangle_degree)?;
    let basis = p2_at_quad(&rule);
    let mut out = vec![0.0; spaces.velocity.n_dofs];
    for t in 0..mesh.fluid.triangles.len() {
        let geom = TriGeom::new(&mesh.fluid, t);
        let nodes = spaces.velocity.cell_nodes(t);
        for (q, w) in rule.weights.iter().enumerate() {
            let p = geom.point(rule.points[q]);
            let f = force(p[0], p[1]);
            let scale = w * geom.det.abs();
            for (i, &node) in nodes.iter().enumerate() {
                out[2 * node] += scale * f[0] * basis.values[q][i];
                out[2 * node + 1] += scale * f[1] * basis.values[q][i];
            }
        }
    }
    Ok(out)
}

/// Quadrature of an arbitrary porous source (already carrying any g factor)
/// against the head basis.
pub fn assemble_porous_volume_load(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    quad: &QuadratureConfig,
    source: impl Fn(f64, f64) -> f64,
) -> Result<Vec<f64>> {
    let rule = triangle_quadrature(quad.triangle_degree)?;
    let basis = p2_at_quad(&rule);
    let mut out = vec![0.0; spaces.head.n_dofs];
    for t in 0..mesh.porous.triangles.len() {
        let geom = TriGeom::new(&mesh.porous, t);
        let nodes = spaces.head.cell_nodes(t);
        for (q, w) in rule.weights.iter().enumerate() {
            let p = geom.point(rule.points[q]);
            let scale = w * geom.det.abs() * source(p[0], p[1]);
            for (i, &node) in nodes.iter().enumerate() {
                out[node] += scale * basis.values[q][i];
            }
        }
    }
    Ok(out)
}

/// Natural boundary terms consuming the interface defects of the exact
/// solution: for the fluid test functions
/// `-int_Gamma [r_n (v.n_f) + r_tau (v.tau)]`, for the head test functions
/// `-g int_Gamma r_m psi`.
fn add_interface_corrections(
    mesh: &CoupledMesh,
    spaces: &FemSpaces,
    problem: &impl Problem,
    t: f64,
    params: &PhysicalParams,
    quad: &QuadratureConfig,
    f_f: &mut [f64],
    f_p: &mut [f64],
) -> Result<()> {
    let rule = edge_quadrature(quad.edge_degree)?;
    for &(ef, ep) in &mesh.interface_pairs {
        let fg = EdgeGeom::on_interface(&mesh.fluid, ef)?;
        let pg = EdgeGeom::on_interface(&mesh.porous, ep)?;
        let f_nodes = spaces.velocity.edge_nodes(&mesh.fluid, ef);
        let p_nodes = spaces.head.edge_nodes(&mesh.porous, ep);

        for (s, w) in rule.points.iter().zip(&rule.weights) {
            let fp = fg.point(*s);
            let r = interface_residuals(problem, params, fp[0], t);
            let scale = w * fg.length;
            let tv = p2_edge_eval(*s);
            for i in 0..3 {
                for a in 0..2 {
                    f_f[2 * f_nodes[i] + a] -=
                        scale * tv[i] * (r.normal_stress * fg.normal[a] + r.tangential * fg.tangent[a]);
                }
            }

            let pp = pg.point(*s);
            let rp = interface_residuals(problem, params, pp[0], t);
            let scale_p = w * pg.length;
            for i in 0..3 {
                f_p[p_nodes[i]] -= scale_p * tv[i] * params.g * rp.mass;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_coupled_mesh;
    use crate::mms::ManufacturedCase;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn unit_params() -> PhysicalParams {
        ManufacturedCase::Example1.default_params()
    }

    fn setup(n: usize) -> (CoupledMesh, FemSpaces) {
        let mesh = build_coupled_mesh(n).unwrap();
        let spaces = FemSpaces::new(&mesh);
        (mesh, spaces)
    }

    /// Nodal interpolation of a vector field on the velocity space.
    fn interp_velocity(spaces: &FemSpaces, f: impl Fn(f64, f64) -> [f64; 2]) -> Vec<f64> {
        let mut v = vec![0.0; spaces.velocity.n_dofs];
        for (k, c) in spaces.velocity.node_coords.iter().enumerate() {
            let val = f(c[0], c[1]);
            v[2 * k] = val[0];
            v[2 * k + 1] = val[1];
        }
        v
    }

    fn interp_head(spaces: &FemSpaces, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        spaces.head.node_coords.iter().map(|c| f(c[0], c[1])).collect()
    }

    #[test]
    fn mass_totals() {
        let (mesh, spaces) = setup(4);
        let params = unit_params();
        let (m_f, m_p) =
            assemble_masses(&mesh, &spaces, &params, &QuadratureConfig::default()).unwrap();
        // sum of all entries = integral of (sum of basis)^2 = |domain|, per component
        let ones_v = vec![1.0; m_f.nrows()];
        let total_f = m_f.quadratic_form(&ones_v, &ones_v);
        assert!((total_f - 2.0).abs() < 1e-12, "{total_f}");
        let ones_h = vec![1.0; m_p.nrows()];
        let total_p = m_p.quadratic_form(&ones_h, &ones_h);
        assert!((total_p - 1.0).abs() < 1e-12);

        // g S scaling carried inside M_p
        let mut params2 = params;
        params2.g = 2.0;
        params2.storage = 3.0;
        let (_, m_p2) =
            assemble_masses(&mesh, &spaces, &params2, &QuadratureConfig::default()).unwrap();
        let total_p2 = m_p2.quadratic_form(&ones_h, &ones_h);
        assert!((total_p2 - 6.0).abs() < 1e-11);
    }

    #[test]
    fn reference_triangle_p1_mass() {
        // single reference triangle: P1 mass = (area/12) [[2,1,1],[1,2,1],[1,1,2]]
        let mesh = SubMesh {
            vertices: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2]],
            edges: vec![],
            triangle_edges: vec![[0, 0, 0]],
            interface_y: f64::NAN,
        };
        let rule = triangle_quadrature(5).unwrap();
        let mut local = [[0.0; 3]; 3];
        let geom = TriGeom::new(&mesh, 0);
        for (q, w) in rule.weights.iter().enumerate() {
            let (v, _) = p1_eval(rule.points[q][0], rule.points[q][1]);
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] += w * geom.det.abs() * v[i] * v[j];
                }
            }
        }
        let area = 0.5;
        for i in 0..3 {
            for j in 0..3 {
                let expect = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((local[i][j] - expect).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn stiffness_quadratic_forms() {
        let (mesh, spaces) = setup(4);
        let params = unit_params();
        let (a_f, a_bjsj, _) =
            assemble_stiffnesses(&mesh, &spaces, &params, &QuadratureConfig::default()).unwrap();

        // constant field: zero gradient energy
        let c = interp_velocity(&spaces, |_, _| [3.0, -2.0]);
        assert!(a_f.quadratic_form(&c, &c).abs() < 1e-12);

        // u = (y, 0): |grad u|^2 = 1 on the unit square, P2 exact for linears
        let u = interp_velocity(&spaces, |_, y| [y, 0.0]);
        let e = a_f.quadratic_form(&u, &u);
        assert!((e - 1.0).abs() < 1e-12, "{e}");

        // tangential trace of u = (1, 0) on the unit interface
        let one_x = interp_velocity(&spaces, |_, _| [1.0, 0.0]);
        let e = a_bjsj.quadratic_form(&one_x, &one_x);
        assert!((e - 1.0).abs() < 1e-12);
        // no coupling to the normal component
        let one_y = interp_velocity(&spaces, |_, _| [0.0, 1.0]);
        assert!(a_bjsj.quadratic_form(&one_y, &one_y).abs() < 1e-14);
    }

    #[test]
    fn rejects_non_spd_conductivity() {
        let (mesh, spaces) = setup(2);
        let mut params = unit_params();
        params.conductivity = Tensor2 {
            xx: 1.0,
            xy: 2.0,
            yy: 1.0,
        };
        let r = assemble_stiffnesses(&mesh, &spaces, &params, &QuadratureConfig::default());
        assert!(matches!(r, Err(Error::NonSpdConductivity)));
    }

    #[test]
    fn divergence_matrix() {
        let (mesh, spaces) = setup(4);
        let b = assemble_divergence(&mesh, &spaces, &QuadratureConfig::default()).unwrap();

        // divergence-free linear field
        let u = interp_velocity(&spaces, |_, y| [y, 0.0]);
        let bu = b.mul_vec(&u);
        assert!(SparseMatrix::infinity_norm_vec(&bu) < 1e-12);

        // div (x, 0) = 1: q^T B u = -|domain| for q = 1
        let u = interp_velocity(&spaces, |x, _| [x, 0.0]);
        let q = vec![1.0; spaces.pressure.n_dofs];
        let e = crate::sparse::vec_ops::dot(&q, &b.mul_vec(&u));
        assert!((e + 1.0).abs() < 1e-12);

        // div (0, y-1) = 1 as well
        let u = interp_velocity(&spaces, |_, y| [0.0, y - 1.0]);
        let e = crate::sparse::vec_ops::dot(&q, &b.mul_vec(&u));
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn interface_matrices() {
        let (mesh, spaces) = setup(4);
        let params = unit_params();
        let (c_fp, n_f, n_p) =
            assemble_interface(&mesh, &spaces, &params, &QuadratureConfig::default()).unwrap();

        // phi = 1 against v = (0,-1): g (phi, v.n_f) = |Gamma| = 1
        let v = interp_velocity(&spaces, |_, _| [0.0, -1.0]);
        let phi = interp_head(&spaces, |_, _| 1.0);
        let e = crate::sparse::vec_ops::dot(&v, &c_fp.mul_vec(&phi));
        assert!((e - 1.0).abs() < 1e-12, "{e}");

        // N_f acts on normal traces: u = (0,-1) gives integral 1
        let e = n_f.quadratic_form(&v, &v);
        assert!((e - 1.0).abs() < 1e-12);

        // N_p is the interface trace mass on the head
        let e = n_p.quadratic_form(&phi, &phi);
        assert!((e - 1.0).abs() < 1e-12);

        // skew coupling block: x^T C phi - phi^T (C^T x) = 0 up to roundoff,
        // and the explicit transpose agrees with the transpose-matvec path
        let mut rng = StdRng::seed_from_u64(7);
        let ct = c_fp.transpose();
        for _ in 0..100 {
            let x: Vec<f64> = (0..c_fp.nrows()).map(|_| rng.random::<f64>() - 0.5).collect();
            let y: Vec<f64> = (0..c_fp.ncols()).map(|_| rng.random::<f64>() - 0.5).collect();
            let a = crate::sparse::vec_ops::dot(&x, &c_fp.mul_vec(&y));
            let b = crate::sparse::vec_ops::dot(&y, &c_fp.mul_transpose_vec(&x));
            assert!((a - b).abs() < 1e-12 * (1.0 + a.abs()));
            let b2 = crate::sparse::vec_ops::dot(&y, &ct.mul_vec(&x));
            assert!((b - b2).abs() < 1e-13 * (1.0 + b.abs()));
        }
        // transpose is exact entrywise
        for r in 0..c_fp.nrows() {
            let (cols, vals) = c_fp.row(r);
            for (c, v) in cols.iter().zip(vals) {
                assert_eq!(ct.get(*c, r), *v);
            }
        }
    }

    #[test]
    fn operators_are_symmetric() {
        let (mesh, spaces) = setup(3);
        let params = unit_params();
        let ops =
            OperatorSet::assemble(&mesh, &spaces, &params, &QuadratureConfig::default()).unwrap();
        for (name, m) in [
            ("m_f", &ops.m_f),
            ("m_p", &ops.m_p),
            ("a_f", &ops.a_f),
            ("a_bjsj", &ops.a_bjsj),
            ("a_p", &ops.a_p),
            ("n_f", &ops.n_f),
            ("n_p", &ops.n_p),
        ] {
            assert!(m.max_asymmetry() <= 1e-13, "{name}");
        }
    }

    #[test]
    fn operators_have_expected_definiteness() {
        let (mesh, spaces) = setup(3);
        let params = unit_params();
        let ops =
            OperatorSet::assemble(&mesh, &spaces, &params, &QuadratureConfig::default()).unwrap();
        let mut rng = StdRng::seed_from_u64(23);
        for _ in 0..50 {
            let u: Vec<f64> = (0..spaces.velocity.n_dofs)
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            let phi: Vec<f64> = (0..spaces.head.n_dofs)
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            // masses positive definite, stiffnesses and traces semi-definite
            assert!(ops.m_f.quadratic_form(&u, &u) > 0.0);
            assert!(ops.m_p.quadratic_form(&phi, &phi) > 0.0);
            assert!(ops.a_f.quadratic_form(&u, &u) >= -1e-12);
            assert!(ops.a_bjsj.quadratic_form(&u, &u) >= -1e-12);
            assert!(ops.a_p.quadratic_form(&phi, &phi) >= -1e-12);
            assert!(ops.n_f.quadratic_form(&u, &u) >= -1e-12);
            assert!(ops.n_p.quadratic_form(&phi, &phi) >= -1e-12);
        }
    }

    #[test]
    fn rejects_negative_stabilization() {
        let (mesh, spaces) = setup(2);
        let mut params = unit_params();
        params.gamma_f = -1.0;
        let r = assemble_interface(&mesh, &spaces, &params, &QuadratureConfig::default());
        assert!(matches!(r, Err(Error::Config(_))));
    }

    #[test]
    fn coercivity_inequality() {
        // w^T (A_f + A_bjsj + A_p) w >= min(nu, g K_min) w^T L w for vectors
        // with Dirichlet DOFs zeroed; L is the unit-coefficient stiffness
        let (mesh, spaces) = setup(3);
        let mut params = unit_params();
        params.nu = 0.37;
        params.g = 1.4;
        params.conductivity = Tensor2 {
            xx: 2.0,
            xy: 0.5,
            yy: 1.0,
        };
        params.alpha_bj = 0.8;
        let quad = QuadratureConfig::default();
        let (a_f, a_bjsj, a_p) = assemble_stiffnesses(&mesh, &spaces, &params, &quad).unwrap();

        let unit = PhysicalParams {
            nu: 1.0,
            g: 1.0,
            conductivity: Tensor2::isotropic(1.0),
            ..params
        };
        let (l_f, _, l_p) = assemble_stiffnesses(&mesh, &spaces, &unit, &quad).unwrap();

        let c_a = params.nu.min(params.g * params.conductivity.min_eigenvalue());
        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..100 {
            let mut u: Vec<f64> = (0..spaces.velocity.n_dofs)
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            let mut phi: Vec<f64> = (0..spaces.head.n_dofs)
                .map(|_| rng.random::<f64>() - 0.5)
                .collect();
            for &d in &spaces.velocity.dirichlet {
                u[d] = 0.0;
            }
            for &d in &spaces.head.dirichlet {
                phi[d] = 0.0;
            }
            let lhs = a_f.quadratic_form(&u, &u)
                + a_bjsj.quadratic_form(&u, &u)
                + a_p.quadratic_form(&phi, &phi);
            let rhs = c_a * (l_f.quadratic_form(&u, &u) + l_p.quadratic_form(&phi, &phi));
            assert!(lhs >= rhs - 1e-10, "{lhs} < {rhs}");
        }
    }

    #[test]
    fn load_assembly() {
        let (mesh, spaces) = setup(3);
        let quad = QuadratureConfig::default();

        // zero forcing -> zero loads
        let z = assemble_fluid_volume_load(&mesh, &spaces, &quad, |_, _| [0.0, 0.0]).unwrap();
        assert!(z.iter().all(|&v| v == 0.0));

        // f = (1, 0): first-component rows sum to |domain| by partition of unity
        let f = assemble_fluid_volume_load(&mesh, &spaces, &quad, |_, _| [1.0, 0.0]).unwrap();
        let sum_x: f64 = f.iter().step_by(2).sum();
        let sum_y: f64 = f.iter().skip(1).step_by(2).sum();
        assert!((sum_x - 1.0).abs() < 1e-12);
        assert!(sum_y.abs() < 1e-15);

        // steady case: load is time-independent, including corrections
        let case = ManufacturedCase::Example2;
        let params = case.default_params();
        let (f0, p0) = assemble_load(&mesh, &spaces, &case, 0.0, &params, &quad).unwrap();
        let (f1, p1) = assemble_load(&mesh, &spaces, &case, 3.7, &params, &quad).unwrap();
        assert_eq!(f0, f1);
        assert_eq!(p0, p1);
    }

    #[test]
    fn matrix_coordinate_dump() {
        let (mesh, spaces) = setup(1);
        let params = unit_params();
        let (_, m_p) =
            assemble_masses(&mesh, &spaces, &params, &QuadratureConfig::default()).unwrap();
        let mut buf = Vec::new();
        m_p.write_coo(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), m_p.nnz());
        let first = text.lines().next().unwrap();
        let parts: Vec<&str> = first.split_whitespace().collect();
        assert_eq!(parts.len(), 3);
        let _: usize = parts[0].parse().unwrap();
        let _: f64 = parts[2].parse().unwrap();
    }
}
