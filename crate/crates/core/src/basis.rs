//! Reference-element machinery: Lagrange P1/P2 shape functions, triangle and
//! edge quadrature, and degree-of-freedom maps.
//!
//! Reference triangle: vertices (0,0), (1,0), (0,1) with barycentric
//! coordinates l0 = 1-x-e, l1 = x, l2 = e. P2 local node order is the three
//! vertices followed by the midpoints of edges (0,1), (1,2), (2,0), matching
//! `SubMesh::triangle_edges`. Vector-valued P2 interleaves components: scalar
//! node k owns DOFs 2k (x) and 2k+1 (y).

use crate::error::{Error, Result};
use crate::mesh::{outer_boundary_vertices, BoundaryMarker, SubMesh};

/// Quadratic Lagrange basis values and reference gradients at `(xi, eta)`.
///
/// Evaluation outside the reference triangle is permitted (polynomial
/// extrapolation), which keeps quadrature robust against roundoff.
pub fn p2_eval(xi: f64, eta: f64) -> ([f64; 6], [[f64; 2]; 6]) {
    let l0 = 1.0 - xi - eta;
    let l1 = xi;
    let l2 = eta;
    let values = [
        l0 * (2.0 * l0 - 1.0),
        l1 * (2.0 * l1 - 1.0),
        l2 * (2.0 * l2 - 1.0),
        4.0 * l0 * l1,
        4.0 * l1 * l2,
        4.0 * l2 * l0,
    ];
    // grad l0 = (-1,-1), grad l1 = (1,0), grad l2 = (0,1)
    let d0 = 4.0 * l0 - 1.0;
    let d1 = 4.0 * l1 - 1.0;
    let d2 = 4.0 * l2 - 1.0;
    let grads = [
        [-d0, -d0],
        [d1, 0.0],
        [0.0, d2],
        [4.0 * (l0 - l1), -4.0 * l1],
        [4.0 * l2, 4.0 * l1],
        [-4.0 * l2, 4.0 * (l0 - l2)],
    ];
    (values, grads)
}

/// Linear (barycentric) basis values and constant reference gradients.
pub fn p1_eval(xi: f64, eta: f64) -> ([f64; 3], [[f64; 2]; 3]) {
    (
        [1.0 - xi - eta, xi, eta],
        [[-1.0, -1.0], [1.0, 0.0], [0.0, 1.0]],
    )
}

/// Quadratic Lagrange trace on an edge, parameterized by t in [0,1] with
/// nodes at the endpoints (t = 0, 1) and the midpoint (t = 1/2).
pub fn p2_edge_eval(t: f64) -> [f64; 3] {
    [
        (1.0 - t) * (1.0 - 2.0 * t),
        t * (2.0 * t - 1.0),
        4.0 * t * (1.0 - t),
    ]
}

/// Quadrature rule: points with matching weights.
#[derive(Clone, Debug)]
pub struct QuadRule<P> {
    pub points: Vec<P>,
    pub weights: Vec<f64>,
}

/// Rule on the reference triangle; weights sum to its area 1/2.
pub type TriangleRule = QuadRule<[f64; 2]>;
/// Gauss-Legendre rule on [0,1]; weights sum to 1.
pub type EdgeRule = QuadRule<f64>;

/// Symmetric rule on the reference triangle, exact for polynomials of total
/// degree `min_degree` (1..=6). Higher-degree rules back the lower requests
/// where no dedicated rule is stored.
pub fn triangle_quadrature(min_degree: usize) -> Result<TriangleRule> {
    let (points, unit_weights): (Vec<[f64; 2]>, Vec<f64>) = match min_degree {
        1 => (vec![[1.0 / 3.0, 1.0 / 3.0]], vec![1.0]),
        2 => (
            vec![
                [1.0 / 6.0, 1.0 / 6.0],
                [2.0 / 3.0, 1.0 / 6.0],
                [1.0 / 6.0, 2.0 / 3.0],
            ],
            vec![1.0 / 3.0; 3],
        ),
        3 | 4 => {
            // Dunavant degree-4, 6 points, two symmetric orbits
            let a1 = 0.445948490915965;
            let w1 = 0.223381589678011;
            let a2 = 0.091576213509771;
            let w2 = 0.109951743655322;
            (
                vec![
                    [a1, a1],
                    [1.0 - 2.0 * a1, a1],
                    [a1, 1.0 - 2.0 * a1],
                    [a2, a2],
                    [1.0 - 2.0 * a2, a2],
                    [a2, 1.0 - 2.0 * a2],
                ],
                vec![w1, w1, w1, w2, w2, w2],
            )
        }
        5 => {
            // Dunavant degree-5, 7 points: centroid plus two orbits
            let s15 = 15.0_f64.sqrt();
            let a1 = (6.0 + s15) / 21.0;
            let w1 = (155.0 + s15) / 1200.0;
            let a2 = (6.0 - s15) / 21.0;
            let w2 = (155.0 - s15) / 1200.0;
            (
                vec![
                    [1.0 / 3.0, 1.0 / 3.0],
                    [a1, a1],
                    [1.0 - 2.0 * a1, a1],
                    [a1, 1.0 - 2.0 * a1],
                    [a2, a2],
                    [1.0 - 2.0 * a2, a2],
                    [a2, 1.0 - 2.0 * a2],
                ],
                vec![0.225, w1, w1, w1, w2, w2, w2],
            )
        }
        6 => {
            // Dunavant degree-6, 12 points
            let a1 = 0.063089014491502;
            let w1 = 0.050844906370207;
            let a2 = 0.249286745170910;
            let w2 = 0.116786275726379;
            let a3 = 0.310352451033785;
            let b3 = 0.053145049844816;
            let w3 = 0.082851075618374;
            let c3 = 1.0 - a3 - b3;
            (
                vec![
                    [a1, a1],
                    [1.0 - 2.0 * a1, a1],
                    [a1, 1.0 - 2.0 * a1],
                    [a2, a2],
                    [1.0 - 2.0 * a2, a2],
                    [a2, 1.0 - 2.0 * a2],
                    [a3, b3],
                    [b3, a3],
                    [a3, c3],
                    [c3, a3],
                    [b3, c3],
                    [c3, b3],
                ],
                vec![w1, w1, w1, w2, w2, w2, w3, w3, w3, w3, w3, w3],
            )
        }
        _ => {
            return Err(Error::UnsupportedQuadratureDegree {
                requested: min_degree,
                max: 6,
            })
        }
    };
    // stored weights are normalized to sum 1; reference triangle has area 1/2
    let weights = unit_weights.iter().map(|w| 0.5 * w).collect();
    Ok(QuadRule { points, weights })
}

/// Gauss-Legendre rule on [0,1], exact for polynomials of degree
/// `min_degree` (1..=9).
pub fn edge_quadrature(min_degree: usize) -> Result<EdgeRule> {
    if min_degree == 0 || min_degree > 9 {
        return Err(Error::UnsupportedQuadratureDegree {
            requested: min_degree,
            max: 9,
        });
    }
    // nodes/weights on [-1,1]; n points are exact to degree 2n-1
    let n_points = min_degree / 2 + 1;
    let (nodes, weights): (Vec<f64>, Vec<f64>) = match n_points {
        1 => (vec![0.0], vec![2.0]),
        2 => {
            let a = 1.0 / 3.0_f64.sqrt();
            (vec![-a, a], vec![1.0, 1.0])
        }
        3 => {
            let a = (3.0 / 5.0_f64).sqrt();
            (vec![-a, 0.0, a], vec![5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0])
        }
        4 => {
            let b = (6.0 / 5.0_f64).sqrt();
            let a1 = ((3.0 - 2.0 * b) / 7.0).sqrt();
            let a2 = ((3.0 + 2.0 * b) / 7.0).sqrt();
            let w1 = (18.0 + 30.0_f64.sqrt()) / 36.0;
            let w2 = (18.0 - 30.0_f64.sqrt()) / 36.0;
            (vec![-a2, -a1, a1, a2], vec![w2, w1, w1, w2])
        }
        5 => {
            let c = (10.0 / 7.0_f64).sqrt();
            let a1 = (5.0 - 2.0 * c).sqrt() / 3.0;
            let a2 = (5.0 + 2.0 * c).sqrt() / 3.0;
            let w0 = 128.0 / 225.0;
            let w1 = (322.0 + 13.0 * 70.0_f64.sqrt()) / 900.0;
            let w2 = (322.0 - 13.0 * 70.0_f64.sqrt()) / 900.0;
            (vec![-a2, -a1, 0.0, a1, a2], vec![w2, w1, w0, w1, w2])
        }
        _ => unreachable!(),
    };
    Ok(QuadRule {
        points: nodes.iter().map(|t| 0.5 * (t + 1.0)).collect(),
        weights: weights.iter().map(|w| 0.5 * w).collect(),
    })
}

/// Finite element space tag.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    ScalarP1,
    ScalarP2,
    VectorP2,
}

impl Space {
    pub fn dofs_per_cell(self) -> usize {
        match self {
            Space::ScalarP1 => 3,
            Space::ScalarP2 => 6,
            Space::VectorP2 => 12,
        }
    }

    pub fn components(self) -> usize {
        match self {
            Space::VectorP2 => 2,
            _ => 1,
        }
    }
}

/// Local-to-global DOF table for one space on one submesh.
#[derive(Clone, Debug)]
pub struct DofMap {
    pub space: Space,
    /// Flattened per-triangle DOF indices, `space.dofs_per_cell()` each.
    cell_dofs: Vec<usize>,
    /// Total number of DOFs.
    pub n_dofs: usize,
    /// Number of scalar nodes (n_dofs / components).
    pub n_nodes: usize,
    /// Coordinates of each scalar node.
    pub node_coords: Vec<[f64; 2]>,
    /// Sorted DOF indices constrained by outer-boundary data.
    pub dirichlet: Vec<usize>,
}

impl DofMap {
    #[inline]
    pub fn cell_dofs(&self, t: usize) -> &[usize] {
        let k = self.space.dofs_per_cell();
        &self.cell_dofs[t * k..(t + 1) * k]
    }

    /// Scalar node ids of a triangle (3 for P1, 6 for P2 spaces).
    pub fn cell_nodes(&self, t: usize) -> Vec<usize> {
        let comps = self.space.components();
        self.cell_dofs(t).iter().step_by(comps).map(|d| d / comps).collect()
    }

    /// Scalar node ids along an edge of the mesh: the two endpoints and, for
    /// P2 spaces, the midpoint node, in trace order (t = 0, 1, 1/2).
    pub fn edge_nodes(&self, mesh: &SubMesh, edge: usize) -> Vec<usize> {
        let [a, b] = mesh.edges[edge].vertices;
        match self.space {
            Space::ScalarP1 => vec![a, b],
            Space::ScalarP2 | Space::VectorP2 => vec![a, b, mesh.vertices.len() + edge],
        }
    }

    pub fn is_dirichlet(&self, dof: usize) -> bool {
        self.dirichlet.binary_search(&dof).is_ok()
    }
}

/// Build the DOF map for a space over a submesh. P2 spaces place nodes at
/// the vertices and the edge midpoints; node id layout is vertices first,
/// then one midpoint per mesh edge. The Dirichlet set holds every DOF whose
/// node lies on the outer boundary.
pub fn build_dof_map(mesh: &SubMesh, space: Space) -> DofMap {
    let nv = mesh.vertices.len();
    let comps = space.components();
    let (n_nodes, node_coords) = match space {
        Space::ScalarP1 => (nv, mesh.vertices.clone()),
        Space::ScalarP2 | Space::VectorP2 => {
            let mut coords = mesh.vertices.clone();
            coords.reserve(mesh.edges.len());
            for e in &mesh.edges {
                let [a, b] = e.vertices;
                coords.push([
                    0.5 * (mesh.vertices[a][0] + mesh.vertices[b][0]),
                    0.5 * (mesh.vertices[a][1] + mesh.vertices[b][1]),
                ]);
            }
            (nv + mesh.edges.len(), coords)
        }
    };

    let mut cell_dofs = Vec::with_capacity(mesh.triangles.len() * space.dofs_per_cell());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let nodes: Vec<usize> = match space {
            Space::ScalarP1 => tri.to_vec(),
            Space::ScalarP2 | Space::VectorP2 => tri
                .iter()
                .copied()
                .chain(mesh.triangle_edges[t].iter().map(|&e| nv + e))
                .collect(),
        };
        for node in nodes {
            for c in 0..comps {
                cell_dofs.push(node * comps + c);
            }
        }
    }

    // Dirichlet nodes: outer-boundary vertices plus, for P2, midpoints of
    // outer boundary edges.
    let mut dirichlet_nodes: Vec<usize> = outer_boundary_vertices(mesh);
    if space != Space::ScalarP1 {
        for (e, edge) in mesh.edges.iter().enumerate() {
            if edge.marker == Some(BoundaryMarker::Outer) {
                dirichlet_nodes.push(nv + e);
            }
        }
    }
    let mut dirichlet: Vec<usize> = dirichlet_nodes
        .iter()
        .flat_map(|&node| (0..comps).map(move |c| node * comps + c))
        .collect();
    dirichlet.sort_unstable();
    dirichlet.dedup();

    DofMap {
        space,
        cell_dofs,
        n_dofs: n_nodes * comps,
        n_nodes,
        node_coords,
        dirichlet,
    }
}
