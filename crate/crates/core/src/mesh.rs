//! Twin structured triangulations of the two-rectangle domain.
//!
//! The porous matrix occupies the unit square (0,1)x(0,1) and the free-flow
//! conduit the square (0,1)x(1,2) above it. Both are meshed independently by
//! splitting an n-by-n grid of squares along the lower-left to upper-right
//! diagonal, so the two triangulations are conforming along the shared
//! horizontal interface y = 1 without sharing any vertex indices. A paired
//! edge table records which fluid edge sits on top of which porous edge.
//!
//! Triangle vertices are counter-clockwise. Mesh construction is
//! deterministic: equal subdivision counts give identical orderings.

use std::io::Write;

use crate::error::{Error, Result};

/// Geometric tolerance for interface matching.
pub const GEOM_TOL: f64 = 1e-12;

/// Boundary classification of a boundary edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryMarker {
    /// Outer boundary of the subdomain (Dirichlet side).
    Outer,
    /// Edge on the shared interface y = 1.
    Interface,
}

/// Undirected mesh edge with triangle adjacency.
#[derive(Clone, Debug)]
pub struct Edge {
    /// Endpoint vertex indices.
    pub vertices: [usize; 2],
    /// Adjacent triangles; boundary edges have exactly one.
    pub triangles: (usize, Option<usize>),
    /// Set for boundary edges only.
    pub marker: Option<BoundaryMarker>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles.1.is_none()
    }
}

/// Triangulation of one rectangular subdomain.
#[derive(Clone, Debug)]
pub struct SubMesh {
    /// Vertex coordinates.
    pub vertices: Vec<[f64; 2]>,
    /// Vertex index triples, counter-clockwise.
    pub triangles: Vec<[usize; 3]>,
    /// Unique edges with adjacency and boundary markers.
    pub edges: Vec<Edge>,
    /// Per-triangle edge indices; slot k holds the edge between local
    /// vertices k and (k+1) % 3, matching the P2 midpoint node order.
    pub triangle_edges: Vec<[usize; 3]>,
    /// y-coordinate of the interface line for this subdomain.
    pub interface_y: f64,
}

impl SubMesh {
    /// Signed area of triangle `t` (positive for counter-clockwise).
    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t];
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        let pc = self.vertices[c];
        0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
    }

    pub fn edge_length(&self, e: usize) -> f64 {
        let [a, b] = self.edges[e].vertices;
        let pa = self.vertices[a];
        let pb = self.vertices[b];
        ((pb[0] - pa[0]).powi(2) + (pb[1] - pa[1]).powi(2)).sqrt()
    }

    /// Indices of edges marked as interface edges.
    pub fn interface_edges(&self) -> Vec<usize> {
        (0..self.edges.len())
            .filter(|&e| self.edges[e].marker == Some(BoundaryMarker::Interface))
            .collect()
    }
}

/// The coupled two-rectangle mesh. The submeshes use separate vertex index
/// spaces; only `interface_pairs` ties them together.
#[derive(Clone, Debug)]
pub struct CoupledMesh {
    /// Conduit mesh covering (0,1)x(1,2).
    pub fluid: SubMesh,
    /// Matrix mesh covering (0,1)x(0,1).
    pub porous: SubMesh,
    /// (fluid edge index, porous edge index), geometrically coincident.
    pub interface_pairs: Vec<(usize, usize)>,
    /// Subdivision count per side.
    pub n: usize,
    /// Grid size, 1/n.
    pub h: f64,
}

/// Build the coupled mesh for subdivision count `n >= 1`.
///
/// Each unit square is cut into an n-by-n grid of small squares and every
/// square is split along its lower-left to upper-right diagonal, a fixed
/// convention that keeps construction reproducible.
pub fn build_coupled_mesh(n: usize) -> Result<CoupledMesh> {
    if n == 0 {
        return Err(Error::ZeroSubdivision);
    }
    let porous = build_submesh(n, 0.0, 1.0);
    let fluid = build_submesh(n, 1.0, 1.0);

    // Both meshes enumerate interface edges left to right; pair them up and
    // double-check the geometry matches.
    let fe = fluid.interface_edges();
    let pe = porous.interface_edges();
    debug_assert_eq!(fe.len(), n);
    debug_assert_eq!(pe.len(), n);
    let mut fe_sorted = fe;
    let mut pe_sorted = pe;
    let edge_min_x = |m: &SubMesh, e: usize| {
        let [a, b] = m.edges[e].vertices;
        m.vertices[a][0].min(m.vertices[b][0])
    };
    fe_sorted.sort_by(|&a, &b| {
        edge_min_x(&fluid, a)
            .partial_cmp(&edge_min_x(&fluid, b))
            .unwrap()
    });
    pe_sorted.sort_by(|&a, &b| {
        edge_min_x(&porous, a)
            .partial_cmp(&edge_min_x(&porous, b))
            .unwrap()
    });
    let mut interface_pairs = Vec::with_capacity(n);
    for (k, (&ef, &ep)) in fe_sorted.iter().zip(&pe_sorted).enumerate() {
        let fa = sorted_endpoints(&fluid, ef);
        let pa = sorted_endpoints(&porous, ep);
        let dist = (fa[0][0] - pa[0][0]).abs().max((fa[1][0] - pa[1][0]).abs());
        let dy = (fa[0][1] - 1.0).abs().max((pa[0][1] - 1.0).abs());
        if dist > GEOM_TOL || dy > GEOM_TOL {
            return Err(Error::InterfaceMismatch { pair: k });
        }
        interface_pairs.push((ef, ep));
    }

    Ok(CoupledMesh {
        fluid,
        porous,
        interface_pairs,
        n,
        h: 1.0 / n as f64,
    })
}

fn sorted_endpoints(mesh: &SubMesh, e: usize) -> [[f64; 2]; 2] {
    let [a, b] = mesh.edges[e].vertices;
    let (pa, pb) = (mesh.vertices[a], mesh.vertices[b]);
    if pa[0] <= pb[0] {
        [pa, pb]
    } else {
        [pb, pa]
    }
}

fn build_submesh(n: usize, y0: f64, interface_y: f64) -> SubMesh {
    let np = n + 1;
    let h = 1.0 / n as f64;
    let mut vertices = Vec::with_capacity(np * np);
    for iy in 0..np {
        for ix in 0..np {
            vertices.push([ix as f64 * h, y0 + iy as f64 * h]);
        }
    }
    let vid = |ix: usize, iy: usize| iy * np + ix;

    let mut triangles = Vec::with_capacity(2 * n * n);
    for iy in 0..n {
        for ix in 0..n {
            let ll = vid(ix, iy);
            let lr = vid(ix + 1, iy);
            let ul = vid(ix, iy + 1);
            let ur = vid(ix + 1, iy + 1);
            triangles.push([ll, lr, ur]);
            triangles.push([ll, ur, ul]);
        }
    }

    // Edge table in first-seen order over the deterministic triangle loop.
    let mut edge_lookup = std::collections::HashMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut te = [0usize; 3];
        for k in 0..3 {
            let a = tri[k];
            let b = tri[(k + 1) % 3];
            let key = (a.min(b), a.max(b));
            let e = *edge_lookup.entry(key).or_insert_with(|| {
                edges.push(Edge {
                    vertices: [key.0, key.1],
                    triangles: (t, None),
                    marker: None,
                });
                edges.len() - 1
            });
            if edges[e].triangles.0 != t && edges[e].triangles.1.is_none() {
                edges[e].triangles.1 = Some(t);
            }
            te[k] = e;
        }
        triangle_edges.push(te);
    }

    for edge in &mut edges {
        if edge.triangles.1.is_none() {
            let [a, b] = edge.vertices;
            let on_interface = (vertices[a][1] - interface_y).abs() <= GEOM_TOL
                && (vertices[b][1] - interface_y).abs() <= GEOM_TOL;
            edge.marker = Some(if on_interface {
                BoundaryMarker::Interface
            } else {
                BoundaryMarker::Outer
            });
        }
    }

    SubMesh {
        vertices,
        triangles,
        edges,
        triangle_edges,
        interface_y,
    }
}

/// Vertices carrying Dirichlet data: every vertex incident to an outer
/// boundary edge. Interface-interior vertices are excluded; the two corners
/// where the interface meets the outer boundary touch an outer edge and are
/// therefore included (Dirichlet wins at the corners).
pub fn outer_boundary_vertices(mesh: &SubMesh) -> Vec<usize> {
    let mut flags = vec![false; mesh.vertices.len()];
    for edge in &mesh.edges {
        if edge.marker == Some(BoundaryMarker::Outer) {
            flags[edge.vertices[0]] = true;
            flags[edge.vertices[1]] = true;
        }
    }
    (0..mesh.vertices.len()).filter(|&v| flags[v]).collect()
}

/// Plain-text mesh dump for debugging: `v x y` per vertex, `t i j k` per
/// triangle (per submesh, fluid first), then `g ef ep` per interface pair.
pub fn write_mesh_dump(mesh: &CoupledMesh, w: &mut impl Write) -> std::io::Result<()> {
    for (name, sub) in [("fluid", &mesh.fluid), ("porous", &mesh.porous)] {
        writeln!(w, "# {name}")?;
        for v in &sub.vertices {
            writeln!(w, "v {:.16e} {:.16e}", v[0], v[1])?;
        }
        for t in &sub.triangles {
            writeln!(w, "t {} {} {}", t[0], t[1], t[2])?;
        }
    }
    writeln!(w, "# interface")?;
    for &(ef, ep) in &mesh.interface_pairs {
        writeln!(w, "g {ef} {ep}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_subdivision() {
        assert!(matches!(build_coupled_mesh(0), Err(Error::ZeroSubdivision)));
    }

    #[test]
    fn counts_n1() {
        let m = build_coupled_mesh(1).unwrap();
        assert_eq!(m.fluid.vertices.len(), 4);
        assert_eq!(m.fluid.triangles.len(), 2);
        assert_eq!(m.porous.vertices.len(), 4);
        assert_eq!(m.porous.triangles.len(), 2);
        assert_eq!(m.interface_pairs.len(), 1);
    }

    #[test]
    fn counts_n2() {
        let m = build_coupled_mesh(2).unwrap();
        for sub in [&m.fluid, &m.porous] {
            assert_eq!(sub.vertices.len(), 9);
            assert_eq!(sub.triangles.len(), 8);
        }
        assert_eq!(m.interface_pairs.len(), 2);
    }

    #[test]
    fn counts_n16_match_refinement_table() {
        let m = build_coupled_mesh(16).unwrap();
        for sub in [&m.fluid, &m.porous] {
            assert_eq!(sub.vertices.len(), 289);
            assert_eq!(sub.triangles.len(), 512);
        }
        assert_eq!(m.interface_pairs.len(), 16);
        assert_eq!(m.h, 1.0 / 16.0);
    }

    #[test]
    fn triangles_are_ccw_and_conforming_area() {
        for n in 1..64 {
            let m = build_coupled_mesh(n).unwrap();
            for sub in [&m.fluid, &m.porous] {
                let mut total = 0.0;
                for t in 0..sub.triangles.len() {
                    let a = sub.triangle_area(t);
                    assert!(a > 0.0, "n={n}: triangle {t} not CCW");
                    total += a;
                }
                assert!((total - 1.0).abs() < 1e-12, "n={n}: area sum {total}");
            }
        }
    }

    #[test]
    fn interface_edges_lie_on_y1_with_equal_lengths() {
        for n in [1, 2, 3, 7, 16, 64] {
            let m = build_coupled_mesh(n).unwrap();
            let h = 1.0 / n as f64;
            assert_eq!(m.interface_pairs.len(), n);
            for &(ef, ep) in &m.interface_pairs {
                for (sub, e) in [(&m.fluid, ef), (&m.porous, ep)] {
                    let [a, b] = sub.edges[e].vertices;
                    for v in [a, b] {
                        assert!((sub.vertices[v][1] - 1.0).abs() <= GEOM_TOL);
                        assert!((0.0..=1.0).contains(&sub.vertices[v][0]));
                    }
                    assert!((sub.edge_length(e) - h).abs() <= 1e-14);
                }
                let fa = sorted_endpoints(&m.fluid, ef);
                let pa = sorted_endpoints(&m.porous, ep);
                assert!((fa[0][0] - pa[0][0]).abs() <= 1e-14);
                assert!((fa[1][0] - pa[1][0]).abs() <= 1e-14);
            }
        }
    }

    #[test]
    fn construction_is_deterministic() {
        let a = build_coupled_mesh(5).unwrap();
        let b = build_coupled_mesh(5).unwrap();
        assert_eq!(a.fluid.vertices, b.fluid.vertices);
        assert_eq!(a.fluid.triangles, b.fluid.triangles);
        assert_eq!(a.porous.vertices, b.porous.vertices);
        assert_eq!(a.interface_pairs, b.interface_pairs);
    }

    /// Independent oracle: classify grid vertices straight from coordinates.
    fn expected_outer(n: usize, y0: f64) -> usize {
        let np = n + 1;
        let h = 1.0 / n as f64;
        let mut count = 0;
        for iy in 0..np {
            for ix in 0..np {
                let (x, y) = (ix as f64 * h, y0 + iy as f64 * h);
                let on_boundary = ix == 0 || ix == n || iy == 0 || iy == n;
                let interface_interior = (y - 1.0).abs() < 1e-14 && x > 0.0 && x < 1.0;
                if on_boundary && !interface_interior {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn outer_boundary_vertex_sets() {
        let m = build_coupled_mesh(1).unwrap();
        assert_eq!(outer_boundary_vertices(&m.fluid).len(), 4);

        let m = build_coupled_mesh(2).unwrap();
        assert_eq!(outer_boundary_vertices(&m.porous).len(), 7);
        assert_eq!(expected_outer(2, 0.0), 7);
        // the only excluded *boundary* vertex is the interface midpoint
        let set = outer_boundary_vertices(&m.porous);
        let excluded: Vec<_> = (0..9).filter(|v| !set.contains(v)).collect();
        let coords: Vec<_> = excluded.iter().map(|&v| m.porous.vertices[v]).collect();
        assert!(coords.contains(&[0.5, 1.0]));
        assert!(coords.contains(&[0.5, 0.5])); // interior vertex, never Dirichlet

        let m = build_coupled_mesh(4).unwrap();
        assert_eq!(outer_boundary_vertices(&m.porous).len(), 13);
        assert_eq!(expected_outer(4, 0.0), 13);

        for n in [3, 5, 8] {
            let m = build_coupled_mesh(n).unwrap();
            assert_eq!(
                outer_boundary_vertices(&m.fluid).len(),
                expected_outer(n, 1.0)
            );
            assert_eq!(
                outer_boundary_vertices(&m.porous).len(),
                expected_outer(n, 0.0)
            );
        }
    }

    #[test]
    fn mesh_dump_roundtrips_counts() {
        let m = build_coupled_mesh(2).unwrap();
        let mut buf = Vec::new();
        write_mesh_dump(&m, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().filter(|l| l.starts_with("v ")).count(), 18);
        assert_eq!(text.lines().filter(|l| l.starts_with("t ")).count(), 16);
        assert_eq!(text.lines().filter(|l| l.starts_with("g ")).count(), 2);
    }
}
