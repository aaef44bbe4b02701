//! Structured triangular meshes with labeled boundary segments.
//!
//! Two families are provided: the unit square (used by the manufactured
//! solution studies) and a planar 4:1 contraction, meshed as the upper
//! half of the channel with a symmetry line at `y = 0`.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Physical role of a boundary segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryLabel {
    Inflow,
    Outflow,
    Wall,
    Symmetry,
}

impl BoundaryLabel {
    pub const ALL: [BoundaryLabel; 4] = [
        BoundaryLabel::Wall,
        BoundaryLabel::Inflow,
        BoundaryLabel::Outflow,
        BoundaryLabel::Symmetry,
    ];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub vertices: [usize; 2],
    pub label: BoundaryLabel,
}

/// Unique edges of a triangulation and their incidence.
#[derive(Debug, Clone)]
pub struct Topology {
    /// Edge endpoints, smaller vertex index first.
    pub edges: Vec<[usize; 2]>,
    /// Global edge ids of the local edges (0,1), (1,2), (2,0) of each triangle.
    pub triangle_edges: Vec<[usize; 3]>,
    /// Triangles sharing each edge, with the local edge number inside that triangle.
    pub edge_triangles: Vec<EdgeNeighbors>,
}

#[derive(Debug, Clone, Copy)]
pub struct EdgeNeighbors {
    pub first: (usize, usize),
    pub second: Option<(usize, usize)>,
}

/// Local vertex pairs of the three triangle edges.
pub const LOCAL_EDGES: [[usize; 2]; 3] = [[0, 1], [1, 2], [2, 0]];

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    h_max: f64,
    topology: Topology,
}

/// Dimensions of the half contraction channel.
///
/// The upstream block is `[-upstream_length, 0] x [0, upstream_height]`, the
/// downstream block `[0, downstream_length] x [0, downstream_height]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionGeometry {
    pub upstream_length: f64,
    pub downstream_length: f64,
    pub upstream_height: f64,
    pub downstream_height: f64,
}

impl Default for ContractionGeometry {
    /// Unit upstream half-width, quarter-width downstream, both legs of length 4.
    /// On a 32x16 grid this gives cells of 0.25 x 0.0625.
    fn default() -> Self {
        Self {
            upstream_length: 4.0,
            downstream_length: 4.0,
            upstream_height: 1.0,
            downstream_height: 0.25,
        }
    }
}

impl ContractionGeometry {
    /// Long-channel variant: legs of length 8, downstream half-width 1.
    pub fn long_channel() -> Self {
        Self {
            upstream_length: 8.0,
            downstream_length: 8.0,
            upstream_height: 4.0,
            downstream_height: 1.0,
        }
    }

    pub fn contraction_ratio(&self) -> f64 {
        self.upstream_height / self.downstream_height
    }

    /// The re-entrant corner `(0, downstream_height)`.
    pub fn reentrant_corner(&self) -> [f64; 2] {
        [0.0, self.downstream_height]
    }

    fn validate(&self) -> Result<()> {
        let dims = [
            self.upstream_length,
            self.downstream_length,
            self.upstream_height,
            self.downstream_height,
        ];
        if dims.iter().any(|d| !(d.is_finite() && *d > 0.0)) {
            return Err(Error::Config(format!(
                "contraction dimensions must be positive, got {self:?}"
            )));
        }
        if self.downstream_height >= self.upstream_height {
            return Err(Error::Config(
                "downstream height must be smaller than upstream height".into(),
            ));
        }
        Ok(())
    }
}

impl TriMesh {
    /// Uniform `n x n` grid on the unit square, every cell split into two
    /// right triangles. The whole boundary is labeled [`BoundaryLabel::Wall`].
    pub fn unit_square(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Config("unit square needs n >= 1".into()));
        }
        let h = 1.0 / n as f64;
        let cells = (0..n).flat_map(|j| (0..n).map(move |i| (i, j)));
        let corners = [(0, 0), (n, 0), (n, n), (0, n)];
        Self::from_grid(n, n, h, h, [0.0, 0.0], cells, &corners, |_, _| {
            Some(BoundaryLabel::Wall)
        })
    }

    /// Half of a planar contraction channel on a structured grid of
    /// `nx` columns over the full length and `ny` rows over the upstream height.
    ///
    /// Labels: inflow at `x = -upstream_length`, outflow at `x = downstream_length`,
    /// symmetry on `y = 0`, wall everywhere else.
    pub fn contraction(geometry: &ContractionGeometry, nx: usize, ny: usize) -> Result<Self> {
        geometry.validate()?;
        if nx < 2 || ny < 2 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::Config(format!(
                "contraction grid needs even nx, ny >= 2, got {nx}x{ny}"
            )));
        }
        let total_length = geometry.upstream_length + geometry.downstream_length;
        let up_cols = nx as f64 * geometry.upstream_length / total_length;
        let down_rows = ny as f64 * geometry.downstream_height / geometry.upstream_height;
        let as_count = |v: f64, what: &str| -> Result<usize> {
            let r = v.round();
            if (v - r).abs() > 1e-9 || r < 1.0 {
                return Err(Error::Config(format!(
                    "{nx}x{ny} grid does not resolve the {what} of the contraction ({v} cells)"
                )));
            }
            Ok(r as usize)
        };
        let up_cols = as_count(up_cols, "upstream length")?;
        let down_rows = as_count(down_rows, "downstream height")?;
        if up_cols >= nx || down_rows >= ny {
            return Err(Error::Config("degenerate contraction grid".into()));
        }

        let dx = total_length / nx as f64;
        let dy = geometry.upstream_height / ny as f64;
        let cells = (0..ny).flat_map(move |j| {
            (0..nx).filter_map(move |i| (i < up_cols || j < down_rows).then_some((i, j)))
        });
        let corners = [(0, 0), (nx, 0), (nx, down_rows), (up_cols, ny), (0, ny)];
        let origin = [-geometry.upstream_length, 0.0];
        let (x_in, x_out) = (-geometry.upstream_length, geometry.downstream_length);
        let tol = 1e-9 * total_length;
        Self::from_grid(nx, ny, dx, dy, origin, cells, &corners, move |a, b| {
            let label = if (a[0] - x_in).abs() < tol && (b[0] - x_in).abs() < tol {
                BoundaryLabel::Inflow
            } else if (a[0] - x_out).abs() < tol && (b[0] - x_out).abs() < tol {
                BoundaryLabel::Outflow
            } else if a[1].abs() < tol && b[1].abs() < tol {
                BoundaryLabel::Symmetry
            } else {
                BoundaryLabel::Wall
            };
            Some(label)
        })
    }

    /// Build from an explicit triangulation; boundary edges are detected from
    /// the incidence and labeled by `label(a, b)` from their endpoint coordinates.
    pub fn from_triangles(
        vertices: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        label: impl Fn([f64; 2], [f64; 2]) -> Option<BoundaryLabel>,
    ) -> Result<Self> {
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&v| v >= vertices.len())) {
            return Err(Error::Config(format!("triangle {t:?} references a missing vertex")));
        }
        let topology = build_topology(vertices.len(), &triangles)?;
        let mut boundary_edges = Vec::new();
        for nb in &topology.edge_triangles {
            if nb.second.is_some() {
                continue;
            }
            let (t, le) = nb.first;
            let [a, b] = LOCAL_EDGES[le].map(|l| triangles[t][l]);
            let label = label(vertices[a], vertices[b]).ok_or_else(|| {
                Error::Config(format!("boundary edge ({a}, {b}) has no label"))
            })?;
            boundary_edges.push(BoundaryEdge {
                vertices: [a, b],
                label,
            });
        }
        let mut mesh = Self {
            vertices,
            triangles,
            boundary_edges,
            h_max: 0.0,
            topology,
        };
        mesh.h_max = mesh.longest_edge();
        mesh.validate()?;
        Ok(mesh)
    }

    #[allow(clippy::too_many_arguments)]
    fn from_grid(
        nx: usize,
        ny: usize,
        dx: f64,
        dy: f64,
        origin: [f64; 2],
        cells: impl Iterator<Item = (usize, usize)>,
        corners: &[(usize, usize)],
        label: impl Fn([f64; 2], [f64; 2]) -> Option<BoundaryLabel>,
    ) -> Result<Self> {
        let mut index = vec![usize::MAX; (nx + 1) * (ny + 1)];
        let mut vertices = Vec::new();
        let mut triangles = Vec::new();
        let mut vertex = |i: usize, j: usize, vertices: &mut Vec<[f64; 2]>| {
            let slot = &mut index[j * (nx + 1) + i];
            if *slot == usize::MAX {
                *slot = vertices.len();
                vertices.push([origin[0] + i as f64 * dx, origin[1] + j as f64 * dy]);
            }
            *slot
        };
        for (i, j) in cells {
            let a = vertex(i, j, &mut vertices);
            let b = vertex(i + 1, j, &mut vertices);
            let c = vertex(i + 1, j + 1, &mut vertices);
            let d = vertex(i, j + 1, &mut vertices);
            // Split through a convex domain corner when the cell touches one, so no
            // triangle ends up with two boundary edges; otherwise alternate.
            let touches = |p: (usize, usize)| corners.contains(&p);
            let main_diagonal = if touches((i, j)) || touches((i + 1, j + 1)) {
                true
            } else if touches((i + 1, j)) || touches((i, j + 1)) {
                false
            } else {
                (i + j) % 2 == 0
            };
            if main_diagonal {
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            } else {
                triangles.push([a, b, d]);
                triangles.push([b, c, d]);
            }
        }
        Self::from_triangles(vertices, triangles, label)
    }

    /// Split every triangle into four through its edge midpoints.
    pub fn refine_uniform(&self) -> Self {
        let nv = self.vertices.len();
        let mut vertices = self.vertices.clone();
        for &[a, b] in &self.topology.edges {
            let (pa, pb) = (self.vertices[a], self.vertices[b]);
            vertices.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
        }
        let mid = |e: usize| nv + e;
        let mut triangles = Vec::with_capacity(4 * self.triangles.len());
        for (t, &[v0, v1, v2]) in self.triangles.iter().enumerate() {
            let [e01, e12, e20] = self.topology.triangle_edges[t].map(mid);
            triangles.push([v0, e01, e20]);
            triangles.push([e01, v1, e12]);
            triangles.push([e20, e12, v2]);
            triangles.push([e01, e12, e20]);
        }
        let edge_lookup: HashMap<[usize; 2], usize> = self
            .topology
            .edges
            .iter()
            .enumerate()
            .map(|(e, &ab)| (ab, e))
            .collect();
        let mut boundary_edges = Vec::with_capacity(2 * self.boundary_edges.len());
        for be in &self.boundary_edges {
            let [a, b] = be.vertices;
            let m = mid(edge_lookup[&sorted(a, b)]);
            boundary_edges.push(BoundaryEdge {
                vertices: [a, m],
                label: be.label,
            });
            boundary_edges.push(BoundaryEdge {
                vertices: [m, b],
                label: be.label,
            });
        }
        let topology = build_topology(vertices.len(), &triangles)
            .expect("midpoint refinement preserves conformity");
        let mut mesh = Self {
            vertices,
            triangles,
            boundary_edges,
            h_max: 0.0,
            topology,
        };
        mesh.h_max = mesh.longest_edge();
        mesh
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    pub fn topology(&self) -> &Topology {
        &self.topology
    }

    pub fn h_max(&self) -> f64 {
        self.h_max
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_edges(&self) -> usize {
        self.topology.edges.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    /// Signed area of triangle `t`; positive for counterclockwise vertices.
    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangles[t].map(|v| self.vertices[v]);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    pub fn labels(&self) -> Vec<BoundaryLabel> {
        let mut labels: Vec<_> = self.boundary_edges.iter().map(|e| e.label).collect();
        labels.sort();
        labels.dedup();
        labels
    }

    /// Check orientation, conformity and boundary labeling.
    pub fn validate(&self) -> Result<()> {
        for t in 0..self.triangles.len() {
            if !(self.signed_area(t) > 0.0) {
                return Err(Error::Config(format!("triangle {t} is not counterclockwise")));
            }
        }
        let boundary: Vec<[usize; 2]> = self
            .topology
            .edge_triangles
            .iter()
            .zip(&self.topology.edges)
            .filter(|(nb, _)| nb.second.is_none())
            .map(|(_, &e)| e)
            .collect();
        let mut labeled: Vec<[usize; 2]> = self
            .boundary_edges
            .iter()
            .map(|e| sorted(e.vertices[0], e.vertices[1]))
            .collect();
        labeled.sort_unstable();
        if labeled.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Config("boundary edge labeled twice".into()));
        }
        let mut expected = boundary;
        expected.sort_unstable();
        if expected != labeled {
            return Err(Error::Config(
                "boundary labels do not match the boundary of the triangulation".into(),
            ));
        }
        Ok(())
    }

    fn longest_edge(&self) -> f64 {
        self.topology
            .edges
            .iter()
            .map(|&[a, b]| {
                let (pa, pb) = (self.vertices[a], self.vertices[b]);
                (pb[0] - pa[0]).hypot(pb[1] - pa[1])
            })
            .fold(0.0, f64::max)
    }
}

fn sorted(a: usize, b: usize) -> [usize; 2] {
    if a < b {
        [a, b]
    } else {
        [b, a]
    }
}

fn build_topology(num_vertices: usize, triangles: &[[usize; 3]]) -> Result<Topology> {
    let mut lookup: HashMap<[usize; 2], usize> = HashMap::with_capacity(3 * triangles.len());
    let mut edges = Vec::new();
    let mut edge_triangles: Vec<EdgeNeighbors> = Vec::new();
    let mut triangle_edges = Vec::with_capacity(triangles.len());
    for (t, tri) in triangles.iter().enumerate() {
        let mut ids = [0; 3];
        for (le, [i, j]) in LOCAL_EDGES.iter().enumerate() {
            let key = sorted(tri[*i], tri[*j]);
            debug_assert!(key[1] < num_vertices);
            let e = *lookup.entry(key).or_insert_with(|| {
                edges.push(key);
                edge_triangles.push(EdgeNeighbors {
                    first: (t, le),
                    second: None,
                });
                edges.len() - 1
            });
            if edge_triangles[e].first.0 != t {
                if edge_triangles[e].second.is_some() {
                    return Err(Error::Config(format!(
                        "edge {key:?} is shared by more than two triangles"
                    )));
                }
                edge_triangles[e].second = Some((t, le));
            }
            ids[le] = e;
        }
        triangle_edges.push(ids);
    }
    Ok(Topology {
        edges,
        triangle_edges,
        edge_triangles,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square_counts() {
        let m = TriMesh::unit_square(1).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_triangles(), 2);
        assert!((m.h_max() - 2f64.sqrt()).abs() < 1e-15);

        let m = TriMesh::unit_square(4).unwrap();
        assert_eq!(m.num_vertices(), 25);
        assert_eq!(m.num_triangles(), 32);
        assert!((m.h_max() - 2f64.sqrt() / 4.0).abs() < 1e-15);
    }

    #[test]
    fn unit_square_boundary_is_wall() {
        let m = TriMesh::unit_square(2).unwrap();
        assert_eq!(m.boundary_edges().len(), 8);
        assert!(m.boundary_edges().iter().all(|e| e.label == BoundaryLabel::Wall));
    }

    #[test]
    fn zero_size_is_rejected() {
        assert!(matches!(TriMesh::unit_square(0), Err(Error::Config(_))));
        let g = ContractionGeometry::default();
        assert!(TriMesh::contraction(&g, 0, 16).is_err());
        assert!(TriMesh::contraction(&g, 32, 6).is_err());
        let bad = ContractionGeometry {
            upstream_length: -1.0,
            ..g
        };
        assert!(TriMesh::contraction(&bad, 32, 16).is_err());
    }

    #[test]
    fn no_triangle_has_two_boundary_edges() {
        for m in [
            TriMesh::unit_square(4).unwrap(),
            TriMesh::contraction(&ContractionGeometry::default(), 32, 16).unwrap(),
        ] {
            let mut count = vec![0; m.num_triangles()];
            for nb in &m.topology().edge_triangles {
                if nb.second.is_none() {
                    count[nb.first.0] += 1;
                }
            }
            assert!(count.iter().all(|&c| c <= 1));
        }
    }

    #[test]
    fn contraction_layout() {
        let g = ContractionGeometry::default();
        let m = TriMesh::contraction(&g, 32, 16).unwrap();
        // 16x16 upstream cells plus 16x4 downstream cells.
        assert_eq!(m.num_triangles(), 2 * 320);
        assert_eq!(m.num_vertices(), 17 * 17 + 16 * 5);
        m.validate().unwrap();

        let corner = g.reentrant_corner();
        let cv = m
            .vertices()
            .iter()
            .position(|p| (p[0] - corner[0]).abs() < 1e-12 && (p[1] - corner[1]).abs() < 1e-12)
            .expect("re-entrant corner vertex");
        let walls: Vec<_> = m
            .boundary_edges()
            .iter()
            .filter(|e| e.vertices.contains(&cv))
            .collect();
        assert_eq!(walls.len(), 2);
        assert!(walls.iter().all(|e| e.label == BoundaryLabel::Wall));
        // one wall edge on the step face, one on the downstream top wall
        let other = |e: &BoundaryEdge| m.vertices()[e.vertices[0] + e.vertices[1] - cv];
        let (a, b) = (other(walls[0]), other(walls[1]));
        assert!((a[0] == 0.0) != (b[0] == 0.0));

        let labels = m.labels();
        assert_eq!(labels.len(), 4);
    }

    #[test]
    fn contraction_refines_by_four() {
        let g = ContractionGeometry::default();
        let a = TriMesh::contraction(&g, 32, 16).unwrap();
        let b = TriMesh::contraction(&g, 64, 32).unwrap();
        assert_eq!(b.num_triangles(), 4 * a.num_triangles());
    }

    #[test]
    fn refinement_contract() {
        let m = TriMesh::unit_square(1).unwrap();
        let r = m.refine_uniform();
        assert_eq!(r.num_triangles(), 8);
        assert!((r.h_max() - m.h_max() / 2.0).abs() < 1e-14);
        assert_eq!(r.boundary_edges().len(), 2 * m.boundary_edges().len());
        r.validate().unwrap();

        let g = ContractionGeometry::default();
        let c = TriMesh::contraction(&g, 16, 8).unwrap();
        let rc = c.refine_uniform();
        rc.validate().unwrap();
        for label in BoundaryLabel::ALL {
            let n0 = c.boundary_edges().iter().filter(|e| e.label == label).count();
            let n1 = rc.boundary_edges().iter().filter(|e| e.label == label).count();
            assert_eq!(n1, 2 * n0, "{label:?}");
        }
    }
}
