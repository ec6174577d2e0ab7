//! Moving triangular meshes: connectivity, node motion and corner geometry.
//!
//! Topology is fixed for the lifetime of a run and shared behind an `Arc`;
//! each RK stage only produces a new node-coordinate array.

mod build;
mod geometry;
mod io;

pub use build::{build_periodic_rect_mesh, build_rect_mesh, jitter_interior_nodes};
pub use geometry::{corner_geometry, CornerGeometry};
pub use io::{read_mesh, write_mesh};

use std::sync::Arc;

use crate::error::{HtcError, Result};
use crate::numerics::Vec2;

/// Side of the rectangular domain a boundary node lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
    Bottom,
    Top,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::Left, Side::Right, Side::Bottom, Side::Top];

    fn bit(self) -> u8 {
        match self {
            Side::Left => 1,
            Side::Right => 2,
            Side::Bottom => 4,
            Side::Top => 8,
        }
    }

    /// Outward unit normal of the side.
    pub fn normal(self) -> Vec2 {
        match self {
            Side::Left => Vec2::new(-1.0, 0.0),
            Side::Right => Vec2::new(1.0, 0.0),
            Side::Bottom => Vec2::new(0.0, -1.0),
            Side::Top => Vec2::new(0.0, 1.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Side::Left => "left",
            Side::Right => "right",
            Side::Bottom => "bottom",
            Side::Top => "top",
        }
    }

    pub fn from_name(s: &str) -> Option<Side> {
        Side::ALL.into_iter().find(|side| side.name() == s)
    }
}

/// Set of sides a node is tagged with (corners carry two).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub struct SideSet(u8);

impl SideSet {
    pub const EMPTY: SideSet = SideSet(0);

    pub fn with(self, side: Side) -> Self {
        SideSet(self.0 | side.bit())
    }

    pub fn contains(self, side: Side) -> bool {
        self.0 & side.bit() != 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Side> {
        Side::ALL.into_iter().filter(move |s| self.contains(*s))
    }
}

/// Fixed connectivity of a triangulation.
#[derive(Debug, Clone)]
pub struct Topology {
    tris: Vec<[usize; 3]>,
    /// Periodic image offset added to each vertex of each cell (zero on non-periodic meshes).
    shifts: Vec<[Vec2; 3]>,
    fan_offsets: Vec<usize>,
    /// `(cell, local vertex)` pairs of C(p), sorted by cell index.
    fan: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
    on_boundary: Vec<bool>,
    tags: Vec<SideSet>,
    periodic: bool,
}

impl Topology {
    pub(crate) fn new(
        n_nodes: usize,
        tris: Vec<[usize; 3]>,
        shifts: Option<Vec<[Vec2; 3]>>,
        tags: Vec<SideSet>,
        periodic: bool,
    ) -> Result<Self> {
        if tags.len() != n_nodes {
            return Err(HtcError::InvalidInput(format!(
                "{} boundary tag entries for {} nodes",
                tags.len(),
                n_nodes
            )));
        }
        let shifts = shifts.unwrap_or_else(|| vec![[Vec2::zeros(); 3]; tris.len()]);
        if shifts.len() != tris.len() {
            return Err(HtcError::InvalidInput("shift table size mismatch".into()));
        }
        let mut counts = vec![0usize; n_nodes];
        for (c, t) in tris.iter().enumerate() {
            for &p in t {
                if p >= n_nodes {
                    return Err(HtcError::InvalidInput(format!(
                        "triangle {c} references node {p}, but there are only {n_nodes} nodes"
                    )));
                }
                counts[p] += 1;
            }
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
                return Err(HtcError::InvalidInput(format!("triangle {c} repeats a node")));
            }
        }
        if let Some(p) = counts.iter().position(|&n| n == 0) {
            return Err(HtcError::InvalidInput(format!("node {p} belongs to no triangle")));
        }
        let mut fan_offsets = Vec::with_capacity(n_nodes + 1);
        fan_offsets.push(0);
        for n in &counts {
            fan_offsets.push(fan_offsets.last().unwrap() + n);
        }
        let mut fill = fan_offsets.clone();
        let mut fan = vec![(0, 0); fan_offsets[n_nodes]];
        for (c, t) in tris.iter().enumerate() {
            for (k, &p) in t.iter().enumerate() {
                fan[fill[p]] = (c, k);
                fill[p] += 1;
            }
        }

        // Edge multiplicity decides which nodes sit on the physical boundary.
        let mut edges: std::collections::HashMap<(usize, usize), usize> = Default::default();
        for t in &tris {
            for k in 0..3 {
                let (a, b) = (t[k], t[(k + 1) % 3]);
                *edges.entry((a.min(b), a.max(b))).or_default() += 1;
            }
        }
        let mut neighbors = vec![Vec::new(); n_nodes];
        let mut on_boundary = vec![false; n_nodes];
        let mut sorted: Vec<_> = edges.into_iter().collect();
        sorted.sort_unstable();
        for ((a, b), n) in sorted {
            neighbors[a].push(b);
            neighbors[b].push(a);
            if n == 1 && !periodic {
                on_boundary[a] = true;
                on_boundary[b] = true;
            }
        }
        Ok(Topology {
            tris,
            shifts,
            fan_offsets,
            fan,
            neighbors,
            on_boundary,
            tags,
            periodic,
        })
    }

    pub fn n_cells(&self) -> usize {
        self.tris.len()
    }

    pub fn n_nodes(&self) -> usize {
        self.fan_offsets.len() - 1
    }

    pub fn tris(&self) -> &[[usize; 3]] {
        &self.tris
    }

    pub fn shifts(&self, cell: usize) -> &[Vec2; 3] {
        &self.shifts[cell]
    }

    /// C(p) as `(cell, local vertex index)` pairs.
    pub fn node_cells(&self, p: usize) -> &[(usize, usize)] {
        &self.fan[self.fan_offsets[p]..self.fan_offsets[p + 1]]
    }

    /// Nodes connected to `p` by an edge, i.e. the far ends of E(p).
    pub fn node_edges(&self, p: usize) -> &[usize] {
        &self.neighbors[p]
    }

    pub fn is_boundary(&self, p: usize) -> bool {
        self.on_boundary[p]
    }

    pub fn tags(&self, p: usize) -> SideSet {
        self.tags[p]
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }
}

/// Triangular mesh whose nodes move with the flow.
#[derive(Debug, Clone)]
pub struct MovingMesh {
    topo: Arc<Topology>,
    nodes: Vec<Vec2>,
    ref_nodes: Arc<Vec<Vec2>>,
}

impl MovingMesh {
    /// Builds a mesh at t = 0 (current and reference coordinates coincide).
    pub fn new(topo: Topology, nodes: Vec<Vec2>) -> Result<Self> {
        if nodes.len() != topo.n_nodes() {
            return Err(HtcError::InvalidInput(format!(
                "{} coordinates for {} nodes",
                nodes.len(),
                topo.n_nodes()
            )));
        }
        let mesh = MovingMesh {
            topo: Arc::new(topo),
            ref_nodes: Arc::new(nodes.clone()),
            nodes,
        };
        mesh.check_orientation()?;
        Ok(mesh)
    }

    pub fn topology(&self) -> &Topology {
        &self.topo
    }

    pub fn nodes(&self) -> &[Vec2] {
        &self.nodes
    }

    pub fn ref_nodes(&self) -> &[Vec2] {
        &self.ref_nodes
    }

    pub fn n_cells(&self) -> usize {
        self.topo.n_cells()
    }

    pub fn n_nodes(&self) -> usize {
        self.topo.n_nodes()
    }

    /// Coordinates of the three vertices of `cell`, periodic images applied.
    #[inline]
    pub fn cell_vertices(&self, cell: usize) -> [Vec2; 3] {
        let t = &self.topo.tris[cell];
        let s = &self.topo.shifts[cell];
        [
            self.nodes[t[0]] + s[0],
            self.nodes[t[1]] + s[1],
            self.nodes[t[2]] + s[2],
        ]
    }

    pub fn signed_area(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_vertices(cell);
        0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y))
    }

    /// Same topology and reference configuration, new node positions.
    pub fn with_nodes(&self, nodes: Vec<Vec2>) -> Result<Self> {
        if nodes.len() != self.nodes.len() {
            return Err(HtcError::InvalidInput("node array size changed".into()));
        }
        let mesh = MovingMesh {
            topo: Arc::clone(&self.topo),
            ref_nodes: Arc::clone(&self.ref_nodes),
            nodes,
        };
        mesh.check_orientation()?;
        Ok(mesh)
    }

    /// Replaces the reference configuration with the current one (t = 0 reset).
    pub fn rebase(&self) -> Self {
        MovingMesh {
            topo: Arc::clone(&self.topo),
            ref_nodes: Arc::new(self.nodes.clone()),
            nodes: self.nodes.clone(),
        }
    }

    /// Advances node positions by `dt * v_p`.
    pub fn move_nodes(&self, velocities: &[Vec2], dt: f64) -> Result<Self> {
        if velocities.len() != self.nodes.len() {
            return Err(HtcError::InvalidInput("one velocity per node required".into()));
        }
        let nodes = self
            .nodes
            .iter()
            .zip(velocities)
            .map(|(x, v)| x + v * dt)
            .collect();
        self.with_nodes(nodes)
    }

    fn check_orientation(&self) -> Result<()> {
        for c in 0..self.n_cells() {
            let area = self.signed_area(c);
            if !(area > 0.0) {
                return Err(HtcError::MeshInversion { cell: c, area });
            }
        }
        Ok(())
    }

    /// Largest area-to-perimeter ratio over all cells.
    pub fn characteristic_h(&self) -> f64 {
        (0..self.n_cells())
            .map(|c| self.signed_area(c) / self.perimeter(c))
            .fold(0.0, f64::max)
    }

    /// Smallest incircle diameter `4|ω|/|∂ω|` over all cells.
    pub fn min_incircle_diameter(&self) -> f64 {
        (0..self.n_cells())
            .map(|c| 4.0 * self.signed_area(c) / self.perimeter(c))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn perimeter(&self, cell: usize) -> f64 {
        let [a, b, c] = self.cell_vertices(cell);
        (b - a).norm() + (c - b).norm() + (a - c).norm()
    }

    pub fn centroid(&self, cell: usize) -> Vec2 {
        let [a, b, c] = self.cell_vertices(cell);
        (a + b + c) / 3.0
    }

    pub fn total_area(&self) -> f64 {
        crate::numerics::compensated_sum((0..self.n_cells()).map(|c| self.signed_area(c)))
    }

    /// Index of the node closest to `x`.
    pub fn nearest_node(&self, x: &Vec2) -> usize {
        let mut best = 0;
        let mut dist = f64::INFINITY;
        for (p, y) in self.nodes.iter().enumerate() {
            let d = (y - x).norm_squared();
            if d < dist {
                dist = d;
                best = p;
            }
        }
        best
    }
}
