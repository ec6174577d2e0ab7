//! Compatible discrete operators between nodes (primal) and cells (dual).
//!
//! `grad` maps nodal scalars to cell vectors, `curl` and `div` map cell
//! vectors back to nodes. On every triangulation the nodal curl of a cell
//! gradient vanishes at interior nodes, which is what keeps rows of `A` and
//! the thermal impulse `J` curl-free.

use crate::exec::Exec;
use crate::mesh::{CornerGeometry, MovingMesh};
use crate::numerics::{cross_z, Vec2};
use crate::thermo::CellState;

/// Cell gradient `(1/|ω_c|) Σ_{p∈P(c)} l_pc n_pc φ_p`; exact for affine nodal fields.
pub fn grad_cell_from_nodes(mesh: &MovingMesh, geom: &CornerGeometry, phi: &[f64], exec: Exec) -> Vec<Vec2> {
    let tris = mesh.topology().tris();
    exec.map(mesh.n_cells(), |c| {
        let ln = &geom.lnpc[c];
        let t = &tris[c];
        (ln[0] * phi[t[0]] + ln[1] * phi[t[1]] + ln[2] * phi[t[2]]) / geom.cell_area[c]
    })
}

/// Nodal curl (z-component) `−(1/|ω_p|) Σ_{c∈C(p)} l_pc n_pc × F_c`.
///
/// `a × b = a.x b.y − a.y b.x`. Boundary nodes get the sum over their open fan.
pub fn curl_node_from_cells(mesh: &MovingMesh, geom: &CornerGeometry, f: &[Vec2], exec: Exec) -> Vec<f64> {
    let topo = mesh.topology();
    exec.map(mesh.n_nodes(), |p| {
        let sum: f64 = topo
            .node_cells(p)
            .iter()
            .map(|&(c, k)| cross_z(&geom.lnpc[c][k], &f[c]))
            .sum();
        -sum / geom.dual_area[p]
    })
}

/// Volume-integrated nodal divergence `|ω_p| ∇·F = −Σ_{c∈C(p)} l_pc n_pc · F_c`.
pub fn div_node_from_cells(mesh: &MovingMesh, geom: &CornerGeometry, f: &[Vec2], exec: Exec) -> Vec<f64> {
    let topo = mesh.topology();
    exec.map(mesh.n_nodes(), |p| {
        -topo
            .node_cells(p)
            .iter()
            .map(|&(c, k)| geom.lnpc[c][k].dot(&f[c]))
            .sum::<f64>()
    })
}

/// Curl monitors of the thermal impulse and of the rows of the distortion matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurlDiagnostics {
    /// Largest interior-node `|∇×J|`.
    pub curl_j: f64,
    /// Largest interior-node `|∇×A_i|` over the three rows.
    pub curl_a: f64,
    /// Same maxima including boundary nodes.
    pub curl_j_all: f64,
    pub curl_a_all: f64,
}

pub fn curl_diagnostics(mesh: &MovingMesh, geom: &CornerGeometry, states: &[CellState], exec: Exec) -> CurlDiagnostics {
    let topo = mesh.topology();
    let j: Vec<Vec2> = states.iter().map(|s| Vec2::new(s.j.x, s.j.y)).collect();
    let mut fields = vec![curl_node_from_cells(mesh, geom, &j, exec)];
    for row in 0..3 {
        let a: Vec<Vec2> = states.iter().map(|s| Vec2::new(s.a[(row, 0)], s.a[(row, 1)])).collect();
        fields.push(curl_node_from_cells(mesh, geom, &a, exec));
    }
    let max_over = |curl: &[f64], interior_only: bool| {
        curl.iter()
            .enumerate()
            .filter(|(p, _)| !interior_only || !topo.is_boundary(*p))
            .map(|(_, c)| c.abs())
            .fold(0.0, f64::max)
    };
    let rows = |interior_only: bool| {
        fields[1..]
            .iter()
            .map(|f| max_over(f, interior_only))
            .fold(0.0, f64::max)
    };
    CurlDiagnostics {
        curl_j: max_over(&fields[0], true),
        curl_a: rows(true),
        curl_j_all: max_over(&fields[0], false),
        curl_a_all: rows(false),
    }
}
