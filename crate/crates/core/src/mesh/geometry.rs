use super::MovingMesh;
use crate::error::{HtcError, Result};
use crate::exec::Exec;
use crate::numerics::Vec2;

/// Corner normals, lengths and cell/dual volumes of the current configuration.
#[derive(Debug, Clone)]
pub struct CornerGeometry {
    /// `l_pc n_pc` for the three local vertices of every cell.
    pub lnpc: Vec<[Vec2; 3]>,
    /// `l_pc = |l_pc n_pc|`.
    pub lpc: Vec<[f64; 3]>,
    pub cell_area: Vec<f64>,
    pub dual_area: Vec<f64>,
}

impl CornerGeometry {
    /// Subcell volume fraction `|ω_pc| / |ω_c|` (barycentric subcells of a triangle).
    pub const SUBCELL_FRAC: f64 = 1.0 / 3.0;

    pub fn build(mesh: &MovingMesh, exec: Exec) -> Result<Self> {
        let per_cell = exec.try_map(mesh.n_cells(), |c| {
            let x = mesh.cell_vertices(c);
            let area = 0.5 * ((x[1].x - x[0].x) * (x[2].y - x[0].y) - (x[2].x - x[0].x) * (x[1].y - x[0].y));
            if !(area > 0.0) {
                return Err(HtcError::MeshInversion { cell: c, area });
            }
            let ln: [Vec2; 3] = std::array::from_fn(|k| {
                let next = x[(k + 1) % 3];
                let prev = x[(k + 2) % 3];
                Vec2::new(0.5 * (next.y - prev.y), 0.5 * (prev.x - next.x))
            });
            Ok((ln, ln.map(|v| v.norm()), area))
        })?;

        let mut lnpc = Vec::with_capacity(per_cell.len());
        let mut lpc = Vec::with_capacity(per_cell.len());
        let mut cell_area = Vec::with_capacity(per_cell.len());
        for (ln, l, a) in per_cell {
            lnpc.push(ln);
            lpc.push(l);
            cell_area.push(a);
        }
        let topo = mesh.topology();
        let dual_area = exec.map(mesh.n_nodes(), |p| {
            topo.node_cells(p)
                .iter()
                .map(|&(c, _)| cell_area[c] * Self::SUBCELL_FRAC)
                .sum()
        });
        let geom = CornerGeometry {
            lnpc,
            lpc,
            cell_area,
            dual_area,
        };
        #[cfg(debug_assertions)]
        {
            let (cell, node) = geom.max_gauss_residual(mesh);
            let h = mesh.characteristic_h();
            debug_assert!(
                cell.max(node) <= 1e-13 * h,
                "corner normals do not close: cell {cell:e}, node {node:e}, h {h:e}"
            );
        }
        Ok(geom)
    }

    /// `Σ_{p∈P(c)} l_pc n_pc` (zero up to round-off).
    pub fn cell_normal_sum(&self, c: usize) -> Vec2 {
        self.lnpc[c][0] + self.lnpc[c][1] + self.lnpc[c][2]
    }

    /// `Σ_{c∈C(p)} l_pc n_pc`: zero at interior nodes, the outward boundary normal otherwise.
    pub fn node_normal_sum(&self, mesh: &MovingMesh, p: usize) -> Vec2 {
        mesh.topology()
            .node_cells(p)
            .iter()
            .fold(Vec2::zeros(), |acc, &(c, k)| acc + self.lnpc[c][k])
    }

    /// Largest cell and interior-node corner-normal sums, for the Gauss identity checks.
    pub fn max_gauss_residual(&self, mesh: &MovingMesh) -> (f64, f64) {
        let cell = (0..self.lnpc.len())
            .map(|c| self.cell_normal_sum(c).amax())
            .fold(0.0, f64::max);
        let topo = mesh.topology();
        let node = (0..mesh.n_nodes())
            .filter(|&p| !topo.is_boundary(p))
            .map(|p| self.node_normal_sum(mesh, p).amax())
            .fold(0.0, f64::max);
        (cell, node)
    }
}

/// Corner geometry evaluated with the default loop backend.
pub fn corner_geometry(mesh: &MovingMesh) -> Result<CornerGeometry> {
    CornerGeometry::build(mesh, Exec::default())
}
