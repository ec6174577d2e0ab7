use std::fmt::Write as _;
use std::io::{self, Write};

use lagrange_htc::cases::EocRow;
use lagrange_htc::mesh::MovingMesh;
use lagrange_htc::numerics::Vec2;
use lagrange_htc::thermo::{CellState, DualVars};

/// Legacy ASCII VTK unstructured grid of triangles.
pub fn write_vtk<W: Write>(
    mut w: W,
    mesh: &MovingMesh,
    cells: &[CellState],
    duals: &[DualVars],
    node_velocity: &[Vec2],
    title: &str,
) -> io::Result<()> {
    let n = mesh.n_cells();
    if cells.len() != n || duals.len() != n || node_velocity.len() != mesh.n_nodes() {
        return Err(io::Error::new(io::ErrorKind::InvalidInput, "field sizes do not match the mesh"));
    }
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "{}", title.replace('\n', " "))?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {} double", mesh.n_nodes())?;
    for x in mesh.nodes() {
        writeln!(w, "{:.17e} {:.17e} 0", x.x, x.y)?;
    }
    writeln!(w, "CELLS {} {}", n, 4 * n)?;
    for t in mesh.topology().tris() {
        writeln!(w, "3 {} {} {}", t[0], t[1], t[2])?;
    }
    writeln!(w, "CELL_TYPES {n}")?;
    for _ in 0..n {
        writeln!(w, "5")?;
    }
    writeln!(w, "CELL_DATA {n}")?;
    let fields: [(&str, Box<dyn Fn(usize) -> f64>); 6] = [
        ("rho", Box::new(|c| duals[c].rho)),
        ("p", Box::new(|c| duals[c].p)),
        ("S", Box::new(|c| cells[c].s)),
        ("T", Box::new(|c| duals[c].t)),
        ("E_total", Box::new(|c| duals[c].e_total)),
        ("det_ratio", Box::new(|c| cells[c].a.determinant() * cells[c].rho0 / duals[c].rho)),
    ];
    for (name, f) in &fields {
        writeln!(w, "SCALARS {name} double 1")?;
        writeln!(w, "LOOKUP_TABLE default")?;
        for c in 0..n {
            writeln!(w, "{:.17e}", f(c))?;
        }
    }
    writeln!(w, "POINT_DATA {}", mesh.n_nodes())?;
    writeln!(w, "VECTORS velocity double")?;
    for v in node_velocity {
        writeln!(w, "{:.17e} {:.17e} 0", v.x, v.y)?;
    }
    Ok(())
}

/// Displacement history of one node.
#[derive(Debug, Clone)]
pub struct TrackSeries {
    pub node: usize,
    origin: Vec2,
    rows: Vec<(f64, Vec2)>,
}

impl TrackSeries {
    pub const HEADER: &'static str = "t,x,y,uy_displacement";

    pub fn new(mesh: &MovingMesh, target: &Vec2) -> (Self, f64) {
        let node = mesh.nearest_node(target);
        let origin = mesh.nodes()[node];
        let series = TrackSeries {
            node,
            origin,
            rows: Vec::new(),
        };
        (series, (origin - target).norm())
    }

    pub fn record(&mut self, t: f64, mesh: &MovingMesh) {
        self.rows.push((t, mesh.nodes()[self.node]));
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::HEADER);
        for (t, x) in &self.rows {
            let _ = writeln!(s, "{:.17e},{:.17e},{:.17e},{:.17e}", t, x.x, x.y, x.y - self.origin.y);
        }
        s
    }
}

fn eoc_cell(e: Option<f64>) -> String {
    e.map_or_else(|| "—".to_string(), |v| format!("{v:.2}"))
}

pub fn eoc_csv(rows: &[EocRow]) -> String {
    let mut s = String::from("h,L2_rho,EOC_rho,L2_u,EOC_u,L2_p,EOC_p\n");
    for r in rows {
        let _ = write!(s, "{:.4e}", r.h);
        for k in 0..3 {
            let _ = write!(s, ",{:.4e},{}", r.errors[k], eoc_cell(r.eoc[k]));
        }
        s.push('\n');
    }
    s
}

pub fn eoc_text(rows: &[EocRow]) -> String {
    let mut s = format!(
        "{:>10}  {:>11} {:>6}  {:>11} {:>6}  {:>11} {:>6}\n",
        "h", "L2(rho)", "EOC", "L2(u)", "EOC", "L2(p)", "EOC"
    );
    for r in rows {
        let _ = write!(s, "{:>10.3e}", r.h);
        for k in 0..3 {
            let _ = write!(s, "  {:>11.4e} {:>6}", r.errors[k], eoc_cell(r.eoc[k]));
        }
        s.push('\n');
    }
    s
}
