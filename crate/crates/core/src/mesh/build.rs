use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{MovingMesh, Side, SideSet, Topology};
use crate::error::{HtcError, Result};
use crate::numerics::Vec2;

/// Splits quad `(i, j)` into two counter-clockwise triangles.
///
/// The diagonal alternates in a checkerboard pattern so the triangulation has
/// no preferred direction.
fn split_quad(i: usize, j: usize, a: usize, b: usize, c: usize, d: usize) -> [[usize; 3]; 2] {
    if (i + j) % 2 == 0 {
        [[a, b, c], [a, c, d]]
    } else {
        [[a, b, d], [b, c, d]]
    }
}

fn check_extent(x0: Vec2, x1: Vec2, nx: usize, ny: usize) -> Result<()> {
    if nx == 0 || ny == 0 {
        return Err(HtcError::InvalidInput("nx and ny must be at least 1".into()));
    }
    if !(x1.x > x0.x && x1.y > x0.y) || !(x0.iter().chain(x1.iter()).all(|v| v.is_finite())) {
        return Err(HtcError::InvalidInput(format!(
            "degenerate extent [{}, {}] x [{}, {}]",
            x0.x, x1.x, x0.y, x1.y
        )));
    }
    Ok(())
}

/// Structured `nx × ny` triangulation of the rectangle `[x0, x1]`, boundary nodes tagged by side.
pub fn build_rect_mesh(x0: Vec2, x1: Vec2, nx: usize, ny: usize) -> Result<MovingMesh> {
    check_extent(x0, x1, nx, ny)?;
    let dx = (x1.x - x0.x) / nx as f64;
    let dy = (x1.y - x0.y) / ny as f64;
    let id = |i: usize, j: usize| j * (nx + 1) + i;

    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut tags = Vec::with_capacity(nodes.capacity());
    for j in 0..=ny {
        for i in 0..=nx {
            // Pin the far edges to x1 exactly so walls stay straight.
            let x = if i == nx { x1.x } else { x0.x + i as f64 * dx };
            let y = if j == ny { x1.y } else { x0.y + j as f64 * dy };
            nodes.push(Vec2::new(x, y));
            let mut t = SideSet::EMPTY;
            if i == 0 {
                t = t.with(Side::Left);
            }
            if i == nx {
                t = t.with(Side::Right);
            }
            if j == 0 {
                t = t.with(Side::Bottom);
            }
            if j == ny {
                t = t.with(Side::Top);
            }
            tags.push(t);
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let [t0, t1] = split_quad(i, j, id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push(t0);
            tris.push(t1);
        }
    }
    let topo = Topology::new(nodes.len(), tris, None, tags, false)?;
    MovingMesh::new(topo, nodes)
}

/// Doubly periodic `nx × ny` triangulation of the rectangle `[x0, x1]`.
///
/// Opposite edges are glued: there are `nx · ny` distinct nodes and no
/// boundary. Cells crossing the seam see the periodic image of their far vertices.
pub fn build_periodic_rect_mesh(x0: Vec2, x1: Vec2, nx: usize, ny: usize) -> Result<MovingMesh> {
    check_extent(x0, x1, nx, ny)?;
    if nx < 3 || ny < 3 {
        return Err(HtcError::InvalidInput("periodic meshes need nx, ny >= 3".into()));
    }
    let lx = x1.x - x0.x;
    let ly = x1.y - x0.y;
    let dx = lx / nx as f64;
    let dy = ly / ny as f64;
    let id = |i: usize, j: usize| (j % ny) * nx + (i % nx);
    let shift = |i: usize, j: usize| {
        Vec2::new(
            if i == nx { lx } else { 0.0 },
            if j == ny { ly } else { 0.0 },
        )
    };

    let mut nodes = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            nodes.push(Vec2::new(x0.x + i as f64 * dx, x0.y + j as f64 * dy));
        }
    }
    let mut tris = Vec::with_capacity(2 * nx * ny);
    let mut shifts = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let corners = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let local = split_quad(i, j, 0, 1, 2, 3);
            for tri in local {
                tris.push(tri.map(|k| id(corners[k].0, corners[k].1)));
                shifts.push(tri.map(|k| shift(corners[k].0, corners[k].1)));
            }
        }
    }
    let topo = Topology::new(nodes.len(), tris, Some(shifts), vec![SideSet::EMPTY; nx * ny], true)?;
    MovingMesh::new(topo, nodes)
}

/// Randomly displaces interior nodes by up to `amplitude` times their shortest incident edge.
///
/// If a triangle inverts the amplitude is halved and the draw repeated; five
/// failed retries are fatal. The result is a fresh t = 0 mesh.
pub fn jitter_interior_nodes(mesh: &MovingMesh, amplitude: f64, seed: u64) -> Result<MovingMesh> {
    if !(0.0..0.3).contains(&amplitude) {
        return Err(HtcError::InvalidInput(format!(
            "jitter amplitude {amplitude} outside [0, 0.3)"
        )));
    }
    if amplitude == 0.0 {
        return Ok(mesh.rebase());
    }
    let topo = mesh.topology();
    let local_h: Vec<f64> = (0..mesh.n_nodes())
        .map(|p| {
            topo.node_edges(p)
                .iter()
                .map(|&q| edge_length(mesh, p, q))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();

    let mut amp = amplitude;
    let mut last_err = None;
    for _ in 0..=5 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let nodes: Vec<Vec2> = mesh
            .nodes()
            .iter()
            .enumerate()
            .map(|(p, x)| {
                let dx: f64 = rng.random_range(-1.0..=1.0);
                let dy: f64 = rng.random_range(-1.0..=1.0);
                if topo.is_boundary(p) {
                    *x
                } else {
                    x + Vec2::new(dx, dy) * (amp * local_h[p])
                }
            })
            .collect();
        match mesh.with_nodes(nodes) {
            Ok(m) => return Ok(m.rebase()),
            Err(e) => {
                last_err = Some(e);
                amp *= 0.5;
            }
        }
    }
    Err(last_err.unwrap().context("jitter failed after 5 retries"))
}

/// Edge length between neighbouring nodes, accounting for periodic images.
fn edge_length(mesh: &MovingMesh, p: usize, q: usize) -> f64 {
    let topo = mesh.topology();
    let mut best = f64::INFINITY;
    for &(c, k) in topo.node_cells(p) {
        let verts = mesh.cell_vertices(c);
        let tri = &topo.tris()[c];
        for m in 0..3 {
            if tri[m] == q {
                best = best.min((verts[m] - verts[k]).norm());
            }
        }
    }
    best
}
