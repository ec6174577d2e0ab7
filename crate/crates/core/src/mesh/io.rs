//! Plain-text mesh exchange.
//!
//! ```text
//! nodes 4
//! 0 0
//! 1 0
//! 1 1
//! 0 1
//! triangles 2
//! 0 1 2
//! 0 2 3
//! boundary 6
//! 0 left
//! 0 bottom
//! ...
//! ```
//!
//! Triangles must be counter-clockwise. Boundary lines tag a node with a side
//! name (`left`, `right`, `bottom`, `top`); corners appear once per side.
//! Blank lines and lines starting with `#` are ignored.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use super::{MovingMesh, Side, SideSet, Topology};
use crate::error::{HtcError, Result};
use crate::numerics::Vec2;

struct Lines<R> {
    inner: std::io::Lines<R>,
    line_no: usize,
}

impl<R: BufRead> Lines<R> {
    fn next_tokens(&mut self) -> Result<Option<(usize, Vec<String>)>> {
        for line in self.inner.by_ref() {
            self.line_no += 1;
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            return Ok(Some((self.line_no, trimmed.split_whitespace().map(str::to_owned).collect())));
        }
        Ok(None)
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<String>)> {
        self.next_tokens()?
            .ok_or_else(|| HtcError::InvalidInput(format!("unexpected end of mesh file, expected {what}")))
    }

    fn header(&mut self, keyword: &str) -> Result<usize> {
        let (n, tok) = self.expect(keyword)?;
        if tok.len() != 2 || tok[0] != keyword {
            return Err(HtcError::InvalidInput(format!("line {n}: expected `{keyword} <count>`")));
        }
        parse(&tok[1], n)
    }
}

fn parse<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| HtcError::InvalidInput(format!("line {line}: cannot parse `{s}`")))
}

/// Reads a mesh in the text format described in the module docs.
pub fn read_mesh<R: BufRead>(reader: R) -> Result<MovingMesh> {
    let mut lines = Lines {
        inner: reader.lines(),
        line_no: 0,
    };
    let n_nodes = lines.header("nodes")?;
    let mut nodes = Vec::with_capacity(n_nodes);
    for _ in 0..n_nodes {
        let (n, tok) = lines.expect("node coordinates")?;
        if tok.len() != 2 {
            return Err(HtcError::InvalidInput(format!("line {n}: expected `x y`")));
        }
        nodes.push(Vec2::new(parse(&tok[0], n)?, parse(&tok[1], n)?));
    }
    let n_tris = lines.header("triangles")?;
    let mut tris = Vec::with_capacity(n_tris);
    for _ in 0..n_tris {
        let (n, tok) = lines.expect("triangle")?;
        if tok.len() != 3 {
            return Err(HtcError::InvalidInput(format!("line {n}: expected three node indices")));
        }
        tris.push([parse(&tok[0], n)?, parse(&tok[1], n)?, parse(&tok[2], n)?]);
    }
    let mut tags = vec![SideSet::EMPTY; n_nodes];
    if let Some((n, tok)) = lines.next_tokens()? {
        if tok.len() != 2 || tok[0] != "boundary" {
            return Err(HtcError::InvalidInput(format!("line {n}: expected `boundary <count>`")));
        }
        let count: usize = parse(&tok[1], n)?;
        for _ in 0..count {
            let (n, tok) = lines.expect("boundary tag")?;
            if tok.len() != 2 {
                return Err(HtcError::InvalidInput(format!("line {n}: expected `node side`")));
            }
            let p: usize = parse(&tok[0], n)?;
            let side = Side::from_name(&tok[1])
                .ok_or_else(|| HtcError::InvalidInput(format!("line {n}: unknown side `{}`", tok[1])))?;
            let slot = tags
                .get_mut(p)
                .ok_or_else(|| HtcError::InvalidInput(format!("line {n}: node {p} out of range")))?;
            *slot = slot.with(side);
        }
    }
    let topo = Topology::new(n_nodes, tris, None, tags, false)?;
    MovingMesh::new(topo, nodes)
}

/// Writes the current node positions, connectivity and boundary tags.
pub fn write_mesh<W: Write>(mesh: &MovingMesh, mut out: W) -> Result<()> {
    let topo = mesh.topology();
    if topo.is_periodic() {
        return Err(HtcError::InvalidInput("periodic meshes have no text representation".into()));
    }
    let mut s = String::new();
    let _ = writeln!(s, "nodes {}", mesh.n_nodes());
    for x in mesh.nodes() {
        let _ = writeln!(s, "{:e} {:e}", x.x, x.y);
    }
    let _ = writeln!(s, "triangles {}", mesh.n_cells());
    for t in topo.tris() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    let tagged: Vec<(usize, Side)> = (0..mesh.n_nodes())
        .flat_map(|p| topo.tags(p).iter().map(move |side| (p, side)))
        .collect();
    let _ = writeln!(s, "boundary {}", tagged.len());
    for (p, side) in tagged {
        let _ = writeln!(s, "{p} {}", side.name());
    }
    out.write_all(s.as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_rect_mesh, jitter_interior_nodes};

    #[test]
    fn round_trip() {
        let mesh = build_rect_mesh(Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.5), 5, 3).unwrap();
        let mesh = jitter_interior_nodes(&mesh, 0.2, 11).unwrap();
        let mut buf = Vec::new();
        write_mesh(&mesh, &mut buf).unwrap();
        let back = read_mesh(buf.as_slice()).unwrap();
        assert_eq!(back.nodes(), mesh.nodes());
        assert_eq!(back.topology().tris(), mesh.topology().tris());
        for p in 0..mesh.n_nodes() {
            assert_eq!(back.topology().tags(p), mesh.topology().tags(p));
        }
    }

    #[test]
    fn clockwise_triangle_is_rejected() {
        let text = "nodes 3\n0 0\n0 1\n1 0\ntriangles 1\n0 1 2\n";
        assert!(matches!(read_mesh(text.as_bytes()), Err(HtcError::MeshInversion { cell: 0, .. })));
    }

    #[test]
    fn bad_side_names_the_line() {
        let text = "nodes 3\n0 0\n1 0\n0 1\ntriangles 1\n0 1 2\nboundary 1\n0 west\n";
        let err = read_mesh(text.as_bytes()).unwrap_err().to_string();
        assert!(err.contains("line 8") && err.contains("west"), "{err}");
    }
}
