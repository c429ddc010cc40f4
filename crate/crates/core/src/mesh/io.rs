use std::fmt::Write as _;
use std::path::Path;

use super::Triangulation;
use crate::error::{Error, Result};
use crate::geom::orient;
use crate::textio::{fmt_f64, write_atomic};

pub const MESH_MAGIC: &str = "RTE-MESH v1";

pub fn write_mesh(mesh: &Triangulation, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), &mesh_to_string(mesh))
}

pub fn mesh_to_string(mesh: &Triangulation) -> String {
    let mut s = String::with_capacity(64 * (mesh.num_vertices() + mesh.num_triangles()));
    let _ = writeln!(s, "{MESH_MAGIC}");
    let _ = writeln!(s, "{} {} {}", mesh.num_vertices(), mesh.num_triangles(), mesh.boundary_loop().len());
    for p in mesh.vertices() {
        let _ = writeln!(s, "{} {}", fmt_f64(p[0]), fmt_f64(p[1]));
    }
    for t in mesh.triangles() {
        let _ = writeln!(s, "{} {} {}", t[0], t[1], t[2]);
    }
    for v in mesh.boundary_loop() {
        let _ = writeln!(s, "{v}");
    }
    s
}

pub fn read_mesh(path: impl AsRef<Path>) -> Result<Triangulation> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_mesh(&text)
}

pub fn parse_mesh(text: &str) -> Result<Triangulation> {
    let err = |line: usize, msg: String| Error::MeshFormat { line, msg };
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, l)) if l == MESH_MAGIC => {}
        Some((n, l)) => return Err(err(n, format!("expected header `{MESH_MAGIC}`, found `{l}`"))),
        None => return Err(err(1, "empty mesh file".into())),
    }
    let (n, counts) = lines.next().ok_or_else(|| err(2, "missing counts line".into()))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse::<usize>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(n, "counts line must be `<nv> <nt> <nb>`".into()))?;
    let [nv, nt, nb] = counts[..] else {
        return Err(err(n, "counts line must be `<nv> <nt> <nb>`".into()));
    };

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file in vertex block".into()))?;
        let xy: Vec<f64> = l
            .split_whitespace()
            .map(|t| t.parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(n, format!("bad vertex line `{l}`")))?;
        match xy[..] {
            [x, y] if x.is_finite() && y.is_finite() => vertices.push([x, y]),
            _ => return Err(err(n, format!("bad vertex line `{l}`"))),
        }
    }

    let mut triangles = Vec::with_capacity(nt);
    for t in 0..nt {
        let (n, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file in triangle block".into()))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(n, format!("bad triangle line `{l}`")))?;
        let [i, j, k] = ids[..] else {
            return Err(err(n, format!("bad triangle line `{l}`")));
        };
        if i >= nv || j >= nv || k >= nv {
            return Err(err(n, format!("triangle {t} references vertex index out of range (nv = {nv})")));
        }
        let o = orient(vertices[i], vertices[j], vertices[k]);
        if o < 0.0 {
            return Err(err(n, format!("triangle {t} is clockwise")));
        }
        if o == 0.0 {
            return Err(err(n, format!("triangle {t} is degenerate")));
        }
        triangles.push([i, j, k]);
    }

    let mut boundary = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (n, l) = lines.next().ok_or_else(|| err(0, "unexpected end of file in boundary block".into()))?;
        let v: usize = l.parse().map_err(|_| err(n, format!("bad boundary index `{l}`")))?;
        if v >= nv {
            return Err(err(n, format!("boundary index {v} out of range (nv = {nv})")));
        }
        boundary.push(v);
    }
    if let Some((n, _)) = lines.next() {
        return Err(err(n, "trailing content after boundary block".into()));
    }

    Triangulation::new(vertices, triangles, boundary).map_err(|e| match e {
        Error::InvalidParameter(msg) => err(0, msg),
        e => e,
    })
}
