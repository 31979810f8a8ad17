//! Conforming triangulations of polygonal domains.
//!
//! A [`TriMesh`] is immutable once built. Edges are derived from the
//! triangle list, so every consumer sees the same edge numbering and the
//! same boundary classification.

use std::collections::HashMap;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use nalgebra::Point2;

use crate::error::{Error, Result};

/// Tolerance used to decide whether a coordinate sits on the unit-square boundary.
const BOUNDARY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryLabel {
    Left,
    Right,
    Bottom,
    Top,
    Other,
}

impl BoundaryLabel {
    pub const ALL: [BoundaryLabel; 5] = [
        BoundaryLabel::Left,
        BoundaryLabel::Right,
        BoundaryLabel::Bottom,
        BoundaryLabel::Top,
        BoundaryLabel::Other,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BoundaryLabel::Left => "left",
            BoundaryLabel::Right => "right",
            BoundaryLabel::Bottom => "bottom",
            BoundaryLabel::Top => "top",
            BoundaryLabel::Other => "other",
        }
    }

    /// Classifies a segment of the unit square's boundary by its coordinates.
    fn of_unit_square_segment(a: &Point2<f64>, b: &Point2<f64>) -> Self {
        let near = |v: f64, target: f64| (v - target).abs() <= BOUNDARY_TOL;
        if near(a.x, 0.0) && near(b.x, 0.0) {
            BoundaryLabel::Left
        } else if near(a.x, 1.0) && near(b.x, 1.0) {
            BoundaryLabel::Right
        } else if near(a.y, 0.0) && near(b.y, 0.0) {
            BoundaryLabel::Bottom
        } else if near(a.y, 1.0) && near(b.y, 1.0) {
            BoundaryLabel::Top
        } else {
            BoundaryLabel::Other
        }
    }
}

impl fmt::Display for BoundaryLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BoundaryLabel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "left" => Ok(BoundaryLabel::Left),
            "right" => Ok(BoundaryLabel::Right),
            "bottom" => Ok(BoundaryLabel::Bottom),
            "top" => Ok(BoundaryLabel::Top),
            "other" => Ok(BoundaryLabel::Other),
            _ => Err(format!("unknown boundary label `{s}`")),
        }
    }
}

/// An undirected mesh edge. `vertices` is stored with the smaller index first.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub vertices: [usize; 2],
    /// Adjacent triangles; the second slot is `None` on the domain boundary.
    pub triangles: [Option<usize>; 2],
    pub boundary: Option<BoundaryLabel>,
}

impl Edge {
    pub fn is_boundary(&self) -> bool {
        self.triangles[1].is_none()
    }
}

#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<Point2<f64>>,
    triangles: Vec<[usize; 3]>,
    edges: Vec<Edge>,
    /// Local edge `e` of a triangle joins its vertices `e` and `(e + 1) % 3`.
    triangle_edges: Vec<[usize; 3]>,
    h: f64,
}

impl TriMesh {
    /// Builds a mesh from raw connectivity. Boundary edges missing from
    /// `boundary_labels` are classified geometrically against the unit square.
    pub fn new(
        vertices: Vec<Point2<f64>>,
        triangles: Vec<[usize; 3]>,
        boundary_labels: &HashMap<[usize; 2], BoundaryLabel>,
    ) -> Result<Self> {
        if triangles.is_empty() {
            return Err(Error::InvalidMesh("no triangles".into()));
        }
        let nv = vertices.len();
        let mut h: f64 = 0.0;
        for (t, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= nv) {
                return Err(Error::InvalidMesh(format!("triangle {t} references a missing vertex")));
            }
            let [a, b, c] = tri.map(|v| vertices[v]);
            let twice_area = (b - a).perp(&(c - a));
            if twice_area <= 0.0 {
                return Err(Error::InvalidMesh(format!(
                    "triangle {t} is not counterclockwise (signed area {:e})",
                    0.5 * twice_area
                )));
            }
            h = h.max((b - a).norm()).max((c - b).norm()).max((a - c).norm());
        }

        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0usize; 3];
            for e in 0..3 {
                let (p, q) = (tri[e], tri[(e + 1) % 3]);
                let key = [p.min(q), p.max(q)];
                let index = *lookup.entry(key).or_insert_with(|| {
                    edges.push(Edge { vertices: key, triangles: [None, None], boundary: None });
                    edges.len() - 1
                });
                let edge = &mut edges[index];
                match edge.triangles {
                    [None, _] => edge.triangles[0] = Some(t),
                    [Some(_), None] => edge.triangles[1] = Some(t),
                    _ => {
                        return Err(Error::InvalidMesh(format!(
                            "edge {key:?} shared by more than two triangles"
                        )))
                    }
                }
                local[e] = index;
            }
            triangle_edges.push(local);
        }

        for edge in edges.iter_mut().filter(|e| e.triangles[1].is_none()) {
            let [p, q] = edge.vertices;
            let label = boundary_labels
                .get(&edge.vertices)
                .copied()
                .unwrap_or_else(|| BoundaryLabel::of_unit_square_segment(&vertices[p], &vertices[q]));
            edge.boundary = Some(label);
        }

        Ok(TriMesh { vertices, triangles, edges, triangle_edges, h })
    }

    pub fn vertices(&self) -> &[Point2<f64>] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Maximum element diameter.
    pub fn h(&self) -> f64 {
        self.h
    }

    /// Global edge indices of a triangle's three local edges.
    pub fn triangle_edges(&self, triangle: usize) -> [usize; 3] {
        self.triangle_edges[triangle]
    }

    pub fn triangle_vertices(&self, triangle: usize) -> [Point2<f64>; 3] {
        self.triangles[triangle].map(|v| self.vertices[v])
    }

    pub fn area(&self, triangle: usize) -> f64 {
        let [a, b, c] = self.triangle_vertices(triangle);
        0.5 * (b - a).perp(&(c - a))
    }

    pub fn check_triangle(&self, triangle: usize) -> Result<()> {
        if triangle < self.triangles.len() {
            Ok(())
        } else {
            Err(Error::TriangleOutOfRange { index: triangle, count: self.triangles.len() })
        }
    }

    /// For each local edge of `triangle`, the triangle across it, or `None` on ∂Ω.
    pub fn edge_neighbors(&self, triangle: usize) -> Result<[Option<usize>; 3]> {
        self.check_triangle(triangle)?;
        Ok(self.triangle_edges[triangle].map(|e| {
            let [a, b] = self.edges[e].triangles;
            if a == Some(triangle) {
                b
            } else {
                a
            }
        }))
    }

    pub fn boundary_edges(&self) -> impl Iterator<Item = (usize, &Edge)> {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_boundary())
    }

    /// Reads the plain-text format: `nv nt ne`, then `nv` lines `x y`, `nt`
    /// lines `v0 v1 v2` and `ne` boundary lines `v0 v1 label` (0-based).
    pub fn read_text<R: BufRead>(reader: R) -> Result<Self> {
        let mut lines = reader
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l))
            .filter(|(_, l)| l.as_ref().map(|s| !s.trim().is_empty()).unwrap_or(true));
        let mut next = |what: &str| -> Result<(usize, Vec<String>)> {
            match lines.next() {
                Some((n, line)) => Ok((n, line?.split_whitespace().map(str::to_owned).collect())),
                None => Err(Error::Parse { line: 0, message: format!("unexpected end of file, expected {what}") }),
            }
        };
        fn field<T: FromStr>(line: usize, tokens: &[String], i: usize) -> Result<T> {
            tokens
                .get(i)
                .and_then(|t| t.parse().ok())
                .ok_or_else(|| Error::Parse { line, message: format!("bad or missing field {}", i + 1) })
        }

        let (n, header) = next("header")?;
        let (nv, nt, ne): (usize, usize, usize) = (field(n, &header, 0)?, field(n, &header, 1)?, field(n, &header, 2)?);
        let mut vertices = Vec::with_capacity(nv);
        for _ in 0..nv {
            let (n, t) = next("vertex")?;
            vertices.push(Point2::new(field(n, &t, 0)?, field(n, &t, 1)?));
        }
        let mut triangles = Vec::with_capacity(nt);
        for _ in 0..nt {
            let (n, t) = next("triangle")?;
            triangles.push([field(n, &t, 0)?, field(n, &t, 1)?, field(n, &t, 2)?]);
        }
        let mut labels = HashMap::new();
        for _ in 0..ne {
            let (n, t) = next("boundary edge")?;
            let (a, b): (usize, usize) = (field(n, &t, 0)?, field(n, &t, 1)?);
            let label: BoundaryLabel = t
                .get(2)
                .ok_or_else(|| Error::Parse { line: n, message: "missing boundary label".into() })?
                .parse()
                .map_err(|message| Error::Parse { line: n, message })?;
            labels.insert([a.min(b), a.max(b)], label);
        }
        let mesh = TriMesh::new(vertices, triangles, &labels)?;
        for key in labels.keys() {
            let found = mesh.boundary_edges().any(|(_, e)| e.vertices == *key);
            if !found {
                return Err(Error::InvalidMesh(format!("labelled edge {key:?} is not a boundary edge")));
            }
        }
        Ok(mesh)
    }

    pub fn write_text<W: Write>(&self, mut out: W) -> Result<()> {
        let boundary: Vec<&Edge> = self.boundary_edges().map(|(_, e)| e).collect();
        writeln!(out, "{} {} {}", self.vertices.len(), self.triangles.len(), boundary.len())?;
        for p in &self.vertices {
            writeln!(out, "{} {}", p.x, p.y)?;
        }
        for [a, b, c] in &self.triangles {
            writeln!(out, "{a} {b} {c}")?;
        }
        for e in boundary {
            let label = e.boundary.unwrap_or(BoundaryLabel::Other);
            writeln!(out, "{} {} {}", e.vertices[0], e.vertices[1], label)?;
        }
        Ok(())
    }
}

/// Uniform `n × n` grid on the unit square, each cell cut by its
/// lower-left to upper-right diagonal.
pub fn build_structured_mesh(n: usize) -> Result<TriMesh> {
    if n == 0 {
        return Err(Error::EmptyMesh);
    }
    let stride = n + 1;
    let vertices = (0..stride)
        .flat_map(|j| (0..stride).map(move |i| Point2::new(i as f64 / n as f64, j as f64 / n as f64)))
        .collect();
    let mut triangles = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let v00 = i + j * stride;
            let (v10, v01, v11) = (v00 + 1, v00 + stride, v00 + stride + 1);
            triangles.push([v00, v10, v11]);
            triangles.push([v00, v11, v01]);
        }
    }
    TriMesh::new(vertices, triangles, &HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Brute-force neighbor scan: two triangles are neighbors iff they share two vertices.
    fn brute_neighbors(mesh: &TriMesh, t: usize) -> Vec<usize> {
        let mine = mesh.triangles()[t];
        (0..mesh.num_triangles())
            .filter(|&s| s != t)
            .filter(|&s| mesh.triangles()[s].iter().filter(|v| mine.contains(v)).count() == 2)
            .collect()
    }

    #[test]
    fn structured_counts() {
        let m1 = build_structured_mesh(1).unwrap();
        assert_eq!((m1.num_vertices(), m1.num_triangles(), m1.num_edges()), (4, 2, 5));
        let m2 = build_structured_mesh(2).unwrap();
        assert_eq!((m2.num_vertices(), m2.num_triangles(), m2.num_edges()), (9, 8, 16));

        // Grid edges: n(n+1) horizontal + n(n+1) vertical + n^2 diagonals.
        let n = 4;
        let expected_edges = 2 * n * (n + 1) + n * n;
        let m4 = build_structured_mesh(n).unwrap();
        assert_eq!(expected_edges, 56);
        assert_eq!((m4.num_vertices(), m4.num_triangles(), m4.num_edges()), (25, 32, expected_edges));
        for m in [&m1, &m2, &m4] {
            let euler = m.num_vertices() as i64 - m.num_edges() as i64 + m.num_triangles() as i64;
            assert_eq!(euler, 1);
        }
    }

    #[test]
    fn rejects_zero_cells() {
        assert!(matches!(build_structured_mesh(0), Err(Error::EmptyMesh)));
    }

    #[test]
    fn areas_and_h() {
        for n in [1, 3, 8] {
            let m = build_structured_mesh(n).unwrap();
            let total: f64 = (0..m.num_triangles()).map(|t| m.area(t)).sum();
            assert!((total - 1.0).abs() < 1e-12);
            assert!((m.h() - 2f64.sqrt() / n as f64).abs() < 1e-15);
        }
        let coarse = build_structured_mesh(5).unwrap();
        let fine = build_structured_mesh(10).unwrap();
        assert!((coarse.h() / 2.0 - fine.h()).abs() < 1e-15);
    }

    #[test]
    fn edge_incidence() {
        let m = build_structured_mesh(4).unwrap();
        let boundary = m.boundary_edges().count();
        assert_eq!(boundary, 16);
        for e in m.edges() {
            if e.is_boundary() {
                assert_ne!(e.boundary, Some(BoundaryLabel::Other));
            } else {
                assert!(e.boundary.is_none());
            }
        }
        let count = |l| m.boundary_edges().filter(|(_, e)| e.boundary == Some(l)).count();
        for l in [BoundaryLabel::Left, BoundaryLabel::Right, BoundaryLabel::Bottom, BoundaryLabel::Top] {
            assert_eq!(count(l), 4);
        }
        for l in [BoundaryLabel::Left, BoundaryLabel::Right, BoundaryLabel::Top, BoundaryLabel::Bottom] {
            assert_eq!(count(l), 4);
        }
    }

    #[test]
    fn neighbors_two_triangle_mesh() {
        let m = build_structured_mesh(1).unwrap();
        let nb = m.edge_neighbors(0).unwrap();
        assert_eq!(nb.iter().filter(|x| x.is_some()).count(), 1);
        assert_eq!(nb.iter().flatten().next(), Some(&1));
        assert!(matches!(m.edge_neighbors(2), Err(Error::TriangleOutOfRange { .. })));
    }

    #[test]
    fn neighbors_match_brute_force() {
        let m = build_structured_mesh(4).unwrap();
        for t in 0..m.num_triangles() {
            let nb = m.edge_neighbors(t).unwrap();
            let mut fast: Vec<usize> = nb.iter().flatten().copied().collect();
            fast.sort();
            assert_eq!(fast, brute_neighbors(&m, t));
            let on_boundary = m.triangles()[t].iter().any(|&v| {
                let p = m.vertices()[v];
                p.x == 0.0 || p.x == 1.0 || p.y == 0.0 || p.y == 1.0
            });
            if nb.iter().any(Option::is_none) {
                assert!(on_boundary);
            }
            for (e, other) in nb.iter().enumerate() {
                if let Some(o) = other {
                    let back = m.edge_neighbors(*o).unwrap();
                    let shared = m.triangle_edges(t)[e];
                    let pos = m.triangle_edges(*o).iter().position(|&x| x == shared).unwrap();
                    assert_eq!(back[pos], Some(t));
                }
            }
        }
        // Interior triangle (cell (1,1), lower half) has three neighbors.
        let interior = 2 * (1 + 4);
        assert!(m.edge_neighbors(interior).unwrap().iter().all(Option::is_some));
    }

    #[test]
    fn rejects_clockwise_triangles() {
        let v = vec![Point2::new(0.0, 0.0), Point2::new(0.0, 1.0), Point2::new(1.0, 0.0)];
        assert!(TriMesh::new(v, vec![[0, 1, 2]], &HashMap::new()).is_err());
    }

    #[test]
    fn text_round_trip() {
        let m = build_structured_mesh(3).unwrap();
        let mut buf = Vec::new();
        m.write_text(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("16 18 12\n"));
        let back = TriMesh::read_text(buf.as_slice()).unwrap();
        assert_eq!(back.vertices(), m.vertices());
        assert_eq!(back.triangles(), m.triangles());
        assert_eq!(back.edges(), m.edges());
    }

    #[test]
    fn text_labels_override_geometry() {
        let text = "3 1 3\n0 0\n1 0\n0 1\n0 1 2\n0 1 bottom\n1 2 other\n2 0 left\n";
        let m = TriMesh::read_text(text.as_bytes()).unwrap();
        let hyp = m.edges().iter().find(|e| e.vertices == [1, 2]).unwrap();
        assert_eq!(hyp.boundary, Some(BoundaryLabel::Other));
        let bad = "3 1 1\n0 0\n1 0\n0 1\n0 1 2\n0 1 sideways\n";
        assert!(matches!(TriMesh::read_text(bad.as_bytes()), Err(Error::Parse { line: 6, .. })));
    }
}
