//! Element-local control-volume partitions.
//!
//! Each element is split into `k²` congruent sub-triangles on the degree-`k`
//! node lattice. Inside every sub-triangle the barycenter is joined to the
//! edge midpoints, cutting it into three quadrilaterals, one per corner. The
//! polygonal `t_ξ` of a local node ξ is the union of the quadrilaterals at
//! that node; the control volume `C^ξ` of a global node is the union of its
//! polygonals over all elements that carry it.
//!
//! Reference geometry is generated on the integer lattice scaled by `6k`, so
//! barycenters and midpoints are exact and shared points compare equal.

use std::collections::HashMap;
use std::io::Write;

use nalgebra::{Point2, Vector2};

use crate::basis::{Degree, ReferenceBasis};
use crate::cgfem::DofMap;
use crate::element::ElementGeometry;
use crate::error::{Error, Result};
use crate::mesh::TriMesh;
use crate::quadrature::TriangleRule;

type LatticePoint = [i64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentClass {
    /// Interface between `t_ξ` and `t_η` inside the element (part of `∂C^ξ`).
    ControlVolume { neighbor: usize },
    /// Piece of `∂τ`, lying on the element's local edge `local_edge`.
    ElementBoundary { local_edge: usize },
}

impl SegmentClass {
    pub fn as_str(self) -> &'static str {
        match self {
            SegmentClass::ControlVolume { .. } => "cv",
            SegmentClass::ElementBoundary { .. } => "element",
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct RefSegment {
    start: LatticePoint,
    end: LatticePoint,
    class: SegmentClass,
}

#[derive(Debug, Clone)]
struct RefCell {
    pieces: Vec<[LatticePoint; 3]>,
    boundary: Vec<RefSegment>,
}

/// Partition of the reference triangle for one degree.
#[derive(Debug, Clone)]
pub struct ReferencePartition {
    degree: Degree,
    cells: Vec<RefCell>,
}

/// Composite quadrature over the subcells; `owner[q]` is the local node whose
/// polygonal contains point `q`.
#[derive(Debug, Clone)]
pub struct SubcellRule {
    pub points: Vec<Point2<f64>>,
    pub weights: Vec<f64>,
    pub owner: Vec<usize>,
}

impl ReferencePartition {
    pub fn new(degree: Degree) -> Self {
        let k = degree.order() as i64;
        let basis = ReferenceBasis::new(degree);
        let n = basis.len();
        let mut pieces: Vec<Vec<[LatticePoint; 3]>> = vec![Vec::new(); n];
        let mut segments: Vec<Vec<RefSegment>> = vec![Vec::new(); n];

        // Which reference edge (if any) contains the sub-edge between two lattice nodes.
        let boundary_edge = |p: [i64; 2], q: [i64; 2]| -> Option<usize> {
            if p[1] == 0 && q[1] == 0 {
                Some(0)
            } else if p[0] + p[1] == k && q[0] + q[1] == k {
                Some(1)
            } else if p[0] == 0 && q[0] == 0 {
                Some(2)
            } else {
                None
            }
        };

        let mut sub_triangles: Vec<[[i64; 2]; 3]> = Vec::new();
        for b in 0..k {
            for a in 0..(k - b) {
                sub_triangles.push([[a, b], [a + 1, b], [a, b + 1]]);
                if a + b + 2 <= k {
                    sub_triangles.push([[a + 1, b], [a + 1, b + 1], [a, b + 1]]);
                }
            }
        }

        let scaled = |p: [i64; 2]| -> LatticePoint { [6 * p[0], 6 * p[1]] };
        let midpoint = |p: [i64; 2], q: [i64; 2]| -> LatticePoint { [3 * (p[0] + q[0]), 3 * (p[1] + q[1])] };
        for corners in &sub_triangles {
            let local = corners.map(|c| basis.node_at_lattice(c[0] as usize, c[1] as usize).expect("lattice node"));
            let g: LatticePoint = [
                2 * (corners[0][0] + corners[1][0] + corners[2][0]),
                2 * (corners[0][1] + corners[1][1] + corners[2][1]),
            ];
            for i in 0..3 {
                let (prev, next) = ((i + 2) % 3, (i + 1) % 3);
                let c = scaled(corners[i]);
                let m_next = midpoint(corners[i], corners[next]);
                let m_prev = midpoint(corners[prev], corners[i]);
                pieces[local[i]].push([c, m_next, g]);
                pieces[local[i]].push([c, g, m_prev]);
                if let Some(e) = boundary_edge(corners[i], corners[next]) {
                    segments[local[i]].push(RefSegment { start: c, end: m_next, class: SegmentClass::ElementBoundary { local_edge: e } });
                }
                segments[local[i]].push(RefSegment { start: m_next, end: g, class: SegmentClass::ControlVolume { neighbor: local[next] } });
                segments[local[i]].push(RefSegment { start: g, end: m_prev, class: SegmentClass::ControlVolume { neighbor: local[prev] } });
                if let Some(e) = boundary_edge(corners[prev], corners[i]) {
                    segments[local[i]].push(RefSegment { start: m_prev, end: c, class: SegmentClass::ElementBoundary { local_edge: e } });
                }
            }
        }

        let cells = pieces
            .into_iter()
            .zip(segments)
            .map(|(pieces, segs)| RefCell { pieces, boundary: chain_loop(segs) })
            .collect();
        ReferencePartition { degree, cells }
    }

    pub fn degree(&self) -> Degree {
        self.degree
    }

    fn to_reference(&self, p: LatticePoint) -> Point2<f64> {
        let s = 6.0 * self.degree.order() as f64;
        Point2::new(p[0] as f64 / s, p[1] as f64 / s)
    }

    /// Maps a base triangle rule onto every subcell piece.
    pub fn composite_rule(&self, base: &TriangleRule) -> SubcellRule {
        let mut rule = SubcellRule { points: Vec::new(), weights: Vec::new(), owner: Vec::new() };
        for (owner, cell) in self.cells.iter().enumerate() {
            for piece in &cell.pieces {
                let [a, b, c] = piece.map(|p| self.to_reference(p));
                let (e1, e2) = (b - a, c - a);
                let det = e1.perp(&e2).abs();
                for (q, w) in base.iter() {
                    rule.points.push(a + e1 * q.x + e2 * q.y);
                    rule.weights.push(w * det);
                    rule.owner.push(owner);
                }
            }
        }
        rule
    }
}

/// Orders a closed set of directed segments into a loop.
fn chain_loop(mut segs: Vec<RefSegment>) -> Vec<RefSegment> {
    let mut ordered = Vec::with_capacity(segs.len());
    if segs.is_empty() {
        return ordered;
    }
    let mut current = segs.remove(0);
    loop {
        let end = current.end;
        ordered.push(current);
        match segs.iter().position(|s| s.start == end) {
            Some(i) => current = segs.remove(i),
            None => break,
        }
    }
    debug_assert!(segs.is_empty(), "subcell boundary is not a single loop");
    ordered
}

#[derive(Debug, Clone, Copy)]
pub struct Segment {
    pub start: Point2<f64>,
    pub end: Point2<f64>,
    pub length: f64,
    /// Unit normal pointing out of the owning polygonal.
    pub normal: Vector2<f64>,
    pub class: SegmentClass,
}

impl Segment {
    pub fn new(start: Point2<f64>, end: Point2<f64>, class: SegmentClass) -> Self {
        let d = end - start;
        let length = d.norm();
        Segment { start, end, length, normal: Vector2::new(d.y, -d.x) / length, class }
    }

    pub fn point_at(&self, s: f64) -> Point2<f64> {
        self.start + (self.end - self.start) * s
    }

    pub fn midpoint(&self) -> Point2<f64> {
        self.point_at(0.5)
    }
}

/// The polygonal `t_ξ` of one local node.
#[derive(Debug, Clone)]
pub struct Subcell {
    pub local_dof: usize,
    pub node: Point2<f64>,
    /// Counterclockwise vertex loop.
    pub vertices: Vec<Point2<f64>>,
    pub area: f64,
    /// Boundary of `t_ξ` in loop order.
    pub segments: Vec<Segment>,
    /// Triangles tiling `t_ξ`.
    pub pieces: Vec<[Point2<f64>; 3]>,
}

impl Subcell {
    pub fn cv_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s.class, SegmentClass::ControlVolume { .. }))
    }

    pub fn boundary_segments(&self) -> impl Iterator<Item = &Segment> {
        self.segments.iter().filter(|s| matches!(s.class, SegmentClass::ElementBoundary { .. }))
    }
}

#[derive(Debug, Clone)]
pub struct SubcellPartition {
    pub element: usize,
    pub degree: Degree,
    pub cells: Vec<Subcell>,
}

impl SubcellPartition {
    pub fn from_reference(reference: &ReferencePartition, geometry: &ElementGeometry) -> Self {
        let basis = ReferenceBasis::new(reference.degree);
        let map = |p: LatticePoint| geometry.to_physical(reference.to_reference(p));
        let cells = reference
            .cells
            .iter()
            .enumerate()
            .map(|(local_dof, cell)| {
                let segments: Vec<Segment> = cell.boundary.iter().map(|s| Segment::new(map(s.start), map(s.end), s.class)).collect();
                let vertices: Vec<Point2<f64>> = segments.iter().map(|s| s.start).collect();
                let pieces: Vec<[Point2<f64>; 3]> = cell.pieces.iter().map(|p| p.map(map)).collect();
                let area = shoelace(&vertices);
                Subcell { local_dof, node: geometry.to_physical(basis.node(local_dof)), vertices, area, segments, pieces }
            })
            .collect();
        SubcellPartition { element: geometry.element, degree: reference.degree, cells }
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

pub fn shoelace(vertices: &[Point2<f64>]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n).map(|i| vertices[i].coords.perp(&vertices[(i + 1) % n].coords)).sum::<f64>()
}

pub fn build_subcell_partition(mesh: &TriMesh, triangle: usize, degree: Degree) -> Result<SubcellPartition> {
    let geometry = ElementGeometry::new(mesh, triangle)?;
    Ok(SubcellPartition::from_reference(&ReferencePartition::new(degree), &geometry))
}

/// Partitions of every element, in element order.
pub fn build_all_partitions(mesh: &TriMesh, degree: Degree) -> Result<Vec<SubcellPartition>> {
    let reference = ReferencePartition::new(degree);
    (0..mesh.num_triangles())
        .map(|t| Ok(SubcellPartition::from_reference(&reference, &ElementGeometry::new(mesh, t)?)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CvMember {
    pub element: usize,
    pub local_dof: usize,
}

/// For every global DOF, the polygonals whose union is its control volume.
#[derive(Debug, Clone)]
pub struct ControlVolumeIndex {
    members: Vec<Vec<CvMember>>,
    areas: Vec<f64>,
}

impl ControlVolumeIndex {
    pub fn members(&self, dof: usize) -> &[CvMember] {
        &self.members[dof]
    }

    pub fn area(&self, dof: usize) -> f64 {
        self.areas[dof]
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

const MATCH_TOL: f64 = 1e-12;

pub fn build_cv_index(mesh: &TriMesh, dofs: &DofMap, partitions: &[SubcellPartition]) -> Result<ControlVolumeIndex> {
    if partitions.len() != mesh.num_triangles() {
        return Err(Error::GeometryMismatch(format!(
            "{} partitions for {} elements",
            partitions.len(),
            mesh.num_triangles()
        )));
    }
    let mut members = vec![Vec::new(); dofs.len()];
    let mut areas = vec![0.0; dofs.len()];
    // Facet pieces keyed by global edge: (start, end, global dof) as seen from each side.
    let mut facets: HashMap<usize, Vec<(usize, Point2<f64>, Point2<f64>, usize)>> = HashMap::new();
    for (t, part) in partitions.iter().enumerate() {
        if part.element != t || part.degree != dofs.degree() {
            return Err(Error::GeometryMismatch(format!("partition {t} does not belong to element {t}")));
        }
        let globals = dofs.element_dofs(t);
        let edges = mesh.triangle_edges(t);
        for cell in &part.cells {
            let g = globals[cell.local_dof];
            members[g].push(CvMember { element: t, local_dof: cell.local_dof });
            areas[g] += cell.area;
            for seg in cell.boundary_segments() {
                if let SegmentClass::ElementBoundary { local_edge } = seg.class {
                    facets.entry(edges[local_edge]).or_default().push((t, seg.start, seg.end, g));
                }
            }
        }
    }

    for (edge, pieces) in &facets {
        let info = &mesh.edges()[*edge];
        if info.is_boundary() {
            continue;
        }
        let [Some(a), Some(b)] = info.triangles else { unreachable!() };
        let side = |t: usize| pieces.iter().filter(move |p| p.0 == t);
        for &(_, s, e, g) in side(a) {
            let matched = side(b).any(|&(_, s2, e2, g2)| (s - e2).norm() <= MATCH_TOL && (e - s2).norm() <= MATCH_TOL && g == g2);
            if !matched {
                return Err(Error::GeometryMismatch(format!(
                    "facet piece ({}, {})-({}, {}) of element {a} has no counterpart in element {b}",
                    s.x, s.y, e.x, e.y
                )));
            }
        }
        if side(a).count() != side(b).count() {
            return Err(Error::GeometryMismatch(format!("edge {edge} is split differently by elements {a} and {b}")));
        }
    }
    Ok(ControlVolumeIndex { members, areas })
}

/// Writes `x0,y0,x1,y1,class,element,local_dof` for every subcell boundary segment.
pub fn write_dual_csv<W: Write>(partitions: &[SubcellPartition], mut out: W) -> Result<()> {
    writeln!(out, "x0,y0,x1,y1,class,element,local_dof")?;
    for part in partitions {
        for cell in &part.cells {
            for s in &cell.segments {
                writeln!(
                    out,
                    "{:e},{:e},{:e},{:e},{},{},{}",
                    s.start.x,
                    s.start.y,
                    s.end.x,
                    s.end.y,
                    s.class.as_str(),
                    part.element,
                    cell.local_dof
                )?;
            }
        }
    }
    Ok(())
}
