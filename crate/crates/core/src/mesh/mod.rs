//! Background triangulation, per-component active meshes and cut quadrature.
//!
//! Every component is embedded in the same structured background mesh. Its
//! active mesh is the set of background triangles meeting it in positive
//! measure, together with the cut entities (clipped polygons, sub-segments or
//! the point itself) that carry the quadrature.

pub mod geom;
pub mod quadrature;

use std::path::Path;

use rayon::prelude::*;

use crate::domain::{ComponentId, EdgeTag, EndTag, Endpoint, FracturedDomain, Side};
use crate::{vec2, Error, Result, Vec2};
use geom::{clip_polygon_triangle, clip_segment_interval, point_in_triangle, signed_area, triangle_area};
use quadrature::{polygon_rule, segment_rule, QuadPoint, TriangleRule};

/// Barycentric tolerance for point location.
pub const LOCATE_TOL: f64 = 1e-12;

/// Relative offset (times `h`) used to pick the one-sided host of a trace.
pub const SIDE_OFFSET: f64 = 1e-8;

/// Quadrature used on cut entities.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureOrder {
    pub segment: usize,
    pub triangle: TriangleRule,
}

impl Default for QuadratureOrder {
    fn default() -> Self {
        QuadratureOrder {
            segment: 3,
            triangle: TriangleRule::Degree2,
        }
    }
}

/// Structured triangulation of an axis-aligned box: `nx × nx` cells, each
/// split along its lower-left to upper-right diagonal.
#[derive(Debug, Clone)]
pub struct BackgroundMesh {
    pub nx: usize,
    pub origin: Vec2,
    /// Cell width and height.
    pub cell: Vec2,
    pub vertices: Vec<Vec2>,
    pub triangles: Vec<[usize; 3]>,
    /// Mesh parameter used in the discrete forms: the cell size.
    pub h: f64,
}

/// Unit-square background mesh with `nx` cells per side.
pub fn build_background_mesh(nx: usize) -> Result<BackgroundMesh> {
    BackgroundMesh::structured([vec2(0.0, 0.0), vec2(1.0, 1.0)], nx)
}

impl BackgroundMesh {
    pub fn structured(bbox: [Vec2; 2], nx: usize) -> Result<Self> {
        if nx < 2 {
            return Err(Error::Parameter(format!("nx must be at least 2, got {nx}")));
        }
        let origin = bbox[0];
        let ext = bbox[1] - bbox[0];
        let cell = ext / nx as f64;
        let mut vertices = Vec::with_capacity((nx + 1) * (nx + 1));
        for j in 0..=nx {
            for i in 0..=nx {
                vertices.push(origin + vec2(cell.x * i as f64, cell.y * j as f64));
            }
        }
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut triangles = Vec::with_capacity(2 * nx * nx);
        for j in 0..nx {
            for i in 0..nx {
                let (v00, v10, v11, v01) = (vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1));
                triangles.push([v00, v10, v11]);
                triangles.push([v00, v11, v01]);
            }
        }
        Ok(BackgroundMesh {
            nx,
            origin,
            cell,
            vertices,
            triangles,
            h: cell.x.max(cell.y),
        })
    }

    pub fn bbox(&self) -> [Vec2; 2] {
        [self.origin, self.origin + self.cell * self.nx as f64]
    }

    /// Longest edge length (the cell diagonal).
    pub fn max_edge(&self) -> f64 {
        self.cell.norm()
    }

    pub fn tri(&self, t: usize) -> [Vec2; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    /// Background triangles sharing each interior or boundary edge, keyed by
    /// the sorted vertex pair.
    pub fn edge_triangles(&self) -> std::collections::BTreeMap<(usize, usize), Vec<usize>> {
        let mut map = std::collections::BTreeMap::<_, Vec<usize>>::new();
        for (t, tri) in self.triangles.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                map.entry((a.min(b), a.max(b))).or_default().push(t);
            }
        }
        map
    }

    fn cell_range(&self, lo: f64, hi: f64, origin: f64, size: f64) -> (usize, usize) {
        let n = self.nx as isize;
        let a = (((lo - origin) / size).floor() as isize).clamp(0, n - 1);
        let b = (((hi - origin) / size).floor() as isize).clamp(0, n - 1);
        (a as usize, b as usize)
    }

    /// Triangles of all cells overlapping the box `[lo, hi]` grown by `pad`,
    /// in ascending order.
    pub fn triangles_in_box(&self, lo: Vec2, hi: Vec2, pad: f64) -> Vec<usize> {
        let (i0, i1) = self.cell_range(lo.x - pad, hi.x + pad, self.origin.x, self.cell.x);
        let (j0, j1) = self.cell_range(lo.y - pad, hi.y + pad, self.origin.y, self.cell.y);
        let mut out = Vec::with_capacity(2 * (i1 - i0 + 1) * (j1 - j0 + 1));
        for j in j0..=j1 {
            for i in i0..=i1 {
                let c = j * self.nx + i;
                out.push(2 * c);
                out.push(2 * c + 1);
            }
        }
        out
    }

    /// Triangles containing `x`, ascending.
    pub fn locate(&self, x: Vec2) -> Vec<usize> {
        let pad = 1e-9 * self.h;
        self.triangles_in_box(x, x, pad)
            .into_iter()
            .filter(|&t| point_in_triangle(&self.tri(t), x, LOCATE_TOL))
            .collect()
    }

    fn contains(&self, x: Vec2, eps: f64) -> bool {
        let [lo, hi] = self.bbox();
        x.x >= lo.x - eps && x.x <= hi.x + eps && x.y >= lo.y - eps && x.y <= hi.y + eps
    }

    /// Split the segment `p → q` into sub-intervals each lying in the closure
    /// of a single triangle. Returns `(s0, s1, host)` with the lowest-index
    /// host, and every triangle meeting the segment in positive length.
    fn split_segment(&self, p: Vec2, q: Vec2, eps: f64) -> Result<(Vec<(f64, f64, usize)>, Vec<usize>)> {
        let len = (q - p).norm();
        let lo = vec2(p.x.min(q.x), p.y.min(q.y));
        let hi = vec2(p.x.max(q.x), p.y.max(q.y));
        let hits: Vec<(usize, f64, f64)> = self
            .triangles_in_box(lo, hi, eps)
            .into_iter()
            .filter_map(|t| clip_segment_interval(p, q, &self.tri(t), eps).map(|(a, b)| (t, a, b)))
            .collect();
        let mut breaks: Vec<f64> = vec![0.0, 1.0];
        for &(_, a, b) in &hits {
            breaks.push(a);
            breaks.push(b);
        }
        breaks.sort_by(f64::total_cmp);
        let mut uniq: Vec<f64> = Vec::with_capacity(breaks.len());
        for s in breaks {
            if uniq.last().is_none_or(|&l| (s - l) * len >= eps) {
                uniq.push(s);
            }
        }
        if let Some(l) = uniq.last_mut() {
            *l = 1.0;
        }
        let tol = eps / len;
        let mut pieces = Vec::with_capacity(uniq.len());
        for w in uniq.windows(2) {
            let m = 0.5 * (w[0] + w[1]);
            let host = hits
                .iter()
                .filter(|h| h.1 - tol <= m && m <= h.2 + tol)
                .map(|h| h.0)
                .min()
                .ok_or_else(|| Error::Geometry(format!("segment {p:?} -> {q:?} leaves the background mesh")))?;
            pieces.push((w[0], w[1], host));
        }
        let mut active: Vec<usize> = hits.iter().map(|h| h.0).collect();
        active.sort_unstable();
        active.dedup();
        Ok((pieces, active))
    }
}

/// Geometry of a cut entity `T ∩ Ω_{d,i}`.
#[derive(Debug, Clone, PartialEq)]
pub enum CutShape {
    /// Convex polygon (counter-clockwise loop).
    Polygon(Vec<Vec2>),
    /// Sub-segment of crack segment `seg`.
    Segment { seg: usize, a: Vec2, b: Vec2 },
    Point(Vec2),
}

impl CutShape {
    /// Area, length, or unit counting measure for a point.
    pub fn measure(&self) -> f64 {
        match self {
            CutShape::Polygon(p) => signed_area(p),
            CutShape::Segment { a, b, .. } => (b - a).norm(),
            CutShape::Point(_) => 1.0,
        }
    }

    /// Quadrature with the given rule on this entity.
    pub fn quadrature(&self, order: QuadratureOrder) -> Vec<QuadPoint> {
        match self {
            CutShape::Polygon(p) => polygon_rule(p, order.triangle),
            CutShape::Segment { a, b, .. } => segment_rule(*a, *b, order.segment),
            CutShape::Point(x) => vec![QuadPoint { x: *x, weight: 1.0 }],
        }
    }
}

#[derive(Debug, Clone)]
pub struct CutCell {
    pub triangle: usize,
    pub shape: CutShape,
    pub quadrature: Vec<QuadPoint>,
}

/// Piece of a bulk edge on the outer boundary, inside one active triangle.
#[derive(Debug, Clone)]
pub struct BoundaryPiece {
    pub triangle: usize,
    pub a: Vec2,
    pub b: Vec2,
    /// Outward unit normal.
    pub normal: Vec2,
    pub quadrature: Vec<QuadPoint>,
}

/// Crack endpoint with the active triangle used for its trace.
#[derive(Debug, Clone, Copy)]
pub struct CrackEnd {
    pub end: Endpoint,
    pub x: Vec2,
    pub triangle: usize,
    /// Tangent pointing out of the crack.
    pub normal: Vec2,
    pub tag: EndTag,
}

#[derive(Debug, Clone)]
pub struct ActiveMesh {
    pub comp: ComponentId,
    /// Active background triangles, ascending.
    pub triangles: Vec<usize>,
    /// Cut entities tiling the component, ordered by triangle.
    pub cells: Vec<CutCell>,
    /// Outer-boundary edge pieces (bulk components only).
    pub boundary: Vec<BoundaryPiece>,
    /// Endpoints (crack components only).
    pub ends: Vec<CrackEnd>,
}

impl ActiveMesh {
    pub fn contains(&self, t: usize) -> bool {
        self.triangles.binary_search(&t).is_ok()
    }

    /// Total measure of the cut entities.
    pub fn measure(&self) -> f64 {
        self.cells.iter().map(|c| c.shape.measure()).sum()
    }

    /// Background vertices of the active triangles, ascending.
    pub fn vertices(&self, mesh: &BackgroundMesh) -> Vec<usize> {
        let mut v: Vec<usize> = self.triangles.iter().flat_map(|&t| mesh.triangles[t]).collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Triangle of `active` containing `x`, or `x - ε_side ν` when a side hint
/// (the exterior normal `ν` of the component) is given. Lowest index wins.
pub fn locate_point(mesh: &BackgroundMesh, active: &ActiveMesh, x: Vec2, side_hint: Option<Vec2>) -> Result<usize> {
    let y = match side_hint {
        Some(nu) => x - nu * (SIDE_OFFSET * mesh.h),
        None => x,
    };
    mesh.locate(y)
        .into_iter()
        .find(|&t| active.contains(t))
        .ok_or_else(|| Error::Geometry(format!("no triangle of the {} active mesh contains {y:?}", active.comp)))
}

fn check_inside(mesh: &BackgroundMesh, comp: ComponentId, pts: &[Vec2], eps: f64) -> Result<()> {
    match pts.iter().find(|p| !mesh.contains(**p, eps)) {
        Some(p) => Err(Error::Geometry(format!("{comp}: {p:?} lies outside the background mesh"))),
        None => Ok(()),
    }
}

/// Active mesh and cut quadrature of one component.
pub fn extract_active_mesh(
    domain: &FracturedDomain,
    mesh: &BackgroundMesh,
    comp: ComponentId,
    order: QuadratureOrder,
) -> Result<ActiveMesh> {
    if !domain.contains_component(comp) {
        return Err(Error::Adjacency(format!("{comp} does not exist")));
    }
    let eps = domain.eps_geom();
    let mut am = ActiveMesh {
        comp,
        triangles: Vec::new(),
        cells: Vec::new(),
        boundary: Vec::new(),
        ends: Vec::new(),
    };
    match comp.dim {
        2 => {
            let b = &domain.bulks[comp.index];
            check_inside(mesh, comp, &b.vertices, eps)?;
            for piece in &b.pieces {
                let lo = vec2(piece.iter().map(|p| p.x).fold(f64::INFINITY, f64::min), piece.iter().map(|p| p.y).fold(f64::INFINITY, f64::min));
                let hi = vec2(
                    piece.iter().map(|p| p.x).fold(f64::NEG_INFINITY, f64::max),
                    piece.iter().map(|p| p.y).fold(f64::NEG_INFINITY, f64::max),
                );
                for t in mesh.triangles_in_box(lo, hi, eps) {
                    if let Some(poly) = clip_polygon_triangle(piece, &mesh.tri(t), eps) {
                        let shape = CutShape::Polygon(poly);
                        let quadrature = shape.quadrature(order);
                        am.cells.push(CutCell {
                            triangle: t,
                            shape,
                            quadrature,
                        });
                    }
                }
            }
            am.cells.sort_by_key(|c| c.triangle);
            am.triangles = am.cells.iter().map(|c| c.triangle).collect();
            am.triangles.dedup();
            for k in 0..b.vertices.len() {
                if b.edge_tags[k] != EdgeTag::Outer {
                    continue;
                }
                let (p, q) = b.edge(k);
                let normal = b.edge_normal(k);
                let (pieces, _) = mesh.split_segment(p, q, eps)?;
                for (s0, s1, _) in pieces {
                    let (a, bb) = (p + (q - p) * s0, p + (q - p) * s1);
                    let triangle = locate_point(mesh, &am, 0.5 * (a + bb), Some(normal))?;
                    am.boundary.push(BoundaryPiece {
                        triangle,
                        a,
                        b: bb,
                        normal,
                        quadrature: segment_rule(a, bb, order.segment),
                    });
                }
            }
        }
        1 => {
            let c = &domain.cracks[comp.index];
            check_inside(mesh, comp, &c.vertices, eps)?;
            let mut active = Vec::new();
            for seg in 0..c.segment_count() {
                let (p, q) = c.segment(seg);
                let (pieces, hit) = mesh.split_segment(p, q, eps)?;
                active.extend(hit);
                for (s0, s1, t) in pieces {
                    let shape = CutShape::Segment {
                        seg,
                        a: p + (q - p) * s0,
                        b: p + (q - p) * s1,
                    };
                    let quadrature = shape.quadrature(order);
                    am.cells.push(CutCell {
                        triangle: t,
                        shape,
                        quadrature,
                    });
                }
            }
            active.sort_unstable();
            active.dedup();
            am.triangles = active;
            let first = am.cells.first().map(|c| c.triangle);
            let last = am.cells.last().map(|c| c.triangle);
            for (e, t) in [(Endpoint::Start, first), (Endpoint::End, last)] {
                let triangle = t.ok_or_else(|| Error::Geometry(format!("{comp} has no cut entities")))?;
                am.ends.push(CrackEnd {
                    end: e,
                    x: c.endpoint(e),
                    triangle,
                    normal: c.end_normal(e),
                    tag: c.end_tag(e),
                });
            }
        }
        _ => {
            let p = &domain.points[comp.index];
            check_inside(mesh, comp, &[p.x], eps)?;
            let t = *mesh
                .locate(p.x)
                .first()
                .ok_or_else(|| Error::Geometry(format!("{comp}: no triangle contains {:?}", p.x)))?;
            am.triangles = vec![t];
            am.cells.push(CutCell {
                triangle: t,
                shape: CutShape::Point(p.x),
                quadrature: vec![QuadPoint { x: p.x, weight: 1.0 }],
            });
        }
    }
    Ok(am)
}

/// Active meshes of all components, in `(d, i)` order.
pub fn extract_all(
    domain: &FracturedDomain,
    mesh: &BackgroundMesh,
    order: QuadratureOrder,
    parallel: bool,
) -> Result<Vec<ActiveMesh>> {
    let comps = domain.components();
    if parallel {
        comps
            .par_iter()
            .map(|&c| extract_active_mesh(domain, mesh, c, order))
            .collect()
    } else {
        comps.iter().map(|&c| extract_active_mesh(domain, mesh, c, order)).collect()
    }
}

/// One-sided bulk trace data at a crack sub-segment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SideTrace {
    pub side: Side,
    pub bulk: usize,
    /// Host triangle in the bulk's active mesh.
    pub triangle: usize,
    /// Exterior normal of the bulk (pointing towards the crack).
    pub normal: Vec2,
}

/// Quadrature on one crack cut entity together with its bulk trace hosts.
#[derive(Debug, Clone)]
pub struct InterfacePiece {
    /// Index into the crack's active-mesh cells.
    pub cell: usize,
    pub seg: usize,
    /// Host triangle in the crack's active mesh.
    pub triangle: usize,
    pub tangent: Vec2,
    pub quadrature: Vec<QuadPoint>,
    pub sides: Vec<SideTrace>,
}

#[derive(Debug, Clone)]
pub struct CrackInterface {
    pub crack: usize,
    pub pieces: Vec<InterfacePiece>,
}

impl CrackInterface {
    pub fn total_weight(&self) -> f64 {
        self.pieces.iter().flat_map(|p| &p.quadrature).map(|q| q.weight).sum()
    }
}

/// Interface quadrature for every crack. `crack_meshes[i]` and
/// `bulk_meshes[j]` are the active meshes of crack `i` and bulk `j`.
pub fn build_interface_quadrature(
    domain: &FracturedDomain,
    mesh: &BackgroundMesh,
    crack_meshes: &[ActiveMesh],
    bulk_meshes: &[ActiveMesh],
) -> Result<Vec<CrackInterface>> {
    domain
        .cracks
        .iter()
        .enumerate()
        .map(|(ci, c)| {
            let am = &crack_meshes[ci];
            let mut pieces = Vec::with_capacity(am.cells.len());
            for (k, cell) in am.cells.iter().enumerate() {
                let CutShape::Segment { seg, a, b } = cell.shape else {
                    return Err(Error::Geometry(format!("crack#{ci}: cut entity {k} is not a segment")));
                };
                let mid = 0.5 * (a + b);
                let mut sides = Vec::with_capacity(2);
                for (side, bi) in c.neighbors() {
                    let normal = c.side_normal(seg, side);
                    let triangle = locate_point(mesh, &bulk_meshes[bi], mid, Some(normal)).map_err(|_| {
                        Error::Geometry(format!("crack#{ci}: no host triangle in bulk#{bi} on the {side:?} side at {mid:?}"))
                    })?;
                    sides.push(SideTrace {
                        side,
                        bulk: bi,
                        triangle,
                        normal,
                    });
                }
                pieces.push(InterfacePiece {
                    cell: k,
                    seg,
                    triangle: cell.triangle,
                    tangent: c.tangent(seg),
                    quadrature: cell.quadrature.clone(),
                    sides,
                });
            }
            Ok(CrackInterface { crack: ci, pieces })
        })
        .collect()
}

/// Debug dump of the cut geometry: one row per cut entity.
pub fn write_cut_csv(path: &Path, meshes: &[ActiveMesh]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Config(format!("{other:?}")),
    })?;
    w.write_record(["component", "triangle", "measure"])?;
    for m in meshes {
        for c in &m.cells {
            w.write_record([m.comp.to_string(), c.triangle.to_string(), format!("{:.16e}", c.shape.measure())])?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Area of background triangle `t`.
pub fn background_area(mesh: &BackgroundMesh, t: usize) -> f64 {
    triangle_area(&mesh.tri(t))
}
