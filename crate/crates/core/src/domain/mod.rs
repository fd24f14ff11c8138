//! Fractured domains: bulk regions, cracks and bifurcation points, their
//! adjacency, coefficient fields and the mixed-dimensional calculus built on
//! top of them.

pub mod calculus;
pub mod field;
pub mod json;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::mesh::geom::{ear_clip, is_self_intersecting, left_normal, point_segment_distance, signed_area};
use crate::{Error, Result, Vec2};

pub use calculus::{
    codim_jump, coercivity_indicator, d_beta_analytic, div_beta, gamma, interface_jump,
    verify_partial_integration, Analytic, ComponentFunction,
};
pub use field::{Builtin, ScalarField, VectorField};

/// Identifies a component `Ω_{d,i}` by dimension and index (0-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComponentId {
    pub dim: usize,
    pub index: usize,
}

impl ComponentId {
    pub const fn point(index: usize) -> Self {
        ComponentId { dim: 0, index }
    }
    pub const fn crack(index: usize) -> Self {
        ComponentId { dim: 1, index }
    }
    pub const fn bulk(index: usize) -> Self {
        ComponentId { dim: 2, index }
    }
}

impl fmt::Display for ComponentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.dim {
            0 => "point",
            1 => "crack",
            _ => "bulk",
        };
        write!(f, "{kind}#{}", self.index)
    }
}

/// Side of a crack relative to its tangent (left = counter-clockwise normal).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    Start,
    End,
}

/// What a bulk boundary edge lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeTag {
    /// On the outer boundary ∂Ω.
    Outer,
    /// On the given crack.
    Crack(usize),
}

/// What a crack endpoint lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndTag {
    Outer,
    Point(usize),
}

#[derive(Debug, Clone)]
pub struct BulkComponent {
    pub name: String,
    /// Counter-clockwise boundary loop; edge `k` runs from vertex `k` to `k + 1`.
    pub vertices: Vec<Vec2>,
    pub edge_tags: Vec<EdgeTag>,
    pub beta: VectorField,
    pub alpha: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
    /// Convex (triangular) decomposition of the region.
    pub pieces: Vec<[Vec2; 3]>,
}

impl BulkComponent {
    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn edge(&self, k: usize) -> (Vec2, Vec2) {
        (self.vertices[k], self.vertices[(k + 1) % self.vertices.len()])
    }

    /// Outward unit normal of edge `k`.
    pub fn edge_normal(&self, k: usize) -> Vec2 {
        let (a, b) = self.edge(k);
        -left_normal(b - a)
    }
}

#[derive(Debug, Clone)]
pub struct CrackComponent {
    pub name: String,
    /// Polyline; the tangent of each segment follows the vertex order.
    pub vertices: Vec<Vec2>,
    pub start: EndTag,
    pub end: EndTag,
    pub left: Option<usize>,
    pub right: Option<usize>,
    /// Tangential speed `s`, so that `β₁ = s t`.
    pub speed: ScalarField,
    pub alpha: ScalarField,
    pub f: ScalarField,
    pub g: ScalarField,
}

impl CrackComponent {
    pub fn segment_count(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn segment(&self, k: usize) -> (Vec2, Vec2) {
        (self.vertices[k], self.vertices[k + 1])
    }

    pub fn tangent(&self, k: usize) -> Vec2 {
        let (a, b) = self.segment(k);
        (b - a).normalize()
    }

    pub fn length(&self) -> f64 {
        (0..self.segment_count())
            .map(|k| {
                let (a, b) = self.segment(k);
                (b - a).norm()
            })
            .sum()
    }

    pub fn endpoint(&self, e: Endpoint) -> Vec2 {
        match e {
            Endpoint::Start => self.vertices[0],
            Endpoint::End => *self.vertices.last().unwrap(),
        }
    }

    pub fn end_tag(&self, e: Endpoint) -> EndTag {
        match e {
            Endpoint::Start => self.start,
            Endpoint::End => self.end,
        }
    }

    /// Unit tangent at an endpoint pointing out of the crack.
    pub fn end_normal(&self, e: Endpoint) -> Vec2 {
        match e {
            Endpoint::Start => -self.tangent(0),
            Endpoint::End => self.tangent(self.segment_count() - 1),
        }
    }

    /// Segment at the given endpoint.
    pub fn end_segment(&self, e: Endpoint) -> usize {
        match e {
            Endpoint::Start => 0,
            Endpoint::End => self.segment_count() - 1,
        }
    }

    pub fn beta(&self, seg: usize, x: Vec2) -> Vec2 {
        self.tangent(seg) * self.speed.value(x)
    }

    /// Tangential divergence `∇₁·β₁ = t·∇s`.
    pub fn tangential_divergence(&self, seg: usize, x: Vec2) -> f64 {
        self.tangent(seg).dot(&self.speed.gradient(x))
    }

    pub fn neighbor(&self, side: Side) -> Option<usize> {
        match side {
            Side::Left => self.left,
            Side::Right => self.right,
        }
    }

    /// Existing bulk neighbors as `(side, bulk index)`.
    pub fn neighbors(&self) -> impl Iterator<Item = (Side, usize)> + '_ {
        [(Side::Left, self.left), (Side::Right, self.right)]
            .into_iter()
            .filter_map(|(s, b)| b.map(|b| (s, b)))
    }

    /// Exterior normal of the bulk on `side` along segment `seg`.
    pub fn side_normal(&self, seg: usize, side: Side) -> Vec2 {
        let n = left_normal(self.tangent(seg));
        match side {
            Side::Left => -n,
            Side::Right => n,
        }
    }

    /// First segment within `eps` of `x`.
    pub fn locate_segment(&self, x: Vec2, eps: f64) -> Option<usize> {
        (0..self.segment_count()).find(|&k| {
            let (a, b) = self.segment(k);
            point_segment_distance(x, a, b) <= eps
        })
    }
}

#[derive(Debug, Clone)]
pub struct PointComponent {
    pub name: String,
    pub x: Vec2,
    pub alpha: f64,
    pub f: f64,
    /// Incident cracks and which of their endpoints sits here.
    pub incident: Vec<(usize, Endpoint)>,
}

/// A validated fractured domain embedded in an axis-aligned bounding box.
#[derive(Debug, Clone)]
pub struct FracturedDomain {
    pub bbox: [Vec2; 2],
    pub bulks: Vec<BulkComponent>,
    pub cracks: Vec<CrackComponent>,
    pub points: Vec<PointComponent>,
}

impl FracturedDomain {
    /// Build and validate a domain. Bulk regions are decomposed into convex
    /// pieces here.
    pub fn new(
        bbox: [Vec2; 2],
        mut bulks: Vec<BulkComponent>,
        cracks: Vec<CrackComponent>,
        points: Vec<PointComponent>,
    ) -> Result<Self> {
        if !(bbox[1].x > bbox[0].x && bbox[1].y > bbox[0].y) {
            return Err(Error::Geometry("bounding box must have positive extent".into()));
        }
        let eps = 1e-10 * (bbox[1] - bbox[0]).norm();
        for b in &mut bulks {
            b.pieces = ear_clip(&b.vertices, eps);
        }
        let domain = FracturedDomain {
            bbox,
            bulks,
            cracks,
            points,
        };
        domain.validate()?;
        Ok(domain)
    }

    pub fn diameter(&self) -> f64 {
        (self.bbox[1] - self.bbox[0]).norm()
    }

    /// Tolerance for geometric coincidence tests.
    pub fn eps_geom(&self) -> f64 {
        1e-10 * self.diameter()
    }

    /// All components in `(d, i)` order.
    pub fn components(&self) -> Vec<ComponentId> {
        let mut ids = Vec::new();
        ids.extend((0..self.points.len()).map(ComponentId::point));
        ids.extend((0..self.cracks.len()).map(ComponentId::crack));
        ids.extend((0..self.bulks.len()).map(ComponentId::bulk));
        ids
    }

    pub fn contains_component(&self, c: ComponentId) -> bool {
        match c.dim {
            0 => c.index < self.points.len(),
            1 => c.index < self.cracks.len(),
            2 => c.index < self.bulks.len(),
            _ => false,
        }
    }

    pub fn on_outer_boundary(&self, x: Vec2) -> bool {
        let eps = self.eps_geom();
        let [lo, hi] = self.bbox;
        let inside = x.x >= lo.x - eps && x.x <= hi.x + eps && x.y >= lo.y - eps && x.y <= hi.y + eps;
        inside
            && ((x.x - lo.x).abs() <= eps
                || (x.x - hi.x).abs() <= eps
                || (x.y - lo.y).abs() <= eps
                || (x.y - hi.y).abs() <= eps)
    }

    pub fn inside_box(&self, x: Vec2) -> bool {
        let eps = self.eps_geom();
        let [lo, hi] = self.bbox;
        x.x >= lo.x - eps && x.x <= hi.x + eps && x.y >= lo.y - eps && x.y <= hi.y + eps
    }

    fn crack(&self, i: usize) -> Result<&CrackComponent> {
        self.cracks
            .get(i)
            .ok_or_else(|| Error::Adjacency(format!("crack#{i} does not exist")))
    }

    /// Exterior unit normal `ν_{2,j}` of the bulk on `side` of a crack at `x`:
    /// normal to the crack and pointing from that bulk towards the crack.
    pub fn exterior_normal(&self, crack: usize, side: Side, x: Vec2) -> Result<Vec2> {
        let c = self.crack(crack)?;
        let seg = c
            .locate_segment(x, self.eps_geom())
            .ok_or_else(|| Error::Geometry(format!("point {x:?} is not on crack#{crack}")))?;
        if c.neighbor(side).is_none() {
            return Err(Error::Adjacency(format!("crack#{crack} has no bulk on its {side:?} side")));
        }
        Ok(c.side_normal(seg, side))
    }

    /// Exterior unit normal `ν_{1,i}` of a crack at one of its endpoints: the
    /// tangent pointing out of the crack.
    pub fn endpoint_normal(&self, crack: usize, x: Vec2) -> Result<Vec2> {
        let c = self.crack(crack)?;
        let eps = self.eps_geom();
        for e in [Endpoint::Start, Endpoint::End] {
            if (c.endpoint(e) - x).norm() <= eps {
                return Ok(c.end_normal(e));
            }
        }
        Err(Error::Geometry(format!("point {x:?} is not an endpoint of crack#{crack}")))
    }

    /// `ν_{1,i}·β_{1,i}` of an incident crack at a bifurcation point.
    pub fn crack_end_flux(&self, crack: usize, end: Endpoint) -> f64 {
        let c = &self.cracks[crack];
        let x = c.endpoint(end);
        c.end_normal(end).dot(&c.beta(c.end_segment(end), x))
    }

    fn validate(&self) -> Result<()> {
        let eps = self.eps_geom();
        let geo = |m: String| Err(Error::Geometry(m));
        let adj = |m: String| Err(Error::Adjacency(m));

        for (bi, b) in self.bulks.iter().enumerate() {
            let n = b.vertices.len();
            if n < 3 {
                return geo(format!("bulk#{bi}: boundary loop needs at least 3 vertices"));
            }
            if b.edge_tags.len() != n {
                return geo(format!("bulk#{bi}: {n} vertices but {} edge tags", b.edge_tags.len()));
            }
            if b.area() <= eps * eps {
                return geo(format!("bulk#{bi}: boundary loop must be positively oriented"));
            }
            if is_self_intersecting(&b.vertices, eps) {
                return geo(format!("bulk#{bi}: boundary loop self-intersects"));
            }
            if let Some(v) = b.vertices.iter().find(|v| !self.inside_box(**v)) {
                return geo(format!("bulk#{bi}: vertex {v:?} outside the bounding box"));
            }
            let pieces_area: f64 = b.pieces.iter().map(crate::mesh::geom::triangle_area).sum();
            if (pieces_area - b.area()).abs() > 1e-12 * b.area().max(1.0) {
                return geo(format!("bulk#{bi}: convex decomposition failed"));
            }
            for k in 0..n {
                let (p, q) = b.edge(k);
                if (q - p).norm() <= eps {
                    return geo(format!("bulk#{bi}: degenerate edge {k}"));
                }
                match b.edge_tags[k] {
                    EdgeTag::Outer => {
                        let [lo, hi] = self.bbox;
                        let same_side = ((p.x - lo.x).abs() <= eps && (q.x - lo.x).abs() <= eps)
                            || ((p.x - hi.x).abs() <= eps && (q.x - hi.x).abs() <= eps)
                            || ((p.y - lo.y).abs() <= eps && (q.y - lo.y).abs() <= eps)
                            || ((p.y - hi.y).abs() <= eps && (q.y - hi.y).abs() <= eps);
                        if !same_side {
                            return geo(format!("bulk#{bi}: edge {k} tagged outer is not on the bounding box"));
                        }
                    }
                    EdgeTag::Crack(ci) => {
                        let c = self
                            .cracks
                            .get(ci)
                            .ok_or_else(|| Error::Adjacency(format!("bulk#{bi}: edge {k} references missing crack#{ci}")))?;
                        let seg = (0..c.segment_count()).find(|&s| {
                            let (a, bb) = c.segment(s);
                            point_segment_distance(p, a, bb) <= eps && point_segment_distance(q, a, bb) <= eps
                        });
                        let Some(seg) = seg else {
                            return geo(format!("bulk#{bi}: edge {k} does not lie on crack#{ci}"));
                        };
                        // interior is to the left of a counter-clockwise edge
                        let side = if (q - p).dot(&c.tangent(seg)) > 0.0 { Side::Left } else { Side::Right };
                        if c.neighbor(side) != Some(bi) {
                            return adj(format!(
                                "bulk#{bi}: edge {k} lies on the {side:?} side of crack#{ci}, which lists {:?}",
                                c.neighbor(side)
                            ));
                        }
                    }
                }
            }
        }

        for (ci, c) in self.cracks.iter().enumerate() {
            if c.vertices.len() < 2 {
                return geo(format!("crack#{ci}: polyline needs at least 2 vertices"));
            }
            for k in 0..c.segment_count() {
                let (a, b) = c.segment(k);
                if (b - a).norm() <= eps {
                    return geo(format!("crack#{ci}: degenerate segment {k}"));
                }
            }
            if let Some(v) = c.vertices.iter().find(|v| !self.inside_box(**v)) {
                return geo(format!("crack#{ci}: vertex {v:?} outside the bounding box"));
            }
            for (side, bi) in c.neighbors() {
                let b = self
                    .bulks
                    .get(bi)
                    .ok_or_else(|| Error::Adjacency(format!("crack#{ci}: {side:?} neighbor bulk#{bi} does not exist")))?;
                if !b.edge_tags.contains(&EdgeTag::Crack(ci)) {
                    return adj(format!("crack#{ci}: bulk#{bi} has no edge on this crack"));
                }
            }
            if c.left.is_none() || c.right.is_none() {
                let on_boundary = c.vertices.iter().all(|v| self.on_outer_boundary(*v));
                if !on_boundary {
                    return adj(format!("crack#{ci}: missing bulk neighbor on an interior crack"));
                }
            }
            for e in [Endpoint::Start, Endpoint::End] {
                let x = c.endpoint(e);
                match c.end_tag(e) {
                    EndTag::Outer => {
                        if !self.on_outer_boundary(x) {
                            return geo(format!("crack#{ci}: {e:?} tagged outer is not on the bounding box"));
                        }
                    }
                    EndTag::Point(pi) => {
                        let p = self
                            .points
                            .get(pi)
                            .ok_or_else(|| Error::Adjacency(format!("crack#{ci}: {e:?} references missing point#{pi}")))?;
                        if (p.x - x).norm() > eps {
                            return geo(format!("crack#{ci}: {e:?} does not coincide with point#{pi}"));
                        }
                        if !p.incident.contains(&(ci, e)) {
                            return adj(format!("point#{pi} does not list crack#{ci} {e:?}"));
                        }
                    }
                }
            }
        }

        for (pi, p) in self.points.iter().enumerate() {
            if p.incident.len() < 2 {
                return adj(format!("point#{pi}: a bifurcation needs at least 2 incident cracks"));
            }
            if !self.inside_box(p.x) {
                return geo(format!("point#{pi} outside the bounding box"));
            }
            for &(ci, e) in &p.incident {
                let c = self
                    .cracks
                    .get(ci)
                    .ok_or_else(|| Error::Adjacency(format!("point#{pi}: incident crack#{ci} does not exist")))?;
                if c.end_tag(e) != EndTag::Point(pi) {
                    return adj(format!("point#{pi}: crack#{ci} {e:?} is not tagged with this point"));
                }
            }
        }
        Ok(())
    }

    /// Stratification check: every boundary piece of every component maps to a
    /// lower-dimensional component or to ∂Ω. Holds for every validated domain.
    pub fn is_stratified(&self) -> bool {
        let edges_ok = self.bulks.iter().all(|b| {
            b.edge_tags.iter().enumerate().all(|(k, t)| match t {
                EdgeTag::Outer => {
                    let (p, q) = b.edge(k);
                    self.on_outer_boundary(p) && self.on_outer_boundary(q)
                }
                EdgeTag::Crack(c) => *c < self.cracks.len(),
            })
        });
        let ends_ok = self.cracks.iter().all(|c| {
            [Endpoint::Start, Endpoint::End].iter().all(|&e| match c.end_tag(e) {
                EndTag::Outer => self.on_outer_boundary(c.endpoint(e)),
                EndTag::Point(p) => p < self.points.len(),
            })
        });
        edges_ok && ends_ok
    }
}
