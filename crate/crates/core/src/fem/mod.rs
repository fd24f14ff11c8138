//! Direct-sum P1 spaces on the active meshes, assembly of the stabilized
//! forms, and evaluation of discrete solutions.

mod assembly;
mod solution;

use std::ops::Range;

use crate::domain::{ComponentId, FracturedDomain};
use crate::linalg::{norm_inf, solve_lu};
use crate::mesh::geom::barycentric;
use crate::mesh::{
    build_interface_quadrature, extract_all, ActiveMesh, BackgroundMesh, CrackInterface, QuadratureOrder,
};
use crate::{Error, Result, Vec2};

pub use assembly::{assemble, null_dofs, AssembledSystem, FormParams};
pub use solution::SolutionField;

/// Dofs of one component: P1 nodal values on the active vertices, or a
/// single value for a point.
#[derive(Debug, Clone)]
pub struct ComponentDofs {
    pub comp: ComponentId,
    pub offset: usize,
    /// Background vertex ids, ascending (empty for points).
    pub vertices: Vec<usize>,
}

impl ComponentDofs {
    pub fn len(&self) -> usize {
        if self.comp.dim == 0 {
            1
        } else {
            self.vertices.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Global numbering of `V_h = ⊕ V_{h,d,i}`, components in `(d, i)` order.
#[derive(Debug, Clone)]
pub struct DofMap {
    pub components: Vec<ComponentDofs>,
    pub n: usize,
}

impl DofMap {
    pub fn build(mesh: &BackgroundMesh, active: &[ActiveMesh]) -> Self {
        let mut offset = 0;
        let components = active
            .iter()
            .map(|am| {
                let vertices = if am.comp.dim == 0 { Vec::new() } else { am.vertices(mesh) };
                let cd = ComponentDofs {
                    comp: am.comp,
                    offset,
                    vertices,
                };
                offset += cd.len();
                cd
            })
            .collect();
        DofMap { components, n: offset }
    }

    /// Global dof of `vertex` in component slot `slot`.
    pub fn global(&self, slot: usize, vertex: usize) -> Option<usize> {
        let c = &self.components[slot];
        c.vertices.binary_search(&vertex).ok().map(|k| c.offset + k)
    }

    /// Component owning a global dof.
    pub fn owner(&self, dof: usize) -> ComponentId {
        let k = self.components.partition_point(|c| c.offset + c.len() <= dof);
        self.components[k].comp
    }
}

/// P1 basis on a triangle: barycentric values and their constant gradients.
pub fn eval_basis(tri: &[Vec2; 3], x: Vec2) -> Result<([f64; 3], [Vec2; 3])> {
    let l = barycentric(tri, x);
    if l.iter().any(|&v| v < -1e-8) {
        return Err(Error::Geometry(format!("point {x:?} is outside triangle {tri:?}")));
    }
    let det = crate::mesh::geom::orient(tri[0], tri[1], tri[2]);
    let g = |b: Vec2, c: Vec2| Vec2::new(b.y - c.y, c.x - b.x) / det;
    Ok((l, [g(tri[1], tri[2]), g(tri[2], tri[0]), g(tri[0], tri[1])]))
}

/// Everything needed to assemble and evaluate on one background mesh.
#[derive(Debug, Clone)]
pub struct Discretization {
    pub domain: FracturedDomain,
    pub mesh: BackgroundMesh,
    /// Active meshes in `(d, i)` order.
    pub active: Vec<ActiveMesh>,
    pub interfaces: Vec<CrackInterface>,
    pub dofs: DofMap,
}

impl Discretization {
    /// Unit-square background mesh with `nx` cells per side covering the
    /// domain's bounding box.
    pub fn new(domain: FracturedDomain, nx: usize) -> Result<Self> {
        let mesh = BackgroundMesh::structured(domain.bbox, nx)?;
        Self::with_mesh(domain, mesh, QuadratureOrder::default(), true)
    }

    pub fn with_mesh(
        domain: FracturedDomain,
        mesh: BackgroundMesh,
        order: QuadratureOrder,
        parallel: bool,
    ) -> Result<Self> {
        let active = extract_all(&domain, &mesh, order, parallel)?;
        let np = domain.points.len();
        let nc = domain.cracks.len();
        let interfaces = build_interface_quadrature(&domain, &mesh, &active[np..np + nc], &active[np + nc..])?;
        let dofs = DofMap::build(&mesh, &active);
        Ok(Discretization {
            domain,
            mesh,
            active,
            interfaces,
            dofs,
        })
    }

    pub fn h(&self) -> f64 {
        self.mesh.h
    }

    /// Position of a component in the `(d, i)` ordering.
    pub fn slot(&self, comp: ComponentId) -> usize {
        let (np, nc) = (self.domain.points.len(), self.domain.cracks.len());
        match comp.dim {
            0 => comp.index,
            1 => np + comp.index,
            _ => np + nc + comp.index,
        }
    }

    pub fn active_mesh(&self, comp: ComponentId) -> &ActiveMesh {
        &self.active[self.slot(comp)]
    }

    /// `(global dof, value, gradient)` of the three basis functions of
    /// component `comp` on triangle `t` at `x`; a point has one constant basis.
    pub fn basis(&self, comp: ComponentId, t: usize, x: Vec2) -> Result<Vec<(usize, f64, Vec2)>> {
        let slot = self.slot(comp);
        if comp.dim == 0 {
            return Ok(vec![(self.dofs.components[slot].offset, 1.0, Vec2::zeros())]);
        }
        let (vals, grads) = eval_basis(&self.mesh.tri(t), x)?;
        let tri = self.mesh.triangles[t];
        (0..3)
            .map(|k| {
                self.dofs
                    .global(slot, tri[k])
                    .map(|g| (g, vals[k], grads[k]))
                    .ok_or_else(|| Error::Geometry(format!("triangle {t} is not active for {comp}")))
            })
            .collect()
    }

    /// Assemble, solve, and report the algebraic residual.
    pub fn solve(&self, params: FormParams, deterministic: bool) -> Result<Solve<'_>> {
        let sys = assemble(self, params, deterministic)?;
        let x = solve_lu(&sys.a, &sys.b)?;
        let ax = sys.a.matvec(&x)?;
        let r: Vec<f64> = ax.iter().zip(&sys.b).map(|(p, q)| p - q).collect();
        Ok(Solve {
            residual: norm_inf(&r),
            field: SolutionField::new(self, x),
            system: sys,
        })
    }
}

/// A discrete solution together with its linear system.
pub struct Solve<'a> {
    pub field: SolutionField<'a>,
    pub system: AssembledSystem,
    /// `‖A x - b‖∞`.
    pub residual: f64,
}
