//! Evaluation of discrete functions in `V_h`.

use super::assembly::{crack_operator, point_operator};
use super::Discretization;
use crate::domain::{ComponentFunction, ComponentId};
use crate::mesh::{locate_point, InterfacePiece};
use crate::{Error, Result, Vec2};

/// Coefficient vector over a discretization.
#[derive(Debug, Clone)]
pub struct SolutionField<'a> {
    pub disc: &'a Discretization,
    pub coeffs: Vec<f64>,
}

impl<'a> SolutionField<'a> {
    pub fn new(disc: &'a Discretization, coeffs: Vec<f64>) -> Self {
        assert_eq!(coeffs.len(), disc.dofs.n, "coefficient vector length");
        SolutionField { disc, coeffs }
    }

    /// Nodal interpolant of a componentwise function.
    pub fn interpolate(disc: &'a Discretization, f: &dyn ComponentFunction) -> Self {
        let mut coeffs = vec![0.0; disc.dofs.n];
        for cd in &disc.dofs.components {
            if cd.comp.dim == 0 {
                coeffs[cd.offset] = f.value(cd.comp, disc.domain.points[cd.comp.index].x);
            } else {
                for (k, &v) in cd.vertices.iter().enumerate() {
                    coeffs[cd.offset + k] = f.value(cd.comp, disc.mesh.vertices[v]);
                }
            }
        }
        SolutionField { disc, coeffs }
    }

    fn combine(&self, basis: &[(usize, f64, Vec2)]) -> (f64, Vec2) {
        basis.iter().fold((0.0, Vec2::zeros()), |(v, g), &(i, b, gb)| {
            (v + self.coeffs[i] * b, g + gb * self.coeffs[i])
        })
    }

    /// Value and gradient of component `comp` restricted to triangle `t`.
    pub fn eval_in(&self, comp: ComponentId, t: usize, x: Vec2) -> Result<(f64, Vec2)> {
        Ok(self.combine(&self.disc.basis(comp, t, x)?))
    }

    /// Value on `comp` at `x`. A side hint `ν` (the component's exterior
    /// normal there) selects the one-sided trace.
    pub fn eval_fe(&self, comp: ComponentId, x: Vec2, side_hint: Option<Vec2>) -> Result<f64> {
        if comp.dim == 0 {
            return Ok(self.coeffs[self.disc.dofs.components[self.disc.slot(comp)].offset]);
        }
        let t = locate_point(&self.disc.mesh, self.disc.active_mesh(comp), x, side_hint)?;
        Ok(self.eval_in(comp, t, x)?.0)
    }

    pub fn point_value(&self, pi: usize) -> f64 {
        self.coeffs[self.disc.dofs.components[self.disc.slot(ComponentId::point(pi))].offset]
    }

    /// Trace of a crack at one of its endpoints.
    pub fn crack_end_value(&self, ci: usize, end: crate::domain::Endpoint) -> Result<f64> {
        let cid = ComponentId::crack(ci);
        let e = self
            .disc
            .active_mesh(cid)
            .ends
            .iter()
            .find(|x| x.end == end)
            .ok_or_else(|| Error::Geometry(format!("{cid} has no {end:?} endpoint")))?;
        Ok(self.eval_in(cid, e.triangle, e.x)?.0)
    }

    fn apply(&self, op: &[(usize, f64)]) -> f64 {
        op.iter().map(|&(i, c)| c * self.coeffs[i]).sum()
    }

    /// `L₂ v` in triangle `t` of bulk `bi`.
    pub fn l_bulk(&self, bi: usize, t: usize, x: Vec2) -> Result<f64> {
        let b = &self.disc.domain.bulks[bi];
        let (v, g) = self.eval_in(ComponentId::bulk(bi), t, x)?;
        Ok(b.beta.value(x).dot(&g) + (b.beta.divergence(x) + b.alpha.value(x)) * v)
    }

    /// `L₁ v` at a point of an interface piece, with one-sided bulk traces.
    pub fn l_crack(&self, ci: usize, piece: &InterfacePiece, x: Vec2) -> Result<f64> {
        let (_, op, _) = crack_operator(self.disc, ci, piece, x)?;
        Ok(self.apply(&op))
    }

    /// `L₀ v` at a point component.
    pub fn l_point(&self, pi: usize) -> Result<f64> {
        Ok(self.apply(&point_operator(self.disc, pi)?))
    }

    /// `L_d v` at `x` on `comp`, locating hosts as needed.
    pub fn residual_l(&self, comp: ComponentId, x: Vec2) -> Result<f64> {
        match comp.dim {
            2 => {
                let t = locate_point(&self.disc.mesh, self.disc.active_mesh(comp), x, None)?;
                self.l_bulk(comp.index, t, x)
            }
            1 => {
                let eps = self.disc.domain.eps_geom();
                let piece = self.disc.interfaces[comp.index]
                    .pieces
                    .iter()
                    .find(|p| {
                        let cell = &self.disc.active_mesh(comp).cells[p.cell];
                        match cell.shape {
                            crate::mesh::CutShape::Segment { a, b, .. } => {
                                crate::mesh::geom::point_segment_distance(x, a, b) <= eps
                            }
                            _ => false,
                        }
                    })
                    .ok_or_else(|| Error::Geometry(format!("point {x:?} is not on {comp}")))?;
                self.l_crack(comp.index, piece, x)
            }
            _ => self.l_point(comp.index),
        }
    }
}
