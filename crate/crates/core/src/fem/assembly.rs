//! Assembly of `a_h` and `l_h`.
//!
//! At each quadrature point the operator `L_d` is represented as a linear
//! combination of global dofs (`op`), which for cracks and points includes the
//! traces of the neighboring higher-dimensional components. The test function
//! is the component's own basis (`test`). Then
//!
//! ```text
//! A[test_k][op_l] += w φ_k c_l           (L v, w)
//! A[op_k][op_l]   += w τ1 h c_k c_l      (τ1 h L v, L w)
//! ```
//!
//! plus the inflow penalties `|ν·β|₋ J ⊗ J` on interfaces and boundaries and
//! the full-gradient stabilization on the active triangles.

use rayon::prelude::*;

use super::Discretization;
use crate::domain::{ComponentId, EndTag};
use crate::linalg::{compress, CsrMatrix, TripletBuffer};
use crate::mesh::geom::triangle_area;
use crate::{Error, Result, Vec2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormParams {
    /// Least-squares parameter τ1 > 0.
    pub tau1: f64,
    /// Gradient stabilization parameter τ2 ≥ 0.
    pub tau2: f64,
}

impl Default for FormParams {
    fn default() -> Self {
        FormParams { tau1: 1e-2, tau2: 1e-3 }
    }
}

impl FormParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 > 0.0 && self.tau1.is_finite()) {
            return Err(Error::Parameter(format!("tau1 must be positive, got {}", self.tau1)));
        }
        if !(self.tau2 >= 0.0 && self.tau2.is_finite()) {
            return Err(Error::Parameter(format!("tau2 must be nonnegative, got {}", self.tau2)));
        }
        Ok(())
    }

    /// `τ2 h^{3-(n-d)}` for a component of dimension `d` in the plane.
    pub fn stabilization_weight(&self, dim: usize, h: f64) -> f64 {
        match dim {
            2 => self.tau2 * h.powi(3),
            1 => self.tau2 * h.powi(2),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AssembledSystem {
    pub a: CsrMatrix,
    pub b: Vec<f64>,
    /// Dofs whose basis function vanishes on their component, fixed to zero
    /// (only when τ2 = 0).
    pub pinned: Vec<usize>,
}

type Comb = Vec<(usize, f64)>;

/// Local contributions of one component.
struct Local {
    comp: ComponentId,
    t: Vec<(usize, usize, f64)>,
    b: Vec<(usize, f64)>,
}

impl Local {
    fn new(comp: ComponentId) -> Self {
        Local {
            comp,
            t: Vec::new(),
            b: Vec::new(),
        }
    }

    /// `w · test ⊗ op`, `w τ1 h · op ⊗ op` and the matching load terms.
    fn volume(&mut self, w: f64, test: &Comb, op: &Comb, f: f64, gls: f64) {
        for &(i, phi) in test {
            for &(j, c) in op {
                self.t.push((i, j, w * phi * c));
            }
            self.b.push((i, w * f * phi));
        }
        for &(i, ci) in op {
            for &(j, cj) in op {
                self.t.push((i, j, w * gls * ci * cj));
            }
            self.b.push((i, w * gls * f * ci));
        }
    }

    /// `w · J ⊗ J` and `w g J`.
    fn penalty(&mut self, w: f64, jump: &Comb, g: f64) {
        for &(i, a) in jump {
            for &(j, b) in jump {
                self.t.push((i, j, w * a * b));
            }
            if g != 0.0 {
                self.b.push((i, w * g * a));
            }
        }
    }

    fn check(&self, from: (usize, usize), triangle: usize, term: &'static str) -> Result<()> {
        let bad = self.t[from.0..].iter().any(|e| !e.2.is_finite()) || self.b[from.1..].iter().any(|e| !e.1.is_finite());
        if bad {
            Err(Error::Assembly {
                comp: self.comp,
                triangle,
                term,
            })
        } else {
            Ok(())
        }
    }

    fn mark(&self) -> (usize, usize) {
        (self.t.len(), self.b.len())
    }
}

fn stabilization(disc: &Discretization, comp: ComponentId, weight: f64, local: &mut Local) -> Result<()> {
    if weight == 0.0 {
        return Ok(());
    }
    for &t in &disc.active_mesh(comp).triangles {
        let m = local.mark();
        let tri = disc.mesh.tri(t);
        let area = triangle_area(&tri);
        let basis = disc.basis(comp, t, crate::mesh::geom::centroid(&tri))?;
        for &(i, _, gi) in &basis {
            for &(j, _, gj) in &basis {
                local.t.push((i, j, weight * area * gi.dot(&gj)));
            }
        }
        local.check(m, t, "stabilization")?;
    }
    Ok(())
}

fn bulk(disc: &Discretization, bi: usize, p: FormParams) -> Result<Local> {
    let comp = ComponentId::bulk(bi);
    let b = &disc.domain.bulks[bi];
    let am = disc.active_mesh(comp);
    let gls = p.tau1 * disc.h();
    let mut local = Local::new(comp);
    for cell in &am.cells {
        let m = local.mark();
        for q in &cell.quadrature {
            let beta = b.beta.value(q.x);
            let react = b.beta.divergence(q.x) + b.alpha.value(q.x);
            let basis = disc.basis(comp, cell.triangle, q.x)?;
            let test: Comb = basis.iter().map(|&(i, v, _)| (i, v)).collect();
            let op: Comb = basis.iter().map(|&(i, v, g)| (i, beta.dot(&g) + react * v)).collect();
            local.volume(q.weight, &test, &op, b.f.value(q.x), gls);
        }
        local.check(m, cell.triangle, "volume")?;
    }
    for piece in &am.boundary {
        let m = local.mark();
        for q in &piece.quadrature {
            let nb = piece.normal.dot(&b.beta.value(q.x));
            if nb < 0.0 {
                let basis = disc.basis(comp, piece.triangle, q.x)?;
                let jump: Comb = basis.iter().map(|&(i, v, _)| (i, v)).collect();
                local.penalty(q.weight * -nb, &jump, b.g.value(q.x));
            }
        }
        local.check(m, piece.triangle, "boundary")?;
    }
    stabilization(disc, comp, p.stabilization_weight(2, disc.h()), &mut local)?;
    Ok(local)
}

/// Operator coefficients of `L₁` at a crack point: own dofs plus bulk traces.
pub(crate) fn crack_operator(
    disc: &Discretization,
    ci: usize,
    piece: &crate::mesh::InterfacePiece,
    x: Vec2,
) -> Result<(Vec<(usize, f64, Vec2)>, Comb, Vec<(f64, Vec<(usize, f64, Vec2)>)>)> {
    let c = &disc.domain.cracks[ci];
    let comp = ComponentId::crack(ci);
    let basis = disc.basis(comp, piece.triangle, x)?;
    let t = piece.tangent;
    let s = c.speed.value(x);
    let react = t.dot(&c.speed.gradient(x)) + c.alpha.value(x);
    let mut op: Comb = basis.iter().map(|&(i, v, g)| (i, s * t.dot(&g) + react * v)).collect();
    let mut sides = Vec::with_capacity(piece.sides.len());
    for side in &piece.sides {
        let nb = side.normal.dot(&disc.domain.bulks[side.bulk].beta.value(x));
        let sb = disc.basis(ComponentId::bulk(side.bulk), side.triangle, x)?;
        op.extend(sb.iter().map(|&(i, v, _)| (i, -nb * v)));
        sides.push((nb, sb));
    }
    Ok((basis, op, sides))
}

fn crack(disc: &Discretization, ci: usize, p: FormParams) -> Result<Local> {
    let comp = ComponentId::crack(ci);
    let c = &disc.domain.cracks[ci];
    let gls = p.tau1 * disc.h();
    let mut local = Local::new(comp);
    for piece in &disc.interfaces[ci].pieces {
        let m = local.mark();
        for q in &piece.quadrature {
            let (basis, op, sides) = crack_operator(disc, ci, piece, q.x)?;
            let test: Comb = basis.iter().map(|&(i, v, _)| (i, v)).collect();
            local.volume(q.weight, &test, &op, c.f.value(q.x), gls);
            for (nb, sb) in sides {
                if nb < 0.0 {
                    // [v] = bulk trace - crack value
                    let mut jump: Comb = sb.iter().map(|&(i, v, _)| (i, v)).collect();
                    jump.extend(basis.iter().map(|&(i, v, _)| (i, -v)));
                    local.penalty(q.weight * -nb, &jump, 0.0);
                }
            }
        }
        local.check(m, piece.triangle, "interface")?;
    }
    for end in &disc.active_mesh(comp).ends {
        let m = local.mark();
        let nb = end.normal.dot(&c.beta(c.end_segment(end.end), end.x));
        if nb < 0.0 {
            let basis = disc.basis(comp, end.triangle, end.x)?;
            let mut jump: Comb = basis.iter().map(|&(i, v, _)| (i, v)).collect();
            match end.tag {
                EndTag::Outer => local.penalty(-nb, &jump, c.g.value(end.x)),
                EndTag::Point(pi) => {
                    let pd = disc.dofs.components[disc.slot(ComponentId::point(pi))].offset;
                    jump.push((pd, -1.0));
                    local.penalty(-nb, &jump, 0.0);
                }
            }
        }
        local.check(m, end.triangle, "crack end")?;
    }
    stabilization(disc, comp, p.stabilization_weight(1, disc.h()), &mut local)?;
    Ok(local)
}

/// Operator coefficients of `L₀` at a point: own dof plus crack endpoint traces.
pub(crate) fn point_operator(disc: &Discretization, pi: usize) -> Result<Comb> {
    let p = &disc.domain.points[pi];
    let comp = ComponentId::point(pi);
    let mut op: Comb = vec![(disc.dofs.components[disc.slot(comp)].offset, p.alpha)];
    for &(ci, e) in &p.incident {
        let cid = ComponentId::crack(ci);
        let end = disc
            .active_mesh(cid)
            .ends
            .iter()
            .find(|x| x.end == e)
            .ok_or_else(|| Error::Geometry(format!("{cid} has no {e:?} endpoint")))?;
        let nb = disc.domain.crack_end_flux(ci, e);
        let basis = disc.basis(cid, end.triangle, p.x)?;
        op.extend(basis.iter().map(|&(i, v, _)| (i, -nb * v)));
    }
    Ok(op)
}

fn point(disc: &Discretization, pi: usize, p: FormParams) -> Result<Local> {
    let comp = ComponentId::point(pi);
    let pc = &disc.domain.points[pi];
    let mut local = Local::new(comp);
    let op = point_operator(disc, pi)?;
    let test = vec![(disc.dofs.components[disc.slot(comp)].offset, 1.0)];
    local.volume(1.0, &test, &op, pc.f, p.tau1 * disc.h());
    local.check((0, 0), disc.active_mesh(comp).triangles[0], "point")?;
    Ok(local)
}

fn component(disc: &Discretization, comp: ComponentId, p: FormParams) -> Result<Local> {
    match comp.dim {
        2 => bulk(disc, comp.index, p),
        1 => crack(disc, comp.index, p),
        _ => point(disc, comp.index, p),
    }
}

/// Dofs of crack and bulk components whose basis function vanishes on the
/// component itself (mass below `1e-20` of the component's largest).
pub fn null_dofs(disc: &Discretization) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for am in disc.active.iter().filter(|a| a.comp.dim > 0) {
        let cd = &disc.dofs.components[disc.slot(am.comp)];
        let mut mass = vec![0.0; cd.len()];
        for cell in &am.cells {
            for q in &cell.quadrature {
                for (i, v, _) in disc.basis(am.comp, cell.triangle, q.x)? {
                    mass[i - cd.offset] += q.weight * v * v;
                }
            }
        }
        let max = mass.iter().fold(0.0f64, |m, v| m.max(*v));
        out.extend(mass.iter().enumerate().filter(|(_, &m)| m <= 1e-20 * max).map(|(k, _)| cd.offset + k));
    }
    Ok(out)
}

/// Assemble `A u = b`. Component contributions are computed independently
/// (in parallel unless `deterministic`) and merged in component order, so the
/// result does not depend on the thread count.
pub fn assemble(disc: &Discretization, params: FormParams, deterministic: bool) -> Result<AssembledSystem> {
    params.validate()?;
    let comps = disc.domain.components();
    let locals: Vec<Local> = if deterministic {
        comps.iter().map(|&c| component(disc, c, params)).collect::<Result<_>>()?
    } else {
        comps.par_iter().map(|&c| component(disc, c, params)).collect::<Result<_>>()?
    };
    let n = disc.dofs.n;
    let pinned = if params.tau2 == 0.0 { null_dofs(disc)? } else { Vec::new() };
    let mut is_pinned = vec![false; n];
    for &k in &pinned {
        is_pinned[k] = true;
    }
    let mut t = TripletBuffer::new(n);
    let mut b = vec![0.0; n];
    for l in locals {
        t.entries
            .extend(l.t.into_iter().filter(|&(i, j, _)| !is_pinned[i] && !is_pinned[j]));
        for (i, v) in l.b {
            if !is_pinned[i] {
                b[i] += v;
            }
        }
    }
    for &k in &pinned {
        t.push(k, k, 1.0);
    }
    Ok(AssembledSystem {
        a: compress(&t)?,
        b,
        pinned,
    })
}
