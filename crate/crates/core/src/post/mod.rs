//! Error norms, convergence rates, bifurcation balance, the discrete
//! coercivity identity, and export.

mod export;

use crate::domain::{d_beta_analytic, div_beta, gamma, ComponentFunction, ComponentId, EndTag, Endpoint};
use crate::fem::{FormParams, SolutionField};
use crate::mesh::quadrature::{triangle_rule, TriangleRule};
use crate::mesh::{CutShape, InterfacePiece, QuadratureOrder};
use crate::{Error, Result, Vec2};

pub use export::{export_csv, export_solution_csv, export_vtk, read_csv};

/// Quadrature used for norms, finer than the assembly rules.
pub const NORM_ORDER: QuadratureOrder = QuadratureOrder {
    segment: 5,
    triangle: TriangleRule::Collapsed(4),
};

/// `v_h - u` (or `v_h` alone) with value, gradient and `L` evaluation.
struct Diff<'a, 'b> {
    uh: &'a SolutionField<'b>,
    exact: Option<&'a dyn ComponentFunction>,
}

impl Diff<'_, '_> {
    fn exact_l(&self, comp: ComponentId, x: Vec2) -> Result<f64> {
        match self.exact {
            Some(u) => {
                let d = &self.uh.disc.domain;
                Ok(d_beta_analytic(d, u, comp, x)? + gamma(d, comp, x)? * u.value(comp, x))
            }
            None => Ok(0.0),
        }
    }

    fn exact_value(&self, comp: ComponentId, x: Vec2) -> f64 {
        self.exact.map_or(0.0, |u| u.value(comp, x))
    }

    fn exact_gradient(&self, comp: ComponentId, x: Vec2) -> Vec2 {
        self.exact.map_or(Vec2::zeros(), |u| u.gradient(comp, x))
    }

    fn value(&self, comp: ComponentId, t: usize, x: Vec2) -> Result<(f64, Vec2)> {
        let (v, g) = self.uh.eval_in(comp, t, x)?;
        Ok((v - self.exact_value(comp, x), g - self.exact_gradient(comp, x)))
    }

    fn bulk_l(&self, bi: usize, t: usize, x: Vec2) -> Result<f64> {
        Ok(self.uh.l_bulk(bi, t, x)? - self.exact_l(ComponentId::bulk(bi), x)?)
    }

    fn crack_l(&self, ci: usize, piece: &InterfacePiece, x: Vec2) -> Result<f64> {
        Ok(self.uh.l_crack(ci, piece, x)? - self.exact_l(ComponentId::crack(ci), x)?)
    }

    fn point(&self, pi: usize) -> Result<(f64, f64)> {
        let comp = ComponentId::point(pi);
        let x = self.uh.disc.domain.points[pi].x;
        Ok((
            self.uh.point_value(pi) - self.exact_value(comp, x),
            self.uh.l_point(pi)? - self.exact_l(comp, x)?,
        ))
    }
}

/// Integrals of one component entering the energy norm and the coercivity
/// identity. Jump and boundary terms use the full weight `|ν·β|`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Parts {
    /// `‖e‖²`
    mass: f64,
    /// `((α + ½ Div β) e, e)`
    reaction: f64,
    /// `‖L e‖²`
    residual: f64,
    /// `s_h(e, e)`
    stabilization: f64,
    /// `‖[e]‖²_{|ν·β|}` on interfaces integrated on this component
    interface: f64,
    /// `‖e‖²_{|ν·β|}` on the outer boundary
    boundary: f64,
}

fn parts(diff: &Diff, comp: ComponentId, params: FormParams) -> Result<Parts> {
    let disc = diff.uh.disc;
    let d = &disc.domain;
    let am = disc.active_mesh(comp);
    let mut p = Parts::default();
    match comp.dim {
        2 => {
            let b = &d.bulks[comp.index];
            for cell in &am.cells {
                for q in cell.shape.quadrature(NORM_ORDER) {
                    let (e, _) = diff.value(comp, cell.triangle, q.x)?;
                    let le = diff.bulk_l(comp.index, cell.triangle, q.x)?;
                    let r = b.alpha.value(q.x) + 0.5 * b.beta.divergence(q.x);
                    p.mass += q.weight * e * e;
                    p.reaction += q.weight * r * e * e;
                    p.residual += q.weight * le * le;
                }
            }
            for piece in &am.boundary {
                for q in crate::mesh::quadrature::segment_rule(piece.a, piece.b, NORM_ORDER.segment) {
                    let (e, _) = diff.value(comp, piece.triangle, q.x)?;
                    p.boundary += q.weight * piece.normal.dot(&b.beta.value(q.x)).abs() * e * e;
                }
            }
        }
        1 => {
            let c = &d.cracks[comp.index];
            for piece in &disc.interfaces[comp.index].pieces {
                let CutShape::Segment { a, b, .. } = am.cells[piece.cell].shape else {
                    return Err(Error::Geometry(format!("{comp}: cut entity is not a segment")));
                };
                for q in crate::mesh::quadrature::segment_rule(a, b, NORM_ORDER.segment) {
                    let (e, _) = diff.value(comp, piece.triangle, q.x)?;
                    let le = diff.crack_l(comp.index, piece, q.x)?;
                    let r = c.alpha.value(q.x) + 0.5 * div_beta(d, comp, q.x)?;
                    p.mass += q.weight * e * e;
                    p.reaction += q.weight * r * e * e;
                    p.residual += q.weight * le * le;
                    for s in &piece.sides {
                        let bid = ComponentId::bulk(s.bulk);
                        let (eb, _) = diff.value(bid, s.triangle, q.x)?;
                        let nb = s.normal.dot(&d.bulks[s.bulk].beta.value(q.x));
                        p.interface += q.weight * nb.abs() * (eb - e).powi(2);
                    }
                }
            }
            for end in &am.ends {
                let (e, _) = diff.value(comp, end.triangle, end.x)?;
                let nb = end.normal.dot(&c.beta(c.end_segment(end.end), end.x)).abs();
                match end.tag {
                    EndTag::Outer => p.boundary += nb * e * e,
                    EndTag::Point(pi) => {
                        let (e0, _) = diff.point(pi)?;
                        p.interface += nb * (e - e0).powi(2);
                    }
                }
            }
        }
        _ => {
            let pc = &d.points[comp.index];
            let (e, le) = diff.point(comp.index)?;
            let r = pc.alpha + 0.5 * div_beta(d, comp, pc.x)?;
            p.mass = e * e;
            p.reaction = r * e * e;
            p.residual = le * le;
        }
    }
    let sw = params.stabilization_weight(comp.dim, disc.h());
    if sw > 0.0 {
        for &t in &am.triangles {
            for q in triangle_rule(&disc.mesh.tri(t), NORM_ORDER.triangle) {
                let (_, g) = diff.value(comp, t, q.x)?;
                p.stabilization += sw * q.weight * g.norm_squared();
            }
        }
    }
    Ok(p)
}

/// `‖u_h - u‖_{Ω_{d,i}}`; for a point the absolute difference.
pub fn l2_error(uh: &SolutionField, exact: &dyn ComponentFunction, comp: ComponentId) -> Result<f64> {
    let am = uh.disc.active_mesh(comp);
    let mut s = 0.0;
    for cell in &am.cells {
        for q in cell.shape.quadrature(NORM_ORDER) {
            let (v, _) = uh.eval_in(comp, cell.triangle, q.x)?;
            s += q.weight * (v - exact.value(comp, q.x)).powi(2);
        }
    }
    Ok(s.sqrt())
}

/// `max |u_h - u|` over the component geometry, sampled at the norm quadrature
/// points and the vertices of every cut entity.
pub fn linf_error(uh: &SolutionField, exact: &dyn ComponentFunction) -> Result<f64> {
    let mut m = 0.0f64;
    for am in &uh.disc.active {
        let comp = am.comp;
        for cell in &am.cells {
            let corners: Vec<Vec2> = match &cell.shape {
                CutShape::Polygon(p) => p.clone(),
                CutShape::Segment { a, b, .. } => vec![*a, *b],
                CutShape::Point(x) => vec![*x],
            };
            let quad = cell.shape.quadrature(NORM_ORDER).into_iter().map(|q| q.x);
            for x in corners.into_iter().chain(quad) {
                let v = if comp.dim == 0 {
                    uh.point_value(comp.index)
                } else {
                    uh.eval_in(comp, cell.triangle, x)?.0
                };
                m = m.max((v - exact.value(comp, x)).abs());
            }
        }
    }
    Ok(m)
}

/// Error of one component in the energy norm, split into its terms.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct ComponentError {
    pub comp: ComponentId,
    pub l2: f64,
    /// `‖e‖²`
    pub mass: f64,
    /// `h ‖L e‖²`
    pub residual: f64,
    /// `s_h(e, e)`
    pub stabilization: f64,
    /// `‖[e]‖²_{|ν·β|}` on the interfaces integrated over this component
    pub interface: f64,
    /// `‖e‖²_{|ν·β|}` on the outer boundary
    pub boundary: f64,
}

impl ComponentError {
    pub fn energy_squared(&self) -> f64 {
        self.mass + self.residual + self.stabilization + self.interface + self.boundary
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ErrorReport {
    pub components: Vec<ComponentError>,
    pub h: f64,
    pub dofs: usize,
    /// `‖e‖_𝒪`
    pub l2: f64,
    /// `|||e|||_h`
    pub energy: f64,
    /// `max |e|` on the component geometry
    pub linf: f64,
    /// `max |e|` over all dofs, including those without support on the
    /// component
    pub max_nodal: f64,
}

/// Energy-norm error `|||u_h - u|||_h` with its parts. The stabilization term
/// uses the closed-form extension of `u` to the active triangles.
pub fn energy_error(uh: &SolutionField, exact: &dyn ComponentFunction, params: FormParams) -> Result<ErrorReport> {
    let disc = uh.disc;
    let diff = Diff {
        uh,
        exact: Some(exact),
    };
    let h = disc.h();
    let mut components = Vec::new();
    for comp in disc.domain.components() {
        let p = parts(&diff, comp, params)?;
        components.push(ComponentError {
            comp,
            l2: l2_error(uh, exact, comp)?,
            mass: p.mass,
            residual: h * p.residual,
            stabilization: p.stabilization,
            interface: p.interface,
            boundary: p.boundary,
        });
    }
    let l2 = components.iter().map(|c| c.l2 * c.l2).sum::<f64>().sqrt();
    let energy = components.iter().map(ComponentError::energy_squared).sum::<f64>().sqrt();
    Ok(ErrorReport {
        components,
        h,
        dofs: disc.dofs.n,
        l2,
        energy,
        linf: linf_error(uh, exact)?,
        max_nodal: max_nodal_error(uh, exact),
    })
}

/// `max |u_h - u|` over all dofs, evaluated at the nodes.
pub fn max_nodal_error(uh: &SolutionField, exact: &dyn ComponentFunction) -> f64 {
    let disc = uh.disc;
    let mut m = 0.0f64;
    for cd in &disc.dofs.components {
        if cd.comp.dim == 0 {
            let x = disc.domain.points[cd.comp.index].x;
            m = m.max((uh.coeffs[cd.offset] - exact.value(cd.comp, x)).abs());
        } else {
            for (k, &v) in cd.vertices.iter().enumerate() {
                m = m.max((uh.coeffs[cd.offset + k] - exact.value(cd.comp, disc.mesh.vertices[v])).abs());
            }
        }
    }
    m
}

/// Terms of the discrete coercivity identity
///
/// `a_h(v,v) = ((α + ½ Div β) v, v) + ½‖[v]‖²_{|ν·β|,I} + ½‖v‖²_{|ν·β|,B} + τ1 h ‖L v‖² + s_h(v,v)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CoercivityTerms {
    pub reaction: f64,
    pub interface: f64,
    pub boundary: f64,
    pub least_squares: f64,
    pub stabilization: f64,
}

impl CoercivityTerms {
    pub fn total(&self) -> f64 {
        self.reaction + self.interface + self.boundary + self.least_squares + self.stabilization
    }

    /// Sum of absolute values, the natural scale of the identity.
    pub fn scale(&self) -> f64 {
        self.reaction.abs() + self.interface + self.boundary + self.least_squares + self.stabilization
    }
}

/// Right-hand side of the coercivity identity for the discrete function `v`,
/// computed by quadrature independently of the assembled matrix.
pub fn coercivity_terms(v: &SolutionField, params: FormParams) -> Result<CoercivityTerms> {
    let diff = Diff { uh: v, exact: None };
    let mut t = CoercivityTerms::default();
    for comp in v.disc.domain.components() {
        let p = parts(&diff, comp, params)?;
        t.reaction += p.reaction;
        t.interface += 0.5 * p.interface;
        t.boundary += 0.5 * p.boundary;
        t.least_squares += params.tau1 * v.disc.h() * p.residual;
        t.stabilization += p.stabilization;
    }
    Ok(t)
}

/// Least-squares slope of `log e` against `log h`, plus the rate between
/// each consecutive pair of levels.
#[derive(Debug, Clone, PartialEq)]
pub struct Rates {
    pub slope: Option<f64>,
    /// `None` where an error is not positive.
    pub pairwise: Vec<Option<f64>>,
}

pub fn convergence_rates(levels: &[(f64, f64)]) -> Result<Rates> {
    if levels.len() < 3 {
        return Err(Error::Parameter(format!(
            "a convergence study needs at least 3 levels, got {}",
            levels.len()
        )));
    }
    if levels.windows(2).any(|w| !(w[1].0 < w[0].0)) || levels.iter().any(|l| !(l.0 > 0.0)) {
        return Err(Error::Parameter("mesh sizes must be positive and strictly decreasing".into()));
    }
    let pairwise = levels
        .windows(2)
        .map(|w| {
            if w[0].1 > 0.0 && w[1].1 > 0.0 {
                Some((w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
            } else {
                None
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = levels
        .iter()
        .filter(|l| l.1 > 0.0)
        .map(|l| (l.0.ln(), l.1.ln()))
        .collect();
    let slope = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        Some(sxy / sxx)
    } else {
        None
    };
    Ok(Rates { slope, pairwise })
}

/// `|Σ νᵢ·βᵢ uᵢ - α₀ u₀ + f₀|` from given fluxes and traces.
pub fn balance_residual(fluxes: &[f64], traces: &[f64], alpha: f64, u0: f64, f: f64) -> f64 {
    let s: f64 = fluxes.iter().zip(traces).map(|(a, b)| a * b).sum();
    (s - alpha * u0 + f).abs()
}

/// Residual of the point equation at bifurcation `pi`, from the one-sided
/// crack endpoint traces of the discrete solution.
pub fn point_balance(uh: &SolutionField, pi: usize) -> Result<f64> {
    let d = &uh.disc.domain;
    let p = &d.points[pi];
    let mut fluxes = Vec::with_capacity(p.incident.len());
    let mut traces = Vec::with_capacity(p.incident.len());
    for &(ci, e) in &p.incident {
        fluxes.push(d.crack_end_flux(ci, e));
        traces.push(uh.crack_end_value(ci, e)?);
    }
    Ok(balance_residual(&fluxes, &traces, p.alpha, uh.point_value(pi), p.f))
}

/// Endpoint traces `(crack, end, ν·β, value)` of the cracks at a point.
pub fn point_traces(uh: &SolutionField, pi: usize) -> Result<Vec<(usize, Endpoint, f64, f64)>> {
    let d = &uh.disc.domain;
    d.points[pi]
        .incident
        .iter()
        .map(|&(ci, e)| Ok((ci, e, d.crack_end_flux(ci, e), uh.crack_end_value(ci, e)?)))
        .collect()
}
