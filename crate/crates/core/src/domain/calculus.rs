//! Mixed-dimensional calculus on a fractured domain: jump operators, the
//! directional derivative `D_β`, the divergence `Div β`, and a quadrature check
//! of the partial integration identity on the exact geometry.

use super::{ComponentId, EdgeTag, EndTag, Endpoint, FracturedDomain};
use crate::mesh::quadrature::{segment_rule, triangle_rule, TriangleRule};
use crate::{Error, Result, Vec2};

/// A function given componentwise on a fractured domain, evaluable together
/// with its (extended) gradient at any point of a component's closure.
pub trait ComponentFunction: Sync {
    fn value(&self, comp: ComponentId, x: Vec2) -> f64;
    fn gradient(&self, comp: ComponentId, x: Vec2) -> Vec2;
}

type ValueFn = dyn Fn(ComponentId, Vec2) -> f64 + Send + Sync;
type GradFn = dyn Fn(ComponentId, Vec2) -> Vec2 + Send + Sync;

/// Closed-form componentwise function.
pub struct Analytic {
    value: Box<ValueFn>,
    gradient: Box<GradFn>,
}

impl Analytic {
    pub fn new(
        value: impl Fn(ComponentId, Vec2) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(ComponentId, Vec2) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        Analytic {
            value: Box::new(value),
            gradient: Box::new(gradient),
        }
    }

    /// The same formula on every component.
    pub fn uniform(
        value: impl Fn(Vec2) -> f64 + Send + Sync + 'static,
        gradient: impl Fn(Vec2) -> Vec2 + Send + Sync + 'static,
    ) -> Self {
        Analytic::new(move |_, x| value(x), move |_, x| gradient(x))
    }

    pub fn zero() -> Self {
        Analytic::uniform(|_| 0.0, |_| Vec2::zeros())
    }
}

impl ComponentFunction for Analytic {
    fn value(&self, comp: ComponentId, x: Vec2) -> f64 {
        (self.value)(comp, x)
    }
    fn gradient(&self, comp: ComponentId, x: Vec2) -> Vec2 {
        (self.gradient)(comp, x)
    }
}

/// `⟦·⟧_d`: sum of the one-sided traces from the incident (d+1)-components.
/// An empty list (d = n) gives 0.
pub fn codim_jump(traces: &[f64]) -> f64 {
    traces.iter().sum()
}

/// `[v]_d = v_d|_{∂Ω_d} - v_{d-1}`, with `[v]_0 = 0`.
pub fn interface_jump(dim: usize, trace: f64, lower: f64) -> f64 {
    if dim == 0 {
        0.0
    } else {
        trace - lower
    }
}

fn finite(comp: ComponentId, what: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Field {
            comp,
            msg: format!("{what} is not finite"),
        })
    }
}

fn crack_segment(domain: &FracturedDomain, i: usize, x: Vec2) -> Result<usize> {
    domain.cracks[i]
        .locate_segment(x, domain.eps_geom())
        .ok_or_else(|| Error::Geometry(format!("point {x:?} is not on crack#{i}")))
}

fn check_comp(domain: &FracturedDomain, comp: ComponentId) -> Result<()> {
    if domain.contains_component(comp) {
        Ok(())
    } else {
        Err(Error::Adjacency(format!("{comp} does not exist")))
    }
}

/// `(Div β)_d = ∇_d·β_d - ⟦ν_{d+1}·β_{d+1}⟧_d`.
pub fn div_beta(domain: &FracturedDomain, comp: ComponentId, x: Vec2) -> Result<f64> {
    check_comp(domain, comp)?;
    match comp.dim {
        2 => finite(comp, "div β", domain.bulks[comp.index].beta.divergence(x)),
        1 => {
            let c = &domain.cracks[comp.index];
            let seg = crack_segment(domain, comp.index, x)?;
            let mut fluxes = Vec::with_capacity(2);
            for (side, b) in c.neighbors() {
                let nb = c.side_normal(seg, side).dot(&domain.bulks[b].beta.value(x));
                fluxes.push(finite(super::ComponentId::bulk(b), "β", nb)?);
            }
            finite(comp, "div β", c.tangential_divergence(seg, x) - codim_jump(&fluxes))
        }
        _ => {
            let p = &domain.points[comp.index];
            let fluxes: Vec<f64> = p
                .incident
                .iter()
                .map(|&(ci, e)| domain.crack_end_flux(ci, e))
                .collect();
            finite(comp, "div β", -codim_jump(&fluxes))
        }
    }
}

/// `γ = α + Div β`.
pub fn gamma(domain: &FracturedDomain, comp: ComponentId, x: Vec2) -> Result<f64> {
    let alpha = match comp.dim {
        2 => domain.bulks.get(comp.index).map(|b| b.alpha.value(x)),
        1 => domain.cracks.get(comp.index).map(|c| c.alpha.value(x)),
        _ => domain.points.get(comp.index).map(|p| p.alpha),
    };
    let alpha = alpha.ok_or_else(|| Error::Adjacency(format!("{comp} does not exist")))?;
    Ok(alpha + div_beta(domain, comp, x)?)
}

/// `(D_β v)_d = β_d·∇_d v_d + Σ ν_{d+1}·β_{d+1} (v_d - v_{d+1})`.
pub fn d_beta_analytic(
    domain: &FracturedDomain,
    v: &dyn ComponentFunction,
    comp: ComponentId,
    x: Vec2,
) -> Result<f64> {
    check_comp(domain, comp)?;
    match comp.dim {
        2 => {
            let b = &domain.bulks[comp.index];
            finite(comp, "D_β v", b.beta.value(x).dot(&v.gradient(comp, x)))
        }
        1 => {
            let c = &domain.cracks[comp.index];
            let seg = crack_segment(domain, comp.index, x)?;
            let own = finite(comp, "v", v.value(comp, x))?;
            let mut s = c.beta(seg, x).dot(&v.gradient(comp, x));
            for (side, b) in c.neighbors() {
                let bid = ComponentId::bulk(b);
                let trace = finite(bid, "trace of v", v.value(bid, x))?;
                let nb = c.side_normal(seg, side).dot(&domain.bulks[b].beta.value(x));
                s += nb * (own - trace);
            }
            finite(comp, "D_β v", s)
        }
        _ => {
            let p = &domain.points[comp.index];
            let own = finite(comp, "v", v.value(comp, p.x))?;
            let mut s = 0.0;
            for &(ci, e) in &p.incident {
                let cid = ComponentId::crack(ci);
                let trace = finite(cid, "trace of v", v.value(cid, p.x))?;
                s += domain.crack_end_flux(ci, e) * (own - trace);
            }
            finite(comp, "D_β v", s)
        }
    }
}

/// Absolute residual of the partial integration identity
///
/// `(D_β v, w) + (v, D_β w) + ((Div β) v, w) - (ν·β [v], [w])_I - (ν·β v, w)_B`
///
/// evaluated with `order`-point Gauss rules on the exact component geometry.
pub fn verify_partial_integration(
    domain: &FracturedDomain,
    v: &dyn ComponentFunction,
    w: &dyn ComponentFunction,
    order: usize,
) -> Result<f64> {
    let order = order.max(1);
    let mut total = 0.0;
    let volume = |comp: ComponentId, x: Vec2| -> Result<f64> {
        let dv = d_beta_analytic(domain, v, comp, x)?;
        let dw = d_beta_analytic(domain, w, comp, x)?;
        let vv = v.value(comp, x);
        let ww = w.value(comp, x);
        Ok(dv * ww + vv * dw + div_beta(domain, comp, x)? * vv * ww)
    };

    for (bi, b) in domain.bulks.iter().enumerate() {
        let comp = ComponentId::bulk(bi);
        for piece in &b.pieces {
            for q in triangle_rule(piece, TriangleRule::Collapsed(order)) {
                total += q.weight * volume(comp, q.x)?;
            }
        }
        for k in 0..b.vertices.len() {
            let (p0, p1) = b.edge(k);
            let nu = b.edge_normal(k);
            for q in segment_rule(p0, p1, order) {
                let nb = nu.dot(&b.beta.value(q.x));
                let (jv, jw) = match b.edge_tags[k] {
                    EdgeTag::Outer => (v.value(comp, q.x), w.value(comp, q.x)),
                    EdgeTag::Crack(ci) => {
                        let cid = ComponentId::crack(ci);
                        (
                            interface_jump(2, v.value(comp, q.x), v.value(cid, q.x)),
                            interface_jump(2, w.value(comp, q.x), w.value(cid, q.x)),
                        )
                    }
                };
                total -= q.weight * nb * jv * jw;
            }
        }
    }

    for (ci, c) in domain.cracks.iter().enumerate() {
        let comp = ComponentId::crack(ci);
        for k in 0..c.segment_count() {
            let (p0, p1) = c.segment(k);
            for q in segment_rule(p0, p1, order) {
                total += q.weight * volume(comp, q.x)?;
            }
        }
        for e in [Endpoint::Start, Endpoint::End] {
            let x = c.endpoint(e);
            let nb = c.end_normal(e).dot(&c.beta(c.end_segment(e), x));
            let (jv, jw) = match c.end_tag(e) {
                EndTag::Outer => (v.value(comp, x), w.value(comp, x)),
                EndTag::Point(pi) => {
                    let pid = ComponentId::point(pi);
                    (
                        interface_jump(1, v.value(comp, x), v.value(pid, x)),
                        interface_jump(1, w.value(comp, x), w.value(pid, x)),
                    )
                }
            };
            total -= nb * jv * jw;
        }
    }

    for (pi, p) in domain.points.iter().enumerate() {
        total += volume(ComponentId::point(pi), p.x)?;
    }

    Ok(total.abs())
}

/// Minimum of `2α + Div β` over sample points on all components. Purely a
/// diagnostic; negative values do not stop a solve.
pub fn coercivity_indicator(domain: &FracturedDomain, density: usize) -> f64 {
    let n = density.max(1);
    let mut min = f64::INFINITY;
    let mut sample = |comp: ComponentId, x: Vec2| {
        if let Ok(g) = gamma(domain, comp, x) {
            if let Ok(div) = div_beta(domain, comp, x) {
                // 2α + Div β = 2γ - Div β
                min = min.min(2.0 * g - div);
            }
        }
    };
    for (bi, b) in domain.bulks.iter().enumerate() {
        for t in &b.pieces {
            for i in 0..=n {
                for j in 0..=(n - i) {
                    let (l1, l2) = (i as f64 / n as f64, j as f64 / n as f64);
                    sample(ComponentId::bulk(bi), t[0] + (t[1] - t[0]) * l1 + (t[2] - t[0]) * l2);
                }
            }
        }
    }
    for (ci, c) in domain.cracks.iter().enumerate() {
        for k in 0..c.segment_count() {
            let (a, b) = c.segment(k);
            for i in 0..=n {
                sample(ComponentId::crack(ci), a + (b - a) * (i as f64 / n as f64));
            }
        }
    }
    for (pi, p) in domain.points.iter().enumerate() {
        sample(ComponentId::point(pi), p.x);
    }
    if min.is_finite() {
        min
    } else {
        0.0
    }
}
