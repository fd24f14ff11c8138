//! Randomized geometry properties shared by the property tests and the
//! acceptance harness. Each check returns `Err(message)` on violation.

#![allow(dead_code)]

use cutfrac::mesh::geom::{barycentric, clip_polygon_triangle, clip_segment_interval, signed_area, triangle_area};
use cutfrac::mesh::quadrature::{gauss_legendre, polygon_rule, segment_rule, triangle_rule, TriangleRule};
use cutfrac::mesh::BackgroundMesh;
use cutfrac::{vec2, Vec2};
use proptest::prelude::*;

pub const EPS: f64 = 1e-12;

/// Convex polygon from angles on an ellipse inside the unit square.
pub fn convex_polygon() -> impl Strategy<Value = Vec<Vec2>> {
    (
        prop::collection::vec(0.0..std::f64::consts::TAU, 3..9),
        0.2..0.8f64,
        0.2..0.8f64,
        0.05..0.2f64,
        0.05..0.2f64,
    )
        .prop_filter_map("degenerate polygon", |(mut angles, cx, cy, rx, ry)| {
            angles.sort_by(f64::total_cmp);
            angles.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            let poly: Vec<Vec2> = angles.iter().map(|t| vec2(cx + rx * t.cos(), cy + ry * t.sin())).collect();
            (poly.len() >= 3 && signed_area(&poly) > 1e-4).then_some(poly)
        })
}

/// Counter-clockwise triangle with area bounded away from zero.
pub fn triangle() -> impl Strategy<Value = [Vec2; 3]> {
    prop::array::uniform6(0.0..1.0f64).prop_filter_map("thin triangle", |c| {
        let mut t = [vec2(c[0], c[1]), vec2(c[2], c[3]), vec2(c[4], c[5])];
        let a = signed_area(&t);
        if a.abs() < 1e-3 {
            return None;
        }
        if a < 0.0 {
            t.swap(1, 2);
        }
        Some(t)
    })
}

pub fn segment() -> impl Strategy<Value = (Vec2, Vec2)> {
    prop::array::uniform4(0.0..1.0f64).prop_filter_map("short segment", |c| {
        let (p, q) = (vec2(c[0], c[1]), vec2(c[2], c[3]));
        ((q - p).norm() > 1e-3).then_some((p, q))
    })
}

pub fn geometry_case() -> impl Strategy<Value = GeometryCase> {
    (convex_polygon(), triangle(), segment(), 2usize..13, 0usize..4, prop::array::uniform3(0usize..5))
        .prop_map(|(poly, tri, seg, nx, rule_n, exps)| GeometryCase {
            poly,
            tri,
            seg,
            nx,
            rule_n: rule_n + 2,
            exps,
        })
}

#[derive(Debug, Clone)]
pub struct GeometryCase {
    pub poly: Vec<Vec2>,
    pub tri: [Vec2; 3],
    pub seg: (Vec2, Vec2),
    pub nx: usize,
    pub rule_n: usize,
    pub exps: [usize; 3],
}

fn close(a: f64, b: f64, rel: f64, what: &str) -> Result<(), String> {
    if (a - b).abs() <= rel * b.abs().max(1e-300) {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b} (relative {:e})", (a - b).abs() / b.abs()))
    }
}

/// Clipped pieces of a polygon and a segment over all background triangles
/// add up to the original measure.
pub fn measure_partition(c: &GeometryCase) -> Result<(), String> {
    let mesh = BackgroundMesh::structured([vec2(0.0, 0.0), vec2(1.0, 1.0)], c.nx).map_err(|e| e.to_string())?;
    let mut area = 0.0;
    let mut length = 0.0;
    let (p, q) = c.seg;
    for t in 0..mesh.triangles.len() {
        let tri = mesh.tri(t);
        if let Some(piece) = clip_polygon_triangle(&c.poly, &tri, EPS) {
            area += signed_area(&piece);
        }
        if let Some((s0, s1)) = clip_segment_interval(p, q, &tri, EPS) {
            length += (s1 - s0) * (q - p).norm();
        }
    }
    close(area, signed_area(&c.poly), 1e-12, "polygon area")?;
    close(length, (q - p).norm(), 1e-12, "segment length")
}

/// Clipping an already clipped polygon or segment changes nothing.
pub fn clipping_idempotence(c: &GeometryCase) -> Result<(), String> {
    if let Some(once) = clip_polygon_triangle(&c.poly, &c.tri, EPS) {
        let twice = clip_polygon_triangle(&once, &c.tri, EPS).ok_or("second polygon clip is empty")?;
        close(signed_area(&twice), signed_area(&once), 1e-12, "clipped area")?;
        if twice.len() != once.len() {
            return Err(format!("vertex count {} became {}", once.len(), twice.len()));
        }
        for x in &twice {
            if !once.iter().any(|y| (x - y).norm() <= 1e-12) {
                return Err(format!("new vertex {x:?}"));
            }
        }
    }
    let (p, q) = c.seg;
    if let Some((s0, s1)) = clip_segment_interval(p, q, &c.tri, EPS) {
        let (a, b) = (p + (q - p) * s0, p + (q - p) * s1);
        let (r0, r1) = clip_segment_interval(a, b, &c.tri, EPS).ok_or("second segment clip is empty")?;
        if r0.abs() > 1e-12 || (r1 - 1.0).abs() > 1e-12 {
            return Err(format!("segment re-clip gave ({r0}, {r1})"));
        }
    }
    Ok(())
}

/// Relative check with an absolute floor for moments of slivers, where the
/// shoelace oracle itself loses digits to cancellation.
fn close_floor(a: f64, b: f64, rel: f64, floor: f64, what: &str) -> Result<(), String> {
    if (a - b).abs() <= rel * b.abs() + floor {
        Ok(())
    } else {
        Err(format!("{what}: {a} vs {b}"))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Monomial integrals checked against closed forms: `λ₁^a λ₂^b λ₃^c` on
/// triangles, `t^k` on segments and first moments on clipped polygons.
pub fn quadrature_exactness(c: &GeometryCase) -> Result<(), String> {
    let n = c.rule_n;
    let [a, b, e] = c.exps;
    let tri = c.tri;
    let area = triangle_area(&tri);
    let monomial = |x: Vec2| {
        let l = barycentric(&tri, x);
        l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(e as i32)
    };
    let exact = 2.0 * area * factorial(a) * factorial(b) * factorial(e) / factorial(a + b + e + 2);
    if a + b + e <= 2 * n - 2 {
        let q: f64 = triangle_rule(&tri, TriangleRule::Collapsed(n)).iter().map(|q| q.weight * monomial(q.x)).sum();
        close(q, exact, 1e-12, "collapsed rule")?;
    }
    if a + b + e <= 2 {
        let q: f64 = triangle_rule(&tri, TriangleRule::Degree2).iter().map(|q| q.weight * monomial(q.x)).sum();
        close(q, exact, 1e-12, "degree-2 rule")?;
    }
    let (p, r) = c.seg;
    let len = (r - p).norm();
    for k in 0..2 * n {
        let q: f64 = segment_rule(p, r, n)
            .iter()
            .map(|q| q.weight * ((q.x - p).norm() / len).powi(k as i32))
            .sum();
        close(q, len / (k + 1) as f64, 1e-12, "segment rule")?;
    }
    let w: f64 = gauss_legendre(n).iter().map(|g| g.1).sum();
    close(w, 1.0, 1e-14, "Gauss weights")?;
    if let Some(piece) = clip_polygon_triangle(&c.poly, &tri, EPS) {
        let m0 = signed_area(&piece);
        if m0 > 1e-10 {
            // shoelace first moments
            let (mut mx, mut my) = (0.0, 0.0);
            for i in 0..piece.len() {
                let (u, v) = (piece[i], piece[(i + 1) % piece.len()]);
                let cr = u.x * v.y - v.x * u.y;
                mx += (u.x + v.x) * cr;
                my += (u.y + v.y) * cr;
            }
            let qr = polygon_rule(&piece, TriangleRule::Collapsed(n));
            let qx: f64 = qr.iter().map(|q| q.weight * q.x.x).sum();
            let qy: f64 = qr.iter().map(|q| q.weight * q.x.y).sum();
            let q0: f64 = qr.iter().map(|q| q.weight).sum();
            close_floor(q0, m0, 1e-12, 1e-15, "polygon area rule")?;
            close_floor(qx, mx / 6.0, 1e-12, 1e-15, "polygon x moment")?;
            close_floor(qy, my / 6.0, 1e-12, 1e-15, "polygon y moment")?;
        }
    }
    Ok(())
}

/// Run all three geometry properties on `cases` random inputs.
pub fn run_geometry_suite(cases: u32) -> Result<(), String> {
    use proptest::test_runner::{Config, TestCaseError, TestRunner};
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner
        .run(&geometry_case(), |c| {
            measure_partition(&c).map_err(TestCaseError::fail)?;
            clipping_idempotence(&c).map_err(TestCaseError::fail)?;
            quadrature_exactness(&c).map_err(TestCaseError::fail)?;
            Ok(())
        })
        .map_err(|e| e.to_string())
}
