//! Quadrature rules on segments, triangles and convex polygons, in physical
//! coordinates.

use crate::mesh::geom::{orient, triangle_area};
use crate::Vec2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadPoint {
    pub x: Vec2,
    pub weight: f64,
}

/// Gauss–Legendre nodes and weights on `[0, 1]` with `n` points
/// (exact for polynomials of degree `2n - 1`).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "gauss_legendre needs at least one point");
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        // Chebyshev initial guess, then Newton on P_n
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        out.push((0.5 * (1.0 - z), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// `n`-point Gauss–Legendre rule on the segment `[a, b]`.
pub fn segment_rule(a: Vec2, b: Vec2, n: usize) -> Vec<QuadPoint> {
    let len = (b - a).norm();
    gauss_legendre(n)
        .into_iter()
        .map(|(s, w)| QuadPoint {
            x: a + (b - a) * s,
            weight: w * len,
        })
        .collect()
}

/// Which rule to use on a triangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangleRule {
    /// Three interior points, exact for quadratics.
    Degree2,
    /// Collapsed tensor Gauss rule with `n × n` points, exact to degree `2n - 2`.
    Collapsed(usize),
}

pub fn triangle_rule(tri: &[Vec2; 3], rule: TriangleRule) -> Vec<QuadPoint> {
    let area = triangle_area(tri);
    let map = |l1: f64, l2: f64| tri[0] + (tri[1] - tri[0]) * l1 + (tri[2] - tri[0]) * l2;
    match rule {
        TriangleRule::Degree2 => {
            let (a, b) = (1.0 / 6.0, 2.0 / 3.0);
            [(a, a), (b, a), (a, b)]
                .iter()
                .map(|&(l1, l2)| QuadPoint {
                    x: map(l1, l2),
                    weight: area / 3.0,
                })
                .collect()
        }
        TriangleRule::Collapsed(n) => {
            let g = gauss_legendre(n);
            let mut pts = Vec::with_capacity(n * n);
            for &(u, wu) in &g {
                for &(v, wv) in &g {
                    // Duffy map of the unit square onto the reference triangle
                    let l1 = u * (1.0 - v);
                    let l2 = u * v;
                    pts.push(QuadPoint {
                        x: map(l1, l2),
                        weight: 2.0 * area * wu * wv * u,
                    });
                }
            }
            pts
        }
    }
}

/// Fan triangulation of a convex polygon from its vertex centroid.
pub fn fan_triangles(poly: &[Vec2]) -> Vec<[Vec2; 3]> {
    let c = crate::mesh::geom::centroid(poly);
    let n = poly.len();
    (0..n)
        .map(|i| [c, poly[i], poly[(i + 1) % n]])
        .filter(|t| orient(t[0], t[1], t[2]) > 0.0)
        .collect()
}

/// Quadrature on a convex polygon: fan triangulation plus a triangle rule.
pub fn polygon_rule(poly: &[Vec2], rule: TriangleRule) -> Vec<QuadPoint> {
    fan_triangles(poly)
        .iter()
        .flat_map(|t| triangle_rule(t, rule))
        .collect()
}
