//! Planar geometry primitives: orientation tests, clipping and ear clipping.

use crate::Vec2;

/// z-component of the cross product of `a` and `b`.
#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Twice the signed area of triangle `abc` (positive when counter-clockwise).
#[inline]
pub fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    cross(b - a, c - a)
}

/// Signed area of a closed polygon given as a vertex loop (shoelace formula).
pub fn signed_area(poly: &[Vec2]) -> f64 {
    let n = poly.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        s += cross(poly[i], poly[(i + 1) % n]);
    }
    0.5 * s
}

pub fn triangle_area(tri: &[Vec2; 3]) -> f64 {
    0.5 * orient(tri[0], tri[1], tri[2]).abs()
}

pub fn centroid(poly: &[Vec2]) -> Vec2 {
    let mut c = Vec2::zeros();
    for p in poly {
        c += p;
    }
    c / poly.len() as f64
}

/// Left unit normal of the direction `d`.
#[inline]
pub fn left_normal(d: Vec2) -> Vec2 {
    Vec2::new(-d.y, d.x) / d.norm()
}

/// Distance from `x` to the segment `[a, b]`.
pub fn point_segment_distance(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    let len2 = d.norm_squared();
    if len2 == 0.0 {
        return (x - a).norm();
    }
    let s = ((x - a).dot(&d) / len2).clamp(0.0, 1.0);
    (x - (a + d * s)).norm()
}

/// Parameter of the orthogonal projection of `x` onto the line through `a`, `b`.
pub fn project_param(x: Vec2, a: Vec2, b: Vec2) -> f64 {
    let d = b - a;
    (x - a).dot(&d) / d.norm_squared()
}

/// Signed distances of `x` to the three edge lines of a counter-clockwise
/// triangle, positive inside.
#[inline]
fn edge_distances(tri: &[Vec2; 3], x: Vec2) -> [f64; 3] {
    let mut d = [0.0; 3];
    for k in 0..3 {
        let a = tri[k];
        let b = tri[(k + 1) % 3];
        let e = b - a;
        d[k] = cross(e, x - a) / e.norm();
    }
    d
}

/// Parameter interval `[s0, s1] ⊂ [0, 1]` of the part of segment `p + s (q - p)`
/// inside the counter-clockwise triangle, or `None` when the intersection is
/// shorter than `eps`.
///
/// Points within `eps` of an edge line count as inside, so a segment lying on
/// a triangle edge is kept by both triangles sharing that edge.
pub fn clip_segment_interval(p: Vec2, q: Vec2, tri: &[Vec2; 3], eps: f64) -> Option<(f64, f64)> {
    let len = (q - p).norm();
    if len < eps {
        return None;
    }
    let dp = edge_distances(tri, p);
    let dq = edge_distances(tri, q);
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    for k in 0..3 {
        let (d0, d1) = (dp[k], dq[k]);
        if d0 >= -eps && d1 >= -eps {
            continue;
        }
        if d0 < -eps && d1 < -eps {
            return None;
        }
        let s = d0 / (d0 - d1);
        if d0 < d1 {
            lo = lo.max(s);
        } else {
            hi = hi.min(s);
        }
    }
    if (hi - lo) * len < eps {
        None
    } else {
        Some((lo, hi))
    }
}

/// Intersection of the segment `(p, q)` with a counter-clockwise triangle.
pub fn clip_segment_triangle(p: Vec2, q: Vec2, tri: &[Vec2; 3], eps: f64) -> Option<(Vec2, Vec2)> {
    clip_segment_interval(p, q, tri, eps).map(|(s0, s1)| (p + (q - p) * s0, p + (q - p) * s1))
}

/// Clip a polygon against the half-plane to the left of the directed line `a → b`.
fn clip_halfplane(poly: &[Vec2], a: Vec2, b: Vec2, eps: f64) -> Vec<Vec2> {
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 2);
    if n == 0 {
        return out;
    }
    let e = b - a;
    let inv = 1.0 / e.norm();
    let dist = |x: Vec2| cross(e, x - a) * inv;
    for i in 0..n {
        let cur = poly[i];
        let nxt = poly[(i + 1) % n];
        let dc = dist(cur);
        let dn = dist(nxt);
        let cur_in = dc >= -eps;
        let nxt_in = dn >= -eps;
        if cur_in {
            out.push(cur);
        }
        if cur_in != nxt_in {
            let t = dc / (dc - dn);
            out.push(cur + (nxt - cur) * t);
        }
    }
    out
}

/// Successive half-plane clipping of `poly` by the edges of a counter-clockwise
/// triangle. Returns `None` when the result has area below `eps²`.
pub fn clip_polygon_triangle(poly: &[Vec2], tri: &[Vec2; 3], eps: f64) -> Option<Vec<Vec2>> {
    let mut cur = poly.to_vec();
    for k in 0..3 {
        cur = clip_halfplane(&cur, tri[k], tri[(k + 1) % 3], eps);
        if cur.len() < 3 {
            return None;
        }
    }
    dedup_loop(&mut cur, eps);
    if cur.len() < 3 || signed_area(&cur).abs() < eps * eps {
        None
    } else {
        Some(cur)
    }
}

/// Remove consecutive vertices closer than `eps` (including the wrap-around pair).
fn dedup_loop(poly: &mut Vec<Vec2>, eps: f64) {
    let mut out: Vec<Vec2> = Vec::with_capacity(poly.len());
    for &p in poly.iter() {
        if out.last().is_none_or(|l| (p - l).norm() > eps) {
            out.push(p);
        }
    }
    while out.len() > 1 && (out[0] - out[out.len() - 1]).norm() <= eps {
        out.pop();
    }
    *poly = out;
}

/// Barycentric coordinates of `x` with respect to `tri`.
pub fn barycentric(tri: &[Vec2; 3], x: Vec2) -> [f64; 3] {
    let det = orient(tri[0], tri[1], tri[2]);
    let l0 = orient(x, tri[1], tri[2]) / det;
    let l1 = orient(tri[0], x, tri[2]) / det;
    let l2 = orient(tri[0], tri[1], x) / det;
    [l0, l1, l2]
}

/// Whether `x` lies in the closed triangle, allowing barycentric coordinates
/// down to `-tol`.
pub fn point_in_triangle(tri: &[Vec2; 3], x: Vec2, tol: f64) -> bool {
    barycentric(tri, x).iter().all(|&l| l >= -tol)
}

fn segments_properly_intersect(a: Vec2, b: Vec2, c: Vec2, d: Vec2, eps: f64) -> bool {
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let s = eps * (b - a).norm().max((d - c).norm());
    (o1 > s && o2 < -s || o1 < -s && o2 > s) && (o3 > s && o4 < -s || o3 < -s && o4 > s)
}

/// True when two non-adjacent edges of the loop cross each other.
pub fn is_self_intersecting(poly: &[Vec2], eps: f64) -> bool {
    let n = poly.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if j == i + 1 || (i == 0 && j == n - 1) {
                continue;
            }
            if segments_properly_intersect(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n], eps) {
                return true;
            }
        }
    }
    false
}

/// Decompose a simple counter-clockwise polygon into triangles by ear clipping.
pub fn ear_clip(poly: &[Vec2], eps: f64) -> Vec<[Vec2; 3]> {
    let mut idx: Vec<usize> = (0..poly.len()).collect();
    let mut tris = Vec::with_capacity(poly.len().saturating_sub(2));
    let mut guard = 0;
    while idx.len() > 3 {
        let m = idx.len();
        let mut clipped = false;
        for k in 0..m {
            let ia = idx[(k + m - 1) % m];
            let ib = idx[k];
            let ic = idx[(k + 1) % m];
            let (a, b, c) = (poly[ia], poly[ib], poly[ic]);
            let o = orient(a, b, c);
            if o <= eps * eps {
                // reflex or collinear vertex; collinear ones are dropped
                if o.abs() <= eps * eps && (c - a).norm() > eps {
                    idx.remove(k);
                    clipped = true;
                    break;
                }
                continue;
            }
            let tri = [a, b, c];
            let blocked = idx
                .iter()
                .filter(|&&j| j != ia && j != ib && j != ic)
                .any(|&j| {
                    let bc = barycentric(&tri, poly[j]);
                    bc.iter().all(|&l| l > 1e-12)
                });
            if !blocked {
                tris.push(tri);
                idx.remove(k);
                clipped = true;
                break;
            }
        }
        guard += 1;
        if !clipped || guard > 10 * poly.len() {
            break;
        }
    }
    if idx.len() == 3 {
        let tri = [poly[idx[0]], poly[idx[1]], poly[idx[2]]];
        if orient(tri[0], tri[1], tri[2]) > eps * eps {
            tris.push(tri);
        }
    }
    tris
}
