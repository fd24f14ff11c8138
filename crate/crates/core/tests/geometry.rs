mod common;

use cutfrac::mesh::geom::point_in_triangle;
use cutfrac::mesh::quadrature::{segment_rule, triangle_rule, TriangleRule};
use cutfrac::mesh::{extract_all, BackgroundMesh, QuadratureOrder};
use cutfrac::presets::Preset;
use cutfrac::{vec2, Vec2};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn measure_partition(c in common::geometry_case()) {
        common::measure_partition(&c).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn clipping_idempotence(c in common::geometry_case()) {
        common::clipping_idempotence(&c).map_err(TestCaseError::fail)?;
    }

    #[test]
    fn quadrature_exactness(c in common::geometry_case()) {
        common::quadrature_exactness(&c).map_err(TestCaseError::fail)?;
    }
}

/// Sample points of every component of a preset.
fn component_samples(p: Preset) -> Vec<(usize, Vec2)> {
    let d = p.domain();
    let (np, nc) = (d.points.len(), d.cracks.len());
    let mut out = Vec::new();
    for (i, pt) in d.points.iter().enumerate() {
        out.push((i, pt.x));
    }
    for (i, c) in d.cracks.iter().enumerate() {
        for k in 0..c.segment_count() {
            let (a, b) = c.segment(k);
            out.extend(segment_rule(a, b, 4).into_iter().map(|q| (np + i, q.x)));
            out.push((np + i, a));
            out.push((np + i, b));
        }
    }
    for (i, b) in d.bulks.iter().enumerate() {
        for t in &b.pieces {
            out.extend(triangle_rule(t, TriangleRule::Collapsed(3)).into_iter().map(|q| (np + nc + i, q.x)));
            out.extend(t.iter().map(|&x| (np + nc + i, x)));
        }
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// The union of active triangles covers the component at every resolution.
    #[test]
    fn active_meshes_cover_components(pi in 0usize..9, nx in 2usize..40) {
        let p = Preset::all()[pi];
        let d = p.domain();
        let mesh = BackgroundMesh::structured(d.bbox, nx).unwrap();
        let active = extract_all(&d, &mesh, QuadratureOrder::default(), false).unwrap();
        for (slot, x) in component_samples(p) {
            let covered = active[slot].triangles.iter().any(|&t| point_in_triangle(&mesh.tri(t), x, 1e-10));
            prop_assert!(covered, "{p} nx={nx}: {} misses {x:?}", active[slot].comp);
        }
    }
}

#[test]
fn refinement_keeps_coverage_on_nested_meshes() {
    // on nested meshes the covered region of the fine level lies inside the coarse one
    for p in Preset::all() {
        let d = p.domain();
        for nx in [3usize, 5, 10] {
            let coarse = BackgroundMesh::structured(d.bbox, nx).unwrap();
            let fine = BackgroundMesh::structured(d.bbox, 2 * nx).unwrap();
            let ac = extract_all(&d, &coarse, QuadratureOrder::default(), false).unwrap();
            let af = extract_all(&d, &fine, QuadratureOrder::default(), false).unwrap();
            for (c, f) in ac.iter().zip(&af) {
                for &t in &f.triangles {
                    let tri = fine.tri(t);
                    let centroid = (tri[0] + tri[1] + tri[2]) / 3.0;
                    let inside = c.triangles.iter().any(|&s| point_in_triangle(&coarse.tri(s), centroid, 1e-12));
                    assert!(inside, "{p} nx={nx}: {} fine triangle {t} outside coarse cover", f.comp);
                }
            }
        }
    }
}

#[test]
fn unit_square_structured_mesh_matches_builder() {
    let a = cutfrac::mesh::build_background_mesh(7).unwrap();
    let b = BackgroundMesh::structured([vec2(0.0, 0.0), vec2(1.0, 1.0)], 7).unwrap();
    assert_eq!(a.triangles, b.triangles);
    assert_eq!(a.vertices, b.vertices);
}
