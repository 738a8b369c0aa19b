use std::f64::consts::PI;

use polyiso::geom3::{
    circumcircle, classify_shape, geodesic_distance, spherical_angle, spherical_isosceles_sides, PlanarTriangle,
    Point3, Rotation3, UnitVec,
};
use polyiso::hull::convex_hull3;
use polyiso::kleetope::{combinatorial_kleetope, iterate_kleetope, AbstractTriangulation};
use polyiso::mesh::{gauss_map, is_convex, read_off, total_angular_defect, write_off, CONVEXITY_TOL};
use polyiso::verify::{sample_iso_tetra, IsoCase, SampleConfig};
use proptest::prelude::*;

fn point(range: f64) -> impl Strategy<Value = Point3> {
    (-range..range, -range..range, -range..range).prop_map(|(x, y, z)| Point3::new(x, y, z))
}

fn triangle() -> impl Strategy<Value = PlanarTriangle> {
    (point(10.0), point(10.0), point(10.0)).prop_filter_map("degenerate", |(a, b, c)| {
        let t = PlanarTriangle::new(a, b, c).ok()?;
        let longest = t.side_lengths().into_iter().fold(0.0, f64::max);
        (t.area() > 1e-3 * longest * longest).then_some(t)
    })
}

fn rotation() -> impl Strategy<Value = Rotation3> {
    (point(1.0), 0.0..2.0 * PI).prop_filter_map("zero axis", |(axis, angle)| Rotation3::about_axis(axis, angle).ok())
}

/// Points on the unit sphere, far enough apart for a non-degenerate hull.
fn sphere_points() -> impl Strategy<Value = Vec<Point3>> {
    prop::collection::vec(point(1.0), 8..40).prop_map(|v| v.into_iter().filter_map(Point3::normalized).collect())
}

proptest! {
    #[test]
    fn circumcentre_is_equidistant(t in triangle()) {
        let (c, r) = circumcircle(&t);
        let [a, b, cc] = t.vertices();
        let scale = t.side_lengths().into_iter().fold(0.0, f64::max);
        for p in [a, b, cc] {
            prop_assert!((c.distance(p) - r).abs() <= 1e-7 * scale.max(r));
        }
        prop_assert!((c - a).dot(t.normal_vector()).abs() <= 1e-7 * scale * t.normal_vector().norm());
    }

    #[test]
    fn shape_survives_rigid_motion_and_scale(t in triangle(), r in rotation(), shift in point(5.0), s in 0.01f64..100.0) {
        let moved = t.vertices().map(|p| r.apply(p) * s + shift);
        let m = PlanarTriangle::new(moved[0], moved[1], moved[2]).unwrap();
        let (a, b) = (classify_shape(&t, 1e-9), classify_shape(&m, 1e-9));
        prop_assert_eq!(a.category, b.category);
        prop_assert_eq!(a.apex, b.apex);
        prop_assert_eq!(a.angle_class, b.angle_class);
        for (x, y) in a.sorted_sides.iter().zip(b.sorted_sides) {
            prop_assert!((x * s - y).abs() <= 1e-9 * y);
        }
    }

    #[test]
    fn isosceles_by_construction(leg in 0.1f64..5.0, base_frac in 0.05f64..1.95, r in rotation()) {
        let base = leg * base_frac;
        let h = (leg * leg - base * base / 4.0).sqrt();
        let t = PlanarTriangle::new(
            r.apply(Point3::new(0.0, h, 0.0)),
            r.apply(Point3::new(-base / 2.0, 0.0, 0.0)),
            r.apply(Point3::new(base / 2.0, 0.0, 0.0)),
        ).unwrap();
        let s = classify_shape(&t, 1e-9);
        prop_assert!(s.is_isosceles_or_equilateral());
        if (base_frac - 1.0).abs() > 1e-6 {
            prop_assert_eq!(s.apex, Some(0));
        }
    }

    #[test]
    fn spherical_sides_rebuild_the_triangle(apex in 0.05f64..3.0, base in 0.05f64..1.55) {
        let Ok((leg, side)) = spherical_isosceles_sides(apex, base) else { return Ok(()) };
        let north = UnitVec::new(Point3::new(0.0, 0.0, 1.0)).unwrap();
        let p = UnitVec::new(Point3::new(leg.sin(), 0.0, leg.cos())).unwrap();
        let q = UnitVec::new(Point3::new(leg.sin() * apex.cos(), leg.sin() * apex.sin(), leg.cos())).unwrap();
        prop_assert!((spherical_angle(north, p, q) - apex).abs() < 1e-8);
        prop_assert!((spherical_angle(p, north, q) - base).abs() < 1e-8);
        prop_assert!((spherical_angle(q, p, north) - base).abs() < 1e-8);
        prop_assert!((geodesic_distance(p, q) - side).abs() < 1e-8);
    }

    #[test]
    fn hull_contains_input_and_commutes_with_rotation(pts in sphere_points(), r in rotation()) {
        let Ok(h) = convex_hull3(&pts, 1e-9) else { return Ok(()) };
        prop_assert!(h.mesh.is_closed());
        prop_assert!((total_angular_defect(&h.mesh).unwrap() - 4.0 * PI).abs() < 1e-8);
        for p in &pts {
            for f in 0..h.mesh.num_faces() {
                let n = h.mesh.face_unit_normal(f).unwrap().get();
                prop_assert!(n.dot(*p - h.mesh.corners(f)[0]) <= 1e-8);
            }
        }
        let rotated: Vec<Point3> = pts.iter().map(|&p| r.apply(p)).collect();
        let hr = convex_hull3(&rotated, 1e-9).unwrap();
        prop_assert_eq!(&h.vertex_map, &hr.vertex_map);
        prop_assert_eq!(h.mesh.num_faces(), hr.mesh.num_faces());
        for (a, b) in h.mesh.vertices().iter().zip(hr.mesh.vertices()) {
            prop_assert!(r.apply(*a).distance(*b) < 1e-12);
        }
    }

    #[test]
    fn gauss_arcs_complement_dihedrals(pts in sphere_points()) {
        let Ok(h) = convex_hull3(&pts, 1e-9) else { return Ok(()) };
        prop_assume!(is_convex(&h.mesh, CONVEXITY_TOL).unwrap().convex);
        let g = gauss_map(&h.mesh).unwrap();
        for &((a, b), arc) in &g.arcs {
            prop_assert!((arc + h.mesh.edge_dihedral(a, b).unwrap() - PI).abs() < 1e-9);
        }
    }

    #[test]
    fn off_round_trip(pts in sphere_points()) {
        let Ok(h) = convex_hull3(&pts, 1e-9) else { return Ok(()) };
        let back = read_off(&write_off(&h.mesh)).unwrap();
        prop_assert_eq!(back.faces(), h.mesh.faces());
        prop_assert_eq!(back.vertices(), h.mesh.vertices());
    }

    #[test]
    fn kleetope_counts_follow_recurrence(pts in sphere_points(), i in 0usize..3) {
        let Ok(h) = convex_hull3(&pts, 1e-9) else { return Ok(()) };
        let g = AbstractTriangulation::from_mesh(&h.mesh).unwrap();
        let k = combinatorial_kleetope(&g);
        prop_assert_eq!(k.vertex_count(), 3 * g.vertex_count() - 4);
        prop_assert_eq!(k.face_count(), 3 * g.face_count());
        let ki = iterate_kleetope(&g, i);
        prop_assert_eq!(ki.face_count(), g.face_count() * 3usize.pow(i as u32));
    }

    #[test]
    fn samples_revalidate_for_any_seed(seed in any::<u64>(), index in 0usize..10_000, case in 0usize..5) {
        let case = IsoCase::ALL[case];
        let t = sample_iso_tetra(&SampleConfig::new(seed, 1), case, index).unwrap();
        prop_assert!(t.validate().is_ok());
        let again = sample_iso_tetra(&SampleConfig::new(seed, 1), case, index).unwrap();
        prop_assert_eq!(t, again);
    }
}
