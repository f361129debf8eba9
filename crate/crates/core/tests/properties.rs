mod common;

use billiards::flow::{detect_period, run_links, trace, PhasePoint};
use billiards::geom::{ray_segment_intersection, reflect_across_line};
use billiards::periodic::{perpendicular_orbit, PerpOutcome};
use billiards::polygon::{build_polygon, certify_rational, direction_floors, shapes, Containment};
use billiards::stats::{enumerate_basis, epsilon_dense, interior_disk_fraction, links_discrepancy, BasisRegion};
use billiards::unfolding::{corridor_coincidence, shadowing_gap, unfold};
use billiards::{Direction, Point, Scalar, Segment};
use common::*;
use proptest::prelude::*;

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, max_global_rejects: 100_000, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(500))]

    #[test]
    fn reflection_is_an_involution(s in segment(), x in -40i64..40, y in -40i64..40) {
        check_reflection_involution(&s, &Point::new(q(x, 3), q(y, 7)))?;
    }

    #[test]
    fn reflection_keeps_angle_to_mirror(s in segment(), d in direction()) {
        check_mirror_law(&s, &d)?;
    }

    #[test]
    fn determinants_multiply(a in segment(), b in segment(), c in segment()) {
        let (ra, rb, rc) = (reflect_across_line(&a).unwrap(), reflect_across_line(&b).unwrap(), reflect_across_line(&c).unwrap());
        let ab = ra.compose(&rb);
        prop_assert_eq!(ab.det(), ra.det() * rb.det());
        prop_assert_eq!(ab.det(), Q::from_int(1));
        prop_assert_eq!(ab.compose(&rc).det(), Q::from_int(-1));
    }

    #[test]
    fn ray_hits_match_direct_solve(s in segment(), ox in -60i64..60, oy in -60i64..60, d in direction()) {
        let o = Point::new(q(ox, 5), q(oy, 5));
        let e = s.vector();
        let v = d.vec().clone();
        let den = v.cross(&e);
        let expected = if den == Q::from_int(0) {
            None
        } else {
            let w = s.a.clone() - o.clone();
            let t = w.cross(&e) / den.clone();
            let u = w.cross(&v) / den;
            let ok = t > Q::from_int(0) && u >= Q::from_int(0) && u <= Q::from_int(1);
            ok.then(|| o.clone() + v.scale(&t))
        };
        let got = ray_segment_intersection(&o, &d, &s).map(|h| h.hit);
        prop_assert_eq!(got, expected);
    }

    #[test]
    fn floors_are_closed(i in 0usize..3, d in direction()) {
        let p = table(i);
        let f = direction_floors(&p, &d).unwrap();
        prop_assert!(f.contains(&d));
        for x in &f.directions {
            for j in 0..p.len() {
                prop_assert!(f.contains(&p.reflection(j).apply_dir(x)));
            }
        }
        prop_assert!(f.floor_count() <= 2 * p.angle_lcm().unwrap() as usize);
        if i == 0 && *d.dx() != Q::from_int(0) && *d.dy() != Q::from_int(0) {
            prop_assert_eq!(f.floor_count(), 4);
        }
    }

    #[test]
    fn scaled_tables_certify_and_orient(i in 0usize..3, k in 1i64..20, dx in -9i64..9, dy in -9i64..9, rot in 0usize..4) {
        let p = table(i);
        let map = |v: &Point<Q>| {
            let (x, y) = (v.x.clone() * Q::from_int(k), v.y.clone() * Q::from_int(k));
            let (x, y) = match rot {
                0 => (x, y),
                1 => (-y, x),
                2 => (-x, -y),
                _ => (y, -x),
            };
            Point::new(x + Q::from_int(dx), y + Q::from_int(dy))
        };
        let verts: Vec<Point<Q>> = p.vertices().iter().map(map).collect();
        let a = build_polygon(verts.clone()).unwrap();
        let mut rev = verts;
        rev.reverse();
        let b = build_polygon(rev).unwrap();
        prop_assert_eq!(a.vertices(), b.vertices());
        let fr = certify_rational(&a, 360).unwrap();
        let sum: Q = fr.iter().map(|(n, d)| Q::from_frac(*n, *d)).fold(Q::from_int(0), |s, x| s + x);
        prop_assert_eq!(sum, Q::from_int(a.len() as i64 - 2));
    }

    #[test]
    fn links_stay_in_the_table((i, s) in phase_point(), n in 1usize..40) {
        let p = table(i);
        let o = run_links(&p, &s, n).unwrap();
        for l in &o.links {
            prop_assert!(p.contains(&l.midpoint()) == Containment::Inside);
        }
    }

    #[test]
    fn mirror_law_along_orbits((i, s) in phase_point(), n in 1usize..40) {
        check_orbit_mirror_law(i, &s, n)?;
    }

    #[test]
    fn orbits_reverse((i, s) in phase_point(), n in 2usize..30) {
        check_time_reversal(i, &s, n)?;
    }

    #[test]
    fn periods_reverify((i, s) in phase_point()) {
        let p = table(i);
        let o = trace(&p, &s, 200).unwrap();
        if let Some(per) = o.periodic {
            let again = run_links(&p, &s, per.links).unwrap();
            let last = again.events.last().unwrap();
            prop_assert_eq!(detect_period(&p, &again).map(|x| x.links), Some(per.links));
            prop_assert!(last.outgoing.same_ray(&s.v));
        }
    }

    #[test]
    fn traced_directions_stay_on_floors((i, s) in phase_point(), n in 1usize..60) {
        check_floor_closure(i, &s, n)?;
    }

    #[test]
    fn unfolding_folds_back((i, s) in phase_point(), n in 1usize..40) {
        let p = table(i);
        let u = unfold(&p, &s, n).unwrap();
        prop_assert!(u.is_exactly_collinear());
        prop_assert_eq!(u.fold_back(&p), u.orbit.links.clone());
    }

    #[test]
    fn shadowing_bound(x in 1i64..99, y in 1i64..99, d in direction(), tilt in 1i64..200, n in 1usize..6) {
        let p = table(0);
        let q0 = Point::new(q(x, 100), q(y, 100));
        let d2 = Direction::from_vec(d.vec().clone() + d.vec().perp().scale(&q(tilt, 20_000))).unwrap();
        let r = corridor_coincidence(&p, &q0, &d, &d2, n).unwrap();
        prop_assume!(r.j_fwd == n);
        let gap = shadowing_gap(&p, &q0, &d, &d2, n).unwrap();
        let dtheta = billiards::scalar::angle_distance(d.angle(), d2.angle());
        prop_assert!(gap <= n as f64 * p.diameter() * dtheta + 1e-12);
    }

    #[test]
    fn cylinders_reverify(pick in 0usize..10_000, piece in 0usize..64, w in prop::array::uniform4(1i64..50)) {
        check_cylinder(pick, piece, w)?;
    }

    #[test]
    fn perpendicular_orbits_close(i in 0usize..2, side in 0usize..4, u in 1i64..1000) {
        let p = table(i);
        let side = side % p.len();
        let s = p.side(side);
        let foot = s.a.clone() + s.vector().scale(&q(u, 1000));
        if let PerpOutcome::Periodic(o) = perpendicular_orbit(&p, side, &foot, 200).unwrap() {
            prop_assert_eq!(detect_period(&p, &o), o.periodic);
            let perp_hits = o.events.iter().filter(|e| e.incoming.vec().dot(&p.side(e.side_index).vector()) == Q::from_int(0)).count();
            prop_assert!(perp_hits >= 2);
        }
    }

    #[test]
    fn discrepancies_are_bounded((i, s) in phase_point(), n in 1usize..40, e in 15u32..90) {
        let p = table(i);
        let o = run_links(&p, &s, n).unwrap();
        let rep = links_discrepancy(&p, &o.links, e as f64 / 100.0).unwrap();
        for r in &rep.per_region {
            prop_assert!(r.discrepancy >= 0.0);
            prop_assert!(r.discrepancy <= r.length_fraction.max(r.area_fraction) + 1e-12);
            prop_assert!(r.length_fraction.max(r.area_fraction) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn density_witnesses_are_far((i, s) in phase_point(), n in 1usize..12, e in 10u32..60) {
        let p = table(i);
        let o = run_links(&p, &s, n).unwrap();
        let eps = e as f64 / 100.0;
        let rep = epsilon_dense(&p, &o, eps, false).unwrap();
        if let Some(w) = rep.uncovered_witness {
            let e2 = q(e as i64, 100) * q(e as i64, 100);
            prop_assert!(o.links.iter().all(|l| l.dist2_to(&w) > e2));
        }
    }
}

proptest! {
    #![proptest_config(cases(500))]

    #[test]
    fn concatenation_keeps_good_regions(a in interior_point(0), b in interior_point(0), da in direction(), db in direction(), n in 20usize..60) {
        check_concatenation(&PhasePoint::new(a, da), &PhasePoint::new(b, db), n, 0.3)?;
    }
}

#[test]
fn basis_shrinks_as_epsilon_grows() {
    for i in 0..3 {
        let p = table(i);
        let mut last = usize::MAX;
        for e in [0.15, 0.2, 0.3, 0.45, 0.6, 0.9] {
            let b = enumerate_basis(&p, e);
            assert!(b.len() <= last);
            assert!(b.iter().all(|r: &BasisRegion<Q>| r.diameter.to_f64_lossy() > e));
            last = b.len();
        }
    }
}

#[test]
fn interior_disks_have_plain_area() {
    let p = shapes::l_shape::<Q>();
    for r in enumerate_basis(&p, 0.2) {
        let rad = r.radius();
        let inside = p.contains(&r.center) == Containment::Inside
            && p.sides().iter().all(|s: &Segment<Q>| s.dist2_to(&r.center) >= rad.clone() * rad.clone());
        if inside {
            assert!((r.area_fraction - interior_disk_fraction(&p, rad.to_f64_lossy())).abs() < 1e-12);
        }
    }
}

#[test]
fn disjoint_regions_fill_at_most_the_table() {
    let p = table(0);
    let basis = enumerate_basis(&p, 0.2);
    // Centers on a grid of spacing 1/4 with radius 1/8 give disjoint disks.
    let total: f64 = basis
        .iter()
        .filter(|r| r.denominators.0.max(r.denominators.1) == 4 && r.denominators == (4, 4))
        .map(|r| r.area_fraction)
        .sum();
    assert!(total > 0.0 && total <= 1.0);
}

#[test]
fn perpendicular_orbits_are_word_search_cylinders() {
    let p = table(0);
    let cyl = billiards::periodic::word_search(&p, 6, None);
    for side in 0..4 {
        let s = p.side(side);
        for u in [1, 3, 5] {
            let foot = s.a.clone() + s.vector().scale(&q(u, 7));
            let PerpOutcome::Periodic(o) = perpendicular_orbit(&p, side, &foot, 50).unwrap() else {
                panic!("square perpendicular orbits close");
            };
            let per = o.periodic.unwrap();
            let word: Vec<usize> = o.events[..per.links].iter().map(|e| e.side_index).collect();
            let key = billiards::periodic::canonical_word(&word);
            assert!(cyl.iter().any(|c| billiards::periodic::canonical_word(&c.word) == key
                && c.direction.parallel(&o.start.v)
                && c.period_links == per.links));
        }
    }
}

#[test]
fn enumerated_diagonals_fold_to_vertex_paths() {
    for i in 0..3 {
        let p = table(i);
        for d in billiards::unfolding::enumerate_generalized_diagonals(&p, 5) {
            let s = PhasePoint::new(p.vertex(d.start_vertex).clone(), d.direction.clone());
            let o = run_links(&p, &s, d.link_count).unwrap();
            let (last, body) = o.events.split_last().unwrap();
            assert!(body.iter().all(|e| !e.singular));
            assert_eq!(last.vertex_index, Some(d.end_vertex()));
        }
    }
}
