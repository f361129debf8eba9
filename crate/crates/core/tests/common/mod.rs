#![allow(dead_code)]

use std::sync::OnceLock;

use billiards::flow::{run_links, trace, PhasePoint};
use billiards::geom::{reflect_across_line, reflect_direction};
use billiards::periodic::{word_search, Cylinder};
use billiards::polygon::{direction_floors, shapes, Containment};
use billiards::stats::links_discrepancy;
use billiards::{Direction, Point, Polygon, Rational, Scalar, Segment};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub type Q = Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_frac(n, d)
}

pub fn table(i: usize) -> Polygon<Q> {
    match i % 3 {
        0 => shapes::unit_square(),
        1 => shapes::right_isosceles(),
        _ => shapes::l_shape(),
    }
}

fn interior_anchor(i: usize) -> Point<Q> {
    match i % 3 {
        1 => Point::new(q(1, 4), q(1, 4)),
        _ => Point::new(q(1, 2), q(1, 2)),
    }
}

/// Moves `x` toward a known interior point until it is strictly inside.
pub fn pull_inside(i: usize, x: Point<Q>) -> Point<Q> {
    let p = table(i);
    let anchor = interior_anchor(i);
    let mut x = x;
    while p.contains(&x) != Containment::Inside {
        x = x.midpoint(&anchor);
    }
    x
}

pub fn interior_point(i: usize) -> impl Strategy<Value = Point<Q>> {
    (1i64..200, 1i64..200).prop_map(move |(a, b)| {
        let p = table(i);
        let (lo, hi) = p.bbox();
        let x = lo.x.clone() + (hi.x.clone() - lo.x.clone()) * q(a, 200);
        let y = lo.y.clone() + (hi.y.clone() - lo.y.clone()) * q(b, 200);
        pull_inside(i, Point::new(x, y))
    })
}

pub fn direction() -> impl Strategy<Value = Direction<Q>> {
    (-60i64..=60, -60i64..=60)
        .prop_filter("nonzero", |(a, b)| *a != 0 || *b != 0)
        .prop_map(|(a, b)| Direction::from_ints(a, b).unwrap())
}

/// `(table index, start)` with the start strictly inside.
pub fn phase_point() -> impl Strategy<Value = (usize, PhasePoint<Q>)> {
    (0usize..3).prop_flat_map(|i| (Just(i), interior_point(i), direction()).prop_map(|(i, x, d)| (i, PhasePoint::new(x, d))))
}

pub fn segment() -> impl Strategy<Value = Segment<Q>> {
    (-50i64..50, -50i64..50, -50i64..50, -50i64..50, 1i64..9)
        .prop_filter("nondegenerate", |(a, b, c, d, _)| (a, b) != (c, d))
        .prop_map(|(a, b, c, d, den)| Segment {
            a: Point::new(q(a, den), q(b, den)),
            b: Point::new(q(c, den), q(d, den)),
        })
}

pub fn check_reflection_involution(s: &Segment<Q>, x: &Point<Q>) -> Result<(), TestCaseError> {
    let r = reflect_across_line(s).unwrap();
    let rr = r.compose(&r);
    prop_assert!(rr.linear_is_identity());
    prop_assert_eq!(rr.apply(x), x.clone());
    prop_assert_eq!(r.apply(&s.a), s.a.clone());
    prop_assert_eq!(r.apply(&s.b), s.b.clone());
    Ok(())
}

/// Equal angle to the mirror: same dot with the side, opposite cross.
pub fn check_mirror_law(s: &Segment<Q>, d: &Direction<Q>) -> Result<(), TestCaseError> {
    let e = s.vector();
    let r = reflect_direction(d, s).unwrap();
    let scale = r.vec().norm2() / d.vec().norm2();
    // Directions are stored up to positive scaling; compare squared ratios.
    let (d_dot, r_dot) = (d.vec().dot(&e), r.vec().dot(&e));
    let (d_cr, r_cr) = (d.vec().cross(&e), r.vec().cross(&e));
    prop_assert_eq!(r_dot.clone() * r_dot.clone(), scale.clone() * d_dot.clone() * d_dot.clone());
    prop_assert_eq!(r_cr.clone() * r_cr.clone(), scale * d_cr.clone() * d_cr.clone());
    prop_assert!(!(r_dot * d_dot).is_neg());
    prop_assert!(!(r_cr * d_cr).is_pos());
    Ok(())
}

/// Mirror law at every regular bounce of a traced orbit.
pub fn check_orbit_mirror_law(i: usize, s: &PhasePoint<Q>, links: usize) -> Result<(), TestCaseError> {
    let p = table(i);
    let o = run_links(&p, s, links).unwrap();
    for ev in o.events.iter().filter(|e| !e.singular) {
        let e = p.side(ev.side_index).vector();
        let (a, b) = (ev.incoming.vec(), ev.outgoing.vec());
        let (ad, bd) = (a.dot(&e), b.dot(&e));
        prop_assert_eq!(ad.clone() * ad.clone() * b.norm2(), bd.clone() * bd.clone() * a.norm2());
        prop_assert_eq!(ad.sign_cmp(), bd.sign_cmp());
        prop_assert_eq!(a.cross(&e).sign_cmp(), b.cross(&e).sign_cmp().reverse());
    }
    Ok(())
}

/// Tracing back from the end of `k` links retraces them in reverse.
pub fn check_time_reversal(i: usize, s: &PhasePoint<Q>, links: usize) -> Result<(), TestCaseError> {
    let p = table(i);
    let fwd = run_links(&p, s, links).unwrap();
    prop_assume!(!fwd.has_singular_event());
    let last = fwd.events.last().unwrap();
    let back_start = PhasePoint::new(last.hit.clone(), last.incoming.reversed());
    let back = run_links(&p, &back_start, links).unwrap();
    // The backward run starts at the last bounce, so its first link is the
    // reverse of the forward run's last link, and so on; its last link ends
    // on the boundary behind the forward start.
    for k in 0..links - 1 {
        let f = &fwd.links[links - 1 - k];
        let b = &back.links[k];
        prop_assert_eq!(&b.a, &f.b);
        prop_assert_eq!(&b.b, &f.a);
    }
    let first = &back.links[links - 1];
    prop_assert!(first.contains(&s.q));
    Ok(())
}

pub fn check_floor_closure(i: usize, s: &PhasePoint<Q>, links: usize) -> Result<(), TestCaseError> {
    let p = table(i);
    let floors = direction_floors(&p, &s.v).unwrap();
    prop_assert!(floors.floor_count() <= 2 * p.angle_lcm().unwrap() as usize);
    let o = run_links(&p, s, links).unwrap();
    for ev in &o.events {
        prop_assert!(floors.contains(&ev.outgoing), "{:?} left the floors", ev.outgoing);
    }
    Ok(())
}

/// Cylinders of the square and the right isosceles triangle with words of
/// length ≤ 10.
pub fn cylinder_pool() -> &'static Vec<(usize, Cylinder<Q>)> {
    static POOL: OnceLock<Vec<(usize, Cylinder<Q>)>> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut out = Vec::new();
        for i in 0..2 {
            for c in word_search(&table(i), 10, None) {
                out.push((i, c));
            }
        }
        out
    })
}

/// The representative closes with the cylinder's word, and so does a
/// parallel orbit through a random point of the band.
pub fn check_cylinder(pick: usize, piece: usize, w: [i64; 4]) -> Result<(), TestCaseError> {
    let pool = cylinder_pool();
    let (i, c) = &pool[pick % pool.len()];
    let p = table(*i);
    let o = trace(&p, &c.representative, c.period_links + 1).unwrap();
    prop_assert_eq!(o.periodic.map(|x| x.links), Some(c.period_links));
    let word: Vec<usize> = o.events.iter().map(|e| e.side_index).collect();
    prop_assert_eq!(&word[..c.period_links], &c.word[..]);

    let pieces = c.folded_pieces(&p);
    let k = piece % pieces.len();
    let quad = &pieces[k];
    let total: i64 = w.iter().sum();
    let mut x = Point::new(Q::from_int(0), Q::from_int(0));
    for (corner, wi) in quad.iter().zip(w) {
        x = x + corner.scale(&q(wi, total));
    }
    prop_assume!(p.contains(&x) == Containment::Inside);
    let copies = billiards::unfolding::copies_for_word(&p, &c.word);
    let dir = copies[k].inverse().apply_dir(&c.direction);
    let o = trace(&p, &PhasePoint::new(x, dir), c.period_links + 1).unwrap();
    prop_assert_eq!(o.periodic.map(|x| x.links), Some(c.period_links));
    prop_assert!(!o.has_singular_event());
    Ok(())
}

/// Two orbit pieces that are each within ε on every basis region give a
/// concatenation that is too.
pub fn check_concatenation(a: &PhasePoint<Q>, b: &PhasePoint<Q>, links: usize, eps: f64) -> Result<(), TestCaseError> {
    let p = table(0);
    let la = run_links(&p, a, links).unwrap().links;
    let lb = run_links(&p, b, links).unwrap().links;
    let ra = links_discrepancy(&p, &la, eps).unwrap();
    let rb = links_discrepancy(&p, &lb, eps).unwrap();
    let mut both = la.clone();
    both.extend(lb.iter().cloned());
    let rc = links_discrepancy(&p, &both, eps).unwrap();
    for ((x, y), z) in ra.per_region.iter().zip(&rb.per_region).zip(&rc.per_region) {
        if x.discrepancy < eps && y.discrepancy < eps {
            prop_assert!(z.discrepancy < eps, "region at {:?}", z.region.center.to_f64());
        }
        prop_assert!(z.discrepancy <= x.discrepancy.max(y.discrepancy) + 1e-12);
    }
    Ok(())
}
