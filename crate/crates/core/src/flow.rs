//! The billiard flow: bounce-to-bounce stepping, vertex continuation,
//! orbit recording and period detection.

use crate::error::FlowError;
use crate::geom::{ray_segment_intersection, Direction, Point, RayHit, Segment};
use crate::periodic::holonomy_closes;
use crate::polygon::{Containment, FloorSet, Polygon};
use crate::scalar::{angle_distance, Scalar};

/// Float near-return threshold for positions (table units).
pub const RETURN_POSITION_TOLERANCE: f64 = 1e-6;
/// Float near-return threshold for directions (radians).
pub const RETURN_ANGLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct PhasePoint<S> {
    pub q: Point<S>,
    pub v: Direction<S>,
    pub floor_index: Option<usize>,
}

impl<S: Scalar> PartialEq for PhasePoint<S> {
    fn eq(&self, o: &Self) -> bool {
        self.q == o.q && self.v == o.v && self.floor_index == o.floor_index
    }
}

impl<S: Scalar> PartialEq for BounceEvent<S> {
    fn eq(&self, o: &Self) -> bool {
        self.hit == o.hit
            && self.side_index == o.side_index
            && self.incoming == o.incoming
            && self.outgoing == o.outgoing
            && self.singular == o.singular
            && self.vertex_index == o.vertex_index
            && self.reflections == o.reflections
    }
}

impl<S: Scalar> PhasePoint<S> {
    pub fn new(q: Point<S>, v: Direction<S>) -> Self {
        PhasePoint { q, v, floor_index: None }
    }

    pub fn reversed(&self) -> Self {
        PhasePoint::new(self.q.clone(), self.v.reversed())
    }
}

#[derive(Debug, Clone)]
pub struct BounceEvent<S> {
    pub hit: Point<S>,
    pub side_index: usize,
    pub incoming: Direction<S>,
    pub outgoing: Direction<S>,
    pub singular: bool,
    pub vertex_index: Option<usize>,
    /// Sides reflected in, in order. One entry for a regular bounce; a vertex
    /// continuation may reflect several times or (at a reflex vertex) not at all.
    pub reflections: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Period {
    pub links: usize,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct Orbit<S> {
    pub start: PhasePoint<S>,
    pub events: Vec<BounceEvent<S>>,
    /// `links[i]` ends at `events[i].hit`. A periodic orbit started in the
    /// interior carries one extra closing link back to the start point, so
    /// the links always form one full period.
    pub links: Vec<Segment<S>>,
    pub geometric_length: f64,
    pub periodic: Option<Period>,
}

impl<S: Scalar> Orbit<S> {
    /// Flattened reflection word of the recorded events.
    pub fn word(&self) -> Vec<usize> {
        self.events.iter().flat_map(|e| e.reflections.iter().copied()).collect()
    }

    pub fn has_singular_event(&self) -> bool {
        self.events.iter().any(|e| e.singular)
    }
}

/// Checks that `s` lies in the closed table and, on the boundary, points into it.
pub fn validate<S: Scalar>(p: &Polygon<S>, s: &PhasePoint<S>) -> Result<(), FlowError> {
    match p.contains(&s.q) {
        Containment::Inside => Ok(()),
        Containment::Outside => Err(FlowError::InvalidPhasePoint),
        Containment::Boundary(side) => {
            let ok = match p.vertex_index(&s.q) {
                Some(vi) => p.points_inward_at_vertex(vi, s.v.vec()),
                None => s.v.vec().dot(&p.inward_normal(side)).is_pos(),
            };
            if ok {
                Ok(())
            } else {
                Err(FlowError::InvalidPhasePoint)
            }
        }
    }
}

/// Nearest boundary hit of the open ray from `q` in direction `v`.
pub fn first_hit<S: Scalar>(p: &Polygon<S>, q: &Point<S>, v: &Direction<S>) -> Option<(usize, RayHit<S>)> {
    let mut best: Option<(usize, RayHit<S>)> = None;
    for (i, side) in p.sides().iter().enumerate() {
        if let Some(h) = ray_segment_intersection(q, v, side) {
            let better = match &best {
                None => true,
                Some((_, b)) => h.t < b.t,
            };
            if better {
                best = Some((i, h));
            }
        }
    }
    best
}

fn inward_or_sliding<S: Scalar>(p: &Polygon<S>, vi: usize, w: &Point<S>) -> bool {
    let na = p.inward_normal(p.side_into(vi));
    let nb = p.inward_normal(p.side_out_of(vi));
    let (da, db) = (w.dot(&na), w.dot(&nb));
    if p.is_convex_at(vi) {
        !da.is_neg() && !db.is_neg() && !(da.is_zero_tol() && db.is_zero_tol())
    } else {
        da.is_pos() || db.is_pos()
    }
}

/// Continuation at a vertex by left-continuity.
///
/// The limiting trajectory is that of rays shifted toward the side entering
/// the vertex (counterclockwise order), so they strike that side just before
/// the corner. Those rays reflect there and then keep bouncing inside the
/// corner wedge until they point back into the table; the limit of that
/// reflection sequence is the continuation. If the incoming ray does not head
/// through the entering side (possible only at a reflex vertex), the shifted
/// rays graze past the corner and the direction is unchanged.
pub fn vertex_continuation<S: Scalar>(
    p: &Polygon<S>,
    vi: usize,
    incoming: &Direction<S>,
) -> Result<(Vec<usize>, Direction<S>), FlowError> {
    let a = p.side_into(vi);
    let b = p.side_out_of(vi);
    let na = p.inward_normal(a);
    let mut next = if incoming.vec().dot(&na).is_neg() {
        a
    } else if inward_or_sliding(p, vi, incoming.vec()) {
        return Ok((Vec::new(), incoming.clone()));
    } else {
        b
    };
    let limit = 4 * p.angle_lcm().unwrap_or(64) as usize + 8;
    let mut w = incoming.clone();
    let mut refl = Vec::new();
    for _ in 0..limit {
        w = p.reflection(next).apply_dir(&w);
        refl.push(next);
        if inward_or_sliding(p, vi, w.vec()) {
            return Ok((refl, w));
        }
        next = if next == a { b } else { a };
    }
    Err(FlowError::VertexLoop(vi))
}

/// Advances to the nearest boundary hit and applies the mirror law.
pub fn step<S: Scalar>(p: &Polygon<S>, s: &PhasePoint<S>) -> Result<(BounceEvent<S>, PhasePoint<S>), FlowError> {
    let (side, h) = first_hit(p, &s.q, &s.v).ok_or_else(|| FlowError::Escaped {
        links: 0,
        last: format!("{:?}", s.q.to_f64()),
    })?;
    let (outgoing, reflections, vertex_index) = if h.at_endpoint {
        let vi = p.vertex_index(&h.hit).expect("endpoint hits are vertices");
        let (refl, out) = vertex_continuation(p, vi, &s.v)?;
        (out, refl, Some(vi))
    } else {
        (p.reflection(side).apply_dir(&s.v), vec![side], None)
    };
    let side_index = reflections.first().copied().unwrap_or(side);
    let event = BounceEvent {
        hit: h.hit.clone(),
        side_index,
        incoming: s.v.clone(),
        outgoing: outgoing.clone(),
        singular: vertex_index.is_some(),
        vertex_index,
        reflections,
    };
    Ok((event, PhasePoint::new(h.hit, outgoing)))
}

/// [`step`], keeping `floor_index` pointed at the outgoing direction.
pub fn step_on_floors<S: Scalar>(
    p: &Polygon<S>,
    floors: &FloorSet<S>,
    s: &PhasePoint<S>,
) -> Result<(BounceEvent<S>, PhasePoint<S>), FlowError> {
    let (ev, mut next) = step(p, s)?;
    next.floor_index = floors.index_of(&next.v);
    Ok((ev, next))
}

/// The boundary point the start lies "after": the start itself if it is on
/// the boundary, otherwise the first hit of the backward ray.
fn return_anchor<S: Scalar>(p: &Polygon<S>, s: &PhasePoint<S>) -> Result<Point<S>, FlowError> {
    if p.contains(&s.q) != Containment::Inside {
        return Ok(s.q.clone());
    }
    first_hit(p, &s.q, &s.v.reversed())
        .map(|(_, h)| h.hit)
        .ok_or(FlowError::InvalidPhasePoint)
}

fn returned<S: Scalar>(
    p: &Polygon<S>,
    start: &PhasePoint<S>,
    anchor: &Point<S>,
    events: &[BounceEvent<S>],
) -> bool {
    let last = match events.last() {
        Some(e) => e,
        None => return false,
    };
    if S::EXACT {
        return last.hit == *anchor && last.outgoing.same_ray(&start.v);
    }
    if last.hit.dist(anchor) > RETURN_POSITION_TOLERANCE
        || angle_distance(last.outgoing.angle(), start.v.angle()) > RETURN_ANGLE_TOLERANCE
    {
        return false;
    }
    let word: Vec<usize> = events.iter().flat_map(|e| e.reflections.iter().copied()).collect();
    holonomy_closes(p, &word, &start.q, &start.v)
}

fn link_lengths<S: Scalar>(links: &[Segment<S>]) -> f64 {
    links.iter().map(|l| l.length()).sum()
}

/// Iterates [`step`] up to `max_links` bounces, stopping at the first return
/// to the start state.
pub fn trace<S: Scalar>(p: &Polygon<S>, s: &PhasePoint<S>, max_links: usize) -> Result<Orbit<S>, FlowError> {
    validate(p, s)?;
    let anchor = return_anchor(p, s)?;
    let mut events = Vec::new();
    let mut links = Vec::new();
    let mut cur = s.clone();
    let mut periodic = None;
    for i in 0..max_links {
        let (ev, next) = step(p, &cur).map_err(|e| match e {
            FlowError::Escaped { last, .. } => FlowError::Escaped { links: i, last },
            e => e,
        })?;
        links.push(Segment { a: cur.q.clone(), b: ev.hit.clone() });
        events.push(ev);
        cur = next;
        if returned(p, s, &anchor, &events) {
            if !cur.q.approx_eq(&s.q) {
                links.push(Segment { a: cur.q.clone(), b: s.q.clone() });
            }
            periodic = Some(Period {
                links: i + 1,
                length: link_lengths(&links),
            });
            break;
        }
    }
    let geometric_length = link_lengths(&links);
    Ok(Orbit {
        start: s.clone(),
        events,
        links,
        geometric_length,
        periodic,
    })
}

/// Exactly `n` links with no period detection.
pub fn run_links<S: Scalar>(p: &Polygon<S>, s: &PhasePoint<S>, n: usize) -> Result<Orbit<S>, FlowError> {
    validate(p, s)?;
    let mut events = Vec::with_capacity(n);
    let mut links = Vec::with_capacity(n);
    let mut cur = s.clone();
    for i in 0..n {
        let (ev, next) = step(p, &cur).map_err(|e| match e {
            FlowError::Escaped { last, .. } => FlowError::Escaped { links: i, last },
            e => e,
        })?;
        links.push(Segment { a: cur.q.clone(), b: ev.hit.clone() });
        events.push(ev);
        cur = next;
    }
    let geometric_length = link_lengths(&links);
    Ok(Orbit {
        start: s.clone(),
        events,
        links,
        geometric_length,
        periodic: None,
    })
}

/// Smallest period visible in the recorded prefix of `o`.
pub fn detect_period<S: Scalar>(p: &Polygon<S>, o: &Orbit<S>) -> Option<Period> {
    let anchor = return_anchor(p, &o.start).ok()?;
    for k in 1..=o.events.len() {
        if returned(p, &o.start, &anchor, &o.events[..k]) {
            let mut length: f64 = o.links[..k].iter().map(|l| l.length()).sum();
            length += anchor.dist(&o.start.q);
            return Some(Period { links: k, length });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::polygon::shapes::*;
    use crate::scalar::Rational;

    type Q = Rational;

    fn q(n: i64, d: i64) -> Q {
        Q::from_frac(n, d)
    }

    fn pp(x: Q, y: Q, dx: i64, dy: i64) -> PhasePoint<Q> {
        PhasePoint::new(Point::new(x, y), Direction::from_ints(dx, dy).unwrap())
    }

    #[test]
    fn diagonal_bounce_off_right_side() {
        let sq = unit_square::<Q>();
        let (ev, next) = step(&sq, &pp(q(1, 2), q(0, 1), 1, 1)).unwrap();
        assert_eq!(ev.hit, Point::new(q(1, 1), q(1, 2)));
        assert_eq!(ev.side_index, 1);
        assert!(!ev.singular);
        assert_eq!(next.v, Direction::from_ints(-1, 1).unwrap());
    }

    #[test]
    fn corner_hit_is_singular() {
        let sq = unit_square::<Q>();
        let (ev, next) = step(&sq, &pp(q(1, 2), q(1, 2), 1, 1)).unwrap();
        assert!(ev.singular);
        assert_eq!(ev.vertex_index, Some(2));
        assert_eq!(ev.hit, Point::from_ints(1, 1));
        // Right side enters vertex 2 counterclockwise, so it is reflected in first.
        assert_eq!(ev.reflections, vec![1, 2]);
        assert_eq!(next.v, Direction::from_ints(-1, -1).unwrap());
    }

    #[test]
    fn normal_incidence_reverses() {
        let sq = unit_square::<Q>();
        let (ev, next) = step(&sq, &pp(q(1, 2), q(1, 2), 1, 0)).unwrap();
        assert_eq!(ev.hit, Point::new(q(1, 1), q(1, 2)));
        assert_eq!(next.v, Direction::from_ints(-1, 0).unwrap());
    }

    #[test]
    fn vertical_bouncer_period() {
        let sq = unit_square::<Q>();
        let o = trace(&sq, &pp(q(1, 2), q(0, 1), 0, 1), 10).unwrap();
        let per = o.periodic.unwrap();
        assert_eq!(per.links, 2);
        assert!((per.length - 2.0).abs() < 1e-12);
        assert_eq!(detect_period(&sq, &o), Some(per));
    }

    #[test]
    fn diamond_period() {
        let sq = unit_square::<Q>();
        let o = trace(&sq, &pp(q(1, 2), q(0, 1), 1, 1), 10).unwrap();
        let per = o.periodic.unwrap();
        assert_eq!(per.links, 4);
        assert!((per.length - 2.0 * 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn slope_two_orbit_has_six_links() {
        let sq = unit_square::<Q>();
        let o = trace(&sq, &pp(q(1, 4), q(0, 1), 1, 2), 100).unwrap();
        assert_eq!(o.periodic.unwrap().links, 6);
        assert!(!o.has_singular_event());
        // Brute-force check: first time the state repeats.
        let mut cur = pp(q(1, 4), q(0, 1), 1, 2);
        for k in 1..=6 {
            cur = step(&sq, &cur).unwrap().1;
            assert_eq!(cur.q == Point::new(q(1, 4), q(0, 1)) && cur.v == Direction::from_ints(1, 2).unwrap(), k == 6);
        }
    }

    #[test]
    fn slope_two_through_corner_retraces() {
        let sq = unit_square::<Q>();
        let o = trace(&sq, &pp(q(1, 2), q(0, 1), 1, 2), 100).unwrap();
        assert_eq!(o.periodic.unwrap().links, 4);
        assert!(o.has_singular_event());
    }

    #[test]
    fn interior_start_closes_with_extra_link() {
        let sq = unit_square::<Q>();
        let o = trace(&sq, &pp(q(1, 3), q(1, 4), 0, 1), 10).unwrap();
        assert_eq!(o.periodic.unwrap().links, 2);
        assert_eq!(o.links.len(), 3);
        assert!((o.geometric_length - 2.0).abs() < 1e-12);
    }

    #[test]
    fn irrational_slope_prefix_is_not_periodic() {
        let sq = unit_square::<f64>();
        let s = PhasePoint::new(Point::new(0.5, 0.0), Direction::new(1.0, 2f64.sqrt()).unwrap());
        let o = trace(&sq, &s, 1000).unwrap();
        assert!(o.periodic.is_none());
        assert_eq!(o.events.len(), 1000);
        assert_eq!(detect_period(&sq, &o), None);
    }

    #[test]
    fn outside_start_rejected() {
        let sq = unit_square::<Q>();
        assert_eq!(
            trace(&sq, &pp(q(2, 1), q(1, 2), 1, 0), 3).unwrap_err(),
            FlowError::InvalidPhasePoint
        );
        assert_eq!(
            trace(&sq, &pp(q(1, 2), q(0, 1), 0, -1), 3).unwrap_err(),
            FlowError::InvalidPhasePoint
        );
    }

    #[test]
    fn reflex_vertex_graze_passes_straight() {
        let l = l_shape::<Q>();
        // Travels along y = x - 1/2 ... choose a ray through the reflex corner (1,1).
        let (ev, next) = step(&l, &pp(q(1, 2), q(3, 2), 1, -1)).unwrap();
        assert_eq!(ev.vertex_index, Some(3));
        assert!(ev.singular);
        // Incoming direction heads away from side 2 ((2,1)->(1,1)) so it grazes past.
        assert_eq!(next.v, Direction::from_ints(1, -1).unwrap());
        assert!(ev.reflections.is_empty());
    }

    #[test]
    fn floor_tracking() {
        let sq = unit_square::<Q>();
        let d = Direction::from_ints(1, 2).unwrap();
        let fs = crate::polygon::direction_floors(&sq, &d).unwrap();
        let mut cur = PhasePoint { floor_index: Some(0), ..pp(q(1, 3), q(0, 1), 1, 2) };
        for _ in 0..20 {
            cur = step_on_floors(&sq, &fs, &cur).unwrap().1;
            assert!(cur.floor_index.is_some());
        }
    }
}
