//! Periodic orbits: cylinders from translation words, the perpendicular
//! mechanism, and the L-shaped family that avoids one square.

use std::cmp::Ordering;
use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{FlowError, PolygonError};
use crate::flow::{step, trace, BounceEvent, Orbit, PhasePoint};
use crate::geom::{Direction, Isometry, Point, Segment};
use crate::polygon::{direction_floors, floor_group, shapes, Containment, Polygon};
use crate::scalar::{angle_distance, Scalar};
use crate::unfolding::{compose_word, copies_for_word, walk_corridors, Found, SearchLimits, SearchStats, Visit};

/// Float threshold on |cos| between a ray and a side for a perpendicular hit.
pub const PERP_TOLERANCE: f64 = 1e-9;

/// Holonomy test: the reflections of `word` compose to a translation along `v`.
pub fn holonomy_closes<S: Scalar>(p: &Polygon<S>, word: &[usize], q: &Point<S>, v: &Direction<S>) -> bool {
    let h = compose_word(p, word);
    if S::EXACT {
        if !h.linear_is_identity() {
            return false;
        }
        let t = h.apply(q) - q.clone();
        return t.cross(v.vec()).is_zero_tol() && t.dot(v.vec()).is_pos();
    }
    let tol = 1e-6;
    let m = &h.m;
    let lin_ok = (m[0][0].to_f64_lossy() - 1.0).abs() <= tol
        && (m[1][1].to_f64_lossy() - 1.0).abs() <= tol
        && m[0][1].to_f64_lossy().abs() <= tol
        && m[1][0].to_f64_lossy().abs() <= tol;
    if !lin_ok {
        return false;
    }
    let (tx, ty) = (h.apply(q) - q.clone()).to_f64();
    let (vx, vy) = v.unit_f64();
    let len = tx.hypot(ty);
    len > tol && (tx * vy - ty * vx).abs() <= tol * len.max(1.0) && tx * vx + ty * vy > 0.0
}

/// An open band of parallel periodic orbits sharing one side word.
#[derive(Debug, Clone)]
pub struct Cylinder<S> {
    /// Sides hit during one period, starting from the base copy.
    pub word: Vec<usize>,
    pub direction: Direction<S>,
    pub translation: Point<S>,
    /// A point on each boundary line of the unfolded band (base copy
    /// coordinates); both lines run along `translation`.
    pub strip: (Point<S>, Point<S>),
    pub width: f64,
    pub representative: PhasePoint<S>,
    pub period_links: usize,
    pub period_length: f64,
}

impl<S: Scalar> Cylinder<S> {
    fn offset(&self, x: &Point<S>) -> S {
        self.translation.cross(x)
    }

    /// Whether the unfolded point `x` lies strictly inside the band.
    pub fn band_contains(&self, x: &Point<S>) -> bool {
        let (a, b) = (self.offset(&self.strip.0), self.offset(&self.strip.1));
        let o = self.offset(x);
        (o.clone() - a).is_pos() && (b - o).is_pos()
    }

    /// The band cut into one quadrilateral per copy, folded back into the table.
    pub fn folded_pieces(&self, p: &Polygon<S>) -> Vec<[Point<S>; 4]> {
        let l = self.word.len();
        let copies = copies_for_word(p, &self.word);
        let back = Isometry::translation(Point::zero() - self.translation.clone());
        let t = &self.translation;
        let (lo, hi) = (&self.strip.0, &self.strip.1);
        let mut out = Vec::with_capacity(l);
        for k in 0..l {
            let entry = if k == 0 {
                p.side(self.word[l - 1]).map(&copies[l - 1]).map(&back)
            } else {
                p.side(self.word[k - 1]).map(&copies[k - 1])
            };
            let exit = p.side(self.word[k]).map(&copies[k]);
            let cut = |base: &Point<S>, s: &Segment<S>| line_crossing(base, t, s).unwrap_or_else(|| s.a.clone());
            let inv = copies[k].inverse();
            out.push([
                inv.apply(&cut(lo, &entry)),
                inv.apply(&cut(lo, &exit)),
                inv.apply(&cut(hi, &exit)),
                inv.apply(&cut(hi, &entry)),
            ]);
        }
        out
    }

    /// Euclidean distance from a table point to the folded band.
    pub fn distance_to(&self, p: &Polygon<S>, q: &Point<S>) -> f64 {
        let qf = q.to_f64();
        self.folded_pieces(p)
            .iter()
            .map(|quad| {
                let pts: Vec<(f64, f64)> = quad.iter().map(|x| x.to_f64()).collect();
                quad_distance(&pts, qf)
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// One-line record: word, direction, translation, width, period links, period length.
    pub fn to_record(&self) -> String {
        let word = self.word.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",");
        format!(
            "{} {}:{} {}:{} {} {} {}",
            word,
            self.direction.dx().to_exact_string(),
            self.direction.dy().to_exact_string(),
            self.translation.x.to_exact_string(),
            self.translation.y.to_exact_string(),
            self.width,
            self.period_links,
            self.period_length
        )
    }
}

fn quad_distance(pts: &[(f64, f64)], q: (f64, f64)) -> f64 {
    let n = pts.len();
    let mut sign = 0.0f64;
    let mut inside = true;
    let mut best = f64::INFINITY;
    for i in 0..n {
        let (a, b) = (pts[i], pts[(i + 1) % n]);
        let (ex, ey) = (b.0 - a.0, b.1 - a.1);
        let c = ex * (q.1 - a.1) - ey * (q.0 - a.0);
        if c != 0.0 {
            if sign == 0.0 {
                sign = c.signum();
            } else if c.signum() != sign {
                inside = false;
            }
        }
        let len2 = ex * ex + ey * ey;
        let u = if len2 > 0.0 { (((q.0 - a.0) * ex + (q.1 - a.1) * ey) / len2).clamp(0.0, 1.0) } else { 0.0 };
        best = best.min((a.0 + u * ex - q.0).hypot(a.1 + u * ey - q.1));
    }
    if inside {
        0.0
    } else {
        best
    }
}

/// Where the line through `base` along `t` crosses the line of `s`.
fn line_crossing<S: Scalar>(base: &Point<S>, t: &Point<S>, s: &Segment<S>) -> Option<Point<S>> {
    let (oa, ob) = (t.cross(&(s.a.clone() - base.clone())), t.cross(&(s.b.clone() - base.clone())));
    let den = oa.clone() - ob;
    if den.is_zero_tol() {
        return None;
    }
    let u = oa / den;
    Some(s.a.clone() + s.vector().scale(&u))
}

/// `(min, max)` of two scalars.
fn ordered<S: Scalar>(a: S, b: S) -> (S, S) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Representative phase point on the line at offset `c`: midway between the
/// base-copy entry and exit crossings.
fn representative_at<S: Scalar>(p: &Polygon<S>, word: &[usize], t: &Point<S>, c: &S) -> Option<PhasePoint<S>> {
    let base = t.perp().scale(&(c.clone() / t.norm2()));
    let a = line_crossing(&base, t, p.side(word[word.len() - 1]))?;
    let b = line_crossing(&base, t, p.side(word[0]))?;
    Some(PhasePoint::new(a.midpoint(&b), Direction::from_vec(t.clone()).ok()?))
}

/// Traces `s` and checks that it closes after exactly `word.len()` regular
/// bounces along `word`.
fn verify_line<S: Scalar>(p: &Polygon<S>, word: &[usize], s: &PhasePoint<S>) -> Option<Orbit<S>> {
    if p.contains(&s.q) != Containment::Inside {
        return None;
    }
    let o = trace(p, s, word.len() + 1).ok()?;
    let per = o.periodic?;
    let ok = per.links == word.len()
        && o.events.iter().zip(word).all(|(e, &w)| !e.singular && e.side_index == w);
    ok.then_some(o)
}

/// All cylinders realizing the cyclic `word`, as maximal open bands.
///
/// Returns nothing unless the word composes to a nonzero translation whose
/// line can actually pass through every listed side.
pub fn cylinder_from_word<S: Scalar>(p: &Polygon<S>, word: &[usize]) -> Vec<Cylinder<S>> {
    let l = word.len();
    if l < 2 || word.iter().any(|&w| w >= p.len()) {
        return Vec::new();
    }
    let copies = copies_for_word(p, word);
    let h = &copies[l];
    if !h.linear_is_identity() || h.t.norm2().is_zero_tol() {
        return Vec::new();
    }
    let t = h.t.clone();
    let off = |x: &Point<S>| t.cross(x);

    let mut lo: Option<S> = None;
    let mut hi: Option<S> = None;
    for k in 0..l {
        let s = p.side(word[k]).map(&copies[k]);
        let (a, b) = ordered(off(&s.a), off(&s.b));
        if lo.as_ref().is_none_or(|x| a > *x) {
            lo = Some(a);
        }
        if hi.as_ref().is_none_or(|x| b < *x) {
            hi = Some(b);
        }
    }
    let (lo, hi) = (lo.expect("l ≥ 2"), hi.expect("l ≥ 2"));
    if !(hi.clone() - lo.clone()).is_pos() {
        return Vec::new();
    }

    let mut cuts: Vec<S> = Vec::new();
    for c in &copies[..l] {
        for v in p.vertices() {
            let o = off(&c.apply(v));
            if (o.clone() - lo.clone()).is_pos() && (hi.clone() - o.clone()).is_pos() {
                cuts.push(o);
            }
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(Ordering::Equal));
    cuts.dedup_by(|a, b| a.approx_eq(b));
    let mut bounds = vec![lo];
    bounds.extend(cuts);
    bounds.push(hi);

    let check = |c: &S| representative_at(p, word, &t, c).and_then(|s| verify_line(p, word, &s).map(|_| s));

    // Verified open pieces, merged across cut lines that are themselves regular.
    let mut bands: Vec<(S, S)> = Vec::new();
    let mut open_right = false;
    for w in bounds.windows(2) {
        let mid = (w[0].clone() + w[1].clone()) * S::half();
        if check(&mid).is_none() {
            open_right = false;
            continue;
        }
        if open_right && check(&w[0]).is_some() {
            bands.last_mut().expect("open band").1 = w[1].clone();
        } else {
            bands.push((w[0].clone(), w[1].clone()));
        }
        open_right = true;
    }

    let norm = t.norm();
    let norm2 = t.norm2();
    let dir = Direction::from_vec(t.clone()).expect("nonzero translation");
    bands
        .into_iter()
        .filter_map(|(a, b)| {
            let mid = (a.clone() + b.clone()) * S::half();
            let rep = check(&mid)?;
            Some(Cylinder {
                word: word.to_vec(),
                direction: dir.clone(),
                translation: t.clone(),
                strip: (t.perp().scale(&(a.clone() / norm2.clone())), t.perp().scale(&(b.clone() / norm2.clone()))),
                width: (b - a).to_f64_lossy() / norm,
                representative: rep,
                period_links: l,
                period_length: norm,
            })
        })
        .collect()
}

/// Smallest rotation of `w` or of its reverse.
pub fn canonical_word(w: &[usize]) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    let mut rev = w.to_vec();
    rev.reverse();
    for cand in [w.to_vec(), rev] {
        for r in 0..cand.len().max(1) {
            let mut x = cand.clone();
            x.rotate_left(r);
            if best.as_ref().is_none_or(|b| x < *b) {
                best = Some(x);
            }
        }
    }
    best.unwrap_or_default()
}

#[derive(Debug, Clone, Copy)]
pub struct WordSearch {
    pub max_word: usize,
    /// `(θ, δ)`: keep cylinders whose direction is within δ of θ.
    pub window: Option<(f64, f64)>,
    /// Corridor nodes to expand, summed over all start vertices.
    pub budget: Option<usize>,
}

/// Searches corridors leaving every vertex for words whose reflections
/// compose to a translation, turning each into verified cylinders. The
/// callback sees every new cylinder and may stop the search.
pub fn word_search_with<S: Scalar, F>(p: &Polygon<S>, opts: WordSearch, mut f: F) -> SearchStats
where
    F: FnMut(&Cylinder<S>) -> Visit,
{
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut tried: HashSet<Vec<usize>> = HashSet::new();
    let mut total = SearchStats::default();
    for v in 0..p.len() {
        let remaining = opts.budget.map(|b| b.saturating_sub(total.expanded));
        if remaining == Some(0) {
            total.budget_exhausted = true;
            break;
        }
        let limits = SearchLimits { max_len: opts.max_word, budget: remaining, window: opts.window };
        let stats = walk_corridors(p, v, limits, |found| {
            let c = match found {
                Found::Corridor(c) => c,
                Found::Diagonal(_) => return Visit::Continue,
            };
            let word = &c.word;
            if word.len() < 2 || !tried.insert(word.clone()) {
                return Visit::Continue;
            }
            let h = c.copies.last().expect("nonempty").compose(p.reflection(*word.last().expect("nonempty")));
            if !h.linear_is_identity() {
                return Visit::Continue;
            }
            if let Some((theta, delta)) = opts.window {
                match Direction::from_vec(h.t.clone()) {
                    Ok(d) if angle_distance(d.angle(), theta) < delta => {}
                    _ => return Visit::Continue,
                }
            }
            let key = canonical_word(word);
            if seen.contains(&key) {
                return Visit::Continue;
            }
            let cyls = cylinder_from_word(p, word);
            if cyls.is_empty() {
                return Visit::Continue;
            }
            seen.insert(key);
            for cyl in &cyls {
                if f(cyl) == Visit::Stop {
                    return Visit::Stop;
                }
            }
            Visit::Continue
        });
        total.expanded += stats.expanded;
        total.budget_exhausted |= stats.budget_exhausted;
        if stats.stopped {
            total.stopped = true;
            break;
        }
    }
    total
}

/// Cylinders with words of length ≤ `max_word`, sorted by period then word.
pub fn word_search<S: Scalar>(p: &Polygon<S>, max_word: usize, window: Option<(f64, f64)>) -> Vec<Cylinder<S>> {
    let mut out = Vec::new();
    word_search_with(p, WordSearch { max_word, window, budget: None }, |c| {
        out.push(c.clone());
        Visit::Continue
    });
    out.sort_by(|a, b| (a.period_links, &a.word).cmp(&(b.period_links, &b.word)));
    out
}

/// Angles of the images of `phi` under the floor group; empty when the
/// table is not rational.
pub fn floor_angles<S: Scalar>(p: &Polygon<S>, phi: f64) -> Vec<f64> {
    let Ok(group) = floor_group(p) else { return Vec::new() };
    let (c, s) = (phi.cos(), phi.sin());
    let mut out: Vec<f64> = Vec::new();
    for g in &group {
        let m = |i: usize, j: usize| g.m[i][j].to_f64_lossy();
        let a = (m(1, 0) * c + m(1, 1) * s).atan2(m(0, 0) * c + m(0, 1) * s).rem_euclid(std::f64::consts::TAU);
        if !out.iter().any(|b| angle_distance(a, *b) < 1e-12) {
            out.push(a);
        }
    }
    out
}

/// A piece of a cylinder near a phase point, with the folded direction
/// (possibly the reverse of the band's orientation) that matched.
#[derive(Debug, Clone)]
pub struct NearHit<S> {
    pub cylinder: Cylinder<S>,
    pub piece: usize,
    pub direction: Direction<S>,
}

/// A cylinder meeting the `delta`-ball around `q` in a piece whose folded
/// direction, in either orientation, is within `delta` of `phi`. Each floor
/// image of `phi` gets its own windowed search; `budget` is shared.
pub fn periodic_near<S: Scalar>(
    p: &Polygon<S>,
    q: &Point<S>,
    phi: f64,
    delta: f64,
    max_word: usize,
    budget: usize,
) -> Result<(Option<NearHit<S>>, SearchStats), PolygonError> {
    let targets = floor_angles(p, phi);
    if targets.is_empty() {
        return Err(PolygonError::NotRational);
    }
    let qf = q.to_f64();
    let mut total = SearchStats::default();
    let mut hit = None;
    for target in targets {
        let left = budget.saturating_sub(total.expanded);
        if left == 0 {
            total.budget_exhausted = true;
            break;
        }
        let opts = WordSearch { max_word, window: Some((target, delta)), budget: Some(left) };
        let stats = word_search_with(p, opts, |c| {
            let copies = copies_for_word(p, &c.word);
            for (k, quad) in c.folded_pieces(p).iter().enumerate() {
                let d = copies[k].inverse().apply_dir(&c.direction);
                let Some(d) = [d.clone(), d.reversed()].into_iter().find(|d| angle_distance(d.angle(), phi) < delta) else {
                    continue;
                };
                let pts: Vec<(f64, f64)> = quad.iter().map(|x| x.to_f64()).collect();
                if quad_distance(&pts, qf) < delta {
                    hit = Some(NearHit { cylinder: c.clone(), piece: k, direction: d });
                    return Visit::Stop;
                }
            }
            Visit::Continue
        });
        total.expanded += stats.expanded;
        total.budget_exhausted |= stats.budget_exhausted;
        if stats.stopped {
            total.stopped = true;
            break;
        }
    }
    Ok((hit, total))
}

/// The maximal open band of orbits parallel to the periodic orbit `o` with
/// the same word.
pub fn periodic_strip<S: Scalar>(p: &Polygon<S>, o: &Orbit<S>) -> Result<Cylinder<S>, FlowError> {
    let per = o.periodic.ok_or(FlowError::NotPeriodic)?;
    let events = &o.events[..per.links];
    if events.iter().any(|e| e.singular) {
        return Err(FlowError::SingularOrbit);
    }
    let word: Vec<usize> = events.iter().map(|e| e.side_index).collect();
    let cyls = cylinder_from_word(p, &word);
    let q0 = &o.start.q;
    cyls.into_iter()
        .find(|c| c.band_contains(q0) && c.direction.same_ray(&o.start.v))
        .ok_or(FlowError::NotPeriodic)
}

/// Outcome of launching the inward normal from a foot point.
#[derive(Debug, Clone)]
pub enum PerpOutcome<S> {
    Periodic(Orbit<S>),
    /// The normal reaches `vertex` before any perpendicular hit; `orbit`
    /// ends there.
    Singular { vertex: usize, orbit: Orbit<S> },
    Undecided { links: usize },
}

impl<S> PerpOutcome<S> {
    pub fn is_periodic(&self) -> bool {
        matches!(self, PerpOutcome::Periodic(_))
    }
}

fn perpendicular_hit<S: Scalar>(p: &Polygon<S>, ev: &BounceEvent<S>) -> bool {
    let tangent = p.side(ev.side_index).vector();
    if S::EXACT {
        return ev.incoming.vec().dot(&tangent).is_zero_tol();
    }
    let (dx, dy) = ev.incoming.unit_f64();
    let (tx, ty) = tangent.to_f64();
    ((dx * tx + dy * ty) / tx.hypot(ty)).abs() <= PERP_TOLERANCE
}

fn open_side_contains<S: Scalar>(p: &Polygon<S>, side: usize, x: &Point<S>) -> bool {
    let s = p.side(side);
    s.contains(x) && !x.approx_eq(&s.a) && !x.approx_eq(&s.b)
}

fn inward_normal_dir<S: Scalar>(p: &Polygon<S>, side: usize) -> Direction<S> {
    Direction::from_vec(p.inward_normal(side)).expect("sides are nondegenerate")
}

/// Follows the inward normal from `foot` until it either meets a side at a
/// right angle (the path then retraces itself and closes) or runs into a vertex.
pub fn perpendicular_orbit<S: Scalar>(
    p: &Polygon<S>,
    side: usize,
    foot: &Point<S>,
    max_links: usize,
) -> Result<PerpOutcome<S>, FlowError> {
    if side >= p.len() {
        return Err(FlowError::BadSide(side));
    }
    if !open_side_contains(p, side, foot) {
        return Err(FlowError::BadFoot);
    }
    let start = PhasePoint::new(foot.clone(), inward_normal_dir(p, side));
    let mut cur = start.clone();
    let mut events = Vec::new();
    let mut links = Vec::new();
    for m in 1..=max_links {
        let (ev, next) = step(p, &cur)?;
        links.push(Segment { a: cur.q.clone(), b: ev.hit.clone() });
        let singular = ev.vertex_index;
        let perp = perpendicular_hit(p, &ev);
        events.push(ev);
        if let Some(vertex) = singular {
            let geometric_length = links.iter().map(|l| l.length()).sum();
            let orbit = Orbit { start, events, links, geometric_length, periodic: None };
            return Ok(PerpOutcome::Singular { vertex, orbit });
        }
        if perp {
            let o = trace(p, &start, 2 * m + 2)?;
            return Ok(match o.periodic {
                Some(_) => PerpOutcome::Periodic(o),
                None => PerpOutcome::Undecided { links: m },
            });
        }
        cur = next;
    }
    Ok(PerpOutcome::Undecided { links: max_links })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FootKind {
    Periodic { period_links: usize },
    Singular,
    Undecided,
}

#[derive(Debug, Clone)]
pub struct PerpScanResult<S> {
    pub side_index: usize,
    /// Runs of consecutive sampled feet with periodic perpendicular orbits,
    /// as `(first, last)` foot pairs.
    pub periodic_feet: Vec<(Point<S>, Point<S>)>,
    /// Feet whose perpendicular orbit runs into a vertex: every sampled one
    /// plus all found by shooting back from the vertices.
    pub singular_feet: Vec<Point<S>>,
    pub samples: Vec<(Point<S>, FootKind)>,
}

impl<S: Scalar> PerpScanResult<S> {
    pub fn count(&self, kind: fn(&FootKind) -> bool) -> usize {
        self.samples.iter().filter(|(_, k)| kind(k)).count()
    }
}

/// A singular foot on `side` together with the path from the vertex to it.
#[derive(Debug, Clone)]
pub struct SingularFoot<S> {
    pub foot: Point<S>,
    pub vertex: usize,
    pub path: Vec<Segment<S>>,
}

/// Every foot on `side` whose inward normal reaches a vertex within
/// `max_links` links, found by running the trajectory backwards from each
/// vertex along each floor of the normal direction.
pub fn singular_feet<S: Scalar>(p: &Polygon<S>, side: usize, max_links: usize) -> Result<Vec<SingularFoot<S>>, FlowError> {
    let normal = inward_normal_dir(p, side);
    let floors = direction_floors(p, &normal)?;
    let outward = normal.reversed();
    let mut out: Vec<SingularFoot<S>> = Vec::new();
    for vi in 0..p.len() {
        for d in &floors.directions {
            let back = d.reversed();
            if !p.points_inward_at_vertex(vi, back.vec()) {
                continue;
            }
            let mut cur = PhasePoint::new(p.vertex(vi).clone(), back);
            let mut path = Vec::new();
            for _ in 0..max_links {
                let (ev, next) = step(p, &cur)?;
                path.push(Segment { a: cur.q.clone(), b: ev.hit.clone() });
                if ev.singular {
                    break;
                }
                if perpendicular_hit(p, &ev) {
                    if ev.side_index == side && ev.incoming.same_ray(&outward) && open_side_contains(p, side, &ev.hit) {
                        if !out.iter().any(|f| f.foot.approx_eq(&ev.hit)) {
                            out.push(SingularFoot { foot: ev.hit.clone(), vertex: vi, path });
                        }
                    }
                    break;
                }
                cur = next;
            }
        }
    }
    Ok(out)
}

/// Classifies `samples` evenly spaced feet on `side` and adds the exact
/// singular feet.
pub fn perp_scan<S: Scalar>(p: &Polygon<S>, side: usize, max_links: usize, samples: usize) -> Result<PerpScanResult<S>, FlowError> {
    if side >= p.len() {
        return Err(FlowError::BadSide(side));
    }
    let s = p.side(side).clone();
    let mut classified = Vec::with_capacity(samples);
    for i in 0..samples {
        let u = S::from_frac(2 * i as i64 + 1, 2 * samples as i64);
        let foot = s.a.clone() + s.vector().scale(&u);
        let kind = match perpendicular_orbit(p, side, &foot, max_links)? {
            PerpOutcome::Periodic(o) => FootKind::Periodic { period_links: o.periodic.expect("periodic").links },
            PerpOutcome::Singular { .. } => FootKind::Singular,
            PerpOutcome::Undecided { .. } => FootKind::Undecided,
        };
        classified.push((foot, kind));
    }
    let mut runs: Vec<(Point<S>, Point<S>)> = Vec::new();
    let mut in_run = false;
    for (foot, kind) in &classified {
        if matches!(kind, FootKind::Periodic { .. }) {
            if in_run {
                runs.last_mut().expect("open run").1 = foot.clone();
            } else {
                runs.push((foot.clone(), foot.clone()));
                in_run = true;
            }
        } else {
            in_run = false;
        }
    }
    let mut singular: Vec<Point<S>> = singular_feet(p, side, max_links)?.into_iter().map(|f| f.foot).collect();
    for (foot, kind) in &classified {
        if *kind == FootKind::Singular && !singular.iter().any(|x| x.approx_eq(foot)) {
            singular.push(foot.clone());
        }
    }
    Ok(PerpScanResult { side_index: side, periodic_feet: runs, singular_feet: singular, samples: classified })
}

#[derive(Debug, Clone)]
pub struct ExceptionalReport<S> {
    /// Links of the perpendicular generalized diagonals of every side.
    pub segments: Vec<(usize, Segment<S>)>,
    /// Triangles only: points where diagonals of two different sides cross.
    pub candidates: Option<Vec<Point<S>>>,
    /// Whether diagonals of two different sides share a collinear stretch,
    /// which would make the crossing set infinite.
    pub collinear_overlap: bool,
    /// Random interior points with the number of sides whose perpendicular
    /// periodic orbit passes through them.
    pub samples: Vec<(Point<S>, usize)>,
}

impl<S> ExceptionalReport<S> {
    pub fn all_covered(&self) -> bool {
        self.samples.iter().all(|(_, c)| *c >= 1)
    }

    pub fn double_covered(&self) -> Vec<bool> {
        self.samples.iter().map(|(_, c)| *c >= 2).collect()
    }
}

fn collinear_overlap<S: Scalar>(a: &Segment<S>, b: &Segment<S>) -> bool {
    let d = a.vector();
    if !d.cross(&b.vector()).is_zero_tol() || !d.cross(&(b.a.clone() - a.a.clone())).is_zero_tol() {
        return false;
    }
    let len2 = d.norm2();
    let (u, v) = ordered(
        (b.a.clone() - a.a.clone()).dot(&d) / len2.clone(),
        (b.b.clone() - a.a.clone()).dot(&d) / len2,
    );
    let lo = if u.is_pos() { u } else { S::zero() };
    let hi = if v < S::one() { v } else { S::one() };
    (hi - lo).is_pos()
}

fn segment_crossing<S: Scalar>(a: &Segment<S>, b: &Segment<S>) -> Option<Point<S>> {
    let (d, e) = (a.vector(), b.vector());
    let den = d.cross(&e);
    if den.is_zero_tol() {
        return None;
    }
    let w = b.a.clone() - a.a.clone();
    let t = w.cross(&e) / den.clone();
    let u = w.cross(&d) / den;
    let inside = |x: &S| !x.is_neg() && !(x.clone() - S::one()).is_pos();
    (inside(&t) && inside(&u)).then(|| a.a.clone() + d.scale(&t))
}

/// Number of sides whose perpendicular through `q` lands in the open side
/// and closes up into a periodic orbit.
pub fn perpendicular_cover<S: Scalar>(p: &Polygon<S>, q: &Point<S>, max_links: usize) -> usize {
    (0..p.len())
        .filter(|&i| {
            let s = p.side(i);
            let e = s.vector();
            let u = (q.clone() - s.a.clone()).dot(&e) / e.norm2();
            if !u.is_pos() || !(S::one() - u.clone()).is_pos() {
                return false;
            }
            let foot = s.a.clone() + e.scale(&u);
            matches!(perpendicular_orbit(p, i, &foot, max_links), Ok(PerpOutcome::Periodic(_)))
        })
        .count()
}

/// Data on the set of points that no periodic orbit passes through, for a
/// convex table.
pub fn exceptional_set_report<S: Scalar>(
    p: &Polygon<S>,
    max_links: usize,
    samples: usize,
    seed: u64,
) -> Result<ExceptionalReport<S>, FlowError> {
    if !p.is_convex() {
        return Err(PolygonError::NotConvex.into());
    }
    let mut segments = Vec::new();
    for i in 0..p.len() {
        for f in singular_feet(p, i, max_links)? {
            segments.extend(f.path.into_iter().map(|s| (i, s)));
        }
    }
    let mut overlap = false;
    for (x, (i, a)) in segments.iter().enumerate() {
        for (j, b) in &segments[x + 1..] {
            overlap |= i != j && collinear_overlap(a, b);
        }
    }
    let candidates = (p.len() == 3).then(|| {
        let mut pts: Vec<Point<S>> = Vec::new();
        for (x, (i, a)) in segments.iter().enumerate() {
            for (j, b) in &segments[x + 1..] {
                if i == j {
                    continue;
                }
                if let Some(c) = segment_crossing(a, b) {
                    if !pts.iter().any(|y| y.approx_eq(&c)) {
                        pts.push(c);
                    }
                }
            }
        }
        pts
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = p.bbox();
    let mut pts = Vec::with_capacity(samples);
    let grain = 1 << 20;
    while pts.len() < samples {
        let fx = S::from_frac(rng.gen_range(1..grain), grain);
        let fy = S::from_frac(rng.gen_range(1..grain), grain);
        let q = Point::new(
            lo.x.clone() + (hi.x.clone() - lo.x.clone()) * fx,
            lo.y.clone() + (hi.y.clone() - lo.y.clone()) * fy,
        );
        if p.contains(&q) == Containment::Inside {
            let c = perpendicular_cover(p, &q, max_links);
            pts.push((q, c));
        }
    }
    Ok(ExceptionalReport { segments, candidates, collinear_overlap: overlap, samples: pts })
}

/// Length of the part of `s` inside the open box `(lo, hi)`.
pub fn open_box_overlap<S: Scalar>(s: &Segment<S>, lo: &Point<S>, hi: &Point<S>) -> f64 {
    let d = s.vector();
    let mut t0 = S::zero();
    let mut t1 = S::one();
    for (a, da, l, h) in [(&s.a.x, &d.x, &lo.x, &hi.x), (&s.a.y, &d.y, &lo.y, &hi.y)] {
        if da.is_zero_tol() {
            if !(a.clone() - l.clone()).is_pos() || !(h.clone() - a.clone()).is_pos() {
                return 0.0;
            }
            continue;
        }
        let ta = (l.clone() - a.clone()) / da.clone();
        let tb = (h.clone() - a.clone()) / da.clone();
        let (ta, tb) = ordered(ta, tb);
        if ta > t0 {
            t0 = ta;
        }
        if tb < t1 {
            t1 = tb;
        }
    }
    let span = t1 - t0;
    if span.is_pos() {
        span.to_f64_lossy() * s.length()
    } else {
        0.0
    }
}

/// The L-shaped table of three unit squares with its right-hand square.
pub fn lshape_table<S: Scalar>() -> (Polygon<S>, (Point<S>, Point<S>)) {
    (shapes::l_shape(), (Point::from_ints(1, 0), Point::from_ints(2, 1)))
}

/// Length of `o` inside the open right-hand square of the L-shaped table.
pub fn right_square_overlap<S: Scalar>(o: &Orbit<S>) -> f64 {
    let (_, (lo, hi)) = lshape_table::<S>();
    o.links.iter().map(|l| open_box_overlap(l, &lo, &hi)).sum()
}

/// The `k`-th member of a family of periodic orbits in the L-shaped table
/// that stay in the two left squares: slope `2k`, launched from the left
/// wall, with `2k + 2` links.
///
/// Unfolding the left column vertically, the ray from `(0, c)` reaches
/// `x = 1` at height `c + 2k`. It must fold into the wall segment `1 < y < 2`
/// there, so it bounces back instead of entering the right square; after the
/// return trip the unfolded height is `c + 4k`, congruent to `c` modulo the
/// vertical period 4, which closes the orbit. The launch height is the
/// midpoint of the admissible interval.
pub fn lshape_orbit<S: Scalar>(k: usize) -> Result<(Polygon<S>, Orbit<S>), FlowError> {
    let k = k.max(1);
    let (table, _) = lshape_table::<S>();
    let two_k = 2 * k as i64;
    // c + 2k (mod 4) must lie in (1, 3) minus the corner height 2.
    let shift = two_k.rem_euclid(4);
    let (a, b) = if shift == 2 { (0, 1) } else { (1, 2) };
    let c = S::from_frac(a + b, 2);
    let start = PhasePoint::new(Point::new(S::zero(), c), Direction::from_ints(1, two_k)?);
    let o = trace(&table, &start, 2 * k + 2)?;
    match o.periodic {
        Some(per) if per.links == 2 * k + 2 && !o.has_singular_event() => Ok((table, o)),
        _ => Err(FlowError::NotPeriodic),
    }
}
