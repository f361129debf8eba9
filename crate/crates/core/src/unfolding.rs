//! Unfolding: corridors of reflected tables, generalized diagonals, the
//! separation angle around a diagonal-free direction, and corridor branching.

use std::cmp::Ordering;
use std::collections::BTreeSet;

use crate::error::FlowError;
use crate::flow::{run_links, Orbit, PhasePoint};
use crate::geom::{ray_segment_intersection, Direction, Isometry, Point, RayHit, Segment};
use crate::polygon::{floor_group, Polygon};
use crate::scalar::{angle_distance, Scalar};

/// `copies[0]` is the identity and `copies[k+1] = copies[k] ∘ R(word[k])`.
pub fn copies_for_word<S: Scalar>(p: &Polygon<S>, word: &[usize]) -> Vec<Isometry<S>> {
    let mut copies = Vec::with_capacity(word.len() + 1);
    copies.push(Isometry::identity());
    for &w in word {
        let next = copies.last().expect("nonempty").compose(p.reflection(w));
        copies.push(next);
    }
    copies
}

/// The isometry carrying the base table onto the copy reached after `word`.
pub fn compose_word<S: Scalar>(p: &Polygon<S>, word: &[usize]) -> Isometry<S> {
    word.iter()
        .fold(Isometry::identity(), |acc, &w| acc.compose(p.reflection(w)))
}

/// Open cone of directions, counterclockwise from `lo` to `hi`, narrower than π.
#[derive(Debug, Clone)]
pub struct Cone<S> {
    pub apex: Point<S>,
    pub lo: Direction<S>,
    pub hi: Direction<S>,
}

impl<S: Scalar> Cone<S> {
    pub fn contains(&self, d: &Point<S>) -> bool {
        self.lo.vec().cross(d).is_pos() && d.cross(self.hi.vec()).is_pos()
    }

    /// Angular interval `[start, start + width]` (radians).
    pub fn angle_range(&self) -> (f64, f64) {
        let a = self.lo.angle();
        let b = self.hi.angle();
        (a, (b - a).rem_euclid(std::f64::consts::TAU))
    }

    fn map(&self, iso: &Isometry<S>) -> Self {
        let (lo, hi) = (iso.apply_dir(&self.lo), iso.apply_dir(&self.hi));
        let (lo, hi) = if iso.det().is_neg() { (hi, lo) } else { (lo, hi) };
        Cone { apex: iso.apply(&self.apex), lo, hi }
    }
}

#[derive(Debug, Clone)]
pub struct Corridor<S> {
    /// Side crossed when leaving each copy; for enumerated corridors the last
    /// entry is the exit side of the final copy.
    pub word: Vec<usize>,
    pub copies: Vec<Isometry<S>>,
    pub beam: Option<Cone<S>>,
}

impl<S: Scalar> Corridor<S> {
    /// Number of copies.
    pub fn len(&self) -> usize {
        self.copies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.copies.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct GeneralizedDiagonal<S> {
    pub start_vertex: usize,
    /// `(copy index, vertex index)` of the end point.
    pub end_vertex_copy: (usize, usize),
    pub link_count: usize,
    /// Initial direction at the start vertex.
    pub direction: Direction<S>,
    pub unfolded_segment: Segment<S>,
    /// Sides crossed, `link_count - 1` entries.
    pub word: Vec<usize>,
}

impl<S: Scalar> GeneralizedDiagonal<S> {
    pub fn end_vertex(&self) -> usize {
        self.end_vertex_copy.1
    }

    fn key(&self) -> (usize, Vec<usize>, usize) {
        (self.start_vertex, self.word.clone(), self.end_vertex())
    }

    fn reversed_key(&self) -> (usize, Vec<usize>, usize) {
        let mut w = self.word.clone();
        w.reverse();
        (self.end_vertex(), w, self.start_vertex)
    }

    /// The same segment traversed from its end vertex.
    pub fn reversed(&self, p: &Polygon<S>) -> Self {
        let last = compose_word(p, &self.word);
        let inv = last.inverse();
        let mut word = self.word.clone();
        word.reverse();
        GeneralizedDiagonal {
            start_vertex: self.end_vertex(),
            end_vertex_copy: (self.link_count - 1, self.start_vertex),
            link_count: self.link_count,
            direction: inv.apply_dir(&self.direction.reversed()),
            unfolded_segment: self.unfolded_segment.reversed().map(&inv),
            word,
        }
    }

    /// Text record `links word direction start_vertex`.
    pub fn to_record(&self) -> String {
        let word = if self.word.is_empty() {
            "-".to_string()
        } else {
            self.word.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
        };
        format!(
            "{} {} {}:{} {}",
            self.link_count,
            word,
            self.direction.dx().to_exact_string(),
            self.direction.dy().to_exact_string(),
            self.start_vertex
        )
    }
}

/// Result of [`unfold`].
#[derive(Debug, Clone)]
pub struct Unfolding<S> {
    pub corridor: Corridor<S>,
    pub segment: Segment<S>,
    /// Copy index holding each link (vertex continuations may add copies
    /// that no link passes through).
    pub link_copy: Vec<usize>,
    pub orbit: Orbit<S>,
}

/// Unfolds the first `n` links of the trajectory of `s` into a straight segment.
pub fn unfold<S: Scalar>(p: &Polygon<S>, s: &PhasePoint<S>, n: usize) -> Result<Unfolding<S>, FlowError> {
    let n = n.max(1);
    let orbit = run_links(p, s, n)?;
    let mut word = Vec::new();
    let mut link_copy = vec![0];
    for ev in &orbit.events[..n - 1] {
        word.extend(ev.reflections.iter().copied());
        link_copy.push(word.len());
    }
    let copies = copies_for_word(p, &word);
    let end = copies[link_copy[n - 1]].apply(&orbit.events[n - 1].hit);
    Ok(Unfolding {
        corridor: Corridor { word, copies, beam: None },
        segment: Segment { a: s.q.clone(), b: end },
        link_copy,
        orbit,
    })
}

impl<S: Scalar> Unfolding<S> {
    /// Unfolded image of every bounce point, in order.
    pub fn unfolded_hits(&self) -> Vec<Point<S>> {
        self.orbit
            .events
            .iter()
            .zip(&self.link_copy)
            .map(|(ev, &c)| self.corridor.copies[c].apply(&ev.hit))
            .collect()
    }

    /// Largest distance of an unfolded bounce point from the straight
    /// segment's line. Exactly zero in the rational backend.
    pub fn collinearity_residual(&self) -> f64 {
        let d = self.segment.vector();
        let len = d.norm();
        self.unfolded_hits()
            .iter()
            .map(|u| (d.cross(&(u.clone() - self.segment.a.clone())).to_f64_lossy() / len).abs())
            .fold(0.0, f64::max)
    }

    pub fn is_exactly_collinear(&self) -> bool {
        let d = self.segment.vector();
        self.unfolded_hits()
            .iter()
            .all(|u| d.cross(&(u.clone() - self.segment.a.clone())).is_zero_tol())
    }

    /// Folds the straight segment back into the table: each crossing point is
    /// recomputed by intersecting the segment's line with the crossed side's
    /// image, then mapped back through the inverse copy.
    pub fn fold_back(&self, p: &Polygon<S>) -> Vec<Segment<S>> {
        let dir = self.segment.vector();
        let a0 = self.segment.a.clone();
        let n = self.orbit.events.len();
        let mut out = Vec::with_capacity(n);
        let mut prev = a0.clone();
        for i in 0..n {
            let copy = &self.corridor.copies[self.link_copy[i]];
            let end = if i + 1 == n {
                self.segment.b.clone()
            } else {
                let side = p.side(self.orbit.events[i].side_index).map(copy);
                line_intersection(&a0, &dir, &side).unwrap_or_else(|| self.segment.b.clone())
            };
            let inv = copy.inverse();
            out.push(Segment { a: inv.apply(&prev), b: inv.apply(&end) });
            prev = end;
        }
        out
    }
}

/// Intersection of the line `a + t·d` with the line through `s`.
fn line_intersection<S: Scalar>(a: &Point<S>, d: &Point<S>, s: &Segment<S>) -> Option<Point<S>> {
    let e = s.vector();
    let den = d.cross(&e);
    if den.is_zero_tol() {
        return None;
    }
    let t = (s.a.clone() - a.clone()).cross(&e) / den;
    Some(a.clone() + d.scale(&t))
}

/// What the search callback is shown.
pub enum Found<'a, S> {
    Corridor(&'a Corridor<S>),
    Diagonal(&'a GeneralizedDiagonal<S>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Visit {
    Continue,
    /// Do not extend this corridor.
    Prune,
    Stop,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchLimits {
    /// Longest corridor (number of copies) to generate.
    pub max_len: usize,
    /// Cap on expanded corridor nodes.
    pub budget: Option<usize>,
    /// Only directions within `(θ, δ)` of the window are explored.
    pub window: Option<(f64, f64)>,
}

impl SearchLimits {
    pub fn depth(max_len: usize) -> Self {
        SearchLimits { max_len, budget: None, window: None }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub expanded: usize,
    pub stopped: bool,
    pub budget_exhausted: bool,
}

struct Node<S> {
    word: Vec<usize>,
    copies: Vec<Isometry<S>>,
    cone: Cone<S>,
    entry: Option<usize>,
}

/// First boundary hit beyond the entry side (when given).
fn first_hit_after<S: Scalar>(
    p: &Polygon<S>,
    q: &Point<S>,
    d: &Direction<S>,
    entry: Option<usize>,
) -> Option<(usize, RayHit<S>)> {
    let t_entry = match entry {
        Some(e) => ray_segment_intersection(q, d, p.side(e))?.t,
        None => S::zero(),
    };
    let mut best: Option<(usize, RayHit<S>)> = None;
    for (i, side) in p.sides().iter().enumerate() {
        if Some(i) == entry {
            continue;
        }
        if let Some(h) = ray_segment_intersection(q, d, side) {
            if !(h.t.clone() - t_entry.clone()).is_pos() {
                continue;
            }
            if best.as_ref().is_none_or(|(_, b)| h.t < b.t) {
                best = Some((i, h));
            }
        }
    }
    best
}

fn window_meets(cone_range: (f64, f64), window: (f64, f64)) -> bool {
    let (start, width) = cone_range;
    let (theta, delta) = window;
    let mid = start + width / 2.0;
    angle_distance(mid, theta) <= width / 2.0 + delta + 1e-12
}

/// Interior cone(s) at vertex `vi`, split so each is narrower than π.
fn root_cones<S: Scalar>(p: &Polygon<S>, vi: usize) -> (Vec<Cone<S>>, Vec<Direction<S>>) {
    let n = p.len();
    let v = p.vertex(vi).clone();
    let lo = Direction::from_vec(p.vertex(vi + 1).clone() - v.clone()).expect("distinct");
    let hi = Direction::from_vec(p.vertex(vi + n - 1).clone() - v.clone()).expect("distinct");
    let mut cones = Vec::new();
    let mut splits = Vec::new();
    let mut cur = lo;
    for _ in 0..4 {
        if cur.vec().cross(hi.vec()).is_pos() {
            cones.push(Cone { apex: v.clone(), lo: cur, hi: hi.clone() });
            break;
        }
        let m = Direction::from_vec(cur.vec().perp()).expect("nonzero");
        cones.push(Cone { apex: v.clone(), lo: cur, hi: m.clone() });
        splits.push(m.clone());
        cur = m;
    }
    (cones, splits)
}

/// Depth-first search over the corridors of beams apexed at `from_vertex`.
///
/// Each node is a copy reached by an open cone of directions. Inside the copy
/// the cone is cut at the directions of the copy's vertices; every piece exits
/// through a single side and becomes a child corridor. Vertices seen directly
/// from the apex are generalized diagonal endpoints.
pub fn walk_corridors<S: Scalar, F>(p: &Polygon<S>, from_vertex: usize, limits: SearchLimits, mut f: F) -> SearchStats
where
    F: FnMut(Found<'_, S>) -> Visit,
{
    let mut stats = SearchStats::default();
    if limits.max_len == 0 {
        return stats;
    }
    let apex = p.vertex(from_vertex).clone();
    let (cones, splits) = root_cones(p, from_vertex);
    // Vertices lying exactly on an internal split direction.
    for m in &splits {
        if let Some((_, h)) = first_hit_after(p, &apex, m, None) {
            if h.at_endpoint {
                let x = p.vertex_index(&h.hit).expect("vertex");
                let d = GeneralizedDiagonal {
                    start_vertex: from_vertex,
                    end_vertex_copy: (0, x),
                    link_count: 1,
                    direction: m.clone(),
                    unfolded_segment: Segment { a: apex.clone(), b: h.hit.clone() },
                    word: Vec::new(),
                };
                if f(Found::Diagonal(&d)) == Visit::Stop {
                    stats.stopped = true;
                    return stats;
                }
            }
        }
    }
    let mut stack: Vec<Node<S>> = cones
        .into_iter()
        .rev()
        .map(|cone| Node { word: Vec::new(), copies: vec![Isometry::identity()], cone, entry: None })
        .collect();
    while let Some(node) = stack.pop() {
        if let Some(b) = limits.budget {
            if stats.expanded >= b {
                stats.budget_exhausted = true;
                return stats;
            }
        }
        stats.expanded += 1;
        let children = match expand(p, from_vertex, &node, limits, &mut f) {
            Some(c) => c,
            None => {
                stats.stopped = true;
                return stats;
            }
        };
        for c in children.into_iter().rev() {
            stack.push(c);
        }
    }
    stats
}

/// Processes one node; `None` means the callback asked to stop.
fn expand<S: Scalar, F>(
    p: &Polygon<S>,
    from_vertex: usize,
    node: &Node<S>,
    limits: SearchLimits,
    f: &mut F,
) -> Option<Vec<Node<S>>>
where
    F: FnMut(Found<'_, S>) -> Visit,
{
    let k = node.copies.len() - 1;
    let copy = &node.copies[k];
    let inv = copy.inverse();
    let base_cone = node.cone.map(&inv);
    let apex = base_cone.apex.clone();

    // Vertex directions strictly inside the cone, counterclockwise.
    let mut crit: Vec<(Point<S>, usize)> = (0..p.len())
        .filter(|&x| !(k == 0 && x == from_vertex))
        .map(|x| (p.vertex(x).clone() - apex.clone(), x))
        .filter(|(d, _)| base_cone.contains(d))
        .collect();
    crit.sort_by(|(a, _), (b, _)| {
        let c = a.cross(b).sign_cmp();
        if c == Ordering::Equal {
            a.norm2().partial_cmp(&b.norm2()).unwrap_or(Ordering::Equal)
        } else {
            c.reverse()
        }
    });

    let mut visible = Vec::with_capacity(crit.len());
    for (d, x) in &crit {
        let dir = Direction::from_vec(d.clone()).expect("nonzero");
        let seen = match first_hit_after(p, &apex, &dir, node.entry) {
            Some((_, h)) => h.at_endpoint && h.hit.approx_eq(p.vertex(*x)),
            None => false,
        };
        visible.push(seen);
        if seen {
            let in_window = limits
                .window
                .is_none_or(|w| angle_distance(copy.apply_dir(&dir).angle(), w.0) <= w.1);
            if in_window {
                let end = copy.apply(p.vertex(*x));
                let diag = GeneralizedDiagonal {
                    start_vertex: from_vertex,
                    end_vertex_copy: (k, *x),
                    link_count: k + 1,
                    direction: Direction::from_vec(end.clone() - node.cone.apex.clone()).expect("nonzero"),
                    unfolded_segment: Segment { a: node.cone.apex.clone(), b: end },
                    word: node.word.clone(),
                };
                if f(Found::Diagonal(&diag)) == Visit::Stop {
                    return None;
                }
            }
        }
    }

    // Boundaries of the pieces, skipping repeated directions.
    let mut bounds: Vec<(Direction<S>, bool)> = vec![(base_cone.lo.clone(), false)];
    for ((d, _), seen) in crit.iter().zip(&visible) {
        let dir = Direction::from_vec(d.clone()).expect("nonzero");
        match bounds.last_mut() {
            Some(last) if last.0.same_ray(&dir) => last.1 |= *seen,
            _ => bounds.push((dir, *seen)),
        }
    }
    bounds.push((base_cone.hi.clone(), false));

    // (lo, hi, exit side)
    let mut pieces: Vec<(Direction<S>, Direction<S>, usize)> = Vec::new();
    let mut last_sep_visible = true;
    for w in bounds.windows(2) {
        let (u, v) = (&w[0].0, &w[1].0);
        let sample = Direction::from_vec(u.vec().clone() + v.vec().clone()).expect("cone narrower than π");
        let exit = match first_hit_after(p, &apex, &sample, node.entry) {
            Some((side, h)) if !h.at_endpoint => side,
            _ => {
                last_sep_visible = true;
                continue;
            }
        };
        match pieces.last_mut() {
            Some(last) if last.2 == exit && !last_sep_visible && last.1.same_ray(u) => last.1 = v.clone(),
            _ => pieces.push((u.clone(), v.clone(), exit)),
        }
        last_sep_visible = w[1].1;
    }

    let mut children = Vec::new();
    for (lo, hi, exit) in pieces {
        let piece = Cone { apex: apex.clone(), lo, hi }.map(copy);
        if let Some(win) = limits.window {
            if !window_meets(piece.angle_range(), win) {
                continue;
            }
        }
        let mut word = node.word.clone();
        word.push(exit);
        let corridor = Corridor { word, copies: node.copies.clone(), beam: Some(piece) };
        match f(Found::Corridor(&corridor)) {
            Visit::Stop => return None,
            Visit::Prune => continue,
            Visit::Continue => {}
        }
        if k + 1 < limits.max_len {
            let mut copies = corridor.copies;
            let next = copy.compose(p.reflection(exit));
            copies.push(next);
            children.push(Node {
                word: corridor.word,
                copies,
                cone: corridor.beam.expect("set above"),
                entry: Some(exit),
            });
        }
    }
    Some(children)
}

/// All feasible corridors of length ≤ `max_len` from `from_vertex`.
pub fn enumerate_corridors<S: Scalar>(p: &Polygon<S>, from_vertex: usize, max_len: usize) -> Vec<Corridor<S>> {
    let mut out = Vec::new();
    walk_corridors(p, from_vertex, SearchLimits::depth(max_len), |found| {
        if let Found::Corridor(c) = found {
            out.push(c.clone());
        }
        Visit::Continue
    });
    out
}

/// Generalized diagonals with at most `max_links` links, one per geometric
/// segment (a diagonal and its reverse count once), sorted by word.
pub fn enumerate_generalized_diagonals<S: Scalar>(p: &Polygon<S>, max_links: usize) -> Vec<GeneralizedDiagonal<S>> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for v in 0..p.len() {
        walk_corridors(p, v, SearchLimits::depth(max_links), |found| {
            if let Found::Diagonal(d) = found {
                let (key, rkey) = (d.key(), d.reversed_key());
                if key <= rkey && seen.insert(key) {
                    out.push(d.clone());
                }
            }
            Visit::Continue
        });
    }
    out.sort_by(|a, b| {
        (a.word.len(), &a.word, a.start_vertex, a.end_vertex()).cmp(&(b.word.len(), &b.word, b.start_vertex, b.end_vertex()))
    });
    out
}

/// Smallest angular distance from `theta` to any floor-group image of a
/// diagonal direction (both orientations) with at most `max_links` links.
pub fn separation_angle<S: Scalar>(p: &Polygon<S>, theta: &Direction<S>, max_links: usize) -> Result<f64, FlowError> {
    let group = floor_group(p)?;
    let diags = enumerate_generalized_diagonals(p, max_links);
    let mut best = f64::INFINITY;
    for d in &diags {
        for dir in [d.direction.clone(), d.direction.reversed()] {
            for g in &group {
                let img = g.apply_dir(&dir);
                if img.same_ray(theta) {
                    return Err(FlowError::DiagonalDirection(format!("{:?}", theta.to_f64())));
                }
                best = best.min(angle_distance(img.angle(), theta.angle()));
            }
        }
    }
    Ok(best)
}

/// δ_N: the separation angle over diagonals of length ≤ 2N. Any direction
/// strictly closer than this to `theta` has no such diagonal on its floors.
pub fn delta_n<S: Scalar>(p: &Polygon<S>, theta: &Direction<S>, n: usize) -> Result<f64, FlowError> {
    separation_angle(p, theta, 2 * n)
}

/// A vertex image where two corridors part: `(copy index, vertex index, unfolded point)`.
pub type BranchVertex<S> = (usize, usize, Point<S>);

#[derive(Debug, Clone)]
pub struct BranchReport<S> {
    pub j_fwd: usize,
    pub j_bwd: usize,
    pub vertex_fwd: Option<BranchVertex<S>>,
    pub vertex_bwd: Option<BranchVertex<S>>,
    pub diagonal: Option<GeneralizedDiagonal<S>>,
}

fn common_corridor_len(a: &[usize], b: &[usize], n: usize) -> usize {
    let lim = n.saturating_sub(1);
    let common = a.iter().zip(b).take(lim).take_while(|(x, y)| x == y).count();
    (common + 1).min(n)
}

/// Vertex images of copy `c` strictly between the rays `da` and `db` from `q0`.
fn branch_candidates<S: Scalar>(
    p: &Polygon<S>,
    q0: &Point<S>,
    copy_index: usize,
    copy: &Isometry<S>,
    da: &Direction<S>,
    db: &Direction<S>,
) -> Vec<BranchVertex<S>> {
    let (lo, hi) = if da.vec().cross(db.vec()).is_pos() { (da, db) } else { (db, da) };
    let mut out: Vec<BranchVertex<S>> = (0..p.len())
        .map(|x| (copy_index, x, copy.apply(p.vertex(x))))
        .filter(|(_, _, u)| {
            let d = u.clone() - q0.clone();
            lo.vec().cross(&d).is_pos() && d.cross(hi.vec()).is_pos()
        })
        .collect();
    out.sort_by(|a, b| {
        (a.2.clone() - q0.clone())
            .norm2()
            .partial_cmp(&(b.2.clone() - q0.clone()).norm2())
            .unwrap_or(Ordering::Equal)
    });
    out
}

fn flat_word<S: Scalar>(o: &Orbit<S>) -> Vec<usize> {
    o.word()
}

/// Compares the corridors of `(q0, θ)` and `(q0, θ′)` forward and backward
/// over `n` copies. When both branch, the segment joining the two branching
/// vertices is certified as a generalized diagonal of `j_fwd + j_bwd - 1` links.
pub fn corridor_coincidence<S: Scalar>(
    p: &Polygon<S>,
    q0: &Point<S>,
    theta: &Direction<S>,
    theta2: &Direction<S>,
    n: usize,
) -> Result<BranchReport<S>, FlowError> {
    let n = n.max(1);
    let fa = run_links(p, &PhasePoint::new(q0.clone(), theta.clone()), n)?;
    let fb = run_links(p, &PhasePoint::new(q0.clone(), theta2.clone()), n)?;
    let ba = run_links(p, &PhasePoint::new(q0.clone(), theta.reversed()), n)?;
    let bb = run_links(p, &PhasePoint::new(q0.clone(), theta2.reversed()), n)?;
    let (wfa, wfb, wba, wbb) = (flat_word(&fa), flat_word(&fb), flat_word(&ba), flat_word(&bb));
    let j_fwd = common_corridor_len(&wfa, &wfb, n);
    let j_bwd = common_corridor_len(&wba, &wbb, n);

    let mut report = BranchReport { j_fwd, j_bwd, vertex_fwd: None, vertex_bwd: None, diagonal: None };
    if j_fwd >= n || j_bwd >= n {
        return Ok(report);
    }
    let fcopy = compose_word(p, &wfa[..j_fwd - 1]);
    let bcopy = compose_word(p, &wba[..j_bwd - 1]);
    let fcands = branch_candidates(p, q0, j_fwd - 1, &fcopy, theta, theta2);
    let bcands = branch_candidates(p, q0, j_bwd - 1, &bcopy, &theta.reversed(), &theta2.reversed());
    report.vertex_fwd = fcands.first().cloned();
    report.vertex_bwd = bcands.first().cloned();
    let links = j_fwd + j_bwd - 1;
    for a in &fcands {
        for b in &bcands {
            if let Some(d) = certify_unfolded_diagonal(p, &bcopy, b.1, &b.2, &a.2, links) {
                report.vertex_fwd = Some(a.clone());
                report.vertex_bwd = Some(b.clone());
                report.diagonal = Some(d);
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Checks by tracing that the straight segment from `from` (the image of base
/// vertex `from_vertex` under `from_copy`) to `to` folds into a trajectory that
/// leaves a vertex and first meets a vertex after exactly `links` links,
/// ending at `to`.
pub fn certify_unfolded_diagonal<S: Scalar>(
    p: &Polygon<S>,
    from_copy: &Isometry<S>,
    from_vertex: usize,
    from: &Point<S>,
    to: &Point<S>,
    links: usize,
) -> Option<GeneralizedDiagonal<S>> {
    let inv = from_copy.inverse();
    let dir = Direction::from_vec(inv.apply_linear(&(to.clone() - from.clone()))).ok()?;
    let start = PhasePoint::new(p.vertex(from_vertex).clone(), dir.clone());
    let orbit = run_links(p, &start, links).ok()?;
    let (last, body) = orbit.events.split_last()?;
    if body.iter().any(|e| e.singular) || !last.singular {
        return None;
    }
    let word: Vec<usize> = body.iter().flat_map(|e| e.reflections.iter().copied()).collect();
    let copy = compose_word(p, &word);
    let end = copy.apply(&last.hit);
    if !from_copy.apply(&end).approx_eq(to) {
        return None;
    }
    Some(GeneralizedDiagonal {
        start_vertex: from_vertex,
        end_vertex_copy: (links - 1, last.vertex_index.expect("singular")),
        link_count: links,
        direction: dir,
        unfolded_segment: Segment { a: p.vertex(from_vertex).clone(), b: end },
        word,
    })
}

/// Whether `d` (or its reverse) appears in `table`.
pub fn diagonal_in_table<S: Scalar>(d: &GeneralizedDiagonal<S>, table: &[GeneralizedDiagonal<S>]) -> bool {
    let (k, r) = (d.key(), d.reversed_key());
    table.iter().any(|t| t.key() == k || t.key() == r)
}

/// Distance between the unfolded trajectories of `(q0, θ)` and `(q0, θ′)`
/// after the same travelled length: the shorter of the two `n`-link
/// unfolded segments.
pub fn shadowing_gap<S: Scalar>(
    p: &Polygon<S>,
    q0: &Point<S>,
    theta: &Direction<S>,
    theta2: &Direction<S>,
    n: usize,
) -> Result<f64, FlowError> {
    let ua = unfold(p, &PhasePoint::new(q0.clone(), theta.clone()), n)?;
    let ub = unfold(p, &PhasePoint::new(q0.clone(), theta2.clone()), n)?;
    let t = ua.segment.length().min(ub.segment.length());
    let (ax, ay) = theta.unit_f64();
    let (bx, by) = theta2.unit_f64();
    Ok(t * (ax - bx).hypot(ay - by))
}
